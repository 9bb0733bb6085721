use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64;
use num_integer::Integer;
use rayon::prelude::*;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use super::grid::ObjectProfile;
use super::lg::LgModeSpec;
use crate::elements::{beam_splitter_matrix, BALANCED};
use crate::error::{Error, Result};

/// Channels below this fraction of the total spectral power are ignored by
/// symmetry detection.
pub const SIGNIFICANT_POWER: f64 = 1e-6;

/// Amplitude below which a correlated-imaging channel has no usable phase.
const PHASE_FLOOR: f64 = 1e-9;

/// LG family used for projection.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LgBasis {
    pub w0: f64,
    pub wavelength: f64,
    pub z: f64,
    pub l_max: u32,
    pub p_max: u32,
    /// Restrict to p = 0, as a single-photon detector without radial sorting.
    #[serde(default)]
    pub p_zero_only: bool,
}

impl LgBasis {
    pub fn at_waist(w0: f64, wavelength: f64, l_max: u32, p_max: u32) -> Self {
        Self { w0, wavelength, z: 0.0, l_max, p_max, p_zero_only: false }
    }

    pub fn channels(&self) -> Vec<(i32, u32)> {
        let l = self.l_max as i32;
        let p_top = if self.p_zero_only { 0 } else { self.p_max };
        (-l..=l).flat_map(|l| (0..=p_top).map(move |p| (l, p))).collect()
    }

    pub fn mode(&self, l: i32, p: u32) -> Result<LgModeSpec> {
        LgModeSpec::new(l, p, self.w0, self.wavelength, self.z)
    }
}

/// Spiral coefficients a_{lp} and the unprojected remainder ∥f∥² − Σ|a|².
#[derive(Debug, Clone, PartialEq)]
pub struct SpiralSpectrum {
    pub coefficients: BTreeMap<(i32, u32), Complex64>,
    pub object_norm_sqr: f64,
    pub residual: f64,
}

impl SpiralSpectrum {
    pub fn coefficient(&self, l: i32, p: u32) -> Complex64 {
        self.coefficients.get(&(l, p)).copied().unwrap_or_default()
    }

    pub fn power(&self, l: i32, p: u32) -> f64 {
        self.coefficient(l, p).norm_sqr()
    }

    /// Σ_p |a_{lp}|² per charge.
    pub fn charge_power(&self) -> BTreeMap<i32, f64> {
        let mut out = BTreeMap::new();
        for (&(l, _), a) in &self.coefficients {
            *out.entry(l).or_insert(0.0) += a.norm_sqr();
        }
        out
    }

    pub fn captured_power(&self) -> f64 {
        self.coefficients.values().map(|a| a.norm_sqr()).sum()
    }
}

/// Σ_j f(r_i, θ_j) e^{ilθ_j} Δθ for every ring, indexed by FFT bin.
fn angular_transform(f: &ObjectProfile) -> Vec<Vec<Complex64>> {
    let n = f.grid().n_theta();
    let fft = FftPlanner::new().plan_fft_inverse(n);
    let dtheta = f.grid().angular_weight();
    (0..f.grid().n_r())
        .map(|i| {
            let mut ring = f.ring(i).to_vec();
            fft.process(&mut ring);
            ring.iter_mut().for_each(|c| *c *= dtheta);
            ring
        })
        .collect()
}

/// a_{lp} = ∬ u*_{lp} f r dr dθ, radial Gauss-Legendre × angular DFT.
pub fn project_object(f: &ObjectProfile, basis: &LgBasis) -> Result<SpiralSpectrum> {
    let grid = f.grid();
    if grid.n_theta() < 4 * basis.l_max as usize {
        return Err(Error::Resolution(format!(
            "{} angular samples cannot resolve |l| ≤ {}; need at least {}",
            grid.n_theta(),
            basis.l_max,
            4 * basis.l_max
        )));
    }
    let rings = angular_transform(f);
    let n = grid.n_theta() as i32;
    let coefficients = basis
        .channels()
        .into_par_iter()
        .map(|(l, p)| {
            let mode = basis.mode(l, p)?;
            let k = l.rem_euclid(n) as usize;
            let a: Complex64 = grid
                .radii()
                .iter()
                .zip(grid.radial_weights())
                .zip(&rings)
                .map(|((&r, &w), ring)| mode.radial(r).conj() * ring[k] * w)
                .sum();
            Ok(((l, p), a))
        })
        .collect::<Result<BTreeMap<_, _>>>()?;
    let object_norm_sqr = f.norm_sqr();
    let captured: f64 = coefficients.values().map(|a| a.norm_sqr()).sum();
    Ok(SpiralSpectrum { coefficients, object_norm_sqr, residual: object_norm_sqr - captured })
}

/// f'(r, θ) = f(r, θ − θ₀). Shifts by whole grid steps are exact index
/// rotations; other angles use band-limited Fourier interpolation per ring.
pub fn rotate_object(f: &ObjectProfile, theta0: f64) -> Result<ObjectProfile> {
    let n = f.grid().n_theta();
    let steps = theta0.rem_euclid(2.0 * PI) / f.grid().angular_weight();
    let whole = steps.round();
    if (steps - whole).abs() < 1e-12 {
        let shift = whole as usize % n;
        let mut values = Vec::with_capacity(f.values().len());
        for i in 0..f.grid().n_r() {
            let ring = f.ring(i);
            values.extend((0..n).map(|j| ring[(j + n - shift) % n]));
        }
        return f.with_values(values);
    }
    let mut planner = FftPlanner::new();
    let forward = planner.plan_fft_forward(n);
    let inverse = planner.plan_fft_inverse(n);
    let mut values = Vec::with_capacity(f.values().len());
    for i in 0..f.grid().n_r() {
        let mut ring = f.ring(i).to_vec();
        forward.process(&mut ring);
        for (k, c) in ring.iter_mut().enumerate() {
            let factor = match (2 * k).cmp(&n) {
                std::cmp::Ordering::Less => Complex64::from_polar(1.0, -(k as f64) * theta0),
                // Nyquist term: keep the real-interpolant part.
                std::cmp::Ordering::Equal => Complex64::new((n as f64 / 2.0 * theta0).cos(), 0.0),
                std::cmp::Ordering::Greater => Complex64::from_polar(1.0, (n - k) as f64 * theta0),
            };
            *c *= factor / n as f64;
        }
        inverse.process(&mut ring);
        values.extend(ring);
    }
    f.with_values(values)
}

/// Recovered channel of correlated spiral imaging.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelatedChannel {
    /// Output-port intensities for reference phase steps 0, π/2, π, 3π/2.
    pub intensities: [f64; 4],
    pub visibility: f64,
    /// `None` when the channel is too weak for its phase to be defined.
    pub amplitude: Option<Complex64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CorrelatedSpectrum {
    pub channels: BTreeMap<(i32, u32), CorrelatedChannel>,
}

impl CorrelatedSpectrum {
    pub fn phase(&self, l: i32, p: u32) -> Option<f64> {
        self.channels.get(&(l, p)).and_then(|c| c.amplitude).map(|a| a.arg())
    }

    pub fn flagged(&self) -> Vec<(i32, u32)> {
        self.channels.iter().filter(|(_, c)| c.amplitude.is_none()).map(|(k, _)| *k).collect()
    }
}

/// Phase-resolved spectrum from interference with a reference arm. Each
/// channel's object amplitude meets the reference amplitude `reference(l, p)`
/// on a balanced splitter; the reference is stepped through four phases and
/// one output port is recorded. Amplitude and phase follow from the fringe.
pub fn correlated_phases(
    spectrum: &SpiralSpectrum,
    reference: impl Fn(i32, u32) -> Complex64,
) -> Result<CorrelatedSpectrum> {
    let m = beam_splitter_matrix(BALANCED);
    let (c, s) = (m[0][0].re, m[0][1].im);
    let mut channels = BTreeMap::new();
    for (&(l, p), &a) in &spectrum.coefficients {
        let r = reference(l, p);
        if r.norm() == 0.0 {
            return Err(Error::InvalidParameter(format!("reference amplitude for ({l},{p}) is zero")));
        }
        let mut intensities = [0.0; 4];
        for (k, out) in intensities.iter_mut().enumerate() {
            let shifted = r * Complex64::from_polar(1.0, k as f64 * PI / 2.0);
            *out = (m[0][0] * a + m[0][1] * shifted).norm_sqr();
        }
        // I_k = B − V sin(φ_k + ρ − α)
        let sin_part = 0.5 * (intensities[2] - intensities[0]);
        let cos_part = 0.5 * (intensities[3] - intensities[1]);
        let swing = sin_part.hypot(cos_part);
        let offset = intensities.iter().sum::<f64>() / 4.0;
        let magnitude = swing / (2.0 * c * s * r.norm());
        let amplitude = (magnitude > PHASE_FLOOR).then(|| {
            let psi = sin_part.atan2(cos_part);
            Complex64::from_polar(magnitude, r.arg() - psi)
        });
        channels.insert(
            (l, p),
            CorrelatedChannel { intensities, visibility: if offset > 0.0 { swing / offset } else { 0.0 }, amplitude },
        );
    }
    Ok(CorrelatedSpectrum { channels })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Symmetry {
    /// q-fold rotational symmetry; 1 means none.
    Order(u32),
    /// Only l = 0 is populated.
    Continuous,
}

/// Largest q with every significant charge a multiple of q.
pub fn detect_rotational_symmetry(spectrum: &SpiralSpectrum) -> Symmetry {
    let power = spectrum.charge_power();
    let total: f64 = power.values().sum();
    let q = power
        .iter()
        .filter(|(&l, &w)| l != 0 && w > SIGNIFICANT_POWER * total)
        .fold(0u32, |g, (&l, _)| g.gcd(&l.unsigned_abs()));
    if q == 0 { Symmetry::Continuous } else { Symmetry::Order(q) }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oam::grid::PolarGrid;

    fn basis() -> LgBasis {
        LgBasis::at_waist(1.0, 0.8, 4, 2)
    }

    fn grid() -> PolarGrid {
        PolarGrid::for_waist(1.0).unwrap()
    }

    #[test]
    fn single_mode_projects_to_itself() {
        let b = basis();
        let f = ObjectProfile::lg_superposition(grid(), &[(b.mode(3, 0).unwrap(), Complex64::new(1.0, 0.0))]).unwrap();
        let s = project_object(&f, &b).unwrap();
        for (&(l, p), a) in &s.coefficients {
            let want = if (l, p) == (3, 0) { 1.0 } else { 0.0 };
            assert!((a - want).norm() < 1e-6, "({l},{p}) {a}");
        }
        assert!(s.residual.abs() < 1e-10);
    }

    #[test]
    fn nyquist_guard() {
        let g = PolarGrid::new(16, 12, 6.0).unwrap();
        let f = ObjectProfile::disk(g, 1.0).unwrap();
        assert!(matches!(project_object(&f, &basis()), Err(Error::Resolution(_))));
    }

    #[test]
    fn full_turn_is_identity() {
        let f = ObjectProfile::letter(grid(), 'F', 3.0).unwrap();
        assert_eq!(rotate_object(&f, 2.0 * PI).unwrap(), f);
    }

    #[test]
    fn off_grid_rotation_phases() {
        let b = basis();
        let terms: Vec<_> = [(1, 0, 0.3), (-2, 1, 0.2), (4, 0, 0.25)]
            .iter()
            .map(|&(l, p, c)| (b.mode(l, p).unwrap(), Complex64::new(c, 0.1)))
            .collect();
        let f = ObjectProfile::lg_superposition(grid(), &terms).unwrap();
        let theta0 = 0.4321;
        let a = project_object(&f, &b).unwrap();
        let a2 = project_object(&rotate_object(&f, theta0).unwrap(), &b).unwrap();
        for (l, p, _) in [(1, 0, 0), (-2, 1, 0), (4, 0, 0)] {
            let want = a.coefficient(l, p) * Complex64::from_polar(1.0, l as f64 * theta0);
            assert!((a2.coefficient(l, p) - want).norm() < 1e-9);
        }
    }

    #[test]
    fn correlated_recovers_phase_and_flags_empty() {
        let b = basis();
        let phase = PI / 5.0;
        let f = ObjectProfile::lg_superposition(grid(), &[(b.mode(2, 0).unwrap(), Complex64::from_polar(1.0, phase))]).unwrap();
        let s = project_object(&f, &b).unwrap();
        let c = correlated_phases(&s, |_, _| Complex64::new(1.0, 0.0)).unwrap();
        assert!((c.phase(2, 0).unwrap() - phase).abs() < 1e-6);
        assert!(c.phase(-3, 1).is_none());
        assert!(c.flagged().contains(&(-3, 1)));
    }

    #[test]
    fn symmetry_orders() {
        let b = basis();
        let g = grid();
        let gauss = |r: f64| (-r * r).exp();
        let three = ObjectProfile::from_fn(g.clone(), |r, t| Complex64::new((3.0 * t).cos() * gauss(r), 0.0)).unwrap();
        assert_eq!(detect_rotational_symmetry(&project_object(&three, &b).unwrap()), Symmetry::Order(3));
        let disk = ObjectProfile::disk(g.clone(), 2.0).unwrap();
        let sd = project_object(&disk, &b).unwrap();
        assert_eq!(detect_rotational_symmetry(&sd), Symmetry::Continuous);
        assert!(sd.coefficients.iter().filter(|((l, _), _)| *l != 0).all(|(_, a)| a.norm_sqr() < 1e-10));
        let letter = ObjectProfile::letter(g, 'L', 3.0).unwrap();
        assert_eq!(detect_rotational_symmetry(&project_object(&letter, &b).unwrap()), Symmetry::Order(1));
    }
}
