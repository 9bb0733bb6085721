//! Unitary optical elements acting on Fock-space states.
//!
//! Beam-splitter convention: symmetric, with a factor `i` on reflection,
//!
//! ```text
//! â†_A → cos κ â†_A + i sin κ â†_B
//! â†_B → i sin κ â†_A + cos κ â†_B
//! ```
//!
//! with κ = π/4 for a 50:50 splitter. Reflection phases are not absorbed into
//! the arm phase, so Mach-Zehnder fringes come out as `sin²(φ/2)` in the port
//! the photon entered and `cos²(φ/2)` in the other.
//!
//! The Dove prism maps OAM charge `l → −l` within one spatial channel and
//! applies `e^{2ilθ}` for prism rotation θ (the transmitted image turns by 2θ).

use std::collections::BTreeMap;
use std::f64::consts::FRAC_PI_4;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fock::{BasisState, FockSpace, ModeKind, ModeLabel, StateVector};

/// Spaces below this dimension get a precomposed sparse matrix.
pub const PRECOMPOSE_DIMENSION_LIMIT: u64 = 10_000;

/// Mixing angle of a balanced splitter.
pub const BALANCED: f64 = FRAC_PI_4;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ElementSpec {
    BeamSplitter { a: ModeLabel, b: ModeLabel, angle: f64 },
    PhaseShift { mode: ModeLabel, phase: f64 },
    /// Acts on every OAM mode of `channel`.
    DovePrism { channel: u8, angle: f64 },
    /// Image reflection on an OAM channel: `l → −l` without rotation phase.
    Mirror { channel: u8 },
    Swap { a: ModeLabel, b: ModeLabel },
}

impl ElementSpec {
    pub fn beam_splitter(a: ModeLabel, b: ModeLabel, angle: f64) -> Result<Self> {
        let e = Self::BeamSplitter { a, b, angle };
        e.check_parameters()?;
        Ok(e)
    }

    pub fn balanced_splitter(a: ModeLabel, b: ModeLabel) -> Result<Self> {
        Self::beam_splitter(a, b, BALANCED)
    }

    pub fn phase_shift(mode: ModeLabel, phase: f64) -> Result<Self> {
        let e = Self::PhaseShift { mode, phase };
        e.check_parameters()?;
        Ok(e)
    }

    pub fn dove_prism(channel: u8, angle: f64) -> Result<Self> {
        let e = Self::DovePrism { channel, angle };
        e.check_parameters()?;
        Ok(e)
    }

    fn check_parameters(&self) -> Result<()> {
        let finite = |x: f64, what: &str| {
            if x.is_finite() {
                Ok(())
            } else {
                Err(Error::InvalidParameter(format!("{what} must be finite")))
            }
        };
        match *self {
            Self::BeamSplitter { a, b, angle } => {
                if a == b {
                    return Err(Error::InvalidParameter("beam splitter needs two distinct modes".into()));
                }
                finite(angle, "mixing angle")
            }
            Self::Swap { a, b } if a == b => Err(Error::InvalidParameter("swap needs two distinct modes".into())),
            Self::PhaseShift { phase, .. } => finite(phase, "phase"),
            Self::DovePrism { angle, .. } => finite(angle, "prism angle"),
            _ => Ok(()),
        }
    }

    /// Checks targets against a space. Prisms require every OAM mode of their
    /// channel to have its mirror partner.
    pub fn validate(&self, space: &FockSpace) -> Result<()> {
        self.check_parameters()?;
        match *self {
            Self::BeamSplitter { a, b, .. } | Self::Swap { a, b } => {
                space.check_mode(a)?;
                space.check_mode(b)
            }
            Self::PhaseShift { mode, .. } => space.check_mode(mode),
            Self::DovePrism { channel, .. } | Self::Mirror { channel } => {
                for &m in space.modes() {
                    if m.kind == ModeKind::Oam && m.channel == channel && !space.contains(m.mirrored()) {
                        return Err(Error::MissingMirrorMode { channel, charge: -m.index });
                    }
                }
                Ok(())
            }
        }
    }

    /// Image of one basis state.
    pub fn act_on_basis(&self, space: &FockSpace, b: &BasisState) -> Result<Vec<(BasisState, Complex64)>> {
        match *self {
            Self::BeamSplitter { a, b: m2, angle } => Ok(split_basis(b, a, m2, angle)),
            Self::PhaseShift { mode, phase } => {
                Ok(vec![(b.clone(), Complex64::from_polar(1.0, phase * b.count(mode) as f64))])
            }
            Self::DovePrism { channel, angle } => flip_channel(space, b, channel, angle).map(|x| vec![x]),
            Self::Mirror { channel } => flip_channel(space, b, channel, 0.0).map(|x| vec![x]),
            Self::Swap { a, b: m2 } => {
                let (na, nb) = (b.count(a), b.count(m2));
                Ok(vec![(b.with_count(a, nb).with_count(m2, na), Complex64::new(1.0, 0.0))])
            }
        }
    }

    pub fn apply(&self, state: &StateVector) -> Result<StateVector> {
        let space = state.space().clone();
        match *self {
            Self::BeamSplitter { a, b, .. } | Self::Swap { a, b } => {
                space.check_mode(a)?;
                space.check_mode(b)?;
            }
            Self::PhaseShift { mode, .. } => space.check_mode(mode)?,
            _ => {}
        }
        self.check_parameters()?;
        state.map_basis(|b| self.act_on_basis(&space, b))
    }
}

fn ln_factorial(n: u32) -> f64 {
    (2..=n).map(|k| (k as f64).ln()).sum()
}

fn binomial(n: u32, k: u32) -> f64 {
    (ln_factorial(n) - ln_factorial(k) - ln_factorial(n - k)).exp().round()
}

/// Expands (c A† + i s B†)^{nA} (i s A† + c B†)^{nB} / √(nA! nB!) on vacuum.
fn split_basis(state: &BasisState, ma: ModeLabel, mb: ModeLabel, angle: f64) -> Vec<(BasisState, Complex64)> {
    let (na, nb) = (state.count(ma), state.count(mb));
    let (c, s) = (angle.cos(), angle.sin());
    let mut acc: BTreeMap<u32, Complex64> = BTreeMap::new();
    let norm = -0.5 * (ln_factorial(na) + ln_factorial(nb));
    for j in 0..=na {
        for k in 0..=nb {
            let out_a = j + k;
            let out_b = na + nb - out_a;
            let reflections = (na - j) + k;
            let real = binomial(na, j) * binomial(nb, k) * c.powi((j + nb - k) as i32) * s.powi(reflections as i32);
            if real == 0.0 {
                continue;
            }
            let ipow = match reflections % 4 {
                0 => Complex64::new(1.0, 0.0),
                1 => Complex64::new(0.0, 1.0),
                2 => Complex64::new(-1.0, 0.0),
                _ => Complex64::new(0.0, -1.0),
            };
            let weight = (norm + 0.5 * (ln_factorial(out_a) + ln_factorial(out_b))).exp();
            *acc.entry(out_a).or_default() += ipow * real * weight;
        }
    }
    acc.into_iter()
        .map(|(out_a, amp)| (state.with_count(ma, out_a).with_count(mb, na + nb - out_a), amp))
        .collect()
}

fn flip_channel(space: &FockSpace, b: &BasisState, channel: u8, angle: f64) -> Result<(BasisState, Complex64)> {
    let mut charge_sum: i64 = 0;
    let mut moved = Vec::new();
    let mut kept = Vec::new();
    for &(m, n) in b.occupations() {
        if m.kind == ModeKind::Oam && m.channel == channel {
            let target = m.mirrored();
            if !space.contains(target) {
                return Err(Error::MissingMirrorMode { channel, charge: target.index });
            }
            charge_sum += m.index as i64 * n as i64;
            moved.push((target, n));
        } else {
            kept.push((m, n));
        }
    }
    let phase = Complex64::from_polar(1.0, 2.0 * angle * charge_sum as f64);
    Ok((BasisState::from_occupations(kept.into_iter().chain(moved)), phase))
}

pub fn apply_beam_splitter(state: &StateVector, a: ModeLabel, b: ModeLabel, angle: f64) -> Result<StateVector> {
    ElementSpec::beam_splitter(a, b, angle)?.apply(state)
}

pub fn apply_phase_shift(state: &StateVector, mode: ModeLabel, phase: f64) -> Result<StateVector> {
    ElementSpec::phase_shift(mode, phase)?.apply(state)
}

pub fn apply_dove_prism(state: &StateVector, channel: u8, angle: f64) -> Result<StateVector> {
    ElementSpec::dove_prism(channel, angle)?.apply(state)
}

/// 2×2 mode-transfer matrix of the splitter, `[[c, is], [is, c]]`, for
/// classical fields and single-photon amplitudes.
pub fn beam_splitter_matrix(angle: f64) -> [[Complex64; 2]; 2] {
    let c = Complex64::new(angle.cos(), 0.0);
    let is = Complex64::new(0.0, angle.sin());
    [[c, is], [is, c]]
}

/// An ordered element sequence compiled against one space.
#[derive(Debug, Clone)]
pub struct Interferometer {
    space: Arc<FockSpace>,
    elements: Vec<ElementSpec>,
    columns: Option<BTreeMap<BasisState, Vec<(BasisState, Complex64)>>>,
}

/// Validates every element and, for small spaces, precomposes the product
/// matrix column by column.
pub fn build_interferometer(space: Arc<FockSpace>, elements: Vec<ElementSpec>) -> Result<Interferometer> {
    for e in &elements {
        e.validate(&space)?;
    }
    let columns = if space.dimension() < PRECOMPOSE_DIMENSION_LIMIT {
        let mut cols = BTreeMap::new();
        for b in space.basis() {
            let v = StateVector::from_raw(space.clone(), [(b.clone(), Complex64::new(1.0, 0.0))])?;
            let out = run_sequence(&elements, v)?;
            cols.insert(b, out.iter().map(|(k, a)| (k.clone(), *a)).collect());
        }
        Some(cols)
    } else {
        None
    };
    Ok(Interferometer { space, elements, columns })
}

fn run_sequence(elements: &[ElementSpec], mut v: StateVector) -> Result<StateVector> {
    for e in elements {
        v = e.apply(&v)?;
    }
    Ok(v)
}

impl Interferometer {
    pub fn elements(&self) -> &[ElementSpec] {
        &self.elements
    }

    pub fn is_precomposed(&self) -> bool {
        self.columns.is_some()
    }

    pub fn apply(&self, state: &StateVector) -> Result<StateVector> {
        if !Arc::ptr_eq(state.space(), &self.space) && **state.space() != *self.space {
            return Err(Error::InvalidParameter("state belongs to a different space".into()));
        }
        match &self.columns {
            Some(cols) => state.map_basis(|b| Ok(cols.get(b).cloned().unwrap_or_default())),
            None => run_sequence(&self.elements, state.clone()),
        }
    }

    /// Applies the elements one at a time, bypassing the precomposed matrix.
    pub fn apply_sequential(&self, state: &StateVector) -> Result<StateVector> {
        run_sequence(&self.elements, state.clone())
    }

    /// max |M†M − I| over the precomposed matrix, computed per photon-number
    /// sector (different sectors are orthogonal by construction).
    pub fn unitarity_defect(&self) -> Option<f64> {
        let cols = self.columns.as_ref()?;
        let mut sectors: BTreeMap<u32, Vec<(&BasisState, BTreeMap<&BasisState, Complex64>)>> = BTreeMap::new();
        for (b, col) in cols {
            let map = col.iter().map(|(k, a)| (k, *a)).collect();
            sectors.entry(b.total()).or_default().push((b, map));
        }
        let mut worst: f64 = 0.0;
        for cols in sectors.values() {
            for (i, (_, ci)) in cols.iter().enumerate() {
                for (j, (_, cj)) in cols.iter().enumerate().skip(i) {
                    let mut dot = Complex64::new(0.0, 0.0);
                    for (k, a) in ci {
                        if let Some(b) = cj.get(k) {
                            dot += a.conj() * b;
                        }
                    }
                    let target = if i == j { 1.0 } else { 0.0 };
                    worst = worst.max((dot - target).norm());
                }
            }
        }
        Some(worst)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    fn two_path(n_max: u32) -> (Arc<FockSpace>, ModeLabel, ModeLabel) {
        let (a, b) = (ModeLabel::path(0), ModeLabel::path(1));
        (FockSpace::new([a, b], n_max).unwrap(), a, b)
    }

    fn ket(a: ModeLabel, na: u32, b: ModeLabel, nb: u32) -> BasisState {
        BasisState::from_occupations([(a, na), (b, nb)])
    }

    #[test]
    fn single_photon_splits_with_i_on_reflection() {
        let (space, a, b) = two_path(2);
        let psi = StateVector::basis(space, ket(a, 1, b, 0)).unwrap();
        let out = apply_beam_splitter(&psi, a, b, BALANCED).unwrap();
        let s = 0.5f64.sqrt();
        assert_abs_diff_eq!(out.amplitude(&ket(a, 1, b, 0)).re, s, epsilon = 1e-15);
        assert_abs_diff_eq!(out.amplitude(&ket(a, 0, b, 1)).im, s, epsilon = 1e-15);
    }

    /// Brute-force oracle: expand (c A + i s B)(i s A + c B) by hand.
    #[test]
    fn hom_pair_bunches() {
        let (space, a, b) = two_path(2);
        let psi = StateVector::basis(space, ket(a, 1, b, 1)).unwrap();
        let out = apply_beam_splitter(&psi, a, b, BALANCED).unwrap();
        assert!(out.amplitude(&ket(a, 1, b, 1)).norm() < 1e-14);
        let s = 0.5f64.sqrt();
        assert_abs_diff_eq!(out.amplitude(&ket(a, 2, b, 0)).im, s, epsilon = 1e-15);
        assert_abs_diff_eq!(out.amplitude(&ket(a, 0, b, 2)).im, s, epsilon = 1e-15);
    }

    #[test]
    fn zero_angle_is_identity() {
        let (space, a, b) = two_path(4);
        let psi = StateVector::from_amplitudes(
            space,
            [(ket(a, 2, b, 1), Complex64::new(0.3, 0.4)), (ket(a, 0, b, 4), Complex64::new(-0.5, 0.1))],
        )
        .unwrap();
        let out = apply_beam_splitter(&psi, a, b, 0.0).unwrap();
        assert!(out.max_abs_diff(&psi) < 1e-15);
    }

    #[test]
    fn phase_shift_examples() {
        let (space, a, b) = two_path(4);
        let one = Complex64::new(1.0, 0.0);
        let psi = StateVector::from_amplitudes(space.clone(), [(ket(a, 0, b, 1), one), (ket(a, 1, b, 0), one)]).unwrap();
        let phi = 0.37;
        let out = apply_phase_shift(&psi, a, phi).unwrap();
        let s = 0.5f64.sqrt();
        assert!((out.amplitude(&ket(a, 1, b, 0)) - Complex64::from_polar(s, phi)).norm() < 1e-15);
        assert!((out.amplitude(&ket(a, 0, b, 1)) - s).norm() < 1e-15);

        let four = StateVector::basis(space, ket(a, 4, b, 0)).unwrap();
        let out = apply_phase_shift(&four, a, PI / 4.0).unwrap();
        assert!((out.amplitude(&ket(a, 4, b, 0)) + 1.0).norm() < 1e-15);
        assert!(apply_phase_shift(&four, a, 0.0).unwrap().max_abs_diff(&four) < 1e-15);
    }

    #[test]
    fn dove_prism_flips_charge_with_rotation_phase() {
        let modes = (-2..=2).map(|l| ModeLabel::oam(0, l));
        let space = FockSpace::new(modes, 2).unwrap();
        let theta = 0.21;
        let psi = StateVector::basis(space.clone(), BasisState::from_occupations([(ModeLabel::oam(0, 2), 1)])).unwrap();
        let out = apply_dove_prism(&psi, 0, theta).unwrap();
        let target = BasisState::from_occupations([(ModeLabel::oam(0, -2), 1)]);
        assert!((out.amplitude(&target) - Complex64::from_polar(1.0, 4.0 * theta)).norm() < 1e-15);

        let zero = StateVector::basis(space.clone(), BasisState::from_occupations([(ModeLabel::oam(0, 0), 1)])).unwrap();
        assert!(apply_dove_prism(&zero, 0, 1.3).unwrap().max_abs_diff(&zero) < 1e-15);

        let one = Complex64::new(1.0, 0.0);
        let sym = StateVector::from_amplitudes(
            space,
            [
                (BasisState::from_occupations([(ModeLabel::oam(0, 1), 1)]), one),
                (BasisState::from_occupations([(ModeLabel::oam(0, -1), 1)]), one),
            ],
        )
        .unwrap();
        assert!(apply_dove_prism(&sym, 0, 0.0).unwrap().max_abs_diff(&sym) < 1e-15);
    }

    #[test]
    fn dove_prism_needs_mirror_modes() {
        let space = FockSpace::new([ModeLabel::oam(0, 1), ModeLabel::oam(0, 2), ModeLabel::oam(0, -1)], 1).unwrap();
        let psi = StateVector::basis(space.clone(), BasisState::from_occupations([(ModeLabel::oam(0, 2), 1)])).unwrap();
        assert_eq!(apply_dove_prism(&psi, 0, 0.1).unwrap_err(), Error::MissingMirrorMode { channel: 0, charge: -2 });
        // Only populated charges are checked when acting on a state.
        let ok = StateVector::basis(space.clone(), BasisState::from_occupations([(ModeLabel::oam(0, 1), 1)])).unwrap();
        assert!(apply_dove_prism(&ok, 0, 0.1).is_ok());
        // Building an interferometer checks the whole channel.
        assert!(build_interferometer(space, vec![ElementSpec::dove_prism(0, 0.1).unwrap()]).is_err());
    }

    /// 2×2 matrix oracle: BS · diag(e^{iφ}, 1) · BS on (1, 0).
    #[test]
    fn mach_zehnder_fringes() {
        let (space, a, b) = two_path(1);
        for phi in [0.0, 0.4, 1.7, 3.0] {
            let m = beam_splitter_matrix(BALANCED);
            let after1 = [m[0][0], m[1][0]];
            let shifted = [after1[0] * Complex64::from_polar(1.0, phi), after1[1]];
            let out_a = m[0][0] * shifted[0] + m[0][1] * shifted[1];
            let out_b = m[1][0] * shifted[0] + m[1][1] * shifted[1];

            let ifm = build_interferometer(
                space.clone(),
                vec![
                    ElementSpec::balanced_splitter(a, b).unwrap(),
                    ElementSpec::phase_shift(a, phi).unwrap(),
                    ElementSpec::balanced_splitter(a, b).unwrap(),
                ],
            )
            .unwrap();
            let out = ifm.apply(&StateVector::basis(space.clone(), ket(a, 1, b, 0)).unwrap()).unwrap();
            let pa = out.amplitude(&ket(a, 1, b, 0)).norm_sqr();
            let pb = out.amplitude(&ket(a, 0, b, 1)).norm_sqr();
            assert_abs_diff_eq!(pa, out_a.norm_sqr(), epsilon = 1e-14);
            assert_abs_diff_eq!(pb, out_b.norm_sqr(), epsilon = 1e-14);
            assert_abs_diff_eq!(pa, (phi / 2.0).sin().powi(2), epsilon = 1e-14);
            assert_abs_diff_eq!(pb, (phi / 2.0).cos().powi(2), epsilon = 1e-14);
        }
    }

    #[test]
    fn empty_and_double_splitter() {
        let (space, a, b) = two_path(2);
        let psi = StateVector::basis(space.clone(), ket(a, 1, b, 0)).unwrap();
        let id = build_interferometer(space.clone(), vec![]).unwrap();
        assert!(id.apply(&psi).unwrap().max_abs_diff(&psi) < 1e-15);

        let bs = ElementSpec::balanced_splitter(a, b).unwrap();
        let twice = build_interferometer(space.clone(), vec![bs, bs]).unwrap();
        let out = twice.apply(&psi).unwrap();
        assert_eq!(out.len(), 1);
        assert_abs_diff_eq!(out.amplitude(&ket(a, 0, b, 1)).norm(), 1.0, epsilon = 1e-15);
        assert!(twice.unitarity_defect().unwrap() < 1e-12);
    }

    #[test]
    fn precomposed_and_sequential_agree() {
        let (space, a, b) = two_path(5);
        let ifm = build_interferometer(
            space.clone(),
            vec![
                ElementSpec::beam_splitter(a, b, 0.3).unwrap(),
                ElementSpec::phase_shift(b, 1.1).unwrap(),
                ElementSpec::Swap { a, b },
                ElementSpec::balanced_splitter(a, b).unwrap(),
            ],
        )
        .unwrap();
        assert!(ifm.is_precomposed());
        let psi = StateVector::from_amplitudes(
            space,
            [(ket(a, 3, b, 2), Complex64::new(0.6, 0.0)), (ket(a, 1, b, 0), Complex64::new(0.0, 0.8))],
        )
        .unwrap();
        let x = ifm.apply(&psi).unwrap();
        let y = ifm.apply_sequential(&psi).unwrap();
        assert!(x.max_abs_diff(&y) < 1e-14);
        assert!(ifm.unitarity_defect().unwrap() < 1e-12);
    }

    #[test]
    fn element_parameter_checks() {
        let a = ModeLabel::path(0);
        assert!(ElementSpec::beam_splitter(a, a, 0.1).is_err());
        assert!(ElementSpec::phase_shift(a, f64::NAN).is_err());
        assert!(ElementSpec::dove_prism(0, f64::INFINITY).is_err());
    }
}
