//! Input-state preparation: single photons, truncated coherent states, NOON
//! states, OAM-entangled down-conversion pairs and frequency-entangled
//! biphotons.
//!
//! Down-conversion photons use channel 0 for the signal and channel 1 for the
//! idler. Radial index p of the pair is fixed to 0.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fock::{BasisState, FockSpace, ModeLabel, StateVector};

pub const SIGNAL: u8 = 0;
pub const IDLER: u8 = 1;

/// Largest omitted Poisson weight accepted for a truncated coherent state.
pub const COHERENT_TAIL_LIMIT: f64 = 1e-9;

pub fn single_photon(space: Arc<FockSpace>, mode: ModeLabel) -> Result<StateVector> {
    space.check_mode(mode)?;
    StateVector::basis(space, BasisState::from_occupations([(mode, 1)]))
}

/// A coherent state cut at the space's truncation and renormalized.
#[derive(Debug, Clone)]
pub struct TruncatedCoherent {
    pub state: StateVector,
    /// Σ_{n≤N_max} e^{-|α|²}|α|^{2n}/n!, the Poisson weight kept before renormalizing.
    pub retained_weight: f64,
}

fn poisson_weights(mean: f64, upto: u32) -> Vec<f64> {
    let mut w = Vec::with_capacity(upto as usize + 1);
    let mut ln = -mean;
    for n in 0..=upto {
        if n > 0 {
            ln += mean.ln() - (n as f64).ln();
        }
        w.push(if mean == 0.0 { if n == 0 { 1.0 } else { 0.0 } } else { ln.exp() });
    }
    w
}

/// Poisson weight above `n_max`, summed term by term to avoid cancellation.
fn poisson_tail(mean: f64, n_max: u32) -> f64 {
    if mean == 0.0 {
        return 0.0;
    }
    let mut ln = -mean + (n_max + 1) as f64 * mean.ln() - (1..=n_max + 1).map(|k| (k as f64).ln()).sum::<f64>();
    let mut tail = 0.0;
    let mut n = n_max + 1;
    loop {
        let t = ln.exp();
        tail += t;
        if (n as f64) > mean && t < tail * 1e-17 {
            break;
        }
        n += 1;
        ln += mean.ln() - (n as f64).ln();
        if n > n_max + 100_000 {
            break;
        }
    }
    tail
}

pub fn coherent_state(space: Arc<FockSpace>, mode: ModeLabel, alpha: Complex64) -> Result<TruncatedCoherent> {
    space.check_mode(mode)?;
    let mean = alpha.norm_sqr();
    let n_max = space.n_max();
    let tail = poisson_tail(mean, n_max);
    if tail >= COHERENT_TAIL_LIMIT {
        let mut required = n_max;
        while poisson_tail(mean, required) >= COHERENT_TAIL_LIMIT {
            required += 1;
        }
        return Err(Error::InsufficientTruncation { n_max, required, tail });
    }
    let weights = poisson_weights(mean, n_max);
    let retained_weight: f64 = weights.iter().sum();
    let phase = alpha.arg();
    let amps = weights.iter().enumerate().map(|(n, w)| {
        (BasisState::from_occupations([(mode, n as u32)]), Complex64::from_polar(w.sqrt(), phase * n as f64))
    });
    let state = StateVector::from_amplitudes(space, amps)?;
    Ok(TruncatedCoherent { state, retained_weight })
}

/// (|N,0⟩ + |0,N⟩)/√2 over modes (a, b).
pub fn noon_state(space: Arc<FockSpace>, a: ModeLabel, b: ModeLabel, n: u32) -> Result<StateVector> {
    space.check_mode(a)?;
    space.check_mode(b)?;
    if a == b {
        return Err(Error::InvalidParameter("NOON state needs two distinct modes".into()));
    }
    if n > space.n_max() {
        return Err(Error::TruncationOverflow { requested: n, n_max: space.n_max() });
    }
    let one = Complex64::new(1.0, 0.0);
    StateVector::from_amplitudes(
        space,
        [(BasisState::from_occupations([(a, n)]), one), (BasisState::from_occupations([(b, n)]), one)],
    )
}

/// Down-conversion OAM amplitudes K_{l,−l}, keyed by signal charge.
#[derive(Debug, Clone, PartialEq)]
pub struct SpdcOamSpectrum {
    coefficients: BTreeMap<i32, Complex64>,
}

impl SpdcOamSpectrum {
    pub fn new<I: IntoIterator<Item = (i32, Complex64)>>(coefficients: I) -> Result<Self> {
        let mut map: BTreeMap<i32, Complex64> = BTreeMap::new();
        for (l, k) in coefficients {
            *map.entry(l).or_default() += k;
        }
        map.retain(|_, k| k.norm() > 0.0);
        let norm: f64 = map.values().map(|k| k.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::InvalidParameter("down-conversion spectrum has no weight".into()));
        }
        map.values_mut().for_each(|k| *k /= norm);
        Ok(Self { coefficients: map })
    }

    /// Equal weight for every |l| ≤ l_max.
    pub fn uniform(l_max: u32) -> Self {
        let l_max = l_max as i32;
        Self::new((-l_max..=l_max).map(|l| (l, Complex64::new(1.0, 0.0)))).expect("non-empty")
    }

    /// K ∝ exp(−l²/(4σ²)), so |K|² has standard deviation σ in l.
    pub fn gaussian(l_max: u32, sigma: f64) -> Result<Self> {
        if !(sigma > 0.0) {
            return Err(Error::InvalidParameter("OAM spectrum width must be positive".into()));
        }
        let l_max = l_max as i32;
        Self::new((-l_max..=l_max).map(|l| (l, Complex64::new((-(l * l) as f64 / (4.0 * sigma * sigma)).exp(), 0.0))))
    }

    /// Keeps only the ±l terms and renormalizes.
    pub fn filtered(&self, l: i32) -> Result<Self> {
        Self::new(self.coefficients.iter().filter(|(&k, _)| k.abs() == l.abs()).map(|(&k, &v)| (k, v)))
    }

    pub fn l_max(&self) -> u32 {
        self.coefficients.keys().map(|l| l.unsigned_abs()).max().unwrap_or(0)
    }

    pub fn coefficients(&self) -> &BTreeMap<i32, Complex64> {
        &self.coefficients
    }
}

/// Signal and idler OAM modes for every |l| ≤ l_max.
pub fn oam_pair_modes(l_max: u32) -> Vec<ModeLabel> {
    let l_max = l_max as i32;
    (-l_max..=l_max).flat_map(|l| [ModeLabel::oam(SIGNAL, l), ModeLabel::oam(IDLER, l)]).collect()
}

/// Σ_l K_{l,−l} |l⟩_s |−l⟩_i.
pub fn spdc_oam_pair(space: Arc<FockSpace>, spectrum: &SpdcOamSpectrum) -> Result<StateVector> {
    let mut amps = Vec::new();
    for (&l, &k) in spectrum.coefficients() {
        let (s, i) = (ModeLabel::oam(SIGNAL, l), ModeLabel::oam(IDLER, -l));
        space.check_mode(s)?;
        space.check_mode(i)?;
        amps.push((BasisState::from_occupations([(s, 1), (i, 1)]), k));
    }
    StateVector::from_amplitudes(space, amps)
}

/// Joint spectral amplitude of a down-conversion pair: the signal sits at
/// ω₀ + Δ and the idler at ω₀ − Δ for each detuning Δ on a symmetric grid.
///
/// Amplitudes are normalized so Σ|A_j|² = 1 on the grid; the continuous
/// density is |A_j|²/δΔ.
#[derive(Debug, Clone, PartialEq)]
pub struct BiphotonSpectrum {
    omega0: f64,
    detunings: Vec<f64>,
    amplitudes: Vec<Complex64>,
}

const GRID_SYMMETRY_TOLERANCE: f64 = 1e-9;

impl BiphotonSpectrum {
    pub fn new(omega0: f64, detunings: Vec<f64>, amplitudes: Vec<Complex64>) -> Result<Self> {
        if detunings.len() != amplitudes.len() || detunings.len() < 2 {
            return Err(Error::GridMismatch("need at least two detunings, one amplitude each".into()));
        }
        if detunings.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::GridMismatch("detuning grid must be strictly increasing".into()));
        }
        let scale = detunings.iter().fold(0.0f64, |m, d| m.max(d.abs()));
        let n = detunings.len();
        for i in 0..n {
            if (detunings[i] + detunings[n - 1 - i]).abs() > GRID_SYMMETRY_TOLERANCE * scale {
                return Err(Error::AsymmetricGrid);
            }
        }
        let norm = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::ZeroNorm);
        }
        let amplitudes = amplitudes.into_iter().map(|a| a / norm).collect();
        Ok(Self { omega0, detunings, amplitudes })
    }

    /// Gaussian pair spectrum: amplitude ∝ exp(−Δ²/(2σ²)), so each photon's
    /// marginal intensity falls to 1/e at |Δ| = σ. `points` detunings span
    /// ±`half_width_sigmas`·σ.
    pub fn gaussian(omega0: f64, sigma: f64, points: usize, half_width_sigmas: f64) -> Result<Self> {
        if !(sigma > 0.0) || !(half_width_sigmas > 0.0) || points < 2 {
            return Err(Error::InvalidParameter("Gaussian biphoton needs σ > 0, span > 0 and >= 2 points".into()));
        }
        let half = half_width_sigmas * sigma;
        let step = 2.0 * half / (points - 1) as f64;
        let detunings: Vec<f64> = (0..points).map(|j| -half + j as f64 * step).collect();
        let amplitudes = detunings.iter().map(|d| Complex64::new((-d * d / (2.0 * sigma * sigma)).exp(), 0.0)).collect();
        Self::new(omega0, detunings, amplitudes)
    }

    /// Default grid: 1024 points over ±4σ.
    pub fn gaussian_default(omega0: f64, sigma: f64) -> Result<Self> {
        Self::gaussian(omega0, sigma, 1024, 4.0)
    }

    pub fn omega0(&self) -> f64 {
        self.omega0
    }

    pub fn detunings(&self) -> &[f64] {
        &self.detunings
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn len(&self) -> usize {
        self.detunings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.detunings.is_empty()
    }

    /// Grid index of −Δ_j.
    pub fn mirror_index(&self, j: usize) -> usize {
        self.detunings.len() - 1 - j
    }

    /// Mean detuning spacing.
    pub fn step(&self) -> f64 {
        (self.detunings[self.len() - 1] - self.detunings[0]) / (self.len() - 1) as f64
    }

    /// Same grid, new amplitudes; used by propagation.
    pub fn with_amplitudes(&self, amplitudes: Vec<Complex64>) -> Result<Self> {
        if amplitudes.len() != self.len() {
            return Err(Error::GridMismatch(format!("expected {} amplitudes, got {}", self.len(), amplitudes.len())));
        }
        Ok(Self { omega0: self.omega0, detunings: self.detunings.clone(), amplitudes })
    }

    /// Exchange-symmetrized copy: A(Δ) → (A(Δ) + A(−Δ))/2, renormalized.
    pub fn symmetrized(&self) -> Result<Self> {
        let amps = (0..self.len()).map(|j| (self.amplitudes[j] + self.amplitudes[self.mirror_index(j)]) * 0.5).collect();
        Self::new(self.omega0, self.detunings.clone(), amps)
    }

    /// max |A(Δ) − A(−Δ)|.
    pub fn asymmetry(&self) -> f64 {
        (0..self.len()).map(|j| (self.amplitudes[j] - self.amplitudes[self.mirror_index(j)]).norm()).fold(0.0, f64::max)
    }

    /// Marginal probability of the signal photon per grid bin.
    pub fn signal_marginal(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|a| a.norm_sqr()).collect()
    }

    /// RMS detuning of the marginal, √(Σ|A|²Δ²).
    pub fn rms_bandwidth(&self) -> f64 {
        self.amplitudes.iter().zip(&self.detunings).map(|(a, d)| a.norm_sqr() * d * d).sum::<f64>().sqrt()
    }

    /// Integer bin label of grid index j; antisymmetric so that −Δ_j ↔ −bin.
    pub fn bin_label(&self, j: usize) -> i32 {
        2 * j as i32 - (self.len() as i32 - 1)
    }

    pub fn index_of_bin(&self, bin: i32) -> Option<usize> {
        let twice = bin + self.len() as i32 - 1;
        (twice >= 0 && twice % 2 == 0 && (twice / 2) < self.len() as i32).then_some((twice / 2) as usize)
    }

    /// Signal and idler frequency-bin modes covering the grid.
    pub fn modes(&self) -> Vec<ModeLabel> {
        (0..self.len())
            .flat_map(|j| [ModeLabel::frequency_bin(SIGNAL, self.bin_label(j)), ModeLabel::frequency_bin(IDLER, self.bin_label(j))])
            .collect()
    }

    /// Two-photon Fock space over [`Self::modes`].
    pub fn fock_space(&self) -> Result<Arc<FockSpace>> {
        FockSpace::new(self.modes(), 2)
    }
}

/// Σ_j A_sym(Δ_j) |ω₀+Δ_j⟩_s |ω₀−Δ_j⟩_i with A symmetrized over Δ → −Δ.
pub fn frequency_entangled_pair(spectrum: &BiphotonSpectrum) -> Result<StateVector> {
    let sym = spectrum.symmetrized()?;
    let space = sym.fock_space()?;
    let amps = (0..sym.len()).map(|j| {
        let s = ModeLabel::frequency_bin(SIGNAL, sym.bin_label(j));
        let i = ModeLabel::frequency_bin(IDLER, -sym.bin_label(j));
        (BasisState::from_occupations([(s, 1), (i, 1)]), sym.amplitudes()[j])
    });
    StateVector::from_amplitudes(space, amps)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{number_expectation, schmidt_decomposition};
    use approx::assert_abs_diff_eq;

    #[test]
    fn single_photon_in_path_space() {
        let (a, b) = (ModeLabel::path(0), ModeLabel::path(1));
        let space = FockSpace::new([a, b], 2).unwrap();
        let psi = single_photon(space, a).unwrap();
        assert_abs_diff_eq!(psi.norm(), 1.0);
        assert_eq!(number_expectation(&psi, a), 1.0);
        assert_eq!(psi.amplitude(&BasisState::from_occupations([(a, 1)])).re, 1.0);
    }

    #[test]
    fn coherent_vacuum() {
        let m = ModeLabel::path(0);
        let space = FockSpace::single_mode(m, 3).unwrap();
        let c = coherent_state(space, m, Complex64::new(0.0, 0.0)).unwrap();
        assert_eq!(c.state.len(), 1);
        assert_eq!(c.retained_weight, 1.0);
    }

    #[test]
    fn coherent_truncation_error_names_required_cutoff() {
        let m = ModeLabel::path(0);
        let space = FockSpace::single_mode(m, 10).unwrap();
        match coherent_state(space, m, Complex64::new(2.0, 0.0)) {
            Err(Error::InsufficientTruncation { n_max: 10, required, .. }) => {
                assert!(required > 10);
                let ok = FockSpace::single_mode(m, required).unwrap();
                assert!(coherent_state(ok.clone(), m, Complex64::new(2.0, 0.0)).is_ok());
                let short = FockSpace::single_mode(m, required - 1).unwrap();
                assert!(coherent_state(short, m, Complex64::new(2.0, 0.0)).is_err());
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn noon_examples() {
        let (a, b) = (ModeLabel::path(0), ModeLabel::path(1));
        let space = FockSpace::new([a, b], 5).unwrap();
        let one = noon_state(space.clone(), a, b, 1).unwrap();
        let s = 0.5f64.sqrt();
        assert_abs_diff_eq!(one.amplitude(&BasisState::from_occupations([(a, 1)])).re, s, epsilon = 1e-15);
        assert_abs_diff_eq!(one.amplitude(&BasisState::from_occupations([(b, 1)])).re, s, epsilon = 1e-15);
        let five = noon_state(space.clone(), a, b, 5).unwrap();
        assert_eq!(schmidt_decomposition(&five, &[a]).unwrap().rank, 2);
        assert!(noon_state(space, a, b, 6).is_err());
    }

    #[test]
    fn spdc_filter_gives_two_term_state() {
        let l = 2;
        let space = FockSpace::new(oam_pair_modes(3), 2).unwrap();
        let spec = SpdcOamSpectrum::uniform(3).filtered(l).unwrap();
        let psi = spdc_oam_pair(space, &spec).unwrap();
        assert_eq!(psi.len(), 2);
        let s = 0.5f64.sqrt();
        for sign in [1, -1] {
            let b = BasisState::from_occupations([(ModeLabel::oam(SIGNAL, sign * l), 1), (ModeLabel::oam(IDLER, -sign * l), 1)]);
            assert_abs_diff_eq!(psi.amplitude(&b).re, s, epsilon = 1e-15);
        }
    }

    #[test]
    fn spdc_missing_mode() {
        let space = FockSpace::new(oam_pair_modes(1), 2).unwrap();
        assert!(spdc_oam_pair(space, &SpdcOamSpectrum::uniform(2)).is_err());
    }

    #[test]
    fn gaussian_oam_spectrum_is_normalized_and_even() {
        let spec = SpdcOamSpectrum::gaussian(5, 1.5).unwrap();
        let total: f64 = spec.coefficients().values().map(|k| k.norm_sqr()).sum();
        assert_abs_diff_eq!(total, 1.0, epsilon = 1e-14);
        assert_eq!(spec.coefficients()[&3], spec.coefficients()[&-3]);
        assert!(SpdcOamSpectrum::gaussian(5, 0.0).is_err());
    }

    #[test]
    fn asymmetric_grid_rejected() {
        let r = BiphotonSpectrum::new(1.0, vec![-1.0, 0.5, 1.0], vec![Complex64::new(1.0, 0.0); 3]);
        assert_eq!(r.unwrap_err(), Error::AsymmetricGrid);
    }

    #[test]
    fn bin_labels_are_antisymmetric() {
        let s = BiphotonSpectrum::gaussian(10.0, 1.0, 8, 3.0).unwrap();
        for j in 0..s.len() {
            assert_eq!(s.bin_label(s.mirror_index(j)), -s.bin_label(j));
            assert_eq!(s.index_of_bin(s.bin_label(j)), Some(j));
        }
        assert_eq!(s.index_of_bin(0), None);
    }
}
