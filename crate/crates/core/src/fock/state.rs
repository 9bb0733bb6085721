use std::collections::BTreeMap;
use std::sync::Arc;

use num_complex::Complex64;

use super::space::{BasisState, FockSpace, ModeLabel};
use super::{NORM_TOLERANCE, PRUNE_THRESHOLD};
use crate::error::{Error, Result};

/// Sparse vector over the occupation-number basis of a [`FockSpace`].
///
/// Constructors that prepare physical states normalize. Ladder operators and
/// raw operator application return unnormalized vectors, since those maps are
/// linear but not unitary.
#[derive(Debug, Clone)]
pub struct StateVector {
    space: Arc<FockSpace>,
    amps: BTreeMap<BasisState, Complex64>,
}

impl StateVector {
    pub fn zero(space: Arc<FockSpace>) -> Self {
        Self { space, amps: BTreeMap::new() }
    }

    pub fn vacuum(space: Arc<FockSpace>) -> Self {
        Self::basis(space, BasisState::vacuum()).expect("vacuum is always in the space")
    }

    /// A single normalized basis state.
    pub fn basis(space: Arc<FockSpace>, state: BasisState) -> Result<Self> {
        Self::from_amplitudes(space, [(state, Complex64::new(1.0, 0.0))])
    }

    /// Normalized superposition; repeated basis states add.
    pub fn from_amplitudes<I>(space: Arc<FockSpace>, amps: I) -> Result<Self>
    where
        I: IntoIterator<Item = (BasisState, Complex64)>,
    {
        let mut v = Self::from_raw(space, amps)?;
        v.normalize()?;
        Ok(v)
    }

    /// Unnormalized vector; every basis state must lie in the space.
    pub fn from_raw<I>(space: Arc<FockSpace>, amps: I) -> Result<Self>
    where
        I: IntoIterator<Item = (BasisState, Complex64)>,
    {
        let mut map = BTreeMap::new();
        for (b, a) in amps {
            check_basis(&space, &b)?;
            *map.entry(b).or_insert(Complex64::new(0.0, 0.0)) += a;
        }
        let mut v = Self { space, amps: map };
        v.prune();
        Ok(v)
    }

    pub(crate) fn from_map_unchecked(space: Arc<FockSpace>, amps: BTreeMap<BasisState, Complex64>) -> Self {
        let mut v = Self { space, amps };
        v.prune();
        v
    }

    pub fn space(&self) -> &Arc<FockSpace> {
        &self.space
    }

    pub fn amplitude(&self, b: &BasisState) -> Complex64 {
        self.amps.get(b).copied().unwrap_or_default()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&BasisState, &Complex64)> {
        self.amps.iter()
    }

    pub fn len(&self) -> usize {
        self.amps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amps.is_empty()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.values().map(|a| a.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn is_normalized(&self) -> bool {
        (self.norm() - 1.0).abs() < NORM_TOLERANCE
    }

    pub fn normalize(&mut self) -> Result<()> {
        let n = self.norm();
        if n == 0.0 {
            return Err(Error::ZeroNorm);
        }
        self.amps.values_mut().for_each(|a| *a /= n);
        Ok(())
    }

    pub fn normalized(mut self) -> Result<Self> {
        self.normalize()?;
        Ok(self)
    }

    /// ⟨self|other⟩.
    pub fn inner(&self, other: &StateVector) -> Complex64 {
        let (small, large, conj_small) = if self.amps.len() <= other.amps.len() {
            (self, other, true)
        } else {
            (other, self, false)
        };
        let mut acc = Complex64::new(0.0, 0.0);
        for (b, a) in &small.amps {
            if let Some(c) = large.amps.get(b) {
                acc += if conj_small { a.conj() * c } else { c.conj() * a };
            }
        }
        acc
    }

    /// |⟨self|other⟩|.
    pub fn fidelity(&self, other: &StateVector) -> f64 {
        self.inner(other).norm()
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        let amps = self.amps.iter().map(|(b, a)| (b.clone(), a * factor)).collect();
        Self::from_map_unchecked(self.space.clone(), amps)
    }

    pub fn add(&self, other: &StateVector) -> Self {
        let mut amps = self.amps.clone();
        for (b, a) in &other.amps {
            *amps.entry(b.clone()).or_default() += a;
        }
        Self::from_map_unchecked(self.space.clone(), amps)
    }

    /// Expectation of the total photon number.
    pub fn total_number_expectation(&self) -> f64 {
        self.amps.iter().map(|(b, a)| a.norm_sqr() * b.total() as f64).sum()
    }

    /// Maximum entrywise distance to another vector.
    pub fn max_abs_diff(&self, other: &StateVector) -> f64 {
        let mut m: f64 = 0.0;
        for (b, a) in &self.amps {
            m = m.max((a - other.amplitude(b)).norm());
        }
        for (b, a) in &other.amps {
            if !self.amps.contains_key(b) {
                m = m.max(a.norm());
            }
        }
        m
    }

    /// Applies a map that sends each populated basis state to a linear
    /// combination of basis states.
    pub(crate) fn map_basis<F>(&self, mut f: F) -> Result<Self>
    where
        F: FnMut(&BasisState) -> Result<Vec<(BasisState, Complex64)>>,
    {
        let mut out: BTreeMap<BasisState, Complex64> = BTreeMap::new();
        for (b, a) in &self.amps {
            for (nb, c) in f(b)? {
                *out.entry(nb).or_default() += a * c;
            }
        }
        Ok(Self::from_map_unchecked(self.space.clone(), out))
    }

    fn prune(&mut self) {
        self.amps.retain(|_, a| a.norm() >= PRUNE_THRESHOLD);
    }
}

fn check_basis(space: &FockSpace, b: &BasisState) -> Result<()> {
    for &(m, _) in b.occupations() {
        space.check_mode(m)?;
    }
    if b.total() > space.n_max() {
        return Err(Error::TruncationOverflow { requested: b.total(), n_max: space.n_max() });
    }
    Ok(())
}

/// â† on `mode`: |n⟩ → √(n+1)|n+1⟩. Not renormalized.
pub fn create(state: &StateVector, mode: ModeLabel) -> Result<StateVector> {
    state.space.check_mode(mode)?;
    let n_max = state.space.n_max();
    state.map_basis(|b| {
        if b.total() + 1 > n_max {
            return Err(Error::TruncationOverflow { requested: b.total() + 1, n_max });
        }
        let n = b.count(mode);
        Ok(vec![(b.with_count(mode, n + 1), Complex64::new(((n + 1) as f64).sqrt(), 0.0))])
    })
}

/// â on `mode`: |n⟩ → √n|n−1⟩, with the vacuum component sent to zero.
pub fn annihilate(state: &StateVector, mode: ModeLabel) -> Result<StateVector> {
    state.space.check_mode(mode)?;
    state.map_basis(|b| {
        let n = b.count(mode);
        if n == 0 {
            Ok(Vec::new())
        } else {
            Ok(vec![(b.with_count(mode, n - 1), Complex64::new((n as f64).sqrt(), 0.0))])
        }
    })
}

/// ⟨N̂_mode⟩ = Σ |ψ_b|² n_mode(b).
pub fn number_expectation(state: &StateVector, mode: ModeLabel) -> f64 {
    state.iter().map(|(b, a)| a.norm_sqr() * b.count(mode) as f64).sum()
}

/// Normalized partial sum (N_max+1)^{-1/2} Σ_{n≤N_max} e^{inφ}|n⟩ of the
/// Susskind-Glogower eigenstate. Returns the state and the norm of the
/// truncation tail in `Ŝ|φ⟩ − e^{iφ}|φ⟩`, which is 1/√(N_max+1).
pub fn truncated_phase_state(space: Arc<FockSpace>, mode: ModeLabel, phi: f64) -> Result<(StateVector, f64)> {
    space.check_mode(mode)?;
    let n_max = space.n_max();
    let amps: Vec<_> = (0..=n_max)
        .map(|n| (BasisState::vacuum().with_count(mode, n), Complex64::from_polar(1.0, n as f64 * phi)))
        .collect();
    let state = StateVector::from_amplitudes(space, amps)?;
    Ok((state, 1.0 / ((n_max + 1) as f64).sqrt()))
}
