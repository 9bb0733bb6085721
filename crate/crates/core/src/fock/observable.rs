use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::space::{BasisState, FockSpace, ModeLabel};
use super::state::StateVector;
use super::PRUNE_THRESHOLD;
use crate::error::{Error, Result};

const HERMITIAN_TOLERANCE: f64 = 1e-12;
const RESIDUE_TOLERANCE: f64 = 1e-10;

/// Sparse linear operator on a truncated Fock space.
///
/// Entries are keyed `(row, column)`. The `hermitian` flag is computed at
/// construction, never asserted by the caller.
#[derive(Debug, Clone)]
pub struct Observable {
    space: Arc<FockSpace>,
    entries: BTreeMap<(BasisState, BasisState), Complex64>,
    hermitian: bool,
}

impl Observable {
    pub fn from_entries<I>(space: Arc<FockSpace>, entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (BasisState, BasisState, Complex64)>,
    {
        let mut map = BTreeMap::new();
        for (r, c, v) in entries {
            for b in [&r, &c] {
                if !space.contains_basis(b) {
                    for &(m, _) in b.occupations() {
                        space.check_mode(m)?;
                    }
                    return Err(Error::TruncationOverflow { requested: b.total(), n_max: space.n_max() });
                }
            }
            *map.entry((r, c)).or_insert(Complex64::new(0.0, 0.0)) += v;
        }
        Ok(Self::from_map(space, map))
    }

    fn from_map(space: Arc<FockSpace>, mut entries: BTreeMap<(BasisState, BasisState), Complex64>) -> Self {
        entries.retain(|_, v| v.norm() >= PRUNE_THRESHOLD);
        let mut obs = Self { space, entries, hermitian: false };
        obs.hermitian = obs.hermiticity_defect() < HERMITIAN_TOLERANCE;
        obs
    }

    pub fn space(&self) -> &Arc<FockSpace> {
        &self.space
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermitian
    }

    pub fn entry(&self, row: &BasisState, col: &BasisState) -> Complex64 {
        self.entries.get(&(row.clone(), col.clone())).copied().unwrap_or_default()
    }

    pub fn entries(&self) -> impl Iterator<Item = (&BasisState, &BasisState, &Complex64)> {
        self.entries.iter().map(|((r, c), v)| (r, c, v))
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    /// max |M − M†| over stored entries.
    pub fn hermiticity_defect(&self) -> f64 {
        self.entries
            .iter()
            .map(|((r, c), v)| {
                let t = self.entries.get(&(c.clone(), r.clone())).copied().unwrap_or_default();
                (v - t.conj()).norm()
            })
            .fold(0.0, f64::max)
    }

    /// Identity on every basis state of the space. Enumerates the basis.
    pub fn identity(space: Arc<FockSpace>) -> Self {
        let entries = space.basis().into_iter().map(|b| ((b.clone(), b), Complex64::new(1.0, 0.0))).collect();
        Self::from_map(space, entries)
    }

    /// Diagonal `f(n_mode)` over the enumerated basis.
    pub fn number_function(space: Arc<FockSpace>, mode: ModeLabel, f: impl Fn(u32) -> f64) -> Result<Self> {
        space.check_mode(mode)?;
        let entries = space
            .basis()
            .into_iter()
            .map(|b| {
                let v = f(b.count(mode));
                ((b.clone(), b), Complex64::new(v, 0.0))
            })
            .collect();
        Ok(Self::from_map(space, entries))
    }

    pub fn number(space: Arc<FockSpace>, mode: ModeLabel) -> Result<Self> {
        Self::number_function(space, mode, |n| n as f64)
    }

    /// Matrix of â on `mode`.
    pub fn annihilation(space: Arc<FockSpace>, mode: ModeLabel) -> Result<Self> {
        space.check_mode(mode)?;
        let entries = space
            .basis()
            .into_iter()
            .filter_map(|b| {
                let n = b.count(mode);
                (n > 0).then(|| ((b.with_count(mode, n - 1), b), Complex64::new((n as f64).sqrt(), 0.0)))
            })
            .collect();
        Ok(Self::from_map(space, entries))
    }

    /// Σ_k w_k |χ_k⟩⟨χ_k|.
    pub fn weighted_projectors<'a, I>(space: Arc<FockSpace>, terms: I) -> Self
    where
        I: IntoIterator<Item = (f64, &'a StateVector)>,
    {
        let mut map: BTreeMap<(BasisState, BasisState), Complex64> = BTreeMap::new();
        for (w, chi) in terms {
            for (r, a) in chi.iter() {
                for (c, b) in chi.iter() {
                    *map.entry((r.clone(), c.clone())).or_default() += a * b.conj() * w;
                }
            }
        }
        Self::from_map(space, map)
    }

    pub fn projector(chi: &StateVector) -> Self {
        Self::weighted_projectors(chi.space().clone(), [(1.0, chi)])
    }

    pub fn adjoint(&self) -> Self {
        let entries = self.entries.iter().map(|((r, c), v)| ((c.clone(), r.clone()), v.conj())).collect();
        Self::from_map(self.space.clone(), entries)
    }

    pub fn scale(&self, f: Complex64) -> Self {
        let entries = self.entries.iter().map(|(k, v)| (k.clone(), v * f)).collect();
        Self::from_map(self.space.clone(), entries)
    }

    pub fn add(&self, other: &Observable) -> Self {
        let mut entries = self.entries.clone();
        for (k, v) in &other.entries {
            *entries.entry(k.clone()).or_default() += v;
        }
        Self::from_map(self.space.clone(), entries)
    }

    /// Matrix product `self · other`.
    pub fn compose(&self, other: &Observable) -> Self {
        let mut by_row: BTreeMap<&BasisState, Vec<(&BasisState, Complex64)>> = BTreeMap::new();
        for ((r, c), v) in &other.entries {
            by_row.entry(r).or_default().push((c, *v));
        }
        let mut out: BTreeMap<(BasisState, BasisState), Complex64> = BTreeMap::new();
        for ((r, k), v) in &self.entries {
            if let Some(row) = by_row.get(k) {
                for (c, w) in row {
                    *out.entry((r.clone(), (*c).clone())).or_default() += v * w;
                }
            }
        }
        Self::from_map(self.space.clone(), out)
    }

    /// `A ⊗ B` on a joint space whose modes include both factors' (disjoint) modes.
    pub fn tensor(a: &Observable, b: &Observable, joint: Arc<FockSpace>) -> Result<Self> {
        let mut entries = Vec::with_capacity(a.nnz() * b.nnz());
        for ((ra, ca), va) in &a.entries {
            for ((rb, cb), vb) in &b.entries {
                entries.push((ra.merge(rb), ca.merge(cb), va * vb));
            }
        }
        Self::from_entries(joint, entries)
    }

    /// M|ψ⟩ (unnormalized).
    pub fn apply(&self, state: &StateVector) -> StateVector {
        let mut out: BTreeMap<BasisState, Complex64> = BTreeMap::new();
        for ((r, c), v) in &self.entries {
            let a = state.amplitude(c);
            if a != Complex64::default() {
                *out.entry(r.clone()).or_default() += v * a;
            }
        }
        StateVector::from_map_unchecked(state.space().clone(), out)
    }

    /// Basis states touched by any entry.
    pub fn support(&self) -> BTreeSet<BasisState> {
        self.entries.keys().flat_map(|(r, c)| [r.clone(), c.clone()]).collect()
    }

    /// Dense matrix on an ordered list of basis states.
    pub fn to_dense(&self, basis: &[BasisState]) -> DMatrix<Complex64> {
        let index: BTreeMap<&BasisState, usize> = basis.iter().enumerate().map(|(i, b)| (b, i)).collect();
        let mut m = DMatrix::zeros(basis.len(), basis.len());
        for ((r, c), v) in &self.entries {
            if let (Some(&i), Some(&j)) = (index.get(r), index.get(c)) {
                m[(i, j)] = *v;
            }
        }
        m
    }

    /// Maximum entrywise distance to another operator.
    pub fn max_abs_diff(&self, other: &Observable) -> f64 {
        let keys: BTreeSet<_> = self.entries.keys().chain(other.entries.keys()).collect();
        keys.into_iter()
            .map(|k| {
                let a = self.entries.get(k).copied().unwrap_or_default();
                let b = other.entries.get(k).copied().unwrap_or_default();
                (a - b).norm()
            })
            .fold(0.0, f64::max)
    }
}

/// ⟨ψ|Ô|ψ⟩ for Hermitian Ô; the imaginary residue is checked then dropped.
pub fn expectation(state: &StateVector, obs: &Observable) -> Result<f64> {
    if !obs.is_hermitian() {
        return Err(Error::NonHermitian);
    }
    let v = state.inner(&obs.apply(state));
    if v.im.abs() > RESIDUE_TOLERANCE {
        return Err(Error::ImaginaryResidue(v.im));
    }
    Ok(v.re)
}

/// `(⟨Ô²⟩ − ⟨Ô⟩², √max(var, 0))`, with ⟨Ô²⟩ = ‖Ô|ψ⟩‖².
pub fn variance_and_uncertainty(state: &StateVector, obs: &Observable) -> Result<(f64, f64)> {
    let mean = expectation(state, obs)?;
    let second = obs.apply(state).norm_sqr();
    let var = second - mean * mean;
    Ok((var, var.max(0.0).sqrt()))
}

/// The Susskind-Glogower pair on a single-mode space.
#[derive(Debug, Clone)]
pub struct SusskindGlogower {
    /// Ŝ = Σ |n⟩⟨n+1| (non-Hermitian).
    pub s: Observable,
    /// Â = Ŝ + Ŝ† (Hermitian).
    pub a: Observable,
}

impl SusskindGlogower {
    /// max entrywise |Ŝ − (N̂+1)^{-1/2} â| over the truncated space.
    pub fn ladder_identity_defect(&self) -> Result<f64> {
        let space = self.s.space().clone();
        let mode = space.modes()[0];
        let inv_sqrt = Observable::number_function(space.clone(), mode, |n| 1.0 / ((n + 1) as f64).sqrt())?;
        let ladder = inv_sqrt.compose(&Observable::annihilation(space, mode)?);
        Ok(self.s.max_abs_diff(&ladder))
    }

    /// Same check against â N̂^{-1/2}, restricted to columns n ≥ 1 where N̂^{-1/2} exists.
    pub fn right_ladder_identity_defect(&self) -> Result<f64> {
        let space = self.s.space().clone();
        let mode = space.modes()[0];
        let inv_sqrt = Observable::number_function(space.clone(), mode, |n| if n == 0 { 0.0 } else { 1.0 / (n as f64).sqrt() })?;
        let ladder = Observable::annihilation(space, mode)?.compose(&inv_sqrt);
        Ok(self.s.max_abs_diff(&ladder))
    }
}

pub fn susskind_glogower(space: Arc<FockSpace>) -> Result<SusskindGlogower> {
    if space.modes().len() != 1 {
        return Err(Error::InvalidParameter("Susskind-Glogower operator needs a single-mode space".into()));
    }
    if space.n_max() < 1 {
        return Err(Error::InvalidParameter("Susskind-Glogower operator needs N_max >= 1".into()));
    }
    let mode = space.modes()[0];
    let ket = |n: u32| BasisState::vacuum().with_count(mode, n);
    let one = Complex64::new(1.0, 0.0);
    let s = Observable::from_entries(space.clone(), (0..space.n_max()).map(|n| (ket(n), ket(n + 1), one)))?;
    let a = s.add(&s.adjoint());
    Ok(SusskindGlogower { s, a })
}
