use std::collections::BTreeMap;

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::space::{BasisState, ModeLabel};
use super::state::StateVector;
use crate::error::{Error, Result};

/// Singular values below this do not count towards the Schmidt rank.
pub const SCHMIDT_THRESHOLD: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct Schmidt {
    pub rank: usize,
    /// Descending, including those below the rank threshold.
    pub singular_values: Vec<f64>,
}

impl Schmidt {
    pub fn is_separable(&self) -> bool {
        self.rank == 1
    }
}

/// Schmidt decomposition of a pure state across `side_a` | rest-of-space.
///
/// The amplitude matrix has one row per distinct restriction of a populated
/// basis state to `side_a`, one column per restriction to the complement.
pub fn schmidt_decomposition(state: &StateVector, side_a: &[ModeLabel]) -> Result<Schmidt> {
    let space = state.space();
    for &m in side_a {
        space.check_mode(m)?;
    }
    let in_a = |m: ModeLabel| side_a.contains(&m);
    if side_a.is_empty() || space.modes().iter().all(|&m| in_a(m)) {
        return Err(Error::EmptyPartition);
    }

    let mut rows: BTreeMap<BasisState, usize> = BTreeMap::new();
    let mut cols: BTreeMap<BasisState, usize> = BTreeMap::new();
    let mut triples = Vec::with_capacity(state.len());
    for (b, amp) in state.iter() {
        let a = b.restrict(in_a);
        let rest = b.restrict(|m| !in_a(m));
        let nr = rows.len();
        let i = *rows.entry(a).or_insert(nr);
        let nc = cols.len();
        let j = *cols.entry(rest).or_insert(nc);
        triples.push((i, j, *amp));
    }
    if triples.is_empty() {
        return Err(Error::ZeroNorm);
    }
    let mut m = DMatrix::<Complex64>::zeros(rows.len(), cols.len());
    for (i, j, a) in triples {
        m[(i, j)] += a;
    }
    let mut sv: Vec<f64> = m.singular_values().iter().copied().collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    let rank = sv.iter().filter(|&&s| s > SCHMIDT_THRESHOLD).count();
    Ok(Schmidt { rank, singular_values: sv })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::FockSpace;
    use approx::assert_abs_diff_eq;

    #[test]
    fn product_state_has_rank_one() {
        let (a, b) = (ModeLabel::path(0), ModeLabel::path(1));
        let space = FockSpace::new([a, b], 2).unwrap();
        let psi = StateVector::basis(space, BasisState::from_occupations([(a, 1)])).unwrap();
        let s = schmidt_decomposition(&psi, &[a]).unwrap();
        assert_eq!(s.rank, 1);
        assert!(s.is_separable());
    }

    #[test]
    fn noon_has_two_equal_singular_values() {
        let (a, b) = (ModeLabel::path(0), ModeLabel::path(1));
        let space = FockSpace::new([a, b], 3).unwrap();
        let one = Complex64::new(1.0, 0.0);
        let psi = StateVector::from_amplitudes(
            space,
            [(BasisState::from_occupations([(a, 3)]), one), (BasisState::from_occupations([(b, 3)]), one)],
        )
        .unwrap();
        let s = schmidt_decomposition(&psi, &[a]).unwrap();
        assert_eq!(s.rank, 2);
        assert_abs_diff_eq!(s.singular_values[0], 0.5f64.sqrt(), epsilon = 1e-14);
        assert_abs_diff_eq!(s.singular_values[1], 0.5f64.sqrt(), epsilon = 1e-14);
    }

    #[test]
    fn empty_side_is_rejected() {
        let (a, b) = (ModeLabel::path(0), ModeLabel::path(1));
        let space = FockSpace::new([a, b], 1).unwrap();
        let psi = StateVector::vacuum(space);
        assert_eq!(schmidt_decomposition(&psi, &[]).unwrap_err(), Error::EmptyPartition);
        assert_eq!(schmidt_decomposition(&psi, &[a, b]).unwrap_err(), Error::EmptyPartition);
    }
}
