use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fock::{BasisState, FockSpace, ModeLabel, Observable};

/// σ_x on the occupation qubit. A single-mode space uses {|0⟩, |1⟩}; a
/// two-mode space uses one photon in the first or second mode.
pub fn observable_a(space: Arc<FockSpace>) -> Result<Observable> {
    let (lower, upper) = match space.modes() {
        [m] => (BasisState::vacuum(), BasisState::from_occupations([(*m, 1)])),
        [a, b] => (BasisState::from_occupations([(*a, 1)]), BasisState::from_occupations([(*b, 1)])),
        _ => return Err(Error::InvalidParameter("Â needs a one- or two-mode space".into())),
    };
    let one = Complex64::new(1.0, 0.0);
    Observable::from_entries(space, [(lower.clone(), upper.clone(), one), (upper, lower, one)])
}

/// |0,N⟩⟨N,0| + |N,0⟩⟨0,N|.
pub fn observable_b(space: Arc<FockSpace>, a: ModeLabel, b: ModeLabel, n: u32) -> Result<Observable> {
    if n == 0 || a == b {
        return Err(Error::InvalidParameter("B̂_N needs N ≥ 1 and two distinct modes".into()));
    }
    space.check_mode(a)?;
    space.check_mode(b)?;
    let na = BasisState::from_occupations([(a, n)]);
    let nb = BasisState::from_occupations([(b, n)]);
    let one = Complex64::new(1.0, 0.0);
    Observable::from_entries(space, [(nb.clone(), na.clone(), one), (na, nb, one)])
}

/// Coincidence projector: charge +l at one detector and −l at the other,
/// either way round. `detectors` are the OAM channels of the two outputs.
pub fn observable_r(space: Arc<FockSpace>, detectors: (u8, u8), l: i32) -> Result<Observable> {
    if l == 0 || detectors.0 == detectors.1 {
        return Err(Error::InvalidParameter("R̂ needs l ≠ 0 and two detector channels".into()));
    }
    let (c, d) = detectors;
    let one = Complex64::new(1.0, 0.0);
    let mut entries = Vec::new();
    for s in [l, -l] {
        let b = BasisState::from_occupations([(ModeLabel::oam(c, s), 1), (ModeLabel::oam(d, -s), 1)]);
        entries.push((b.clone(), b, one));
    }
    Observable::from_entries(space, entries)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{expectation, StateVector};

    #[test]
    fn a_is_pauli_x() {
        let m = ModeLabel::path(0);
        let space = FockSpace::single_mode(m, 1).unwrap();
        let a = observable_a(space.clone()).unwrap();
        let dense = a.to_dense(&space.basis());
        assert_eq!(dense[(0, 0)], Complex64::new(0.0, 0.0));
        assert_eq!(dense[(0, 1)], Complex64::new(1.0, 0.0));
        assert_eq!(dense[(1, 0)], Complex64::new(1.0, 0.0));
        let sq = a.compose(&a);
        assert!(sq.max_abs_diff(&Observable::identity(space)) < 1e-15);
        let eig = dense.symmetric_eigenvalues();
        let mut e: Vec<f64> = eig.iter().copied().collect();
        e.sort_by(f64::total_cmp);
        assert!((e[0] + 1.0).abs() < 1e-14 && (e[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn b_vanishes_on_vacuum_and_squares_to_noon_identity() {
        let (a, b) = (ModeLabel::path(0), ModeLabel::path(1));
        let space = FockSpace::new([a, b], 3).unwrap();
        let op = observable_b(space.clone(), a, b, 3).unwrap();
        assert!(op.is_hermitian());
        assert_eq!(expectation(&StateVector::vacuum(space.clone()), &op).unwrap(), 0.0);
        let sq = op.compose(&op);
        assert_eq!(sq.nnz(), 2);
        assert!(observable_b(space, a, b, 4).is_err());
    }
}
