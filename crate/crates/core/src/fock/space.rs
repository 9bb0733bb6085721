use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Degree of freedom a mode belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum ModeKind {
    Path,
    Oam,
    FrequencyBin,
    TwoLevel,
}

/// A distinguishable optical mode.
///
/// `channel` separates otherwise identical labels that travel in different
/// spatial arms (signal/idler, upper/lower). `index` is the value within the
/// kind: path number, OAM charge, frequency-bin number or atomic level.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ModeLabel {
    pub kind: ModeKind,
    pub channel: u8,
    pub index: i32,
}

impl ModeLabel {
    pub const fn new(kind: ModeKind, channel: u8, index: i32) -> Self {
        Self { kind, channel, index }
    }

    pub const fn path(index: i32) -> Self {
        Self::new(ModeKind::Path, 0, index)
    }

    pub const fn oam(channel: u8, charge: i32) -> Self {
        Self::new(ModeKind::Oam, channel, charge)
    }

    pub const fn frequency_bin(channel: u8, bin: i32) -> Self {
        Self::new(ModeKind::FrequencyBin, channel, bin)
    }

    pub const fn level(index: i32) -> Self {
        Self::new(ModeKind::TwoLevel, 0, index)
    }

    /// Same channel and kind, opposite index. Used for OAM charge reversal.
    pub const fn mirrored(self) -> Self {
        Self::new(self.kind, self.channel, -self.index)
    }
}

impl fmt::Display for ModeLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match self.kind {
            ModeKind::Path => "path",
            ModeKind::Oam => "oam",
            ModeKind::FrequencyBin => "freq",
            ModeKind::TwoLevel => "level",
        };
        write!(f, "{kind}[{}]:{}", self.channel, self.index)
    }
}

/// Occupation-number basis state in canonical form: entries sorted by mode,
/// zero counts omitted. The derived ordering is lexicographic over that list.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct BasisState(Vec<(ModeLabel, u32)>);

impl BasisState {
    pub fn vacuum() -> Self {
        Self(Vec::new())
    }

    /// Builds a canonical basis state; repeated modes are summed.
    pub fn from_occupations<I: IntoIterator<Item = (ModeLabel, u32)>>(occ: I) -> Self {
        let mut v: Vec<(ModeLabel, u32)> = occ.into_iter().filter(|&(_, n)| n > 0).collect();
        v.sort_by_key(|&(m, _)| m);
        let mut out: Vec<(ModeLabel, u32)> = Vec::with_capacity(v.len());
        for (m, n) in v {
            match out.last_mut() {
                Some((lm, ln)) if *lm == m => *ln += n,
                _ => out.push((m, n)),
            }
        }
        Self(out)
    }

    pub fn occupations(&self) -> &[(ModeLabel, u32)] {
        &self.0
    }

    pub fn count(&self, mode: ModeLabel) -> u32 {
        self.0
            .binary_search_by_key(&mode, |&(m, _)| m)
            .map(|i| self.0[i].1)
            .unwrap_or(0)
    }

    pub fn total(&self) -> u32 {
        self.0.iter().map(|&(_, n)| n).sum()
    }

    /// Returns a copy with `mode` set to `n` photons.
    pub fn with_count(&self, mode: ModeLabel, n: u32) -> Self {
        let mut v = self.0.clone();
        match v.binary_search_by_key(&mode, |&(m, _)| m) {
            Ok(i) if n == 0 => {
                v.remove(i);
            }
            Ok(i) => v[i].1 = n,
            Err(_) if n == 0 => {}
            Err(i) => v.insert(i, (mode, n)),
        }
        Self(v)
    }

    /// Restriction to the modes accepted by `keep`.
    pub fn restrict(&self, mut keep: impl FnMut(ModeLabel) -> bool) -> Self {
        Self(self.0.iter().copied().filter(|&(m, _)| keep(m)).collect())
    }

    /// Concatenates occupations of two states over disjoint mode sets.
    pub fn merge(&self, other: &Self) -> Self {
        Self::from_occupations(self.0.iter().chain(other.0.iter()).copied())
    }
}

impl fmt::Display for BasisState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "|")?;
        for (i, (m, n)) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{m}={n}")?;
        }
        write!(f, "⟩")
    }
}

/// Mode set plus total-photon-number truncation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FockSpace {
    modes: Vec<ModeLabel>,
    n_max: u32,
}

impl FockSpace {
    pub fn new<I: IntoIterator<Item = ModeLabel>>(modes: I, n_max: u32) -> Result<Arc<Self>> {
        let mut modes: Vec<ModeLabel> = modes.into_iter().collect();
        modes.sort();
        modes.dedup();
        if modes.is_empty() {
            return Err(Error::InvalidParameter("a Fock space needs at least one mode".into()));
        }
        Ok(Arc::new(Self { modes, n_max }))
    }

    /// Truncation of twice the largest photon number that will be prepared,
    /// so single ladder steps on prepared states never overflow.
    pub fn with_default_truncation<I: IntoIterator<Item = ModeLabel>>(
        modes: I,
        largest_prepared: u32,
    ) -> Result<Arc<Self>> {
        Self::new(modes, 2 * largest_prepared.max(1))
    }

    pub fn single_mode(mode: ModeLabel, n_max: u32) -> Result<Arc<Self>> {
        Self::new([mode], n_max)
    }

    pub fn modes(&self) -> &[ModeLabel] {
        &self.modes
    }

    pub fn n_max(&self) -> u32 {
        self.n_max
    }

    pub fn contains(&self, mode: ModeLabel) -> bool {
        self.modes.binary_search(&mode).is_ok()
    }

    pub fn check_mode(&self, mode: ModeLabel) -> Result<()> {
        if self.contains(mode) {
            Ok(())
        } else {
            Err(Error::ModeNotInSpace(mode))
        }
    }

    pub fn contains_basis(&self, b: &BasisState) -> bool {
        b.total() <= self.n_max && b.occupations().iter().all(|&(m, _)| self.contains(m))
    }

    /// Number of basis states, `C(M + n_max, n_max)`; saturates at `u64::MAX`.
    pub fn dimension(&self) -> u64 {
        let m = self.modes.len() as u128;
        let n = self.n_max as u128;
        let mut acc: u128 = 1;
        for k in 1..=n {
            acc = acc * (m + k) / k;
            if acc > u64::MAX as u128 {
                return u64::MAX;
            }
        }
        acc as u64
    }

    /// All basis states in canonical (sorted) order.
    pub fn basis(&self) -> Vec<BasisState> {
        let mut out = Vec::new();
        let mut counts = vec![0u32; self.modes.len()];
        self.enumerate(0, self.n_max, &mut counts, &mut out);
        out.sort();
        out
    }

    fn enumerate(&self, pos: usize, left: u32, counts: &mut Vec<u32>, out: &mut Vec<BasisState>) {
        if pos == self.modes.len() {
            out.push(BasisState::from_occupations(
                self.modes.iter().copied().zip(counts.iter().copied()),
            ));
            return;
        }
        for n in 0..=left {
            counts[pos] = n;
            self.enumerate(pos + 1, left - n, counts, out);
        }
        counts[pos] = 0;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dimension_matches_enumeration() {
        let space = FockSpace::new((0..3).map(ModeLabel::path), 4).unwrap();
        assert_eq!(space.dimension(), 35);
        let basis = space.basis();
        assert_eq!(basis.len(), 35);
        assert!(basis.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(basis[0], BasisState::vacuum());
    }

    #[test]
    fn canonical_form_drops_zeros_and_sorts() {
        let a = BasisState::from_occupations([(ModeLabel::path(1), 2), (ModeLabel::path(0), 0)]);
        let b = BasisState::vacuum().with_count(ModeLabel::path(1), 2);
        assert_eq!(a, b);
        assert_eq!(a.total(), 2);
        assert_eq!(a.count(ModeLabel::path(0)), 0);
    }

    #[test]
    fn labels_order_by_kind_then_channel_then_index() {
        let mut v = vec![ModeLabel::oam(1, -2), ModeLabel::path(3), ModeLabel::oam(0, 5)];
        v.sort();
        assert_eq!(v, vec![ModeLabel::path(3), ModeLabel::oam(0, 5), ModeLabel::oam(1, -2)]);
    }

    #[test]
    fn huge_dimension_saturates() {
        let space = FockSpace::new((0..4000).map(|i| ModeLabel::frequency_bin(0, i)), 40).unwrap();
        assert_eq!(space.dimension(), u64::MAX);
    }
}
