//! Subsets of `L = {0, ..., l}` and families of them.

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Largest `l` for which full enumeration of `2^L` is allowed.
pub const MAX_ENUMERATION_GROUND: usize = 20;

/// A subset of `{0, ..., 31}` stored as a bit mask.
///
/// Ordering is lexicographic on the ascending member sequence, so
/// `{0} < {0,1} < {0,2} < {1}`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct IndexSet(u32);

impl IndexSet {
    pub const MAX_ELEMENT: usize = 31;

    pub fn empty() -> Self {
        IndexSet(0)
    }

    /// `{0, ..., n-1}`.
    pub fn range(n: usize) -> Self {
        assert!(n <= 32);
        if n == 32 {
            IndexSet(u32::MAX)
        } else {
            IndexSet((1u32 << n) - 1)
        }
    }

    pub fn singleton(i: usize) -> Self {
        assert!(i <= Self::MAX_ELEMENT);
        IndexSet(1 << i)
    }

    pub fn from_bits(bits: u32) -> Self {
        IndexSet(bits)
    }

    pub fn bits(self) -> u32 {
        self.0
    }

    pub fn contains(self, i: usize) -> bool {
        i <= Self::MAX_ELEMENT && self.0 & (1 << i) != 0
    }

    pub fn insert(&mut self, i: usize) {
        assert!(i <= Self::MAX_ELEMENT);
        self.0 |= 1 << i;
    }

    pub fn with(self, i: usize) -> Self {
        let mut s = self;
        s.insert(i);
        s
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn is_subset(self, other: IndexSet) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn union(self, other: IndexSet) -> Self {
        IndexSet(self.0 | other.0)
    }

    pub fn intersection(self, other: IndexSet) -> Self {
        IndexSet(self.0 & other.0)
    }

    pub fn difference(self, other: IndexSet) -> Self {
        IndexSet(self.0 & !other.0)
    }

    pub fn min(self) -> Option<usize> {
        (self.0 != 0).then(|| self.0.trailing_zeros() as usize)
    }

    pub fn max(self) -> Option<usize> {
        (self.0 != 0).then(|| 31 - self.0.leading_zeros() as usize)
    }

    pub fn iter(self) -> impl Iterator<Item = usize> {
        (0..32).filter(move |&i| self.0 & (1 << i) != 0)
    }

    pub fn to_vec(self) -> Vec<usize> {
        self.iter().collect()
    }
}

impl FromIterator<usize> for IndexSet {
    fn from_iter<T: IntoIterator<Item = usize>>(iter: T) -> Self {
        let mut s = IndexSet::empty();
        for i in iter {
            s.insert(i);
        }
        s
    }
}

impl Ord for IndexSet {
    fn cmp(&self, other: &Self) -> Ordering {
        self.iter().cmp(other.iter())
    }
}

impl PartialOrd for IndexSet {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for IndexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (k, i) in self.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{i}")?;
        }
        write!(f, "}}")
    }
}

impl fmt::Debug for IndexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl Serialize for IndexSet {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_seq(self.iter())
    }
}

impl<'de> Deserialize<'de> for IndexSet {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = Vec::<usize>::deserialize(d)?;
        if let Some(&bad) = v.iter().find(|&&i| i > IndexSet::MAX_ELEMENT) {
            return Err(serde::de::Error::custom(format!(
                "index {bad} out of range"
            )));
        }
        Ok(v.into_iter().collect())
    }
}

/// A duplicate-free family of subsets of `L = {0, ..., ground}`.
#[derive(Clone, PartialEq, Eq, Hash, Serialize)]
pub struct SetSystem {
    ground: usize,
    sets: BTreeSet<IndexSet>,
}

impl SetSystem {
    pub fn new(ground: usize, sets: impl IntoIterator<Item = IndexSet>) -> Result<Self> {
        if ground > IndexSet::MAX_ELEMENT {
            return Err(Error::ResourceLimit {
                what: "ground set size".into(),
                limit: IndexSet::MAX_ELEMENT + 1,
            });
        }
        let universe = IndexSet::range(ground + 1);
        let sets: BTreeSet<IndexSet> = sets.into_iter().collect();
        if let Some(bad) = sets.iter().find(|s| !s.is_subset(universe)) {
            return Err(Error::InvalidSetSystem(format!(
                "{bad} is not a subset of {universe}"
            )));
        }
        Ok(SetSystem { ground, sets })
    }

    pub fn empty(ground: usize) -> Self {
        Self::new(ground, []).unwrap()
    }

    /// Every subset of `L` of the given size.
    pub fn of_size(ground: usize, size: usize) -> Result<Self> {
        let all = Self::power_set(ground)?;
        Ok(all.filtered(|s| s.len() == size))
    }

    /// All of `2^L`.
    pub fn power_set(ground: usize) -> Result<Self> {
        check_enumerable(ground)?;
        let n = ground + 1;
        Ok(SetSystem {
            ground,
            sets: (0..1u32 << n).map(IndexSet::from_bits).collect(),
        })
    }

    pub fn ground(&self) -> usize {
        self.ground
    }

    pub fn universe(&self) -> IndexSet {
        IndexSet::range(self.ground + 1)
    }

    pub fn len(&self) -> usize {
        self.sets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sets.is_empty()
    }

    pub fn contains(&self, s: IndexSet) -> bool {
        self.sets.contains(&s)
    }

    pub fn iter(&self) -> impl Iterator<Item = IndexSet> + '_ {
        self.sets.iter().copied()
    }

    pub fn is_antichain(&self) -> bool {
        self.sets
            .iter()
            .all(|a| self.sets.iter().all(|b| a == b || !a.is_subset(*b)))
    }

    fn filtered(&self, keep: impl Fn(IndexSet) -> bool) -> SetSystem {
        SetSystem {
            ground: self.ground,
            sets: self.sets.iter().copied().filter(|s| keep(*s)).collect(),
        }
    }

    fn enumerate(&self, keep: impl Fn(IndexSet) -> bool) -> Result<SetSystem> {
        check_enumerable(self.ground)?;
        let n = self.ground + 1;
        Ok(SetSystem {
            ground: self.ground,
            sets: (0..1u32 << n)
                .map(IndexSet::from_bits)
                .filter(|s| keep(*s))
                .collect(),
        })
    }

    /// `𝓛(α)`: every subset of a member.
    pub fn lower_set(&self) -> Result<SetSystem> {
        self.enumerate(|j| self.sets.iter().any(|i| j.is_subset(*i)))
    }

    /// `𝓤(α)`: every superset (within `L`) of a member.
    pub fn upper_set(&self) -> Result<SetSystem> {
        self.enumerate(|j| self.sets.iter().any(|i| i.is_subset(j)))
    }

    pub fn min_elements(&self) -> SetSystem {
        self.filtered(|a| !self.sets.iter().any(|b| *b != a && b.is_subset(a)))
    }

    pub fn max_elements(&self) -> SetSystem {
        self.filtered(|a| !self.sets.iter().any(|b| *b != a && a.is_subset(*b)))
    }

    /// `αᵘ = {J ⊆ L | ∀I ∈ α: J ∖ I ≠ ∅}`, i.e. `2^L ∖ 𝓛(α)`.
    pub fn alpha_u(&self) -> Result<SetSystem> {
        self.enumerate(|j| self.sets.iter().all(|i| !j.difference(*i).is_empty()))
    }

    /// `αˡ = {J ⊆ L | ∀I ∈ α: I ∖ J ≠ ∅}`, i.e. `2^L ∖ 𝓤(α)`.
    pub fn alpha_l(&self) -> Result<SetSystem> {
        self.enumerate(|j| self.sets.iter().all(|i| !i.difference(j).is_empty()))
    }

    /// Complement within `L` of each member.
    pub fn complements(&self) -> SetSystem {
        let u = self.universe();
        SetSystem {
            ground: self.ground,
            sets: self.sets.iter().map(|s| u.difference(*s)).collect(),
        }
    }

    /// Whether `I ∩ J = ∅` for all distinct members `I`, `J`.
    pub fn pairwise_disjoint(&self) -> bool {
        let v: Vec<_> = self.iter().collect();
        v.iter()
            .enumerate()
            .all(|(a, x)| v[a + 1..].iter().all(|y| x.intersection(*y).is_empty()))
    }
}

fn check_enumerable(ground: usize) -> Result<()> {
    if ground > MAX_ENUMERATION_GROUND {
        return Err(Error::ResourceLimit {
            what: "ground set for 2^L enumeration (l)".into(),
            limit: MAX_ENUMERATION_GROUND,
        });
    }
    Ok(())
}

impl fmt::Display for SetSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (k, s) in self.sets.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{s}")?;
        }
        write!(f, "}}")
    }
}

impl fmt::Debug for SetSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self} over L={}", self.universe())
    }
}

/// Shorthand for building a system from nested slices.
pub fn system(ground: usize, sets: &[&[usize]]) -> SetSystem {
    SetSystem::new(ground, sets.iter().map(|s| s.iter().copied().collect())).unwrap()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn index_set_order_and_display() {
        let a: IndexSet = [0].into_iter().collect();
        let b: IndexSet = [0, 1].into_iter().collect();
        let c: IndexSet = [1].into_iter().collect();
        assert!(a < b && b < c);
        assert_eq!(b.to_string(), "{0,1}");
        assert_eq!(IndexSet::empty().to_string(), "{}");
    }

    #[test]
    fn lower_and_upper_sets() {
        let s = system(1, &[&[0, 1]]);
        assert_eq!(
            s.lower_set().unwrap(),
            system(1, &[&[], &[0], &[1], &[0, 1]])
        );
        let e = system(2, &[&[]]);
        assert_eq!(e.upper_set().unwrap(), SetSystem::power_set(2).unwrap());
        let s = system(2, &[&[1, 2], &[0]]);
        assert_eq!(
            s.lower_set().unwrap(),
            system(2, &[&[], &[0], &[1], &[2], &[1, 2]])
        );
    }

    #[test]
    fn min_and_max() {
        assert_eq!(
            system(1, &[&[0], &[0, 1]]).max_elements(),
            system(1, &[&[0, 1]])
        );
        assert_eq!(
            SetSystem::power_set(3).unwrap().min_elements(),
            system(3, &[&[]])
        );
        let anti = system(3, &[&[0, 1], &[0, 2], &[0, 3], &[1, 2, 3]]);
        assert_eq!(anti.min_elements(), anti);
        assert!(anti.is_antichain());
    }

    #[test]
    fn alpha_u_of_singletons_and_empty() {
        for ground in 0..5 {
            let singles = SetSystem::of_size(ground, 1).unwrap();
            let u = singles.alpha_u().unwrap();
            assert!(u.iter().all(|j| j.len() >= 2));
            assert_eq!(u.len(), (1 << (ground + 1)) - 1 - (ground + 1));
            assert_eq!(u.min_elements(), SetSystem::of_size(ground, 2).unwrap());

            let empty = system(ground, &[&[]]);
            let u = empty.alpha_u().unwrap();
            let mut expected = SetSystem::power_set(ground).unwrap();
            expected.sets.remove(&IndexSet::empty());
            assert_eq!(u, expected);
        }
    }

    #[test]
    fn out_of_range_members_rejected() {
        assert!(SetSystem::new(1, [IndexSet::singleton(2)]).is_err());
        assert!(matches!(
            SetSystem::power_set(21),
            Err(Error::ResourceLimit { .. })
        ));
    }
}
