//! Paired index sets `I_n = {±1, …, ±(n+1)}`, families indexed by them and
//! permutations of them.
//!
//! Indices are stored by *position*: `+k` lives at `2(k-1)` and `-k` at
//! `2(k-1)+1`, so the involution `i ↦ -i` is `pos ^ 1` and the canonical
//! order is `1, -1, 2, -2, …`.

use std::collections::BTreeMap;
use std::fmt;

use serde::ser::SerializeMap;
use serde::{Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FamilyError {
    #[error("a family over I_{n} needs {expected} entries, got {got}")]
    WrongLength { n: usize, expected: usize, got: usize },
    #[error("index sets differ: I_{0} vs I_{1}")]
    IndexSetMismatch(usize, usize),
    #[error("mapping is not a bijection on I_{0}")]
    NotBijective(usize),
    #[error("invalid signed index {0}")]
    BadIndex(i64),
}

/// Signed index of a position.
#[inline]
pub fn signed_index(pos: usize) -> i64 {
    let k = (pos / 2 + 1) as i64;
    if pos.is_multiple_of(2) {
        k
    } else {
        -k
    }
}

/// Position of a signed index.
#[inline]
pub fn position(index: i64) -> Result<usize, FamilyError> {
    if index == 0 {
        return Err(FamilyError::BadIndex(index));
    }
    let k = index.unsigned_abs() as usize;
    Ok(2 * (k - 1) + usize::from(index < 0))
}

/// Position of `-i` given the position of `i`.
#[inline]
pub fn opposite(pos: usize) -> usize {
    pos ^ 1
}

/// A family `(x_i)_{i ∈ I_n}` of point indices. Repetition is allowed.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PairedFamily {
    n: usize,
    entries: Vec<usize>,
}

impl PairedFamily {
    /// `entries[pos]` is the point at position `pos`.
    pub fn new(n: usize, entries: Vec<usize>) -> Result<Self, FamilyError> {
        let expected = 2 * (n + 1);
        if entries.len() != expected {
            return Err(FamilyError::WrongLength { n, expected, got: entries.len() });
        }
        Ok(PairedFamily { n, entries })
    }

    /// Pair `k` (zero based) supplies `x_{k+1}` and `x_{-(k+1)}`.
    pub fn from_pairs(pairs: &[(usize, usize)]) -> Self {
        assert!(!pairs.is_empty(), "a family has at least one pair");
        let entries = pairs.iter().flat_map(|&(a, b)| [a, b]).collect();
        PairedFamily { n: pairs.len() - 1, entries }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn size(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> &[usize] {
        &self.entries
    }

    /// Point at position `pos`.
    #[inline]
    pub fn at(&self, pos: usize) -> usize {
        self.entries[pos]
    }

    /// Point at signed index `i`.
    pub fn get(&self, index: i64) -> Option<usize> {
        position(index).ok().and_then(|p| self.entries.get(p).copied())
    }

    pub fn pairs(&self) -> Vec<(usize, usize)> {
        self.entries.chunks(2).map(|c| (c[0], c[1])).collect()
    }

    pub fn is_injective(&self) -> bool {
        let mut v = self.entries.clone();
        v.sort_unstable();
        v.windows(2).all(|w| w[0] != w[1])
    }

    pub fn describe(&self, labels: &[String]) -> String {
        self.pairs()
            .iter()
            .map(|&(a, b)| format!("{},{}", labels[a], labels[b]))
            .collect::<Vec<_>>()
            .join(" | ")
    }
}

impl Serialize for PairedFamily {
    /// As the list of pairs `[x_k, x_{-k}]`.
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        self.pairs().serialize(serializer)
    }
}

/// A bijection of `I_n`, stored as images of positions.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IndexPermutation {
    n: usize,
    images: Vec<usize>,
}

impl fmt::Debug for IndexPermutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = (0..self.images.len())
            .map(|p| format!("{}→{}", signed_index(p), signed_index(self.images[p])))
            .collect();
        write!(f, "[{}]", parts.join(", "))
    }
}

impl IndexPermutation {
    pub fn from_positions(n: usize, images: Vec<usize>) -> Result<Self, FamilyError> {
        let m = 2 * (n + 1);
        if images.len() != m {
            return Err(FamilyError::WrongLength { n, expected: m, got: images.len() });
        }
        let mut hit = vec![false; m];
        for &p in &images {
            if p >= m || std::mem::replace(&mut hit[p], true) {
                return Err(FamilyError::NotBijective(n));
            }
        }
        Ok(IndexPermutation { n, images })
    }

    /// From `(i, α(i))` pairs of signed indices; every index must appear once.
    pub fn from_signed(n: usize, map: &[(i64, i64)]) -> Result<Self, FamilyError> {
        let m = 2 * (n + 1);
        let mut images = vec![usize::MAX; m];
        for &(i, j) in map {
            let (p, q) = (position(i)?, position(j)?);
            if p >= m || q >= m {
                return Err(FamilyError::NotBijective(n));
            }
            images[p] = q;
        }
        if images.contains(&usize::MAX) {
            return Err(FamilyError::NotBijective(n));
        }
        Self::from_positions(n, images)
    }

    pub fn identity(n: usize) -> Self {
        IndexPermutation { n, images: (0..2 * (n + 1)).collect() }
    }

    pub fn minus_id(n: usize) -> Self {
        IndexPermutation { n, images: (0..2 * (n + 1)).map(opposite).collect() }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    #[inline]
    pub fn image(&self, pos: usize) -> usize {
        self.images[pos]
    }

    pub fn apply(&self, index: i64) -> Option<i64> {
        position(index).ok().and_then(|p| self.images.get(p)).map(|&q| signed_index(q))
    }

    pub fn is_minus_id(&self) -> bool {
        self.images.iter().enumerate().all(|(p, &q)| q == opposite(p))
    }

    pub fn is_fixed_point_free(&self) -> bool {
        self.images.iter().enumerate().all(|(p, &q)| p != q)
    }

    /// Signed mapping `i → α(i)` in canonical index order.
    pub fn signed_map(&self) -> BTreeMap<i64, i64> {
        self.images.iter().enumerate().map(|(p, &q)| (signed_index(p), signed_index(q))).collect()
    }
}

impl Serialize for IndexPermutation {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut map = serializer.serialize_map(Some(self.images.len()))?;
        for (p, &q) in self.images.iter().enumerate() {
            map.serialize_entry(&signed_index(p).to_string(), &signed_index(q))?;
        }
        map.end()
    }
}
