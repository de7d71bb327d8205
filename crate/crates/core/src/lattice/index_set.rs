use std::fmt;

use crate::error::{Error, Result};

/// A subset of `{1, …, dim}` stored as a bitmask. Indices are 1-based in the
/// public API to match the usual coordinate labels of `ℝ^{m+n}`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct IndexSet {
    dim: usize,
    mask: u32,
}

impl IndexSet {
    pub const MAX_DIM: usize = 31;

    pub fn empty(dim: usize) -> Self {
        assert!(dim <= Self::MAX_DIM, "dimension {dim} too large");
        IndexSet { dim, mask: 0 }
    }

    pub fn full(dim: usize) -> Self {
        assert!(dim <= Self::MAX_DIM, "dimension {dim} too large");
        IndexSet { dim, mask: (1u32 << dim) - 1 }
    }

    /// Contiguous range `lo..=hi` (1-based, inclusive). Empty when `lo > hi`.
    pub fn range(dim: usize, lo: usize, hi: usize) -> Self {
        let mut s = Self::empty(dim);
        for i in lo..=hi {
            s.mask |= 1 << (i - 1);
        }
        s
    }

    pub fn from_indices(dim: usize, indices: &[usize]) -> Result<Self> {
        if dim > Self::MAX_DIM {
            return Err(Error::domain(format!("dimension {dim} exceeds {}", Self::MAX_DIM)));
        }
        let mut mask = 0u32;
        for &i in indices {
            if i == 0 || i > dim {
                return Err(Error::domain(format!("index {i} outside 1..={dim}")));
            }
            mask |= 1 << (i - 1);
        }
        Ok(IndexSet { dim, mask })
    }

    pub(crate) fn from_mask(dim: usize, mask: u32) -> Self {
        debug_assert!(dim <= Self::MAX_DIM && (mask >> dim) == 0);
        IndexSet { dim, mask }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn mask(&self) -> u32 {
        self.mask
    }

    pub fn contains(&self, i: usize) -> bool {
        i >= 1 && i <= self.dim && self.mask & (1 << (i - 1)) != 0
    }

    pub fn len(&self) -> usize {
        self.mask.count_ones() as usize
    }

    pub fn is_empty(&self) -> bool {
        self.mask == 0
    }

    /// Members in increasing order.
    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        (1..=self.dim).filter(move |&i| self.contains(i))
    }

    pub fn indices(&self) -> Vec<usize> {
        self.iter().collect()
    }

    pub fn complement(&self) -> Self {
        IndexSet { dim: self.dim, mask: !self.mask & ((1u32 << self.dim) - 1) }
    }

    pub fn union(&self, other: &Self) -> Self {
        debug_assert_eq!(self.dim, other.dim);
        IndexSet { dim: self.dim, mask: self.mask | other.mask }
    }

    pub fn intersection(&self, other: &Self) -> Self {
        debug_assert_eq!(self.dim, other.dim);
        IndexSet { dim: self.dim, mask: self.mask & other.mask }
    }

    pub fn difference(&self, other: &Self) -> Self {
        debug_assert_eq!(self.dim, other.dim);
        IndexSet { dim: self.dim, mask: self.mask & !other.mask }
    }

    pub fn is_subset(&self, other: &Self) -> bool {
        self.mask & !other.mask == 0
    }

    pub fn is_disjoint(&self, other: &Self) -> bool {
        self.mask & other.mask == 0
    }

    /// Lexicographic order on the sorted member lists.
    pub fn lex_cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.iter().cmp(other.iter())
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

/// An index set meeting both the expanding block `{1,…,m}` and the
/// contracting block `{m+1,…,m+n}`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct AdmissibleSet {
    m: usize,
    n: usize,
    set: IndexSet,
}

impl AdmissibleSet {
    pub fn new(m: usize, n: usize, indices: &[usize]) -> Result<Self> {
        let set = IndexSet::from_indices(m + n, indices)?;
        Self::from_set(m, n, set)
    }

    pub fn from_set(m: usize, n: usize, set: IndexSet) -> Result<Self> {
        if m == 0 || n == 0 {
            return Err(Error::domain("m and n must be positive"));
        }
        if set.dim() != m + n {
            return Err(Error::Dimension { expected: m + n, got: set.dim() });
        }
        let first = IndexSet::range(m + n, 1, m);
        let second = IndexSet::range(m + n, m + 1, m + n);
        if set.is_disjoint(&first) || set.is_disjoint(&second) {
            return Err(Error::NotAdmissible(set.to_string()));
        }
        Ok(AdmissibleSet { m, n, set })
    }

    pub fn full(m: usize, n: usize) -> Self {
        AdmissibleSet { m, n, set: IndexSet::full(m + n) }
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn as_set(&self) -> &IndexSet {
        &self.set
    }

    /// `I′ = I ∩ {1,…,m}`.
    pub fn first_block(&self) -> IndexSet {
        self.set.intersection(&IndexSet::range(self.m + self.n, 1, self.m))
    }

    /// `I″ = I ∩ {m+1,…,m+n}`.
    pub fn second_block(&self) -> IndexSet {
        self.set.intersection(&IndexSet::range(self.m + self.n, self.m + 1, self.m + self.n))
    }

    pub fn contains(&self, i: usize) -> bool {
        self.set.contains(i)
    }

    pub fn len(&self) -> usize {
        self.set.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn indices(&self) -> Vec<usize> {
        self.set.indices()
    }

    pub fn complement(&self) -> IndexSet {
        self.set.complement()
    }
}

impl fmt::Display for AdmissibleSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.set.fmt(f)
    }
}

/// Every admissible subset of `{1,…,m+n}`, in lexicographic order of member lists.
pub fn all_admissible(m: usize, n: usize) -> Vec<AdmissibleSet> {
    let d = m + n;
    let mut out: Vec<AdmissibleSet> = (1u32..(1u32 << d))
        .filter_map(|mask| AdmissibleSet::from_set(m, n, IndexSet::from_mask(d, mask)).ok())
        .collect();
    out.sort_by(|a, b| a.set.lex_cmp(&b.set));
    out
}
