//! m-subsets of `[d] = {1, ..., d}`: binomials, `ind`, the lexicographic
//! order and a combinatorial-number-system ranking.

use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

use crate::error::{Error, Result};

/// `C(b, a)`, defined as 0 whenever `a < 0` or `a > b`.
pub fn binom(b: i64, a: i64) -> u64 {
    if a < 0 || b < 0 || a > b {
        return 0;
    }
    let a = a.min(b - a) as u64;
    let b = b as u64;
    let mut acc: u128 = 1;
    for i in 0..a {
        acc = acc * (b - i) as u128 / (i + 1) as u128;
    }
    acc as u64
}

/// `C(b, a)` as a `usize`, for sizes of things that get allocated.
#[inline]
pub(crate) fn choose(b: usize, a: usize) -> usize {
    binom(b as i64, a as i64) as usize
}

/// A strictly increasing sequence of 1-based elements.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Subset(Vec<usize>);

impl Subset {
    /// Builds a subset from arbitrary elements; sorts and rejects duplicates
    /// or zero.
    pub fn new(mut elems: Vec<usize>) -> Result<Self> {
        elems.sort_unstable();
        if elems.first() == Some(&0) {
            return Err(Error::OutOfRange("subset elements are 1-based".into()));
        }
        if elems.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidParams("subset has repeated elements".into()));
        }
        Ok(Subset(elems))
    }

    pub fn empty() -> Self {
        Subset(Vec::new())
    }

    pub fn elems(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, x: usize) -> bool {
        self.0.binary_search(&x).is_ok()
    }

    pub fn min_elem(&self) -> Option<usize> {
        self.0.first().copied()
    }

    pub fn max_elem(&self) -> Option<usize> {
        self.0.last().copied()
    }

    pub fn with(&self, x: usize) -> Subset {
        let mut v = self.0.clone();
        if let Err(pos) = v.binary_search(&x) {
            v.insert(pos, x);
        }
        Subset(v)
    }

    pub fn without(&self, x: usize) -> Subset {
        Subset(self.0.iter().copied().filter(|&y| y != x).collect())
    }

    /// `true` when every element lies in `[lo, hi]`.
    pub fn within(&self, lo: usize, hi: usize) -> bool {
        self.0.iter().all(|&x| lo <= x && x <= hi)
    }

    pub fn is_subset_of(&self, other: &Subset) -> bool {
        self.0.iter().all(|&x| other.contains(x))
    }
}

impl fmt::Debug for Subset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, x) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{x}")?;
        }
        f.write_str("}")
    }
}

impl PartialOrd for Subset {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Lexicographic order on sorted sequences. For equal sizes this is exactly
/// `min(I \ J) < min(J \ I)`.
impl Ord for Subset {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.cmp(&other.0)
    }
}

/// Number of elements of `set` that are `<= x`.
pub fn ind(set: &Subset, x: usize) -> usize {
    set.0.partition_point(|&y| y <= x)
}

/// `I ≺ J`, i.e. `min(I \ J) < min(J \ I)`.
pub fn lex_less(i: &Subset, j: &Subset) -> Result<bool> {
    if i.len() != j.len() {
        return Err(Error::SizeMismatch(i.len(), j.len()));
    }
    let only_i = i.0.iter().copied().find(|&x| !j.contains(x));
    let only_j = j.0.iter().copied().find(|&x| !i.contains(x));
    Ok(match (only_i, only_j) {
        (Some(a), Some(b)) => a < b,
        _ => false,
    })
}

/// Bijection between m-subsets of `[d]` and `0..C(d, m)` in lexicographic
/// order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LexIndexer {
    d: usize,
    m: usize,
}

impl LexIndexer {
    pub fn new(d: usize, m: usize) -> Self {
        LexIndexer { d, m }
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn count(&self) -> usize {
        choose(self.d, self.m)
    }

    pub fn rank(&self, set: &Subset) -> Result<usize> {
        if set.len() != self.m {
            return Err(Error::SizeMismatch(set.len(), self.m));
        }
        if !set.within(1, self.d) {
            return Err(Error::OutOfRange(alloc::format!(
                "{set:?} is not a subset of [{}]",
                self.d
            )));
        }
        // Count the subsets that agree on a prefix and then pick a smaller
        // element at the next position.
        let mut r = 0;
        let mut prev = 0;
        for (pos, &c) in set.0.iter().enumerate() {
            let left = self.m - pos - 1;
            for v in prev + 1..c {
                r += choose(self.d - v, left);
            }
            prev = c;
        }
        Ok(r)
    }

    pub fn unrank(&self, mut idx: usize) -> Result<Subset> {
        if idx >= self.count() {
            return Err(Error::OutOfRange(alloc::format!(
                "subset index {idx} >= C({}, {})",
                self.d,
                self.m
            )));
        }
        let mut out = Vec::with_capacity(self.m);
        let mut v = 1;
        for pos in 0..self.m {
            let left = self.m - pos - 1;
            loop {
                let block = choose(self.d - v, left);
                if idx < block {
                    break;
                }
                idx -= block;
                v += 1;
            }
            out.push(v);
            v += 1;
        }
        Ok(Subset(out))
    }

    /// All m-subsets in lexicographic order.
    pub fn iter(&self) -> LexIter {
        LexIter::new(self.d, self.m)
    }
}

/// Iterator over m-subsets of `[d]` in lexicographic order.
pub struct LexIter {
    d: usize,
    cur: Option<Vec<usize>>,
}

impl LexIter {
    fn new(d: usize, m: usize) -> Self {
        let cur = if m <= d { Some((1..=m).collect()) } else { None };
        LexIter { d, cur }
    }
}

impl Iterator for LexIter {
    type Item = Subset;

    fn next(&mut self) -> Option<Subset> {
        let cur = self.cur.as_mut()?;
        let out = Subset(cur.clone());
        let m = cur.len();
        // Rightmost position that can still be bumped.
        let mut pos = m;
        while pos > 0 && cur[pos - 1] == self.d - (m - pos) {
            pos -= 1;
        }
        if pos == 0 {
            self.cur = None;
        } else {
            cur[pos - 1] += 1;
            for k in pos..m {
                cur[k] = cur[k - 1] + 1;
            }
        }
        Some(out)
    }
}

/// All subsets of `items` (given as a slice of labels) of size `k`, in
/// lexicographic order of positions.
pub fn combinations<T: Clone>(items: &[T], k: usize) -> Vec<Vec<T>> {
    LexIndexer::new(items.len(), k)
        .iter()
        .map(|s| s.elems().iter().map(|&p| items[p - 1].clone()).collect())
        .collect()
}
