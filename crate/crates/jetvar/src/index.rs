//! Multi-index algebra: the derivative address of a jet coordinate.

use std::cmp::Ordering;
use std::fmt;

/// A sorted multiset of base-coordinate indices, written `Λ`.
///
/// `y[i;01]` carries the multi-index `(0,1)`; repeated entries are allowed
/// (`(1,1)` is the second derivative along base direction 1). The empty
/// multi-index addresses the field itself.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct MultiIndex(Vec<u8>);

impl MultiIndex {
    pub fn empty() -> Self {
        MultiIndex(Vec::new())
    }

    pub fn single(lambda: u8) -> Self {
        MultiIndex(vec![lambda])
    }

    /// Builds from arbitrary order; entries are sorted.
    pub fn from_slice(entries: &[u8]) -> Self {
        let mut v = entries.to_vec();
        v.sort_unstable();
        MultiIndex(v)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn entries(&self) -> &[u8] {
        &self.0
    }

    pub fn iter(&self) -> impl Iterator<Item = u8> + '_ {
        self.0.iter().copied()
    }

    /// `λ + Λ`: sorted insertion of one more index.
    pub fn plus(&self, lambda: u8) -> Self {
        let mut v = self.0.clone();
        let pos = v.partition_point(|&e| e <= lambda);
        v.insert(pos, lambda);
        MultiIndex(v)
    }

    /// `Λ + Σ`: sorted merge of two multisets.
    pub fn merge(&self, other: &MultiIndex) -> Self {
        let mut v = Vec::with_capacity(self.0.len() + other.0.len());
        v.extend_from_slice(&self.0);
        v.extend_from_slice(&other.0);
        v.sort_unstable();
        MultiIndex(v)
    }

    /// Multiplicity of each distinct index, in ascending index order.
    pub fn multiplicities(&self) -> Vec<(u8, u32)> {
        let mut out: Vec<(u8, u32)> = Vec::new();
        for &e in &self.0 {
            match out.last_mut() {
                Some((idx, m)) if *idx == e => *m += 1,
                _ => out.push((e, 1)),
            }
        }
        out
    }

    /// Number of distinct interleavings of the two sorted multisets: the
    /// product over indices of `C(m₁+m₂, m₁)`. This is the combinatorial
    /// coefficient of the η transform; the interpretation is pinned by the
    /// involution η(η(f)) = f.
    pub fn interleavings(&self, other: &MultiIndex) -> u128 {
        let mut count: u128 = 1;
        let ma = self.multiplicities();
        let mb = other.multiplicities();
        let mut ia = 0;
        let mut ib = 0;
        while ia < ma.len() && ib < mb.len() {
            match ma[ia].0.cmp(&mb[ib].0) {
                Ordering::Less => ia += 1,
                Ordering::Greater => ib += 1,
                Ordering::Equal => {
                    count *= binomial((ma[ia].1 + mb[ib].1) as u64, ma[ia].1 as u64);
                    ia += 1;
                    ib += 1;
                }
            }
        }
        count
    }
}

/// Graded-lexicographic order: shorter multi-indices first, then entrywise.
impl Ord for MultiIndex {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0
            .len()
            .cmp(&other.0.len())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for MultiIndex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Λ")?;
        for e in &self.0 {
            write!(f, "{e}")?;
        }
        Ok(())
    }
}

pub fn binomial(n: u64, k: u64) -> u128 {
    let k = k.min(n - k.min(n));
    let mut num: u128 = 1;
    for i in 0..k {
        num = num * (n - i) as u128 / (i + 1) as u128;
    }
    num
}

/// All multi-indices over base dimension `n` with length ≤ `max_len`,
/// in canonical (graded-lex) order.
pub fn multi_indices_up_to(n: u8, max_len: usize) -> Vec<MultiIndex> {
    let mut out = vec![MultiIndex::empty()];
    let mut layer = vec![MultiIndex::empty()];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for mi in &layer {
            let start = mi.entries().last().copied().unwrap_or(0);
            for l in start..n {
                next.push(mi.plus(l));
            }
        }
        out.extend(next.iter().cloned());
        layer = next;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn plus_keeps_sorted() {
        assert_eq!(MultiIndex::empty().plus(0).entries(), &[0]);
        assert_eq!(MultiIndex::from_slice(&[1, 2]).plus(0).entries(), &[0, 1, 2]);
        assert_eq!(MultiIndex::single(1).plus(1).entries(), &[1, 1]);
    }

    #[test]
    fn graded_lex_order() {
        let a = MultiIndex::single(1);
        let b = MultiIndex::from_slice(&[0, 0]);
        assert!(a < b);
        assert!(MultiIndex::from_slice(&[0, 1]) < MultiIndex::from_slice(&[1, 1]));
    }

    #[test]
    fn interleaving_counts() {
        // (x) with (x): C(2,1) = 2 ways.
        let a = MultiIndex::single(0);
        assert_eq!(a.interleavings(&a), 2);
        // (x,x) with (x): C(3,1) = 3.
        let b = MultiIndex::from_slice(&[0, 0]);
        assert_eq!(b.interleavings(&a), 3);
        // disjoint indices interleave freely as multisets: coefficient 1 per index.
        let c = MultiIndex::single(1);
        assert_eq!(a.interleavings(&c), 1);
    }

    #[test]
    fn enumeration_counts() {
        // n = 2, |Λ| ≤ 2: (), (0), (1), (00), (01), (11).
        assert_eq!(multi_indices_up_to(2, 2).len(), 6);
    }
}
