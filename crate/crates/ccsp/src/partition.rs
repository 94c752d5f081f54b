//! Partitions of subsets of the domain, the transitive-closure join, and the
//! crossing test.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::relation::Relation;

/// An equivalence relation on a subset of the domain, stored as its blocks.
/// Blocks are pairwise disjoint, nonempty and listed by smallest element, so
/// structural equality is semantic equality.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Partition {
    blocks: Vec<BTreeSet<usize>>,
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(len: usize) -> UnionFind {
        UnionFind {
            parent: (0..len).collect(),
        }
    }

    fn find(&mut self, x: usize) -> usize {
        let mut root = x;
        while self.parent[root] != root {
            root = self.parent[root];
        }
        let mut cur = x;
        while self.parent[cur] != root {
            let next = self.parent[cur];
            self.parent[cur] = root;
            cur = next;
        }
        root
    }

    fn union(&mut self, x: usize, y: usize) {
        let (rx, ry) = (self.find(x), self.find(y));
        if rx != ry {
            // Smaller root wins, keeping class representatives deterministic.
            let (lo, hi) = if rx < ry { (rx, ry) } else { (ry, rx) };
            self.parent[hi] = lo;
        }
    }
}

impl Partition {
    pub fn new(blocks: Vec<BTreeSet<usize>>) -> Result<Partition> {
        let mut seen = BTreeSet::new();
        for b in &blocks {
            if b.is_empty() {
                return Err(Error::arg("partition blocks must be nonempty"));
            }
            for &e in b {
                if !seen.insert(e) {
                    return Err(Error::arg(format!(
                        "element {e} occurs in two partition blocks"
                    )));
                }
            }
        }
        let mut blocks = blocks;
        blocks.sort_by_key(|b| *b.iter().next().unwrap());
        Ok(Partition { blocks })
    }

    /// The partition of `carrier` into singletons.
    pub fn discrete(carrier: &BTreeSet<usize>) -> Partition {
        Partition {
            blocks: carrier.iter().map(|&e| BTreeSet::from([e])).collect(),
        }
    }

    /// The one-block partition of `carrier`.
    pub fn total(carrier: &BTreeSet<usize>) -> Result<Partition> {
        if carrier.is_empty() {
            return Err(Error::arg("total partition needs a nonempty carrier"));
        }
        Ok(Partition {
            blocks: vec![carrier.clone()],
        })
    }

    pub fn blocks(&self) -> &[BTreeSet<usize>] {
        &self.blocks
    }

    pub fn block_count(&self) -> usize {
        self.blocks.len()
    }

    pub fn carrier(&self) -> BTreeSet<usize> {
        self.blocks.iter().flatten().copied().collect()
    }

    /// A single block means every pair of carrier elements is related.
    pub fn is_trivial(&self) -> bool {
        self.blocks.len() <= 1
    }

    pub fn block_index_of(&self, element: usize) -> Option<usize> {
        self.blocks.iter().position(|b| b.contains(&element))
    }

    pub fn same_block(&self, x: usize, y: usize) -> bool {
        self.blocks.iter().any(|b| b.contains(&x) && b.contains(&y))
    }

    /// The partition as a binary relation (all within-block pairs).
    pub fn to_relation(&self) -> Relation {
        let mut tuples = Vec::new();
        for b in &self.blocks {
            for &x in b {
                for &y in b {
                    tuples.push(vec![x, y]);
                }
            }
        }
        Relation::new(2, tuples).expect("block pairs are binary")
    }

    /// Smallest equivalence relation containing both inputs, computed by
    /// union-find over the shared carrier. When the inputs do not cross the
    /// result coincides with the blockwise union, which is asserted in debug
    /// builds.
    pub fn join(&self, other: &Partition) -> Result<Partition> {
        let carrier = self.carrier();
        if carrier != other.carrier() {
            return Err(Error::arg("join requires partitions over the same carrier"));
        }
        let elems: Vec<usize> = carrier.iter().copied().collect();
        let index = |e: usize| elems.binary_search(&e).unwrap();
        let mut uf = UnionFind::new(elems.len());
        for p in [self, other] {
            for b in &p.blocks {
                let mut it = b.iter();
                if let Some(&first) = it.next() {
                    for &e in it {
                        uf.union(index(first), index(e));
                    }
                }
            }
        }
        let mut blocks: std::collections::BTreeMap<usize, BTreeSet<usize>> = Default::default();
        for (i, &e) in elems.iter().enumerate() {
            blocks.entry(uf.find(i)).or_default().insert(e);
        }
        let joined = Partition::new(blocks.into_values().collect())?;
        #[cfg(debug_assertions)]
        if self.crossing_witness(other)?.is_none() {
            let union = {
                let mut pairs: BTreeSet<Vec<usize>> =
                    self.to_relation().tuples().cloned().collect();
                pairs.extend(other.to_relation().tuples().cloned());
                pairs
            };
            let joined_pairs: BTreeSet<Vec<usize>> =
                joined.to_relation().tuples().cloned().collect();
            debug_assert_eq!(
                joined_pairs, union,
                "non-crossing join must equal the blockwise union"
            );
        }
        Ok(joined)
    }

    /// A pair of blocks (one from each partition) with nonempty difference,
    /// intersection and reverse difference, if any.
    pub fn crossing_witness(
        &self,
        other: &Partition,
    ) -> Result<Option<(BTreeSet<usize>, BTreeSet<usize>)>> {
        if self.carrier() != other.carrier() {
            return Err(Error::arg(
                "crossing test requires partitions over the same carrier",
            ));
        }
        for c in &self.blocks {
            for b in &other.blocks {
                let inter = c.intersection(b).count();
                if inter > 0 && inter < c.len() && inter < b.len() {
                    return Ok(Some((c.clone(), b.clone())));
                }
            }
        }
        Ok(None)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn part(blocks: &[&[usize]]) -> Partition {
        Partition::new(blocks.iter().map(|b| b.iter().copied().collect()).collect()).unwrap()
    }

    #[test]
    fn rejects_overlap_and_empty_blocks() {
        assert!(Partition::new(vec![BTreeSet::from([0]), BTreeSet::from([0, 1])]).is_err());
        assert!(Partition::new(vec![BTreeSet::new()]).is_err());
    }

    #[test]
    fn join_is_idempotent() {
        let a = part(&[&[0, 1], &[2]]);
        assert_eq!(a.join(&a).unwrap(), a);
    }

    #[test]
    fn join_with_discrete_returns_other() {
        let discrete = part(&[&[0], &[1], &[2]]);
        let other = part(&[&[0, 1], &[2]]);
        assert_eq!(discrete.join(&other).unwrap(), other);
    }

    #[test]
    fn join_closes_transitively() {
        let a = part(&[&[0, 1], &[2]]);
        let b = part(&[&[0], &[1, 2]]);
        assert_eq!(a.join(&b).unwrap(), part(&[&[0, 1, 2]]));
    }

    #[test]
    fn crossing_witness_found() {
        // Blocks {a,c},{b} against {a},{b,c} over {a,b,c} = {0,1,2}.
        let alpha = part(&[&[0, 2], &[1]]);
        let beta = part(&[&[0], &[1, 2]]);
        let (c, b) = alpha.crossing_witness(&beta).unwrap().unwrap();
        assert_eq!(c, BTreeSet::from([0, 2]));
        assert_eq!(b, BTreeSet::from([1, 2]));
    }

    #[test]
    fn identical_partitions_never_cross() {
        let a = part(&[&[0, 1], &[2, 3]]);
        assert_eq!(a.crossing_witness(&a).unwrap(), None);
    }

    #[test]
    fn discrete_partitions_never_cross() {
        let d = part(&[&[0], &[1], &[2]]);
        let other = part(&[&[0, 1, 2]]);
        assert_eq!(d.crossing_witness(&other).unwrap(), None);
        assert_eq!(other.crossing_witness(&d).unwrap(), None);
    }

    #[test]
    fn carrier_mismatch_is_an_error() {
        let a = part(&[&[0, 1]]);
        let b = part(&[&[0, 1], &[2]]);
        assert!(a.join(&b).is_err());
        assert!(a.crossing_witness(&b).is_err());
    }

    fn arb_partition(carrier: usize) -> impl Strategy<Value = Partition> {
        prop::collection::vec(0..4usize, carrier).prop_map(move |assignment| {
            let mut blocks: std::collections::BTreeMap<usize, BTreeSet<usize>> = Default::default();
            for (e, &cls) in assignment.iter().enumerate() {
                blocks.entry(cls).or_default().insert(e);
            }
            Partition::new(blocks.into_values().collect()).unwrap()
        })
    }

    proptest! {
        /// Pair-set oracle: the join relates x and y exactly when they are
        /// connected through alternating blocks.
        #[test]
        fn join_matches_reachability_oracle(a in arb_partition(6), b in arb_partition(6)) {
            let joined = a.join(&b).unwrap();
            for x in 0..6usize {
                for y in 0..6usize {
                    let mut reach = BTreeSet::from([x]);
                    loop {
                        let mut grew = false;
                        for p in [&a, &b] {
                            for blk in p.blocks() {
                                if blk.iter().any(|e| reach.contains(e)) {
                                    for &e in blk {
                                        grew |= reach.insert(e);
                                    }
                                }
                            }
                        }
                        if !grew { break; }
                    }
                    prop_assert_eq!(joined.same_block(x, y), reach.contains(&y));
                }
            }
        }

        /// Restatement of the definition: no witness iff every block pair has
        /// an empty difference, intersection, or reverse difference.
        #[test]
        fn crossing_witness_matches_definition(a in arb_partition(5), b in arb_partition(5)) {
            let absent = a.crossing_witness(&b).unwrap().is_none();
            let mut any = false;
            for c in a.blocks() {
                for d in b.blocks() {
                    let inter = c.intersection(d).count();
                    if inter > 0 && inter < c.len() && inter < d.len() {
                        any = true;
                    }
                }
            }
            prop_assert_eq!(absent, !any);
        }
    }
}
