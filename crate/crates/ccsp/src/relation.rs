//! Relations over a finite domain and the structural predicates on them:
//! projection, composition, rectangularity / thick-mapping decomposition and
//! 2-decomposability. Everything here is a pure function of its inputs.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::partition::Partition;

/// A tuple of domain elements; the arity is its length.
pub type Tuple = Vec<usize>;

/// Default candidate-space cap for the 2-decomposability scan, which is
/// exponential in the arity and meant as a desk-scale diagnostic.
pub const DEFAULT_DECOMPOSABILITY_CAP: usize = 1_000_000;

/// An `arity`-ary relation: a duplicate-free, lexicographically sorted set of
/// tuples. A relation does not know its domain; bounds are checked where a
/// [`crate::domain::DomainSpec`] is in scope.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Relation {
    arity: usize,
    tuples: BTreeSet<Tuple>,
}

/// Witness that a binary relation is a thick mapping: equivalence classes on
/// both unary projections together with a bijection between the class sets.
/// `(a, b)` is in the relation exactly when the bijection sends `a`'s class
/// to `b`'s class.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ThickMappingWitness {
    pub alpha1: Partition,
    pub alpha2: Partition,
    /// `block_map[i] = j` sends block `i` of `alpha1` to block `j` of `alpha2`.
    pub block_map: Vec<usize>,
}

/// A rectangularity violation: `(a,c)`, `(a,d)`, `(b,d)` are all in the
/// relation but `(b,c)` is not.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RectangularityViolation {
    pub a: usize,
    pub b: usize,
    pub c: usize,
    pub d: usize,
}

/// Outcome of [`Relation::thick_mapping_decompose`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ThickMappingCheck {
    Witness(ThickMappingWitness),
    Violation(RectangularityViolation),
}

impl ThickMappingCheck {
    pub fn witness(self) -> Option<ThickMappingWitness> {
        match self {
            ThickMappingCheck::Witness(w) => Some(w),
            ThickMappingCheck::Violation(_) => None,
        }
    }

    pub fn is_thick_mapping(&self) -> bool {
        matches!(self, ThickMappingCheck::Witness(_))
    }
}

impl Relation {
    pub fn new(arity: usize, tuples: impl IntoIterator<Item = Tuple>) -> Result<Relation> {
        if arity == 0 {
            return Err(Error::arg("relation arity must be at least 1"));
        }
        let mut set = BTreeSet::new();
        for t in tuples {
            if t.len() != arity {
                return Err(Error::arg(format!(
                    "tuple {:?} has arity {}, expected {}",
                    t,
                    t.len(),
                    arity
                )));
            }
            set.insert(t);
        }
        Ok(Relation { arity, tuples: set })
    }

    pub fn empty(arity: usize) -> Relation {
        Relation {
            arity: arity.max(1),
            tuples: BTreeSet::new(),
        }
    }

    /// The full relation `D^arity` for a domain of the given size.
    pub fn full(arity: usize, domain_size: usize) -> Relation {
        let mut tuples = BTreeSet::new();
        let mut t = vec![0usize; arity];
        loop {
            tuples.insert(t.clone());
            let mut i = arity;
            loop {
                if i == 0 {
                    return Relation { arity, tuples };
                }
                i -= 1;
                t[i] += 1;
                if t[i] < domain_size {
                    break;
                }
                t[i] = 0;
            }
        }
    }

    /// The binary equality relation on `0..domain_size`.
    pub fn equality(domain_size: usize) -> Relation {
        Relation {
            arity: 2,
            tuples: (0..domain_size).map(|a| vec![a, a]).collect(),
        }
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn len(&self) -> usize {
        self.tuples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tuples.is_empty()
    }

    pub fn contains(&self, t: &[usize]) -> bool {
        t.len() == self.arity && self.tuples.contains(t)
    }

    pub fn tuples(&self) -> impl Iterator<Item = &Tuple> {
        self.tuples.iter()
    }

    pub fn insert(&mut self, t: Tuple) -> Result<()> {
        if t.len() != self.arity {
            return Err(Error::arg("tuple arity mismatch"));
        }
        self.tuples.insert(t);
        Ok(())
    }

    /// Largest element mentioned anywhere, or `None` for the empty relation.
    pub fn max_element(&self) -> Option<usize> {
        self.tuples.iter().flat_map(|t| t.iter().copied()).max()
    }

    /// Projection onto the given coordinate positions (0-based). Duplicate and
    /// reordered positions are allowed; the result is deduplicated and sorted.
    pub fn project(&self, indices: &[usize]) -> Result<Relation> {
        if indices.is_empty() {
            return Err(Error::arg("projection needs at least one coordinate"));
        }
        for &i in indices {
            if i >= self.arity {
                return Err(Error::arg(format!(
                    "projection index {} out of range for arity {}",
                    i, self.arity
                )));
            }
        }
        let tuples = self
            .tuples
            .iter()
            .map(|t| indices.iter().map(|&i| t[i]).collect())
            .collect();
        Ok(Relation {
            arity: indices.len(),
            tuples,
        })
    }

    /// The set of values occurring at one coordinate.
    pub fn unary_projection(&self, index: usize) -> Result<BTreeSet<usize>> {
        if index >= self.arity {
            return Err(Error::arg("projection index out of range"));
        }
        Ok(self.tuples.iter().map(|t| t[index]).collect())
    }

    /// Relational product of two binary relations:
    /// `(x, y)` is in the result iff some `z` has `(x, z)` here and `(z, y)` there.
    pub fn compose(&self, other: &Relation) -> Result<Relation> {
        if self.arity != 2 || other.arity != 2 {
            return Err(Error::arg("compose requires binary relations"));
        }
        let mut by_first: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for t in &other.tuples {
            by_first.entry(t[0]).or_default().push(t[1]);
        }
        let mut tuples = BTreeSet::new();
        for t in &self.tuples {
            if let Some(ys) = by_first.get(&t[1]) {
                for &y in ys {
                    tuples.insert(vec![t[0], y]);
                }
            }
        }
        Ok(Relation { arity: 2, tuples })
    }

    pub fn inverse(&self) -> Result<Relation> {
        if self.arity != 2 {
            return Err(Error::arg("inverse requires a binary relation"));
        }
        let tuples = self.tuples.iter().map(|t| vec![t[1], t[0]]).collect();
        Ok(Relation { arity: 2, tuples })
    }

    pub fn intersect(&self, other: &Relation) -> Result<Relation> {
        if self.arity != other.arity {
            return Err(Error::arg("intersection requires equal arities"));
        }
        Ok(Relation {
            arity: self.arity,
            tuples: self.tuples.intersection(&other.tuples).cloned().collect(),
        })
    }

    /// Restriction to tuples whose entries all lie in `allowed`.
    pub fn restrict(&self, allowed: &BTreeSet<usize>) -> Relation {
        Relation {
            arity: self.arity,
            tuples: self
                .tuples
                .iter()
                .filter(|t| t.iter().all(|e| allowed.contains(e)))
                .cloned()
                .collect(),
        }
    }

    /// Cylindrical extension: appends unconstrained coordinates over a domain
    /// of the given size until the relation has arity `arity`.
    pub fn pad_to(&self, arity: usize, domain_size: usize) -> Result<Relation> {
        if arity < self.arity {
            return Err(Error::arg("cannot pad to a smaller arity"));
        }
        if arity == self.arity {
            return Ok(self.clone());
        }
        let extra = Relation::full(arity - self.arity, domain_size);
        let mut tuples = BTreeSet::new();
        for t in &self.tuples {
            for e in extra.tuples() {
                let mut nt = t.clone();
                nt.extend_from_slice(e);
                tuples.insert(nt);
            }
        }
        Ok(Relation { arity, tuples })
    }

    /// Decomposes a nonempty binary relation as a thick mapping, or reports a
    /// rectangularity violation. The left classes group elements with equal
    /// row sets; a relation is rectangular exactly when distinct row sets are
    /// disjoint.
    pub fn thick_mapping_decompose(&self) -> Result<ThickMappingCheck> {
        if self.arity != 2 {
            return Err(Error::arg("thick mapping check requires a binary relation"));
        }
        if self.tuples.is_empty() {
            return Err(Error::arg(
                "thick mapping check requires a nonempty relation",
            ));
        }
        let mut rows: BTreeMap<usize, BTreeSet<usize>> = BTreeMap::new();
        for t in &self.tuples {
            rows.entry(t[0]).or_default().insert(t[1]);
        }
        // Group left elements by row set, keyed by smallest member for determinism.
        let mut groups: BTreeMap<&BTreeSet<usize>, BTreeSet<usize>> = BTreeMap::new();
        for (&x, row) in &rows {
            groups.entry(row).or_default().insert(x);
        }
        let groups: Vec<(&BTreeSet<usize>, BTreeSet<usize>)> = {
            let mut v: Vec<_> = groups.into_iter().collect();
            v.sort_by_key(|(_, members)| *members.iter().next().unwrap());
            v
        };
        for i in 0..groups.len() {
            for j in i + 1..groups.len() {
                let (row_i, members_i) = &groups[i];
                let (row_j, members_j) = &groups[j];
                let mut common = row_i.intersection(row_j);
                if let Some(&d) = common.next() {
                    let a = *members_i.iter().next().unwrap();
                    let b = *members_j.iter().next().unwrap();
                    let violation = if let Some(&c) = row_i.difference(row_j).next() {
                        RectangularityViolation { a, b, c, d }
                    } else {
                        let c = *row_j.difference(row_i).next().unwrap();
                        RectangularityViolation { a: b, b: a, c, d }
                    };
                    return Ok(ThickMappingCheck::Violation(violation));
                }
            }
        }
        let alpha1 = Partition::new(groups.iter().map(|(_, m)| m.clone()).collect())?;
        let mut right_blocks: Vec<BTreeSet<usize>> =
            groups.iter().map(|(row, _)| (*row).clone()).collect();
        let order: Vec<usize> = {
            let mut idx: Vec<usize> = (0..right_blocks.len()).collect();
            idx.sort_by_key(|&i| *right_blocks[i].iter().next().unwrap());
            idx
        };
        let mut block_map = vec![0usize; groups.len()];
        for (pos, &orig) in order.iter().enumerate() {
            block_map[orig] = pos;
        }
        right_blocks = order.iter().map(|&i| right_blocks[i].clone()).collect();
        let alpha2 = Partition::new(right_blocks)?;
        Ok(ThickMappingCheck::Witness(ThickMappingWitness {
            alpha1,
            alpha2,
            block_map,
        }))
    }

    /// Searches for a tuple outside the relation whose binary projections all
    /// lie inside the corresponding projections; `None` means the relation is
    /// 2-decomposable. The candidate space is the product of the unary
    /// projections, capped by `cap`.
    pub fn two_decomposability_counterexample(&self, cap: usize) -> Result<Option<Tuple>> {
        if self.arity < 2 {
            return Err(Error::arg("2-decomposability needs arity at least 2"));
        }
        if self.arity == 2 || self.tuples.is_empty() {
            return Ok(None);
        }
        let unaries: Vec<Vec<usize>> = (0..self.arity)
            .map(|i| self.unary_projection(i).map(|s| s.into_iter().collect()))
            .collect::<Result<_>>()?;
        let mut space: usize = 1;
        for u in &unaries {
            space = space.saturating_mul(u.len());
            if space > cap {
                return Err(Error::resource(format!(
                    "2-decomposability candidate space exceeds cap {cap}"
                )));
            }
        }
        let mut pair_proj: BTreeMap<(usize, usize), BTreeSet<(usize, usize)>> = BTreeMap::new();
        for i in 0..self.arity {
            for j in i + 1..self.arity {
                let prj = self.tuples.iter().map(|t| (t[i], t[j])).collect();
                pair_proj.insert((i, j), prj);
            }
        }
        let mut odometer = vec![0usize; self.arity];
        loop {
            let t: Tuple = odometer
                .iter()
                .enumerate()
                .map(|(i, &k)| unaries[i][k])
                .collect();
            if !self.tuples.contains(&t) {
                let ok = pair_proj
                    .iter()
                    .all(|(&(i, j), prj)| prj.contains(&(t[i], t[j])));
                if ok {
                    return Ok(Some(t));
                }
            }
            let mut i = self.arity;
            loop {
                if i == 0 {
                    return Ok(None);
                }
                i -= 1;
                odometer[i] += 1;
                if odometer[i] < unaries[i].len() {
                    break;
                }
                odometer[i] = 0;
            }
        }
    }

    /// Interprets a binary relation as an equivalence relation (reflexive on
    /// its carrier, symmetric, transitive) and returns the block partition.
    pub fn as_partition(&self) -> Option<Partition> {
        if self.arity != 2 || self.tuples.is_empty() {
            return None;
        }
        let carrier: BTreeSet<usize> = self.tuples.iter().flat_map(|t| t.iter().copied()).collect();
        for &e in &carrier {
            if !self.tuples.contains(&vec![e, e]) {
                return None;
            }
        }
        for t in &self.tuples {
            if !self.tuples.contains(&vec![t[1], t[0]]) {
                return None;
            }
        }
        let mut blocks: Vec<BTreeSet<usize>> = Vec::new();
        let mut seen: BTreeSet<usize> = BTreeSet::new();
        for &e in &carrier {
            if seen.contains(&e) {
                continue;
            }
            let block: BTreeSet<usize> = self
                .tuples
                .iter()
                .filter(|t| t[0] == e)
                .map(|t| t[1])
                .collect();
            seen.extend(block.iter().copied());
            blocks.push(block);
        }
        // Transitivity: the blocks must exactly reproduce the relation.
        let expected: usize = blocks.iter().map(|b| b.len() * b.len()).sum();
        if expected != self.tuples.len() {
            return None;
        }
        for b in &blocks {
            for &x in b {
                for &y in b {
                    if !self.tuples.contains(&vec![x, y]) {
                        return None;
                    }
                }
            }
        }
        Partition::new(blocks).ok()
    }
}

impl ThickMappingWitness {
    /// Reconstructs the relation the witness describes.
    pub fn to_relation(&self) -> Relation {
        let mut tuples = BTreeSet::new();
        for (i, block) in self.alpha1.blocks().iter().enumerate() {
            let image = &self.alpha2.blocks()[self.block_map[i]];
            for &a in block {
                for &b in image {
                    tuples.insert(vec![a, b]);
                }
            }
        }
        Relation { arity: 2, tuples }
    }

    /// A thick mapping is trivial when both sides collapse to a single class.
    pub fn is_trivial(&self) -> bool {
        self.alpha1.block_count() <= 1
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn rel(arity: usize, tuples: &[&[usize]]) -> Relation {
        Relation::new(arity, tuples.iter().map(|t| t.to_vec())).unwrap()
    }

    /// Elements of the ten-value example domain {1,2,3,4,5,a,b,c,d,e} as 0..9.
    fn sample_ternary() -> Relation {
        rel(3, &[&[0, 1, 2], &[0, 3, 4], &[5, 6, 7], &[8, 9, 7]])
    }

    fn inequality(d: usize) -> Relation {
        let tuples = (0..d)
            .flat_map(|x| (0..d).filter(move |&y| y != x).map(move |y| vec![x, y]))
            .collect::<Vec<_>>();
        Relation::new(2, tuples).unwrap()
    }

    #[test]
    fn project_collapses_shared_prefix() {
        let r = rel(3, &[&[1, 2, 3], &[1, 4, 5]]);
        assert_eq!(r.project(&[0]).unwrap(), rel(1, &[&[1]]));
    }

    #[test]
    fn project_keeps_distinct_pairs() {
        let r = sample_ternary();
        let p = r.project(&[1, 2]).unwrap();
        assert_eq!(p, rel(2, &[&[1, 2], &[3, 4], &[6, 7], &[9, 7]]));
    }

    #[test]
    fn project_empty_relation_is_empty() {
        let e = Relation::empty(3);
        let p = e.project(&[0, 1]).unwrap();
        assert_eq!(p.arity(), 2);
        assert!(p.is_empty());
        assert!(e.project(&[3]).is_err());
    }

    #[test]
    fn project_allows_duplicate_and_reordered_indices() {
        let r = rel(2, &[&[1, 2]]);
        assert_eq!(r.project(&[1, 0, 1]).unwrap(), rel(3, &[&[2, 1, 2]]));
    }

    #[test]
    fn compose_of_restricted_equivalences() {
        // Two equivalence relations on {a,b,c} = {0,1,2}: {{a,c},{b}} and {{b,c},{a}}.
        let alpha = rel(2, &[&[0, 0], &[1, 1], &[2, 2], &[0, 2], &[2, 0]]);
        let beta = rel(2, &[&[0, 0], &[1, 1], &[2, 2], &[1, 2], &[2, 1]]);
        let r = alpha.compose(&beta).unwrap();
        let expected = rel(
            2,
            &[
                &[0, 0],
                &[1, 1],
                &[2, 2],
                &[0, 2],
                &[2, 0],
                &[1, 2],
                &[2, 1],
                &[0, 1],
            ],
        );
        assert_eq!(r, expected);
    }

    #[test]
    fn compose_identity_and_dead_end() {
        let q = rel(2, &[&[0, 1], &[1, 1]]);
        let id = Relation::equality(2);
        assert_eq!(id.compose(&q).unwrap(), q);
        assert_eq!(q.compose(&id).unwrap(), q);
        let r = rel(2, &[&[0, 1]]);
        assert!(r.compose(&r).unwrap().is_empty());
        assert!(sample_ternary().compose(&q).is_err());
    }

    #[test]
    fn inverse_swaps_and_respects_symmetry() {
        assert_eq!(
            rel(2, &[&[0, 1], &[0, 2]]).inverse().unwrap(),
            rel(2, &[&[1, 0], &[2, 0]])
        );
        let sym = rel(2, &[&[0, 1], &[1, 0], &[2, 2]]);
        assert_eq!(sym.inverse().unwrap(), sym);
        assert!(Relation::empty(2).inverse().unwrap().is_empty());
    }

    #[test]
    fn equality_decomposes_to_discrete_witness() {
        let check = Relation::equality(2).thick_mapping_decompose().unwrap();
        let w = check.witness().expect("equality is a thick mapping");
        assert_eq!(w.alpha1.block_count(), 2);
        assert_eq!(w.alpha1, w.alpha2);
        assert_eq!(w.block_map, vec![0, 1]);
    }

    #[test]
    fn inequality_on_three_elements_is_not_rectangular() {
        let check = inequality(3).thick_mapping_decompose().unwrap();
        match check {
            ThickMappingCheck::Violation(v) => {
                let r = inequality(3);
                assert!(r.contains(&[v.a, v.c]));
                assert!(r.contains(&[v.a, v.d]));
                assert!(r.contains(&[v.b, v.d]));
                assert!(!r.contains(&[v.b, v.c]));
            }
            ThickMappingCheck::Witness(_) => panic!("expected a violation"),
        }
        // The quadruple from an exhaustive scan: (0,1),(0,2),(1,2) in, (1,1) out.
        let r = inequality(3);
        assert!(r.contains(&[0, 1]) && r.contains(&[0, 2]) && r.contains(&[1, 2]));
        assert!(!r.contains(&[1, 1]));
    }

    #[test]
    fn bijection_fragment_decomposes_to_singleton_blocks() {
        let r = rel(2, &[&[2, 3], &[4, 5]]);
        let w = r.thick_mapping_decompose().unwrap().witness().unwrap();
        assert_eq!(w.alpha1.blocks().to_vec(), vec![
            BTreeSet::from([2]),
            BTreeSet::from([4]),
        ]);
        assert_eq!(w.alpha2.blocks().to_vec(), vec![
            BTreeSet::from([3]),
            BTreeSet::from([5]),
        ]);
        assert_eq!(w.block_map, vec![0, 1]);
        assert_eq!(w.to_relation(), r);
    }

    #[test]
    fn thick_mapping_rejects_empty_and_nonbinary() {
        assert!(Relation::empty(2).thick_mapping_decompose().is_err());
        assert!(sample_ternary().thick_mapping_decompose().is_err());
    }

    /// Exhaustive oracle: scan all quadruples for a rectangularity violation.
    fn rectangular_by_scan(r: &Relation) -> bool {
        let elems: Vec<usize> = (0..3).collect();
        for &a in &elems {
            for &b in &elems {
                for &c in &elems {
                    for &d in &elems {
                        if r.contains(&[a, c])
                            && r.contains(&[a, d])
                            && r.contains(&[b, d])
                            && !r.contains(&[b, c])
                        {
                            return false;
                        }
                    }
                }
            }
        }
        true
    }

    #[test]
    fn decompose_agrees_with_exhaustive_scan_on_all_relations_over_three_elements() {
        // All 2^9 binary relations over {0,1,2}.
        for mask in 1u32..512 {
            let tuples: Vec<Tuple> = (0..9)
                .filter(|&i| mask & (1 << i) != 0)
                .map(|i| vec![i / 3, i % 3])
                .collect();
            let r = Relation::new(2, tuples).unwrap();
            let check = r.thick_mapping_decompose().unwrap();
            assert_eq!(
                check.is_thick_mapping(),
                rectangular_by_scan(&r),
                "disagreement on {r:?}"
            );
            if let ThickMappingCheck::Witness(w) = &check {
                assert_eq!(w.to_relation(), r);
                // Left classes coincide with the relation composed with its inverse.
                let left = r.compose(&r.inverse().unwrap()).unwrap();
                assert_eq!(left.as_partition().unwrap(), w.alpha1);
                let right = r.inverse().unwrap().compose(&r).unwrap();
                assert_eq!(right.as_partition().unwrap(), w.alpha2);
            }
        }
    }

    /// Tuples over {0,1,2} avoiding at least one value: the classic relation
    /// whose binary projections are full while the relation is not.
    fn not_all_distinct() -> Relation {
        let mut tuples = Vec::new();
        for x in 0..3 {
            for y in 0..3 {
                for z in 0..3 {
                    let all_distinct = x != y && y != z && x != z;
                    if !all_distinct {
                        tuples.push(vec![x, y, z]);
                    }
                }
            }
        }
        Relation::new(3, tuples).unwrap()
    }

    #[test]
    fn two_decomposability_counterexample_found() {
        let r = not_all_distinct();
        let ce = r.two_decomposability_counterexample(1_000_000).unwrap();
        assert_eq!(ce, Some(vec![0, 1, 2]));
    }

    #[test]
    fn binary_and_full_relations_are_two_decomposable() {
        assert_eq!(
            inequality(3).two_decomposability_counterexample(1000).unwrap(),
            None
        );
        assert_eq!(
            Relation::full(3, 3)
                .two_decomposability_counterexample(1000)
                .unwrap(),
            None
        );
    }

    #[test]
    fn two_decomposability_cap_is_enforced() {
        let r = Relation::full(4, 3);
        assert!(matches!(
            r.two_decomposability_counterexample(10),
            Err(Error::Resource(_))
        ));
    }

    fn arb_binary_relation(d: usize) -> impl Strategy<Value = Relation> {
        prop::collection::btree_set((0..d, 0..d), 0..=d * d).prop_map(|pairs| {
            Relation::new(2, pairs.into_iter().map(|(x, y)| vec![x, y])).unwrap()
        })
    }

    proptest! {
        #[test]
        fn compose_is_associative(
            r in arb_binary_relation(4),
            q in arb_binary_relation(4),
            s in arb_binary_relation(4),
        ) {
            let left = r.compose(&q).unwrap().compose(&s).unwrap();
            let right = r.compose(&q.compose(&s).unwrap()).unwrap();
            prop_assert_eq!(left, right);
        }

        #[test]
        fn identity_is_two_sided(r in arb_binary_relation(5)) {
            let id = Relation::equality(5);
            prop_assert_eq!(id.compose(&r).unwrap(), r.clone());
            prop_assert_eq!(r.compose(&id).unwrap(), r.clone());
        }

        #[test]
        fn witness_roundtrips_thick_mappings(r in arb_binary_relation(4)) {
            if r.is_empty() { return Ok(()); }
            if let ThickMappingCheck::Witness(w) = r.thick_mapping_decompose().unwrap() {
                prop_assert_eq!(w.to_relation(), r);
            }
        }
    }
}
