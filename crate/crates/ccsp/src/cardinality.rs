//! Cardinality vectors (how many variables take each value) and exact
//! per-vector solution counts.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_bigint::BigUint;
use num_traits::Zero;

use crate::domain::DomainSpec;
use crate::error::{Error, Result};

/// Prescribes, for every domain element, how many variables must take it.
/// Indexed by canonical element; the total must equal the variable count of
/// the instance it is checked against.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CardinalityVector {
    counts: Vec<usize>,
}

impl CardinalityVector {
    pub fn new(counts: Vec<usize>) -> CardinalityVector {
        CardinalityVector { counts }
    }

    pub fn zero(domain_size: usize) -> CardinalityVector {
        CardinalityVector {
            counts: vec![0; domain_size],
        }
    }

    /// The vector counting a single occurrence of `element`.
    pub fn unit(domain_size: usize, element: usize) -> CardinalityVector {
        let mut counts = vec![0; domain_size];
        counts[element] = 1;
        CardinalityVector { counts }
    }

    /// Histogram of an assignment.
    pub fn of_assignment(domain_size: usize, assignment: &[usize]) -> CardinalityVector {
        let mut counts = vec![0; domain_size];
        for &v in assignment {
            counts[v] += 1;
        }
        CardinalityVector { counts }
    }

    pub fn domain_size(&self) -> usize {
        self.counts.len()
    }

    pub fn get(&self, element: usize) -> usize {
        self.counts[element]
    }

    pub fn counts(&self) -> &[usize] {
        &self.counts
    }

    pub fn total(&self) -> usize {
        self.counts.iter().sum()
    }

    pub fn add(&self, other: &CardinalityVector) -> Result<CardinalityVector> {
        if self.counts.len() != other.counts.len() {
            return Err(Error::arg("cardinality vectors over different domains"));
        }
        Ok(CardinalityVector {
            counts: self
                .counts
                .iter()
                .zip(&other.counts)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }

    /// Parses the `label:count` form, e.g. `a:2 b:0 c:1`. Omitted labels get 0.
    pub fn parse(domain: &DomainSpec, entries: &[&str]) -> Result<CardinalityVector> {
        let mut counts = vec![0usize; domain.size()];
        for e in entries {
            let (label, count) = e
                .split_once(':')
                .ok_or_else(|| Error::arg(format!("malformed cardinality entry {e:?}")))?;
            let elem = domain
                .resolve(label)
                .ok_or_else(|| Error::arg(format!("unknown domain element {label:?}")))?;
            counts[elem] = count
                .parse()
                .map_err(|_| Error::arg(format!("bad count in cardinality entry {e:?}")))?;
        }
        Ok(CardinalityVector { counts })
    }

    pub fn display(&self, domain: &DomainSpec) -> String {
        self.counts
            .iter()
            .enumerate()
            .map(|(i, c)| format!("{}:{}", domain.label(i), c))
            .collect::<Vec<_>>()
            .join(" ")
    }
}

impl fmt::Display for CardinalityVector {
    /// Compact machine-readable form: counts joined by commas in domain order.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.counts.iter().map(|c| c.to_string()).collect();
        write!(f, "{}", parts.join(","))
    }
}

/// Sum-set of two sets of cardinality vectors: every pairwise sum.
pub fn convolve_vector_sets(
    a: &BTreeSet<CardinalityVector>,
    b: &BTreeSet<CardinalityVector>,
) -> Result<BTreeSet<CardinalityVector>> {
    let mut out = BTreeSet::new();
    for x in a {
        for y in b {
            out.insert(x.add(y)?);
        }
    }
    Ok(out)
}

/// Exact nonnegative solution counts keyed by cardinality vector. Zero-valued
/// entries are never stored; all stored vectors share one total.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct CountMap {
    entries: BTreeMap<CardinalityVector, BigUint>,
}

impl CountMap {
    pub fn new() -> CountMap {
        CountMap::default()
    }

    /// The multiplicative identity for convolution: the zero vector with count 1.
    pub fn identity(domain_size: usize) -> CountMap {
        let mut m = CountMap::new();
        m.add_count(CardinalityVector::zero(domain_size), BigUint::from(1u32));
        m
    }

    pub fn add_count(&mut self, vector: CardinalityVector, count: BigUint) {
        if count.is_zero() {
            return;
        }
        *self.entries.entry(vector).or_insert_with(BigUint::zero) += count;
    }

    pub fn get(&self, vector: &CardinalityVector) -> BigUint {
        self.entries.get(vector).cloned().unwrap_or_else(BigUint::zero)
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&CardinalityVector, &BigUint)> {
        self.entries.iter()
    }

    /// The set of vectors with nonzero count.
    pub fn support(&self) -> BTreeSet<CardinalityVector> {
        self.entries.keys().cloned().collect()
    }

    pub fn total_count(&self) -> BigUint {
        self.entries.values().sum()
    }

    /// Convolution: counts of sums accumulate products of counts.
    pub fn convolve(&self, other: &CountMap) -> Result<CountMap> {
        let mut out = CountMap::new();
        for (v, c) in &self.entries {
            for (w, d) in &other.entries {
                out.add_count(v.add(w)?, c * d);
            }
        }
        Ok(out)
    }

    /// Pointwise addition of counts.
    pub fn merge(&mut self, other: &CountMap) {
        for (v, c) in &other.entries {
            self.add_count(v.clone(), c.clone());
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn v(counts: &[usize]) -> CardinalityVector {
        CardinalityVector::new(counts.to_vec())
    }

    fn vset(vs: &[&[usize]]) -> BTreeSet<CardinalityVector> {
        vs.iter().map(|c| v(c)).collect()
    }

    #[test]
    fn convolve_sets_sums_pairwise() {
        let a = vset(&[&[1, 0]]);
        let b = vset(&[&[0, 1], &[1, 0]]);
        assert_eq!(convolve_vector_sets(&a, &b).unwrap(), vset(&[&[1, 1], &[2, 0]]));
    }

    #[test]
    fn zero_vector_is_the_identity() {
        let a = vset(&[&[2, 1], &[0, 3]]);
        let z = vset(&[&[0, 0]]);
        assert_eq!(convolve_vector_sets(&a, &z).unwrap(), a);
    }

    #[test]
    fn convolve_sets_dedupes() {
        let a = vset(&[&[2, 0], &[0, 2]]);
        assert_eq!(
            convolve_vector_sets(&a, &a).unwrap(),
            vset(&[&[4, 0], &[2, 2], &[0, 4]])
        );
    }

    #[test]
    fn domain_mismatch_is_an_error() {
        let a = vset(&[&[1, 0]]);
        let b = vset(&[&[1, 0, 0]]);
        assert!(convolve_vector_sets(&a, &b).is_err());
    }

    #[test]
    fn count_convolve_accumulates_products() {
        let mut a = CountMap::new();
        a.add_count(v(&[1, 0]), 2u32.into());
        a.add_count(v(&[0, 1]), 1u32.into());
        let mut b = CountMap::new();
        b.add_count(v(&[1, 0]), 1u32.into());
        b.add_count(v(&[0, 1]), 3u32.into());
        let c = a.convolve(&b).unwrap();
        assert_eq!(c.get(&v(&[2, 0])), 2u32.into());
        assert_eq!(c.get(&v(&[1, 1])), 7u32.into());
        assert_eq!(c.get(&v(&[0, 2])), 3u32.into());
        assert_eq!(c.len(), 3);
    }

    #[test]
    fn count_convolve_identity() {
        let mut a = CountMap::new();
        a.add_count(v(&[2, 0]), 5u32.into());
        assert_eq!(a.convolve(&CountMap::identity(2)).unwrap(), a);
    }

    #[test]
    fn simple_unit_convolution() {
        let mut a = CountMap::new();
        a.add_count(v(&[1, 0]), 1u32.into());
        let mut b = CountMap::new();
        b.add_count(v(&[1, 0]), 1u32.into());
        b.add_count(v(&[0, 1]), 1u32.into());
        let c = a.convolve(&b).unwrap();
        assert_eq!(c.get(&v(&[2, 0])), 1u32.into());
        assert_eq!(c.get(&v(&[1, 1])), 1u32.into());
    }

    #[test]
    fn parse_inverts_display() {
        let domain = crate::domain::DomainSpec::with_labels(
            3,
            vec!["a".into(), "b".into(), "c".into()],
        )
        .unwrap();
        let pi = v(&[2, 0, 5]);
        let printed = pi.display(&domain);
        let entries: Vec<&str> = printed.split_whitespace().collect();
        assert_eq!(CardinalityVector::parse(&domain, &entries).unwrap(), pi);
        // Omitted labels default to zero.
        assert_eq!(
            CardinalityVector::parse(&domain, &["c:1"]).unwrap(),
            v(&[0, 0, 1])
        );
        assert!(CardinalityVector::parse(&domain, &["bogus:1"]).is_err());
    }

    fn arb_count_map() -> impl Strategy<Value = CountMap> {
        prop::collection::vec(((0..4usize, 0..4usize), 0u64..50), 0..6).prop_map(|entries| {
            let mut m = CountMap::new();
            for ((a, b), c) in entries {
                m.add_count(v(&[a, b]), c.into());
            }
            m
        })
    }

    proptest! {
        #[test]
        fn convolve_commutes(a in arb_count_map(), b in arb_count_map()) {
            prop_assert_eq!(a.convolve(&b).unwrap(), b.convolve(&a).unwrap());
        }

        #[test]
        fn convolve_associates(a in arb_count_map(), b in arb_count_map(), c in arb_count_map()) {
            let left = a.convolve(&b).unwrap().convolve(&c).unwrap();
            let right = a.convolve(&b.convolve(&c).unwrap()).unwrap();
            prop_assert_eq!(left, right);
        }

        #[test]
        fn convolve_distributes_over_merge(
            a in arb_count_map(), b in arb_count_map(), c in arb_count_map()
        ) {
            let mut bc = b.clone();
            bc.merge(&c);
            let left = a.convolve(&bc).unwrap();
            let mut right = a.convolve(&b).unwrap();
            right.merge(&a.convolve(&c).unwrap());
            prop_assert_eq!(left, right);
        }

        #[test]
        fn set_convolution_is_count_support(a in arb_count_map(), b in arb_count_map()) {
            let by_sets = convolve_vector_sets(&a.support(), &b.support()).unwrap();
            prop_assert_eq!(by_sets, a.convolve(&b).unwrap().support());
        }
    }
}
