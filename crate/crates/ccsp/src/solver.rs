//! The polynomial solver for tractable languages.
//!
//! After 2-consistency the nontrivial pair relations form a graph whose
//! connected components are cliques. Disconnected instances combine their
//! components' cardinality vectors by convolution. A connected instance is
//! split along the blocks of `η_v0`, the join over all co-members `w` of the
//! left equivalence of `R_{v0,w}`: fixing the block of `v0` forces a block at
//! every other variable through the class correspondence maps, the instance
//! restricted to one block choice stays 2-consistent, and distinct blocks
//! have disjoint solution sets. Every variable's domain shrinks at each
//! block split, so that branch of the recursion is at most `|D|` deep.
//!
//! The single engine keeps exact per-vector solution counts; the decision
//! reading is its support.

use std::collections::BTreeSet;

use num_bigint::BigUint;

use crate::cardinality::{CardinalityVector, CountMap};
use crate::consistency::{
    self, close_pairs_only, BinarizedInstance, Word,
};
use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::partition::Partition;

/// The graph over variables whose edges are the nontrivial pair relations,
/// with its connected components (sorted by smallest member).
#[derive(Debug, Clone)]
pub struct ConstraintGraph {
    pub components: Vec<Vec<usize>>,
    pub edges: Vec<(usize, usize)>,
}

/// Per-variable class correspondences out of a base variable: block `i` of
/// the base partition maps to block `maps[w][i]` of `w`'s partition.
#[derive(Debug, Clone)]
pub struct ClassMap {
    pub base: usize,
    pub variables: Vec<usize>,
    /// Block partitions, indexed like `variables`.
    pub etas: Vec<Partition>,
    /// `maps[k][i]`: image block index in `etas[k]` of base block `i`.
    pub maps: Vec<Vec<usize>>,
}

/// Counters the engine maintains while solving.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SolveStats {
    pub max_block_depth: usize,
    pub block_branches: usize,
    pub component_splits: usize,
}

/// Builds the constraint graph and checks that every component is a clique,
/// which 2-consistency guarantees for tractable languages.
pub fn constraint_graph(b: &BinarizedInstance) -> Result<ConstraintGraph> {
    let n = b.variable_count();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut Vec<usize>, x: usize) -> usize {
        let mut root = x;
        while parent[root] != root {
            root = parent[root];
        }
        let mut cur = x;
        while parent[cur] != root {
            let next = parent[cur];
            parent[cur] = root;
            cur = next;
        }
        root
    }
    let mut edges = Vec::new();
    for (v, w) in b.pairs() {
        if !b.is_trivial_pair(v, w) {
            edges.push((v, w));
            let (rv, rw) = (find(&mut parent, v), find(&mut parent, w));
            if rv != rw {
                let (lo, hi) = if rv < rw { (rv, rw) } else { (rw, rv) };
                parent[hi] = lo;
            }
        }
    }
    let mut components: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
    for v in 0..n {
        let root = find(&mut parent, v);
        components.entry(root).or_default().push(v);
    }
    let components: Vec<Vec<usize>> = components.into_values().collect();
    for comp in &components {
        for (i, &v) in comp.iter().enumerate() {
            for &w in &comp[i + 1..] {
                if b.is_trivial_pair(v, w) {
                    return Err(Error::invariant(format!(
                        "component is not a clique: pair (v{v}, v{w}) is trivial"
                    )));
                }
            }
        }
    }
    Ok(ConstraintGraph { components, edges })
}

/// Left equivalence classes of a packed pair relation as block masks over the
/// left support, sorted by lowest element. `None` when the relation is not a
/// thick mapping (two left elements with overlapping but unequal rows).
fn packed_left_classes(b: &BinarizedInstance, v: usize, w: usize) -> Option<Vec<Word>> {
    let d = b.domain_size();
    let rel = b.rel_word(v, w);
    let mut groups: Vec<(Word, Word)> = Vec::new(); // (row, members)
    let mut support = b.support_mask(v);
    while support != 0 {
        let x = support.trailing_zeros() as usize;
        support &= support - 1;
        let row = consistency::get_row(rel, x, d);
        if row == 0 {
            return None;
        }
        match groups.iter_mut().find(|(r, _)| *r == row) {
            Some((_, members)) => *members |= 1 << x,
            None => {
                if groups.iter().any(|(r, _)| r & row != 0) {
                    return None;
                }
                groups.push((row, 1 << x));
            }
        }
    }
    Some(groups.into_iter().map(|(_, members)| members).collect())
}

fn mask_to_partition(blocks: &[Word]) -> Partition {
    Partition::new(
        blocks
            .iter()
            .map(|&m| consistency::mask_to_set(m))
            .collect(),
    )
    .expect("packed blocks are disjoint")
}

fn not_tractable(detail: String) -> Error {
    Error::arg(format!(
        "{detail}; the language is not tractable, use the brute-force oracle"
    ))
}

/// Join of block families over the elements of `support`, by union-find.
fn join_block_masks(families: &[Vec<Word>], support: Word, d: usize) -> Vec<Word> {
    let mut parent: Vec<usize> = (0..d).collect();
    fn find(parent: &mut Vec<usize>, x: usize) -> usize {
        let mut root = x;
        while parent[root] != root {
            root = parent[root];
        }
        let mut cur = x;
        while parent[cur] != root {
            let next = parent[cur];
            parent[cur] = root;
            cur = next;
        }
        root
    }
    for family in families {
        for &mask in family {
            let mut rest = mask;
            if rest == 0 {
                continue;
            }
            let first = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            while rest != 0 {
                let e = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                let (ra, rb) = (find(&mut parent, first), find(&mut parent, e));
                if ra != rb {
                    let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
                    parent[hi] = lo;
                }
            }
        }
    }
    let mut blocks: std::collections::BTreeMap<usize, Word> = Default::default();
    let mut rest = support;
    while rest != 0 {
        let e = rest.trailing_zeros() as usize;
        rest &= rest - 1;
        *blocks.entry(find(&mut parent, e)).or_default() |= 1 << e;
    }
    blocks.into_values().collect()
}

/// Block masks of `η_v` within a component: the join over co-members `w` of
/// the left classes of `R_vw`.
fn packed_eta(b: &BinarizedInstance, v: usize, component: &[usize]) -> Result<Vec<Word>> {
    let mut families = Vec::new();
    for &w in component {
        if w == v {
            continue;
        }
        let classes = packed_left_classes(b, v, w).ok_or_else(|| {
            not_tractable(format!("pair relation (v{v}, v{w}) is not a thick mapping"))
        })?;
        families.push(classes);
    }
    let blocks = join_block_masks(&families, b.support_mask(v), b.domain_size());
    if blocks.len() < 2 {
        return Err(Error::invariant(format!(
            "variable partition at v{v} is trivial on a multi-variable component"
        )));
    }
    Ok(blocks)
}

/// The per-variable partition used by the block split: the join over all
/// component co-members of the left equivalence of the pair relation.
/// Requires a component with at least two variables.
pub fn eta(b: &BinarizedInstance, v: usize) -> Result<Partition> {
    let graph = constraint_graph(b)?;
    let component = graph
        .components
        .iter()
        .find(|c| c.contains(&v))
        .ok_or_else(|| Error::arg(format!("variable v{v} out of range")))?;
    if component.len() < 2 {
        return Err(Error::arg(
            "variable partition needs a component with at least two variables",
        ));
    }
    Ok(mask_to_partition(&packed_eta(b, v, component)?))
}

/// Builds the class correspondences out of `base` for its whole component:
/// the image of each base block under each pair relation must be exactly one
/// block of the target partition, bijectively.
pub fn class_map(b: &BinarizedInstance, base: usize) -> Result<ClassMap> {
    let graph = constraint_graph(b)?;
    let component = graph
        .components
        .iter()
        .find(|c| c.contains(&base))
        .ok_or_else(|| Error::arg(format!("variable v{base} out of range")))?;
    if component.len() < 2 {
        return Err(Error::arg(
            "class maps need a component with at least two variables",
        ));
    }
    let (etas, maps) = packed_class_map(b, base, component)?;
    Ok(ClassMap {
        base,
        variables: component.clone(),
        etas: etas.iter().map(|e| mask_to_partition(e)).collect(),
        maps,
    })
}

/// Packed form of [`class_map`]: per-variable block masks plus base-block to
/// target-block index maps.
fn packed_class_map(
    b: &BinarizedInstance,
    base: usize,
    component: &[usize],
) -> Result<(Vec<Vec<Word>>, Vec<Vec<usize>>)> {
    let d = b.domain_size();
    let etas: Vec<Vec<Word>> = component
        .iter()
        .map(|&v| packed_eta(b, v, component))
        .collect::<Result<_>>()?;
    let base_pos = component.iter().position(|&v| v == base).unwrap();
    let base_blocks = &etas[base_pos];
    let mut maps = Vec::with_capacity(component.len());
    for (k, &w) in component.iter().enumerate() {
        if w == base {
            maps.push((0..base_blocks.len()).collect());
            continue;
        }
        if etas[k].len() != base_blocks.len() {
            return Err(Error::invariant(format!(
                "block counts differ between v{base} and v{w}"
            )));
        }
        let rel = b.rel_word(base, w);
        let mut map = Vec::with_capacity(base_blocks.len());
        let mut used = vec![false; etas[k].len()];
        for &block in base_blocks {
            let mut image: Word = 0;
            let mut rest = block;
            while rest != 0 {
                let x = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                image |= consistency::get_row(rel, x, d);
            }
            let target = etas[k].iter().position(|&t| t == image).ok_or_else(|| {
                Error::invariant(format!(
                    "image of a v{base} block under (v{base}, v{w}) is not a single block"
                ))
            })?;
            if used[target] {
                return Err(Error::invariant(format!(
                    "class correspondence from v{base} to v{w} is not a bijection"
                )));
            }
            used[target] = true;
            map.push(target);
        }
        maps.push(map);
    }
    Ok((etas, maps))
}

/// Checks composition-consistency of the class correspondences inside every
/// multi-variable component: the map from `u` to `w` equals the map from `v`
/// to `w` after the map from `u` to `v`, for all ordered triples.
pub fn verify_class_maps(b: &BinarizedInstance) -> Result<()> {
    let graph = constraint_graph(b)?;
    for component in &graph.components {
        if component.len() < 2 {
            continue;
        }
        let mut all_maps = Vec::new();
        for &v in component {
            let (_, maps) = packed_class_map(b, v, component)?;
            all_maps.push(maps);
        }
        let pos = |v: usize| component.iter().position(|&x| x == v).unwrap();
        for &u in component {
            for &v in component {
                for &w in component {
                    if u == v || v == w || u == w {
                        continue;
                    }
                    let uv = &all_maps[pos(u)][pos(v)];
                    let vw = &all_maps[pos(v)][pos(w)];
                    let uw = &all_maps[pos(u)][pos(w)];
                    for i in 0..uv.len() {
                        if vw[uv[i]] != uw[i] {
                            return Err(Error::invariant(format!(
                                "class maps do not compose: v{u} -> v{v} -> v{w} differs from v{u} -> v{w}"
                            )));
                        }
                    }
                }
            }
        }
    }
    Ok(())
}

/// Narrows a connected instance to one block choice: every variable keeps the
/// image of `block_index` under the class maps and every pair relation is
/// intersected accordingly. The result stays 2-consistent (verified in debug
/// builds); emptied branches come back flagged inconsistent.
pub fn restrict_instance(
    b: &BinarizedInstance,
    base: usize,
    block_index: usize,
) -> Result<BinarizedInstance> {
    let graph = constraint_graph(b)?;
    let component = graph
        .components
        .iter()
        .find(|c| c.contains(&base))
        .ok_or_else(|| Error::arg(format!("variable v{base} out of range")))?;
    let (etas, maps) = packed_class_map(b, base, component)?;
    let base_pos = component.iter().position(|&v| v == base).unwrap();
    if block_index >= etas[base_pos].len() {
        return Err(Error::arg("block index out of range"));
    }
    restrict_with(b, component, &etas, &maps, block_index)
}

fn restrict_with(
    b: &BinarizedInstance,
    component: &[usize],
    etas: &[Vec<Word>],
    maps: &[Vec<usize>],
    block_index: usize,
) -> Result<BinarizedInstance> {
    let n = b.variable_count();
    let d = b.domain_size();
    let mut supports: Vec<Word> = (0..n).map(|v| b.support_mask(v)).collect();
    for (k, &v) in component.iter().enumerate() {
        supports[v] = etas[k][maps[k][block_index]];
    }
    let mut rels = vec![0; n * n];
    for v in 0..n {
        for w in 0..n {
            if v != w {
                rels[v * n + w] = b.rel_word(v, w)
                    & consistency::packed_product(supports[v], supports[w], d);
            }
        }
    }
    let restricted = BinarizedInstance::from_parts(n, d, rels, supports);
    #[cfg(debug_assertions)]
    {
        let closed = close_pairs_only(&restricted)?;
        debug_assert!(
            closed == restricted,
            "block restriction must already be 2-consistent"
        );
    }
    Ok(restricted)
}

/// Extracts the sub-instance on a sorted list of variables, reindexed to
/// `0..vars.len()`.
fn restrict_to_vars(b: &BinarizedInstance, vars: &[usize]) -> BinarizedInstance {
    let d = b.domain_size();
    let m = vars.len();
    let supports: Vec<Word> = vars.iter().map(|&v| b.support_mask(v)).collect();
    let mut rels = vec![0; m * m];
    for (i, &v) in vars.iter().enumerate() {
        for (j, &w) in vars.iter().enumerate() {
            if i != j {
                rels[i * m + j] = b.rel_word(v, w);
            }
        }
    }
    BinarizedInstance::from_parts(m, d, rels, supports)
}

/// Exact per-vector solution counts of a 2-consistent instance.
pub(crate) fn engine(
    b: &BinarizedInstance,
    depth: usize,
    stats: &mut SolveStats,
) -> Result<CountMap> {
    let d = b.domain_size();
    if b.is_inconsistent() {
        return Ok(CountMap::new());
    }
    let n = b.variable_count();
    if n == 0 {
        return Ok(CountMap::identity(d));
    }
    if n == 1 {
        let mut out = CountMap::new();
        for a in b.support(0) {
            out.add_count(CardinalityVector::unit(d, a), BigUint::from(1u32));
        }
        return Ok(out);
    }
    let graph = constraint_graph(b)?;
    if graph.components.len() > 1 {
        stats.component_splits += 1;
        let mut acc = CountMap::identity(d);
        for comp in &graph.components {
            let sub = restrict_to_vars(b, comp);
            let part = engine(&sub, depth, stats)?;
            acc = acc.convolve(&part)?;
        }
        return Ok(acc);
    }
    // Connected with at least two variables: split on the blocks of the
    // lowest variable's partition.
    if depth >= d {
        return Err(Error::invariant(format!(
            "block recursion exceeded the domain-size bound {d}"
        )));
    }
    let component = &graph.components[0];
    let base_pos = 0;
    let (etas, maps) = packed_class_map(b, component[base_pos], component)?;
    let mut acc = CountMap::new();
    for block_index in 0..etas[base_pos].len() {
        stats.block_branches += 1;
        stats.max_block_depth = stats.max_block_depth.max(depth + 1);
        let branch = restrict_with(b, component, &etas, &maps, block_index)?;
        let part = engine(&branch, depth + 1, stats)?;
        acc.merge(&part);
    }
    Ok(acc)
}

/// The set of cardinality vectors realized by solutions of a 2-consistent
/// instance over a tractable language.
pub fn ext_cardinality(b: &BinarizedInstance) -> Result<BTreeSet<CardinalityVector>> {
    let mut stats = SolveStats::default();
    Ok(engine(b, 0, &mut stats)?.support())
}

/// As [`ext_cardinality`], also returning the recursion counters.
pub fn ext_cardinality_with_stats(
    b: &BinarizedInstance,
) -> Result<(BTreeSet<CardinalityVector>, SolveStats)> {
    let mut stats = SolveStats::default();
    let map = engine(b, 0, &mut stats)?;
    Ok((map.support(), stats))
}

fn require_tractable(instance: &Instance) -> Result<()> {
    use crate::classifier::{classify, SearchLimits, Verdict};
    match classify(instance.language(), SearchLimits::default()).verdict {
        Verdict::Tractable => Ok(()),
        Verdict::Hard => Err(not_tractable("the instance language is hard".to_string())),
        Verdict::Inconclusive => Err(Error::resource(
            "classification inconclusive within the node limit",
        )),
    }
}

/// Full decision pipeline: classify, binarize, close, solve, then test
/// membership of the requested vector.
pub fn cardinality_decide(instance: &Instance, pi: &CardinalityVector) -> Result<bool> {
    if pi.total() != instance.variable_count() {
        return Err(Error::arg(format!(
            "cardinality total {} does not match the variable count {}",
            pi.total(),
            instance.variable_count()
        )));
    }
    if pi.domain_size() != instance.language().domain().size() {
        return Err(Error::arg("cardinality vector over the wrong domain"));
    }
    require_tractable(instance)?;
    let b = consistency::binarize(instance)?;
    Ok(ext_cardinality(&b)?.contains(pi))
}

/// Full pipeline returning every feasible cardinality vector.
pub fn feasible_vectors(instance: &Instance) -> Result<BTreeSet<CardinalityVector>> {
    require_tractable(instance)?;
    let b = consistency::binarize(instance)?;
    ext_cardinality(&b)
}

/// Classification guard shared with the counter's instance-level entry
/// points.
pub(crate) fn ensure_tractable(instance: &Instance) -> Result<()> {
    require_tractable(instance)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::consistency::binarize;
    use crate::domain::DomainSpec;
    use crate::language::ConstraintLanguage;
    use crate::relation::Relation;

    fn two_element_language() -> ConstraintLanguage {
        let mut lang = ConstraintLanguage::new(DomainSpec::new(2).unwrap());
        lang.add_relation("eq", Relation::equality(2)).unwrap();
        lang.add_relation("neq", Relation::new(2, vec![vec![0, 1], vec![1, 0]]).unwrap())
            .unwrap();
        lang
    }

    fn sample_ternary_language() -> ConstraintLanguage {
        let mut lang = ConstraintLanguage::new(DomainSpec::new(10).unwrap());
        lang.add_relation(
            "r",
            Relation::new(
                3,
                vec![vec![0, 1, 2], vec![0, 3, 4], vec![5, 6, 7], vec![8, 9, 7]],
            )
            .unwrap(),
        )
        .unwrap();
        lang
    }

    fn vec2(a: usize, b: usize) -> CardinalityVector {
        CardinalityVector::new(vec![a, b])
    }

    #[test]
    fn no_constraints_gives_singleton_components() {
        let p = Instance::new(two_element_language(), 4);
        let b = binarize(&p).unwrap();
        let g = constraint_graph(&b).unwrap();
        assert_eq!(g.components.len(), 4);
        assert!(g.edges.is_empty());
    }

    #[test]
    fn equality_chain_closes_into_one_clique() {
        let mut p = Instance::new(two_element_language(), 3);
        p.add_constraint("eq", vec![0, 1]).unwrap();
        p.add_constraint("eq", vec![1, 2]).unwrap();
        let b = binarize(&p).unwrap();
        let g = constraint_graph(&b).unwrap();
        assert_eq!(g.components, vec![vec![0, 1, 2]]);
        assert_eq!(g.edges.len(), 3);
    }

    #[test]
    fn disjoint_chains_make_two_components() {
        let mut p = Instance::new(two_element_language(), 4);
        p.add_constraint("eq", vec![0, 1]).unwrap();
        p.add_constraint("eq", vec![2, 3]).unwrap();
        let b = binarize(&p).unwrap();
        let g = constraint_graph(&b).unwrap();
        assert_eq!(g.components, vec![vec![0, 1], vec![2, 3]]);
    }

    #[test]
    fn eta_of_a_partial_bijection_is_discrete() {
        // Pair relation {(1,2),(3,4)} over the ten-element domain.
        let mut lang = ConstraintLanguage::new(DomainSpec::new(10).unwrap());
        lang.add_relation(
            "m",
            Relation::new(2, vec![vec![1, 2], vec![3, 4]]).unwrap(),
        )
        .unwrap();
        let mut p = Instance::new(lang, 2);
        p.add_constraint("m", vec![0, 1]).unwrap();
        let b = binarize(&p).unwrap();
        let e = eta(&b, 0).unwrap();
        assert_eq!(e, Partition::discrete(&BTreeSet::from([1, 3])));
    }

    #[test]
    fn eta_of_equality_is_discrete() {
        let mut p = Instance::new(two_element_language(), 2);
        p.add_constraint("eq", vec![0, 1]).unwrap();
        let b = binarize(&p).unwrap();
        assert_eq!(
            eta(&b, 0).unwrap(),
            Partition::discrete(&BTreeSet::from([0, 1]))
        );
    }

    #[test]
    fn eta_joins_nested_left_classes() {
        // Two co-members with identical nested classes {{0,1},{2}}.
        let mut lang = ConstraintLanguage::new(DomainSpec::new(3).unwrap());
        let thick = Relation::new(
            2,
            vec![vec![0, 0], vec![0, 1], vec![1, 0], vec![1, 1], vec![2, 2]],
        )
        .unwrap();
        lang.add_relation("t", thick).unwrap();
        let mut p = Instance::new(lang, 3);
        p.add_constraint("t", vec![0, 1]).unwrap();
        p.add_constraint("t", vec![0, 2]).unwrap();
        p.add_constraint("t", vec![1, 2]).unwrap();
        let b = binarize(&p).unwrap();
        let e = eta(&b, 0).unwrap();
        assert_eq!(
            e.blocks().to_vec(),
            vec![BTreeSet::from([0, 1]), BTreeSet::from([2])]
        );
    }

    #[test]
    fn class_map_of_a_bijection_maps_singletons() {
        let mut lang = ConstraintLanguage::new(DomainSpec::new(10).unwrap());
        lang.add_relation(
            "m",
            Relation::new(2, vec![vec![1, 2], vec![3, 4]]).unwrap(),
        )
        .unwrap();
        let mut p = Instance::new(lang, 2);
        p.add_constraint("m", vec![0, 1]).unwrap();
        let b = binarize(&p).unwrap();
        let cm = class_map(&b, 0).unwrap();
        assert_eq!(cm.variables, vec![0, 1]);
        // Blocks {1} -> {2} and {3} -> {4}.
        assert_eq!(cm.etas[0].blocks()[0], BTreeSet::from([1]));
        assert_eq!(cm.etas[1].blocks()[cm.maps[1][0]], BTreeSet::from([2]));
        assert_eq!(cm.etas[1].blocks()[cm.maps[1][1]], BTreeSet::from([4]));
    }

    #[test]
    fn class_maps_compose_on_a_three_clique() {
        let mut p = Instance::new(two_element_language(), 3);
        p.add_constraint("eq", vec![0, 1]).unwrap();
        p.add_constraint("neq", vec![1, 2]).unwrap();
        let b = binarize(&p).unwrap();
        verify_class_maps(&b).unwrap();
    }

    #[test]
    fn restriction_narrows_the_sample_instance() {
        let mut p = Instance::new(sample_ternary_language(), 3);
        p.add_constraint("r", vec![0, 1, 2]).unwrap();
        let b = binarize(&p).unwrap();
        // Base variable 0 splits into {0} (values 1..5 side) and {5,8}.
        let e = eta(&b, 0).unwrap();
        assert_eq!(
            e.blocks().to_vec(),
            vec![BTreeSet::from([0]), BTreeSet::from([5, 8])]
        );
        let first = restrict_instance(&b, 0, 0).unwrap();
        assert_eq!(first.support(0), BTreeSet::from([0]));
        assert_eq!(first.support(1), BTreeSet::from([1, 3]));
        assert_eq!(first.support(2), BTreeSet::from([2, 4]));
        assert!(!first.is_inconsistent());
        // The branch graph decomposes: v0 splits off, v1-v2 stay linked.
        let g = constraint_graph(&first).unwrap();
        assert_eq!(g.components, vec![vec![0], vec![1, 2]]);
    }

    #[test]
    fn restriction_to_an_empty_branch_is_flagged() {
        // eq and a unary restriction kill one block.
        let mut lang = two_element_language();
        lang.add_relation("zero", Relation::new(1, vec![vec![0]]).unwrap())
            .unwrap();
        let mut p = Instance::new(lang, 2);
        p.add_constraint("eq", vec![0, 1]).unwrap();
        let b = binarize(&p).unwrap();
        let r = restrict_instance(&b, 0, 1).unwrap();
        assert!(!r.is_inconsistent());
        assert_eq!(r.support(0), BTreeSet::from([1]));
    }

    #[test]
    fn ext_cardinality_base_cases() {
        let p = Instance::new(two_element_language(), 1);
        let b = binarize(&p).unwrap();
        let vs = ext_cardinality(&b).unwrap();
        assert_eq!(
            vs,
            BTreeSet::from([vec2(1, 0), vec2(0, 1)])
        );
    }

    #[test]
    fn equality_chain_realizes_two_vectors() {
        let mut p = Instance::new(two_element_language(), 3);
        p.add_constraint("eq", vec![0, 1]).unwrap();
        p.add_constraint("eq", vec![1, 2]).unwrap();
        let b = binarize(&p).unwrap();
        let vs = ext_cardinality(&b).unwrap();
        assert_eq!(vs, BTreeSet::from([vec2(3, 0), vec2(0, 3)]));
    }

    #[test]
    fn sample_instance_realizes_its_four_tuples() {
        let mut p = Instance::new(sample_ternary_language(), 3);
        p.add_constraint("r", vec![0, 1, 2]).unwrap();
        let b = binarize(&p).unwrap();
        let (vs, stats) = ext_cardinality_with_stats(&b).unwrap();
        let expected: BTreeSet<CardinalityVector> = [
            vec![0, 1, 2],
            vec![0, 3, 4],
            vec![5, 6, 7],
            vec![8, 9, 7],
        ]
        .iter()
        .map(|t| CardinalityVector::of_assignment(10, t))
        .collect();
        assert_eq!(vs, expected);
        assert!(stats.max_block_depth <= 10);
        assert!(stats.block_branches >= 2);
        // Cross-check against exhaustive enumeration.
        let brute = crate::oracle::brute_force_count(&p, 10_000).unwrap();
        assert_eq!(vs, brute.support());
    }

    #[test]
    fn decide_respects_the_total_precondition() {
        let mut p = Instance::new(two_element_language(), 3);
        p.add_constraint("eq", vec![0, 1]).unwrap();
        p.add_constraint("eq", vec![1, 2]).unwrap();
        assert!(cardinality_decide(&p, &vec2(3, 0)).unwrap());
        assert!(!cardinality_decide(&p, &vec2(2, 1)).unwrap());
        assert!(cardinality_decide(&p, &vec2(2, 0)).is_err());
    }

    #[test]
    fn hard_language_is_refused_with_a_pointer_to_the_oracle() {
        let mut lang = ConstraintLanguage::new(DomainSpec::new(3).unwrap());
        let tuples = (0..3)
            .flat_map(|x| (0..3).filter(move |&y| y != x).map(move |y| vec![x, y]))
            .collect::<Vec<_>>();
        lang.add_relation("neq", Relation::new(2, tuples).unwrap())
            .unwrap();
        let mut p = Instance::new(lang, 3);
        p.add_constraint("neq", vec![0, 1]).unwrap();
        let err = cardinality_decide(&p, &CardinalityVector::new(vec![1, 1, 1])).unwrap_err();
        assert!(err.to_string().contains("oracle"));
    }

    #[test]
    fn engine_matches_brute_force_on_random_tractable_instances() {
        use crate::oracle::{brute_force_count, generate, GeneratorConfig};
        for seed in 0..40u64 {
            let config = GeneratorConfig {
                seed,
                domain_size: 2 + (seed as usize % 3),
                variables: 2 + (seed as usize % 5),
                constraints: 1 + (seed as usize % 6),
                max_arity: 3,
                tractable_only: true,
            };
            let (_, instance, _) = generate(&config).unwrap();
            let b = binarize(&instance).unwrap();
            let got = ext_cardinality(&b).unwrap();
            let brute = brute_force_count(&instance, 1 << 22).unwrap();
            assert_eq!(got, brute.support(), "seed {seed}");
        }
    }

    #[test]
    fn component_solutions_concatenate() {
        // Sampled combinations of per-component solutions satisfy the whole
        // instance.
        let mut p = Instance::new(two_element_language(), 4);
        p.add_constraint("neq", vec![0, 1]).unwrap();
        p.add_constraint("eq", vec![2, 3]).unwrap();
        let sols = crate::oracle::enumerate_solutions(&p, 1000).unwrap();
        let left: BTreeSet<(usize, usize)> = sols.iter().map(|s| (s[0], s[1])).collect();
        let right: BTreeSet<(usize, usize)> = sols.iter().map(|s| (s[2], s[3])).collect();
        for &(a, b) in &left {
            for &(c, d) in &right {
                assert!(p.satisfies(&[a, b, c, d]));
            }
        }
    }

    #[test]
    fn results_are_identical_across_runs() {
        let mut p = Instance::new(sample_ternary_language(), 4);
        p.add_constraint("r", vec![0, 1, 2]).unwrap();
        p.add_constraint("r", vec![1, 2, 3]).unwrap();
        let b = binarize(&p).unwrap();
        assert_eq!(ext_cardinality(&b).unwrap(), ext_cardinality(&b).unwrap());
    }
}
