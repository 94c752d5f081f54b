//! Executable hardness gadgets: instance transformers that preserve
//! feasibility under an explicit cardinality-vector correspondence. Each
//! transformer validates its side conditions and is oracle-verified at desk
//! scale by the test suite.

use std::collections::BTreeSet;
use std::fmt;

use crate::cardinality::CardinalityVector;
use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::language::ConstraintLanguage;
use crate::partition::Partition;
use crate::relation::{Relation, ThickMappingCheck};

/// How an original cardinality vector maps to the transformed instance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ForwardMap {
    Identity,
    /// Extend by zeros: count of subdomain element `i` lands on parent
    /// element `embedding[i]`, everything else is zero.
    ZeroExtend {
        embedding: Vec<usize>,
        parent_domain_size: usize,
    },
    /// Pointwise affine: every count becomes `scale * count + offset`.
    ScaleOffset { scale: usize, offset: usize },
    /// One constant-elimination pass: count of element `i` grows by `add[i]`.
    /// Feasibility transfers only when the input vector budgets at least
    /// `pinned` occurrences of `eliminated`; below that the original is
    /// trivially infeasible while the gadget instance need not be.
    ConstantShift {
        add: Vec<usize>,
        eliminated: usize,
        pinned: usize,
    },
    /// The transformed vector is fixed regardless of the input (used when the
    /// source problem is not itself a cardinality CSP).
    Fixed(CardinalityVector),
    /// Sequential composition, applied left to right.
    Chain(Vec<ForwardMap>),
}

impl ForwardMap {
    pub fn apply(&self, pi: &CardinalityVector) -> Result<CardinalityVector> {
        match self {
            ForwardMap::Identity => Ok(pi.clone()),
            ForwardMap::ZeroExtend {
                embedding,
                parent_domain_size,
            } => {
                if pi.domain_size() != embedding.len() {
                    return Err(Error::arg("vector does not match the subdomain"));
                }
                let mut counts = vec![0usize; *parent_domain_size];
                for (i, &c) in pi.counts().iter().enumerate() {
                    counts[embedding[i]] += c;
                }
                Ok(CardinalityVector::new(counts))
            }
            ForwardMap::ScaleOffset { scale, offset } => Ok(CardinalityVector::new(
                pi.counts().iter().map(|&c| scale * c + offset).collect(),
            )),
            ForwardMap::ConstantShift { add, .. } => {
                if pi.domain_size() != add.len() {
                    return Err(Error::arg("vector does not match the domain"));
                }
                Ok(CardinalityVector::new(
                    pi.counts().iter().zip(add).map(|(&c, &a)| c + a).collect(),
                ))
            }
            ForwardMap::Fixed(v) => Ok(v.clone()),
            ForwardMap::Chain(maps) => {
                let mut cur = pi.clone();
                for m in maps {
                    cur = m.apply(&cur)?;
                }
                Ok(cur)
            }
        }
    }

    /// Whether feasibility is guaranteed to transfer for this input vector.
    /// Vectors outside the guarantee are trivially infeasible on the original
    /// side (they budget fewer occurrences of a value than its pinned
    /// variables demand).
    pub fn feasibility_preserved(&self, pi: &CardinalityVector) -> bool {
        match self {
            ForwardMap::ConstantShift {
                eliminated, pinned, ..
            } => pi.get(*eliminated) >= *pinned,
            ForwardMap::Chain(maps) => {
                let mut cur = pi.clone();
                for m in maps {
                    if !m.feasibility_preserved(&cur) {
                        return false;
                    }
                    match m.apply(&cur) {
                        Ok(next) => cur = next,
                        Err(_) => return false,
                    }
                }
                true
            }
            _ => true,
        }
    }
}

impl fmt::Display for ForwardMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ForwardMap::Identity => write!(f, "identity"),
            ForwardMap::ZeroExtend { embedding, .. } => {
                write!(f, "extend by zeros via embedding {embedding:?}")
            }
            ForwardMap::ScaleOffset { scale, offset } => {
                write!(f, "pointwise count -> {scale}*count + {offset}")
            }
            ForwardMap::ConstantShift {
                add,
                eliminated,
                pinned,
            } => write!(
                f,
                "pointwise shifts {add:?} (valid for count of element \
                 {eliminated} at least {pinned})"
            ),
            ForwardMap::Fixed(v) => write!(f, "fixed vector {v}"),
            ForwardMap::Chain(maps) => {
                let parts: Vec<String> = maps.iter().map(|m| m.to_string()).collect();
                write!(f, "{}", parts.join(" then "))
            }
        }
    }
}

/// A transformed instance together with the cardinality correspondence and a
/// human-readable description of the construction.
#[derive(Debug, Clone)]
pub struct ReductionOutput {
    pub instance: Instance,
    pub forward_map: ForwardMap,
    pub notes: String,
}

fn map_cardinality(
    out: &mut Instance,
    original: Option<&CardinalityVector>,
    map: &ForwardMap,
) -> Result<()> {
    if let Some(pi) = original {
        out.set_cardinality(Some(map.apply(pi)?))?;
    }
    Ok(())
}

/// Lifts an instance over a restricted language back to the parent language:
/// each relation (matched by name) must be exactly the subdomain restriction
/// of its parent, constraints are re-pointed, and the cardinality vector is
/// extended by zeros on the removed values.
pub fn reduce_restriction(
    instance: &Instance,
    parent: &ConstraintLanguage,
) -> Result<ReductionOutput> {
    let sub = instance.language().domain();
    let embedding: Vec<usize> = (0..sub.size())
        .map(|e| {
            parent.domain().resolve(sub.label(e)).ok_or_else(|| {
                Error::arg(format!(
                    "subdomain element {:?} does not exist in the parent domain",
                    sub.label(e)
                ))
            })
        })
        .collect::<Result<_>>()?;
    let image: BTreeSet<usize> = embedding.iter().copied().collect();
    if image.len() != embedding.len() {
        return Err(Error::arg("subdomain labels collapse in the parent"));
    }
    for (name, rel) in instance.language().relations() {
        let parent_rel = parent
            .relation(name)
            .ok_or_else(|| Error::arg(format!("parent language lacks relation {name:?}")))?;
        if parent_rel.arity() != rel.arity() {
            return Err(Error::arg(format!("arity mismatch on relation {name:?}")));
        }
        let embedded = Relation::new(
            rel.arity(),
            rel.tuples()
                .map(|t| t.iter().map(|&e| embedding[e]).collect::<Vec<_>>()),
        )?;
        if embedded != parent_rel.restrict(&image) {
            return Err(Error::arg(format!(
                "relation {name:?} is not the subdomain restriction of its parent"
            )));
        }
    }
    let mut out = Instance::new(parent.clone(), instance.variable_count());
    for c in instance.constraints() {
        out.add_constraint(c.relation.clone(), c.scope.clone())?;
    }
    let map = ForwardMap::ZeroExtend {
        embedding,
        parent_domain_size: parent.domain().size(),
    };
    map_cardinality(&mut out, instance.cardinality(), &map)?;
    Ok(ReductionOutput {
        instance: out,
        forward_map: map,
        notes: "subdomain restriction lifted to the parent language; \
                removed values get cardinality zero"
            .into(),
    })
}

/// Eliminates a relation defined as a conjunction: every constraint on it
/// becomes one constraint per conjunct on the same scope (fictitious trailing
/// coordinates allowed via shorter conjunct arities). The cardinality vector
/// is unchanged.
pub fn reduce_pp_conjunction(
    instance: &Instance,
    defined: &str,
    conjunct1: &str,
    conjunct2: &str,
) -> Result<ReductionOutput> {
    let lang = instance.language();
    let d = lang.domain().size();
    let r = lang
        .relation(defined)
        .ok_or_else(|| Error::arg(format!("unknown relation {defined:?}")))?;
    let r1 = lang
        .relation(conjunct1)
        .ok_or_else(|| Error::arg(format!("unknown relation {conjunct1:?}")))?;
    let r2 = lang
        .relation(conjunct2)
        .ok_or_else(|| Error::arg(format!("unknown relation {conjunct2:?}")))?;
    if defined == conjunct1 || defined == conjunct2 {
        return Err(Error::arg("the defined relation cannot be its own conjunct"));
    }
    if r1.arity() > r.arity() || r2.arity() > r.arity() {
        return Err(Error::arg(
            "conjunct arity exceeds the defined relation's arity",
        ));
    }
    let padded = r1
        .pad_to(r.arity(), d)?
        .intersect(&r2.pad_to(r.arity(), d)?)?;
    if &padded != r {
        return Err(Error::arg(format!(
            "{defined:?} is not the conjunction of {conjunct1:?} and {conjunct2:?}"
        )));
    }
    let mut target = ConstraintLanguage::new(lang.domain().clone());
    for (name, rel) in lang.relations() {
        if name != defined {
            target.add_relation(name.clone(), rel.clone())?;
        }
    }
    let mut out = Instance::new(target, instance.variable_count());
    for c in instance.constraints() {
        if c.relation == defined {
            out.add_constraint(conjunct1.to_string(), c.scope[..r1.arity()].to_vec())?;
            out.add_constraint(conjunct2.to_string(), c.scope[..r2.arity()].to_vec())?;
        } else {
            out.add_constraint(c.relation.clone(), c.scope.clone())?;
        }
    }
    map_cardinality(&mut out, instance.cardinality(), &ForwardMap::Identity)?;
    Ok(ReductionOutput {
        instance: out,
        forward_map: ForwardMap::Identity,
        notes: format!("each {defined:?} constraint split into its conjuncts"),
    })
}

fn cartesian(choices: &[Vec<usize>], cap: usize, mut f: impl FnMut(&[usize])) -> Result<()> {
    let total: usize = choices.iter().map(|c| c.len()).product();
    if total > cap {
        return Err(Error::resource(format!(
            "{total} generated constraints exceed the cap {cap}"
        )));
    }
    let mut idx = vec![0usize; choices.len()];
    let mut current: Vec<usize> = choices.iter().map(|c| c[0]).collect();
    loop {
        f(&current);
        let mut i = choices.len();
        loop {
            if i == 0 {
                return Ok(());
            }
            i -= 1;
            idx[i] += 1;
            if idx[i] < choices[i].len() {
                current[i] = choices[i][idx[i]];
                break;
            }
            idx[i] = 0;
            current[i] = choices[i][0];
        }
    }
}

const GENERATED_CONSTRAINT_CAP: usize = 500_000;

/// Eliminates a relation defined by existential projection of a wider one:
/// every original variable becomes a block of `q|D|` copies, each defining
/// constraint gains a fresh witness variable, and `q(|D|-1)` padding
/// variables absorb the remaining values. Counts map pointwise to
/// `q|D|*count + q`.
pub fn reduce_pp_exists(
    instance: &Instance,
    defined: &str,
    wider: &str,
) -> Result<ReductionOutput> {
    let lang = instance.language();
    let d = lang.domain().size();
    let r = lang
        .relation(defined)
        .ok_or_else(|| Error::arg(format!("unknown relation {defined:?}")))?;
    let rp = lang
        .relation(wider)
        .ok_or_else(|| Error::arg(format!("unknown relation {wider:?}")))?;
    if defined == wider {
        return Err(Error::arg("the defined relation cannot define itself"));
    }
    if rp.arity() != r.arity() + 1 {
        return Err(Error::arg(
            "the wider relation must have arity one above the defined one",
        ));
    }
    let projected = rp.project(&(0..r.arity()).collect::<Vec<_>>())?;
    if &projected != r {
        return Err(Error::arg(format!(
            "{defined:?} is not the projection of {wider:?} on its leading coordinates"
        )));
    }
    let q = instance
        .constraints()
        .iter()
        .filter(|c| c.relation == defined)
        .count();
    if q == 0 {
        return Err(Error::arg(format!(
            "no constraint uses {defined:?}; use the instance unchanged"
        )));
    }
    let n = instance.variable_count();
    let block = q * d;
    // Layout: per-variable blocks, then one witness per defining constraint,
    // then the |D|-1 padding variables of each. Padding stays unconstrained.
    let member = |v: usize, copy: usize| v * block + copy;
    let witness = |i: usize| n * block + i;
    let total_vars = n * block + q * d;

    let mut target = ConstraintLanguage::new(lang.domain().clone());
    for (name, rel) in lang.relations() {
        if name != defined {
            target.add_relation(name.clone(), rel.clone())?;
        }
    }
    let mut out = Instance::new(target, total_vars);
    let mut defining_seen = 0usize;
    for c in instance.constraints() {
        let choices: Vec<Vec<usize>> = c
            .scope
            .iter()
            .map(|&v| (0..block).map(|k| member(v, k)).collect())
            .collect();
        let mut scopes = Vec::new();
        cartesian(&choices, GENERATED_CONSTRAINT_CAP, |combo| {
            scopes.push(combo.to_vec());
        })?;
        if c.relation == defined {
            let i = defining_seen;
            defining_seen += 1;
            for mut scope in scopes {
                scope.push(witness(i));
                out.add_constraint(wider.to_string(), scope)?;
            }
        } else {
            for scope in scopes {
                out.add_constraint(c.relation.clone(), scope)?;
            }
        }
    }
    let map = ForwardMap::ScaleOffset {
        scale: block,
        offset: q,
    };
    map_cardinality(&mut out, instance.cardinality(), &map)?;
    Ok(ReductionOutput {
        instance: out,
        forward_map: map,
        notes: format!(
            "existential elimination of {defined:?}: {q} defining constraints, \
             variable blocks of size {block}, {total_vars} total variables"
        ),
    })
}

/// Looks up constraints whose relation is a unary singleton not present in
/// the target language, i.e. a pinned constant.
fn constant_value(instance: &Instance, target: &ConstraintLanguage, name: &str) -> Option<usize> {
    if target.relation(name).is_some() {
        return None;
    }
    let rel = instance.language().relation(name)?;
    if rel.arity() == 1 && rel.len() == 1 {
        Some(rel.tuples().next().unwrap()[0])
    } else {
        None
    }
}

/// Eliminates pinned-constant constraints one value at a time. Each pass
/// attaches a gadget with one variable block per domain element, sized
/// `n^(k+1-i)` along an ordering that puts the eliminated value first, wires
/// every tuple of every relation across the blocks, re-scopes constraints on
/// pinned variables into the eliminated value's block, and shifts the
/// cardinality vector by the block sizes (minus the removed variables on the
/// eliminated value).
pub fn reduce_constants(
    instance: &Instance,
    target: &ConstraintLanguage,
) -> Result<ReductionOutput> {
    if instance.language().domain() != target.domain() {
        return Err(Error::arg("target language must share the instance domain"));
    }
    for c in instance.constraints() {
        if target.relation(&c.relation).is_none()
            && constant_value(instance, target, &c.relation).is_none()
        {
            return Err(Error::arg(format!(
                "relation {:?} is neither in the target language nor a pinned constant",
                c.relation
            )));
        }
    }
    let mut current = instance.clone();
    let mut maps = Vec::new();
    let mut passes = 0usize;
    loop {
        let pinned: BTreeSet<usize> = current
            .constraints()
            .iter()
            .filter_map(|c| constant_value(&current, target, &c.relation))
            .collect();
        let Some(&value) = pinned.iter().next() else {
            break;
        };
        let (next, map) = eliminate_one_constant(&current, target, value)?;
        maps.push(map);
        current = next;
        passes += 1;
    }
    let map = match maps.len() {
        0 => ForwardMap::Identity,
        1 => maps.pop().unwrap(),
        _ => ForwardMap::Chain(maps),
    };
    let notes = format!("constant elimination in {passes} pass(es)");
    Ok(ReductionOutput {
        instance: current,
        forward_map: map,
        notes,
    })
}

fn eliminate_one_constant(
    instance: &Instance,
    target: &ConstraintLanguage,
    value: usize,
) -> Result<(Instance, ForwardMap)> {
    let d = instance.language().domain().size();
    let n = instance.variable_count();
    // The pass language keeps every constant other than the eliminated one.
    let mut pass_lang = target.clone();
    for (name, rel) in instance.language().relations() {
        if target.relation(name).is_none() {
            if let Some(v) = constant_value(instance, target, name) {
                if v != value {
                    pass_lang.add_relation(name.clone(), rel.clone())?;
                }
            }
        }
    }
    // Block sizes: eliminated value first with n^d, then the remaining
    // elements ascending with n^(d-1), n^(d-2), ...
    let order: Vec<usize> = std::iter::once(value)
        .chain((0..d).filter(|&e| e != value))
        .collect();
    let mut block_size = vec![0usize; d];
    for (i, &e) in order.iter().enumerate() {
        block_size[e] = n
            .checked_pow((d - i) as u32)
            .ok_or_else(|| Error::resource("constant gadget size overflows".to_string()))?;
    }
    let gadget_total: usize = block_size.iter().sum();
    let mut block_start = vec![0usize; d];
    {
        let mut acc = 0;
        for &e in &order {
            block_start[e] = acc;
            acc += block_size[e];
        }
    }
    let pinned_vars: BTreeSet<usize> = instance
        .constraints()
        .iter()
        .filter(|c| constant_value(instance, target, &c.relation) == Some(value))
        .flat_map(|c| c.scope.iter().copied())
        .collect();
    let kept: Vec<usize> = (0..n).filter(|v| !pinned_vars.contains(v)).collect();
    let remap: std::collections::BTreeMap<usize, usize> = kept
        .iter()
        .enumerate()
        .map(|(i, &v)| (v, gadget_total + i))
        .collect();
    let total_vars = gadget_total + kept.len();
    let mut out = Instance::new(pass_lang.clone(), total_vars);
    // Gadget wiring: every tuple of every pass-language relation across the
    // value blocks.
    for (name, rel) in pass_lang.relations() {
        for t in rel.tuples() {
            let choices: Vec<Vec<usize>> = t
                .iter()
                .map(|&e| (block_start[e]..block_start[e] + block_size[e]).collect())
                .collect();
            let mut scopes = Vec::new();
            cartesian(&choices, GENERATED_CONSTRAINT_CAP, |combo| {
                scopes.push(combo.to_vec());
            })?;
            for scope in scopes {
                out.add_constraint(name.clone(), scope)?;
            }
        }
    }
    for c in instance.constraints() {
        if constant_value(instance, target, &c.relation) == Some(value) {
            continue;
        }
        if c.scope.iter().all(|v| !pinned_vars.contains(v)) {
            let scope = c.scope.iter().map(|v| remap[v]).collect();
            out.add_constraint(c.relation.clone(), scope)?;
            continue;
        }
        // Re-scope pinned positions to every choice inside the eliminated
        // value's block.
        let choices: Vec<Vec<usize>> = c
            .scope
            .iter()
            .map(|&v| {
                if pinned_vars.contains(&v) {
                    (block_start[value]..block_start[value] + block_size[value]).collect()
                } else {
                    vec![remap[&v]]
                }
            })
            .collect();
        let mut scopes = Vec::new();
        cartesian(&choices, GENERATED_CONSTRAINT_CAP, |combo| {
            scopes.push(combo.to_vec());
        })?;
        for scope in scopes {
            out.add_constraint(c.relation.clone(), scope)?;
        }
    }
    let add: Vec<usize> = (0..d)
        .map(|e| {
            if e == value {
                block_size[e] - pinned_vars.len()
            } else {
                block_size[e]
            }
        })
        .collect();
    let map = ForwardMap::ConstantShift {
        add,
        eliminated: value,
        pinned: pinned_vars.len(),
    };
    if let Some(pi) = instance.cardinality() {
        if !map.feasibility_preserved(pi) {
            return Err(Error::arg(format!(
                "the cardinality vector budgets {} occurrences of element {} \
                 but {} variables are pinned to it; the instance is trivially \
                 infeasible and the gadget correspondence does not cover it",
                pi.get(value),
                value,
                pinned_vars.len()
            )));
        }
    }
    map_cardinality(&mut out, instance.cardinality(), &map)?;
    Ok((out, map))
}

/// A bipartite graph given by its two sides and the cross edges.
#[derive(Debug, Clone)]
pub struct BipartiteGraph {
    pub left: usize,
    pub right: usize,
    pub edges: Vec<(usize, usize)>,
}

impl BipartiteGraph {
    pub fn validate(&self) -> Result<()> {
        if self.left == 0 || self.right == 0 {
            return Err(Error::arg("both sides must be nonempty"));
        }
        for &(u, w) in &self.edges {
            if u >= self.left || w >= self.right {
                return Err(Error::arg(format!("edge ({u}, {w}) out of range")));
            }
        }
        for u in 0..self.left {
            if !self.edges.iter().any(|&(a, _)| a == u) {
                return Err(Error::arg(format!("left vertex {u} is isolated")));
            }
        }
        for w in 0..self.right {
            if !self.edges.iter().any(|&(_, b)| b == w) {
                return Err(Error::arg(format!("right vertex {w} is isolated")));
            }
        }
        Ok(())
    }

    pub fn vertex_count(&self) -> usize {
        self.left + self.right
    }
}

/// Exhaustive independent-set search: is there an independent set using
/// exactly `k1` left and `k2` right vertices?
pub fn bis_brute_force(graph: &BipartiteGraph, k1: usize, k2: usize) -> bool {
    let total = graph.vertex_count();
    for mask in 0u64..(1 << total) {
        let left_count = (0..graph.left).filter(|&v| mask & (1 << v) != 0).count();
        let right_count = (graph.left..total)
            .filter(|&v| mask & (1 << v) != 0)
            .count();
        if left_count != k1 || right_count != k2 {
            continue;
        }
        let independent = graph
            .edges
            .iter()
            .all(|&(u, w)| mask & (1 << u) == 0 || mask & (1 << (graph.left + w)) == 0);
        if independent {
            return true;
        }
    }
    false
}

/// Which construction of the independent-set reduction applies, per the
/// shape of the rectangularity witness.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BisCase {
    /// Four distinct witness elements; one constraint per edge.
    Case1,
    /// Three distinct elements with the selected right value outside the left
    /// projection; left vertices blow up into blocks.
    Case3a,
    /// Three distinct elements with the unselected right value outside the
    /// left projection and no tuple from `b` into a left value.
    Case3b,
}

/// Encodes an independent-set question as a cardinality CSP over a relation
/// with a rectangularity violation `(a,c),(a,d),(b,d)` in, `(b,c)` out. The
/// violation is recomputed from the relation and the side conditions of the
/// requested case are checked before building.
pub fn reduce_bis(
    graph: &BipartiteGraph,
    k1: usize,
    k2: usize,
    language: &ConstraintLanguage,
    relation: &str,
    case: BisCase,
) -> Result<ReductionOutput> {
    graph.validate()?;
    if k1 > graph.left || k2 > graph.right {
        return Err(Error::arg("targets exceed the side sizes"));
    }
    let rel = language
        .relation(relation)
        .ok_or_else(|| Error::arg(format!("unknown relation {relation:?}")))?;
    if rel.arity() != 2 {
        return Err(Error::arg("the reduction needs a binary relation"));
    }
    let violation = match rel.thick_mapping_decompose()? {
        ThickMappingCheck::Violation(v) => v,
        ThickMappingCheck::Witness(_) => {
            return Err(Error::arg(
                "the relation is a thick mapping; no witness exists",
            ))
        }
    };
    let (a, b, c, dd) = (violation.a, violation.b, violation.c, violation.d);
    let pr1 = rel.unary_projection(0)?;
    let pr2 = rel.unary_projection(1)?;
    let distinct: BTreeSet<usize> = [a, b, c, dd].into_iter().collect();
    let domain_size = language.domain().size();
    let mut counts = vec![0usize; domain_size];
    match case {
        BisCase::Case1 => {
            if distinct.len() != 4 {
                return Err(Error::arg("case 1 needs four distinct witness elements"));
            }
            if pr1 != BTreeSet::from([a, b]) || pr2 != BTreeSet::from([c, dd]) {
                return Err(Error::arg(
                    "case 1 needs projections {a,b} and {c,d} exactly",
                ));
            }
            if rel.len() != 3 {
                return Err(Error::arg("case 1 needs exactly the three witness tuples"));
            }
            counts[a] = graph.left - k1;
            counts[b] = k1;
            counts[c] = k2;
            counts[dd] = graph.right - k2;
            let mut out = Instance::new(language.clone(), graph.vertex_count());
            for &(u, w) in &graph.edges {
                out.add_constraint(relation.to_string(), vec![u, graph.left + w])?;
            }
            let pi = CardinalityVector::new(counts);
            out.set_cardinality(Some(pi.clone()))?;
            Ok(ReductionOutput {
                instance: out,
                forward_map: ForwardMap::Fixed(pi),
                notes: "independent-set encoding, one constraint per edge".into(),
            })
        }
        BisCase::Case3a | BisCase::Case3b => {
            if distinct.len() != 3 {
                return Err(Error::arg("case 3 needs exactly three distinct elements"));
            }
            if pr1 != BTreeSet::from([a, b]) {
                return Err(Error::arg("case 3 needs left projection {a, b}"));
            }
            match case {
                BisCase::Case3a => {
                    if c == a || c == b {
                        return Err(Error::arg(
                            "case 3a needs the selected right value outside {a, b}",
                        ));
                    }
                }
                BisCase::Case3b => {
                    if dd == a || dd == b {
                        return Err(Error::arg(
                            "case 3b needs the unselected right value outside {a, b}",
                        ));
                    }
                    for x in [a, b] {
                        if pr2.contains(&x) && rel.contains(&[b, x]) {
                            return Err(Error::arg(
                                "case 3b forbids tuples from b into the left values",
                            ));
                        }
                    }
                }
                BisCase::Case1 => unreachable!(),
            }
            // Left vertices become blocks of 2|V| copies; right vertices stay.
            let block = 2 * graph.vertex_count();
            let member = |u: usize, i: usize| u * block + i;
            let right_var = |w: usize| graph.left * block + w;
            let total_vars = graph.left * block + graph.right;
            let mut out = Instance::new(language.clone(), total_vars);
            for &(u, w) in &graph.edges {
                for i in 0..block {
                    out.add_constraint(relation.to_string(), vec![member(u, i), right_var(w)])?;
                }
            }
            match case {
                BisCase::Case3a => {
                    counts[c] = k2;
                    if dd == b {
                        counts[a] = (graph.left - k1) * block;
                        counts[b] = k1 * block + (graph.right - k2);
                    } else {
                        counts[a] = (graph.left - k1) * block + (graph.right - k2);
                        counts[b] = k1 * block;
                    }
                }
                BisCase::Case3b => {
                    counts[dd] = graph.right - k2;
                    if c == b {
                        counts[a] = (graph.left - k1) * block;
                        counts[b] = k1 * block + k2;
                    } else {
                        counts[a] = (graph.left - k1) * block + k2;
                        counts[b] = k1 * block;
                    }
                }
                BisCase::Case1 => unreachable!(),
            }
            let pi = CardinalityVector::new(counts);
            out.set_cardinality(Some(pi.clone()))?;
            Ok(ReductionOutput {
                instance: out,
                forward_map: ForwardMap::Fixed(pi),
                notes: format!("independent-set encoding with left blocks of size {block}"),
            })
        }
    }
}

/// Restricts a crossing pair of equivalence relations to a witness triple and
/// composes them, producing a binary relation that is provably not a thick
/// mapping.
pub fn crossing_to_nonthick(alpha: &Partition, beta: &Partition) -> Result<Relation> {
    let Some((block_c, block_b)) = alpha.crossing_witness(beta)? else {
        return Err(Error::arg("the partitions do not cross"));
    };
    let a = *block_c.difference(&block_b).next().unwrap();
    let c = *block_c.intersection(&block_b).next().unwrap();
    let b = *block_b.difference(&block_c).next().unwrap();
    let triple = BTreeSet::from([a, b, c]);
    let alpha_r = alpha.to_relation().restrict(&triple);
    let beta_r = beta.to_relation().restrict(&triple);
    let composed = alpha_r.compose(&beta_r)?;
    match composed.thick_mapping_decompose()? {
        ThickMappingCheck::Violation(_) => Ok(composed),
        ThickMappingCheck::Witness(_) => Err(Error::invariant(
            "composition of a crossing pair decomposed as a thick mapping",
        )),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::DomainSpec;
    use crate::oracle::brute_force_count;

    fn domain(d: usize) -> DomainSpec {
        DomainSpec::new(d).unwrap()
    }

    /// Every vector with the given total over d elements.
    fn all_vectors(d: usize, total: usize) -> Vec<CardinalityVector> {
        fn rec(d: usize, total: usize, prefix: &mut Vec<usize>, out: &mut Vec<CardinalityVector>) {
            if prefix.len() == d - 1 {
                prefix.push(total);
                out.push(CardinalityVector::new(prefix.clone()));
                prefix.pop();
                return;
            }
            for c in 0..=total {
                prefix.push(c);
                rec(d, total - c, prefix, out);
                prefix.pop();
            }
        }
        let mut out = Vec::new();
        rec(d, total, &mut Vec::new(), &mut out);
        out
    }

    /// Feasibility must correspond under the forward map for every vector of
    /// the right total.
    fn assert_equivalent(original: &Instance, reduced: &ReductionOutput, cap: usize) {
        let d = original.language().domain().size();
        let base = brute_force_count(original, cap).unwrap();
        let image = brute_force_count(&reduced.instance, cap).unwrap();
        for pi in all_vectors(d, original.variable_count()) {
            let mapped = reduced.forward_map.apply(&pi).unwrap();
            assert_eq!(
                mapped.total(),
                reduced.instance.variable_count(),
                "totals must transfer"
            );
            let feasible_before = base.get(&pi) > 0u32.into();
            if !reduced.forward_map.feasibility_preserved(&pi) {
                assert!(!feasible_before, "uncovered vector {pi} must be infeasible");
                continue;
            }
            let feasible_after = image.get(&mapped) > 0u32.into();
            assert_eq!(feasible_before, feasible_after, "vector {pi}");
        }
    }

    fn sub_language() -> ConstraintLanguage {
        let mut lang = ConstraintLanguage::new(domain(2));
        lang.add_relation("eq", Relation::equality(2)).unwrap();
        lang
    }

    fn parent_language() -> ConstraintLanguage {
        let mut lang = ConstraintLanguage::new(domain(3));
        lang.add_relation("eq", Relation::equality(3)).unwrap();
        lang
    }

    #[test]
    fn restriction_extends_by_zeros() {
        let mut p = Instance::new(sub_language(), 2);
        p.add_constraint("eq", vec![0, 1]).unwrap();
        p.set_cardinality(Some(CardinalityVector::new(vec![1, 1])))
            .unwrap();
        let out = reduce_restriction(&p, &parent_language()).unwrap();
        assert_eq!(out.instance.cardinality().unwrap().counts(), &[1, 1, 0]);
        assert_equivalent(&p, &out, 1 << 16);
    }

    #[test]
    fn restriction_with_identical_domain_keeps_constraints() {
        let mut p = Instance::new(sub_language(), 2);
        p.add_constraint("eq", vec![0, 1]).unwrap();
        let out = reduce_restriction(&p, &sub_language()).unwrap();
        assert_eq!(out.instance.constraints(), p.constraints());
    }

    #[test]
    fn restriction_rejects_mismatched_relations() {
        let mut bad_parent = ConstraintLanguage::new(domain(3));
        bad_parent
            .add_relation("eq", Relation::new(2, vec![vec![0, 0], vec![2, 2]]).unwrap())
            .unwrap();
        let mut p = Instance::new(sub_language(), 2);
        p.add_constraint("eq", vec![0, 1]).unwrap();
        assert!(reduce_restriction(&p, &bad_parent).is_err());
    }

    fn conjunction_language() -> ConstraintLanguage {
        let mut lang = ConstraintLanguage::new(domain(2));
        let eq = Relation::equality(2);
        let zero_first = Relation::new(2, vec![vec![0, 0], vec![0, 1]]).unwrap();
        let conj = eq.intersect(&zero_first).unwrap();
        lang.add_relation("eq", eq).unwrap();
        lang.add_relation("zf", zero_first).unwrap();
        lang.add_relation("both", conj).unwrap();
        lang
    }

    #[test]
    fn conjunction_splits_constraints() {
        let mut p = Instance::new(conjunction_language(), 3);
        p.add_constraint("both", vec![0, 1]).unwrap();
        p.add_constraint("eq", vec![1, 2]).unwrap();
        let out = reduce_pp_conjunction(&p, "both", "eq", "zf").unwrap();
        assert_eq!(out.instance.constraints().len(), 3);
        assert!(out.instance.language().relation("both").is_none());
        assert_equivalent(&p, &out, 1 << 16);
    }

    #[test]
    fn conjunction_with_a_unary_conjunct_pads() {
        let mut lang = ConstraintLanguage::new(domain(2));
        lang.add_relation("eq", Relation::equality(2)).unwrap();
        lang.add_relation("zero", Relation::new(1, vec![vec![0]]).unwrap())
            .unwrap();
        lang.add_relation("eqz", Relation::new(2, vec![vec![0, 0]]).unwrap())
            .unwrap();
        let mut p = Instance::new(lang, 2);
        p.add_constraint("eqz", vec![0, 1]).unwrap();
        let out = reduce_pp_conjunction(&p, "eqz", "eq", "zero").unwrap();
        assert_equivalent(&p, &out, 1 << 16);
    }

    #[test]
    fn conjunction_rejects_a_false_definition() {
        let mut p = Instance::new(conjunction_language(), 2);
        p.add_constraint("eq", vec![0, 1]).unwrap();
        assert!(reduce_pp_conjunction(&p, "eq", "zf", "zf").is_err());
    }

    fn exists_language() -> ConstraintLanguage {
        let mut lang = ConstraintLanguage::new(domain(2));
        // wider(x, y) holds only at (0, 1); defined(x) = 'there is y' = {0}.
        lang.add_relation("wider", Relation::new(2, vec![vec![0, 1]]).unwrap())
            .unwrap();
        lang.add_relation("defined", Relation::new(1, vec![vec![0]]).unwrap())
            .unwrap();
        lang.add_relation("eq", Relation::equality(2)).unwrap();
        lang
    }

    #[test]
    fn exists_reduction_sizes_and_map() {
        let mut p = Instance::new(exists_language(), 2);
        p.add_constraint("defined", vec![0]).unwrap();
        p.add_constraint("eq", vec![0, 1]).unwrap();
        p.set_cardinality(Some(CardinalityVector::new(vec![1, 1])))
            .unwrap();
        let out = reduce_pp_exists(&p, "defined", "wider").unwrap();
        // q=1, d=2: blocks of 2 per variable, 1 witness, 1 padding variable.
        assert_eq!(out.instance.variable_count(), 1 * 2 * 2 + 1 * 2);
        assert_eq!(out.instance.cardinality().unwrap().counts(), &[3, 3]);
        assert_equivalent(&p, &out, 1 << 16);
    }

    #[test]
    fn exists_reduction_requires_a_defining_constraint() {
        let mut p = Instance::new(exists_language(), 2);
        p.add_constraint("eq", vec![0, 1]).unwrap();
        assert!(reduce_pp_exists(&p, "defined", "wider").is_err());
    }

    fn constants_language() -> (ConstraintLanguage, ConstraintLanguage) {
        let mut target = ConstraintLanguage::new(domain(2));
        target.add_relation("eq", Relation::equality(2)).unwrap();
        let mut with_constants = ConstraintLanguage::new(domain(2));
        with_constants
            .add_relation("eq", Relation::equality(2))
            .unwrap();
        with_constants
            .add_relation("pin0", Relation::new(1, vec![vec![0]]).unwrap())
            .unwrap();
        (target, with_constants)
    }

    #[test]
    fn constants_gadget_sizes_and_map() {
        let (target, lang) = constants_language();
        let mut p = Instance::new(lang, 3);
        p.add_constraint("eq", vec![0, 1]).unwrap();
        p.add_constraint("pin0", vec![2]).unwrap();
        p.set_cardinality(Some(CardinalityVector::new(vec![2, 1])))
            .unwrap();
        let out = reduce_constants(&p, &target).unwrap();
        // d=2, n=3: blocks of 9 (for value 0) and 3; one pinned variable.
        assert_eq!(out.instance.variable_count(), 9 + 3 + 2);
        assert_eq!(
            out.instance.cardinality().unwrap().counts(),
            &[2 + 9 - 1, 1 + 3]
        );
        assert_equivalent(&p, &out, 1 << 16);
    }

    #[test]
    fn constants_refuse_underbudgeted_vectors() {
        // One variable pinned to 1 while the vector allows zero occurrences:
        // trivially infeasible, and outside the gadget correspondence.
        let (target, lang) = constants_language();
        let mut p = Instance::new(lang, 3);
        let pin1 = Relation::new(1, vec![vec![1]]).unwrap();
        let mut lang1 = p.language().clone();
        lang1.add_relation("pin1", pin1).unwrap();
        let mut p = Instance::new(lang1, 3);
        p.add_constraint("eq", vec![0, 1]).unwrap();
        p.add_constraint("pin1", vec![2]).unwrap();
        p.set_cardinality(Some(CardinalityVector::new(vec![3, 0])))
            .unwrap();
        assert!(reduce_constants(&p, &target).is_err());
        // Without an embedded vector the transformer runs and the map records
        // the guarantee boundary.
        p.set_cardinality(None).unwrap();
        let out = reduce_constants(&p, &target).unwrap();
        assert!(!out
            .forward_map
            .feasibility_preserved(&CardinalityVector::new(vec![3, 0])));
        assert!(out
            .forward_map
            .feasibility_preserved(&CardinalityVector::new(vec![2, 1])));
    }

    #[test]
    fn constants_without_pins_changes_nothing() {
        let (target, lang) = constants_language();
        let mut p = Instance::new(lang, 2);
        p.add_constraint("eq", vec![0, 1]).unwrap();
        let out = reduce_constants(&p, &target).unwrap();
        assert_eq!(out.instance.variable_count(), 2);
        assert_eq!(out.forward_map, ForwardMap::Identity);
    }

    fn bis_case1_language() -> ConstraintLanguage {
        // Elements a=0, b=1, c=2, d=3.
        let mut lang = ConstraintLanguage::new(domain(4));
        lang.add_relation(
            "r",
            Relation::new(2, vec![vec![0, 2], vec![0, 3], vec![1, 3]]).unwrap(),
        )
        .unwrap();
        lang
    }

    #[test]
    fn bis_case1_single_edge() {
        let lang = bis_case1_language();
        let g = BipartiteGraph {
            left: 1,
            right: 1,
            edges: vec![(0, 0)],
        };
        // Selecting both endpoints is excluded by the missing tuple.
        let out = reduce_bis(&g, 1, 1, &lang, "r", BisCase::Case1).unwrap();
        let counts = brute_force_count(&out.instance, 1 << 16).unwrap();
        assert_eq!(counts.get(out.instance.cardinality().unwrap()), 0u32.into());
        assert!(!bis_brute_force(&g, 1, 1));
        // One endpoint is fine.
        let out = reduce_bis(&g, 1, 0, &lang, "r", BisCase::Case1).unwrap();
        let counts = brute_force_count(&out.instance, 1 << 16).unwrap();
        assert!(counts.get(out.instance.cardinality().unwrap()) > 0u32.into());
        assert!(bis_brute_force(&g, 1, 0));
    }

    #[test]
    fn bis_case_side_conditions_are_checked() {
        let lang = bis_case1_language();
        let g = BipartiteGraph {
            left: 1,
            right: 1,
            edges: vec![(0, 0)],
        };
        assert!(reduce_bis(&g, 1, 1, &lang, "r", BisCase::Case3a).is_err());
        let isolated = BipartiteGraph {
            left: 2,
            right: 1,
            edges: vec![(0, 0)],
        };
        assert!(reduce_bis(&isolated, 1, 1, &lang, "r", BisCase::Case1).is_err());
    }

    #[test]
    fn crossing_pair_composes_to_the_eight_pair_relation() {
        let alpha = Partition::new(vec![BTreeSet::from([0, 2]), BTreeSet::from([1])]).unwrap();
        let beta = Partition::new(vec![BTreeSet::from([0]), BTreeSet::from([1, 2])]).unwrap();
        let r = crossing_to_nonthick(&alpha, &beta).unwrap();
        let expected = Relation::new(
            2,
            vec![
                vec![0, 0],
                vec![1, 1],
                vec![2, 2],
                vec![0, 2],
                vec![2, 0],
                vec![1, 2],
                vec![2, 1],
                vec![0, 1],
            ],
        )
        .unwrap();
        assert_eq!(r, expected);
        // (1,0) is the missing pair behind the violation.
        assert!(!r.contains(&[1, 0]));
        assert!(r.contains(&[1, 1]) && r.contains(&[0, 1]) && r.contains(&[0, 0]));
    }

    #[test]
    fn non_crossing_inputs_are_rejected() {
        let alpha = Partition::new(vec![BTreeSet::from([0, 1]), BTreeSet::from([2])]).unwrap();
        assert!(crossing_to_nonthick(&alpha, &alpha).is_err());
    }
}
