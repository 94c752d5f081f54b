//! Tractability classification: a constraint language admits the polynomial
//! solver exactly when it has a conservative majority and a conservative
//! minority polymorphism. Both searches run as deterministic backtracking
//! over the table entries with pairwise-distinct arguments (conservativity
//! leaves three candidates per entry; the identity equations fix every other
//! entry), with incremental pruning against the language's relations.
//!
//! Also provides the construction of a majority/minority pair from a family
//! of equivalence relations, and a bounded closure scan that can certify
//! hardness by exhibiting a crossing pair of definable equivalence relations.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use crate::domain::DomainSpec;
use crate::error::{Error, Result};
use crate::language::ConstraintLanguage;
use crate::partition::Partition;
use crate::relation::{Relation, Tuple};

/// A total ternary operation on `0..d`, tabulated row-major by `(x, y, z)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TernaryOperation {
    d: usize,
    table: Vec<usize>,
}

impl TernaryOperation {
    pub fn from_fn(d: usize, f: impl Fn(usize, usize, usize) -> usize) -> TernaryOperation {
        let mut table = Vec::with_capacity(d * d * d);
        for x in 0..d {
            for y in 0..d {
                for z in 0..d {
                    table.push(f(x, y, z));
                }
            }
        }
        TernaryOperation { d, table }
    }

    pub fn from_table(d: usize, table: Vec<usize>) -> Result<TernaryOperation> {
        if table.len() != d * d * d || table.iter().any(|&v| v >= d) {
            return Err(Error::arg("malformed ternary operation table"));
        }
        Ok(TernaryOperation { d, table })
    }

    pub fn domain_size(&self) -> usize {
        self.d
    }

    pub fn table(&self) -> &[usize] {
        &self.table
    }

    #[inline]
    pub fn apply(&self, x: usize, y: usize, z: usize) -> usize {
        self.table[(x * self.d + y) * self.d + z]
    }

    pub fn is_conservative(&self) -> bool {
        let d = self.d;
        (0..d * d * d).all(|i| {
            let (x, y, z) = (i / (d * d), (i / d) % d, i % d);
            let v = self.table[i];
            v == x || v == y || v == z
        })
    }

    /// `f(x,x,y) = f(x,y,x) = f(y,x,x) = x` for all `x, y`.
    pub fn is_majority(&self) -> bool {
        (0..self.d).all(|x| {
            (0..self.d).all(|y| {
                self.apply(x, x, y) == x && self.apply(x, y, x) == x && self.apply(y, x, x) == x
            })
        })
    }

    /// `f(x,x,y) = f(x,y,x) = f(y,x,x) = y` for all `x, y`.
    pub fn is_minority(&self) -> bool {
        (0..self.d).all(|x| {
            (0..self.d).all(|y| {
                self.apply(x, x, y) == y && self.apply(x, y, x) == y && self.apply(y, x, x) == y
            })
        })
    }

    /// Componentwise application to three tuples of equal arity.
    pub fn apply_tuples(&self, a: &[usize], b: &[usize], c: &[usize]) -> Tuple {
        a.iter()
            .zip(b)
            .zip(c)
            .map(|((&x, &y), &z)| self.apply(x, y, z))
            .collect()
    }

    /// `op <name> arity 3` block with one `x y z value` line per entry.
    pub fn to_text(&self, name: &str, domain: &DomainSpec) -> String {
        let mut out = format!("op {} arity 3\n", name);
        for x in 0..self.d {
            for y in 0..self.d {
                for z in 0..self.d {
                    let _ = writeln!(
                        out,
                        "{} {} {} {}",
                        domain.label(x),
                        domain.label(y),
                        domain.label(z),
                        domain.label(self.apply(x, y, z))
                    );
                }
            }
        }
        out.push_str("end\n");
        out
    }
}

/// Counterexample returned when an operation fails to preserve a relation:
/// three rows of the relation whose componentwise image is outside it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolymorphismViolation {
    pub relation: String,
    pub rows: [Tuple; 3],
    pub image: Tuple,
}

/// Checks whether `f` preserves every relation of the language; on failure
/// returns the first violating row triple in deterministic order.
pub fn check_polymorphism(
    f: &TernaryOperation,
    language: &ConstraintLanguage,
) -> Option<PolymorphismViolation> {
    for (name, rel) in language.relations() {
        let tuples: Vec<&Tuple> = rel.tuples().collect();
        for a in &tuples {
            for b in &tuples {
                for c in &tuples {
                    let image = f.apply_tuples(a, b, c);
                    if !rel.contains(&image) {
                        return Some(PolymorphismViolation {
                            relation: name.clone(),
                            rows: [(*a).clone(), (*b).clone(), (*c).clone()],
                            image,
                        });
                    }
                }
            }
        }
    }
    None
}

pub fn is_polymorphism(f: &TernaryOperation, language: &ConstraintLanguage) -> bool {
    check_polymorphism(f, language).is_none()
}

/// Which identity family a search target satisfies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum OperationKind {
    Majority,
    Minority,
}

impl OperationKind {
    /// Table value forced by the identities on entries with a repeated
    /// argument; `None` on pairwise-distinct entries.
    fn forced(self, x: usize, y: usize, z: usize) -> Option<usize> {
        match self {
            OperationKind::Majority => {
                if x == y || x == z {
                    Some(x)
                } else if y == z {
                    Some(y)
                } else {
                    None
                }
            }
            OperationKind::Minority => {
                if x == y && y == z {
                    Some(x)
                } else if x == y {
                    Some(z)
                } else if x == z {
                    Some(y)
                } else if y == z {
                    Some(x)
                } else {
                    None
                }
            }
        }
    }
}

/// Node budget for the backtracking searches.
#[derive(Debug, Clone, Copy)]
pub struct SearchLimits {
    pub node_limit: usize,
}

impl Default for SearchLimits {
    fn default() -> Self {
        SearchLimits {
            node_limit: 1 << 20,
        }
    }
}

/// One preservation constraint: a row triple of a relation. Coordinate `i`
/// of the image is either identity-forced (`Err(value)`) or a free table
/// entry (`Ok(index)`); the image must land inside the relation.
struct RowTriple {
    relation: usize,
    coords: Vec<std::result::Result<usize, usize>>,
}

struct Search<'a> {
    d: usize,
    relations: Vec<&'a Relation>,
    free_entries: Vec<(usize, usize, usize)>,
    free_index: BTreeMap<(usize, usize, usize), usize>,
    triples: Vec<RowTriple>,
    /// For each free entry, the row triples that mention it.
    watchers: Vec<Vec<usize>>,
    assignment: Vec<Option<usize>>,
    nodes: usize,
    node_limit: usize,
}

impl<'a> Search<'a> {
    fn new(
        language: &'a ConstraintLanguage,
        kind: OperationKind,
        limits: SearchLimits,
    ) -> Search<'a> {
        let d = language.domain().size();
        let mut free_entries = Vec::new();
        let mut free_index = BTreeMap::new();
        for x in 0..d {
            for y in 0..d {
                for z in 0..d {
                    if kind.forced(x, y, z).is_none() {
                        free_index.insert((x, y, z), free_entries.len());
                        free_entries.push((x, y, z));
                    }
                }
            }
        }
        let relations: Vec<&Relation> = language.relations().map(|(_, r)| r).collect();
        let mut triples = Vec::new();
        let mut watchers = vec![Vec::new(); free_entries.len()];
        for (ri, rel) in relations.iter().enumerate() {
            let tuples: Vec<&Tuple> = rel.tuples().collect();
            for a in &tuples {
                for b in &tuples {
                    for c in &tuples {
                        let coords: Vec<std::result::Result<usize, usize>> = (0..rel.arity())
                            .map(|i| {
                                let key = (a[i], b[i], c[i]);
                                match free_index.get(&key) {
                                    Some(&fi) => Ok(fi),
                                    None => Err(kind.forced(a[i], b[i], c[i]).unwrap()),
                                }
                            })
                            .collect();
                        let idx = triples.len();
                        for coord in &coords {
                            if let Ok(fi) = coord {
                                if watchers[*fi].last() != Some(&idx) {
                                    watchers[*fi].push(idx);
                                }
                            }
                        }
                        triples.push(RowTriple {
                            relation: ri,
                            coords,
                        });
                    }
                }
            }
        }
        Search {
            d,
            relations,
            free_entries,
            free_index,
            triples,
            watchers,
            assignment: Vec::new(),
            nodes: 0,
            node_limit: limits.node_limit,
        }
    }

    /// A row triple is satisfiable if some tuple of its relation matches every
    /// decided coordinate exactly and keeps each undecided coordinate within
    /// its three conservative candidates. Per-coordinate, hence incomplete as
    /// a pruning rule; leaves are certified separately.
    fn triple_satisfiable(&self, t: &RowTriple) -> bool {
        let rel = self.relations[t.relation];
        'tuples: for tuple in rel.tuples() {
            for (i, coord) in t.coords.iter().enumerate() {
                match coord {
                    Err(v) => {
                        if tuple[i] != *v {
                            continue 'tuples;
                        }
                    }
                    Ok(fi) => match self.assignment[*fi] {
                        Some(v) => {
                            if tuple[i] != v {
                                continue 'tuples;
                            }
                        }
                        None => {
                            let (x, y, z) = self.free_entries[*fi];
                            if tuple[i] != x && tuple[i] != y && tuple[i] != z {
                                continue 'tuples;
                            }
                        }
                    },
                }
            }
            return true;
        }
        false
    }

    fn run(&mut self, kind: OperationKind) -> Result<Option<TernaryOperation>> {
        self.assignment = vec![None; self.free_entries.len()];
        // Triples decided by the identities alone must hold outright.
        for t in 0..self.triples.len() {
            if self.triples[t].coords.iter().all(|c| c.is_err())
                && !self.triple_satisfiable(&self.triples[t])
            {
                return Ok(None);
            }
        }
        if !self.dfs(0)? {
            return Ok(None);
        }
        let table = TernaryOperation::from_fn(self.d, |x, y, z| match kind.forced(x, y, z) {
            Some(v) => v,
            None => self.assignment[self.free_index[&(x, y, z)]].unwrap(),
        });
        Ok(Some(table))
    }

    fn dfs(&mut self, next: usize) -> Result<bool> {
        if next == self.free_entries.len() {
            return Ok(true);
        }
        let (x, y, z) = self.free_entries[next];
        for value in [x, y, z] {
            self.nodes += 1;
            if self.nodes > self.node_limit {
                return Err(Error::resource(format!(
                    "polymorphism search exceeded {} nodes; result inconclusive",
                    self.node_limit
                )));
            }
            self.assignment[next] = Some(value);
            let consistent = self.watchers[next]
                .iter()
                .all(|&t| self.triple_satisfiable(&self.triples[t]));
            if consistent && self.dfs(next + 1)? {
                return Ok(true);
            }
        }
        self.assignment[next] = None;
        Ok(false)
    }
}

fn find_conservative(
    language: &ConstraintLanguage,
    kind: OperationKind,
    limits: SearchLimits,
) -> Result<Option<TernaryOperation>> {
    let found = Search::new(language, kind, limits).run(kind)?;
    if let Some(op) = &found {
        let ok = op.is_conservative()
            && match kind {
                OperationKind::Majority => op.is_majority(),
                OperationKind::Minority => op.is_minority(),
            }
            && is_polymorphism(op, language);
        if !ok {
            return Err(Error::invariant(
                "polymorphism search produced an unverified operation",
            ));
        }
    }
    Ok(found)
}

/// Deterministic backtracking search for a conservative majority polymorphism.
/// `Ok(None)` means none exists; a node-limit overrun surfaces as a resource
/// error, never as absence.
pub fn find_conservative_majority(
    language: &ConstraintLanguage,
    limits: SearchLimits,
) -> Result<Option<TernaryOperation>> {
    find_conservative(language, OperationKind::Majority, limits)
}

/// As [`find_conservative_majority`], for the minority identities.
pub fn find_conservative_minority(
    language: &ConstraintLanguage,
    limits: SearchLimits,
) -> Result<Option<TernaryOperation>> {
    find_conservative(language, OperationKind::Minority, limits)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Tractable,
    Hard,
    /// A search hit its node limit; no verdict was established.
    Inconclusive,
}

#[derive(Debug, Clone)]
pub struct ClassificationResult {
    pub verdict: Verdict,
    pub majority: Option<TernaryOperation>,
    pub minority: Option<TernaryOperation>,
    /// Which search failed, when hard or inconclusive.
    pub hard_reason: Option<String>,
}

/// Decides the dichotomy for a language: tractable iff both a conservative
/// majority and a conservative minority polymorphism exist, both returned
/// verified. Node-limit overruns are reported as `Inconclusive`, never as
/// hardness.
pub fn classify(language: &ConstraintLanguage, limits: SearchLimits) -> ClassificationResult {
    let majority = match find_conservative_majority(language, limits) {
        Ok(Some(m)) => m,
        Ok(None) => {
            return ClassificationResult {
                verdict: Verdict::Hard,
                majority: None,
                minority: None,
                hard_reason: Some("no conservative majority polymorphism exists".into()),
            }
        }
        Err(_) => {
            return ClassificationResult {
                verdict: Verdict::Inconclusive,
                majority: None,
                minority: None,
                hard_reason: Some("majority search hit its node limit".into()),
            }
        }
    };
    let minority = match find_conservative_minority(language, limits) {
        Ok(Some(h)) => h,
        Ok(None) => {
            return ClassificationResult {
                verdict: Verdict::Hard,
                majority: Some(majority),
                minority: None,
                hard_reason: Some("no conservative minority polymorphism exists".into()),
            }
        }
        Err(_) => {
            return ClassificationResult {
                verdict: Verdict::Inconclusive,
                majority: Some(majority),
                minority: None,
                hard_reason: Some("minority search hit its node limit".into()),
            }
        }
    };
    ClassificationResult {
        verdict: Verdict::Tractable,
        majority: Some(majority),
        minority: Some(minority),
        hard_reason: None,
    }
}

/// `major(a,b,c)`: `a` when all equal or all distinct, otherwise the value
/// appearing more than once.
fn major(a: usize, b: usize, c: usize) -> usize {
    if a == b || a == c {
        a
    } else if b == c {
        b
    } else {
        a
    }
}

/// `minor(a,b,c)`: `a` when all equal or all distinct, otherwise the value
/// appearing exactly once.
fn minor(a: usize, b: usize, c: usize) -> usize {
    if a == b && b == c {
        a
    } else if a == b {
        c
    } else if a == c {
        b
    } else if b == c {
        a
    } else {
        a
    }
}

/// The split predicate `(a|bc)` against a family of equivalence relations:
/// some member's carrier contains all three elements, with `b` and `c` in one
/// block and `a` in a different one.
fn split(eqrels: &[Partition], a: usize, b: usize, c: usize) -> bool {
    eqrels.iter().any(|p| {
        let carrier = p.carrier();
        carrier.contains(&a)
            && carrier.contains(&b)
            && carrier.contains(&c)
            && p.same_block(b, c)
            && !p.same_block(a, b)
    })
}

/// Builds the canonical majority/minority pair from a family of equivalence
/// relations over subsets of `0..d`. Requires that on every triple at most
/// one of the three split predicates holds; violations are reported with the
/// offending triple.
pub fn build_mh_from_equivalences(
    eqrels: &[Partition],
    d: usize,
) -> Result<(TernaryOperation, TernaryOperation)> {
    for a in 0..d {
        for b in a + 1..d {
            for c in b + 1..d {
                let count = [
                    split(eqrels, a, b, c),
                    split(eqrels, b, a, c),
                    split(eqrels, c, a, b),
                ]
                .iter()
                .filter(|&&t| t)
                .count();
                if count > 1 {
                    return Err(Error::arg(format!(
                        "more than one split predicate holds on the triple ({a}, {b}, {c})"
                    )));
                }
            }
        }
    }
    let m = TernaryOperation::from_fn(d, |a, b, c| {
        if split(eqrels, a, b, c) {
            b
        } else if split(eqrels, b, a, c) {
            a
        } else if split(eqrels, c, a, b) {
            b
        } else {
            major(a, b, c)
        }
    });
    let h = TernaryOperation::from_fn(d, |a, b, c| {
        if split(eqrels, a, b, c) {
            a
        } else if split(eqrels, b, a, c) {
            b
        } else if split(eqrels, c, a, b) {
            c
        } else {
            minor(a, b, c)
        }
    });
    Ok((m, h))
}

/// Result of [`bounded_crossing_scan`].
#[derive(Debug, Clone)]
pub struct CrossingScan {
    /// A crossing pair of equivalence relations found in the bounded closure,
    /// with the crossing block pair. Presence certifies hardness; absence
    /// certifies nothing.
    pub witness: Option<(Partition, Partition, (BTreeSet<usize>, BTreeSet<usize>))>,
    /// Whether the closure stabilized within the budget.
    pub fixed_point_reached: bool,
    pub relations_explored: usize,
}

const SCAN_RELATION_CAP: usize = 20_000;

/// Binary projections of a relation, with every subset of the remaining
/// coordinates optionally pinned to a concrete value before projecting.
/// Pinning corresponds to definability with constants, which is licensed by
/// the constant-elimination reduction and strictly enlarges the witness set.
fn projection_seeds(rel: &Relation, d: usize, out: &mut BTreeSet<Relation>) {
    let arity = rel.arity();
    for i in 0..arity {
        for j in i + 1..arity {
            let others: Vec<usize> = (0..arity).filter(|&k| k != i && k != j).collect();
            // Odometer over {free, 0, .., d-1} per remaining coordinate.
            let mut choice = vec![0usize; others.len()];
            'fixings: loop {
                let mut tuples = BTreeSet::new();
                'tuple: for t in rel.tuples() {
                    for (oi, &k) in others.iter().enumerate() {
                        if choice[oi] > 0 && t[k] != choice[oi] - 1 {
                            continue 'tuple;
                        }
                    }
                    tuples.insert(vec![t[i], t[j]]);
                }
                if !tuples.is_empty() {
                    out.insert(Relation::new(2, tuples).expect("binary projection"));
                }
                let mut k = others.len();
                loop {
                    if k == 0 {
                        break 'fixings;
                    }
                    k -= 1;
                    choice[k] += 1;
                    if choice[k] <= d {
                        break;
                    }
                    choice[k] = 0;
                }
            }
        }
    }
}

/// Grows a pool of binary relations from the language's (constant-restricted)
/// binary projections under inverse, composition, pairwise intersection and
/// restriction to unary projections of pool members, for at most `budget`
/// rounds, then scans the pool for a crossing pair of equivalence relations.
///
/// The scan is sound but incomplete: no terminating procedure enumerates
/// every definable equivalence relation, so an absent witness proves nothing.
pub fn bounded_crossing_scan(language: &ConstraintLanguage, budget: usize) -> CrossingScan {
    let d = language.domain().size();
    let mut pool: BTreeSet<Relation> = BTreeSet::new();
    for (_, rel) in language.relations() {
        if rel.arity() >= 2 {
            projection_seeds(rel, d, &mut pool);
        }
    }
    let mut fixed_point = false;
    for _ in 0..budget {
        if pool.len() > SCAN_RELATION_CAP {
            break;
        }
        let mut fresh: BTreeSet<Relation> = BTreeSet::new();
        let members: Vec<Relation> = pool.iter().cloned().collect();
        let mut unary: BTreeSet<BTreeSet<usize>> = BTreeSet::new();
        for r in &members {
            unary.insert(r.unary_projection(0).expect("binary"));
            unary.insert(r.unary_projection(1).expect("binary"));
        }
        for r in &members {
            fresh.insert(r.inverse().expect("binary"));
            for u in &unary {
                let restricted = r.restrict(u);
                if !restricted.is_empty() {
                    fresh.insert(restricted);
                }
            }
            for q in &members {
                let comp = r.compose(q).expect("binary");
                if !comp.is_empty() {
                    fresh.insert(comp);
                }
                let inter = r.intersect(q).expect("binary");
                if !inter.is_empty() {
                    fresh.insert(inter);
                }
            }
        }
        let before = pool.len();
        pool.extend(fresh);
        if pool.len() == before {
            fixed_point = true;
            break;
        }
    }
    let partitions: Vec<Partition> = pool.iter().filter_map(|r| r.as_partition()).collect();
    let mut witness = None;
    'outer: for (i, alpha) in partitions.iter().enumerate() {
        for beta in partitions.iter().skip(i + 1) {
            if alpha.carrier() != beta.carrier() {
                continue;
            }
            if let Ok(Some(blocks)) = alpha.crossing_witness(beta) {
                witness = Some((alpha.clone(), beta.clone(), blocks));
                break 'outer;
            }
        }
    }
    CrossingScan {
        witness,
        fixed_point_reached: fixed_point,
        relations_explored: pool.len(),
    }
}
