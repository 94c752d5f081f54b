//! Ground truth at desk scale: exhaustive enumeration of all assignments,
//! a seeded generator of (optionally guaranteed-tractable) languages and
//! instances, and the cross-validation harness the tests anchor on.

use std::collections::BTreeSet;

use num_bigint::BigUint;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::cardinality::{CardinalityVector, CountMap};
use crate::classifier::TernaryOperation;
use crate::domain::DomainSpec;
use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::language::ConstraintLanguage;
use crate::relation::Relation;

pub const DEFAULT_ENUMERATION_CAP: usize = 10_000_000;

/// Enumerates every assignment, tests every constraint directly, and buckets
/// solutions by their value histogram. Correct by construction; every other
/// counting path is validated against this one.
pub fn brute_force_count(instance: &Instance, cap: usize) -> Result<CountMap> {
    let n = instance.variable_count();
    let d = instance.language().domain().size();
    if d.checked_pow(n as u32).filter(|&s| s <= cap).is_none() {
        return Err(Error::resource(format!(
            "assignment space {d}^{n} exceeds cap {cap}"
        )));
    }
    let mut out = CountMap::new();
    let mut assignment = vec![0usize; n];
    loop {
        if instance.satisfies(&assignment) {
            out.add_count(
                CardinalityVector::of_assignment(d, &assignment),
                BigUint::from(1u32),
            );
        }
        let mut i = n;
        loop {
            if i == 0 {
                return Ok(out);
            }
            i -= 1;
            assignment[i] += 1;
            if assignment[i] < d {
                break;
            }
            assignment[i] = 0;
        }
    }
}

/// All satisfying assignments, in odometer order.
pub fn enumerate_solutions(instance: &Instance, cap: usize) -> Result<Vec<Vec<usize>>> {
    let n = instance.variable_count();
    let d = instance.language().domain().size();
    if d.checked_pow(n as u32).filter(|&s| s <= cap).is_none() {
        return Err(Error::resource(format!(
            "assignment space {d}^{n} exceeds cap {cap}"
        )));
    }
    let mut out = Vec::new();
    let mut assignment = vec![0usize; n];
    loop {
        if instance.satisfies(&assignment) {
            out.push(assignment.clone());
        }
        let mut i = n;
        loop {
            if i == 0 {
                return Ok(out);
            }
            i -= 1;
            assignment[i] += 1;
            if assignment[i] < d {
                break;
            }
            assignment[i] = 0;
        }
    }
}

#[derive(Debug, Clone)]
pub struct GeneratorConfig {
    pub seed: u64,
    pub domain_size: usize,
    pub variables: usize,
    pub constraints: usize,
    pub max_arity: usize,
    /// Close every generated relation under a random conservative majority
    /// and minority pair, so the language is tractable by construction.
    pub tractable_only: bool,
}

impl GeneratorConfig {
    fn validate(&self) -> Result<()> {
        if self.domain_size == 0 || self.variables == 0 || self.max_arity == 0 {
            return Err(Error::arg("generator bounds must be positive"));
        }
        Ok(())
    }
}

/// A random conservative operation satisfying the given identity pattern:
/// entries with repeated arguments are fixed by the identities, the rest pick
/// uniformly among their three arguments.
fn random_conservative(rng: &mut ChaCha8Rng, d: usize, majority: bool) -> TernaryOperation {
    let mut picks = Vec::new();
    for _ in 0..d * d * d {
        picks.push(rng.gen_range(0..3usize));
    }
    let pick = move |x: usize, y: usize, z: usize, i: usize| [x, y, z][picks[i]];
    TernaryOperation::from_fn(d, |x, y, z| {
        let i = (x * d + y) * d + z;
        if majority {
            if x == y || x == z {
                x
            } else if y == z {
                y
            } else {
                pick(x, y, z, i)
            }
        } else if x == y && y == z {
            x
        } else if x == y {
            z
        } else if x == z {
            y
        } else if y == z {
            x
        } else {
            pick(x, y, z, i)
        }
    })
}

/// Closes a relation under both operations: applies them to every row triple
/// until no new tuples appear.
fn close_under(rel: &Relation, ops: &[&TernaryOperation]) -> Relation {
    let mut tuples: BTreeSet<Vec<usize>> = rel.tuples().cloned().collect();
    loop {
        let snapshot: Vec<Vec<usize>> = tuples.iter().cloned().collect();
        let before = tuples.len();
        for a in &snapshot {
            for b in &snapshot {
                for c in &snapshot {
                    for op in ops {
                        tuples.insert(op.apply_tuples(a, b, c));
                    }
                }
            }
        }
        if tuples.len() == before {
            break;
        }
    }
    Relation::new(rel.arity(), tuples).expect("closure preserves arity")
}

/// Deterministically generates a language and an instance from the seed. With
/// `tractable_only` the relations are closed under a random conservative
/// majority/minority pair, which guarantees a tractable classification; the
/// chosen pair is returned for closure checks.
pub fn generate(
    config: &GeneratorConfig,
) -> Result<(
    ConstraintLanguage,
    Instance,
    Option<(TernaryOperation, TernaryOperation)>,
)> {
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let d = config.domain_size;
    let ops = if config.tractable_only {
        let m = random_conservative(&mut rng, d, true);
        let h = random_conservative(&mut rng, d, false);
        Some((m, h))
    } else {
        None
    };
    let relation_count = rng.gen_range(1..=3usize);
    let mut language = ConstraintLanguage::new(DomainSpec::new(d)?);
    for i in 0..relation_count {
        let arity = rng.gen_range(1..=config.max_arity);
        let seeds = rng.gen_range(1..=(d + 2));
        let mut tuples = BTreeSet::new();
        for _ in 0..seeds {
            let t: Vec<usize> = (0..arity).map(|_| rng.gen_range(0..d)).collect();
            tuples.insert(t);
        }
        let mut rel = Relation::new(arity, tuples)?;
        if let Some((m, h)) = &ops {
            rel = close_under(&rel, &[m, h]);
        }
        language.add_relation(format!("r{i}"), rel)?;
    }
    let mut instance = Instance::new(language.clone(), config.variables);
    let names: Vec<String> = language.relations().map(|(n, _)| n.clone()).collect();
    for _ in 0..config.constraints {
        let name = &names[rng.gen_range(0..names.len())];
        let arity = language.relation(name).unwrap().arity();
        let scope: Vec<usize> = (0..arity)
            .map(|_| rng.gen_range(0..config.variables))
            .collect();
        instance.add_constraint(name.clone(), scope)?;
    }
    // A cardinality line from a random assignment's histogram; it may or may
    // not be feasible.
    let assignment: Vec<usize> = (0..config.variables).map(|_| rng.gen_range(0..d)).collect();
    instance.set_cardinality(Some(CardinalityVector::of_assignment(d, &assignment)))?;
    Ok((language, instance, ops))
}

/// Outcome of comparing two count maps vector by vector.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CountComparison {
    /// Vectors where the two sides disagree, with both counts.
    pub mismatches: Vec<(CardinalityVector, BigUint, BigUint)>,
}

impl CountComparison {
    pub fn matched(&self) -> bool {
        self.mismatches.is_empty()
    }

    /// Entry-for-entry comparison over the union of both supports.
    pub fn compare(left: &CountMap, right: &CountMap) -> CountComparison {
        let mut vectors: BTreeSet<CardinalityVector> = left.support();
        vectors.extend(right.support());
        let mismatches = vectors
            .into_iter()
            .filter_map(|v| {
                let (a, b) = (left.get(&v), right.get(&v));
                if a != b {
                    Some((v, a, b))
                } else {
                    None
                }
            })
            .collect();
        CountComparison { mismatches }
    }
}

/// Runs both counting paths on one instance and reports mismatching vectors
/// (expected: none). Requires a tractable language and brute-force headroom.
pub fn cross_validate(instance: &Instance, cap: usize) -> Result<CountComparison> {
    let brute = brute_force_count(instance, cap)?;
    let fast = crate::counter::ext_count_instance(instance)?;
    Ok(CountComparison::compare(&brute, &fast))
}
