//! Binarization and the 2-consistency closure.
//!
//! An instance is first binarized: for every variable pair `{v, w}` the pair
//! relation collects the assignments of `(v, w)` allowed by every constraint
//! projected onto the pair, and per-variable supports collect the unary
//! projections. The closure then repeatedly deletes a pair `(x, y)` from
//! `R_vw` whenever some third variable `u` admits no value `c` with
//! `(x, c) ∈ R_vu`, `(y, c) ∈ R_wu` and `(x, y, c)` allowed by the original
//! constraints projected onto the triple, until nothing changes.
//!
//! Pair relations are bit-packed (one word per ordered pair), which caps the
//! domain at [`MAX_PACKED_DOMAIN`] elements; the closure runs sweeps with a
//! fixed intermediate variable and only visits triangles with a nontrivial
//! side, so sparse instances stay cheap. The fixed point is unique, hence
//! independent of processing order.

use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::relation::Relation;

/// Largest domain representable by the packed pair matrix (d*d <= 128).
pub const MAX_PACKED_DOMAIN: usize = 11;

/// Variable count above which closure sweeps fan out across threads.
const PARALLEL_THRESHOLD: usize = 192;

pub(crate) type Word = u128;

#[inline]
pub(crate) fn row_mask(d: usize) -> Word {
    (1 << d) - 1
}

#[inline]
pub(crate) fn get_row(rel: Word, x: usize, d: usize) -> Word {
    (rel >> (x * d)) & row_mask(d)
}

/// The relation `support_left x support_right` in packed form.
#[inline]
pub(crate) fn packed_product(left: Word, right: Word, d: usize) -> Word {
    let mut out = 0;
    let mut rest = left;
    while rest != 0 {
        let x = rest.trailing_zeros() as usize;
        rest &= rest - 1;
        out |= right << (x * d);
    }
    out
}

#[inline]
pub(crate) fn transpose(rel: Word, d: usize) -> Word {
    let mut out = 0;
    let mut rest = rel;
    while rest != 0 {
        let bit = rest.trailing_zeros() as usize;
        rest &= rest - 1;
        let (x, y) = (bit / d, bit % d);
        out |= 1 << (y * d + x);
    }
    out
}

/// Composition of packed binary relations: `(x, y)` iff some `c` has
/// `(x, c)` in `a` and `(c, y)` in `b`.
#[inline]
pub(crate) fn compose(a: Word, b: Word, d: usize) -> Word {
    let mut out = 0;
    for x in 0..d {
        let mut row = get_row(a, x, d);
        if row == 0 {
            continue;
        }
        let mut acc = 0;
        while row != 0 {
            let c = row.trailing_zeros() as usize;
            row &= row - 1;
            acc |= get_row(b, c, d);
        }
        out |= acc << (x * d);
    }
    out
}

/// Mask of left elements with a nonempty row.
#[inline]
pub(crate) fn left_support(rel: Word, d: usize) -> Word {
    let mut out = 0;
    for x in 0..d {
        if get_row(rel, x, d) != 0 {
            out |= 1 << x;
        }
    }
    out
}

pub(crate) fn mask_to_set(mask: Word) -> BTreeSet<usize> {
    let mut out = BTreeSet::new();
    let mut rest = mask;
    while rest != 0 {
        out.insert(rest.trailing_zeros() as usize);
        rest &= rest - 1;
    }
    out
}

/// Bitset over `0..d*d*d` for a projection of the original constraints onto
/// a sorted variable triple.
#[derive(Debug, Clone)]
struct TripleMask {
    bits: Vec<u64>,
}

impl TripleMask {
    fn full(d: usize) -> TripleMask {
        let n = d * d * d;
        let mut bits = vec![u64::MAX; n.div_ceil(64)];
        let spare = bits.len() * 64 - n;
        if spare > 0 {
            let last = bits.len() - 1;
            bits[last] >>= spare;
        }
        TripleMask { bits }
    }

    #[inline]
    fn contains(&self, idx: usize) -> bool {
        self.bits[idx / 64] & (1 << (idx % 64)) != 0
    }

    #[inline]
    fn clear(&mut self, idx: usize) {
        self.bits[idx / 64] &= !(1 << (idx % 64));
    }
}

/// The solver's working state: per-variable supports plus one binary relation
/// per variable pair, stored in both orientations. Inconsistency (some
/// support or pair relation emptied) is an explicit flag, not an error.
#[derive(Clone)]
pub struct BinarizedInstance {
    n: usize,
    d: usize,
    rels: Vec<Word>,
    supports: Vec<Word>,
    inconsistent: bool,
}

impl std::fmt::Debug for BinarizedInstance {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("BinarizedInstance")
            .field("n", &self.n)
            .field("d", &self.d)
            .field("inconsistent", &self.inconsistent)
            .finish()
    }
}

impl PartialEq for BinarizedInstance {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n
            && self.d == other.d
            && self.inconsistent == other.inconsistent
            && self.supports == other.supports
            && self.rels == other.rels
    }
}
impl Eq for BinarizedInstance {}

impl BinarizedInstance {
    pub fn variable_count(&self) -> usize {
        self.n
    }

    pub fn domain_size(&self) -> usize {
        self.d
    }

    pub fn is_inconsistent(&self) -> bool {
        self.inconsistent
    }

    pub fn support(&self, v: usize) -> BTreeSet<usize> {
        mask_to_set(self.supports[v])
    }

    #[inline]
    pub(crate) fn support_mask(&self, v: usize) -> Word {
        self.supports[v]
    }

    #[inline]
    pub(crate) fn rel_word(&self, v: usize, w: usize) -> Word {
        self.rels[v * self.n + w]
    }

    /// The pair relation oriented from `v` to `w`.
    pub fn pair_relation(&self, v: usize, w: usize) -> Relation {
        let word = self.rel_word(v, w);
        let d = self.d;
        let mut tuples = Vec::new();
        for x in 0..d {
            let mut row = get_row(word, x, d);
            while row != 0 {
                let y = row.trailing_zeros() as usize;
                row &= row - 1;
                tuples.push(vec![x, y]);
            }
        }
        Relation::new(2, tuples).expect("packed pairs are binary")
    }

    /// True when `R_vw` equals the full product of the two supports.
    pub fn is_trivial_pair(&self, v: usize, w: usize) -> bool {
        self.rel_word(v, w) == packed_product(self.supports[v], self.supports[w], self.d)
    }

    /// Ordered pairs `v < w`.
    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n).flat_map(move |v| (v + 1..self.n).map(move |w| (v, w)))
    }

    pub(crate) fn from_parts(
        n: usize,
        d: usize,
        rels: Vec<Word>,
        supports: Vec<Word>,
    ) -> BinarizedInstance {
        let mut b = BinarizedInstance {
            n,
            d,
            rels,
            supports,
            inconsistent: false,
        };
        b.refresh_inconsistency();
        b
    }

    pub(crate) fn set_rel(&mut self, v: usize, w: usize, word: Word) {
        let t = transpose(word, self.d);
        self.rels[v * self.n + w] = word;
        self.rels[w * self.n + v] = t;
    }

    pub(crate) fn refresh_inconsistency(&mut self) {
        if self.n == 0 {
            self.inconsistent = false;
            return;
        }
        let empty_support = self.supports.iter().any(|&s| s == 0);
        let empty_pair =
            (0..self.n).any(|v| (v + 1..self.n).any(|w| self.rels[v * self.n + w] == 0));
        self.inconsistent = empty_support || empty_pair;
    }

    /// Every support must equal the left projection of every pair relation at
    /// that variable once the closure has run.
    pub(crate) fn supports_synced(&self) -> bool {
        for v in 0..self.n {
            for w in 0..self.n {
                if v != w && left_support(self.rel_word(v, w), self.d) != self.supports[v] {
                    return false;
                }
            }
        }
        true
    }
}

/// Diagonal projection of a relation onto groups of coordinate positions:
/// a tuple contributes only if it is constant on each group.
fn project_positions(rel: &Relation, groups: &[Vec<usize>]) -> BTreeSet<Vec<usize>> {
    let mut out = BTreeSet::new();
    'tuple: for t in rel.tuples() {
        let mut image = Vec::with_capacity(groups.len());
        for pos in groups {
            let first = t[pos[0]];
            for &p in &pos[1..] {
                if t[p] != first {
                    continue 'tuple;
                }
            }
            image.push(first);
        }
        out.insert(image);
    }
    out
}

/// Positions of each distinct variable in a scope, in first-occurrence order.
fn scope_positions(scope: &[usize]) -> Vec<(usize, Vec<usize>)> {
    let mut map: Vec<(usize, Vec<usize>)> = Vec::new();
    for (i, &v) in scope.iter().enumerate() {
        match map.iter_mut().find(|(u, _)| *u == v) {
            Some((_, ps)) => ps.push(i),
            None => map.push((v, vec![i])),
        }
    }
    map
}

/// Builds the pair relations and supports from the instance constraints:
/// every constraint is projected onto each variable and each variable pair it
/// touches, and the projections are intersected. Pairs untouched by any
/// constraint start as the full product of supports.
pub fn initial_binarization(instance: &Instance) -> Result<BinarizedInstance> {
    let d = instance.language().domain().size();
    if d > MAX_PACKED_DOMAIN {
        return Err(Error::resource(format!(
            "domain size {d} exceeds the packed limit of {MAX_PACKED_DOMAIN}"
        )));
    }
    let n = instance.variable_count();
    let full = row_mask(d);
    let mut supports = vec![full; n];
    // Unary passes first so pair initialization sees final supports.
    for c in instance.constraints() {
        let rel = instance.relation_of(c);
        for (v, positions) in scope_positions(&c.scope) {
            let mut mask: Word = 0;
            for t in project_positions(rel, &[positions]) {
                mask |= 1 << t[0];
            }
            supports[v] &= mask;
        }
    }
    let mut b = BinarizedInstance {
        n,
        d,
        rels: vec![0; n * n],
        supports,
        inconsistent: false,
    };
    for v in 0..n {
        for w in 0..n {
            if v != w {
                b.rels[v * n + w] = packed_product(b.supports[v], b.supports[w], d);
            }
        }
    }
    for c in instance.constraints() {
        let rel = instance.relation_of(c);
        let vars = scope_positions(&c.scope);
        for i in 0..vars.len() {
            for j in i + 1..vars.len() {
                let (v, pv) = (vars[i].0, vars[i].1.clone());
                let (w, pw) = (vars[j].0, vars[j].1.clone());
                let mut mask: Word = 0;
                for t in project_positions(rel, &[pv, pw]) {
                    mask |= 1 << (t[0] * d + t[1]);
                }
                let cur = b.rel_word(v, w);
                b.set_rel(v, w, cur & mask);
            }
        }
    }
    b.refresh_inconsistency();
    Ok(b)
}

/// Projections of the original constraints onto each sorted variable triple
/// covered by a scope with at least three distinct variables.
fn triple_masks(instance: &Instance, d: usize) -> BTreeMap<(usize, usize, usize), TripleMask> {
    let mut masks: BTreeMap<(usize, usize, usize), TripleMask> = BTreeMap::new();
    for c in instance.constraints() {
        let rel = instance.relation_of(c);
        let vars = scope_positions(&c.scope);
        if vars.len() < 3 {
            continue;
        }
        for i in 0..vars.len() {
            for j in i + 1..vars.len() {
                for k in j + 1..vars.len() {
                    let mut trio = [
                        (vars[i].0, vars[i].1.clone()),
                        (vars[j].0, vars[j].1.clone()),
                        (vars[k].0, vars[k].1.clone()),
                    ];
                    trio.sort_by_key(|(v, _)| *v);
                    let key = (trio[0].0, trio[1].0, trio[2].0);
                    let allowed: BTreeSet<usize> = project_positions(
                        rel,
                        &[trio[0].1.clone(), trio[1].1.clone(), trio[2].1.clone()],
                    )
                    .iter()
                    .map(|t| (t[0] * d + t[1]) * d + t[2])
                    .collect();
                    let entry = masks.entry(key).or_insert_with(|| TripleMask::full(d));
                    for idx in 0..d * d * d {
                        if entry.contains(idx) && !allowed.contains(&idx) {
                            entry.clear(idx);
                        }
                    }
                }
            }
        }
    }
    masks
}

/// Tightens the three pair relations of a masked triple: each keeps only
/// assignments extensible to the third variable inside the mask and the
/// other two pair relations.
fn apply_triple_mask(
    b: &mut BinarizedInstance,
    key: (usize, usize, usize),
    mask: &TripleMask,
) -> bool {
    let (v, w, u) = key;
    let d = b.d;
    let rvw = b.rel_word(v, w);
    let rvu = b.rel_word(v, u);
    let rwu = b.rel_word(w, u);
    let mut nvw = 0;
    let mut nvu = 0;
    let mut nwu = 0;
    for x in 0..d {
        let row_vw = get_row(rvw, x, d);
        if row_vw == 0 {
            continue;
        }
        let row_vu = get_row(rvu, x, d);
        for y in 0..d {
            if row_vw & (1 << y) == 0 {
                continue;
            }
            let mut cs = get_row(rwu, y, d) & row_vu;
            while cs != 0 {
                let c = cs.trailing_zeros() as usize;
                cs &= cs - 1;
                if mask.contains((x * d + y) * d + c) {
                    nvw |= 1 << (x * d + y);
                    nvu |= 1 << (x * d + c);
                    nwu |= 1 << (y * d + c);
                }
            }
        }
    }
    let changed = nvw != rvw || nvu != rvu || nwu != rwu;
    if changed {
        b.set_rel(v, w, nvw);
        b.set_rel(v, u, nvu);
        b.set_rel(w, u, nwu);
    }
    changed
}

/// Shrinks supports to the projections of their pair relations and applies
/// support masks back into every pair relation. Returns whether anything
/// changed.
fn sync_supports(b: &mut BinarizedInstance) -> bool {
    let n = b.n;
    let d = b.d;
    let mut changed = false;
    loop {
        let mut pass_changed = false;
        for v in 0..n {
            let mut s = b.supports[v];
            for w in 0..n {
                if v != w {
                    s &= left_support(b.rel_word(v, w), d);
                }
            }
            if s != b.supports[v] {
                b.supports[v] = s;
                pass_changed = true;
            }
        }
        if !pass_changed {
            break;
        }
        changed = true;
        for v in 0..n {
            for w in v + 1..n {
                let masked = b.rel_word(v, w) & packed_product(b.supports[v], b.supports[w], d);
                if masked != b.rel_word(v, w) {
                    b.set_rel(v, w, masked);
                }
            }
        }
    }
    changed
}

/// Per-variable bitsets of partners with a nontrivial pair relation.
fn nontrivial_adjacency(b: &BinarizedInstance) -> Vec<Vec<u64>> {
    let n = b.n;
    let words = n.div_ceil(64).max(1);
    let mut adj = vec![vec![0u64; words]; n];
    for v in 0..n {
        for w in v + 1..n {
            if !b.is_trivial_pair(v, w) {
                adj[v][w / 64] |= 1 << (w % 64);
                adj[w][v / 64] |= 1 << (v % 64);
            }
        }
    }
    adj
}

fn adj_insert(adj: &mut [Vec<u64>], v: usize, w: usize) {
    adj[v][w / 64] |= 1 << (w % 64);
    adj[w][v / 64] |= 1 << (v % 64);
}

fn adj_iter(row: &[u64]) -> impl Iterator<Item = usize> + '_ {
    row.iter().enumerate().flat_map(|(wi, &word)| {
        let mut rest = word;
        std::iter::from_fn(move || {
            if rest == 0 {
                None
            } else {
                let b = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                Some(wi * 64 + b)
            }
        })
    })
}

/// Compose table for two-element domains: relations are nibbles, one table
/// load replaces the bit loop on the hottest path.
const fn build_compose_two() -> [[u8; 16]; 16] {
    let mut t = [[0u8; 16]; 16];
    let mut a = 0;
    while a < 16 {
        let mut b = 0;
        while b < 16 {
            let mut out = 0u8;
            let mut x = 0;
            while x < 2 {
                let arow = (a >> (x * 2)) & 3;
                let mut acc = 0u8;
                if arow & 1 != 0 {
                    acc |= (b & 3) as u8;
                }
                if arow & 2 != 0 {
                    acc |= ((b >> 2) & 3) as u8;
                }
                out |= acc << (x * 2);
                x += 1;
            }
            t[a][b] = out;
            b += 1;
        }
        a += 1;
    }
    t
}

static COMPOSE_TWO: [[u8; 16]; 16] = build_compose_two();

#[inline]
fn compose_u64(a: u64, b: u64, d: usize) -> u64 {
    let mask = (1u64 << d) - 1;
    let mut out = 0;
    for x in 0..d {
        let mut row = (a >> (x * d)) & mask;
        if row == 0 {
            continue;
        }
        let mut acc = 0u64;
        while row != 0 {
            let c = row.trailing_zeros() as usize;
            row &= row - 1;
            acc |= (b >> (c * d)) & mask;
        }
        out |= acc << (x * d);
    }
    out
}

/// Triangle sweep with intermediate `u`: tightens `R_vw` by composition
/// through `u` for every `v` with a nontrivial pair at `u`. Only rows of `v`
/// are written, so the row-parallel variant is exact and deterministic; a
/// mirror pass afterwards restores transpose symmetry. Dispatches to a
/// domain-size-specific composition kernel.
fn sweep_intermediate(b: &mut BinarizedInstance, u: usize, adj_u: &[u64]) -> Vec<(usize, usize)> {
    let d = b.d;
    if d == 2 {
        run_sweep(b, u, adj_u, |a, bw| {
            COMPOSE_TWO[(a as usize) & 15][(bw as usize) & 15] as Word
        })
    } else if d <= 8 {
        run_sweep(b, u, adj_u, move |a, bw| {
            compose_u64(a as u64, bw as u64, d) as Word
        })
    } else {
        run_sweep(b, u, adj_u, move |a, bw| compose(a, bw, d))
    }
}

fn run_sweep<K: Fn(Word, Word) -> Word + Sync>(
    b: &mut BinarizedInstance,
    u: usize,
    adj_u: &[u64],
    kernel: K,
) -> Vec<(usize, usize)> {
    let n = b.n;
    let d = b.d;
    let row_u: Vec<Word> = b.rels[u * n..(u + 1) * n].to_vec();
    let supports = b.supports.clone();
    let members: Vec<usize> = adj_iter(adj_u).collect();
    let full = row_mask(d);
    // Far-side triviality hoisted out of the row loops.
    let trivial_uw: Vec<bool> = (0..n)
        .map(|w| w != u && row_u[w] == packed_product(supports[u], supports[w], d))
        .collect();
    let sweep_row = |v: usize, row_v: &mut [Word]| -> Vec<(usize, usize)> {
        let mut changed = Vec::new();
        let rvu = row_v[u];
        // A trivial far side prunes exactly the rows that lost every partner
        // at u; columns are already confined to the supports.
        let fast = packed_product(left_support(rvu, d), full, d);
        for w in 0..n {
            if w == u || w == v {
                continue;
            }
            let target = row_v[w];
            if target == 0 {
                continue;
            }
            let tightened = if trivial_uw[w] {
                target & fast
            } else {
                target & kernel(rvu, row_u[w])
            };
            if tightened != target {
                row_v[w] = tightened;
                changed.push((v, w));
            }
        }
        changed
    };
    let mut all_changed: Vec<(usize, usize)>;
    if n >= PARALLEL_THRESHOLD && members.len() > 1 {
        let mut is_member = vec![false; n];
        for &v in &members {
            is_member[v] = true;
        }
        all_changed = b
            .rels
            .par_chunks_mut(n)
            .enumerate()
            .filter(|(v, _)| is_member[*v])
            .flat_map_iter(|(v, row_v)| sweep_row(v, row_v))
            .collect();
        all_changed.sort_unstable();
    } else {
        all_changed = Vec::new();
        for &v in &members {
            let row_v = &mut b.rels[v * n..(v + 1) * n];
            all_changed.extend(sweep_row(v, row_v));
        }
    }
    // Both orientations of a pair may have been tightened independently
    // within one sweep; merge them back to transposes of each other.
    for &(v, w) in &all_changed {
        let merged = b.rels[v * n + w] & transpose(b.rels[w * n + v], d);
        b.rels[v * n + w] = merged;
        b.rels[w * n + v] = transpose(merged, d);
    }
    all_changed
}

/// Runs the deletion closure to its fixed point. `masks` carries the
/// projections of original constraints onto variable triples; an empty map
/// closes a purely binary instance.
fn close(
    b: &mut BinarizedInstance,
    masks: &BTreeMap<(usize, usize, usize), TripleMask>,
) -> Result<()> {
    let n = b.n;
    if n == 0 {
        return Ok(());
    }
    loop {
        let mut changed = sync_supports(b);
        if b.supports.iter().any(|&s| s == 0) {
            b.inconsistent = true;
            return Ok(());
        }
        let mut adj = nontrivial_adjacency(b);
        for u in 0..n {
            let adj_u = adj[u].clone();
            let newly = sweep_intermediate(b, u, &adj_u);
            for (v, w) in newly {
                changed = true;
                if b.rels[v * n + w] == 0 {
                    b.inconsistent = true;
                    return Ok(());
                }
                adj_insert(&mut adj, v, w);
            }
        }
        for (key, mask) in masks {
            if apply_triple_mask(b, *key, mask) {
                changed = true;
                let (v, w, u) = *key;
                if b.rel_word(v, w) == 0 || b.rel_word(v, u) == 0 || b.rel_word(w, u) == 0 {
                    b.inconsistent = true;
                    return Ok(());
                }
                adj_insert(&mut adj, v, w);
                adj_insert(&mut adj, v, u);
                adj_insert(&mut adj, w, u);
            }
        }
        if !changed {
            break;
        }
    }
    if !b.supports_synced() {
        return Err(Error::invariant(
            "supports diverge from pair projections after the closure",
        ));
    }
    Ok(())
}

/// Runs the deletion rule to its fixed point over the binarization of the
/// instance. Extension checks consult the original constraints through their
/// triple projections, so higher-arity constraints keep pruning binary state.
pub fn enforce_2consistency(
    b: &BinarizedInstance,
    instance: &Instance,
) -> Result<BinarizedInstance> {
    if b.variable_count() != instance.variable_count()
        || b.domain_size() != instance.language().domain().size()
    {
        return Err(Error::arg("binarized state does not match the instance"));
    }
    let mut out = b.clone();
    if out.inconsistent {
        return Ok(out);
    }
    let masks = triple_masks(instance, out.d);
    close(&mut out, &masks)?;
    Ok(out)
}

/// Closure over the pair relations only, with no original constraints.
/// Restrictions of already-consistent instances use this to re-verify.
pub(crate) fn close_pairs_only(b: &BinarizedInstance) -> Result<BinarizedInstance> {
    let mut out = b.clone();
    if out.inconsistent {
        return Ok(out);
    }
    close(&mut out, &BTreeMap::new())?;
    Ok(out)
}

/// Convenience: binarize and close in one step.
pub fn binarize(instance: &Instance) -> Result<BinarizedInstance> {
    let b = initial_binarization(instance)?;
    enforce_2consistency(&b, instance)
}

/// Desk-scale validator: enumerates every assignment (up to `cap`) and checks
/// that the instance and its closed binarization have the same solution set.
/// Holds whenever the language has a majority polymorphism; instances without
/// one can witness a strict gap.
pub fn solution_equivalence_check(
    instance: &Instance,
    b: &BinarizedInstance,
    cap: usize,
) -> Result<bool> {
    let n = instance.variable_count();
    let d = instance.language().domain().size();
    if b.variable_count() != n || b.domain_size() != d {
        return Err(Error::arg("binarized state does not match the instance"));
    }
    if d.checked_pow(n as u32).filter(|&s| s <= cap).is_none() {
        return Err(Error::resource(format!(
            "assignment space {d}^{n} exceeds cap {cap}"
        )));
    }
    let mut assignment = vec![0usize; n];
    loop {
        let sat_p = instance.satisfies(&assignment);
        let sat_b = !b.is_inconsistent()
            && assignment
                .iter()
                .enumerate()
                .all(|(v, &x)| b.support_mask(v) & (1 << x) != 0)
            && (0..n).all(|v| {
                (v + 1..n)
                    .all(|w| b.rel_word(v, w) & (1 << (assignment[v] * d + assignment[w])) != 0)
            });
        if sat_p != sat_b {
            return Ok(false);
        }
        let mut i = n;
        loop {
            if i == 0 {
                return Ok(true);
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
