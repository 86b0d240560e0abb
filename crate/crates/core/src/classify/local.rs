//! Weight-by-weight reconstruction of binary equitable partitions with a
//! 3×3 (covering radius 2) or 2×2 (covering radius 1) quotient matrix.
//!
//! A local pair fixes the first cell P₀ up to weight r₀ and the last cell P₂
//! up to weight r₂; each stage grows one radius by solving an exact cover with
//! multiplicities over the next weight layer, then keeps one representative
//! per orbit of the coordinate permutation group.

use std::collections::{BTreeMap, HashSet};
use std::fs;
use std::io::Write as _;
use std::ops::ControlFlow;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};
use std::sync::Mutex;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::canon::{self, permute_mask, Structure};
use crate::error::{Error, Result};
use crate::hamming::{binomial, Space};
use crate::partitions::{cell_sizes, quotient_of, Equitability, QuotientMatrix, VertexPartition};
use crate::search::cover::{CoverInstance, Solver};
use crate::symmetry::{canonical_partition, Group};

/// Largest length handled; words are stored as 16-bit masks.
pub const MAX_N: usize = 16;

const CHECKPOINT_FORMAT: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    R0,
    R2,
}

/// Quotient matrix, length and the cell of the all-zero word.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Params {
    quotient: QuotientMatrix,
    n: usize,
    anchor: usize,
}

impl Params {
    pub fn new(quotient: QuotientMatrix, n: usize, anchor: usize) -> Result<Self> {
        let k = quotient.k();
        if k != 2 && k != 3 {
            return Err(Error::Infeasible(format!("local reconstruction needs 2 or 3 cells, got {k}")));
        }
        if n == 0 || n > MAX_N {
            return Err(Error::Infeasible(format!("length {n} outside 1..={MAX_N}")));
        }
        if quotient.degree() != Some(n as i64) {
            return Err(Error::Infeasible(format!("rows of {quotient} must sum to n={n}")));
        }
        if anchor >= k {
            return Err(Error::Infeasible(format!("anchor cell {anchor} out of range")));
        }
        if k == 3 && (quotient.get(0, 2) != 0 || quotient.get(2, 0) != 0) {
            return Err(Error::Infeasible("the first and last cells must not be adjacent".into()));
        }
        if quotient.rows().iter().flatten().any(|&x| x < 0) {
            return Err(Error::Infeasible(format!("negative entry in {quotient}")));
        }
        cell_sizes(&quotient, Space::new(n, 2)?)?;
        Ok(Params { quotient, n, anchor })
    }

    pub fn quotient(&self) -> &QuotientMatrix {
        &self.quotient
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn anchor(&self) -> usize {
        self.anchor
    }

    fn k(&self) -> usize {
        self.quotient.k()
    }

    fn seed_radii(&self) -> (usize, usize) {
        if self.k() == 3 {
            (1, 1)
        } else {
            (1, 0)
        }
    }

    fn final_radii(&self) -> (usize, usize) {
        if self.k() == 3 {
            (self.n, self.n)
        } else {
            (self.n, 0)
        }
    }

    fn cell(&self, in0: bool, in2: bool) -> usize {
        if in0 {
            0
        } else if in2 {
            2
        } else {
            1
        }
    }
}

/// Partial description of P₀ and P₂: all members of weight ≤ r₀ and ≤ r₂.
/// Words are coordinate bitmasks; both lists are sorted.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LocalPair {
    pub r0: usize,
    pub r2: usize,
    pub p0: Vec<u64>,
    pub p2: Vec<u64>,
}

struct Bits(Vec<u64>);

impl Bits {
    fn new(n: usize) -> Self {
        Bits(vec![0; (1usize << n).div_ceil(64)])
    }

    fn from(n: usize, words: &[u64]) -> Self {
        let mut b = Bits::new(n);
        for &w in words {
            b.0[(w / 64) as usize] |= 1 << (w % 64);
        }
        b
    }

    #[inline]
    fn has(&self, w: u64) -> bool {
        self.0[(w / 64) as usize] >> (w % 64) & 1 == 1
    }
}

/// Masks of the given weight in colexicographic order.
fn layer(n: usize, w: usize) -> Vec<u64> {
    if w > n {
        return Vec::new();
    }
    if w == 0 {
        return vec![0];
    }
    let mut out = Vec::with_capacity(binomial(n, w) as usize);
    let mut x: u64 = (1 << w) - 1;
    while x < 1 << n {
        out.push(x);
        let c = x & x.wrapping_neg();
        let r = x + c;
        x = (((r ^ x) >> 2) / c) | r;
    }
    out
}

/// Position of a mask within its weight layer.
#[inline]
fn colex_rank(mut mask: u64, binom: &[[u32; MAX_N + 1]; MAX_N + 1]) -> u32 {
    let mut rank = 0;
    let mut i = 1;
    while mask != 0 {
        let b = mask.trailing_zeros() as usize;
        mask &= mask - 1;
        rank += binom[b][i];
        i += 1;
    }
    rank
}

fn binom_table() -> [[u32; MAX_N + 1]; MAX_N + 1] {
    let mut t = [[0u32; MAX_N + 1]; MAX_N + 1];
    for n in 0..=MAX_N {
        t[n][0] = 1;
        for k in 1..=n {
            t[n][k] = t[n - 1][k - 1] + if k < n { t[n - 1][k] } else { 0 };
        }
    }
    t
}

/// The unique (1,1)-local pair (or (1)-local set for two cells).
pub fn seed_pair(params: &Params) -> LocalPair {
    let s = &params.quotient;
    let d = params.anchor;
    let (r0, r2) = params.seed_radii();
    let mut p0 = Vec::new();
    let mut p2 = Vec::new();
    if d == 0 {
        p0.push(0);
    }
    if d == 2 && params.k() == 3 {
        p2.push(0);
    }
    let a = s.get(d, 0) as usize;
    p0.extend((0..a).map(|j| 1u64 << j));
    if params.k() == 3 {
        let b = s.get(d, 2) as usize;
        p2.extend((a..a + b).map(|j| 1u64 << j));
    }
    LocalPair { r0, r2, p0, p2 }
}

/// Direct check of the locality, anchoring and neighbor-count conditions.
pub fn is_local_pair(params: &Params, pair: &LocalPair) -> bool {
    let n = params.n;
    let k = params.k();
    let weight = |w: u64| w.count_ones() as usize;
    if pair.p0.iter().any(|&w| weight(w) > pair.r0) || pair.p2.iter().any(|&w| weight(w) > pair.r2) {
        return false;
    }
    let b0 = Bits::from(n, &pair.p0);
    let b2 = Bits::from(n, &pair.p2);
    if pair.p0.iter().any(|&w| b2.has(w)) || (k == 2 && !pair.p2.is_empty()) {
        return false;
    }
    let zero_cell = params.cell(b0.has(0), b2.has(0));
    if zero_cell != params.anchor {
        return false;
    }
    for v in 0..1u64 << n {
        let cell = params.cell(b0.has(v), b2.has(v));
        let mut c0 = 0;
        let mut c2 = 0;
        for j in 0..n {
            c0 += b0.has(v ^ 1 << j) as i64;
            c2 += b2.has(v ^ 1 << j) as i64;
        }
        if weight(v) < pair.r0 && c0 != params.quotient.get(cell, 0) {
            return false;
        }
        if k == 3 && weight(v) < pair.r2 && c2 != params.quotient.get(cell, 2) {
            return false;
        }
    }
    true
}

fn grown(params: &Params, radii: (usize, usize), side: Side) -> Result<(usize, usize)> {
    let n = params.n;
    let out = match side {
        Side::R0 => ((radii.0 + 1).min(n), radii.1),
        Side::R2 => (radii.0, (radii.1 + 1).min(n)),
    };
    if params.k() == 2 && side == Side::R2 {
        return Err(Error::Infeasible("two-cell quotients only grow r0".into()));
    }
    if params.k() == 3 && out.0.abs_diff(out.1) > 1 {
        return Err(Error::Infeasible(format!("radii {out:?} differ by more than 1")));
    }
    Ok(out)
}

/// Streams every continuation of `pair` with the given radius grown by one.
/// Returns the number of search nodes.
pub fn extend_into(params: &Params, pair: &LocalPair, side: Side, emit: &mut dyn FnMut(LocalPair) -> ControlFlow<()>) -> Result<u64> {
    let n = params.n;
    let (r0, r2) = grown(params, (pair.r0, pair.r2), side)?;
    let r = match side {
        Side::R0 => pair.r0,
        Side::R2 => pair.r2,
    };
    if r >= n {
        let _ = emit(LocalPair { r0, r2, ..pair.clone() });
        return Ok(0);
    }
    let (grow, other) = match side {
        Side::R0 => (&pair.p0, &pair.p2),
        Side::R2 => (&pair.p2, &pair.p0),
    };
    let col = if side == Side::R0 { 0 } else { 2 };
    let b0 = Bits::from(n, &pair.p0);
    let b2 = Bits::from(n, &pair.p2);
    let bg = if side == Side::R0 { &b0 } else { &b2 };
    let bo = if side == Side::R0 { &b2 } else { &b0 };

    let items = layer(n, r);
    let mut demands = Vec::with_capacity(items.len());
    for &v in &items {
        let cell = params.cell(b0.has(v), b2.has(v));
        let mut have = 0i64;
        let mut m = v;
        while m != 0 {
            let b = m & m.wrapping_neg();
            m ^= b;
            have += bg.has(v ^ b) as i64;
        }
        let need = params.quotient.get(cell, col) - have;
        if need < 0 {
            return Ok(0);
        }
        demands.push(need as u32);
    }
    let binom = binom_table();
    let mut words = Vec::new();
    let mut blocks = Vec::new();
    for w in layer(n, r + 1) {
        if bo.has(w) {
            continue;
        }
        let mut covered = Vec::with_capacity(r + 1);
        let mut m = w;
        let mut ok = true;
        while m != 0 {
            let b = m & m.wrapping_neg();
            m ^= b;
            let i = colex_rank(w ^ b, &binom);
            if demands[i as usize] == 0 {
                ok = false;
                break;
            }
            covered.push(i);
        }
        if ok {
            covered.sort_unstable();
            words.push(w);
            blocks.push(covered);
        }
    }
    let inst = CoverInstance::new(demands, blocks)?;
    let mut solver = Solver::new(&inst);
    let _ = solver.run(&mut |chosen| {
        let mut next = grow.clone();
        next.extend(chosen.iter().map(|&b| words[b as usize]));
        next.sort_unstable();
        let (p0, p2) = match side {
            Side::R0 => (next, other.clone()),
            Side::R2 => (other.clone(), next),
        };
        emit(LocalPair { r0, r2, p0, p2 })
    });
    Ok(solver.stats.nodes)
}

/// All continuations of `pair` with one radius grown by one (not reduced up to equivalence).
pub fn extend(params: &Params, pair: &LocalPair, side: Side) -> Result<Vec<LocalPair>> {
    let mut out = Vec::new();
    extend_into(params, pair, side, &mut |p| {
        out.push(p);
        ControlFlow::Continue(())
    })?;
    Ok(out)
}

/// Canonical representative under coordinate permutations, packed as
/// `[|P₀|, P₀…, P₂…]` with 16-bit masks.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Rep(Box<[u16]>);

impl Rep {
    fn unpack(&self, radii: (usize, usize)) -> LocalPair {
        let k = self.0[0] as usize;
        LocalPair {
            r0: radii.0,
            r2: radii.1,
            p0: self.0[1..1 + k].iter().map(|&w| w as u64).collect(),
            p2: self.0[1 + k..].iter().map(|&w| w as u64).collect(),
        }
    }
}

/// Canonical form of a pair under the coordinate permutations of H(n,2).
pub fn canonical_pair(n: usize, pair: &LocalPair) -> LocalPair {
    let rep = canonical_rep(n, pair);
    rep.unpack((pair.r0, pair.r2))
}

fn pair_structure(n: usize, pair: &LocalPair) -> Structure {
    let mut s = Structure::new(n);
    for &w in pair.p0.iter().filter(|&&w| w != 0) {
        s.add_edge(0, w);
    }
    for &w in pair.p2.iter().filter(|&&w| w != 0) {
        s.add_edge(1, w);
    }
    s
}

/// Number of coordinate permutations preserving the pair.
pub fn pair_automorphism_order(n: usize, pair: &LocalPair) -> u128 {
    canon::canonize(&pair_structure(n, pair)).group_order
}

fn canonical_rep(n: usize, pair: &LocalPair) -> Rep {
    let lab = canon::canonize(&pair_structure(n, pair)).labeling;
    let relabel = |set: &[u64]| {
        let mut v: Vec<u16> = set.iter().map(|&w| permute_mask(w, &lab) as u16).collect();
        v.sort_unstable();
        v
    };
    let mut packed = Vec::with_capacity(1 + pair.p0.len() + pair.p2.len());
    packed.push(pair.p0.len() as u16);
    packed.extend(relabel(&pair.p0));
    packed.extend(relabel(&pair.p2));
    Rep(packed.into_boxed_slice())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StageReport {
    pub radii: (usize, usize),
    pub source: (usize, usize),
    pub parents: usize,
    /// Continuations found before isomorph rejection.
    pub raw: u64,
    pub classes: usize,
    pub nodes: u64,
    /// Labeled pairs counted as Σ n!/|Aut(parent)|·(continuations of parent).
    pub labeled_from_parents: u128,
    /// Labeled pairs counted as Σ n!/|Aut(class)|; equal to the above when
    /// the search is complete and isomorph rejection is sound.
    pub labeled_from_classes: u128,
}

impl StageReport {
    pub fn double_count_balances(&self) -> bool {
        self.labeled_from_parents == self.labeled_from_classes
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassifyReport {
    pub params: Params,
    pub schedule: Vec<(usize, usize)>,
    pub stages: Vec<StageReport>,
    /// Final local pairs (up to coordinate permutations) that pass re-verification;
    /// `None` when the run stopped before the final radii.
    pub verified: Option<usize>,
    /// Classes of the verified partitions under the full automorphism group.
    pub final_classes: Option<usize>,
    pub resumed_after: Option<usize>,
}

impl ClassifyReport {
    pub fn counts(&self) -> Vec<usize> {
        self.stages.iter().map(|s| s.classes).collect()
    }
}

#[derive(Clone, Debug)]
pub struct ClassifyOutcome {
    pub report: ClassifyReport,
    /// One partition per full-group class, cells ordered as in the quotient matrix.
    pub partitions: Vec<VertexPartition>,
}

#[derive(Clone, Debug)]
pub struct ClassifyOptions {
    /// Worker threads; 0 uses the rayon default.
    pub threads: usize,
    pub checkpoint_dir: Option<PathBuf>,
    pub resume: bool,
    /// Abort once this many raw continuations have been produced in total.
    pub raw_budget: Option<u64>,
    pub time_budget: Option<Duration>,
    pub heartbeat: Duration,
    /// Stop (without error) once this many schedule entries are done.
    pub max_stages: Option<usize>,
}

impl Default for ClassifyOptions {
    fn default() -> Self {
        ClassifyOptions {
            threads: 0,
            checkpoint_dir: None,
            resume: false,
            raw_budget: None,
            time_budget: None,
            heartbeat: Duration::from_secs(30),
            max_stages: None,
        }
    }
}

/// Grows the smaller radius (r₀ on ties) until (n,n); for two cells r₀ up to n.
pub fn default_schedule(params: &Params) -> Vec<(usize, usize)> {
    complete_schedule(params, &[]).unwrap_or_default()
}

fn step_of(from: (usize, usize), to: (usize, usize)) -> Option<Side> {
    if to == (from.0 + 1, from.1) {
        Some(Side::R0)
    } else if to == (from.0, from.1 + 1) {
        Some(Side::R2)
    } else {
        None
    }
}

/// Checks that every step follows from an earlier stage and appends the
/// default continuation up to the final radii.
pub fn complete_schedule(params: &Params, schedule: &[(usize, usize)]) -> Result<Vec<(usize, usize)>> {
    let mut out = schedule.to_vec();
    let mut seen = vec![params.seed_radii()];
    for &t in schedule {
        if t.0 > params.n || t.1 > params.n {
            return Err(Error::Infeasible(format!("radii {t:?} exceed n")));
        }
        if !seen.iter().any(|&s| step_of(s, t).is_some_and(|side| grown(params, s, side).is_ok())) {
            return Err(Error::Infeasible(format!("stage {t:?} does not follow from an earlier stage")));
        }
        seen.push(t);
    }
    let target = params.final_radii();
    let mut cur = *seen.last().unwrap();
    while cur != target {
        cur = if params.k() == 2 || (cur.0 <= cur.1 && cur.0 < params.n) || cur.1 == params.n {
            (cur.0 + 1, cur.1)
        } else {
            (cur.0, cur.1 + 1)
        };
        out.push(cur);
    }
    Ok(out)
}

struct Stage {
    radii: (usize, usize),
    reps: Option<Vec<Rep>>,
    classes: usize,
}

#[derive(Serialize, Deserialize)]
struct CheckpointMeta {
    format: u32,
    params: Params,
    schedule: Vec<(usize, usize)>,
    index: usize,
    report: StageReport,
    blob_sha256: String,
}

fn stage_paths(dir: &Path, index: usize) -> (PathBuf, PathBuf) {
    (dir.join(format!("stage-{index:02}.json")), dir.join(format!("stage-{index:02}.bin")))
}

fn encode_reps(reps: &[Rep]) -> Vec<u8> {
    let mut out = Vec::new();
    for r in reps {
        out.extend_from_slice(&(r.0.len() as u16).to_le_bytes());
        for &w in r.0.iter() {
            out.extend_from_slice(&w.to_le_bytes());
        }
    }
    out
}

fn decode_reps(bytes: &[u8]) -> Result<Vec<Rep>> {
    let corrupt = || Error::Checkpoint("truncated representative blob".into());
    let mut vals = bytes.chunks_exact(2).map(|c| u16::from_le_bytes([c[0], c[1]]));
    if bytes.len() % 2 != 0 {
        return Err(corrupt());
    }
    let mut out = Vec::new();
    while let Some(len) = vals.next() {
        let v: Vec<u16> = vals.by_ref().take(len as usize).collect();
        if v.len() != len as usize || v.is_empty() || v[0] as usize >= v.len() {
            return Err(corrupt());
        }
        out.push(Rep(v.into_boxed_slice()));
    }
    Ok(out)
}

fn write_checkpoint(dir: &Path, meta: &CheckpointMeta, blob: &[u8]) -> Result<()> {
    fs::create_dir_all(dir)?;
    let (json, bin) = stage_paths(dir, meta.index);
    let tmp = bin.with_extension("bin.tmp");
    fs::File::create(&tmp)?.write_all(blob)?;
    fs::rename(&tmp, &bin)?;
    let tmp = json.with_extension("json.tmp");
    fs::write(&tmp, serde_json::to_vec_pretty(meta)?)?;
    fs::rename(&tmp, &json)?;
    Ok(())
}

fn read_checkpoint(dir: &Path, index: usize, load_blob: bool) -> Result<Option<(CheckpointMeta, Option<Vec<Rep>>)>> {
    let (json, bin) = stage_paths(dir, index);
    if !json.exists() {
        return Ok(None);
    }
    let meta: CheckpointMeta = serde_json::from_slice(&fs::read(&json)?)
        .map_err(|e| Error::Checkpoint(format!("{}: {e}", json.display())))?;
    if meta.format != CHECKPOINT_FORMAT || meta.index != index {
        return Err(Error::Checkpoint(format!("{}: unexpected format or index", json.display())));
    }
    if !load_blob {
        return Ok(Some((meta, None)));
    }
    let blob = fs::read(&bin)?;
    if hex::encode(Sha256::digest(&blob)) != meta.blob_sha256 {
        return Err(Error::Checkpoint(format!("{}: digest mismatch", bin.display())));
    }
    let reps = decode_reps(&blob)?;
    if reps.len() != meta.report.classes {
        return Err(Error::Checkpoint(format!("{}: class count mismatch", bin.display())));
    }
    Ok(Some((meta, Some(reps))))
}

struct Progress {
    start: Instant,
    last: Mutex<Instant>,
    done: AtomicU64,
    raw: AtomicU64,
    abort: AtomicBool,
}

/// Children between progress checks inside one parent.
const PROGRESS_EVERY: u64 = 1 << 14;

impl Progress {
    /// Records new children and finished parents, logs a heartbeat when due
    /// and applies the budgets; false once the stage must stop.
    fn report(&self, children: u64, parents_done: u64, parents: usize, opts: &ClassifyOptions, label: &str) -> bool {
        let total = self.raw.fetch_add(children, Ordering::Relaxed) + children;
        let done = self.done.fetch_add(parents_done, Ordering::Relaxed) + parents_done;
        if opts.raw_budget.is_some_and(|b| total > b) || opts.time_budget.is_some_and(|t| self.start.elapsed() > t) {
            self.abort.store(true, Ordering::Relaxed);
        }
        if let Ok(mut last) = self.last.try_lock() {
            if last.elapsed() >= opts.heartbeat {
                *last = Instant::now();
                log::info!("stage {label}: {done}/{parents} parents, {total} continuations");
            }
        }
        !self.abort.load(Ordering::Relaxed)
    }
}

struct StageOutput {
    reps: Vec<Rep>,
    raw: u64,
    nodes: u64,
    labeled_from_parents: u128,
    labeled_from_classes: u128,
}

fn factorial(n: usize) -> u128 {
    (1..=n as u128).product()
}

fn run_stage(params: &Params, parents: &[Rep], source: (usize, usize), side: Side, opts: &ClassifyOptions, progress: &Progress, label: &str) -> Result<StageOutput> {
    let n = params.n;
    let nfact = factorial(n);
    let (set, raw, nodes, labeled, err) = parents
        .par_iter()
        .fold(
            || (HashSet::new(), 0u64, 0u64, 0u128, None),
            |(mut set, mut raw, mut nodes, mut labeled, mut err): (HashSet<Rep>, u64, u64, u128, Option<Error>), rep| {
                if err.is_some() || progress.abort.load(Ordering::Relaxed) {
                    return (set, raw, nodes, labeled, err);
                }
                let pair = rep.unpack(source);
                let mut found = 0u64;
                let mut unreported = 0u64;
                match extend_into(params, &pair, side, &mut |child| {
                    found += 1;
                    unreported += 1;
                    set.insert(canonical_rep(n, &child));
                    if unreported == PROGRESS_EVERY {
                        unreported = 0;
                        if !progress.report(PROGRESS_EVERY, 0, parents.len(), opts, label) {
                            return ControlFlow::Break(());
                        }
                    }
                    ControlFlow::Continue(())
                }) {
                    Ok(k) => nodes += k,
                    Err(e) => err = Some(e),
                }
                raw += found;
                if found > 0 {
                    labeled += nfact / pair_automorphism_order(n, &pair) * found as u128;
                }
                progress.report(unreported, 1, parents.len(), opts, label);
                (set, raw, nodes, labeled, err)
            },
        )
        .reduce(
            || (HashSet::new(), 0, 0, 0, None),
            |mut a, mut b| {
                if a.0.len() < b.0.len() {
                    std::mem::swap(&mut a.0, &mut b.0);
                }
                a.0.extend(b.0);
                (a.0, a.1 + b.1, a.2 + b.2, a.3 + b.3, a.4.or(b.4))
            },
        );
    if let Some(e) = err {
        return Err(e);
    }
    if progress.abort.load(Ordering::Relaxed) {
        return Err(Error::Budget(format!("stage {label} interrupted")));
    }
    let mut reps: Vec<Rep> = set.into_iter().collect();
    reps.par_sort_unstable();
    let target = match side {
        Side::R0 => ((source.0 + 1).min(n), source.1),
        Side::R2 => (source.0, (source.1 + 1).min(n)),
    };
    let labeled_from_classes = reps.par_iter().map(|r| nfact / pair_automorphism_order(n, &r.unpack(target))).sum();
    Ok(StageOutput { reps, raw, nodes, labeled_from_parents: labeled, labeled_from_classes })
}

/// Runs the schedule (completed up to the final radii), converts the final
/// pairs to partitions, re-verifies them and merges full-group classes.
pub fn classify(params: &Params, schedule: &[(usize, usize)], opts: &ClassifyOptions) -> Result<ClassifyOutcome> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(opts.threads)
        .build()
        .map_err(|e| Error::Io(std::io::Error::other(e)))?;
    pool.install(|| classify_inner(params, schedule, opts))
}

fn classify_inner(params: &Params, schedule: &[(usize, usize)], opts: &ClassifyOptions) -> Result<ClassifyOutcome> {
    let schedule = complete_schedule(params, schedule)?;
    let seed = seed_pair(params);
    let seed_rep = canonical_rep(params.n, &seed);
    // last stage index that may extend each stage (index 0 is the seed)
    let all: Vec<(usize, usize)> = std::iter::once(params.seed_radii()).chain(schedule.iter().copied()).collect();
    let last_use: Vec<usize> = (0..all.len())
        .map(|i| (i + 1..all.len()).filter(|&j| step_of(all[i], all[j]).is_some()).max().unwrap_or(i))
        .collect();
    let mut stages = vec![Stage { radii: all[0], reps: Some(vec![seed_rep]), classes: 1 }];
    let mut reports = Vec::new();
    let mut resumed_after = None;

    if let (true, Some(dir)) = (opts.resume, &opts.checkpoint_dir) {
        let mut metas = Vec::new();
        for index in 1..all.len() {
            match read_checkpoint(dir, index, false)? {
                Some((meta, _)) if meta.params == *params && meta.schedule == schedule => metas.push(meta),
                Some(_) => return Err(Error::Checkpoint(format!("stage {index} belongs to a different run"))),
                None => break,
            }
        }
        let done = metas.len();
        for meta in metas {
            let index = meta.index;
            let reps = if last_use[index] > done || index == all.len() - 1 {
                read_checkpoint(dir, index, true)?.and_then(|(_, r)| r)
            } else {
                None
            };
            stages.push(Stage { radii: all[index], reps, classes: meta.report.classes });
            reports.push(meta.report);
        }
        if done > 0 {
            resumed_after = Some(done);
            log::info!("resuming after stage {done} of {}", schedule.len());
        }
        for (i, st) in stages.iter_mut().enumerate() {
            if last_use[i] <= done && i != all.len() - 1 {
                st.reps = None;
            }
        }
    }

    let progress = Progress {
        start: Instant::now(),
        last: Mutex::new(Instant::now()),
        done: AtomicU64::new(0),
        raw: AtomicU64::new(0),
        abort: AtomicBool::new(false),
    };
    let stop = opts.max_stages.map_or(all.len(), |m| (m + 1).min(all.len()));
    for index in stages.len()..stop {
        let target = all[index];
        let src = (0..index)
            .filter(|&i| step_of(all[i], target).is_some() && stages[i].reps.is_some())
            .min_by_key(|&i| (stages[i].classes, std::cmp::Reverse(i)))
            .ok_or_else(|| Error::Infeasible(format!("no source stage for {target:?}")))?;
        let side = step_of(all[src], target).unwrap();
        let label = format!("({},{})", target.0, target.1);
        let t0 = Instant::now();
        let parents = stages[src].reps.as_ref().unwrap();
        let out = run_stage(params, parents, all[src], side, opts, &progress, &label)?;
        let reps = out.reps;
        let raw = out.raw;
        let report = StageReport {
            radii: target,
            source: all[src],
            parents: parents.len(),
            raw,
            classes: reps.len(),
            nodes: out.nodes,
            labeled_from_parents: out.labeled_from_parents,
            labeled_from_classes: out.labeled_from_classes,
        };
        if !report.double_count_balances() {
            log::warn!("stage {label}: double count does not balance");
        }
        log::info!("stage {label}: {} classes from {} parents ({raw} raw) in {:.1?}", reps.len(), parents.len(), t0.elapsed());
        if let Some(dir) = &opts.checkpoint_dir {
            let blob = encode_reps(&reps);
            let meta = CheckpointMeta {
                format: CHECKPOINT_FORMAT,
                params: params.clone(),
                schedule: schedule.clone(),
                index,
                report: report.clone(),
                blob_sha256: hex::encode(Sha256::digest(&blob)),
            };
            write_checkpoint(dir, &meta, &blob)?;
        }
        reports.push(report);
        stages.push(Stage { radii: target, classes: reps.len(), reps: Some(reps) });
        for (i, st) in stages.iter_mut().enumerate() {
            if last_use[i] <= index && i != all.len() - 1 {
                st.reps = None;
            }
        }
    }

    if stages.len() < all.len() {
        return Ok(ClassifyOutcome {
            report: ClassifyReport { params: params.clone(), schedule, stages: reports, verified: None, final_classes: None, resumed_after },
            partitions: Vec::new(),
        });
    }
    let last = stages.last().unwrap();
    let finals = last.reps.as_deref().unwrap_or(&[]);
    let space = Space::new(params.n, 2)?;
    let verified: Vec<(Vec<u8>, VertexPartition)> = finals
        .par_iter()
        .map(|rep| -> Result<Option<(Vec<u8>, VertexPartition)>> {
            let pair = rep.unpack(last.radii);
            let p = pair_partition(params, &pair)?;
            match quotient_of(&p) {
                Equitability::Equitable { quotient } if quotient == params.quotient => {
                    Ok(Some((canonical_partition(&p, Group::Full)?.bytes, p)))
                }
                _ => Ok(None),
            }
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .collect();
    let count = verified.len();
    let classes: BTreeMap<Vec<u8>, VertexPartition> = verified.into_iter().rev().collect();
    debug_assert_eq!(space.n(), params.n);
    Ok(ClassifyOutcome {
        report: ClassifyReport {
            params: params.clone(),
            schedule,
            stages: reports,
            verified: Some(count),
            final_classes: Some(classes.len()),
            resumed_after,
        },
        partitions: classes.into_values().collect(),
    })
}

/// Vertex partition of a complete pair: P₀ is cell 0, P₂ the last cell.
pub fn pair_partition(params: &Params, pair: &LocalPair) -> Result<VertexPartition> {
    let space = Space::new(params.n, 2)?;
    let k = params.k();
    let mut cells = vec![1u16; 1 << params.n];
    for &w in &pair.p0 {
        cells[w as usize] = 0;
    }
    for &w in &pair.p2 {
        cells[w as usize] = (k - 1) as u16;
    }
    VertexPartition::new(space, cells)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(q: &str, n: usize, d: usize) -> Params {
        Params::new(q.parse().unwrap(), n, d).unwrap()
    }

    #[test]
    fn layers_and_ranks() {
        let binom = binom_table();
        for w in 0..=6 {
            let l = layer(6, w);
            assert_eq!(l.len() as u64, binomial(6, w));
            for (i, &m) in l.iter().enumerate() {
                assert_eq!(colex_rank(m, &binom) as usize, i);
            }
        }
    }

    #[test]
    fn seeds() {
        let p = params("2,10,0;3,4,5;0,6,6", 12, 0);
        let s = seed_pair(&p);
        assert_eq!(s.p0, vec![0, 1, 2]);
        assert!(s.p2.is_empty());
        assert!(is_local_pair(&p, &s));
        let u = params("1,11,0;3,5,4;0,6,6", 12, 2);
        let s = seed_pair(&u);
        assert!(s.p0.is_empty());
        assert_eq!(s.p2.len(), 7);
        assert!(is_local_pair(&u, &s));
    }

    #[test]
    fn extension_keeps_conditions() {
        let p = params("2,10,0;3,4,5;0,6,6", 12, 0);
        let kids = extend(&p, &seed_pair(&p), Side::R0).unwrap();
        assert!(!kids.is_empty());
        for k in kids.iter().take(50) {
            assert!(is_local_pair(&p, k));
        }
    }

    #[test]
    fn radius_one_small() {
        let p = params("1,5;3,3", 6, 0);
        let out = classify(&p, &[], &ClassifyOptions::default()).unwrap();
        assert_eq!(out.report.final_classes, Some(1));
        assert_eq!(out.partitions[0].cell_sizes(), vec![24, 40]);
    }

    #[test]
    fn bad_schedule() {
        let p = params("2,10,0;3,4,5;0,6,6", 12, 0);
        assert!(complete_schedule(&p, &[(3, 1)]).is_err());
        assert!(complete_schedule(&p, &[(2, 1), (2, 2), (4, 2)]).is_err());
        let s = complete_schedule(&p, &[(1, 2)]).unwrap();
        assert_eq!(s.last(), Some(&(12, 12)));
    }
}
