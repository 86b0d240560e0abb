//! Exact cover with multiplicities: choose blocks so that every item is covered
//! exactly its demanded number of times, each block at most once.
//!
//! Binary branching on one block of the most constrained item, with counter
//! propagation: an item whose remaining demand is zero excludes its other
//! blocks, and an item with exactly as many candidates as demand forces them.

use std::fmt::Write as _;
use std::ops::ControlFlow;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{parse_err, Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoverInstance {
    demands: Vec<u32>,
    blocks: Vec<Vec<u32>>,
    /// Pairs of blocks that may not both be chosen.
    conflicts: Vec<(u32, u32)>,
}

impl CoverInstance {
    pub fn new(demands: Vec<u32>, blocks: Vec<Vec<u32>>) -> Result<Self> {
        let m = demands.len() as u32;
        for (b, items) in blocks.iter().enumerate() {
            if items.is_empty() {
                return Err(Error::Infeasible(format!("block {b} covers no item")));
            }
            if let Some(&i) = items.iter().find(|&&i| i >= m) {
                return Err(Error::Infeasible(format!("block {b} references item {i} of {m}")));
            }
            let mut sorted = items.clone();
            sorted.sort_unstable();
            if sorted.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::Infeasible(format!("block {b} lists an item twice")));
            }
        }
        Ok(CoverInstance { demands, blocks, conflicts: Vec::new() })
    }

    pub fn with_conflicts(mut self, conflicts: Vec<(u32, u32)>) -> Result<Self> {
        let b = self.blocks.len() as u32;
        if conflicts.iter().any(|&(x, y)| x >= b || y >= b || x == y) {
            return Err(Error::Infeasible("conflict references an invalid block".into()));
        }
        self.conflicts = conflicts;
        Ok(self)
    }

    pub fn item_count(&self) -> usize {
        self.demands.len()
    }

    pub fn block_count(&self) -> usize {
        self.blocks.len()
    }

    pub fn demands(&self) -> &[u32] {
        &self.demands
    }

    pub fn blocks(&self) -> &[Vec<u32>] {
        &self.blocks
    }

    /// Whether a block selection meets every demand exactly and avoids conflicts.
    pub fn is_solution(&self, chosen: &[u32]) -> bool {
        let mut count = vec![0u32; self.demands.len()];
        let mut used = vec![false; self.blocks.len()];
        for &b in chosen {
            if std::mem::replace(&mut used[b as usize], true) {
                return false;
            }
            for &i in &self.blocks[b as usize] {
                count[i as usize] += 1;
            }
        }
        count == self.demands && self.conflicts.iter().all(|&(x, y)| !(used[x as usize] && used[y as usize]))
    }

    /// `ITEMS m`, m demand lines, `BLOCKS b`, b lines of item indices.
    pub fn to_text(&self) -> String {
        let mut s = format!("ITEMS {}\n", self.demands.len());
        for d in &self.demands {
            let _ = writeln!(s, "{d}");
        }
        let _ = writeln!(s, "BLOCKS {}", self.blocks.len());
        for b in &self.blocks {
            let _ = writeln!(s, "{}", b.iter().map(|i| i.to_string()).collect::<Vec<_>>().join(" "));
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let lines: Vec<(usize, &str)> = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty()).map(|(i, l)| (i + 1, l.trim())).collect();
        let mut at = 0usize;
        let mut next = |what: &str| -> Result<(usize, &str)> {
            let l = lines.get(at).copied().ok_or_else(|| parse_err(0, format!("missing {what}")))?;
            at += 1;
            Ok(l)
        };
        let header = |(i, l): (usize, &str), tag: &str| -> Result<usize> {
            l.strip_prefix(tag)
                .and_then(|r| r.trim().parse().ok())
                .ok_or_else(|| parse_err(i, format!("expected `{tag} <count>`")))
        };
        let m = header(next("ITEMS line")?, "ITEMS")?;
        let mut demands = Vec::with_capacity(m);
        for _ in 0..m {
            let (i, l) = next("demand line")?;
            demands.push(l.parse().map_err(|_| parse_err(i, "bad demand"))?);
        }
        let b = header(next("BLOCKS line")?, "BLOCKS")?;
        let mut blocks = Vec::with_capacity(b);
        for _ in 0..b {
            let (i, l) = next("block line")?;
            let items = l
                .split_whitespace()
                .map(|x| x.parse::<u32>().map_err(|_| parse_err(i, format!("bad item {x:?}"))))
                .collect::<Result<Vec<_>>>()?;
            blocks.push(items);
        }
        CoverInstance::new(demands, blocks)
    }
}

const AVAILABLE: u8 = 0;
const CHOSEN: u8 = 1;
const EXCLUDED: u8 = 2;

/// Why a search stopped early.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Stop {
    Callback,
    Budget,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchStats {
    pub nodes: u64,
    pub solutions: u64,
}

/// A branching decision, recorded to split the tree into subproblems.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Decision {
    pub block: u32,
    pub take: bool,
}

pub struct Solver<'a> {
    inst: &'a CoverInstance,
    item_blocks: Vec<Vec<u32>>,
    conflicts: Vec<Vec<u32>>,
    need: Vec<i32>,
    avail: Vec<i32>,
    status: Vec<u8>,
    trail: Vec<u32>,
    chosen: Vec<u32>,
    queue: Vec<u32>,
    node_budget: Option<u64>,
    pub stats: SearchStats,
    consistent: bool,
}

impl<'a> Solver<'a> {
    pub fn new(inst: &'a CoverInstance) -> Self {
        let mut item_blocks = vec![Vec::new(); inst.demands.len()];
        for (b, items) in inst.blocks.iter().enumerate() {
            for &i in items {
                item_blocks[i as usize].push(b as u32);
            }
        }
        let mut conflicts = vec![Vec::new(); inst.blocks.len()];
        for &(x, y) in &inst.conflicts {
            conflicts[x as usize].push(y);
            conflicts[y as usize].push(x);
        }
        let avail = item_blocks.iter().map(|b| b.len() as i32).collect();
        let mut s = Solver {
            inst,
            item_blocks,
            conflicts,
            need: inst.demands.iter().map(|&d| d as i32).collect(),
            avail,
            status: vec![AVAILABLE; inst.blocks.len()],
            trail: Vec::new(),
            chosen: Vec::new(),
            queue: (0..inst.demands.len() as u32).collect(),
            node_budget: None,
            stats: SearchStats::default(),
            consistent: true,
        };
        s.consistent = s.propagate();
        s
    }

    pub fn with_node_budget(mut self, budget: Option<u64>) -> Self {
        self.node_budget = budget;
        self
    }

    fn choose(&mut self, b: u32) -> bool {
        self.status[b as usize] = CHOSEN;
        self.trail.push(b);
        self.chosen.push(b);
        for &i in &self.inst.blocks[b as usize] {
            self.need[i as usize] -= 1;
            self.avail[i as usize] -= 1;
            self.queue.push(i);
        }
        for k in 0..self.conflicts[b as usize].len() {
            let c = self.conflicts[b as usize][k];
            match self.status[c as usize] {
                AVAILABLE => self.exclude(c),
                CHOSEN => return false,
                _ => {}
            }
        }
        true
    }

    fn exclude(&mut self, b: u32) {
        self.status[b as usize] = EXCLUDED;
        self.trail.push(b);
        for &i in &self.inst.blocks[b as usize] {
            self.avail[i as usize] -= 1;
            self.queue.push(i);
        }
    }

    fn undo_to(&mut self, mark: usize) {
        while self.trail.len() > mark {
            let b = self.trail.pop().unwrap();
            let was_chosen = self.status[b as usize] == CHOSEN;
            for &i in &self.inst.blocks[b as usize] {
                self.avail[i as usize] += 1;
                if was_chosen {
                    self.need[i as usize] += 1;
                }
            }
            if was_chosen {
                self.chosen.pop();
            }
            self.status[b as usize] = AVAILABLE;
        }
        self.queue.clear();
    }

    fn propagate(&mut self) -> bool {
        while let Some(i) = self.queue.pop() {
            let (need, avail) = (self.need[i as usize], self.avail[i as usize]);
            if need < 0 || need > avail {
                self.queue.clear();
                return false;
            }
            if avail == 0 {
                continue;
            }
            if need == 0 || need == avail {
                let take = need > 0;
                for k in 0..self.item_blocks[i as usize].len() {
                    let b = self.item_blocks[i as usize][k];
                    if self.status[b as usize] != AVAILABLE {
                        continue;
                    }
                    if take {
                        if !self.choose(b) {
                            self.queue.clear();
                            return false;
                        }
                    } else {
                        self.exclude(b);
                    }
                }
            }
        }
        true
    }

    /// The unmet item with the least slack (candidates minus demand), then fewest
    /// candidates, then lowest index.
    fn branch_item(&self) -> Option<u32> {
        let mut best: Option<(i32, i32, u32)> = None;
        for (i, (&need, &avail)) in self.need.iter().zip(&self.avail).enumerate() {
            if need > 0 {
                let key = (avail - need, avail, i as u32);
                if best.is_none_or(|b| key < b) {
                    best = Some(key);
                    if key.0 == 0 {
                        break;
                    }
                }
            }
        }
        best.map(|b| b.2)
    }

    fn branch_block(&self, item: u32) -> u32 {
        *self.item_blocks[item as usize].iter().find(|&&b| self.status[b as usize] == AVAILABLE).unwrap()
    }

    fn apply(&mut self, d: Decision) -> bool {
        if self.status[d.block as usize] != AVAILABLE {
            return false;
        }
        let ok = if d.take { self.choose(d.block) } else {
            self.exclude(d.block);
            true
        };
        ok && self.propagate()
    }

    fn search(&mut self, emit: &mut dyn FnMut(&[u32]) -> ControlFlow<()>) -> ControlFlow<Stop> {
        self.stats.nodes += 1;
        if self.node_budget.is_some_and(|b| self.stats.nodes > b) {
            return ControlFlow::Break(Stop::Budget);
        }
        let Some(item) = self.branch_item() else {
            self.stats.solutions += 1;
            let mut sol = self.chosen.clone();
            sol.sort_unstable();
            return match emit(&sol) {
                ControlFlow::Continue(()) => ControlFlow::Continue(()),
                ControlFlow::Break(()) => ControlFlow::Break(Stop::Callback),
            };
        };
        let b = self.branch_block(item);
        for take in [true, false] {
            let mark = self.trail.len();
            if self.apply(Decision { block: b, take }) {
                self.search(emit)?;
            }
            self.undo_to(mark);
        }
        ControlFlow::Continue(())
    }

    /// Streams every solution (sorted block indices) to `emit`.
    pub fn run(&mut self, emit: &mut dyn FnMut(&[u32]) -> ControlFlow<()>) -> ControlFlow<Stop> {
        if !self.consistent {
            return ControlFlow::Continue(());
        }
        self.search(emit)
    }

    /// The search tree cut at the given depth, in search order: open subtrees
    /// as decision prefixes, and solutions reached above that depth.
    pub fn split(&mut self, depth: usize) -> Vec<Subtree> {
        let mut out = Vec::new();
        if self.consistent {
            self.split_rec(depth, &mut Vec::new(), &mut out);
        }
        out
    }

    fn split_rec(&mut self, depth: usize, path: &mut Vec<Decision>, out: &mut Vec<Subtree>) {
        let Some(item) = self.branch_item() else {
            let mut sol = self.chosen.clone();
            sol.sort_unstable();
            out.push(Subtree::Solved(sol));
            return;
        };
        if path.len() == depth {
            out.push(Subtree::Open(path.clone()));
            return;
        }
        let b = self.branch_block(item);
        for take in [true, false] {
            let mark = self.trail.len();
            let d = Decision { block: b, take };
            if self.apply(d) {
                path.push(d);
                self.split_rec(depth, path, out);
                path.pop();
            }
            self.undo_to(mark);
        }
    }

    /// Replays a prefix from the root state; false if it is inconsistent.
    pub fn replay(&mut self, prefix: &[Decision]) -> bool {
        self.consistent && prefix.iter().all(|&d| self.apply(d))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Subtree {
    Open(Vec<Decision>),
    Solved(Vec<u32>),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CoverMode {
    Enumerate,
    Count,
    First,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CoverResult {
    pub solutions: Vec<Vec<u32>>,
    pub count: u64,
    pub nodes: u64,
    pub complete: bool,
}

pub fn solve_cover(inst: &CoverInstance, mode: CoverMode, node_budget: Option<u64>) -> CoverResult {
    let mut solver = Solver::new(inst).with_node_budget(node_budget);
    let mut solutions = Vec::new();
    let mut count = 0u64;
    let flow = solver.run(&mut |s| {
        count += 1;
        if mode != CoverMode::Count {
            solutions.push(s.to_vec());
        }
        if mode == CoverMode::First {
            ControlFlow::Break(())
        } else {
            ControlFlow::Continue(())
        }
    });
    let complete = !matches!(flow, ControlFlow::Break(Stop::Budget));
    CoverResult { solutions, count, nodes: solver.stats.nodes, complete }
}

/// Enumerates with subtrees below `depth` solved in parallel; the output order
/// equals the sequential order regardless of the worker count.
pub fn solve_cover_parallel(inst: &CoverInstance, depth: usize, count_only: bool) -> CoverResult {
    let subtrees = Solver::new(inst).split(depth);
    let parts: Vec<(Vec<Vec<u32>>, u64, u64)> = subtrees
        .par_iter()
        .map(|sub| {
            let prefix = match sub {
                Subtree::Solved(sol) => return (if count_only { Vec::new() } else { vec![sol.clone()] }, 1, 0),
                Subtree::Open(prefix) => prefix,
            };
            let mut s = Solver::new(inst);
            let mut sols = Vec::new();
            let mut count = 0u64;
            if s.replay(prefix) {
                let _ = s.run(&mut |sol| {
                    count += 1;
                    if !count_only {
                        sols.push(sol.to_vec());
                    }
                    ControlFlow::Continue(())
                });
            }
            (sols, count, s.stats.nodes)
        })
        .collect();
    let mut result = CoverResult { complete: true, ..Default::default() };
    for (sols, count, nodes) in parts {
        result.count += count;
        result.nodes += nodes;
        result.solutions.extend(sols);
    }
    result
}
