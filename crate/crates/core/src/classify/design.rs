//! Weight-4 designs in H(8,4): sets of weight-4 words such that every
//! weight-2 word is at distance 2 from exactly one of them.
//!
//! A {24,21,10;1,4,12} code through 0̄ would induce such a design on its
//! weight-4 codewords, with all pairwise distances even. The anchored search
//! below fixes 11110000 and looks for designs with and without that parity.

use std::collections::BTreeSet;
use std::ops::ControlFlow;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hamming::Space;
use crate::search::cover::{CoverInstance, Solver};
use crate::symmetry::{canonical_word_sets, group_closure, Group, SymmetryElement};

const N: usize = 8;
const Q: usize = 4;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DesignMode {
    /// Stream designs, collecting inequivalent ones and checking each for an odd-distance pair.
    EnumerateDesigns,
    /// Exhaustive search restricted to pairwise even distances.
    VerifyOddPair,
    /// Designs invariant under small monomial groups, collected up to equivalence.
    PrescribedSymmetry,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DesignReport {
    pub mode: DesignMode,
    pub items: usize,
    pub blocks: usize,
    pub block_size: usize,
    pub design_size: usize,
    /// Designs visited.
    pub designs: u64,
    pub inequivalent: usize,
    /// Visited designs whose words are pairwise at even distance.
    pub without_odd_pair: u64,
    pub nodes: u64,
    /// False if the node or design budget stopped the search.
    pub complete: bool,
    /// Per-group outcomes in `PrescribedSymmetry` mode.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub groups: Vec<GroupOutcome>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupOutcome {
    pub name: String,
    pub order: usize,
    /// Block orbits meeting no item twice.
    pub orbits: usize,
    pub designs: u64,
    pub complete: bool,
}

fn word_weight(w: &[u8]) -> usize {
    w.iter().filter(|&&x| x != 0).count()
}

fn distance(a: &[u8], b: &[u8]) -> usize {
    a.iter().zip(b).filter(|(x, y)| x != y).count()
}

struct Instance {
    space: Space,
    items: Vec<Vec<u8>>,
    blocks: Vec<Vec<u8>>,
    cover: Vec<Vec<u32>>,
    anchor: usize,
}

fn build() -> Result<Instance> {
    let space = Space::new(N, Q)?;
    let mut items = Vec::new();
    let mut blocks = Vec::new();
    for r in 0..space.size() {
        let w = space.digits(r);
        match word_weight(&w) {
            2 => items.push(w),
            4 => blocks.push(w),
            _ => {}
        }
    }
    items.sort();
    blocks.sort();
    let cover = blocks
        .iter()
        .map(|b| {
            let mut c: Vec<u32> = items
                .iter()
                .enumerate()
                .filter(|(_, it)| it.iter().zip(b).all(|(&x, &y)| x == 0 || x == y))
                .map(|(i, _)| i as u32)
                .collect();
            c.sort_unstable();
            c
        })
        .collect();
    let anchor = blocks.iter().position(|b| b[..] == [1, 1, 1, 1, 0, 0, 0, 0]).unwrap();
    Ok(Instance { space, items, blocks, cover, anchor })
}

/// Anchored search. `max_designs` bounds the designs visited in
/// `EnumerateDesigns`; `target_classes` stops it once that many inequivalent
/// designs are known.
pub fn design_argument_h84(mode: DesignMode, max_designs: Option<u64>, target_classes: Option<usize>, node_budget: Option<u64>) -> Result<DesignReport> {
    let inst = build()?;
    if mode == DesignMode::PrescribedSymmetry {
        return prescribed_symmetry(&inst, max_designs, target_classes, node_budget);
    }
    let anchor = &inst.blocks[inst.anchor];
    let mut demands = vec![1u32; inst.items.len()];
    for &i in &inst.cover[inst.anchor] {
        demands[i as usize] = 0;
    }
    // blocks meeting the anchor's items are excluded outright
    let keep: Vec<usize> = (0..inst.blocks.len())
        .filter(|&b| b != inst.anchor && inst.cover[b].iter().all(|&i| demands[i as usize] == 1))
        .filter(|&b| mode == DesignMode::EnumerateDesigns || distance(anchor, &inst.blocks[b]) % 2 == 0)
        .collect();
    let blocks: Vec<Vec<u32>> = keep.iter().map(|&b| inst.cover[b].clone()).collect();
    let mut cover = CoverInstance::new(demands, blocks)?;
    if mode == DesignMode::VerifyOddPair {
        let mut conflicts = Vec::new();
        for x in 0..keep.len() {
            for y in x + 1..keep.len() {
                if distance(&inst.blocks[keep[x]], &inst.blocks[keep[y]]) % 2 == 1 {
                    conflicts.push((x as u32, y as u32));
                }
            }
        }
        cover = cover.with_conflicts(conflicts)?;
    }
    let mut solver = Solver::new(&cover).with_node_budget(node_budget);
    let mut designs = 0u64;
    let mut without_odd = 0u64;
    let mut classes: BTreeSet<Vec<u8>> = BTreeSet::new();
    let mut error = None;
    let flow = solver.run(&mut |chosen| {
        designs += 1;
        let words: Vec<&Vec<u8>> = std::iter::once(inst.anchor).chain(chosen.iter().map(|&b| keep[b as usize])).map(|b| &inst.blocks[b]).collect();
        if !has_odd_pair(&words) {
            without_odd += 1;
        }
        if mode == DesignMode::EnumerateDesigns && target_classes.is_none_or(|t| classes.len() < t) {
            let ranks: Vec<u64> = words.iter().map(|w| inst.space.rank_of(w)).collect();
            match canonical_word_sets(inst.space, Group::ZeroStabilizer, &[&ranks]) {
                Ok(c) => {
                    classes.insert(c.bytes);
                }
                Err(e) => {
                    error = Some(e);
                    return ControlFlow::Break(());
                }
            }
        }
        let enough = max_designs.is_some_and(|m| designs >= m) || target_classes.is_some_and(|t| classes.len() >= t);
        if enough {
            ControlFlow::Break(())
        } else {
            ControlFlow::Continue(())
        }
    });
    if let Some(e) = error {
        return Err(e);
    }
    Ok(DesignReport {
        mode,
        items: inst.items.len(),
        blocks: inst.blocks.len(),
        block_size: inst.cover[inst.anchor].len(),
        design_size: inst.items.len() / inst.cover[inst.anchor].len(),
        designs,
        inequivalent: classes.len(),
        without_odd_pair: without_odd,
        nodes: solver.stats.nodes,
        complete: flow.is_continue(),
        groups: Vec::new(),
    })
}

fn has_odd_pair(words: &[&Vec<u8>]) -> bool {
    words.iter().enumerate().any(|(i, a)| words[i + 1..].iter().any(|b| distance(a, b) % 2 == 1))
}

/// Monomial groups used by `PrescribedSymmetry`: a 7-cycle of coordinates
/// 1..7, the field multiplication on all symbols, and their combinations.
pub fn design_groups() -> Result<Vec<(String, Vec<SymmetryElement>)>> {
    let id: Vec<u8> = (0..Q as u8).collect();
    let sigma = vec![0u8, 2, 3, 1];
    let cycle: Vec<u8> = (0..N as u8).map(|j| if j == 0 { 0 } else { j % 7 + 1 }).collect();
    let rotate = SymmetryElement::new(cycle.clone(), vec![id.clone(); N])?;
    let scale = SymmetryElement::new((0..N as u8).collect(), vec![sigma.clone(); N])?;
    let mut twisted = vec![id.clone(); N];
    twisted[0] = sigma.clone();
    twisted[1] = sigma;
    let twist = SymmetryElement::new(cycle, twisted)?;
    let swap = SymmetryElement::new(vec![1, 0, 3, 2, 5, 4, 7, 6], vec![id; N])?;
    Ok(vec![
        ("C21 twisted".into(), vec![twist.clone()]),
        ("C7 x C3".into(), vec![rotate.clone(), scale.clone()]),
        ("C7".into(), vec![rotate]),
        ("C3 x C2".into(), vec![scale, swap]),
    ])
}

fn prescribed_symmetry(inst: &Instance, max_designs: Option<u64>, target_classes: Option<usize>, node_budget: Option<u64>) -> Result<DesignReport> {
    let space = inst.space;
    let mut block_of = vec![u32::MAX; space.size() as usize];
    for (b, w) in inst.blocks.iter().enumerate() {
        block_of[space.rank_of(w) as usize] = b as u32;
    }
    let mut classes: BTreeSet<Vec<u8>> = BTreeSet::new();
    let (mut designs, mut without_odd, mut nodes) = (0u64, 0u64, 0u64);
    let mut outcomes = Vec::new();
    let mut complete = true;
    for (name, gens) in design_groups()? {
        let elems = group_closure(space, &gens, 1 << 12)?;
        let mut seen = vec![false; inst.blocks.len()];
        let mut orbits: Vec<Vec<u32>> = Vec::new();
        let mut covers: Vec<Vec<u32>> = Vec::new();
        for (b, w) in inst.blocks.iter().enumerate() {
            if seen[b] {
                continue;
            }
            let r = space.rank_of(w);
            let mut orbit: Vec<u32> = elems.iter().map(|g| block_of[g.apply_rank(space, r) as usize]).collect();
            orbit.sort_unstable();
            orbit.dedup();
            for &o in &orbit {
                seen[o as usize] = true;
            }
            let mut items: Vec<u32> = orbit.iter().flat_map(|&o| inst.cover[o as usize].iter().copied()).collect();
            items.sort_unstable();
            let total = items.len();
            items.dedup();
            if items.len() == total {
                orbits.push(orbit);
                covers.push(items);
            }
        }
        let cover = CoverInstance::new(vec![1; inst.items.len()], covers)?;
        let mut solver = Solver::new(&cover).with_node_budget(node_budget);
        let mut found = 0u64;
        let mut error = None;
        let flow = solver.run(&mut |chosen| {
            found += 1;
            designs += 1;
            let words: Vec<&Vec<u8>> = chosen.iter().flat_map(|&o| orbits[o as usize].iter()).map(|&b| &inst.blocks[b as usize]).collect();
            if !has_odd_pair(&words) {
                without_odd += 1;
            }
            let ranks: Vec<u64> = words.iter().map(|w| space.rank_of(w)).collect();
            match canonical_word_sets(space, Group::ZeroStabilizer, &[&ranks]) {
                Ok(c) => {
                    classes.insert(c.bytes);
                }
                Err(e) => {
                    error = Some(e);
                    return ControlFlow::Break(());
                }
            }
            let enough = max_designs.is_some_and(|m| designs >= m) || target_classes.is_some_and(|t| classes.len() >= t);
            if enough {
                ControlFlow::Break(())
            } else {
                ControlFlow::Continue(())
            }
        });
        if let Some(e) = error {
            return Err(e);
        }
        nodes += solver.stats.nodes;
        log::info!("design group {name} (order {}): {} orbits, {found} designs, {} classes so far", elems.len(), orbits.len(), classes.len());
        outcomes.push(GroupOutcome { name, order: elems.len(), orbits: orbits.len(), designs: found, complete: flow.is_continue() });
        if flow.is_break() {
            complete = false;
            if max_designs.is_some_and(|m| designs >= m) || target_classes.is_some_and(|t| classes.len() >= t) {
                break;
            }
        }
    }
    if designs > 0 && classes.is_empty() {
        return Err(Error::Infeasible("designs found but none canonicalized".into()));
    }
    Ok(DesignReport {
        mode: DesignMode::PrescribedSymmetry,
        items: inst.items.len(),
        blocks: inst.blocks.len(),
        block_size: inst.cover[inst.anchor].len(),
        design_size: inst.items.len() / inst.cover[inst.anchor].len(),
        designs,
        inequivalent: classes.len(),
        without_odd_pair: without_odd,
        nodes,
        complete,
        groups: outcomes,
    })
}
