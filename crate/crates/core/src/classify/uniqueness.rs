//! Uniqueness of the {13,6,1;1,6,9} code in H(13,2).
//!
//! The 26 weight-3 words of C and of its farthest cell C⁽³⁾ form an STS(13).
//! For each of the two STS(13) classes, the 4-faces of C⁽³⁾ through these
//! words are searched as 13-cliques of a compatibility graph, completed by
//! complementation, and re-verified.

use std::collections::BTreeMap;
use std::ops::ControlFlow;

use serde::{Deserialize, Serialize};

use crate::canon::{self, Certificate, Structure};
use crate::constructions::hamming_retraction;
use crate::error::{Error, Result};
use crate::hamming::{CodeSet, Space};
use crate::partitions::{check_face_components, distance_partition, verify_cr, IntersectionArray};
use crate::search::clique::{find_cliques, CliqueGraph, CliqueMode};
use crate::search::cover::{CoverInstance, Solver};
use crate::symmetry::{canonical_code, Group};

const POINTS: usize = 13;
const FULL: u64 = (1 << POINTS) - 1;

/// A Steiner triple system on 13 points, as 26 sorted triple masks.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SteinerSystem {
    pub triples: Vec<u64>,
    pub automorphism_order: u128,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SteinerClassification {
    /// Systems containing the triples {0,1,2}, {0,3,4}, …, {0,11,12}.
    pub with_fixed_pencil: u64,
    pub classes: Vec<SteinerSystem>,
}

fn triple_structure(triples: &[u64]) -> Structure {
    let mut s = Structure::new(POINTS);
    for &t in triples {
        s.add_edge(0, t);
    }
    s
}

/// All STS(13) up to isomorphism, by exact cover over the pairs not covered
/// by a fixed pencil through point 0 (every system has such a relabeling).
pub fn steiner_triple_systems_13() -> Result<SteinerClassification> {
    let pencil: Vec<u64> = (0..6).map(|i| 1 | 1 << (2 * i + 1) | 1 << (2 * i + 2)).collect();
    let covered = |a: usize, b: usize| pencil.iter().any(|&t| t >> a & 1 == 1 && t >> b & 1 == 1);
    let mut pair_index = [[u32::MAX; POINTS]; POINTS];
    let mut items = 0u32;
    for a in 1..POINTS {
        for b in a + 1..POINTS {
            if !covered(a, b) {
                pair_index[a][b] = items;
                items += 1;
            }
        }
    }
    let mut triples = Vec::new();
    let mut blocks = Vec::new();
    for a in 1..POINTS {
        for b in a + 1..POINTS {
            for c in b + 1..POINTS {
                let pairs = [pair_index[a][b], pair_index[a][c], pair_index[b][c]];
                if pairs.iter().all(|&p| p != u32::MAX) {
                    let mut p = pairs.to_vec();
                    p.sort_unstable();
                    triples.push(1u64 << a | 1 << b | 1 << c);
                    blocks.push(p);
                }
            }
        }
    }
    let inst = CoverInstance::new(vec![1; items as usize], blocks)?;
    let mut classes: BTreeMap<Certificate, SteinerSystem> = BTreeMap::new();
    let mut count = 0u64;
    let _ = Solver::new(&inst).run(&mut |chosen| {
        count += 1;
        let mut sys: Vec<u64> = pencil.iter().copied().chain(chosen.iter().map(|&b| triples[b as usize])).collect();
        let c = canon::canonize(&triple_structure(&sys));
        classes.entry(c.certificate).or_insert_with(|| {
            sys.sort_unstable();
            SteinerSystem { triples: sys, automorphism_order: c.group_order }
        });
        ControlFlow::Continue(())
    });
    let mut classes: Vec<SteinerSystem> = classes.into_values().collect();
    classes.sort_by_key(|s| std::cmp::Reverse(s.automorphism_order));
    Ok(SteinerClassification { with_fixed_pencil: count, classes })
}

/// A 4-face of H(13,2): the words equal to `anchor` off the `free` coordinates.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BinaryFace {
    pub anchor: u64,
    pub free: u64,
}

impl BinaryFace {
    pub fn distance(&self, other: &BinaryFace) -> u32 {
        ((self.anchor ^ other.anchor) & !self.free & !other.free).count_ones()
    }

    pub fn distance_to_word(&self, w: u64) -> u32 {
        ((self.anchor ^ w) & !self.free).count_ones()
    }

    pub fn complement(&self) -> BinaryFace {
        BinaryFace { anchor: !self.anchor & !self.free & FULL, free: self.free }
    }

    pub fn words(&self) -> Vec<u64> {
        let bits: Vec<u64> = (0..POINTS).filter(|&j| self.free >> j & 1 == 1).map(|j| 1 << j).collect();
        (0..1u32 << bits.len())
            .map(|s| bits.iter().enumerate().filter(|&(i, _)| s >> i & 1 == 1).fold(self.anchor, |w, (_, &b)| w | b))
            .collect()
    }
}

/// Faces of dimension 4 through one word of `design`, at distance ≥ 3 from 0̄
/// and from every other word of `design`.
pub fn candidate_faces(design: &[u64]) -> Vec<BinaryFace> {
    let mut out = Vec::new();
    for &t in design {
        let rest = FULL & !t;
        for free in (0..1u64 << POINTS).filter(|&f| f.count_ones() == 4 && f & !rest == 0) {
            let face = BinaryFace { anchor: t, free };
            if design.iter().all(|&u| u == t || face.distance_to_word(u) >= 3) {
                out.push(face);
            }
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SteinerOutcome {
    pub automorphism_order: u128,
    pub candidates: usize,
    pub compatible_pairs: usize,
    pub cliques: usize,
    /// Cliques whose completion is a {9,6,1;1,6,13} code.
    pub verified: usize,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct UniquenessReport {
    pub steiner_systems_with_fixed_pencil: u64,
    pub per_system: Vec<SteinerOutcome>,
    /// Inequivalent {13,6,1;1,6,9} codes found.
    pub classes: usize,
    /// Every class found is equivalent to the weight-13 retraction of the [13,10,3]₃ Hamming code.
    pub matches_retraction: bool,
    #[serde(skip)]
    pub codes: Vec<CodeSet>,
}

/// The farthest cell from the 13 faces and their complements, if the face
/// union is a {9,6,1;1,6,13} code; returns the code C at distance 3 from it.
fn complete(faces: &[BinaryFace]) -> Result<Option<CodeSet>> {
    let space = Space::new(POINTS, 2)?;
    let mut words = Vec::with_capacity(416);
    for f in faces {
        words.extend(f.words());
        words.extend(f.complement().words());
    }
    let Ok(far) = CodeSet::from_ranks(space, words) else {
        return Ok(None);
    };
    if far.len() != 416 || check_face_components(&far).map(|f| f.len()) != Ok(26) {
        return Ok(None);
    }
    let expect: IntersectionArray = "{9,6,1;1,6,13}".parse()?;
    if verify_cr(&far)?.array() != Some(&expect) {
        return Ok(None);
    }
    let cells = distance_partition(&far)?;
    let code = cells.cell_code(3)?;
    let expect: IntersectionArray = "{13,6,1;1,6,9}".parse()?;
    if !code.contains(0) || verify_cr(&code)?.array() != Some(&expect) {
        return Err(Error::Infeasible("completed partition is inconsistent".into()));
    }
    Ok(Some(code))
}

pub fn unique_1369() -> Result<UniquenessReport> {
    let sts = steiner_triple_systems_13()?;
    let mut per_system = Vec::new();
    let mut classes: BTreeMap<Vec<u8>, CodeSet> = BTreeMap::new();
    for system in &sts.classes {
        let cands = candidate_faces(&system.triples);
        let mut g = CliqueGraph::new(cands.len());
        for i in 0..cands.len() {
            for j in i + 1..cands.len() {
                if cands[i].distance(&cands[j]) >= 3 {
                    g.add_edge(i, j);
                }
            }
        }
        log::info!("STS with |Aut| = {}: {} candidate faces, {} compatible pairs", system.automorphism_order, cands.len(), g.edge_count());
        let cliques = find_cliques(&g, 13, CliqueMode::All);
        let mut verified = 0;
        for clique in &cliques {
            let faces: Vec<BinaryFace> = clique.iter().map(|&i| cands[i]).collect();
            if let Some(code) = complete(&faces)? {
                verified += 1;
                let cert = canonical_code(&code, Group::Full)?;
                classes.entry(cert.bytes).or_insert(code);
            }
        }
        per_system.push(SteinerOutcome {
            automorphism_order: system.automorphism_order,
            candidates: cands.len(),
            compatible_pairs: g.edge_count(),
            cliques: cliques.len(),
            verified,
        });
    }
    let retraction = canonical_code(&hamming_retraction(3, 3)?, Group::Full)?;
    Ok(UniquenessReport {
        steiner_systems_with_fixed_pencil: sts.with_fixed_pencil,
        per_system,
        classes: classes.len(),
        matches_retraction: !classes.is_empty() && classes.keys().all(|k| *k == retraction.bytes),
        codes: classes.into_values().collect(),
    })
}
