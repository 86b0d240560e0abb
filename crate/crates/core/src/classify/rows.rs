//! Partitions of the complement of the [5,3,3]₄ Hamming code into rows.

use std::collections::BTreeMap;
use std::ops::ControlFlow;

use serde::{Deserialize, Serialize};

use crate::canon::{self, Certificate, Structure};
use crate::error::Result;
use crate::gf::{hamming_code, FieldTable};
use crate::hamming::{enumerate_rows, CodeSet, Face, Space};
use crate::search::cover::{CoverInstance, Solver};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RowClass {
    pub automorphism_order: u128,
    /// Partitions in the class (orbit size under the code stabilizer).
    pub members: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RowReport {
    pub vertices: usize,
    pub free_rows: usize,
    pub total: u64,
    pub stabilizer_order: u128,
    /// Sorted by automorphism order.
    pub classes: Vec<RowClass>,
    /// Σ |Stab(C)| / |Aut(P)| over classes; equals `total` when consistent.
    pub orbit_sum: u128,
}

impl RowReport {
    pub fn automorphism_orders(&self) -> Vec<u128> {
        self.classes.iter().map(|c| c.automorphism_order).collect()
    }

    pub fn double_count_balances(&self) -> bool {
        self.orbit_sum == self.total as u128 && self.classes.iter().map(|c| c.members).sum::<u64>() == self.total
    }
}

/// Coordinates, symbol points joined to their coordinate, code words as
/// point sets and rows as (free coordinate, fixed points); its automorphisms
/// are the elements of Aut(H(n,q)) preserving the code and the rows.
struct Encoder {
    space: Space,
    base: Structure,
}

impl Encoder {
    fn new(space: Space, code: &CodeSet) -> Self {
        let (n, q) = (space.n(), space.q());
        let mut base = Structure::new(n * (q + 1));
        for j in 0..n {
            for a in 0..q {
                let v = n + j * q + a;
                base.set_color(v, 1);
                base.add_edge(0, 1 << j | 1 << v);
            }
        }
        let mut enc = Encoder { space, base };
        for &w in code.members() {
            let m = enc.points(w, usize::MAX);
            enc.base.add_edge(1, m);
        }
        enc
    }

    fn points(&self, rank: u64, skip: usize) -> u64 {
        let (n, q) = (self.space.n(), self.space.q());
        let digits = self.space.digits(rank);
        (0..n).filter(|&j| j != skip).fold(0, |m, j| m | 1 << (n + j * q + digits[j] as usize))
    }

    fn row_edge(&self, row: &Face) -> u64 {
        let j = row.free()[0];
        self.points(row.anchor().rank(), j) | 1 << j
    }
}

pub fn row_partitions_h54() -> Result<RowReport> {
    let field = FieldTable::new(4)?;
    let code = hamming_code(2, &field)?.codewords()?;
    let space = code.space();
    let complement: Vec<u64> = (0..space.size()).filter(|&r| !code.contains(r)).collect();
    let mut index = vec![u32::MAX; space.size() as usize];
    for (i, &r) in complement.iter().enumerate() {
        index[r as usize] = i as u32;
    }
    let rows: Vec<Face> = enumerate_rows(space)
        .into_iter()
        .filter(|row| row.expand().iter().all(|&r| !code.contains(r)))
        .collect();
    let blocks: Vec<Vec<u32>> = rows
        .iter()
        .map(|row| {
            let mut b: Vec<u32> = row.expand().iter().map(|&r| index[r as usize]).collect();
            b.sort_unstable();
            b
        })
        .collect();
    let inst = CoverInstance::new(vec![1; complement.len()], blocks)?;
    let enc = Encoder::new(space, &code);
    let row_edges: Vec<u64> = rows.iter().map(|r| enc.row_edge(r)).collect();
    let stabilizer_order = canon::canonize(&enc.base).group_order;

    let mut classes: BTreeMap<Certificate, RowClass> = BTreeMap::new();
    let mut total = 0u64;
    let _ = Solver::new(&inst).run(&mut |chosen| {
        total += 1;
        let mut s = enc.base.clone();
        for &b in chosen {
            s.add_edge(2, row_edges[b as usize]);
        }
        let c = canon::canonize(&s);
        classes.entry(c.certificate).or_insert(RowClass { automorphism_order: c.group_order, members: 0 }).members += 1;
        if total % 20000 == 0 {
            log::info!("row partitions: {total} found, {} classes", classes.len());
        }
        ControlFlow::Continue(())
    });
    let mut classes: Vec<RowClass> = classes.into_values().collect();
    classes.sort_by_key(|c| (c.automorphism_order, std::cmp::Reverse(c.members)));
    let orbit_sum = classes.iter().map(|c| stabilizer_order / c.automorphism_order).sum();
    Ok(RowReport {
        vertices: complement.len(),
        free_rows: rows.len(),
        total,
        stabilizer_order,
        classes,
        orbit_sum,
    })
}
