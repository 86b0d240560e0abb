//! Equitable partitions of H(n,q): distance partitions, quotient matrices,
//! intersection arrays, cell sizes, the sphere spectrum, refinement to an
//! equitable partition, products, and the face-component check.

use std::collections::{HashMap, VecDeque};
use std::fmt;
use std::str::FromStr;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hamming::{binomial, CodeSet, Face, Space, Word};

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct QuotientMatrix {
    entries: Vec<Vec<i64>>,
}

impl QuotientMatrix {
    pub fn new(entries: Vec<Vec<i64>>) -> Result<Self> {
        let k = entries.len();
        if k == 0 || entries.iter().any(|r| r.len() != k) {
            return Err(Error::Infeasible("quotient matrix must be square and nonempty".into()));
        }
        if entries.iter().flatten().any(|&x| x < 0) {
            return Err(Error::Infeasible("quotient matrix has a negative entry".into()));
        }
        Ok(QuotientMatrix { entries })
    }

    pub fn k(&self) -> usize {
        self.entries.len()
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> i64 {
        self.entries[i][j]
    }

    pub fn rows(&self) -> &[Vec<i64>] {
        &self.entries
    }

    /// The common row sum, if all rows agree.
    pub fn degree(&self) -> Option<i64> {
        let d: i64 = self.entries[0].iter().sum();
        self.entries.iter().all(|r| r.iter().sum::<i64>() == d).then_some(d)
    }

    pub fn is_tridiagonal(&self) -> bool {
        let k = self.k();
        (0..k).all(|i| (0..k).all(|j| i.abs_diff(j) <= 1 || self.entries[i][j] == 0))
    }

    /// `{b_0..;c_1..}` when the matrix is tridiagonal with positive off-diagonals.
    pub fn intersection_array(&self) -> Option<IntersectionArray> {
        if !self.is_tridiagonal() || self.k() < 2 {
            return None;
        }
        let k = self.k();
        let b: Vec<u32> = (0..k - 1).map(|i| self.entries[i][i + 1] as u32).collect();
        let c: Vec<u32> = (1..k).map(|i| self.entries[i][i - 1] as u32).collect();
        (b.iter().chain(&c).all(|&x| x > 0)).then_some(IntersectionArray { b, c })
    }

    /// Simultaneous permutation of rows and columns: new cell i is old cell `order[i]`.
    pub fn permuted(&self, order: &[usize]) -> QuotientMatrix {
        let entries = order.iter().map(|&i| order.iter().map(|&j| self.entries[i][j]).collect()).collect();
        QuotientMatrix { entries }
    }

    /// Whether `other` equals this matrix after relabeling cells.
    pub fn equivalent_to(&self, other: &QuotientMatrix) -> Option<Vec<usize>> {
        let k = self.k();
        if k != other.k() {
            return None;
        }
        let mut order = Vec::with_capacity(k);
        let mut used = vec![false; k];
        fn go(a: &QuotientMatrix, b: &QuotientMatrix, order: &mut Vec<usize>, used: &mut [bool]) -> bool {
            let i = order.len();
            if i == a.k() {
                return true;
            }
            for cand in 0..a.k() {
                if used[cand] {
                    continue;
                }
                order.push(cand);
                // b[i][j] must equal a[order[i]][order[j]] for placed cells
                let ok = (0..=i).all(|j| b.entries[i][j] == a.entries[cand][order[j]] && b.entries[j][i] == a.entries[order[j]][cand]);
                if ok {
                    used[cand] = true;
                    if go(a, b, order, used) {
                        return true;
                    }
                    used[cand] = false;
                }
                order.pop();
            }
            false
        }
        go(self, other, &mut order, &mut used).then_some(order)
    }

    /// S_a ⊗ I + I ⊗ S_b, cell (i,j) ↦ i·k_b + j.
    pub fn kronecker_sum(&self, other: &QuotientMatrix) -> QuotientMatrix {
        let (ka, kb) = (self.k(), other.k());
        let mut e = vec![vec![0i64; ka * kb]; ka * kb];
        for i in 0..ka {
            for j in 0..kb {
                for i2 in 0..ka {
                    e[i * kb + j][i2 * kb + j] += self.entries[i][i2];
                }
                for j2 in 0..kb {
                    e[i * kb + j][i * kb + j2] += other.entries[j][j2];
                }
            }
        }
        QuotientMatrix { entries: e }
    }
}

impl fmt::Display for QuotientMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<String> = self
            .entries
            .iter()
            .map(|r| format!("[{}]", r.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")))
            .collect();
        write!(f, "[{}]", rows.join(","))
    }
}

impl FromStr for QuotientMatrix {
    type Err = Error;

    /// Accepts JSON-style `[[0,3],[1,2]]` or rows separated by `;` / newlines.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse { line: 1, msg: format!("cannot parse quotient matrix {s:?}") };
        let t = s.trim();
        let entries: Vec<Vec<i64>> = if t.starts_with("[[") {
            serde_json::from_str(t).map_err(|_| bad())?
        } else {
            t.split([';', '\n'])
                .filter(|r| !r.trim().is_empty())
                .map(|r| {
                    r.split([',', ' ', '\t'])
                        .filter(|x| !x.is_empty())
                        .map(|x| x.parse::<i64>().map_err(|_| bad()))
                        .collect::<Result<Vec<_>>>()
                })
                .collect::<Result<_>>()?
        };
        QuotientMatrix::new(entries)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct IntersectionArray {
    pub b: Vec<u32>,
    pub c: Vec<u32>,
}

impl IntersectionArray {
    pub fn new(b: Vec<u32>, c: Vec<u32>) -> Result<Self> {
        if b.is_empty() || b.len() != c.len() || b.iter().chain(&c).any(|&x| x == 0) {
            return Err(Error::Infeasible("intersection array needs ρ ≥ 1 positive entries on each side".into()));
        }
        Ok(IntersectionArray { b, c })
    }

    pub fn radius(&self) -> usize {
        self.b.len()
    }

    /// The reversed array, describing the partition read from the far cell.
    pub fn reversed(&self) -> IntersectionArray {
        IntersectionArray { b: self.c.iter().rev().copied().collect(), c: self.b.iter().rev().copied().collect() }
    }
}

impl fmt::Display for IntersectionArray {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let j = |v: &[u32]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",");
        write!(f, "{{{};{}}}", j(&self.b), j(&self.c))
    }
}

impl FromStr for IntersectionArray {
    type Err = Error;

    /// Accepts `{13,6,1;1,6,9}`, `[13,6,1;1,6,9]` and `13,6,1;1,6,9`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse { line: 1, msg: format!("cannot parse intersection array {s:?}") };
        let t = s.trim().trim_start_matches(['{', '[']).trim_end_matches(['}', ']']);
        let (b, c) = t.split_once(';').ok_or_else(bad)?;
        let parse = |part: &str| -> Result<Vec<u32>> {
            part.split(',').map(|x| x.trim().parse::<u32>().map_err(|_| bad())).collect()
        };
        IntersectionArray::new(parse(b)?, parse(c)?)
    }
}

/// Tridiagonal quotient matrix of an intersection array in a given space.
pub fn array_to_quotient(array: &IntersectionArray, space: Space) -> Result<QuotientMatrix> {
    let rho = array.radius();
    let deg = space.degree() as i64;
    let mut e = vec![vec![0i64; rho + 1]; rho + 1];
    for i in 0..=rho {
        let b = if i < rho { array.b[i] as i64 } else { 0 };
        let c = if i > 0 { array.c[i - 1] as i64 } else { 0 };
        let diag = deg - b - c;
        if diag < 0 {
            return Err(Error::Infeasible(format!("{array} needs degree ≥ {} in cell {i}, {space} has {deg}", b + c)));
        }
        e[i][i] = diag;
        if i < rho {
            e[i][i + 1] = b;
        }
        if i > 0 {
            e[i][i - 1] = c;
        }
    }
    QuotientMatrix::new(e)
}

/// An ordered partition of all vertices of a space into nonempty cells.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VertexPartition {
    space: Space,
    cells: Vec<u16>,
    k: usize,
}

impl VertexPartition {
    pub fn new(space: Space, cells: Vec<u16>) -> Result<Self> {
        if cells.len() as u64 != space.size() {
            return Err(Error::Infeasible(format!("partition lists {} vertices, {space} has {}", cells.len(), space.size())));
        }
        let k = cells.iter().map(|&c| c as usize + 1).max().unwrap_or(0);
        let mut seen = vec![false; k];
        for &c in &cells {
            seen[c as usize] = true;
        }
        if let Some(empty) = seen.iter().position(|s| !s) {
            return Err(Error::Infeasible(format!("cell {empty} is empty")));
        }
        Ok(VertexPartition { space, cells, k })
    }

    /// Two cells: the code and its complement.
    pub fn from_code(code: &CodeSet) -> Result<Self> {
        let mut cells = vec![1u16; dense_size(code.space())?];
        for &r in code.members() {
            cells[r as usize] = 0;
        }
        VertexPartition::new(code.space(), cells)
    }

    pub fn space(&self) -> Space {
        self.space
    }

    pub fn cell_count(&self) -> usize {
        self.k
    }

    pub fn cells(&self) -> &[u16] {
        &self.cells
    }

    #[inline]
    pub fn cell_of(&self, rank: u64) -> usize {
        self.cells[rank as usize] as usize
    }

    pub fn cell_sizes(&self) -> Vec<u64> {
        let mut s = vec![0u64; self.k];
        for &c in &self.cells {
            s[c as usize] += 1;
        }
        s
    }

    pub fn cell_members(&self) -> Vec<Vec<u64>> {
        let mut out = vec![Vec::new(); self.k];
        for (r, &c) in self.cells.iter().enumerate() {
            out[c as usize].push(r as u64);
        }
        out
    }

    pub fn cell_code(&self, i: usize) -> Result<CodeSet> {
        let ranks = self.cells.iter().enumerate().filter(|(_, &c)| c as usize == i).map(|(r, _)| r as u64).collect();
        CodeSet::from_ranks(self.space, ranks)
    }

    /// Cells reordered so that new cell i is old cell `order[i]`.
    pub fn reordered(&self, order: &[usize]) -> VertexPartition {
        let mut inv = vec![0u16; self.k];
        for (new, &old) in order.iter().enumerate() {
            inv[old] = new as u16;
        }
        VertexPartition { space: self.space, cells: self.cells.iter().map(|&c| inv[c as usize]).collect(), k: self.k }
    }
}

fn dense_size(space: Space) -> Result<usize> {
    if space.size() > crate::hamming::DENSE_LIMIT {
        return Err(Error::Space {
            n: space.n(),
            q: space.q(),
            reason: "too large for a dense vertex partition".into(),
        });
    }
    Ok(space.size() as usize)
}

/// Layers by distance from the code; cell i holds the vertices at distance i.
pub fn distance_partition(code: &CodeSet) -> Result<VertexPartition> {
    if code.is_empty() {
        return Err(Error::EmptyCode);
    }
    let space = code.space();
    let size = dense_size(space)?;
    let strides = space.strides();
    let mut dist = vec![u16::MAX; size];
    let mut queue = VecDeque::with_capacity(size);
    for &r in code.members() {
        dist[r as usize] = 0;
        queue.push_back(r);
    }
    while let Some(v) = queue.pop_front() {
        let d = dist[v as usize] + 1;
        space.for_each_neighbor(v, &strides, |u| {
            if dist[u as usize] == u16::MAX {
                dist[u as usize] = d;
                queue.push_back(u);
            }
        });
    }
    VertexPartition::new(space, dist)
}

/// A vertex whose neighbor counts differ from the first vertex of its cell.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    pub vertex: String,
    pub rank: u64,
    pub cell: usize,
    pub counts: Vec<i64>,
    pub expected: Vec<i64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Equitability {
    Equitable { quotient: QuotientMatrix },
    NotEquitable { witness: Witness },
}

impl Equitability {
    pub fn quotient(&self) -> Option<&QuotientMatrix> {
        match self {
            Equitability::Equitable { quotient } => Some(quotient),
            Equitability::NotEquitable { .. } => None,
        }
    }
}

pub fn quotient_of(partition: &VertexPartition) -> Equitability {
    let space = partition.space;
    let k = partition.k;
    let strides = space.strides();
    let mut rows: Vec<Option<Vec<i64>>> = vec![None; k];
    let mut counts = vec![0i64; k];
    for v in 0..space.size() {
        counts.iter_mut().for_each(|c| *c = 0);
        space.for_each_neighbor(v, &strides, |u| counts[partition.cell_of(u)] += 1);
        let c = partition.cell_of(v);
        match &rows[c] {
            None => rows[c] = Some(counts.clone()),
            Some(expected) if *expected != counts => {
                let witness = Witness {
                    vertex: Word::from_rank(space, v).map(|w| w.to_string()).unwrap_or_default(),
                    rank: v,
                    cell: c,
                    counts: counts.clone(),
                    expected: expected.clone(),
                };
                return Equitability::NotEquitable { witness };
            }
            Some(_) => {}
        }
    }
    let entries = rows.into_iter().map(|r| r.expect("cells are nonempty")).collect();
    Equitability::Equitable { quotient: QuotientMatrix { entries } }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum CrVerdict {
    Cr { array: Option<IntersectionArray>, quotient: QuotientMatrix, cell_sizes: Vec<u64> },
    NotCr { witness: Witness, cell_sizes: Vec<u64> },
}

impl CrVerdict {
    pub fn array(&self) -> Option<&IntersectionArray> {
        match self {
            CrVerdict::Cr { array, .. } => array.as_ref(),
            CrVerdict::NotCr { .. } => None,
        }
    }

    pub fn is_cr(&self) -> bool {
        matches!(self, CrVerdict::Cr { .. })
    }

    pub fn cell_sizes(&self) -> &[u64] {
        match self {
            CrVerdict::Cr { cell_sizes, .. } | CrVerdict::NotCr { cell_sizes, .. } => cell_sizes,
        }
    }
}

/// Equitability of the distance partition. A code covering the whole space
/// (ρ = 0) is CR with no intersection array.
pub fn verify_cr(code: &CodeSet) -> Result<CrVerdict> {
    let p = distance_partition(code)?;
    let cell_sizes = p.cell_sizes();
    Ok(match quotient_of(&p) {
        Equitability::Equitable { quotient } => {
            CrVerdict::Cr { array: quotient.intersection_array(), quotient, cell_sizes }
        }
        Equitability::NotEquitable { witness } => CrVerdict::NotCr { witness, cell_sizes },
    })
}

/// Cell sizes forced by s_i S_{i,j} = s_j S_{j,i} and Σ s_i = q^n.
pub fn cell_sizes(quotient: &QuotientMatrix, space: Space) -> Result<Vec<u128>> {
    let k = quotient.k();
    if quotient.degree() != Some(space.degree() as i64) {
        return Err(Error::Infeasible(format!("row sums of {quotient} differ from the degree of {space}")));
    }
    let mut rel: Vec<Option<Ratio<i128>>> = vec![None; k];
    rel[0] = Some(Ratio::from_integer(1));
    let mut queue = VecDeque::from([0usize]);
    while let Some(i) = queue.pop_front() {
        let si = rel[i].unwrap();
        for j in 0..k {
            let (a, b) = (quotient.get(i, j), quotient.get(j, i));
            if (a == 0) != (b == 0) {
                return Err(Error::Infeasible(format!("S[{i}][{j}] and S[{j}][{i}] must vanish together")));
            }
            if a == 0 || i == j {
                continue;
            }
            let sj = si * Ratio::new(a as i128, b as i128);
            match rel[j] {
                None => {
                    rel[j] = Some(sj);
                    queue.push_back(j);
                }
                Some(prev) if prev != sj => {
                    return Err(Error::Infeasible(format!("inconsistent balance between cells {i} and {j}")));
                }
                Some(_) => {}
            }
        }
    }
    let rel: Vec<Ratio<i128>> =
        rel.into_iter().enumerate().map(|(i, r)| r.ok_or_else(|| Error::Infeasible(format!("cell {i} is unreachable")))).collect::<Result<_>>()?;
    let total = rel.iter().fold(Ratio::from_integer(0), |a, b| a + b);
    let scale = Ratio::from_integer(space.size() as i128) / total;
    rel.iter()
        .enumerate()
        .map(|(i, r)| {
            let s = r * scale;
            if s.is_integer() {
                Ok(s.to_integer() as u128)
            } else {
                Err(Error::Infeasible(format!("cell {i} would have non-integral size {s}")))
            }
        })
        .collect()
}

/// M[d][j]: number of cell-j vertices at distance d from a vertex of the anchor cell.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpectrumTable {
    pub anchor: usize,
    pub rows: Vec<Vec<i128>>,
}

impl SpectrumTable {
    pub fn column(&self, j: usize) -> Vec<i128> {
        self.rows.iter().map(|r| r[j]).collect()
    }
}

/// The matrices P_0..P_n of the three-term recurrence
/// (d+1) P_{d+1} = S P_d − d(q−2) P_d − (n−d+1)(q−1) P_{d−1}.
/// Division must be exact and all entries nonnegative; the first failure is
/// reported as (d, i, j).
pub fn spectrum_matrices(quotient: &QuotientMatrix, space: Space) -> Result<Vec<Vec<Vec<i128>>>> {
    let k = quotient.k();
    if quotient.degree() != Some(space.degree() as i64) {
        return Err(Error::Infeasible(format!("row sums of {quotient} differ from the degree of {space}")));
    }
    let (n, q) = (space.n() as i128, space.q() as i128);
    let identity: Vec<Vec<i128>> = (0..k).map(|i| (0..k).map(|j| (i == j) as i128).collect()).collect();
    let s: Vec<Vec<i128>> = quotient.rows().iter().map(|r| r.iter().map(|&x| x as i128).collect()).collect();
    let mut ps = vec![identity];
    let mut prev: Vec<Vec<i128>> = vec![vec![0; k]; k];
    for d in 0..space.n() {
        let cur = ps.last().unwrap().clone();
        let di = d as i128;
        let mut next = vec![vec![0i128; k]; k];
        for i in 0..k {
            for j in 0..k {
                let sp: i128 = (0..k).map(|l| s[i][l] * cur[l][j]).sum();
                let num = sp - di * (q - 2) * cur[i][j] - (n - di + 1) * (q - 1) * prev[i][j];
                if num % (di + 1) != 0 || num < 0 {
                    return Err(Error::Infeasible(format!(
                        "sphere spectrum entry (d={}, {i}, {j}) = {num}/{} is not a nonnegative integer",
                        d + 1,
                        d + 1
                    )));
                }
                next[i][j] = num / (di + 1);
            }
        }
        prev = cur;
        ps.push(next);
    }
    Ok(ps)
}

pub fn sphere_spectrum(quotient: &QuotientMatrix, space: Space, anchor_cell: usize) -> Result<SpectrumTable> {
    if anchor_cell >= quotient.k() {
        return Err(Error::Infeasible(format!("anchor cell {anchor_cell} out of range")));
    }
    let ps = spectrum_matrices(quotient, space)?;
    let rows = ps.into_iter().map(|p| p[anchor_cell].clone()).collect::<Vec<_>>();
    for (d, row) in rows.iter().enumerate() {
        let sphere = binomial(space.n(), d) as i128 * (space.q() as i128 - 1).pow(d as u32);
        if row.iter().sum::<i128>() != sphere {
            return Err(Error::Infeasible(format!("spectrum row {d} does not sum to the sphere size")));
        }
    }
    Ok(SpectrumTable { anchor: anchor_cell, rows })
}

/// Empirical spectrum: counts of each cell at each distance from `anchor`.
pub fn empirical_spectrum(partition: &VertexPartition, anchor: u64) -> SpectrumTable {
    let space = partition.space;
    let mut rows = vec![vec![0i128; partition.k]; space.n() + 1];
    for v in 0..space.size() {
        rows[space.rank_distance(anchor, v)][partition.cell_of(v)] += 1;
    }
    SpectrumTable { anchor: partition.cell_of(anchor), rows }
}

/// Coarsest equitable refinement: split cells by neighbor-count profiles until
/// stable. Cells are numbered by their smallest member.
pub fn equitable_hull(seed: &VertexPartition) -> (VertexPartition, QuotientMatrix) {
    let space = seed.space;
    let strides = space.strides();
    let mut cells = renumber_by_first(&seed.cells);
    let mut k = cells.iter().map(|&c| c as usize + 1).max().unwrap_or(0);
    loop {
        let mut ids: HashMap<Vec<u32>, u16> = HashMap::new();
        let mut next = Vec::with_capacity(cells.len());
        let mut profile = vec![0u32; k + 1];
        for v in 0..space.size() {
            profile.iter_mut().for_each(|x| *x = 0);
            profile[k] = cells[v as usize] as u32;
            space.for_each_neighbor(v, &strides, |u| profile[cells[u as usize] as usize] += 1);
            let fresh = ids.len() as u16;
            next.push(*ids.entry(profile.clone()).or_insert(fresh));
        }
        let new_k = ids.len();
        cells = next;
        if new_k == k {
            break;
        }
        k = new_k;
    }
    let partition = VertexPartition { space, cells, k };
    let quotient = quotient_of(&partition).quotient().cloned().expect("refinement is equitable at its fixed point");
    (partition, quotient)
}

fn renumber_by_first(cells: &[u16]) -> Vec<u16> {
    let mut map: HashMap<u16, u16> = HashMap::new();
    cells
        .iter()
        .map(|c| {
            let fresh = map.len() as u16;
            *map.entry(*c).or_insert(fresh)
        })
        .collect()
}

/// Cell of (x,y) is (cell_p(x), cell_r(y)) numbered i·k_r + j; x occupies the low coordinates.
pub fn product_partition(p: &VertexPartition, r: &VertexPartition) -> Result<VertexPartition> {
    let (s1, s2) = (p.space, r.space);
    if s1.q() != s2.q() {
        return Err(Error::SpaceMismatch(s1.n(), s1.q(), s2.n(), s2.q()));
    }
    let space = Space::new(s1.n() + s2.n(), s1.q())?;
    dense_size(space)?;
    let low = s1.size();
    let kr = r.k as u16;
    let mut cells = Vec::with_capacity(space.size() as usize);
    for y in 0..s2.size() {
        for x in 0..low {
            cells.push(p.cells[x as usize] * kr + r.cells[y as usize]);
        }
    }
    VertexPartition::new(space, cells)
}

/// Cartesian product of two codes, x in the low coordinates.
pub fn product_code(a: &CodeSet, b: &CodeSet) -> Result<CodeSet> {
    let (s1, s2) = (a.space(), b.space());
    if s1.q() != s2.q() {
        return Err(Error::SpaceMismatch(s1.n(), s1.q(), s2.n(), s2.q()));
    }
    let space = Space::new(s1.n() + s2.n(), s1.q())?;
    let low = s1.size();
    let ranks = b.members().iter().flat_map(|&y| a.members().iter().map(move |&x| x + low * y)).collect();
    CodeSet::from_ranks(space, ranks)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "violation", rename_all = "snake_case")]
pub enum FaceViolation {
    /// An outside vertex with more than one neighbor in the set.
    Crowded { vertex: String, neighbors: usize },
    /// A connected component that is not a face.
    NotFace { component: usize, size: usize },
    /// Two components closer than 3.
    TooClose { first: usize, second: usize, distance: usize },
}

/// Decomposes a set satisfying "every outside vertex has at most one neighbor
/// inside" into faces pairwise at distance at least 3.
pub fn check_face_components(set: &CodeSet) -> std::result::Result<Vec<Face>, FaceViolation> {
    let space = set.space();
    let strides = space.strides();
    let mut outside: HashMap<u64, usize> = HashMap::new();
    for &v in set.members() {
        space.for_each_neighbor(v, &strides, |u| {
            if !set.contains(u) {
                *outside.entry(u).or_default() += 1;
            }
        });
    }
    if let Some((&u, &c)) = outside.iter().filter(|(_, &c)| c > 1).min_by_key(|(&u, _)| u) {
        return Err(FaceViolation::Crowded { vertex: Word::from_rank(space, u).unwrap().to_string(), neighbors: c });
    }
    let members = set.members();
    let mut comp = vec![usize::MAX; members.len()];
    let mut faces = Vec::new();
    for start in 0..members.len() {
        if comp[start] != usize::MAX {
            continue;
        }
        let id = faces.len();
        comp[start] = id;
        let mut stack = vec![start];
        let mut component = vec![members[start]];
        while let Some(i) = stack.pop() {
            space.for_each_neighbor(members[i], &strides, |u| {
                if let Ok(j) = members.binary_search(&u) {
                    if comp[j] == usize::MAX {
                        comp[j] = id;
                        stack.push(j);
                        component.push(u);
                    }
                }
            });
        }
        component.sort_unstable();
        let first = space.digits(component[0]);
        let mut free = vec![false; space.n()];
        for &r in &component[1..] {
            for (c, (a, b)) in space.digits(r).iter().zip(&first).enumerate() {
                if a != b {
                    free[c] = true;
                }
            }
        }
        let free: Vec<usize> = free.iter().enumerate().filter(|(_, &f)| f).map(|(c, _)| c).collect();
        let face = Face::new(&Word::new(space, first).unwrap(), free).unwrap();
        if face.expand() != component {
            return Err(FaceViolation::NotFace { component: id, size: component.len() });
        }
        faces.push(face);
    }
    for i in 0..faces.len() {
        for j in i + 1..faces.len() {
            let d = faces[i].distance_to_face(&faces[j]);
            if d < 3 {
                return Err(FaceViolation::TooClose { first: i, second: j, distance: d });
            }
        }
    }
    Ok(faces)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn qm(rows: &[&[i64]]) -> QuotientMatrix {
        QuotientMatrix::new(rows.iter().map(|r| r.to_vec()).collect()).unwrap()
    }

    #[test]
    fn arrays_to_quotients() {
        let a: IntersectionArray = "{13,6,1;1,6,9}".parse().unwrap();
        let s13 = Space::new(13, 2).unwrap();
        assert_eq!(array_to_quotient(&a, s13).unwrap(), qm(&[&[0, 13, 0, 0], &[1, 6, 6, 0], &[0, 6, 6, 1], &[0, 0, 9, 4]]));
        let u: IntersectionArray = "11,4;3,6".parse().unwrap();
        assert_eq!(array_to_quotient(&u, Space::new(12, 2).unwrap()).unwrap(), qm(&[&[1, 11, 0], &[3, 5, 4], &[0, 6, 6]]));
        let r: IntersectionArray = "{3;1}".parse().unwrap();
        assert_eq!(array_to_quotient(&r, Space::new(3, 2).unwrap()).unwrap(), qm(&[&[0, 3], &[1, 2]]));
        assert!(array_to_quotient(&a, Space::new(10, 2).unwrap()).is_err());
        assert_eq!(a.to_string(), "{13,6,1;1,6,9}");
        assert!("13,6;1".parse::<IntersectionArray>().is_err());
    }

    #[test]
    fn repetition_code_partition() {
        let s = Space::new(3, 2).unwrap();
        let c = CodeSet::from_ranks(s, vec![0, 7]).unwrap();
        let p = distance_partition(&c).unwrap();
        assert_eq!(p.cell_sizes(), vec![2, 6]);
        assert_eq!(quotient_of(&p).quotient().unwrap(), &qm(&[&[0, 3], &[1, 2]]));
        let v = verify_cr(&c).unwrap();
        assert_eq!(v.array().unwrap().to_string(), "{3;1}");
    }

    #[test]
    fn non_cr_set_has_witness() {
        let s = Space::new(4, 2).unwrap();
        let c = CodeSet::from_ranks(s, vec![0, 1, 6]).unwrap();
        match verify_cr(&c).unwrap() {
            CrVerdict::NotCr { witness, .. } => assert_ne!(witness.counts, witness.expected),
            other => panic!("expected NotCr, got {other:?}"),
        }
    }

    #[test]
    fn sizes_from_quotients() {
        let s13 = Space::new(13, 2).unwrap();
        let q = array_to_quotient(&"13,6,1;1,6,9".parse().unwrap(), s13).unwrap();
        assert_eq!(cell_sizes(&q, s13).unwrap(), vec![288, 3744, 3744, 416]);
        let s12 = Space::new(12, 2).unwrap();
        let u = array_to_quotient(&"11,4;3,6".parse().unwrap(), s12).unwrap();
        assert_eq!(cell_sizes(&u, s12).unwrap(), vec![576, 2112, 1408]);
        let s24 = Space::new(24, 2).unwrap();
        let g = array_to_quotient(&"24,21,10;1,4,12".parse().unwrap(), s24).unwrap();
        assert_eq!(cell_sizes(&g, s24).unwrap()[0], 65536);
        // {5;4} in H(7,2): 5 s0 = 4 s1, s0 + s1 = 128 has no integral solution
        let bad = qm(&[&[2, 5], &[4, 3]]);
        assert!(cell_sizes(&bad, Space::new(7, 2).unwrap()).is_err());
    }

    #[test]
    fn spectrum_rows() {
        let s13 = Space::new(13, 2).unwrap();
        let q = array_to_quotient(&"13,6,1;1,6,9".parse().unwrap(), s13).unwrap();
        let t = sphere_spectrum(&q, s13, 0).unwrap();
        assert_eq!(t.rows[2], vec![0, 39, 39, 0]);
        assert_eq!(t.rows[3], vec![13, 104, 156, 13]);
        // columns sum to the cell sizes
        let sizes = cell_sizes(&q, s13).unwrap();
        for (j, s) in sizes.iter().enumerate() {
            assert_eq!(t.column(j).iter().sum::<i128>(), *s as i128);
        }
    }

    #[test]
    fn spectrum_detects_infeasible() {
        let s = Space::new(7, 2).unwrap();
        assert!(sphere_spectrum(&qm(&[&[2, 5], &[4, 3]]), s, 0).is_err());
    }

    #[test]
    fn hull_fixed_points() {
        let s = Space::new(3, 2).unwrap();
        let c = CodeSet::from_ranks(s, vec![0, 7]).unwrap();
        let p = distance_partition(&c).unwrap();
        let (h, q) = equitable_hull(&p);
        assert_eq!(h, p);
        assert_eq!(q, qm(&[&[0, 3], &[1, 2]]));
        let whole = VertexPartition::new(Space::new(4, 3).unwrap(), vec![0; 81]).unwrap();
        let (h, q) = equitable_hull(&whole);
        assert_eq!(h.cell_count(), 1);
        assert_eq!(q, qm(&[&[8]]));
    }

    #[test]
    fn product_of_small_partitions() {
        let s = Space::new(3, 2).unwrap();
        let one = VertexPartition::new(s, vec![0; 8]).unwrap();
        assert_eq!(product_partition(&one, &one).unwrap().cell_count(), 1);
        let p = distance_partition(&CodeSet::from_ranks(s, vec![0, 7]).unwrap()).unwrap();
        let s2 = Space::new(2, 2).unwrap();
        let r = distance_partition(&CodeSet::from_ranks(s2, vec![0, 3]).unwrap()).unwrap();
        let prod = product_partition(&p, &r).unwrap();
        let expected = quotient_of(&p).quotient().unwrap().kronecker_sum(quotient_of(&r).quotient().unwrap());
        assert_eq!(quotient_of(&prod).quotient().unwrap(), &expected);
    }

    #[test]
    fn face_components() {
        let s = Space::new(5, 2).unwrap();
        let single = CodeSet::from_ranks(s, vec![9]).unwrap();
        let faces = check_face_components(&single).unwrap();
        assert_eq!(faces.len(), 1);
        assert_eq!(faces[0].dim(), 0);
        let close = CodeSet::from_ranks(s, vec![0, 3]).unwrap();
        assert!(check_face_components(&close).is_err());
        // a 2-face and a far vertex
        let ok = CodeSet::from_ranks(s, vec![0, 1, 2, 3, 28]).unwrap();
        let faces = check_face_components(&ok).unwrap();
        assert_eq!(faces.iter().map(Face::dim).collect::<Vec<_>>(), vec![2, 0]);
    }

    #[test]
    fn quotient_parse_and_match() {
        let a: QuotientMatrix = "[[0,3],[1,2]]".parse().unwrap();
        let b: QuotientMatrix = "2,1;3,0".parse().unwrap();
        assert_eq!(a.equivalent_to(&b), Some(vec![1, 0]));
        assert_eq!(a.permuted(&[1, 0]), b);
    }
}
