//! Clique search with greedy-coloring bounds over bitset adjacency.

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CliqueGraph {
    n: usize,
    words: usize,
    rows: Vec<u64>,
}

impl CliqueGraph {
    pub fn new(n: usize) -> Self {
        let words = n.div_ceil(64).max(1);
        CliqueGraph { n, words, rows: vec![0; n * words] }
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn add_edge(&mut self, u: usize, v: usize) {
        assert!(u != v && u < self.n && v < self.n, "edge ({u},{v}) invalid");
        self.rows[u * self.words + v / 64] |= 1 << (v % 64);
        self.rows[v * self.words + u / 64] |= 1 << (u % 64);
    }

    pub fn adjacent(&self, u: usize, v: usize) -> bool {
        self.rows[u * self.words + v / 64] >> (v % 64) & 1 == 1
    }

    fn row(&self, u: usize) -> &[u64] {
        &self.rows[u * self.words..(u + 1) * self.words]
    }

    pub fn edge_count(&self) -> usize {
        self.rows.iter().map(|w| w.count_ones() as usize).sum::<usize>() / 2
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CliqueMode {
    /// The first clique of size k.
    First,
    /// Every clique of size k.
    All,
    /// One clique of maximum size; k is ignored.
    Max,
}

struct State<'a> {
    g: &'a CliqueGraph,
    mode: CliqueMode,
    target: usize,
    found: Vec<Vec<usize>>,
    done: bool,
}

fn first_member(set: &[u64]) -> Option<usize> {
    set.iter().position(|&w| w != 0).map(|i| i * 64 + set[i].trailing_zeros() as usize)
}

impl State<'_> {
    /// Greedy coloring of the candidate set: vertices in color order with their color numbers.
    fn color(&self, cand: &[u64]) -> Vec<(usize, usize)> {
        let mut left = cand.to_vec();
        let mut out = Vec::new();
        let mut color = 0;
        while left.iter().any(|&w| w != 0) {
            color += 1;
            let mut q = left.clone();
            while let Some(v) = first_member(&q) {
                out.push((v, color));
                left[v / 64] &= !(1 << (v % 64));
                for (qw, rw) in q.iter_mut().zip(self.g.row(v)) {
                    *qw &= !rw;
                }
                q[v / 64] &= !(1 << (v % 64));
            }
        }
        out
    }

    fn expand(&mut self, clique: &mut Vec<usize>, mut cand: Vec<u64>) {
        if self.mode != CliqueMode::Max && clique.len() == self.target {
            let mut c = clique.clone();
            c.sort_unstable();
            self.found.push(c);
            self.done = self.mode == CliqueMode::First;
            return;
        }
        if self.mode == CliqueMode::Max && clique.len() >= self.target {
            self.target = clique.len() + 1;
            let mut c = clique.clone();
            c.sort_unstable();
            self.found = vec![c];
        }
        let order = self.color(&cand);
        for &(v, color) in order.iter().rev() {
            if self.done || clique.len() + color < self.target {
                return;
            }
            let next: Vec<u64> = cand.iter().zip(self.g.row(v)).map(|(a, b)| a & b).collect();
            clique.push(v);
            self.expand(clique, next);
            clique.pop();
            cand[v / 64] &= !(1 << (v % 64));
        }
    }
}

/// Cliques of size k (or a maximum clique), each sorted; `All` results are sorted.
pub fn find_cliques(g: &CliqueGraph, k: usize, mode: CliqueMode) -> Vec<Vec<usize>> {
    let mut cand = vec![0u64; g.words];
    for v in 0..g.n {
        cand[v / 64] |= 1 << (v % 64);
    }
    let target = if mode == CliqueMode::Max { 1 } else { k };
    if mode != CliqueMode::Max && (k == 0 || k > g.n) {
        return Vec::new();
    }
    let mut st = State { g, mode, target, found: Vec::new(), done: false };
    st.expand(&mut Vec::new(), cand);
    st.found.sort_unstable();
    st.found
}
