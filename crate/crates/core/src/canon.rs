//! Canonical labeling of small colored hypergraphs (at most 64 vertices).
//!
//! Individualization-refinement search: partitions are refined with a
//! commutative hash of each hyperedge's cells, search-tree nodes are compared
//! by a refinement trace, and automorphisms found at equivalent leaves prune the
//! tree through orbit pruning and backjumping to the first path.

use std::cmp::Ordering;

pub type Perm = Vec<u8>;

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Structure {
    nv: usize,
    colors: Vec<u32>,
    edges: Vec<(u32, u64)>,
}

impl Structure {
    pub fn new(nv: usize) -> Self {
        assert!(nv <= 64, "at most 64 vertices");
        Structure { nv, colors: vec![0; nv], edges: Vec::new() }
    }

    pub fn vertex_count(&self) -> usize {
        self.nv
    }

    pub fn set_color(&mut self, v: usize, color: u32) {
        self.colors[v] = color;
    }

    pub fn add_edge(&mut self, color: u32, mask: u64) {
        debug_assert!(self.nv == 64 || mask >> self.nv == 0);
        self.edges.push((color, mask));
    }

    pub fn edges(&self) -> &[(u32, u64)] {
        &self.edges
    }

    /// Image under a vertex permutation.
    pub fn relabeled(&self, perm: &[u8]) -> Structure {
        let mut colors = vec![0; self.nv];
        for v in 0..self.nv {
            colors[perm[v] as usize] = self.colors[v];
        }
        let edges = self.edges.iter().map(|&(c, m)| (c, permute_mask(m, perm))).collect();
        Structure { nv: self.nv, colors, edges }
    }

    /// Colors and the sorted edge list; equal certificates mean equal structures.
    pub fn certificate(&self) -> Certificate {
        let mut edges = self.edges.clone();
        edges.sort_unstable();
        Certificate { colors: self.colors.clone(), edges }
    }
}

#[inline]
pub fn permute_mask(mut mask: u64, perm: &[u8]) -> u64 {
    let mut out = 0u64;
    while mask != 0 {
        let v = mask.trailing_zeros() as usize;
        mask &= mask - 1;
        out |= 1u64 << perm[v];
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Certificate {
    pub colors: Vec<u32>,
    pub edges: Vec<(u32, u64)>,
}

#[derive(Clone, Debug)]
pub struct Canonical {
    /// Vertex v goes to position `labeling[v]`.
    pub labeling: Perm,
    pub certificate: Certificate,
    pub generators: Vec<Perm>,
    pub group_order: u128,
}

#[inline]
fn mix(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

#[derive(Clone)]
struct Part {
    lab: [u8; 64],
    /// Start position of each vertex's cell.
    cell: [u8; 64],
    /// Length of the cell starting at each position.
    len: [u8; 64],
    cells: usize,
}

struct Search<'a> {
    s: &'a Structure,
    inc: Vec<Vec<u32>>,
    edge_hash: Vec<u64>,
    first_trace: Vec<u64>,
    first_path: Vec<u8>,
    first_leaf: Option<(Perm, Certificate)>,
    best_trace: Vec<u64>,
    best_leaf: Option<(Perm, Certificate)>,
    trace: Vec<u64>,
    gens: Vec<Perm>,
    prune: bool,
}

enum Walk {
    Done,
    JumpTo(usize),
}

impl<'a> Search<'a> {
    fn refine(&mut self, p: &mut Part) -> u64 {
        let nv = self.s.nv;
        let mut trace = mix(p.cells as u64);
        let mut sig = [0u64; 64];
        let mut order: Vec<(u64, u8)> = Vec::with_capacity(nv);
        loop {
            if p.cells == nv {
                break;
            }
            for (h, &(color, mask)) in self.edge_hash.iter_mut().zip(&self.s.edges) {
                let mut acc = mix(color as u64 ^ 0x5151_5151);
                let mut m = mask;
                while m != 0 {
                    let u = m.trailing_zeros() as usize;
                    m &= m - 1;
                    acc = acc.wrapping_add(mix(p.cell[u] as u64 + 1));
                }
                *h = mix(acc);
            }
            for v in 0..nv {
                sig[v] = self.inc[v].iter().fold(0u64, |a, &e| a.wrapping_add(self.edge_hash[e as usize]));
            }
            let mut changed = false;
            let mut start = 0usize;
            while start < nv {
                let l = p.len[start] as usize;
                if l > 1 {
                    order.clear();
                    order.extend(p.lab[start..start + l].iter().map(|&v| (sig[v as usize], v)));
                    if order.iter().any(|&(s, _)| s != order[0].0) {
                        order.sort_unstable();
                        changed = true;
                        let mut run = start;
                        for (i, &(s, v)) in order.iter().enumerate() {
                            let pos = start + i;
                            if i > 0 && s != order[i - 1].0 {
                                p.len[run] = (pos - run) as u8;
                                trace = mix(trace ^ mix((run as u64) << 8 | (pos - run) as u64) ^ order[i - 1].0);
                                run = pos;
                                p.cells += 1;
                            }
                            p.lab[pos] = v;
                            p.cell[v as usize] = run as u8;
                        }
                        p.len[run] = (start + l - run) as u8;
                        trace = mix(trace ^ mix((run as u64) << 8 | (start + l - run) as u64) ^ order[l - 1].0);
                    }
                }
                start += l;
            }
            if !changed {
                break;
            }
        }
        mix(trace ^ p.cells as u64)
    }

    fn individualize(p: &mut Part, v: u8) {
        let s = p.cell[v as usize] as usize;
        let l = p.len[s] as usize;
        let at = (s..s + l).find(|&i| p.lab[i] == v).unwrap();
        p.lab.swap(s, at);
        p.len[s] = 1;
        p.len[s + 1] = (l - 1) as u8;
        for i in s + 1..s + l {
            p.cell[p.lab[i] as usize] = (s + 1) as u8;
        }
        p.cells += 1;
    }

    fn leaf(&self, p: &Part) -> (Perm, Certificate) {
        let nv = self.s.nv;
        let perm: Perm = (0..nv).map(|v| p.cell[v]).collect();
        let mut colors = vec![0u32; nv];
        for v in 0..nv {
            colors[perm[v] as usize] = self.s.colors[v];
        }
        let mut edges: Vec<(u32, u64)> = self.s.edges.iter().map(|&(c, m)| (c, permute_mask(m, &perm))).collect();
        edges.sort_unstable();
        (perm, Certificate { colors, edges })
    }

    /// g = a⁻¹ ∘ b: maps v to the vertex that `a` places where `b` places v.
    fn automorphism(a: &[u8], b: &[u8]) -> Perm {
        let mut inv = vec![0u8; a.len()];
        for (v, &p) in a.iter().enumerate() {
            inv[p as usize] = v as u8;
        }
        b.iter().map(|&p| inv[p as usize]).collect()
    }

    fn orbits_fixing(&self, prefix: &[u8]) -> Vec<u8> {
        let nv = self.s.nv;
        let mut parent: Vec<u8> = (0..nv as u8).collect();
        fn find(p: &mut [u8], mut x: u8) -> u8 {
            while p[x as usize] != x {
                p[x as usize] = p[p[x as usize] as usize];
                x = p[x as usize];
            }
            x
        }
        for g in &self.gens {
            if prefix.iter().any(|&v| g[v as usize] != v) {
                continue;
            }
            for v in 0..nv {
                let (a, b) = (find(&mut parent, v as u8), find(&mut parent, g[v]));
                if a != b {
                    let (lo, hi) = if a < b { (a, b) } else { (b, a) };
                    parent[hi as usize] = lo;
                }
            }
        }
        (0..nv as u8).map(|v| find(&mut parent, v)).collect()
    }

    /// Current path against the best leaf's trace, compared up to this level.
    /// The best leaf may change while a subtree is open, so this is never cached.
    fn cmp_best(&self) -> Ordering {
        for (i, t) in self.trace.iter().enumerate() {
            match self.best_trace.get(i) {
                Some(b) if t == b => continue,
                Some(b) => return t.cmp(b),
                None => return Ordering::Less,
            }
        }
        Ordering::Equal
    }

    fn dfs(&mut self, p: Part, prefix: &mut Vec<u8>, mut eq_first: bool) -> Walk {
        let level = prefix.len();
        let t = *self.trace.last().unwrap();
        let building = self.first_leaf.is_none();
        let mut cmp_best = Ordering::Equal;
        if building {
            self.first_trace.push(t);
        } else {
            eq_first = eq_first && self.first_trace.get(level) == Some(&t);
            cmp_best = self.cmp_best();
            if self.prune && !eq_first && cmp_best == Ordering::Greater {
                return Walk::Done;
            }
        }
        if p.cells == self.s.nv {
            let (perm, cert) = self.leaf(&p);
            if building {
                self.best_trace = self.first_trace.clone();
                self.first_leaf = Some((perm.clone(), cert.clone()));
                self.best_leaf = Some((perm, cert));
                return Walk::Done;
            }
            let first = self.first_leaf.as_ref().unwrap();
            if self.prune && eq_first && cert == first.1 {
                let g = Self::automorphism(&first.0, &perm);
                self.gens.push(g);
                let common = prefix.iter().zip(&self.first_path).take_while(|(a, b)| a == b).count();
                return Walk::JumpTo(common);
            }
            let best = self.best_leaf.as_ref().unwrap();
            let order = cmp_best.then_with(|| cert.cmp(&best.1));
            match order {
                Ordering::Less => {
                    self.best_trace = self.trace.clone();
                    self.best_leaf = Some((perm, cert));
                }
                Ordering::Equal => {
                    let g = Self::automorphism(&best.0, &perm);
                    if g.iter().enumerate().any(|(v, &x)| v as u8 != x) {
                        self.gens.push(g);
                    }
                }
                Ordering::Greater => {}
            }
            return Walk::Done;
        }
        let target = {
            let mut s = 0usize;
            while p.len[s] == 1 {
                s += p.len[s] as usize;
            }
            s
        };
        let mut children: Vec<u8> = p.lab[target..target + p.len[target] as usize].to_vec();
        children.sort_unstable();
        let mut explored: Vec<u8> = Vec::new();
        let mut orbits = self.orbits_fixing(prefix);
        let mut known = self.gens.len();
        for &v in &children {
            if self.gens.len() != known {
                orbits = self.orbits_fixing(prefix);
                known = self.gens.len();
            }
            if self.prune && explored.iter().any(|&u| orbits[u as usize] == orbits[v as usize]) {
                continue;
            }
            explored.push(v);
            let mut child = p.clone();
            Self::individualize(&mut child, v);
            let t = self.refine(&mut child);
            if self.first_leaf.is_none() {
                self.first_path.push(v);
            }
            prefix.push(v);
            self.trace.push(t);
            let r = self.dfs(child, prefix, eq_first);
            self.trace.pop();
            prefix.pop();
            if let Walk::JumpTo(l) = r {
                if l < level {
                    return r;
                }
            }
        }
        Walk::Done
    }
}

/// Canonical form, automorphism generators and group order.
pub fn canonize(s: &Structure) -> Canonical {
    canonize_with(s, true)
}

/// The same canonical form found by visiting every leaf of the search tree.
#[doc(hidden)]
pub fn canonize_exhaustive(s: &Structure) -> Canonical {
    canonize_with(s, false)
}

fn canonize_with(s: &Structure, prune: bool) -> Canonical {
    let nv = s.nv;
    if nv == 0 {
        return Canonical {
            labeling: Vec::new(),
            certificate: s.certificate(),
            generators: Vec::new(),
            group_order: 1,
        };
    }
    let mut inc = vec![Vec::new(); nv];
    for (i, &(_, mask)) in s.edges.iter().enumerate() {
        let mut m = mask;
        while m != 0 {
            let u = m.trailing_zeros() as usize;
            m &= m - 1;
            inc[u].push(i as u32);
        }
    }
    let mut search = Search {
        s,
        inc,
        edge_hash: vec![0; s.edges.len()],
        first_trace: Vec::new(),
        first_path: Vec::new(),
        first_leaf: None,
        best_trace: Vec::new(),
        best_leaf: None,
        trace: Vec::new(),
        gens: Vec::new(),
        prune,
    };
    let mut p = Part { lab: [0; 64], cell: [0; 64], len: [0; 64], cells: 0 };
    let mut verts: Vec<u8> = (0..nv as u8).collect();
    verts.sort_by_key(|&v| (s.colors[v as usize], v));
    let mut start = 0usize;
    for (i, &v) in verts.iter().enumerate() {
        if i > 0 && s.colors[v as usize] != s.colors[verts[i - 1] as usize] {
            p.len[start] = (i - start) as u8;
            p.cells += 1;
            start = i;
        }
        p.lab[i] = v;
        p.cell[v as usize] = start as u8;
    }
    p.len[start] = (nv - start) as u8;
    p.cells += 1;
    let t = search.refine(&mut p);
    search.trace.push(t);
    search.dfs(p, &mut Vec::new(), true);

    let mut order: u128 = 1;
    for level in 0..search.first_path.len() {
        let orbits = search.orbits_fixing(&search.first_path[..level]);
        let v = search.first_path[level];
        let size = orbits.iter().filter(|&&o| o == orbits[v as usize]).count() as u128;
        order = order.saturating_mul(size);
    }
    let (labeling, certificate) = search.best_leaf.take().unwrap();
    Canonical { labeling, certificate, generators: search.gens, group_order: order }
}

pub fn compose(a: &[u8], b: &[u8]) -> Perm {
    // (a ∘ b)(v) = a(b(v))
    b.iter().map(|&x| a[x as usize]).collect()
}

pub fn inverse(a: &[u8]) -> Perm {
    let mut inv = vec![0u8; a.len()];
    for (v, &x) in a.iter().enumerate() {
        inv[x as usize] = v as u8;
    }
    inv
}

pub fn identity(n: usize) -> Perm {
    (0..n as u8).collect()
}

/// All elements of the group generated by `gens`, or None past `limit`.
pub fn closure(n: usize, gens: &[Perm], limit: usize) -> Option<Vec<Perm>> {
    use std::collections::HashSet;
    let id = identity(n);
    let mut seen: HashSet<Perm> = HashSet::from([id.clone()]);
    let mut elems = vec![id];
    let mut i = 0;
    while i < elems.len() {
        for g in gens {
            let h = compose(g, &elems[i]);
            if seen.insert(h.clone()) {
                if elems.len() >= limit {
                    return None;
                }
                elems.push(h);
            }
        }
        i += 1;
    }
    elems.sort_unstable();
    Some(elems)
}
