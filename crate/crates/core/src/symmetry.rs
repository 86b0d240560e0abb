//! Automorphisms of H(n,q): per-coordinate symbol permutations combined with a
//! coordinate permutation. Canonical forms and stabilizers are computed by
//! encoding objects as colored hypergraphs for [`crate::canon`].

use std::collections::HashSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::canon::{self, Structure};
use crate::error::{parse_err, Error, Result};
use crate::hamming::{CodeSet, Space};
use crate::partitions::VertexPartition;

/// Which subgroup of Aut(H(n,q)) defines equivalence.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Group {
    Full,
    /// Elements fixing the all-zero word: symbol permutations fixing 0, with any coordinate permutation.
    ZeroStabilizer,
    CoordinatePermutations,
}

/// (g·x)_j = symbol_perms[j]( x_{coord_perm⁻¹(j)} ).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SymmetryElement {
    coord_perm: Vec<u8>,
    symbol_perms: Vec<Vec<u8>>,
}

fn is_perm(p: &[u8], n: usize) -> bool {
    let mut seen = vec![false; n];
    p.len() == n && p.iter().all(|&x| (x as usize) < n && !std::mem::replace(&mut seen[x as usize], true))
}

impl SymmetryElement {
    pub fn new(coord_perm: Vec<u8>, symbol_perms: Vec<Vec<u8>>) -> Result<Self> {
        let n = coord_perm.len();
        let q = symbol_perms.first().map_or(0, |s| s.len());
        if !is_perm(&coord_perm, n) || symbol_perms.len() != n || symbol_perms.iter().any(|s| !is_perm(s, q)) {
            return Err(Error::Infeasible("malformed symmetry element".into()));
        }
        Ok(SymmetryElement { coord_perm, symbol_perms })
    }

    pub fn identity(space: Space) -> Self {
        SymmetryElement {
            coord_perm: canon::identity(space.n()),
            symbol_perms: vec![canon::identity(space.q()); space.n()],
        }
    }

    pub fn from_coord_perm(space: Space, coord_perm: Vec<u8>) -> Result<Self> {
        SymmetryElement::new(coord_perm, vec![canon::identity(space.q()); space.n()])
    }

    /// Translation by a word: symbol a at coordinate j becomes a + t_j mod q.
    pub fn translation(space: Space, t: &[u8]) -> Self {
        let q = space.q();
        let symbol_perms = t.iter().map(|&s| (0..q).map(|a| ((a + s as usize) % q) as u8).collect()).collect();
        SymmetryElement { coord_perm: canon::identity(space.n()), symbol_perms }
    }

    pub fn coord_perm(&self) -> &[u8] {
        &self.coord_perm
    }

    pub fn symbol_perms(&self) -> &[Vec<u8>] {
        &self.symbol_perms
    }

    pub fn n(&self) -> usize {
        self.coord_perm.len()
    }

    pub fn apply(&self, x: &[u8]) -> Vec<u8> {
        let mut y = vec![0u8; x.len()];
        for (i, &xi) in x.iter().enumerate() {
            let j = self.coord_perm[i] as usize;
            y[j] = self.symbol_perms[j][xi as usize];
        }
        y
    }

    pub fn apply_rank(&self, space: Space, rank: u64) -> u64 {
        space.rank_of(&self.apply(&space.digits(rank)))
    }

    pub fn apply_code(&self, code: &CodeSet) -> CodeSet {
        let space = code.space();
        let ranks = code.members().iter().map(|&r| self.apply_rank(space, r)).collect();
        CodeSet::from_ranks(space, ranks).expect("group elements are bijections")
    }

    /// Cell of g·v is the cell of v.
    pub fn apply_partition(&self, p: &VertexPartition) -> VertexPartition {
        let space = p.space();
        let mut cells = vec![0u16; p.cells().len()];
        for (v, &c) in p.cells().iter().enumerate() {
            cells[self.apply_rank(space, v as u64) as usize] = c;
        }
        VertexPartition::new(space, cells).expect("group elements are bijections")
    }

    /// (self ∘ other)·x = self·(other·x).
    pub fn compose(&self, other: &SymmetryElement) -> SymmetryElement {
        let coord_perm = canon::compose(&self.coord_perm, &other.coord_perm);
        let inv = canon::inverse(&self.coord_perm);
        let symbol_perms = (0..self.n())
            .map(|j| canon::compose(&self.symbol_perms[j], &other.symbol_perms[inv[j] as usize]))
            .collect();
        SymmetryElement { coord_perm, symbol_perms }
    }

    pub fn inverse(&self) -> SymmetryElement {
        let coord_perm = canon::inverse(&self.coord_perm);
        let symbol_perms = (0..self.n()).map(|i| canon::inverse(&self.symbol_perms[self.coord_perm[i] as usize])).collect();
        SymmetryElement { coord_perm, symbol_perms }
    }

    pub fn is_identity(&self) -> bool {
        self.coord_perm.iter().enumerate().all(|(i, &x)| i as u8 == x)
            && self.symbol_perms.iter().all(|s| s.iter().enumerate().all(|(a, &b)| a as u8 == b))
    }

    pub fn fixes_zero(&self) -> bool {
        self.symbol_perms.iter().all(|s| s[0] == 0)
    }

    pub fn order(&self) -> u64 {
        let mut g = self.clone();
        let mut k = 1;
        while !g.is_identity() {
            g = g.compose(self);
            k += 1;
        }
        k
    }
}

/// x ↦ v + π(x) on binary words, where π moves the bit at coordinate i to π(i).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PropelinearElement {
    pub v: Vec<u8>,
    pub pi: Vec<u8>,
}

/// How a cycle (a,b,…) acts on coordinates.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CycleConvention {
    /// The symbol at coordinate a moves to coordinate b.
    MovesTo,
    /// The symbol at coordinate b moves to coordinate a.
    TakesFrom,
}

/// Parses 1-based cycle notation such as `(1,2,5)(3,4,9)` or `Id`.
pub fn parse_cycles(text: &str, n: usize) -> Result<Vec<u8>> {
    let mut perm = canon::identity(n);
    let t = text.trim();
    if t.eq_ignore_ascii_case("id") || t.is_empty() {
        return Ok(perm);
    }
    let mut seen = vec![false; n];
    for cyc in t.split(')').map(str::trim).filter(|c| !c.is_empty()) {
        let body = cyc.strip_prefix('(').ok_or_else(|| parse_err(1, format!("bad cycle {cyc:?}")))?;
        let pts = body
            .split(',')
            .map(|x| match x.trim().parse::<usize>() {
                Ok(p) if (1..=n).contains(&p) => Ok(p - 1),
                _ => Err(parse_err(1, format!("bad point {x:?} in cycle"))),
            })
            .collect::<Result<Vec<_>>>()?;
        for (i, &a) in pts.iter().enumerate() {
            if std::mem::replace(&mut seen[a], true) {
                return Err(parse_err(1, format!("point {} repeated", a + 1)));
            }
            perm[a] = pts[(i + 1) % pts.len()] as u8;
        }
    }
    Ok(perm)
}

pub fn format_cycles(perm: &[u8]) -> String {
    let mut seen = vec![false; perm.len()];
    let mut out = String::new();
    for s in 0..perm.len() {
        if seen[s] || perm[s] as usize == s {
            continue;
        }
        let mut cyc = Vec::new();
        let mut x = s;
        while !seen[x] {
            seen[x] = true;
            cyc.push((x + 1).to_string());
            x = perm[x] as usize;
        }
        out.push_str(&format!("({})", cyc.join(",")));
    }
    if out.is_empty() {
        "Id".into()
    } else {
        out
    }
}

impl PropelinearElement {
    pub fn parse(word: &str, cycles: &str, convention: CycleConvention) -> Result<Self> {
        let v: Vec<u8> = word
            .trim()
            .bytes()
            .map(|b| match b {
                b'0' | b'1' => Ok(b - b'0'),
                _ => Err(parse_err(1, format!("bad bit {:?}", b as char))),
            })
            .collect::<Result<_>>()?;
        let p = parse_cycles(cycles, v.len())?;
        let pi = match convention {
            CycleConvention::MovesTo => p,
            CycleConvention::TakesFrom => canon::inverse(&p),
        };
        Ok(PropelinearElement { v, pi })
    }

    pub fn identity(n: usize) -> Self {
        PropelinearElement { v: vec![0; n], pi: canon::identity(n) }
    }

    fn permute(&self, x: &[u8]) -> Vec<u8> {
        let mut y = vec![0u8; x.len()];
        for (i, &b) in x.iter().enumerate() {
            y[self.pi[i] as usize] = b;
        }
        y
    }

    pub fn apply(&self, x: &[u8]) -> Vec<u8> {
        self.permute(x).iter().zip(&self.v).map(|(a, b)| a ^ b).collect()
    }

    /// (v₁,π₁)(v₂,π₂) = (v₁ + π₁(v₂), π₁π₂).
    pub fn compose(&self, other: &PropelinearElement) -> PropelinearElement {
        let v = self.permute(&other.v).iter().zip(&self.v).map(|(a, b)| a ^ b).collect();
        PropelinearElement { v, pi: canon::compose(&self.pi, &other.pi) }
    }

    pub fn is_identity(&self) -> bool {
        self.v.iter().all(|&b| b == 0) && self.pi.iter().enumerate().all(|(i, &x)| i as u8 == x)
    }

    pub fn order(&self) -> u64 {
        let mut g = self.clone();
        let mut k = 1;
        while !g.is_identity() {
            g = g.compose(self);
            k += 1;
        }
        k
    }
}

impl fmt::Display for PropelinearElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let w: String = self.v.iter().map(|&b| char::from(b'0' + b)).collect();
        write!(f, "({w}, {})", format_cycles(&self.pi))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PropelinearReport {
    pub order: u64,
    pub regular: bool,
    pub preserves_code: bool,
    pub generator_orders: Vec<u64>,
}

/// Closes the generated group (at most 10·|C| elements) and tests regularity on the code.
pub fn verify_propelinear(generators: &[PropelinearElement], code: &CodeSet) -> Result<PropelinearReport> {
    let space = code.space();
    if space.q() != 2 {
        return Err(Error::Space { n: space.n(), q: space.q(), reason: "propelinear structures are binary".into() });
    }
    let n = space.n();
    if generators.iter().any(|g| g.v.len() != n) {
        return Err(Error::SpaceMismatch(generators[0].v.len(), 2, n, 2));
    }
    let bound = 10 * code.len().max(1);
    let id = PropelinearElement::identity(n);
    let mut seen: HashSet<PropelinearElement> = HashSet::from([id.clone()]);
    let mut elems = vec![id];
    let mut i = 0;
    while i < elems.len() {
        for g in generators {
            let h = g.compose(&elems[i]);
            if seen.insert(h.clone()) {
                if elems.len() >= bound {
                    return Err(Error::Budget(format!("group exceeds {bound} elements")));
                }
                elems.push(h);
            }
        }
        i += 1;
    }
    let preserves_code = generators
        .iter()
        .all(|g| code.members().iter().all(|&r| code.contains(space.rank_of(&g.apply(&space.digits(r))))));
    let regular = preserves_code && elems.len() == code.len() && {
        let x0 = space.digits(code.members()[0]);
        let orbit: HashSet<u64> = elems.iter().map(|g| space.rank_of(&g.apply(&x0))).collect();
        orbit.len() == code.len()
    };
    Ok(PropelinearReport {
        order: elems.len() as u64,
        regular,
        preserves_code,
        generator_orders: generators.iter().map(PropelinearElement::order).collect(),
    })
}

/// A canonical representative: `bytes` is the serialized image `mapping · X`;
/// equal bytes iff the objects are equivalent.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CanonicalCertificate {
    pub bytes: Vec<u8>,
    pub group_order: u128,
    pub mapping: SymmetryElement,
}

impl CanonicalCertificate {
    pub fn digest(&self) -> String {
        hex::encode(Sha256::digest(&self.bytes))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Automorphisms {
    pub order: u128,
    pub generators: Vec<SymmetryElement>,
}

/// Hypergraph encoding of word sets. The binary coordinate-only groups use one
/// vertex per coordinate with words as supports; otherwise there are n
/// coordinate vertices and n·q point vertices (j, a) joined to coordinate j,
/// and each word is the hyperedge of its n points.
struct Model {
    space: Space,
    group: Group,
    support: bool,
}

impl Model {
    fn new(space: Space, group: Group) -> Result<Self> {
        let support = space.q() == 2 && group != Group::Full;
        let nv = if support { space.n() } else { space.n() * (space.q() + 1) };
        if nv > 64 {
            return Err(Error::Space { n: space.n(), q: space.q(), reason: "too many coordinates to canonicalize".into() });
        }
        Ok(Model { space, group, support })
    }

    fn structure(&self, sets: &[&[u64]]) -> Structure {
        let (n, q) = (self.space.n(), self.space.q());
        if self.support {
            let mut s = Structure::new(n);
            for (c, set) in sets.iter().enumerate() {
                for &r in *set {
                    s.add_edge(c as u32, r);
                }
            }
            return s;
        }
        let mut s = Structure::new(n * (q + 1));
        for j in 0..n {
            for a in 0..q {
                let v = n + j * q + a;
                let color = match self.group {
                    Group::ZeroStabilizer => 1 + (a != 0) as u32,
                    _ => 1 + a as u32,
                };
                s.set_color(v, color);
                s.add_edge(0, 1 << j | 1 << v);
            }
        }
        let strides = self.space.strides();
        for (c, set) in sets.iter().enumerate() {
            for &r in *set {
                let mut mask = 0u64;
                for (j, &st) in strides.iter().enumerate() {
                    let a = ((r / st) % q as u64) as usize;
                    mask |= 1 << (n + j * q + a);
                }
                s.add_edge(1 + c as u32, mask);
            }
        }
        s
    }

    /// The group element induced by a structure permutation.
    fn element(&self, perm: &[u8]) -> SymmetryElement {
        let (n, q) = (self.space.n(), self.space.q());
        let coord_perm: Vec<u8> = perm[..n].to_vec();
        if self.support {
            return SymmetryElement::from_coord_perm(self.space, coord_perm).unwrap();
        }
        let mut symbol_perms = vec![vec![0u8; q]; n];
        for j in 0..n {
            let target = coord_perm[j] as usize;
            let mut pts: Vec<(u8, usize)> = (0..q).map(|a| (perm[n + j * q + a], a)).collect();
            if pts.iter().all(|&(p, _)| (p as usize) >= n + target * q && (p as usize) < n + (target + 1) * q) {
                // a genuine automorphism: points go to points of the image coordinate
                for (p, a) in pts {
                    symbol_perms[target][a] = (p as usize - n - target * q) as u8;
                }
            } else {
                // a canonical labeling: symbols ordered by their points' positions
                pts.sort_unstable();
                for (b, (_, a)) in pts.into_iter().enumerate() {
                    symbol_perms[target][a] = b as u8;
                }
            }
        }
        SymmetryElement { coord_perm, symbol_perms }
    }
}

struct Canon {
    certificate: canon::Certificate,
    mapping: SymmetryElement,
    order: u128,
    generators: Vec<SymmetryElement>,
}

fn canon_direct(model: &Model, sets: &[&[u64]]) -> Canon {
    let c = canon::canonize(&model.structure(sets));
    Canon {
        mapping: model.element(&c.labeling),
        order: c.group_order,
        generators: c.generators.iter().map(|g| model.element(g)).collect(),
        certificate: c.certificate,
    }
}

/// Full-group canonical form. Every element is a zero-fixing element after a
/// translation, so the form is the least zero-stabilizer form of the sets
/// translated by −c over c in the smallest nonempty set.
fn canon_sets(space: Space, group: Group, sets: &[&[u64]]) -> Result<Canon> {
    if group != Group::Full {
        return Ok(canon_direct(&Model::new(space, group)?, sets));
    }
    let model = Model::new(space, Group::ZeroStabilizer)?;
    let anchor = (0..sets.len()).filter(|&i| !sets[i].is_empty()).min_by_key(|&i| (sets[i].len(), i));
    let Some(anchor) = anchor else {
        let mut c = canon_direct(&model, sets);
        c.order = c.order.saturating_mul(space.size() as u128);
        return Ok(c);
    };
    let q = space.q();
    let mut best: Option<(Canon, SymmetryElement)> = None;
    let mut ties: Vec<SymmetryElement> = Vec::new();
    for &c in sets[anchor] {
        let neg: Vec<u8> = space.digits(c).iter().map(|&x| ((q - x as usize) % q) as u8).collect();
        let shift = SymmetryElement::translation(space, &neg);
        let moved: Vec<Vec<u64>> = sets.iter().map(|set| set.iter().map(|&r| shift.apply_rank(space, r)).collect()).collect();
        let refs: Vec<&[u64]> = moved.iter().map(|m| &m[..]).collect();
        let k = canon_direct(&model, &refs);
        let order = best.as_ref().map_or(std::cmp::Ordering::Less, |(b, _)| k.certificate.cmp(&b.certificate));
        match order {
            std::cmp::Ordering::Less => {
                ties.clear();
                let full = k.mapping.compose(&shift);
                best = Some((k, shift));
                ties.push(full);
            }
            std::cmp::Ordering::Equal => ties.push(k.mapping.compose(&shift)),
            std::cmp::Ordering::Greater => {}
        }
    }
    let (k, shift) = best.unwrap();
    let mapping = ties[0].clone();
    let back = shift.inverse();
    let mut generators: Vec<SymmetryElement> = k.generators.iter().map(|a| back.compose(a).compose(&shift)).collect();
    let inv = mapping.inverse();
    generators.extend(ties[1..].iter().map(|m| inv.compose(m)));
    generators.retain(|g| !g.is_identity());
    Ok(Canon { certificate: k.certificate, mapping, order: k.order.saturating_mul(ties.len() as u128), generators })
}

fn rank_bytes(ranks: &mut Vec<u64>, out: &mut Vec<u8>) {
    ranks.sort_unstable();
    out.extend((ranks.len() as u64).to_le_bytes());
    for r in ranks.iter() {
        out.extend(r.to_le_bytes());
    }
}

/// Canonical form of a word set under the chosen group.
pub fn canonical_code(code: &CodeSet, group: Group) -> Result<CanonicalCertificate> {
    canonical_word_sets(code.space(), group, &[code.members()])
}

/// Canonical form of an ordered tuple of word sets (the sets keep their order).
pub fn canonical_word_sets(space: Space, group: Group, sets: &[&[u64]]) -> Result<CanonicalCertificate> {
    let c = canon_sets(space, group, sets)?;
    let mut bytes = vec![space.n() as u8, space.q() as u8];
    for set in sets {
        let mut img: Vec<u64> = set.iter().map(|&r| c.mapping.apply_rank(space, r)).collect();
        rank_bytes(&mut img, &mut bytes);
    }
    Ok(CanonicalCertificate { bytes, group_order: c.order, mapping: c.mapping })
}

fn implied_cell(members: &[Vec<u64>]) -> usize {
    (0..members.len()).rev().max_by_key(|&i| members[i].len()).unwrap()
}

/// Ordered-cell partitions; the largest cell (last on ties) is implied by the others.
pub fn canonical_partition(p: &VertexPartition, group: Group) -> Result<CanonicalCertificate> {
    let members = p.cell_members();
    let skip = implied_cell(&members);
    let sets: Vec<&[u64]> = members.iter().enumerate().map(|(i, m)| if i == skip { &[][..] } else { &m[..] }).collect();
    canonical_word_sets(p.space(), group, &sets)
}

pub fn automorphisms_of_sets(space: Space, group: Group, sets: &[&[u64]]) -> Result<Automorphisms> {
    let c = canon_sets(space, group, sets)?;
    Ok(Automorphisms { order: c.order, generators: c.generators })
}

pub fn automorphisms_of_code(code: &CodeSet, group: Group) -> Result<Automorphisms> {
    automorphisms_of_sets(code.space(), group, &[code.members()])
}

pub fn automorphisms_of_partition(p: &VertexPartition, group: Group) -> Result<Automorphisms> {
    let members = p.cell_members();
    let skip = implied_cell(&members);
    let sets: Vec<&[u64]> = members.iter().enumerate().map(|(i, m)| if i == skip { &[][..] } else { &m[..] }).collect();
    automorphisms_of_sets(p.space(), group, &sets)
}

/// Every element of a group given by generators, or Budget past `limit`.
pub fn group_closure(space: Space, generators: &[SymmetryElement], limit: usize) -> Result<Vec<SymmetryElement>> {
    let id = SymmetryElement::identity(space);
    let mut seen: HashSet<SymmetryElement> = HashSet::from([id.clone()]);
    let mut elems = vec![id];
    let mut i = 0;
    while i < elems.len() {
        for g in generators {
            let h = g.compose(&elems[i]);
            if seen.insert(h.clone()) {
                if elems.len() >= limit {
                    return Err(Error::Budget(format!("group exceeds {limit} elements")));
                }
                elems.push(h);
            }
        }
        i += 1;
    }
    elems.sort_unstable();
    Ok(elems)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn element_axioms() {
        let s = Space::new(3, 3).unwrap();
        let g = SymmetryElement::new(vec![1, 2, 0], vec![vec![1, 0, 2], vec![0, 2, 1], vec![2, 0, 1]]).unwrap();
        let h = SymmetryElement::new(vec![0, 2, 1], vec![vec![0, 1, 2], vec![1, 2, 0], vec![2, 1, 0]]).unwrap();
        for r in 0..s.size() {
            let x = s.digits(r);
            assert_eq!(g.compose(&h).apply(&x), g.apply(&h.apply(&x)));
            assert_eq!(g.inverse().apply(&g.apply(&x)), x);
        }
        assert!(g.compose(&g.inverse()).is_identity());
        assert_eq!(g.apply(&[1, 0, 0]), vec![1, 2, 2]);
    }

    #[test]
    fn cycles_round_trip() {
        let p = parse_cycles("(1,2,5)(3,4,9)", 13).unwrap();
        assert_eq!(p[0], 1);
        assert_eq!(p[4], 0);
        assert_eq!(format_cycles(&p), "(1,2,5)(3,4,9)");
        assert_eq!(format_cycles(&parse_cycles("Id", 4).unwrap()), "Id");
        assert!(parse_cycles("(1,1)", 4).is_err());
        assert!(parse_cycles("(1,5)", 4).is_err());
    }

    #[test]
    fn propelinear_composition() {
        let a = PropelinearElement::parse("110", "(1,2,3)", CycleConvention::MovesTo).unwrap();
        let b = PropelinearElement::parse("011", "(1,2)", CycleConvention::MovesTo).unwrap();
        for x in 0..8u8 {
            let w: Vec<u8> = (0..3).map(|i| (x >> i) & 1).collect();
            assert_eq!(a.compose(&b).apply(&w), a.apply(&b.apply(&w)));
        }
        let t = PropelinearElement::parse("111", "Id", CycleConvention::MovesTo).unwrap();
        assert_eq!(t.order(), 2);
        let s = Space::new(3, 2).unwrap();
        let rep = CodeSet::from_ranks(s, vec![0, 7]).unwrap();
        let r = verify_propelinear(&[t], &rep).unwrap();
        assert_eq!((r.order, r.regular), (2, true));
        let r = verify_propelinear(&[], &rep).unwrap();
        assert_eq!((r.order, r.regular), (1, false));
    }

    #[test]
    fn whole_space_group() {
        let s = Space::new(3, 2).unwrap();
        let all = CodeSet::from_ranks(s, (0..8).collect()).unwrap();
        assert_eq!(automorphisms_of_code(&all, Group::Full).unwrap().order, 48);
        assert_eq!(automorphisms_of_code(&all, Group::ZeroStabilizer).unwrap().order, 6);
        let s3 = Space::new(2, 3).unwrap();
        let all3 = CodeSet::from_ranks(s3, (0..9).collect()).unwrap();
        assert_eq!(automorphisms_of_code(&all3, Group::Full).unwrap().order, 72);
        assert_eq!(automorphisms_of_code(&all3, Group::ZeroStabilizer).unwrap().order, 8);
        assert_eq!(automorphisms_of_code(&all3, Group::CoordinatePermutations).unwrap().order, 2);
    }

    #[test]
    fn generators_preserve_code() {
        let s = Space::new(4, 3).unwrap();
        let code = CodeSet::from_ranks(s, vec![0, 13, 26, 40, 41, 80]).unwrap();
        for group in [Group::Full, Group::ZeroStabilizer, Group::CoordinatePermutations] {
            let a = automorphisms_of_code(&code, group).unwrap();
            for g in &a.generators {
                assert_eq!(g.apply_code(&code), code);
                if group != Group::Full {
                    assert!(g.fixes_zero());
                }
            }
            let all = group_closure(s, &a.generators, 100_000).unwrap();
            assert_eq!(all.len() as u128, a.order);
        }
    }

    #[test]
    fn canonical_images_agree() {
        let s = Space::new(4, 3).unwrap();
        let code = CodeSet::from_ranks(s, vec![1, 5, 30, 44, 79]).unwrap();
        let c = canonical_code(&code, Group::Full).unwrap();
        assert_eq!(canonical_code(&c.mapping.apply_code(&code), Group::Full).unwrap().bytes, c.bytes);
        let g = SymmetryElement::new(vec![3, 0, 2, 1], vec![vec![2, 0, 1], vec![0, 1, 2], vec![1, 2, 0], vec![0, 2, 1]]).unwrap();
        assert_eq!(canonical_code(&g.apply_code(&code), Group::Full).unwrap().bytes, c.bytes);
        let p = crate::partitions::distance_partition(&code).unwrap();
        let cp = canonical_partition(&p, Group::Full).unwrap();
        assert_eq!(canonical_partition(&g.apply_partition(&p), Group::Full).unwrap().bytes, cp.bytes);
        let z = canonical_code(&code, Group::ZeroStabilizer).unwrap();
        assert!(z.mapping.fixes_zero());
    }
}
