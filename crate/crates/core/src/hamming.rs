//! The Hamming graph H(n,q): words, ranks, distances, spheres, faces and code sets.
//!
//! Ranks are little-endian mixed radix: coordinate 0 is the least significant
//! digit, so `rank = Σ x_j q^j`. Every file format in this crate uses the same
//! encoding.

use std::fmt;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest universe for which a dense bitset mirror is built.
pub const DENSE_LIMIT: u64 = 1 << 30;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Space {
    n: usize,
    q: usize,
}

impl Space {
    pub fn new(n: usize, q: usize) -> Result<Self> {
        let bad = |reason: &str| Error::Space { n, q, reason: reason.to_string() };
        if n == 0 || n > 64 {
            return Err(bad("n must be in 1..=64"));
        }
        if !(2..=16).contains(&q) {
            return Err(bad("q must be in 2..=16"));
        }
        if (q as u64).checked_pow(n as u32).is_none() {
            return Err(bad("q^n does not fit in 64 bits"));
        }
        Ok(Space { n, q })
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn q(&self) -> usize {
        self.q
    }

    /// Number of vertices, q^n.
    #[inline]
    pub fn size(&self) -> u64 {
        (self.q as u64).pow(self.n as u32)
    }

    /// Vertex degree n(q-1).
    #[inline]
    pub fn degree(&self) -> usize {
        self.n * (self.q - 1)
    }

    /// q^j for every coordinate j.
    pub fn strides(&self) -> Vec<u64> {
        let mut s = Vec::with_capacity(self.n);
        let mut p = 1u64;
        for _ in 0..self.n {
            s.push(p);
            p = p.wrapping_mul(self.q as u64);
        }
        s
    }

    pub fn word(&self, symbols: &[u8]) -> Result<Word> {
        Word::new(*self, symbols.to_vec())
    }

    pub fn zero(&self) -> Word {
        Word { space: *self, symbols: vec![0; self.n] }
    }

    pub fn check_rank(&self, rank: u64) -> Result<()> {
        if rank >= self.size() {
            return Err(Error::Rank { rank, size: self.size() });
        }
        Ok(())
    }

    /// Symbols of a rank, coordinate 0 first.
    pub fn digits(&self, mut rank: u64) -> Vec<u8> {
        let q = self.q as u64;
        (0..self.n)
            .map(|_| {
                let d = (rank % q) as u8;
                rank /= q;
                d
            })
            .collect()
    }

    pub fn rank_of(&self, symbols: &[u8]) -> u64 {
        symbols.iter().rev().fold(0u64, |acc, &s| acc * self.q as u64 + s as u64)
    }

    pub fn weight_of(&self, rank: u64) -> usize {
        if self.q == 2 {
            return rank.count_ones() as usize;
        }
        let q = self.q as u64;
        let mut r = rank;
        let mut w = 0;
        while r > 0 {
            if r % q != 0 {
                w += 1;
            }
            r /= q;
        }
        w
    }

    /// Hamming distance between two ranks of this space.
    pub fn rank_distance(&self, a: u64, b: u64) -> usize {
        if self.q == 2 {
            return (a ^ b).count_ones() as usize;
        }
        let q = self.q as u64;
        let (mut x, mut y) = (a, b);
        let mut d = 0;
        for _ in 0..self.n {
            if x % q != y % q {
                d += 1;
            }
            x /= q;
            y /= q;
        }
        d
    }

    /// Calls `f` for every neighbor of `rank`.
    #[inline]
    pub fn for_each_neighbor(&self, rank: u64, strides: &[u64], mut f: impl FnMut(u64)) {
        let q = self.q as u64;
        for &s in strides {
            let digit = (rank / s) % q;
            let base = rank - digit * s;
            for t in 0..q {
                if t != digit {
                    f(base + t * s);
                }
            }
        }
    }

    pub fn neighbors(&self, rank: u64) -> Vec<u64> {
        let strides = self.strides();
        let mut out = Vec::with_capacity(self.degree());
        self.for_each_neighbor(rank, &strides, |r| out.push(r));
        out
    }
}

impl fmt::Display for Space {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "H({},{})", self.n, self.q)
    }
}

/// A vertex of H(n,q).
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Word {
    space: Space,
    symbols: Vec<u8>,
}

impl Word {
    pub fn new(space: Space, symbols: Vec<u8>) -> Result<Self> {
        if symbols.len() != space.n {
            return Err(Error::Space {
                n: space.n,
                q: space.q,
                reason: format!("word has length {}", symbols.len()),
            });
        }
        if let Some((coord, &s)) = symbols.iter().enumerate().find(|(_, &s)| s as usize >= space.q) {
            return Err(Error::Symbol { coord, symbol: s as usize, q: space.q });
        }
        Ok(Word { space, symbols })
    }

    pub fn from_rank(space: Space, rank: u64) -> Result<Self> {
        space.check_rank(rank)?;
        Ok(Word { space, symbols: space.digits(rank) })
    }

    pub fn space(&self) -> Space {
        self.space
    }

    pub fn symbols(&self) -> &[u8] {
        &self.symbols
    }

    pub fn rank(&self) -> u64 {
        self.space.rank_of(&self.symbols)
    }

    pub fn weight(&self) -> usize {
        self.symbols.iter().filter(|&&s| s != 0).count()
    }

    /// A copy with coordinate `coord` set to `symbol`.
    pub fn with(&self, coord: usize, symbol: u8) -> Result<Self> {
        let mut s = self.symbols.clone();
        s[coord] = symbol;
        Word::new(self.space, s)
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.space.q <= 10 {
            for &s in &self.symbols {
                write!(f, "{s}")?;
            }
            Ok(())
        } else {
            let parts: Vec<String> = self.symbols.iter().map(|s| s.to_string()).collect();
            write!(f, "{}", parts.join(","))
        }
    }
}

/// Number of coordinates in which two words differ.
pub fn distance(a: &Word, b: &Word) -> Result<usize> {
    if a.space != b.space {
        return Err(Error::SpaceMismatch(a.space.n, a.space.q, b.space.n, b.space.q));
    }
    Ok(a.symbols.iter().zip(&b.symbols).filter(|(x, y)| x != y).count())
}

/// A set of vertices, stored as a strictly increasing rank list.
#[derive(Debug)]
pub struct CodeSet {
    space: Space,
    members: Vec<u64>,
    bits: OnceLock<Option<Vec<u64>>>,
}

impl Clone for CodeSet {
    fn clone(&self) -> Self {
        CodeSet { space: self.space, members: self.members.clone(), bits: OnceLock::new() }
    }
}

impl PartialEq for CodeSet {
    fn eq(&self, other: &Self) -> bool {
        self.space == other.space && self.members == other.members
    }
}

impl Eq for CodeSet {}

impl CodeSet {
    /// Builds a code from arbitrary ranks; duplicates are an error.
    pub fn from_ranks(space: Space, mut ranks: Vec<u64>) -> Result<Self> {
        ranks.sort_unstable();
        for w in ranks.windows(2) {
            if w[0] == w[1] {
                return Err(Error::Duplicate(Word::from_rank(space, w[0])?.to_string()));
            }
        }
        if let Some(&last) = ranks.last() {
            space.check_rank(last)?;
        }
        Ok(CodeSet { space, members: ranks, bits: OnceLock::new() })
    }

    /// Builds a code, silently merging duplicates.
    pub fn from_ranks_dedup(space: Space, mut ranks: Vec<u64>) -> Result<Self> {
        ranks.sort_unstable();
        ranks.dedup();
        Self::from_ranks(space, ranks)
    }

    pub fn from_words(space: Space, words: &[Word]) -> Result<Self> {
        for w in words {
            if w.space != space {
                return Err(Error::SpaceMismatch(space.n, space.q, w.space.n, w.space.q));
            }
        }
        Self::from_ranks(space, words.iter().map(Word::rank).collect())
    }

    pub fn space(&self) -> Space {
        self.space
    }

    pub fn members(&self) -> &[u64] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn words(&self) -> impl Iterator<Item = Word> + '_ {
        self.members.iter().map(move |&r| Word { space: self.space, symbols: self.space.digits(r) })
    }

    /// Dense membership bitset, built on first use when q^n ≤ 2^30.
    pub fn bitset(&self) -> Option<&[u64]> {
        self.bits
            .get_or_init(|| {
                let size = self.space.size();
                if size > DENSE_LIMIT {
                    return None;
                }
                let mut bits = vec![0u64; (size as usize).div_ceil(64)];
                for &r in &self.members {
                    bits[(r / 64) as usize] |= 1 << (r % 64);
                }
                Some(bits)
            })
            .as_deref()
    }

    pub fn contains(&self, rank: u64) -> bool {
        match self.bitset() {
            Some(bits) if rank < self.space.size() => bits[(rank / 64) as usize] >> (rank % 64) & 1 == 1,
            _ => self.members.binary_search(&rank).is_ok(),
        }
    }

    /// The complement within the whole space.
    pub fn complement(&self) -> Result<CodeSet> {
        let size = self.space.size();
        let mut out = Vec::with_capacity((size as usize).saturating_sub(self.len()));
        let mut it = self.members.iter().peekable();
        for r in 0..size {
            if it.peek() == Some(&&r) {
                it.next();
            } else {
                out.push(r);
            }
        }
        CodeSet::from_ranks(self.space, out)
    }

    /// Translate by `shift` (componentwise addition mod q).
    pub fn translate(&self, shift: &Word) -> Result<CodeSet> {
        let q = self.space.q as u8;
        let ranks = self
            .words()
            .map(|w| {
                let s: Vec<u8> = w.symbols.iter().zip(&shift.symbols).map(|(a, b)| (a + b) % q).collect();
                self.space.rank_of(&s)
            })
            .collect();
        CodeSet::from_ranks(self.space, ranks)
    }

    /// Members of a given weight.
    pub fn of_weight(&self, w: usize) -> Vec<u64> {
        self.members.iter().copied().filter(|&r| self.space.weight_of(r) == w).collect()
    }
}

/// All words at distance exactly `d` from `center`.
pub fn sphere(center: &Word, d: usize) -> Result<CodeSet> {
    let space = center.space;
    if d > space.n {
        return Err(Error::Infeasible(format!("sphere radius {d} exceeds n={}", space.n)));
    }
    let strides = space.strides();
    let base = center.rank();
    let q = space.q as u64;
    let mut out = Vec::new();
    // choose d coordinates, then a nonzero offset for each
    let mut coords: Vec<usize> = (0..d).collect();
    loop {
        let mut offs = vec![1u64; d];
        loop {
            let mut r = base;
            for (&c, &o) in coords.iter().zip(&offs) {
                let digit = center.symbols[c] as u64;
                r = r - digit * strides[c] + ((digit + o) % q) * strides[c];
            }
            out.push(r);
            // next offset tuple
            let mut i = 0;
            while i < d && offs[i] == q - 1 {
                offs[i] = 1;
                i += 1;
            }
            if i == d {
                break;
            }
            offs[i] += 1;
        }
        if !next_combination(&mut coords, space.n) {
            break;
        }
    }
    CodeSet::from_ranks(space, out)
}

/// Advances a strictly increasing index tuple to the next k-subset of 0..n.
pub(crate) fn next_combination(c: &mut [usize], n: usize) -> bool {
    let k = c.len();
    if k == 0 {
        return false;
    }
    let mut i = k;
    while i > 0 {
        i -= 1;
        if c[i] < n - k + i {
            c[i] += 1;
            for j in i + 1..k {
                c[j] = c[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// Minimum distance over all pairs of distinct members.
pub fn min_distance(code: &CodeSet) -> Result<usize> {
    if code.len() < 2 {
        return Err(Error::TooFewWords(code.len()));
    }
    let space = code.space;
    let m = code.members();
    let mut best = space.n;
    for i in 0..m.len() {
        for j in i + 1..m.len() {
            let d = space.rank_distance(m[i], m[j]);
            if d < best {
                best = d;
                if best == 1 {
                    return Ok(1);
                }
            }
        }
    }
    Ok(best)
}

/// A k-face: the words agreeing with `anchor` outside the `free` coordinates.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Face {
    space: Space,
    free: Vec<usize>,
    anchor: Word,
}

impl Face {
    /// `anchor` is normalized so that its free coordinates are zero.
    pub fn new(anchor: &Word, mut free: Vec<usize>) -> Result<Self> {
        free.sort_unstable();
        free.dedup();
        let space = anchor.space;
        if free.iter().any(|&c| c >= space.n) {
            return Err(Error::Infeasible("free coordinate out of range".into()));
        }
        let mut symbols = anchor.symbols.clone();
        for &c in &free {
            symbols[c] = 0;
        }
        Ok(Face { space, free, anchor: Word { space, symbols } })
    }

    pub fn space(&self) -> Space {
        self.space
    }

    pub fn free(&self) -> &[usize] {
        &self.free
    }

    pub fn anchor(&self) -> &Word {
        &self.anchor
    }

    pub fn dim(&self) -> usize {
        self.free.len()
    }

    pub fn expand(&self) -> Vec<u64> {
        let strides = self.space.strides();
        let q = self.space.q as u64;
        let mut out = vec![self.anchor.rank()];
        for &c in &self.free {
            let cur = out.clone();
            for t in 1..q {
                out.extend(cur.iter().map(|&r| r + t * strides[c]));
            }
        }
        out.sort_unstable();
        out
    }

    pub fn contains(&self, w: &Word) -> bool {
        (0..self.space.n).all(|c| self.free.binary_search(&c).is_ok() || w.symbols[c] == self.anchor.symbols[c])
    }

    /// Distance from a word to the nearest member of the face.
    pub fn distance_to_word(&self, w: &Word) -> usize {
        (0..self.space.n)
            .filter(|c| self.free.binary_search(c).is_err() && w.symbols[*c] != self.anchor.symbols[*c])
            .count()
    }

    /// Distance between the nearest members of two faces.
    pub fn distance_to_face(&self, other: &Face) -> usize {
        (0..self.space.n)
            .filter(|c| {
                self.free.binary_search(c).is_err()
                    && other.free.binary_search(c).is_err()
                    && self.anchor.symbols[*c] != other.anchor.symbols[*c]
            })
            .count()
    }
}

/// All rows (1-faces) of the space; these are its maximal cliques.
pub fn enumerate_rows(space: Space) -> Vec<Face> {
    let strides = space.strides();
    let q = space.q as u64;
    let mut rows = Vec::with_capacity(space.n * (space.size() / q) as usize);
    for j in 0..space.n {
        for r in 0..space.size() {
            if (r / strides[j]) % q == 0 {
                let anchor = Word { space, symbols: space.digits(r) };
                rows.push(Face { space, free: vec![j], anchor });
            }
        }
    }
    rows
}

pub fn binomial(n: usize, k: usize) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut r = 1u64;
    for i in 0..k {
        r = r * (n - i) as u64 / (i + 1) as u64;
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(space: Space, s: &str) -> Word {
        let digits: Vec<u8> = s.bytes().map(|b| b - b'0').collect();
        Word::new(space, digits).unwrap()
    }

    #[test]
    fn distance_examples() {
        let s4 = Space::new(4, 2).unwrap();
        assert_eq!(distance(&w(s4, "0000"), &w(s4, "0000")).unwrap(), 0);
        let s13 = Space::new(13, 2).unwrap();
        let a = w(s13, "0001000001011");
        assert_eq!(distance(&a, &a.with(4, 1).unwrap()).unwrap(), 1);
        let h84 = Space::new(8, 4).unwrap();
        assert_eq!(distance(&w(h84, "11110000"), &w(h84, "12201000")).unwrap(), 4);
        assert!(matches!(distance(&w(s4, "0000"), &a), Err(Error::SpaceMismatch(..))));
    }

    #[test]
    fn sphere_sizes() {
        let s = Space::new(13, 2).unwrap();
        let z = s.zero();
        assert_eq!(sphere(&z, 0).unwrap().members(), &[0]);
        assert_eq!(sphere(&z, 1).unwrap().len(), 13);
        let h = Space::new(5, 4).unwrap();
        let c = w(h, "01230");
        let sp = sphere(&c, 2).unwrap();
        assert_eq!(sp.len(), 90);
        assert!(sp.words().all(|x| distance(&x, &c).unwrap() == 2));
        assert!(sphere(&c, 6).is_err());
    }

    #[test]
    fn min_distance_small() {
        let s = Space::new(3, 2).unwrap();
        let c = CodeSet::from_ranks(s, vec![0, 7]).unwrap();
        assert_eq!(min_distance(&c).unwrap(), 3);
        let one = CodeSet::from_ranks(s, vec![0]).unwrap();
        assert!(matches!(min_distance(&one), Err(Error::TooFewWords(1))));
    }

    #[test]
    fn rows_of_h54() {
        let s = Space::new(5, 4).unwrap();
        let rows = enumerate_rows(s);
        assert_eq!(rows.len(), 1280);
        for row in rows.iter().step_by(37) {
            let e = row.expand();
            assert_eq!(e.len(), 4);
            for i in 0..4 {
                for j in i + 1..4 {
                    assert_eq!(s.rank_distance(e[i], e[j]), 1);
                }
            }
        }
        assert_eq!(enumerate_rows(Space::new(2, 2).unwrap()).len(), 4);
    }

    #[test]
    fn code_set_rejects_duplicates_and_mirrors_bits() {
        let s = Space::new(4, 3).unwrap();
        assert!(CodeSet::from_ranks(s, vec![3, 5, 3]).is_err());
        assert!(CodeSet::from_ranks(s, vec![81]).is_err());
        let c = CodeSet::from_ranks(s, vec![80, 2, 40]).unwrap();
        assert_eq!(c.members(), &[2, 40, 80]);
        for r in 0..81 {
            assert_eq!(c.contains(r), c.members().contains(&r));
        }
        assert_eq!(c.complement().unwrap().len(), 78);
    }

    #[test]
    fn face_expansion() {
        let s = Space::new(6, 3).unwrap();
        let f = Face::new(&w(s, "120210"), vec![1, 4]).unwrap();
        let e = f.expand();
        assert_eq!(e.len(), 9);
        assert!(e.iter().all(|&r| f.contains(&Word::from_rank(s, r).unwrap())));
        let g = Face::new(&w(s, "000000"), vec![0]).unwrap();
        // outside {0,1,4}: coordinates 2,3,5 hold 0,2,0 vs 0,0,0
        assert_eq!(f.distance_to_face(&g), 1);
    }

    #[test]
    fn space_limits() {
        assert!(Space::new(0, 2).is_err());
        assert!(Space::new(3, 17).is_err());
        assert!(Space::new(64, 2).is_err());
        assert!(Space::new(63, 2).is_ok());
        assert_eq!(Space::new(41, 3).unwrap_err().to_string().contains("64 bits"), true);
    }
}
