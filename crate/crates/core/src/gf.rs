//! Small Galois fields, linear codes, the Hamming family, and distance-distribution
//! transforms.

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hamming::{binomial, CodeSet, Space};

pub type Rational = Ratio<i128>;

/// Addition and multiplication tables of GF(q). Element 0 is the field zero and
/// element 1 the unit; prime-power elements are polynomial coefficient vectors
/// read as base-p digits.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FieldTable {
    q: usize,
    p: usize,
    add: Vec<u8>,
    mul: Vec<u8>,
}

impl FieldTable {
    pub fn new(q: usize) -> Result<Self> {
        // modulus coefficients, constant term first
        let (p, modulus): (usize, &[usize]) = match q {
            2 | 3 | 5 | 7 | 11 | 13 => (q, &[]),
            4 => (2, &[1, 1, 1]),
            8 => (2, &[1, 1, 0, 1]),
            9 => (3, &[1, 0, 1]),
            _ => return Err(Error::Field(q)),
        };
        let deg = if modulus.is_empty() { 1 } else { modulus.len() - 1 };
        let digits = |x: usize| -> Vec<usize> { (0..deg).map(|i| x / p.pow(i as u32) % p).collect() };
        let pack = |v: &[usize]| -> usize { v.iter().rev().fold(0, |acc, &d| acc * p + d) };
        let mut add = vec![0u8; q * q];
        let mut mul = vec![0u8; q * q];
        for a in 0..q {
            for b in 0..q {
                let (da, db) = (digits(a), digits(b));
                let sum: Vec<usize> = da.iter().zip(&db).map(|(x, y)| (x + y) % p).collect();
                add[a * q + b] = pack(&sum) as u8;
                if modulus.is_empty() {
                    mul[a * q + b] = (a * b % p) as u8;
                    continue;
                }
                let mut prod = vec![0usize; 2 * deg - 1];
                for i in 0..deg {
                    for j in 0..deg {
                        prod[i + j] = (prod[i + j] + da[i] * db[j]) % p;
                    }
                }
                // reduce by the monic modulus
                for top in (deg..prod.len()).rev() {
                    let c = prod[top];
                    if c != 0 {
                        for (i, &m) in modulus.iter().enumerate() {
                            let idx = top - deg + i;
                            prod[idx] = (prod[idx] + p * p - c * m % p) % p;
                        }
                    }
                }
                mul[a * q + b] = pack(&prod[..deg]) as u8;
            }
        }
        let field = FieldTable { q, p, add, mul };
        field.check_axioms()?;
        Ok(field)
    }

    fn check_axioms(&self) -> Result<()> {
        let q = self.q as u8;
        let bad = || Error::Field(self.q);
        for a in 0..q {
            if self.add(a, 0) != a || self.mul(a, 1) != a || self.mul(a, 0) != 0 {
                return Err(bad());
            }
            if (0..q).filter(|&b| self.add(a, b) == 0).count() != 1 {
                return Err(bad());
            }
            if a != 0 && (0..q).filter(|&b| self.mul(a, b) == 1).count() != 1 {
                return Err(bad());
            }
            for b in 0..q {
                if self.add(a, b) != self.add(b, a) || self.mul(a, b) != self.mul(b, a) {
                    return Err(bad());
                }
                for c in 0..q {
                    if self.add(self.add(a, b), c) != self.add(a, self.add(b, c))
                        || self.mul(self.mul(a, b), c) != self.mul(a, self.mul(b, c))
                        || self.mul(a, self.add(b, c)) != self.add(self.mul(a, b), self.mul(a, c))
                    {
                        return Err(bad());
                    }
                }
            }
        }
        Ok(())
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn characteristic(&self) -> usize {
        self.p
    }

    #[inline]
    pub fn add(&self, a: u8, b: u8) -> u8 {
        self.add[a as usize * self.q + b as usize]
    }

    #[inline]
    pub fn mul(&self, a: u8, b: u8) -> u8 {
        self.mul[a as usize * self.q + b as usize]
    }

    pub fn neg(&self, a: u8) -> u8 {
        (0..self.q as u8).find(|&b| self.add(a, b) == 0).unwrap()
    }

    pub fn inv(&self, a: u8) -> Option<u8> {
        (1..self.q as u8).find(|&b| self.mul(a, b) == 1)
    }

    pub fn sub(&self, a: u8, b: u8) -> u8 {
        self.add(a, self.neg(b))
    }
}

/// A linear code given by a full-rank generator matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearCode {
    field: FieldTable,
    n: usize,
    generator: Vec<Vec<u8>>,
}

impl LinearCode {
    pub fn new(field: FieldTable, generator: Vec<Vec<u8>>) -> Result<Self> {
        let n = generator.first().map(|r| r.len()).ok_or(Error::EmptyCode)?;
        if generator.iter().any(|r| r.len() != n || r.iter().any(|&x| x as usize >= field.q)) {
            return Err(Error::Infeasible("malformed generator matrix".into()));
        }
        let rank = row_reduce(&field, &mut generator.clone());
        if rank != generator.len() {
            return Err(Error::Infeasible(format!("generator has rank {rank} < {}", generator.len())));
        }
        Ok(LinearCode { field, n, generator })
    }

    pub fn field(&self) -> &FieldTable {
        &self.field
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.generator.len()
    }

    pub fn generator(&self) -> &[Vec<u8>] {
        &self.generator
    }

    pub fn space(&self) -> Result<Space> {
        Space::new(self.n, self.field.q)
    }

    pub fn size(&self) -> u64 {
        (self.field.q as u64).pow(self.dim() as u32)
    }

    /// Visits every codeword as a symbol vector.
    pub fn for_each_codeword(&self, mut f: impl FnMut(&[u8])) {
        let q = self.field.q as u8;
        let k = self.dim();
        let mut coeffs = vec![0u8; k];
        let mut word = vec![0u8; self.n];
        loop {
            word.iter_mut().for_each(|x| *x = 0);
            for (c, row) in coeffs.iter().zip(&self.generator) {
                if *c != 0 {
                    for (w, &g) in word.iter_mut().zip(row) {
                        *w = self.field.add(*w, self.field.mul(*c, g));
                    }
                }
            }
            f(&word);
            let mut i = 0;
            while i < k && coeffs[i] == q - 1 {
                coeffs[i] = 0;
                i += 1;
            }
            if i == k {
                break;
            }
            coeffs[i] += 1;
        }
    }

    pub fn codewords(&self) -> Result<CodeSet> {
        let space = self.space()?;
        let mut ranks = Vec::with_capacity(self.size() as usize);
        self.for_each_codeword(|w| ranks.push(space.rank_of(w)));
        CodeSet::from_ranks(space, ranks)
    }

    /// Minimum nonzero weight, by enumeration.
    pub fn min_distance(&self) -> usize {
        let mut best = self.n;
        self.for_each_codeword(|w| {
            let wt = w.iter().filter(|&&x| x != 0).count();
            if wt > 0 && wt < best {
                best = wt;
            }
        });
        best
    }

    /// "n k q" header followed by the generator rows.
    pub fn to_text(&self) -> String {
        let mut s = format!("{} {} {}\n", self.n, self.dim(), self.field.q);
        for row in &self.generator {
            s.push_str(&crate::io::format_symbols(row, self.field.q));
            s.push('\n');
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        let (ln, header) = lines.next().ok_or_else(|| crate::error::parse_err(1, "missing header"))?;
        let nums: Vec<usize> = header
            .split_whitespace()
            .map(|t| t.parse().map_err(|_| crate::error::parse_err(ln + 1, "bad header")))
            .collect::<Result<_>>()?;
        if nums.len() != 3 {
            return Err(crate::error::parse_err(ln + 1, "header must be \"n k q\""));
        }
        let (n, k, q) = (nums[0], nums[1], nums[2]);
        let field = FieldTable::new(q)?;
        let mut rows = Vec::with_capacity(k);
        for (ln, line) in lines {
            let row = crate::io::parse_symbols(line.trim(), n, q, ln + 1)?;
            rows.push(row);
        }
        if rows.len() != k {
            return Err(crate::error::parse_err(0, format!("expected {k} generator rows, found {}", rows.len())));
        }
        LinearCode::new(field, rows)
    }
}

/// Reduced row echelon form in place; returns the rank.
fn row_reduce(field: &FieldTable, m: &mut [Vec<u8>]) -> usize {
    let rows = m.len();
    let cols = m.first().map_or(0, |r| r.len());
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..rows).find(|&r| m[r][c] != 0) else { continue };
        m.swap(rank, p);
        let inv = field.inv(m[rank][c]).unwrap();
        for x in m[rank].iter_mut() {
            *x = field.mul(*x, inv);
        }
        for r in 0..rows {
            if r != rank && m[r][c] != 0 {
                let f = m[r][c];
                for j in 0..cols {
                    let v = field.mul(f, m[rank][j]);
                    m[r][j] = field.sub(m[r][j], v);
                }
            }
        }
        rank += 1;
    }
    rank
}

/// Basis of {x : H x^T = 0}.
fn null_space(field: &FieldTable, h: &[Vec<u8>]) -> Vec<Vec<u8>> {
    let mut m = h.to_vec();
    let rank = row_reduce(field, &mut m);
    let cols = h[0].len();
    let mut pivots = Vec::with_capacity(rank);
    for row in m.iter().take(rank) {
        pivots.push(row.iter().position(|&x| x != 0).unwrap());
    }
    let mut basis = Vec::new();
    for free in (0..cols).filter(|c| !pivots.contains(c)) {
        let mut v = vec![0u8; cols];
        v[free] = 1;
        for (r, &pc) in pivots.iter().enumerate() {
            v[pc] = field.neg(m[r][free]);
        }
        basis.push(v);
    }
    basis
}

/// Parity-check matrix of the q-ary Hamming code of redundancy m: one column per
/// projective point, normalized so the first nonzero entry is 1, in
/// lexicographic order.
pub fn hamming_parity_check(m: usize, field: &FieldTable) -> Vec<Vec<u8>> {
    let q = field.q as u8;
    let mut columns: Vec<Vec<u8>> = Vec::new();
    let mut v = vec![0u8; m];
    loop {
        // increment as a base-q counter, most significant digit first
        let mut i = m;
        while i > 0 && v[i - 1] == q - 1 {
            v[i - 1] = 0;
            i -= 1;
        }
        if i == 0 {
            break;
        }
        v[i - 1] += 1;
        if v.iter().find(|&&x| x != 0) == Some(&1) {
            columns.push(v.clone());
        }
    }
    (0..m).map(|r| columns.iter().map(|c| c[r]).collect()).collect()
}

/// The [(q^m-1)/(q-1), n-m, 3]_q Hamming code.
pub fn hamming_code(m: usize, field: &FieldTable) -> Result<LinearCode> {
    if m < 2 {
        return Err(Error::Infeasible("Hamming codes need m ≥ 2".into()));
    }
    let h = hamming_parity_check(m, field);
    let n = h[0].len();
    Space::new(n, field.q)?;
    LinearCode::new(field.clone(), null_space(field, &h))
}

/// Appends an overall parity coordinate making every coordinate sum zero.
pub fn extend_parity(code: &LinearCode) -> LinearCode {
    let f = &code.field;
    let generator = code
        .generator
        .iter()
        .map(|row| {
            let s = row.iter().fold(0u8, |acc, &x| f.add(acc, x));
            let mut r = row.clone();
            r.push(f.neg(s));
            r
        })
        .collect();
    LinearCode { field: f.clone(), n: code.n + 1, generator }
}

/// Hamming code with coordinates rescaled so that its parity extension has
/// minimum distance 4. Scalings are tried in lexicographic order with the first
/// coordinate fixed to 1; the first success is returned. Such a scaling exists
/// only for q = 2 and for some small even-characteristic cases such as m = 2, q = 4.
pub fn extended_hamming_code(m: usize, field: &FieldTable) -> Result<LinearCode> {
    const BUDGET: u64 = 1_000_000;
    let base = hamming_code(m, field)?;
    let n = base.n;
    let q = field.q as u8;
    if ((q - 1) as u64).checked_pow((n - 1) as u32).is_none_or(|c| c > BUDGET) {
        return Err(Error::Budget(format!("{}^{} coordinate scalings", q - 1, n - 1)));
    }
    let mut scale = vec![1u8; n];
    loop {
        let generator = base
            .generator
            .iter()
            .map(|row| row.iter().zip(&scale).map(|(&x, &s)| field.mul(x, s)).collect())
            .collect();
        let ext = extend_parity(&LinearCode { field: field.clone(), n, generator });
        if ext.min_distance() >= 4 {
            return Ok(ext);
        }
        let mut i = n;
        while i > 1 && scale[i - 1] == q - 1 {
            scale[i - 1] = 1;
            i -= 1;
        }
        if i == 1 {
            return Err(Error::Infeasible(format!("no coordinate scaling of the Hamming code over GF({q}) extends to distance 4")));
        }
        scale[i - 1] += 1;
    }
}

/// Full-weight codewords with symbols 1..q-1 shifted to 0..q-2, as a code in H(n,q-1).
pub fn max_weight_retraction(code: &LinearCode) -> Result<CodeSet> {
    let q = code.field.q;
    if q < 3 {
        return Err(Error::Infeasible("retraction needs q ≥ 3".into()));
    }
    let target = Space::new(code.n, q - 1)?;
    let mut ranks = Vec::new();
    let mut shifted = vec![0u8; code.n];
    code.for_each_codeword(|w| {
        if w.iter().all(|&x| x != 0) {
            for (s, &x) in shifted.iter_mut().zip(w) {
                *s = x - 1;
            }
            ranks.push(target.rank_of(&shifted));
        }
    });
    if ranks.is_empty() {
        return Err(Error::NoFullWeight);
    }
    CodeSet::from_ranks(target, ranks)
}

/// A_i = number of ordered pairs at distance i, divided by |C|.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DistanceDistribution {
    pub n: usize,
    pub q: usize,
    #[serde(with = "rational_list")]
    pub counts: Vec<Rational>,
}

/// Integers as JSON numbers, other values as "p/q" strings.
mod rational_list {
    use serde::de::Error as _;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    use super::Rational;

    #[derive(Serialize, Deserialize)]
    #[serde(untagged)]
    enum Entry {
        Int(i128),
        Frac(String),
    }

    pub fn serialize<S: Serializer>(v: &[Rational], s: S) -> Result<S::Ok, S::Error> {
        let entries: Vec<Entry> = v
            .iter()
            .map(|r| if r.is_integer() { Entry::Int(*r.numer()) } else { Entry::Frac(r.to_string()) })
            .collect();
        entries.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Rational>, D::Error> {
        Vec::<Entry>::deserialize(d)?
            .into_iter()
            .map(|e| match e {
                Entry::Int(i) => Ok(Rational::from_integer(i)),
                Entry::Frac(t) => t.parse().map_err(|_| D::Error::custom(format!("bad rational {t}"))),
            })
            .collect()
    }
}

impl DistanceDistribution {
    pub fn from_integers(n: usize, q: usize, counts: &[i128]) -> Self {
        DistanceDistribution { n, q, counts: counts.iter().map(|&c| Rational::from_integer(c)).collect() }
    }

    /// Σ A_i.
    pub fn total(&self) -> Rational {
        self.counts.iter().fold(Rational::from_integer(0), |a, &b| a + b)
    }

    pub fn is_nonnegative(&self) -> bool {
        self.counts.iter().all(|c| *c >= Rational::from_integer(0))
    }

    pub fn as_integers(&self) -> Option<Vec<i128>> {
        self.counts.iter().map(|c| c.is_integer().then(|| c.to_integer())).collect()
    }
}

pub fn distance_distribution(code: &CodeSet) -> Result<DistanceDistribution> {
    if code.is_empty() {
        return Err(Error::EmptyCode);
    }
    let space = code.space();
    let m = code.members();
    let mut pairs = vec![0i128; space.n() + 1];
    for i in 0..m.len() {
        pairs[0] += 1;
        for j in i + 1..m.len() {
            pairs[space.rank_distance(m[i], m[j])] += 2;
        }
    }
    let size = m.len() as i128;
    Ok(DistanceDistribution {
        n: space.n(),
        q: space.q(),
        counts: pairs.into_iter().map(|c| Rational::new(c, size)).collect(),
    })
}

/// K_k(i) = Σ_j (-1)^j (q-1)^{k-j} C(i,j) C(n-i,k-j).
pub fn krawtchouk(n: usize, q: usize, k: usize, i: usize) -> i128 {
    (0..=k)
        .map(|j| {
            let sign = if j % 2 == 0 { 1 } else { -1 };
            sign * ((q - 1) as i128).pow((k - j) as u32) * binomial(i, j) as i128 * binomial(n - i, k - j) as i128
        })
        .sum()
}

/// The dual distribution A'_k = (1/|C|) Σ_i A_i K_k(i) with |C| = Σ A_i.
/// Negative entries are kept: they certify an impossible input.
pub fn macwilliams(dist: &DistanceDistribution) -> Result<DistanceDistribution> {
    let size = dist.total();
    if size == Rational::from_integer(0) {
        return Err(Error::EmptyCode);
    }
    let n = dist.n;
    let counts = (0..=n)
        .map(|k| {
            dist.counts
                .iter()
                .enumerate()
                .fold(Rational::from_integer(0), |acc, (i, a)| acc + *a * krawtchouk(n, dist.q, k, i))
                / size
        })
        .collect();
    Ok(DistanceDistribution { n, q: dist.q, counts })
}
