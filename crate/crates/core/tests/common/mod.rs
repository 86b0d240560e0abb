//! Invariant checks shared by the property tests and the acceptance runner.
//! Each check returns `Err` with a description of the first violation.

#![allow(dead_code)]

use std::collections::HashSet;

use proptest::prelude::*;
use proptest::test_runner::{Config, RngAlgorithm, TestRng, TestRunner};
use rand::seq::SliceRandom;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use crcodes::canon::permute_mask;
use crcodes::classify::local::canonical_pair;
use crcodes::classify::{classify, extend, seed_pair, ClassifyOptions, DesignMode, LocalPair, Params, Side};
use crcodes::constructions::{construct_code_d, hamming_retraction};
use crcodes::gf::{distance_distribution, hamming_code, macwilliams, DistanceDistribution, FieldTable};
use crcodes::hamming::{binomial, distance, sphere, Face};
use crcodes::partitions::{
    array_to_quotient, cell_sizes, distance_partition, empirical_spectrum, equitable_hull, quotient_of, sphere_spectrum,
    spectrum_matrices, verify_cr, Equitability,
};
use crcodes::search::clique::{find_cliques, CliqueGraph, CliqueMode};
use crcodes::search::cover::{solve_cover, solve_cover_parallel, CoverInstance, CoverMode};
use crcodes::symmetry::{automorphisms_of_code, canonical_code, canonical_partition, Group, SymmetryElement};
use crcodes::{CodeSet, IntersectionArray, QuotientMatrix, Space, VertexPartition, Word};

pub type Check = fn() -> Result<(), String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn ok<T, E: std::fmt::Display>(r: Result<T, E>) -> Result<T, String> {
    r.map_err(|e| e.to_string())
}

fn runner(cases: u32) -> TestRunner {
    TestRunner::new_with_rng(Config { cases, failure_persistence: None, ..Config::default() }, TestRng::deterministic_rng(RngAlgorithm::ChaCha))
}

fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

/// Every check, named after the module it exercises.
pub const ALL: &[(&str, Check)] = &[
    ("hamming: rank and symbols round-trip", rank_round_trip),
    ("hamming: sphere sizes sum to q^n", sphere_sizes_sum),
    ("hamming: distance is a metric", distance_is_metric),
    ("hamming: face expansion", face_expansion),
    ("gf: MacWilliams is an involution", macwilliams_involution),
    ("gf: linear distance = weight distribution", linear_distance_is_weight),
    ("gf: Hamming codes are perfect", hamming_codes_are_perfect),
    ("partitions: spectrum sums give cell sizes", spectrum_sums),
    ("partitions: spectrum row sums", spectrum_row_sums),
    ("partitions: spectrum equals empirical counts", spectrum_matches_empirical),
    ("partitions: verify_cr is idempotent", verify_cr_idempotent),
    ("partitions: hull is the coarsest equitable refinement", hull_is_coarsest),
    ("symmetry: group axioms", group_axioms),
    ("symmetry: canonical forms of codes are stable", canonical_codes_stable),
    ("symmetry: canonical forms of local pairs are stable", canonical_pairs_stable),
    ("symmetry: automorphism order divides |Aut(H(n,q))|", aut_order_divides),
    ("symmetry: orbit-stabilizer", orbit_stabilizer),
    ("search: cover solver matches brute force", cover_matches_brute_force),
    ("search: streamed covers re-validate", cover_solutions_validate),
    ("search: clique solver matches brute force", cliques_match_brute_force),
    ("search: parallel cover is deterministic", cover_deterministic),
    ("classify: radius-1 classes", radius_one_classes),
    ("classify: stage counts independent of threads and restarts", classify_threads_and_resume),
    ("classify: H(8,4) designs", design_invariants),
];

pub fn rank_round_trip() -> Result<(), String> {
    let strat = (1usize..=10, 2usize..=9).prop_flat_map(|(n, q)| (Just(n), Just(q), proptest::collection::vec(0..q as u8, n)));
    ok(runner(10_000).run(&strat, |(n, q, symbols)| {
        let space = Space::new(n, q).unwrap();
        let w = Word::new(space, symbols.clone()).unwrap();
        prop_assert_eq!(Word::from_rank(space, w.rank()).unwrap().symbols().to_vec(), symbols.clone());
        prop_assert_eq!(space.digits(space.rank_of(&symbols)), symbols.clone());
        prop_assert_eq!(w.weight(), symbols.iter().filter(|&&s| s != 0).count());
        Ok(())
    }))
}

pub fn sphere_sizes_sum() -> Result<(), String> {
    for (n, q) in [(5, 4), (6, 3), (8, 2), (4, 5), (13, 2)] {
        let space = ok(Space::new(n, q))?;
        let mut r = rng(n as u64);
        let center = ok(Word::from_rank(space, r.gen_range(0..space.size())))?;
        let mut total = 0u64;
        for d in 0..=n {
            let s = ok(sphere(&center, d))?;
            ensure!(s.len() as u64 == binomial(n, d) * (q as u64 - 1).pow(d as u32), "|S_{d}| in H({n},{q})");
            ensure!(s.words().all(|w| distance(&w, &center).unwrap() == d), "sphere member at wrong distance");
            total += s.len() as u64;
        }
        ensure!(total == space.size(), "spheres of H({n},{q}) sum to {total}");
    }
    Ok(())
}

pub fn distance_is_metric() -> Result<(), String> {
    let strat = (1usize..=10, 2usize..=5).prop_flat_map(|(n, q)| {
        let w = proptest::collection::vec(0..q as u8, n);
        (Just(n), Just(q), w.clone(), w.clone(), w)
    });
    ok(runner(2000).run(&strat, |(n, q, a, b, c)| {
        let s = Space::new(n, q).unwrap();
        let (a, b, c) = (Word::new(s, a).unwrap(), Word::new(s, b).unwrap(), Word::new(s, c).unwrap());
        let d = |x: &Word, y: &Word| distance(x, y).unwrap();
        prop_assert_eq!(d(&a, &b), d(&b, &a));
        prop_assert_eq!(d(&a, &a), 0);
        prop_assert!(d(&a, &b) > 0 || a == b);
        prop_assert!(d(&a, &c) <= d(&a, &b) + d(&b, &c));
        prop_assert_eq!(d(&a, &b), s.rank_distance(a.rank(), b.rank()));
        Ok(())
    }))
}

pub fn face_expansion() -> Result<(), String> {
    let strat = (2usize..=7, 2usize..=4).prop_flat_map(|(n, q)| {
        (Just(n), Just(q), proptest::collection::vec(0..q as u8, n), proptest::sample::subsequence((0..n).collect::<Vec<_>>(), 0..=n.min(3)))
    });
    ok(runner(300).run(&strat, |(n, q, anchor, free)| {
        let s = Space::new(n, q).unwrap();
        let f = Face::new(&Word::new(s, anchor).unwrap(), free.clone()).unwrap();
        let words = f.expand();
        prop_assert_eq!(words.len() as u64, (q as u64).pow(free.len() as u32));
        let distinct: HashSet<u64> = words.iter().copied().collect();
        prop_assert_eq!(distinct.len(), words.len());
        for &x in &words {
            for &y in &words {
                let (dx, dy) = (s.digits(x), s.digits(y));
                let on_free = free.iter().filter(|&&j| dx[j] != dy[j]).count();
                prop_assert_eq!(s.rank_distance(x, y), on_free);
            }
        }
        Ok(())
    }))
}

fn quotient(array: &str, n: usize, q: usize) -> Result<(QuotientMatrix, Space), String> {
    let space = ok(Space::new(n, q))?;
    let a: IntersectionArray = ok(array.parse())?;
    Ok((ok(array_to_quotient(&a, space))?, space))
}

/// Quotient matrices of every parameter set used by the drivers.
fn known_quotients() -> Result<Vec<(QuotientMatrix, Space)>, String> {
    Ok(vec![
        quotient("{13,6,1;1,6,9}", 13, 2)?,
        quotient("{9,6,1;1,6,13}", 13, 2)?,
        quotient("{10,2;1,8}", 5, 3)?,
        quotient("{24,21,10;1,4,12}", 24, 2)?,
        quotient("{24,21,10;1,4,12}", 8, 4)?,
        quotient("{11,4;3,6}", 12, 2)?,
        quotient("{10,3;4,7}", 12, 2)?,
        quotient("{5;3}", 6, 2)?,
        quotient("{5;3}", 7, 2)?,
        quotient("{10,5;3,6}", 13, 2)?,
        quotient("{3;1}", 3, 2)?,
    ])
}

pub fn macwilliams_involution() -> Result<(), String> {
    for (q, space) in [quotient("{24,21,10;1,4,12}", 24, 2)?, quotient("{24,21,10;1,4,12}", 8, 4)?, quotient("{13,6,1;1,6,9}", 13, 2)?] {
        let col = ok(sphere_spectrum(&q, space, 0))?.column(0);
        let a = DistanceDistribution::from_integers(space.n(), space.q(), &col);
        let twice = ok(macwilliams(&ok(macwilliams(&a))?))?;
        ensure!(twice == a, "MacWilliams twice differs for {q}");
    }
    Ok(())
}

pub fn linear_distance_is_weight() -> Result<(), String> {
    for (m, q) in [(2, 4), (2, 3), (3, 2)] {
        let code = ok(ok(hamming_code(m, &ok(FieldTable::new(q))?))?.codewords())?;
        let space = code.space();
        let mut weights = vec![0i128; space.n() + 1];
        for &r in code.members() {
            weights[space.weight_of(r)] += 1;
        }
        let dist = ok(distance_distribution(&code))?;
        ensure!(dist == DistanceDistribution::from_integers(space.n(), space.q(), &weights), "Hamming ({m},{q})");
    }
    Ok(())
}

pub fn hamming_codes_are_perfect() -> Result<(), String> {
    for (m, q) in [(2, 4), (3, 3)] {
        let code = ok(ok(hamming_code(m, &ok(FieldTable::new(q))?))?.codewords())?;
        let space = code.space();
        let mut hits = vec![0u8; space.size() as usize];
        for &c in code.members() {
            hits[c as usize] += 1;
            for u in space.neighbors(c) {
                hits[u as usize] += 1;
            }
        }
        ensure!(hits.iter().all(|&h| h == 1), "radius-1 balls of Hamming ({m},{q}) do not partition the space");
    }
    Ok(())
}

pub fn spectrum_sums() -> Result<(), String> {
    for (q, space) in known_quotients()? {
        let sizes = ok(cell_sizes(&q, space))?;
        let ps = ok(spectrum_matrices(&q, space))?;
        for i in 0..q.k() {
            let row: Vec<u128> = (0..q.k()).map(|j| ps.iter().map(|p| p[i][j]).sum::<i128>() as u128).collect();
            ensure!(row == sizes, "Σ P_d row {i} of {q} is {row:?}, sizes {sizes:?}");
        }
    }
    Ok(())
}

pub fn spectrum_row_sums() -> Result<(), String> {
    for (q, space) in known_quotients()? {
        for anchor in 0..q.k() {
            let t = ok(sphere_spectrum(&q, space, anchor))?;
            for (d, row) in t.rows.iter().enumerate() {
                let want = binomial(space.n(), d) as i128 * (space.q() as i128 - 1).pow(d as u32);
                ensure!(row.iter().sum::<i128>() == want, "row {d} of {q} anchored at {anchor}");
                ensure!(row.iter().all(|&x| x >= 0), "negative entry in row {d} of {q}");
            }
        }
    }
    Ok(())
}

fn explicit_codes() -> Result<Vec<CodeSet>, String> {
    let s = ok(Space::new(3, 2))?;
    Ok(vec![
        ok(construct_code_d())?,
        ok(hamming_retraction(3, 3))?,
        ok(hamming_retraction(2, 4))?,
        ok(CodeSet::from_ranks(s, vec![0, 7]))?,
    ])
}

pub fn spectrum_matches_empirical() -> Result<(), String> {
    for code in explicit_codes()? {
        let p = ok(distance_partition(&code))?;
        let Equitability::Equitable { quotient } = quotient_of(&p) else {
            return Err("explicit code is not CR".into());
        };
        let mut r = rng(code.len() as u64);
        for _ in 0..6 {
            let v = r.gen_range(0..code.space().size());
            let cell = p.cell_of(v);
            let expect = ok(sphere_spectrum(&quotient, code.space(), cell))?;
            ensure!(empirical_spectrum(&p, v).rows == expect.rows, "spectrum of vertex {v} in cell {cell}");
        }
    }
    Ok(())
}

/// Repeated runs agree, and translating a code leaves its verdict unchanged.
pub fn verify_cr_idempotent() -> Result<(), String> {
    let mut r = rng(13);
    for code in explicit_codes()? {
        let first = ok(verify_cr(&code))?;
        ensure!(first.is_cr(), "explicit code is not CR");
        ensure!(ok(verify_cr(&code))? == first, "second run differs");
        let shift = ok(Word::from_rank(code.space(), r.gen_range(0..code.space().size())))?;
        ensure!(ok(verify_cr(&ok(code.translate(&shift))?))? == first, "translate changed the verdict");
    }
    Ok(())
}

/// Every cell of `a` lies inside a cell of `b`.
fn refines(a: &VertexPartition, b: &VertexPartition) -> bool {
    let mut map = vec![None; a.cell_count()];
    a.cells().iter().zip(b.cells()).all(|(&x, &y)| *map[x as usize].get_or_insert(y) == y)
}

/// All set partitions of 0..m as restricted growth strings.
fn set_partitions(m: usize) -> Vec<Vec<u16>> {
    let mut out = Vec::new();
    let mut cur = vec![0u16; m];
    fn rec(i: usize, max: u16, cur: &mut Vec<u16>, out: &mut Vec<Vec<u16>>) {
        if i == cur.len() {
            out.push(cur.clone());
            return;
        }
        for c in 0..=max + 1 {
            cur[i] = c;
            rec(i + 1, max.max(c), cur, out);
        }
    }
    if m > 0 {
        rec(1, 0, &mut cur, &mut out);
    }
    out
}

pub fn hull_is_coarsest() -> Result<(), String> {
    for (n, q) in [(3, 2), (2, 3)] {
        let space = ok(Space::new(n, q))?;
        let size = space.size() as usize;
        let equitable: Vec<VertexPartition> = set_partitions(size)
            .into_iter()
            .filter_map(|c| VertexPartition::new(space, c).ok())
            .filter(|p| matches!(quotient_of(p), Equitability::Equitable { .. }))
            .collect();
        let mut r = rng(size as u64);
        for _ in 0..25 {
            let k = r.gen_range(1..=3u16);
            let mut cells: Vec<u16> = (0..size).map(|_| r.gen_range(0..k)).collect();
            let mut relabel = std::collections::HashMap::new();
            for c in cells.iter_mut() {
                let fresh = relabel.len() as u16;
                *c = *relabel.entry(*c).or_insert(fresh);
            }
            let seed = ok(VertexPartition::new(space, cells))?;
            let (hull, hq) = equitable_hull(&seed);
            ensure!(quotient_of(&hull).quotient() == Some(&hq), "hull is not equitable with its quotient");
            ensure!(refines(&hull, &seed), "hull does not refine its seed");
            let again = equitable_hull(&hull).0;
            ensure!(refines(&again, &hull) && refines(&hull, &again), "hull is not a fixed point");
            for p in equitable.iter().filter(|p| refines(p, &seed)) {
                ensure!(refines(p, &hull), "an equitable refinement of the seed is not finer than the hull");
            }
        }
    }
    Ok(())
}

pub fn random_element(space: Space, group: Group, r: &mut impl Rng) -> SymmetryElement {
    let (n, q) = (space.n(), space.q());
    let mut coords: Vec<u8> = (0..n as u8).collect();
    coords.shuffle(r);
    let symbols = (0..n)
        .map(|_| {
            let mut s: Vec<u8> = (0..q as u8).collect();
            match group {
                Group::Full => s.shuffle(r),
                Group::ZeroStabilizer => s[1..].shuffle(r),
                Group::CoordinatePermutations => {}
            }
            s
        })
        .collect();
    SymmetryElement::new(coords, symbols).unwrap()
}

pub fn group_axioms() -> Result<(), String> {
    let mut r = rng(7);
    for (n, q) in [(4, 3), (5, 2), (3, 4)] {
        let space = ok(Space::new(n, q))?;
        let id = SymmetryElement::identity(space);
        for _ in 0..50 {
            let g = random_element(space, Group::Full, &mut r);
            let h = random_element(space, Group::Full, &mut r);
            let k = random_element(space, Group::Full, &mut r);
            ensure!(g.compose(&h).compose(&k) == g.compose(&h.compose(&k)), "associativity");
            ensure!(g.compose(&id) == g && id.compose(&g) == g, "identity");
            ensure!(g.compose(&g.inverse()).is_identity() && g.inverse().compose(&g).is_identity(), "inverse");
            for x in 0..space.size() {
                let w = space.digits(x);
                ensure!(g.compose(&h).apply(&w) == g.apply(&h.apply(&w)), "action is not compatible with composition");
            }
            let o = g.order();
            ensure!((0..o).fold(id.clone(), |acc, _| acc.compose(&g)).is_identity(), "g^order is not the identity");
            ensure!(!(0..o - 1).fold(id.clone(), |acc, _| acc.compose(&g)).is_identity() || o == 1, "order is not minimal");
        }
    }
    Ok(())
}

pub fn canonical_codes_stable() -> Result<(), String> {
    let mut r = rng(11);
    let mut codes = explicit_codes()?;
    let s = ok(Space::new(6, 3))?;
    codes.push(ok(CodeSet::from_ranks_dedup(s, (0..40).map(|_| r.gen_range(0..s.size())).collect()))?);
    for code in &codes {
        for group in [Group::Full, Group::ZeroStabilizer] {
            let base = ok(canonical_code(code, group))?;
            for _ in 0..100 {
                let g = random_element(code.space(), group, &mut r);
                let image = g.apply_code(code);
                let c = ok(canonical_code(&image, group))?;
                ensure!(c.bytes == base.bytes, "canonical form changed under {group:?} for a {}-word code", code.len());
                ensure!(c.group_order == base.group_order, "stabilizer order changed");
            }
        }
    }
    let d = ok(construct_code_d())?;
    let p = ok(distance_partition(&d))?;
    let base = ok(canonical_partition(&p, Group::Full))?;
    for _ in 0..20 {
        let g = random_element(d.space(), Group::Full, &mut r);
        ensure!(ok(canonical_partition(&g.apply_partition(&p), Group::Full))?.bytes == base.bytes, "partition canonical form changed");
    }
    let c = ok(hamming_retraction(3, 3))?;
    ensure!(ok(canonical_code(&c, Group::Full))?.bytes != ok(canonical_code(&d, Group::Full))?.bytes, "C and D share a canonical form");
    Ok(())
}

pub fn canonical_pairs_stable() -> Result<(), String> {
    let params = ok(Params::new(ok("2,10,0;3,4,5;0,6,6".parse())?, 12, 0))?;
    let mut pairs = ok(extend(&params, &seed_pair(&params), Side::R0))?;
    ensure!(!pairs.is_empty(), "the seed has no continuations");
    let mut r = rng(5);
    pairs.shuffle(&mut r);
    for p in pairs.iter().take(12) {
        let base = canonical_pair(12, p);
        for _ in 0..100 {
            let mut perm: Vec<u8> = (0..12).collect();
            perm.shuffle(&mut r);
            let relabel = |s: &[u64]| {
                let mut v: Vec<u64> = s.iter().map(|&w| permute_mask(w, &perm)).collect();
                v.sort_unstable();
                v
            };
            let image = LocalPair { r0: p.r0, r2: p.r2, p0: relabel(&p.p0), p2: relabel(&p.p2) };
            ensure!(canonical_pair(12, &image) == base, "local pair canonical form changed");
        }
    }
    Ok(())
}

fn factorial(n: usize) -> u128 {
    (1..=n as u128).product()
}

pub fn aut_order_divides() -> Result<(), String> {
    for code in explicit_codes()? {
        let s = code.space();
        let full = factorial(s.q()).pow(s.n() as u32) * factorial(s.n());
        for group in [Group::Full, Group::ZeroStabilizer, Group::CoordinatePermutations] {
            if group == Group::CoordinatePermutations && s.q() != 2 {
                continue;
            }
            let a = ok(automorphisms_of_code(&code, group))?;
            ensure!(full % a.order == 0, "|Aut| = {} does not divide {full}", a.order);
            for g in &a.generators {
                ensure!(g.apply_code(&code) == code, "generator does not preserve the code");
            }
        }
    }
    Ok(())
}

/// Orbit sizes under the whole of Aut(H(n,q)) equal |G| / |Stab| for small random codes.
pub fn orbit_stabilizer() -> Result<(), String> {
    let mut r = rng(3);
    for (n, q) in [(3, 2), (2, 3), (4, 2)] {
        let space = ok(Space::new(n, q))?;
        let mut swap: Vec<u8> = (0..n as u8).collect();
        swap.swap(0, 1);
        let cycle: Vec<u8> = (0..n as u8).map(|i| (i + 1) % n as u8).collect();
        let mut shift: Vec<Vec<u8>> = vec![(0..q as u8).collect(); n];
        shift[0] = (0..q as u8).map(|a| (a + 1) % q as u8).collect();
        let mut flip: Vec<Vec<u8>> = vec![(0..q as u8).collect(); n];
        flip[0].swap(0, 1);
        let gens = vec![
            ok(SymmetryElement::from_coord_perm(space, swap))?,
            ok(SymmetryElement::from_coord_perm(space, cycle))?,
            ok(SymmetryElement::new((0..n as u8).collect(), shift))?,
            ok(SymmetryElement::new((0..n as u8).collect(), flip))?,
            random_element(space, Group::Full, &mut r),
        ];
        let group = ok(crcodes::symmetry::group_closure(space, &gens, 100_000))?;
        let full = factorial(q).pow(n as u32) * factorial(n);
        ensure!(group.len() as u128 == full, "generators gave {} of {full} elements", group.len());
        for _ in 0..20 {
            let k = r.gen_range(1..space.size());
            let code = ok(CodeSet::from_ranks_dedup(space, (0..k).map(|_| r.gen_range(0..space.size())).collect()))?;
            let orbit: HashSet<Vec<u64>> = group.iter().map(|g| g.apply_code(&code).members().to_vec()).collect();
            let stab = ok(automorphisms_of_code(&code, Group::Full))?.order;
            ensure!(orbit.len() as u128 * stab == full, "orbit {} × stabilizer {stab} ≠ {full}", orbit.len());
        }
    }
    Ok(())
}

fn random_instance(r: &mut impl Rng) -> CoverInstance {
    let items = r.gen_range(1..=10usize);
    let blocks = r.gen_range(1..=12usize);
    let demands = (0..items).map(|_| r.gen_range(0..=2u32)).collect();
    let blocks = (0..blocks)
        .map(|_| {
            let mut b: Vec<u32> = (0..items as u32).filter(|_| r.gen_bool(0.35)).collect();
            if b.is_empty() {
                b.push(r.gen_range(0..items as u32));
            }
            b
        })
        .collect();
    CoverInstance::new(demands, blocks).unwrap()
}

fn brute_force_covers(inst: &CoverInstance) -> Vec<Vec<u32>> {
    let b = inst.block_count();
    (0u32..1 << b)
        .filter_map(|mask| {
            let chosen: Vec<u32> = (0..b as u32).filter(|i| mask >> i & 1 == 1).collect();
            inst.is_solution(&chosen).then_some(chosen)
        })
        .collect()
}

pub fn cover_matches_brute_force() -> Result<(), String> {
    let mut r = rng(17);
    for _ in 0..300 {
        let inst = random_instance(&mut r);
        let mut got = solve_cover(&inst, CoverMode::Enumerate, None).solutions;
        got.iter_mut().for_each(|s| s.sort_unstable());
        got.sort();
        let mut want = brute_force_covers(&inst);
        want.sort();
        ensure!(got == want, "solver found {} covers, brute force {}:\n{}", got.len(), want.len(), inst.to_text());
    }
    Ok(())
}

pub fn cover_solutions_validate() -> Result<(), String> {
    let mut r = rng(19);
    for _ in 0..300 {
        let inst = random_instance(&mut r);
        let res = solve_cover(&inst, CoverMode::Enumerate, None);
        ensure!(res.solutions.iter().all(|s| inst.is_solution(s)), "streamed cover fails its demands");
        ensure!(res.count == res.solutions.len() as u64, "count differs from the stream");
        ensure!(solve_cover(&inst, CoverMode::Count, None).count == res.count, "count mode differs");
    }
    Ok(())
}

fn brute_force_cliques(g: &CliqueGraph, k: usize) -> Vec<Vec<usize>> {
    fn rec(g: &CliqueGraph, k: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for v in start..g.vertex_count() {
            if cur.iter().all(|&u| g.adjacent(u, v)) {
                cur.push(v);
                rec(g, k, v + 1, cur, out);
                cur.pop();
            }
        }
    }
    let mut out = Vec::new();
    rec(g, k, 0, &mut Vec::new(), &mut out);
    out
}

pub fn cliques_match_brute_force() -> Result<(), String> {
    let mut r = rng(23);
    for _ in 0..200 {
        let n = 15;
        let p = r.gen_range(0.2..0.8);
        let mut g = CliqueGraph::new(n);
        for u in 0..n {
            for v in u + 1..n {
                if r.gen_bool(p) {
                    g.add_edge(u, v);
                }
            }
        }
        let k = r.gen_range(1..=6);
        let norm = |mut v: Vec<Vec<usize>>| {
            v.iter_mut().for_each(|c| c.sort_unstable());
            v.sort();
            v
        };
        let got = norm(find_cliques(&g, k, CliqueMode::All));
        let want = brute_force_cliques(&g, k);
        ensure!(got == want, "{} cliques of size {k}, brute force {}", got.len(), want.len());
        let first = find_cliques(&g, k, CliqueMode::First);
        ensure!(first.len() == want.len().min(1), "first mode");
        let omega = (1..=n).rev().find(|&s| !brute_force_cliques(&g, s).is_empty()).unwrap_or(0);
        let max = find_cliques(&g, 0, CliqueMode::Max);
        ensure!(max.len() == 1 && max[0].len() == omega, "max clique {:?}, ω = {omega}", max);
    }
    Ok(())
}

pub fn cover_deterministic() -> Result<(), String> {
    let mut r = rng(29);
    let mut instances: Vec<CoverInstance> = (0..20).map(|_| random_instance(&mut r)).collect();
    // the STS(9) instance: 36 pairs, 84 triples
    let mut blocks = Vec::new();
    let pair = |a: u32, b: u32| a * 9 - a * (a + 1) / 2 + b - a - 1;
    for a in 0..9 {
        for b in a + 1..9 {
            for c in b + 1..9 {
                blocks.push(vec![pair(a, b), pair(a, c), pair(b, c)]);
            }
        }
    }
    instances.push(ok(CoverInstance::new(vec![1; 36], blocks))?);
    for inst in &instances {
        let seq = solve_cover(inst, CoverMode::Enumerate, None).solutions;
        for threads in [1, 8] {
            let pool = ok(rayon::ThreadPoolBuilder::new().num_threads(threads).build())?;
            for depth in [1, 2, 3] {
                let par = pool.install(|| solve_cover_parallel(inst, depth, false));
                ensure!(par.solutions == seq, "{threads} threads, depth {depth}: parallel order differs");
                ensure!(par.count == seq.len() as u64, "parallel count differs");
            }
        }
    }
    ensure!(instances.last().map(|i| solve_cover(i, CoverMode::Count, None).count) == Some(840), "STS(9) count");
    Ok(())
}

pub fn radius_one_classes() -> Result<(), String> {
    for (q, n, d, want) in [("2,5;3,4", 7, 0, 9), ("1,5;3,3", 6, 0, 1), ("2,5;3,4", 7, 1, 9)] {
        let matrix: QuotientMatrix = ok(q.parse())?;
        let params = ok(Params::new(matrix.clone(), n, d))?;
        let out = ok(classify(&params, &[], &ClassifyOptions::default()))?;
        ensure!(out.report.final_classes == Some(want), "{q} in H({n},2), d={d}: {:?} classes", out.report.final_classes);
        ensure!(out.report.stages.iter().all(|s| s.double_count_balances()), "double count for {q}");
        for p in &out.partitions {
            ensure!(quotient_of(p).quotient() == Some(&matrix), "final partition fails re-verification");
        }
    }
    Ok(())
}

pub fn classify_threads_and_resume() -> Result<(), String> {
    let params = ok(Params::new(ok("2,5;3,4".parse())?, 7, 0))?;
    let dirs: Vec<tempfile::TempDir> = (0..3).map(|_| tempfile::tempdir().unwrap()).collect();
    let run = |threads: usize, dir: &std::path::Path, stages: usize, resume: bool| {
        let opts = ClassifyOptions {
            threads,
            checkpoint_dir: Some(dir.to_path_buf()),
            resume,
            max_stages: Some(stages),
            ..ClassifyOptions::default()
        };
        classify(&params, &[], &opts)
    };
    let one = ok(run(1, dirs[0].path(), 3, false))?;
    let eight = ok(run(8, dirs[1].path(), 3, false))?;
    ensure!(one.report.verified.is_none() && one.report.stages.len() >= 3, "partial run {:?}", one.report);
    ensure!(one.report == eight.report, "reports differ between 1 and 8 threads");
    let blobs = |dir: &std::path::Path| -> Result<Vec<(String, Vec<u8>)>, String> {
        let mut out = Vec::new();
        for entry in ok(std::fs::read_dir(dir))? {
            let path = ok(entry)?.path();
            if path.extension().is_some_and(|e| e == "bin") {
                out.push((path.file_name().unwrap().to_string_lossy().into_owned(), ok(std::fs::read(&path))?));
            }
        }
        out.sort();
        Ok(out)
    };
    let (a, b) = (blobs(dirs[0].path())?, blobs(dirs[1].path())?);
    ensure!(!a.is_empty() && a == b, "checkpoint blobs differ between 1 and 8 threads");

    let first = ok(run(2, dirs[2].path(), 1, false))?;
    ensure!(first.report.stages.len() < one.report.stages.len(), "shorter run did not stop early");
    let resumed = ok(run(3, dirs[2].path(), 3, true))?;
    ensure!(resumed.report.resumed_after.is_some(), "did not resume");
    ensure!(resumed.report.stages == one.report.stages, "resumed stages differ");

    let (name, mut bytes) = blobs(dirs[2].path())?.pop().ok_or("no checkpoint written")?;
    let mid = bytes.len() / 2;
    bytes[mid] ^= 1;
    ok(std::fs::write(dirs[2].path().join(name), bytes))?;
    let damaged = run(1, dirs[2].path(), 4, true);
    ensure!(matches!(damaged, Err(crcodes::Error::Checkpoint(_))), "corrupt checkpoint accepted: {:?}", damaged.map(|o| o.report));
    Ok(())
}

pub fn design_invariants() -> Result<(), String> {
    let odd = ok(crcodes::classify::design_argument_h84(DesignMode::VerifyOddPair, None, None, None))?;
    ensure!((odd.items, odd.blocks, odd.block_size, odd.design_size) == (252, 5670, 6, 42), "instance shape {odd:?}");
    ensure!(odd.complete && odd.designs == 0, "even-distance designs exist: {odd:?}");
    let sym = ok(crcodes::classify::design_argument_h84(DesignMode::PrescribedSymmetry, None, Some(2), None))?;
    ensure!(sym.inequivalent >= 2 && sym.without_odd_pair == 0, "symmetric designs {sym:?}");
    Ok(())
}
