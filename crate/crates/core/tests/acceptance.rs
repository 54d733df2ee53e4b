//! Acceptance suite. Each test prints one `criterion N: PASS|FAIL` line.

use std::collections::BTreeSet;
use std::io::Write;
use std::time::{Duration, Instant};

use num_rational::Ratio;
use proptest::prelude::*;
use proptest::test_runner::{Config, RngAlgorithm, TestRng, TestRunner};

use triblock::blockcalc::{Collection, Move, MutationKind};
use triblock::catalog;
use triblock::kclass::{KClass, Slope};
use triblock::markov::{enumerate_equations, EquationId, Triple, Var};
use triblock::picard::{enumerate_classes, enumerate_classes_within, ClassKind, SurfaceId};
use triblock::weyl::{self, LatticeAutomorphism};

fn report(n: u32, failures: &[String]) {
    let status = if failures.is_empty() { "PASS" } else { "FAIL" };
    // Written to the raw handle so the line survives output capture.
    let mut line = format!("criterion {n}: {status}\n");
    for f in failures {
        line += &format!("  {f}\n");
    }
    let _ = std::io::stderr().write_all(line.as_bytes());
    assert!(failures.is_empty(), "criterion {n} failed: {failures:#?}");
}

fn within(n: u32, started: Instant, limit: Duration, failures: &mut Vec<String>) {
    let took = started.elapsed();
    if took > limit {
        failures.push(format!("criterion {n} took {took:?}, limit {limit:?}"));
    }
}

/// Expected equation table: id, (alpha, beta, gamma), coefficient, minima.
fn table() -> Vec<(EquationId, [i64; 3], i64, Vec<Triple>)> {
    use EquationId::*;
    vec![
        (X1, [1, 1, 1], 3, vec![[1, 1, 1]]),
        (X2, [1, 1, 2], 4, vec![[1, 1, 1]]),
        (X3, [1, 2, 3], 6, vec![[1, 1, 1]]),
        (X4, [1, 1, 5], 5, vec![[1, 2, 1], [2, 1, 1]]),
        (X5, [2, 2, 4], 8, vec![[1, 1, 1]]),
        (X6_1, [3, 3, 3], 9, vec![[1, 1, 1]]),
        (X6_2, [1, 2, 6], 6, vec![[2, 1, 1]]),
        (X7_1, [1, 1, 8], 4, vec![[2, 2, 1]]),
        (X7_2, [2, 4, 4], 8, vec![[2, 1, 1]]),
        (X7_3, [1, 3, 6], 6, vec![[3, 1, 1]]),
        (X8_1, [1, 1, 9], 3, vec![[3, 3, 1]]),
        (X8_2, [1, 2, 8], 4, vec![[4, 2, 1]]),
        (X8_3, [2, 3, 6], 6, vec![[3, 2, 1]]),
        (X8_4, [1, 5, 5], 5, vec![[5, 2, 1], [5, 1, 2]]),
    ]
}

fn minima(id: EquationId) -> Vec<Triple> {
    table().into_iter().find(|r| r.0 == id).unwrap().3
}

/// Every built catalog collection, including the second minimum solutions.
fn catalog_collections() -> Vec<(EquationId, Collection)> {
    let mut out = Vec::new();
    for id in EquationId::ALL {
        for sol in minima(id) {
            out.push((id, catalog::build_for_solution(id, &sol).unwrap()));
        }
    }
    out
}

/// Independent Euler form from Riemann-Roch.
fn chi_oracle(e: &KClass, f: &KClass) -> i64 {
    let s = e.surface();
    let n = s.picard_rank();
    let dot = |a: &[i64], b: &[i64]| -> i64 {
        (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).map(|(i, j)| a[i] * s.form(i, j) * b[j]).sum()
    };
    let k = triblock::picard::DivisorClass::canonical(s);
    let deg = |c: &KClass| -dot(k.coords(), c.c1.coords());
    let twice = 2 * e.rank * f.rank + (e.rank * deg(f) - f.rank * deg(e)) + (e.rank * f.ch2x2 + f.rank * e.ch2x2)
        - 2 * dot(e.c1.coords(), f.c1.coords());
    assert_eq!(twice % 2, 0);
    twice / 2
}

/// Rational Gaussian elimination determinant.
fn det_oracle(mut m: Vec<Vec<Ratio<i128>>>) -> Ratio<i128> {
    let n = m.len();
    let mut det = Ratio::from_integer(1);
    for col in 0..n {
        let Some(p) = (col..n).find(|&r| m[r][col] != Ratio::from_integer(0)) else {
            return Ratio::from_integer(0);
        };
        if p != col {
            m.swap(p, col);
            det = -det;
        }
        det *= m[col][col];
        for r in col + 1..n {
            let f = m[r][col] / m[col][col];
            for c in col..n {
                let v = m[col][c];
                m[r][c] -= f * v;
            }
        }
    }
    det
}

fn eq3_holds(id: EquationId, c: &Collection) -> bool {
    let e = id.equation();
    let lens = c.type_vector();
    let ranks = c.ranks();
    let lhs: i128 = (0..3).map(|i| lens[i] as i128 * (ranks[i] as i128).pow(2)).sum();
    let mut sorted = lens.clone();
    sorted.sort();
    sorted == e.lengths().iter().map(|&x| x as usize).collect::<Vec<_>>()
        && lhs == e.coeff as i128 * ranks.iter().map(|&r| r as i128).product::<i128>()
}

fn all_words(max_len: usize) -> Vec<Vec<Move>> {
    let gens = [Move::left(1), Move::left(2), Move::right(1), Move::right(2)];
    let mut out = vec![Vec::new()];
    let mut frontier = vec![Vec::new()];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for w in &frontier {
            for g in gens {
                let mut v: Vec<Move> = w.clone();
                v.push(g);
                next.push(v);
            }
        }
        out.extend(next.iter().cloned());
        frontier = next;
    }
    out
}

#[test]
fn criterion_01_equation_table() {
    let started = Instant::now();
    let mut failures = Vec::new();
    let eqs = enumerate_equations().unwrap();
    let expected = table();
    if eqs.len() != expected.len() {
        failures.push(format!("found {} equations", eqs.len()));
    }
    for (e, (id, lens, coeff, mins)) in eqs.iter().zip(&expected) {
        if e.id != *id || e.lengths() != *lens || e.coeff != *coeff {
            failures.push(format!("row {id}: got {e:?}"));
        }
        let got: BTreeSet<Triple> = e.minimum_solutions().into_iter().collect();
        if got != mins.iter().copied().collect() || got.len() != e.minimum_solutions().len() {
            failures.push(format!("row {id}: minima {:?}", e.minimum_solutions()));
        }
    }
    within(1, started, Duration::from_secs(1), &mut failures);
    report(1, &failures);
}

#[test]
fn criterion_02_solution_dynamics() {
    let started = Instant::now();
    let mut failures = Vec::new();
    for (id, [a, b, g], coeff, mins) in table() {
        let e = id.equation();
        let mut oracle = Vec::new();
        for x in 1..=198i64 {
            for y in 1..=199 - x {
                for z in 1..=200 - x - y {
                    if a * x * x + b * y * y + g * z * z == coeff * x * y * z {
                        oracle.push([x, y, z]);
                    }
                }
            }
        }
        let found: BTreeSet<Triple> = e.enumerate_solutions(200).into_iter().collect();
        if found != oracle.iter().copied().collect() {
            failures.push(format!("{id}: enumeration differs from brute force"));
        }
        let coeffs = [a, b, g];
        for t in &oracle {
            let mut decreasing = 0;
            for var in [Var::X, Var::Y, Var::Z] {
                let i = var.index();
                let m = e.mutate(t, var).unwrap();
                // Vieta: the two roots of the quadratic in t[i] sum to coeff * (product of the others) / alpha_i.
                let others: i64 = (0..3).filter(|&j| j != i).map(|j| t[j]).product();
                if coeffs[i] * (m[i] + t[i]) != coeff * others || !e.is_solution(&m) {
                    failures.push(format!("{id}: bad mutation of {t:?}"));
                }
                if e.mutate(&m, var).unwrap() != *t {
                    failures.push(format!("{id}: mutation at {t:?} is not an involution"));
                }
                if m.iter().sum::<i64>() < t.iter().sum::<i64>() {
                    decreasing += 1;
                }
            }
            let minimal = mins.contains(t);
            if (minimal && decreasing != 0) || (!minimal && decreasing != 1) {
                failures.push(format!("{id}: {t:?} has {decreasing} decreasing mutations"));
            }
            let path = e.reduce_to_minimum(t).unwrap();
            let end = path.last().map(|p| p.1).unwrap_or(*t);
            if !mins.contains(&end) {
                failures.push(format!("{id}: {t:?} reduces to {end:?}"));
            }
        }
    }
    within(2, started, Duration::from_secs(30), &mut failures);
    report(2, &failures);
}

#[test]
fn criterion_03_graph_shapes() {
    let mut failures = Vec::new();
    let g1 = EquationId::X1.equation().solution_graph(100).unwrap();
    if !g1.loops.is_empty() || !g1.is_forest() {
        failures.push("x1 graph has a loop or a cycle".into());
    }
    let g2 = EquationId::X2.equation().solution_graph(100).unwrap();
    let loop_nodes: BTreeSet<Triple> = g2.loops.iter().map(|&(i, _)| g2.nodes[i]).collect();
    if g2.loops.len() != 1 || loop_nodes != BTreeSet::from([[1, 1, 1]]) {
        failures.push(format!("x2 loops: {:?}", g2.loops));
    }
    let g84 = EquationId::X8_4.equation().solution_graph(100).unwrap();
    if g84.components().len() != 2 {
        failures.push(format!("x8.4 has {} components", g84.components().len()));
    }
    report(3, &failures);
}

#[test]
fn criterion_04_catalog() {
    let started = Instant::now();
    let mut failures = Vec::new();
    for id in EquationId::ALL {
        for o in catalog::verify_entry(id).unwrap() {
            if !o.passed {
                failures.push(format!("{id}: check {} failed", o.name));
            }
        }
    }
    for (id, c) in catalog_collections() {
        let members: Vec<&KClass> = c.members().collect();
        let rebuilt: Vec<Vec<KClass>> = c.blocks().iter().map(|b| b.members().to_vec()).collect();
        if Collection::new(rebuilt).map_or(true, |n| n != c) {
            failures.push(format!("{id}: revalidation failed"));
        }
        // Block invariants and semiorthogonality, with the oracle Euler form.
        let mut offset = 0;
        let block_of: Vec<usize> = c
            .blocks()
            .iter()
            .enumerate()
            .flat_map(|(i, b)| std::iter::repeat_n(i, b.len()))
            .collect();
        for b in c.blocks() {
            let ms = b.members();
            if ms.iter().any(|m| m.rank != ms[0].rank || m.degree() != ms[0].degree()) {
                failures.push(format!("{id}: block members differ in rank or degree"));
            }
            offset += ms.len();
        }
        assert_eq!(offset, members.len());
        for (i, e) in members.iter().enumerate() {
            if chi_oracle(e, e) != 1 {
                failures.push(format!("{id}: member {i} is not exceptional"));
            }
            for (j, f) in members.iter().enumerate() {
                let later = block_of[i] > block_of[j];
                let same = block_of[i] == block_of[j] && i != j;
                if (later || same) && chi_oracle(e, f) != 0 {
                    failures.push(format!("{id}: chi({i},{j}) != 0"));
                }
            }
        }
        let o = KClass::structure_sheaf(c.surface());
        let rows: Vec<Vec<Ratio<i128>>> = members
            .iter()
            .map(|m| {
                let mut row = vec![m.rank as i128];
                row.extend(m.c1.coords().iter().map(|&x| x as i128));
                row.push(chi_oracle(&o, m) as i128);
                row.into_iter().map(Ratio::from_integer).collect()
            })
            .collect();
        let det = det_oracle(rows);
        if (det != Ratio::from_integer(1) && det != Ratio::from_integer(-1)) || !c.is_complete() {
            failures.push(format!("{id}: determinant {det}"));
        }
        let sol = catalog::solution_of(id, &c).unwrap();
        if !minima(id).contains(&sol) || !eq3_holds(id, &c) {
            failures.push(format!("{id}: ranks {sol:?}"));
        }
        let abc = c.abc().unwrap();
        let lens: Vec<i64> = c.type_vector().iter().map(|&n| n as i64).collect();
        let (al, be, ga) = (lens[0], lens[1], lens[2]);
        let lhs = Ratio::new(abc.a * abc.a, al) + Ratio::new(abc.b * abc.b, be) + Ratio::new(abc.c * abc.c, ga);
        if lhs != Ratio::from_integer(abc.a * abc.b * abc.c) {
            failures.push(format!("{id}: abc identity fails for {abc:?}"));
        }
    }
    let slopes = |id: EquationId, block: usize| -> Vec<Slope> {
        catalog::build(id).unwrap().blocks()[block].members().iter().map(|m| m.slope()).collect()
    };
    let q = |a, b| Slope::Finite(Ratio::new(a, b));
    if !slopes(EquationId::X8_1, 0).contains(&q(-5, 3)) || !slopes(EquationId::X8_1, 1).contains(&q(-4, 3)) {
        failures.push("x8.1 slopes".into());
    }
    if !slopes(EquationId::X8_4, 0).contains(&q(12, 5)) {
        failures.push("x8.4 slope".into());
    }
    within(4, started, Duration::from_secs(5), &mut failures);
    report(4, &failures);
}

#[test]
fn criterion_05_mutation_engine() {
    let started = Instant::now();
    let mut failures = Vec::new();
    let words = all_words(4);
    for (id, c) in catalog_collections() {
        for i in 1..=2 {
            let back = c.apply_word(&[Move::left(i), Move::right(i)]).unwrap().0;
            let fwd = c.apply_word(&[Move::right(i), Move::left(i)]).unwrap().0;
            if back != c || fwd != c {
                failures.push(format!("{id}: L{i}/R{i} not inverse"));
            }
        }
        for side in [Move::right as fn(usize) -> Move, Move::left] {
            let a = c.apply_word(&[side(1), side(2), side(1)]).unwrap().0;
            let b = c.apply_word(&[side(2), side(1), side(2)]).unwrap().0;
            if a != b {
                failures.push(format!("{id}: braid relation fails"));
            }
        }
        let k = triblock::picard::DivisorClass::canonical(c.surface());
        let fwd = c.helix_shift(1).unwrap();
        let (e, f, g) = (&c.blocks()[0], &c.blocks()[1], &c.blocks()[2]);
        let expect = Collection::from_blocks(vec![f.clone(), g.clone(), e.twist(&-&k).unwrap()]).unwrap();
        let by_word = c.apply_word(&[Move::right(1), Move::right(2)]).unwrap().0;
        if !fwd.same_blocks_as_sets(&expect) || !by_word.same_blocks_as_sets(&expect) {
            failures.push(format!("{id}: forward helix shift"));
        }
        if c.helix_shift(1).unwrap().helix_shift(-1).unwrap() != c
            || !c.helix_shift(3).unwrap().same_blocks_as_sets(&c.twist(&-&k).unwrap())
        {
            failures.push(format!("{id}: helix period"));
        }
        for w in &words {
            let mut cur = c.clone();
            for &mv in w {
                let (next, ty) = cur.mutate(mv).unwrap();
                if ty.kind != MutationKind::Division || ty.trivial {
                    failures.push(format!("{id}: {mv} gave {ty}"));
                }
                if !eq3_holds(id, &next) {
                    failures.push(format!("{id}: Markov relation fails after {w:?}"));
                }
                cur = next;
            }
        }
    }
    failures.dedup();
    within(5, started, Duration::from_secs(30), &mut failures);
    report(5, &failures);
}

#[test]
fn criterion_06_dual_basis() {
    let mut failures = Vec::new();
    for (id, c) in catalog_collections() {
        let dual = c.dual_basis().unwrap();
        for (i, a) in c.members().enumerate() {
            for (j, v) in dual.iter().enumerate() {
                if chi_oracle(a, v) != i64::from(i == j) {
                    failures.push(format!("{id}: chi(A_{i}, dual_{j}) wrong"));
                }
            }
        }
        let r = |e: &KClass| e.rank;
        let d = |e: &KClass| e.degree();
        let p = [c.pairing(r, r).unwrap(), c.pairing(r, d).unwrap(), c.pairing(d, r).unwrap()];
        if p != [0, 0, 0] {
            failures.push(format!("{id}: pairings {p:?}"));
        }
    }
    report(6, &failures);
}

#[test]
fn criterion_07_lattice_counts() {
    let started = Instant::now();
    let mut failures = Vec::new();
    let minus_one = [0, 1, 3, 6, 10, 16, 27, 56, 240];
    let roots = [0, 0, 2, 8, 20, 40, 72, 126, 240];
    for r in 0..=8u8 {
        let s = SurfaceId::PlaneBlowup(r);
        for (kind, want) in [(ClassKind::MinusOne, minus_one[r as usize]), (ClassKind::Root, roots[r as usize])] {
            let got = enumerate_classes(s, kind).unwrap();
            let wide = enumerate_classes_within(s, kind, 12 * (r as i64 + 1));
            // Oracle: the defining equations, checked directly on every class.
            let k = triblock::picard::DivisorClass::canonical(s);
            let (sq, kd) = if kind == ClassKind::MinusOne { (-1, -1) } else { (-2, 0) };
            let valid = got.iter().all(|d| d.square() == sq && d.intersect(&k).unwrap() == kd);
            if got.len() != want || wide != got || !valid {
                failures.push(format!("X{r} {kind:?}: {} classes", got.len()));
            }
        }
    }
    within(7, started, Duration::from_secs(5), &mut failures);
    report(7, &failures);
}

#[test]
fn criterion_08_orbit_table() {
    let started = Instant::now();
    let mut failures = Vec::new();
    let n = [1, 1, 1, 2, 20, 240, 36, 72, 2520, 672, 1920, 8640, 80640, 96768];
    let orbits = [1, 1, 1, 1, 10, 80, 36, 36, 1260, 672, 1920, 8640, 80640, 48384];
    let rows = weyl::orbit_table().unwrap();
    for (i, row) in rows.iter().enumerate() {
        if row.n != n[i] || row.orbits != orbits[i] || row.n != row.c * row.orbits {
            failures.push(format!("{}: {row:?}", row.equation));
        }
    }
    if rows.len() != 14 {
        failures.push(format!("{} rows", rows.len()));
    }
    for id in [EquationId::X6_1, EquationId::X5] {
        if !weyl::verify_c(id).unwrap() {
            failures.push(format!("C not confirmed for {id}"));
        }
    }
    within(8, started, Duration::from_secs(600), &mut failures);
    report(8, &failures);
}

#[test]
fn criterion_09_recursion() {
    let started = Instant::now();
    let mut failures = Vec::new();
    let sets = [(8u8, 8usize, 17280u64), (7, 7, 576), (8, 5, 483840), (3, 3, 2), (6, 6, 72)];
    for (r, m, want) in sets {
        let got = weyl::count_disjoint_sets(SurfaceId::PlaneBlowup(r), m).unwrap();
        if got != want {
            failures.push(format!("X{r}, {m}: {got}"));
        }
    }
    for id in [EquationId::X8_1, EquationId::X7_1, EquationId::X8_2, EquationId::X3, EquationId::X6_2] {
        let rep = weyl::recursion_check(id).unwrap();
        if !rep.holds || rep.lhs != rep.rhs {
            failures.push(format!("{id}: {rep:?}"));
        }
    }
    within(9, started, Duration::from_secs(300), &mut failures);
    report(9, &failures);
}

#[test]
fn criterion_10_weyl_equivariance() {
    let collections = catalog_collections();
    let count = collections.len();
    let moves = prop_oneof![
        Just(Move::left(1)),
        Just(Move::left(2)),
        Just(Move::right(1)),
        Just(Move::right(2))
    ];
    let strategy = (
        0..count,
        proptest::collection::vec(any::<prop::sample::Index>(), 0..8),
        proptest::collection::vec(moves, 0..=3),
    );
    let config = Config { cases: 50, failure_persistence: None, ..Config::default() };
    let mut runner =
        TestRunner::new_with_rng(config, TestRng::deterministic_rng(RngAlgorithm::ChaCha));
    let result = runner.run(&strategy, |(ci, gens, word)| {
        let (_, c) = &collections[ci];
        let s = c.surface();
        let simple = weyl::simple_reflections(s);
        let g = gens
            .iter()
            .fold(LatticeAutomorphism::identity(s), |acc, ix| acc.compose(ix.get(&simple)).unwrap());
        prop_assert!(g.is_weyl_element());
        let gc = weyl::apply_to_collection(&g, c).unwrap();
        let lhs = weyl::apply_to_collection(&g, &c.apply_word(&word).unwrap().0).unwrap();
        let rhs = gc.apply_word(&word).unwrap().0;
        prop_assert_eq!(lhs, rhs);
        for (a, ga) in c.members().zip(gc.members()) {
            for (b, gb) in c.members().zip(gc.members()) {
                prop_assert_eq!(a.chi(b).unwrap(), ga.chi(gb).unwrap());
            }
        }
        Ok(())
    });
    let failures: Vec<String> = result.err().map(|e| e.to_string()).into_iter().collect();
    report(10, &failures);
}
