//! Explicit complete 3-block collections, one for each minimum solution.
//!
//! Every entry starts from a seed made of a pulled-back collection from a
//! smaller surface together with a block of torsion sheaves on exceptional
//! curves, applies a mutation word, and finally merges the one adjacent pair
//! of mutually orthogonal blocks. Words are listed in application order.

use num_rational::Ratio;

use crate::blockcalc::{format_word, parse_word, Block, Collection, Move};
use crate::error::{Error, Result};
use crate::kclass::{KClass, Slope};
use crate::markov::{EquationId, Triple};
use crate::picard::{DivisorClass, SurfaceId};

fn blowup(r: u8) -> SurfaceId {
    SurfaceId::PlaneBlowup(r)
}

fn line(s: SurfaceId) -> DivisorClass {
    DivisorClass::line(s)
}

fn ex(s: SurfaceId, i: usize) -> DivisorClass {
    DivisorClass::exceptional(s, i)
}

/// Sum of the exceptional curves `l_i .. l_j`.
fn ex_sum(s: SurfaceId, range: std::ops::RangeInclusive<usize>) -> DivisorClass {
    range.fold(DivisorClass::zero(s), |acc, i| &acc + &ex(s, i))
}

/// Canonical class of `X_r` pulled back to `s`.
fn omega(s: SurfaceId, r: usize) -> DivisorClass {
    &ex_sum(s, 1..=r) - &line(s).scale(3)
}

/// The standard collection `(O(-1), O, O(1))` on the plane.
pub fn plane_standard() -> Collection {
    let p = SurfaceId::PLANE;
    let o = |k| KClass::line_bundle(&line(p).scale(k));
    Collection::from_sequence(vec![o(-1), o(0), o(1)]).expect("plane collection is exceptional")
}

/// `(O, {O(f1), O(f2)}, O(f1 + f2))` on the quadric.
pub fn quadric_standard() -> Collection {
    let q = SurfaceId::Quadric;
    let o = |a, b| KClass::line_bundle(&DivisorClass::new(q, vec![a, b]).unwrap());
    Collection::new(vec![vec![o(0, 0)], vec![o(1, 0), o(0, 1)], vec![o(1, 1)]])
        .expect("quadric collection is exceptional")
}

/// The block `{O_{l_i}(m), .., O_{l_j}(m)}`.
pub fn torsion_block(s: SurfaceId, range: std::ops::RangeInclusive<usize>, m: i64) -> Result<Block> {
    let members = range
        .map(|i| KClass::torsion(&ex(s, i), m))
        .collect::<Result<Vec<_>>>()?;
    Block::new(members)
}

fn torsion(s: SurfaceId, range: std::ops::RangeInclusive<usize>, m: i64) -> Result<Collection> {
    Collection::from_blocks(vec![torsion_block(s, range, m)?])
}

/// A property the built collection must have.
#[derive(Clone, Debug)]
pub enum Check {
    /// Some member of the (1-based) block has this rank, first Chern class and
    /// slope.
    Member {
        name: &'static str,
        block: usize,
        rank: i64,
        c1: DivisorClass,
        slope: Ratio<i64>,
    },
    /// The block consists exactly of these line bundles.
    LineBundles {
        block: usize,
        c1s: Vec<DivisorClass>,
    },
    /// Applying this word to the seed gives the same collection as the
    /// recipe's word.
    SameAs { word: Vec<Move> },
    /// After the first `after` moves, the blocks have exactly these
    /// `(rank, c1)` pairs.
    Stage {
        after: usize,
        blocks: Vec<Vec<(i64, DivisorClass)>>,
    },
}

#[derive(Clone, Debug)]
pub struct Recipe {
    pub id: EquationId,
    pub seed: Collection,
    pub word: Vec<Move>,
    pub checks: Vec<Check>,
}

fn word(s: &str) -> Vec<Move> {
    parse_word(s).expect("catalog words are well formed")
}

fn line_set(items: impl IntoIterator<Item = DivisorClass>) -> Vec<(i64, DivisorClass)> {
    items.into_iter().map(|d| (1, d)).collect()
}

/// Seed and word for an equation with at least three points blown up.
pub fn recipe(id: EquationId) -> Result<Recipe> {
    use EquationId as E;
    let q = Ratio::new;
    let (seed, w, checks) = match id {
        E::X1 | E::X2 => {
            return Err(Error::Unsupported(format!(
                "equation {id} has a standard collection and no recipe"
            )))
        }
        E::X3 => {
            let s = blowup(3);
            let seed = plane_standard().embed(s)?.concat(&torsion(s, 1..=3, 0)?)?;
            let l = line(s);
            let checks = vec![
                Check::LineBundles { block: 1, c1s: vec![DivisorClass::zero(s)] },
                Check::LineBundles { block: 2, c1s: vec![l.clone(), &l.scale(2) - &ex_sum(s, 1..=3)] },
                Check::LineBundles {
                    block: 3,
                    c1s: (1..=3).map(|i| &(&l.scale(2) - &ex_sum(s, 1..=3)) + &ex(s, i)).collect(),
                },
            ];
            (seed, word("R1 R2 R3 | R3"), checks)
        }
        E::X4 => {
            let s = blowup(4);
            let seed = plane_standard().embed(s)?.concat(&torsion(s, 1..=4, 0)?)?;
            let l = line(s);
            let w4 = omega(s, 4);
            let mut third = vec![l.clone()];
            third.extend((1..=4).map(|i| &(&ex(s, i) - &w4) - &l));
            let checks = vec![
                Check::LineBundles { block: 1, c1s: vec![DivisorClass::zero(s)] },
                Check::Member { name: "F", block: 2, rank: 2, c1: -&w4, slope: q(5, 2) },
                Check::LineBundles { block: 3, c1s: third },
            ];
            (seed, word("R1 R2 R3 | R3 | L2"), checks)
        }
        E::X5 => {
            let s = blowup(5);
            let seed = torsion(s, 4..=5, -1)?.concat(&build(E::X3)?.embed(s)?)?;
            let l = line(s);
            let base = &l.scale(2) - &ex_sum(s, 1..=3);
            let mut third: Vec<DivisorClass> = (1..=3).map(|i| &base + &ex(s, i)).collect();
            third.push(-&omega(s, 5));
            let checks = vec![
                Check::LineBundles { block: 1, c1s: vec![ex(s, 4), ex(s, 5)] },
                Check::LineBundles { block: 2, c1s: vec![l.clone(), base.clone()] },
                Check::LineBundles { block: 3, c1s: third },
            ];
            (seed, word("R1 | R1 R2 R3"), checks)
        }
        E::X6_1 => {
            let s = blowup(6);
            let seed = torsion(s, 4..=6, -1)?.concat(&build(E::X3)?.embed(s)?)?;
            let l = line(s);
            let checks = vec![
                Check::LineBundles { block: 1, c1s: (4..=6).map(|i| ex(s, i)).collect() },
                Check::LineBundles { block: 2, c1s: (1..=3).map(|i| &l - &ex(s, i)).collect() },
                Check::LineBundles {
                    block: 3,
                    c1s: vec![-&omega(s, 6), l.clone(), &l.scale(2) - &ex_sum(s, 1..=3)],
                },
            ];
            (seed, word("R1 | L3 | R1 R2 R3"), checks)
        }
        E::X6_2 => {
            let s = blowup(6);
            let seed = torsion(s, 1..=6, -1)?.concat(&plane_standard().embed(s)?)?;
            let l = line(s);
            let w6 = omega(s, 6);
            let checks = vec![
                Check::Member { name: "T6", block: 1, rank: 2, c1: l.clone(), slope: q(3, 2) },
                Check::LineBundles { block: 2, c1s: vec![l.clone(), -&w6] },
                Check::LineBundles { block: 3, c1s: (1..=6).map(|i| &ex(s, i) - &w6).collect() },
            ];
            (seed, word("R2 | R1 | R1 R2 R3 | R1 R2 R3"), checks)
        }
        E::X7_1 => {
            let s = blowup(7);
            let seed = plane_standard().embed(s)?.concat(&torsion(s, 1..=7, 0)?)?;
            let l = line(s);
            let w7 = omega(s, 7);
            let e7 = &l + &w7;
            let mut third = vec![-&w7];
            third.extend((1..=7).map(|i| &l - &ex(s, i)));
            let checks = vec![
                Check::Stage {
                    after: 5,
                    blocks: vec![
                        line_set([e7.clone()]),
                        line_set([DivisorClass::zero(s)]),
                        vec![(2, l.clone())],
                        line_set((1..=7).map(|i| &l - &ex(s, i))),
                    ],
                },
                Check::Member { name: "E7", block: 1, rank: 2, c1: e7, slope: q(1, 2) },
                Check::Member { name: "T7", block: 2, rank: 2, c1: l.clone(), slope: q(3, 2) },
                Check::LineBundles { block: 3, c1s: third },
                Check::SameAs { word: word("R1 | L3 | L3 L2 | R1 R2 R3") },
            ];
            (seed, word("R1 | L3 | L3 L2 L1 | R1 | R1 R2 R3"), checks)
        }
        E::X7_2 => {
            let s = blowup(7);
            let seed = torsion(s, 4..=7, -1)?.concat(&build(E::X3)?.embed(s)?)?;
            let l = line(s);
            let (w3, w7) = (omega(s, 3), omega(s, 7));
            let e7 = &l + &w7;
            let e7p = &ex_sum(s, 4..=7) - &l;
            let lower: Vec<DivisorClass> = (1..=3).map(|i| &l - &ex(s, i)).collect();
            let mut third = vec![-&w7];
            third.extend(lower.iter().cloned());
            let checks = vec![
                Check::Stage {
                    after: 5,
                    blocks: vec![
                        line_set([e7.clone(), &(&w7 - &l) - &w3]),
                        line_set([DivisorClass::zero(s)]),
                        line_set((4..=7).map(|i| ex(s, i))),
                        line_set(lower),
                    ],
                },
                Check::Member { name: "E7", block: 1, rank: 2, c1: e7, slope: q(1, 2) },
                Check::Member { name: "E7'", block: 1, rank: 2, c1: e7p, slope: q(1, 2) },
                Check::LineBundles { block: 2, c1s: (4..=7).map(|i| ex(s, i)).collect() },
                Check::LineBundles { block: 3, c1s: third },
            ];
            (seed, word("L3 | R1 | L3 L2 L1 | R1 | R1 R2 R3"), checks)
        }
        E::X7_3 => {
            let s = blowup(7);
            let seed = torsion(s, 7..=7, -1)?.concat(&build(E::X6_1)?.embed(s)?)?;
            let l = line(s);
            let w7 = omega(s, 7);
            let mut third = vec![l.clone(), &l.scale(2) - &ex_sum(s, 1..=3)];
            third.extend((4..=7).map(|i| &ex(s, i) - &w7));
            let checks = vec![
                Check::Member {
                    name: "E7''",
                    block: 1,
                    rank: 3,
                    c1: ex_sum(s, 4..=7),
                    slope: q(4, 3),
                },
                Check::LineBundles { block: 2, c1s: (1..=3).map(|i| &l - &ex(s, i)).collect() },
                Check::LineBundles { block: 3, c1s: third },
            ];
            (seed, word("R1 | R1 R2 R3"), checks)
        }
        E::X8_1 => {
            let s = blowup(8);
            let p = SurfaceId::PLANE;
            let seed = plane_standard()
                .twist(&-&line(p))?
                .embed(s)?
                .concat(&torsion(s, 1..=8, 0)?)?;
            let l = line(s);
            let k = omega(s, 8);
            let mut third = vec![k.clone()];
            third.extend((1..=8).map(|i| -&ex(s, i)));
            let checks = vec![
                Check::Stage {
                    after: 5,
                    blocks: vec![
                        line_set([k.clone()]),
                        line_set([-&l]),
                        vec![(2, -&l)],
                        line_set((1..=8).map(|i| -&ex(s, i))),
                    ],
                },
                Check::Member {
                    name: "E8",
                    block: 1,
                    rank: 3,
                    c1: &k.scale(2) - &l,
                    slope: q(-5, 3),
                },
                Check::Member { name: "F8", block: 2, rank: 3, c1: &k - &l, slope: q(-4, 3) },
                Check::LineBundles { block: 3, c1s: third },
            ];
            (seed, word("R1 | L3 | L3 L2 L1 | L1 | L2"), checks)
        }
        E::X8_2 => {
            let s = blowup(8);
            let seed = torsion(s, 4..=8, -1)?.concat(&build(E::X3)?.embed(s)?)?;
            let l = line(s);
            let (w3, w8) = (omega(s, 3), omega(s, 8));
            let t8p = &(-&w3) - &l;
            let lower: Vec<DivisorClass> = (1..=3).map(|i| &l - &ex(s, i)).collect();
            let mut third: Vec<DivisorClass> = (4..=8).map(|i| &ex(s, i) - &w8).collect();
            third.extend(lower.iter().cloned());
            let checks = vec![
                Check::Stage {
                    after: 2,
                    blocks: vec![
                        (4..=8).map(|i| (0, ex(s, i))).collect(),
                        line_set([DivisorClass::zero(s)]),
                        vec![(2, l.clone()), (2, t8p.clone())],
                        line_set(lower),
                    ],
                },
                Check::Member {
                    name: "E8'",
                    block: 1,
                    rank: 4,
                    c1: ex_sum(s, 4..=8),
                    slope: q(5, 4),
                },
                Check::Member { name: "T8", block: 2, rank: 2, c1: l.clone(), slope: q(3, 2) },
                Check::Member { name: "T8'", block: 2, rank: 2, c1: t8p, slope: q(3, 2) },
                Check::LineBundles { block: 3, c1s: third },
            ];
            (seed, word("L3 | L3 | R1 | R1 | R1 R2 R3"), checks)
        }
        E::X8_3 => {
            let s = blowup(8);
            let seed = torsion(s, 7..=8, -1)?.concat(&build(E::X6_1)?.embed(s)?)?;
            let l = line(s);
            let (w3, w6, w8) = (omega(s, 3), omega(s, 6), omega(s, 8));
            let mut third: Vec<DivisorClass> = (4..=6).map(|i| &ex(s, i) - &w8).collect();
            third.extend((1..=3).map(|i| &l - &ex(s, i)));
            let checks = vec![
                Check::Member {
                    name: "E7''",
                    block: 1,
                    rank: 3,
                    c1: ex_sum(s, 4..=7),
                    slope: q(4, 3),
                },
                Check::Member {
                    name: "E8''",
                    block: 1,
                    rank: 3,
                    c1: &ex_sum(s, 4..=6) + &ex(s, 8),
                    slope: q(4, 3),
                },
                Check::Member { name: "T8", block: 2, rank: 2, c1: l.clone(), slope: q(3, 2) },
                Check::Member {
                    name: "T8'",
                    block: 2,
                    rank: 2,
                    c1: &(-&w3) - &l,
                    slope: q(3, 2),
                },
                Check::Member { name: "T8''", block: 2, rank: 2, c1: &w6 - &w3, slope: q(3, 2) },
                Check::LineBundles { block: 3, c1s: third },
            ];
            (seed, word("R1 | L3 | R1 R2 R3"), checks)
        }
        E::X8_4 => {
            let s = blowup(8);
            let seed = build(E::X3)?.embed(s)?.concat(&torsion(s, 4..=8, 0)?)?;
            let l = line(s);
            let (w3, w8) = (omega(s, 3), omega(s, 8));
            let mut third = vec![l.clone(), &l.scale(2) - &ex_sum(s, 1..=3)];
            third.extend((1..=3).map(|i| &(&l - &ex(s, i)) - &w8));
            let mut checks = vec![Check::Member {
                name: "E8'''",
                block: 1,
                rank: 5,
                c1: w3.scale(-2),
                slope: q(12, 5),
            }];
            for i in 4..=8 {
                checks.push(Check::Member {
                    name: "F8",
                    block: 2,
                    rank: 2,
                    c1: &(-&w3) - &ex(s, i),
                    slope: q(5, 2),
                });
            }
            checks.push(Check::LineBundles { block: 3, c1s: third });
            (seed, word("L2 | R1 | L3 | R1 R2 R3"), checks)
        }
    };
    Ok(Recipe { id, seed, word: w, checks })
}

/// The collection for the first minimum solution of an equation.
pub fn build(id: EquationId) -> Result<Collection> {
    match id {
        EquationId::X1 => Ok(plane_standard()),
        EquationId::X2 => quadric_standard().helix_shift(-1),
        _ => {
            let rec = recipe(id)?;
            let (c, _) = rec.seed.apply_word(&rec.word)?;
            let merged = merge_unique(&c)?;
            finish(id, merged)
        }
    }
}

/// Merge the only adjacent pair of mutually orthogonal blocks.
fn merge_unique(c: &Collection) -> Result<Collection> {
    match c.mergeable_pairs().as_slice() {
        [i] => c.merge(*i),
        other => Err(Error::Invariant(format!(
            "expected one mergeable pair of blocks, found {}",
            other.len()
        ))),
    }
}

fn finish(id: EquationId, c: Collection) -> Result<Collection> {
    let eq = id.equation();
    if c.block_count() != 3 || !c.is_complete() {
        return Err(Error::Invariant(format!("collection for {id} is not a complete 3-block collection")));
    }
    let sol = solution_of(id, &c)?;
    if !eq.is_solution(&sol) {
        return Err(Error::Invariant(format!("collection for {id} has ranks {sol:?}")));
    }
    c.abc()?;
    Ok(c)
}

/// The solution `(r_alpha, r_beta, r_gamma)` of a collection whose type is
/// the equation's block lengths.
pub fn solution_of(id: EquationId, c: &Collection) -> Result<Triple> {
    let eq = id.equation();
    let ty: Vec<i64> = c.type_vector().iter().map(|&n| n as i64).collect();
    if ty != eq.lengths() {
        return Err(Error::Invariant(format!(
            "collection of type {ty:?} does not match equation {id}"
        )));
    }
    let r = c.ranks();
    Ok([r[0], r[1], r[2]])
}

/// Word taking the first collection of an equation to its second minimum
/// solution, for the equations with two.
fn second_solution_word(id: EquationId) -> Option<Vec<Move>> {
    match id {
        EquationId::X4 => Some(word("R1 R2 R2")),
        EquationId::X8_4 => Some(word("L2 L1 L1")),
        _ => None,
    }
}

/// The collection whose ranks are the given minimum solution.
pub fn build_for_solution(id: EquationId, sol: &Triple) -> Result<Collection> {
    let eq = id.equation();
    let minima = eq.minimum_solutions();
    if !minima.contains(sol) {
        return Err(Error::Unsupported(format!(
            "{sol:?} is not a minimum solution of equation {id}"
        )));
    }
    let first = build(id)?;
    if solution_of(id, &first)? == *sol {
        return Ok(first);
    }
    let w = second_solution_word(id)
        .ok_or_else(|| Error::Invariant(format!("no second collection for {id}")))?;
    let (c, _) = first.apply_word(&w)?;
    let c = finish(id, c)?;
    if solution_of(id, &c)? != *sol {
        return Err(Error::Invariant(format!("second collection for {id} has the wrong ranks")));
    }
    Ok(c)
}

/// Outcome of one named check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CheckOutcome {
    pub name: String,
    pub passed: bool,
}

/// Build an entry and evaluate every recorded property.
pub fn verify_entry(id: EquationId) -> Result<Vec<CheckOutcome>> {
    let mut out = Vec::new();
    let built = build(id)?;
    out.push(CheckOutcome { name: "complete 3-block collection".into(), passed: true });
    let Ok(rec) = recipe(id) else {
        return Ok(out);
    };
    for check in &rec.checks {
        let (name, passed) = match check {
            Check::Member { name, block, rank, c1, slope } => {
                let hit = built.blocks()[block - 1].members().iter().any(|m| {
                    m.rank == *rank && m.c1 == *c1 && m.slope() == Slope::Finite(*slope)
                });
                (format!("{name} in block {block}"), hit)
            }
            Check::LineBundles { block, c1s } => {
                let mut want: Vec<KClass> = c1s.iter().map(KClass::line_bundle).collect();
                want.sort();
                let got = built.blocks()[block - 1].sorted_members();
                (format!("line bundles of block {block}"), got == want)
            }
            Check::SameAs { word } => {
                let (a, _) = rec.seed.apply_word(word)?;
                let (b, _) = rec.seed.apply_word(&rec.word)?;
                (format!("word {} agrees", format_word(word)), a == b)
            }
            Check::Stage { after, blocks } => {
                let (stage, _) = rec.seed.apply_word(&rec.word[..*after])?;
                let got: Vec<Vec<(i64, DivisorClass)>> = stage
                    .blocks()
                    .iter()
                    .map(|b| {
                        let mut v: Vec<_> = b.members().iter().map(|m| (m.rank, m.c1.clone())).collect();
                        v.sort();
                        v
                    })
                    .collect();
                let want: Vec<Vec<(i64, DivisorClass)>> = blocks
                    .iter()
                    .map(|b| {
                        let mut v = b.clone();
                        v.sort();
                        v
                    })
                    .collect();
                (format!("stage after {after} moves"), got == want)
            }
        };
        out.push(CheckOutcome { name, passed });
    }
    Ok(out)
}
