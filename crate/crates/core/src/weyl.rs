//! Weyl group actions on collections and orbit counting.
//!
//! The Weyl group of a Del Pezzo surface is generated by reflections in
//! simple roots and acts on the Picard lattice by isometries fixing `K`.
//! Since ranks and `chi` are preserved, it acts on numerical 3-block
//! collections. Collections are counted up to twists by line bundles and
//! with blocks taken as unordered sets.

use std::collections::HashSet;

use rayon::prelude::*;
use serde::Serialize;

use crate::blockcalc::{parse_word, Collection};
use crate::catalog;
use crate::error::{Error, Result};
use crate::kclass::KClass;
use crate::markov::EquationId;
use crate::picard::{enumerate_classes, ClassKind, DivisorClass, SurfaceId};

/// An integral linear map of a Picard lattice, stored row-major: row `i`
/// holds the `i`-th coordinates of the images of the basis vectors.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LatticeAutomorphism {
    surface: SurfaceId,
    matrix: Vec<Vec<i64>>,
}

impl LatticeAutomorphism {
    pub fn identity(surface: SurfaceId) -> Self {
        let n = surface.picard_rank();
        let matrix = (0..n).map(|i| (0..n).map(|j| i64::from(i == j)).collect()).collect();
        LatticeAutomorphism { surface, matrix }
    }

    /// The reflection `x -> x + (x.a) a` in a root `a` with `a^2 = -2`.
    pub fn reflection(root: &DivisorClass) -> Result<Self> {
        if root.square() != -2 || root.dot_canonical() != 0 {
            return Err(Error::Unsupported(format!("{root} is not a root")));
        }
        let surface = root.surface();
        let n = surface.picard_rank();
        let mut matrix = vec![vec![0; n]; n];
        for j in 0..n {
            let e = DivisorClass::basis(surface, j);
            let image = &e + &root.scale(e.intersect(root)?);
            for (i, row) in matrix.iter_mut().enumerate() {
                row[j] = image.coords()[i];
            }
        }
        Ok(LatticeAutomorphism { surface, matrix })
    }

    pub fn surface(&self) -> SurfaceId {
        self.surface
    }

    fn apply_coords(&self, x: &[i64], out: &mut [i64]) {
        for (o, row) in out.iter_mut().zip(&self.matrix) {
            *o = row.iter().zip(x).map(|(a, b)| a * b).sum();
        }
    }

    pub fn apply(&self, d: &DivisorClass) -> Result<DivisorClass> {
        if d.surface() != self.surface {
            return Err(Error::IncompatibleLattices { left: self.surface, right: d.surface() });
        }
        let mut out = vec![0; d.coords().len()];
        self.apply_coords(d.coords(), &mut out);
        DivisorClass::new(self.surface, out)
    }

    /// `self` after `other`.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        if self.surface != other.surface {
            return Err(Error::IncompatibleLattices { left: self.surface, right: other.surface });
        }
        let n = self.matrix.len();
        let matrix = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| (0..n).map(|k| self.matrix[i][k] * other.matrix[k][j]).sum())
                    .collect()
            })
            .collect();
        Ok(LatticeAutomorphism { surface: self.surface, matrix })
    }

    /// Whether the map preserves the intersection form and fixes `K`.
    pub fn is_weyl_element(&self) -> bool {
        let s = self.surface;
        let n = s.picard_rank();
        let images: Vec<DivisorClass> = (0..n)
            .map(|j| self.apply(&DivisorClass::basis(s, j)).expect("same surface"))
            .collect();
        let isometry = (0..n)
            .all(|i| (0..n).all(|j| images[i].intersect(&images[j]).ok() == Some(s.form(i, j))));
        isometry && self.apply(&DivisorClass::canonical(s)).ok() == Some(DivisorClass::canonical(s))
    }
}

/// Simple roots: `l0 - l1 - l2 - l3` (when `r >= 3`) and `l_i - l_{i+1}`;
/// `f1 - f2` on the quadric.
pub fn simple_roots(surface: SurfaceId) -> Vec<DivisorClass> {
    match surface {
        SurfaceId::Quadric => {
            vec![DivisorClass::new(surface, vec![1, -1]).expect("quadric has rank 2")]
        }
        SurfaceId::PlaneBlowup(r) => {
            let r = r as usize;
            let e = |i| DivisorClass::basis(surface, i);
            let mut roots = Vec::new();
            if r >= 3 {
                roots.push(&(&(&e(0) - &e(1)) - &e(2)) - &e(3));
            }
            for i in 1..r {
                roots.push(&e(i) - &e(i + 1));
            }
            roots
        }
    }
}

pub fn simple_reflections(surface: SurfaceId) -> Vec<LatticeAutomorphism> {
    simple_roots(surface)
        .iter()
        .map(|a| LatticeAutomorphism::reflection(a).expect("simple roots are roots"))
        .collect()
}

/// Apply a lattice automorphism to every first Chern class.
pub fn apply_to_collection(g: &LatticeAutomorphism, c: &Collection) -> Result<Collection> {
    let blocks = c
        .blocks()
        .iter()
        .map(|b| {
            b.members()
                .iter()
                .map(|m| Ok(KClass::new(m.rank, g.apply(&m.c1)?, m.ch2x2)))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Collection::new(blocks)
        .map_err(|e| Error::Invariant(format!("Weyl action broke a collection: {e}")))
}

/// Fixed shape of the collections in one orbit.
struct Shape {
    dim: usize,
    /// Member ranks, in collection order.
    ranks: Vec<i64>,
    /// Member index ranges of the blocks.
    blocks: Vec<std::ops::Range<usize>>,
    total_rank: i64,
}

type State = Box<[i16]>;

impl Shape {
    fn of(c: &Collection) -> Result<Self> {
        let mut ranks = Vec::new();
        let mut blocks = Vec::new();
        for b in c.blocks() {
            let start = ranks.len();
            ranks.extend(b.members().iter().map(|m| m.rank));
            blocks.push(start..ranks.len());
        }
        if ranks.iter().any(|&r| r <= 0) {
            return Err(Error::Unsupported("orbit counting needs positive ranks".into()));
        }
        Ok(Shape {
            dim: c.surface().picard_rank(),
            total_rank: ranks.iter().sum(),
            ranks,
            blocks,
        })
    }

    /// Twist so that the total first Chern class has every coordinate in
    /// `[0, total_rank)`, then sort each block. The result does not depend
    /// on the twist class or on the order inside blocks.
    fn normalize(&self, c1s: &mut [i64]) -> Result<State> {
        let dim = self.dim;
        let mut shift = vec![0i64; dim];
        for (k, s) in shift.iter_mut().enumerate() {
            let total: i64 = (0..self.ranks.len()).map(|m| c1s[m * dim + k]).sum();
            *s = -total.div_euclid(self.total_rank);
        }
        for (m, &r) in self.ranks.iter().enumerate() {
            for k in 0..dim {
                c1s[m * dim + k] += r * shift[k];
            }
        }
        let mut out = Vec::with_capacity(c1s.len());
        for range in &self.blocks {
            let mut members: Vec<&[i64]> = range.clone().map(|m| &c1s[m * dim..(m + 1) * dim]).collect();
            members.sort();
            for v in members {
                for &x in v {
                    out.push(i16::try_from(x).map_err(|_| {
                        Error::Invariant("orbit coordinates exceed the state encoding".into())
                    })?);
                }
            }
        }
        Ok(out.into_boxed_slice())
    }

    fn act(&self, g: &LatticeAutomorphism, s: &State) -> Result<State> {
        let dim = self.dim;
        let src: Vec<i64> = s.iter().map(|&x| x as i64).collect();
        let mut dst = vec![0i64; src.len()];
        for m in 0..self.ranks.len() {
            g.apply_coords(&src[m * dim..(m + 1) * dim], &mut dst[m * dim..(m + 1) * dim]);
        }
        self.normalize(&mut dst)
    }
}

/// Size of the Weyl orbit of a collection, counted up to twists and with
/// blocks as sets.
pub fn orbit_count(c: &Collection) -> Result<usize> {
    let shape = Shape::of(c)?;
    let gens = simple_reflections(c.surface());
    let mut start: Vec<i64> = c.members().flat_map(|m| m.c1.coords().to_vec()).collect();
    let s0 = shape.normalize(&mut start)?;
    let mut seen: HashSet<State> = HashSet::from([s0.clone()]);
    let mut frontier = vec![s0];
    while !frontier.is_empty() {
        let mut next: Vec<State> = frontier
            .par_iter()
            .flat_map_iter(|s| gens.iter().map(|g| shape.act(g, s)))
            .collect::<Result<Vec<_>>>()?;
        next.par_sort_unstable();
        next.dedup();
        next.retain(|s| !seen.contains(s));
        seen.extend(next.iter().cloned());
        frontier = next;
    }
    Ok(seen.len())
}

/// Number of collections equivalent to a given one inside its orbit class,
/// as used when dividing orbit sizes.
pub fn c_value(id: EquationId) -> u64 {
    use EquationId as E;
    match id {
        E::X4 | E::X5 | E::X7_1 | E::X7_2 | E::X8_4 => 2,
        E::X6_1 => 3,
        _ => 1,
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OrbitRow {
    pub equation: EquationId,
    pub surface: String,
    pub block_type: [i64; 3],
    /// Orbit sizes summed over the minimum solutions.
    pub n: u64,
    pub c: u64,
    pub orbits: u64,
}

pub fn orbit_row(id: EquationId) -> Result<OrbitRow> {
    let eq = id.equation();
    let mut n = 0u64;
    for sol in eq.minimum_solutions() {
        n += orbit_count(&catalog::build_for_solution(id, &sol)?)? as u64;
    }
    let c = c_value(id);
    if !n.is_multiple_of(c) {
        return Err(Error::Invariant(format!("orbit size {n} of {id} is not divisible by {c}")));
    }
    Ok(OrbitRow {
        equation: id,
        surface: eq.surface().to_string(),
        block_type: eq.lengths(),
        n,
        c,
        orbits: n / c,
    })
}

pub fn orbit_table() -> Result<Vec<OrbitRow>> {
    EquationId::ALL.iter().map(|&id| orbit_row(id)).collect()
}

/// Number of unordered `m`-sets of pairwise disjoint (-1)-curves.
pub fn count_disjoint_sets(surface: SurfaceId, m: usize) -> Result<u64> {
    let curves = enumerate_classes(surface, ClassKind::MinusOne)?;
    let n = curves.len();
    let words = n.div_ceil(64).max(1);
    let mut adj = vec![vec![0u64; words]; n];
    for i in 0..n {
        for j in 0..n {
            if i != j && curves[i].intersect(&curves[j])? == 0 {
                adj[i][j / 64] |= 1 << (j % 64);
            }
        }
    }
    if m == 0 {
        return Ok(1);
    }
    // Candidates after fixing vertex i: its later neighbours.
    let later = |i: usize| -> Vec<u64> {
        let mut v = adj[i].clone();
        for (w, word) in v.iter_mut().enumerate() {
            for b in 0..64 {
                if w * 64 + b <= i {
                    *word &= !(1u64 << b);
                }
            }
        }
        v
    };
    let total = (0..n)
        .into_par_iter()
        .map(|i| count_cliques(&adj, &later(i), m - 1))
        .sum();
    Ok(total)
}

fn count_cliques(adj: &[Vec<u64>], cand: &[u64], need: usize) -> u64 {
    if need == 0 {
        return 1;
    }
    let available: u32 = cand.iter().map(|w| w.count_ones()).sum();
    if (available as usize) < need {
        return 0;
    }
    let mut total = 0;
    let mut rest = cand.to_vec();
    for w in 0..rest.len() {
        while rest[w] != 0 {
            let b = rest[w].trailing_zeros() as usize;
            rest[w] &= rest[w] - 1;
            let v = w * 64 + b;
            let next: Vec<u64> = rest.iter().zip(&adj[v]).map(|(a, b)| a & b).collect();
            total += count_cliques(adj, &next, need - 1);
        }
    }
    total
}

/// A relation between the orbit size of an equation and counts of disjoint
/// curves, coming from splitting a block of torsion-derived line bundles.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RecursionReport {
    pub equation: EquationId,
    pub n: u64,
    pub block: u64,
    pub split: u64,
    pub curves: usize,
    /// `N * binom(block, split)`.
    pub lhs: u64,
    /// `N' * #(disjoint curve sets)`.
    pub rhs: u64,
    pub holds: bool,
}

fn binomial(n: u64, k: u64) -> u64 {
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

/// Check `N * binom(n, m) = N' * D` where `D` counts sets of pairwise
/// disjoint (-1)-curves and `N'` is the orbit size of the collection the
/// recipe starts from.
pub fn recursion_check(id: EquationId) -> Result<RecursionReport> {
    use EquationId as E;
    // (block length, split size, number of curves, source collection)
    let (block, split, curves, source) = match id {
        E::X8_1 => (9, 8, 8, None),
        E::X7_1 => (8, 7, 7, None),
        E::X8_2 => (8, 5, 5, Some(E::X3)),
        E::X3 => (2, 1, 3, None),
        E::X6_2 => (2, 1, 6, None),
        _ => {
            return Err(Error::Unsupported(format!(
                "no recursion relation is recorded for equation {id}"
            )))
        }
    };
    let n = orbit_row(id)?.n;
    let source_orbit = match source {
        None => orbit_count(&catalog::plane_standard())?,
        Some(src) => orbit_count(&catalog::build(src)?)?,
    } as u64;
    let d = count_disjoint_sets(id.equation().surface(), curves)?;
    let lhs = n * binomial(block, split);
    let rhs = source_orbit * d;
    Ok(RecursionReport {
        equation: id,
        n,
        block,
        split,
        curves,
        lhs,
        rhs,
        holds: lhs == rhs,
    })
}

/// Confirm the divisor used for an equation: the collections that share a
/// helix or a minimum solution are pairwise not related by a twist.
pub fn verify_c(id: EquationId) -> Result<bool> {
    let collections = match id {
        EquationId::X6_1 => {
            let t = catalog::build(id)?;
            vec![t.clone(), t.helix_shift(-1)?, t.helix_shift(-2)?]
        }
        EquationId::X5 => {
            let t = catalog::build(id)?;
            let (other, _) = t.apply_word(&parse_word("R1 R2 R2")?)?;
            if catalog::solution_of(id, &other)? != catalog::solution_of(id, &t)? {
                return Err(Error::Invariant("comparison collection changed the solution".into()));
            }
            vec![t, other]
        }
        _ if c_value(id) == 1 => return Ok(true),
        _ => {
            return Err(Error::Unsupported(format!(
                "the divisor for equation {id} is not verified computationally"
            )))
        }
    };
    for (i, a) in collections.iter().enumerate() {
        for b in &collections[i + 1..] {
            if a.equivalent_up_to_twist(b).is_some() {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generators_are_weyl_elements() {
        for r in 0..=8 {
            let s = SurfaceId::PlaneBlowup(r);
            let gens = simple_reflections(s);
            assert_eq!(gens.len(), match r { 0 | 1 => 0, 2 => 1, _ => r as usize });
            for g in &gens {
                assert!(g.is_weyl_element());
                assert_eq!(g.compose(g).unwrap(), LatticeAutomorphism::identity(s));
            }
        }
        let q = simple_reflections(SurfaceId::Quadric);
        assert_eq!(q.len(), 1);
        let f1 = DivisorClass::basis(SurfaceId::Quadric, 0);
        assert_eq!(q[0].apply(&f1).unwrap(), DivisorClass::basis(SurfaceId::Quadric, 1));
    }

    #[test]
    fn reflections_permute_curves() {
        let s = SurfaceId::PlaneBlowup(6);
        let curves: HashSet<DivisorClass> =
            enumerate_classes(s, ClassKind::MinusOne).unwrap().into_iter().collect();
        for g in simple_reflections(s) {
            for c in &curves {
                assert!(curves.contains(&g.apply(c).unwrap()));
            }
        }
    }

    #[test]
    fn small_orbits() {
        assert_eq!(orbit_count(&catalog::plane_standard()).unwrap(), 1);
        assert_eq!(orbit_count(&catalog::build(EquationId::X2).unwrap()).unwrap(), 1);
        assert_eq!(orbit_count(&catalog::build(EquationId::X3).unwrap()).unwrap(), 1);
        assert_eq!(orbit_count(&catalog::build(EquationId::X5).unwrap()).unwrap(), 20);
    }

    #[test]
    fn orbit_size_ignores_twists_and_block_order() {
        let c = catalog::build(EquationId::X5).unwrap();
        let d = DivisorClass::new(c.surface(), vec![2, -1, 0, 3, 1, 1]).unwrap();
        assert_eq!(orbit_count(&c.twist(&d).unwrap()).unwrap(), 20);
        let g = &simple_reflections(c.surface())[0];
        assert_eq!(orbit_count(&apply_to_collection(g, &c).unwrap()).unwrap(), 20);
    }

    #[test]
    fn disjoint_sets_small() {
        assert_eq!(count_disjoint_sets(SurfaceId::PlaneBlowup(3), 3).unwrap(), 2);
        assert_eq!(count_disjoint_sets(SurfaceId::PlaneBlowup(6), 6).unwrap(), 72);
        assert_eq!(count_disjoint_sets(SurfaceId::PlaneBlowup(4), 1).unwrap(), 10);
        assert_eq!(count_disjoint_sets(SurfaceId::PLANE, 1).unwrap(), 0);
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(9, 8), 9);
        assert_eq!(binomial(8, 5), 56);
        assert_eq!(binomial(5, 0), 1);
    }

    #[test]
    fn divisor_checks() {
        assert!(verify_c(EquationId::X6_1).unwrap());
        assert!(verify_c(EquationId::X5).unwrap());
        assert!(verify_c(EquationId::X1).unwrap());
        assert!(verify_c(EquationId::X7_1).is_err());
    }
}
