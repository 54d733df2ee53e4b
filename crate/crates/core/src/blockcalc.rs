//! Block exceptional collections and their mutations.
//!
//! A block is a list of mutually orthogonal exceptional classes of equal
//! rank. A collection is a list of blocks with `chi(later, earlier) = 0`.
//! Mutating two adjacent blocks `(E, F)` uses only the common value
//! `chi = chi(E_i, F_j)`, the block sizes and the block ranks; the sign of
//! `chi` and a rank comparison decide whether the new block is a division,
//! a recoil or an extension, which fixes the sign of its class.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::kclass::KClass;
use crate::picard::{DivisorClass, SurfaceId};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Block {
    members: Vec<KClass>,
}

impl Block {
    /// Validate and wrap a list of classes. Reports the first violated
    /// invariant.
    pub fn new(members: Vec<KClass>) -> Result<Self> {
        let first = members
            .first()
            .ok_or_else(|| Error::InvalidBlock("empty block".into()))?;
        let (surface, rank) = (first.surface(), first.rank);
        for (i, m) in members.iter().enumerate() {
            if m.surface() != surface {
                return Err(Error::InvalidBlock(format!(
                    "member {} lives on {} instead of {surface}",
                    i + 1,
                    m.surface()
                )));
            }
            if !m.is_exceptional() {
                return Err(Error::InvalidBlock(format!(
                    "member {} {m} is not exceptional",
                    i + 1
                )));
            }
            if m.rank != rank {
                return Err(Error::InvalidBlock(format!(
                    "member {} has rank {} but the block has rank {rank}",
                    i + 1,
                    m.rank
                )));
            }
        }
        for (i, a) in members.iter().enumerate() {
            for (j, b) in members.iter().enumerate() {
                if i != j && a.chi(b)? != 0 {
                    return Err(Error::InvalidBlock(format!(
                        "members {} and {} are not orthogonal",
                        i + 1,
                        j + 1
                    )));
                }
            }
        }
        Ok(Block { members })
    }

    pub fn members(&self) -> &[KClass] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn surface(&self) -> SurfaceId {
        self.members[0].surface()
    }

    /// The common rank of the members.
    pub fn rank(&self) -> i64 {
        self.members[0].rank
    }

    /// Sum of the member classes.
    pub fn total(&self) -> KClass {
        self.members
            .iter()
            .fold(KClass::zero(self.surface()), |acc, m| &acc + m)
    }

    pub fn twist(&self, d: &DivisorClass) -> Result<Self> {
        let members = self.members.iter().map(|m| m.twist(d)).collect::<Result<_>>()?;
        Ok(Block { members })
    }

    /// Members sorted, so that blocks can be compared as sets.
    pub fn sorted_members(&self) -> Vec<KClass> {
        let mut v = self.members.clone();
        v.sort();
        v
    }
}

/// The common value `chi(E_i, F_j)` of a two-block exceptional pair.
///
/// Fails unless `chi(F_j, E_i) = 0` for all members and `chi(E_i, F_j)` is
/// independent of `i, j`.
pub fn chi_block(e: &Block, f: &Block) -> Result<i64> {
    let value = e.members[0].chi(&f.members[0])?;
    for (i, a) in e.members.iter().enumerate() {
        for (j, b) in f.members.iter().enumerate() {
            if b.chi(a)? != 0 {
                return Err(Error::NotTwoBlock(format!(
                    "chi(F{}, E{}) is nonzero",
                    j + 1,
                    i + 1
                )));
            }
            if a.chi(b)? != value {
                return Err(Error::NotTwoBlock(format!(
                    "chi(E{}, F{}) differs from chi(E1, F1) = {value}",
                    i + 1,
                    j + 1
                )));
            }
        }
    }
    Ok(value)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Side {
    Left,
    Right,
}

/// An elementary mutation `L_i` or `R_i` of the blocks at positions `i` and
/// `i + 1` (1-based).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Move {
    pub side: Side,
    pub index: usize,
}

impl Move {
    pub fn left(index: usize) -> Self {
        Move { side: Side::Left, index }
    }

    pub fn right(index: usize) -> Self {
        Move { side: Side::Right, index }
    }
}

impl fmt::Display for Move {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self.side {
            Side::Left => 'L',
            Side::Right => 'R',
        };
        write!(f, "{s}{}", self.index)
    }
}

impl FromStr for Move {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::BraidWord(format!("cannot parse move {s:?}"));
        let mut chars = s.chars();
        let side = match chars.next() {
            Some('L' | 'l') => Side::Left,
            Some('R' | 'r') => Side::Right,
            _ => return Err(bad()),
        };
        let index: usize = chars.as_str().parse().map_err(|_| bad())?;
        if index == 0 {
            return Err(bad());
        }
        Ok(Move { side, index })
    }
}

/// Parse a word of moves separated by whitespace, commas or `|`, in
/// application order.
pub fn parse_word(s: &str) -> Result<Vec<Move>> {
    s.split(|c: char| c.is_whitespace() || c == ',' || c == '|')
        .filter(|t| !t.is_empty())
        .map(str::parse)
        .collect()
}

pub fn format_word(word: &[Move]) -> String {
    word.iter().map(Move::to_string).collect::<Vec<_>>().join(",")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum MutationKind {
    Division,
    Recoil,
    Extension,
}

/// What an elementary mutation did. `trivial` is set when the two blocks
/// were orthogonal and the mutation merely swapped them.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MutationType {
    pub kind: MutationKind,
    pub trivial: bool,
}

impl fmt::Display for MutationType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.trivial {
            write!(f, "trivial ")?;
        }
        write!(f, "{:?}", self.kind)
    }
}

/// Kind of the mutation of `(E, F)` with cross value `chi`, block sizes
/// `alpha = |E|`, `beta = |F|` and ranks `re`, `rf`.
pub fn mutation_type(side: Side, chi: i64, alpha: i64, beta: i64, re: i64, rf: i64) -> MutationType {
    let kind = if chi < 0 {
        MutationKind::Extension
    } else if chi == 0 {
        MutationKind::Recoil
    } else {
        let division = match side {
            Side::Left => alpha * chi * re > rf,
            Side::Right => re <= beta * chi * rf,
        };
        if division {
            MutationKind::Division
        } else {
            MutationKind::Recoil
        }
    };
    MutationType { kind, trivial: chi == 0 }
}

/// Left mutation of `F` through `E`: the new block that precedes `E`.
pub fn left_mutate(e: &Block, f: &Block) -> Result<(Block, MutationType)> {
    let chi = chi_block(e, f)?;
    let t = mutation_type(Side::Left, chi, e.len() as i64, f.len() as i64, e.rank(), f.rank());
    let shift = e.total().scale(chi);
    let members = f
        .members
        .iter()
        .map(|fj| match t.kind {
            MutationKind::Division => &shift - fj,
            _ => fj - &shift,
        })
        .collect();
    Ok((rebuild_block(members)?, t))
}

/// Right mutation of `E` through `F`: the new block that follows `F`.
pub fn right_mutate(e: &Block, f: &Block) -> Result<(Block, MutationType)> {
    let chi = chi_block(e, f)?;
    let t = mutation_type(Side::Right, chi, e.len() as i64, f.len() as i64, e.rank(), f.rank());
    let shift = f.total().scale(chi);
    let members = e
        .members
        .iter()
        .map(|ei| match t.kind {
            MutationKind::Division => &shift - ei,
            _ => ei - &shift,
        })
        .collect();
    Ok((rebuild_block(members)?, t))
}

fn rebuild_block(members: Vec<KClass>) -> Result<Block> {
    Block::new(members).map_err(|e| Error::Invariant(format!("mutation produced a bad block: {e}")))
}

/// A block exceptional collection on a fixed surface.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Collection {
    surface: SurfaceId,
    blocks: Vec<Block>,
}

impl Collection {
    /// Validate every block and the semiorthogonality between blocks.
    pub fn new(blocks: Vec<Vec<KClass>>) -> Result<Self> {
        let blocks = blocks
            .into_iter()
            .enumerate()
            .map(|(i, b)| {
                Block::new(b).map_err(|e| match e {
                    Error::InvalidBlock(msg) => Error::InvalidBlock(format!("block {}: {msg}", i + 1)),
                    other => other,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_blocks(blocks)
    }

    pub fn from_blocks(blocks: Vec<Block>) -> Result<Self> {
        let surface = blocks
            .first()
            .ok_or_else(|| Error::InvalidCollection("no blocks".into()))?
            .surface();
        for (i, b) in blocks.iter().enumerate() {
            if b.surface() != surface {
                return Err(Error::IncompatibleLattices { left: surface, right: b.surface() });
            }
            for (j, earlier) in blocks[..i].iter().enumerate() {
                for later in &b.members {
                    for e in &earlier.members {
                        if later.chi(e)? != 0 {
                            return Err(Error::InvalidCollection(format!(
                                "block {} is not left-orthogonal to block {}",
                                i + 1,
                                j + 1
                            )));
                        }
                    }
                }
            }
        }
        Ok(Collection { surface, blocks })
    }

    /// Each class in its own block.
    pub fn from_sequence(classes: Vec<KClass>) -> Result<Self> {
        Self::new(classes.into_iter().map(|c| vec![c]).collect())
    }

    pub fn surface(&self) -> SurfaceId {
        self.surface
    }

    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }

    pub fn block_count(&self) -> usize {
        self.blocks.len()
    }

    /// Total number of members.
    pub fn len(&self) -> usize {
        self.blocks.iter().map(Block::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    pub fn members(&self) -> impl Iterator<Item = &KClass> {
        self.blocks.iter().flat_map(|b| b.members.iter())
    }

    /// Block sizes.
    pub fn type_vector(&self) -> Vec<usize> {
        self.blocks.iter().map(Block::len).collect()
    }

    /// Block ranks.
    pub fn ranks(&self) -> Vec<i64> {
        self.blocks.iter().map(Block::rank).collect()
    }

    pub fn twist(&self, d: &DivisorClass) -> Result<Self> {
        let blocks = self.blocks.iter().map(|b| b.twist(d)).collect::<Result<_>>()?;
        Ok(Collection { surface: self.surface, blocks })
    }

    /// Pull back to a surface obtained by blowing up further points.
    pub fn embed(&self, into: SurfaceId) -> Result<Self> {
        let blocks = self
            .blocks
            .iter()
            .map(|b| {
                b.members
                    .iter()
                    .map(|m| Ok(KClass::new(m.rank, m.c1.embed(into)?, m.ch2x2)))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Collection::new(blocks)
    }

    /// Concatenate two collections on the same surface, validating the
    /// semiorthogonality across the seam.
    pub fn concat(&self, other: &Collection) -> Result<Self> {
        let mut blocks = self.blocks.clone();
        blocks.extend(other.blocks.iter().cloned());
        Self::from_blocks(blocks)
    }

    /// Merge blocks `i` and `i + 1` (1-based); they must be mutually
    /// orthogonal and of equal rank.
    pub fn merge(&self, i: usize) -> Result<Self> {
        self.check_index(i)?;
        let (a, b) = (&self.blocks[i - 1], &self.blocks[i]);
        let mut members = a.members.clone();
        members.extend(b.members.iter().cloned());
        let merged = Block::new(members)?;
        let mut blocks = self.blocks.clone();
        blocks.splice(i - 1..=i, [merged]);
        Ok(Collection { surface: self.surface, blocks })
    }

    /// Positions `i` (1-based) where blocks `i` and `i + 1` are mutually
    /// orthogonal with equal rank, so that they could be merged.
    pub fn mergeable_pairs(&self) -> Vec<usize> {
        (1..self.blocks.len())
            .filter(|&i| self.merge(i).is_ok())
            .collect()
    }

    fn check_index(&self, index: usize) -> Result<()> {
        if index == 0 || index >= self.blocks.len() {
            return Err(Error::MutationIndex { index, blocks: self.blocks.len() });
        }
        Ok(())
    }

    /// Apply `L_i` or `R_i`.
    ///
    /// `L_i` replaces blocks `(E, F)` at `i, i+1` by `(L_E F, E)`; `R_i`
    /// replaces them by `(F, R_F E)`.
    pub fn mutate(&self, mv: Move) -> Result<(Collection, MutationType)> {
        self.check_index(mv.index)?;
        let (e, f) = (&self.blocks[mv.index - 1], &self.blocks[mv.index]);
        let (pair, t) = match mv.side {
            Side::Left => {
                let (lf, t) = left_mutate(e, f)?;
                ([lf, e.clone()], t)
            }
            Side::Right => {
                let (re, t) = right_mutate(e, f)?;
                ([f.clone(), re], t)
            }
        };
        let mut blocks = self.blocks.clone();
        blocks.splice(mv.index - 1..=mv.index, pair);
        let out = Collection::from_blocks(blocks)
            .map_err(|e| Error::Invariant(format!("{mv} broke semiorthogonality: {e}")))?;
        Ok((out, t))
    }

    /// Apply moves in order, first to last.
    pub fn apply_word(&self, word: &[Move]) -> Result<(Collection, Vec<MutationType>)> {
        let mut cur = self.clone();
        let mut types = Vec::with_capacity(word.len());
        for &mv in word {
            let (next, t) = cur.mutate(mv)?;
            cur = next;
            types.push(t);
        }
        Ok((cur, types))
    }

    /// Whether the classes form a basis of the numerical Grothendieck group.
    ///
    /// The length must equal the rank of `K0`, and the matrix of
    /// coordinates `(rank, c1, chi(O, -))` must be unimodular. These
    /// coordinates are used instead of `(rank, c1, ch2)` because the latter
    /// only span an index-2 sublattice.
    pub fn is_complete(&self) -> bool {
        if self.len() != self.surface.k0_rank() {
            return false;
        }
        let rows: Vec<Vec<i64>> = self
            .members()
            .map(|m| {
                let mut row = vec![m.rank];
                row.extend_from_slice(m.c1.coords());
                row.push(m.euler_characteristic());
                row
            })
            .collect();
        determinant(&rows).abs() == 1
    }

    /// Sequential left-dual basis `A_j^v = L_{A_1} .. L_{A_{j-1}} A_j`, which
    /// satisfies `chi(A_i, A_j^v) = delta_ij`.
    pub fn dual_basis(&self) -> Result<Vec<KClass>> {
        if !self.is_complete() {
            return Err(Error::NotComplete);
        }
        let seq: Vec<&KClass> = self.members().collect();
        let mut dual = Vec::with_capacity(seq.len());
        for j in 0..seq.len() {
            let mut v = seq[j].clone();
            for k in (0..j).rev() {
                let c = seq[k].chi(&v)?;
                v = &v - &seq[k].scale(c);
            }
            dual.push(v);
        }
        for (i, a) in seq.iter().enumerate() {
            for (j, v) in dual.iter().enumerate() {
                if a.chi(v)? != i64::from(i == j) {
                    return Err(Error::Invariant(format!(
                        "dual basis fails at ({}, {})",
                        i + 1,
                        j + 1
                    )));
                }
            }
        }
        Ok(dual)
    }

    /// `<s, t> = sum_i s(e_i) t(e_i^v)` for linear functions on `K0`.
    pub fn pairing(&self, s: impl Fn(&KClass) -> i64, t: impl Fn(&KClass) -> i64) -> Result<i64> {
        let dual = self.dual_basis()?;
        Ok(self.members().zip(&dual).map(|(e, v)| s(e) * t(v)).sum())
    }

    fn three(&self) -> Result<(&Block, &Block, &Block)> {
        match self.blocks.as_slice() {
            [e, f, g] => Ok((e, f, g)),
            _ => Err(Error::NotThreeBlock(self.blocks.len())),
        }
    }

    /// The invariants `a = chi(F, G)`, `b = chi(G(K), E)`, `c = chi(E, F)` of
    /// a complete 3-block collection, checked against their closed forms.
    pub fn abc(&self) -> Result<Abc> {
        let (e, f, g) = self.three()?;
        if !self.is_complete() {
            return Err(Error::NotComplete);
        }
        let k = DivisorClass::canonical(self.surface);
        let abc = Abc {
            a: chi_block(f, g)?,
            b: chi_block(&g.twist(&k)?, e)?,
            c: chi_block(e, f)?,
        };
        let (al, be, ga) = (e.len() as i64, f.len() as i64, g.len() as i64);
        let (x, y, z) = (e.rank(), f.rank(), g.rank());
        let k2 = self.surface.k_squared();
        let checks = [
            abc.c * abc.c * al * be == z * z * k2 * ga,
            abc.a * abc.a * be * ga == x * x * k2 * al,
            abc.b * abc.b * al * ga == y * y * k2 * be,
            be * ga * abc.a * abc.a + al * ga * abc.b * abc.b + al * be * abc.c * abc.c
                == al * be * ga * abc.a * abc.b * abc.c,
        ];
        if checks.iter().any(|ok| !ok) {
            return Err(Error::Invariant(format!(
                "abc invariants {abc:?} violate their closed forms"
            )));
        }
        Ok(abc)
    }

    /// Move along the helix. `+1` gives `(F, G, E(-K))`, `-1` gives
    /// `(G(K), E, F)`; the result is cross-checked against the equivalent
    /// mutation word.
    pub fn helix_shift(&self, k: i64) -> Result<Self> {
        self.three()?;
        let mut cur = self.clone();
        for _ in 0..k.unsigned_abs() {
            cur = cur.helix_step(k > 0)?;
        }
        Ok(cur)
    }

    fn helix_step(&self, forward: bool) -> Result<Self> {
        let (e, f, g) = self.three()?;
        let k = DivisorClass::canonical(self.surface);
        let (blocks, word) = if forward {
            (vec![f.clone(), g.clone(), e.twist(&-&k)?], [Move::right(1), Move::right(2)])
        } else {
            (vec![g.twist(&k)?, e.clone(), f.clone()], [Move::left(2), Move::left(1)])
        };
        let shifted = Collection::from_blocks(blocks)?;
        let (mutated, _) = self.apply_word(&word)?;
        if !shifted.same_blocks_as_sets(&mutated) {
            return Err(Error::Invariant("helix shift disagrees with its mutation word".into()));
        }
        Ok(shifted)
    }

    /// Equality with blocks compared as sets.
    pub fn same_blocks_as_sets(&self, other: &Collection) -> bool {
        self.surface == other.surface
            && self.blocks.len() == other.blocks.len()
            && self
                .blocks
                .iter()
                .zip(&other.blocks)
                .all(|(a, b)| a.sorted_members() == b.sorted_members())
    }

    /// A divisor `D` with `self(D) = other`, blocks compared as sets, if one
    /// exists.
    pub fn equivalent_up_to_twist(&self, other: &Collection) -> Option<DivisorClass> {
        if self.surface != other.surface || self.type_vector() != other.type_vector() {
            return None;
        }
        let first = &self.blocks[0].members[0];
        for cand in &other.blocks[0].members {
            if cand.rank != first.rank || first.rank == 0 {
                continue;
            }
            let Some(d) = (&cand.c1 - &first.c1).div_exact(first.rank) else {
                continue;
            };
            if let Ok(t) = self.twist(&d) {
                if t.same_blocks_as_sets(other) {
                    return Some(d);
                }
            }
        }
        None
    }
}

impl fmt::Display for Collection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{} collection of type {:?}", self.surface, self.type_vector())?;
        for (i, b) in self.blocks.iter().enumerate() {
            writeln!(f, "  block {} (rank {}):", i + 1, b.rank())?;
            for m in &b.members {
                writeln!(f, "    {m}  slope {}", m.slope())?;
            }
        }
        Ok(())
    }
}

/// Cross values of a 3-block collection.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Abc {
    pub a: i64,
    pub b: i64,
    pub c: i64,
}

/// Integer determinant by fraction-free Gaussian elimination.
pub fn determinant(rows: &[Vec<i64>]) -> i128 {
    let n = rows.len();
    let mut m: Vec<Vec<i128>> = rows
        .iter()
        .map(|r| r.iter().map(|&x| x as i128).collect())
        .collect();
    let mut sign = 1;
    let mut prev = 1i128;
    for k in 0..n {
        if m[k][k] == 0 {
            match (k + 1..n).find(|&i| m[i][k] != 0) {
                Some(i) => {
                    m.swap(i, k);
                    sign = -sign;
                }
                None => return 0,
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) / prev;
            }
        }
        prev = m[k][k];
    }
    if n == 0 {
        1
    } else {
        sign * m[n - 1][n - 1]
    }
}
