//! Classes in the numerical Grothendieck group.
//!
//! A class is stored as `(rank, c1, 2*ch2)`. Doubling `ch2` keeps every
//! quantity integral: for a line bundle `O(D)` the triple is `(1, D, D^2)` and
//! for the torsion sheaf `O_l(m)` supported on a (-1)-curve it is
//! `(0, l, 2m + 1)`.
//!
//! The Euler form follows from Riemann-Roch on a Del Pezzo surface:
//!
//! ```text
//! chi(E, F) = rE rF + (rE dF - rF dE)/2 + (rE ch2F + rF ch2E) - c1E.c1F
//! ```
//!
//! with `d = c1.(-K)`.

use std::fmt;
use std::ops::{Add, Neg, Sub};

use num_rational::Ratio;

use crate::error::{Error, Result};
use crate::picard::{DivisorClass, SurfaceId};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct KClass {
    pub rank: i64,
    pub c1: DivisorClass,
    /// Twice the second Chern character.
    pub ch2x2: i64,
}

/// Slope `d / r`, with torsion classes at `+inf`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Slope {
    Finite(Ratio<i64>),
    Infinite,
}

impl fmt::Display for Slope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Slope::Finite(q) => write!(f, "{}/{}", q.numer(), q.denom()),
            Slope::Infinite => write!(f, "+inf"),
        }
    }
}

/// Which space can be nonzero between two exceptional objects.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PairType {
    Hom,
    Ext,
    Zero,
}

impl KClass {
    pub fn new(rank: i64, c1: DivisorClass, ch2x2: i64) -> Self {
        KClass { rank, c1, ch2x2 }
    }

    pub fn zero(surface: SurfaceId) -> Self {
        KClass::new(0, DivisorClass::zero(surface), 0)
    }

    pub fn structure_sheaf(surface: SurfaceId) -> Self {
        KClass::new(1, DivisorClass::zero(surface), 0)
    }

    pub fn line_bundle(d: &DivisorClass) -> Self {
        KClass::new(1, d.clone(), d.square())
    }

    /// `O_l(m)` for a (-1)-class `l`.
    pub fn torsion(l: &DivisorClass, m: i64) -> Result<Self> {
        if l.square() != -1 || l.dot_canonical() != -1 {
            return Err(Error::NotMinusOneClass(l.to_string()));
        }
        Ok(KClass::new(0, l.clone(), 2 * m + 1))
    }

    /// The unique `2*ch2` making `(rank, c1)` exceptional.
    pub fn exceptional_ch2x2(rank: i64, c1: &DivisorClass) -> Result<i64> {
        if rank <= 0 {
            return Err(Error::NotExceptional(format!(
                "rank {rank} has no determined ch2"
            )));
        }
        let num = 1 + c1.square() - rank * rank;
        if num % rank != 0 {
            return Err(Error::NotExceptional(format!("rank {rank}, c1 = {c1}")));
        }
        Ok(num / rank)
    }

    pub fn exceptional(rank: i64, c1: &DivisorClass) -> Result<Self> {
        Ok(KClass::new(rank, c1.clone(), Self::exceptional_ch2x2(rank, c1)?))
    }

    pub fn surface(&self) -> SurfaceId {
        self.c1.surface()
    }

    /// `c1 . (-K)`.
    pub fn degree(&self) -> i64 {
        -self.c1.dot_canonical()
    }

    pub fn slope(&self) -> Slope {
        if self.rank == 0 {
            Slope::Infinite
        } else {
            Slope::Finite(Ratio::new(self.degree(), self.rank))
        }
    }

    /// The Euler form `chi(self, other)`.
    pub fn chi(&self, other: &KClass) -> Result<i64> {
        let cc = self.c1.intersect(&other.c1)?;
        let (r1, r2) = (self.rank, other.rank);
        let (d1, d2) = (self.degree(), other.degree());
        let twice = 2 * r1 * r2 + (r1 * d2 - r2 * d1) + (r1 * other.ch2x2 + r2 * self.ch2x2)
            - 2 * cc;
        if twice % 2 != 0 {
            return Err(Error::Invariant(format!(
                "odd Euler form between {self} and {other}"
            )));
        }
        Ok(twice / 2)
    }

    /// The antisymmetric part `chi(E,F) - chi(F,E) = rE dF - rF dE`.
    pub fn chi_minus(&self, other: &KClass) -> Result<i64> {
        if self.surface() != other.surface() {
            return Err(Error::IncompatibleLattices {
                left: self.surface(),
                right: other.surface(),
            });
        }
        Ok(self.rank * other.degree() - other.rank * self.degree())
    }

    /// `chi(O, E)`, the holomorphic Euler characteristic.
    pub fn euler_characteristic(&self) -> i64 {
        self.rank + (self.degree() + self.ch2x2) / 2
    }

    /// Tensor by the line bundle `O(d)`.
    pub fn twist(&self, d: &DivisorClass) -> Result<Self> {
        let cd = self.c1.intersect(d)?;
        Ok(KClass {
            rank: self.rank,
            c1: self.c1.checked_add(&d.scale(self.rank))?,
            ch2x2: self.ch2x2 + 2 * cd + self.rank * d.square(),
        })
    }

    /// The dual class `E^*`.
    pub fn dual(&self) -> Self {
        KClass::new(self.rank, -&self.c1, self.ch2x2)
    }

    pub fn scale(&self, k: i64) -> Self {
        KClass::new(k * self.rank, self.c1.scale(k), k * self.ch2x2)
    }

    pub fn checked_add(&self, other: &KClass) -> Result<Self> {
        Ok(KClass::new(
            self.rank + other.rank,
            self.c1.checked_add(&other.c1)?,
            self.ch2x2 + other.ch2x2,
        ))
    }

    pub fn checked_sub(&self, other: &KClass) -> Result<Self> {
        self.checked_add(&-other)
    }

    /// Whether this class has the numerical invariants of an exceptional
    /// object: `chi(E,E) = 1` together with the rank-specific constraint
    /// (ch2 formula for positive rank, a (-1)-curve and odd `2*ch2` for
    /// torsion classes).
    pub fn is_exceptional(&self) -> bool {
        match self.rank {
            r if r > 0 => Self::exceptional_ch2x2(r, &self.c1).ok() == Some(self.ch2x2),
            0 => {
                self.c1.square() == -1
                    && self.c1.dot_canonical() == -1
                    && self.ch2x2.rem_euclid(2) == 1
            }
            _ => false,
        }
    }

    /// Diagnose why a class fails [`KClass::is_exceptional`].
    pub fn check_exceptional(&self) -> Result<()> {
        if self.is_exceptional() {
            return Ok(());
        }
        Err(Error::NotExceptional(self.to_string()))
    }
}

/// Decide whether Hom or Ext may be nonzero between two exceptional objects,
/// by comparing slopes.
pub fn classify_pair(e: &KClass, f: &KClass) -> PairType {
    match e.slope().cmp(&f.slope()) {
        std::cmp::Ordering::Less => PairType::Hom,
        std::cmp::Ordering::Greater => PairType::Ext,
        std::cmp::Ordering::Equal => PairType::Zero,
    }
}

impl fmt::Display for KClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(r={}, c1={}, 2ch2={})", self.rank, self.c1, self.ch2x2)
    }
}

impl Neg for &KClass {
    type Output = KClass;
    fn neg(self) -> KClass {
        self.scale(-1)
    }
}

impl Add for &KClass {
    type Output = KClass;
    /// Panics if the operands live on different surfaces.
    fn add(self, rhs: &KClass) -> KClass {
        self.checked_add(rhs).expect("K-classes on different surfaces")
    }
}

impl Sub for &KClass {
    type Output = KClass;
    /// Panics if the operands live on different surfaces.
    fn sub(self, rhs: &KClass) -> KClass {
        self.checked_sub(rhs).expect("K-classes on different surfaces")
    }
}
