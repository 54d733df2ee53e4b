//! Picard lattices of Del Pezzo surfaces.
//!
//! A plane blow-up `X_r` (with `X_0 = P2`) has basis `l0, l1, .., lr` where
//! `l0` is the pullback of a line and `li` are the exceptional curves. The
//! intersection form is diagonal `(1, -1, .., -1)` and the canonical class is
//! `-3 l0 + l1 + .. + lr`. The quadric `P1 x P1` has basis `f1, f2` of the two
//! rulings with `f1.f2 = 1`, `fi^2 = 0` and canonical class `-2 f1 - 2 f2`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A Del Pezzo surface, identified by its Picard lattice.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum SurfaceId {
    /// The plane blown up in `r` points in general position, `0 <= r <= 8`.
    PlaneBlowup(u8),
    /// `P1 x P1`.
    Quadric,
}

impl SurfaceId {
    pub const PLANE: SurfaceId = SurfaceId::PlaneBlowup(0);

    /// The blow-up of the plane in `r` points. Fails for `r > 8`.
    pub fn blowup(r: u8) -> Result<SurfaceId> {
        if r > 8 {
            return Err(Error::UnknownSurface(format!("X{r}")));
        }
        Ok(SurfaceId::PlaneBlowup(r))
    }

    pub fn k_squared(self) -> i64 {
        match self {
            SurfaceId::PlaneBlowup(r) => 9 - r as i64,
            SurfaceId::Quadric => 8,
        }
    }

    pub fn picard_rank(self) -> usize {
        match self {
            SurfaceId::PlaneBlowup(r) => r as usize + 1,
            SurfaceId::Quadric => 2,
        }
    }

    /// Rank of the Grothendieck group, which is the length of any full
    /// exceptional collection.
    pub fn k0_rank(self) -> usize {
        self.picard_rank() + 2
    }

    /// Gram matrix entry `e_i . e_j` in the standard basis.
    pub fn form(self, i: usize, j: usize) -> i64 {
        match self {
            SurfaceId::PlaneBlowup(_) => match (i, j) {
                (0, 0) => 1,
                _ if i == j => -1,
                _ => 0,
            },
            SurfaceId::Quadric => i64::from(i != j),
        }
    }
}

impl fmt::Display for SurfaceId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SurfaceId::PlaneBlowup(0) => write!(f, "P2"),
            SurfaceId::PlaneBlowup(r) => write!(f, "X{r}"),
            SurfaceId::Quadric => write!(f, "P1xP1"),
        }
    }
}

impl FromStr for SurfaceId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        match t.to_ascii_lowercase().as_str() {
            "p2" => return Ok(SurfaceId::PLANE),
            "p1xp1" | "p1p1" | "quadric" => return Ok(SurfaceId::Quadric),
            _ => {}
        }
        t.strip_prefix(['X', 'x'])
            .and_then(|n| n.parse::<u8>().ok())
            .filter(|&r| r <= 8)
            .map(SurfaceId::PlaneBlowup)
            .ok_or_else(|| Error::UnknownSurface(s.to_string()))
    }
}

/// An element of a Picard lattice in standard coordinates.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DivisorClass {
    surface: SurfaceId,
    coords: Vec<i64>,
}

impl DivisorClass {
    pub fn new(surface: SurfaceId, coords: Vec<i64>) -> Result<Self> {
        let expected = surface.picard_rank();
        if coords.len() != expected {
            return Err(Error::CoordinateLength {
                surface,
                expected,
                found: coords.len(),
            });
        }
        Ok(DivisorClass { surface, coords })
    }

    pub fn zero(surface: SurfaceId) -> Self {
        DivisorClass {
            surface,
            coords: vec![0; surface.picard_rank()],
        }
    }

    /// The `i`-th standard basis vector.
    pub fn basis(surface: SurfaceId, i: usize) -> Self {
        let mut d = Self::zero(surface);
        d.coords[i] = 1;
        d
    }

    /// The pullback `l` of a line class on a plane blow-up.
    pub fn line(surface: SurfaceId) -> Self {
        Self::basis(surface, 0)
    }

    /// The exceptional curve `l_i`, `1 <= i <= r`.
    pub fn exceptional(surface: SurfaceId, i: usize) -> Self {
        Self::basis(surface, i)
    }

    pub fn canonical(surface: SurfaceId) -> Self {
        let coords = match surface {
            SurfaceId::PlaneBlowup(r) => {
                let mut v = vec![1; r as usize + 1];
                v[0] = -3;
                v
            }
            SurfaceId::Quadric => vec![-2, -2],
        };
        DivisorClass { surface, coords }
    }

    pub fn surface(&self) -> SurfaceId {
        self.surface
    }

    pub fn coords(&self) -> &[i64] {
        &self.coords
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|&c| c == 0)
    }

    fn same_lattice(&self, other: &Self) -> Result<()> {
        if self.surface != other.surface {
            return Err(Error::IncompatibleLattices {
                left: self.surface,
                right: other.surface,
            });
        }
        Ok(())
    }

    pub fn intersect(&self, other: &Self) -> Result<i64> {
        self.same_lattice(other)?;
        Ok(self.dot_unchecked(other))
    }

    fn dot_unchecked(&self, other: &Self) -> i64 {
        match self.surface {
            SurfaceId::PlaneBlowup(_) => {
                let (a, b) = (&self.coords, &other.coords);
                a[0] * b[0] - a[1..].iter().zip(&b[1..]).map(|(x, y)| x * y).sum::<i64>()
            }
            SurfaceId::Quadric => {
                self.coords[0] * other.coords[1] + self.coords[1] * other.coords[0]
            }
        }
    }

    pub fn square(&self) -> i64 {
        self.dot_unchecked(self)
    }

    /// `D . K`.
    pub fn dot_canonical(&self) -> i64 {
        self.dot_unchecked(&Self::canonical(self.surface))
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        self.same_lattice(other)?;
        Ok(self.zip_with(other, |a, b| a + b))
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        self.same_lattice(other)?;
        Ok(self.zip_with(other, |a, b| a - b))
    }

    fn zip_with(&self, other: &Self, f: impl Fn(i64, i64) -> i64) -> Self {
        DivisorClass {
            surface: self.surface,
            coords: self.coords.iter().zip(&other.coords).map(|(&a, &b)| f(a, b)).collect(),
        }
    }

    pub fn scale(&self, k: i64) -> Self {
        DivisorClass {
            surface: self.surface,
            coords: self.coords.iter().map(|c| c * k).collect(),
        }
    }

    /// Exact division of every coordinate by `k`, if possible.
    pub fn div_exact(&self, k: i64) -> Option<Self> {
        if k == 0 || self.coords.iter().any(|c| c % k != 0) {
            return None;
        }
        Some(DivisorClass {
            surface: self.surface,
            coords: self.coords.iter().map(|c| c / k).collect(),
        })
    }

    /// Pull back along the blow-down `into -> self.surface()`.
    ///
    /// Only plane blow-ups with `r <= r'` are related by a blowdown chain;
    /// the pullback pads with zeros.
    pub fn embed(&self, into: SurfaceId) -> Result<Self> {
        match (self.surface, into) {
            (SurfaceId::PlaneBlowup(r), SurfaceId::PlaneBlowup(s)) if r <= s => {
                let mut coords = self.coords.clone();
                coords.resize(s as usize + 1, 0);
                Ok(DivisorClass { surface: into, coords })
            }
            (a, b) if a == b => Ok(self.clone()),
            (from, into) => Err(Error::NoBlowdownChain { from, into }),
        }
    }
}

impl fmt::Display for DivisorClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<String> = match self.surface {
            SurfaceId::PlaneBlowup(_) => (0..self.coords.len()).map(|i| format!("l{i}")).collect(),
            SurfaceId::Quadric => vec!["f1".into(), "f2".into()],
        };
        let mut first = true;
        for (c, name) in self.coords.iter().zip(&names) {
            if *c == 0 {
                continue;
            }
            let sign = if *c < 0 { "-" } else if first { "" } else { "+" };
            let mag = c.abs();
            if mag == 1 {
                write!(f, "{sign}{name}")?;
            } else {
                write!(f, "{sign}{mag}{name}")?;
            }
            first = false;
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

macro_rules! lattice_binop {
    ($trait:ident, $method:ident, $checked:ident) => {
        impl $trait for &DivisorClass {
            type Output = DivisorClass;
            /// Panics if the operands live on different surfaces.
            fn $method(self, rhs: &DivisorClass) -> DivisorClass {
                self.$checked(rhs).expect("lattice operands on different surfaces")
            }
        }
        impl $trait for DivisorClass {
            type Output = DivisorClass;
            fn $method(self, rhs: DivisorClass) -> DivisorClass {
                (&self).$method(&rhs)
            }
        }
    };
}

lattice_binop!(Add, add, checked_add);
lattice_binop!(Sub, sub, checked_sub);

impl Neg for &DivisorClass {
    type Output = DivisorClass;
    fn neg(self) -> DivisorClass {
        self.scale(-1)
    }
}

impl Neg for DivisorClass {
    type Output = DivisorClass;
    fn neg(self) -> DivisorClass {
        self.scale(-1)
    }
}

impl Mul<&DivisorClass> for i64 {
    type Output = DivisorClass;
    fn mul(self, rhs: &DivisorClass) -> DivisorClass {
        rhs.scale(self)
    }
}

/// Which distinguished classes to enumerate.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ClassKind {
    /// `D^2 = -1`, `D.K = -1`: classes of exceptional curves.
    MinusOne,
    /// `D^2 = -2`, `D.K = 0`: roots of the lattice `K^perp`.
    Root,
}

impl ClassKind {
    fn targets(self) -> (i64, i64) {
        match self {
            ClassKind::MinusOne => (-1, -1),
            ClassKind::Root => (-2, 0),
        }
    }
}

/// All classes of the given kind, sorted.
///
/// The search runs with `|l0-coefficient| <= 3(r+1)` and is repeated with the
/// bound doubled; the two results must agree, otherwise an invariant error is
/// returned.
pub fn enumerate_classes(surface: SurfaceId, kind: ClassKind) -> Result<Vec<DivisorClass>> {
    let bound = 3 * (surface.picard_rank() as i64);
    let found = enumerate_classes_within(surface, kind, bound);
    let wider = enumerate_classes_within(surface, kind, 2 * bound);
    if found != wider {
        return Err(Error::Invariant(format!(
            "class enumeration on {surface} depends on the search bound"
        )));
    }
    Ok(found)
}

/// Classes of the given kind whose leading coordinate is bounded by `bound`
/// in absolute value.
pub fn enumerate_classes_within(
    surface: SurfaceId,
    kind: ClassKind,
    bound: i64,
) -> Vec<DivisorClass> {
    let (sq, kd) = kind.targets();
    let mut out = Vec::new();
    match surface {
        SurfaceId::PlaneBlowup(r) => {
            let r = r as usize;
            let mut buf = vec![0i64; r];
            for a in -bound..=bound {
                // a^2 - sum c^2 = sq, -3a - sum c = kd
                let sum = -3 * a - kd;
                let sumsq = a * a - sq;
                fill_coeffs(&mut buf, 0, sum, sumsq, &mut |cs| {
                    let mut coords = Vec::with_capacity(r + 1);
                    coords.push(a);
                    coords.extend_from_slice(cs);
                    out.push(DivisorClass { surface, coords });
                });
            }
        }
        SurfaceId::Quadric => {
            for x in -bound..=bound {
                for y in -bound..=bound {
                    if 2 * x * y == sq && -2 * x - 2 * y == kd {
                        out.push(DivisorClass { surface, coords: vec![x, y] });
                    }
                }
            }
        }
    }
    out.sort();
    out
}

/// Enumerate integer vectors `buf[pos..]` with the given sum and sum of
/// squares, pruning with Cauchy-Schwarz.
fn fill_coeffs(buf: &mut [i64], pos: usize, sum: i64, sumsq: i64, emit: &mut impl FnMut(&[i64])) {
    let left = (buf.len() - pos) as i64;
    if sumsq < 0 || sum * sum > left * sumsq {
        return;
    }
    if left == 0 {
        if sum == 0 && sumsq == 0 {
            emit(buf);
        }
        return;
    }
    let m = isqrt(sumsq);
    for c in -m..=m {
        buf[pos] = c;
        fill_coeffs(buf, pos + 1, sum - c, sumsq - c * c, emit);
    }
}

/// Floor of the square root of a non-negative integer.
pub(crate) fn isqrt(n: i64) -> i64 {
    if n <= 0 {
        return 0;
    }
    let mut x = (n as f64).sqrt() as i64;
    while x * x > n {
        x -= 1;
    }
    while (x + 1) * (x + 1) <= n {
        x += 1;
    }
    x
}
