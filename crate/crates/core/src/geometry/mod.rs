//! Linkages, planar configurations and their classification.

mod pentagon;
mod quad;

use alloc::format;
use alloc::vec::Vec;
use core::ops::{Add, Mul, Neg, Sub};


// float math for no_std; shadowed by inherent methods when std is linked
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};

pub use pentagon::{reconstruct_pentagon, PentagonBranches, PentagonConfig};
pub use quad::{
    aligned_configurations, classify_quad, reconstruct_quad, reconstruct_quad_from_x,
    reconstruct_quad_with_tolerance, AlignedConfig, Diagonal, QuadConfig, QuadRegion,
};

/// Relative tolerance for geometric identities (side lengths, stored diagonals).
pub const GEOMETRY_TOL: f64 = 1e-9;
/// Relative tolerance for degeneracy detection.
pub const DEGENERACY_TOL: f64 = 1e-12;
/// A vertex is aligned when its turning angle is within this many radians of 0.
pub const ALIGNED_ANGLE_TOL: f64 = 1e-7;

/// A point (or vector) of the plane.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const ORIGIN: Point = Point { x: 0.0, y: 0.0 };

    #[inline]
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    #[inline]
    pub fn dot(self, other: Point) -> f64 {
        self.x * other.x + self.y * other.y
    }

    /// z-component of the 3D cross product.
    #[inline]
    pub fn cross(self, other: Point) -> f64 {
        self.x * other.y - self.y * other.x
    }

    #[inline]
    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    #[inline]
    pub fn distance(self, other: Point) -> f64 {
        (self - other).norm()
    }

    /// Counter-clockwise quarter turn.
    #[inline]
    pub fn perp(self) -> Point {
        Point::new(-self.y, self.x)
    }

    /// Rotate by the angle whose cosine and sine are given.
    #[inline]
    pub fn rotate(self, cos: f64, sin: f64) -> Point {
        Point::new(cos * self.x - sin * self.y, sin * self.x + cos * self.y)
    }
}

impl Add for Point {
    type Output = Point;
    #[inline]
    fn add(self, rhs: Point) -> Point {
        Point::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl Sub for Point {
    type Output = Point;
    #[inline]
    fn sub(self, rhs: Point) -> Point {
        Point::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl Mul<f64> for Point {
    type Output = Point;
    #[inline]
    fn mul(self, k: f64) -> Point {
        Point::new(self.x * k, self.y * k)
    }
}

impl Neg for Point {
    type Output = Point;
    #[inline]
    fn neg(self) -> Point {
        Point::new(-self.x, -self.y)
    }
}

/// Which of the two mirror-image solutions of a triangle construction is used.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Side {
    Positive,
    Negative,
}

impl Side {
    pub const ALL: [Side; 2] = [Side::Positive, Side::Negative];

    #[inline]
    pub fn signum(self) -> f64 {
        match self {
            Side::Positive => 1.0,
            Side::Negative => -1.0,
        }
    }

    /// `Positive` for non-negative input.
    #[inline]
    pub fn of(value: f64) -> Side {
        if value < 0.0 {
            Side::Negative
        } else {
            Side::Positive
        }
    }
}

/// A closed planar polygonal linkage given by its ordered sidelengths.
///
/// Side `i` joins vertex `i` to vertex `i + 1` (cyclically). Only 4-bar and
/// 5-bar linkages are supported, and the moduli space must be non-empty.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct Linkage {
    sides: Vec<f64>,
}

impl Linkage {
    pub fn new(sides: &[f64]) -> Result<Self> {
        if !(4..=5).contains(&sides.len()) {
            return Err(Error::InvalidLinkage(format!(
                "expected 4 or 5 sides, got {}",
                sides.len()
            )));
        }
        if let Some(bad) = sides.iter().find(|l| !(l.is_finite() && **l > 0.0)) {
            return Err(Error::InvalidLinkage(format!(
                "sidelengths must be positive and finite, got {bad}"
            )));
        }
        let total: f64 = sides.iter().sum();
        let longest = sides.iter().copied().fold(0.0, f64::max);
        if longest >= total - longest {
            return Err(Error::EmptyModuliSpace);
        }
        Ok(Self { sides: sides.to_vec() })
    }

    pub fn quad(a: f64, b: f64, c: f64, d: f64) -> Result<Self> {
        Self::new(&[a, b, c, d])
    }

    /// Equilateral 5-bar linkage with the given side.
    pub fn equilateral_pentagon(side: f64) -> Result<Self> {
        Self::new(&[side; 5])
    }

    #[inline]
    pub fn sides(&self) -> &[f64] {
        &self.sides
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.sides.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.sides.is_empty()
    }

    pub fn perimeter(&self) -> f64 {
        self.sides.iter().sum()
    }

    /// Mean sidelength, the natural length scale of the linkage.
    pub fn scale(&self) -> f64 {
        self.perimeter() / self.sides.len() as f64
    }

    pub fn is_quad(&self) -> bool {
        self.sides.len() == 4
    }

    /// Sides as `[a, b, c, d]` for a 4-bar linkage.
    pub fn quad_sides(&self) -> Result<[f64; 4]> {
        match self.sides[..] {
            [a, b, c, d] => Ok([a, b, c, d]),
            _ => Err(Error::InvalidLinkage("expected a 4-bar linkage".into())),
        }
    }

    /// Smallest `|±l_1 ± l_2 ± … ± l_n|` over all sign patterns.
    pub fn min_signed_sum(&self) -> f64 {
        let n = self.sides.len();
        let mut best = f64::INFINITY;
        for mask in 0u32..(1 << (n - 1)) {
            let mut sum = self.sides[0];
            for (i, l) in self.sides[1..].iter().enumerate() {
                sum += if mask & (1 << i) != 0 { -l } else { *l };
            }
            best = best.min(sum.abs());
        }
        best
    }

    /// No signed combination of the sides vanishes, i.e. the linkage has no
    /// fully collinear configuration.
    pub fn is_nondegenerate(&self) -> bool {
        self.min_signed_sum() > DEGENERACY_TOL * self.perimeter()
    }

    pub fn is_equilateral(&self) -> bool {
        let first = self.sides[0];
        self.sides
            .iter()
            .all(|l| (l - first).abs() <= DEGENERACY_TOL * first)
    }
}

/// Anything with an ordered cycle of vertices.
pub trait Polygon {
    fn vertices(&self) -> &[Point];
}

/// Signed turning angle at every vertex of a closed polygon, in `(-π, π]`.
pub fn turning_angles<const N: usize>(vertices: &[Point; N]) -> [f64; N] {
    core::array::from_fn(|i| {
        let prev = vertices[(i + N - 1) % N];
        let next = vertices[(i + 1) % N];
        let incoming = vertices[i] - prev;
        let outgoing = next - vertices[i];
        incoming.cross(outgoing).atan2(incoming.dot(outgoing))
    })
}

/// Cross products of consecutive edge vectors at every vertex.
pub fn edge_crosses<const N: usize>(vertices: &[Point; N]) -> [f64; N] {
    core::array::from_fn(|i| {
        let prev = vertices[(i + N - 1) % N];
        let next = vertices[(i + 1) % N];
        (vertices[i] - prev).cross(next - vertices[i])
    })
}

/// Closed-segment intersection test, touching included.
pub fn segments_intersect(p1: Point, p2: Point, q1: Point, q2: Point, eps: f64) -> bool {
    let d1 = (p2 - p1).cross(q1 - p1);
    let d2 = (p2 - p1).cross(q2 - p1);
    let d3 = (q2 - q1).cross(p1 - q1);
    let d4 = (q2 - q1).cross(p2 - q1);
    let straddles = |a: f64, b: f64| (a > eps && b < -eps) || (a < -eps && b > eps);
    if straddles(d1, d2) && straddles(d3, d4) {
        return true;
    }
    let on_segment = |a: Point, b: Point, p: Point, d: f64| {
        d.abs() <= eps
            && p.x >= a.x.min(b.x) - eps
            && p.x <= a.x.max(b.x) + eps
            && p.y >= a.y.min(b.y) - eps
            && p.y <= a.y.max(b.y) + eps
    };
    on_segment(p1, p2, q1, d1)
        || on_segment(p1, p2, q2, d2)
        || on_segment(q1, q2, p1, d3)
        || on_segment(q1, q2, p2, d4)
}

/// Intersection of the circles `|p - c0| = r0` and `|p - c1| = r1`. Returns
/// `(left, right)` as seen walking from `c0` to `c1`. Slightly infeasible
/// inputs (relative excess below `slack`) are clamped to tangency.
pub(crate) fn circle_intersection(
    c0: Point,
    r0: f64,
    c1: Point,
    r1: f64,
    slack: f64,
) -> Option<(Point, Point)> {
    let axis = c1 - c0;
    let dist = axis.norm();
    if dist == 0.0 {
        return None;
    }
    let along = (r0 * r0 - r1 * r1 + dist * dist) / (2.0 * dist);
    let h2 = r0 * r0 - along * along;
    let h = if h2 >= 0.0 {
        h2.sqrt()
    } else if -h2 <= slack * r0 * r0 {
        0.0
    } else {
        return None;
    };
    let e = axis * (1.0 / dist);
    let foot = c0 + e * along;
    Some((foot + e.perp() * h, foot - e.perp() * h))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linkage_validation() {
        assert!(matches!(Linkage::quad(10.0, 1.0, 1.0, 1.0), Err(Error::EmptyModuliSpace)));
        assert!(matches!(Linkage::new(&[1.0, 2.0, 3.0]), Err(Error::InvalidLinkage(_))));
        assert!(matches!(Linkage::quad(1.0, -1.0, 1.0, 1.0), Err(Error::InvalidLinkage(_))));
        let l = Linkage::quad(6.0, 6.5, 6.2, 5.8).unwrap();
        assert!(l.is_nondegenerate());
        assert!(!Linkage::quad(1.0, 1.0, 1.0, 1.0).unwrap().is_nondegenerate());
        assert!(Linkage::equilateral_pentagon(2.0).unwrap().is_equilateral());
        assert!(Linkage::equilateral_pentagon(1.0).unwrap().is_nondegenerate());
    }

    #[test]
    fn turning_angles_of_square() {
        let sq = [
            Point::new(0.0, 0.0),
            Point::new(1.0, 0.0),
            Point::new(1.0, 1.0),
            Point::new(0.0, 1.0),
        ];
        for a in turning_angles(&sq) {
            assert!((a - core::f64::consts::FRAC_PI_2).abs() < 1e-15);
        }
    }

    #[test]
    fn crossing_segments() {
        let o = Point::ORIGIN;
        assert!(segments_intersect(o, Point::new(1.0, 1.0), Point::new(0.0, 1.0), Point::new(1.0, 0.0), 1e-12));
        assert!(!segments_intersect(o, Point::new(1.0, 0.0), Point::new(0.0, 1.0), Point::new(1.0, 1.0), 1e-12));
    }

    #[test]
    fn circle_intersection_sides() {
        let (l, r) = circle_intersection(Point::ORIGIN, 1.0, Point::new(1.0, 0.0), 1.0, 0.0).unwrap();
        assert!(l.y > 0.0 && r.y < 0.0);
        assert!((l.x - 0.5).abs() < 1e-15);
        assert!(circle_intersection(Point::ORIGIN, 1.0, Point::new(3.0, 0.0), 1.0, 1e-9).is_none());
    }
}
