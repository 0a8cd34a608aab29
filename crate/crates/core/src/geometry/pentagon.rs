use alloc::vec::Vec;


use super::{edge_crosses, turning_angles, Point, Polygon, Side, ALIGNED_ANGLE_TOL, DEGENERACY_TOL, GEOMETRY_TOL};
// float math for no_std; shadowed by inherent methods when std is linked
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};

/// Orientation branches of the three triangles `(p1 p2 p3)`, `(p3 p4 p5)` and
/// `(p1 p3 p5)` used to rebuild a pentagon from its chart point.
///
/// `p5` selects the half-plane of `p5` relative to the directed line `p1 p3`
/// (a reflection of the whole polygon). `p2` and `p4` are `Positive` when the
/// apex lies outside the triangle `(p1 p3 p5)`, which is the convex choice.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PentagonBranches {
    pub p2: Side,
    pub p4: Side,
    pub p5: Side,
}

impl PentagonBranches {
    pub const CONVEX: Self = Self { p2: Side::Positive, p4: Side::Positive, p5: Side::Positive };

    /// All eight sign combinations.
    pub fn all() -> [Self; 8] {
        core::array::from_fn(|i| Self {
            p2: Side::ALL[i & 1],
            p4: Side::ALL[(i >> 1) & 1],
            p5: Side::ALL[(i >> 2) & 1],
        })
    }
}

impl Default for PentagonBranches {
    fn default() -> Self {
        Self::CONVEX
    }
}

/// A planar configuration of an equilateral 5-bar linkage.
///
/// The canonical frame puts `p1` at the origin and `p3` on the positive first
/// axis. The chart point `(x13, x35)` and the branches are stored normalised
/// to unit sides; vertices and diagonals carry the actual `scale`.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct PentagonConfig {
    vertices: [Point; 5],
    scale: f64,
    x13: f64,
    x35: f64,
    branches: PentagonBranches,
    diagonals: [f64; 5],
}

const CHART_SLACK: f64 = 1e-12;

fn sqrt_clamped(v: f64) -> f64 {
    v.max(0.0).sqrt()
}

/// Rebuild a unit-side pentagon from the diagonals `x13`, `x35` and the
/// branch signs of the three construction triangles.
pub fn reconstruct_pentagon(x13: f64, x35: f64, branches: PentagonBranches) -> Result<PentagonConfig> {
    let feasible = x13 > CHART_SLACK
        && x35 > CHART_SLACK
        && x13 <= 2.0 + CHART_SLACK
        && x35 <= 2.0 + CHART_SLACK
        && (x13 - x35).abs() <= 1.0 + CHART_SLACK
        && x13 + x35 >= 1.0 - CHART_SLACK;
    if !feasible {
        return Err(Error::TriangleViolation(alloc::format!(
            "chart point (x13, x35) = ({x13}, {x35}) is not realisable with unit sides"
        )));
    }
    let s5 = branches.p5.signum();
    let p1 = Point::ORIGIN;
    let p3 = Point::new(x13, 0.0);
    let u = (1.0 + x13 * x13 - x35 * x35) / (2.0 * x13);
    let p5 = Point::new(u, s5 * sqrt_clamped(1.0 - u * u));
    let p2 = Point::new(0.5 * x13, -s5 * branches.p2.signum() * sqrt_clamped(1.0 - 0.25 * x13 * x13));
    let chord = p5 - p3;
    let right = Point::new(chord.y, -chord.x) * (1.0 / chord.norm());
    let p4 = (p3 + p5) * 0.5 + right * (s5 * branches.p4.signum() * sqrt_clamped(1.0 - 0.25 * x35 * x35));
    Ok(PentagonConfig::assemble([p1, p2, p3, p4, p5], 1.0, x13, x35, branches))
}

impl PentagonConfig {
    fn assemble(vertices: [Point; 5], scale: f64, x13: f64, x35: f64, branches: PentagonBranches) -> Self {
        let d = |i: usize, j: usize| vertices[i].distance(vertices[j]);
        Self {
            diagonals: [d(0, 2), d(0, 3), d(1, 3), d(1, 4), d(2, 4)],
            vertices,
            scale,
            x13,
            x35,
            branches,
        }
    }

    /// Canonicalize an arbitrary placement of an equilateral pentagon.
    /// Reflections are quotiented out: the result always has `p5` in the
    /// closed upper half-plane.
    pub fn from_vertices(vertices: [Point; 5]) -> Result<Self> {
        let sides: [f64; 5] = core::array::from_fn(|i| vertices[i].distance(vertices[(i + 1) % 5]));
        let scale = sides.iter().sum::<f64>() / 5.0;
        if !(scale > 0.0) || sides.iter().any(|s| (s - scale).abs() > GEOMETRY_TOL * scale) {
            return Err(Error::InvalidLinkage("vertices do not form an equilateral pentagon".into()));
        }
        let q = vertices.map(|p| (p - vertices[0]) * (1.0 / scale));
        let x13 = q[2].norm();
        if x13 <= CHART_SLACK {
            return Err(Error::TriangleViolation("p1 and p3 coincide".into()));
        }
        let (cos, sin) = (q[2].x / x13, q[2].y / x13);
        let mut q = q.map(|p| p.rotate(cos, -sin));
        if q[4].y < 0.0 {
            q = q.map(|p| Point::new(p.x, -p.y));
        }
        let x35 = q[2].distance(q[4]);
        let chord = q[4] - q[2];
        let right = Point::new(chord.y, -chord.x);
        let branches = PentagonBranches {
            p2: Side::of(-q[1].y),
            p4: Side::of((q[3] - (q[2] + q[4]) * 0.5).dot(right)),
            p5: Side::Positive,
        };
        let unit = reconstruct_pentagon(x13, x35, branches)?;
        let mismatch = unit.vertices.iter().zip(&q).map(|(a, b)| a.distance(*b)).fold(0.0, f64::max);
        if mismatch > 1e-7 {
            return Err(Error::NumericalFailure(alloc::format!(
                "canonical reconstruction differs from input by {mismatch:e}"
            )));
        }
        Ok(unit.scaled(scale))
    }

    /// Similar copy with all lengths multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        Self::assemble(
            self.unit_vertices().map(|p| p * (self.scale * factor)),
            self.scale * factor,
            self.x13,
            self.x35,
            self.branches,
        )
    }

    #[inline]
    pub fn vertices(&self) -> &[Point; 5] {
        &self.vertices
    }

    /// Vertices normalised to unit sides.
    pub fn unit_vertices(&self) -> [Point; 5] {
        self.vertices.map(|p| p * (1.0 / self.scale))
    }

    /// Common sidelength.
    #[inline]
    pub fn scale(&self) -> f64 {
        self.scale
    }

    /// Chart coordinates `(x13, x35)` at unit scale.
    #[inline]
    pub fn chart(&self) -> (f64, f64) {
        (self.x13, self.x35)
    }

    #[inline]
    pub fn branches(&self) -> PentagonBranches {
        self.branches
    }

    /// `(x13, x14, x24, x25, x35)` at the actual scale.
    #[inline]
    pub fn diagonals(&self) -> [f64; 5] {
        self.diagonals
    }

    /// Diagonals at unit scale.
    pub fn unit_diagonals(&self) -> [f64; 5] {
        self.diagonals.map(|d| d / self.scale)
    }

    /// Smallest slack of the three construction triangles, at unit scale.
    pub fn chart_margin(&self) -> f64 {
        let (a, b) = (self.x13, self.x35);
        [a, 2.0 - a, b, 2.0 - b, a + b - 1.0, 1.0 - (a - b).abs()]
            .into_iter()
            .fold(f64::INFINITY, f64::min)
    }

    /// All consecutive edge cross products share one sign and none vanishes.
    pub fn is_strictly_convex(&self) -> bool {
        let crosses = edge_crosses(&self.vertices);
        let tol = GEOMETRY_TOL * self.scale * self.scale;
        crosses.iter().all(|c| *c > tol) || crosses.iter().all(|c| *c < -tol)
    }

    /// Zero-based indices of vertices whose angle is π (within the alignment tolerance).
    pub fn aligned_vertices(&self) -> Vec<usize> {
        turning_angles(&self.vertices)
            .iter()
            .enumerate()
            .filter(|(_, a)| a.abs() < ALIGNED_ANGLE_TOL)
            .map(|(i, _)| i)
            .collect()
    }

    /// Convex (possibly with aligned vertices): no turning angle of the
    /// opposite sign beyond the alignment tolerance.
    pub fn is_convex(&self) -> bool {
        let angles = turning_angles(&self.vertices);
        angles.iter().all(|a| *a > -ALIGNED_ANGLE_TOL) || angles.iter().all(|a| *a < ALIGNED_ANGLE_TOL)
    }

    /// The configuration relabelled by `1↔2, 3↔5` (vertex 4 fixed), a
    /// reflection of the cyclic order.
    pub fn mirrored(&self) -> Result<Self> {
        let v = self.vertices;
        Self::from_vertices([v[1], v[0], v[4], v[3], v[2]])
    }

    /// Vertices are pairwise separated by more than the degeneracy threshold.
    pub fn has_distinct_vertices(&self) -> bool {
        let tol = DEGENERACY_TOL * self.scale;
        (0..5).all(|i| (i + 1..5).all(|j| self.vertices[i].distance(self.vertices[j]) > tol))
    }
}

impl Polygon for PentagonConfig {
    fn vertices(&self) -> &[Point] {
        &self.vertices
    }
}
