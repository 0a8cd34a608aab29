use core::f64::consts::PI;

use super::{
    circle_intersection, segments_intersect, turning_angles, Linkage, Point, Polygon, Side,
    ALIGNED_ANGLE_TOL, DEGENERACY_TOL, GEOMETRY_TOL,
};
use crate::error::{Error, Result};
use crate::moduli::CayleyMengerCubic;

/// Relative tolerance on the Cayley–Menger residual accepted by [`reconstruct_quad`].
pub const ON_CURVE_TOL: f64 = 1e-7;

/// A planar configuration of a 4-bar linkage in canonical frame: `p1` at the
/// origin, `p2` on the positive first axis, `p3` in the closed upper half-plane.
///
/// `x = |p1 p3|` and `y = |p2 p4|` are the two diagonals.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct QuadConfig {
    vertices: [Point; 4],
    x: f64,
    y: f64,
}

/// Region of the 4-bar moduli space a configuration belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum QuadRegion {
    StrictlyConvex,
    Aligned,
    NonconvexSimple,
    SelfIntersecting,
}

impl QuadRegion {
    pub fn is_convex(self) -> bool {
        matches!(self, QuadRegion::StrictlyConvex | QuadRegion::Aligned)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            QuadRegion::StrictlyConvex => "strictly_convex",
            QuadRegion::Aligned => "aligned",
            QuadRegion::NonconvexSimple => "nonconvex_simple",
            QuadRegion::SelfIntersecting => "self_intersecting",
        }
    }
}

impl core::fmt::Display for QuadRegion {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl QuadConfig {
    /// Canonicalize an arbitrary placement of the four vertices.
    pub fn from_vertices(vertices: [Point; 4]) -> Result<Self> {
        let [p1, p2, p3, p4] = vertices.map(|p| p - vertices[0]);
        let a = p2.norm();
        if a == 0.0 {
            return Err(Error::DegenerateConfig);
        }
        let (cos, sin) = (p2.x / a, p2.y / a);
        let mut v = [p1, p2, p3, p4].map(|p| p.rotate(cos, -sin));
        v[1] = Point::new(v[1].x, 0.0);
        let flip = v[2].y < 0.0 || (v[2].y == 0.0 && v[3].y < 0.0);
        if flip {
            v = v.map(|p| Point::new(p.x, -p.y));
        }
        Ok(Self::from_canonical(v))
    }

    fn from_canonical(vertices: [Point; 4]) -> Self {
        Self {
            x: vertices[0].distance(vertices[2]),
            y: vertices[1].distance(vertices[3]),
            vertices,
        }
    }

    #[inline]
    pub fn vertices(&self) -> &[Point; 4] {
        &self.vertices
    }

    /// `|p1 p3|`.
    #[inline]
    pub fn x(&self) -> f64 {
        self.x
    }

    /// `|p2 p4|`.
    #[inline]
    pub fn y(&self) -> f64 {
        self.y
    }

    /// `(x, y) = (|p1 p3|, |p2 p4|)`.
    #[inline]
    pub fn diagonals(&self) -> [f64; 2] {
        [self.x, self.y]
    }

    pub fn side_lengths(&self) -> [f64; 4] {
        core::array::from_fn(|i| self.vertices[i].distance(self.vertices[(i + 1) % 4]))
    }

    /// Re-run canonicalization; the identity on canonical configurations.
    pub fn canonicalized(&self) -> Result<Self> {
        Self::from_vertices(self.vertices)
    }
}

impl Polygon for QuadConfig {
    fn vertices(&self) -> &[Point] {
        &self.vertices
    }
}

fn check_x_range(sides: [f64; 4], x: f64) -> Result<()> {
    let [a, b, c, d] = sides;
    let lo = (a - b).abs().max((c - d).abs());
    let hi = (a + b).min(c + d);
    let slack = GEOMETRY_TOL * hi;
    if !(x > 0.0) || x < lo - slack || x > hi + slack {
        return Err(Error::TriangleViolation(alloc::format!(
            "diagonal x = {x} outside admissible range [{lo}, {hi}]"
        )));
    }
    Ok(())
}

/// Place `p1`, `p2`, `p3` for diagonal `x` and return the two candidates for
/// `p4`: `(opposite, same)` relative to `p2` across the line `p1 p3`.
fn place(sides: [f64; 4], x: f64) -> Result<([Point; 3], Point, Point)> {
    let [a, b, c, d] = sides;
    check_x_range(sides, x)?;
    let p1 = Point::ORIGIN;
    let p2 = Point::new(a, 0.0);
    let (p3, _) = circle_intersection(p1, x, p2, b, 1e-6).ok_or_else(|| {
        Error::TriangleViolation(alloc::format!("no triangle with sides {a}, {b}, {x}"))
    })?;
    let (left, right) = circle_intersection(p1, d, p3, c, 1e-6).ok_or_else(|| {
        Error::TriangleViolation(alloc::format!("no triangle with sides {c}, {d}, {x}"))
    })?;
    Ok(([p1, p2, p3], left, right))
}

/// The canonical configuration with diagonals `(x, y)`. `(x, y)` must satisfy
/// the Cayley–Menger relation to [`ON_CURVE_TOL`] of its local term scale.
pub fn reconstruct_quad(linkage: &Linkage, x: f64, y: f64) -> Result<QuadConfig> {
    reconstruct_quad_with_tolerance(linkage, x, y, ON_CURVE_TOL)
}

/// As [`reconstruct_quad`] with an explicit relative residual tolerance, for
/// rounded inputs such as tabulated diagonals.
pub fn reconstruct_quad_with_tolerance(
    linkage: &Linkage,
    x: f64,
    y: f64,
    rel_tol: f64,
) -> Result<QuadConfig> {
    let sides = linkage.quad_sides()?;
    check_x_range(sides, x)?;
    let cubic = CayleyMengerCubic::new(sides);
    let (w, z) = (x * x, y * y);
    let residual = cubic.eval(w, z);
    let tolerance = rel_tol * cubic.term_scale(w, z);
    if residual.abs() > tolerance {
        return Err(Error::NotOnCurve { residual, tolerance });
    }
    let ([p1, p2, p3], left, right) = place(sides, x)?;
    let p4 = if (p2.distance(left) - y).abs() <= (p2.distance(right) - y).abs() {
        left
    } else {
        right
    };
    Ok(QuadConfig::from_canonical([p1, p2, p3, p4]))
}

/// The configuration with diagonal `x` whose fourth vertex lies on the given
/// side of the line `p1 p3`: `Positive` puts `p4` opposite to `p2`.
pub fn reconstruct_quad_from_x(linkage: &Linkage, x: f64, side: Side) -> Result<QuadConfig> {
    let ([p1, p2, p3], left, right) = place(linkage.quad_sides()?, x)?;
    // p3 is in the upper half-plane, so p2 lies to the right of p1 -> p3.
    let p4 = match side {
        Side::Positive => left,
        Side::Negative => right,
    };
    QuadConfig::from_vertices([p1, p2, p3, p4])
}

/// Classify a configuration by the signed turning at its vertices.
pub fn classify_quad(config: &QuadConfig) -> Result<QuadRegion> {
    let v = config.vertices();
    let sides = config.side_lengths();
    let scale = sides.iter().sum::<f64>() / 4.0;
    for i in 0..4 {
        if sides[i] <= DEGENERACY_TOL * scale && sides[(i + 3) % 4] <= DEGENERACY_TOL * scale {
            return Err(Error::DegenerateConfig);
        }
    }
    let angles = turning_angles(v);
    if angles.iter().any(|a| a.abs() < ALIGNED_ANGLE_TOL) {
        return Ok(QuadRegion::Aligned);
    }
    if angles.iter().any(|a| a.abs() > PI - ALIGNED_ANGLE_TOL) {
        // a folded vertex makes two bars overlap
        return Ok(QuadRegion::SelfIntersecting);
    }
    let eps = DEGENERACY_TOL * scale * scale;
    if segments_intersect(v[0], v[1], v[2], v[3], eps) || segments_intersect(v[1], v[2], v[3], v[0], eps) {
        return Ok(QuadRegion::SelfIntersecting);
    }
    let positive = angles.iter().filter(|a| **a > 0.0).count();
    Ok(if positive == 0 || positive == 4 {
        QuadRegion::StrictlyConvex
    } else {
        QuadRegion::NonconvexSimple
    })
}

/// Which diagonal an aligned boundary configuration maximises.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub enum Diagonal {
    X,
    Y,
}

/// A boundary point of the convex region: one vertex angle equals π.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct AlignedConfig {
    pub config: QuadConfig,
    /// Zero-based index of the aligned vertex.
    pub vertex: usize,
    pub maximizes: Diagonal,
}

/// The two aligned configurations bounding the convex region: the one with
/// maximal `x` first, then the one with maximal `y`.
pub fn aligned_configurations(linkage: &Linkage) -> Result<[AlignedConfig; 2]> {
    let [a, b, c, d] = linkage.quad_sides()?;
    if !linkage.is_nondegenerate() {
        return Err(Error::Degenerate);
    }
    let o = Point::ORIGIN;
    let p2 = Point::new(a, 0.0);
    let fail = || Error::NumericalFailure("aligned configuration does not close".into());

    let x_max = if a + b < c + d {
        let p3 = Point::new(a + b, 0.0);
        let (p4, _) = circle_intersection(o, d, p3, c, 1e-9).ok_or_else(fail)?;
        AlignedConfig { config: QuadConfig::from_vertices([o, p2, p3, p4])?, vertex: 1, maximizes: Diagonal::X }
    } else {
        let (p3, _) = circle_intersection(o, c + d, p2, b, 1e-9).ok_or_else(fail)?;
        let p4 = p3 * (d / (c + d));
        AlignedConfig { config: QuadConfig::from_vertices([o, p2, p3, p4])?, vertex: 3, maximizes: Diagonal::X }
    };

    let y_max = if b + c < a + d {
        let (p4, _) = circle_intersection(o, d, p2, b + c, 1e-9).ok_or_else(fail)?;
        let p3 = p2 + (p4 - p2) * (b / (b + c));
        AlignedConfig { config: QuadConfig::from_vertices([o, p2, p3, p4])?, vertex: 2, maximizes: Diagonal::Y }
    } else {
        let p4 = Point::new(-d, 0.0);
        let (u, v) = circle_intersection(p2, b, p4, c, 1e-9).ok_or_else(fail)?;
        let p3 = if u.y >= v.y { u } else { v };
        AlignedConfig { config: QuadConfig::from_vertices([o, p2, p3, p4])?, vertex: 0, maximizes: Diagonal::Y }
    };
    Ok([x_max, y_max])
}
