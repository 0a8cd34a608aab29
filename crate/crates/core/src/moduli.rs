//! The oval model of the 4-bar moduli space.
//!
//! For sides `a, b, c, d` the diagonals `x = |p1 p3|`, `y = |p2 p4|` of every
//! planar configuration satisfy `det M(x, y) = 0`, where `M` is the bordered
//! Cayley–Menger matrix of the four vertices. In squared diagonals
//! `w = x²`, `z = y²` the determinant is the cubic
//!
//! ```text
//! g(w, z) = -2 w² z - 2 w z² + 2 (a² + b² + c² + d²) w z
//!           + 2 (d² - a²)(b² - c²) w + 2 (b² - a²)(d² - c²) z
//!           - 2 (ac - bd)(ac + bd)(a² - b² + c² - d²)
//! ```
//!
//! and the moduli space maps bijectively onto its compact convex component
//! (the oval). Inside the oval `g > 0`: the six distances are realisable by a
//! tetrahedron. The oval is parametrised by the polar angle around an interior
//! point; along each ray `g` is a cubic in the radius, so the crossing is found
//! by bracketing between the stationary points of that cubic.

use alloc::vec::Vec;
use core::f64::consts::TAU;


// float math for no_std; shadowed by inherent methods when std is linked
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::geometry::{
    classify_quad, reconstruct_quad_from_x, reconstruct_quad_with_tolerance, Linkage, QuadConfig,
    QuadRegion, Side,
};
use crate::numeric::{brent, wrap_angle};

/// Number of rays sampled when validating star-shapedness.
pub const VALIDATION_RAYS: usize = 1024;

/// Determinant of the bordered Cayley–Menger matrix with sides `a = l1`,
/// `b = l2`, `c = l3`, `d = l4` and diagonals `x = |p1 p3|`, `y = |p2 p4|`.
pub fn cayley_menger(linkage: &Linkage, x: f64, y: f64) -> Result<f64> {
    let [a, b, c, d] = linkage.quad_sides()?;
    Ok(cayley_menger_det([a * a, b * b, c * c, d * d], x * x, y * y))
}

/// 5×5 determinant of the bordered matrix from squared lengths.
pub fn cayley_menger_det([a2, b2, c2, d2]: [f64; 4], w: f64, z: f64) -> f64 {
    let m = [
        [0.0, 1.0, 1.0, 1.0, 1.0],
        [1.0, 0.0, a2, w, d2],
        [1.0, a2, 0.0, b2, z],
        [1.0, w, b2, 0.0, c2],
        [1.0, d2, z, c2, 0.0],
    ];
    determinant(m)
}

/// Cayley–Menger determinant of four points given all six squared distances
/// `d2[i][j]`.
pub fn cayley_menger_points(d2: [[f64; 4]; 4]) -> f64 {
    let mut m = [[1.0; 5]; 5];
    m[0][0] = 0.0;
    for i in 0..4 {
        for j in 0..4 {
            m[i + 1][j + 1] = d2[i][j];
        }
    }
    determinant(m)
}

fn determinant<const N: usize>(mut m: [[f64; N]; N]) -> f64 {
    let mut det = 1.0;
    for col in 0..N {
        let pivot = (col..N)
            .max_by(|&i, &j| m[i][col].abs().total_cmp(&m[j][col].abs()))
            .unwrap_or(col);
        if m[pivot][col] == 0.0 {
            return 0.0;
        }
        if pivot != col {
            m.swap(pivot, col);
            det = -det;
        }
        det *= m[col][col];
        for row in col + 1..N {
            let factor = m[row][col] / m[col][col];
            for k in col..N {
                m[row][k] -= factor * m[col][k];
            }
        }
    }
    det
}

/// The Cayley–Menger relation as a cubic in squared diagonals.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct CayleyMengerCubic {
    /// Coefficient of `w z`.
    pub wz: f64,
    /// Coefficient of `w`.
    pub w: f64,
    /// Coefficient of `z`.
    pub z: f64,
    /// Constant term.
    pub constant: f64,
}

impl CayleyMengerCubic {
    /// Coefficient of both `w² z` and `w z²`.
    pub const CUBIC: f64 = -2.0;

    pub fn new([a, b, c, d]: [f64; 4]) -> Self {
        let (a2, b2, c2, d2) = (a * a, b * b, c * c, d * d);
        Self {
            wz: 2.0 * (a2 + b2 + c2 + d2),
            w: 2.0 * (d2 - a2) * (b2 - c2),
            z: 2.0 * (b2 - a2) * (d2 - c2),
            constant: -2.0 * (a * c - b * d) * (a * c + b * d) * (a2 - b2 + c2 - d2),
        }
    }

    pub fn from_linkage(linkage: &Linkage) -> Result<Self> {
        Ok(Self::new(linkage.quad_sides()?))
    }

    /// Coefficients as `((power of w, power of z), value)` pairs.
    pub fn monomials(&self) -> [((u8, u8), f64); 6] {
        [
            ((2, 1), Self::CUBIC),
            ((1, 2), Self::CUBIC),
            ((1, 1), self.wz),
            ((1, 0), self.w),
            ((0, 1), self.z),
            ((0, 0), self.constant),
        ]
    }

    #[inline]
    pub fn eval(&self, w: f64, z: f64) -> f64 {
        w * z * (Self::CUBIC * (w + z) + self.wz) + self.w * w + self.z * z + self.constant
    }

    /// `(∂g/∂w, ∂g/∂z)`.
    #[inline]
    pub fn gradient(&self, w: f64, z: f64) -> (f64, f64) {
        (
            -4.0 * w * z - 2.0 * z * z + self.wz * z + self.w,
            -2.0 * w * w - 4.0 * w * z + self.wz * w + self.z,
        )
    }

    /// `(g_ww, g_wz, g_zz)`.
    #[inline]
    pub fn hessian(&self, w: f64, z: f64) -> (f64, f64, f64) {
        (-4.0 * z, -4.0 * w - 4.0 * z + self.wz, -4.0 * w)
    }

    /// Sum of the absolute values of the monomials at `(w, z)`: the local
    /// magnitude against which residuals are judged.
    pub fn term_scale(&self, w: f64, z: f64) -> f64 {
        2.0 * w * w * z.abs()
            + 2.0 * w.abs() * z * z
            + (self.wz * w * z).abs()
            + (self.w * w).abs()
            + (self.z * z).abs()
            + self.constant.abs()
    }

    /// Same idea for the gradient.
    pub fn gradient_scale(&self, w: f64, z: f64) -> f64 {
        4.0 * (w * z).abs() + 2.0 * z * z + 2.0 * w * w + (self.wz * z).abs() + (self.wz * w).abs()
            + self.w.abs()
            + self.z.abs()
    }

    /// Coefficients `[c0, c1, c2, c3]` of `r ↦ g(w0 + r p, z0 + r q)`.
    pub fn along_ray(&self, w0: f64, z0: f64, p: f64, q: f64) -> [f64; 4] {
        let k = Self::CUBIC;
        [
            self.eval(w0, z0),
            k * (w0 * w0 * q + 2.0 * w0 * p * z0 + p * z0 * z0 + 2.0 * w0 * z0 * q)
                + self.wz * (p * z0 + w0 * q)
                + self.w * p
                + self.z * q,
            k * (2.0 * w0 * p * q + p * p * z0 + 2.0 * z0 * p * q + w0 * q * q) + self.wz * p * q,
            k * (p * p * q + p * q * q),
        ]
    }
}

/// Sign of a quantity, with an explicit zero.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Sign {
    Negative,
    Zero,
    Positive,
}

impl Sign {
    pub fn of(v: f64) -> Sign {
        if v > 0.0 {
            Sign::Positive
        } else if v < 0.0 {
            Sign::Negative
        } else {
            Sign::Zero
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Sign::Negative => '-',
            Sign::Zero => '0',
            Sign::Positive => '+',
        }
    }
}

/// Signs of the two partial derivatives of the diagonal relation, oriented so
/// that `(+, +)` is the convex arc: the components of the outward normal of
/// the oval (`-∇g`, since `g > 0` inside).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SignPair {
    pub fx: Sign,
    pub fy: Sign,
}

impl SignPair {
    pub fn from_gradient(g_w: f64, g_z: f64) -> Self {
        Self { fx: Sign::of(-g_w), fy: Sign::of(-g_z) }
    }

    /// Region predicted by the sign pair: `(+,+)` convex, `(-,-)`
    /// self-intersecting, mixed non-convex simple. `None` on a sign change.
    pub fn region(self) -> Option<QuadRegion> {
        use Sign::*;
        match (self.fx, self.fy) {
            (Positive, Positive) => Some(QuadRegion::StrictlyConvex),
            (Negative, Negative) => Some(QuadRegion::SelfIntersecting),
            (Positive, Negative) | (Negative, Positive) => Some(QuadRegion::NonconvexSimple),
            _ => None,
        }
    }
}

impl core::fmt::Display for SignPair {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        write!(f, "{}{}", self.fx.as_char(), self.fy.as_char())
    }
}

/// A point of the oval together with its tangent along the polar parameter.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct OvalPoint {
    pub phi: f64,
    pub w: f64,
    pub z: f64,
    pub x: f64,
    pub y: f64,
    pub signs: SignPair,
    /// `∂g/∂w` at the point.
    pub g_w: f64,
    /// `∂g/∂z` at the point.
    pub g_z: f64,
    pub dw_dphi: f64,
    pub dz_dphi: f64,
}

impl OvalPoint {
    #[inline]
    pub fn dx_dphi(&self) -> f64 {
        self.dw_dphi / (2.0 * self.x)
    }

    #[inline]
    pub fn dy_dphi(&self) -> f64 {
        self.dz_dphi / (2.0 * self.y)
    }
}

/// Polar model of the oval around an interior point.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct OvalModel {
    linkage: Linkage,
    cubic: CayleyMengerCubic,
    w0: f64,
    z0: f64,
    /// `(w_min, w_max, z_min, z_max)` from the triangle inequalities.
    bounds: [f64; 4],
    search_radius: f64,
}

/// Admissible range of `x` for a 4-bar linkage.
pub fn x_range([a, b, c, d]: [f64; 4]) -> (f64, f64) {
    ((a - b).abs().max((c - d).abs()), (a + b).min(c + d))
}

/// Admissible range of `y` for a 4-bar linkage.
pub fn y_range([a, b, c, d]: [f64; 4]) -> (f64, f64) {
    ((b - c).abs().max((a - d).abs()), (b + c).min(a + d))
}

/// Build the polar oval model. The interior point sits at the midpoint of the
/// admissible `x`-interval, halfway (in `z`) between its two oval points.
pub fn build_oval(linkage: &Linkage) -> Result<OvalModel> {
    let sides = linkage.quad_sides()?;
    if !linkage.is_nondegenerate() {
        return Err(Error::Degenerate);
    }
    let (x_lo, x_hi) = x_range(sides);
    let (y_lo, y_hi) = y_range(sides);
    if x_lo >= x_hi || y_lo >= y_hi {
        return Err(Error::EmptyModuliSpace);
    }
    let x_mid = 0.5 * (x_lo + x_hi);
    let upper = reconstruct_quad_from_x(linkage, x_mid, Side::Positive)?.y();
    let lower = reconstruct_quad_from_x(linkage, x_mid, Side::Negative)?.y();
    let cubic = CayleyMengerCubic::new(sides);
    let (w0, z0) = (x_mid * x_mid, 0.5 * (upper * upper + lower * lower));
    if !(cubic.eval(w0, z0) > 0.0) {
        return Err(Error::Degenerate);
    }
    let bounds = [x_lo * x_lo, x_hi * x_hi, y_lo * y_lo, y_hi * y_hi];
    let search_radius = 2.0 * (bounds[1] - bounds[0]).hypot(bounds[3] - bounds[2]);
    let model = OvalModel { linkage: linkage.clone(), cubic, w0, z0, bounds, search_radius };
    model.validate()?;
    Ok(model)
}

impl OvalModel {
    pub fn linkage(&self) -> &Linkage {
        &self.linkage
    }

    pub fn cubic(&self) -> &CayleyMengerCubic {
        &self.cubic
    }

    /// Interior point `(w0, z0)`.
    pub fn interior_point(&self) -> (f64, f64) {
        (self.w0, self.z0)
    }

    /// Box `(w_min, w_max, z_min, z_max)` containing the oval.
    pub fn bounds(&self) -> [f64; 4] {
        self.bounds
    }

    /// Length scale of the oval: the largest admissible diagonal.
    pub fn diagonal_scale(&self) -> f64 {
        self.bounds[1].max(self.bounds[3]).sqrt()
    }

    fn validate(&self) -> Result<()> {
        let slack = 1e-9 * (self.bounds[1] + self.bounds[3]);
        for i in 0..VALIDATION_RAYS {
            let phi = TAU * i as f64 / VALIDATION_RAYS as f64;
            let (r, (p, q)) = self.radius(phi)?;
            let (w, z) = (self.w0 + r * p, self.z0 + r * q);
            let inside = w >= self.bounds[0] - slack
                && w <= self.bounds[1] + slack
                && z >= self.bounds[2] - slack
                && z <= self.bounds[3] + slack;
            let (g_w, g_z) = self.cubic.gradient(w, z);
            // the ray must leave the region g > 0 transversally
            if !inside || g_w * p + g_z * q >= 0.0 {
                return Err(Error::Degenerate);
            }
        }
        Ok(())
    }

    /// Radius of the oval crossing along direction `phi`.
    fn radius(&self, phi: f64) -> Result<(f64, (f64, f64))> {
        let (q, p) = phi.sin_cos();
        let [c0, c1, c2, c3] = self.cubic.along_ray(self.w0, self.z0, p, q);
        let cubic = |r: f64| ((c3 * r + c2) * r + c1) * r + c0;
        // stationary points of the cubic split the search interval into monotone pieces
        let mut knots: [f64; 4] = [0.0, f64::NAN, f64::NAN, self.search_radius];
        let (qa, qb, qc) = (3.0 * c3, 2.0 * c2, c1);
        if qa != 0.0 {
            let disc = qb * qb - 4.0 * qa * qc;
            if disc > 0.0 {
                let s = -0.5 * (qb + disc.sqrt().copysign(qb));
                knots[1] = s / qa;
                knots[2] = if s != 0.0 { qc / s } else { f64::NAN };
            }
        } else if qb != 0.0 {
            knots[1] = -qc / qb;
        }
        let mut pieces: Vec<f64> = knots
            .iter()
            .copied()
            .filter(|k| k.is_finite() && *k >= 0.0 && *k <= self.search_radius)
            .collect();
        pieces.sort_by(f64::total_cmp);
        let mut lo = pieces[0];
        let mut f_lo = cubic(lo);
        for &hi in &pieces[1..] {
            let f_hi = cubic(hi);
            if f_lo > 0.0 && f_hi <= 0.0 {
                let r = brent(|r| Ok(cubic(r)), lo, hi, f_lo, f_hi, 0.0, 200)?;
                return Ok((r, (p, q)));
            }
            lo = hi;
            f_lo = f_hi;
        }
        Err(Error::NumericalFailure(alloc::format!("no oval crossing along phi = {phi}")))
    }

    /// The oval point in direction `phi` from the interior point.
    pub fn point(&self, phi: f64) -> Result<OvalPoint> {
        let phi = wrap_angle(phi);
        let (r, (p, q)) = self.radius(phi)?;
        let w = self.w0 + r * p;
        let z = self.z0 + r * q;
        let (g_w, g_z) = self.cubic.gradient(w, z);
        // r'(phi) from g(c + r u) = 0 differentiated along phi
        let radial = g_w * p + g_z * q;
        let tangential = -g_w * q + g_z * p;
        let dr = -r * tangential / radial;
        Ok(OvalPoint {
            phi,
            w,
            z,
            x: w.max(0.0).sqrt(),
            y: z.max(0.0).sqrt(),
            signs: SignPair::from_gradient(g_w, g_z),
            g_w,
            g_z,
            dw_dphi: dr * p - r * q,
            dz_dphi: dr * q + r * p,
        })
    }

    /// `n` equally spaced oval points starting at `phi = 0`.
    pub fn sample(&self, n: usize) -> Result<Vec<OvalPoint>> {
        (0..n).map(|i| self.point(TAU * i as f64 / n as f64)).collect()
    }

    /// Polar angle of a configuration's squared diagonals.
    pub fn phi_of(&self, config: &QuadConfig) -> f64 {
        let (x, y) = (config.x(), config.y());
        wrap_angle((y * y - self.z0).atan2(x * x - self.w0))
    }

    /// Canonical configuration at an oval point.
    pub fn config(&self, point: &OvalPoint) -> Result<QuadConfig> {
        reconstruct_quad_with_tolerance(&self.linkage, point.x, point.y, 1e-6)
    }

    /// Geometric region of the configuration at an oval point.
    pub fn region(&self, point: &OvalPoint) -> Result<QuadRegion> {
        classify_quad(&self.config(point)?)
    }

    /// `y''(x)` along the local branch `y(x)` of the oval.
    pub fn branch_second_derivative(&self, point: &OvalPoint) -> Result<f64> {
        let (x, y, w, z) = (point.x, point.y, point.w, point.z);
        let (g_w, g_z) = self.cubic.gradient(w, z);
        if g_z.abs() <= 1e-10 * self.cubic.gradient_scale(w, z) {
            return Err(Error::TangentVertical);
        }
        let (g_ww, g_wz, g_zz) = self.cubic.hessian(w, z);
        let dz = -g_w / g_z;
        let ddz = -(g_ww + 2.0 * g_wz * dz + g_zz * dz * dz) / g_z;
        Ok(dz / y + 2.0 * x * x * ddz / y - x * x * dz * dz / (y * y * y))
    }
}
