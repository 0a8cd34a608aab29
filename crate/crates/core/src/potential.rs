//! Charge systems and the Coulomb-type potentials of a vertex-charged linkage.
//!
//! The full potential sums `q_i q_j / |p_i p_j|` over all unordered vertex
//! pairs. Bars have fixed length, so dropping the adjacent pairs changes it by
//! a constant; the *effective* potential keeps the diagonal pairs only. The
//! power-law family replaces `1/d` with `1/d^α` and the logarithmic variant
//! uses `ln d`.

use alloc::vec::Vec;


// float math for no_std; shadowed by inherent methods when std is linked
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::geometry::{Point, Polygon, DEGENERACY_TOL};
use crate::moduli::{OvalModel, OvalPoint};

/// Which pair-interaction law is used.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum PotentialKind {
    /// `q q' / d`.
    #[default]
    Coulomb,
    /// `q q' / d^α`, `α > 0`.
    Power(f64),
    /// `q q' ln d`.
    Log,
}

impl PotentialKind {
    pub fn power(alpha: f64) -> Result<Self> {
        if alpha > 0.0 && alpha.is_finite() {
            Ok(PotentialKind::Power(alpha))
        } else {
            Err(Error::InvalidAlpha(alpha))
        }
    }

    fn validate(self) -> Result<()> {
        match self {
            PotentialKind::Power(alpha) if !(alpha > 0.0 && alpha.is_finite()) => Err(Error::InvalidAlpha(alpha)),
            _ => Ok(()),
        }
    }

    /// Interaction of a pair with charge product `qq` at distance `d`.
    #[inline]
    pub fn term(self, qq: f64, d: f64) -> f64 {
        match self {
            PotentialKind::Coulomb => qq / d,
            PotentialKind::Power(alpha) if alpha == 1.0 => qq / d,
            PotentialKind::Power(alpha) => qq / d.powf(alpha),
            PotentialKind::Log => qq * d.ln(),
        }
    }

    /// `d/dd` of [`term`](Self::term).
    #[inline]
    pub fn term_derivative(self, qq: f64, d: f64) -> f64 {
        match self {
            PotentialKind::Coulomb => -qq / (d * d),
            PotentialKind::Power(alpha) => -alpha * qq / d.powf(alpha + 1.0),
            PotentialKind::Log => qq / d,
        }
    }
}

impl core::fmt::Display for PotentialKind {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            PotentialKind::Coulomb => f.write_str("coulomb"),
            PotentialKind::Power(a) => write!(f, "alpha:{a}"),
            PotentialKind::Log => f.write_str("log"),
        }
    }
}

/// Which quad vertex carries the controlling charge `t`.
///
/// `Eq3` puts `t` on vertex 1, so it multiplies `1/x` with `x = |p1 p3|`.
/// `Example1` puts it on vertex 2, multiplying `1/y`. For the well-known
/// 6, 6.5, 6.2, 5.8 example the tabulated critical locations are those of
/// `Eq3`, while the tabulated energies are `1/x + t/y` at those locations.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum QuadConvention {
    #[default]
    Eq3,
    Example1,
}

impl QuadConvention {
    /// Zero-based index of the controlled vertex.
    pub fn controlled_vertex(self) -> usize {
        match self {
            QuadConvention::Eq3 => 0,
            QuadConvention::Example1 => 1,
        }
    }
}

/// Which vertices carry the controlling charges.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub enum Control {
    /// One controlled quad vertex (`t`).
    Quad { t_vertex: usize },
    /// Two non-neighbouring pentagon vertices (`s`, `t`).
    Pentagon { s_vertex: usize, t_vertex: usize },
    /// Arbitrary charges, no controlling structure.
    Generic,
}

/// Vertex charges of a linkage.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct ChargeSystem {
    charges: Vec<f64>,
    control: Control,
}

impl ChargeSystem {
    /// Quad charges: `t` on `vertex`, `+1` elsewhere.
    pub fn quad_controlled(t: f64, vertex: usize) -> Result<Self> {
        if vertex >= 4 {
            return Err(Error::InvalidCharge(alloc::format!("vertex {vertex} out of range")));
        }
        if !t.is_finite() {
            return Err(Error::InvalidCharge(alloc::format!("non-finite t = {t}")));
        }
        let mut charges = alloc::vec![1.0; 4];
        charges[vertex] = t;
        Ok(Self { charges, control: Control::Quad { t_vertex: vertex } })
    }

    pub fn quad(t: f64, convention: QuadConvention) -> Result<Self> {
        Self::quad_controlled(t, convention.controlled_vertex())
    }

    /// Pentagon charges `(1, 1, t, 1, s)`: `t` on vertex 3 and `s` on vertex 5,
    /// so that the effective potential reads
    /// `1/x14 + 1/x24 + t/x13 + s/x25 + s t/x35`.
    pub fn pentagon(s: f64, t: f64) -> Result<Self> {
        if !(s.is_finite() && t.is_finite()) {
            return Err(Error::InvalidCharge("non-finite controlling charge".into()));
        }
        Ok(Self { charges: alloc::vec![1.0, 1.0, t, 1.0, s], control: Control::Pentagon { s_vertex: 4, t_vertex: 2 } })
    }

    /// Arbitrary charges.
    pub fn generic(charges: &[f64]) -> Self {
        Self { charges: charges.to_vec(), control: Control::Generic }
    }

    pub fn charges(&self) -> &[f64] {
        &self.charges
    }

    pub fn control(&self) -> Control {
        self.control
    }

    /// The controlling quad charge, if any.
    pub fn t(&self) -> Option<f64> {
        match self.control {
            Control::Quad { t_vertex } | Control::Pentagon { t_vertex, .. } => Some(self.charges[t_vertex]),
            Control::Generic => None,
        }
    }

    pub fn s(&self) -> Option<f64> {
        match self.control {
            Control::Pentagon { s_vertex, .. } => Some(self.charges[s_vertex]),
            _ => None,
        }
    }

    /// Charge products on the two quad diagonals: `(q1 q3, q2 q4)`.
    pub fn quad_diagonal_products(&self) -> Result<(f64, f64)> {
        match self.charges[..] {
            [q1, q2, q3, q4] => Ok((q1 * q3, q2 * q4)),
            _ => Err(Error::InvalidCharge("expected four charges".into())),
        }
    }

    fn check_len(&self, n: usize) -> Result<()> {
        if self.charges.len() == n {
            Ok(())
        } else {
            Err(Error::InvalidCharge(alloc::format!(
                "{} charges for a polygon with {n} vertices",
                self.charges.len()
            )))
        }
    }
}

fn mean_side(v: &[Point]) -> f64 {
    let n = v.len();
    (0..n).map(|i| v[i].distance(v[(i + 1) % n])).sum::<f64>() / n as f64
}

fn pair_sum(v: &[Point], charges: &ChargeSystem, kind: PotentialKind, diagonals_only: bool) -> Result<f64> {
    kind.validate()?;
    charges.check_len(v.len())?;
    let n = v.len();
    let threshold = DEGENERACY_TOL * mean_side(v);
    let q = charges.charges();
    let mut sum = 0.0;
    for i in 0..n {
        for j in i + 1..n {
            let adjacent = j == i + 1 || (i == 0 && j == n - 1);
            if diagonals_only && adjacent {
                continue;
            }
            let d = v[i].distance(v[j]);
            if !(d > threshold) {
                return Err(Error::PoleHit);
            }
            sum += kind.term(q[i] * q[j], d);
        }
    }
    Ok(sum)
}

/// Coulomb potential over all unordered vertex pairs, bars included.
pub fn full_potential<P: Polygon + ?Sized>(config: &P, charges: &ChargeSystem) -> Result<f64> {
    pair_sum(config.vertices(), charges, PotentialKind::Coulomb, false)
}

/// Coulomb potential over diagonal (non-adjacent) pairs only.
pub fn effective_potential<P: Polygon + ?Sized>(config: &P, charges: &ChargeSystem) -> Result<f64> {
    pair_sum(config.vertices(), charges, PotentialKind::Coulomb, true)
}

/// Power-law potential `Σ q_i q_j / d_ij^α` over diagonal pairs.
pub fn potential_alpha<P: Polygon + ?Sized>(config: &P, charges: &ChargeSystem, alpha: f64) -> Result<f64> {
    pair_sum(config.vertices(), charges, PotentialKind::power(alpha)?, true)
}

/// Logarithmic potential `Σ q_i q_j ln d_ij` over diagonal pairs.
pub fn potential_log<P: Polygon + ?Sized>(config: &P, charges: &ChargeSystem) -> Result<f64> {
    pair_sum(config.vertices(), charges, PotentialKind::Log, true)
}

/// Effective potential of the given kind over diagonal pairs.
pub fn potential<P: Polygon + ?Sized>(config: &P, charges: &ChargeSystem, kind: PotentialKind) -> Result<f64> {
    pair_sum(config.vertices(), charges, kind, true)
}

/// Quad effective potential straight from the diagonals.
pub fn quad_energy(charges: &ChargeSystem, kind: PotentialKind, x: f64, y: f64) -> Result<f64> {
    let (qx, qy) = charges.quad_diagonal_products()?;
    Ok(kind.term(qx, x) + kind.term(qy, y))
}

/// `dE/dphi` along the oval at an already evaluated point.
pub fn quad_derivative_at(
    model: &OvalModel,
    charges: &ChargeSystem,
    kind: PotentialKind,
    point: &OvalPoint,
) -> Result<f64> {
    let (qx, qy) = charges.quad_diagonal_products()?;
    let threshold = 1e-9 * model.diagonal_scale();
    if !(point.x > threshold && point.y > threshold) {
        return Err(Error::PoleHit);
    }
    Ok(kind.term_derivative(qx, point.x) * point.dx_dphi() + kind.term_derivative(qy, point.y) * point.dy_dphi())
}

/// `dE/dphi` along the polar parametrisation of the oval, by the chain rule
/// through the implicit tangent of the Cayley–Menger relation.
pub fn quad_potential_derivative(
    model: &OvalModel,
    charges: &ChargeSystem,
    phi: f64,
    kind: PotentialKind,
) -> Result<f64> {
    kind.validate()?;
    let point = model.point(phi)?;
    quad_derivative_at(model, charges, kind, &point)
}

/// Quad potential at polar angle `phi`.
pub fn quad_potential_at(model: &OvalModel, charges: &ChargeSystem, phi: f64, kind: PotentialKind) -> Result<f64> {
    let point = model.point(phi)?;
    let threshold = 1e-9 * model.diagonal_scale();
    if !(point.x > threshold && point.y > threshold) {
        return Err(Error::PoleHit);
    }
    quad_energy(charges, kind, point.x, point.y)
}
