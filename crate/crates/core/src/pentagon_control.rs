//! Controlling charges for an equilateral 5-bar linkage.
//!
//! Charges are `(1, 1, t, 1, s)` on `p1..p5`, so the effective potential is
//! `E = 1/x14 + 1/x24 + t/x13 + s/x25 + s t/x35`. Locally the diagonals
//! `x13`, `x35` are coordinates on the moduli space; every other diagonal is a
//! function of them through the reconstruction map, and the partials of that
//! map determine the unique positive pair `(s, t)` making a strictly convex
//! shape critical.

use alloc::vec::Vec;

use rand::Rng;

// float math for no_std; shadowed by inherent methods when std is linked
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::geometry::{reconstruct_pentagon, PentagonBranches, PentagonConfig, Point};
use crate::numeric::quadratic_roots;
use crate::potential::{effective_potential, ChargeSystem};

/// Base step (unit sides) for the chart finite differences.
pub const PARTIAL_STEP: f64 = 1e-5;
/// Smallest admissible chart margin for differentiation.
pub const MIN_CHART_MARGIN: f64 = 1e-6;
/// Bound on the scaled gradient certificate of a stabilizing pair.
pub const CERTIFICATE_TOL: f64 = 1e-6;

/// Partials of `x14`, `x24`, `x25` with respect to the chart coordinates.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct PartialSet {
    /// `∂x14/∂x35` at fixed `x13`.
    pub alpha1: f64,
    /// `∂x24/∂x35`.
    pub beta1: f64,
    /// `∂x25/∂x35`.
    pub gamma1: f64,
    /// `∂x14/∂x13` at fixed `x35`.
    pub alpha2: f64,
    /// `∂x24/∂x13`.
    pub beta2: f64,
    /// `∂x25/∂x13`.
    pub gamma2: f64,
}

impl PartialSet {
    pub fn as_array(&self) -> [f64; 6] {
        [self.alpha1, self.beta1, self.gamma1, self.alpha2, self.beta2, self.gamma2]
    }

    pub fn all_negative(&self) -> bool {
        self.as_array().iter().all(|v| *v < 0.0)
    }
}

/// Result of the inverse problem on a strictly convex pentagon.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct StabilizingPair {
    pub s: f64,
    pub t: f64,
    /// Coefficients of `A + B s + C s² = 0`.
    pub a: f64,
    pub b: f64,
    pub c: f64,
    /// The negative root of the quadratic and the `t` it forces.
    pub s_neg: f64,
    pub t_neg: f64,
    pub partials: PartialSet,
    /// Scaled gradient norm of `E` at the returned pair.
    pub certificate: f64,
}

impl StabilizingPair {
    /// `|A + B s + C s²|` relative to its largest term.
    pub fn quadratic_residual(&self) -> f64 {
        let terms = [self.a, self.b * self.s, self.c * self.s * self.s];
        let scale = terms.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        terms.iter().sum::<f64>().abs() / scale
    }
}

/// Unit-side energy `E(x13, x35)` on a fixed branch chart.
fn chart_energy(x13: f64, x35: f64, branches: PentagonBranches, charges: &ChargeSystem) -> Result<f64> {
    effective_potential(&reconstruct_pentagon(x13, x35, branches)?, charges)
}

fn chart_step(config: &PentagonConfig) -> Result<f64> {
    let margin = config.chart_margin();
    if margin < MIN_CHART_MARGIN {
        return Err(Error::ChartBoundary);
    }
    // near the boundary the reconstruction has a square-root singularity at
    // distance `margin`; the step must stay well inside it
    Ok(PARTIAL_STEP.min(1e-3 * margin))
}

fn require_strictly_convex(config: &PentagonConfig) -> Result<()> {
    if config.is_strictly_convex() {
        Ok(())
    } else {
        Err(Error::NotStrictlyConvex)
    }
}

/// Richardson-extrapolated central difference of a vector-valued map.
fn richardson3<F>(mut f: F, x: f64, h: f64) -> Result<[f64; 3]>
where
    F: FnMut(f64) -> Result<[f64; 3]>,
{
    let (p, m) = (f(x + h)?, f(x - h)?);
    let (ph, mh) = (f(x + 0.5 * h)?, f(x - 0.5 * h)?);
    Ok(core::array::from_fn(|i| {
        let coarse = (p[i] - m[i]) / (2.0 * h);
        let fine = (ph[i] - mh[i]) / h;
        (4.0 * fine - coarse) / 3.0
    }))
}

/// Value with its gradient in the chart coordinates `(x13, x35)`.
#[derive(Clone, Copy, Debug)]
struct Dual {
    v: f64,
    d: [f64; 2],
}

impl Dual {
    const fn constant(v: f64) -> Self {
        Self { v, d: [0.0, 0.0] }
    }

    fn sqrt(self) -> Self {
        let r = self.v.max(0.0).sqrt();
        Self { v: r, d: self.d.map(|g| 0.5 * g / r) }
    }

    fn scale(self, k: f64) -> Self {
        Self { v: self.v * k, d: self.d.map(|g| g * k) }
    }
}

impl core::ops::Add for Dual {
    type Output = Dual;
    fn add(self, o: Dual) -> Dual {
        Dual { v: self.v + o.v, d: [self.d[0] + o.d[0], self.d[1] + o.d[1]] }
    }
}

impl core::ops::Sub for Dual {
    type Output = Dual;
    fn sub(self, o: Dual) -> Dual {
        Dual { v: self.v - o.v, d: [self.d[0] - o.d[0], self.d[1] - o.d[1]] }
    }
}

#[allow(clippy::suspicious_arithmetic_impl)] // product rule
impl core::ops::Mul for Dual {
    type Output = Dual;
    fn mul(self, o: Dual) -> Dual {
        Dual { v: self.v * o.v, d: core::array::from_fn(|i| self.d[i] * o.v + self.v * o.d[i]) }
    }
}

impl core::ops::Div for Dual {
    type Output = Dual;
    fn div(self, o: Dual) -> Dual {
        let inv = 1.0 / o.v;
        Dual { v: self.v * inv, d: core::array::from_fn(|i| (self.d[i] - self.v * inv * o.d[i]) * inv) }
    }
}

fn dual_dist(p: (Dual, Dual), q: (Dual, Dual)) -> Dual {
    let (dx, dy) = (p.0 - q.0, p.1 - q.1);
    (dx * dx + dy * dy).sqrt()
}

/// `(x14, x24, x25)` with gradients, following the reconstruction map step by step.
fn dual_diagonals(x13: f64, x35: f64, branches: PentagonBranches) -> [Dual; 3] {
    let one = Dual::constant(1.0);
    let a = Dual { v: x13, d: [1.0, 0.0] };
    let b = Dual { v: x35, d: [0.0, 1.0] };
    let s5 = branches.p5.signum();
    let u = (one + a * a - b * b) / a.scale(2.0);
    let p5 = (u, (one - u * u).sqrt().scale(s5));
    let p2 = (a.scale(0.5), (one - a * a.scale(0.25)).sqrt().scale(-s5 * branches.p2.signum()));
    let p3 = (a, Dual::constant(0.0));
    let chord = (p5.0 - p3.0, p5.1 - p3.1);
    let len = (chord.0 * chord.0 + chord.1 * chord.1).sqrt();
    let lift = (one - b * b.scale(0.25)).sqrt().scale(s5 * branches.p4.signum());
    let p4 = (
        (p3.0 + p5.0).scale(0.5) + chord.1 / len * lift,
        (p3.1 + p5.1).scale(0.5) - chord.0 / len * lift,
    );
    let origin = (Dual::constant(0.0), Dual::constant(0.0));
    [dual_dist(p4, origin), dual_dist(p4, p2), dual_dist(p5, p2)]
}

/// The six chart partials at a strictly convex configuration, by exact
/// forward differentiation of the reconstruction map.
pub fn diagonal_partials(config: &PentagonConfig) -> Result<PartialSet> {
    require_strictly_convex(config)?;
    chart_step(config)?;
    let (x13, x35) = config.chart();
    let [x14, x24, x25] = dual_diagonals(x13, x35, config.branches());
    Ok(PartialSet {
        alpha1: x14.d[1],
        beta1: x24.d[1],
        gamma1: x25.d[1],
        alpha2: x14.d[0],
        beta2: x24.d[0],
        gamma2: x25.d[0],
    })
}

/// The same partials by Richardson-extrapolated central differences of the
/// reconstruction map, with step `1e-5` (smaller near the chart boundary).
pub fn diagonal_partials_fd(config: &PentagonConfig) -> Result<PartialSet> {
    require_strictly_convex(config)?;
    let h = chart_step(config)?;
    let (x13, x35) = config.chart();
    let branches = config.branches();
    let others = |a: f64, b: f64| -> Result<[f64; 3]> {
        let d = reconstruct_pentagon(a, b, branches)?.unit_diagonals();
        Ok([d[1], d[2], d[3]])
    };
    let [alpha1, beta1, gamma1] = richardson3(|b| others(x13, b), x35, h)?;
    let [alpha2, beta2, gamma2] = richardson3(|a| others(a, x35), x13, h)?;
    Ok(PartialSet { alpha1, beta1, gamma1, alpha2, beta2, gamma2 })
}

/// `t` forced by `∂E/∂x13 = 0` for a given `s`.
fn companion_t(partials: &PartialSet, [x13, x14, x24, x25, _]: [f64; 5], s: f64) -> f64 {
    let PartialSet { alpha2, beta2, gamma2, .. } = *partials;
    -x13 * x13 * (alpha2 / (x14 * x14) + beta2 / (x24 * x24) + s * gamma2 / (x25 * x25))
}

/// Quadratic coefficients `(A, B, C)` after eliminating `t`.
fn coefficients(partials: &PartialSet, [x13, x14, x24, x25, x35]: [f64; 5]) -> (f64, f64, f64) {
    let p = partials;
    let (q14, q24, q25) = (x14 * x14, x24 * x24, x25 * x25);
    let ratio = x13 * x13 / (x35 * x35);
    let a = p.alpha1 / q14 + p.beta1 / q24;
    let b = p.gamma1 / q25 - ratio * (p.alpha2 / q14 + p.beta2 / q24);
    let c = -ratio * p.gamma2 / q25;
    (a, b, c)
}

/// The unique pair `(s, t)` of positive charges making `config` critical.
pub fn stabilize_pentagon(config: &PentagonConfig) -> Result<StabilizingPair> {
    let partials = diagonal_partials(config)?;
    let d = config.unit_diagonals();
    let (a, b, c) = coefficients(&partials, d);
    let coeff_scale = a.abs().max(b.abs()).max(c.abs());
    if !(c.abs() >= 1e-14 * coeff_scale) {
        return Err(Error::QuadraticDegenerate);
    }
    if !(a * c < 0.0) {
        return Err(Error::NumericalFailure(alloc::format!("AC = {} is not negative", a * c)));
    }
    let (s_neg, s) = quadratic_roots(a, b, c).ok_or(Error::QuadraticDegenerate)?;
    let t = companion_t(&partials, d, s);
    let t_neg = companion_t(&partials, d, s_neg);
    if !(s > 0.0 && t > 0.0) {
        return Err(Error::NumericalFailure(alloc::format!("stabilizing pair ({s}, {t}) is not positive")));
    }
    let certificate = verify_critical(config, s, t)?;
    if !(certificate <= CERTIFICATE_TOL) {
        return Err(Error::NumericalFailure(alloc::format!("gradient certificate {certificate:e} too large")));
    }
    Ok(StabilizingPair { s, t, a, b, c, s_neg, t_neg, partials, certificate })
}

/// Gradient of `E` in the chart `(x35, x13)` at unit scale.
pub fn chart_gradient(config: &PentagonConfig, s: f64, t: f64) -> Result<[f64; 2]> {
    let h = chart_step(config)?;
    let charges = ChargeSystem::pentagon(s, t)?;
    let (x13, x35) = config.chart();
    let branches = config.branches();
    let diff = |f: &dyn Fn(f64) -> Result<f64>, x: f64| crate::numeric::richardson_derivative(f, x, h);
    let d35 = diff(&|b| chart_energy(x13, b, branches, &charges), x35)?;
    let d13 = diff(&|a| chart_energy(a, x35, branches, &charges), x13)?;
    Ok([d35, d13])
}

/// Norm of the chart gradient of `E`, made dimensionless by `side / E`.
pub fn verify_critical(config: &PentagonConfig, s: f64, t: f64) -> Result<f64> {
    let [g35, g13] = chart_gradient(config, s, t)?;
    let e = pentagon_energy(config, s, t)? * config.scale();
    Ok(g35.hypot(g13) / e.abs())
}

/// `E` at the configuration's actual scale.
pub fn pentagon_energy(config: &PentagonConfig, s: f64, t: f64) -> Result<f64> {
    effective_potential(config, &ChargeSystem::pentagon(s, t)?)
}

/// First-order change of `E` when the single aligned vertex is pulled
/// outwards, orthogonally to its two collinear edges. The neighbours stay
/// put to first order because the edge lengths only change at second order.
pub fn boundary_descent_check(config: &PentagonConfig, s: f64, t: f64) -> Result<f64> {
    if !(s > 0.0 && t > 0.0) {
        return Err(Error::InvalidCharge(alloc::format!("(s, t) = ({s}, {t}) must be positive")));
    }
    let aligned = config.aligned_vertices();
    let [k] = aligned[..] else {
        return Err(Error::NotAligned);
    };
    if !config.is_convex() {
        return Err(Error::NotAligned);
    }
    let v = config.vertices();
    let chord = v[(k + 1) % 5] - v[(k + 4) % 5];
    let area2: f64 = (0..5).map(|i| v[i].cross(v[(i + 1) % 5])).sum();
    // the interior lies to the left of a counter-clockwise boundary
    let right = Point::new(chord.y, -chord.x) * (1.0 / chord.norm());
    let outward = if area2 > 0.0 { right } else { -right };
    let charges = ChargeSystem::pentagon(s, t)?;
    let q = charges.charges();
    let derivative = [(k + 2) % 5, (k + 3) % 5]
        .into_iter()
        .map(|j| {
            let r = v[k] - v[j];
            let d = r.norm();
            -q[k] * q[j] / (d * d * d) * r.dot(outward)
        })
        .sum();
    Ok(derivative)
}

/// Sign check of the negative root of the stabilizing quadratic.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct MixedSignReport {
    pub s_neg: f64,
    pub t_companion: f64,
    pub ac: f64,
    /// `s_neg < 0` forces `t ≤ 0`, so no mixed-sign pair makes the shape critical.
    pub consistent: bool,
}

pub fn mixed_sign_consistency(config: &PentagonConfig) -> Result<MixedSignReport> {
    let pair = stabilize_pentagon(config)?;
    Ok(MixedSignReport {
        s_neg: pair.s_neg,
        t_companion: pair.t_neg,
        ac: pair.a * pair.c,
        consistent: pair.s_neg < 0.0 && pair.t_neg <= 1e-10,
    })
}

/// Smallest admissible non-adjacent vertex distance during a probe descent
/// (unit sides).
const PROBE_POLE_CLAMP: f64 = 1e-9;
/// Seeds are redrawn when two non-adjacent vertices are closer than this.
const SEED_SEPARATION: f64 = 1e-3;
pub const PROBE_GRADIENT_TOL: f64 = 1e-7;
pub const PROBE_MAX_ITER: usize = 5_000;
const PROBE_MAX_STEP: f64 = 0.2;
const PAIRS: [(usize, usize); 5] = [(0, 2), (0, 3), (1, 3), (1, 4), (2, 4)];

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum DescentStop {
    GradientTol,
    RoundoffFloor,
    MaxIter,
    /// The closure retraction broke down.
    Failed,
}

/// Outcome of one probe descent.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct Descent {
    pub seed_chart: (f64, f64),
    pub seed_branches: PentagonBranches,
    pub energy: f64,
    /// Projected gradient norm divided by `E`, unit sides.
    pub gradient_norm: f64,
    pub iterations: usize,
    pub stop: DescentStop,
    pub vertices: [Point; 5],
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum ProbeVerdict {
    NoLowerFound,
    /// A configuration with lower energy, unit sides.
    LowerFound { vertices: [Point; 5], energy: f64 },
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct ProbeReport {
    pub verdict: ProbeVerdict,
    /// `seeds == 0`: nothing was explored.
    pub vacuous: bool,
    pub target_energy: f64,
    pub best_energy: Option<f64>,
    pub descents: Vec<Descent>,
}

/// Unit-side pentagon in edge-direction coordinates: edge `k` has direction
/// `theta[k]`, with `theta[0] = 0` fixing the rotation and `p1` at the origin.
#[derive(Clone, Copy, Debug)]
struct EdgeChart {
    theta: [f64; 5],
}

impl EdgeChart {
    fn from_vertices(v: &[Point; 5]) -> Self {
        let dir = |k: usize| {
            let e = v[(k + 1) % 5] - v[k];
            e.y.atan2(e.x)
        };
        let base = dir(0);
        Self { theta: core::array::from_fn(|k| dir(k) - base) }
    }

    fn edge(&self, k: usize) -> Point {
        let (s, c) = self.theta[k].sin_cos();
        Point::new(c, s)
    }

    fn vertices(&self) -> [Point; 5] {
        let mut v = [Point::ORIGIN; 5];
        for m in 1..5 {
            v[m] = v[m - 1] + self.edge(m - 1);
        }
        v
    }

    fn closure(&self) -> Point {
        (0..5).fold(Point::ORIGIN, |acc, k| acc + self.edge(k))
    }

    /// Columns `∂closure/∂theta_k`, `k = 1..=4`.
    fn jacobian(&self) -> [Point; 4] {
        core::array::from_fn(|i| self.edge(i + 1).perp())
    }

    /// Pulls the chart back onto `closure = 0` by Gauss–Newton.
    fn retract(mut self) -> Option<Self> {
        for _ in 0..50 {
            let c = self.closure();
            if c.norm() <= 1e-14 {
                return Some(self);
            }
            let delta = min_norm_solve(&self.jacobian(), c)?;
            for i in 0..4 {
                self.theta[i + 1] -= delta[i];
            }
        }
        (self.closure().norm() <= 1e-12).then_some(self)
    }
}

/// Minimum-norm `d` with `J d = rhs` for a 2×4 `J` given by columns.
fn min_norm_solve(j: &[Point; 4], rhs: Point) -> Option<[f64; 4]> {
    let (mut a, mut b, mut c) = (0.0, 0.0, 0.0);
    for col in j {
        a += col.x * col.x;
        b += col.x * col.y;
        c += col.y * col.y;
    }
    let det = a * c - b * b;
    if !(det.abs() > 1e-12 * (a * c).max(f64::MIN_POSITIVE)) {
        return None;
    }
    let lx = (c * rhs.x - b * rhs.y) / det;
    let ly = (a * rhs.y - b * rhs.x) / det;
    Some(core::array::from_fn(|i| j[i].x * lx + j[i].y * ly))
}

fn edge_energy(v: &[Point; 5], q: &[f64]) -> Option<f64> {
    let mut e = 0.0;
    for (i, j) in PAIRS {
        let d = v[i].distance(v[j]);
        if !(d > PROBE_POLE_CLAMP) {
            return None;
        }
        e += q[i] * q[j] / d;
    }
    Some(e)
}

/// Energy gradient in `theta_1..theta_4`, projected onto the closure tangent space.
fn projected_gradient(chart: &EdgeChart, q: &[f64]) -> Option<[f64; 4]> {
    let v = chart.vertices();
    let mut g = [0.0; 4];
    for (i, j) in PAIRS {
        let r = v[j] - v[i];
        let d = r.norm();
        let w = -q[i] * q[j] / (d * d * d);
        // edges i..j-1 move p_j relative to p_i
        for k in i.max(1)..j {
            g[k - 1] += w * r.dot(chart.edge(k).perp());
        }
    }
    let jac = chart.jacobian();
    let jg = (0..4).fold(Point::ORIGIN, |acc, i| acc + jac[i] * g[i]);
    let corr = min_norm_solve(&jac, jg)?;
    Some(core::array::from_fn(|i| g[i] - corr[i]))
}

fn norm4(v: &[f64; 4]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Projected descent of the unit-side energy from `start`.
fn probe_descent(start: &[Point; 5], q: &[f64]) -> (f64, f64, usize, DescentStop, [Point; 5]) {
    let Some(mut chart) = EdgeChart::from_vertices(start).retract() else {
        return (f64::NAN, f64::NAN, 0, DescentStop::Failed, *start);
    };
    let fail = |chart: &EdgeChart, iter| (f64::NAN, f64::NAN, iter, DescentStop::Failed, chart.vertices());
    let Some(mut e) = edge_energy(&chart.vertices(), q) else { return fail(&chart, 0) };
    let Some(mut g) = projected_gradient(&chart, q) else { return fail(&chart, 0) };
    let mut prev: Option<([f64; 4], [f64; 4])> = None;
    for iter in 0..PROBE_MAX_ITER {
        let gn = norm4(&g);
        if gn / e <= PROBE_GRADIENT_TOL {
            return (e, gn / e, iter, DescentStop::GradientTol, chart.vertices());
        }
        let mut lambda = match prev {
            Some((s, y)) => {
                let sy: f64 = (0..4).map(|i| s[i] * y[i]).sum();
                let ss: f64 = (0..4).map(|i| s[i] * s[i]).sum();
                if sy > 0.0 {
                    ss / sy
                } else {
                    PROBE_MAX_STEP / gn
                }
            }
            None => PROBE_MAX_STEP / gn,
        };
        lambda = lambda.min(PROBE_MAX_STEP / gn);
        let mut accepted = None;
        for _ in 0..60 {
            let mut trial = chart;
            for i in 0..4 {
                trial.theta[i + 1] -= lambda * g[i];
            }
            if let Some(trial) = trial.retract() {
                if let (Some(e_new), Some(g_new)) = (edge_energy(&trial.vertices(), q), projected_gradient(&trial, q)) {
                    if e_new < e || (e_new == e && norm4(&g_new) < gn) {
                        accepted = Some((trial, e_new, g_new));
                        break;
                    }
                }
            }
            lambda *= 0.5;
        }
        let Some((trial, e_new, g_new)) = accepted else {
            return (e, gn / e, iter, DescentStop::RoundoffFloor, chart.vertices());
        };
        let step: [f64; 4] = core::array::from_fn(|i| trial.theta[i + 1] - chart.theta[i + 1]);
        let dg: [f64; 4] = core::array::from_fn(|i| g_new[i] - g[i]);
        prev = Some((step, dg));
        chart = trial;
        e = e_new;
        g = g_new;
    }
    let gn = norm4(&g) / e;
    let stop = if gn <= PROBE_GRADIENT_TOL { DescentStop::GradientTol } else { DescentStop::MaxIter };
    (e, gn, PROBE_MAX_ITER, stop, chart.vertices())
}

/// Multi-start local descent of `E` over the whole pentagon moduli space,
/// seeded at random chart points on all eight branch charts. Finding nothing
/// lower is evidence of global minimality, not proof.
pub fn global_min_probe<R: Rng + ?Sized>(
    rng: &mut R,
    config: &PentagonConfig,
    s: f64,
    t: f64,
    seeds: usize,
) -> Result<ProbeReport> {
    let charges = ChargeSystem::pentagon(s, t)?;
    let q = charges.charges();
    let target_energy = edge_energy(&config.unit_vertices(), q).ok_or(Error::PoleHit)?;
    let all = PentagonBranches::all();
    let mut descents = Vec::with_capacity(seeds);
    for i in 0..seeds {
        let branches = all[i % all.len()];
        let (seed_chart, start) = loop {
            let (a, b) = crate::sampling::random_chart_point(rng, 1e-6);
            let cfg = reconstruct_pentagon(a, b, branches)?;
            let v = cfg.unit_vertices();
            if PAIRS.iter().all(|&(i, j)| v[i].distance(v[j]) > SEED_SEPARATION) {
                break ((a, b), v);
            }
        };
        let (energy, gradient_norm, iterations, stop, vertices) = probe_descent(&start, q);
        descents.push(Descent { seed_chart, seed_branches: branches, energy, gradient_norm, iterations, stop, vertices });
    }
    let best = descents
        .iter()
        .filter(|d| d.energy.is_finite())
        .min_by(|a, b| a.energy.total_cmp(&b.energy));
    let best_energy = best.map(|d| d.energy);
    let verdict = match best {
        Some(d) if d.energy < target_energy - 1e-9 * target_energy.abs() => {
            ProbeVerdict::LowerFound { vertices: d.vertices, energy: d.energy }
        }
        _ => ProbeVerdict::NoLowerFound,
    };
    Ok(ProbeReport { verdict, vacuous: seeds == 0, target_energy, best_energy, descents })
}
