//! Forward and inverse problems for a vertex-charged 4-bar linkage.
//!
//! All computations run on the polar model of the oval ([`OvalModel`]): the
//! potential becomes a periodic function `E(phi)` and its critical points are
//! the zeros of the analytic derivative `dE/dphi`.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;
use core::f64::consts::TAU;

use rand::Rng;

use crate::error::{Error, Result};
use crate::geometry::{aligned_configurations, classify_quad, Diagonal, Linkage, QuadConfig, QuadRegion};
use crate::moduli::{build_oval, OvalModel, OvalPoint, SignPair};
use crate::numeric::{brent, wrap_angle};
use crate::potential::{quad_derivative_at, quad_energy, ChargeSystem, PotentialKind, QuadConvention};

/// Default number of bracketing samples around the oval.
pub const DEFAULT_SAMPLES: usize = 4096;
/// Root refinement tolerance in `phi`.
pub const PHI_TOL: f64 = 1e-12;
/// Step for the central difference of `dE/dphi`.
const TYPING_STEP: f64 = 1e-5;
/// Relative threshold below which a second derivative counts as zero.
const DEGENERATE_REL: f64 = 1e-8;
/// Default upper bound on one flow step, in radians.
pub const DEFAULT_FLOW_STEP: f64 = 1e-2;
pub const DEFAULT_FLOW_MAX_ITER: usize = 20_000;

/// A controlling charge, including the symbolic endpoint `∞`.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum ChargeValue {
    Finite(f64),
    Infinite,
}

impl ChargeValue {
    pub fn finite(self) -> Option<f64> {
        match self {
            ChargeValue::Finite(t) => Some(t),
            ChargeValue::Infinite => None,
        }
    }
}

impl From<f64> for ChargeValue {
    fn from(t: f64) -> Self {
        if t == f64::INFINITY {
            ChargeValue::Infinite
        } else {
            ChargeValue::Finite(t)
        }
    }
}

impl core::fmt::Display for ChargeValue {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            ChargeValue::Finite(t) => write!(f, "{t}"),
            ChargeValue::Infinite => f.write_str("inf"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum MorseType {
    Minimum,
    Maximum,
    Degenerate,
}

impl MorseType {
    pub fn as_str(self) -> &'static str {
        match self {
            MorseType::Minimum => "min",
            MorseType::Maximum => "max",
            MorseType::Degenerate => "degenerate",
        }
    }
}

impl core::fmt::Display for MorseType {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct CriticalPoint {
    pub phi: f64,
    pub x: f64,
    pub y: f64,
    pub energy: f64,
    /// `dE/dphi` at `phi` (ideally zero).
    pub derivative: f64,
    /// `d²E/dphi²` by central difference.
    pub second_derivative: f64,
    pub morse_type: MorseType,
    pub region: QuadRegion,
    pub signs: SignPair,
    pub is_global_min: bool,
}

/// Why a flow stage stopped.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Termination {
    /// `|dE/dphi|` fell below the tolerance.
    GradientTol,
    /// No representable step decreases `E` any further.
    RoundoffFloor,
    MaxIter,
}

#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct FlowIterate {
    pub phi: f64,
    pub x: f64,
    pub y: f64,
    pub energy: f64,
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct FlowStage {
    pub t: f64,
    pub iterates: Vec<FlowIterate>,
    pub termination: Termination,
    pub converged: bool,
    /// `|dE/dphi|` at the last iterate.
    pub final_derivative: f64,
}

impl FlowStage {
    pub fn last(&self) -> &FlowIterate {
        self.iterates.last().expect("a flow stage always holds its start")
    }

    /// Number of accepted steps.
    pub fn steps(&self) -> usize {
        self.iterates.len() - 1
    }
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct FlowTrace {
    pub stages: Vec<FlowStage>,
    pub converged: bool,
    pub final_config: QuadConfig,
    /// `max(|Δx|, |Δy|) / scale` between the final and the target configuration.
    pub target_error: Option<f64>,
}

/// Solver bundle for one 4-bar linkage.
#[derive(Clone, Debug)]
pub struct QuadController {
    model: OvalModel,
    convention: QuadConvention,
    kind: PotentialKind,
    samples: usize,
    flow_step: f64,
    max_iter: usize,
}

impl QuadController {
    pub fn new(linkage: &Linkage) -> Result<Self> {
        Ok(Self::from_model(build_oval(linkage)?))
    }

    pub fn from_model(model: OvalModel) -> Self {
        Self {
            model,
            convention: QuadConvention::Eq3,
            kind: PotentialKind::Coulomb,
            samples: DEFAULT_SAMPLES,
            flow_step: DEFAULT_FLOW_STEP,
            max_iter: DEFAULT_FLOW_MAX_ITER,
        }
    }

    pub fn with_convention(mut self, convention: QuadConvention) -> Self {
        self.convention = convention;
        self
    }

    pub fn with_kind(mut self, kind: PotentialKind) -> Self {
        self.kind = kind;
        self
    }

    /// Bracketing density. Values below 8 are raised to 8.
    pub fn with_samples(mut self, samples: usize) -> Self {
        self.samples = samples.max(8);
        self
    }

    pub fn with_flow_step(mut self, step: f64) -> Self {
        self.flow_step = step;
        self
    }

    pub fn with_max_iter(mut self, max_iter: usize) -> Self {
        self.max_iter = max_iter;
        self
    }

    pub fn model(&self) -> &OvalModel {
        &self.model
    }

    pub fn convention(&self) -> QuadConvention {
        self.convention
    }

    pub fn kind(&self) -> PotentialKind {
        self.kind
    }

    pub fn samples(&self) -> usize {
        self.samples
    }

    fn charges(&self, t: f64) -> Result<ChargeSystem> {
        ChargeSystem::quad(t, self.convention)
    }

    /// `E` at polar angle `phi`.
    pub fn energy(&self, t: f64, phi: f64) -> Result<f64> {
        let p = self.model.point(phi)?;
        quad_energy(&self.charges(t)?, self.kind, p.x, p.y)
    }

    /// `dE/dphi` at polar angle `phi`.
    pub fn derivative(&self, t: f64, phi: f64) -> Result<f64> {
        let p = self.model.point(phi)?;
        quad_derivative_at(&self.model, &self.charges(t)?, self.kind, &p)
    }

    /// Largest `|dE/dphi|` over `n` samples: the scale for derivative tolerances.
    pub fn derivative_scale(&self, t: f64, n: usize) -> Result<f64> {
        let charges = self.charges(t)?;
        let mut scale: f64 = 0.0;
        for p in self.model.sample(n)? {
            if let Ok(d) = quad_derivative_at(&self.model, &charges, self.kind, &p) {
                scale = scale.max(d.abs());
            }
        }
        if scale > 0.0 {
            Ok(scale)
        } else {
            Err(Error::NumericalFailure("potential is constant along the oval".into()))
        }
    }

    /// All zeros of `dE/dphi` on `[0, 2π)`, typed and classified, sorted by `phi`.
    ///
    /// Zeros closer together than `2π / samples` may be missed.
    pub fn critical_points(&self, t: f64) -> Result<Vec<CriticalPoint>> {
        let charges = self.charges(t)?;
        let n = self.samples;
        let step = TAU / n as f64;
        let derivative = |phi: f64| -> Result<f64> {
            let p = self.model.point(phi)?;
            quad_derivative_at(&self.model, &charges, self.kind, &p)
        };
        let sweep: Vec<Option<f64>> = (0..n).map(|i| derivative(i as f64 * step).ok()).collect();
        let dscale = sweep.iter().flatten().fold(0.0f64, |m, d| m.max(d.abs()));
        if !(dscale > 0.0) {
            return Err(Error::NumericalFailure("potential is constant along the oval".into()));
        }

        let mut roots = Vec::new();
        for i in 0..n {
            let (Some(d0), Some(d1)) = (sweep[i], sweep[(i + 1) % n]) else {
                continue;
            };
            let lo = i as f64 * step;
            if d0 == 0.0 {
                roots.push(lo);
            } else if d1 != 0.0 && (d0 > 0.0) != (d1 > 0.0) {
                roots.push(brent(derivative, lo, lo + step, d0, d1, PHI_TOL, 200)?);
            }
        }

        let mut points = Vec::with_capacity(roots.len());
        for phi in roots {
            let phi = wrap_angle(phi);
            let p = self.model.point(phi)?;
            let d = quad_derivative_at(&self.model, &charges, self.kind, &p)?;
            // a sign change across a pole is not a critical point
            if d.abs() > 1e-6 * dscale {
                continue;
            }
            let second = (derivative(phi + TYPING_STEP)? - derivative(phi - TYPING_STEP)?) / (2.0 * TYPING_STEP);
            let morse_type = if second.abs() < DEGENERATE_REL * dscale {
                MorseType::Degenerate
            } else if second > 0.0 {
                MorseType::Minimum
            } else {
                MorseType::Maximum
            };
            points.push(CriticalPoint {
                phi,
                x: p.x,
                y: p.y,
                energy: quad_energy(&charges, self.kind, p.x, p.y)?,
                derivative: d,
                second_derivative: second,
                morse_type,
                region: self.model.region(&p)?,
                signs: p.signs,
                is_global_min: false,
            });
        }
        points.sort_by(|a, b| a.phi.total_cmp(&b.phi));
        if let Some(best) = points
            .iter_mut()
            .filter(|c| c.morse_type != MorseType::Maximum)
            .min_by(|a, b| a.energy.total_cmp(&b.energy))
        {
            best.is_global_min = true;
        }
        Ok(points)
    }

    /// The controlling charge that makes a strictly convex `target` critical,
    /// and therefore the global minimum.
    ///
    /// Aligned targets yield [`Error::Boundary`] with the limit charge: `∞`
    /// when the controlled diagonal is maximal, `0` when the other one is.
    pub fn stabilize(&self, target: &QuadConfig) -> Result<f64> {
        let region = classify_quad(target)?;
        let (x, y) = (target.x(), target.y());
        let (g_w, g_z) = self.model.cubic().gradient(x * x, y * y);
        if region == QuadRegion::Aligned {
            // x is extremal where the tangent (g_z, -g_w) has no w component
            let x_maximal = g_z.abs() < g_w.abs();
            let controlled_maximal = match self.convention {
                QuadConvention::Eq3 => x_maximal,
                QuadConvention::Example1 => !x_maximal,
            };
            let limit = if controlled_maximal { ChargeValue::Infinite } else { ChargeValue::Finite(0.0) };
            return Err(Error::Boundary { limit });
        }
        if region != QuadRegion::StrictlyConvex {
            return Err(Error::NotConvex);
        }
        // tangent direction of the oval in (x, y)
        let dx = g_z / (2.0 * x);
        let dy = -g_w / (2.0 * y);
        let fx = self.kind.term_derivative(1.0, x) * dx;
        let fy = self.kind.term_derivative(1.0, y) * dy;
        let t = match self.convention {
            QuadConvention::Eq3 => -fy / fx,
            QuadConvention::Example1 => -fx / fy,
        };
        if t.is_finite() && t > 0.0 {
            Ok(t)
        } else {
            Err(Error::NumericalFailure(alloc::format!("non-positive stabilizing charge {t}")))
        }
    }

    /// The aligned configuration that maximises the controlled diagonal (`∞`)
    /// or the other one (`0`).
    fn boundary_minimum(&self, controlled_maximal: bool) -> Result<QuadConfig> {
        let [x_max, y_max] = aligned_configurations(self.model.linkage())?;
        let controlled = match self.convention {
            QuadConvention::Eq3 => Diagonal::X,
            QuadConvention::Example1 => Diagonal::Y,
        };
        let pick = if (x_max.maximizes == controlled) == controlled_maximal { x_max } else { y_max };
        Ok(pick.config)
    }

    /// The global minimum of `E` for charge `t`: the unique strictly convex
    /// critical point. `t = 0` and `t = ∞` map to the aligned endpoints.
    pub fn charge_to_minimum(&self, t: ChargeValue) -> Result<QuadConfig> {
        if matches!(self.kind, PotentialKind::Log) && !matches!(t, ChargeValue::Finite(t) if t > 0.0) {
            return Err(Error::InvalidCharge("boundary charges are only defined for power-law potentials".into()));
        }
        let t = match t {
            ChargeValue::Infinite => return self.boundary_minimum(true),
            ChargeValue::Finite(t) if t == 0.0 => return self.boundary_minimum(false),
            ChargeValue::Finite(t) if !(t > 0.0 && t.is_finite()) => {
                return Err(Error::InvalidCharge(alloc::format!("t = {t} must be non-negative")))
            }
            ChargeValue::Finite(t) => t,
        };
        let convex: Vec<CriticalPoint> = self
            .critical_points(t)?
            .into_iter()
            .filter(|c| c.region == QuadRegion::StrictlyConvex)
            .collect();
        match convex.as_slice() {
            [c] => {
                let p = self.model.point(c.phi)?;
                self.model.config(&p)
            }
            _ => Err(Error::NumericalFailure(alloc::format!(
                "expected one strictly convex critical point, found {}",
                convex.len()
            ))),
        }
    }

    fn iterate(&self, charges: &ChargeSystem, p: &OvalPoint) -> Result<FlowIterate> {
        Ok(FlowIterate { phi: p.phi, x: p.x, y: p.y, energy: quad_energy(charges, self.kind, p.x, p.y)? })
    }

    /// Descent on `E(phi)` from `start_phi` with Barzilai–Borwein steps,
    /// clipped to `step` radians and halved while `E` would increase.
    pub fn gradient_flow(&self, t: f64, start_phi: f64, step: f64, tol: f64, max_iter: usize) -> Result<FlowStage> {
        if !(step > 0.0 && tol > 0.0) {
            return Err(Error::NumericalFailure("flow step and tolerance must be positive".into()));
        }
        let charges = self.charges(t)?;
        let mut p = self.model.point(start_phi)?;
        let mut it = self.iterate(&charges, &p)?;
        let mut d = quad_derivative_at(&self.model, &charges, self.kind, &p)?;
        let mut iterates = alloc::vec![it];
        let mut prev: Option<(f64, f64)> = None;
        let mut termination = Termination::MaxIter;
        // phi is tracked unwrapped so that BB differences stay meaningful
        let mut phi = p.phi;
        for _ in 0..max_iter {
            if d.abs() < tol {
                termination = Termination::GradientTol;
                break;
            }
            let mut lambda = match prev {
                Some((dphi, dd)) if dd * dphi > 0.0 => dphi / dd,
                _ => step / d.abs(),
            };
            if lambda * d.abs() > step {
                lambda = step / d.abs();
            }
            let mut delta = -lambda * d;
            let mut accepted = None;
            while delta.abs() > 4.0 * f64::EPSILON * phi.abs().max(1.0) {
                let cand = self.model.point(phi + delta)?;
                let next = self.iterate(&charges, &cand);
                let d_next = quad_derivative_at(&self.model, &charges, self.kind, &cand);
                if let (Ok(next), Ok(d_next)) = (next, d_next) {
                    if next.energy < it.energy || (next.energy == it.energy && d_next.abs() < d.abs()) {
                        accepted = Some((cand, next, d_next));
                        break;
                    }
                }
                delta *= 0.5;
            }
            let Some((cand, next, d_next)) = accepted else {
                termination = Termination::RoundoffFloor;
                break;
            };
            prev = Some((delta, d_next - d));
            phi += delta;
            p = cand;
            it = next;
            d = d_next;
            iterates.push(it);
        }
        if termination == Termination::MaxIter && d.abs() < tol {
            termination = Termination::GradientTol;
        }
        let _ = p;
        Ok(FlowStage {
            t,
            iterates,
            termination,
            converged: termination != Termination::MaxIter,
            final_derivative: d.abs(),
        })
    }

    /// Default gradient tolerance for charge `t`: `1e-9` of the derivative scale.
    pub fn flow_tolerance(&self, t: f64) -> Result<f64> {
        Ok(1e-9 * self.derivative_scale(t, 256)?)
    }

    /// Two-stage navigation: flow to the unique minimum under `t = 0`, then
    /// switch on the stabilizing charge of `target` and flow again.
    pub fn navigate(&self, start: &QuadConfig, target: &QuadConfig) -> Result<FlowTrace> {
        let t_target = self.stabilize(target)?;
        let first = self.gradient_flow(0.0, self.model.phi_of(start), self.flow_step, self.flow_tolerance(0.0)?, self.max_iter)?;
        let second = self.gradient_flow(
            t_target,
            first.last().phi,
            self.flow_step,
            self.flow_tolerance(t_target)?,
            self.max_iter,
        )?;
        self.finish(alloc::vec![first, second], Some(target))
    }

    /// Single-stage flow under the target's stabilizing charge, skipping the
    /// `t = 0` stage.
    pub fn navigate_direct(&self, start: &QuadConfig, target: &QuadConfig) -> Result<FlowTrace> {
        let t_target = self.stabilize(target)?;
        let only = self.gradient_flow(
            t_target,
            self.model.phi_of(start),
            self.flow_step,
            self.flow_tolerance(t_target)?,
            self.max_iter,
        )?;
        self.finish(alloc::vec![only], Some(target))
    }

    fn finish(&self, stages: Vec<FlowStage>, target: Option<&QuadConfig>) -> Result<FlowTrace> {
        let last = stages.last().expect("at least one stage").last().phi;
        let final_config = self.model.config(&self.model.point(last)?)?;
        let scale = self.model.diagonal_scale();
        let target_error = target.map(|t| (final_config.x() - t.x()).abs().max((final_config.y() - t.y()).abs()) / scale);
        Ok(FlowTrace { converged: stages.iter().all(|s| s.converged), stages, final_config, target_error })
    }
}

/// Distribution of quad sidelengths in a census.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum LinkageSampler {
    /// Each side uniform in `[lo, hi]`; degenerate or empty linkages are redrawn.
    Uniform { lo: f64, hi: f64 },
    Fixed([f64; 4]),
}

/// Distribution of the controlling charge in a census.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum ChargeSampler {
    /// Uniform in `(lo, hi]`.
    Uniform { lo: f64, hi: f64 },
    Fixed(f64),
}

/// Redraw limit for the linkage rejection sampler.
const MAX_REDRAWS: usize = 10_000;

impl LinkageSampler {
    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<Linkage> {
        match *self {
            LinkageSampler::Fixed([a, b, c, d]) => Linkage::quad(a, b, c, d),
            LinkageSampler::Uniform { lo, hi } => {
                if !(lo > 0.0 && hi >= lo) {
                    return Err(Error::InvalidLinkage(alloc::format!("bad side range [{lo}, {hi}]")));
                }
                for _ in 0..MAX_REDRAWS {
                    let sides: [f64; 4] = core::array::from_fn(|_| lo + (hi - lo) * rng.gen::<f64>());
                    if let Ok(l) = Linkage::new(&sides) {
                        if l.min_signed_sum() > crate::sampling::DEGENERACY_MARGIN * l.perimeter() {
                            return Ok(l);
                        }
                    }
                }
                Err(Error::NumericalFailure("linkage sampler rejected every draw".into()))
            }
        }
    }
}

impl ChargeSampler {
    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match *self {
            ChargeSampler::Fixed(t) => t,
            ChargeSampler::Uniform { lo, hi } => hi - (hi - lo) * rng.gen::<f64>(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct CensusTrial {
    pub trial: usize,
    pub sides: [f64; 4],
    pub t: f64,
    pub count: usize,
    pub types: Vec<MorseType>,
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct CensusFailure {
    pub trial: usize,
    pub sides: Option<[f64; 4]>,
    pub t: Option<f64>,
    pub error: String,
}

#[derive(Clone, Debug, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct CensusReport {
    pub trials: Vec<CensusTrial>,
    /// Critical-point count → number of trials.
    pub histogram: BTreeMap<usize, usize>,
    /// Trials with more than four critical points.
    pub exceedances: Vec<usize>,
    pub failures: Vec<CensusFailure>,
}

impl CensusReport {
    pub fn max_count(&self) -> usize {
        self.histogram.keys().next_back().copied().unwrap_or(0)
    }
}

/// Count critical points over random linkages and charges.
pub fn census<R: Rng + ?Sized>(
    rng: &mut R,
    linkages: &LinkageSampler,
    charges: &ChargeSampler,
    trials: usize,
    kind: PotentialKind,
    convention: QuadConvention,
    samples: usize,
) -> CensusReport {
    let mut report = CensusReport::default();
    for trial in 0..trials {
        let linkage = match linkages.draw(rng) {
            Ok(l) => l,
            Err(e) => {
                report.failures.push(CensusFailure { trial, sides: None, t: None, error: alloc::format!("{e}") });
                continue;
            }
        };
        let sides = linkage.quad_sides().expect("sampler draws 4-bar linkages");
        let t = charges.draw(rng);
        let outcome = QuadController::new(&linkage).and_then(|c| {
            c.with_kind(kind).with_convention(convention).with_samples(samples).critical_points(t)
        });
        match outcome {
            Ok(points) => {
                let count = points.len();
                *report.histogram.entry(count).or_insert(0) += 1;
                if count > 4 {
                    report.exceedances.push(trial);
                }
                report.trials.push(CensusTrial {
                    trial,
                    sides,
                    t,
                    count,
                    types: points.iter().map(|c| c.morse_type).collect(),
                });
            }
            Err(e) => report.failures.push(CensusFailure {
                trial,
                sides: Some(sides),
                t: Some(t),
                error: alloc::format!("{e}"),
            }),
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;

    fn example_linkage() -> Linkage {
        Linkage::quad(6.0, 6.5, 6.2, 5.8).unwrap()
    }

    fn eq3() -> QuadController {
        QuadController::new(&example_linkage()).unwrap()
    }

    #[test]
    fn example_linkage_critical_points_eq3() {
        let pts = eq3().critical_points(2.0).unwrap();
        assert_eq!(pts.len(), 4);
        let table = [
            (9.59, 7.60, MorseType::Minimum, true),
            (0.50, 3.24, MorseType::Maximum, false),
            (1.24, 0.58, MorseType::Minimum, false),
            (4.11, 0.30, MorseType::Maximum, false),
        ];
        for (x, y, ty, global) in table {
            let p = pts
                .iter()
                .find(|p| (p.x - x).abs() <= 0.011 && (p.y - y).abs() <= 0.011)
                .unwrap_or_else(|| panic!("no critical point near ({x}, {y}): {pts:?}"));
            assert_eq!(p.morse_type, ty);
            assert_eq!(p.is_global_min, global);
        }
    }

    #[test]
    fn example_linkage_under_swapped_charge() {
        let c = eq3().with_convention(QuadConvention::Example1);
        let pts = c.critical_points(2.0).unwrap();
        assert_eq!(pts.len(), 2);
        assert!(pts.iter().any(|p| p.is_global_min && p.region == QuadRegion::StrictlyConvex));
    }

    #[test]
    fn types_alternate() {
        let pts = eq3().critical_points(2.0).unwrap();
        for i in 0..pts.len() {
            assert_ne!(pts[i].morse_type, pts[(i + 1) % pts.len()].morse_type);
        }
    }

    #[test]
    fn critical_points_have_small_derivative() {
        for c in [eq3(), eq3().with_convention(QuadConvention::Example1)] {
            let scale = c.derivative_scale(2.0, 4096).unwrap();
            for p in c.critical_points(2.0).unwrap() {
                assert!(p.derivative.abs() <= 1e-10 * scale, "{p:?}");
            }
        }
    }

    #[test]
    fn zero_charge_has_two_critical_points() {
        let c = QuadController::new(&Linkage::quad(3.0, 4.0, 5.0, 6.5).unwrap()).unwrap();
        let pts = c.critical_points(0.0).unwrap();
        assert_eq!(pts.len(), 2);
        let mut types: Vec<_> = pts.iter().map(|p| p.morse_type).collect();
        types.sort();
        assert_eq!(types, [MorseType::Minimum, MorseType::Maximum]);
    }

    #[test]
    fn stabilize_round_trip_example_linkage() {
        let c = eq3();
        let target = c.charge_to_minimum(ChargeValue::Finite(2.0)).unwrap();
        assert!((target.x() - 9.59).abs() < 0.011 && (target.y() - 7.60).abs() < 0.011);
        assert!((c.stabilize(&target).unwrap() - 2.0).abs() < 1e-6);
    }

    #[test]
    fn aligned_targets_give_limits() {
        let linkage = Linkage::quad(3.0, 4.0, 5.0, 6.5).unwrap();
        let c = QuadController::new(&linkage).unwrap();
        let [x_max, y_max] = aligned_configurations(&linkage).unwrap();
        assert_eq!(c.stabilize(&y_max.config), Err(Error::Boundary { limit: ChargeValue::Finite(0.0) }));
        assert_eq!(c.stabilize(&x_max.config), Err(Error::Boundary { limit: ChargeValue::Infinite }));
        assert_eq!(c.charge_to_minimum(ChargeValue::Finite(0.0)).unwrap(), y_max.config);
        assert_eq!(c.charge_to_minimum(ChargeValue::Infinite).unwrap(), x_max.config);
    }

    #[test]
    fn nonconvex_target_rejected() {
        let c = eq3();
        let local = c.critical_points(2.0).unwrap().into_iter().find(|p| !p.region.is_convex()).unwrap();
        let cfg = c.model().config(&c.model().point(local.phi).unwrap()).unwrap();
        assert_eq!(c.stabilize(&cfg), Err(Error::NotConvex));
    }

    #[test]
    fn flow_from_critical_point_takes_no_steps() {
        let c = eq3();
        let p = c.critical_points(2.0).unwrap().into_iter().find(|p| p.is_global_min).unwrap();
        let tol = c.flow_tolerance(2.0).unwrap();
        let stage = c.gradient_flow(2.0, p.phi, DEFAULT_FLOW_STEP, tol, 100).unwrap();
        assert_eq!(stage.steps(), 0);
        assert_eq!(stage.termination, Termination::GradientTol);
    }

    #[test]
    fn flow_is_monotone_and_bounded() {
        let c = eq3();
        let stage = c.gradient_flow(2.0, 1.0, 1e-2, c.flow_tolerance(2.0).unwrap(), 10_000).unwrap();
        assert!(stage.converged);
        for w in stage.iterates.windows(2) {
            assert!(w[1].energy <= w[0].energy);
            let dphi = wrap_angle(w[1].phi - w[0].phi + core::f64::consts::PI) - core::f64::consts::PI;
            assert!(dphi.abs() <= 1e-2 * (1.0 + 1e-12));
        }
    }

    #[test]
    fn fixed_example_census() {
        let mut rng = rand::rngs::mock::StepRng::new(0, 1);
        let report = census(
            &mut rng,
            &LinkageSampler::Fixed([6.0, 6.5, 6.2, 5.8]),
            &ChargeSampler::Fixed(2.0),
            3,
            PotentialKind::Coulomb,
            QuadConvention::Eq3,
            DEFAULT_SAMPLES,
        );
        assert_eq!(report.histogram.get(&4), Some(&3));
        let mut types = report.trials[0].types.clone();
        types.sort();
        assert_eq!(types, [MorseType::Minimum, MorseType::Minimum, MorseType::Maximum, MorseType::Maximum]);
        assert!(report.exceedances.is_empty() && report.failures.is_empty());
    }
}
