//! Random generators for linkages and configurations, used by property
//! tests, the census and the CLI campaigns.

use alloc::vec::Vec;
use core::f64::consts::{PI, TAU};

use rand::Rng;

use crate::error::{Error, Result};
use crate::geometry::{reconstruct_pentagon, turning_angles, Linkage, PentagonBranches, PentagonConfig, QuadConfig, QuadRegion};
use crate::moduli::{build_oval, OvalModel};

/// Linkages whose smallest signed side sum is below this fraction of the
/// perimeter are treated as degenerate by the samplers.
pub const DEGENERACY_MARGIN: f64 = 1e-3;
/// Minimum distance of a random pentagon chart point from the chart boundary.
pub const CHART_MARGIN: f64 = 1e-3;
/// Minimum turning angle (and distance of each angle from π) of random
/// strictly convex targets.
pub const CONVEX_ANGLE_MARGIN: f64 = 1e-3;

const MAX_DRAWS: usize = 100_000;

/// A nondegenerate 4-bar linkage with sides uniform in `[lo, hi]`, together
/// with its oval model.
pub fn random_quad<R: Rng + ?Sized>(rng: &mut R, lo: f64, hi: f64) -> Result<(Linkage, OvalModel)> {
    for _ in 0..MAX_DRAWS {
        let sides: [f64; 4] = core::array::from_fn(|_| lo + (hi - lo) * rng.gen::<f64>());
        let Ok(linkage) = Linkage::new(&sides) else { continue };
        if linkage.min_signed_sum() <= DEGENERACY_MARGIN * linkage.perimeter() {
            continue;
        }
        if let Ok(model) = build_oval(&linkage) {
            return Ok((linkage, model));
        }
    }
    Err(Error::NumericalFailure("no admissible 4-bar linkage drawn".into()))
}

fn angle_margin<const N: usize>(vertices: &[crate::geometry::Point; N]) -> f64 {
    turning_angles(vertices)
        .iter()
        .map(|a| a.abs().min(PI - a.abs()))
        .fold(f64::INFINITY, f64::min)
}

/// A strictly convex configuration on the oval, uniform in the polar angle
/// over the convex arc, with every turning angle at least
/// [`CONVEX_ANGLE_MARGIN`] away from `0` and `π`.
pub fn random_convex_quad<R: Rng + ?Sized>(rng: &mut R, model: &OvalModel) -> Result<QuadConfig> {
    for _ in 0..MAX_DRAWS {
        let p = model.point(TAU * rng.gen::<f64>())?;
        let Ok(cfg) = model.config(&p) else { continue };
        if crate::geometry::classify_quad(&cfg)? == QuadRegion::StrictlyConvex
            && angle_margin(cfg.vertices()) >= CONVEX_ANGLE_MARGIN
        {
            return Ok(cfg);
        }
    }
    Err(Error::NumericalFailure("no convex configuration drawn".into()))
}

/// Any configuration on the oval, uniform in the polar angle.
pub fn random_quad_config<R: Rng + ?Sized>(rng: &mut R, model: &OvalModel) -> Result<QuadConfig> {
    let p = model.point(TAU * rng.gen::<f64>())?;
    model.config(&p)
}

/// A uniformly drawn chart point `(x13, x35)` that is realisable with unit
/// sides and at least `margin` away from the chart boundary.
pub fn random_chart_point<R: Rng + ?Sized>(rng: &mut R, margin: f64) -> (f64, f64) {
    loop {
        let a = 2.0 * rng.gen::<f64>();
        let b = 2.0 * rng.gen::<f64>();
        let slack = [a, 2.0 - a, b, 2.0 - b, a + b - 1.0, 1.0 - (a - b).abs()]
            .into_iter()
            .fold(f64::INFINITY, f64::min);
        if slack >= margin {
            return (a, b);
        }
    }
}

/// A strictly convex unit equilateral pentagon, uniform over the convex part
/// of the chart with margin [`CHART_MARGIN`].
pub fn random_convex_pentagon<R: Rng + ?Sized>(rng: &mut R) -> Result<PentagonConfig> {
    for _ in 0..MAX_DRAWS {
        let (a, b) = random_chart_point(rng, CHART_MARGIN);
        let cfg = reconstruct_pentagon(a, b, PentagonBranches::CONVEX)?;
        if cfg.is_strictly_convex() {
            return Ok(cfg);
        }
    }
    Err(Error::NumericalFailure("no convex pentagon drawn".into()))
}

/// A unit equilateral pentagon with vertex `vertex` (zero-based) aligned and
/// all other angles strictly convex.
///
/// The aligned vertex is built at `p2` (`x13 = 2`) and moved to the requested
/// label by a cyclic relabelling.
pub fn random_aligned_pentagon<R: Rng + ?Sized>(rng: &mut R, vertex: usize) -> Result<PentagonConfig> {
    if vertex >= 5 {
        return Err(Error::InvalidCharge(alloc::format!("vertex {vertex} out of range")));
    }
    for _ in 0..MAX_DRAWS {
        // with x13 = 2 the chart requires x35 in [1, 2]
        let b = 1.0 + CHART_MARGIN + (1.0 - 2.0 * CHART_MARGIN) * rng.gen::<f64>();
        let cfg = reconstruct_pentagon(2.0, b, PentagonBranches::CONVEX)?;
        let v = cfg.vertices();
        // new label i carries old vertex (i + 1 - vertex) so old p2 lands on `vertex`
        let relabelled: [_; 5] = core::array::from_fn(|i| v[(i + 6 - vertex) % 5]);
        let out = PentagonConfig::from_vertices(relabelled)?;
        if out.aligned_vertices() == [vertex] && out.is_convex() {
            return Ok(out);
        }
    }
    Err(Error::NumericalFailure("no aligned pentagon drawn".into()))
}

/// `n` aligned pentagons cycling through all five aligned labels.
pub fn aligned_pentagon_family<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Result<Vec<PentagonConfig>> {
    (0..n).map(|i| random_aligned_pentagon(rng, i % 5)).collect()
}
