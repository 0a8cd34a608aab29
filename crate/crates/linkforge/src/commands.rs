//! One function per command. Each writes its report and returns the status
//! that decides the exit code.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use linkforge_core::geometry::{classify_quad, reconstruct_pentagon, reconstruct_quad_with_tolerance, Point};
use linkforge_core::pentagon_control::{
    global_min_probe, mixed_sign_consistency, stabilize_pentagon, verify_critical, MixedSignReport, ProbeReport,
    ProbeVerdict, StabilizingPair, CERTIFICATE_TOL,
};
use linkforge_core::quad_control::{census, ChargeSampler, CriticalPoint, FlowTrace, LinkageSampler, MorseType};
use linkforge_core::sampling::{random_convex_quad, random_quad_config};
use linkforge_core::{
    ChargeValue, Error, Linkage, PentagonBranches, PentagonConfig, QuadConfig, QuadController, QuadConvention,
    QuadRegion,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::report;
use crate::spec::{Command, Format, RunSpec};

/// How a run ended once its report is written.
#[derive(Debug, PartialEq)]
pub enum Status {
    Ok,
    /// A reproduction or assertion did not hold (exit 1).
    Mismatch(String),
    /// The computation ran but did not converge (exit 3).
    Numerical(String),
}

/// Why a run produced no report.
#[derive(Debug)]
pub enum Failure {
    Invalid(String),
    Numerical(String),
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Invalid(_) => 2,
            Failure::Numerical(_) => 3,
        }
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Invalid(m) => write!(f, "invalid input: {m}"),
            Failure::Numerical(m) => write!(f, "numerical failure: {m}"),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::NumericalFailure(_)
            | Error::TangentVertical
            | Error::PoleHit
            | Error::MaxIterExceeded(_)
            | Error::QuadraticDegenerate => Failure::Numerical(e.to_string()),
            _ => Failure::Invalid(e.to_string()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Invalid(format!("i/o: {e}"))
    }
}

type Outcome = Result<Status, Failure>;

fn invalid(msg: impl Into<String>) -> Failure {
    Failure::Invalid(msg.into())
}

pub fn run(spec: &RunSpec) -> Outcome {
    match spec.command {
        Command::QuadCritical => quad_critical(spec),
        Command::QuadStabilize => quad_stabilize(spec),
        Command::QuadNavigate => quad_navigate(spec),
        Command::OvalTrace => oval_trace(spec),
        Command::PentagonStabilize => pentagon_stabilize(spec),
        Command::PentagonVerify => pentagon_verify(spec),
        Command::PentagonProbe => pentagon_probe(spec),
        Command::ReproduceExample1 => reproduce_example1(spec),
        Command::Census => run_census(spec),
    }
}

fn write<T: Serialize, R: Serialize>(spec: &RunSpec, result: &T, rows: &[R]) -> Result<(), Failure> {
    let text = match spec.format {
        Format::Json => report::json(spec, result)?,
        Format::Csv => report::csv(spec, rows)?,
    };
    report::emit(spec.output.as_deref(), &text)?;
    Ok(())
}

fn quad_linkage(spec: &RunSpec) -> Result<Linkage, Failure> {
    let sides = spec.sides.as_deref().ok_or_else(|| invalid("--sides is required"))?;
    if sides.len() != 4 {
        return Err(invalid(format!("a 4-bar linkage needs 4 sides, got {}", sides.len())));
    }
    Ok(Linkage::new(sides)?)
}

fn convention(spec: &RunSpec) -> QuadConvention {
    spec.convention.unwrap_or_default()
}

fn controller(spec: &RunSpec) -> Result<QuadController, Failure> {
    let mut c = QuadController::new(&quad_linkage(spec)?)?
        .with_convention(convention(spec))
        .with_kind(spec.kind);
    if let Some(n) = spec.samples {
        c = c.with_samples(n);
    }
    Ok(c)
}

fn required(value: Option<f64>, name: &str) -> Result<f64, Failure> {
    let v = value.ok_or_else(|| invalid(format!("--{name} is required")))?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(invalid(format!("--{name} must be finite")))
    }
}

fn quad_at(c: &QuadController, spec: &RunSpec, xy: [f64; 2]) -> Result<QuadConfig, Failure> {
    let tol = spec.tolerance.unwrap_or(crate::spec::DEFAULT_TOLERANCE);
    Ok(reconstruct_quad_with_tolerance(c.model().linkage(), xy[0], xy[1], tol)?)
}

#[derive(Serialize)]
struct CriticalRow {
    phi: f64,
    x: f64,
    y: f64,
    energy: f64,
    #[serde(rename = "type")]
    morse_type: &'static str,
    region: &'static str,
    signs: String,
    global_min: bool,
}

impl From<&CriticalPoint> for CriticalRow {
    fn from(p: &CriticalPoint) -> Self {
        Self {
            phi: p.phi,
            x: p.x,
            y: p.y,
            energy: p.energy,
            morse_type: p.morse_type.as_str(),
            region: p.region.as_str(),
            signs: p.signs.to_string(),
            global_min: p.is_global_min,
        }
    }
}

#[derive(Serialize)]
struct CriticalReport<'a> {
    count: usize,
    critical_points: &'a [CriticalPoint],
}

fn quad_critical(spec: &RunSpec) -> Outcome {
    let c = controller(spec)?;
    let t = required(spec.t, "t")?;
    let points = c.critical_points(t)?;
    let rows: Vec<CriticalRow> = points.iter().map(CriticalRow::from).collect();
    write(spec, &CriticalReport { count: points.len(), critical_points: &points }, &rows)?;
    Ok(Status::Ok)
}

#[derive(Serialize)]
struct StabilizeReport {
    target: [f64; 2],
    region: QuadRegion,
    t: ChargeValue,
    /// The target lies on the boundary of the convex region; `t` is the limit.
    boundary: bool,
    /// `max(|dx|, |dy|) / scale` between the target and the minimum for `t`.
    check_error: Option<f64>,
}

#[derive(Serialize)]
struct StabilizeRow {
    x: f64,
    y: f64,
    region: &'static str,
    t: String,
    boundary: bool,
    check_error: Option<f64>,
}

fn quad_stabilize(spec: &RunSpec) -> Outcome {
    let c = controller(spec)?;
    let target_xy = spec.target.ok_or_else(|| invalid("--target x,y is required"))?;
    let target = quad_at(&c, spec, target_xy)?;
    let region = classify_quad(&target)?;
    let (t, boundary) = match c.stabilize(&target) {
        Ok(t) => (ChargeValue::Finite(t), false),
        Err(Error::Boundary { limit }) => (limit, true),
        Err(e) => return Err(e.into()),
    };
    let check_error = match t {
        ChargeValue::Finite(t) if !boundary => {
            let back = c.charge_to_minimum(ChargeValue::Finite(t))?;
            let scale = c.model().diagonal_scale();
            Some((back.x() - target.x()).abs().max((back.y() - target.y()).abs()) / scale)
        }
        _ => None,
    };
    let report = StabilizeReport { target: target_xy, region, t, boundary, check_error };
    let row = StabilizeRow {
        x: target_xy[0],
        y: target_xy[1],
        region: region.as_str(),
        t: t.to_string(),
        boundary,
        check_error,
    };
    write(spec, &report, &[row])?;
    Ok(match check_error {
        Some(e) if e > 1e-6 => Status::Mismatch(format!("minimum for t = {t} misses the target by {e:e}")),
        _ => Status::Ok,
    })
}

#[derive(Serialize)]
struct NavigationRun {
    start: [f64; 2],
    target: [f64; 2],
    converged: bool,
    target_error: Option<f64>,
    trace: FlowTrace,
}

#[derive(Serialize)]
struct FlowRow {
    run: usize,
    stage: usize,
    t: f64,
    step: usize,
    phi: f64,
    x: f64,
    y: f64,
    energy: f64,
}

fn quad_navigate(spec: &RunSpec) -> Outcome {
    let c = controller(spec)?;
    let pairs: Vec<(QuadConfig, QuadConfig)> = match (spec.start, spec.target) {
        (Some(s), Some(t)) => vec![(quad_at(&c, spec, s)?, quad_at(&c, spec, t)?)],
        (None, None) => {
            let mut rng = ChaCha8Rng::seed_from_u64(spec.seed());
            let runs = spec.count.unwrap_or(20);
            (0..runs)
                .map(|_| {
                    let start = random_quad_config(&mut rng, c.model())?;
                    let target = random_convex_quad(&mut rng, c.model())?;
                    Ok((start, target))
                })
                .collect::<Result<_, Error>>()?
        }
        _ => return Err(invalid("give both --start and --target, or neither for random runs")),
    };
    let mut runs = Vec::with_capacity(pairs.len());
    for (start, target) in pairs {
        let trace = c.navigate(&start, &target)?;
        runs.push(NavigationRun {
            start: [start.x(), start.y()],
            target: [target.x(), target.y()],
            converged: trace.converged,
            target_error: trace.target_error,
            trace,
        });
    }
    let rows: Vec<FlowRow> = runs
        .iter()
        .enumerate()
        .flat_map(|(run, r)| {
            r.trace.stages.iter().enumerate().flat_map(move |(stage, s)| {
                s.iterates.iter().enumerate().map(move |(step, it)| FlowRow {
                    run,
                    stage,
                    t: s.t,
                    step,
                    phi: it.phi,
                    x: it.x,
                    y: it.y,
                    energy: it.energy,
                })
            })
        })
        .collect();
    write(spec, &runs, &rows)?;
    let stuck = runs.iter().filter(|r| !r.converged).count();
    Ok(if stuck == 0 {
        Status::Ok
    } else {
        Status::Numerical(format!("{stuck} of {} navigations did not converge", runs.len()))
    })
}

#[derive(Serialize)]
struct TraceRow {
    phi: f64,
    w: f64,
    z: f64,
    x: f64,
    y: f64,
    #[serde(rename = "sgn_Fx")]
    sgn_fx: char,
    #[serde(rename = "sgn_Fy")]
    sgn_fy: char,
    region: &'static str,
    g_residual: f64,
}

fn oval_trace(spec: &RunSpec) -> Outcome {
    let model = linkforge_core::moduli::build_oval(&quad_linkage(spec)?)?;
    let samples = spec.samples.unwrap_or(512);
    if samples == 0 {
        return Err(invalid("--samples must be positive"));
    }
    let rows = model
        .sample(samples)?
        .iter()
        .map(|p| {
            let cubic = model.cubic();
            Ok(TraceRow {
                phi: p.phi,
                w: p.w,
                z: p.z,
                x: p.x,
                y: p.y,
                sgn_fx: p.signs.fx.as_char(),
                sgn_fy: p.signs.fy.as_char(),
                region: model.region(p)?.as_str(),
                g_residual: cubic.eval(p.w, p.z).abs() / cubic.term_scale(p.w, p.z),
            })
        })
        .collect::<Result<Vec<_>, Error>>()?;
    write(spec, &rows, &rows)?;
    Ok(Status::Ok)
}

fn pentagon(spec: &RunSpec) -> Result<PentagonConfig, Failure> {
    match (&spec.vertices, spec.target) {
        (Some(v), None) => {
            let pts: [Point; 5] = v
                .iter()
                .map(|&[x, y]| Point::new(x, y))
                .collect::<Vec<_>>()
                .try_into()
                .map_err(|_| invalid(format!("a pentagon needs 5 vertices, got {}", v.len())))?;
            Ok(PentagonConfig::from_vertices(pts)?)
        }
        (None, Some([a, b])) => Ok(reconstruct_pentagon(a, b, PentagonBranches::CONVEX)?),
        _ => Err(invalid("give exactly one of --chart x13,x35 and --vertices")),
    }
}

#[derive(Serialize)]
struct PentagonReport {
    chart: (f64, f64),
    vertices: [Point; 5],
    pair: StabilizingPair,
    mixed_sign: MixedSignReport,
}

#[derive(Serialize)]
struct PairRow {
    x13: f64,
    x35: f64,
    s: f64,
    t: f64,
    certificate: f64,
    a: f64,
    b: f64,
    c: f64,
    s_neg: f64,
    t_neg: f64,
}

fn pentagon_stabilize(spec: &RunSpec) -> Outcome {
    let config = pentagon(spec)?;
    let pair = stabilize_pentagon(&config)?;
    let mixed_sign = mixed_sign_consistency(&config)?;
    let (x13, x35) = config.chart();
    let row = PairRow {
        x13,
        x35,
        s: pair.s,
        t: pair.t,
        certificate: pair.certificate,
        a: pair.a,
        b: pair.b,
        c: pair.c,
        s_neg: pair.s_neg,
        t_neg: pair.t_neg,
    };
    let report = PentagonReport { chart: config.chart(), vertices: config.unit_vertices(), pair, mixed_sign };
    write(spec, &report, &[row])?;
    Ok(Status::Ok)
}

#[derive(Serialize)]
struct VerifyReport {
    s: f64,
    t: f64,
    certificate: f64,
    tolerance: f64,
    critical: bool,
}

fn pentagon_verify(spec: &RunSpec) -> Outcome {
    let config = pentagon(spec)?;
    let (s, t) = (required(spec.s, "s")?, required(spec.t, "t")?);
    let certificate = verify_critical(&config, s, t)?;
    let critical = certificate <= CERTIFICATE_TOL;
    let report = VerifyReport { s, t, certificate, tolerance: CERTIFICATE_TOL, critical };
    write(spec, &report, &[&report])?;
    Ok(if critical {
        Status::Ok
    } else {
        Status::Mismatch(format!("not critical for (s, t) = ({s}, {t}): certificate {certificate:e}"))
    })
}

#[derive(Serialize)]
struct DescentRow {
    seed: usize,
    x13: f64,
    x35: f64,
    energy: f64,
    gradient_norm: f64,
    iterations: usize,
    stop: String,
}

fn pentagon_probe(spec: &RunSpec) -> Outcome {
    let config = pentagon(spec)?;
    let (s, t) = match (spec.s, spec.t) {
        (Some(s), Some(t)) => (s, t),
        (None, None) => {
            let pair = stabilize_pentagon(&config)?;
            (pair.s, pair.t)
        }
        _ => return Err(invalid("give both --s and --t, or neither to use the stabilizing pair")),
    };
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed());
    let report: ProbeReport = global_min_probe(&mut rng, &config, s, t, spec.count.unwrap_or(64))?;
    let rows: Vec<DescentRow> = report
        .descents
        .iter()
        .enumerate()
        .map(|(seed, d)| DescentRow {
            seed,
            x13: d.seed_chart.0,
            x35: d.seed_chart.1,
            energy: d.energy,
            gradient_norm: d.gradient_norm,
            iterations: d.iterations,
            stop: format!("{:?}", d.stop).to_lowercase(),
        })
        .collect();
    #[derive(Serialize)]
    struct Probe<'a> {
        s: f64,
        t: f64,
        #[serde(flatten)]
        report: &'a ProbeReport,
    }
    write(spec, &Probe { s, t, report: &report }, &rows)?;
    Ok(match report.verdict {
        ProbeVerdict::NoLowerFound => Status::Ok,
        ProbeVerdict::LowerFound { energy, .. } => Status::Mismatch(format!(
            "found energy {energy} below the target's {}",
            report.target_energy
        )),
    })
}

/// Tabulated critical points of the 6, 6.5, 6.2, 5.8 linkage at `t = 2`.
const EXAMPLE1_SIDES: [f64; 4] = [6.0, 6.5, 6.2, 5.8];
const EXAMPLE1_T: f64 = 2.0;
const EXAMPLE1_TABLE: [(f64, f64, f64, &str); 4] = [
    (0.50, 3.24, 2.61, "local min"),
    (4.11, 0.30, 6.90, "max"),
    (1.24, 0.58, 4.24, "local max"),
    (9.59, 7.60, 0.36, "global min"),
];
const LOCATION_TOL: f64 = 0.01;
const ENERGY_TOL: f64 = 0.03;

fn table_kind(kind: &str) -> MorseType {
    if kind.ends_with("min") {
        MorseType::Minimum
    } else {
        MorseType::Maximum
    }
}

fn point_kind(p: &CriticalPoint) -> &'static str {
    match (p.morse_type, p.is_global_min) {
        (MorseType::Minimum, true) => "global min",
        (MorseType::Minimum, false) => "local min",
        (MorseType::Maximum, _) => "max",
        (MorseType::Degenerate, _) => "degenerate",
    }
}

#[derive(Serialize)]
struct RowComparison {
    table: (f64, f64, f64, &'static str),
    nearest: Option<(f64, f64, f64, &'static str)>,
    dx: Option<f64>,
    dy: Option<f64>,
    de: Option<f64>,
    matches: bool,
}

#[derive(Serialize)]
struct ConventionSummary {
    convention: QuadConvention,
    count: usize,
    critical_points: Vec<(f64, f64, f64, &'static str)>,
    /// Largest distance from a tabulated location to the nearest critical point.
    location_error: f64,
}

#[derive(Serialize)]
struct Example1Report {
    convention: QuadConvention,
    samples: usize,
    pass: bool,
    rows: Vec<RowComparison>,
    conventions: Vec<ConventionSummary>,
    /// Largest gap between tabulated energies and `1/x + t/y`, `t/x + 1/y`
    /// evaluated at the tabulated locations.
    energy_gap_example1_form: f64,
    energy_gap_eq3_form: f64,
    /// Tabulated types in the cyclic order of their locations along the oval.
    table_types_in_oval_order: Vec<&'static str>,
    table_types_alternate: bool,
    diagnosis: Vec<String>,
}

fn compare_rows(points: &[CriticalPoint]) -> Vec<RowComparison> {
    EXAMPLE1_TABLE
        .iter()
        .map(|&(x, y, e, kind)| {
            let nearest = points.iter().min_by(|a, b| (a.x - x).hypot(a.y - y).total_cmp(&(b.x - x).hypot(b.y - y)));
            match nearest {
                None => RowComparison { table: (x, y, e, kind), nearest: None, dx: None, dy: None, de: None, matches: false },
                Some(p) => {
                    let (dx, dy, de) = (p.x - x, p.y - y, p.energy - e);
                    let got = point_kind(p);
                    let type_ok = got == kind || (kind == "local max" && got == "max");
                    RowComparison {
                        table: (x, y, e, kind),
                        nearest: Some((p.x, p.y, p.energy, got)),
                        dx: Some(dx),
                        dy: Some(dy),
                        de: Some(de),
                        matches: dx.abs() <= LOCATION_TOL
                            && dy.abs() <= LOCATION_TOL
                            && de.abs() <= ENERGY_TOL
                            && type_ok,
                    }
                }
            }
        })
        .collect()
}

fn reproduce_example1(spec: &RunSpec) -> Outcome {
    if let Some(sides) = &spec.sides {
        if sides.as_slice() != EXAMPLE1_SIDES {
            return Err(invalid("reproduce-example1 uses its own linkage; drop --sides"));
        }
    }
    let linkage = Linkage::new(&EXAMPLE1_SIDES)?;
    let samples = spec.samples.unwrap_or(linkforge_core::quad_control::DEFAULT_SAMPLES);
    let chosen = spec.convention.unwrap_or(QuadConvention::Example1);
    let make = |conv| -> Result<QuadController, Error> {
        Ok(QuadController::new(&linkage)?.with_convention(conv).with_kind(spec.kind).with_samples(samples))
    };

    let mut conventions = Vec::new();
    let mut chosen_points = Vec::new();
    for conv in [QuadConvention::Eq3, QuadConvention::Example1] {
        let points = make(conv)?.critical_points(EXAMPLE1_T)?;
        let location_error = EXAMPLE1_TABLE
            .iter()
            .map(|&(x, y, ..)| points.iter().map(|p| (p.x - x).hypot(p.y - y)).fold(f64::INFINITY, f64::min))
            .fold(0.0, f64::max);
        conventions.push(ConventionSummary {
            convention: conv,
            count: points.len(),
            critical_points: points.iter().map(|p| (p.x, p.y, p.energy, point_kind(p))).collect(),
            location_error,
        });
        if conv == chosen {
            chosen_points = points;
        }
    }
    let rows = compare_rows(&chosen_points);
    let pass = chosen_points.len() == 4 && rows.iter().all(|r| r.matches);

    let gap = |f: fn(f64, f64) -> f64| {
        EXAMPLE1_TABLE.iter().map(|&(x, y, e, _)| (f(x, y) - e).abs()).fold(0.0, f64::max)
    };
    let energy_gap_example1_form = gap(|x, y| 1.0 / x + EXAMPLE1_T / y);
    let energy_gap_eq3_form = gap(|x, y| EXAMPLE1_T / x + 1.0 / y);

    // cyclic order of the tabulated locations along the oval
    let model = make(QuadConvention::Eq3)?.model().clone();
    let trace = model.sample(4096)?;
    let mut ordered: Vec<(f64, &'static str)> = EXAMPLE1_TABLE
        .iter()
        .map(|&(x, y, _, kind)| {
            let phi = trace
                .iter()
                .min_by(|a, b| (a.x - x).hypot(a.y - y).total_cmp(&(b.x - x).hypot(b.y - y)))
                .map_or(0.0, |p| p.phi);
            (phi, kind)
        })
        .collect();
    ordered.sort_by(|a, b| a.0.total_cmp(&b.0));
    let table_types_in_oval_order: Vec<&'static str> = ordered.iter().map(|o| o.1).collect();
    let table_types_alternate = (0..ordered.len())
        .all(|i| table_kind(ordered[i].1) != table_kind(ordered[(i + 1) % ordered.len()].1));

    let mut diagnosis = Vec::new();
    for c in &conventions {
        diagnosis.push(format!(
            "{:?}: {} critical points, tabulated locations within {:.3} of one",
            c.convention, c.count, c.location_error
        ));
    }
    diagnosis.push(format!(
        "tabulated energies vs 1/x + t/y at tabulated locations: max gap {energy_gap_example1_form:.3}; \
         vs t/x + 1/y: max gap {energy_gap_eq3_form:.3}"
    ));
    if !table_types_alternate {
        diagnosis.push(format!(
            "tabulated types in oval order {table_types_in_oval_order:?} do not alternate, \
             which no smooth function on a closed curve allows"
        ));
    }

    let report = Example1Report {
        convention: chosen,
        samples,
        pass,
        rows,
        conventions,
        energy_gap_example1_form,
        energy_gap_eq3_form,
        table_types_in_oval_order,
        table_types_alternate,
        diagnosis,
    };
    let csv_rows: Vec<_> = report
        .rows
        .iter()
        .map(|r| ExampleRow {
            table_x: r.table.0,
            table_y: r.table.1,
            table_energy: r.table.2,
            table_type: r.table.3,
            x: r.nearest.map(|n| n.0),
            y: r.nearest.map(|n| n.1),
            energy: r.nearest.map(|n| n.2),
            computed_type: r.nearest.map(|n| n.3),
            dx: r.dx,
            dy: r.dy,
            de: r.de,
            matches: r.matches,
        })
        .collect();
    write(spec, &report, &csv_rows)?;
    for line in &report.diagnosis {
        eprintln!("{line}");
    }
    Ok(if pass {
        Status::Ok
    } else {
        let bad = report.rows.iter().filter(|r| !r.matches).count();
        Status::Mismatch(format!(
            "{:?} convention: {} critical points, {bad} of 4 table rows outside tolerance",
            chosen,
            chosen_points.len()
        ))
    })
}

#[derive(Serialize)]
struct ExampleRow {
    table_x: f64,
    table_y: f64,
    table_energy: f64,
    table_type: &'static str,
    x: Option<f64>,
    y: Option<f64>,
    energy: Option<f64>,
    computed_type: Option<&'static str>,
    dx: Option<f64>,
    dy: Option<f64>,
    de: Option<f64>,
    matches: bool,
}

#[derive(Serialize)]
struct CensusRow {
    trial: usize,
    sides: String,
    t: f64,
    count: usize,
    types: String,
}

#[derive(Serialize)]
struct CensusSummary<'a> {
    trials: usize,
    histogram: &'a BTreeMap<usize, usize>,
    max_count: usize,
    exceedances: &'a [usize],
    failures: &'a [linkforge_core::quad_control::CensusFailure],
}

fn join<T: ToString>(items: impl IntoIterator<Item = T>) -> String {
    items.into_iter().map(|i| i.to_string()).collect::<Vec<_>>().join(";")
}

fn run_census(spec: &RunSpec) -> Outcome {
    let [lo, hi] = spec.side_range.unwrap_or([1.0, 10.0]);
    let [tlo, thi] = spec.charge_range.unwrap_or([0.0, 10.0]);
    if !(lo > 0.0 && hi >= lo) {
        return Err(invalid(format!("bad side range [{lo}, {hi}]")));
    }
    if !(thi > tlo && tlo.is_finite() && thi.is_finite()) {
        return Err(invalid(format!("bad charge range ({tlo}, {thi}]")));
    }
    let linkages = match &spec.sides {
        Some(s) if s.len() == 4 => LinkageSampler::Fixed([s[0], s[1], s[2], s[3]]),
        Some(s) => return Err(invalid(format!("a 4-bar linkage needs 4 sides, got {}", s.len()))),
        None => LinkageSampler::Uniform { lo, hi },
    };
    let charges = match spec.t {
        Some(t) => ChargeSampler::Fixed(t),
        None => ChargeSampler::Uniform { lo: tlo, hi: thi },
    };
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed());
    let trials = spec.count.unwrap_or(1000);
    let result = census(
        &mut rng,
        &linkages,
        &charges,
        trials,
        spec.kind,
        convention(spec),
        spec.samples.unwrap_or(linkforge_core::quad_control::DEFAULT_SAMPLES),
    );
    let summary = CensusSummary {
        trials,
        histogram: &result.histogram,
        max_count: result.max_count(),
        exceedances: &result.exceedances,
        failures: &result.failures,
    };
    let rows: Vec<CensusRow> = result
        .trials
        .iter()
        .map(|t| CensusRow {
            trial: t.trial,
            sides: join(t.sides),
            t: t.t,
            count: t.count,
            types: join(t.types.iter().map(|m| m.as_str())),
        })
        .collect();
    match &spec.output {
        // both files next to each other
        Some(path) => {
            report::emit(Some(&with_ext(path, "json")), &report::json(spec, &summary)?)?;
            report::emit(Some(&with_ext(path, "csv")), &report::csv(spec, &rows)?)?;
        }
        None => write(spec, &summary, &rows)?,
    }
    if !result.exceedances.is_empty() {
        eprintln!(
            "!!! {} trials have more than four critical points: {:?}",
            result.exceedances.len(),
            result.exceedances
        );
    }
    Ok(Status::Ok)
}

fn with_ext(path: &Path, ext: &str) -> PathBuf {
    path.with_extension(ext)
}
