//! `linkforge`: equilibria and charge control of 4-bar and equilateral 5-bar
//! linkages from the command line.
//!
//! Exit codes: 0 success, 1 reproduction or assertion mismatch, 2 invalid
//! input, 3 numerical failure.

mod commands;
mod report;
mod spec;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use commands::{Failure, Status};
use spec::{Command, ConventionArg, Format, KindArg, RunSpec};

const SEED_ENV: &str = "LINKFORGE_SEED";

#[derive(Parser, Debug)]
#[command(name = "linkforge", version, about = "Equilibria and Coulomb control of planar linkages")]
struct Cli {
    /// Read the whole run from a JSON RunSpec instead of flags.
    #[arg(long, global = true, value_name = "FILE")]
    spec: Option<PathBuf>,
    /// RNG seed; falls back to the run spec file, then to LINKFORGE_SEED, then 0.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Output file (census: path stem for the .csv and .json pair).
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
    #[command(subcommand)]
    command: Option<Cmd>,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// 4-bar linkage solvers.
    #[command(subcommand)]
    Quad(QuadCmd),
    /// Moduli-space data for plotting.
    #[command(subcommand)]
    Oval(OvalCmd),
    /// Equilateral 5-bar linkage solvers.
    #[command(subcommand)]
    Pentagon(PentagonCmd),
    /// Recompute the 6, 6.5, 6.2, 5.8 example and compare with its table.
    #[command(name = "reproduce-example1")]
    ReproduceExample1 {
        #[arg(long, value_enum)]
        convention: Option<ConventionArg>,
        #[arg(long)]
        samples: Option<usize>,
    },
    /// Count critical points over random linkages and charges.
    Census {
        #[arg(long)]
        trials: Option<usize>,
        /// Fixed sides instead of random ones.
        #[arg(long, value_delimiter = ',', num_args = 1..)]
        sides: Option<Vec<f64>>,
        /// Fixed charge instead of a random one.
        #[arg(long)]
        t: Option<f64>,
        #[arg(long, value_delimiter = ',', value_name = "LO,HI")]
        side_range: Option<Vec<f64>>,
        #[arg(long, value_delimiter = ',', value_name = "LO,HI")]
        charge_range: Option<Vec<f64>>,
        #[arg(long, default_value = "coulomb")]
        kind: KindArg,
        #[arg(long, value_enum)]
        convention: Option<ConventionArg>,
        #[arg(long)]
        samples: Option<usize>,
    },
}

#[derive(Args, Debug)]
struct QuadArgs {
    /// Side lengths a,b,c,d.
    #[arg(long, value_delimiter = ',', num_args = 1.., required = true)]
    sides: Vec<f64>,
    /// Which vertex carries t.
    #[arg(long, value_enum)]
    convention: Option<ConventionArg>,
    /// coulomb, log or alpha:<a>.
    #[arg(long, default_value = "coulomb")]
    kind: KindArg,
    /// Oval samples used to bracket critical points.
    #[arg(long)]
    samples: Option<usize>,
}

#[derive(Subcommand, Debug)]
enum QuadCmd {
    /// Critical points of the effective potential for charge t.
    Critical {
        #[command(flatten)]
        quad: QuadArgs,
        #[arg(long, allow_hyphen_values = true)]
        t: f64,
    },
    /// The charge that makes a convex target the global minimum.
    Stabilize {
        #[command(flatten)]
        quad: QuadArgs,
        /// Target diagonals x,y.
        #[arg(long, value_delimiter = ',', required = true)]
        target: Vec<f64>,
        /// Relative Cayley-Menger residual accepted for the target.
        #[arg(long)]
        tolerance: Option<f64>,
    },
    /// Two-stage navigation by gradient flow; random runs when no endpoints are given.
    Navigate {
        #[command(flatten)]
        quad: QuadArgs,
        #[arg(long, value_delimiter = ',')]
        start: Option<Vec<f64>>,
        #[arg(long, value_delimiter = ',')]
        target: Option<Vec<f64>>,
        #[arg(long)]
        runs: Option<usize>,
        #[arg(long)]
        tolerance: Option<f64>,
    },
}

#[derive(Subcommand, Debug)]
enum OvalCmd {
    /// Sampled oval as CSV.
    Trace {
        #[arg(long, value_delimiter = ',', num_args = 1.., required = true)]
        sides: Vec<f64>,
        #[arg(long)]
        samples: Option<usize>,
    },
}

#[derive(Args, Debug)]
struct PentagonArgs {
    /// Chart point x13,x35 on the convex branch.
    #[arg(long, value_delimiter = ',', conflicts_with = "vertices")]
    chart: Option<Vec<f64>>,
    /// Ten numbers x1,y1,...,x5,y5.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    vertices: Option<Vec<f64>>,
}

#[derive(Subcommand, Debug)]
enum PentagonCmd {
    /// The unique positive (s, t) that makes the shape critical.
    Stabilize {
        #[command(flatten)]
        shape: PentagonArgs,
    },
    /// Scaled gradient certificate for a given (s, t).
    Verify {
        #[command(flatten)]
        shape: PentagonArgs,
        #[arg(long, allow_hyphen_values = true)]
        s: f64,
        #[arg(long, allow_hyphen_values = true)]
        t: f64,
    },
    /// Multi-start search for a configuration of lower energy.
    Probe {
        #[command(flatten)]
        shape: PentagonArgs,
        #[arg(long)]
        s: Option<f64>,
        #[arg(long)]
        t: Option<f64>,
        #[arg(long)]
        seeds: Option<usize>,
    },
}

fn pair(v: Option<Vec<f64>>, name: &str) -> Result<Option<[f64; 2]>, Failure> {
    v.map(|v| {
        <[f64; 2]>::try_from(v.as_slice())
            .map_err(|_| Failure::Invalid(format!("--{name} takes two numbers, got {}", v.len())))
    })
    .transpose()
}

fn quad_spec(command: Command, q: QuadArgs) -> RunSpec {
    let mut s = RunSpec::new(command);
    s.sides = Some(q.sides);
    s.convention = q.convention.map(Into::into);
    s.kind = q.kind.0;
    s.samples = q.samples;
    s
}

fn pentagon_spec(command: Command, p: PentagonArgs) -> Result<RunSpec, Failure> {
    let mut s = RunSpec::new(command);
    s.target = pair(p.chart, "chart")?;
    if let Some(v) = p.vertices {
        if v.len() != 10 {
            return Err(Failure::Invalid(format!("--vertices takes 10 numbers, got {}", v.len())));
        }
        s.vertices = Some(v.chunks(2).map(|c| [c[0], c[1]]).collect());
    }
    Ok(s)
}

fn from_flags(cmd: Cmd) -> Result<RunSpec, Failure> {
    Ok(match cmd {
        Cmd::Quad(QuadCmd::Critical { quad, t }) => {
            let mut s = quad_spec(Command::QuadCritical, quad);
            s.t = Some(t);
            s
        }
        Cmd::Quad(QuadCmd::Stabilize { quad, target, tolerance }) => {
            let mut s = quad_spec(Command::QuadStabilize, quad);
            s.target = pair(Some(target), "target")?;
            s.tolerance = tolerance;
            s
        }
        Cmd::Quad(QuadCmd::Navigate { quad, start, target, runs, tolerance }) => {
            let mut s = quad_spec(Command::QuadNavigate, quad);
            s.start = pair(start, "start")?;
            s.target = pair(target, "target")?;
            s.count = runs;
            s.tolerance = tolerance;
            s
        }
        Cmd::Oval(OvalCmd::Trace { sides, samples }) => {
            let mut s = RunSpec::new(Command::OvalTrace);
            s.sides = Some(sides);
            s.samples = samples;
            s.format = Format::Csv;
            s
        }
        Cmd::Pentagon(PentagonCmd::Stabilize { shape }) => pentagon_spec(Command::PentagonStabilize, shape)?,
        Cmd::Pentagon(PentagonCmd::Verify { shape, s: sv, t }) => {
            let mut s = pentagon_spec(Command::PentagonVerify, shape)?;
            s.s = Some(sv);
            s.t = Some(t);
            s
        }
        Cmd::Pentagon(PentagonCmd::Probe { shape, s: sv, t, seeds }) => {
            let mut s = pentagon_spec(Command::PentagonProbe, shape)?;
            s.s = sv;
            s.t = t;
            s.count = seeds;
            s
        }
        Cmd::ReproduceExample1 { convention, samples } => {
            let mut s = RunSpec::new(Command::ReproduceExample1);
            s.convention = convention.map(Into::into);
            s.samples = samples;
            s
        }
        Cmd::Census { trials, sides, t, side_range, charge_range, kind, convention, samples } => {
            let mut s = RunSpec::new(Command::Census);
            s.count = trials;
            s.sides = sides;
            s.t = t;
            s.side_range = pair(side_range, "side-range")?;
            s.charge_range = pair(charge_range, "charge-range")?;
            s.kind = kind.0;
            s.convention = convention.map(Into::into);
            s.samples = samples;
            s
        }
    })
}

fn env_seed() -> Result<Option<u64>, Failure> {
    match std::env::var(SEED_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map(Some)
            .map_err(|_| Failure::Invalid(format!("{SEED_ENV}={v} is not an unsigned integer"))),
        Err(_) => Ok(None),
    }
}

fn resolve(cli: Cli) -> Result<RunSpec, Failure> {
    let mut spec = match (cli.spec, cli.command) {
        (Some(path), None) => {
            let text = std::fs::read_to_string(&path)
                .map_err(|e| Failure::Invalid(format!("{}: {e}", path.display())))?;
            serde_json::from_str::<RunSpec>(&text)
                .map_err(|e| Failure::Invalid(format!("{}: {e}", path.display())))?
        }
        (None, Some(cmd)) => from_flags(cmd)?,
        (Some(_), Some(_)) => return Err(Failure::Invalid("--spec replaces the subcommand; give one or the other".into())),
        (None, None) => return Err(Failure::Invalid("a subcommand or --spec is required".into())),
    };
    if cli.seed.is_some() {
        spec.seed = cli.seed;
    }
    if let Some(f) = cli.format {
        spec.format = f;
    }
    if cli.output.is_some() {
        spec.output = cli.output;
    }
    Ok(spec.resolve(env_seed()?))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = resolve(cli).and_then(|spec| commands::run(&spec));
    match outcome {
        Ok(Status::Ok) => ExitCode::SUCCESS,
        Ok(Status::Mismatch(msg)) => {
            eprintln!("mismatch: {msg}");
            ExitCode::from(1)
        }
        Ok(Status::Numerical(msg)) => {
            eprintln!("numerical failure: {msg}");
            ExitCode::from(3)
        }
        Err(f) => {
            eprintln!("error: {f}");
            ExitCode::from(f.exit_code() as u8)
        }
    }
}
