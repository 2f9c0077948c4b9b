use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use slicelab::boundary::{make_grid, trace, BoundaryGrid};
use slicelab::idempotents::{verify_idempotent_bounded, IdempotentSpec};
use slicelab::subspaces::{
    cyclicity_residual, default_depth, inner_outer_factorize, wandering_vector, CyclicityVerdict, FactorOptions,
};
use slicelab::suites::{format_table, run_suite, Suite, SuiteConfig};
use slicelab::{Error, Quaternion, SliceLaurentSeries, Support};

/// Star-product algebra and Hardy-space tools for quaternionic slice functions.
#[derive(Parser, Debug)]
#[command(name = "slicelab", version)]
struct Cli {
    #[command(flatten)]
    config: Config,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Config {
    /// Largest admissible |n| in any support.
    #[arg(long, global = true, env = "SLICELAB_MAX_DEGREE", default_value_t = 256)]
    max_degree: i64,
    /// Residual tolerance, in (0, 1e-2).
    #[arg(long, global = true, env = "SLICELAB_TOL", default_value_t = 1e-8)]
    tol: f64,
    /// Number of sphere parameters t in (0, pi).
    #[arg(long, global = true, env = "SLICELAB_GRID_T", default_value_t = 128)]
    grid_t: usize,
    /// Number of imaginary units per sphere.
    #[arg(long, global = true, env = "SLICELAB_GRID_SPHERE", default_value_t = 256)]
    grid_sphere: usize,
    /// Shift depth for subspace computations; chosen from the input when omitted.
    #[arg(long, global = true, env = "SLICELAB_DEPTH")]
    depth: Option<usize>,
    /// Seed for the verification suites.
    #[arg(long, global = true, env = "SLICELAB_SEED", default_value_t = 0)]
    seed: u64,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Star product f * g.
    Star {
        f: PathBuf,
        g: PathBuf,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Coefficientwise quaternion conjugate f^c.
    Conj {
        f: PathBuf,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Symmetrization f^s = f^c * f.
    Sym {
        f: PathBuf,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Truncated star inverse, exact through index `order`.
    Inv {
        f: PathBuf,
        #[arg(long, default_value_t = 64)]
        order: i64,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Value f(q) at a quaternion given as w,x,y,z.
    Eval {
        f: PathBuf,
        #[arg(long, value_parser = parse_quaternion, allow_hyphen_values = true)]
        at: Quaternion,
    },
    /// Idempotency residuals of a series on the boundary grid.
    IdemVerify {
        f: PathBuf,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Builds an idempotent series from a sphere-behaviour spec.
    IdemBuild {
        spec: PathBuf,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Inner-outer factorization f = phi * g; writes the report JSON.
    Factor {
        f: PathBuf,
        #[arg(short, long)]
        out: Option<PathBuf>,
        /// Also print a one-line summary to stderr.
        #[arg(long)]
        report: bool,
    },
    /// Wandering vector of the shift-invariant subspace spanned by the generators.
    Wander {
        #[arg(required = true)]
        generators: Vec<PathBuf>,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Distance from 1 to the shift span of g, with a verdict.
    Cyclic { g: PathBuf },
    /// Boundary values as CSV in t-major, sphere-minor order.
    Trace {
        f: PathBuf,
        #[arg(short, long)]
        out: Option<PathBuf>,
        /// Grid as NTxNSPHERE, overriding --grid-t and --grid-sphere.
        #[arg(long, value_parser = parse_grid)]
        grid: Option<(usize, usize)>,
    },
    /// Runs the verification suites and prints a pass/fail table.
    Verify { suite: SuiteName },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum SuiteName {
    Algebra,
    Adjoint,
    Isometry,
    Idempotent,
    Beurling,
    Factorization,
    All,
}

impl SuiteName {
    fn suites(self) -> Vec<Suite> {
        match self {
            SuiteName::Algebra => vec![Suite::Algebra],
            SuiteName::Adjoint => vec![Suite::Adjoint],
            SuiteName::Isometry => vec![Suite::Isometry],
            SuiteName::Idempotent => vec![Suite::Idempotent],
            SuiteName::Beurling => vec![Suite::Beurling],
            SuiteName::Factorization => vec![Suite::Factorization],
            SuiteName::All => Suite::ALL.to_vec(),
        }
    }
}

enum Failure {
    Usage(String),
    Core(Error),
    Residual(String),
    Verify(usize),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

impl Failure {
    fn exit_code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 2,
            Failure::Core(Error::SupportOverflow { .. }) => 3,
            Failure::Core(Error::FactorizationResidual(_)) | Failure::Residual(_) => 4,
            Failure::Core(Error::DoublyInvariant) => 5,
            Failure::Core(_) => 2,
            Failure::Verify(_) => 6,
        }
    }

    fn message(&self) -> String {
        match self {
            Failure::Usage(m) | Failure::Residual(m) => m.clone(),
            Failure::Core(e) => e.to_string(),
            Failure::Verify(n) => format!("{n} checks failed"),
        }
    }
}

type CliResult = Result<(), Failure>;

fn parse_quaternion(s: &str) -> Result<Quaternion, String> {
    let parts: Vec<f64> =
        s.split(',').map(|p| p.trim().parse::<f64>().map_err(|e| format!("{p:?}: {e}"))).collect::<Result<_, _>>()?;
    match parts[..] {
        [w, x, y, z] => Ok(Quaternion::new(w, x, y, z)),
        _ => Err(format!("expected four comma-separated numbers, got {}", parts.len())),
    }
}

fn parse_grid(s: &str) -> Result<(usize, usize), String> {
    let (a, b) = s.split_once('x').ok_or_else(|| format!("expected NTxNSPHERE, got {s:?}"))?;
    let a = a.parse().map_err(|e| format!("{a:?}: {e}"))?;
    let b = b.parse().map_err(|e| format!("{b:?}: {e}"))?;
    Ok((a, b))
}

impl Config {
    fn validate(&self) -> CliResult {
        if self.max_degree <= 0 {
            return Err(Failure::Usage(format!("max_degree must be positive, got {}", self.max_degree)));
        }
        if !(self.tol > 0.0 && self.tol < 1e-2) {
            return Err(Failure::Usage(format!("tol must lie in (0, 1e-2), got {}", self.tol)));
        }
        if self.depth == Some(0) {
            return Err(Failure::Usage("depth must be positive".into()));
        }
        Ok(())
    }

    fn grid(&self) -> Result<BoundaryGrid, Failure> {
        Ok(make_grid(self.grid_t, self.grid_sphere)?)
    }

    fn factor_options(&self) -> Result<FactorOptions, Failure> {
        Ok(FactorOptions {
            depth: self.depth,
            max_degree: self.max_degree,
            reconstruction_tol: self.tol,
            grid: self.grid()?,
            ..FactorOptions::default()
        })
    }
}

fn read_series(path: &Path, max_degree: i64) -> Result<SliceLaurentSeries, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    let f = SliceLaurentSeries::from_json(&text).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    f.check_limit(max_degree)?;
    Ok(f)
}

fn emit(out: Option<&Path>, text: &str) -> CliResult {
    let mut body = text.to_string();
    if !body.ends_with('\n') {
        body.push('\n');
    }
    match out {
        Some(p) => fs::write(p, body).map_err(|e| Failure::Usage(format!("{}: {e}", p.display()))),
        None => io::stdout().write_all(body.as_bytes()).map_err(|e| Failure::Usage(e.to_string())),
    }
}

fn run(cli: Cli) -> CliResult {
    let cfg = &cli.config;
    cfg.validate()?;
    let m = cfg.max_degree;
    match &cli.command {
        Command::Star { f, g, out } => {
            let r = read_series(f, m)?.star_bounded(&read_series(g, m)?, m)?;
            emit(out.as_deref(), &r.to_json())
        }
        Command::Conj { f, out } => emit(out.as_deref(), &read_series(f, m)?.conjugate().to_json()),
        Command::Sym { f, out } => emit(out.as_deref(), &read_series(f, m)?.symmetrize_bounded(m)?.to_json()),
        Command::Inv { f, order, out } => {
            let r = read_series(f, m)?.star_inverse_bounded(Support::new(0, (*order).max(0)), m)?;
            emit(out.as_deref(), &r.to_json())
        }
        Command::Eval { f, at } => {
            let v = read_series(f, m)?.evaluate(*at)?;
            emit(None, &serde_json::to_string(&v).expect("quaternion serialization"))
        }
        Command::IdemVerify { f, out } => {
            let rep = verify_idempotent_bounded(&read_series(f, m)?, &cfg.grid()?, m)?;
            let body = json!({
                "pointwise": rep.pointwise,
                "periodic_coefficient": rep.periodic_coefficient,
                "linear_coefficient": rep.linear_coefficient,
                "residual": rep.residual(),
                "tol": cfg.tol,
            });
            emit(out.as_deref(), &serde_json::to_string_pretty(&body).expect("report serialization"))?;
            if rep.residual() >= cfg.tol {
                return Err(Failure::Residual(format!(
                    "idempotency residual {:e} exceeds tol {:e}",
                    rep.residual(),
                    cfg.tol
                )));
            }
            Ok(())
        }
        Command::IdemBuild { spec, out } => {
            let text = fs::read_to_string(spec).map_err(|e| Failure::Usage(format!("{}: {e}", spec.display())))?;
            let spec = IdempotentSpec::from_json(&text).map_err(|e| Failure::Usage(e.to_string()))?;
            let fit = spec.build(cfg.grid_t)?;
            fit.series.check_limit(m)?;
            eprintln!("fit residual off the fit slice: {:e}", fit.slice_residual);
            emit(out.as_deref(), &fit.series.to_json())
        }
        Command::Factor { f, out, report } => {
            let f = read_series(f, m)?;
            let (rep, failure) = match inner_outer_factorize(&f, &cfg.factor_options()?) {
                Ok(r) => (r, None),
                Err(Error::FactorizationResidual(r)) => {
                    let msg = format!("factorization residuals out of tolerance: {}", r.summary());
                    (*r, Some(Failure::Residual(msg)))
                }
                Err(e) => return Err(e.into()),
            };
            emit(out.as_deref(), &rep.to_json())?;
            if *report {
                eprintln!("{}", rep.summary());
            }
            failure.map_or(Ok(()), Err)
        }
        Command::Wander { generators, out } => {
            let gens: Vec<SliceLaurentSeries> =
                generators.iter().map(|p| read_series(p, m)).collect::<Result<_, _>>()?;
            let depth = cfg.depth.unwrap_or_else(|| gens.iter().map(|g| default_depth(g, m)).max().unwrap_or(1));
            let top = gens.iter().map(|g| g.n_max().max(0)).max().unwrap_or(0);
            Support::new(0, top + depth as i64).check_limit(m)?;
            emit(out.as_deref(), &wandering_vector(&gens, depth)?.to_json())
        }
        Command::Cyclic { g } => {
            let g = read_series(g, m)?;
            let depth = cfg.depth.unwrap_or_else(|| default_depth(&g, m));
            Support::new(0, g.n_max().max(0) + depth as i64).check_limit(m)?;
            let r = cyclicity_residual(&g, depth)?;
            let body = json!({ "residual": r, "depth": depth, "verdict": CyclicityVerdict::from_residual(r) });
            emit(None, &serde_json::to_string_pretty(&body).expect("report serialization"))
        }
        Command::Trace { f, out, grid } => {
            let f = read_series(f, m)?;
            let grid = match grid {
                Some((a, b)) => make_grid(*a, *b)?,
                None => cfg.grid()?,
            };
            let mut w = csv::Writer::from_writer(Vec::new());
            let csv_err = |e: csv::Error| Failure::Usage(e.to_string());
            w.write_record(["t", "Ix", "Iy", "Iz", "fw", "fx", "fy", "fz", "abs"]).map_err(csv_err)?;
            for row in trace(&f, &grid) {
                let [x, y, z] = row.unit;
                let v = row.value;
                let fields = [row.t, x, y, z, v.w, v.x, v.y, v.z, row.abs()];
                w.write_record(fields.iter().map(|x| x.to_string())).map_err(csv_err)?;
            }
            let bytes = w.into_inner().map_err(|e| Failure::Usage(e.to_string()))?;
            emit(out.as_deref(), std::str::from_utf8(&bytes).expect("csv is utf-8"))
        }
        Command::Verify { suite } => {
            let scfg = SuiteConfig {
                seed: cfg.seed,
                tol: cfg.tol,
                grid_t: cfg.grid_t,
                grid_sphere: cfg.grid_sphere,
                max_degree: m,
                depth: cfg.depth,
            };
            let mut checks = Vec::new();
            for s in suite.suites() {
                checks.extend(run_suite(s, &scfg)?);
            }
            emit(None, &format_table(&checks))?;
            match checks.iter().filter(|c| !c.passed).count() {
                0 => Ok(()),
                n => Err(Failure::Verify(n)),
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.exit_code())
        }
    }
}
