//! `lcw`: curvature obstructions to limiting Carleman weights from the
//! command line.
//!
//! Exit codes: 0 success, 2 bad input (arguments or metric document),
//! 3 evaluation failure, 4 optimizer failed on every start at some point
//! (the report is still written), 5 I/O failure.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use lcw_core::bivector::CurvatureOperator;
use lcw_core::curvature::CurvaturePackage;
use lcw_core::cy::{classify_cy, CottonYorkTensor, TOL_DET};
use lcw_core::dsl::{parse_metric, MetricSpec};
use lcw_core::eigenflag::{MinimizeOptions, TOL_EIGENFLAG};
use lcw_core::genericity::{grid_points, residual_statistics, scan_csv, scan_metric};
use lcw_core::json;
use lcw_core::perturbation::{perturb_curvature, solve_cy_target, AlgebraicCurvature, CutoffSpec};
use lcw_core::report::{obstruct, ObstructOptions};
use lcw_core::tensor::{Matrix, Tensor};
use lcw_core::Error;

#[derive(Parser)]
#[command(name = "lcw", version, about = "Curvature obstructions to limiting Carleman weights")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Curvature tensors of a metric at chart points.
    Curvature {
        metric: PathBuf,
        #[command(flatten)]
        at: PointArgs,
        #[arg(long, default_value_t = 1, allow_negative_numbers = true)]
        orientation: i8,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Eigenflag (n ≥ 4) or Cotton-York determinant (n = 3) test.
    Obstruct {
        metric: PathBuf,
        #[command(flatten)]
        at: PointArgs,
        #[command(flatten)]
        opts: TestArgs,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Flat-chart metric whose curvature at the origin is a given operator.
    Perturb {
        /// JSON document `{"dimension": n, "operator": [[...]]}`.
        curvature: PathBuf,
        /// Half-width of the chart box.
        #[arg(long, default_value_t = 0.5)]
        half_width: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Cubic perturbation of flat ℝ³ with a prescribed Cotton-York tensor at 0.
    SolveCy {
        /// Upper triangle `a11,a12,a13,a22,a23,a33`.
        #[arg(long, value_parser = parse_list, allow_hyphen_values = true)]
        target: List,
        #[arg(long, default_value_t = 0.5)]
        half_width: f64,
        #[arg(long, default_value_t = TOL_DET)]
        tol_det: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Eigenflag residuals of random unit Weyl operators.
    Sample {
        #[arg(long)]
        dimension: usize,
        #[arg(long, default_value_t = 100)]
        count: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        starts: Option<usize>,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Obstruction table over a grid of the chart domain.
    Scan {
        metric: PathBuf,
        #[arg(long, value_parser = parse_counts)]
        grid: Counts,
        #[command(flatten)]
        opts: TestArgs,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct PointArgs {
    /// Chart point `x1,..,xn`; repeatable. Defaults to the domain center.
    #[arg(long = "point", value_parser = parse_list, allow_hyphen_values = true)]
    points: Vec<List>,
    /// Per-axis counts `k1,..,kn` of a grid over the domain box.
    #[arg(long, value_parser = parse_counts, conflicts_with = "points")]
    grid: Option<Counts>,
}

#[derive(Args)]
struct TestArgs {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Low-discrepancy starts for the optimizer (default 8n).
    #[arg(long)]
    starts: Option<usize>,
    #[arg(long, default_value_t = TOL_EIGENFLAG)]
    tol_eigenflag: f64,
    #[arg(long, default_value_t = TOL_DET)]
    tol_det: f64,
    #[arg(long, default_value_t = 1, allow_negative_numbers = true)]
    orientation: i8,
}

impl TestArgs {
    fn options(&self) -> ObstructOptions {
        ObstructOptions {
            minimize: MinimizeOptions {
                starts: self.starts,
                seed: self.seed,
                tol_eigenflag: self.tol_eigenflag,
                ..MinimizeOptions::default()
            },
            tol_det: self.tol_det,
            orientation: self.orientation,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

/// Comma-separated reals.
#[derive(Clone, Debug)]
struct List(Vec<f64>);

/// Comma-separated counts.
#[derive(Clone, Debug)]
struct Counts(Vec<usize>);

fn parse_list(s: &str) -> Result<List, String> {
    s.split(',')
        .map(|x| x.trim().parse::<f64>().map_err(|e| format!("{x:?}: {e}")))
        .collect::<Result<_, _>>()
        .map(List)
}

fn parse_counts(s: &str) -> Result<Counts, String> {
    s.split(',')
        .map(|x| x.trim().parse::<usize>().map_err(|e| format!("{x:?}: {e}")))
        .collect::<Result<_, _>>()
        .map(Counts)
}

/// Failure with its exit-code class.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn input(message: impl Into<String>) -> Self {
        Failure { code: 2, message: message.into() }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Parse { .. } | Error::Schema(_) | Error::Asymmetric { .. } | Error::Json(_) => 2,
            Error::Io(_) => 5,
            _ => 3,
        };
        Failure { code, message: e.to_string() }
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure {
        code: 5,
        message: format!("cannot read {}: {e}", path.display()),
    })
}

fn load_metric(path: &Path) -> Result<MetricSpec, Failure> {
    let text = read(path)?;
    parse_metric(&text).map_err(|e| Failure {
        code: 2,
        message: format!("{}: {e}", path.display()),
    })
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), Failure> {
    match out {
        Some(p) => std::fs::write(p, text).map_err(|e| Failure {
            code: 5,
            message: format!("cannot write {}: {e}", p.display()),
        }),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn resolve_points(spec: &MetricSpec, at: &PointArgs) -> Result<Vec<Vec<f64>>, Failure> {
    let n = spec.dimension();
    let points = match &at.grid {
        Some(g) => grid_points(spec, &g.0).map_err(|e| Failure::input(e.to_string()))?,
        None if at.points.is_empty() => vec![spec.center()],
        None => at.points.iter().map(|p| p.0.clone()).collect(),
    };
    if let Some(p) = points.iter().find(|p| p.len() != n) {
        return Err(Failure::input(format!(
            "point {p:?} has {} coordinates, metric has dimension {n}",
            p.len()
        )));
    }
    Ok(points)
}

fn nested<const R: usize>(t: &Tensor<f64, R>) -> Value {
    fn build(data: &[f64], n: usize, depth: usize) -> Value {
        if depth == 1 {
            return json!(data);
        }
        let stride = data.len() / n;
        Value::Array((0..n).map(|i| build(&data[i * stride..(i + 1) * stride], n, depth - 1)).collect())
    }
    build(t.as_slice(), t.dim(), R)
}

fn curvature_summary(pkg: &CurvaturePackage<f64>) -> Value {
    let n = pkg.dimension();
    let c = &pkg.cotton;
    let mut antisym = 0.0f64;
    let mut cyclic = 0.0f64;
    let mut trace = 0.0f64;
    for i in 0..n {
        let mut tr = 0.0;
        for j in 0..n {
            tr += c[[i, j, j]];
            for k in 0..n {
                antisym = antisym.max((c[[i, j, k]] + c[[j, i, k]]).abs());
                cyclic = cyclic.max((c[[i, j, k]] + c[[j, k, i]] + c[[k, i, j]]).abs());
            }
        }
        trace = trace.max(tr.abs());
    }
    let mut v = json!({
        "point": pkg.point,
        "scalar": pkg.scalar,
        "norms": {
            "riemann": pkg.riemann.norm(),
            "ricci": pkg.ricci.norm(),
            "schouten": pkg.schouten.norm(),
            "weyl": pkg.weyl.norm(),
            "cotton": pkg.cotton.norm(),
        },
        "riemann": nested(&pkg.riemann),
        "ricci": nested(&pkg.ricci),
        "schouten": nested(&pkg.schouten),
        "weyl": nested(&pkg.weyl),
        "cotton": nested(&pkg.cotton),
        "cotton_symmetries": {
            "antisymmetry": antisym,
            "cyclic": cyclic,
            "trace": trace,
        },
    });
    if let Some(cy) = &pkg.cotton_york {
        v["norms"]["cotton_york"] = json!(cy.norm());
        v["cotton_york"] = nested(cy);
        v["cotton_york_determinant"] = json!(cy.determinant());
    }
    v
}

fn cmd_curvature(metric: &Path, at: &PointArgs, orientation: i8, out: Option<&Path>) -> Result<(), Failure> {
    let spec = load_metric(metric)?;
    let points = resolve_points(&spec, at)?;
    let results = points
        .iter()
        .map(|p| Ok(curvature_summary(&CurvaturePackage::compute(&spec, p, orientation)?)))
        .collect::<Result<Vec<_>, Error>>()?;
    let doc = json!({
        "name": spec.name,
        "dimension": spec.dimension(),
        "orientation": orientation,
        "frame": "orthonormal (Cholesky of g)",
        "results": results,
        "version": lcw_core::VERSION,
    });
    emit(out, &json::to_string(&doc)?)
}

fn cmd_obstruct(metric: &Path, at: &PointArgs, opts: &TestArgs, format: Format, out: Option<&Path>) -> Result<ExitCode, Failure> {
    let spec = load_metric(metric)?;
    let points = resolve_points(&spec, at)?;
    let report = obstruct(&spec, &points, &opts.options())?;
    let text = match format {
        Format::Json => json::to_string(&report)?,
        Format::Csv => {
            let rows: Vec<_> = report
                .points
                .iter()
                .map(|p| lcw_core::genericity::ScanRow {
                    point: p.point.clone(),
                    norm: p.norm,
                    obstruction: p.obstruction,
                    verdict: p.verdict.as_str().to_string(),
                })
                .collect();
            scan_csv(spec.dimension(), &rows)
        }
    };
    emit(out, &text)?;
    eprintln!("{}", report.headline);
    if report.optimizer_failed() {
        eprintln!("optimizer did not converge from any start at some point");
        return Ok(ExitCode::from(4));
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_perturb(path: &Path, half_width: f64, out: Option<&Path>) -> Result<(), Failure> {
    let text = read(path)?;
    let doc: Value = serde_json::from_str(&text).map_err(|e| Failure::input(format!("{}: {e}", path.display())))?;
    let n = doc["dimension"]
        .as_u64()
        .ok_or_else(|| Failure::input("missing integer field \"dimension\""))? as usize;
    if !(3..=8).contains(&n) {
        return Err(Error::Dimension(n).into());
    }
    let big = n * (n - 1) / 2;
    let op = match doc.get("operator") {
        None | Some(Value::Null) => CurvatureOperator::zeros(n),
        Some(v) => {
            let rows: Vec<Vec<f64>> =
                serde_json::from_value(v.clone()).map_err(|e| Failure::input(format!("operator: {e}")))?;
            if rows.len() != big || rows.iter().any(|r| r.len() != big) {
                return Err(Failure::input(format!("operator must be {big} × {big}")));
            }
            CurvatureOperator::from_matrix(n, Matrix::from_fn(big, |[a, b]| rows[a][b]))
        }
    };
    let r = AlgebraicCurvature::new(op).map_err(|e| Failure::input(e.to_string()))?;
    let metric = perturb_curvature(&r, &CutoffSpec::constant_one(n), half_width)?;
    emit(out, &json::to_string(&metric.to_spec()?.to_json())?)
}

fn cmd_solve_cy(target: &[f64], half_width: f64, tol_det: f64, out: Option<&Path>) -> Result<(), Failure> {
    let t: [f64; 6] = target
        .try_into()
        .map_err(|_| Failure::input("--target needs six values a11,a12,a13,a22,a23,a33"))?;
    let cy = CottonYorkTensor::from_upper(t).map_err(|e| Failure::input(e.to_string()))?;
    let sol = solve_cy_target(&cy, half_width)?;
    let doc = json!({
        "metric": sol.metric.to_spec()?.to_json(),
        "coefficients": sol.coefficients.as_slice(),
        "target": nested(cy.matrix()),
        "achieved": nested(sol.achieved.matrix()),
        "determinant": sol.achieved.determinant(),
        "classification": classify_cy(&sol.achieved, tol_det).as_str(),
        "version": lcw_core::VERSION,
    });
    emit(out, &json::to_string(&doc)?)
}

fn cmd_sample(n: usize, count: usize, seed: u64, starts: Option<usize>, format: Format, out: Option<&Path>) -> Result<(), Failure> {
    let opts = MinimizeOptions {
        starts,
        seed,
        ..MinimizeOptions::default()
    };
    let stats = residual_statistics(n, count, seed, &opts).map_err(|e| match e {
        Error::InvalidArgument(m) => Failure::input(m),
        e => e.into(),
    })?;
    let text = match format {
        Format::Json => json::to_string(&stats)?,
        Format::Csv => stats.to_csv(),
    };
    emit(out, &text)
}

fn cmd_scan(metric: &Path, grid: &[usize], opts: &TestArgs, format: Format, out: Option<&Path>) -> Result<(), Failure> {
    let spec = load_metric(metric)?;
    let rows = scan_metric(&spec, grid, &opts.options()).map_err(|e| match e {
        Error::InvalidArgument(m) => Failure::input(m),
        e => e.into(),
    })?;
    let text = match format {
        Format::Csv => scan_csv(spec.dimension(), &rows),
        Format::Json => json::to_string(&rows)?,
    };
    emit(out, &text)
}

fn run(cli: Cli) -> Result<ExitCode, Failure> {
    match cli.command {
        Command::Curvature { metric, at, orientation, out } => {
            cmd_curvature(&metric, &at, orientation, out.as_deref())?
        }
        Command::Obstruct { metric, at, opts, format, out } => {
            return cmd_obstruct(&metric, &at, &opts, format, out.as_deref())
        }
        Command::Perturb { curvature, half_width, out } => cmd_perturb(&curvature, half_width, out.as_deref())?,
        Command::SolveCy { target, half_width, tol_det, out } => {
            cmd_solve_cy(&target.0, half_width, tol_det, out.as_deref())?
        }
        Command::Sample { dimension, count, seed, starts, format, out } => {
            cmd_sample(dimension, count, seed, starts, format, out.as_deref())?
        }
        Command::Scan { metric, grid, opts, format, out } => cmd_scan(&metric, &grid.0, &opts, format, out.as_deref())?,
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
