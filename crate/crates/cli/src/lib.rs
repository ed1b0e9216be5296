use std::fmt;
use std::io::{self, Write};
use std::path::PathBuf;

use clap::{Parser, ValueEnum};
use hyperflat::covariance::{catalan_check, sigma_matrix_full, sigma_matrix_rank_one, CovMatrix};
use hyperflat::limitlaw::{
    cf_exponent_quadrature_with, cf_std, cumulant_raw, cumulant_scan, cumulant_std, density,
    esseen_parts, sigma2, uniform_grid, y_density, InversionRule, InversionSpec,
};
use hyperflat::rates::{minmax_solve, rate_curve, rate_profile, w_variance_order};
use hyperflat::simulate::{ks_distance, sample_f1, sample_yr, sample_z, SampleBatch};
use hyperflat::special::QuadSpec;
use hyperflat::{Error, ModelParams};
use serde::Serialize;
use serde_json::{json, Value};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_INADMISSIBLE: i32 = 3;
pub const EXIT_NUMERIC: i32 = 4;

/// Environment variable holding the default worker count.
pub const THREADS_ENV: &str = "HYPERFLAT_THREADS";

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Cumulants,
    Cf,
    Density,
    SimulateZ,
    SimulateF1,
    KsConvergence,
    Covariance,
    Rates,
    CatalanCheck,
    CumulantScan,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::Cumulants => "cumulants",
            Command::Cf => "cf",
            Command::Density => "density",
            Command::SimulateZ => "simulate-z",
            Command::SimulateF1 => "simulate-f1",
            Command::KsConvergence => "ks-convergence",
            Command::Covariance => "covariance",
            Command::Rates => "rates",
            Command::CatalanCheck => "catalan-check",
            Command::CumulantScan => "cumulant-scan",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum RuleArg {
    LeftPoint,
    Trapezoid,
}

#[derive(Parser, Debug)]
#[command(name = "hyperflat", about = "Limit laws for flat processes in hyperbolic space", version)]
struct Args {
    command: Command,
    /// Ambient dimension. For cumulant-scan: largest d of the k = d-1 scan (default 15).
    #[arg(long)]
    d: Option<u32>,
    /// Flat dimension.
    #[arg(long)]
    k: Option<u32>,
    /// Intersection order.
    #[arg(long)]
    m: Option<u32>,
    /// Radius; repeat for several.
    #[arg(long = "r")]
    r: Vec<f64>,
    #[arg(long = "T", default_value_t = 10.0)]
    t: f64,
    #[arg(long = "M", default_value_t = 200)]
    grid_points: usize,
    #[arg(long = "N", default_value_t = 26)]
    series_order: u32,
    #[arg(long, value_enum, default_value_t = RuleArg::LeftPoint)]
    rule: RuleArg,
    /// Sample count.
    #[arg(long, default_value_t = 100_000)]
    n: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    threads: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[arg(long, default_value_t = 1e-14)]
    abs_tol: f64,
    #[arg(long, default_value_t = 1e-12)]
    rel_tol: f64,
    /// Truncation radius of the Z sampler.
    #[arg(long, default_value_t = 12.0)]
    t_trunc: f64,
    /// Highest cumulant order (cumulants) or the order scanned (cumulant-scan).
    #[arg(long)]
    order: Option<u32>,
    /// Density grid in units of the standardised variable.
    #[arg(long, default_value_t = -8.0, allow_hyphen_values = true)]
    x_min: f64,
    #[arg(long, default_value_t = 14.0, allow_hyphen_values = true)]
    x_max: f64,
    #[arg(long, default_value_t = 0.01)]
    x_step: f64,
}

/// Fully resolved run configuration; every field is echoed in the output.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub command: Command,
    #[serde(flatten)]
    pub params: Option<ModelParams>,
    #[serde(skip)]
    pub spec: InversionSpec,
    #[serde(skip)]
    pub quad: QuadSpec,
    pub radii: Vec<f64>,
    pub n: usize,
    pub seed: u64,
    pub t_trunc: f64,
    pub order: u32,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub d_max: Option<u32>,
    pub x_grid: [f64; 3],
    pub format: Format,
    #[serde(skip)]
    pub threads: Option<usize>,
    #[serde(skip)]
    pub out_path: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for CliError {}

impl CliError {
    fn usage(message: impl Into<String>) -> Self {
        CliError { code: EXIT_USAGE, message: message.into() }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Admissibility { .. } | Error::Regime { .. } => EXIT_INADMISSIBLE,
            Error::Domain { .. } => EXIT_USAGE,
            Error::Convergence { .. } | Error::Consistency(_) => EXIT_NUMERIC,
        };
        CliError { code, message: e.to_string() }
    }
}

fn needs_limit_law(c: Command) -> bool {
    matches!(
        c,
        Command::Cumulants
            | Command::Cf
            | Command::Density
            | Command::SimulateZ
            | Command::KsConvergence
            | Command::Rates
    )
}

pub fn parse_args<I, T>(argv: I) -> Result<RunConfig, CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let a = Args::try_parse_from(argv).map_err(|e| CliError {
        code: if e.use_stderr() { EXIT_USAGE } else { EXIT_OK },
        message: e.to_string(),
    })?;
    let cmd = a.command;
    let params = match cmd {
        Command::CatalanCheck | Command::CumulantScan => None,
        _ => {
            let (Some(d), Some(k)) = (a.d, a.k) else {
                return Err(CliError::usage(format!("{} requires --d and --k", cmd.name())));
            };
            let p = ModelParams::with_order(d, k, a.m)?;
            if needs_limit_law(cmd) {
                p.require_supercritical()?;
            }
            Some(p)
        }
    };
    let spec = InversionSpec::new(a.t, a.grid_points, a.series_order)?.with_rule(match a.rule {
        RuleArg::LeftPoint => InversionRule::LeftPoint,
        RuleArg::Trapezoid => InversionRule::Trapezoid,
    });
    let quad = QuadSpec::new(a.abs_tol, a.rel_tol, QuadSpec::default().max_subdivisions)?;
    if a.r.iter().any(|r| !(r.is_finite() && *r > 0.0)) {
        return Err(CliError::usage("--r values must be positive"));
    }
    if a.n < 4 {
        return Err(CliError::usage("--n must be at least 4"));
    }
    if !(a.x_step > 0.0 && a.x_max > a.x_min) {
        return Err(CliError::usage("density grid needs x-min < x-max and x-step > 0"));
    }
    if a.threads == Some(0) {
        return Err(CliError::usage("--threads must be positive"));
    }
    let radii = if a.r.is_empty() {
        match cmd {
            Command::SimulateF1 => vec![3.0],
            Command::KsConvergence => vec![4.0, 6.0, 8.0],
            Command::Covariance => vec![10.0],
            Command::Rates => (1..=20).map(f64::from).collect(),
            _ => vec![],
        }
    } else {
        a.r
    };
    let order = a.order.unwrap_or(if cmd == Command::CumulantScan { 3 } else { 10 });
    if order < 2 {
        return Err(CliError::usage("--order must be at least 2"));
    }
    let d_max = (cmd == Command::CumulantScan).then(|| a.d.unwrap_or(15));
    if d_max.is_some_and(|d| d < 5) {
        return Err(CliError::usage("cumulant-scan needs --d >= 5"));
    }
    let threads = match a.threads {
        Some(t) => Some(t),
        None => match std::env::var(THREADS_ENV) {
            Ok(v) => Some(v.trim().parse().ok().filter(|&t: &usize| t > 0).ok_or_else(|| {
                CliError::usage(format!("{THREADS_ENV} must be a positive integer, got {v:?}"))
            })?),
            Err(_) => None,
        },
    };
    Ok(RunConfig {
        command: cmd,
        params,
        spec,
        quad,
        radii,
        n: a.n,
        seed: a.seed,
        t_trunc: a.t_trunc,
        order,
        d_max,
        x_grid: [a.x_min, a.x_max, a.x_step],
        format: a.format,
        threads,
        out_path: a.out,
    })
}

/// Result of a command: the JSON payload and its CSV rendering.
struct Output {
    json: Value,
    csv: Csv,
}

struct Csv {
    header: &'static [&'static str],
    rows: Vec<Vec<Cell>>,
}

enum Cell {
    Num(f64),
    Int(i64),
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Num(x) => fmt_f64(*x),
            Cell::Int(i) => i.to_string(),
        }
    }
}

/// 17 significant digits; non-finite values become an empty field in CSV.
fn fmt_f64(x: f64) -> String {
    if !x.is_finite() {
        return String::new();
    }
    format!("{x:.16e}")
}

struct Sig17;

impl serde_json::ser::Formatter for Sig17 {
    fn write_f64<W: ?Sized + Write>(&mut self, w: &mut W, value: f64) -> io::Result<()> {
        w.write_all(format!("{value:.16e}").as_bytes())
    }
}

pub fn to_json_string(v: &Value) -> String {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, Sig17);
    v.serialize(&mut ser).expect("serialising a Value cannot fail");
    String::from_utf8(buf).expect("json is utf-8")
}

fn table_rows<const N: usize>(cols: [&[f64]; N]) -> Vec<Vec<Cell>> {
    (0..cols[0].len()).map(|i| cols.iter().map(|c| Cell::Num(c[i])).collect()).collect()
}

fn samples_output(b: &SampleBatch) -> Result<Output, Error> {
    Ok(Output {
        json: json!({ "kind": b.kind, "r_or_t": b.r_or_t, "options": b.options, "stats": b.stats()?, "values": b.values }),
        csv: Csv { header: &["value"], rows: table_rows([&b.values]) },
    })
}

fn cov_output(m: &CovMatrix, extra: Value) -> Output {
    let mut rows = Vec::new();
    for (i, row) in m.entries.iter().enumerate() {
        for (j, v) in row.iter().enumerate() {
            rows.push(vec![Cell::Int(i as i64), Cell::Int(j as i64), Cell::Num(*v), Cell::Int(m.rank as i64)]);
        }
    }
    Output {
        json: json!({ "matrix": m, "details": extra }),
        csv: Csv { header: &["row", "col", "value", "rank"], rows },
    }
}

fn execute(cfg: &RunConfig) -> Result<Output, Error> {
    let p = cfg.params;
    let req = || p.expect("parse_args guarantees parameters for this command");
    Ok(match cfg.command {
        Command::Cumulants => {
            let p = req();
            let mut rows = Vec::new();
            let mut list = Vec::new();
            for n in 2..=cfg.order {
                let (raw, std) = (cumulant_raw(n, &p)?, cumulant_std(n, &p)?);
                list.push(json!({ "n": n, "raw": raw, "standardized": std }));
                rows.push(vec![Cell::Int(n.into()), Cell::Num(raw), Cell::Num(std)]);
            }
            Output {
                json: json!({ "sigma2": sigma2(&p)?, "cumulants": list }),
                csv: Csv { header: &["n", "raw", "standardized"], rows },
            }
        }
        Command::Cf => {
            let p = req();
            let m = cfg.spec.grid_points as i64;
            let ts: Vec<f64> = (-m..=m).map(|j| cfg.spec.truncation * j as f64 / m as f64).collect();
            let (mut sr, mut si, mut qr, mut qi) = (vec![], vec![], vec![], vec![]);
            for &t in &ts {
                let s = cf_std(t, &p, &cfg.spec)?;
                let q = cf_exponent_quadrature_with(t, &p, &cfg.quad)?.exp();
                sr.push(s.re);
                si.push(s.im);
                qr.push(q.re);
                qi.push(q.im);
            }
            let diff = (0..ts.len()).map(|i| (sr[i] - qr[i]).hypot(si[i] - qi[i])).fold(0.0, f64::max);
            Output {
                json: json!({
                    "t": ts, "series_re": sr, "series_im": si,
                    "quadrature_re": qr, "quadrature_im": qi, "max_abs_difference": diff
                }),
                csv: Csv {
                    header: &["t", "series_re", "series_im", "quadrature_re", "quadrature_im"],
                    rows: table_rows([&ts, &sr, &si, &qr, &qi]),
                },
            }
        }
        Command::Density => {
            let p = req();
            let [lo, hi, step] = cfg.x_grid;
            let t = density(&p, &cfg.spec, &uniform_grid(lo, hi, step))?;
            Output {
                json: json!({
                    "x": t.xs, "f": t.f, "cdf": t.cdf,
                    "integral": t.integral(), "mean": t.mean(), "variance": t.variance(),
                    "max_imag_residue": t.max_imag_residue,
                    "residue_within_tolerance": t.residue_within_tolerance(),
                }),
                csv: Csv { header: &["x", "f", "cdf"], rows: table_rows([&t.xs, &t.f, &t.cdf]) },
            }
        }
        Command::SimulateZ => samples_output(&sample_z(cfg.t_trunc, &req(), cfg.seed, cfg.n)?)?,
        Command::SimulateF1 => samples_output(&sample_f1(cfg.radii[0], &req(), cfg.seed, cfg.n)?)?,
        Command::KsConvergence => {
            let p = req();
            let [lo, hi, _] = cfg.x_grid;
            let y = y_density(&p, &cfg.spec, &uniform_grid(lo, hi, 0.005))?;
            let (mut ks, mut bound) = (vec![], vec![]);
            for &r in &cfg.radii {
                let b = sample_yr(r, &p, cfg.seed, cfg.n)?;
                ks.push(ks_distance(&b.values, |x| y.cdf_at(x))?);
                bound.push(esseen_parts(r, &p, cfg.spec.truncation, &y)?.total);
            }
            let slope = log_slope(&cfg.radii, &ks);
            Output {
                json: json!({ "r": cfg.radii, "ks": ks, "esseen_bound": bound, "log_ks_slope": slope }),
                csv: Csv { header: &["r", "ks", "esseen_bound"], rows: table_rows([&cfg.radii, &ks, &bound]) },
            }
        }
        Command::Covariance => {
            let p = req();
            if p.d == 2 * p.k {
                let m = sigma_matrix_full(p.k)?;
                cov_output(&m, json!({ "form": "full" }))
            } else {
                let c = sigma_matrix_rank_one(&p, cfg.radii[0])?;
                cov_output(
                    &c.matrix,
                    json!({ "form": "rank_one", "lambda": c.lambda, "lambda_band": c.lambda_band, "note": c.note }),
                )
            }
        }
        Command::Rates => {
            let p = req();
            let curve = rate_curve(&p, &cfg.radii)?;
            let rs: Vec<f64> = curve.iter().map(|c| c.r).collect();
            let bs: Vec<f64> = curve.iter().map(|c| c.bound).collect();
            let prof = rate_profile(p.d, p.k)?;
            Output {
                json: json!({
                    "beta": prof.beta, "alpha_star": prof.alpha_star, "profile": prof,
                    "minmax": minmax_solve(p.d, p.k)?, "w_variance_order": w_variance_order(p.d, p.k)?,
                    "curve": curve,
                }),
                csv: Csv { header: &["r", "bound"], rows: table_rows([&rs, &bs]) },
            }
        }
        Command::CatalanCheck => {
            let rep = catalan_check()?;
            let mut rows = Vec::new();
            for i in 0..2 {
                for j in 0..2 {
                    rows.push(vec![
                        Cell::Int(i),
                        Cell::Int(j),
                        Cell::Num(rep.computed[i as usize][j as usize]),
                        Cell::Num(rep.expected[i as usize][j as usize]),
                    ]);
                }
            }
            Output {
                json: json!({ "G": rep.catalan, "report": rep, "max_rel_error": rep.max_rel_error }),
                csv: Csv { header: &["row", "col", "computed", "expected"], rows },
            }
        }
        Command::CumulantScan => {
            let pairs: Vec<ModelParams> =
                (5..=cfg.d_max.unwrap_or(15)).map(|d| ModelParams::new(d, d - 1)).collect::<Result<_, _>>()?;
            let scan = cumulant_scan(cfg.order, &pairs)?;
            let increasing = scan.windows(2).all(|w| w[1].value > w[0].value);
            let rows = scan
                .iter()
                .map(|r| vec![Cell::Int(r.d.into()), Cell::Int(r.k.into()), Cell::Int(r.n.into()), Cell::Num(r.value)])
                .collect();
            Output {
                json: json!({ "rows": scan, "strictly_increasing": increasing }),
                csv: Csv { header: &["d", "k", "n", "value"], rows },
            }
        }
    })
}

fn log_slope(rs: &[f64], ks: &[f64]) -> Option<f64> {
    if rs.len() < 2 || ks.iter().any(|&k| !(k > 0.0)) {
        return None;
    }
    let n = rs.len() as f64;
    let mr = rs.iter().sum::<f64>() / n;
    let ml = ks.iter().map(|k| k.ln()).sum::<f64>() / n;
    let sxx: f64 = rs.iter().map(|r| (r - mr).powi(2)).sum();
    let sxy: f64 = rs.iter().zip(ks).map(|(r, k)| (r - mr) * (k.ln() - ml)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

fn git_describe() -> &'static str {
    option_env!("HYPERFLAT_GIT_DESCRIBE").unwrap_or("unknown")
}

fn envelope(cfg: &RunConfig, results: Value, error: Option<String>) -> Value {
    let mut v = json!({
        "params": cfg,
        "spec": { "inversion": cfg.spec, "quadrature": cfg.quad },
        "git_describe": git_describe(),
        "results": results,
    });
    if let Some(e) = error {
        v["error"] = Value::String(e);
    }
    v
}

fn render(cfg: &RunConfig, out: &Output) -> String {
    match cfg.format {
        Format::Json => to_json_string(&envelope(cfg, out.json.clone(), None)) + "\n",
        Format::Csv => {
            let mut s = out.csv.header.join(",");
            s.push('\n');
            for row in &out.csv.rows {
                s.push_str(&row.iter().map(Cell::render).collect::<Vec<_>>().join(","));
                s.push('\n');
            }
            s
        }
    }
}

fn emit(cfg: &RunConfig, text: &str) -> Result<(), CliError> {
    match &cfg.out_path {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| CliError::usage(format!("cannot write {}: {e}", path.display()))),
        None => {
            let mut so = io::stdout().lock();
            so.write_all(text.as_bytes()).and_then(|_| so.flush()).map_err(|e| CliError {
                code: EXIT_USAGE,
                message: format!("cannot write output: {e}"),
            })
        }
    }
}

/// Executes the command, writes its artifact and returns the exit code.
/// Numerical failures still produce a JSON envelope carrying the diagnostics.
pub fn run(cfg: &RunConfig) -> Result<i32, CliError> {
    let result = match cfg.threads {
        Some(t) => rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build()
            .map_err(|e| CliError::usage(format!("cannot start {t} worker threads: {e}")))?
            .install(|| execute(cfg)),
        None => execute(cfg),
    };
    match result {
        Ok(out) => {
            emit(cfg, &render(cfg, &out))?;
            Ok(EXIT_OK)
        }
        Err(e) if e.is_numerical() => {
            let diag = to_json_string(&envelope(cfg, Value::Null, Some(e.to_string()))) + "\n";
            emit(cfg, &diag)?;
            Err(CliError { code: EXIT_NUMERIC, message: e.to_string() })
        }
        Err(e) => Err(e.into()),
    }
}

/// Parses, runs and reports; returns the process exit code.
pub fn main_with_args<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match parse_args(argv).and_then(|cfg| run(&cfg)) {
        Ok(code) => code,
        Err(e) if e.code == EXIT_OK => {
            print!("{}", e.message);
            EXIT_OK
        }
        Err(e) => {
            eprintln!("hyperflat: {}", e.message.trim_end());
            e.code
        }
    }
}
