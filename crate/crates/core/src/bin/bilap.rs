use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use bilap::cap::{self, CapSpec};
use bilap::harmonic::mu;
use bilap::harness::{self, HarnessConfig};
use bilap::ritz::{self, BasisKind, ProblemKind, ProblemSpec, SolveOptions};
use bilap::wentzell;

const EXIT_CHECK: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_NONCONVERGED: u8 = 3;

#[derive(Parser)]
#[command(name = "bilap", version, about = "Bi-Laplace eigenvalue laboratory on balls and caps")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Flat key=value file; flags override its entries.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker thread cap.
    #[arg(long, global = true)]
    jobs: Option<usize>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Table,
}

#[derive(Subcommand)]
enum Command {
    /// Closed-form Wentzell spectrum on the unit ball.
    Spectrum(SpectrumArgs),
    /// Rayleigh-Ritz solve of a ball problem with a degree sweep.
    Solve(SolveArgs),
    /// Collocation solve on a geodesic cap.
    Cap(CapArgs),
    /// Run the bound-verification report.
    Verify(VerifyArgs),
    /// Exact certificates for Wentzell eigenfunctions.
    Certify(CertifyArgs),
}

#[derive(Args)]
struct SpectrumArgs {
    #[arg(long)]
    n: Option<String>,
    #[arg(long)]
    beta: Option<String>,
    #[arg(long)]
    kmax: Option<String>,
}

#[derive(Args)]
struct SolveArgs {
    /// p, q, xi, wentzell, gamma, lambda, clamped, buckling, lap-dirichlet, lap-neumann
    #[arg(long)]
    problem: Option<String>,
    #[arg(long)]
    n: Option<String>,
    #[arg(long)]
    degree: Option<String>,
    #[arg(long)]
    radius: Option<String>,
    #[arg(long)]
    beta: Option<String>,
    /// harmonic or monomial
    #[arg(long)]
    basis: Option<String>,
}

#[derive(Args)]
struct CapArgs {
    #[arg(long)]
    n: Option<String>,
    /// 1, 0 or -1
    #[arg(long, allow_hyphen_values = true)]
    curvature: Option<String>,
    /// Geodesic radius; a trailing `pi` multiplies by pi (e.g. 0.5pi).
    #[arg(long)]
    theta: Option<String>,
    #[arg(long)]
    nodes: Option<String>,
    #[arg(long)]
    ell_max: Option<String>,
}

#[derive(Args)]
struct VerifyArgs {
    /// Dimensions, comma separated.
    #[arg(long)]
    n: Option<String>,
    #[arg(long)]
    degree: Option<String>,
    /// Betas, comma separated.
    #[arg(long)]
    beta: Option<String>,
    /// Radii, comma separated.
    #[arg(long)]
    radius: Option<String>,
    #[arg(long)]
    nodes: Option<String>,
    #[arg(long)]
    ell_max: Option<String>,
    #[arg(long)]
    tol_eq: Option<String>,
    #[arg(long)]
    tol_strict: Option<String>,
}

#[derive(Args)]
struct CertifyArgs {
    #[arg(long)]
    n: Option<String>,
    #[arg(long)]
    beta: Option<String>,
    #[arg(long)]
    kmax: Option<String>,
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Solver(String),
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

/// Merged settings: config file entries overridden by flags.
struct Settings {
    map: BTreeMap<String, String>,
}

impl Settings {
    fn get<T: std::str::FromStr>(&self, key: &str, default: T) -> Result<T, Failure> {
        match self.map.get(key) {
            None => Ok(default),
            Some(v) => v
                .trim()
                .parse()
                .map_err(|_| Failure::Usage(format!("bad value {v:?} for {key}"))),
        }
    }

    fn check_keys(&self, allowed: &[&str]) -> Result<(), Failure> {
        for k in self.map.keys() {
            if !allowed.contains(&k.as_str()) && !GLOBAL_KEYS.contains(&k.as_str()) {
                return Err(Failure::Usage(format!("unknown setting {k:?} for this command")));
            }
        }
        Ok(())
    }
}

const GLOBAL_KEYS: [&str; 4] = ["format", "out", "seed", "jobs"];

fn normalize(key: &str) -> String {
    key.trim().replace('_', "-")
}

fn settings(cli: &Cli, flags: Vec<(&str, Option<String>)>) -> Result<Settings, Failure> {
    let mut map = BTreeMap::new();
    if let Some(path) = &cli.config {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))?;
        let pairs = HarnessConfig::parse_pairs(&text).map_err(|e| Failure::Usage(e.to_string()))?;
        for (k, v) in pairs {
            map.insert(normalize(&k), v);
        }
    }
    let globals = [
        ("seed", cli.seed.map(|s| s.to_string())),
        ("jobs", cli.jobs.map(|j| j.to_string())),
    ];
    for (k, v) in flags.into_iter().chain(globals) {
        if let Some(v) = v {
            map.insert(k.to_string(), v);
        }
    }
    Ok(Settings { map })
}

fn format_of(cli: &Cli, s: &Settings) -> Result<Format, Failure> {
    if let Some(f) = cli.format {
        return Ok(f);
    }
    match s.map.get("format").map(|v| v.trim().to_ascii_lowercase()) {
        None => Ok(Format::Table),
        Some(v) => Format::from_str(&v, true).map_err(|_| Failure::Usage(format!("bad format {v:?}"))),
    }
}

fn out_path(cli: &Cli, s: &Settings) -> Option<PathBuf> {
    cli.out.clone().or_else(|| s.map.get("out").map(PathBuf::from))
}

fn emit(text: &str, out: Option<PathBuf>) -> Result<(), Failure> {
    match out {
        Some(p) => std::fs::write(&p, text).map_err(|e| Failure::Usage(format!("cannot write {}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

fn csv_rows(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for r in rows {
        w.write_record(r).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("flush")).expect("utf8")
}

fn table(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut widths: Vec<usize> = header.iter().map(|h| h.len()).collect();
    for r in rows {
        for (w, c) in widths.iter_mut().zip(r) {
            *w = (*w).max(c.len());
        }
    }
    let mut out = String::new();
    let line = |cells: Vec<&str>, out: &mut String| {
        let parts: Vec<String> = cells
            .iter()
            .zip(&widths)
            .map(|(c, w)| format!("{c:>w$}"))
            .collect();
        let _ = writeln!(out, "{}", parts.join("  ").trim_end());
    };
    line(header.to_vec(), &mut out);
    for r in rows {
        line(r.iter().map(String::as_str).collect(), &mut out);
    }
    out
}

fn render(format: Format, header: &[&str], rows: &[Vec<String>], whole: impl Serialize) -> String {
    match format {
        Format::Json => json(&whole),
        Format::Csv => csv_rows(header, rows),
        Format::Table => table(header, rows),
    }
}

fn parse_theta(s: &str) -> Result<f64, Failure> {
    let t = s.trim();
    let bad = || Failure::Usage(format!("bad theta {s:?}"));
    if let Some(mult) = t.strip_suffix("pi") {
        let m = mult.trim().trim_end_matches('*');
        let m: f64 = if m.is_empty() { 1.0 } else { m.parse().map_err(|_| bad())? };
        Ok(m * PI)
    } else {
        t.parse().map_err(|_| bad())
    }
}

fn with_jobs<T: Send>(jobs: Option<usize>, f: impl FnOnce() -> T + Send) -> T {
    match jobs.filter(|&j| j > 0) {
        Some(j) => match rayon::ThreadPoolBuilder::new().num_threads(j).build() {
            Ok(pool) => pool.install(f),
            Err(_) => f(),
        },
        None => f(),
    }
}

fn spectrum(cli: &Cli, a: &SpectrumArgs) -> Result<u8, Failure> {
    let s = settings(cli, vec![("n", a.n.clone()), ("beta", a.beta.clone()), ("kmax", a.kmax.clone())])?;
    s.check_keys(&["n", "beta", "kmax"])?;
    let n: usize = s.get("n", 3)?;
    let beta: f64 = s.get("beta", 0.0)?;
    let kmax: u32 = s.get("kmax", 5)?;
    bilap::poly::check_dim(n).map_err(|e| Failure::Usage(e.to_string()))?;
    if !(beta.is_finite() && beta >= 0.0) {
        return Err(Failure::Usage(format!("beta must be nonnegative, got {beta}")));
    }
    #[derive(Serialize)]
    struct Row {
        k: u32,
        eigenvalue: f64,
        exact: String,
        multiplicity: u64,
    }
    let beta_q = bilap::poly::rational_from_f64(beta);
    let data: Vec<Row> = (0..=kmax)
        .map(|k| Row {
            k,
            eigenvalue: wentzell::eigenvalue(n, beta, k),
            exact: wentzell::eigenvalue_exact(n, &beta_q, k).to_string(),
            multiplicity: mu(n, k),
        })
        .collect();
    let rows: Vec<Vec<String>> = data
        .iter()
        .map(|r| vec![r.k.to_string(), r.exact.clone(), r.multiplicity.to_string()])
        .collect();
    let text = render(
        format_of(cli, &s)?,
        &["k", "eigenvalue", "multiplicity"],
        &rows,
        serde_json::json!({"n": n, "beta": beta, "rows": data}),
    );
    emit(&text, out_path(cli, &s))?;
    Ok(0)
}

fn solve(cli: &Cli, a: &SolveArgs) -> Result<u8, Failure> {
    let s = settings(
        cli,
        vec![
            ("problem", a.problem.clone()),
            ("n", a.n.clone()),
            ("degree", a.degree.clone()),
            ("radius", a.radius.clone()),
            ("beta", a.beta.clone()),
            ("basis", a.basis.clone()),
        ],
    )?;
    s.check_keys(&["problem", "n", "degree", "radius", "beta", "basis"])?;
    let kind: ProblemKind = s
        .get::<String>("problem", "p".into())?
        .parse()
        .map_err(|e: ritz::RitzError| Failure::Usage(e.to_string()))?;
    let n: usize = s.get("n", 3)?;
    let degree: u32 = s.get("degree", 10)?;
    let spec = ProblemSpec::new(kind, n)
        .with_degree(degree)
        .with_radius(s.get("radius", 1.0)?)
        .with_beta(s.get("beta", 0.0)?);
    spec.validate().map_err(|e| Failure::Usage(e.to_string()))?;
    let basis = match s.get::<String>("basis", "harmonic".into())?.to_ascii_lowercase().as_str() {
        "harmonic" => BasisKind::Harmonic,
        "monomial" => BasisKind::Monomial,
        other => return Err(Failure::Usage(format!("unknown basis {other:?}"))),
    };
    let opts = SolveOptions {
        basis,
        ..SolveOptions::default()
    };
    let jobs = s.get::<usize>("jobs", 0)?;
    let (result, sweep) = with_jobs(Some(jobs), || {
        let r = ritz::solve_with(&spec, &opts)?;
        let sweep = ritz::degree_sweep(&spec, kind.min_degree()..=degree, &opts)?;
        Ok::<_, ritz::RitzError>((r, sweep))
    })
    .map_err(|e| Failure::Solver(e.to_string()))?;
    #[derive(Serialize)]
    struct Dump<'a> {
        #[serde(flatten)]
        result: &'a ritz::SpectralResult,
        degree_sweep: &'a [ritz::SweepPoint],
    }
    let rows: Vec<Vec<String>> = result
        .modes
        .iter()
        .enumerate()
        .map(|(i, m)| {
            vec![
                (i + 1).to_string(),
                format!("{:.12}", m.value),
                m.multiplicity.to_string(),
                serde_json::to_value(m.block).map(|v| v.to_string()).unwrap_or_default(),
            ]
        })
        .collect();
    let format = format_of(cli, &s)?;
    let mut text = render(
        format,
        &["index", "eigenvalue", "multiplicity", "block"],
        &rows,
        Dump {
            result: &result,
            degree_sweep: &sweep,
        },
    );
    if format == Format::Table {
        let sweep_rows: Vec<Vec<String>> = sweep
            .iter()
            .map(|p| vec![p.degree.to_string(), format!("{:.12}", p.first)])
            .collect();
        let _ = write!(
            text,
            "\n{kind} n={n} R={} deflation_rank={} constraint_residual={:e}\n\n{}",
            spec.radius,
            result.deflation_rank,
            result.constraint_residual,
            table(&["degree", "first"], &sweep_rows)
        );
    }
    emit(&text, out_path(cli, &s))?;
    Ok(0)
}

fn cap_cmd(cli: &Cli, a: &CapArgs) -> Result<u8, Failure> {
    let s = settings(
        cli,
        vec![
            ("n", a.n.clone()),
            ("curvature", a.curvature.clone()),
            ("theta", a.theta.clone()),
            ("nodes", a.nodes.clone()),
            ("ell-max", a.ell_max.clone()),
        ],
    )?;
    s.check_keys(&["n", "curvature", "theta", "nodes", "ell-max"])?;
    let theta = match s.map.get("theta") {
        Some(t) => parse_theta(t)?,
        None => PI / 2.0,
    };
    let spec = CapSpec {
        n: s.get("n", 3)?,
        curvature: s.get("curvature", 1)?,
        theta,
        ell_max: s.get("ell-max", 3)?,
        nodes: s.get("nodes", 64)?,
    };
    spec.validate().map_err(|e| Failure::Usage(e.to_string()))?;
    let r = with_jobs(Some(s.get("jobs", 0)?), || cap::solve(&spec)).map_err(|e| Failure::Solver(e.to_string()))?;
    let rows: Vec<Vec<String>> = r
        .per_ell
        .iter()
        .map(|t| {
            let first = |v: &[f64]| v.first().map_or("-".into(), |x| format!("{x:.12}"));
            vec![t.ell.to_string(), first(&t.lambda), first(&t.gamma), first(&t.lambda_big)]
        })
        .collect();
    let format = format_of(cli, &s)?;
    let mut text = render(format, &["ell", "lambda", "gamma", "lambda_big"], &rows, &r);
    if format == Format::Table {
        let _ = writeln!(
            text,
            "\nlambda1={:.12} gamma1={:.12} lambda_big1={:.12} converged={} change={:e}",
            r.lambda1, r.gamma1, r.lambda_big1, r.converged, r.refinement_change
        );
    }
    emit(&text, out_path(cli, &s))?;
    Ok(if r.converged { 0 } else { EXIT_NONCONVERGED })
}

fn verify(cli: &Cli, a: &VerifyArgs) -> Result<u8, Failure> {
    let s = settings(
        cli,
        vec![
            ("n", a.n.clone()),
            ("degree", a.degree.clone()),
            ("beta", a.beta.clone()),
            ("radius", a.radius.clone()),
            ("nodes", a.nodes.clone()),
            ("ell-max", a.ell_max.clone()),
            ("tol-eq", a.tol_eq.clone()),
            ("tol-strict", a.tol_strict.clone()),
        ],
    )?;
    let mut cfg = HarnessConfig::default();
    for (k, v) in &s.map {
        if k == "format" || k == "out" {
            continue;
        }
        cfg.set(k, v).map_err(|e| Failure::Usage(e.to_string()))?;
    }
    if cfg.dims.is_empty() || cfg.dims.iter().any(|&n| bilap::poly::check_dim(n).is_err()) {
        return Err(Failure::Usage(format!("bad dimensions {:?}", cfg.dims)));
    }
    let report = harness::run_all(&cfg);
    let text = match format_of(cli, &s)? {
        Format::Json => format!("{}\n", report.to_json()),
        Format::Csv => report.to_csv(),
        Format::Table => {
            let rows: Vec<Vec<String>> = report
                .checks
                .iter()
                .map(|c| {
                    vec![
                        c.id.clone(),
                        format!("{:.10}", c.lhs),
                        format!("{:.10}", c.rhs),
                        format!("{:.3e}", c.margin),
                        serde_json::to_value(c.expect)
                            .ok()
                            .and_then(|v| v.as_str().map(String::from))
                            .unwrap_or_default(),
                        if c.pass { "pass".into() } else { "FAIL".into() },
                    ]
                })
                .collect();
            let mut t = table(&["id", "lhs", "rhs", "margin", "expect", "result"], &rows);
            let _ = writeln!(t, "\n{} passed, {} failed", report.passed, report.failed);
            t
        }
    };
    emit(&text, out_path(cli, &s))?;
    Ok(if report.any_nonconverged() {
        EXIT_NONCONVERGED
    } else if report.all_pass() {
        0
    } else {
        EXIT_CHECK
    })
}

fn certify(cli: &Cli, a: &CertifyArgs) -> Result<u8, Failure> {
    let s = settings(cli, vec![("n", a.n.clone()), ("beta", a.beta.clone()), ("kmax", a.kmax.clone())])?;
    s.check_keys(&["n", "beta", "kmax"])?;
    let n: usize = s.get("n", 3)?;
    let beta: f64 = s.get("beta", 0.0)?;
    let kmax: u32 = s.get("kmax", 5)?;
    let records = wentzell::certify_all(n, beta, kmax).map_err(|e| Failure::Usage(e.to_string()))?;
    let rows: Vec<Vec<String>> = records
        .iter()
        .map(|r| {
            vec![
                r.k.to_string(),
                r.sigma.to_string(),
                r.pde_residual.clone(),
                r.neumann_residual.clone(),
                r.wentzell_residual.clone(),
                r.valid.to_string(),
                r.u.clone(),
            ]
        })
        .collect();
    let text = render(
        format_of(cli, &s)?,
        &["k", "sigma", "pde", "neumann", "wentzell", "valid", "u"],
        &rows,
        &records,
    );
    emit(&text, out_path(cli, &s))?;
    Ok(if records.iter().all(|r| r.valid) { 0 } else { EXIT_CHECK })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Spectrum(a) => spectrum(&cli, a),
        Command::Solve(a) => solve(&cli, a),
        Command::Cap(a) => cap_cmd(&cli, a),
        Command::Verify(a) => verify(&cli, a),
        Command::Certify(a) => certify(&cli, a),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_USAGE)
        }
        Err(Failure::Solver(msg)) => {
            eprintln!("solver error: {msg}");
            ExitCode::from(if msg.contains("converge") { EXIT_NONCONVERGED } else { EXIT_CHECK })
        }
    }
}
