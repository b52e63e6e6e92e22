//! Bound verification on model geometries.
//!
//! Each check compares a left side against a right side with one of three
//! expectations and records which solver produced every number. Ball values
//! come from [`crate::ritz`], cap and hemisphere values from [`crate::cap`],
//! closed forms from [`crate::wentzell`].

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::cap::{self, CapResult, CapSpec};
use crate::moments::{hessian_energy, reilly_terms, Integrator};
use crate::poly::{MultiIndex, MultiPoly};
use crate::ritz::{self, ProblemKind, ProblemSpec, SolveOptions};
use crate::wentzell;
use crate::Rational;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Expect {
    /// `|margin| <= tolerance * max(1, |rhs|)`
    Equality,
    /// `margin > tolerance`
    Strict,
    /// `margin >= -tolerance * max(1, |rhs|)`
    Ge,
}

impl Expect {
    pub fn holds(self, lhs: f64, rhs: f64, tolerance: f64) -> bool {
        let margin = lhs - rhs;
        let scale = rhs.abs().max(1.0);
        match self {
            Expect::Equality => margin.abs() <= tolerance * scale,
            Expect::Strict => margin > tolerance,
            Expect::Ge => margin >= -tolerance * scale,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub id: String,
    pub statement: String,
    pub lhs: f64,
    pub rhs: f64,
    pub margin: f64,
    pub expect: Expect,
    pub tolerance: f64,
    pub pass: bool,
    /// Producing result for every number used.
    pub sources: Vec<String>,
    pub inputs: BTreeMap<String, Value>,
    /// Set when a solver failed or did not converge.
    pub error: Option<String>,
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub checks: Vec<Check>,
    pub environment: HarnessConfig,
    pub passed: usize,
    pub failed: usize,
}

impl BoundReport {
    pub fn all_pass(&self) -> bool {
        self.failed == 0
    }

    pub fn any_nonconverged(&self) -> bool {
        self.checks.iter().any(|c| !c.converged)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record([
            "id", "statement", "lhs", "rhs", "margin", "expect", "tolerance", "pass", "sources",
            "error",
        ])
        .expect("in-memory write");
        for c in &self.checks {
            let expect = serde_json::to_value(c.expect).expect("enum serializes");
            w.write_record([
                c.id.clone(),
                c.statement.clone(),
                c.lhs.to_string(),
                c.rhs.to_string(),
                c.margin.to_string(),
                expect.as_str().unwrap_or_default().to_string(),
                c.tolerance.to_string(),
                c.pass.to_string(),
                c.sources.join("; "),
                c.error.clone().unwrap_or_default(),
            ])
            .expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("flush")).expect("utf8")
    }
}

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum ConfigError {
    #[error("unknown key {0:?}")]
    UnknownKey(String),
    #[error("bad value {value:?} for {key}")]
    BadValue { key: String, value: String },
    #[error("line {0}: expected key=value")]
    Syntax(usize),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HarnessConfig {
    pub dims: Vec<usize>,
    /// Ritz trial degree on balls.
    pub degree: u32,
    /// Radii for the scale-dependent ball checks.
    pub radii: Vec<f64>,
    pub betas: Vec<f64>,
    pub nodes: usize,
    pub ell_max: u32,
    /// Cap radii as multiples of pi.
    pub cap_thetas: Vec<f64>,
    pub reilly_samples: usize,
    pub reilly_degree: u32,
    pub reilly_tol: f64,
    pub seed: u64,
    pub tol_eq: f64,
    pub tol_strict: f64,
    /// Worker threads; `None` uses the global pool.
    pub jobs: Option<usize>,
}

impl Default for HarnessConfig {
    fn default() -> Self {
        HarnessConfig {
            dims: vec![2, 3, 4],
            degree: 10,
            radii: vec![1.0, 2.0],
            betas: vec![0.0, 1.0, 10.0],
            nodes: 64,
            ell_max: 3,
            cap_thetas: vec![0.3, 0.4],
            reilly_samples: 100,
            reilly_degree: 6,
            reilly_tol: 1e-9,
            seed: 0,
            tol_eq: 1e-5,
            tol_strict: 1e-3,
            jobs: None,
        }
    }
}

fn parse_list<T: std::str::FromStr>(key: &str, value: &str) -> Result<Vec<T>, ConfigError> {
    value
        .split(',')
        .map(|s| s.trim())
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse().map_err(|_| ConfigError::BadValue {
                key: key.into(),
                value: value.into(),
            })
        })
        .collect()
}

fn parse_one<T: std::str::FromStr>(key: &str, value: &str) -> Result<T, ConfigError> {
    value.trim().parse().map_err(|_| ConfigError::BadValue {
        key: key.into(),
        value: value.into(),
    })
}

impl HarnessConfig {
    /// Set one field by name. Dashes and underscores are interchangeable.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        let k = key.trim().replace('-', "_");
        match k.as_str() {
            "dims" | "n" => self.dims = parse_list(&k, value)?,
            "degree" => self.degree = parse_one(&k, value)?,
            "radii" | "radius" => self.radii = parse_list(&k, value)?,
            "betas" | "beta" => self.betas = parse_list(&k, value)?,
            "nodes" => self.nodes = parse_one(&k, value)?,
            "ell_max" => self.ell_max = parse_one(&k, value)?,
            "cap_thetas" => self.cap_thetas = parse_list(&k, value)?,
            "reilly_samples" => self.reilly_samples = parse_one(&k, value)?,
            "reilly_degree" => self.reilly_degree = parse_one(&k, value)?,
            "reilly_tol" => self.reilly_tol = parse_one(&k, value)?,
            "seed" => self.seed = parse_one(&k, value)?,
            "tol_eq" => self.tol_eq = parse_one(&k, value)?,
            "tol_strict" => self.tol_strict = parse_one(&k, value)?,
            "jobs" => self.jobs = Some(parse_one(&k, value)?),
            _ => return Err(ConfigError::UnknownKey(key.to_string())),
        }
        Ok(())
    }

    /// Parse flat `key=value` lines; `#` starts a comment.
    pub fn parse_pairs(text: &str) -> Result<Vec<(String, String)>, ConfigError> {
        let mut out = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or(ConfigError::Syntax(i + 1))?;
            out.push((k.trim().to_string(), v.trim().to_string()));
        }
        Ok(out)
    }

    pub fn from_text(text: &str) -> Result<Self, ConfigError> {
        let mut c = HarnessConfig::default();
        for (k, v) in Self::parse_pairs(text)? {
            c.set(&k, &v)?;
        }
        Ok(c)
    }
}

#[derive(Debug, Clone)]
struct Sourced {
    value: f64,
    source: String,
}

type Got = Result<Sourced, String>;

fn ritz_value(kind: ProblemKind, n: usize, radius: f64, degree: u32, beta: f64) -> (Got, Option<MultiPoly>) {
    let spec = ProblemSpec::new(kind, n)
        .with_radius(radius)
        .with_degree(degree.max(kind.min_degree()))
        .with_beta(beta);
    let mut source = format!("ritz:{kind} n={n} R={radius} degree={}", spec.degree);
    if kind == ProblemKind::Wentzell {
        source.push_str(&format!(" beta={beta}"));
    }
    match ritz::solve_with(&spec, &SolveOptions::default()) {
        Ok(r) => {
            let mode = r.modes.first().map(|m| m.function.clone());
            (
                Ok(Sourced {
                    value: r.first(),
                    source,
                }),
                mode,
            )
        }
        Err(e) => (Err(format!("{source}: {e}")), None),
    }
}

struct BallTable {
    values: BTreeMap<(usize, u64, ProblemKind, u64), Got>,
    modes: Vec<(String, usize, MultiPoly)>,
}

fn bits(x: f64) -> u64 {
    x.to_bits()
}

fn ball_table(cfg: &HarnessConfig) -> BallTable {
    let mut jobs: Vec<(usize, f64, ProblemKind, f64)> = Vec::new();
    for &n in &cfg.dims {
        for &r in &cfg.radii {
            for kind in [
                ProblemKind::PSteklov,
                ProblemKind::QSteklov,
                ProblemKind::XiSteklov,
                ProblemKind::GammaNavier,
                ProblemKind::LambdaNavier,
                ProblemKind::LapDirichlet,
                ProblemKind::LapNeumann,
            ] {
                jobs.push((n, r, kind, 0.0));
            }
        }
        for &b in &cfg.betas {
            jobs.push((n, 1.0, ProblemKind::Wentzell, b));
        }
    }
    let solved: Vec<_> = jobs
        .par_iter()
        .map(|&(n, r, kind, beta)| ritz_value(kind, n, r, cfg.degree, beta))
        .collect();
    let mut values = BTreeMap::new();
    let mut modes = Vec::new();
    for (&(n, r, kind, beta), (got, mode)) in jobs.iter().zip(solved) {
        if r == 1.0 && matches!(kind, ProblemKind::PSteklov | ProblemKind::XiSteklov | ProblemKind::GammaNavier) {
            if let (Ok(s), Some(m)) = (&got, mode) {
                modes.push((s.source.clone(), n, m));
            }
        }
        values.insert((n, bits(r), kind, bits(beta)), got);
    }
    BallTable { values, modes }
}

impl BallTable {
    fn get(&self, n: usize, r: f64, kind: ProblemKind, beta: f64) -> Got {
        self.values
            .get(&(n, bits(r), kind, bits(beta)))
            .cloned()
            .unwrap_or_else(|| Err(format!("no {kind} solve for n={n} R={r}")))
    }
}

struct CheckBuilder<'a> {
    cfg: &'a HarnessConfig,
    checks: Vec<Check>,
}

impl CheckBuilder<'_> {
    #[allow(clippy::too_many_arguments)]
    fn push(
        &mut self,
        id: String,
        statement: &str,
        expect: Expect,
        tolerance: f64,
        parts: Result<(f64, f64, Vec<String>), String>,
        inputs: Value,
        converged: bool,
    ) {
        let inputs: BTreeMap<String, Value> = match inputs {
            Value::Object(m) => m.into_iter().collect(),
            _ => BTreeMap::new(),
        };
        let check = match parts {
            Ok((lhs, rhs, sources)) => Check {
                id,
                statement: statement.into(),
                lhs,
                rhs,
                margin: lhs - rhs,
                expect,
                tolerance,
                pass: converged && expect.holds(lhs, rhs, tolerance),
                sources,
                inputs,
                error: (!converged).then(|| "solver did not converge under node refinement".into()),
                converged,
            },
            Err(e) => Check {
                id,
                statement: statement.into(),
                lhs: f64::NAN,
                rhs: f64::NAN,
                margin: f64::NAN,
                expect,
                tolerance,
                pass: false,
                sources: Vec::new(),
                inputs,
                converged: !e.contains("converge"),
                error: Some(e),
            },
        };
        self.checks.push(check);
    }

    fn tol(&self, expect: Expect) -> f64 {
        match expect {
            Expect::Strict => self.cfg.tol_strict,
            _ => self.cfg.tol_eq,
        }
    }
}

fn cap_source(r: &CapResult) -> String {
    let s = &r.spec;
    let geometry = match s.curvature {
        1 => format!("theta={}pi", s.theta / PI),
        0 => format!("R={}", s.theta),
        _ => format!("hyperbolic theta={}", s.theta),
    };
    format!("cap:n={} {geometry} N={} ell_max={}", s.n, s.nodes, s.ell_max)
}

const T11: &str = "Gamma_1 >= lambda_1 (lambda_1/n + (n-1) kappa)";
const T12: &str = "Lambda_1 >= lambda_1/n + (n-1) kappa";
const T13: &str = "q_1 >= p_1/n";
const T14: &str = "p_1 >= n c lambda_1/(n kappa + lambda_1)";
const T16: &str = "s_1 > n c lambda_1 mu_1/((n-1)(mu_1 + n kappa)) + beta lambda_1";
const REL: &str = "s_1(beta) >= xi_1 + beta lambda_1(boundary)";
const CONJ: &str = "xi_1 >= (n+2) c lambda_1(boundary)/(n-1)";
const REILLY: &str = "Reilly identity residual vanishes";
const SCHWARZ: &str = "int |Hess u|^2 >= (1/n) int (Lap u)^2";

fn cap_checks(b: &mut CheckBuilder<'_>, caps: &[(String, Result<CapResult, String>)]) {
    for (label, res) in caps {
        let (r, expect) = match res {
            Ok(r) => (r, if label.starts_with("hemisphere") { Expect::Equality } else { Expect::Strict }),
            Err(e) => {
                for (t, s) in [("T1.1", T11), ("T1.2", T12)] {
                    b.push(format!("{t}/{label}"), s, Expect::Strict, b.tol(Expect::Strict), Err(e.clone()), json!({}), true);
                }
                continue;
            }
        };
        let n = r.spec.n as f64;
        let src = cap_source(r);
        let inputs = json!({
            "n": r.spec.n, "kappa": 1, "theta": r.spec.theta,
            "lambda1": r.lambda1, "argmin_ell": r.argmin_ell,
            "refinement_change": r.refinement_change,
        });
        let rhs1 = r.lambda1 * (r.lambda1 / n + (n - 1.0));
        b.push(
            format!("T1.1/{label}"),
            T11,
            expect,
            b.tol(expect),
            Ok((r.gamma1, rhs1, vec![src.clone()])),
            inputs.clone(),
            r.converged,
        );
        let rhs2 = r.lambda1 / n + (n - 1.0);
        b.push(
            format!("T1.2/{label}"),
            T12,
            expect,
            b.tol(expect),
            Ok((r.lambda_big1, rhs2, vec![src])),
            inputs,
            r.converged,
        );
    }
}

fn both(a: &Got, c: &Got) -> Result<(Sourced, Sourced), String> {
    match (a, c) {
        (Ok(a), Ok(c)) => Ok((a.clone(), c.clone())),
        (Err(e), _) | (_, Err(e)) => Err(e.clone()),
    }
}

fn ball_checks(b: &mut CheckBuilder<'_>, t: &BallTable) {
    let cfg = b.cfg;
    for &n in &cfg.dims {
        let nf = n as f64;
        // The cap inequalities on the flat unit ball (kappa = 0).
        let lam = t.get(n, 1.0, ProblemKind::LapDirichlet, 0.0);
        for (id, kind, statement) in [
            ("T1.1", ProblemKind::GammaNavier, T11),
            ("T1.2", ProblemKind::LambdaNavier, T12),
        ] {
            let parts = both(&t.get(n, 1.0, kind, 0.0), &lam).map(|(g, l)| {
                let rhs = if id == "T1.1" { l.value * l.value / nf } else { l.value / nf };
                (g.value, rhs, vec![g.source, l.source])
            });
            b.push(
                format!("{id}/ball/n={n}"),
                statement,
                Expect::Strict,
                b.tol(Expect::Strict),
                parts,
                json!({"n": n, "kappa": 0, "R": 1.0}),
                true,
            );
        }
        for &r in &cfg.radii {
            let p = t.get(n, r, ProblemKind::PSteklov, 0.0);
            let q = t.get(n, r, ProblemKind::QSteklov, 0.0);
            let parts = both(&q, &p).map(|(q, p)| (q.value, p.value / nf, vec![q.source, p.source]));
            b.push(
                format!("T1.3/ball/n={n}/R={r}"),
                T13,
                Expect::Equality,
                b.tol(Expect::Equality),
                parts,
                json!({"n": n, "R": r}),
                true,
            );
            // kappa = 0: the bound reduces to n c with c = 1/R.
            let parts = p.clone().map(|p| (p.value, nf / r, vec![p.source, "exact:c=1/R kappa=0".into()]));
            b.push(
                format!("T1.4/ball/n={n}/R={r}"),
                T14,
                Expect::Equality,
                b.tol(Expect::Equality),
                parts,
                json!({"n": n, "R": r, "c": 1.0 / r, "kappa": 0}),
                true,
            );
            let xi = t.get(n, r, ProblemKind::XiSteklov, 0.0);
            let lam_bdry = (nf - 1.0) / (r * r);
            let parts = xi.map(|x| {
                (
                    x.value,
                    (nf + 2.0) * (1.0 / r) * lam_bdry / (nf - 1.0),
                    vec![x.source, "exact:lambda_1(boundary sphere)=(n-1)/R^2".into()],
                )
            });
            b.push(
                format!("CONJ/ball/n={n}/R={r}"),
                CONJ,
                Expect::Equality,
                b.tol(Expect::Equality),
                parts,
                json!({"n": n, "R": r, "c": 1.0 / r, "lambda1_boundary": lam_bdry}),
                true,
            );
        }
        let mu = t.get(n, 1.0, ProblemKind::LapNeumann, 0.0);
        let xi = t.get(n, 1.0, ProblemKind::XiSteklov, 0.0);
        for &beta in &cfg.betas {
            let lam_b = nf - 1.0;
            let closed = wentzell::eigenvalue(n, beta, 1);
            let parts = mu.clone().map(|m| {
                let kappa = 0.0;
                let rhs = nf * lam_b * m.value / ((nf - 1.0) * (m.value + nf * kappa)) + beta * lam_b;
                (closed, rhs, vec!["closed_form:wentzell k=1".into(), m.source])
            });
            b.push(
                format!("T1.6/ball/n={n}/beta={beta}"),
                T16,
                Expect::Strict,
                b.tol(Expect::Strict),
                parts,
                json!({"n": n, "beta": beta, "c": 1.0, "kappa": 0, "lambda1_boundary": lam_b}),
                true,
            );
            let w = t.get(n, 1.0, ProblemKind::Wentzell, beta);
            let parts = both(&w, &xi).map(|(w, x)| (w.value, x.value + beta * lam_b, vec![w.source, x.source]));
            b.push(
                format!("REL/ball/n={n}/beta={beta}"),
                REL,
                Expect::Equality,
                b.tol(Expect::Equality),
                parts,
                json!({"n": n, "beta": beta, "closed_form": closed}),
                true,
            );
        }
    }
}

/// Random polynomial with small integer coefficients, degree at most `degree`.
pub fn random_polynomial(rng: &mut impl Rng, n: usize, degree: u32) -> MultiPoly {
    let monomials = MultiIndex::all_up_to(n, degree);
    let terms = rng.random_range(1..=8);
    let mut p = MultiPoly::zero(n);
    for _ in 0..terms {
        let m = monomials[rng.random_range(0..monomials.len())];
        let c: i64 = rng.random_range(-5..=5);
        p += &MultiPoly::monomial(m, Rational::from_integer(c.into()));
    }
    p
}

fn reilly_check(b: &mut CheckBuilder<'_>) {
    let cfg = b.cfg;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let radii = [1.0, 0.5, 2.0];
    let samples: Vec<(MultiPoly, f64)> = (0..cfg.reilly_samples)
        .map(|i| {
            let n = cfg.dims[i % cfg.dims.len()];
            let r = radii[i % radii.len()];
            (random_polynomial(&mut rng, n, cfg.reilly_degree), r)
        })
        .collect();
    let residuals: Result<Vec<f64>, String> = samples
        .par_iter()
        .map(|(p, r)| reilly_terms(p, *r).map(|t| t.relative_residual()).map_err(|e| e.to_string()))
        .collect();
    let parts = residuals.map(|v| {
        let worst = v.into_iter().fold(0.0f64, f64::max);
        (worst, 0.0, vec![format!("moments:exact seed={}", cfg.seed)])
    });
    b.push(
        "REILLY/batch".into(),
        REILLY,
        Expect::Equality,
        cfg.reilly_tol,
        parts,
        json!({"samples": cfg.reilly_samples, "max_degree": cfg.reilly_degree, "seed": cfg.seed, "radii": radii}),
        true,
    );
}

fn schwarz_checks(b: &mut CheckBuilder<'_>, t: &BallTable) {
    for (source, n, u) in &t.modes {
        let integ = Integrator::new(*n, Rational::from_integer(1.into()));
        let lap = u.laplacian();
        let hess = hessian_energy(&integ, u).to_f64().unwrap_or(f64::NAN);
        let lap_sq = integ.ball_product(&lap, &lap).to_f64().unwrap_or(f64::NAN);
        let scale = integ.ball_product(u, u).to_f64().unwrap_or(1.0);
        let kind = source.split_whitespace().next().unwrap_or("").trim_start_matches("ritz:");
        b.push(
            format!("SCHWARZ/{kind}/n={n}"),
            SCHWARZ,
            Expect::Ge,
            b.tol(Expect::Ge),
            Ok((hess / scale, lap_sq / (*n as f64) / scale, vec![source.clone()])),
            json!({"n": n, "normalization": "int u^2 = 1"}),
            true,
        );
    }
}

fn cap_jobs(cfg: &HarnessConfig) -> Vec<(String, CapSpec)> {
    let mut out = Vec::new();
    for &n in &cfg.dims {
        let base = |theta: f64| CapSpec::sphere(n, theta).with_nodes(cfg.nodes).with_ell_max(cfg.ell_max);
        out.push((format!("hemisphere/n={n}"), base(PI / 2.0)));
        for &t in &cfg.cap_thetas {
            out.push((format!("cap/n={n}/theta={t}pi"), base(t * PI)));
        }
    }
    out
}

fn run_inner(cfg: &HarnessConfig) -> BoundReport {
    let jobs = cap_jobs(cfg);
    let (caps, table) = rayon::join(
        || {
            jobs.par_iter()
                .map(|(label, spec)| (label.clone(), cap::solve(spec).map_err(|e| e.to_string())))
                .collect::<Vec<_>>()
        },
        || ball_table(cfg),
    );
    let mut b = CheckBuilder {
        cfg,
        checks: Vec::new(),
    };
    cap_checks(&mut b, &caps);
    ball_checks(&mut b, &table);
    reilly_check(&mut b);
    schwarz_checks(&mut b, &table);
    let mut checks = b.checks;
    checks.sort_by(|a, c| a.id.cmp(&c.id));
    let passed = checks.iter().filter(|c| c.pass).count();
    BoundReport {
        failed: checks.len() - passed,
        passed,
        checks,
        environment: cfg.clone(),
    }
}

/// Run every check. Independent solves run in parallel; the report order
/// and contents depend only on the configuration.
pub fn run_all(cfg: &HarnessConfig) -> BoundReport {
    match cfg.jobs {
        Some(j) if j > 0 => match rayon::ThreadPoolBuilder::new().num_threads(j).build() {
            Ok(pool) => pool.install(|| run_inner(cfg)),
            Err(_) => run_inner(cfg),
        },
        _ => run_inner(cfg),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> HarnessConfig {
        HarnessConfig {
            dims: vec![2, 3],
            degree: 8,
            radii: vec![1.0],
            betas: vec![0.0, 1.0],
            reilly_samples: 10,
            ..HarnessConfig::default()
        }
    }

    #[test]
    fn expectations() {
        assert!(Expect::Equality.holds(1.0, 1.0 + 1e-7, 1e-5));
        assert!(!Expect::Equality.holds(1.0, 1.1, 1e-5));
        assert!(Expect::Strict.holds(2.0, 1.0, 1e-3));
        assert!(!Expect::Strict.holds(1.0005, 1.0, 1e-3));
        assert!(Expect::Ge.holds(1.0 - 1e-7, 1.0, 1e-5));
        assert!(!Expect::Ge.holds(0.9, 1.0, 1e-5));
    }

    #[test]
    fn small_report_passes_and_is_deterministic() {
        let cfg = small();
        let a = run_all(&cfg);
        for c in &a.checks {
            assert!(c.pass, "{} failed: {:?}", c.id, c);
            assert!(!c.sources.is_empty(), "{}", c.id);
        }
        let b = run_all(&HarnessConfig {
            jobs: Some(1),
            ..cfg
        });
        assert_eq!(a.checks, b.checks);
        assert_eq!(a.to_json().replace("\"jobs\": 1", "\"jobs\": null"), b.to_json().replace("\"jobs\": 1", "\"jobs\": null"));
        let ids: Vec<&str> = a.checks.iter().map(|c| c.id.split('/').next().unwrap()).collect();
        for family in ["T1.1", "T1.2", "T1.3", "T1.4", "T1.6", "REL", "CONJ", "REILLY", "SCHWARZ"] {
            assert!(ids.contains(&family), "{family}");
        }
        assert!(a.to_csv().lines().count() == a.checks.len() + 1);
    }

    #[test]
    fn known_margins() {
        let cfg = HarnessConfig {
            dims: vec![3],
            betas: vec![0.0],
            ..small()
        };
        let r = run_all(&cfg);
        let t16 = r.checks.iter().find(|c| c.id == "T1.6/ball/n=3/beta=0").unwrap();
        assert_eq!(t16.lhs, 5.0);
        assert!((t16.rhs - 3.0).abs() < 1e-12);
        let conj = r.checks.iter().find(|c| c.id == "CONJ/ball/n=3/R=1").unwrap();
        assert!((conj.lhs - 5.0).abs() < 1e-6 && conj.rhs == 5.0);
    }

    #[test]
    fn config_parsing() {
        let c = HarnessConfig::from_text("# comment\ndims = 2,3\ntol-eq=1e-6\nseed=7\n\njobs=2").unwrap();
        assert_eq!(c.dims, vec![2, 3]);
        assert_eq!(c.tol_eq, 1e-6);
        assert_eq!(c.seed, 7);
        assert_eq!(c.jobs, Some(2));
        assert!(matches!(HarnessConfig::from_text("bogus=1"), Err(ConfigError::UnknownKey(_))));
        assert!(matches!(HarnessConfig::from_text("degree"), Err(ConfigError::Syntax(1))));
        assert!(matches!(HarnessConfig::from_text("degree=x"), Err(ConfigError::BadValue { .. })));
    }

    #[test]
    fn failures_are_reported_not_hidden() {
        let cfg = HarnessConfig {
            dims: vec![2],
            degree: 8,
            radii: vec![-1.0],
            betas: vec![],
            cap_thetas: vec![],
            reilly_samples: 1,
            ..HarnessConfig::default()
        };
        let r = run_all(&cfg);
        assert!(!r.all_pass());
        let bad = r.checks.iter().find(|c| c.id.starts_with("T1.3")).unwrap();
        assert!(!bad.pass && bad.error.is_some());
    }
}
