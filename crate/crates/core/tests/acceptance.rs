//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Runs as a plain binary so the lines always appear in `cargo test` output.

use std::f64::consts::PI;
use std::time::{Duration, Instant};

use bilap::cap::{self, CapSpec};
use bilap::harness::{self, HarnessConfig};
use bilap::ritz::{self, ProblemKind, ProblemSpec};
use bilap::{harmonic, poly::rational_from_f64, wentzell, Rational};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn ritz_first(kind: ProblemKind, n: usize, degree: u32, radius: f64, beta: f64) -> Result<f64, String> {
    let spec = ProblemSpec::new(kind, n).with_degree(degree).with_radius(radius).with_beta(beta);
    ritz::solve(&spec).map(|r| r.first()).map_err(|e| format!("{kind}: {e}"))
}

// J_0(x) = (1/pi) int_0^pi cos(x sin t) dt, trapezoid rule on a periodic integrand.
fn bessel_j0(x: f64) -> f64 {
    let m = 256;
    let h = PI / m as f64;
    let mut s = 0.5 * (1.0 + (x * PI.sin()).cos());
    for i in 1..m {
        s += (x * (i as f64 * h).sin()).cos();
    }
    s * h / PI
}

fn bisect(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let mut fa = f(a);
    assert!(fa * f(b) < 0.0, "no sign change on [{a}, {b}]");
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        let fm = f(m);
        if fm == 0.0 || b - a < 1e-15 {
            return m;
        }
        if fa * fm < 0.0 {
            b = m;
        } else {
            a = m;
            fa = fm;
        }
    }
    0.5 * (a + b)
}

// Derivatives of the spherical Bessel functions j_0, j_1.
fn dj0(x: f64) -> f64 {
    (x * x.cos() - x.sin()) / (x * x)
}

fn dj1(x: f64) -> f64 {
    let (s, c) = x.sin_cos();
    ((x * x - 2.0) * s + 2.0 * x * c) / x.powi(3)
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let mut count = 0;
    for n in 2..=4usize {
        for beta in [0.0, 1.0, 5.0] {
            let records = wentzell::certify_all(n, beta, 5).map_err(|e| e.to_string())?;
            for k in 0..=5u32 {
                let kr = Rational::from_integer(k.into());
                let nr = Rational::from_integer(n.into());
                let want = &kr * &kr * (&nr + &kr * Rational::from_integer(2.into()))
                    + rational_from_f64(beta) * &kr * (&kr + &nr - Rational::from_integer(2.into()));
                let got = wentzell::eigenvalue_exact(n, &rational_from_f64(beta), k);
                ensure(got == want, || format!("n={n} beta={beta} k={k}: eigenvalue {got} != {want}"))?;
                let mine: Vec<_> = records.iter().filter(|r| r.k == k).collect();
                let mu = harmonic::mu(n, k);
                ensure(mine.len() as u64 == mu, || format!("n={n} k={k}: {} eigenfunctions, mu = {mu}", mine.len()))?;
                let basis = harmonic::basis(n, k).map_err(|e| e.to_string())?;
                ensure(basis.elements.len() as u64 == mu, || format!("n={n} k={k}: basis size"))?;
                for r in mine {
                    ensure(r.valid && r.pde_residual == "0" && r.neumann_residual == "0" && r.wentzell_residual == "0", || {
                        format!("n={n} beta={beta} k={k}: nonzero residual for {}", r.u)
                    })?;
                    ensure(wentzell::recheck_record(r).map_err(|e| e.to_string())?, || "recheck failed".into())?;
                    count += 1;
                }
            }
        }
    }
    let t = start.elapsed();
    ensure(t < Duration::from_secs(30), || format!("took {t:?}"))?;
    Ok(format!("{count} certificates all-zero, eigenvalues exact, multiplicities = mu ({:.2?})", t))
}

fn criterion_2() -> Outcome {
    let mut worst: f64 = 0.0;
    for n in [2usize, 3] {
        let p = ritz_first(ProblemKind::PSteklov, n, 8, 1.0, 0.0)?;
        let q = ritz_first(ProblemKind::QSteklov, n, 8, 1.0, 0.0)?;
        ensure((p - n as f64).abs() < 1e-8, || format!("p1(B^{n}) = {p}"))?;
        ensure((q - 1.0).abs() < 1e-8, || format!("q1(B^{n}) = {q}"))?;
        let xi = ritz_first(ProblemKind::XiSteklov, n, 10, 1.0, 0.0)?;
        ensure((xi - (n + 2) as f64).abs() < 1e-6, || format!("xi1(B^{n}) = {xi}"))?;
        for beta in [0.0, 1.0, 10.0] {
            let s = ritz_first(ProblemKind::Wentzell, n, 10, 1.0, beta)?;
            let want = (n + 2) as f64 + beta * (n - 1) as f64;
            ensure((s - want).abs() < 1e-6, || format!("sigma1(B^{n}, beta={beta}) = {s}, want {want}"))?;
        }
        for (v, w) in [(p, n as f64), (q, 1.0), (xi, (n + 2) as f64)] {
            worst = worst.max((v - w).abs());
        }
    }
    // Eigenvector of p1 against 1 - |x|^2 in L^2(B^2).
    let r = ritz::solve(&ProblemSpec::new(ProblemKind::PSteklov, 2).with_degree(8)).map_err(|e| e.to_string())?;
    let u = &r.modes[0].function;
    let integ = bilap::moments::Integrator::new(2, Rational::from_integer(1.into()));
    let target = bilap::poly::MultiPoly::one(2) - bilap::poly::MultiPoly::norm_sq(2);
    let uu = integ.ball_product(u, u);
    let ut = integ.ball_product(u, &target);
    let tt = integ.ball_product(&target, &target);
    let (uu, ut, tt) = (to_f64(&uu), to_f64(&ut), to_f64(&tt));
    // Distance after optimal scaling c = <u,t>/<u,u>.
    let err = ((tt - ut * ut / uu).max(0.0) / tt).sqrt();
    ensure(err <= 1e-7, || format!("eigenvector relative L2 error {err:e}"))?;
    let xi2 = ritz::solve(&ProblemSpec::new(ProblemKind::XiSteklov, 2).with_degree(10)).map_err(|e| e.to_string())?;
    ensure(xi2.eigenvalues.iter().any(|v| (v - 24.0).abs() < 1e-6), || format!("xi spectrum of B^2 lacks 24: {:?}", xi2.eigenvalues))?;
    Ok(format!("max |error| {worst:.1e}; eigenvector L2 error {err:.1e}"))
}

fn to_f64(q: &Rational) -> f64 {
    use num_traits::ToPrimitive;
    q.to_f64().unwrap()
}

fn criterion_3() -> Outcome {
    let j01 = bisect(bessel_j0, 2.0, 3.0);
    let l2 = ritz_first(ProblemKind::LapDirichlet, 2, 12, 1.0, 0.0)?;
    ensure((j01 * j01 - 5.783_185_962_946_784).abs() < 1e-10, || format!("oracle j01 = {j01}"))?;
    ensure((l2 - j01 * j01).abs() < 1e-6, || format!("lambda1(B^2) = {l2}, oracle {}", j01 * j01))?;
    let l3 = ritz_first(ProblemKind::LapDirichlet, 3, 12, 1.0, 0.0)?;
    ensure((l3 - PI * PI).abs() < 1e-6, || format!("lambda1(B^3) = {l3}"))?;
    // Neumann on B^3: lowest critical points of j_1 and j_0.
    let a1 = bisect(dj1, 1.0, 3.0);
    let a0 = bisect(dj0, 4.0, 5.0);
    let oracle = (a1 * a1).min(a0 * a0);
    let m3 = ritz_first(ProblemKind::LapNeumann, 3, 12, 1.0, 0.0)?;
    ensure((m3 - oracle).abs() < 1e-5, || format!("mu1(B^3) = {m3}, oracle {oracle}"))?;
    Ok(format!(
        "lambda1(B^2)={l2:.9} (j01^2={:.9}), lambda1(B^3)={l3:.9}, mu1(B^3)={m3:.7} (oracle {oracle:.7})",
        j01 * j01
    ))
}

fn criterion_4() -> Outcome {
    let mut worst: f64 = 0.0;
    for n in 2..=4usize {
        let r = cap::solve(&CapSpec::hemisphere(n).with_nodes(64)).map_err(|e| e.to_string())?;
        let nf = n as f64;
        ensure((r.lambda1 - nf).abs() < 1e-8, || format!("n={n}: lambda1 = {}", r.lambda1))?;
        ensure((r.gamma1 - nf * nf).abs() < 1e-6, || format!("n={n}: Gamma1 = {}", r.gamma1))?;
        ensure((r.lambda_big1 - nf).abs() < 1e-6, || format!("n={n}: Lambda1 = {}", r.lambda_big1))?;
        ensure(r.converged, || format!("n={n}: not converged ({:e})", r.refinement_change))?;
        worst = worst.max((r.lambda1 - nf).abs()).max((r.gamma1 - nf * nf).abs()).max((r.lambda_big1 - nf).abs());
    }
    Ok(format!("n=2,3,4 at N=64, max |error| {worst:.1e}"))
}

fn criterion_5() -> Outcome {
    let mut min_margin = f64::INFINITY;
    for n in 2..=4usize {
        let nf = n as f64;
        for t in [0.3, 0.4] {
            let r = cap::solve(&CapSpec::sphere(n, t * PI)).map_err(|e| e.to_string())?;
            ensure(r.converged, || format!("n={n} theta={t}pi: not converged"))?;
            let m1 = r.gamma1 - r.lambda1 * (r.lambda1 / nf + nf - 1.0);
            let m2 = r.lambda_big1 - (r.lambda1 / nf + nf - 1.0);
            ensure(m1 > 0.0 && m2 > 0.0, || format!("n={n} theta={t}pi: margins {m1}, {m2}"))?;
            min_margin = min_margin.min(m1).min(m2);
        }
    }
    let mut ball_margin = f64::INFINITY;
    for n in 2..=4usize {
        let deg = ritz::default_degree(n);
        let g = ritz_first(ProblemKind::GammaNavier, n, deg, 1.0, 0.0)?;
        let l = ritz_first(ProblemKind::LapDirichlet, n, deg, 1.0, 0.0)?;
        let m = g - l * l / n as f64;
        ensure(m > 1e-2, || format!("ball n={n}: Gamma1 - lambda1^2/n = {m}"))?;
        ball_margin = ball_margin.min(m);
    }
    Ok(format!("smallest cap margin {min_margin:.3e}, smallest ball margin {ball_margin:.3}"))
}

fn criterion_6() -> Outcome {
    let cfg = HarnessConfig::default();
    let start = Instant::now();
    let a = harness::run_all(&cfg);
    let t = start.elapsed();
    if !a.all_pass() {
        let bad: Vec<_> = a.checks.iter().filter(|c| !c.pass).map(|c| c.id.as_str()).collect();
        return Err(format!("failing checks: {bad:?}"));
    }
    for family in ["T1.1", "T1.2", "T1.3", "T1.4", "T1.6", "REL", "CONJ", "REILLY", "SCHWARZ"] {
        ensure(a.checks.iter().any(|c| c.id.starts_with(family)), || format!("no {family} checks"))?;
    }
    ensure(cfg.reilly_samples == 100 && cfg.reilly_degree <= 6 && cfg.reilly_tol <= 1e-9, || "reilly settings".into())?;
    ensure(t < Duration::from_secs(120), || format!("took {t:?}"))?;
    let b = harness::run_all(&cfg);
    ensure(a.to_json() == b.to_json(), || "reports differ between runs".into())?;
    Ok(format!("{} checks passed in {:.1?}, identical on rerun", a.passed, t))
}

fn criterion_7() -> Outcome {
    let table = [
        (ProblemKind::PSteklov, 1),
        (ProblemKind::QSteklov, 1),
        (ProblemKind::LapDirichlet, 2),
        (ProblemKind::XiSteklov, 3),
        (ProblemKind::GammaNavier, 4),
    ];
    let mut worst: f64 = 0.0;
    for n in [2usize, 3] {
        for (kind, power) in table {
            let scaled: Vec<f64> = [0.5, 1.0, 2.0]
                .iter()
                .map(|&r| ritz_first(kind, n, 8, r, 0.0).map(|v| v * r.powi(power)))
                .collect::<Result<_, _>>()?;
            for v in &scaled {
                let rel = (v - scaled[1]).abs() / scaled[1].abs();
                ensure(rel < 1e-5, || format!("{kind} n={n}: {scaled:?}"))?;
                worst = worst.max(rel);
            }
        }
    }
    Ok(format!("max relative deviation {worst:.1e}"))
}

fn criterion_8() -> Outcome {
    let mut worst: f64 = 0.0;
    for n in [2usize, 3] {
        let c = cap::solve(&CapSpec::euclidean(n, 1.0)).map_err(|e| e.to_string())?;
        let l = ritz_first(ProblemKind::LapDirichlet, n, 12, 1.0, 0.0)?;
        let g = ritz_first(ProblemKind::GammaNavier, n, 12, 1.0, 0.0)?;
        ensure((l - c.lambda1).abs() < 1e-5, || format!("n={n}: lambda1 ritz {l} vs cap {}", c.lambda1))?;
        ensure((g - c.gamma1).abs() < 1e-5, || format!("n={n}: Gamma1 ritz {g} vs cap {}", c.gamma1))?;
        worst = worst.max((l - c.lambda1).abs()).max((g - c.gamma1).abs());
    }
    Ok(format!("max |ritz - cap| {worst:.1e}"))
}

fn main() {
    let criteria: [Criterion; 8] = [
        ("Wentzell closed form and exact certificates", criterion_1),
        ("ball Steklov values", criterion_2),
        ("Laplace oracles", criterion_3),
        ("hemisphere equalities", criterion_4),
        ("strict inequalities on caps and ball", criterion_5),
        ("bound harness", criterion_6),
        ("scaling laws", criterion_7),
        ("ritz and cap agree on the ball", criterion_8),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(run).unwrap_or_else(|_| Err("panicked".into()));
        let t = start.elapsed();
        match outcome {
            Ok(detail) => println!("criterion {}: PASS {name}: {detail} [{t:.1?}]", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {}: FAIL {name}: {detail} [{t:.1?}]", i + 1);
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
