//! Radial Bessel oracles for the Laplacian on the unit ball.
//!
//! With `nu = ell + n/2 - 1`, the regular radial solutions of
//! `-Lap u = k^2 u` in `R^n` are `r^ell F_nu(k r)` where
//! `F_nu(x) = Gamma(nu + 1) (x/2)^{-nu} J_nu(x)`, an entire function with
//! the power series `sum_m (-x^2/4)^m / (m! (nu+1)_m)`.

/// `F_nu(x)` and `F_nu'(x)` by power series (accurate for `x` up to about 20).
pub fn normalized_bessel(nu: f64, x: f64) -> (f64, f64) {
    let q = -x * x / 4.0;
    let mut term = 1.0;
    let mut value = 1.0;
    let mut deriv = 0.0;
    for m in 1..200 {
        let mf = m as f64;
        term *= q / (mf * (nu + mf));
        value += term;
        // d/dx of q^m is 2 m q^m / x
        if x != 0.0 {
            deriv += 2.0 * mf * term / x;
        }
        if term.abs() < 1e-18 * value.abs().max(1e-300) && m > 4 {
            break;
        }
    }
    (value, deriv)
}

/// `J_nu(x)` for `nu >= 0`, `x >= 0`.
pub fn bessel_j(nu: f64, x: f64) -> f64 {
    let (f, _) = normalized_bessel(nu, x);
    f * (x / 2.0).powf(nu) / gamma(nu + 1.0)
}

/// Gamma function for positive arguments (Lanczos, g = 7).
pub fn gamma(x: f64) -> f64 {
    const C: [f64; 9] = [
        0.999_999_999_999_809_9,
        676.520_368_121_885_1,
        -1_259.139_216_722_402_8,
        771.323_428_777_653_1,
        -176.615_029_162_140_6,
        12.507_343_278_686_905,
        -0.138_571_095_265_720_12,
        9.984_369_578_019_572e-6,
        1.505_632_735_149_311_6e-7,
    ];
    if x < 0.5 {
        return std::f64::consts::PI / ((std::f64::consts::PI * x).sin() * gamma(1.0 - x));
    }
    let x = x - 1.0;
    let t = x + 7.5;
    let mut a = C[0];
    for (i, c) in C.iter().enumerate().skip(1) {
        a += c / (x + i as f64);
    }
    (2.0 * std::f64::consts::PI).sqrt() * t.powf(x + 0.5) * (-t).exp() * a
}

/// The `index`-th positive root (1-based) of `f`, located by scanning with
/// a fixed step from `start` and refined by bisection.
pub fn nth_root(f: impl Fn(f64) -> f64, start: f64, step: f64, index: usize) -> Option<f64> {
    let mut found = 0;
    let mut a = start;
    let mut fa = f(a);
    while a < 60.0 {
        let b = a + step;
        let fb = f(b);
        if fa == 0.0 || fa.signum() != fb.signum() {
            found += 1;
            if found == index {
                return Some(bisect(&f, a, b));
            }
        }
        a = b;
        fa = fb;
    }
    None
}

fn bisect(f: &impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let fa0 = f(a);
    if fa0 == 0.0 {
        return a;
    }
    let sa = fa0.signum();
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if m == a || m == b {
            break;
        }
        let fm = f(m);
        if fm == 0.0 {
            return m;
        }
        if fm.signum() == sa {
            a = m;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}

/// `index`-th positive zero of `J_nu`.
pub fn bessel_zero(nu: f64, index: usize) -> f64 {
    nth_root(|x| normalized_bessel(nu, x).0, 1e-3, 1e-2, index).expect("zero below 60")
}

/// First Dirichlet eigenvalue of `-Lap` on the unit ball in `R^n`.
pub fn dirichlet_ball(n: usize) -> f64 {
    bessel_zero(n as f64 / 2.0 - 1.0, 1).powi(2)
}

/// `index`-th positive root of `d/dr [r^ell F_nu(k r)]` at `r = 1`, that is
/// of `ell F_nu(k) + k F_nu'(k)`.
pub fn neumann_radial_root(n: usize, ell: u32, index: usize) -> f64 {
    let nu = ell as f64 + n as f64 / 2.0 - 1.0;
    let g = |k: f64| {
        let (f, d) = normalized_bessel(nu, k);
        ell as f64 * f + k * d
    };
    nth_root(g, 1e-3, 1e-2, index).expect("root below 60")
}

/// First nonzero Neumann eigenvalue of `-Lap` on the unit ball in `R^n`.
pub fn neumann_ball(n: usize) -> f64 {
    let radial = neumann_radial_root(n, 0, 1);
    let dipole = neumann_radial_root(n, 1, 1);
    radial.min(dipole).powi(2)
}
