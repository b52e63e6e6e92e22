//! Chebyshev collocation for the radial Laplace and Navier bi-Laplace
//! problems on geodesic balls of space forms.
//!
//! On a geodesic ball of radius `Theta` with curvature `eps`, separation of
//! variables turns the Laplacian acting on `T(r) Y_ell` into
//! `L_ell T = T'' + (n-1) ct(r) T' - ell (ell + n - 2) / sn(r)^2 T`, where
//! `(sn, ct)` is `(sin, cot)`, `(r, 1/r)` or `(sinh, coth)`.
//!
//! The fourth-order problems are discretized as a mixed system in
//! `(T, V = L T)`. Boundary and regularity conditions replace collocation
//! rows; the algebraic rows are eliminated before the eigensolve.

use nalgebra::{Complex, DMatrix};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::poly::check_dim;

/// Largest eigenvalue magnitude kept after filtering.
pub const SPURIOUS_MAGNITUDE: f64 = 1e6;
/// Largest relative imaginary part kept after filtering.
pub const SPURIOUS_IMAG: f64 = 1e-8;
/// Tolerance on the change of each value under `N -> N + 16`.
pub const CONVERGENCE_TOL: f64 = 1e-8;
pub const MIN_NODES: usize = 16;
pub const MAX_NODES: usize = 400;

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum CapError {
    #[error("dimension {0} out of range")]
    Dimension(usize),
    #[error("curvature must be -1, 0 or 1, got {0}")]
    Curvature(i32),
    #[error("radius {theta} invalid for curvature {curvature}")]
    Radius { theta: f64, curvature: i32 },
    #[error("node count {0} outside {MIN_NODES}..={MAX_NODES}")]
    Nodes(usize),
    #[error("eigenvalue iteration failed")]
    EigenFailure,
    #[error("no admissible eigenvalue survived filtering")]
    NoEigenvalue,
    #[error("{quantity} not converged: change {change:e} under node refinement")]
    NonConvergence { quantity: &'static str, change: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CapSpec {
    pub n: usize,
    /// `+1` sphere, `0` Euclidean, `-1` hyperbolic.
    pub curvature: i32,
    /// Geodesic radius.
    pub theta: f64,
    /// Angular modes `0..=ell_max` are swept.
    pub ell_max: u32,
    pub nodes: usize,
}

impl CapSpec {
    /// Hemisphere of the unit sphere, `ell_max = 3`, 64 nodes.
    pub fn hemisphere(n: usize) -> Self {
        CapSpec::sphere(n, std::f64::consts::FRAC_PI_2)
    }

    pub fn sphere(n: usize, theta: f64) -> Self {
        CapSpec {
            n,
            curvature: 1,
            theta,
            ell_max: 3,
            nodes: 64,
        }
    }

    pub fn euclidean(n: usize, radius: f64) -> Self {
        CapSpec {
            n,
            curvature: 0,
            theta: radius,
            ell_max: 3,
            nodes: 64,
        }
    }

    pub fn with_nodes(mut self, nodes: usize) -> Self {
        self.nodes = nodes;
        self
    }

    pub fn with_ell_max(mut self, ell_max: u32) -> Self {
        self.ell_max = ell_max;
        self
    }

    pub fn validate(&self) -> Result<(), CapError> {
        check_dim(self.n).map_err(|_| CapError::Dimension(self.n))?;
        if !(-1..=1).contains(&self.curvature) {
            return Err(CapError::Curvature(self.curvature));
        }
        let upper = if self.curvature == 1 {
            std::f64::consts::PI
        } else {
            f64::INFINITY
        };
        if !(self.theta.is_finite() && self.theta > 0.0 && self.theta < upper) {
            return Err(CapError::Radius {
                theta: self.theta,
                curvature: self.curvature,
            });
        }
        if !(MIN_NODES..=MAX_NODES).contains(&self.nodes) {
            return Err(CapError::Nodes(self.nodes));
        }
        Ok(())
    }

    /// Left endpoint replacing the singular origin.
    pub fn delta(&self) -> f64 {
        1e-8 * self.theta
    }

    fn sn_ct(&self, r: f64) -> (f64, f64) {
        match self.curvature {
            1 => (r.sin(), r.cos() / r.sin()),
            0 => (r, 1.0 / r),
            _ => (r.sinh(), r.cosh() / r.sinh()),
        }
    }
}

/// Collocation grid with first-derivative and radial operator matrices.
#[derive(Debug, Clone)]
pub struct RadialOperator {
    /// Ascending nodes on `[delta, Theta]`.
    pub nodes: Vec<f64>,
    pub d1: DMatrix<f64>,
    /// `L_ell` at every node, no rows replaced.
    pub l: DMatrix<f64>,
    /// `ct(Theta)`.
    pub ct_end: f64,
}

/// Chebyshev-Gauss-Lobatto nodes on `[a, b]` (ascending) and the
/// differentiation matrix.
pub fn chebyshev(count: usize, a: f64, b: f64) -> (Vec<f64>, DMatrix<f64>) {
    let m = count - 1;
    let x: Vec<f64> = (0..=m)
        .map(|j| (std::f64::consts::PI * j as f64 / m as f64).cos())
        .collect();
    let c = |j: usize| {
        let base = if j == 0 || j == m { 2.0 } else { 1.0 };
        if j.is_multiple_of(2) {
            base
        } else {
            -base
        }
    };
    let mut d = DMatrix::<f64>::zeros(count, count);
    for i in 0..count {
        for j in 0..count {
            if i != j {
                d[(i, j)] = c(i) / c(j) / (x[i] - x[j]);
            }
        }
    }
    for i in 0..count {
        let s: f64 = (0..count).filter(|&j| j != i).map(|j| d[(i, j)]).sum();
        d[(i, i)] = -s;
    }
    // r = a + (b - a)(1 - x)/2 ascends with the index.
    let nodes = x.iter().map(|xi| a + (b - a) * (1.0 - xi) / 2.0).collect();
    d *= -2.0 / (b - a);
    (nodes, d)
}

pub fn radial_operator(spec: &CapSpec, ell: u32) -> Result<RadialOperator, CapError> {
    spec.validate()?;
    let (nodes, d1) = chebyshev(spec.nodes, spec.delta(), spec.theta);
    let d2 = &d1 * &d1;
    let n1 = spec.n as f64 - 1.0;
    let ang = ell as f64 * (ell as f64 + spec.n as f64 - 2.0);
    let mut l = d2;
    for (i, &r) in nodes.iter().enumerate() {
        let (sn, ct) = spec.sn_ct(r);
        for j in 0..spec.nodes {
            l[(i, j)] += n1 * ct * d1[(i, j)];
        }
        l[(i, i)] -= ang / (sn * sn);
    }
    let ct_end = spec.sn_ct(spec.theta).1;
    Ok(RadialOperator {
        nodes,
        d1,
        l,
        ct_end,
    })
}

/// Eigenvalues of one angular mode for each quantity, ascending.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModeTable {
    pub ell: u32,
    pub lambda: Vec<f64>,
    pub gamma: Vec<f64>,
    pub lambda_big: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CapResult {
    pub spec: CapSpec,
    pub per_ell: Vec<ModeTable>,
    pub lambda1: f64,
    pub gamma1: f64,
    pub lambda_big1: f64,
    /// Angular modes attaining each minimum.
    pub argmin_ell: [u32; 3],
    pub spurious_filtered: usize,
    /// Largest relative change of the three values under `N -> N + 16`.
    pub refinement_change: f64,
    pub converged: bool,
}

/// Bordered pencil: algebraic rows (boundary, regularity and the mixed
/// coupling) with zero right-hand side, followed by the dynamic rows
/// `lhs u = z rhs u`.
struct Pencil {
    lhs: DMatrix<f64>,
    rhs: DMatrix<f64>,
}

impl Pencil {
    fn new(width: usize) -> Self {
        Pencil {
            lhs: DMatrix::zeros(0, width),
            rhs: DMatrix::zeros(0, width),
        }
    }

    fn push(&mut self, lhs: &[f64], rhs: Option<&[f64]>) {
        let w = self.lhs.ncols();
        let r = self.lhs.nrows();
        self.lhs = std::mem::replace(&mut self.lhs, DMatrix::zeros(0, 0)).insert_row(r, 0.0);
        self.rhs = std::mem::replace(&mut self.rhs, DMatrix::zeros(0, 0)).insert_row(r, 0.0);
        for j in 0..w {
            self.lhs[(r, j)] = lhs[j];
            if let Some(b) = rhs {
                self.rhs[(r, j)] = b[j];
            }
        }
    }

    /// Finite eigenvalues `z` from the spectrum of `lhs^{-1} rhs`
    /// (shift-invert about zero), filtered.
    fn eigenvalues(self) -> Result<Filtered, CapError> {
        assert_eq!(self.lhs.nrows(), self.lhs.ncols());
        let k = self.lhs.lu().solve(&self.rhs).ok_or(CapError::EigenFailure)?;
        let mut k = k;
        balance(&mut k);
        let schur =
            nalgebra::linalg::Schur::try_new(k, 1e-15, 100_000).ok_or(CapError::EigenFailure)?;
        let mut values = Vec::new();
        let mut dropped = 0;
        for mu in schur.complex_eigenvalues().iter() {
            if mu.norm() == 0.0 {
                dropped += 1;
                continue;
            }
            let z: Complex<f64> = Complex::new(1.0, 0.0) / mu;
            if z.im.abs() > SPURIOUS_IMAG * z.re.abs() || z.norm() > SPURIOUS_MAGNITUDE || z.re <= 0.0 {
                dropped += 1;
            } else {
                values.push(z.re);
            }
        }
        values.sort_by(f64::total_cmp);
        Ok(Filtered { values, dropped })
    }
}

struct Filtered {
    values: Vec<f64>,
    dropped: usize,
}

/// Diagonal similarity equalizing row and column norms (powers of two, so
/// exact in floating point).
pub fn balance(m: &mut DMatrix<f64>) {
    let n = m.nrows();
    let mut done = false;
    let mut passes = 0;
    while !done && passes < 100 {
        done = true;
        passes += 1;
        for i in 0..n {
            let mut c = 0.0;
            let mut r = 0.0;
            for j in 0..n {
                if j != i {
                    c += m[(j, i)].abs();
                    r += m[(i, j)].abs();
                }
            }
            if c == 0.0 || r == 0.0 {
                continue;
            }
            let s = c + r;
            let mut f = 1.0;
            while c < r / 2.0 {
                c *= 2.0;
                r /= 2.0;
                f *= 2.0;
            }
            while c >= r * 2.0 {
                c /= 2.0;
                r *= 2.0;
                f /= 2.0;
            }
            if (c + r) < 0.95 * s {
                done = false;
                for j in 0..n {
                    m[(i, j)] /= f;
                    m[(j, i)] *= f;
                }
            }
        }
    }
}

const REPORTED: usize = 6;

struct EllSolve {
    table: ModeTable,
    dropped: usize,
}

fn solve_ell(spec: &CapSpec, ell: u32) -> Result<EllSolve, CapError> {
    let op = radial_operator(spec, ell)?;
    let n = spec.nodes;
    let last = n - 1;
    let interior = 1..last;
    let regular = |row: &mut [f64]| {
        if ell == 0 {
            for (j, v) in row.iter_mut().enumerate() {
                *v = op.d1[(0, j)];
            }
        } else {
            row[0] = 1.0;
        }
    };
    let unit = |width: usize, at: usize| {
        let mut row = vec![0.0; width];
        row[at] = 1.0;
        row
    };

    // Laplace: unknowns T.
    let mut lap = Pencil::new(n);
    let mut row = vec![0.0; n];
    regular(&mut row);
    lap.push(&row, None);
    lap.push(&unit(n, last), None);
    for i in interior.clone() {
        let row: Vec<f64> = (0..n).map(|j| -op.l[(i, j)]).collect();
        lap.push(&row, Some(&unit(n, i)));
    }
    let f_lap = lap.eigenvalues()?;

    // Mixed system: unknowns (T, V) with V = L T.
    let width = 2 * n;
    let mut algebraic: Vec<Vec<f64>> = Vec::new();
    for i in interior.clone() {
        let mut row = vec![0.0; width];
        for (j, r) in row[..n].iter_mut().enumerate() {
            *r = -op.l[(i, j)];
        }
        row[n + i] = 1.0;
        algebraic.push(row);
    }
    let mut row = vec![0.0; width];
    regular(&mut row[..n]);
    algebraic.push(row);
    algebraic.push(unit(width, last));
    let mut row = vec![0.0; width];
    regular(&mut row[n..]);
    algebraic.push(row);
    // Navier: T''(Theta) = 0, i.e. V(Theta) = (n-1) ct(Theta) T'(Theta).
    let mut row = unit(width, n + last);
    let n1 = spec.n as f64 - 1.0;
    for (j, r) in row[..n].iter_mut().enumerate() {
        *r -= n1 * op.ct_end * op.d1[(last, j)];
    }
    algebraic.push(row);
    let lv_row = |i: usize| {
        let mut row = vec![0.0; width];
        for j in 0..n {
            row[n + j] = op.l[(i, j)];
        }
        row
    };

    let mut gamma = Pencil::new(width);
    let mut big = Pencil::new(width);
    for row in &algebraic {
        gamma.push(row, None);
        big.push(row, None);
    }
    for i in interior {
        let lv = lv_row(i);
        gamma.push(&lv, Some(&unit(width, i)));
        let mut minus_v = vec![0.0; width];
        minus_v[n + i] = -1.0;
        big.push(&lv, Some(&minus_v));
    }
    let f_gamma = gamma.eigenvalues()?;
    let f_big = big.eigenvalues()?;

    let top = |v: Vec<f64>| v.into_iter().take(REPORTED).collect::<Vec<_>>();
    Ok(EllSolve {
        dropped: f_lap.dropped + f_gamma.dropped + f_big.dropped,
        table: ModeTable {
            ell,
            lambda: top(f_lap.values),
            gamma: top(f_gamma.values),
            lambda_big: top(f_big.values),
        },
    })
}

struct Sweep {
    per_ell: Vec<ModeTable>,
    mins: [f64; 3],
    argmin: [u32; 3],
    dropped: usize,
}

fn sweep(spec: &CapSpec) -> Result<Sweep, CapError> {
    spec.validate()?;
    let solved: Vec<EllSolve> = (0..=spec.ell_max)
        .map(|ell| solve_ell(spec, ell))
        .collect::<Result<_, _>>()?;
    let mut mins = [f64::INFINITY; 3];
    let mut argmin = [0u32; 3];
    for s in &solved {
        let firsts = [
            s.table.lambda.first(),
            s.table.gamma.first(),
            s.table.lambda_big.first(),
        ];
        for (q, v) in firsts.into_iter().enumerate() {
            if let Some(&v) = v {
                if v < mins[q] {
                    mins[q] = v;
                    argmin[q] = s.table.ell;
                }
            }
        }
    }
    if mins.iter().any(|m| !m.is_finite()) {
        return Err(CapError::NoEigenvalue);
    }
    Ok(Sweep {
        dropped: solved.iter().map(|s| s.dropped).sum(),
        per_ell: solved.into_iter().map(|s| s.table).collect(),
        mins,
        argmin,
    })
}

/// Full sweep at `N` plus a convergence probe at `N + 16`.
pub fn solve(spec: &CapSpec) -> Result<CapResult, CapError> {
    let base = sweep(spec)?;
    let refined_spec = spec.clone().with_nodes(spec.nodes + 16);
    let change = match sweep(&refined_spec) {
        Ok(r) => base
            .mins
            .iter()
            .zip(r.mins)
            .map(|(a, b)| (a - b).abs() / a.abs().max(1.0))
            .fold(0.0f64, f64::max),
        Err(_) => f64::INFINITY,
    };
    Ok(CapResult {
        spec: spec.clone(),
        per_ell: base.per_ell,
        lambda1: base.mins[0],
        gamma1: base.mins[1],
        lambda_big1: base.mins[2],
        argmin_ell: base.argmin,
        spurious_filtered: base.dropped,
        refinement_change: change,
        converged: change < CONVERGENCE_TOL,
    })
}

/// Solve many specs in parallel, preserving order.
pub fn solve_all(specs: &[CapSpec]) -> Vec<Result<CapResult, CapError>> {
    specs.par_iter().map(solve).collect()
}

fn checked(spec: &CapSpec, pick: usize, quantity: &'static str) -> Result<f64, CapError> {
    let r = solve(spec)?;
    if !r.converged {
        return Err(CapError::NonConvergence {
            quantity,
            change: r.refinement_change,
        });
    }
    Ok([r.lambda1, r.gamma1, r.lambda_big1][pick])
}

/// First Dirichlet eigenvalue of `-Lap` on the cap.
pub fn lambda1(spec: &CapSpec) -> Result<f64, CapError> {
    checked(spec, 0, "lambda1")
}

/// First Navier eigenvalue of `Lap^2 u = Gamma u`.
pub fn gamma1(spec: &CapSpec) -> Result<f64, CapError> {
    checked(spec, 1, "gamma1")
}

/// First Navier eigenvalue of `Lap^2 u = -Lambda Lap u`.
pub fn lambda_big1(spec: &CapSpec) -> Result<f64, CapError> {
    checked(spec, 2, "lambda_big1")
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, PI};

    fn apply(op: &RadialOperator, f: impl Fn(f64) -> f64) -> Vec<f64> {
        let v = nalgebra::DVector::from_iterator(op.nodes.len(), op.nodes.iter().map(|&r| f(r)));
        (&op.l * v).iter().copied().collect()
    }

    #[test]
    fn operator_on_closed_forms() {
        let spec = CapSpec::hemisphere(2);
        let op = radial_operator(&spec, 0).unwrap();
        let lt = apply(&op, f64::cos);
        for (i, &r) in op.nodes.iter().enumerate().skip(1) {
            assert!((lt[i] + 2.0 * r.cos()).abs() < 1e-8, "r={r}");
        }
        let spec = CapSpec::euclidean(3, 1.0);
        let op = radial_operator(&spec, 0).unwrap();
        let f = |r: f64| (PI * r).sin() / r;
        let lt = apply(&op, f);
        for (i, &r) in op.nodes.iter().enumerate().skip(1) {
            assert!((lt[i] + PI * PI * f(r)).abs() < 1e-7, "r={r}");
        }
        // ell = 1 on S^n: L sin r = -n sin r.
        for n in 2..=4 {
            let spec = CapSpec::sphere(n, 2.0);
            let op = radial_operator(&spec, 1).unwrap();
            let lt = apply(&op, f64::sin);
            for (i, &r) in op.nodes.iter().enumerate().skip(1) {
                assert!((lt[i] + n as f64 * r.sin()).abs() < 1e-8, "n={n} r={r}");
            }
        }
    }

    #[test]
    fn hemisphere_equalities() {
        for n in 2..=4 {
            let r = solve(&CapSpec::hemisphere(n)).unwrap();
            let nf = n as f64;
            assert!((r.lambda1 - nf).abs() < 1e-8, "n={n} {}", r.lambda1);
            assert!((r.gamma1 - nf * nf).abs() < 1e-6, "n={n} {}", r.gamma1);
            assert!((r.lambda_big1 - nf).abs() < 1e-6, "n={n} {}", r.lambda_big1);
            assert!(r.converged, "n={n} change {}", r.refinement_change);
        }
    }

    #[test]
    fn euclidean_disk() {
        let r = solve(&CapSpec::euclidean(2, 1.0)).unwrap();
        assert!((r.lambda1 - 5.783_185_962_946_784).abs() < 1e-8);
        assert_eq!(r.argmin_ell, [0, 0, 0]);
        // On the disk the radial Navier condition reduces to k J_0(k) = J_1(k),
        // the first Neumann root.
        assert!((r.lambda_big1 - 1.841_183_781_340_659f64.powi(2)).abs() < 1e-9);
        assert!(r.converged);
    }

    #[test]
    fn rejects_bad_specs() {
        assert!(CapSpec::sphere(2, PI).validate().is_err());
        assert!(CapSpec::sphere(2, FRAC_PI_2).with_nodes(8).validate().is_err());
        assert!(CapSpec::euclidean(1, 1.0).validate().is_err());
        let mut s = CapSpec::euclidean(2, 1.0);
        s.curvature = 2;
        assert!(s.validate().is_err());
    }

    #[test]
    fn hyperbolic_accepted() {
        let mut s = CapSpec::euclidean(2, 1.0);
        s.curvature = -1;
        let r = solve(&s).unwrap();
        assert!(r.lambda1 > 5.783_185_962_946_784);
    }
}
