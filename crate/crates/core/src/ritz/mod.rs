//! Constrained Rayleigh-Ritz solver for quotient eigenproblems on the ball
//! `B_R` with polynomial trial spaces.
//!
//! Every problem is a pair of exact symmetric forms `(A, B)` on a trial
//! space cut out by linear constraints. The pipeline is
//!
//! 1. exact null space of the constraints,
//! 2. exact removal of the kernel of `B` by static condensation of `A`,
//! 3. exact `L D L^T` of the condensed `B` and a float symmetric eigensolve
//!    (cyclic Jacobi) in the resulting orthonormal coordinates,
//! 4. exact Rayleigh quotients of the recovered eigenvectors.
//!
//! Rotation invariance splits the problem into blocks. The default trial
//! space uses one block per harmonic degree `k`, spanned by
//! `b(x) |x|^{2j} Y_k` with a fixed harmonic `Y_k`; eigenvalues of block `k`
//! carry multiplicity `mu(n, k)`. The monomial trial space spans the same
//! polynomials and is split into reflection-parity blocks instead.

pub mod jacobi;

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use num_traits::{Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::exact::{Ldlt, QMatrix};
use crate::harmonic::{mu, representative};
use crate::moments::{assemble_prepared, FormTag, Integrator, Prepared};
use crate::poly::{check_degree, check_dim, rational_from_f64, MultiIndex, MultiPoly, PolyError};
use crate::Rational;

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum RitzError {
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error("radius must be positive and finite, got {0}")]
    BadRadius(f64),
    #[error("beta must be finite and nonnegative, got {0}")]
    BadBeta(f64),
    #[error("{kind} needs degree at least {min}, got {degree}")]
    DegreeTooSmall {
        kind: ProblemKind,
        degree: u32,
        min: u32,
    },
    #[error("admissible space is empty after constraints and deflation")]
    EmptyAfterDeflation,
    #[error("numerator form is indefinite on the admissible space (eigenvalue {value:e})")]
    IndefiniteNumerator { value: f64 },
    #[error("unknown problem kind {0:?}")]
    UnknownKind(String),
}

/// The quotient eigenproblems solved on `B_R`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ProblemKind {
    /// `int (Lap u)^2 / int_S (du/dnu)^2` over `u = 0` on `S`.
    PSteklov,
    /// Hessian energy over `int_S (du/dnu)^2`, `u = 0` on `S`.
    QSteklov,
    /// `int (Lap u)^2 / int_S u^2` over `du/dnu = 0` on `S`, `int_S u = 0`.
    XiSteklov,
    /// `(int (Lap u)^2 + beta int_S |grad_S u|^2) / int_S u^2`, same constraints
    /// as `XiSteklov`.
    Wentzell,
    /// Hessian energy over `int u^2`, `u = 0` on `S`.
    GammaNavier,
    /// Hessian energy over `int |grad u|^2`, `u = 0` on `S`.
    LambdaNavier,
    /// `int (Lap u)^2 / int u^2` over `u = du/dnu = 0` on `S`.
    Clamped,
    /// `int (Lap u)^2 / int |grad u|^2` over `u = du/dnu = 0` on `S`.
    Buckling,
    /// `int |grad u|^2 / int u^2` over `u = 0` on `S`.
    LapDirichlet,
    /// `int |grad u|^2 / int u^2` over `int u = 0`.
    LapNeumann,
}

impl ProblemKind {
    pub const ALL: [ProblemKind; 10] = [
        ProblemKind::PSteklov,
        ProblemKind::QSteklov,
        ProblemKind::XiSteklov,
        ProblemKind::Wentzell,
        ProblemKind::GammaNavier,
        ProblemKind::LambdaNavier,
        ProblemKind::Clamped,
        ProblemKind::Buckling,
        ProblemKind::LapDirichlet,
        ProblemKind::LapNeumann,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ProblemKind::PSteklov => "P_STEKLOV",
            ProblemKind::QSteklov => "Q_STEKLOV",
            ProblemKind::XiSteklov => "XI_STEKLOV",
            ProblemKind::Wentzell => "WENTZELL",
            ProblemKind::GammaNavier => "GAMMA_NAVIER",
            ProblemKind::LambdaNavier => "LAMBDA_NAVIER",
            ProblemKind::Clamped => "CLAMPED",
            ProblemKind::Buckling => "BUCKLING",
            ProblemKind::LapDirichlet => "LAP_DIRICHLET",
            ProblemKind::LapNeumann => "LAP_NEUMANN",
        }
    }

    /// Smallest total degree with a nontrivial admissible space.
    pub fn min_degree(self) -> u32 {
        match self {
            ProblemKind::LapNeumann => 1,
            ProblemKind::XiSteklov | ProblemKind::Wentzell => 3,
            ProblemKind::Clamped | ProblemKind::Buckling => 4,
            _ => 2,
        }
    }

    /// Power of `|x|^2 - R^2` dividing every trial function.
    pub fn bubble_power(self) -> u32 {
        match self {
            ProblemKind::XiSteklov | ProblemKind::Wentzell | ProblemKind::LapNeumann => 0,
            ProblemKind::Clamped | ProblemKind::Buckling => 2,
            _ => 1,
        }
    }
}

impl fmt::Display for ProblemKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ProblemKind {
    type Err = RitzError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let key = s.trim().to_ascii_uppercase().replace('-', "_");
        let found = ProblemKind::ALL.into_iter().find(|k| {
            let name = k.name();
            key == name || name.split('_').next() == Some(key.as_str())
        });
        found.ok_or_else(|| RitzError::UnknownKind(s.to_string()))
    }
}

/// One eigenproblem instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProblemSpec {
    pub kind: ProblemKind,
    pub n: usize,
    pub radius: f64,
    /// Total polynomial degree of the trial space.
    pub degree: u32,
    /// Boundary stiffness, used by `Wentzell` only.
    pub beta: f64,
}

impl ProblemSpec {
    /// Unit ball, `beta = 0`, default degree 12 for `n <= 3` and 8 above.
    pub fn new(kind: ProblemKind, n: usize) -> Self {
        ProblemSpec {
            kind,
            n,
            radius: 1.0,
            degree: default_degree(n),
            beta: 0.0,
        }
    }

    pub fn with_radius(mut self, radius: f64) -> Self {
        self.radius = radius;
        self
    }

    pub fn with_degree(mut self, degree: u32) -> Self {
        self.degree = degree;
        self
    }

    pub fn with_beta(mut self, beta: f64) -> Self {
        self.beta = beta;
        self
    }

    pub fn validate(&self) -> Result<(), RitzError> {
        check_dim(self.n)?;
        check_degree(self.degree)?;
        if !(self.radius.is_finite() && self.radius > 0.0) {
            return Err(RitzError::BadRadius(self.radius));
        }
        if !(self.beta.is_finite() && self.beta >= 0.0) {
            return Err(RitzError::BadBeta(self.beta));
        }
        let min = self.kind.min_degree();
        if self.degree < min {
            return Err(RitzError::DegreeTooSmall {
                kind: self.kind,
                degree: self.degree,
                min,
            });
        }
        Ok(())
    }
}

pub fn default_degree(n: usize) -> u32 {
    if n <= 3 {
        12
    } else {
        8
    }
}

/// `Q_1 = P_1 - (n - 1)/R` on the ball of radius `R`.
pub fn q_from_p(p1: f64, n: usize, radius: f64) -> f64 {
    p1 - (n as f64 - 1.0) / radius
}

/// Trial basis with the linear constraints its admissible combinations must
/// satisfy (`constraints * coeffs = 0`).
#[derive(Debug, Clone)]
pub struct TrialSpace {
    pub basis: Vec<MultiPoly>,
    pub constraints: QMatrix,
}

/// Which symmetry block a trial space belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "type", content = "value")]
pub enum BlockLabel {
    /// All trial functions of the form `b |x|^{2j} Y_k`.
    Harmonic(u32),
    /// Monomials with this bitmask of odd exponents.
    Parity(u8),
}

#[derive(Debug, Clone)]
pub struct TrialBlock {
    pub label: BlockLabel,
    /// Multiplicity attached to each eigenvalue of this block.
    pub multiplicity: u64,
    pub space: TrialSpace,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BasisKind {
    #[default]
    Harmonic,
    Monomial,
}

fn bubble(n: usize, r_sq: &Rational, power: u32) -> MultiPoly {
    let b = MultiPoly::norm_sq(n) - MultiPoly::constant(n, r_sq.clone());
    b.pow(power)
}

fn r_sq(spec: &ProblemSpec) -> Rational {
    let r = rational_from_f64(spec.radius);
    &r * &r
}

/// Constraint rows for `basis`: coefficients of the sphere reduction of
/// `E u` (Neumann-type problems) plus a mean-zero row.
fn constraints_for(kind: ProblemKind, integ: &Integrator, basis: &[MultiPoly]) -> QMatrix {
    let r_sq = integ.radius() * integ.radius();
    match kind {
        ProblemKind::XiSteklov | ProblemKind::Wentzell => {
            let reduced: Vec<MultiPoly> = basis
                .iter()
                .map(|b| b.euler().sphere_reduce_radius(&r_sq).sum())
                .collect();
            let mut keys: Vec<MultiIndex> = reduced
                .iter()
                .flat_map(|p| p.terms().map(|(m, _)| *m))
                .collect();
            keys.sort();
            keys.dedup();
            let mut rows: Vec<Vec<Rational>> = keys
                .iter()
                .map(|m| reduced.iter().map(|p| p.coeff(m)).collect())
                .collect();
            rows.push(basis.iter().map(|b| integ.sphere(b)).collect());
            QMatrix::from_rows(rows)
        }
        ProblemKind::LapNeumann => {
            QMatrix::from_rows(vec![basis.iter().map(|b| integ.ball(b)).collect()])
        }
        _ => QMatrix::zeros(0, basis.len()),
    }
}

/// Monomial trial space: `(|x|^2 - R^2)^p m` over all monomials `m` with
/// `p + deg m <= degree` (`p` the bubble power), with its constraint rows.
pub fn trial_space(spec: &ProblemSpec) -> Result<TrialSpace, RitzError> {
    spec.validate()?;
    let integ = Integrator::new(spec.n, rational_from_f64(spec.radius));
    let basis = monomial_basis(spec, None);
    let constraints = constraints_for(spec.kind, &integ, &basis);
    Ok(TrialSpace { basis, constraints })
}

fn monomial_basis(spec: &ProblemSpec, parity: Option<u8>) -> Vec<MultiPoly> {
    let p = spec.kind.bubble_power();
    let b = bubble(spec.n, &r_sq(spec), p);
    MultiIndex::all_up_to(spec.n, spec.degree - 2 * p)
        .into_iter()
        .filter(|m| parity.is_none_or(|q| m.parity() == q))
        .map(|m| &b * &MultiPoly::monomial(m, Rational::from_integer(1.into())))
        .collect()
}

/// The trial space split into independent symmetry blocks.
pub fn trial_blocks(spec: &ProblemSpec, kind: BasisKind) -> Result<Vec<TrialBlock>, RitzError> {
    spec.validate()?;
    let integ = Integrator::new(spec.n, rational_from_f64(spec.radius));
    Ok(blocks_with(spec, kind, &integ))
}

fn blocks_with(spec: &ProblemSpec, kind: BasisKind, integ: &Integrator) -> Vec<TrialBlock> {
    let n = spec.n;
    let p = spec.kind.bubble_power();
    let free = spec.degree - 2 * p;
    match kind {
        BasisKind::Harmonic => {
            let b = bubble(n, &r_sq(spec), p);
            let rho = MultiPoly::norm_sq(n);
            (0..=free)
                .map(|k| {
                    let mut f = &b * &representative(n, k);
                    let mut basis = Vec::new();
                    for _ in 0..=(free - k) / 2 {
                        basis.push(f.clone());
                        f = &f * &rho;
                    }
                    let constraints = constraints_for(spec.kind, integ, &basis);
                    TrialBlock {
                        label: BlockLabel::Harmonic(k),
                        multiplicity: mu(n, k),
                        space: TrialSpace { basis, constraints },
                    }
                })
                .collect()
        }
        BasisKind::Monomial => {
            let mut parities: Vec<u8> = MultiIndex::all_up_to(n, free)
                .iter()
                .map(|m| m.parity())
                .collect();
            parities.sort_unstable();
            parities.dedup();
            parities
                .into_iter()
                .map(|q| {
                    let basis = monomial_basis(spec, Some(q));
                    let constraints = constraints_for(spec.kind, integ, &basis);
                    TrialBlock {
                        label: BlockLabel::Parity(q),
                        multiplicity: 1,
                        space: TrialSpace { basis, constraints },
                    }
                })
                .collect()
        }
    }
}

/// Exact numerator and denominator matrices over a basis, as coefficients of
/// a common `pi^pi_power`.
#[derive(Debug, Clone)]
pub struct QuadFormPair {
    pub numerator: QMatrix,
    pub denominator: QMatrix,
    pub pi_power: u32,
}

fn pair_with(spec: &ProblemSpec, integ: &Integrator, basis: &[MultiPoly]) -> QuadFormPair {
    let prepared: Vec<Prepared> = basis.iter().map(Prepared::new).collect();
    let form = |tag| assemble_prepared(integ, tag, &prepared);
    let curvature_term = || {
        let c = Rational::from_integer((spec.n as i64 - 1).into()) / integ.radius();
        form(FormTag::VolBilap).add(&form(FormTag::BdryNormal).scale(&-c))
    };
    let (numerator, denominator) = match spec.kind {
        ProblemKind::PSteklov => (form(FormTag::VolBilap), form(FormTag::BdryNormal)),
        ProblemKind::QSteklov => (curvature_term(), form(FormTag::BdryNormal)),
        ProblemKind::XiSteklov => (form(FormTag::VolBilap), form(FormTag::BdryMass)),
        ProblemKind::Wentzell => {
            let beta = rational_from_f64(spec.beta);
            let num = if beta.is_zero() {
                form(FormTag::VolBilap)
            } else {
                form(FormTag::VolBilap).add(&form(FormTag::BdryTangent).scale(&beta))
            };
            (num, form(FormTag::BdryMass))
        }
        ProblemKind::GammaNavier => (curvature_term(), form(FormTag::VolMass)),
        ProblemKind::LambdaNavier => (curvature_term(), form(FormTag::VolDirichlet)),
        ProblemKind::Clamped => (form(FormTag::VolBilap), form(FormTag::VolMass)),
        ProblemKind::Buckling => (form(FormTag::VolBilap), form(FormTag::VolDirichlet)),
        ProblemKind::LapDirichlet | ProblemKind::LapNeumann => {
            (form(FormTag::VolDirichlet), form(FormTag::VolMass))
        }
    };
    QuadFormPair {
        numerator,
        denominator,
        pi_power: integ.pi_power(),
    }
}

/// Exact quotient forms of `spec` over `basis`.
pub fn quotient_forms(spec: &ProblemSpec, basis: &[MultiPoly]) -> Result<QuadFormPair, RitzError> {
    spec.validate()?;
    for b in basis {
        if b.dim() != spec.n {
            return Err(PolyError::DimensionMismatch {
                left: b.dim(),
                right: spec.n,
            }
            .into());
        }
    }
    let integ = Integrator::new(spec.n, rational_from_f64(spec.radius));
    Ok(pair_with(spec, &integ, basis))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveOptions {
    pub basis: BasisKind,
    /// Number of eigenvalues (counted with multiplicity) to report.
    pub max_eigenvalues: usize,
    /// Lowest modes per block whose eigenvalue is refined by an exact
    /// Rayleigh quotient.
    pub refine_per_block: usize,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            basis: BasisKind::Harmonic,
            max_eigenvalues: 10,
            refine_per_block: 8,
        }
    }
}

/// One computed eigenpair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Mode {
    pub value: f64,
    pub multiplicity: u64,
    pub block: BlockLabel,
    /// Coefficients in the block's trial basis, normalized so the
    /// denominator form equals `pi^pi_power`, first significant entry
    /// positive.
    pub coefficients: Vec<f64>,
    #[serde(with = "poly_text")]
    pub function: MultiPoly,
}

mod poly_text {
    use super::MultiPoly;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(p: &MultiPoly, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(p)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<MultiPoly, D::Error> {
        let text = String::deserialize(d)?;
        let dim = text
            .split(|c: char| !c.is_ascii_alphanumeric())
            .filter_map(|t| t.strip_prefix('x'))
            .filter_map(|t| t.split('^').next()?.parse::<usize>().ok())
            .max()
            .unwrap_or(2)
            .max(2);
        MultiPoly::parse(dim, &text).map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralResult {
    pub spec: ProblemSpec,
    /// Ascending, repeated according to multiplicity.
    pub eigenvalues: Vec<f64>,
    /// Distinct modes in the same order.
    pub modes: Vec<Mode>,
    /// Dimension of the denominator kernel removed from the admissible space.
    pub deflation_rank: usize,
    /// Largest relative constraint violation over reported modes.
    pub constraint_residual: f64,
    /// Ratio of the extreme pivots of the condensed denominator.
    pub condition_diag: f64,
}

impl SpectralResult {
    pub fn first(&self) -> f64 {
        self.eigenvalues[0]
    }
}

struct BlockOutcome {
    modes: Vec<Mode>,
    multiplicity: u64,
    deflated: usize,
    residual: f64,
    pivot_min: f64,
    pivot_max: f64,
}

/// Columns of `P` such that `x = P y` parametrizes the `A`-orthogonal
/// complement of `ker B` (static condensation).
fn condense(a: &QMatrix, b: &QMatrix) -> Result<(QMatrix, usize), RitzError> {
    let m = b.rows();
    let kernel = b.null_space();
    let k = kernel.cols();
    if k == 0 {
        return Ok((QMatrix::identity(m), 0));
    }
    let mut echelon = b.clone();
    let pivots = echelon.rref();
    let mut w = QMatrix::zeros(m, pivots.len());
    for (c, &p) in pivots.iter().enumerate() {
        w[(p, c)] = Rational::from_integer(1.into());
    }
    let a_nn = a.congruence(&kernel);
    if Ldlt::positive_definite(&a_nn).is_none() {
        return Err(RitzError::IndefiniteNumerator { value: 0.0 });
    }
    let a_nw = kernel.transpose().mul(a).mul(&w);
    // Solve a_nn X = a_nw exactly.
    let mut aug = QMatrix::zeros(k, k + w.cols());
    for i in 0..k {
        for j in 0..k {
            aug[(i, j)] = a_nn[(i, j)].clone();
        }
        for j in 0..w.cols() {
            aug[(i, k + j)] = a_nw[(i, j)].clone();
        }
    }
    aug.rref();
    let mut x = QMatrix::zeros(k, w.cols());
    for i in 0..k {
        for j in 0..w.cols() {
            x[(i, j)] = aug[(i, k + j)].clone();
        }
    }
    let p = w.add(&kernel.mul(&x).scale(&Rational::from_integer((-1).into())));
    Ok((p, k))
}

fn solve_block(
    spec: &ProblemSpec,
    integ: &Integrator,
    block: &TrialBlock,
    opts: &SolveOptions,
) -> Result<Option<BlockOutcome>, RitzError> {
    let basis = &block.space.basis;
    let m = basis.len();
    if m == 0 {
        return Ok(None);
    }
    let c = &block.space.constraints;
    let z = if c.rows() == 0 || c.is_zero() {
        QMatrix::identity(m)
    } else {
        c.null_space()
    };
    if z.cols() == 0 {
        return Ok(None);
    }
    let pair = pair_with(spec, integ, basis);
    let a_z = pair.numerator.congruence(&z);
    let b_z = pair.denominator.congruence(&z);
    let (p, deflated) = condense(&a_z, &b_z)?;
    if p.cols() == 0 {
        return Ok(Some(BlockOutcome {
            modes: Vec::new(),
            multiplicity: block.multiplicity,
            deflated,
            residual: 0.0,
            pivot_min: f64::INFINITY,
            pivot_max: 0.0,
        }));
    }
    let a_c = a_z.congruence(&p);
    let b_c = b_z.congruence(&p);
    let ldlt = Ldlt::positive_definite(&b_c).expect("condensed denominator is positive definite");
    let linv = ldlt.l_inverse();
    let g = a_c.congruence(&linv.transpose());
    let scale: Vec<f64> = ldlt
        .d
        .iter()
        .map(|d| 1.0 / d.to_f64().unwrap_or(f64::NAN).sqrt())
        .collect();
    let r = g.rows();
    let gf = g.to_f64();
    let cmat = DMatrix::from_fn(r, r, |i, j| gf[(i, j)] * scale[i] * scale[j]);
    let eig = jacobi::eigh(&cmat);
    let top = eig.values.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
    if let Some(&low) = eig.values.first() {
        if low < -1e-10 * top {
            return Err(RitzError::IndefiniteNumerator { value: low });
        }
    }
    // x = Z P L^{-T} D^{-1/2} y'
    let back = z.mul(&p).mul(&linv.transpose()).to_f64();
    let c_f = c.to_f64();
    let c_scale = c_f.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
    let mut modes = Vec::with_capacity(r);
    let mut residual = 0.0f64;
    for j in 0..r {
        let y: Vec<f64> = (0..r).map(|i| eig.vectors[(i, j)] * scale[i]).collect();
        let yv = nalgebra::DVector::from_vec(y.clone());
        let mut x: Vec<f64> = (&back * &yv).iter().copied().collect();
        let xmax = x.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
        if let Some(first) = x.iter().find(|v| v.abs() > 1e-12 * xmax) {
            if *first < 0.0 {
                x.iter_mut().for_each(|v| *v = -*v);
            }
        }
        let mut value = eig.values[j];
        if j < opts.refine_per_block {
            let lt_y: Vec<Rational> = linv
                .transpose()
                .mul_vec(&y.iter().map(|&v| rational_from_f64(v)).collect::<Vec<_>>());
            let num = a_c.quadratic_form(&lt_y);
            let den = b_c.quadratic_form(&lt_y);
            if den.is_positive() {
                value = (num / den).to_f64().unwrap_or(value);
            }
        }
        if c.rows() > 0 && c_scale > 0.0 && xmax > 0.0 {
            let cx = &c_f * nalgebra::DVector::from_vec(x.clone());
            let worst = cx.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
            residual = residual.max(worst / (c_scale * xmax * m as f64));
        }
        let function = MultiPoly::linear_combination(spec.n, basis, &x);
        modes.push(Mode {
            value,
            multiplicity: block.multiplicity,
            block: block.label,
            coefficients: x,
            function,
        });
    }
    let pivots: Vec<f64> = ldlt.d.iter().map(|d| d.to_f64().unwrap_or(f64::NAN)).collect();
    Ok(Some(BlockOutcome {
        modes,
        multiplicity: block.multiplicity,
        deflated,
        residual,
        pivot_min: pivots.iter().copied().fold(f64::INFINITY, f64::min),
        pivot_max: pivots.iter().copied().fold(0.0, f64::max),
    }))
}

fn lexicographic(a: &[f64], b: &[f64]) -> std::cmp::Ordering {
    for (x, y) in a.iter().zip(b) {
        let o = x.total_cmp(y);
        if o.is_ne() {
            return o;
        }
    }
    a.len().cmp(&b.len())
}

pub fn solve(spec: &ProblemSpec) -> Result<SpectralResult, RitzError> {
    solve_with(spec, &SolveOptions::default())
}

pub fn solve_with(spec: &ProblemSpec, opts: &SolveOptions) -> Result<SpectralResult, RitzError> {
    spec.validate()?;
    let integ = Integrator::new(spec.n, rational_from_f64(spec.radius));
    let blocks = blocks_with(spec, opts.basis, &integ);
    let outcomes: Vec<Option<BlockOutcome>> = blocks
        .par_iter()
        .map(|b| solve_block(spec, &integ, b, opts))
        .collect::<Result<_, _>>()?;
    let mut modes = Vec::new();
    let mut deflation_rank = 0;
    let mut residual = 0.0f64;
    let (mut pmin, mut pmax) = (f64::INFINITY, 0.0f64);
    for o in outcomes.into_iter().flatten() {
        deflation_rank += o.deflated * o.multiplicity as usize;
        residual = residual.max(o.residual);
        pmin = pmin.min(o.pivot_min);
        pmax = pmax.max(o.pivot_max);
        modes.extend(o.modes);
    }
    if modes.is_empty() {
        return Err(RitzError::EmptyAfterDeflation);
    }
    modes.sort_by(|a, b| {
        a.value
            .total_cmp(&b.value)
            .then(a.block.cmp(&b.block))
            .then_with(|| lexicographic(&a.coefficients, &b.coefficients))
    });
    let mut eigenvalues = Vec::new();
    let mut kept = Vec::new();
    for mode in modes {
        if eigenvalues.len() >= opts.max_eigenvalues {
            break;
        }
        let take = (mode.multiplicity as usize).min(opts.max_eigenvalues - eigenvalues.len());
        eigenvalues.extend(std::iter::repeat_n(mode.value, take));
        kept.push(mode);
    }
    Ok(SpectralResult {
        spec: spec.clone(),
        eigenvalues,
        modes: kept,
        deflation_rank,
        constraint_residual: residual,
        condition_diag: if pmin > 0.0 { pmax / pmin } else { f64::INFINITY },
    })
}

/// First eigenvalue at each trial degree.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub degree: u32,
    pub first: f64,
}

pub fn degree_sweep(
    spec: &ProblemSpec,
    degrees: impl IntoIterator<Item = u32>,
    opts: &SolveOptions,
) -> Result<Vec<SweepPoint>, RitzError> {
    degrees
        .into_iter()
        .map(|d| {
            let s = spec.clone().with_degree(d);
            let r = solve_with(&s, opts)?;
            Ok(SweepPoint {
                degree: d,
                first: r.first(),
            })
        })
        .collect()
}
