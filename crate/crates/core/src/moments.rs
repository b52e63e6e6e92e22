//! Exact integrals of polynomials over balls and spheres of radius `R`, and
//! assembly of the bilinear forms used by the Ritz solver.
//!
//! Every monomial moment in dimension `n` is a rational multiple of
//! `pi^{floor(n/2)}`, so integrals are carried as the rational coefficient of
//! that common power and ratios of forms are rational.

use std::collections::HashMap;
use std::sync::Mutex;

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::exact::QMatrix;
use crate::poly::{integer_form, max_bits, rational_from_f64, MultiIndex, MultiPoly};
use crate::Rational;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum FormError {
    #[error("radius must be positive and finite, got {0}")]
    BadRadius(f64),
    #[error("basis element {index} has dimension {found}, expected {expected}")]
    DimensionMismatch {
        index: usize,
        found: usize,
        expected: usize,
    },
}

/// `rational * pi^pi_power`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Moment {
    pub rational: Rational,
    pub pi_power: u32,
}

impl Moment {
    pub fn to_f64(&self) -> f64 {
        self.rational.to_f64().unwrap_or(f64::NAN) * std::f64::consts::PI.powi(self.pi_power as i32)
    }
}

pub fn pi_power(dim: usize) -> u32 {
    (dim / 2) as u32
}

fn factorial(n: u32) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * k)
}

/// `Gamma(m + 1/2) / sqrt(pi) = (2m)! / (4^m m!)`.
fn half_gamma(m: u32) -> Rational {
    Rational::new(factorial(2 * m), BigInt::from(4).pow(m) * factorial(m))
}

/// Rational part of `int_{S^{n-1}} x^alpha dS`.
fn sphere_moment_rational(alpha: &MultiIndex) -> Rational {
    if !alpha.is_even() {
        return Rational::zero();
    }
    let n = alpha.dim() as u32;
    let half: u32 = alpha.degree() / 2;
    let mut num = Rational::from_integer(2.into());
    for &e in alpha.exps() {
        num *= half_gamma(e as u32 / 2);
    }
    let den = if n.is_multiple_of(2) {
        Rational::from_integer(factorial(half + n / 2 - 1))
    } else {
        half_gamma(half + (n - 1) / 2)
    };
    num / den
}

/// `int_{S^{n-1}} x^alpha dS` over the unit sphere.
pub fn sphere_moment(alpha: &MultiIndex) -> Moment {
    Moment {
        rational: sphere_moment_rational(alpha),
        pi_power: pi_power(alpha.dim()),
    }
}

/// `int_{B_R} x^alpha dx = R^{n+|alpha|} sphere_moment(alpha) / (n + |alpha|)`.
pub fn ball_moment(alpha: &MultiIndex, radius: &Rational) -> Moment {
    let k = alpha.dim() as u32 + alpha.degree();
    Moment {
        rational: sphere_moment_rational(alpha) * num_traits::pow(radius.clone(), k as usize)
            / Rational::from_integer(k.into()),
        pi_power: pi_power(alpha.dim()),
    }
}

/// Exact integration over `B_R` and `S_R` in a fixed dimension. Results are
/// the rational coefficient of `pi^{floor(n/2)}`.
#[derive(Debug)]
pub struct Integrator {
    dim: usize,
    radius: Rational,
    cache: Mutex<HashMap<MultiIndex, Rational>>,
}

#[derive(Clone, Copy)]
enum Domain {
    Ball,
    Sphere,
}

impl Integrator {
    pub fn new(dim: usize, radius: Rational) -> Self {
        Integrator {
            dim,
            radius,
            cache: Mutex::new(HashMap::new()),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn radius(&self) -> &Rational {
        &self.radius
    }

    pub fn pi_power(&self) -> u32 {
        pi_power(self.dim)
    }

    fn unit_sphere(&self, alpha: &MultiIndex) -> Rational {
        if let Some(v) = self.cache.lock().expect("moment cache poisoned").get(alpha) {
            return v.clone();
        }
        let v = sphere_moment_rational(alpha);
        self.cache
            .lock()
            .expect("moment cache poisoned")
            .insert(*alpha, v.clone());
        v
    }

    fn weight(&self, alpha: &MultiIndex, domain: Domain) -> Rational {
        let s = self.unit_sphere(alpha);
        if s.is_zero() {
            return s;
        }
        let deg = alpha.degree() as usize;
        match domain {
            Domain::Ball => {
                let k = self.dim + deg;
                s * num_traits::pow(self.radius.clone(), k) / Rational::from_integer(k.into())
            }
            Domain::Sphere => s * num_traits::pow(self.radius.clone(), self.dim - 1 + deg),
        }
    }

    fn single(&self, p: &MultiPoly, domain: Domain) -> Rational {
        assert_eq!(p.dim(), self.dim);
        p.terms()
            .filter(|(m, _)| m.is_even())
            .fold(Rational::zero(), |acc, (m, c)| acc + c * self.weight(m, domain))
    }

    /// `int_{B_R} p`.
    pub fn ball(&self, p: &MultiPoly) -> Rational {
        self.single(p, Domain::Ball)
    }

    /// `int_{S_R} p dS`.
    pub fn sphere(&self, p: &MultiPoly) -> Rational {
        self.single(p, Domain::Sphere)
    }

    /// `int_{B_R} p q` without forming the product polynomial.
    pub fn ball_product(&self, p: &MultiPoly, q: &MultiPoly) -> Rational {
        self.product(p, q, Domain::Ball)
    }

    /// `int_{S_R} p q dS`.
    pub fn sphere_product(&self, p: &MultiPoly, q: &MultiPoly) -> Rational {
        self.product(p, q, Domain::Sphere)
    }

    fn product(&self, p: &MultiPoly, q: &MultiPoly, domain: Domain) -> Rational {
        assert_eq!(p.dim(), self.dim);
        assert_eq!(q.dim(), self.dim);
        if p.is_zero() || q.is_zero() {
            return Rational::zero();
        }
        let (lp, tp) = integer_form(p);
        let (lq, tq) = integer_form(q);
        // Bucket q by parity: only equal-parity pairs give even exponents.
        let mut by_parity: HashMap<u8, Vec<(MultiIndex, BigInt)>> = HashMap::new();
        for (m, c) in tq.iter() {
            by_parity.entry(m.parity()).or_default().push((*m, c.clone()));
        }
        let small = max_bits(&tp) <= 50 && max_bits(&tq) <= 50;
        let mut acc: HashMap<MultiIndex, BigInt> = HashMap::new();
        if small {
            let mut acc_small: HashMap<MultiIndex, i128> = HashMap::new();
            for (ma, ca) in &tp {
                let Some(bucket) = by_parity.get(&ma.parity()) else {
                    continue;
                };
                let ca = ca.to_i128().expect("fits");
                for (mb, cb) in bucket {
                    let cb = cb.to_i128().expect("fits");
                    *acc_small.entry(ma.plus(mb)).or_insert(0) += ca * cb;
                }
            }
            acc.extend(acc_small.into_iter().map(|(k, v)| (k, BigInt::from(v))));
        } else {
            for (ma, ca) in &tp {
                let Some(bucket) = by_parity.get(&ma.parity()) else {
                    continue;
                };
                for (mb, cb) in bucket {
                    *acc.entry(ma.plus(mb)).or_insert_with(BigInt::zero) += ca * cb;
                }
            }
        }
        let mut keys: Vec<_> = acc.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        keys.sort_by_key(|a| a.0);
        let sum = keys.into_iter().fold(Rational::zero(), |s, (m, c)| {
            s + self.weight(&m, domain) * Rational::from_integer(c)
        });
        sum / Rational::from_integer(lp * lq)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum FormTag {
    /// `int_B u v`
    VolMass,
    /// `int_B <grad u, grad v>`
    VolDirichlet,
    /// `int_B Lap u Lap v`
    VolBilap,
    /// `int_S u v`
    BdryMass,
    /// `int_S du/dnu dv/dnu`
    BdryNormal,
    /// `int_S <tangential grad u, tangential grad v>`
    BdryTangent,
}

impl FormTag {
    pub const ALL: [FormTag; 6] = [
        FormTag::VolMass,
        FormTag::VolDirichlet,
        FormTag::VolBilap,
        FormTag::BdryMass,
        FormTag::BdryNormal,
        FormTag::BdryTangent,
    ];
}

#[derive(Debug, Clone, PartialEq)]
pub struct FormKind {
    pub tag: FormTag,
    pub radius: Rational,
}

impl FormKind {
    pub fn new(tag: FormTag, radius: f64) -> Result<Self, FormError> {
        if !(radius.is_finite() && radius > 0.0) {
            return Err(FormError::BadRadius(radius));
        }
        Ok(FormKind {
            tag,
            radius: rational_from_f64(radius),
        })
    }

    pub fn unit(tag: FormTag) -> Self {
        FormKind {
            tag,
            radius: Rational::one(),
        }
    }
}

/// Exact symmetric form matrix, `matrix * pi^pi_power`.
#[derive(Debug, Clone, PartialEq)]
pub struct FormMatrix {
    pub matrix: QMatrix,
    pub pi_power: u32,
}

impl FormMatrix {
    pub fn to_f64(&self) -> nalgebra::DMatrix<f64> {
        self.matrix.to_f64() * std::f64::consts::PI.powi(self.pi_power as i32)
    }
}

/// Derived polynomials of one basis element, computed once per assembly.
pub(crate) struct Prepared {
    pub poly: MultiPoly,
    pub lap: MultiPoly,
    pub euler: MultiPoly,
    pub grad: Vec<MultiPoly>,
}

impl Prepared {
    pub fn new(p: &MultiPoly) -> Self {
        Prepared {
            poly: p.clone(),
            lap: p.laplacian(),
            euler: p.euler(),
            grad: p.gradient(),
        }
    }
}

pub(crate) fn form_entry(integ: &Integrator, tag: FormTag, u: &Prepared, v: &Prepared) -> Rational {
    let r_sq = integ.radius() * integ.radius();
    match tag {
        FormTag::VolMass => integ.ball_product(&u.poly, &v.poly),
        FormTag::VolDirichlet => u
            .grad
            .iter()
            .zip(&v.grad)
            .fold(Rational::zero(), |acc, (a, b)| acc + integ.ball_product(a, b)),
        FormTag::VolBilap => integ.ball_product(&u.lap, &v.lap),
        FormTag::BdryMass => integ.sphere_product(&u.poly, &v.poly),
        // On S_R the outward normal derivative is E/R.
        FormTag::BdryNormal => integ.sphere_product(&u.euler, &v.euler) / r_sq,
        FormTag::BdryTangent => {
            let full = u
                .grad
                .iter()
                .zip(&v.grad)
                .fold(Rational::zero(), |acc, (a, b)| acc + integ.sphere_product(a, b));
            full - integ.sphere_product(&u.euler, &v.euler) / r_sq
        }
    }
}

pub(crate) fn assemble_prepared(integ: &Integrator, tag: FormTag, basis: &[Prepared]) -> QMatrix {
    let m = basis.len();
    let rows: Vec<Vec<Rational>> = (0..m)
        .into_par_iter()
        .map(|i| {
            (0..=i)
                .map(|j| form_entry(integ, tag, &basis[i], &basis[j]))
                .collect()
        })
        .collect();
    let mut out = QMatrix::zeros(m, m);
    for (i, row) in rows.into_iter().enumerate() {
        for (j, v) in row.into_iter().enumerate() {
            out[(j, i)] = v.clone();
            out[(i, j)] = v;
        }
    }
    out
}

pub(crate) fn check_basis(dim: usize, basis: &[MultiPoly]) -> Result<(), FormError> {
    for (index, b) in basis.iter().enumerate() {
        if b.dim() != dim {
            return Err(FormError::DimensionMismatch {
                index,
                found: b.dim(),
                expected: dim,
            });
        }
    }
    Ok(())
}

/// Exact matrix of the form `kind` over `basis`.
pub fn assemble(kind: &FormKind, basis: &[MultiPoly]) -> Result<FormMatrix, FormError> {
    let Some(first) = basis.first() else {
        return Ok(FormMatrix {
            matrix: QMatrix::zeros(0, 0),
            pi_power: 0,
        });
    };
    let dim = first.dim();
    check_basis(dim, basis)?;
    let integ = Integrator::new(dim, kind.radius.clone());
    let prepared: Vec<Prepared> = basis.iter().map(Prepared::new).collect();
    Ok(FormMatrix {
        matrix: assemble_prepared(&integ, kind.tag, &prepared),
        pi_power: integ.pi_power(),
    })
}

/// Volume and boundary sides of Reilly's identity for `f` on the flat ball
/// `B_R` (Ric = 0, H = 1/R, II = I/R), as exact coefficients of
/// `pi^{floor(n/2)}`.
#[derive(Debug, Clone, PartialEq)]
pub struct ReillyTerms {
    /// `int_B (Lap f)^2 - |Hess f|^2`
    pub volume: Rational,
    /// `int_S ((n-1) H h + 2 Lap_S z) h + II(grad_S z, grad_S z)`
    pub boundary: Rational,
    pub pi_power: u32,
}

impl ReillyTerms {
    pub fn residual(&self) -> f64 {
        Moment {
            rational: &self.volume - &self.boundary,
            pi_power: self.pi_power,
        }
        .to_f64()
    }

    /// Residual relative to the larger of the two sides.
    pub fn relative_residual(&self) -> f64 {
        let scale = Moment {
            rational: self.volume.clone(),
            pi_power: self.pi_power,
        }
        .to_f64()
        .abs()
        .max(
            Moment {
                rational: self.boundary.clone(),
                pi_power: self.pi_power,
            }
            .to_f64()
            .abs(),
        );
        if scale == 0.0 {
            self.residual().abs()
        } else {
            self.residual().abs() / scale
        }
    }
}

pub fn reilly_terms(f: &MultiPoly, radius: f64) -> Result<ReillyTerms, FormError> {
    if !(radius.is_finite() && radius > 0.0) {
        return Err(FormError::BadRadius(radius));
    }
    let n = f.dim();
    let r = rational_from_f64(radius);
    let integ = Integrator::new(n, r.clone());
    let h_curv = r.recip();
    let n1 = Rational::from_integer(((n - 1) as i64).into());

    let lap = f.laplacian();
    let grad = f.gradient();
    let mut hess_sq = Rational::zero();
    for g in &grad {
        for j in 0..n {
            let d = g.derivative(j);
            hess_sq += integ.ball_product(&d, &d);
        }
    }
    let volume = integ.ball_product(&lap, &lap) - hess_sq;

    let ef = f.euler();
    let h = ef.scale(&h_curv); // normal derivative on S_R
    let hess_nn = (&ef.euler() - &ef).scale(&(&h_curv * &h_curv));
    let lap_bdry = &(&lap - &hess_nn) - &h.scale(&(&n1 * &h_curv));
    let grad_sq = f.grad_dot(f);
    let tangent_sq = &grad_sq - &(&h * &h);
    let integrand = &(&(&h.scale(&(&n1 * &h_curv)) + &lap_bdry.scale(&Rational::from_integer(2.into()))) * &h)
        + &tangent_sq.scale(&h_curv);
    let boundary = integ.sphere(&integrand);
    Ok(ReillyTerms {
        volume,
        boundary,
        pi_power: integ.pi_power(),
    })
}

/// `reilly_terms(f, R).residual()`.
pub fn reilly_residual(f: &MultiPoly, radius: f64) -> Result<f64, FormError> {
    Ok(reilly_terms(f, radius)?.residual())
}

/// `int_B |Hess u|^2` (exact coefficient of `pi^{floor(n/2)}`).
pub fn hessian_energy(integ: &Integrator, u: &MultiPoly) -> Rational {
    let mut acc = Rational::zero();
    for g in u.gradient() {
        for j in 0..u.dim() {
            let d = g.derivative(j);
            acc += integ.ball_product(&d, &d);
        }
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn idx(e: &[u32]) -> MultiIndex {
        MultiIndex::new(e)
    }

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * b.abs().max(1.0)
    }

    #[test]
    fn sphere_moment_examples() {
        assert!(close(sphere_moment(&idx(&[0, 0])).to_f64(), 2.0 * PI, 1e-15));
        assert!(close(sphere_moment(&idx(&[2, 0, 0])).to_f64(), 4.0 * PI / 3.0, 1e-15));
        let m = sphere_moment(&idx(&[2, 2]));
        assert_eq!(m.rational, Rational::new(1.into(), 4.into()));
        assert_eq!(m.pi_power, 1);
        assert!(sphere_moment(&idx(&[1, 2, 0])).rational.is_zero());
    }

    #[test]
    fn ball_moment_examples() {
        let one = Rational::one();
        assert!(close(ball_moment(&idx(&[0, 0]), &one).to_f64(), PI, 1e-15));
        assert!(close(ball_moment(&idx(&[2, 0]), &one).to_f64(), PI / 4.0, 1e-15));
        for n in 2..=5 {
            let mut e = vec![0; n];
            e[0] = 1;
            assert!(ball_moment(&MultiIndex::new(&e), &Rational::new(3.into(), 2.into()))
                .rational
                .is_zero());
        }
        // Volume of the unit 3-ball and 4-ball.
        assert!(close(ball_moment(&idx(&[0, 0, 0]), &one).to_f64(), 4.0 * PI / 3.0, 1e-15));
        assert!(close(ball_moment(&idx(&[0, 0, 0, 0]), &one).to_f64(), PI * PI / 2.0, 1e-15));
    }

    #[test]
    fn ball_to_sphere_ratio_is_radial_factor() {
        let r = Rational::new(3.into(), 2.into());
        for n in 2..=4 {
            for alpha in MultiIndex::all_up_to(n, 6).into_iter().filter(|a| a.is_even()) {
                let k = (n as u32 + alpha.degree()) as usize;
                let expected = num_traits::pow(r.clone(), k) / Rational::from_integer(k.into());
                let b = ball_moment(&alpha, &r).rational;
                let s = sphere_moment(&alpha).rational;
                assert_eq!(b / s, expected);
            }
        }
    }

    #[test]
    fn assemble_examples() {
        let bump = &MultiPoly::one(2) - &MultiPoly::norm_sq(2);
        let a = assemble(&FormKind::unit(FormTag::VolBilap), std::slice::from_ref(&bump)).unwrap();
        assert!(close(a.to_f64()[(0, 0)], 16.0 * PI, 1e-14));
        let b = assemble(&FormKind::unit(FormTag::BdryNormal), &[bump]).unwrap();
        assert!(close(b.to_f64()[(0, 0)], 8.0 * PI, 1e-14));
        let c = assemble(&FormKind::unit(FormTag::BdryMass), &[MultiPoly::var(3, 0)]).unwrap();
        assert!(close(c.to_f64()[(0, 0)], 4.0 * PI / 3.0, 1e-14));
    }

    #[test]
    fn assemble_is_symmetric_and_checks_dims() {
        let basis: Vec<MultiPoly> = MultiIndex::all_up_to(2, 3)
            .into_iter()
            .map(|m| MultiPoly::monomial(m, Rational::one()))
            .collect();
        for tag in FormTag::ALL {
            let m = assemble(&FormKind::new(tag, 0.75).unwrap(), &basis).unwrap();
            assert!(m.matrix.is_symmetric(), "{tag:?}");
        }
        let bad = vec![MultiPoly::one(2), MultiPoly::one(3)];
        assert!(matches!(
            assemble(&FormKind::unit(FormTag::VolMass), &bad),
            Err(FormError::DimensionMismatch { index: 1, .. })
        ));
        assert!(FormKind::new(FormTag::VolMass, 0.0).is_err());
    }

    #[test]
    fn tangent_form_matches_sphere_eigenvalue() {
        // |grad_S h|^2 integrates to k(k+n-2) int_S h^2 for h in D_k.
        let h = MultiPoly::parse(3, "1 * x1^1 x2^1").unwrap();
        let t = assemble(&FormKind::unit(FormTag::BdryTangent), std::slice::from_ref(&h)).unwrap();
        let m = assemble(&FormKind::unit(FormTag::BdryMass), &[h]).unwrap();
        assert_eq!(
            t.matrix[(0, 0)].clone(),
            m.matrix[(0, 0)].clone() * Rational::from_integer(6.into())
        );
    }

    #[test]
    fn sphere_integral_only_sees_the_reduced_form() {
        let integ = Integrator::new(3, Rational::one());
        let p = MultiPoly::parse(3, "2 + 3 * x1^2 x2^2 + -1 * x3^4 + 5 * x1^1 x2^1 x3^2").unwrap();
        assert_eq!(integ.sphere(&p), integ.sphere(&p.sphere_reduce().sum()));
    }

    #[test]
    fn product_matches_expanded_integral() {
        let integ = Integrator::new(3, Rational::new(1.into(), 2.into()));
        let p = MultiPoly::parse(3, "1/3 + -2 * x1^2 + 7/5 * x1^1 x3^1 + x2^4").unwrap();
        let q = MultiPoly::parse(3, "4 * x2^2 + -1/7 * x1^1 x3^3 + 9").unwrap();
        assert_eq!(integ.ball_product(&p, &q), integ.ball(&(&p * &q)));
        assert_eq!(integ.sphere_product(&p, &q), integ.sphere(&(&p * &q)));
    }

    #[test]
    fn reilly_examples_vanish() {
        let x1 = MultiPoly::var(2, 0);
        assert_eq!(reilly_residual(&x1, 1.0).unwrap(), 0.0);
        assert_eq!(reilly_residual(&(&x1 * &x1), 1.0).unwrap(), 0.0);
        for n in 2..=5 {
            let t = reilly_terms(&MultiPoly::norm_sq(n), 1.0).unwrap();
            assert_eq!(t.volume, t.boundary);
        }
        let f = MultiPoly::parse(3, "1 * x1^3 + -2 * x1^1 x2^2 x3^1 + 1/2 * x3^2").unwrap();
        let t = reilly_terms(&f, 0.5).unwrap();
        assert_eq!(t.volume, t.boundary);
        assert!(!t.volume.is_zero());
    }
}
