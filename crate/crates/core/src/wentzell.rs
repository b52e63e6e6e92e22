//! Closed-form spectrum of the Wentzell bi-Laplace problem on the unit ball
//!
//! ```text
//! Lap^2 u = 0                                   in B
//! du/dnu = 0,  d(Lap u)/dnu + beta Lap_S u + s u = 0   on S
//! ```
//!
//! The eigenvalues are `s_k = k^2 (n + 2k) + beta k (k + n - 2)` with
//! multiplicity `mu(n, k)`, and every eigenfunction has the form
//! `-2 w + k (|x|^2 - 1) w` for `w` harmonic homogeneous of degree `k`.
//! Eigenfunctions are left unnormalized.
//!
//! [`certificate`] checks a candidate pair exactly: the three residuals are
//! polynomials (or sphere-reduced polynomials) that vanish identically for a
//! true eigenpair. On the unit sphere `d/dnu = E` (the Euler operator) and
//! the boundary Laplacian is `Lap u - E^2 u - (n-2) E u`.

use num_traits::{One, ToPrimitive};
use serde::{Deserialize, Serialize};

use crate::harmonic;
use crate::poly::{check_dim, rational_from_f64, MultiPoly, PolyError, SphereReduced};
use crate::Rational;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum WentzellError {
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error("beta must be finite and non-negative, got {0}")]
    BadBeta(f64),
    #[error("input is not biharmonic")]
    NotBiharmonic,
    #[error("certificate record is malformed: {0}")]
    Malformed(String),
}

fn check_beta(beta: f64) -> Result<Rational, WentzellError> {
    if beta.is_finite() && beta >= 0.0 {
        Ok(rational_from_f64(beta))
    } else {
        Err(WentzellError::BadBeta(beta))
    }
}

/// `k^2 (n + 2k) + beta k (k + n - 2)`, exactly.
pub fn eigenvalue_exact(n: usize, beta: &Rational, k: u32) -> Rational {
    let (n, k) = (n as i64, k as i64);
    Rational::from_integer((k * k * (n + 2 * k)).into())
        + beta * Rational::from_integer((k * (k + n - 2)).into())
}

pub fn eigenvalue(n: usize, beta: f64, k: u32) -> f64 {
    eigenvalue_exact(n, &rational_from_f64(beta), k)
        .to_f64()
        .unwrap_or(f64::NAN)
}

#[derive(Debug, Clone, PartialEq)]
pub struct WentzellEigenpair {
    pub n: usize,
    pub beta: f64,
    pub k: u32,
    pub value: f64,
    pub multiplicity: u64,
    pub eigenfunctions: Vec<MultiPoly>,
}

/// `-2 w + k (|x|^2 - 1) w`.
pub fn eigenfunction_from(w: &MultiPoly, k: u32) -> MultiPoly {
    let n = w.dim();
    let bump = &MultiPoly::norm_sq(n) - &MultiPoly::one(n);
    &w.scale(&Rational::from_integer((-2).into()))
        + &(&bump * w).scale(&Rational::from_integer(k.into()))
}

pub fn eigenspace(n: usize, beta: f64, k: u32) -> Result<WentzellEigenpair, WentzellError> {
    check_dim(n)?;
    check_beta(beta)?;
    let hb = harmonic::basis(n, k)?;
    let eigenfunctions: Vec<MultiPoly> = hb
        .elements
        .iter()
        .map(|w| eigenfunction_from(w, k))
        .collect();
    Ok(WentzellEigenpair {
        n,
        beta,
        k,
        value: eigenvalue(n, beta, k),
        multiplicity: harmonic::mu(n, k),
        eigenfunctions,
    })
}

/// Exact residuals of the three equations of the Wentzell problem.
#[derive(Debug, Clone, PartialEq)]
pub struct Certificate {
    /// `Lap^2 u`
    pub pde_residual: MultiPoly,
    /// `E u` reduced modulo `|x|^2 - 1`
    pub neumann_residual: SphereReduced,
    /// `E Lap u + beta Lap_S u + sigma u` reduced modulo `|x|^2 - 1`
    pub wentzell_residual: SphereReduced,
}

impl Certificate {
    pub fn is_valid(&self) -> bool {
        self.pde_residual.is_zero()
            && self.neumann_residual.is_zero()
            && self.wentzell_residual.is_zero()
    }
}

pub fn certificate(u: &MultiPoly, beta: &Rational, sigma: &Rational) -> Certificate {
    let n = u.dim();
    let lap = u.laplacian();
    let eu = u.euler();
    let lap_s = &(&lap - &eu.euler()) - &eu.scale(&Rational::from_integer((n as i64 - 2).into()));
    let robin = &(&lap.euler() + &lap_s.scale(beta)) + &u.scale(sigma);
    Certificate {
        pde_residual: lap.laplacian(),
        neumann_residual: eu.sphere_reduce(),
        wentzell_residual: robin.sphere_reduce(),
    }
}

/// Serialized certificate; polynomials use the canonical text form.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertificateRecord {
    pub n: usize,
    pub beta: f64,
    pub k: u32,
    pub sigma: f64,
    pub u: String,
    pub pde_residual: String,
    pub neumann_residual: String,
    pub wentzell_residual: String,
    pub valid: bool,
}

pub fn certificate_record(
    u: &MultiPoly,
    beta: f64,
    k: u32,
    sigma: f64,
) -> Result<CertificateRecord, WentzellError> {
    let b = check_beta(beta)?;
    let s = rational_from_f64(sigma);
    let c = certificate(u, &b, &s);
    Ok(CertificateRecord {
        n: u.dim(),
        beta,
        k,
        sigma,
        u: u.to_string(),
        pde_residual: c.pde_residual.to_string(),
        neumann_residual: c.neumann_residual.to_string(),
        wentzell_residual: c.wentzell_residual.to_string(),
        valid: c.is_valid(),
    })
}

/// All certificates for `k = 0..=kmax`, one per basis element of `D_k`.
pub fn certify_all(n: usize, beta: f64, kmax: u32) -> Result<Vec<CertificateRecord>, WentzellError> {
    let mut out = Vec::new();
    for k in 0..=kmax {
        let pair = eigenspace(n, beta, k)?;
        for u in &pair.eigenfunctions {
            out.push(certificate_record(u, beta, k, pair.value)?);
        }
    }
    Ok(out)
}

/// Re-derive a record from its serialized polynomial and confirm both that
/// the stored residuals match and that they all vanish.
pub fn recheck_record(rec: &CertificateRecord) -> Result<bool, WentzellError> {
    let u = MultiPoly::parse(rec.n, &rec.u)?;
    let fresh = certificate_record(&u, rec.beta, rec.k, rec.sigma)?;
    if fresh.pde_residual != rec.pde_residual
        || fresh.neumann_residual != rec.neumann_residual
        || fresh.wentzell_residual != rec.wentzell_residual
    {
        return Err(WentzellError::Malformed(
            "stored residuals differ from recomputed ones".into(),
        ));
    }
    Ok(fresh.valid && rec.valid)
}

/// Unique harmonic `g, h` with `u = g + |x|^2 h`.
pub fn almansi(u: &MultiPoly) -> Result<(MultiPoly, MultiPoly), WentzellError> {
    let n = u.dim();
    let lap = u.laplacian();
    if !lap.laplacian().is_zero() {
        return Err(WentzellError::NotBiharmonic);
    }
    // Lap(|x|^2 h_m) = (2n + 4m) h_m for h_m harmonic of degree m.
    let mut h = MultiPoly::zero(n);
    for m in 0..=lap.degree() {
        let part = lap.homogeneous_part(m);
        if !part.is_zero() {
            h += &part.scale(&Rational::new(
                One::one(),
                (2 * n as i64 + 4 * m as i64).into(),
            ));
        }
    }
    let g = u - &(&MultiPoly::norm_sq(n) * &h);
    debug_assert!(g.laplacian().is_zero() && h.laplacian().is_zero());
    Ok((g, h))
}

/// Inverse of [`almansi`].
pub fn compose(g: &MultiPoly, h: &MultiPoly) -> MultiPoly {
    g + &(&MultiPoly::norm_sq(g.dim()) * h)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn int(v: i64) -> Rational {
        Rational::from_integer(v.into())
    }

    #[test]
    fn eigenvalue_examples() {
        assert_eq!(eigenvalue(2, 0.0, 1), 4.0);
        for n in 2..=6 {
            assert_eq!(eigenvalue(n, 3.5, 0), 0.0);
        }
        assert_eq!(eigenvalue(3, 1.0, 2), 34.0);
    }

    #[test]
    fn eigenspace_examples() {
        let e0 = eigenspace(3, 1.0, 0).unwrap();
        assert_eq!(e0.eigenfunctions, vec![MultiPoly::from_int(3, -2)]);

        let e1 = eigenspace(3, 2.0, 1).unwrap();
        let x1 = MultiPoly::var(3, 0);
        let expected = &x1.scale(&int(-2)) + &(&(&MultiPoly::norm_sq(3) - &MultiPoly::one(3)) * &x1);
        assert_eq!(e1.eigenfunctions[0], expected);
        assert_eq!(e1.multiplicity, 3);

        let w = &MultiPoly::var(2, 0) * &MultiPoly::var(2, 1);
        let expected = &w.scale(&int(-2))
            + &(&(&MultiPoly::norm_sq(2) - &MultiPoly::one(2)) * &w).scale(&int(2));
        assert_eq!(eigenfunction_from(&w, 2), expected);
    }

    #[test]
    fn certificates_vanish_on_eigenpairs() {
        for n in 2..=4 {
            for beta in [0.0, 1.0, 5.0] {
                for k in 0..=4 {
                    let pair = eigenspace(n, beta, k).unwrap();
                    let s = eigenvalue_exact(n, &rational_from_f64(beta), k);
                    for u in &pair.eigenfunctions {
                        assert!(certificate(u, &rational_from_f64(beta), &s).is_valid());
                    }
                }
            }
        }
        assert!(certificate(&MultiPoly::from_int(2, 7), &int(3), &int(0)).is_valid());
    }

    #[test]
    fn shifted_sigma_leaves_boundary_trace() {
        let pair = eigenspace(3, 2.0, 1).unwrap();
        let u = &pair.eigenfunctions[0];
        let s = eigenvalue_exact(3, &int(2), 1);
        let up = certificate(u, &int(2), &(&s + int(1)));
        assert!(up.pde_residual.is_zero() && up.neumann_residual.is_zero());
        assert_eq!(up.wentzell_residual, u.sphere_reduce());
        let down = certificate(u, &int(2), &(&s - int(1)));
        assert_eq!(down.wentzell_residual.sum(), -&u.sphere_reduce().sum());
    }

    #[test]
    fn records_round_trip_through_text() {
        let recs = certify_all(3, 1.0, 3).unwrap();
        assert_eq!(recs.len(), 1 + 3 + 5 + 7);
        for r in &recs {
            assert!(r.valid);
            assert!(recheck_record(r).unwrap());
            let json = serde_json::to_string(r).unwrap();
            let back: CertificateRecord = serde_json::from_str(&json).unwrap();
            assert_eq!(&back, r);
        }
        let mut tampered = recs[4].clone();
        tampered.wentzell_residual = "1".into();
        assert!(recheck_record(&tampered).is_err());
    }

    #[test]
    fn almansi_examples() {
        let x1 = MultiPoly::var(3, 0);
        let u = &(&MultiPoly::norm_sq(3) - &MultiPoly::one(3)) * &x1;
        let (g, h) = almansi(&u).unwrap();
        assert_eq!(g, -&x1);
        assert_eq!(h, x1);

        let w = MultiPoly::parse(3, "1 * x1^1 x2^1 + 3 * x3^1").unwrap();
        assert_eq!(almansi(&w).unwrap(), (w.clone(), MultiPoly::zero(3)));

        let r4 = MultiPoly::norm_sq(3).pow(2);
        assert_eq!(r4.laplacian().laplacian(), MultiPoly::from_int(3, 8 * 3 * 5));
        assert_eq!(almansi(&r4), Err(WentzellError::NotBiharmonic));
    }

    #[test]
    fn rejects_negative_beta() {
        assert!(matches!(eigenspace(3, -1.0, 1), Err(WentzellError::BadBeta(_))));
    }
}
