//! Exact sparse multivariate polynomials over the rationals.
//!
//! Terms are kept in graded-lexicographic order (total degree ascending,
//! then exponent vectors descending lexicographically, so `x1` sorts before
//! `x2` within a degree). The canonical text form follows that order and is
//! byte-stable.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::Rational;

/// Largest supported ambient dimension.
pub const MAX_DIM: usize = 8;
/// Smallest supported ambient dimension.
pub const MIN_DIM: usize = 2;
/// Degree cap for user-facing polynomial constructions (bases, trial spaces).
pub const MAX_DEGREE: u32 = 16;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PolyError {
    #[error("dimension {0} is outside the supported range {MIN_DIM}..={MAX_DIM}")]
    DimensionOutOfRange(usize),
    #[error("degree {degree} exceeds the cap {cap}")]
    DegreeCap { degree: u32, cap: u32 },
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("cannot parse polynomial: {0}")]
    Parse(String),
}

pub fn check_dim(dim: usize) -> Result<(), PolyError> {
    if (MIN_DIM..=MAX_DIM).contains(&dim) {
        Ok(())
    } else {
        Err(PolyError::DimensionOutOfRange(dim))
    }
}

pub fn check_degree(degree: u32) -> Result<(), PolyError> {
    if degree <= MAX_DEGREE {
        Ok(())
    } else {
        Err(PolyError::DegreeCap {
            degree,
            cap: MAX_DEGREE,
        })
    }
}

/// Exponent vector of a monomial.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct MultiIndex {
    exps: [u8; MAX_DIM],
    dim: u8,
}

impl MultiIndex {
    pub fn new(exps: &[u32]) -> Self {
        assert!(
            !exps.is_empty() && exps.len() <= MAX_DIM,
            "multi-index length {} out of range",
            exps.len()
        );
        let mut out = [0u8; MAX_DIM];
        for (slot, &e) in out.iter_mut().zip(exps) {
            *slot = u8::try_from(e).expect("exponent overflow");
        }
        MultiIndex {
            exps: out,
            dim: exps.len() as u8,
        }
    }

    pub fn zero(dim: usize) -> Self {
        assert!((1..=MAX_DIM).contains(&dim));
        MultiIndex {
            exps: [0; MAX_DIM],
            dim: dim as u8,
        }
    }

    pub fn unit(dim: usize, i: usize) -> Self {
        let mut m = Self::zero(dim);
        m.exps[i] = 1;
        m
    }

    pub fn dim(&self) -> usize {
        self.dim as usize
    }

    pub fn degree(&self) -> u32 {
        self.exps().iter().map(|&e| e as u32).sum()
    }

    pub fn exps(&self) -> &[u8] {
        &self.exps[..self.dim as usize]
    }

    pub fn get(&self, i: usize) -> u32 {
        self.exps()[i] as u32
    }

    pub fn plus(&self, other: &MultiIndex) -> MultiIndex {
        debug_assert_eq!(self.dim, other.dim);
        let mut m = *self;
        for i in 0..self.dim() {
            m.exps[i] = m.exps[i]
                .checked_add(other.exps[i])
                .expect("exponent overflow");
        }
        m
    }

    /// Bit i is set when exponent i is odd.
    pub fn parity(&self) -> u8 {
        self.exps()
            .iter()
            .enumerate()
            .fold(0u8, |acc, (i, &e)| acc | (e & 1) << i)
    }

    pub fn is_even(&self) -> bool {
        self.parity() == 0
    }

    fn with_exp(&self, i: usize, e: u32) -> MultiIndex {
        let mut m = *self;
        m.exps[i] = u8::try_from(e).expect("exponent overflow");
        m
    }

    /// All multi-indices of the given dimension and exact total degree, in
    /// graded-lex order.
    pub fn all_of_degree(dim: usize, degree: u32) -> Vec<MultiIndex> {
        let mut out = Vec::new();
        let mut cur = vec![0u32; dim];
        fn rec(i: usize, left: u32, cur: &mut Vec<u32>, out: &mut Vec<MultiIndex>) {
            if i + 1 == cur.len() {
                cur[i] = left;
                out.push(MultiIndex::new(cur));
                return;
            }
            for e in (0..=left).rev() {
                cur[i] = e;
                rec(i + 1, left - e, cur, out);
            }
        }
        rec(0, degree, &mut cur, &mut out);
        out
    }

    /// All multi-indices with total degree at most `degree`, graded-lex order.
    pub fn all_up_to(dim: usize, degree: u32) -> Vec<MultiIndex> {
        (0..=degree)
            .flat_map(|d| Self::all_of_degree(dim, d))
            .collect()
    }
}

impl Ord for MultiIndex {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.dim
            .cmp(&other.dim)
            .then(self.degree().cmp(&other.degree()))
            .then_with(|| other.exps().cmp(self.exps()))
    }
}

impl PartialOrd for MultiIndex {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

/// Sparse polynomial in `dim` variables with exact rational coefficients.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MultiPoly {
    dim: usize,
    terms: BTreeMap<MultiIndex, Rational>,
}

impl MultiPoly {
    pub fn zero(dim: usize) -> Self {
        assert!((1..=MAX_DIM).contains(&dim), "dimension {dim} unsupported");
        MultiPoly {
            dim,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(dim: usize, c: Rational) -> Self {
        Self::monomial(MultiIndex::zero(dim), c)
    }

    pub fn one(dim: usize) -> Self {
        Self::constant(dim, Rational::one())
    }

    pub fn from_int(dim: usize, c: i64) -> Self {
        Self::constant(dim, Rational::from_integer(c.into()))
    }

    /// The coordinate function `x_{i+1}` (zero-based `i`).
    pub fn var(dim: usize, i: usize) -> Self {
        Self::monomial(MultiIndex::unit(dim, i), Rational::one())
    }

    pub fn monomial(idx: MultiIndex, c: Rational) -> Self {
        let mut p = Self::zero(idx.dim());
        if !c.is_zero() {
            p.terms.insert(idx, c);
        }
        p
    }

    /// `|x|^2 = x_1^2 + ... + x_n^2`.
    pub fn norm_sq(dim: usize) -> Self {
        let mut p = Self::zero(dim);
        for i in 0..dim {
            p.terms
                .insert(MultiIndex::unit(dim, i).with_exp(i, 2), Rational::one());
        }
        p
    }

    pub fn from_terms<I>(dim: usize, terms: I) -> Self
    where
        I: IntoIterator<Item = (MultiIndex, Rational)>,
    {
        let mut p = Self::zero(dim);
        for (idx, c) in terms {
            assert_eq!(idx.dim(), dim, "multi-index dimension mismatch");
            p.add_term(idx, c);
        }
        p
    }

    /// Combination `sum_i coeffs[i] * basis[i]` with float coefficients taken
    /// as exact dyadic rationals.
    pub fn linear_combination(dim: usize, basis: &[MultiPoly], coeffs: &[f64]) -> Self {
        assert_eq!(basis.len(), coeffs.len());
        let mut out = Self::zero(dim);
        for (b, &c) in basis.iter().zip(coeffs) {
            if c != 0.0 {
                out += &b.scale(&rational_from_f64(c));
            }
        }
        out
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Maximum term degree; zero for the zero polynomial.
    pub fn degree(&self) -> u32 {
        self.terms.keys().map(|m| m.degree()).max().unwrap_or(0)
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&MultiIndex, &Rational)> {
        self.terms.iter()
    }

    pub fn coeff(&self, idx: &MultiIndex) -> Rational {
        self.terms.get(idx).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn is_homogeneous(&self) -> bool {
        let mut degs = self.terms.keys().map(|m| m.degree());
        match degs.next() {
            None => true,
            Some(d) => degs.all(|e| e == d),
        }
    }

    pub fn homogeneous_part(&self, degree: u32) -> MultiPoly {
        MultiPoly {
            dim: self.dim,
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.degree() == degree)
                .map(|(m, c)| (*m, c.clone()))
                .collect(),
        }
    }

    /// Common parity signature of all terms, if there is one.
    pub fn parity(&self) -> Option<u8> {
        let mut it = self.terms.keys().map(|m| m.parity());
        let first = it.next()?;
        it.all(|p| p == first).then_some(first)
    }

    fn add_term(&mut self, idx: MultiIndex, c: Rational) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(idx) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn scale(&self, c: &Rational) -> MultiPoly {
        if c.is_zero() {
            return MultiPoly::zero(self.dim);
        }
        MultiPoly {
            dim: self.dim,
            terms: self.terms.iter().map(|(m, v)| (*m, v * c)).collect(),
        }
    }

    pub fn pow(&self, k: u32) -> MultiPoly {
        let mut out = MultiPoly::one(self.dim);
        for _ in 0..k {
            out = &out * self;
        }
        out
    }

    /// Partial derivative with respect to `x_{i+1}`.
    pub fn derivative(&self, i: usize) -> MultiPoly {
        let mut out = MultiPoly::zero(self.dim);
        for (m, c) in &self.terms {
            let e = m.get(i);
            if e > 0 {
                out.add_term(m.with_exp(i, e - 1), c * Rational::from_integer(e.into()));
            }
        }
        out
    }

    pub fn gradient(&self) -> Vec<MultiPoly> {
        (0..self.dim).map(|i| self.derivative(i)).collect()
    }

    pub fn laplacian(&self) -> MultiPoly {
        let mut out = MultiPoly::zero(self.dim);
        for (m, c) in &self.terms {
            for i in 0..self.dim {
                let e = m.get(i);
                if e >= 2 {
                    let f = Rational::from_integer((e * (e - 1)).into());
                    out.add_term(m.with_exp(i, e - 2), c * f);
                }
            }
        }
        out
    }

    /// Euler operator `sum_i x_i d/dx_i`: scales each term by its degree.
    pub fn euler(&self) -> MultiPoly {
        let mut out = MultiPoly::zero(self.dim);
        for (m, c) in &self.terms {
            out.add_term(*m, c * Rational::from_integer(m.degree().into()));
        }
        out
    }

    /// `sum_{i,j} (d^2 p / dx_i dx_j)^2`.
    pub fn hessian_norm_sq(&self) -> MultiPoly {
        let grad = self.gradient();
        let mut out = MultiPoly::zero(self.dim);
        for g in &grad {
            for j in 0..self.dim {
                let h = g.derivative(j);
                out += &(&h * &h);
            }
        }
        out
    }

    /// `<grad p, grad q>`.
    pub fn grad_dot(&self, other: &MultiPoly) -> MultiPoly {
        assert_eq!(self.dim, other.dim, "dimension mismatch");
        let mut out = MultiPoly::zero(self.dim);
        for i in 0..self.dim {
            out += &(&self.derivative(i) * &other.derivative(i));
        }
        out
    }

    /// Substitute `x -> c x`.
    pub fn scale_vars(&self, c: &Rational) -> MultiPoly {
        let mut out = MultiPoly::zero(self.dim);
        for (m, v) in &self.terms {
            out.add_term(*m, v * pow_rational(c, m.degree()));
        }
        out
    }

    pub fn eval(&self, x: &[Rational]) -> Rational {
        assert_eq!(x.len(), self.dim);
        let mut acc = Rational::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (i, xi) in x.iter().enumerate() {
                t *= pow_rational(xi, m.get(i));
            }
            acc += t;
        }
        acc
    }

    pub fn eval_f64(&self, x: &[f64]) -> f64 {
        assert_eq!(x.len(), self.dim);
        self.terms
            .iter()
            .map(|(m, c)| {
                let mut t = c.to_f64().unwrap_or(f64::NAN);
                for (i, xi) in x.iter().enumerate() {
                    t *= xi.powi(m.get(i) as i32);
                }
                t
            })
            .sum()
    }

    /// Float view of the coefficients.
    pub fn to_f64_terms(&self) -> Vec<(MultiIndex, f64)> {
        self.terms
            .iter()
            .map(|(m, c)| (*m, c.to_f64().unwrap_or(f64::NAN)))
            .collect()
    }

    /// Normal form modulo `|x|^2 - r_sq` obtained by rewriting
    /// `x1^2 -> r_sq - x2^2 - ... - xn^2` until no term has `x1`-degree above one.
    /// The result is zero exactly when the polynomial is divisible by
    /// `|x|^2 - r_sq`.
    pub fn rem_by_sphere(&self, r_sq: &Rational) -> MultiPoly {
        let mut work = self.clone();
        loop {
            let Some((idx, c)) = work
                .terms
                .iter()
                .rev()
                .find(|(m, _)| m.get(0) >= 2)
                .map(|(m, c)| (*m, c.clone()))
            else {
                return work;
            };
            work.terms.remove(&idx);
            let base = idx.with_exp(0, idx.get(0) - 2);
            work.add_term(base, &c * r_sq);
            for i in 1..self.dim {
                let e = base.get(i);
                work.add_term(base.with_exp(i, e + 2), -c.clone());
            }
        }
    }

    /// Canonical representative modulo `|x|^2 - 1` as a sum of harmonic
    /// homogeneous components.
    pub fn sphere_reduce(&self) -> SphereReduced {
        self.sphere_reduce_radius(&Rational::one())
    }

    /// Reduction modulo `|x|^2 - r_sq`.
    pub fn sphere_reduce_radius(&self, r_sq: &Rational) -> SphereReduced {
        let deg = self.degree();
        let mut comps = vec![MultiPoly::zero(self.dim); deg as usize + 1];
        let mut work = self.clone();
        for d in (0..=deg).rev() {
            let part = work.homogeneous_part(d);
            if part.is_zero() {
                continue;
            }
            work -= &part;
            if d < 2 {
                comps[d as usize] = part;
            } else {
                let (h, q) = harmonic_split(&part);
                comps[d as usize] = h;
                work += &q.scale(r_sq);
            }
        }
        SphereReduced {
            dim: self.dim,
            components: comps,
        }
    }

    pub fn parse(dim: usize, s: &str) -> Result<MultiPoly, PolyError> {
        let bad = |msg: &str| PolyError::Parse(format!("{msg} in {s:?}"));
        let s = s.trim();
        let mut out = MultiPoly::zero(dim);
        if s == "0" {
            return Ok(out);
        }
        for term in s.split(" + ") {
            let (coeff, mono) = match term.split_once(" * ") {
                Some((c, m)) => (c, Some(m)),
                None if term.trim_start().starts_with('x') => ("1", Some(term)),
                None => (term, None),
            };
            let c = Rational::from_str(coeff.trim()).map_err(|_| bad("bad coefficient"))?;
            let mut exps = vec![0u32; dim];
            if let Some(m) = mono {
                for factor in m.split_whitespace() {
                    let (var, e) = factor.split_once('^').ok_or_else(|| bad("missing '^'"))?;
                    let i: usize = var
                        .strip_prefix('x')
                        .and_then(|v| v.parse().ok())
                        .ok_or_else(|| bad("bad variable"))?;
                    if i == 0 || i > dim {
                        return Err(bad("variable index out of range"));
                    }
                    exps[i - 1] += e.parse::<u32>().map_err(|_| bad("bad exponent"))?;
                }
            }
            out.add_term(MultiIndex::new(&exps), c);
        }
        Ok(out)
    }
}

/// Split a homogeneous polynomial `p` of degree `m` as `p = h + |x|^2 q` with
/// `h` harmonic. Uses `h = sum_j a_j |x|^{2j} Lap^j p` where
/// `a_{j+1} = -a_j / (2 (j+1) (n + 2m - 2j - 4))`.
pub(crate) fn harmonic_split(p: &MultiPoly) -> (MultiPoly, MultiPoly) {
    debug_assert!(p.is_homogeneous());
    let n = p.dim as i64;
    let m = p.degree() as i64;
    let r2 = MultiPoly::norm_sq(p.dim);
    let mut h = p.clone();
    let mut q = MultiPoly::zero(p.dim);
    let mut a = Rational::one();
    let mut lap = p.clone();
    let mut r_pow = MultiPoly::one(p.dim); // |x|^{2(j-1)}
    let mut j: i64 = 0;
    loop {
        lap = lap.laplacian();
        if lap.is_zero() {
            break;
        }
        a = -a / Rational::from_integer((2 * (j + 1) * (n + 2 * m - 2 * j - 4)).into());
        let term = (&r_pow * &lap).scale(&a);
        q -= &term;
        h += &(&term * &r2);
        r_pow = &r_pow * &r2;
        j += 1;
    }
    (h, q)
}

fn pow_rational(c: &Rational, e: u32) -> Rational {
    num_traits::pow(c.clone(), e as usize)
}

/// Exact rational value of a finite float.
pub fn rational_from_f64(x: f64) -> Rational {
    Rational::from_float(x).expect("non-finite float")
}

/// Canonical text form: `coeff * x1^a1 ... xn^an` terms joined by ` + `.
impl fmt::Display for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        let mut first = true;
        for (m, c) in &self.terms {
            if !first {
                f.write_str(" + ")?;
            }
            first = false;
            write!(f, "{c}")?;
            if m.degree() > 0 {
                f.write_str(" *")?;
                for (i, &e) in m.exps().iter().enumerate() {
                    if e > 0 {
                        write!(f, " x{}^{}", i + 1, e)?;
                    }
                }
            }
        }
        Ok(())
    }
}

impl Add<&MultiPoly> for &MultiPoly {
    type Output = MultiPoly;
    fn add(self, rhs: &MultiPoly) -> MultiPoly {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl Sub<&MultiPoly> for &MultiPoly {
    type Output = MultiPoly;
    fn sub(self, rhs: &MultiPoly) -> MultiPoly {
        let mut out = self.clone();
        out -= rhs;
        out
    }
}

impl Add for MultiPoly {
    type Output = MultiPoly;
    fn add(mut self, rhs: MultiPoly) -> MultiPoly {
        self += &rhs;
        self
    }
}

impl Sub for MultiPoly {
    type Output = MultiPoly;
    fn sub(mut self, rhs: MultiPoly) -> MultiPoly {
        self -= &rhs;
        self
    }
}

impl AddAssign<&MultiPoly> for MultiPoly {
    fn add_assign(&mut self, rhs: &MultiPoly) {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch");
        for (m, c) in &rhs.terms {
            self.add_term(*m, c.clone());
        }
    }
}

impl SubAssign<&MultiPoly> for MultiPoly {
    fn sub_assign(&mut self, rhs: &MultiPoly) {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch");
        for (m, c) in &rhs.terms {
            self.add_term(*m, -c.clone());
        }
    }
}

impl Neg for &MultiPoly {
    type Output = MultiPoly;
    fn neg(self) -> MultiPoly {
        self.scale(&-Rational::one())
    }
}

impl Neg for MultiPoly {
    type Output = MultiPoly;
    fn neg(self) -> MultiPoly {
        -&self
    }
}

impl Mul<&MultiPoly> for &MultiPoly {
    type Output = MultiPoly;
    fn mul(self, rhs: &MultiPoly) -> MultiPoly {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch");
        let mut out = MultiPoly::zero(self.dim);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                out.add_term(ma.plus(mb), ca * cb);
            }
        }
        out
    }
}

impl Mul for MultiPoly {
    type Output = MultiPoly;
    fn mul(self, rhs: MultiPoly) -> MultiPoly {
        &self * &rhs
    }
}

/// Harmonic homogeneous components `h_0, ..., h_d` of a polynomial reduced
/// modulo the sphere ideal.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SphereReduced {
    dim: usize,
    components: Vec<MultiPoly>,
}

impl SphereReduced {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn components(&self) -> &[MultiPoly] {
        &self.components
    }

    /// Component of degree `j` (zero if beyond the stored range).
    pub fn component(&self, j: usize) -> MultiPoly {
        self.components
            .get(j)
            .cloned()
            .unwrap_or_else(|| MultiPoly::zero(self.dim))
    }

    pub fn is_zero(&self) -> bool {
        self.components.iter().all(|c| c.is_zero())
    }

    pub fn sum(&self) -> MultiPoly {
        let mut out = MultiPoly::zero(self.dim);
        for c in &self.components {
            out += c;
        }
        out
    }
}

impl fmt::Display for SphereReduced {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.sum())
    }
}

/// Lowest common denominator of all coefficients and the integer numerators
/// after scaling by it.
pub(crate) fn integer_form(p: &MultiPoly) -> (BigInt, Vec<(MultiIndex, BigInt)>) {
    let mut lcm = BigInt::one();
    for c in p.terms.values() {
        lcm = num_integer::Integer::lcm(&lcm, c.denom());
    }
    let terms = p
        .terms
        .iter()
        .map(|(m, c)| (*m, c.numer() * (&lcm / c.denom())))
        .collect();
    (lcm, terms)
}

/// Largest absolute integer numerator, in bits.
pub(crate) fn max_bits(terms: &[(MultiIndex, BigInt)]) -> u64 {
    terms.iter().map(|(_, c)| c.abs().bits()).max().unwrap_or(0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(a: i64, b: i64) -> Rational {
        Rational::new(a.into(), b.into())
    }

    fn x(dim: usize, i: usize) -> MultiPoly {
        MultiPoly::var(dim, i)
    }

    #[test]
    fn laplacian_examples() {
        for n in 2..=5 {
            assert_eq!(MultiPoly::norm_sq(n).laplacian(), MultiPoly::from_int(n, 2 * n as i64));
        }
        assert!((&x(2, 0) * &x(2, 1)).laplacian().is_zero());
        // (|x|^2 - 1) x1 = x1^3 + x1 x2^2 + x1 x3^2 - x1 -> 6x1 + 2x1 + 2x1
        let p = &(&MultiPoly::norm_sq(3) - &MultiPoly::one(3)) * &x(3, 0);
        assert_eq!(p.laplacian(), x(3, 0).scale(&q(10, 1)));
    }

    #[test]
    fn euler_examples() {
        let p = &x(2, 0) * &x(2, 1);
        assert_eq!(p.euler(), p.scale(&q(2, 1)));
        assert!(MultiPoly::from_int(3, 7).euler().is_zero());
        // E((|x|^2-1) q) on the unit sphere equals 2q for homogeneous q.
        let qq = &x(3, 0) * &x(3, 2);
        let u = &(&MultiPoly::norm_sq(3) - &MultiPoly::one(3)) * &qq;
        let red = u.euler().sphere_reduce();
        assert_eq!(red.sum(), qq.scale(&q(2, 1)).sphere_reduce().sum());
    }

    #[test]
    fn hessian_and_gradient_examples() {
        assert_eq!((&x(2, 0) * &x(2, 0)).hessian_norm_sq(), MultiPoly::from_int(2, 4));
        for n in 2..=4 {
            assert_eq!(MultiPoly::norm_sq(n).hessian_norm_sq(), MultiPoly::from_int(n, 4 * n as i64));
        }
        assert_eq!((&x(2, 0) * &x(2, 1)).hessian_norm_sq(), MultiPoly::from_int(2, 2));
        assert_eq!(x(2, 0).grad_dot(&x(2, 0)), MultiPoly::one(2));
        assert!(x(2, 0).grad_dot(&x(2, 1)).is_zero());
        let r2 = MultiPoly::norm_sq(3);
        assert_eq!(r2.grad_dot(&r2), r2.scale(&q(4, 1)));
    }

    #[test]
    fn sphere_reduce_examples() {
        let r2 = MultiPoly::norm_sq(3);
        let p = &(&r2 * &r2) * &x(3, 0);
        let red = p.sphere_reduce();
        assert_eq!(red.sum(), x(3, 0));
        assert_eq!(red.component(1), x(3, 0));

        let p = &x(2, 0) * &x(2, 0);
        let red = p.sphere_reduce();
        assert_eq!(red.component(0), MultiPoly::constant(2, q(1, 2)));
        let expected = (&(&x(2, 0) * &x(2, 0)) - &(&x(2, 1) * &x(2, 1))).scale(&q(1, 2));
        assert_eq!(red.component(2), expected);
        // x1^2 - [1/2 + (x1^2 - x2^2)/2] = (|x|^2 - 1)/2
        let diff = &p - &red.sum();
        assert_eq!(diff, (&MultiPoly::norm_sq(2) - &MultiPoly::one(2)).scale(&q(1, 2)));

        let w = &x(3, 0) * &x(3, 1);
        assert_eq!(w.sphere_reduce().component(2), w);
    }

    #[test]
    fn sphere_reduce_split_solves_defining_system() {
        // p_d = h + |x|^2 s must satisfy Lap(|x|^2 s) = Lap p_d.
        let p = MultiPoly::parse(3, "3 * x1^4 + -2 * x1^1 x2^2 x3^1 + 5/7 * x3^4").unwrap();
        let (h, s) = harmonic_split(&p);
        let r2 = MultiPoly::norm_sq(3);
        assert!(h.laplacian().is_zero());
        assert_eq!((&r2 * &s).laplacian(), p.laplacian());
        assert_eq!(&h + &(&r2 * &s), p);
    }

    #[test]
    fn text_form_is_graded_lex_and_parses_back() {
        let p = &(&MultiPoly::norm_sq(2) - &MultiPoly::one(2)) * &x(2, 0).scale(&q(-3, 2));
        let s = p.to_string();
        assert_eq!(s, "3/2 * x1^1 + -3/2 * x1^3 + -3/2 * x1^1 x2^2");
        assert_eq!(MultiPoly::parse(2, &s).unwrap(), p);
        assert_eq!(MultiPoly::zero(3).to_string(), "0");
        assert_eq!(MultiPoly::parse(3, "0").unwrap(), MultiPoly::zero(3));
        assert!(MultiPoly::parse(2, "1 * x3^1").is_err());
        assert!(MultiPoly::parse(2, "a * x1^1").is_err());
    }

    #[test]
    fn rem_by_sphere_detects_divisibility() {
        let r2m1 = &MultiPoly::norm_sq(3) - &MultiPoly::one(3);
        let p = &r2m1 * &MultiPoly::parse(3, "1 + 2 * x1^3 + x2^1 x3^1").unwrap();
        assert!(p.rem_by_sphere(&Rational::one()).is_zero());
        assert!(!x(3, 0).rem_by_sphere(&Rational::one()).is_zero());
    }

    #[test]
    fn dimension_and_degree_checks() {
        assert!(check_dim(1).is_err());
        assert!(check_dim(9).is_err());
        assert!(check_dim(8).is_ok());
        assert_eq!(
            check_degree(17),
            Err(PolyError::DegreeCap { degree: 17, cap: 16 })
        );
    }

    #[test]
    fn multi_index_enumeration_counts() {
        assert_eq!(MultiIndex::all_of_degree(3, 4).len(), 15);
        assert_eq!(MultiIndex::all_up_to(2, 3).len(), 10);
        let v = MultiIndex::all_of_degree(2, 2);
        assert_eq!(v[0].exps(), &[2, 0]);
        assert_eq!(v[2].exps(), &[0, 2]);
    }
}
