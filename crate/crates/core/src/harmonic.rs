//! Harmonic homogeneous polynomials: the spaces `D_k` and their dimensions.

use num_traits::One;

use crate::exact::QMatrix;
use crate::poly::{check_degree, check_dim, MultiIndex, MultiPoly, PolyError};
use crate::Rational;

/// Ordered basis of the harmonic homogeneous polynomials of degree `k`.
#[derive(Debug, Clone, PartialEq)]
pub struct HarmonicBasis {
    pub dim: usize,
    pub degree: u32,
    pub elements: Vec<MultiPoly>,
}

fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u64, |acc, i| acc * (n - i) / (i + 1))
}

/// Dimension of `D_k` in `R^n`: `C(n+k-1, k) - C(n+k-3, k-2)`.
pub fn mu(n: usize, k: u32) -> u64 {
    let (n, k) = (n as u64, k as u64);
    let all = binomial(n + k - 1, k);
    if k < 2 {
        all
    } else {
        all - binomial(n + k - 3, k - 2)
    }
}

/// Exact kernel basis of the Laplacian on homogeneous degree-`k`
/// polynomials, one element per free column of the reduced echelon form
/// (columns in graded-lex order).
pub fn basis(n: usize, k: u32) -> Result<HarmonicBasis, PolyError> {
    check_dim(n)?;
    check_degree(k)?;
    let cols = MultiIndex::all_of_degree(n, k);
    if k < 2 {
        let elements = cols
            .into_iter()
            .map(|m| MultiPoly::monomial(m, Rational::one()))
            .collect();
        return Ok(HarmonicBasis {
            dim: n,
            degree: k,
            elements,
        });
    }
    let rows = MultiIndex::all_of_degree(n, k - 2);
    let row_of: std::collections::HashMap<MultiIndex, usize> =
        rows.iter().enumerate().map(|(i, m)| (*m, i)).collect();
    let mut lap = QMatrix::zeros(rows.len(), cols.len());
    for (j, m) in cols.iter().enumerate() {
        let image = MultiPoly::monomial(*m, Rational::one()).laplacian();
        for (t, c) in image.terms() {
            lap[(row_of[t], j)] = c.clone();
        }
    }
    let z = lap.null_space();
    let elements = (0..z.cols())
        .map(|c| {
            MultiPoly::from_terms(
                n,
                cols.iter()
                    .enumerate()
                    .map(|(r, m)| (*m, z[(r, c)].clone())),
            )
        })
        .collect();
    Ok(HarmonicBasis {
        dim: n,
        degree: k,
        elements,
    })
}

/// `Re (x1 + i x2)^k`, a harmonic homogeneous polynomial of degree `k` in any
/// dimension `n >= 2`.
pub fn representative(n: usize, k: u32) -> MultiPoly {
    let terms = (0..=k).step_by(2).map(|j| {
        let mut e = vec![0u32; n];
        e[0] = k - j;
        e[1] = j;
        let sign: i64 = if (j / 2) % 2 == 0 { 1 } else { -1 };
        (
            MultiIndex::new(&e),
            Rational::from_integer((sign * binomial(k as u64, j as u64) as i64).into()),
        )
    });
    MultiPoly::from_terms(n, terms)
}
