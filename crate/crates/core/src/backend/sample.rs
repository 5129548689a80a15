//! Seeded random inputs for oracle checks.
//!
//! All generators draw from a caller-supplied [`ChaCha8Rng`], so a seed fixes
//! every instance, vector and matrix produced here.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::linalg::inverse;
use super::matrix::{Matrix, Vector};
use super::OperatorInstance;
use crate::poly::Rational;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `n/d` with `|n| ≤ bound` and `1 ≤ d ≤ 3`.
pub fn small_rational(rng: &mut ChaCha8Rng, bound: i64) -> Rational {
    let n = rng.gen_range(-bound..=bound);
    let d = rng.gen_range(1..=3);
    Rational::new(n.into(), d.into())
}

pub fn small_integer(rng: &mut ChaCha8Rng, bound: i64) -> Rational {
    Rational::from_integer(rng.gen_range(-bound..=bound).into())
}

pub fn random_vector(rng: &mut ChaCha8Rng, n: usize, bound: i64) -> Vector {
    (0..n).map(|_| small_rational(rng, bound)).collect()
}

pub fn random_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize, bound: i64) -> Matrix {
    Matrix::from_fn(rows, cols, |_, _| small_rational(rng, bound))
}

/// An integer matrix with determinant ±1 and its inverse.
pub fn random_unimodular(rng: &mut ChaCha8Rng, n: usize) -> (Matrix, Matrix) {
    let mut s = Matrix::identity(n);
    if n > 1 {
        for _ in 0..3 * n {
            let i = rng.gen_range(0..n);
            let mut j = rng.gen_range(0..n - 1);
            if j >= i {
                j += 1;
            }
            let c = Rational::from_integer(rng.gen_range(-2..=2i64).into());
            let mut e = Matrix::identity(n);
            e.set(i, j, c);
            s = &e * &s;
        }
    }
    let inv = inverse(&s).expect("elementary products are invertible");
    (s, inv)
}

/// Block-diagonal matrix of Jordan blocks `(eigenvalue, size)`.
pub fn jordan_matrix(blocks: &[(Rational, usize)]) -> Matrix {
    let n: usize = blocks.iter().map(|b| b.1).sum();
    let mut m = Matrix::zeros(n, n);
    let mut at = 0;
    for (lambda, size) in blocks {
        for t in 0..*size {
            m.set(at + t, at + t, lambda.clone());
            if t + 1 < *size {
                m.set(at + t, at + t + 1, Rational::from_integer(1.into()));
            }
        }
        at += size;
    }
    m
}

/// `S J S⁻¹` for a random unimodular `S`.
pub fn conjugate(rng: &mut ChaCha8Rng, j: &Matrix) -> Matrix {
    let (s, s_inv) = random_unimodular(rng, j.rows());
    &(&s * j) * &s_inv
}

/// `Σ c_t A^t` for the given coefficients.
pub fn polynomial_in(a: &Matrix, coefficients: &[Rational]) -> Matrix {
    let mut out = Matrix::zeros(a.rows(), a.cols());
    let mut power = Matrix::identity(a.rows());
    for c in coefficients {
        out = &out + &power.scale(c);
        power = &power * a;
    }
    out
}

/// `k` commuting generators: `D_1 = A` and the rest random polynomials in `A`.
pub fn commuting_family(
    rng: &mut ChaCha8Rng,
    a: &Matrix,
    k: usize,
    degree: usize,
) -> OperatorInstance {
    let mut gens = vec![a.clone()];
    for _ in 1..k {
        let coeffs: Vec<Rational> = (0..=degree).map(|_| small_integer(rng, 2)).collect();
        gens.push(polynomial_in(a, &coeffs));
    }
    OperatorInstance::new(gens).expect("polynomials in one matrix commute")
}
