//! Exact elimination.
//!
//! Rows are cleared of denominators and reduced with Bareiss' fraction-free
//! scheme, so every intermediate entry is an integer minor of the input. The
//! echelon form is then normalized to reduced row echelon form over the
//! rationals; pivots and free columns of that form fix every basis returned
//! here, which makes results reproducible byte for byte.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use super::matrix::{vec_is_zero, vec_sub, zero_vector, Matrix, Vector};
use crate::error::{Error, Result};
use crate::poly::Rational;

/// Reduced row echelon form with its pivot columns.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Echelon {
    /// Nonzero rows only, one per pivot.
    pub rows: Vec<Vector>,
    pub pivots: Vec<usize>,
    pub cols: usize,
}

impl Echelon {
    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    pub fn free_columns(&self) -> Vec<usize> {
        let mut is_pivot = vec![false; self.cols];
        for &p in &self.pivots {
            is_pivot[p] = true;
        }
        (0..self.cols).filter(|&c| !is_pivot[c]).collect()
    }

    /// Reduces `v` against the rows; zero iff `v` lies in the row space.
    pub fn reduce(&self, v: &[Rational]) -> Vector {
        let mut out = v.to_vec();
        for (row, &p) in self.rows.iter().zip(&self.pivots) {
            if out[p].is_zero() {
                continue;
            }
            let c = out[p].clone();
            for (o, r) in out.iter_mut().zip(row) {
                if !r.is_zero() {
                    *o -= &c * r;
                }
            }
        }
        out
    }
}

fn integer_rows(rows: &[Vector]) -> Vec<Vec<BigInt>> {
    rows.iter()
        .map(|row| {
            let lcm = row.iter().fold(BigInt::one(), |acc, v| acc.lcm(v.denom()));
            row.iter().map(|v| v.numer() * (&lcm / v.denom())).collect()
        })
        .collect()
}

/// Fraction-free forward elimination. Returns the echelon rows (integers)
/// and pivot columns, plus the sign of the row permutation.
fn bareiss(mut a: Vec<Vec<BigInt>>, cols: usize) -> (Vec<Vec<BigInt>>, Vec<usize>, bool) {
    let nrows = a.len();
    let mut prev = BigInt::one();
    let mut r = 0;
    let mut pivots = Vec::new();
    let mut odd = false;
    for c in 0..cols {
        if r == nrows {
            break;
        }
        let Some(p) = (r..nrows).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        if p != r {
            a.swap(p, r);
            odd = !odd;
        }
        let (top, below) = a.split_at_mut(r + 1);
        let pivot_row = &top[r];
        for row in below.iter_mut() {
            let lead = row[c].clone();
            for j in c + 1..cols {
                let num = &pivot_row[c] * &row[j] - &lead * &pivot_row[j];
                let (q, rem) = num.div_rem(&prev);
                debug_assert!(rem.is_zero(), "Bareiss division must be exact");
                row[j] = q;
            }
            row[c] = BigInt::zero();
        }
        prev = pivot_row[c].clone();
        pivots.push(c);
        r += 1;
    }
    a.truncate(r);
    (a, pivots, odd)
}

/// Reduced row echelon form of the given rows (each of length `cols`).
pub fn rref_rows(rows: &[Vector], cols: usize) -> Echelon {
    let (ints, pivots, _) = bareiss(integer_rows(rows), cols);
    let mut out: Vec<Vector> = ints
        .into_iter()
        .zip(&pivots)
        .map(|(row, &p)| {
            let lead = Rational::from_integer(row[p].clone());
            row.into_iter()
                .map(|v| Rational::from_integer(v) / &lead)
                .collect()
        })
        .collect();
    for k in (0..out.len()).rev() {
        let p = pivots[k];
        let (above, rest) = out.split_at_mut(k);
        let pivot_row = &rest[0];
        for row in above.iter_mut() {
            if row[p].is_zero() {
                continue;
            }
            let c = row[p].clone();
            for (x, y) in row.iter_mut().zip(pivot_row).skip(p) {
                if !y.is_zero() {
                    *x -= &c * y;
                }
            }
        }
    }
    Echelon {
        rows: out,
        pivots,
        cols,
    }
}

pub fn rref(m: &Matrix) -> Echelon {
    rref_rows(&m.row_vectors(), m.cols())
}

pub fn rank(m: &Matrix) -> usize {
    let (_, pivots, _) = bareiss(integer_rows(&m.row_vectors()), m.cols());
    pivots.len()
}

/// Exact determinant from the last Bareiss pivot.
pub fn determinant(m: &Matrix) -> Result<Rational> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch {
            expected: m.rows(),
            found: m.cols(),
        });
    }
    let rows = m.row_vectors();
    let scale = rows.iter().fold(Rational::one(), |acc, row| {
        let lcm = row.iter().fold(BigInt::one(), |l, v| l.lcm(v.denom()));
        acc * Rational::from_integer(lcm)
    });
    let n = m.rows();
    let (ints, pivots, odd) = bareiss(integer_rows(&rows), n);
    if pivots.len() < n {
        return Ok(Rational::zero());
    }
    let det = Rational::from_integer(ints[n - 1][n - 1].clone()) / scale;
    Ok(if odd { -det } else { det })
}

/// Basis of `{v : m v = 0}`: one vector per free column `f`, with a one in
/// position `f` and zeros in the other free positions.
pub fn kernel_basis(m: &Matrix) -> Vec<Vector> {
    kernel_from_echelon(&rref(m))
}

fn kernel_from_echelon(e: &Echelon) -> Vec<Vector> {
    e.free_columns()
        .into_iter()
        .map(|f| {
            let mut v = zero_vector(e.cols);
            v[f] = Rational::one();
            for (row, &p) in e.rows.iter().zip(&e.pivots) {
                v[p] = -row[f].clone();
            }
            v
        })
        .collect()
}

/// Canonical basis of the span of `vectors`: the nonzero RREF rows.
pub fn span_basis(vectors: &[Vector], dim: usize) -> Vec<Vector> {
    rref_rows(vectors, dim).rows
}

pub fn span_contains(basis: &Echelon, v: &[Rational]) -> bool {
    vec_is_zero(&basis.reduce(v))
}

pub fn spans_equal(a: &[Vector], b: &[Vector], dim: usize) -> bool {
    rref_rows(a, dim) == rref_rows(b, dim)
}

/// Affine subspace `particular + span(kernel)`, or the empty set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AffineSolutionSet {
    dimension: usize,
    particular: Option<Vector>,
    kernel: Vec<Vector>,
}

impl AffineSolutionSet {
    pub fn empty(dimension: usize) -> Self {
        AffineSolutionSet {
            dimension,
            particular: None,
            kernel: Vec::new(),
        }
    }

    /// `particular + span(spanning)`; the spanning set is reduced to a basis.
    pub fn from_spanning(particular: Vector, spanning: &[Vector]) -> Self {
        let dimension = particular.len();
        AffineSolutionSet {
            dimension,
            particular: Some(particular),
            kernel: span_basis(spanning, dimension),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.particular.is_none()
    }

    pub fn ambient_dimension(&self) -> usize {
        self.dimension
    }

    pub fn particular(&self) -> Option<&Vector> {
        self.particular.as_ref()
    }

    pub fn kernel_basis(&self) -> &[Vector] {
        &self.kernel
    }

    /// Dimension of the affine set; `None` when empty.
    pub fn dimension(&self) -> Option<usize> {
        self.particular.as_ref().map(|_| self.kernel.len())
    }

    pub fn contains(&self, v: &[Rational]) -> bool {
        match &self.particular {
            None => false,
            Some(p) => span_contains(&rref_rows(&self.kernel, self.dimension), &vec_sub(v, p)),
        }
    }

    /// Canonical representative: kernel in RREF, particular reduced against it.
    pub fn canonical(&self) -> AffineSolutionSet {
        match &self.particular {
            None => AffineSolutionSet::empty(self.dimension),
            Some(p) => {
                let e = rref_rows(&self.kernel, self.dimension);
                AffineSolutionSet {
                    dimension: self.dimension,
                    particular: Some(e.reduce(p)),
                    kernel: e.rows,
                }
            }
        }
    }

    /// Exact set equality.
    pub fn same_set(&self, other: &AffineSolutionSet) -> bool {
        self.dimension == other.dimension && self.canonical() == other.canonical()
    }
}

/// Full solution set of `m u = f`.
pub fn solve_affine(m: &Matrix, f: &[Rational]) -> Result<AffineSolutionSet> {
    if f.len() != m.rows() {
        return Err(Error::DimensionMismatch {
            expected: m.rows(),
            found: f.len(),
        });
    }
    let n = m.cols();
    let augmented: Vec<Vector> = (0..m.rows())
        .map(|i| {
            let mut row = m.row(i).to_vec();
            row.push(f[i].clone());
            row
        })
        .collect();
    let e = rref_rows(&augmented, n + 1);
    if e.pivots.last() == Some(&n) {
        return Ok(AffineSolutionSet::empty(n));
    }
    let mut particular = zero_vector(n);
    for (row, &p) in e.rows.iter().zip(&e.pivots) {
        particular[p] = row[n].clone();
    }
    let coefficient_part = Echelon {
        rows: e.rows.iter().map(|r| r[..n].to_vec()).collect(),
        pivots: e.pivots.clone(),
        cols: n,
    };
    Ok(AffineSolutionSet {
        dimension: n,
        particular: Some(particular),
        kernel: kernel_from_echelon(&coefficient_part),
    })
}

pub fn range_member(m: &Matrix, f: &[Rational]) -> Result<bool> {
    Ok(!solve_affine(m, f)?.is_empty())
}

pub fn inverse(m: &Matrix) -> Option<Matrix> {
    if !m.is_square() {
        return None;
    }
    let n = m.rows();
    let augmented: Vec<Vector> = (0..n)
        .map(|i| {
            let mut row = m.row(i).to_vec();
            row.extend((0..n).map(|j| {
                if i == j {
                    Rational::one()
                } else {
                    Rational::zero()
                }
            }));
            row
        })
        .collect();
    let e = rref_rows(&augmented, 2 * n);
    if e.pivots.len() < n || e.pivots[n - 1] != n - 1 {
        return None;
    }
    Some(Matrix::from_fn(n, n, |i, j| e.rows[i][n + j].clone()))
}

/// Whether `m` maps every vector of `basis` into `span(target)`.
pub fn maps_into(m: &Matrix, basis: &[Vector], target: &[Vector]) -> Result<bool> {
    let e = rref_rows(target, m.rows());
    for v in basis {
        if !span_contains(&e, &m.mul_vec(v)?) {
            return Ok(false);
        }
    }
    Ok(true)
}
