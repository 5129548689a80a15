use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::poly::{parse_rational, Rational};

/// Column vector of exact rationals.
pub type Vector = Vec<Rational>;

/// Dense row-major matrix of exact rationals.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<Rational>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![Rational::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = Rational::one();
        }
        m
    }

    pub fn scalar(n: usize, c: &Rational) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = c.clone();
        }
        m
    }

    pub fn diagonal(entries: &[Rational]) -> Self {
        let n = entries.len();
        let mut m = Matrix::zeros(n, n);
        for (i, e) in entries.iter().enumerate() {
            m.data[i * n + i] = e.clone();
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Rational) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix { rows, cols, data }
    }

    /// Rows must be nonempty and of equal, nonzero length.
    pub fn from_rows(rows: Vec<Vec<Rational>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if r == 0 || c == 0 {
            return Err(Error::DimensionMismatch {
                expected: 1,
                found: 0,
            });
        }
        if let Some(bad) = rows.iter().find(|row| row.len() != c) {
            return Err(Error::DimensionMismatch {
                expected: c,
                found: bad.len(),
            });
        }
        Ok(Matrix {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        })
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns(rows: usize, columns: &[Vector]) -> Result<Self> {
        if let Some(bad) = columns.iter().find(|c| c.len() != rows) {
            return Err(Error::DimensionMismatch {
                expected: rows,
                found: bad.len(),
            });
        }
        Ok(Matrix::from_fn(rows, columns.len(), |i, j| {
            columns[j][i].clone()
        }))
    }

    pub fn from_i64(rows: &[&[i64]]) -> Result<Self> {
        Matrix::from_rows(
            rows.iter()
                .map(|r| {
                    r.iter()
                        .map(|&v| Rational::from_integer(v.into()))
                        .collect()
                })
                .collect(),
        )
    }

    /// Stacks matrices with equal column counts on top of each other.
    pub fn vstack(blocks: &[&Matrix]) -> Result<Self> {
        let cols = blocks.first().map_or(0, |b| b.cols);
        if let Some(bad) = blocks.iter().find(|b| b.cols != cols) {
            return Err(Error::DimensionMismatch {
                expected: cols,
                found: bad.cols,
            });
        }
        Ok(Matrix {
            rows: blocks.iter().map(|b| b.rows).sum(),
            cols,
            data: blocks.iter().flat_map(|b| b.data.iter().cloned()).collect(),
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Rational {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Rational) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[Rational] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vector {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn row_vectors(&self) -> Vec<Vector> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn entries(&self) -> &[Rational] {
        &self.data
    }

    pub fn transpose(&self) -> Matrix {
        Matrix::from_fn(self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    pub fn is_identity(&self) -> bool {
        self.is_square() && *self == Matrix::identity(self.rows)
    }

    pub fn scale(&self, c: &Rational) -> Matrix {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|v| v * c).collect(),
        }
    }

    fn same_shape(&self, other: &Matrix) -> Result<()> {
        if (self.rows, self.cols) != (other.rows, other.cols) {
            return Err(Error::DimensionMismatch {
                expected: self.rows * self.cols,
                found: other.rows * other.cols,
            });
        }
        Ok(())
    }

    pub fn checked_add(&self, other: &Matrix) -> Result<Matrix> {
        self.same_shape(other)?;
        Ok(Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }

    pub fn checked_sub(&self, other: &Matrix) -> Result<Matrix> {
        self.same_shape(other)?;
        Ok(Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a - b)
                .collect(),
        })
    }

    pub fn checked_mul(&self, other: &Matrix) -> Result<Matrix> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                found: other.rows,
            });
        }
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for t in 0..self.cols {
                let a = self.get(i, t);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(t, j);
                    if !b.is_zero() {
                        let slot = &mut out.data[i * other.cols + j];
                        *slot += a * b;
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[Rational]) -> Result<Vector> {
        if v.len() != self.cols {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                found: v.len(),
            });
        }
        Ok((0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .filter(|(a, b)| !a.is_zero() && !b.is_zero())
                    .fold(Rational::zero(), |acc, (a, b)| acc + a * b)
            })
            .collect())
    }

    pub fn pow(&self, mut e: u32) -> Matrix {
        assert!(self.is_square(), "power of a non-square matrix");
        let mut base = self.clone();
        let mut acc = Matrix::identity(self.rows);
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    pub fn commutes_with(&self, other: &Matrix) -> bool {
        match (self.checked_mul(other), other.checked_mul(self)) {
            (Ok(a), Ok(b)) => a == b,
            _ => false,
        }
    }

    /// Rows as `"a/b"` strings.
    pub fn to_string_grid(&self) -> Vec<Vec<String>> {
        (0..self.rows)
            .map(|i| self.row(i).iter().map(ToString::to_string).collect())
            .collect()
    }

    pub fn from_string_grid<S: AsRef<str>>(grid: &[Vec<S>]) -> Result<Self> {
        Matrix::from_rows(
            grid.iter()
                .map(|row| row.iter().map(|s| parse_rational(s.as_ref())).collect())
                .collect::<Result<_>>()?,
        )
    }
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{} [", self.rows, self.cols)?;
        for row in self.to_string_grid() {
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident, $checked:ident) => {
        impl $trait<&Matrix> for &Matrix {
            type Output = Matrix;
            fn $method(self, rhs: &Matrix) -> Matrix {
                self.$checked(rhs).expect("matrix shape mismatch")
            }
        }
        impl $trait<Matrix> for Matrix {
            type Output = Matrix;
            fn $method(self, rhs: Matrix) -> Matrix {
                (&self).$method(&rhs)
            }
        }
    };
}

forward_binop!(Add, add, checked_add);
forward_binop!(Sub, sub, checked_sub);
forward_binop!(Mul, mul, checked_mul);

impl Neg for &Matrix {
    type Output = Matrix;
    fn neg(self) -> Matrix {
        self.scale(&-Rational::one())
    }
}

pub fn vec_add(a: &[Rational], b: &[Rational]) -> Vector {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn vec_sub(a: &[Rational], b: &[Rational]) -> Vector {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn vec_scale(a: &[Rational], c: &Rational) -> Vector {
    a.iter().map(|x| x * c).collect()
}

pub fn vec_is_zero(a: &[Rational]) -> bool {
    a.iter().all(Zero::is_zero)
}

pub fn zero_vector(n: usize) -> Vector {
    vec![Rational::zero(); n]
}

pub fn vector_to_strings(v: &[Rational]) -> Vec<String> {
    v.iter().map(ToString::to_string).collect()
}

pub fn vector_from_strings<S: AsRef<str>>(v: &[S]) -> Result<Vector> {
    v.iter().map(|s| parse_rational(s.as_ref())).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::integer;

    #[test]
    fn product_and_power() {
        let a = Matrix::from_i64(&[&[1, 1], &[0, 1]]).unwrap();
        assert_eq!(a.pow(3), Matrix::from_i64(&[&[1, 3], &[0, 1]]).unwrap());
        assert_eq!(a.pow(0), Matrix::identity(2));
        let v = a.mul_vec(&[integer(2), integer(5)]).unwrap();
        assert_eq!(v, vec![integer(7), integer(5)]);
    }

    #[test]
    fn shape_errors() {
        let a = Matrix::zeros(2, 3);
        assert!(a.checked_mul(&a).is_err());
        assert!(a.mul_vec(&[integer(1)]).is_err());
        assert!(Matrix::from_rows(vec![vec![integer(1)], vec![]]).is_err());
        assert!(Matrix::from_rows(vec![]).is_err());
    }

    #[test]
    fn string_grid_round_trip() {
        let m = Matrix::from_string_grid(&[vec!["1/2", "-3"], vec!["0", "4/6"]]).unwrap();
        assert_eq!(
            m.to_string_grid(),
            vec![vec!["1/2", "-3"], vec!["0", "2/3"]]
        );
    }
}
