use std::collections::BTreeMap;

use num_traits::Zero;

use super::matrix::{Matrix, Vector};
use crate::error::{Error, Result};
use crate::poly::{Monomial, Polynomial, Rational};

/// Largest dimension accepted for a truncated-derivative instance.
pub const MAX_INSTANCE_DIMENSION: usize = 2000;

/// Pairwise commuting square matrices `D_1, ..., D_k` of one size.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OperatorInstance {
    dimension: usize,
    generators: Vec<Matrix>,
    /// Monomial labels of the basis, when the space is a polynomial space.
    monomial_basis: Option<Vec<Monomial>>,
}

impl OperatorInstance {
    pub fn new(generators: Vec<Matrix>) -> Result<Self> {
        let first = generators.first().ok_or_else(|| {
            Error::Precondition("an instance needs at least one generator".into())
        })?;
        let dimension = first.rows();
        for g in &generators {
            if !g.is_square() || g.rows() != dimension {
                return Err(Error::DimensionMismatch {
                    expected: dimension,
                    found: if g.rows() != dimension {
                        g.rows()
                    } else {
                        g.cols()
                    },
                });
            }
        }
        for i in 0..generators.len() {
            for j in i + 1..generators.len() {
                if !generators[i].commutes_with(&generators[j]) {
                    return Err(Error::NonCommuting(i, j));
                }
            }
        }
        Ok(OperatorInstance {
            dimension,
            generators,
            monomial_basis: None,
        })
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn nvars(&self) -> usize {
        self.generators.len()
    }

    pub fn generators(&self) -> &[Matrix] {
        &self.generators
    }

    pub fn monomial_basis(&self) -> Option<&[Monomial]> {
        self.monomial_basis.as_deref()
    }

    /// The image of `p` under `x_i ↦ D_i`, with constants acting as scalars.
    pub fn instantiate(&self, p: &Polynomial) -> Result<Matrix> {
        if p.nvars() != self.nvars() {
            return Err(Error::VariableCountMismatch {
                left: self.nvars(),
                right: p.nvars(),
            });
        }
        let mut powers: Vec<Vec<Matrix>> =
            vec![vec![Matrix::identity(self.dimension)]; self.nvars()];
        let mut out = Matrix::zeros(self.dimension, self.dimension);
        for (mono, c) in p.terms() {
            let mut term = Matrix::scalar(self.dimension, c);
            for (v, &e) in mono.exponents().iter().enumerate() {
                if e == 0 {
                    continue;
                }
                let cache = &mut powers[v];
                while cache.len() <= e as usize {
                    let next = cache.last().unwrap() * &self.generators[v];
                    cache.push(next);
                }
                term = &term * &cache[e as usize];
            }
            out = &out + &term;
        }
        Ok(out)
    }

    /// Coordinates of a polynomial in the monomial basis; errors when the
    /// instance has no such basis or `p` has a term outside it.
    pub fn encode(&self, p: &Polynomial) -> Result<Vector> {
        let basis = self
            .monomial_basis
            .as_ref()
            .ok_or_else(|| Error::Precondition("instance has no monomial basis".into()))?;
        if p.nvars() != self.nvars() {
            return Err(Error::VariableCountMismatch {
                left: self.nvars(),
                right: p.nvars(),
            });
        }
        let index: BTreeMap<&Monomial, usize> =
            basis.iter().enumerate().map(|(i, m)| (m, i)).collect();
        let mut v = vec![Rational::zero(); self.dimension];
        for (m, c) in p.terms() {
            let i = index.get(m).ok_or_else(|| {
                Error::Precondition(format!(
                    "term of degree {} lies outside the truncated space",
                    m.degree()
                ))
            })?;
            v[*i] = c.clone();
        }
        Ok(v)
    }

    /// Inverse of [`OperatorInstance::encode`].
    pub fn decode(&self, v: &[Rational]) -> Result<Polynomial> {
        let basis = self
            .monomial_basis
            .as_ref()
            .ok_or_else(|| Error::Precondition("instance has no monomial basis".into()))?;
        if v.len() != self.dimension {
            return Err(Error::DimensionMismatch {
                expected: self.dimension,
                found: v.len(),
            });
        }
        Ok(Polynomial::from_terms(
            self.nvars(),
            basis.iter().cloned().zip(v.iter().cloned()),
        ))
    }
}

fn binomial(n: usize, k: usize) -> Option<usize> {
    let mut acc: usize = 1;
    for i in 0..k {
        acc = acc.checked_mul(n - i)? / (i + 1);
    }
    Some(acc)
}

/// Monomials in `k` variables of total degree `< max_degree`, by degree and
/// then descending lexicographic order within a degree.
fn graded_monomials(k: usize, max_degree: u32) -> Vec<Monomial> {
    fn fill(k: usize, left: u32, prefix: &mut Vec<u32>, out: &mut Vec<Monomial>) {
        if prefix.len() == k - 1 {
            prefix.push(left);
            out.push(Monomial::new(prefix.clone()));
            prefix.pop();
            return;
        }
        for e in (0..=left).rev() {
            prefix.push(e);
            fill(k, left - e, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    for d in 0..max_degree {
        fill(k, d, &mut Vec::new(), &mut out);
    }
    out
}

/// Partial derivatives `∂/∂x_i` on polynomials of total degree `< max_degree`.
pub fn make_truncated_derivative_instance(k: usize, max_degree: u32) -> Result<OperatorInstance> {
    if k == 0 || max_degree == 0 {
        return Err(Error::Precondition(
            "k and max_degree must be positive".into(),
        ));
    }
    let dim = binomial(max_degree as usize - 1 + k, k).unwrap_or(usize::MAX);
    if dim > MAX_INSTANCE_DIMENSION {
        return Err(Error::ResourceLimit {
            what: "instance dimension".into(),
            limit: MAX_INSTANCE_DIMENSION,
        });
    }
    let basis = graded_monomials(k, max_degree);
    debug_assert_eq!(basis.len(), dim);
    let index: BTreeMap<&Monomial, usize> = basis.iter().enumerate().map(|(i, m)| (m, i)).collect();
    let generators = (0..k)
        .map(|v| {
            let mut d = Matrix::zeros(dim, dim);
            for (col, m) in basis.iter().enumerate() {
                let e = m.exponents()[v];
                if e == 0 {
                    continue;
                }
                let mut lowered = m.exponents().to_vec();
                lowered[v] -= 1;
                let row = index[&Monomial::new(lowered)];
                d.set(row, col, Rational::from_integer(e.into()));
            }
            d
        })
        .collect();
    let mut inst = OperatorInstance::new(generators)?;
    inst.monomial_basis = Some(basis);
    Ok(inst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::backend::linalg::determinant;
    use crate::poly::{integer, Variables};

    #[test]
    fn diagonal_instantiation() {
        let inst =
            OperatorInstance::new(vec![Matrix::diagonal(&[integer(-1), integer(-2)])]).unwrap();
        let v = Variables::new(["x"]).unwrap();
        assert!(inst
            .instantiate(&v.parse("1").unwrap())
            .unwrap()
            .is_identity());
        assert_eq!(
            inst.instantiate(&v.parse("x").unwrap()).unwrap(),
            Matrix::diagonal(&[integer(-1), integer(-2)])
        );
        assert!(inst
            .instantiate(&v.parse("(x+1)*(x+2)").unwrap())
            .unwrap()
            .is_zero());
        assert!(inst.instantiate(&Polynomial::one(2)).is_err());
    }

    #[test]
    fn non_commuting_rejected() {
        let a = Matrix::from_i64(&[&[0, 1], &[0, 0]]).unwrap();
        let b = Matrix::from_i64(&[&[0, 0], &[1, 0]]).unwrap();
        assert_eq!(
            OperatorInstance::new(vec![a, b]),
            Err(Error::NonCommuting(0, 1))
        );
    }

    #[test]
    fn smallest_derivative_instance() {
        let inst = make_truncated_derivative_instance(1, 2).unwrap();
        assert_eq!(
            inst.generators()[0],
            Matrix::from_i64(&[&[0, 1], &[0, 0]]).unwrap()
        );
    }

    #[test]
    fn derivative_instance_properties() {
        let inst = make_truncated_derivative_instance(2, 4).unwrap();
        assert_eq!(inst.dimension(), 10);
        for g in inst.generators() {
            assert!(g.pow(4).is_zero());
        }
        let v = Variables::new(["x", "y"]).unwrap();
        let f = v.parse("x^2*y + 3*y").unwrap();
        let fx = inst.generators()[0]
            .mul_vec(&inst.encode(&f).unwrap())
            .unwrap();
        assert_eq!(inst.decode(&fx).unwrap(), v.parse("2*x*y").unwrap());
        assert!(inst.encode(&v.parse("x^4").unwrap()).is_err());

        let one_var = make_truncated_derivative_instance(1, 4).unwrap();
        let m = one_var
            .instantiate(&Variables::new(["x"]).unwrap().parse("x+1").unwrap())
            .unwrap();
        assert_eq!(determinant(&m).unwrap(), integer(1));
    }

    #[test]
    fn dimension_cap() {
        assert!(matches!(
            make_truncated_derivative_instance(3, 40),
            Err(Error::ResourceLimit { .. })
        ));
    }
}
