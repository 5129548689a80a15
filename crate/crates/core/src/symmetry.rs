//! Formal symmetries on matrix instances.
//!
//! `S` is a formal symmetry of `P` when `P S = S' P` for some `S'`, which is
//! solvable exactly when `S` maps `𝒩(P)` into itself. For a true decomposition
//! with projectors `Pr_i = Q_i P^i`, the pieces `S_ij = Pr_i S Pr_j` satisfy
//! `P_i S_ij = S'_ij P_j` with `S'_ij = Q_i S' Pr_j P^j`, and conversely
//! `S_ij Pr_j` (or the simpler `S_ij P^j`) is again a formal symmetry of `P`.
//!
//! Witnesses `S'` are not unique when `P` is singular. When `S` commutes with
//! `P` the witness is `S` itself; otherwise it solves `P^T x = (P S)^T` row by
//! row, with every free variable of the reduced echelon form set to zero.

use crate::backend::linalg::rref_rows;
use crate::backend::{kernel_basis, solve_affine, Matrix, OperatorInstance, Vector};
use crate::certify::{verify_certificate, Certificate, FactoredOperator};
use crate::error::{Error, Result};
use crate::planner::IndexSet;
use crate::poly::Rational;

/// Largest matrix size accepted by [`enumerate_formal_symmetries`].
pub const MAX_SYMMETRY_DIMENSION: usize = 16;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FormalSymmetry {
    pub s: Matrix,
    pub s_prime: Matrix,
}

impl FormalSymmetry {
    /// `P S = S' P`.
    pub fn verify(&self, p: &Matrix) -> bool {
        match (p.checked_mul(&self.s), self.s_prime.checked_mul(p)) {
            (Ok(a), Ok(b)) => a == b,
            _ => false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneralizedSymmetry {
    pub i: usize,
    pub j: usize,
    pub s_ij: Matrix,
    pub s_prime_ij: Matrix,
}

impl GeneralizedSymmetry {
    /// `P_i S_ij = S'_ij P_j`.
    pub fn verify(&self, p_i: &Matrix, p_j: &Matrix) -> bool {
        match (
            p_i.checked_mul(&self.s_ij),
            self.s_prime_ij.checked_mul(p_j),
        ) {
            (Ok(a), Ok(b)) => a == b,
            _ => false,
        }
    }
}

fn check_square_pair(s: &Matrix, p: &Matrix) -> Result<()> {
    if !p.is_square() || !s.is_square() || s.rows() != p.rows() {
        return Err(Error::DimensionMismatch {
            expected: p.rows(),
            found: if s.rows() != p.rows() {
                s.rows()
            } else {
                s.cols()
            },
        });
    }
    Ok(())
}

/// A witness `S'` with `P S = S' P`, or `None` when `S(𝒩(P)) ⊄ 𝒩(P)`.
pub fn formal_witness(s: &Matrix, p: &Matrix) -> Result<Option<Matrix>> {
    check_square_pair(s, p)?;
    let ps = p * s;
    if ps == s * p {
        return Ok(Some(s.clone()));
    }
    let pt = p.transpose();
    let mut rows = Vec::with_capacity(p.rows());
    for r in 0..p.rows() {
        let sol = solve_affine(&pt, ps.row(r))?;
        match sol.particular() {
            Some(x) => rows.push(x.clone()),
            None => return Ok(None),
        }
    }
    Ok(Some(Matrix::from_rows(rows)?))
}

pub fn is_formal_symmetry(s: &Matrix, p: &Matrix) -> Result<Option<FormalSymmetry>> {
    Ok(formal_witness(s, p)?.map(|s_prime| FormalSymmetry {
        s: s.clone(),
        s_prime,
    }))
}

/// Basis of `{S : P S K = 0}`, where the columns of `K` span `𝒩(P)`.
pub fn enumerate_formal_symmetries(p: &Matrix) -> Result<Vec<Matrix>> {
    if !p.is_square() {
        return Err(Error::DimensionMismatch {
            expected: p.rows(),
            found: p.cols(),
        });
    }
    let n = p.rows();
    if n > MAX_SYMMETRY_DIMENSION {
        return Err(Error::ResourceLimit {
            what: "dimension for symmetry enumeration".into(),
            limit: MAX_SYMMETRY_DIMENSION,
        });
    }
    let kernel = kernel_basis(p);
    // (P S K)[a][b] = Σ_{r,c} P[a][r] S[r][c] K[c][b], unknown S[r][c] at r*n + c
    let mut constraints: Vec<Vector> = Vec::with_capacity(n * kernel.len());
    for a in 0..n {
        for k in &kernel {
            let mut row = vec![Rational::default(); n * n];
            for r in 0..n {
                let par = p.get(a, r);
                if num_traits::Zero::is_zero(par) {
                    continue;
                }
                for c in 0..n {
                    row[r * n + c] = par * &k[c];
                }
            }
            constraints.push(row);
        }
    }
    let e = rref_rows(&constraints, n * n);
    let free = e.free_columns();
    Ok(free
        .into_iter()
        .map(|f| {
            let mut v = vec![Rational::default(); n * n];
            v[f] = Rational::from_integer(1.into());
            for (row, &piv) in e.rows.iter().zip(&e.pivots) {
                v[piv] = -row[f].clone();
            }
            Matrix::from_fn(n, n, |r, c| v[r * n + c].clone())
        })
        .collect())
}

/// Instantiated data of a verified true decomposition.
#[derive(Debug, Clone)]
pub struct SymmetryContext {
    p: Matrix,
    factors: Vec<Matrix>,
    complements: Vec<Matrix>,
    cofactors: Vec<Matrix>,
    projectors: Vec<Matrix>,
}

impl SymmetryContext {
    pub fn new(
        cert: &Certificate,
        ops: &FactoredOperator,
        inst: &OperatorInstance,
    ) -> Result<Self> {
        if !cert.is_true_decomposition() {
            return Err(Error::Precondition(
                "projectors need a true decomposition".into(),
            ));
        }
        if !verify_certificate(cert, ops)?.holds {
            return Err(Error::Verification(
                "certificate does not sum to one".into(),
            ));
        }
        let n = ops.len();
        let mut factors = Vec::with_capacity(n);
        let mut complements = Vec::with_capacity(n);
        let mut cofactors = Vec::with_capacity(n);
        for i in 0..n {
            factors.push(inst.instantiate(ops.factor(i))?);
            complements.push(inst.instantiate(&ops.complement_product(IndexSet::singleton(i)))?);
            cofactors
                .push(inst.instantiate(cert.singleton_cofactor(i).expect("true decomposition"))?);
        }
        let projectors = cofactors
            .iter()
            .zip(&complements)
            .map(|(q, c)| q * c)
            .collect();
        Ok(SymmetryContext {
            p: inst.instantiate(&ops.full_product())?,
            factors,
            complements,
            cofactors,
            projectors,
        })
    }

    pub fn operator(&self) -> &Matrix {
        &self.p
    }

    pub fn factor(&self, i: usize) -> &Matrix {
        &self.factors[i]
    }

    pub fn len(&self) -> usize {
        self.factors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.factors.is_empty()
    }

    /// `Pr_i = Q_i P^i`.
    pub fn projector(&self, i: usize) -> &Matrix {
        &self.projectors[i]
    }

    /// `S_ij = Pr_i S Pr_j` with `S'_ij = Q_i S' Pr_j P^j`.
    pub fn generalized_from_formal(
        &self,
        sym: &FormalSymmetry,
        i: usize,
        j: usize,
    ) -> Result<GeneralizedSymmetry> {
        if !sym.verify(&self.p) {
            return Err(Error::Precondition(
                "S is not a formal symmetry of P".into(),
            ));
        }
        let pr_i = &self.projectors[i];
        let pr_j = &self.projectors[j];
        let g = GeneralizedSymmetry {
            i,
            j,
            s_ij: &(pr_i * &sym.s) * pr_j,
            s_prime_ij: &(&(&self.cofactors[i] * &sym.s_prime) * pr_j) * &self.complements[j],
        };
        if !g.verify(&self.factors[i], &self.factors[j]) {
            return Err(Error::Verification(format!(
                "generalized symmetry ({i},{j}) fails P_i S_ij = S'_ij P_j"
            )));
        }
        Ok(g)
    }

    /// `S = S_ij Pr_j` with `S' = P^i S'_ij Q_j`.
    pub fn formal_from_generalized(&self, g: &GeneralizedSymmetry) -> Result<FormalSymmetry> {
        self.check_generalized(g)?;
        let sym = FormalSymmetry {
            s: &g.s_ij * &self.projectors[g.j],
            s_prime: &(&self.complements[g.i] * &g.s_prime_ij) * &self.cofactors[g.j],
        };
        self.check_formal(sym)
    }

    /// `S = S_ij P^j` with `S' = P^i S'_ij`.
    pub fn formal_from_generalized_simple(
        &self,
        g: &GeneralizedSymmetry,
    ) -> Result<FormalSymmetry> {
        self.check_generalized(g)?;
        let sym = FormalSymmetry {
            s: &g.s_ij * &self.complements[g.j],
            s_prime: &self.complements[g.i] * &g.s_prime_ij,
        };
        self.check_formal(sym)
    }

    fn check_generalized(&self, g: &GeneralizedSymmetry) -> Result<()> {
        if g.i >= self.len() || g.j >= self.len() {
            return Err(Error::Precondition(format!(
                "indices ({}, {}) out of range",
                g.i, g.j
            )));
        }
        if !g.verify(&self.factors[g.i], &self.factors[g.j]) {
            return Err(Error::Precondition("not a generalized symmetry".into()));
        }
        Ok(())
    }

    fn check_formal(&self, sym: FormalSymmetry) -> Result<FormalSymmetry> {
        if !sym.verify(&self.p) {
            return Err(Error::Verification(
                "reconstruction fails P S = S' P".into(),
            ));
        }
        Ok(sym)
    }
}

/// The matrix of `S` restricted to `span(kernel)`, in that basis; `None`
/// when `S` does not preserve the span.
pub fn induced_on_kernel(s: &Matrix, kernel: &[Vector]) -> Result<Option<Matrix>> {
    let n = s.rows();
    let d = kernel.len();
    if d == 0 {
        return Ok(Some(Matrix::zeros(0, 0)));
    }
    let basis = Matrix::from_columns(n, kernel)?;
    let mut columns = Vec::with_capacity(d);
    for k in kernel {
        let sol = solve_affine(&basis, &s.mul_vec(k)?)?;
        match sol.particular() {
            Some(c) => columns.push(c.clone()),
            None => return Ok(None),
        }
    }
    Ok(Some(Matrix::from_columns(d, &columns)?))
}

/// Dimensions compared by the generation check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GenerationReport {
    pub kernel_dimension: usize,
    pub formal_basis_size: usize,
    /// Dimension of the maps on `𝒩(P)` induced by formal symmetries.
    pub induced_dimension: usize,
    /// Same, for the reconstructions `S_ij Pr_j` of all pieces.
    pub generated_dimension: usize,
    /// Count of reconstructions checked against `P S = S' P`.
    pub reconstructions_verified: usize,
}

impl GenerationReport {
    pub fn holds(&self) -> bool {
        self.induced_dimension == self.generated_dimension
    }
}

fn flatten(m: &Matrix) -> Vector {
    m.entries().to_vec()
}

/// Decomposes every basis symmetry into pieces, reconstructs each piece, and
/// compares the spans of the maps they induce on `𝒩(P)`.
pub fn generation_check(ctx: &SymmetryContext) -> Result<GenerationReport> {
    let kernel = kernel_basis(ctx.operator());
    let d = kernel.len();
    let basis = enumerate_formal_symmetries(ctx.operator())?;
    let mut induced = Vec::new();
    let mut generated = Vec::new();
    let mut verified = 0;
    for s in &basis {
        let sym = is_formal_symmetry(s, ctx.operator())?.ok_or_else(|| {
            Error::Verification("enumerated matrix is not a formal symmetry".into())
        })?;
        let m = induced_on_kernel(s, &kernel)?
            .ok_or_else(|| Error::Verification("kernel not preserved".into()))?;
        induced.push(flatten(&m));
        for i in 0..ctx.len() {
            for j in 0..ctx.len() {
                let g = ctx.generalized_from_formal(&sym, i, j)?;
                let back = ctx.formal_from_generalized(&g)?;
                verified += 1;
                let m = induced_on_kernel(&back.s, &kernel)?.ok_or_else(|| {
                    Error::Verification("reconstruction does not preserve the kernel".into())
                })?;
                generated.push(flatten(&m));
            }
        }
    }
    Ok(GenerationReport {
        kernel_dimension: d,
        formal_basis_size: basis.len(),
        induced_dimension: rref_rows(&induced, d * d).rank(),
        generated_dimension: rref_rows(&generated, d * d).rank(),
        reconstructions_verified: verified,
    })
}
