//! Applying certificates to linear problems.
//!
//! Given `1 = Σ_{J∈α} Q_J P^J`, the problem `P u = f` is replaced by the
//! subproblems `P_J u_J = f`. The recombination map `B(u_J) = Σ Q_J u_J`
//! sends subproblem solutions onto solutions of `P u = f`, and the splitting
//! map `F(u) = (P^J u)_J` goes back; `B ∘ F` is the identity on the whole
//! space, and `F ∘ B` is the identity on subproblem solutions when the members
//! of α are pairwise disjoint.
//!
//! [`system`] handles the variant with extra commuting constraints
//! `R^{(p)} u = g^p`.

pub mod system;

use serde::Serialize;

use crate::backend::linalg::{rref_rows, span_contains};
use crate::backend::{
    kernel_basis, range_member, solve_affine, vec_add, vec_is_zero, vec_sub, zero_vector,
    AffineSolutionSet, Matrix, OperatorInstance, Vector,
};
use crate::certify::{verify_certificate, Certificate, FactoredOperator};
use crate::error::{Error, Result};
use crate::planner::{IndexSet, SetSystem};
use crate::poly::{Polynomial, Variables};

fn set_label(set: IndexSet) -> String {
    let inner: Vec<String> = set.iter().map(|i| i.to_string()).collect();
    inner.join(",")
}

fn wrap(text: String) -> String {
    format!("({text})")
}

/// One reduced equation `P_J u_J = f`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SubproblemEquation {
    pub set: IndexSet,
    /// `P_J` written as a product of factors.
    pub operator: String,
    /// Total degree of `P_J`.
    pub order: u32,
    pub equation: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CofactorEntry {
    pub set: IndexSet,
    pub cofactor: String,
}

/// Symbolic description of a reduction.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ReductionReport {
    pub factors: Vec<String>,
    pub alpha: SetSystem,
    pub cofactors: Vec<CofactorEntry>,
    pub subproblems: Vec<SubproblemEquation>,
    pub recombination: String,
    pub pairwise_disjoint: bool,
    pub verified: bool,
}

/// Builds the symbolic report; the certificate is verified first.
pub fn reduction_report(
    cert: &Certificate,
    ops: &FactoredOperator,
    vars: &Variables,
) -> Result<ReductionReport> {
    let verified = verify_certificate(cert, ops)?.holds;
    if !verified {
        return Err(Error::Verification(
            "certificate does not sum to one".into(),
        ));
    }
    let factors: Vec<String> = ops.factors().iter().map(|p| vars.format(p)).collect();
    let subproblems = cert
        .alpha()
        .iter()
        .map(|set| {
            let operator = if set.is_empty() {
                "1".to_string()
            } else {
                set.iter()
                    .map(|i| wrap(factors[i].clone()))
                    .collect::<Vec<_>>()
                    .join("*")
            };
            let label = set_label(set);
            SubproblemEquation {
                set,
                order: ops.product(set).total_degree().unwrap_or(0),
                equation: format!("P_{{{label}}} u_{{{label}}} = f"),
                operator,
            }
        })
        .collect();
    let cofactors: Vec<CofactorEntry> = cert
        .cofactors()
        .iter()
        .map(|(set, q)| CofactorEntry {
            set: *set,
            cofactor: vars.format(q),
        })
        .collect();
    let recombination = format!(
        "u = {}",
        cofactors
            .iter()
            .map(|c| format!("{}*u_{{{}}}", wrap(c.cofactor.clone()), set_label(c.set)))
            .collect::<Vec<_>>()
            .join(" + ")
    );
    Ok(ReductionReport {
        factors,
        alpha: cert.alpha().clone(),
        cofactors,
        subproblems,
        recombination,
        pairwise_disjoint: cert.alpha().pairwise_disjoint(),
        verified,
    })
}

/// Instantiated pieces of one member `J` of α.
#[derive(Debug, Clone)]
pub struct ReductionPart {
    pub set: IndexSet,
    /// `P_J`.
    pub operator: Matrix,
    /// `P^J`.
    pub complement: Matrix,
    /// `Q_J`.
    pub cofactor: Matrix,
}

/// A verified certificate realized on an operator instance.
#[derive(Debug, Clone)]
pub struct LinearReduction {
    operator: Matrix,
    parts: Vec<ReductionPart>,
    pairwise_disjoint: bool,
}

impl LinearReduction {
    pub fn new(
        cert: &Certificate,
        ops: &FactoredOperator,
        inst: &OperatorInstance,
    ) -> Result<Self> {
        if !verify_certificate(cert, ops)?.holds {
            return Err(Error::Verification(
                "certificate does not sum to one".into(),
            ));
        }
        let mut parts = Vec::with_capacity(cert.alpha().len());
        for (set, q) in cert.cofactors() {
            parts.push(ReductionPart {
                set: *set,
                operator: inst.instantiate(&ops.product(*set))?,
                complement: inst.instantiate(&ops.complement_product(*set))?,
                cofactor: inst.instantiate(q)?,
            });
        }
        Ok(LinearReduction {
            operator: inst.instantiate(&ops.full_product())?,
            parts,
            pairwise_disjoint: cert.alpha().pairwise_disjoint(),
        })
    }

    /// The instantiated `P`.
    pub fn operator(&self) -> &Matrix {
        &self.operator
    }

    pub fn parts(&self) -> &[ReductionPart] {
        &self.parts
    }

    pub fn dimension(&self) -> usize {
        self.operator.rows()
    }

    pub fn is_pairwise_disjoint(&self) -> bool {
        self.pairwise_disjoint
    }

    /// `F(u) = (P^J u)_J`, without checking `P u = f`.
    pub fn split_vector(&self, u: &[crate::Rational]) -> Result<Vec<Vector>> {
        self.parts.iter().map(|p| p.complement.mul_vec(u)).collect()
    }

    /// `B((u_J)) = Σ Q_J u_J`, without checking the subproblems.
    pub fn recombine(&self, pieces: &[Vector]) -> Result<Vector> {
        if pieces.len() != self.parts.len() {
            return Err(Error::DimensionMismatch {
                expected: self.parts.len(),
                found: pieces.len(),
            });
        }
        let mut u = zero_vector(self.dimension());
        for (part, piece) in self.parts.iter().zip(pieces) {
            u = vec_add(&u, &part.cofactor.mul_vec(piece)?);
        }
        Ok(u)
    }

    /// `F` on a solution of `P u = f`.
    pub fn map_f(&self, u: &[crate::Rational], f: &[crate::Rational]) -> Result<Vec<Vector>> {
        if self.operator.mul_vec(u)? != f {
            return Err(Error::Verification("input does not solve P u = f".into()));
        }
        self.split_vector(u)
    }

    /// `B` on solutions of the subproblems `P_J u_J = f`.
    pub fn map_b(&self, pieces: &[Vector], f: &[crate::Rational]) -> Result<Vector> {
        for (part, piece) in self.parts.iter().zip(pieces) {
            if part.operator.mul_vec(piece)? != f {
                return Err(Error::Verification(format!(
                    "u_{{{}}} does not solve its subproblem",
                    set_label(part.set)
                )));
            }
        }
        self.recombine(pieces)
    }

    pub fn subproblem_solutions(&self, f: &[crate::Rational]) -> Result<Vec<AffineSolutionSet>> {
        self.parts
            .iter()
            .map(|p| solve_affine(&p.operator, f))
            .collect()
    }

    pub fn direct_solutions(&self, f: &[crate::Rational]) -> Result<AffineSolutionSet> {
        solve_affine(&self.operator, f)
    }

    /// The image under `B` of the product of the subproblem solution sets.
    pub fn recombined_solutions(&self, f: &[crate::Rational]) -> Result<AffineSolutionSet> {
        let subs = self.subproblem_solutions(f)?;
        recombine_sets(
            self.dimension(),
            self.parts.iter().map(|p| &p.cofactor).zip(&subs),
            zero_vector(self.dimension()),
        )
    }
}

/// `offset + Σ M_i · A_i` for affine sets `A_i`, as an affine set.
pub(crate) fn recombine_sets<'a>(
    dimension: usize,
    pieces: impl Iterator<Item = (&'a Matrix, &'a AffineSolutionSet)>,
    offset: Vector,
) -> Result<AffineSolutionSet> {
    let mut particular = offset;
    let mut spanning = Vec::new();
    for (m, set) in pieces {
        let Some(p) = set.particular() else {
            return Ok(AffineSolutionSet::empty(dimension));
        };
        particular = vec_add(&particular, &m.mul_vec(p)?);
        for k in set.kernel_basis() {
            spanning.push(m.mul_vec(k)?);
        }
    }
    Ok(AffineSolutionSet::from_spanning(particular, &spanning))
}

/// Solved reduction for one right-hand side.
#[derive(Debug, Clone)]
pub struct SplitOutcome {
    pub report: ReductionReport,
    pub subproblems: Vec<(IndexSet, AffineSolutionSet)>,
    pub recombined: AffineSolutionSet,
    pub direct: AffineSolutionSet,
}

impl SplitOutcome {
    /// The recombined and direct solution sets coincide exactly.
    pub fn agrees(&self) -> bool {
        self.recombined.same_set(&self.direct)
    }

    pub fn in_range(&self) -> bool {
        !self.direct.is_empty()
    }
}

pub fn split(
    cert: &Certificate,
    ops: &FactoredOperator,
    vars: &Variables,
    f: &[crate::Rational],
    inst: &OperatorInstance,
) -> Result<SplitOutcome> {
    let report = reduction_report(cert, ops, vars)?;
    let red = LinearReduction::new(cert, ops, inst)?;
    if f.len() != red.dimension() {
        return Err(Error::DimensionMismatch {
            expected: red.dimension(),
            found: f.len(),
        });
    }
    let subs = red.subproblem_solutions(f)?;
    let recombined = recombine_sets(
        red.dimension(),
        red.parts.iter().map(|p| &p.cofactor).zip(&subs),
        zero_vector(red.dimension()),
    )?;
    Ok(SplitOutcome {
        report,
        subproblems: red.parts.iter().map(|p| p.set).zip(subs).collect(),
        recombined,
        direct: red.direct_solutions(f)?,
    })
}

/// Kernel facts for a true decomposition on an instance.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct KernelStructure {
    pub kernel_dimension: usize,
    pub factor_kernel_dimensions: Vec<usize>,
    pub dimensions_add_up: bool,
    pub pairwise_intersections_trivial: bool,
    /// `Pr_i² = Pr_i` on `𝒩(P)`.
    pub projectors_idempotent: bool,
    /// `P_i Pr_i = 0` on `𝒩(P)`.
    pub projectors_land_in_factor_kernels: bool,
    /// `Pr_i Pr_j = 0` on `𝒩(P)` for `i ≠ j`.
    pub projectors_orthogonal: bool,
    /// `Σ Pr_i = id` on `𝒩(P)`.
    pub projectors_sum_to_identity: bool,
}

impl KernelStructure {
    pub fn holds(&self) -> bool {
        self.dimensions_add_up
            && self.pairwise_intersections_trivial
            && self.projectors_idempotent
            && self.projectors_land_in_factor_kernels
            && self.projectors_orthogonal
            && self.projectors_sum_to_identity
    }
}

fn span_dimension(vectors: &[Vector], dim: usize) -> usize {
    rref_rows(vectors, dim).rank()
}

pub fn kernel_structure(
    cert: &Certificate,
    ops: &FactoredOperator,
    inst: &OperatorInstance,
) -> Result<KernelStructure> {
    if !cert.is_true_decomposition() {
        return Err(Error::Precondition(
            "kernel structure needs a true decomposition".into(),
        ));
    }
    let red = LinearReduction::new(cert, ops, inst)?;
    let n = red.dimension();
    let kernel = kernel_basis(red.operator());
    let factor_kernels: Vec<Vec<Vector>> = red
        .parts
        .iter()
        .map(|p| kernel_basis(&p.operator))
        .collect();
    let dims: Vec<usize> = factor_kernels.iter().map(Vec::len).collect();

    let mut intersections_trivial = true;
    for i in 0..factor_kernels.len() {
        for j in i + 1..factor_kernels.len() {
            let joined: Vec<Vector> = factor_kernels[i]
                .iter()
                .chain(&factor_kernels[j])
                .cloned()
                .collect();
            if span_dimension(&joined, n) != dims[i] + dims[j] {
                intersections_trivial = false;
            }
        }
    }

    let projectors: Vec<Matrix> = red
        .parts
        .iter()
        .map(|p| &p.cofactor * &p.complement)
        .collect();
    let mut idempotent = true;
    let mut lands = true;
    let mut orthogonal = true;
    let mut sums = true;
    for v in &kernel {
        let images: Vec<Vector> = projectors
            .iter()
            .map(|pr| pr.mul_vec(v))
            .collect::<Result<_>>()?;
        for (i, (pr, img)) in projectors.iter().zip(&images).enumerate() {
            idempotent &= pr.mul_vec(img)? == *img;
            lands &= vec_is_zero(&red.parts[i].operator.mul_vec(img)?);
            for (j, other) in projectors.iter().enumerate() {
                if i != j {
                    orthogonal &= vec_is_zero(&other.mul_vec(img)?);
                }
            }
        }
        let total = images
            .iter()
            .fold(zero_vector(n), |acc, x| vec_add(&acc, x));
        sums &= vec_is_zero(&vec_sub(&total, v));
    }

    Ok(KernelStructure {
        kernel_dimension: kernel.len(),
        dimensions_add_up: kernel.len() == dims.iter().sum::<usize>(),
        factor_kernel_dimensions: dims,
        pairwise_intersections_trivial: intersections_trivial,
        projectors_idempotent: idempotent,
        projectors_land_in_factor_kernels: lands,
        projectors_orthogonal: orthogonal,
        projectors_sum_to_identity: sums,
    })
}

/// `(f ∈ ℛ(P), f ∈ ∩_i ℛ(P_i))`; equal for true decompositions.
pub fn range_membership(
    ops: &FactoredOperator,
    inst: &OperatorInstance,
    f: &[crate::Rational],
) -> Result<(bool, bool)> {
    let whole = range_member(&inst.instantiate(&ops.full_product())?, f)?;
    let mut each = true;
    for p in ops.factors() {
        each &= range_member(&inst.instantiate(p)?, f)?;
    }
    Ok((whole, each))
}

/// Whether every vector of `vectors` lies in `span(basis)`.
pub fn all_in_span(basis: &[Vector], vectors: &[Vector], dim: usize) -> bool {
    let e = rref_rows(basis, dim);
    vectors.iter().all(|v| span_contains(&e, v))
}

/// Polynomial view of the report's recombination for a single subproblem.
pub fn subproblem_operator(ops: &FactoredOperator, set: IndexSet) -> Polynomial {
    ops.product(set)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::backend::make_truncated_derivative_instance;
    use crate::certify::{univariate_certificate, UnivariateSpec};
    use crate::planner::system;
    use crate::poly::integer;
    use std::collections::BTreeMap;

    fn diag_instance() -> OperatorInstance {
        OperatorInstance::new(vec![Matrix::diagonal(&[integer(-1), integer(-2)])]).unwrap()
    }

    fn lambda_split() -> (FactoredOperator, Certificate) {
        univariate_certificate(&UnivariateSpec::new(vec![integer(1), integer(2)]).unwrap()).unwrap()
    }

    fn worked() -> (Variables, FactoredOperator, Certificate) {
        let v = Variables::new(["x", "y"]).unwrap();
        let ops = FactoredOperator::new(
            ["x+1", "x*y+y+1", "x", "x^2+x*y+x+y-1"]
                .iter()
                .map(|s| v.parse(s).unwrap())
                .collect(),
        )
        .unwrap();
        let alpha = system(3, &[&[0], &[1, 2], &[1, 3], &[2, 3]]);
        let beta = crate::planner::beta_min(ops.factors(), &Default::default()).unwrap();
        let dual = crate::certify::dual_certificate(&ops, &beta, &Default::default()).unwrap();
        let cert = crate::certify::dual_to_alpha(&dual, &ops, usize::MAX).unwrap();
        assert_eq!(cert.alpha(), &alpha);
        (v, ops, cert)
    }

    #[test]
    fn invertible_operator_degenerates_to_direct_solve() {
        let v = Variables::new(["x"]).unwrap();
        let ops = FactoredOperator::new(vec![v.parse("x+3").unwrap()]).unwrap();
        let cert =
            Certificate::new(0, [(IndexSet::empty(), v.parse("1/3").unwrap())].into()).unwrap();
        // (1/3)(x+3) is not the unit polynomial
        assert!(LinearReduction::new(&cert, &ops, &diag_instance()).is_err());
        let trivial =
            Certificate::new(0, [(IndexSet::singleton(0), Polynomial::one(1))].into()).unwrap();
        let f = vec![integer(4), integer(1)];
        let out = split(&trivial, &ops, &v, &f, &diag_instance()).unwrap();
        assert_eq!(out.subproblems.len(), 1);
        assert!(out.agrees());
    }

    #[test]
    fn lambda_split_on_diagonal_instance() {
        let (ops, cert) = lambda_split();
        let v = Variables::new(["x"]).unwrap();
        let f = vec![integer(0), integer(0)];
        let out = split(&cert, &ops, &v, &f, &diag_instance()).unwrap();
        assert_eq!(out.report.subproblems.len(), 2);
        assert!(out.report.subproblems.iter().all(|s| s.order == 1));
        assert!(out.agrees());
        assert_eq!(out.direct.dimension(), Some(2));
    }

    #[test]
    fn maps_round_trip_and_reject_bad_input() {
        let (ops, cert) = lambda_split();
        let inst = diag_instance();
        let red = LinearReduction::new(&cert, &ops, &inst).unwrap();
        let u = vec![integer(3), integer(-5)];
        assert_eq!(red.recombine(&red.split_vector(&u).unwrap()).unwrap(), u);
        let zero = zero_vector(2);
        assert_eq!(
            red.map_b(&[zero.clone(), zero.clone()], &zero).unwrap(),
            zero
        );
        assert!(red.map_f(&u, &[integer(1), integer(1)]).is_err());
        assert!(red.map_b(&[u.clone(), u.clone()], &zero).is_err());
    }

    #[test]
    fn kernel_structure_on_diagonal_instance() {
        let (ops, cert) = lambda_split();
        let k = kernel_structure(&cert, &ops, &diag_instance()).unwrap();
        assert_eq!(k.kernel_dimension, 2);
        assert_eq!(k.factor_kernel_dimensions, vec![1, 1]);
        assert!(k.holds());
    }

    #[test]
    fn kernel_structure_requires_true_decomposition() {
        let (_, ops, cert) = worked();
        let inst = make_truncated_derivative_instance(2, 3).unwrap();
        assert!(matches!(
            kernel_structure(&cert, &ops, &inst),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn worked_example_report_has_order_three() {
        let (v, ops, cert) = worked();
        let r = reduction_report(&cert, &ops, &v).unwrap();
        assert_eq!(r.subproblems.len(), 4);
        let orders: BTreeMap<String, u32> = r
            .subproblems
            .iter()
            .map(|s| (s.set.to_string(), s.order))
            .collect();
        assert_eq!(orders["{0}"], 1);
        assert_eq!(orders["{1,2}"], 3);
        assert_eq!(orders["{1,3}"], 4);
        assert_eq!(orders["{2,3}"], 3);
        assert!(!r.pairwise_disjoint);
        assert_eq!(r.subproblems[0].equation, "P_{0} u_{0} = f");
    }

    #[test]
    fn worked_example_on_small_derivative_instance() {
        let (v, ops, cert) = worked();
        let inst = make_truncated_derivative_instance(2, 4).unwrap();
        let f = inst.encode(&v.parse("x*y - 2").unwrap()).unwrap();
        let out = split(&cert, &ops, &v, &f, &inst).unwrap();
        assert!(out.agrees());
    }
}
