//! Constrained systems `P u = f`, `R^{(p)} u = g^p` with all operators commuting.
//!
//! A [`SystemCertificate`] is an identity `1 = Σ_i Q_i P^i + Σ_p S_p R^{(p)}`.
//! Under the integrability conditions `R^{(p)} f = P g^p` and
//! `R^{(p)} g^q = R^{(q)} g^p`, the solutions of the system correspond one to
//! one with tuples `(u_i)` solving `P_i u_i = f`, `R^{(p)} u_i = P^i g^p`, via
//! `F(u) = (P^i u)_i` and `B(u_i) = Σ Q_i u_i + Σ S_p g^p`.

use std::collections::BTreeMap;

use crate::backend::{
    solve_affine, vec_add, zero_vector, AffineSolutionSet, Matrix, OperatorInstance, Vector,
};
use crate::certify::FactoredOperator;
use crate::error::{Error, Result};
use crate::groebner::Buchberger;
use crate::planner::IndexSet;
use crate::poly::{Polynomial, Rational};

use super::recombine_sets;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SystemCertificate {
    /// `Q_i`, one per factor.
    pub q: Vec<Polynomial>,
    /// `S_p`, one per constraint.
    pub s: Vec<Polynomial>,
}

fn check_constraints(ops: &FactoredOperator, constraints: &[Polynomial]) -> Result<()> {
    for r in constraints {
        if r.nvars() != ops.nvars() {
            return Err(Error::VariableCountMismatch {
                left: ops.nvars(),
                right: r.nvars(),
            });
        }
    }
    Ok(())
}

impl SystemCertificate {
    /// `Σ Q_i P^i + Σ S_p R^{(p)} − 1`.
    pub fn residual(
        &self,
        ops: &FactoredOperator,
        constraints: &[Polynomial],
    ) -> Result<Polynomial> {
        check_constraints(ops, constraints)?;
        if self.q.len() != ops.len() || self.s.len() != constraints.len() {
            return Err(Error::Precondition(format!(
                "system certificate has {} + {} cofactors, expected {} + {}",
                self.q.len(),
                self.s.len(),
                ops.len(),
                constraints.len()
            )));
        }
        let mut lhs = Polynomial::zero(ops.nvars());
        for (i, q) in self.q.iter().enumerate() {
            lhs = &lhs + &(q * &ops.complement_product(IndexSet::singleton(i)));
        }
        for (s, r) in self.s.iter().zip(constraints) {
            lhs = &lhs + &(s * r);
        }
        Ok(&lhs - &Polynomial::one(ops.nvars()))
    }

    pub fn verify(&self, ops: &FactoredOperator, constraints: &[Polynomial]) -> Result<bool> {
        Ok(self.residual(ops, constraints)?.is_zero())
    }
}

/// Searches for a system certificate with one Gröbner computation over
/// `P^0, ..., P^l, R^{(1)}, ..., R^{(k)}`. `None` means 1 is not in that ideal.
pub fn find_system_certificate(
    ops: &FactoredOperator,
    constraints: &[Polynomial],
    engine: &Buchberger,
) -> Result<Option<SystemCertificate>> {
    check_constraints(ops, constraints)?;
    let n = ops.len();
    let mut gens: Vec<Polynomial> = (0..n)
        .map(|i| ops.complement_product(IndexSet::singleton(i)))
        .collect();
    gens.extend(constraints.iter().cloned());
    let Some(cert) = engine.contains_one(&gens)? else {
        return Ok(None);
    };
    let mut cofactors = cert.cofactors;
    let s = cofactors.split_off(n);
    let out = SystemCertificate { q: cofactors, s };
    if !out.verify(ops, constraints)? {
        return Err(Error::Verification(
            "system certificate does not verify".into(),
        ));
    }
    Ok(Some(out))
}

/// `1 = Q_{i,j} P_i + Q_{j,i} P_j + Σ_p Q^p_{i,j} R^{(p)}` for one pair `i < j`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairwiseSystemIdentity {
    pub i: usize,
    pub j: usize,
    pub qi: Polynomial,
    pub qj: Polynomial,
    pub r: Vec<Polynomial>,
}

impl PairwiseSystemIdentity {
    pub fn residual(&self, ops: &FactoredOperator, constraints: &[Polynomial]) -> Polynomial {
        let mut lhs = &(&self.qi * ops.factor(self.i)) + &(&self.qj * ops.factor(self.j));
        for (q, r) in self.r.iter().zip(constraints) {
            lhs = &lhs + &(q * r);
        }
        &lhs - &Polynomial::one(ops.nvars())
    }
}

/// The pairwise identities implied by a system certificate.
///
/// For `m ≠ i` the product `P^m` contains `P_i`, and `P^i` contains `P_j`;
/// dividing those factors out regroups the certificate around `P_i`, `P_j`.
pub fn system_to_pairwise(
    cert: &SystemCertificate,
    ops: &FactoredOperator,
    constraints: &[Polynomial],
) -> Result<BTreeMap<(usize, usize), PairwiseSystemIdentity>> {
    if !cert.verify(ops, constraints)? {
        return Err(Error::Verification(
            "system certificate does not verify".into(),
        ));
    }
    let universe = ops.universe();
    let mut out = BTreeMap::new();
    for i in 0..ops.len() {
        for j in i + 1..ops.len() {
            let mut qi = Polynomial::zero(ops.nvars());
            for (m, q) in cert.q.iter().enumerate() {
                if m != i {
                    let rest = universe.difference(IndexSet::singleton(m).with(i));
                    qi = &qi + &(q * &ops.product(rest));
                }
            }
            let rest = universe.difference(IndexSet::singleton(i).with(j));
            let qj = &cert.q[i] * &ops.product(rest);
            let id = PairwiseSystemIdentity {
                i,
                j,
                qi,
                qj,
                r: cert.s.clone(),
            };
            if !id.residual(ops, constraints).is_zero() {
                return Err(Error::Verification(format!(
                    "pairwise identity ({i},{j}) does not verify"
                )));
            }
            out.insert((i, j), id);
        }
    }
    Ok(out)
}

/// A system certificate from pairwise identities for every pair `i < j`.
///
/// The identities are multiplied together. A term that picks some `R^{(p)}`
/// is moved into `S_p` as soon as it appears; the remaining identities each
/// equal one, so they contribute nothing further to it. A term that picks
/// only factors has a pick set meeting every pair, hence missing at most one
/// index `i`; it is written as a multiple of `P^i` (or of `P^0` when nothing
/// is missing).
pub fn pairwise_to_system(
    pairs: &BTreeMap<(usize, usize), PairwiseSystemIdentity>,
    ops: &FactoredOperator,
    constraints: &[Polynomial],
    term_cap: usize,
) -> Result<SystemCertificate> {
    check_constraints(ops, constraints)?;
    let nvars = ops.nvars();
    let n = ops.len();
    let mut s: Vec<Polynomial> = vec![Polynomial::zero(nvars); constraints.len()];
    let mut states: BTreeMap<IndexSet, Polynomial> =
        [(IndexSet::empty(), Polynomial::one(nvars))].into();
    for i in 0..n {
        for j in i + 1..n {
            let id = pairs.get(&(i, j)).ok_or_else(|| {
                Error::Precondition(format!("missing pairwise identity ({i},{j})"))
            })?;
            if id.r.len() != constraints.len() {
                return Err(Error::Precondition(format!(
                    "pairwise identity ({i},{j}) has {} constraint cofactors",
                    id.r.len()
                )));
            }
            let mut next: BTreeMap<IndexSet, Polynomial> = BTreeMap::new();
            for (picked, q) in &states {
                for (idx, qk) in [(i, &id.qi), (j, &id.qj)] {
                    if qk.is_zero() {
                        continue;
                    }
                    let mut term = q * qk;
                    let key = if picked.contains(idx) {
                        term = &term * ops.factor(idx);
                        *picked
                    } else {
                        picked.with(idx)
                    };
                    let slot = next.entry(key).or_insert_with(|| Polynomial::zero(nvars));
                    *slot = &*slot + &term;
                    if slot.len() > term_cap {
                        return Err(Error::term_cap(
                            "terms while expanding pairwise identities",
                            term_cap,
                        ));
                    }
                }
                for (p, qp) in id.r.iter().enumerate() {
                    s[p] = &s[p] + &(q * qp);
                }
            }
            next.retain(|_, q| !q.is_zero());
            states = next;
        }
    }
    let universe = ops.universe();
    let mut q: Vec<Polynomial> = vec![Polynomial::zero(nvars); n];
    for (picked, coeff) in states {
        let missing = universe.difference(picked);
        let i = match missing.len() {
            0 => 0,
            1 => missing.min().unwrap(),
            _ => unreachable!("every pick set meets all pairs"),
        };
        let extra = picked.difference(universe.difference(IndexSet::singleton(i)));
        q[i] = &q[i] + &(&coeff * &ops.product(extra));
    }
    let cert = SystemCertificate { q, s };
    if !cert.verify(ops, constraints)? {
        return Err(Error::Verification(
            "assembled system certificate does not verify".into(),
        ));
    }
    Ok(cert)
}

fn check_data(p: &Matrix, rs: &[Matrix], f: &[Rational], g: &[Vector]) -> Result<()> {
    if rs.len() != g.len() {
        return Err(Error::DimensionMismatch {
            expected: rs.len(),
            found: g.len(),
        });
    }
    for v in std::iter::once(f).chain(g.iter().map(Vec::as_slice)) {
        if v.len() != p.rows() {
            return Err(Error::DimensionMismatch {
                expected: p.rows(),
                found: v.len(),
            });
        }
    }
    Ok(())
}

/// The first violated integrability condition, if any.
pub fn integrability_failure(
    p: &Matrix,
    rs: &[Matrix],
    f: &[Rational],
    g: &[Vector],
) -> Result<Option<String>> {
    check_data(p, rs, f, g)?;
    for (j, (r, gj)) in rs.iter().zip(g).enumerate() {
        if r.mul_vec(f)? != p.mul_vec(gj)? {
            return Ok(Some(format!("R^({}) f != P g^{}", j + 1, j + 1)));
        }
    }
    for i in 0..rs.len() {
        for j in i + 1..rs.len() {
            if rs[j].mul_vec(&g[i])? != rs[i].mul_vec(&g[j])? {
                return Ok(Some(format!(
                    "R^({}) g^{} != R^({}) g^{}",
                    j + 1,
                    i + 1,
                    i + 1,
                    j + 1
                )));
            }
        }
    }
    Ok(None)
}

/// `R^{(j)} f = P g^j` and `R^{(j)} g^i = R^{(i)} g^j` for all `i, j`.
pub fn verify_integrability(
    p: &Matrix,
    rs: &[Matrix],
    f: &[Rational],
    g: &[Vector],
) -> Result<bool> {
    Ok(integrability_failure(p, rs, f, g)?.is_none())
}

/// A verified system certificate realized on an instance.
#[derive(Debug, Clone)]
pub struct SystemReduction {
    p: Matrix,
    factors: Vec<Matrix>,
    complements: Vec<Matrix>,
    q: Vec<Matrix>,
    s: Vec<Matrix>,
    r: Vec<Matrix>,
}

/// Solved constrained reduction for one data set.
#[derive(Debug, Clone)]
pub struct SystemSplit {
    /// Solution set of the `i`-th subsystem.
    pub subsystems: Vec<AffineSolutionSet>,
    pub direct: AffineSolutionSet,
    pub recombined: AffineSolutionSet,
}

impl SystemSplit {
    pub fn agrees(&self) -> bool {
        self.direct.same_set(&self.recombined)
    }
}

impl SystemReduction {
    pub fn new(
        cert: &SystemCertificate,
        ops: &FactoredOperator,
        constraints: &[Polynomial],
        inst: &OperatorInstance,
    ) -> Result<Self> {
        if !cert.verify(ops, constraints)? {
            return Err(Error::Verification(
                "system certificate does not verify".into(),
            ));
        }
        let inst_all = |ps: &[Polynomial]| {
            ps.iter()
                .map(|p| inst.instantiate(p))
                .collect::<Result<Vec<_>>>()
        };
        let complements: Vec<Polynomial> = (0..ops.len())
            .map(|i| ops.complement_product(IndexSet::singleton(i)))
            .collect();
        Ok(SystemReduction {
            p: inst.instantiate(&ops.full_product())?,
            factors: inst_all(ops.factors())?,
            complements: inst_all(&complements)?,
            q: inst_all(&cert.q)?,
            s: inst_all(&cert.s)?,
            r: inst_all(constraints)?,
        })
    }

    pub fn operator(&self) -> &Matrix {
        &self.p
    }

    pub fn constraints(&self) -> &[Matrix] {
        &self.r
    }

    fn dimension(&self) -> usize {
        self.p.rows()
    }

    fn require_integrable(&self, f: &[Rational], g: &[Vector]) -> Result<()> {
        match integrability_failure(&self.p, &self.r, f, g)? {
            Some(msg) => Err(Error::Integrability(msg)),
            None => Ok(()),
        }
    }

    /// `F(u) = (P^0 u, ..., P^l u)`.
    pub fn split_vector(&self, u: &[Rational]) -> Result<Vec<Vector>> {
        self.complements.iter().map(|c| c.mul_vec(u)).collect()
    }

    /// `B((u_i)) = Σ Q_i u_i + Σ S_p g^p`.
    pub fn recombine(&self, pieces: &[Vector], g: &[Vector]) -> Result<Vector> {
        if pieces.len() != self.q.len() || g.len() != self.s.len() {
            return Err(Error::DimensionMismatch {
                expected: self.q.len() + self.s.len(),
                found: pieces.len() + g.len(),
            });
        }
        let mut u = zero_vector(self.dimension());
        for (q, piece) in self.q.iter().zip(pieces) {
            u = vec_add(&u, &q.mul_vec(piece)?);
        }
        for (s, gp) in self.s.iter().zip(g) {
            u = vec_add(&u, &s.mul_vec(gp)?);
        }
        Ok(u)
    }

    fn stacked(&self, top: &Matrix) -> Result<Matrix> {
        let blocks: Vec<&Matrix> = std::iter::once(top).chain(&self.r).collect();
        Matrix::vstack(&blocks)
    }

    fn solves_system(&self, u: &[Rational], f: &[Rational], g: &[Vector]) -> Result<bool> {
        if self.p.mul_vec(u)? != f {
            return Ok(false);
        }
        for (r, gp) in self.r.iter().zip(g) {
            if r.mul_vec(u)? != *gp {
                return Ok(false);
            }
        }
        Ok(true)
    }

    fn solves_subsystem(
        &self,
        i: usize,
        ui: &[Rational],
        f: &[Rational],
        g: &[Vector],
    ) -> Result<bool> {
        if self.factors[i].mul_vec(ui)? != f {
            return Ok(false);
        }
        for (r, gp) in self.r.iter().zip(g) {
            if r.mul_vec(ui)? != self.complements[i].mul_vec(gp)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// `F` on a solution of the constrained system.
    pub fn map_f(&self, u: &[Rational], f: &[Rational], g: &[Vector]) -> Result<Vec<Vector>> {
        self.require_integrable(f, g)?;
        if !self.solves_system(u, f, g)? {
            return Err(Error::Verification(
                "input does not solve the constrained system".into(),
            ));
        }
        self.split_vector(u)
    }

    /// `B` on solutions of the subsystems.
    pub fn map_b(&self, pieces: &[Vector], f: &[Rational], g: &[Vector]) -> Result<Vector> {
        self.require_integrable(f, g)?;
        for (i, ui) in pieces.iter().enumerate() {
            if !self.solves_subsystem(i, ui, f, g)? {
                return Err(Error::Verification(format!(
                    "u_{i} does not solve subsystem {i}"
                )));
            }
        }
        self.recombine(pieces, g)
    }

    pub fn direct_solutions(&self, f: &[Rational], g: &[Vector]) -> Result<AffineSolutionSet> {
        let rhs: Vector = f.iter().chain(g.iter().flatten()).cloned().collect();
        solve_affine(&self.stacked(&self.p)?, &rhs)
    }

    /// Solution set of `P_i u_i = f`, `R^{(p)} u_i = P^i g^p`.
    pub fn subsystem_solutions(
        &self,
        i: usize,
        f: &[Rational],
        g: &[Vector],
    ) -> Result<AffineSolutionSet> {
        let mut rhs: Vector = f.to_vec();
        for gp in g {
            rhs.extend(self.complements[i].mul_vec(gp)?);
        }
        solve_affine(&self.stacked(&self.factors[i])?, &rhs)
    }

    /// Solves everything; errors when the data are not integrable.
    pub fn split(&self, f: &[Rational], g: &[Vector]) -> Result<SystemSplit> {
        self.require_integrable(f, g)?;
        let subsystems: Vec<AffineSolutionSet> = (0..self.factors.len())
            .map(|i| self.subsystem_solutions(i, f, g))
            .collect::<Result<_>>()?;
        let offset = self
            .s
            .iter()
            .zip(g)
            .try_fold(zero_vector(self.dimension()), |acc, (s, gp)| {
                Ok::<_, Error>(vec_add(&acc, &s.mul_vec(gp)?))
            })?;
        let recombined = recombine_sets(self.dimension(), self.q.iter().zip(&subsystems), offset)?;
        Ok(SystemSplit {
            subsystems,
            direct: self.direct_solutions(f, g)?,
            recombined,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{integer, Variables};

    fn setup() -> (FactoredOperator, Vec<Polynomial>, OperatorInstance) {
        let v = Variables::new(["x"]).unwrap();
        // P = x (x+1), R = x: the ideal ⟨x+1, x, x⟩ contains 1
        let ops =
            FactoredOperator::new(vec![v.parse("x").unwrap(), v.parse("x+1").unwrap()]).unwrap();
        let rs = vec![v.parse("x").unwrap()];
        let inst = OperatorInstance::new(vec![Matrix::diagonal(&[
            integer(0),
            integer(-1),
            integer(2),
        ])])
        .unwrap();
        (ops, rs, inst)
    }

    #[test]
    fn certificate_search_and_conversions() {
        let (ops, rs, _) = setup();
        let cert = find_system_certificate(&ops, &rs, &Buchberger::default())
            .unwrap()
            .unwrap();
        assert!(cert.verify(&ops, &rs).unwrap());
        let pairs = system_to_pairwise(&cert, &ops, &rs).unwrap();
        let back = pairwise_to_system(&pairs, &ops, &rs, usize::MAX).unwrap();
        assert!(back.verify(&ops, &rs).unwrap());
    }

    #[test]
    fn consistent_data_round_trips() {
        let (ops, rs, inst) = setup();
        let cert = find_system_certificate(&ops, &rs, &Buchberger::default())
            .unwrap()
            .unwrap();
        let red = SystemReduction::new(&cert, &ops, &rs, &inst).unwrap();
        let u0 = vec![integer(5), integer(7), integer(-3)];
        let f = red.operator().mul_vec(&u0).unwrap();
        let g = vec![red.constraints()[0].mul_vec(&u0).unwrap()];
        assert!(verify_integrability(red.operator(), red.constraints(), &f, &g).unwrap());
        let pieces = red.map_f(&u0, &f, &g).unwrap();
        assert_eq!(red.map_b(&pieces, &f, &g).unwrap(), u0);
        let out = red.split(&f, &g).unwrap();
        assert!(out.agrees());
        assert!(out.direct.contains(&u0));
    }

    #[test]
    fn perturbed_data_rejected() {
        let (ops, rs, inst) = setup();
        let cert = find_system_certificate(&ops, &rs, &Buchberger::default())
            .unwrap()
            .unwrap();
        let red = SystemReduction::new(&cert, &ops, &rs, &inst).unwrap();
        let u0 = vec![integer(1), integer(2), integer(3)];
        let f = red.operator().mul_vec(&u0).unwrap();
        let mut g = vec![red.constraints()[0].mul_vec(&u0).unwrap()];
        g[0][2] += integer(1);
        assert!(!verify_integrability(red.operator(), red.constraints(), &f, &g).unwrap());
        assert!(matches!(red.split(&f, &g), Err(Error::Integrability(_))));
    }

    #[test]
    fn no_constraints_is_vacuously_integrable() {
        let (ops, _, inst) = setup();
        let cert = find_system_certificate(&ops, &[], &Buchberger::default())
            .unwrap()
            .unwrap();
        let red = SystemReduction::new(&cert, &ops, &[], &inst).unwrap();
        let f = vec![integer(0), integer(0), integer(6)];
        assert!(verify_integrability(red.operator(), &[], &f, &[]).unwrap());
        assert!(red.split(&f, &[]).unwrap().agrees());
    }

    #[test]
    fn missing_certificate_is_reported() {
        let v = Variables::new(["x"]).unwrap();
        let ops =
            FactoredOperator::new(vec![v.parse("x").unwrap(), v.parse("x").unwrap()]).unwrap();
        let rs = vec![v.parse("x^2").unwrap()];
        assert!(find_system_certificate(&ops, &rs, &Buchberger::default())
            .unwrap()
            .is_none());
    }
}
