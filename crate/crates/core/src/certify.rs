//! Decomposition certificates.
//!
//! An α-certificate is a family of cofactors `Q_J` (`J ∈ α`) with
//! `Σ Q_J · P^J = 1`, where `P^J` is the product of the factors *outside*
//! `J`. A dual β-certificate holds, for each `J ∈ β`, cofactors `Q_{J,j}` with
//! `Σ_{j ∈ J} Q_{J,j} · P_j = 1`. Both are plain polynomial identities, so
//! every constructor here checks its output exactly before returning it.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::groebner::Buchberger;
use crate::planner::{validate_factors, IndexSet, SetSystem};
use crate::poly::{Polynomial, Rational};

/// The factors `P_0, ..., P_l` of `P = P_0 ⋯ P_l`, indexed by `L = {0, ..., l}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FactoredOperator {
    nvars: usize,
    factors: Vec<Polynomial>,
}

impl FactoredOperator {
    pub fn new(factors: Vec<Polynomial>) -> Result<Self> {
        let nvars = validate_factors(&factors)?;
        Ok(FactoredOperator { nvars, factors })
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn factors(&self) -> &[Polynomial] {
        &self.factors
    }

    pub fn factor(&self, i: usize) -> &Polynomial {
        &self.factors[i]
    }

    pub fn len(&self) -> usize {
        self.factors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.factors.is_empty()
    }

    /// `l`, so that `L = {0, ..., l}`.
    pub fn ground(&self) -> usize {
        self.factors.len() - 1
    }

    pub fn universe(&self) -> IndexSet {
        IndexSet::range(self.factors.len())
    }

    /// `P_J`, with `P_∅ = 1`.
    pub fn product(&self, set: IndexSet) -> Polynomial {
        Polynomial::product(self.nvars, set.iter().map(|i| &self.factors[i]))
    }

    /// `P^J = P_{L∖J}`.
    pub fn complement_product(&self, set: IndexSet) -> Polynomial {
        self.product(self.universe().difference(set))
    }

    pub fn full_product(&self) -> Polynomial {
        self.product(self.universe())
    }

    /// The sub-operator on the factors in `set`, re-indexed from zero.
    pub fn restrict(&self, set: IndexSet) -> Result<FactoredOperator> {
        FactoredOperator::new(set.iter().map(|i| self.factors[i].clone()).collect())
    }

    fn check_ground(&self, ground: usize) -> Result<()> {
        if ground != self.ground() {
            return Err(Error::Precondition(format!(
                "certificate is over {} factors but the operator has {}",
                ground + 1,
                self.len()
            )));
        }
        Ok(())
    }
}

/// Cofactors `Q_J` of an α-decomposition `Σ_{J∈α} Q_J P^J = 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Certificate {
    alpha: SetSystem,
    cofactors: BTreeMap<IndexSet, Polynomial>,
}

impl Certificate {
    pub fn new(ground: usize, cofactors: BTreeMap<IndexSet, Polynomial>) -> Result<Self> {
        if cofactors.is_empty() {
            return Err(Error::InvalidSetSystem(
                "an α-system must be nonempty".into(),
            ));
        }
        let alpha = SetSystem::new(ground, cofactors.keys().copied())?;
        Ok(Certificate { alpha, cofactors })
    }

    pub fn alpha(&self) -> &SetSystem {
        &self.alpha
    }

    pub fn cofactor(&self, set: IndexSet) -> Option<&Polynomial> {
        self.cofactors.get(&set)
    }

    pub fn cofactors(&self) -> &BTreeMap<IndexSet, Polynomial> {
        &self.cofactors
    }

    pub fn ground(&self) -> usize {
        self.alpha.ground()
    }

    /// Whether `α` consists of all singletons.
    pub fn is_true_decomposition(&self) -> bool {
        self.alpha.len() == self.ground() + 1 && self.alpha.iter().all(|s| s.len() == 1)
    }

    /// `Q_i` of a true decomposition.
    pub fn singleton_cofactor(&self, i: usize) -> Option<&Polynomial> {
        self.cofactors.get(&IndexSet::singleton(i))
    }

    /// A copy with one cofactor replaced; used for diagnostics and tests.
    pub fn with_cofactor(&self, set: IndexSet, q: Polynomial) -> Result<Certificate> {
        let mut c = self.cofactors.clone();
        c.insert(set, q);
        Certificate::new(self.ground(), c)
    }
}

/// Outcome of checking a defining identity: `residual = lhs − 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Verification {
    pub holds: bool,
    pub residual: Polynomial,
}

pub fn verify_certificate(cert: &Certificate, ops: &FactoredOperator) -> Result<Verification> {
    ops.check_ground(cert.ground())?;
    let mut lhs = Polynomial::zero(ops.nvars());
    for (set, q) in cert.cofactors() {
        if q.nvars() != ops.nvars() {
            return Err(Error::VariableCountMismatch {
                left: ops.nvars(),
                right: q.nvars(),
            });
        }
        lhs = &lhs + &(q * &ops.complement_product(*set));
    }
    let residual = &lhs - &Polynomial::one(ops.nvars());
    Ok(Verification {
        holds: residual.is_zero(),
        residual,
    })
}

/// Cofactors `Q_{J,j}` of a dual β-decomposition.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DualCertificate {
    beta: SetSystem,
    cofactors: BTreeMap<IndexSet, BTreeMap<usize, Polynomial>>,
}

impl DualCertificate {
    pub fn new(
        ground: usize,
        cofactors: BTreeMap<IndexSet, BTreeMap<usize, Polynomial>>,
    ) -> Result<Self> {
        if cofactors.is_empty() {
            return Err(Error::InvalidSetSystem(
                "a dual system must be nonempty".into(),
            ));
        }
        for (set, row) in &cofactors {
            if set.is_empty() {
                return Err(Error::InvalidSetSystem(
                    "the empty set cannot belong to a dual system".into(),
                ));
            }
            let keys: IndexSet = row.keys().copied().collect();
            if keys != *set {
                return Err(Error::InvalidSetSystem(format!(
                    "cofactors for {set} are indexed by {keys}"
                )));
            }
        }
        let beta = SetSystem::new(ground, cofactors.keys().copied())?;
        Ok(DualCertificate { beta, cofactors })
    }

    pub fn beta(&self) -> &SetSystem {
        &self.beta
    }

    pub fn ground(&self) -> usize {
        self.beta.ground()
    }

    pub fn identity(&self, set: IndexSet) -> Option<&BTreeMap<usize, Polynomial>> {
        self.cofactors.get(&set)
    }

    pub fn identities(&self) -> &BTreeMap<IndexSet, BTreeMap<usize, Polynomial>> {
        &self.cofactors
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DualVerification {
    pub holds: bool,
    pub residuals: BTreeMap<IndexSet, Polynomial>,
}

/// Residual `Σ_j Q_{J,j} P_j − 1` of a single dual identity.
pub fn dual_identity_residual(
    row: &BTreeMap<usize, Polynomial>,
    ops: &FactoredOperator,
) -> Polynomial {
    let lhs = row
        .iter()
        .fold(Polynomial::zero(ops.nvars()), |acc, (&j, q)| {
            &acc + &(q * ops.factor(j))
        });
    &lhs - &Polynomial::one(ops.nvars())
}

pub fn verify_dual(dual: &DualCertificate, ops: &FactoredOperator) -> Result<DualVerification> {
    ops.check_ground(dual.ground())?;
    let residuals: BTreeMap<IndexSet, Polynomial> = dual
        .cofactors
        .iter()
        .map(|(set, row)| (*set, dual_identity_residual(row, ops)))
        .collect();
    Ok(DualVerification {
        holds: residuals.values().all(Polynomial::is_zero),
        residuals,
    })
}

/// Pairwise-distinct roots `λ_0, ..., λ_l` of `P[x] = Π (x + λ_i)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnivariateSpec {
    lambdas: Vec<Rational>,
}

impl UnivariateSpec {
    pub fn new(lambdas: Vec<Rational>) -> Result<Self> {
        if lambdas.is_empty() {
            return Err(Error::Precondition("at least one λ is required".into()));
        }
        for (i, a) in lambdas.iter().enumerate() {
            if lambdas[..i].contains(a) {
                return Err(Error::ConfluentRoots(a.to_string()));
            }
        }
        Ok(UnivariateSpec { lambdas })
    }

    pub fn lambdas(&self) -> &[Rational] {
        &self.lambdas
    }

    /// The factors `x + λ_i` in one variable.
    pub fn operator(&self) -> FactoredOperator {
        let x = Polynomial::variable(1, 0);
        FactoredOperator::new(
            self.lambdas
                .iter()
                .map(|l| &x + &Polynomial::constant(1, l.clone()))
                .collect(),
        )
        .unwrap()
    }

    /// `α_i = Π_{j≠i} 1/(λ_j − λ_i)`.
    pub fn coefficient(&self, i: usize) -> Rational {
        let li = &self.lambdas[i];
        self.lambdas
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != i)
            .fold(Rational::from_integer(1.into()), |acc, (_, lj)| {
                acc / (lj - li)
            })
    }
}

/// Closed-form partial fractions for `1 / Π (x + λ_i)`:
/// `1 = Σ α_i · Π_{j≠i} (x + λ_j)`.
pub fn univariate_certificate(spec: &UnivariateSpec) -> Result<(FactoredOperator, Certificate)> {
    let ops = spec.operator();
    let cofactors = (0..ops.len())
        .map(|i| {
            (
                IndexSet::singleton(i),
                Polynomial::constant(1, spec.coefficient(i)),
            )
        })
        .collect();
    let cert = Certificate::new(ops.ground(), cofactors)?;
    ensure_verified(&cert, &ops)?;
    Ok((ops, cert))
}

fn ensure_verified(cert: &Certificate, ops: &FactoredOperator) -> Result<()> {
    let v = verify_certificate(cert, ops)?;
    if !v.holds {
        return Err(Error::Verification(format!(
            "α-certificate over {} does not sum to one",
            cert.alpha()
        )));
    }
    Ok(())
}

/// Dual certificate for `beta`, with one Bézout certificate per member.
pub fn dual_certificate(
    ops: &FactoredOperator,
    beta: &SetSystem,
    engine: &Buchberger,
) -> Result<DualCertificate> {
    ops.check_ground(beta.ground())?;
    let mut cofactors = BTreeMap::new();
    for set in beta.iter() {
        if set.is_empty() {
            return Err(Error::InvalidSetSystem(
                "the empty set cannot belong to a dual system".into(),
            ));
        }
        let gens: Vec<Polynomial> = set.iter().map(|j| ops.factor(j).clone()).collect();
        let cert = engine
            .contains_one(&gens)?
            .ok_or_else(|| Error::NotInIdeal(set.to_string()))?;
        cofactors.insert(set, set.iter().zip(cert.cofactors).collect());
    }
    let dual = DualCertificate::new(ops.ground(), cofactors)?;
    if !verify_dual(&dual, ops)?.holds {
        return Err(Error::Verification(
            "dual certificate does not verify".into(),
        ));
    }
    Ok(dual)
}

/// Minimal sets meeting every member of `beta`.
fn minimal_transversals(beta: &SetSystem) -> Result<Vec<IndexSet>> {
    let hitting = SetSystem::power_set(beta.ground())?;
    let hitting = SetSystem::new(
        beta.ground(),
        hitting
            .iter()
            .filter(|s| beta.iter().all(|j| !s.intersection(j).is_empty())),
    )?;
    Ok(hitting.min_elements().iter().collect())
}

/// Converts a dual β-certificate into an α-certificate with `α ⊆ βˡ`.
///
/// The identities `1 = Σ_{j∈J} Q_{J,j} P_j` are multiplied together. Each
/// term of the expansion picks one `j` per `J`; with `S` the set of picks it
/// reads `Q' · P_S` once repeated factors are folded into `Q'`. Every `S` meets
/// all members of β, so it contains a minimal transversal `T` (the first in
/// set order is used); the term is rewritten as `(Q' · P_{S∖T}) · P^{L∖T}`
/// and grouped by `L∖T`. The resulting α consists of complements of minimal
/// transversals, which are exactly the maximal elements of `βˡ`.
pub fn dual_to_alpha(
    dual: &DualCertificate,
    ops: &FactoredOperator,
    term_cap: usize,
) -> Result<Certificate> {
    ops.check_ground(dual.ground())?;
    let nvars = ops.nvars();
    let mut states: BTreeMap<IndexSet, Polynomial> = BTreeMap::new();
    states.insert(IndexSet::empty(), Polynomial::one(nvars));

    for row in dual.identities().values() {
        let mut next: BTreeMap<IndexSet, Polynomial> = BTreeMap::new();
        for (picked, q) in &states {
            for (&j, qj) in row {
                if qj.is_zero() {
                    continue;
                }
                let mut term = q * qj;
                let key = if picked.contains(j) {
                    term = &term * ops.factor(j);
                    *picked
                } else {
                    picked.with(j)
                };
                let slot = next.entry(key).or_insert_with(|| Polynomial::zero(nvars));
                *slot = &*slot + &term;
                if slot.len() > term_cap {
                    return Err(Error::term_cap(
                        "terms while expanding dual identities",
                        term_cap,
                    ));
                }
            }
        }
        next.retain(|_, q| !q.is_zero());
        states = next;
    }

    let transversals = minimal_transversals(dual.beta())?;
    let universe = ops.universe();
    let mut cofactors: BTreeMap<IndexSet, Polynomial> = BTreeMap::new();
    for (picked, q) in states {
        let t = *transversals
            .iter()
            .find(|t| t.is_subset(picked))
            .expect("every expansion term meets all members of β");
        let folded = &q * &ops.product(picked.difference(t));
        let slot = cofactors
            .entry(universe.difference(t))
            .or_insert_with(|| Polynomial::zero(nvars));
        *slot = &*slot + &folded;
        if slot.len() > term_cap {
            return Err(Error::term_cap("terms in an α-cofactor", term_cap));
        }
    }
    cofactors.retain(|_, q| !q.is_zero());
    let cert = Certificate::new(ops.ground(), cofactors)?;
    ensure_verified(&cert, ops)?;
    Ok(cert)
}

/// The dual identity for one `I ∈ αᵘ` derived from an α-certificate.
///
/// For each `J ∈ α` the index `i_J = min(I∖J)` is a factor of `P^J`, so
/// `Q_J P^J = (Q_J P_{L∖J∖{i_J}}) · P_{i_J}`; grouping by `i_J` gives
/// `1 = Σ_{i∈I} Q_{I,i} P_i`.
pub fn alpha_to_dual(
    cert: &Certificate,
    set: IndexSet,
    ops: &FactoredOperator,
) -> Result<BTreeMap<usize, Polynomial>> {
    ops.check_ground(cert.ground())?;
    let universe = ops.universe();
    if !set.is_subset(universe) {
        return Err(Error::InvalidSetSystem(format!(
            "{set} is not a subset of {universe}"
        )));
    }
    let mut row: BTreeMap<usize, Polynomial> = set
        .iter()
        .map(|i| (i, Polynomial::zero(ops.nvars())))
        .collect();
    for (j_set, q) in cert.cofactors() {
        let Some(pick) = set.difference(*j_set).min() else {
            return Err(Error::Precondition(format!(
                "{set} is not in αᵘ: it is contained in {j_set}"
            )));
        };
        let rest = universe
            .difference(*j_set)
            .difference(IndexSet::singleton(pick));
        let slot = row.get_mut(&pick).unwrap();
        *slot = &*slot + &(q * &ops.product(rest));
    }
    if !dual_identity_residual(&row, ops).is_zero() {
        return Err(Error::Verification(format!(
            "dual identity for {set} does not verify"
        )));
    }
    Ok(row)
}

/// The full dual certificate over `Min(αᵘ)`.
pub fn alpha_to_dual_certificate(
    cert: &Certificate,
    ops: &FactoredOperator,
) -> Result<DualCertificate> {
    let beta = cert.alpha().alpha_u()?.min_elements();
    let mut rows = BTreeMap::new();
    for set in beta.iter() {
        rows.insert(set, alpha_to_dual(cert, set, ops)?);
    }
    DualCertificate::new(ops.ground(), rows)
}

/// A true decomposition (`α` = singletons) from pairwise Bézout certificates.
pub fn true_decomposition(ops: &FactoredOperator, engine: &Buchberger) -> Result<Certificate> {
    if ops.len() == 1 {
        let cofactors = [(IndexSet::singleton(0), Polynomial::one(ops.nvars()))].into();
        return Certificate::new(0, cofactors);
    }
    let pairs = SetSystem::of_size(ops.ground(), 2)?;
    let dual = dual_certificate(ops, &pairs, engine)?;
    dual_to_alpha(&dual, ops, engine.term_cap)
}

/// Every `J` of the certificate satisfies `I ∖ J ≠ ∅` for all `I ∈ β`.
pub fn alpha_within_beta_l(alpha: &SetSystem, beta: &SetSystem) -> bool {
    alpha
        .iter()
        .all(|j| beta.iter().all(|i| !i.difference(j).is_empty()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::planner::system;
    use crate::poly::{integer, rational, Variables};

    fn xy() -> Variables {
        Variables::new(["x", "y"]).unwrap()
    }

    fn worked() -> FactoredOperator {
        let v = xy();
        FactoredOperator::new(
            ["x+1", "x*y+y+1", "x", "x^2+x*y+x+y-1"]
                .iter()
                .map(|s| v.parse(s).unwrap())
                .collect(),
        )
        .unwrap()
    }

    fn row(pairs: &[(usize, &str)]) -> BTreeMap<usize, Polynomial> {
        pairs
            .iter()
            .map(|(i, s)| (*i, xy().parse(s).unwrap()))
            .collect()
    }

    fn set(v: &[usize]) -> IndexSet {
        v.iter().copied().collect()
    }

    #[test]
    fn univariate_two_roots() {
        let spec = UnivariateSpec::new(vec![integer(2), integer(5)]).unwrap();
        let (ops, cert) = univariate_certificate(&spec).unwrap();
        // 1 = (x+λ1)/(λ1−λ0) + (x+λ0)/(λ0−λ1)
        assert_eq!(
            cert.singleton_cofactor(0).unwrap().constant_value(),
            Some(rational(1, 3))
        );
        assert_eq!(
            cert.singleton_cofactor(1).unwrap().constant_value(),
            Some(rational(-1, 3))
        );
        assert!(verify_certificate(&cert, &ops).unwrap().holds);
    }

    #[test]
    fn univariate_single_root_is_trivial() {
        let spec = UnivariateSpec::new(vec![integer(7)]).unwrap();
        let (ops, cert) = univariate_certificate(&spec).unwrap();
        assert!(cert.singleton_cofactor(0).unwrap().is_one());
        assert!(verify_certificate(&cert, &ops).unwrap().holds);
    }

    #[test]
    fn univariate_zero_one_two() {
        let spec = UnivariateSpec::new(vec![integer(0), integer(1), integer(2)]).unwrap();
        assert_eq!(spec.coefficient(0), rational(1, 2));
        assert_eq!(spec.coefficient(1), integer(-1));
        assert_eq!(spec.coefficient(2), rational(1, 2));
        let (ops, cert) = univariate_certificate(&spec).unwrap();
        assert!(verify_certificate(&cert, &ops).unwrap().holds);
    }

    #[test]
    fn repeated_root_rejected() {
        assert!(matches!(
            UnivariateSpec::new(vec![integer(1), integer(3), integer(1)]),
            Err(Error::ConfluentRoots(_))
        ));
    }

    #[test]
    fn dual_certificate_for_pairs_with_p0() {
        let ops = worked();
        let beta = system(3, &[&[0, 1], &[0, 2], &[0, 3]]);
        let dual = dual_certificate(&ops, &beta, &Buchberger::default()).unwrap();
        assert!(verify_dual(&dual, &ops).unwrap().holds);
        assert_eq!(
            dual.identity(set(&[0, 1])).unwrap(),
            &row(&[(0, "-y"), (1, "1")])
        );
    }

    #[test]
    fn dual_certificate_failure_names_the_set() {
        let ops = worked();
        let beta = system(3, &[&[1, 2]]);
        match dual_certificate(&ops, &beta, &Buchberger::default()) {
            Err(Error::NotInIdeal(s)) => assert_eq!(s, "{1,2}"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn printed_identities_verify_exactly() {
        let ops = worked();
        let rows: BTreeMap<IndexSet, _> = [
            (set(&[0, 1]), row(&[(0, "-y"), (1, "1")])),
            (set(&[0, 2]), row(&[(0, "-(x-1)"), (2, "x")])),
            (set(&[0, 3]), row(&[(0, "x+y"), (3, "-1")])),
            (
                set(&[1, 2, 3]),
                row(&[(1, "1/2"), (2, "1/2*x+1/2"), (3, "-1/2")]),
            ),
        ]
        .into();
        let dual = DualCertificate::new(3, rows).unwrap();
        let v = verify_dual(&dual, &ops).unwrap();
        assert!(v.holds, "{:?}", v.residuals);
    }

    #[test]
    fn product_of_pairwise_identities_gives_two_term_decomposition() {
        let ops = worked();
        let rows: BTreeMap<IndexSet, _> = [
            (set(&[0, 1]), row(&[(0, "-y"), (1, "1")])),
            (set(&[0, 2]), row(&[(0, "-(x-1)"), (2, "x")])),
            (set(&[0, 3]), row(&[(0, "x+y"), (3, "-1")])),
        ]
        .into();
        let dual = DualCertificate::new(3, rows).unwrap();
        let cert = dual_to_alpha(&dual, &ops, usize::MAX).unwrap();
        // 1 = Q̃·P_0 + Q_0·P_1P_2P_3, i.e. α = {{0}, {1,2,3}}
        assert_eq!(cert.alpha(), &system(3, &[&[0], &[1, 2, 3]]));
        // Q_0 = 1·x·(−1) from the three picks of P_1, P_2, P_3
        assert_eq!(
            cert.cofactor(set(&[0])).unwrap(),
            &xy().parse("-x").unwrap()
        );
        assert!(verify_certificate(&cert, &ops).unwrap().holds);
    }

    #[test]
    fn single_pair_relabels() {
        let spec = UnivariateSpec::new(vec![integer(0), integer(1)]).unwrap();
        let ops = spec.operator();
        let v = Variables::new(["x"]).unwrap();
        let rows: BTreeMap<IndexSet, BTreeMap<usize, Polynomial>> = [(
            set(&[0, 1]),
            [(0, v.parse("-1").unwrap()), (1, v.parse("1").unwrap())].into(),
        )]
        .into();
        let dual = DualCertificate::new(1, rows).unwrap();
        let cert = dual_to_alpha(&dual, &ops, usize::MAX).unwrap();
        assert_eq!(cert.alpha(), &system(1, &[&[0], &[1]]));
        // P^{1} = P_0 carries Q_{01,0}
        assert_eq!(cert.cofactor(set(&[1])).unwrap(), &v.parse("-1").unwrap());
    }

    #[test]
    fn triple_identity_is_an_alpha_certificate_after_peeling() {
        let ops = worked().restrict(set(&[1, 2, 3])).unwrap();
        let rows: BTreeMap<IndexSet, _> = [(
            set(&[0, 1, 2]),
            row(&[(0, "1/2"), (1, "1/2*x+1/2"), (2, "-1/2")]),
        )]
        .into();
        let dual = DualCertificate::new(2, rows).unwrap();
        let cert = dual_to_alpha(&dual, &ops, usize::MAX).unwrap();
        assert_eq!(cert.alpha(), &system(2, &[&[1, 2], &[0, 2], &[0, 1]]));
        assert_eq!(
            cert.cofactor(set(&[1, 2])).unwrap(),
            &xy().parse("1/2").unwrap()
        );
        assert_eq!(
            cert.cofactor(set(&[0, 2])).unwrap(),
            &xy().parse("1/2*x+1/2").unwrap()
        );
        assert_eq!(
            cert.cofactor(set(&[0, 1])).unwrap(),
            &xy().parse("-1/2").unwrap()
        );
    }

    #[test]
    fn alpha_to_dual_recovers_relative_invertibility() {
        let spec = UnivariateSpec::new(vec![integer(0), integer(1)]).unwrap();
        let (ops, cert) = univariate_certificate(&spec).unwrap();
        let r = alpha_to_dual(&cert, set(&[0, 1]), &ops).unwrap();
        assert!(dual_identity_residual(&r, &ops).is_zero());
        assert!(alpha_to_dual(&cert, set(&[0]), &ops).is_err());
    }

    #[test]
    fn perturbed_cofactor_leaves_product_residual() {
        let ops = worked().restrict(set(&[1, 2, 3])).unwrap();
        let v = xy();
        let cofactors: BTreeMap<IndexSet, Polynomial> = [
            (set(&[1, 2]), v.parse("1/2").unwrap()),
            (set(&[0, 2]), v.parse("1/2*x+1/2").unwrap()),
            (set(&[0, 1]), v.parse("-1/2").unwrap()),
        ]
        .into();
        let cert = Certificate::new(2, cofactors).unwrap();
        assert!(verify_certificate(&cert, &ops).unwrap().residual.is_zero());
        let bumped = cert
            .with_cofactor(set(&[1, 2]), v.parse("3/2").unwrap())
            .unwrap();
        let res = verify_certificate(&bumped, &ops).unwrap();
        assert!(!res.holds);
        assert_eq!(res.residual, ops.complement_product(set(&[1, 2])));
    }

    #[test]
    fn true_decomposition_of_worked_regrouping() {
        let w = worked();
        let grouped =
            FactoredOperator::new(vec![w.factor(0).clone(), w.complement_product(set(&[0]))])
                .unwrap();
        let cert = true_decomposition(&grouped, &Buchberger::default()).unwrap();
        assert!(cert.is_true_decomposition());
    }
}
