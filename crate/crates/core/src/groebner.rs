//! Buchberger's algorithm with explicit cofactor tracking.
//!
//! Every basis element carries the polynomial combination of the input
//! generators that produced it. When the ideal contains one, the algorithm
//! stops as soon as a nonzero constant appears, and the cofactors of that
//! constant (rescaled) are a Bézout certificate for `1 ∈ ⟨generators⟩`.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::poly::{divide_capped, Monomial, MonomialOrder, Polynomial, Rational};
use crate::DEFAULT_TERM_CAP;

/// A polynomial together with cofactors over the input generators:
/// `value = Σ cofactors[i] · generators[i]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CertifiedPoly {
    pub value: Polynomial,
    pub cofactors: Vec<Polynomial>,
}

impl CertifiedPoly {
    /// Recomputes `Σ cofactors[i] · generators[i]` and compares with `value`.
    pub fn check(&self, generators: &[Polynomial]) -> bool {
        self.cofactors.len() == generators.len()
            && combination(&self.cofactors, generators, self.value.nvars()) == self.value
    }

    fn scale(&self, c: &Rational) -> CertifiedPoly {
        CertifiedPoly {
            value: self.value.scale(c),
            cofactors: self.cofactors.iter().map(|q| q.scale(c)).collect(),
        }
    }

    fn max_terms(&self) -> usize {
        self.cofactors
            .iter()
            .map(Polynomial::len)
            .chain(std::iter::once(self.value.len()))
            .max()
            .unwrap_or(0)
    }
}

fn combination(cofactors: &[Polynomial], generators: &[Polynomial], nvars: usize) -> Polynomial {
    cofactors
        .iter()
        .zip(generators)
        .fold(Polynomial::zero(nvars), |acc, (q, g)| &acc + &(q * g))
}

/// Cofactors `c` with `Σ c[i] · generators[i] = 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BezoutCertificate {
    pub cofactors: Vec<Polynomial>,
}

impl BezoutCertificate {
    pub fn verify(&self, generators: &[Polynomial]) -> bool {
        self.cofactors.len() == generators.len()
            && !generators.is_empty()
            && combination(&self.cofactors, generators, generators[0].nvars()).is_one()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CertifiedBasis {
    pub generators: Vec<Polynomial>,
    pub basis: Vec<CertifiedPoly>,
    pub order: MonomialOrder,
}

impl CertifiedBasis {
    /// The Bézout certificate, if the basis contains a nonzero constant.
    pub fn unit(&self) -> Option<BezoutCertificate> {
        let elt = self.basis.iter().find(|b| b.value.is_constant())?;
        let c = elt.value.constant_value()?;
        Some(BezoutCertificate {
            cofactors: elt.scale(&c.recip()).cofactors,
        })
    }

    pub fn values(&self) -> Vec<Polynomial> {
        self.basis.iter().map(|b| b.value.clone()).collect()
    }

    /// Checks that every S-polynomial of basis pairs reduces to zero.
    pub fn is_groebner(&self) -> bool {
        let values = self.values();
        for i in 0..values.len() {
            for j in i + 1..values.len() {
                let s = s_polynomial(&values[i], &values[j], self.order).unwrap();
                let r = divide_capped(&s, &values, self.order, usize::MAX).unwrap();
                if !r.remainder.is_zero() {
                    return false;
                }
            }
        }
        true
    }

    /// Inter-reduced monic basis. Certificates are not carried over.
    pub fn reduced(&self) -> Vec<Polynomial> {
        let order = self.order;
        let values = self.values();
        let mut minimal: Vec<Polynomial> = Vec::new();
        for (i, p) in values.iter().enumerate() {
            let lm = p.leading_monomial(order).unwrap();
            let redundant = values.iter().enumerate().any(|(j, q)| {
                let lq = q.leading_monomial(order).unwrap();
                j != i && lq.divides(lm) && (lq != lm || j < i)
            });
            if !redundant {
                minimal.push(p.monic(order));
            }
        }
        let mut out = Vec::with_capacity(minimal.len());
        for i in 0..minimal.len() {
            let others: Vec<Polynomial> = minimal
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != i)
                .map(|(_, q)| q.clone())
                .collect();
            let r = divide_capped(&minimal[i], &others, order, usize::MAX)
                .unwrap()
                .remainder;
            out.push(r.monic(order));
        }
        out.sort_by(|a, b| {
            order.compare(
                b.leading_monomial(order).unwrap(),
                a.leading_monomial(order).unwrap(),
            )
        });
        out
    }
}

/// Result of reducing `p` by a certified basis:
/// `p = Σ cofactors[i] · generators[i] + remainder`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MembershipReduction {
    pub remainder: Polynomial,
    pub cofactors: Vec<Polynomial>,
}

impl MembershipReduction {
    pub fn is_member(&self) -> bool {
        self.remainder.is_zero()
    }
}

/// Standard S-polynomial `(m/lt(p))·p − (m/lt(q))·q` with `m = lcm(lm(p), lm(q))`.
pub fn s_polynomial(p: &Polynomial, q: &Polynomial, order: MonomialOrder) -> Result<Polynomial> {
    let (Some((mp, cp)), Some((mq, cq))) = (p.leading_term(order), q.leading_term(order)) else {
        return Err(Error::ZeroPolynomial("S-polynomial input".into()));
    };
    if p.nvars() != q.nvars() {
        return Err(Error::VariableCountMismatch {
            left: p.nvars(),
            right: q.nvars(),
        });
    }
    let lcm = mp.lcm(mq);
    let a = p.mul_term(&mp.quotient_of(&lcm), &cp.recip());
    let b = q.mul_term(&mq.quotient_of(&lcm), &cq.recip());
    Ok(&a - &b)
}

/// Configuration for Gröbner computations: term order plus a runaway cap.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Buchberger {
    pub order: MonomialOrder,
    pub term_cap: usize,
}

impl Default for Buchberger {
    fn default() -> Self {
        Buchberger {
            order: MonomialOrder::GrevLex,
            term_cap: DEFAULT_TERM_CAP,
        }
    }
}

impl Buchberger {
    pub fn new(order: MonomialOrder) -> Self {
        Buchberger {
            order,
            ..Default::default()
        }
    }

    pub fn with_term_cap(mut self, cap: usize) -> Self {
        self.term_cap = cap;
        self
    }

    /// Gröbner basis of `⟨generators⟩` with cofactors for each element.
    ///
    /// Pairs are processed by the normal strategy: smallest total degree of
    /// the lcm first, ties by pair index. Pairs with coprime leading
    /// monomials are skipped. The run stops early once a constant appears.
    pub fn basis(&self, generators: &[Polynomial]) -> Result<CertifiedBasis> {
        let order = self.order;
        let nvars = validate_generators(generators)?;
        let n = generators.len();
        let unit_vec = |i: usize| -> Vec<Polynomial> {
            (0..n)
                .map(|k| {
                    if k == i {
                        Polynomial::one(nvars)
                    } else {
                        Polynomial::zero(nvars)
                    }
                })
                .collect()
        };

        let mut basis: Vec<CertifiedPoly> = Vec::new();
        let mut leads: Vec<Monomial> = Vec::new();
        let mut pairs: BTreeSet<(u32, usize, usize)> = BTreeSet::new();

        let push = |elt: CertifiedPoly,
                    basis: &mut Vec<CertifiedPoly>,
                    leads: &mut Vec<Monomial>,
                    pairs: &mut BTreeSet<(u32, usize, usize)>|
         -> bool {
            let (_, lc) = elt.value.leading_term(order).unwrap();
            let elt = elt.scale(&lc.recip());
            let lm = elt.value.leading_monomial(order).unwrap().clone();
            let k = basis.len();
            for (i, li) in leads.iter().enumerate() {
                pairs.insert((li.lcm(&lm).degree(), i, k));
            }
            let is_unit = lm.is_one();
            leads.push(lm);
            basis.push(elt);
            is_unit
        };

        for (i, g) in generators.iter().enumerate() {
            if g.is_zero() {
                continue;
            }
            let elt = CertifiedPoly {
                value: g.clone(),
                cofactors: unit_vec(i),
            };
            if push(elt, &mut basis, &mut leads, &mut pairs) {
                return Ok(self.finish(generators, basis));
            }
        }

        while let Some((_, i, j)) = pairs.pop_first() {
            if leads[i].is_coprime(&leads[j]) {
                continue;
            }
            let lcm = leads[i].lcm(&leads[j]);
            let one = Rational::from_integer(1.into());
            let a = mul_certified(&basis[i], &leads[i].quotient_of(&lcm), &one);
            let b = mul_certified(&basis[j], &leads[j].quotient_of(&lcm), &one);
            let s = sub_certified(&a, &b);

            let values: Vec<Polynomial> = basis.iter().map(|b| b.value.clone()).collect();
            let division = divide_capped(&s.value, &values, order, self.term_cap)?;
            if division.remainder.is_zero() {
                continue;
            }
            let mut cofactors = s.cofactors;
            for (q, elt) in division.quotients.iter().zip(&basis) {
                if q.is_zero() {
                    continue;
                }
                for (c, ec) in cofactors.iter_mut().zip(&elt.cofactors) {
                    *c = &*c - &(q * ec);
                }
            }
            let elt = CertifiedPoly {
                value: division.remainder,
                cofactors,
            };
            if elt.max_terms() > self.term_cap {
                return Err(Error::term_cap(
                    "terms in a Gröbner basis element",
                    self.term_cap,
                ));
            }
            debug_assert!(elt.check(generators));
            if push(elt, &mut basis, &mut leads, &mut pairs) {
                break;
            }
        }
        Ok(self.finish(generators, basis))
    }

    fn finish(&self, generators: &[Polynomial], basis: Vec<CertifiedPoly>) -> CertifiedBasis {
        CertifiedBasis {
            generators: generators.to_vec(),
            basis,
            order: self.order,
        }
    }

    /// A Bézout certificate when `1 ∈ ⟨generators⟩` over ℚ, otherwise `None`.
    pub fn contains_one(&self, generators: &[Polynomial]) -> Result<Option<BezoutCertificate>> {
        let cert = self.basis(generators)?.unit();
        if let Some(c) = &cert {
            if !c.verify(generators) {
                return Err(Error::Verification(
                    "Bézout certificate failed to verify".into(),
                ));
            }
        }
        Ok(cert)
    }
}

fn validate_generators(generators: &[Polynomial]) -> Result<usize> {
    let first = generators
        .first()
        .ok_or_else(|| Error::ZeroPolynomial("empty generator list".into()))?;
    let nvars = first.nvars();
    for g in generators {
        if g.nvars() != nvars {
            return Err(Error::VariableCountMismatch {
                left: nvars,
                right: g.nvars(),
            });
        }
    }
    if generators.iter().all(Polynomial::is_zero) {
        return Err(Error::ZeroPolynomial("all generators are zero".into()));
    }
    Ok(nvars)
}

fn mul_certified(p: &CertifiedPoly, m: &Monomial, c: &Rational) -> CertifiedPoly {
    CertifiedPoly {
        value: p.value.mul_term(m, c),
        cofactors: p.cofactors.iter().map(|q| q.mul_term(m, c)).collect(),
    }
}

fn sub_certified(a: &CertifiedPoly, b: &CertifiedPoly) -> CertifiedPoly {
    CertifiedPoly {
        value: &a.value - &b.value,
        cofactors: a
            .cofactors
            .iter()
            .zip(&b.cofactors)
            .map(|(x, y)| x - y)
            .collect(),
    }
}

pub fn buchberger_certified(
    generators: &[Polynomial],
    order: MonomialOrder,
) -> Result<CertifiedBasis> {
    Buchberger::new(order).basis(generators)
}

pub fn contains_one(
    generators: &[Polynomial],
    order: MonomialOrder,
) -> Result<Option<BezoutCertificate>> {
    Buchberger::new(order).contains_one(generators)
}

/// Reduces `p` modulo the basis and expresses `p − remainder` over the
/// original generators.
pub fn reduce_certified(p: &Polynomial, basis: &CertifiedBasis) -> Result<MembershipReduction> {
    let nvars = p.nvars();
    let values = basis.values();
    let division = divide_capped(p, &values, basis.order, usize::MAX)?;
    let mut cofactors = vec![Polynomial::zero(nvars); basis.generators.len()];
    for (q, elt) in division.quotients.iter().zip(&basis.basis) {
        if q.is_zero() {
            continue;
        }
        for (c, ec) in cofactors.iter_mut().zip(&elt.cofactors) {
            *c = &*c + &(q * ec);
        }
    }
    Ok(MembershipReduction {
        remainder: division.remainder,
        cofactors,
    })
}

impl MembershipReduction {
    /// Recomputes `Σ cofactors[i]·generators[i] + remainder` and compares with `p`.
    pub fn check(&self, p: &Polynomial, generators: &[Polynomial]) -> bool {
        &combination(&self.cofactors, generators, p.nvars()) + &self.remainder == *p
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{integer, rational, Variables};

    fn xy() -> Variables {
        Variables::new(["x", "y"]).unwrap()
    }

    fn ps(list: &[&str]) -> Vec<Polynomial> {
        list.iter().map(|s| xy().parse(s).unwrap()).collect()
    }

    const G: MonomialOrder = MonomialOrder::GrevLex;

    #[test]
    fn s_polynomial_examples() {
        let v = ps(&["x", "y", "x+1", "x^2", "x^2+y"]);
        assert!(s_polynomial(&v[0], &v[1], G).unwrap().is_zero());
        assert!(s_polynomial(&v[2], &v[0], G).unwrap().is_one());
        assert_eq!(s_polynomial(&v[3], &v[4], G).unwrap(), ps(&["-y"])[0]);
        assert!(s_polynomial(&v[0], &Polynomial::zero(2), G).is_err());
    }

    #[test]
    fn basis_of_single_generator() {
        let b = buchberger_certified(&ps(&["x"]), G).unwrap();
        assert_eq!(b.basis.len(), 1);
        assert_eq!(b.basis[0].value, ps(&["x"])[0]);
        assert_eq!(b.basis[0].cofactors, vec![Polynomial::one(2)]);
    }

    #[test]
    fn coprime_linear_pair_yields_unit() {
        let g = ps(&["x+1", "x"]);
        let b = buchberger_certified(&g, G).unwrap();
        assert!(b.basis.iter().all(|e| e.check(&g)));
        let cert = b.unit().unwrap();
        assert!(cert.verify(&g));
        assert_eq!(cert.cofactors, ps(&["1", "-1"]));
    }

    #[test]
    fn non_member_pairs_from_worked_example() {
        let g = ps(&["x", "x*y+y+1"]);
        let b = buchberger_certified(&g, G).unwrap();
        assert!(b.basis.iter().all(|e| !e.value.is_constant()));
        assert!(b.is_groebner());
        assert!(contains_one(&g, G).unwrap().is_none());
    }

    #[test]
    fn worked_example_certificates_are_found() {
        let g = ps(&["x+1", "x*y+y+1"]);
        let c = contains_one(&g, G).unwrap().unwrap();
        assert_eq!(c.cofactors, ps(&["-y", "1"]));

        let g = ps(&["x*y+y+1", "x", "x^2+x*y+x+y-1"]);
        let c = contains_one(&g, G).unwrap().unwrap();
        assert!(c.verify(&g));
    }

    #[test]
    fn all_zero_generators_rejected() {
        assert!(matches!(
            buchberger_certified(&[Polynomial::zero(2)], G),
            Err(Error::ZeroPolynomial(_))
        ));
        assert!(buchberger_certified(&[], G).is_err());
    }

    #[test]
    fn constant_generator_short_circuits() {
        let g = vec![ps(&["x"])[0].clone(), Polynomial::constant(2, integer(3))];
        let c = contains_one(&g, G).unwrap().unwrap();
        assert_eq!(c.cofactors[1], Polynomial::constant(2, rational(1, 3)));
    }

    #[test]
    fn reduce_certified_examples() {
        let g = ps(&["x+1", "x"]);
        let b = buchberger_certified(&g, G).unwrap();
        let zero = reduce_certified(&Polynomial::zero(2), &b).unwrap();
        assert!(zero.is_member() && zero.cofactors.iter().all(Polynomial::is_zero));
        let prod = &g[0] * &g[1];
        let r = reduce_certified(&prod, &b).unwrap();
        assert!(r.is_member() && r.check(&prod, &g));

        let g = ps(&["x^2"]);
        let b = buchberger_certified(&g, G).unwrap();
        let r = reduce_certified(&ps(&["x"])[0], &b).unwrap();
        assert_eq!(r.remainder, ps(&["x"])[0]);
    }

    #[test]
    fn reduced_basis_of_twisted_cubic() {
        let v = Variables::new(["x", "y", "z"]).unwrap();
        let g: Vec<_> = ["y - x^2", "z - x^3"]
            .iter()
            .map(|s| v.parse(s).unwrap())
            .collect();
        let b = buchberger_certified(&g, MonomialOrder::Lex).unwrap();
        assert!(b.is_groebner());
        assert!(b.basis.iter().all(|e| e.check(&g)));
        let red = b.reduced();
        // lex x > y > z: {x^2 - y, x*y - z, x*z - y^2, y^3 - z^2}
        let expected: Vec<_> = ["x^2 - y", "x*y - z", "x*z - y^2", "y^3 - z^2"]
            .iter()
            .map(|s| v.parse(s).unwrap())
            .collect();
        for e in &expected {
            assert!(red.contains(e), "missing {}", v.format(e));
        }
        assert_eq!(red.len(), expected.len());
    }

    #[test]
    fn term_cap_aborts() {
        let v = Variables::new(["x", "y", "z"]).unwrap();
        let g: Vec<_> = ["x^3*y - z^2 + x", "y^3*z - x^2 + 1", "z^3*x - y^2 + z"]
            .iter()
            .map(|s| v.parse(s).unwrap())
            .collect();
        let r = Buchberger::new(G).with_term_cap(3).basis(&g);
        assert!(matches!(r, Err(Error::ResourceLimit { .. })));
    }

    #[test]
    fn deterministic() {
        let g = ps(&["x*y+y+1", "x", "x^2+x*y+x+y-1"]);
        assert_eq!(
            buchberger_certified(&g, G).unwrap(),
            buchberger_certified(&g, G).unwrap()
        );
    }
}
