//! Sparse multivariate polynomials over the rationals.
//!
//! A [`Polynomial`] is a map from exponent vectors to nonzero rational
//! coefficients. All arithmetic is exact. Division with remainder by a list
//! of polynomials ([`divide_multi`]) follows the textbook algorithm and always
//! reduces by the first applicable divisor, so results are reproducible.

mod monomial;
mod parse;

use std::collections::BTreeMap;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

pub(crate) use monomial::OrderedMonomial;
pub use monomial::{Monomial, MonomialOrder};
pub use parse::Variables;

/// Exact rational number, always kept in lowest terms with positive denominator.
pub type Rational = BigRational;

pub fn rational(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn integer(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Parses `"a"` or `"a/b"` (optionally signed) into a rational.
pub fn parse_rational(text: &str) -> Result<Rational> {
    let t = text.trim();
    let bad = || Error::Syntax {
        pos: 0,
        message: format!("invalid rational `{text}`"),
    };
    let (num, den) = match t.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (t, "1"),
    };
    let n: BigInt = num.parse().map_err(|_| bad())?;
    let d: BigInt = den.parse().map_err(|_| bad())?;
    if d.is_zero() {
        return Err(Error::Syntax {
            pos: 0,
            message: format!("zero denominator in `{text}`"),
        });
    }
    Ok(Rational::new(n, d))
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Polynomial {
    nvars: usize,
    terms: BTreeMap<Monomial, Rational>,
}

impl Polynomial {
    pub fn zero(nvars: usize) -> Self {
        Polynomial {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, Rational::one())
    }

    pub fn constant(nvars: usize, c: Rational) -> Self {
        Self::monomial(nvars, Monomial::one(nvars), c)
    }

    pub fn variable(nvars: usize, index: usize) -> Self {
        assert!(index < nvars, "variable index out of range");
        Self::monomial(nvars, Monomial::variable(nvars, index), Rational::one())
    }

    pub fn monomial(nvars: usize, mono: Monomial, c: Rational) -> Self {
        assert_eq!(mono.nvars(), nvars);
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(mono, c);
        }
        Polynomial { nvars, terms }
    }

    /// Builds a polynomial from arbitrary (possibly repeated, possibly zero) terms.
    pub fn from_terms(nvars: usize, terms: impl IntoIterator<Item = (Monomial, Rational)>) -> Self {
        let mut p = Polynomial::zero(nvars);
        for (m, c) in terms {
            assert_eq!(m.nvars(), nvars);
            p.add_term(m, c);
        }
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.constant_value().is_some_and(|c| c.is_one())
    }

    /// Number of stored (nonzero) terms.
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// `Some(c)` when the polynomial is the constant `c` (including zero).
    pub fn constant_value(&self) -> Option<Rational> {
        match self.terms.len() {
            0 => Some(Rational::zero()),
            1 => {
                let (m, c) = self.terms.iter().next().unwrap();
                m.is_one().then(|| c.clone())
            }
            _ => None,
        }
    }

    pub fn is_constant(&self) -> bool {
        self.constant_value().is_some()
    }

    /// Terms in ascending lexicographic exponent order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &Rational)> + '_ {
        self.terms.iter()
    }

    pub fn coefficient(&self, m: &Monomial) -> Rational {
        self.terms.get(m).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(Monomial::degree).max()
    }

    /// Terms sorted in descending order with respect to `order`.
    pub fn sorted_terms(&self, order: MonomialOrder) -> Vec<(&Monomial, &Rational)> {
        let mut v: Vec<_> = self.terms.iter().collect();
        v.sort_by(|a, b| order.compare(b.0, a.0));
        v
    }

    pub fn leading_term(&self, order: MonomialOrder) -> Option<(&Monomial, &Rational)> {
        self.terms.iter().max_by(|a, b| order.compare(a.0, b.0))
    }

    pub fn leading_monomial(&self, order: MonomialOrder) -> Option<&Monomial> {
        self.leading_term(order).map(|(m, _)| m)
    }

    pub(crate) fn add_term(&mut self, m: Monomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    fn check_compatible(&self, other: &Polynomial) -> Result<()> {
        if self.nvars != other.nvars {
            return Err(Error::VariableCountMismatch {
                left: self.nvars,
                right: other.nvars,
            });
        }
        Ok(())
    }

    pub fn checked_add(&self, other: &Polynomial) -> Result<Polynomial> {
        self.check_compatible(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn checked_sub(&self, other: &Polynomial) -> Result<Polynomial> {
        self.check_compatible(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), -c);
        }
        Ok(out)
    }

    pub fn checked_mul(&self, other: &Polynomial) -> Result<Polynomial> {
        self.check_compatible(other)?;
        let mut out = Polynomial::zero(self.nvars);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                out.add_term(ma.mul(mb), ca * cb);
            }
        }
        Ok(out)
    }

    pub fn scale(&self, c: &Rational) -> Polynomial {
        if c.is_zero() {
            return Polynomial::zero(self.nvars);
        }
        Polynomial {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(m, a)| (m.clone(), a * c)).collect(),
        }
    }

    /// Multiplies by the single term `c * m`.
    pub fn mul_term(&self, m: &Monomial, c: &Rational) -> Polynomial {
        if c.is_zero() {
            return Polynomial::zero(self.nvars);
        }
        Polynomial {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(t, a)| (t.mul(m), a * c)).collect(),
        }
    }

    pub fn pow(&self, mut e: u32) -> Polynomial {
        let mut base = self.clone();
        let mut acc = Polynomial::one(self.nvars);
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

    /// Rescales so that the leading coefficient is one; zero stays zero.
    pub fn monic(&self, order: MonomialOrder) -> Polynomial {
        match self.leading_term(order) {
            Some((_, c)) => self.scale(&c.recip()),
            None => self.clone(),
        }
    }

    /// Product of a list of polynomials (empty product is one).
    pub fn product<'a>(
        nvars: usize,
        factors: impl IntoIterator<Item = &'a Polynomial>,
    ) -> Polynomial {
        factors
            .into_iter()
            .fold(Polynomial::one(nvars), |acc, p| &acc * p)
    }

    /// Evaluates at a rational point.
    pub fn evaluate(&self, point: &[Rational]) -> Result<Rational> {
        if point.len() != self.nvars {
            return Err(Error::VariableCountMismatch {
                left: self.nvars,
                right: point.len(),
            });
        }
        let mut acc = Rational::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (x, &e) in point.iter().zip(m.exponents()) {
                t *= num_traits::pow(x.clone(), e as usize);
            }
            acc += t;
        }
        Ok(acc)
    }

    /// Largest absolute numerator or denominator, useful for diagnostics.
    pub fn height(&self) -> BigInt {
        self.terms
            .values()
            .flat_map(|c| [c.numer().abs(), c.denom().clone()])
            .max()
            .unwrap_or_else(BigInt::zero)
    }
}

impl std::fmt::Debug for Polynomial {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let names = Variables::generic(self.nvars);
        write!(f, "{}", names.format(self))
    }
}

macro_rules! forward_binop {
    ($tr:ident, $method:ident, $checked:ident) => {
        impl $tr<&Polynomial> for &Polynomial {
            type Output = Polynomial;

            /// Panics on variable-count mismatch; use the `checked_*` form to
            /// get an error instead.
            fn $method(self, rhs: &Polynomial) -> Polynomial {
                self.$checked(rhs)
                    .expect("polynomial variable count mismatch")
            }
        }

        impl $tr<Polynomial> for Polynomial {
            type Output = Polynomial;

            fn $method(self, rhs: Polynomial) -> Polynomial {
                (&self).$method(&rhs)
            }
        }
    };
}

forward_binop!(Add, add, checked_add);
forward_binop!(Sub, sub, checked_sub);
forward_binop!(Mul, mul, checked_mul);

impl Neg for &Polynomial {
    type Output = Polynomial;

    fn neg(self) -> Polynomial {
        Polynomial {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }
}

impl Neg for Polynomial {
    type Output = Polynomial;

    fn neg(self) -> Polynomial {
        -&self
    }
}

/// Result of multivariate division: `p = Σ quotients[i]·divisors[i] + remainder`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Division {
    pub quotients: Vec<Polynomial>,
    pub remainder: Polynomial,
}

/// Multivariate division with remainder.
///
/// At each step the leading term of the running dividend is reduced by the
/// first divisor (in list order) whose leading monomial divides it; if none
/// does, the term moves to the remainder.
pub fn divide_multi(
    p: &Polynomial,
    divisors: &[Polynomial],
    order: MonomialOrder,
) -> Result<Division> {
    divide_capped(p, divisors, order, usize::MAX)
}

pub(crate) fn divide_capped(
    p: &Polynomial,
    divisors: &[Polynomial],
    order: MonomialOrder,
    term_cap: usize,
) -> Result<Division> {
    let nvars = p.nvars();
    for d in divisors {
        p.check_compatible(d)?;
        if d.is_zero() {
            return Err(Error::ZeroPolynomial(
                "divisor in multivariate division".into(),
            ));
        }
    }
    let leads: Vec<(Monomial, Rational)> = divisors
        .iter()
        .map(|d| {
            let (m, c) = d.leading_term(order).unwrap();
            (m.clone(), c.clone())
        })
        .collect();

    let mut work: BTreeMap<OrderedMonomial, Rational> = p
        .terms()
        .map(|(m, c)| {
            (
                OrderedMonomial {
                    order,
                    mono: m.clone(),
                },
                c.clone(),
            )
        })
        .collect();
    let mut quotients = vec![Polynomial::zero(nvars); divisors.len()];
    let mut remainder = Polynomial::zero(nvars);

    while let Some((lead, coeff)) = work.pop_last() {
        let Some(i) = leads.iter().position(|(m, _)| m.divides(&lead.mono)) else {
            remainder.add_term(lead.mono, coeff);
            continue;
        };
        let q_mono = leads[i].0.quotient_of(&lead.mono);
        let q_coeff = &coeff / &leads[i].1;
        for (m, c) in divisors[i].terms() {
            if *m == leads[i].0 {
                continue;
            }
            let key = OrderedMonomial {
                order,
                mono: m.mul(&q_mono),
            };
            let delta = -(c * &q_coeff);
            match work.entry(key) {
                std::collections::btree_map::Entry::Vacant(v) => {
                    v.insert(delta);
                }
                std::collections::btree_map::Entry::Occupied(mut o) => {
                    *o.get_mut() += delta;
                    if o.get().is_zero() {
                        o.remove();
                    }
                }
            }
        }
        quotients[i].add_term(q_mono, q_coeff);
        if work.len() > term_cap || quotients[i].len() > term_cap {
            return Err(Error::term_cap(
                "terms during polynomial division",
                term_cap,
            ));
        }
    }
    Ok(Division {
        quotients,
        remainder,
    })
}
