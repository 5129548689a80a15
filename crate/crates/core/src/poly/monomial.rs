use std::cmp::Ordering;
use std::fmt;

/// Exponent vector of a monomial `x_1^{e_1} ... x_k^{e_k}`.
///
/// The derived ordering is plain lexicographic comparison of the exponent
/// sequences, which is what [`super::Polynomial`] uses as its storage order.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Monomial(Box<[u32]>);

impl Monomial {
    pub fn one(nvars: usize) -> Self {
        Monomial(vec![0; nvars].into_boxed_slice())
    }

    pub fn new(exponents: Vec<u32>) -> Self {
        Monomial(exponents.into_boxed_slice())
    }

    pub fn variable(nvars: usize, index: usize) -> Self {
        let mut e = vec![0; nvars];
        e[index] = 1;
        Monomial(e.into_boxed_slice())
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn nvars(&self) -> usize {
        self.0.len()
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn is_one(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        debug_assert_eq!(self.nvars(), other.nvars());
        Monomial(
            self.0
                .iter()
                .zip(other.0.iter())
                .map(|(a, b)| a + b)
                .collect(),
        )
    }

    /// Whether `self` divides `other`.
    pub fn divides(&self, other: &Monomial) -> bool {
        self.0.iter().zip(other.0.iter()).all(|(a, b)| a <= b)
    }

    /// `other / self`, assuming `self` divides `other`.
    pub fn quotient_of(&self, other: &Monomial) -> Monomial {
        debug_assert!(self.divides(other));
        Monomial(
            other
                .0
                .iter()
                .zip(self.0.iter())
                .map(|(a, b)| a - b)
                .collect(),
        )
    }

    pub fn lcm(&self, other: &Monomial) -> Monomial {
        Monomial(
            self.0
                .iter()
                .zip(other.0.iter())
                .map(|(a, b)| *a.max(b))
                .collect(),
        )
    }

    pub fn is_coprime(&self, other: &Monomial) -> bool {
        self.0
            .iter()
            .zip(other.0.iter())
            .all(|(a, b)| *a == 0 || *b == 0)
    }
}

impl fmt::Debug for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

/// Term orders usable by division and Buchberger's algorithm.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum MonomialOrder {
    Lex,
    GrLex,
    #[default]
    GrevLex,
}

impl MonomialOrder {
    pub fn compare(self, a: &Monomial, b: &Monomial) -> Ordering {
        let (a, b) = (a.exponents(), b.exponents());
        match self {
            MonomialOrder::Lex => a.cmp(b),
            MonomialOrder::GrLex => {
                let (da, db): (u32, u32) = (a.iter().sum(), b.iter().sum());
                da.cmp(&db).then_with(|| a.cmp(b))
            }
            MonomialOrder::GrevLex => {
                let (da, db): (u32, u32) = (a.iter().sum(), b.iter().sum());
                da.cmp(&db).then_with(|| {
                    // the rightmost differing exponent decides, reversed
                    for (x, y) in a.iter().zip(b.iter()).rev() {
                        if x != y {
                            return y.cmp(x);
                        }
                    }
                    Ordering::Equal
                })
            }
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            MonomialOrder::Lex => "lex",
            MonomialOrder::GrLex => "grlex",
            MonomialOrder::GrevLex => "grevlex",
        }
    }
}

impl std::str::FromStr for MonomialOrder {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "lex" => Ok(MonomialOrder::Lex),
            "grlex" => Ok(MonomialOrder::GrLex),
            "grevlex" => Ok(MonomialOrder::GrevLex),
            other => Err(format!("unknown monomial order `{other}`")),
        }
    }
}

/// A monomial carrying its order, so that ordered collections sort by it.
#[derive(Clone, PartialEq, Eq)]
pub(crate) struct OrderedMonomial {
    pub order: MonomialOrder,
    pub mono: Monomial,
}

impl PartialOrd for OrderedMonomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for OrderedMonomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.order.compare(&self.mono, &other.mono)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(e: &[u32]) -> Monomial {
        Monomial::new(e.to_vec())
    }

    #[test]
    fn grevlex_breaks_ties_on_last_variable() {
        let o = MonomialOrder::GrevLex;
        // x^2 z vs x y^2 in grevlex: z-exponent larger loses
        assert_eq!(o.compare(&m(&[1, 2, 0]), &m(&[2, 0, 1])), Ordering::Greater);
        assert_eq!(o.compare(&m(&[2, 0]), &m(&[1, 1])), Ordering::Greater);
        assert_eq!(o.compare(&m(&[0, 3]), &m(&[2, 0])), Ordering::Greater);
    }

    #[test]
    fn lex_and_grlex() {
        assert_eq!(
            MonomialOrder::Lex.compare(&m(&[1, 0]), &m(&[0, 5])),
            Ordering::Greater
        );
        assert_eq!(
            MonomialOrder::GrLex.compare(&m(&[1, 0]), &m(&[0, 5])),
            Ordering::Less
        );
    }

    #[test]
    fn divisibility() {
        assert!(m(&[1, 0]).divides(&m(&[2, 1])));
        assert!(!m(&[1, 2]).divides(&m(&[2, 1])));
        assert_eq!(m(&[1, 0]).quotient_of(&m(&[2, 1])), m(&[1, 1]));
        assert_eq!(m(&[1, 3]).lcm(&m(&[2, 1])), m(&[2, 3]));
    }
}
