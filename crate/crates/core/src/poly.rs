//! Sparse multivariate polynomials in the variables `X_{i,j}` with exact
//! rational coefficients.
//!
//! Variable `X_{i,j}` (summand `i`, Witt level `j`) has index `j * arity + i`,
//! so variables are ordered by `(j, i)`. Terms are kept in graded
//! lexicographic order: lower total degree first, and within a degree the
//! lexicographically larger exponent vector first.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Monomial(Vec<u32>);

impl Monomial {
    pub fn one(nvars: usize) -> Self {
        Monomial(vec![0; nvars])
    }

    pub fn from_exponents(e: Vec<u32>) -> Self {
        Monomial(e)
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn degree(&self) -> u64 {
        self.0.iter().map(|e| *e as u64).sum()
    }

    fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree().cmp(&other.degree()).then_with(|| other.0.cmp(&self.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Polynomial over `Q` in the variables `X_{i,j}`, `i < arity`, `j < levels`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymPoly {
    arity: usize,
    levels: usize,
    terms: BTreeMap<Monomial, BigRational>,
}

impl SymPoly {
    pub fn zero(arity: usize, levels: usize) -> Self {
        SymPoly { arity, levels, terms: BTreeMap::new() }
    }

    pub fn constant(arity: usize, levels: usize, c: BigRational) -> Self {
        let mut p = Self::zero(arity, levels);
        if !c.is_zero() {
            p.terms.insert(Monomial::one(arity * levels), c);
        }
        p
    }

    /// The variable `X_{i,j}`.
    pub fn var(arity: usize, levels: usize, i: usize, j: usize) -> Self {
        assert!(i < arity && j < levels, "variable X_{{{i},{j}}} out of range");
        let mut m = Monomial::one(arity * levels);
        m.0[j * arity + i] = 1;
        let mut p = Self::zero(arity, levels);
        p.terms.insert(m, BigRational::one());
        p
    }

    pub fn from_terms(arity: usize, levels: usize, terms: impl IntoIterator<Item = (Monomial, BigRational)>) -> Self {
        let mut p = Self::zero(arity, levels);
        for (m, c) in terms {
            assert_eq!(m.0.len(), arity * levels);
            p.add_term(m, c);
        }
        p
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn levels(&self) -> usize {
        self.levels
    }

    pub fn nvars(&self) -> usize {
        self.arity * self.levels
    }

    pub fn var_index(&self, i: usize, j: usize) -> usize {
        j * self.arity + i
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &BigRational)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, m: &Monomial) -> BigRational {
        self.terms.get(m).cloned().unwrap_or_else(BigRational::zero)
    }

    fn add_term(&mut self, m: Monomial, c: BigRational) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(existing) => {
                *existing += c;
                if existing.is_zero() {
                    self.terms.remove(&m);
                }
            }
            None => {
                self.terms.insert(m, c);
            }
        }
    }

    fn check_space(&self, other: &SymPoly) {
        assert_eq!((self.arity, self.levels), (other.arity, other.levels), "variable spaces differ");
    }

    pub fn add(&self, other: &SymPoly) -> SymPoly {
        self.check_space(other);
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &SymPoly) -> SymPoly {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> SymPoly {
        SymPoly {
            arity: self.arity,
            levels: self.levels,
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }

    pub fn scale(&self, k: &BigRational) -> SymPoly {
        if k.is_zero() {
            return SymPoly::zero(self.arity, self.levels);
        }
        SymPoly {
            arity: self.arity,
            levels: self.levels,
            terms: self.terms.iter().map(|(m, c)| (m.clone(), c * k)).collect(),
        }
    }

    pub fn scale_int(&self, k: i64) -> SymPoly {
        self.scale(&BigRational::from_integer(BigInt::from(k)))
    }

    pub fn mul(&self, other: &SymPoly) -> SymPoly {
        self.check_space(other);
        let mut acc: HashMap<Monomial, BigRational> = HashMap::new();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                let c = ca * cb;
                *acc.entry(ma.mul(mb)).or_insert_with(BigRational::zero) += c;
            }
        }
        SymPoly {
            arity: self.arity,
            levels: self.levels,
            terms: acc.into_iter().filter(|(_, c)| !c.is_zero()).collect(),
        }
    }

    pub fn pow(&self, mut exp: u64) -> SymPoly {
        let mut acc = SymPoly::constant(self.arity, self.levels, BigRational::one());
        let mut base = self.clone();
        while exp > 0 {
            if exp & 1 == 1 {
                acc = acc.mul(&base);
            }
            exp >>= 1;
            if exp > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    pub fn is_integral(&self) -> bool {
        self.terms.values().all(|c| c.is_integer())
    }

    pub fn has_constant_term(&self) -> bool {
        self.terms.keys().any(|m| m.degree() == 0)
    }

    /// Smallest total degree of a term; `None` for the zero polynomial.
    pub fn min_total_degree(&self) -> Option<u64> {
        self.terms.keys().map(Monomial::degree).min()
    }

    pub fn max_total_degree(&self) -> Option<u64> {
        self.terms.keys().map(Monomial::degree).max()
    }

    /// Sets every variable for which `kill(i, j)` holds to zero.
    pub fn set_zero(&self, kill: impl Fn(usize, usize) -> bool) -> SymPoly {
        let arity = self.arity;
        let terms = self
            .terms
            .iter()
            .filter(|(m, _)| m.0.iter().enumerate().all(|(idx, e)| *e == 0 || !kill(idx % arity, idx / arity)))
            .map(|(m, c)| (m.clone(), c.clone()))
            .collect();
        SymPoly { arity, levels: self.levels, terms }
    }

    /// Integer coefficients, in canonical term order. Fails on a
    /// non-integral coefficient.
    pub fn integer_terms(&self) -> Result<Vec<(&Monomial, BigInt)>> {
        self.terms
            .iter()
            .map(|(m, c)| {
                if c.is_integer() {
                    Ok((m, c.to_integer()))
                } else {
                    Err(Error::NotIntegral(format!("coefficient {c}")))
                }
            })
            .collect()
    }

    /// One line per term: coefficient, then `i:j^e` for each variable
    /// present, variables in `(j, i)` order.
    pub fn to_exchange(&self) -> String {
        let mut out = String::new();
        for (m, c) in &self.terms {
            out.push_str(&c.to_string());
            for (idx, e) in m.0.iter().enumerate() {
                if *e > 0 {
                    out.push_str(&format!(" {}:{}^{}", idx % self.arity, idx / self.arity, e));
                }
            }
            out.push('\n');
        }
        out
    }

    pub fn from_exchange(arity: usize, levels: usize, text: &str) -> Result<SymPoly> {
        let bad = |line: &str| Error::InvalidSpec(format!("malformed polynomial line: {line:?}"));
        let mut p = SymPoly::zero(arity, levels);
        for line in text.lines().map(str::trim).filter(|l| !l.is_empty()) {
            let mut fields = line.split_whitespace();
            let coeff: BigRational = fields.next().ok_or_else(|| bad(line))?.parse().map_err(|_| bad(line))?;
            let mut m = Monomial::one(arity * levels);
            for f in fields {
                let (var, e) = f.split_once('^').ok_or_else(|| bad(line))?;
                let (i, j) = var.split_once(':').ok_or_else(|| bad(line))?;
                let i: usize = i.parse().map_err(|_| bad(line))?;
                let j: usize = j.parse().map_err(|_| bad(line))?;
                let e: u32 = e.parse().map_err(|_| bad(line))?;
                if i >= arity || j >= levels {
                    return Err(bad(line));
                }
                m.0[j * arity + i] += e;
            }
            p.add_term(m, coeff);
        }
        Ok(p)
    }
}

impl fmt::Display for SymPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (m, c) in &self.terms {
            let vars: Vec<String> =
                m.0.iter()
                    .enumerate()
                    .filter(|(_, e)| **e > 0)
                    .map(|(idx, e)| {
                        let v = format!("X{}{}", idx % self.arity, idx / self.arity);
                        if *e == 1 {
                            v
                        } else {
                            format!("{v}^{e}")
                        }
                    })
                    .collect();
            let mag = c.abs();
            let sign = if c.is_negative() { "-" } else { "+" };
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            if vars.is_empty() {
                write!(f, "{mag}")?;
            } else if mag.is_one() {
                write!(f, "{}", vars.join("*"))?;
            } else {
                write!(f, "{mag}*{}", vars.join("*"))?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn x(i: usize, j: usize) -> SymPoly {
        SymPoly::var(2, 2, i, j)
    }

    #[test]
    fn binomial_square() {
        let s = x(0, 0).add(&x(1, 0));
        let sq = s.mul(&s);
        assert_eq!(sq.len(), 3);
        let cross = x(0, 0).mul(&x(1, 0)).scale_int(2);
        assert_eq!(sq.sub(&x(0, 0).pow(2)).sub(&x(1, 0).pow(2)), cross);
    }

    #[test]
    fn structure_queries() {
        let p = x(0, 0).add(&SymPoly::constant(2, 2, BigRational::one()));
        assert!(p.has_constant_term());
        assert_eq!(p.min_total_degree(), Some(0));
        let half = BigRational::new(1.into(), 2.into());
        assert!(!x(0, 1).scale(&half).is_integral());
        assert_eq!(SymPoly::zero(2, 2).min_total_degree(), None);
    }

    #[test]
    fn canonical_order_is_graded_then_lex_by_level_then_summand() {
        let p = x(1, 1).add(&x(0, 0)).add(&x(0, 0).mul(&x(1, 0))).add(&x(1, 0).pow(2));
        assert_eq!(p.to_exchange(), "1 0:0^1\n1 1:1^1\n1 0:0^1 1:0^1\n1 1:0^2\n");
    }

    #[test]
    fn set_zero_drops_terms() {
        let p = x(0, 0).add(&x(1, 1)).add(&x(0, 0).mul(&x(1, 0)));
        assert_eq!(p.set_zero(|i, _| i == 1), x(0, 0));
    }

    #[test]
    fn malformed_exchange_rejected() {
        assert!(SymPoly::from_exchange(2, 2, "1 0:5^1").is_err());
        assert!(SymPoly::from_exchange(2, 2, "x 0:0^1").is_err());
        assert!(SymPoly::from_exchange(2, 2, "").unwrap().is_zero());
    }

    fn arb_poly() -> impl Strategy<Value = SymPoly> {
        proptest::collection::vec((-5i64..5, 1i64..4, proptest::collection::vec(0u32..3, 4)), 0..6).prop_map(|ts| {
            SymPoly::from_terms(
                2,
                2,
                ts.into_iter().map(|(n, d, e)| (Monomial(e), BigRational::new(n.into(), d.into()))),
            )
        })
    }

    proptest! {
        #[test]
        fn exchange_round_trip(p in arb_poly()) {
            prop_assert_eq!(SymPoly::from_exchange(2, 2, &p.to_exchange()).unwrap(), p);
        }

        #[test]
        fn commutative_ring(a in arb_poly(), b in arb_poly(), c in arb_poly()) {
            prop_assert_eq!(a.mul(&b), b.mul(&a));
            prop_assert_eq!(a.mul(&b.add(&c)), a.mul(&b).add(&a.mul(&c)));
            prop_assert!(a.sub(&a).is_zero());
        }
    }
}
