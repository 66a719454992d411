//! Universal polynomials of `p`-typical Witt vector addition.
//!
//! The sum polynomials `z_n` of `arity` Witt vectors are obtained by solving
//! the ghost equations level by level over `Q` and then certifying that the
//! result has integer coefficients. On top of the `p`-ary sum live the
//! correction polynomials
//!
//! ```text
//! f_n     = Σ_{j<n}   p^{-(n-j)} (Σ_i X_{i,j}^{p^{n-j}} - z_j^{p^{n-j}})
//! g_{n-2} = Σ_{j<n-1} p^{-(n-j)} (Σ_i X_{i,j}^{p^{n-j}} - z_j^{p^{n-j}}) + p^{-1} (-f_{n-1})^p
//! ```
//!
//! which satisfy `f_n + Σ_i X_{i,n} - z_n = 0` and
//! `f_n = g_{n-2} + p^{-1} (Σ_i X_{i,n-1}^p - z_{n-1}^p - (-f_{n-1})^p)`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;

use crate::error::{Error, Result};
use crate::poly::{Monomial, SymPoly};

/// Bound on the projected dense term count of a symbolic computation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ResourceLimits {
    pub max_terms: u128,
}

impl Default for ResourceLimits {
    fn default() -> Self {
        ResourceLimits { max_terms: 10_000_000 }
    }
}

impl ResourceLimits {
    /// Dense monomial count of degree `<= p^n` in `arity * (n + 1)` variables.
    pub fn projected_terms(p: u64, n: usize, arity: usize) -> u128 {
        let vars = (arity * (n + 1)) as u128;
        let deg = match (p as u128).checked_pow(n as u32) {
            Some(d) => d,
            None => return u128::MAX,
        };
        binomial_saturating(vars + deg, vars)
    }

    pub fn check(&self, p: u64, n: usize, arity: usize) -> Result<()> {
        let projected = Self::projected_terms(p, n, arity);
        if projected > self.max_terms {
            Err(Error::ResourceLimit { projected, limit: self.max_terms })
        } else {
            Ok(())
        }
    }
}

fn binomial_saturating(n: u128, k: u128) -> u128 {
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        // acc * (n - i) / (i + 1) stays integral at every step
        acc = match acc.checked_mul(n - i) {
            Some(v) => v / (i + 1),
            None => return u128::MAX,
        };
    }
    acc
}

fn rat(v: BigInt) -> BigRational {
    BigRational::from_integer(v)
}

fn p_pow(p: u64, k: usize) -> BigInt {
    num_traits::pow(BigInt::from(p), k)
}

/// `W_n = Σ_{i<=n} p^i X_i^{p^{n-i}}`, in the single-summand variables
/// `X_{0,0..n}`.
pub fn ghost_polynomial(p: u64, n: usize) -> SymPoly {
    ghost_of(p, n, |j| SymPoly::var(1, n + 1, 0, j))
}

/// `Σ_{j<=k} p^j x_j^{p^{k-j}}` for arbitrary polynomials `x_j`.
fn ghost_of(p: u64, k: usize, x: impl Fn(usize) -> SymPoly) -> SymPoly {
    let mut acc: Option<SymPoly> = None;
    for j in 0..=k {
        let term = x(j).pow(p.pow((k - j) as u32)).scale(&rat(p_pow(p, j)));
        acc = Some(match acc {
            Some(a) => a.add(&term),
            None => term,
        });
    }
    acc.expect("k >= 0 gives at least one term")
}

/// The sum polynomials `z_0..z_n` of `arity` Witt vectors, together with the
/// correction polynomials when `arity == p`.
#[derive(Clone, Debug)]
pub struct WittFamily {
    p: u64,
    arity: usize,
    levels: usize,
    z: Vec<SymPoly>,
}

impl WittFamily {
    pub fn new(p: u64, max_level: usize, arity: usize, limits: &ResourceLimits) -> Result<Self> {
        if !crate::zp::is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        assert!(arity >= 1, "arity must be positive");
        limits.check(p, max_level, arity)?;
        let levels = max_level + 1;
        let mut z: Vec<SymPoly> = Vec::with_capacity(levels);
        for k in 0..levels {
            let mut rhs = SymPoly::zero(arity, levels);
            for i in 0..arity {
                rhs = rhs.add(&ghost_of(p, k, |j| SymPoly::var(arity, levels, i, j)));
            }
            for (j, zj) in z.iter().enumerate() {
                rhs = rhs.sub(&zj.pow(p.pow((k - j) as u32)).scale(&rat(p_pow(p, j))));
            }
            let zk = rhs.scale(&BigRational::new(BigInt::one(), p_pow(p, k)));
            if !zk.is_integral() {
                return Err(Error::NotIntegral(format!("z_{k} for p = {p}, arity {arity}")));
            }
            z.push(zk);
        }
        Ok(WittFamily { p, arity, levels, z })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn max_level(&self) -> usize {
        self.levels - 1
    }

    pub fn sum(&self, n: usize) -> &SymPoly {
        &self.z[n]
    }

    pub fn sums(&self) -> &[SymPoly] {
        &self.z
    }

    fn var(&self, i: usize, j: usize) -> SymPoly {
        SymPoly::var(self.arity, self.levels, i, j)
    }

    /// `(1/p^e) (Σ_i X_{i,j}^{p^e} - z_j^{p^e})`.
    fn defect(&self, j: usize, e: usize) -> SymPoly {
        let pe = self.p.pow(e as u32);
        let mut s = SymPoly::zero(self.arity, self.levels);
        for i in 0..self.arity {
            s = s.add(&self.var(i, j).pow(pe));
        }
        s.sub(&self.z[j].pow(pe)).scale(&BigRational::new(BigInt::one(), p_pow(self.p, e)))
    }

    fn require_p_ary(&self) {
        assert_eq!(self.arity as u64, self.p, "f and g are defined for p summands only");
    }

    /// `f_n` from its defining sum of divided defects.
    pub fn f(&self, n: usize) -> SymPoly {
        self.require_p_ary();
        let mut acc = SymPoly::zero(self.arity, self.levels);
        for j in 0..n {
            acc = acc.add(&self.defect(j, n - j));
        }
        acc
    }

    /// `g_{n-2}`, for `n >= 1`.
    pub fn g(&self, n: usize) -> SymPoly {
        self.require_p_ary();
        assert!(n >= 1, "g_{{n-2}} needs n >= 1");
        let mut acc = SymPoly::zero(self.arity, self.levels);
        for j in 0..n - 1 {
            acc = acc.add(&self.defect(j, n - j));
        }
        let inv_p = BigRational::new(BigInt::one(), BigInt::from(self.p));
        acc.add(&self.f(n - 1).neg().pow(self.p).scale(&inv_p))
    }

    /// `Σ_i W_k(X_i) - W_k(z)`; zero when the `z` are correct.
    pub fn ghost_residual(&self, k: usize) -> SymPoly {
        let mut lhs = SymPoly::zero(self.arity, self.levels);
        for i in 0..self.arity {
            lhs = lhs.add(&ghost_of(self.p, k, |j| self.var(i, j)));
        }
        lhs.sub(&ghost_of(self.p, k, |j| self.z[j].clone()))
    }

    /// `f_n + Σ_i X_{i,n} - z_n`.
    pub fn sum_identity_residual(&self, n: usize) -> SymPoly {
        let mut acc = self.f(n);
        for i in 0..self.arity {
            acc = acc.add(&self.var(i, n));
        }
        acc.sub(&self.z[n])
    }

    /// `f_n - g_{n-2} - (1/p)(Σ_i X_{i,n-1}^p - z_{n-1}^p - (-f_{n-1})^p)`, `n >= 1`.
    pub fn split_identity_residual(&self, n: usize) -> SymPoly {
        let inv_p = BigRational::new(BigInt::one(), BigInt::from(self.p));
        let mut bracket = SymPoly::zero(self.arity, self.levels);
        for i in 0..self.arity {
            bracket = bracket.add(&self.var(i, n - 1).pow(self.p));
        }
        bracket = bracket.sub(&self.z[n - 1].pow(self.p)).sub(&self.f(n - 1).neg().pow(self.p));
        self.f(n).sub(&self.g(n)).sub(&bracket.scale(&inv_p))
    }
}

/// `z_0..z_n` for `arity` summands.
pub fn sum_polynomials(p: u64, n: usize, arity: usize, limits: &ResourceLimits) -> Result<Vec<SymPoly>> {
    if arity < 2 {
        return Err(Error::InvalidSpec("sum polynomials need at least two summands".into()));
    }
    Ok(WittFamily::new(p, n, arity, limits)?.z)
}

/// `f_n` for `p` summands, in the variables `X_{i,0..n}`.
pub fn f_polynomial(p: u64, n: usize, limits: &ResourceLimits) -> Result<SymPoly> {
    Ok(WittFamily::new(p, n, p as usize, limits)?.f(n))
}

/// `g_{n-2}` for `p` summands, in the variables `X_{i,0..n}`.
pub fn g_polynomial(p: u64, n: usize, limits: &ResourceLimits) -> Result<SymPoly> {
    if n == 0 {
        return Err(Error::InvalidSpec("g_{n-2} is defined for n >= 1".into()));
    }
    Ok(WittFamily::new(p, n, p as usize, limits)?.g(n))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StructureReport {
    pub is_integral: bool,
    pub has_no_constant_term: bool,
    pub min_total_degree: Option<u64>,
    pub required_min_degree: u64,
    pub passes: bool,
}

/// Integrality, absence of a constant term, and a lower bound on the degree
/// of every monomial. The zero polynomial meets any degree bound.
pub fn structure_check(poly: &SymPoly, required_min_degree: u64) -> StructureReport {
    let is_integral = poly.is_integral();
    let has_no_constant_term = !poly.has_constant_term();
    let min_total_degree = poly.min_total_degree();
    let degree_ok = min_total_degree.is_none_or(|d| d >= required_min_degree);
    StructureReport {
        is_integral,
        has_no_constant_term,
        min_total_degree,
        required_min_degree,
        passes: is_integral && has_no_constant_term && degree_ok,
    }
}

/// Convenience for tests and golden files: the monomial with the given
/// `(i, j, exponent)` factors.
pub fn monomial(arity: usize, levels: usize, factors: &[(usize, usize, u32)]) -> Monomial {
    let mut e = vec![0u32; arity * levels];
    for (i, j, k) in factors {
        e[j * arity + i] += k;
    }
    Monomial::from_exponents(e)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lim() -> ResourceLimits {
        ResourceLimits::default()
    }

    fn int(v: i64) -> BigRational {
        BigRational::from_integer(v.into())
    }

    #[test]
    fn ghost_polynomials_match_their_definition() {
        assert_eq!(ghost_polynomial(5, 0), SymPoly::var(1, 1, 0, 0));
        let w1 = ghost_polynomial(3, 1);
        let x0 = SymPoly::var(1, 2, 0, 0);
        let x1 = SymPoly::var(1, 2, 0, 1);
        assert_eq!(w1, x0.pow(3).add(&x1.scale_int(3)));
        let w2 = ghost_polynomial(2, 2);
        assert_eq!(w2.len(), 3);
        assert_eq!(w2.coefficient(&monomial(1, 3, &[(0, 0, 4)])), int(1));
        assert_eq!(w2.coefficient(&monomial(1, 3, &[(0, 1, 2)])), int(2));
        assert_eq!(w2.coefficient(&monomial(1, 3, &[(0, 2, 1)])), int(4));
    }

    #[test]
    fn level_zero_sum_is_plain_sum() {
        for (p, arity) in [(2, 2), (3, 3), (5, 2)] {
            let z = sum_polynomials(p, 0, arity, &lim()).unwrap();
            let mut expect = SymPoly::zero(arity, 1);
            for i in 0..arity {
                expect = expect.add(&SymPoly::var(arity, 1, i, 0));
            }
            assert_eq!(z[0], expect);
        }
    }

    #[test]
    fn binary_level_one_sums() {
        // frozen from solving the level-1 ghost equation by hand
        let z = sum_polynomials(2, 1, 2, &lim()).unwrap();
        let x = |i, j| SymPoly::var(2, 2, i, j);
        assert_eq!(z[1], x(0, 1).add(&x(1, 1)).sub(&x(0, 0).mul(&x(1, 0))));

        let z = sum_polynomials(3, 1, 2, &lim()).unwrap();
        let expect = x(0, 1).add(&x(1, 1)).sub(&x(0, 0).pow(2).mul(&x(1, 0))).sub(&x(0, 0).mul(&x(1, 0).pow(2)));
        assert_eq!(z[1], expect);
    }

    #[test]
    fn adding_zero_summands() {
        for (p, n) in [(2u64, 3usize), (3, 2)] {
            let fam = WittFamily::new(p, n, p as usize, &lim()).unwrap();
            for k in 0..=n {
                let only_first = fam.sum(k).set_zero(|i, _| i != 0);
                assert_eq!(only_first, SymPoly::var(p as usize, n + 1, 0, k));
            }
        }
    }

    #[test]
    fn f_examples() {
        assert!(f_polynomial(2, 0, &lim()).unwrap().is_zero());
        assert!(f_polynomial(3, 0, &lim()).unwrap().is_zero());

        let f1 = f_polynomial(2, 1, &lim()).unwrap();
        let x = |i, j| SymPoly::var(2, 2, i, j);
        assert_eq!(f1, x(0, 0).mul(&x(1, 0)).neg());

        // (1/3)(Σ X^3 - (Σ X)^3) = -(X0^2 X1 + ... ) - 2 X0 X1 X2
        let f1 = f_polynomial(3, 1, &lim()).unwrap();
        let y = |i| SymPoly::var(3, 2, i, 0);
        let mut expect = SymPoly::zero(3, 2);
        for a in 0..3 {
            for b in 0..3 {
                if a != b {
                    expect = expect.sub(&y(a).pow(2).mul(&y(b)));
                }
            }
        }
        expect = expect.sub(&y(0).mul(&y(1)).mul(&y(2)).scale_int(2));
        assert_eq!(f1, expect);
        assert_eq!(f1.len(), 7);
    }

    #[test]
    fn g_examples() {
        assert!(g_polynomial(2, 1, &lim()).unwrap().is_zero());
        assert!(g_polynomial(3, 1, &lim()).unwrap().is_zero());

        let g0 = g_polynomial(2, 2, &lim()).unwrap();
        let x = |i| SymPoly::var(2, 3, i, 0);
        let expect = x(0).pow(3).mul(&x(1)).add(&x(0).pow(2).mul(&x(1).pow(2))).add(&x(0).mul(&x(1).pow(3))).neg();
        assert_eq!(g0, expect);
        assert_eq!(g0.min_total_degree(), Some(4));
        assert!(g_polynomial(2, 0, &lim()).is_err());
    }

    #[test]
    fn structure_check_examples() {
        let g0 = g_polynomial(2, 2, &lim()).unwrap();
        assert!(structure_check(&g0, 4).passes);
        let f1 = f_polynomial(2, 1, &lim()).unwrap();
        assert!(structure_check(&f1, 2).passes);
        let bad = SymPoly::var(1, 1, 0, 0).add(&SymPoly::constant(1, 1, int(1)));
        let r = structure_check(&bad, 1);
        assert!(!r.passes);
        assert!(!r.has_no_constant_term);
        assert!(r.is_integral);
    }

    #[test]
    fn identities_hold_in_the_feasible_envelope() {
        for (p, top) in [(2u64, 3usize), (3, 2)] {
            let fam = WittFamily::new(p, top, p as usize, &lim()).unwrap();
            for n in 0..=top {
                assert!(fam.ghost_residual(n).is_zero(), "ghost p={p} n={n}");
                assert!(fam.sum_identity_residual(n).is_zero(), "eq1 p={p} n={n}");
                assert!(fam.sum(n).is_integral() && !fam.sum(n).has_constant_term());
                if n >= 1 {
                    assert!(fam.split_identity_residual(n).is_zero(), "eq3 p={p} n={n}");
                    assert!(structure_check(&fam.f(n), p).passes);
                }
                if n >= 2 {
                    assert!(structure_check(&fam.g(n), p * p).passes);
                }
            }
        }
    }

    #[test]
    fn resource_guard() {
        assert!(ResourceLimits::default().check(3, 2, 3).is_ok());
        assert!(ResourceLimits::default().check(2, 3, 2).is_ok());
        let err = WittFamily::new(3, 3, 3, &lim()).unwrap_err();
        assert!(matches!(err, Error::ResourceLimit { .. }));
        let tight = ResourceLimits { max_terms: 10 };
        assert!(sum_polynomials(2, 1, 2, &tight).is_err());
    }
}
