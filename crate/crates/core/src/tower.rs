//! Two-level Eisenstein towers `Z_p ⊂ O_K ⊂ O_L` truncated at `p^N`.
//!
//! `O_K = Z_p[y]/(E_K)` with `π_K = y`, and `O_L = O_K[x]/(E_L)` with
//! `π_L = x`. Elements of `O_L` are stored flat: coordinate
//! `i * e_K + j` is the coefficient of `π_L^i π_K^j`. All elements are kept
//! in canonical (fully reduced) form after every operation.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use rand::Rng;

use crate::error::{Error, Result};
use crate::zp::{PrecisionInt, Residues};

/// An `L`-adic (or `K`-adic) valuation at finite precision.
///
/// `AtLeast(h)` is what a value that vanishes at precision reports; `h` is the
/// precision horizon.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Valuation {
    Exact(u64),
    AtLeast(u64),
}

impl Valuation {
    pub fn exact(&self) -> Option<u64> {
        match self {
            Valuation::Exact(v) => Some(*v),
            Valuation::AtLeast(_) => None,
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Valuation::Exact(_))
    }

    /// Lower bound carried by either variant.
    pub fn lower_bound(&self) -> u64 {
        match self {
            Valuation::Exact(v) | Valuation::AtLeast(v) => *v,
        }
    }

    /// Whether the valuation is known to be `>= bound`; `None` if the
    /// precision horizon is too low to decide.
    pub fn at_least(&self, bound: u64) -> Option<bool> {
        match self {
            Valuation::Exact(v) => Some(*v >= bound),
            Valuation::AtLeast(h) if *h >= bound => Some(true),
            Valuation::AtLeast(_) => None,
        }
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Valuation::Exact(v) => write!(f, "{v}"),
            Valuation::AtLeast(v) => write!(f, ">={v}"),
        }
    }
}

/// Monic Eisenstein polynomial `X^d + c_{d-1} X^{d-1} + ... + c_0`, storing
/// the non-leading coefficients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EisensteinPoly<C> {
    coefficients: Vec<C>,
}

impl<C> EisensteinPoly<C> {
    pub fn degree(&self) -> usize {
        self.coefficients.len()
    }

    pub fn coefficients(&self) -> &[C] {
        &self.coefficients
    }
}

impl EisensteinPoly<PrecisionInt> {
    pub fn new(coefficients: Vec<PrecisionInt>) -> Result<Self> {
        let which = "E_K";
        if coefficients.is_empty() {
            return Err(Error::NotEisenstein { which, reason: "degree must be positive".into() });
        }
        for (i, c) in coefficients.iter().enumerate() {
            if c.valuation().is_some_and(|v| v == 0) {
                return Err(Error::NotEisenstein { which, reason: format!("coefficient {i} is a unit") });
            }
        }
        if coefficients[0].valuation() != Some(1) {
            return Err(Error::NotEisenstein {
                which,
                reason: "constant term does not have valuation exactly 1".into(),
            });
        }
        Ok(EisensteinPoly { coefficients })
    }
}

impl EisensteinPoly<OKElement> {
    pub fn new(coefficients: Vec<OKElement>) -> Result<Self> {
        let which = "E_L";
        if coefficients.is_empty() {
            return Err(Error::NotEisenstein { which, reason: "degree must be positive".into() });
        }
        for (i, c) in coefficients.iter().enumerate() {
            if c.valuation() == Valuation::Exact(0) {
                return Err(Error::NotEisenstein { which, reason: format!("coefficient {i} is a unit in O_K") });
            }
        }
        if coefficients[0].valuation() != Valuation::Exact(1) {
            return Err(Error::NotEisenstein {
                which,
                reason: "constant term does not have K-valuation exactly 1".into(),
            });
        }
        Ok(EisensteinPoly { coefficients })
    }
}

/// `O_K = (Z/p^N)[y]/(E_K)`.
#[derive(Debug, PartialEq, Eq)]
pub struct BaseRing {
    zp: Residues,
    modulus: EisensteinPoly<PrecisionInt>,
    ek: Vec<u64>,
}

impl BaseRing {
    pub fn new(modulus: EisensteinPoly<PrecisionInt>) -> Arc<Self> {
        let zp = modulus.coefficients[0].ring();
        let ek = modulus.coefficients.iter().map(|c| c.value()).collect();
        Arc::new(BaseRing { zp, modulus, ek })
    }

    pub fn residues(&self) -> Residues {
        self.zp
    }

    pub fn ramification_index(&self) -> usize {
        self.ek.len()
    }

    pub fn modulus(&self) -> &EisensteinPoly<PrecisionInt> {
        &self.modulus
    }

    /// Horizon of `v_K` at this precision.
    pub fn horizon(&self) -> u64 {
        self.zp.precision() as u64 * self.ek.len() as u64
    }

    /// Reduces a raw coefficient list modulo `E_K`.
    pub fn reduce(self: &Arc<Self>, raw: &[PrecisionInt]) -> OKElement {
        let mut v: Vec<u64> = raw.iter().map(|c| c.value()).collect();
        self.reduce_in_place(&mut v);
        OKElement { base: self.clone(), coeffs: v }
    }

    pub(crate) fn reduce_in_place(&self, raw: &mut Vec<u64>) {
        let e = self.ek.len();
        let zp = &self.zp;
        for k in (e..raw.len()).rev() {
            let c = raw[k];
            if c == 0 {
                continue;
            }
            for (i, ci) in self.ek.iter().enumerate() {
                raw[k - e + i] = zp.sub(raw[k - e + i], zp.mul(c, *ci));
            }
        }
        raw.resize(e, 0);
    }

    pub(crate) fn mul_raw(&self, a: &[u64], b: &[u64]) -> Vec<u64> {
        let e = self.ek.len();
        let zp = &self.zp;
        let mut raw = vec![0u64; 2 * e - 1];
        for (i, ai) in a.iter().enumerate() {
            if *ai == 0 {
                continue;
            }
            for (j, bj) in b.iter().enumerate() {
                raw[i + j] = zp.add(raw[i + j], zp.mul(*ai, *bj));
            }
        }
        self.reduce_in_place(&mut raw);
        raw
    }

    fn valuation_raw(&self, a: &[u64]) -> Valuation {
        let e = self.ek.len() as u64;
        a.iter()
            .enumerate()
            .filter_map(|(j, c)| self.zp.valuation(*c).map(|v| v as u64 * e + j as u64))
            .min()
            .map(Valuation::Exact)
            .unwrap_or(Valuation::AtLeast(self.horizon()))
    }

    pub fn element(self: &Arc<Self>, coeffs: Vec<u64>) -> OKElement {
        let mut coeffs: Vec<u64> = coeffs.into_iter().map(|c| c % self.zp.modulus()).collect();
        self.reduce_in_place(&mut coeffs);
        OKElement { base: self.clone(), coeffs }
    }

    pub fn from_int(self: &Arc<Self>, v: i64) -> OKElement {
        let mut coeffs = vec![0; self.ek.len()];
        coeffs[0] = self.zp.from_i64(v);
        OKElement { base: self.clone(), coeffs }
    }

    /// `π_K`.
    pub fn uniformizer(self: &Arc<Self>) -> OKElement {
        let mut raw = vec![0, 1];
        self.reduce_in_place(&mut raw);
        OKElement { base: self.clone(), coeffs: raw }
    }
}

/// An element of `O_K` at precision, coordinates in `1, π_K, ..., π_K^{e_K-1}`.
#[derive(Clone, Debug)]
pub struct OKElement {
    base: Arc<BaseRing>,
    coeffs: Vec<u64>,
}

impl PartialEq for OKElement {
    fn eq(&self, other: &Self) -> bool {
        self.coeffs == other.coeffs && *self.base == *other.base
    }
}
impl Eq for OKElement {}

impl OKElement {
    pub fn base(&self) -> &Arc<BaseRing> {
        &self.base
    }

    pub fn coefficients(&self) -> &[u64] {
        &self.coeffs
    }

    pub fn coefficient(&self, j: usize) -> PrecisionInt {
        self.base.zp.element(self.coeffs[j])
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| *c == 0)
    }

    /// `v_K`, with `v_K(π_K) = 1`.
    pub fn valuation(&self) -> Valuation {
        self.base.valuation_raw(&self.coeffs)
    }
}

impl Add for &OKElement {
    type Output = OKElement;
    fn add(self, rhs: &OKElement) -> OKElement {
        let zp = &self.base.zp;
        let coeffs = self.coeffs.iter().zip(&rhs.coeffs).map(|(a, b)| zp.add(*a, *b)).collect();
        OKElement { base: self.base.clone(), coeffs }
    }
}

impl Sub for &OKElement {
    type Output = OKElement;
    fn sub(self, rhs: &OKElement) -> OKElement {
        let zp = &self.base.zp;
        let coeffs = self.coeffs.iter().zip(&rhs.coeffs).map(|(a, b)| zp.sub(*a, *b)).collect();
        OKElement { base: self.base.clone(), coeffs }
    }
}

impl Mul for &OKElement {
    type Output = OKElement;
    fn mul(self, rhs: &OKElement) -> OKElement {
        OKElement { base: self.base.clone(), coeffs: self.base.mul_raw(&self.coeffs, &rhs.coeffs) }
    }
}

impl Neg for &OKElement {
    type Output = OKElement;
    fn neg(self) -> OKElement {
        let zp = &self.base.zp;
        OKElement { base: self.base.clone(), coeffs: self.coeffs.iter().map(|a| zp.neg(*a)).collect() }
    }
}

/// `O_L = O_K[x]/(E_L)`.
#[derive(Debug, PartialEq, Eq)]
pub struct Tower {
    base: Arc<BaseRing>,
    modulus: EisensteinPoly<OKElement>,
    degree: usize,
}

impl Tower {
    pub fn new(modulus: EisensteinPoly<OKElement>) -> Arc<Self> {
        let base = modulus.coefficients[0].base.clone();
        let degree = modulus.degree();
        Arc::new(Tower { base, modulus, degree })
    }

    pub fn base(&self) -> &Arc<BaseRing> {
        &self.base
    }

    pub fn residues(&self) -> Residues {
        self.base.zp
    }

    pub fn modulus(&self) -> &EisensteinPoly<OKElement> {
        &self.modulus
    }

    /// `[L : K]`.
    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn e_k(&self) -> usize {
        self.base.ramification_index()
    }

    pub fn e_l(&self) -> usize {
        self.degree * self.e_k()
    }

    /// Rank of `O_L` over `Z/p^N`.
    pub fn dimension(&self) -> usize {
        self.e_l()
    }

    /// Precision horizon of `v_L`: `N * e_L`.
    pub fn horizon(&self) -> u64 {
        self.residues().precision() as u64 * self.e_l() as u64
    }

    /// Reduces a raw list of `O_K` coefficients modulo `E_L`.
    pub fn reduce(self: &Arc<Self>, raw: &[OKElement]) -> OLElement {
        let mut flat = Vec::with_capacity(raw.len() * self.e_k());
        for c in raw {
            flat.extend_from_slice(&c.coeffs);
        }
        self.reduce_in_place(&mut flat);
        OLElement { tower: self.clone(), coeffs: flat }
    }

    fn reduce_in_place(&self, raw: &mut Vec<u64>) {
        let e = self.e_k();
        let d = self.degree;
        let zp = &self.base.zp;
        let blocks = raw.len() / e;
        for k in (d..blocks).rev() {
            let blk = &raw[k * e..(k + 1) * e];
            if blk.iter().all(|c| *c == 0) {
                continue;
            }
            let blk = blk.to_vec();
            for (i, ci) in self.modulus.coefficients.iter().enumerate() {
                let prod = self.base.mul_raw(&blk, &ci.coeffs);
                let off = (k - d + i) * e;
                for (s, q) in prod.iter().enumerate() {
                    raw[off + s] = zp.sub(raw[off + s], *q);
                }
            }
        }
        raw.resize(d * e, 0);
    }

    pub(crate) fn mul_raw(&self, a: &[u64], b: &[u64]) -> Vec<u64> {
        let e = self.e_k();
        let d = self.degree;
        let zp = &self.base.zp;
        let mut raw = vec![0u64; (2 * d - 1) * e];
        for i in 0..d {
            let ai = &a[i * e..(i + 1) * e];
            if ai.iter().all(|c| *c == 0) {
                continue;
            }
            for j in 0..d {
                let bj = &b[j * e..(j + 1) * e];
                if bj.iter().all(|c| *c == 0) {
                    continue;
                }
                let prod = self.base.mul_raw(ai, bj);
                let off = (i + j) * e;
                for (s, q) in prod.iter().enumerate() {
                    raw[off + s] = zp.add(raw[off + s], *q);
                }
            }
        }
        self.reduce_in_place(&mut raw);
        raw
    }

    /// Element from flat canonical coordinates (reduced mod `p^N`).
    pub fn element(self: &Arc<Self>, coeffs: Vec<u64>) -> OLElement {
        assert_eq!(coeffs.len(), self.dimension(), "coordinate vector has the wrong length");
        let m = self.residues().modulus();
        OLElement { tower: self.clone(), coeffs: coeffs.into_iter().map(|c| c % m).collect() }
    }

    pub fn from_signed(self: &Arc<Self>, coeffs: &[i64]) -> OLElement {
        let zp = self.residues();
        self.element(coeffs.iter().map(|c| zp.from_i64(*c)).collect())
    }

    pub fn zero(self: &Arc<Self>) -> OLElement {
        OLElement { tower: self.clone(), coeffs: vec![0; self.dimension()] }
    }

    pub fn one(self: &Arc<Self>) -> OLElement {
        self.from_int(1)
    }

    pub fn from_int(self: &Arc<Self>, v: i64) -> OLElement {
        let mut z = self.zero();
        z.coeffs[0] = self.residues().from_i64(v);
        z
    }

    /// Embeds `O_K` into `O_L`.
    pub fn embed(self: &Arc<Self>, a: &OKElement) -> OLElement {
        let mut z = self.zero();
        z.coeffs[..self.e_k()].copy_from_slice(&a.coeffs);
        z
    }

    /// `π_L`.
    pub fn uniformizer(self: &Arc<Self>) -> OLElement {
        let mut raw = vec![0u64; 2 * self.e_k()];
        raw[self.e_k()] = 1;
        self.reduce_in_place(&mut raw);
        OLElement { tower: self.clone(), coeffs: raw }
    }

    /// `π_K` as an element of `O_L`.
    pub fn base_uniformizer(self: &Arc<Self>) -> OLElement {
        self.embed(&self.base.uniformizer())
    }

    /// Uniformly random element of `O_L` at precision.
    pub fn random<R: Rng + ?Sized>(self: &Arc<Self>, rng: &mut R) -> OLElement {
        let m = self.residues().modulus();
        OLElement { tower: self.clone(), coeffs: (0..self.dimension()).map(|_| rng.gen_range(0..m)).collect() }
    }

    /// Element of `O_L` whose flat coordinate `index` is 1.
    pub fn basis_element(self: &Arc<Self>, index: usize) -> OLElement {
        let mut z = self.zero();
        z.coeffs[index] = 1;
        z
    }
}

/// An element of `O_L` at precision.
#[derive(Clone, Debug)]
pub struct OLElement {
    tower: Arc<Tower>,
    coeffs: Vec<u64>,
}

impl PartialEq for OLElement {
    fn eq(&self, other: &Self) -> bool {
        self.coeffs == other.coeffs && (Arc::ptr_eq(&self.tower, &other.tower) || *self.tower == *other.tower)
    }
}
impl Eq for OLElement {}

impl OLElement {
    pub fn tower(&self) -> &Arc<Tower> {
        &self.tower
    }

    /// Flat coordinates: index `i * e_K + j` holds the coefficient of
    /// `π_L^i π_K^j`.
    pub fn coefficients(&self) -> &[u64] {
        &self.coeffs
    }

    /// The `O_K` coefficient of `π_L^i`.
    pub fn block(&self, i: usize) -> OKElement {
        let e = self.tower.e_k();
        OKElement { base: self.tower.base.clone(), coeffs: self.coeffs[i * e..(i + 1) * e].to_vec() }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| *c == 0)
    }

    /// Whether the element lies in `O_K` (all `π_L^i`, `i > 0`, coefficients vanish).
    pub fn in_base(&self) -> bool {
        self.coeffs[self.tower.e_k()..].iter().all(|c| *c == 0)
    }

    /// `v_L`, with `v_L(π_L) = 1`.
    pub fn valuation(&self) -> Valuation {
        let e_k = self.tower.e_k();
        let e_l = self.tower.e_l() as u64;
        let p = self.tower.degree as u64;
        let zp = self.tower.residues();
        self.coeffs
            .iter()
            .enumerate()
            .filter_map(|(idx, c)| {
                let (i, j) = ((idx / e_k) as u64, (idx % e_k) as u64);
                zp.valuation(*c).map(|v| v as u64 * e_l + p * j + i)
            })
            .min()
            .map(Valuation::Exact)
            .unwrap_or(Valuation::AtLeast(self.tower.horizon()))
    }

    pub fn pow(&self, mut exp: u64) -> OLElement {
        let mut acc = self.tower.one();
        let mut base = self.clone();
        while exp > 0 {
            if exp & 1 == 1 {
                acc = &acc * &base;
            }
            exp >>= 1;
            if exp > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    pub fn scale(&self, k: u64) -> OLElement {
        let zp = self.tower.residues();
        OLElement { tower: self.tower.clone(), coeffs: self.coeffs.iter().map(|c| zp.mul(*c, k)).collect() }
    }

    pub fn scale_signed(&self, k: i64) -> OLElement {
        self.scale(self.tower.residues().from_i64(k))
    }

    /// Multiplicative inverse of a unit by Newton iteration `x <- x (2 - u x)`.
    pub fn invert(&self) -> Result<OLElement> {
        if self.valuation() != Valuation::Exact(0) {
            return Err(Error::NotAUnit);
        }
        let zp = self.tower.residues();
        let c0 = zp.inv(self.coeffs[0]).ok_or(Error::NotAUnit)?;
        let one = self.tower.one();
        let two = self.tower.from_int(2);
        let mut x = self.tower.from_int(0);
        x.coeffs[0] = c0;
        // each step doubles the valuation of 1 - u x
        let steps = 2 + (64 - self.tower.horizon().leading_zeros()) as usize;
        for _ in 0..steps {
            if (self * &x) == one {
                return Ok(x);
            }
            x = &x * &(&two - &(self * &x));
        }
        debug_assert_eq!(&(self * &x), &one);
        Ok(x)
    }

    /// Signed coordinates, for reports.
    pub fn signed_coefficients(&self) -> Vec<i64> {
        let zp = self.tower.residues();
        self.coeffs.iter().map(|c| zp.signed(*c)).collect()
    }

    /// Same element with coordinates reduced to a lower-precision tower.
    pub fn reduce_to(&self, target: &Arc<Tower>) -> OLElement {
        target.element(self.coeffs.clone())
    }
}

impl Add for &OLElement {
    type Output = OLElement;
    fn add(self, rhs: &OLElement) -> OLElement {
        let zp = self.tower.residues();
        let coeffs = self.coeffs.iter().zip(&rhs.coeffs).map(|(a, b)| zp.add(*a, *b)).collect();
        OLElement { tower: self.tower.clone(), coeffs }
    }
}

impl Sub for &OLElement {
    type Output = OLElement;
    fn sub(self, rhs: &OLElement) -> OLElement {
        let zp = self.tower.residues();
        let coeffs = self.coeffs.iter().zip(&rhs.coeffs).map(|(a, b)| zp.sub(*a, *b)).collect();
        OLElement { tower: self.tower.clone(), coeffs }
    }
}

impl Mul for &OLElement {
    type Output = OLElement;
    fn mul(self, rhs: &OLElement) -> OLElement {
        OLElement { tower: self.tower.clone(), coeffs: self.tower.mul_raw(&self.coeffs, &rhs.coeffs) }
    }
}

impl Neg for &OLElement {
    type Output = OLElement;
    fn neg(self) -> OLElement {
        let zp = self.tower.residues();
        OLElement { tower: self.tower.clone(), coeffs: self.coeffs.iter().map(|a| zp.neg(*a)).collect() }
    }
}

impl fmt::Display for OLElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let e_k = self.tower.e_k();
        let mut parts = Vec::new();
        for (idx, c) in self.signed_coefficients().into_iter().enumerate() {
            if c == 0 {
                continue;
            }
            let (i, j) = (idx / e_k, idx % e_k);
            let mut mono = Vec::new();
            if j > 0 {
                mono.push(if j == 1 { "pi_K".to_string() } else { format!("pi_K^{j}") });
            }
            if i > 0 {
                mono.push(if i == 1 { "pi_L".to_string() } else { format!("pi_L^{i}") });
            }
            let term = match (c, mono.is_empty()) {
                (_, true) => c.to_string(),
                (1, false) => mono.join("*"),
                (-1, false) => format!("-{}", mono.join("*")),
                _ => format!("{c}*{}", mono.join("*")),
            };
            parts.push(term);
        }
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" + ").replace("+ -", "- "))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn qp(p: u64, n: u32) -> Residues {
        Residues::new(p, n).unwrap()
    }

    /// `Q_2 ⊂ Q_2(π)` with `E_L = x^2 + c1 x + c0`.
    fn quadratic(c0: i64, c1: i64, n: u32) -> Arc<Tower> {
        let zp = qp(2, n);
        let ek = EisensteinPoly::<PrecisionInt>::new(vec![zp.element(zp.from_i64(-2))]).unwrap();
        let base = BaseRing::new(ek);
        let el = EisensteinPoly::<OKElement>::new(vec![base.from_int(c0), base.from_int(c1)]).unwrap();
        Tower::new(el)
    }

    /// `Q_3(ζ_3) ⊂ Q_3(ζ_9)` with `π_K = ζ_3 - 1`, `π_L = ζ_9 - 1`.
    fn cyclotomic3(n: u32) -> Arc<Tower> {
        let zp = qp(3, n);
        let ek = EisensteinPoly::<PrecisionInt>::new(vec![zp.element(3), zp.element(3)]).unwrap();
        let base = BaseRing::new(ek);
        let pk = base.uniformizer();
        let el = EisensteinPoly::<OKElement>::new(vec![-&pk, base.from_int(3), base.from_int(3)]).unwrap();
        Tower::new(el)
    }

    #[test]
    fn reduce_defining_relations() {
        let sqrt2 = quadratic(-2, 0, 16);
        let base = sqrt2.base().clone();
        let x2 = sqrt2.reduce(&[base.from_int(0), base.from_int(0), base.from_int(1)]);
        assert_eq!(x2, sqrt2.from_int(2));

        let gauss = quadratic(2, -2, 16);
        let base = gauss.base().clone();
        let x2 = gauss.reduce(&[base.from_int(0), base.from_int(0), base.from_int(1)]);
        assert_eq!(x2, gauss.from_signed(&[-2, 2]));

        let five = gauss.reduce(&[base.from_int(5)]);
        assert_eq!(five, gauss.from_int(5));
    }

    #[test]
    fn base_reduce_is_identity_below_degree() {
        let t = cyclotomic3(10);
        let zp = t.residues();
        let a = t.base().reduce(&[zp.element(4), zp.element(7)]);
        assert_eq!(a.coefficients(), &[4, 7]);
        // y^2 = -3y - 3
        let y2 = t.base().reduce(&[zp.element(0), zp.element(0), zp.element(1)]);
        assert_eq!(y2.coefficients(), &[zp.from_i64(-3), zp.from_i64(-3)]);
    }

    #[test]
    fn valuations_of_small_elements() {
        let sqrt2 = quadratic(-2, 0, 8);
        assert_eq!(sqrt2.uniformizer().valuation(), Valuation::Exact(1));
        assert_eq!(sqrt2.from_int(2).valuation(), Valuation::Exact(2));
        assert_eq!(sqrt2.zero().valuation(), Valuation::AtLeast(16));
    }

    #[test]
    fn cyclotomic_base_uniformizer_has_valuation_p() {
        let t = cyclotomic3(16);
        // (π_L + 1)^3 - 1 = ζ_9^3 - 1 = ζ_3 - 1 = π_K
        let z = &t.uniformizer() + &t.one();
        let pk = &z.pow(3) - &t.one();
        assert_eq!(pk, t.base_uniformizer());
        assert_eq!(pk.valuation(), Valuation::Exact(3));
    }

    #[test]
    fn invert_units() {
        let sqrt2 = quadratic(-2, 0, 20);
        assert_eq!(sqrt2.one().invert().unwrap(), sqrt2.one());
        assert_eq!(sqrt2.from_int(-1).invert().unwrap(), sqrt2.from_int(-1));

        // geometric series: (1 + π)^{-1} = Σ (-π)^k, truncated where π^k vanishes
        let u = &sqrt2.one() + &sqrt2.uniformizer();
        let mut series = sqrt2.zero();
        let mut term = sqrt2.one();
        let minus_pi = -&sqrt2.uniformizer();
        for _ in 0..=sqrt2.horizon() {
            series = &series + &term;
            term = &term * &minus_pi;
        }
        assert!(term.is_zero());
        let inv = u.invert().unwrap();
        assert_eq!(inv, series);
        assert_eq!(&u * &inv, sqrt2.one());

        assert_eq!(sqrt2.uniformizer().invert(), Err(Error::NotAUnit));
        assert_eq!(sqrt2.zero().invert(), Err(Error::NotAUnit));
    }

    #[test]
    fn rejects_non_eisenstein() {
        let zp = qp(2, 8);
        assert!(EisensteinPoly::<PrecisionInt>::new(vec![zp.element(4)]).is_err());
        assert!(EisensteinPoly::<PrecisionInt>::new(vec![zp.element(3)]).is_err());
        let base = BaseRing::new(EisensteinPoly::<PrecisionInt>::new(vec![zp.element(254)]).unwrap());
        let err = EisensteinPoly::<OKElement>::new(vec![base.from_int(-3), base.from_int(0)]);
        assert!(matches!(err, Err(Error::NotEisenstein { which: "E_L", .. })));
    }

    #[test]
    fn display_is_signed() {
        let sqrt2 = quadratic(-2, 0, 8);
        assert_eq!(sqrt2.from_signed(&[-1, 1]).to_string(), "-1 + pi_L");
        assert_eq!(sqrt2.zero().to_string(), "0");
    }

    fn arb_cyclotomic() -> impl Strategy<Value = OLElement> {
        proptest::collection::vec(any::<u64>(), 6).prop_map(|c| cyclotomic3(20).element(c))
    }

    proptest! {
        #[test]
        fn ring_axioms(a in arb_cyclotomic(), b in arb_cyclotomic(), c in arb_cyclotomic()) {
            prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
            prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
            prop_assert_eq!(&a * &b, &b * &a);
            prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
        }

        #[test]
        fn valuation_is_additive_and_ultrametric(a in arb_cyclotomic(), b in arb_cyclotomic(), s in 0u64..12, r in 0u64..12) {
            let pi = a.tower().uniformizer();
            let a = &a * &pi.pow(s);
            let b = &b * &pi.pow(r);
            let h = a.tower().horizon();
            if let (Valuation::Exact(va), Valuation::Exact(vb)) = (a.valuation(), b.valuation()) {
                if va + vb < h {
                    prop_assert_eq!((&a * &b).valuation(), Valuation::Exact(va + vb));
                }
                let sum = (&a + &b).valuation();
                prop_assert!(sum.lower_bound() >= va.min(vb));
                if va != vb {
                    prop_assert_eq!(sum, Valuation::Exact(va.min(vb)));
                }
            }
        }

        #[test]
        fn base_elements_have_valuation_divisible_by_p(c in proptest::collection::vec(any::<u64>(), 2), s in 0u32..6) {
            let t = cyclotomic3(20);
            let k = t.base().element(c);
            let x = &t.embed(&k) * &t.from_int(3i64.pow(s));
            if let Valuation::Exact(v) = x.valuation() {
                prop_assert_eq!(v % 3, 0);
            }
        }
    }
}
