//! Linear algebra over the chain ring `Z/p^N`.
//!
//! Submodules of `(Z/p^N)^D` are represented by their Howell form, which is
//! canonical: two generating sets span the same submodule iff their Howell
//! forms coincide. Kernels, solutions and quotient invariants are all read
//! off Howell forms of augmented matrices.

use rand::Rng;

use crate::error::{Error, Result};
use crate::zp::Residues;

/// A `Z/p^N`-linear map `(Z/p^N)^cols -> (Z/p^N)^rows`; column `c` is the
/// image of the `c`-th basis vector.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearMap {
    zp: Residues,
    rows: usize,
    cols: usize,
    data: Vec<u64>,
}

impl LinearMap {
    pub fn from_columns(zp: Residues, rows: usize, columns: &[Vec<u64>]) -> Self {
        let cols = columns.len();
        let mut data = vec![0; rows * cols];
        for (c, col) in columns.iter().enumerate() {
            assert_eq!(col.len(), rows);
            for (r, v) in col.iter().enumerate() {
                data[r * cols + c] = v % zp.modulus();
            }
        }
        LinearMap { zp, rows, cols, data }
    }

    pub fn identity(zp: Residues, n: usize) -> Self {
        let mut data = vec![0; n * n];
        for i in 0..n {
            data[i * n + i] = 1 % zp.modulus();
        }
        LinearMap { zp, rows: n, cols: n, data }
    }

    pub fn residues(&self) -> Residues {
        self.zp
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn entry(&self, r: usize, c: usize) -> u64 {
        self.data[r * self.cols + c]
    }

    pub fn column(&self, c: usize) -> Vec<u64> {
        (0..self.rows).map(|r| self.entry(r, c)).collect()
    }

    pub fn columns(&self) -> Vec<Vec<u64>> {
        (0..self.cols).map(|c| self.column(c)).collect()
    }

    pub fn apply(&self, x: &[u64]) -> Vec<u64> {
        assert_eq!(x.len(), self.cols);
        let zp = &self.zp;
        (0..self.rows)
            .map(|r| {
                let row = &self.data[r * self.cols..(r + 1) * self.cols];
                row.iter().zip(x).fold(0, |acc, (a, b)| zp.add(acc, zp.mul(*a, *b)))
            })
            .collect()
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &LinearMap) -> LinearMap {
        assert_eq!(self.cols, other.rows);
        let cols: Vec<Vec<u64>> = (0..other.cols).map(|c| self.apply(&other.column(c))).collect();
        LinearMap::from_columns(self.zp, self.rows, &cols)
    }

    pub fn add(&self, other: &LinearMap) -> LinearMap {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self.data.iter().zip(&other.data).map(|(a, b)| self.zp.add(*a, *b)).collect();
        LinearMap { data, ..*self }
    }

    pub fn sub(&self, other: &LinearMap) -> LinearMap {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self.data.iter().zip(&other.data).map(|(a, b)| self.zp.sub(*a, *b)).collect();
        LinearMap { data, ..*self }
    }
}

fn axpy(zp: &Residues, y: &mut [u64], q: u64, x: &[u64]) {
    // y -= q * x
    if q == 0 {
        return;
    }
    for (a, b) in y.iter_mut().zip(x) {
        *a = zp.sub(*a, zp.mul(q, *b));
    }
}

/// `q` with `a - q p^k` in the balanced range `(-p^k/2, p^k/2]`.
fn balanced_quotient(zp: &Residues, a: u64, k: u32) -> u64 {
    let s = zp.signed(a) as i128;
    let pk = zp.p().pow(k) as i128;
    let mut t = s.rem_euclid(pk);
    if t > pk / 2 {
        t -= pk;
    }
    zp.from_i64(((s - t) / pk) as i64)
}

/// Howell form of a submodule of `(Z/p^N)^width`.
///
/// Rows are in echelon form, each pivot is exactly `p^k`, entries above a
/// pivot lie in the balanced range `(-p^k/2, p^k/2]`, and the span is closed under the saturation
/// `p^{N-k} * row` (the Howell property), which makes membership decidable by
/// plain reduction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HowellBasis {
    zp: Residues,
    width: usize,
    rows: Vec<Vec<u64>>,
    pivots: Vec<(usize, u32)>,
}

impl HowellBasis {
    pub fn new(zp: Residues, width: usize, rows: Vec<Vec<u64>>) -> Self {
        let m = zp.modulus();
        let mut pool: Vec<Vec<u64>> = rows
            .into_iter()
            .map(|r| {
                assert_eq!(r.len(), width, "row width");
                r.into_iter().map(|v| v % m).collect::<Vec<u64>>()
            })
            .filter(|r| r.iter().any(|v| *v != 0))
            .collect();
        let mut out: Vec<Vec<u64>> = Vec::new();
        let mut pivots = Vec::new();

        for c in 0..width {
            let best = pool.iter().enumerate().filter_map(|(idx, r)| zp.valuation(r[c]).map(|v| (v, idx))).min();
            let Some((k, idx)) = best else { continue };
            let mut row = pool.swap_remove(idx);
            // signed unit part, so that small rows stay small
            let unit = zp.div_p_power_signed(row[c], k);
            let inv = zp.inv(unit).expect("quotient by the p-part is a unit");
            for v in row.iter_mut() {
                *v = zp.mul(*v, inv);
            }
            for other in pool.iter_mut() {
                if other[c] != 0 {
                    let q = zp.div_p_power_floor(other[c], k);
                    axpy(&zp, other, q, &row);
                }
            }
            if k > 0 {
                let sat: Vec<u64> = row.iter().map(|v| zp.mul(*v, zp.p_power(zp.precision() - k))).collect();
                pool.push(sat);
            }
            pool.retain(|r| r.iter().any(|v| *v != 0));
            out.push(row);
            pivots.push((c, k));
        }

        for (i, &(c, k)) in pivots.iter().enumerate() {
            let (above, rest) = out.split_at_mut(i);
            let pivot_row = &rest[0];
            for r in above.iter_mut() {
                let q = balanced_quotient(&zp, r[c], k);
                axpy(&zp, r, q, pivot_row);
            }
        }

        HowellBasis { zp, width, rows: out, pivots }
    }

    pub fn empty(zp: Residues, width: usize) -> Self {
        HowellBasis { zp, width, rows: Vec::new(), pivots: Vec::new() }
    }

    pub fn residues(&self) -> Residues {
        self.zp
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn rows(&self) -> &[Vec<u64>] {
        &self.rows
    }

    /// `(column, k)` for each row, the pivot being `p^k`.
    pub fn pivots(&self) -> &[(usize, u32)] {
        &self.pivots
    }

    pub fn is_zero(&self) -> bool {
        self.rows.is_empty()
    }

    /// Reduces `v` against the rows; returns the remainder and the
    /// coefficients used, so that `v = Σ coeff_r row_r + remainder`.
    pub fn reduce(&self, v: &[u64]) -> (Vec<u64>, Vec<u64>) {
        assert_eq!(v.len(), self.width);
        let zp = &self.zp;
        let mut rem: Vec<u64> = v.iter().map(|x| x % zp.modulus()).collect();
        let mut coeffs = vec![0; self.rows.len()];
        for (idx, ((c, k), row)) in self.pivots.iter().zip(&self.rows).enumerate() {
            match zp.valuation(rem[*c]) {
                None => continue,
                Some(v) if v < *k => continue,
                Some(_) => {}
            }
            let q = zp.div_p_power_signed(rem[*c], *k);
            axpy(zp, &mut rem, q, row);
            coeffs[idx] = q;
        }
        (rem, coeffs)
    }

    pub fn contains(&self, v: &[u64]) -> bool {
        self.reduce(v).0.iter().all(|x| *x == 0)
    }

    /// Whether every row of `other` lies in this span.
    pub fn contains_all(&self, other: &HowellBasis) -> bool {
        other.rows.iter().all(|r| self.contains(r))
    }

    /// `log_p` of the cardinality of the span.
    pub fn order_exponent(&self) -> u64 {
        let n = self.zp.precision() as u64;
        self.pivots.iter().map(|(_, k)| n - *k as u64).sum()
    }

    /// Same submodule reduced to a lower precision of the same prime.
    pub fn reduce_precision(&self, lower: Residues) -> HowellBasis {
        assert_eq!(lower.p(), self.zp.p());
        let rows = self.rows.iter().map(|r| r.iter().map(|v| v % lower.modulus()).collect()).collect();
        HowellBasis::new(lower, self.width, rows)
    }

    /// Uniform element of the span.
    pub fn random_element<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<u64> {
        let zp = &self.zp;
        let mut out = vec![0; self.width];
        for row in &self.rows {
            let c = rng.gen_range(0..zp.modulus());
            for (o, r) in out.iter_mut().zip(row) {
                *o = zp.add(*o, zp.mul(c, *r));
            }
        }
        out
    }
}

fn augmented(map: &LinearMap) -> HowellBasis {
    let width = map.rows + map.cols;
    let rows = (0..map.cols)
        .map(|c| {
            let mut r = map.column(c);
            r.resize(width, 0);
            r[map.rows + c] = 1;
            r
        })
        .collect();
    HowellBasis::new(map.zp, width, rows)
}

pub fn image(map: &LinearMap) -> HowellBasis {
    HowellBasis::new(map.zp, map.rows, map.columns())
}

pub fn kernel(map: &LinearMap) -> HowellBasis {
    let aug = augmented(map);
    let rows = aug
        .rows
        .iter()
        .zip(&aug.pivots)
        .filter(|(_, (c, _))| *c >= map.rows)
        .map(|(r, _)| r[map.rows..].to_vec())
        .collect();
    HowellBasis::new(map.zp, map.cols, rows)
}

/// Some `x` with `map(x) = b`. Quotients are taken with small signed
/// representatives so small integral right-hand sides give small solutions.
pub fn solve(map: &LinearMap, b: &[u64]) -> Result<Vec<u64>> {
    assert_eq!(b.len(), map.rows);
    let zp = map.zp;
    let aug = augmented(map);
    let mut v: Vec<u64> = b.iter().map(|x| x % zp.modulus()).collect();
    v.resize(map.rows + map.cols, 0);
    for ((c, k), row) in aug.pivots.iter().zip(&aug.rows) {
        if *c >= map.rows {
            break;
        }
        if v[*c] == 0 {
            continue;
        }
        if zp.valuation(v[*c]).is_some_and(|val| val < *k) {
            return Err(Error::NoSolution);
        }
        let q = zp.div_p_power_signed(v[*c], *k);
        axpy(&zp, &mut v, q, row);
    }
    if v[..map.rows].iter().any(|x| *x != 0) {
        return Err(Error::NoSolution);
    }
    Ok(v[map.rows..].iter().map(|x| zp.neg(*x)).collect())
}

/// Invariant factors `p^{k_1} >= p^{k_2} >= ...` of a finite abelian `p`-group.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuotientInvariants {
    pub p: u64,
    pub exponents: Vec<u32>,
}

impl QuotientInvariants {
    pub fn orders(&self) -> Vec<u128> {
        self.exponents.iter().map(|k| (self.p as u128).pow(*k)).collect()
    }

    /// `log_p` of the group order.
    pub fn order_exponent(&self) -> u64 {
        self.exponents.iter().map(|k| *k as u64).sum()
    }

    pub fn order(&self) -> u128 {
        (self.p as u128).pow(self.order_exponent() as u32)
    }

    pub fn is_trivial(&self) -> bool {
        self.exponents.is_empty()
    }
}

/// Diagonal exponents of the Smith form of `rows` over `Z/p^N` (zero
/// diagonal entries are not reported).
pub fn smith_exponents(zp: Residues, width: usize, rows: &[Vec<u64>]) -> Vec<u32> {
    let mut m: Vec<Vec<u64>> = rows.to_vec();
    let mut out = Vec::new();
    let mut s = 0;
    while s < m.len() && s < width {
        let mut best: Option<(u32, usize, usize)> = None;
        for (r, row) in m.iter().enumerate().skip(s) {
            for (c, v) in row.iter().enumerate().skip(s) {
                if let Some(k) = zp.valuation(*v) {
                    if best.is_none_or(|(bk, _, _)| k < bk) {
                        best = Some((k, r, c));
                    }
                }
            }
        }
        let Some((k, r, c)) = best else { break };
        m.swap(s, r);
        for row in m.iter_mut() {
            row.swap(s, c);
        }
        let inv = zp.inv(zp.div_p_power_floor(m[s][s], k)).expect("unit part");
        for v in m[s].iter_mut() {
            *v = zp.mul(*v, inv);
        }
        let pivot = m[s].clone();
        for row in m.iter_mut().skip(s + 1) {
            if row[s] != 0 {
                let q = zp.div_p_power_floor(row[s], k);
                axpy(&zp, row, q, &pivot);
            }
        }
        // column operations only touch row s once the column below is clear
        for v in m[s].iter_mut().skip(s + 1) {
            *v = 0;
        }
        out.push(k);
        s += 1;
    }
    out
}

/// Invariants of `sup / sub`, for submodules `sub ⊆ sup`.
pub fn quotient_invariants(sup: &HowellBasis, sub: &HowellBasis) -> Result<QuotientInvariants> {
    assert_eq!(sup.zp, sub.zp);
    assert_eq!(sup.width, sub.width);
    let zp = sup.zp;
    let r = sup.rows.len();
    let d = sup.width;

    // relations among the generators of `sup`
    let aug_rows: Vec<Vec<u64>> = sup
        .rows
        .iter()
        .enumerate()
        .map(|(i, g)| {
            let mut row = g.clone();
            row.resize(d + r, 0);
            row[d + i] = 1;
            row
        })
        .collect();
    let aug = HowellBasis::new(zp, d + r, aug_rows);
    let mut relations: Vec<Vec<u64>> =
        aug.rows.iter().zip(&aug.pivots).filter(|(_, (c, _))| *c >= d).map(|(row, _)| row[d..].to_vec()).collect();

    for b in &sub.rows {
        let (rem, coeffs) = sup.reduce(b);
        if rem.iter().any(|x| *x != 0) {
            return Err(Error::CrossCheckFailed("submodule is not contained in the ambient module".into()));
        }
        relations.push(coeffs);
    }

    let diag = smith_exponents(zp, r, &relations);
    let n = zp.precision();
    let mut exponents: Vec<u32> = diag.iter().copied().chain(std::iter::repeat_n(n, r - diag.len())).collect();
    exponents.retain(|k| *k > 0);
    exponents.sort_unstable_by(|a, b| b.cmp(a));
    Ok(QuotientInvariants { p: zp.p(), exponents })
}
