//! Truncated Witt vectors `W_{m+1}(O_L)` at precision.
//!
//! Addition evaluates the binary sum polynomials `z_n` with coefficients
//! reduced mod `p^N`. Sums of more than two vectors fold the binary sum.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use crate::error::{Error, Result};
use crate::extension::ExtensionData;
use crate::poly::SymPoly;
use crate::tower::{OLElement, Tower};
use crate::universal::{ResourceLimits, WittFamily};
use crate::zp::Residues;

type Cache<K, V> = OnceLock<Mutex<HashMap<K, Arc<V>>>>;

/// Shared cache of symbolic families keyed by `(p, max_level, arity)`.
pub fn witt_family(p: u64, max_level: usize, arity: usize) -> Result<Arc<WittFamily>> {
    static CACHE: Cache<(u64, usize, usize), WittFamily> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(f) = cache.lock().expect("cache poisoned").get(&(p, max_level, arity)) {
        return Ok(f.clone());
    }
    // built outside the lock; a racing duplicate is harmless
    let family = Arc::new(WittFamily::new(p, max_level, arity, &ResourceLimits::default())?);
    cache.lock().expect("cache poisoned").entry((p, max_level, arity)).or_insert_with(|| family.clone());
    Ok(family)
}

/// An integral polynomial with coefficients reduced mod `p^N`, ready for
/// evaluation on `O_L`.
#[derive(Clone, Debug)]
pub struct CompiledPoly {
    terms: Vec<(u64, Vec<(usize, u32)>)>,
    nvars: usize,
}

impl CompiledPoly {
    pub fn compile(poly: &SymPoly, zp: Residues) -> Result<Self> {
        let terms = poly
            .integer_terms()?
            .into_iter()
            .map(|(m, c)| {
                let factors = m.exponents().iter().enumerate().filter(|(_, e)| **e > 0).map(|(v, e)| (v, *e)).collect();
                (zp.from_bigint(&c), factors)
            })
            .filter(|(c, _)| *c != 0)
            .collect();
        Ok(CompiledPoly { terms, nvars: poly.nvars() })
    }

    /// Evaluates at `vals`, indexed like the polynomial's variables.
    pub fn eval(&self, tower: &Arc<Tower>, vals: &[OLElement]) -> OLElement {
        assert_eq!(vals.len(), self.nvars, "wrong number of values");
        let mut powers: Vec<Vec<OLElement>> = vals.iter().map(|v| vec![tower.one(), v.clone()]).collect();
        let mut acc = tower.zero();
        for (c, factors) in &self.terms {
            let mut prod: Option<OLElement> = None;
            for &(v, e) in factors {
                let table = &mut powers[v];
                while table.len() <= e as usize {
                    let next = &table[table.len() - 1] * &table[1];
                    table.push(next);
                }
                prod = Some(match prod {
                    Some(p) => &p * &table[e as usize],
                    None => table[e as usize].clone(),
                });
            }
            let t = prod.unwrap_or_else(|| tower.one()).scale(*c);
            acc = &acc + &t;
        }
        acc
    }
}

fn compiled_sums(p: u64, levels: usize, arity: usize, zp: Residues) -> Result<Arc<Vec<CompiledPoly>>> {
    static CACHE: Cache<(u64, u32, usize, usize), Vec<CompiledPoly>> = OnceLock::new();
    let key = (p, zp.precision(), levels, arity);
    let cache = CACHE.get_or_init(Default::default);
    if let Some(c) = cache.lock().expect("cache poisoned").get(&key) {
        return Ok(c.clone());
    }
    let family = witt_family(p, levels - 1, arity)?;
    let compiled = Arc::new(family.sums().iter().map(|z| CompiledPoly::compile(z, zp)).collect::<Result<Vec<_>>>()?);
    cache.lock().expect("cache poisoned").insert(key, compiled.clone());
    Ok(compiled)
}

/// A Witt vector `(a_0, ..., a_m)` with components in `O_L`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WittVec {
    components: Vec<OLElement>,
}

impl WittVec {
    pub fn new(components: Vec<OLElement>) -> Self {
        assert!(!components.is_empty(), "Witt vectors have positive length");
        let t = components[0].tower().clone();
        assert!(components.iter().all(|c| Arc::ptr_eq(c.tower(), &t)), "components live in different rings");
        WittVec { components }
    }

    pub fn zero(tower: &Arc<Tower>, length: usize) -> Self {
        WittVec::new(vec![tower.zero(); length])
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn is_zero(&self) -> bool {
        self.components.iter().all(|c| c.is_zero())
    }

    pub fn components(&self) -> &[OLElement] {
        &self.components
    }

    pub fn component(&self, n: usize) -> &OLElement {
        &self.components[n]
    }

    pub fn tower(&self) -> &Arc<Tower> {
        self.components[0].tower()
    }

    /// Balanced coordinates of every component.
    pub fn signed_components(&self) -> Vec<Vec<i64>> {
        self.components.iter().map(|c| c.signed_coefficients()).collect()
    }
}

impl fmt::Display for WittVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.components.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

/// `(x, 0, ..., 0)`.
pub fn teichmuller(x: &OLElement, length: usize) -> WittVec {
    let mut c = vec![x.tower().zero(); length];
    c[0] = x.clone();
    WittVec::new(c)
}

/// `(0, a_0, ..., a_{m-1})`.
pub fn verschiebung(a: &WittVec) -> WittVec {
    let mut c = vec![a.tower().zero()];
    c.extend(a.components[..a.len() - 1].iter().cloned());
    WittVec::new(c)
}

/// The first `n` components.
pub fn restrict(a: &WittVec, n: usize) -> Result<WittVec> {
    if n == 0 || n > a.len() {
        return Err(Error::LengthMismatch { left: a.len(), right: n });
    }
    Ok(WittVec::new(a.components[..n].to_vec()))
}

/// Ghost components `w_k = Σ_{j<=k} p^j a_j^{p^{k-j}}`.
pub fn ghost_map(a: &WittVec, p: u64) -> Vec<OLElement> {
    let tower = a.tower();
    (0..a.len())
        .map(|k| {
            (0..=k).fold(tower.zero(), |acc, j| {
                let t = a.components[j].pow(p.pow((k - j) as u32));
                &acc + &t.scale(tower.residues().p_power(j as u32))
            })
        })
        .collect()
}

/// Arithmetic in `W_{m+1}(O_L)` for a fixed extension.
#[derive(Clone, Debug)]
pub struct WittRing {
    ext: Arc<ExtensionData>,
    length: usize,
    sums: Arc<Vec<CompiledPoly>>,
}

impl WittRing {
    pub fn new(ext: Arc<ExtensionData>, length: usize) -> Result<Self> {
        assert!(length >= 1, "Witt length must be positive");
        let sums = compiled_sums(ext.p(), length, 2, ext.residues())?;
        Ok(WittRing { ext, length, sums })
    }

    pub fn extension(&self) -> &Arc<ExtensionData> {
        &self.ext
    }

    pub fn length(&self) -> usize {
        self.length
    }

    pub fn p(&self) -> u64 {
        self.ext.p()
    }

    pub fn zero(&self) -> WittVec {
        WittVec::zero(self.ext.tower(), self.length)
    }

    pub fn teichmuller(&self, x: &OLElement) -> WittVec {
        teichmuller(x, self.length)
    }

    fn check(&self, a: &WittVec) -> Result<()> {
        if a.len() != self.length {
            return Err(Error::LengthMismatch { left: a.len(), right: self.length });
        }
        Ok(())
    }

    fn binary_vars(a: &[OLElement], b: &[OLElement]) -> Vec<OLElement> {
        a.iter().zip(b).flat_map(|(x, y)| [x.clone(), y.clone()]).collect()
    }

    pub fn add(&self, a: &WittVec, b: &WittVec) -> Result<WittVec> {
        self.check(a)?;
        if b.len() != a.len() {
            return Err(Error::LengthMismatch { left: a.len(), right: b.len() });
        }
        let vars = Self::binary_vars(&a.components, &b.components);
        let tower = self.ext.tower();
        Ok(WittVec::new(self.sums.iter().map(|z| z.eval(tower, &vars)).collect()))
    }

    /// The unique `b` with `a + b = 0`, solved level by level.
    pub fn neg(&self, a: &WittVec) -> Result<WittVec> {
        self.check(a)?;
        let tower = self.ext.tower();
        let mut b = vec![tower.zero(); self.length];
        for n in 0..self.length {
            let vars = Self::binary_vars(&a.components, &b);
            b[n] = -&self.sums[n].eval(tower, &vars);
        }
        Ok(WittVec::new(b))
    }

    pub fn sub(&self, a: &WittVec, b: &WittVec) -> Result<WittVec> {
        self.add(a, &self.neg(b)?)
    }

    pub fn apply_sigma(&self, a: &WittVec, power: usize) -> WittVec {
        WittVec::new(a.components.iter().map(|c| self.ext.apply_sigma(c, power)).collect())
    }

    /// `Σ_{i<p} σ^i(a)` as a Witt sum.
    pub fn trace(&self, a: &WittVec) -> Result<WittVec> {
        let mut acc = a.clone();
        for i in 1..self.p() as usize {
            acc = self.add(&acc, &self.apply_sigma(a, i))?;
        }
        Ok(acc)
    }

    pub fn ghost_map(&self, a: &WittVec) -> Vec<OLElement> {
        ghost_map(a, self.p())
    }

    pub fn restrict(&self, a: &WittVec, n: usize) -> Result<WittVec> {
        restrict(a, n)
    }

    pub fn verschiebung(&self, a: &WittVec) -> WittVec {
        verschiebung(a)
    }

    pub fn random<R: rand::Rng + ?Sized>(&self, rng: &mut R) -> WittVec {
        WittVec::new((0..self.length).map(|_| self.ext.tower().random(rng)).collect())
    }
}

/// Values `X_{i,j} = σ^i(a_j)` laid out for a `p`-summand polynomial.
pub fn galois_substitution(ext: &ExtensionData, a: &WittVec) -> Vec<OLElement> {
    let p = ext.p() as usize;
    let mut vals = Vec::with_capacity(p * a.len());
    for c in a.components() {
        for i in 0..p {
            vals.push(ext.apply_sigma(c, i));
        }
    }
    vals
}

/// Compiled `f_1..f_m` for `p` summands, evaluated at Galois conjugates.
#[derive(Clone, Debug)]
pub struct Corrections {
    ext: Arc<ExtensionData>,
    f: Vec<CompiledPoly>,
    length: usize,
}

impl Corrections {
    pub fn new(ext: Arc<ExtensionData>, length: usize) -> Result<Self> {
        let p = ext.p();
        let family = witt_family(p, length - 1, p as usize)?;
        let f = (0..length).map(|n| CompiledPoly::compile(&family.f(n), ext.residues())).collect::<Result<Vec<_>>>()?;
        Ok(Corrections { ext, f, length })
    }

    /// `f_n(σ^i(a_j))`; only components `a_0..a_{n-1}` are read.
    pub fn f_value(&self, a: &WittVec, n: usize) -> OLElement {
        assert_eq!(a.len(), self.length, "length mismatch");
        let vals = galois_substitution(&self.ext, a);
        self.f[n].eval(self.ext.tower(), &vals)
    }
}
