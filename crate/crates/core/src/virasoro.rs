//! The partition function `Z` as a truncated polynomial in `ħ, t_0, t_1, …`
//! and the Virasoro operators `L_n`.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::exact::numbers::{double_factorial, format_rational, int, rat, Rational};
use crate::witten::{multisets_with_sum, WittenEngine};

/// `ħ^h Π t_j^{e_j}`; `e` carries no trailing zeros.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Monomial {
    pub h: u32,
    pub e: Vec<u32>,
}

impl Monomial {
    pub fn new(h: u32, mut e: Vec<u32>) -> Self {
        while e.last() == Some(&0) {
            e.pop();
        }
        Self { h, e }
    }

    /// Monomial `ħ^h Π t_{d_i}` for a list of insertions.
    pub fn from_insertions(h: u32, d: &[u32]) -> Self {
        let mut e = vec![0; d.iter().max().map_or(0, |&m| m as usize + 1)];
        for &x in d {
            e[x as usize] += 1;
        }
        Self::new(h, e)
    }

    fn exp(&self, j: usize) -> u32 {
        self.e.get(j).copied().unwrap_or(0)
    }

    fn mul(&self, other: &Self) -> Self {
        let len = self.e.len().max(other.e.len());
        Self::new(self.h + other.h, (0..len).map(|j| self.exp(j) + other.exp(j)).collect())
    }

    fn t_degree(&self) -> u32 {
        self.e.iter().sum()
    }
}

/// Polynomial in `ħ` and the times, exact up to `O(ħ^{cutoff+1})`.
///
/// A `cutoff` of `None` means the polynomial is exact. Equality ignores
/// `max_time`.
#[derive(Clone, Debug)]
pub struct TruncatedZ {
    cutoff: Option<u32>,
    max_time: usize,
    terms: BTreeMap<Monomial, Rational>,
}

impl TruncatedZ {
    pub fn new(cutoff: Option<u32>) -> Self {
        Self {
            cutoff,
            max_time: 0,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(cutoff: Option<u32>) -> Self {
        let mut z = Self::new(cutoff);
        z.add_term(Monomial::new(0, Vec::new()), Rational::one());
        z
    }

    pub fn cutoff(&self) -> Option<u32> {
        self.cutoff
    }

    /// Largest time index `D` carried by the truncation (`t_0..t_D`).
    pub fn max_time(&self) -> usize {
        self.max_time
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, m: &Monomial) -> Rational {
        self.terms.get(m).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn add_term(&mut self, m: Monomial, c: Rational) {
        if self.cutoff.is_some_and(|cut| m.h > cut) || c.is_zero() {
            return;
        }
        self.max_time = self.max_time.max(m.e.len().saturating_sub(1));
        let slot = self.terms.entry(m).or_insert_with(Rational::zero);
        *slot += c;
        if slot.is_zero() {
            // cheap enough: zero entries are rare
            self.terms.retain(|_, v| !v.is_zero());
        }
    }

    fn with_cutoff(&self, cutoff: Option<u32>) -> Self {
        let mut out = Self::new(cutoff);
        for (m, c) in &self.terms {
            out.add_term(m.clone(), c.clone());
        }
        out.max_time = out.max_time.max(self.max_time);
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.with_cutoff(min_cutoff(self.cutoff, other.cutoff));
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn scale(&self, q: &Rational) -> Self {
        let mut out = Self::new(self.cutoff);
        out.max_time = self.max_time;
        for (m, c) in &self.terms {
            out.add_term(m.clone(), c * q);
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        // f = O(ħ^{a+1}), g = O(ħ^{b+1}) => fg known up to min(a + v_g, b + v_f)
        let vf = self.terms.keys().map(|m| m.h).min();
        let vg = other.terms.keys().map(|m| m.h).min();
        let cutoff = match (self.cutoff, other.cutoff) {
            (None, None) => None,
            (Some(a), None) => vg.map(|v| a + v).or(Some(a)),
            (None, Some(b)) => vf.map(|v| b + v).or(Some(b)),
            (Some(a), Some(b)) => Some((a + vg.unwrap_or(0)).min(b + vf.unwrap_or(0))),
        };
        let mut out = Self::new(cutoff);
        out.max_time = self.max_time.max(other.max_time);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                if cutoff.is_some_and(|cut| ma.h + mb.h > cut) {
                    continue;
                }
                out.add_term(ma.mul(mb), ca * cb);
            }
        }
        out
    }

    /// `∂/∂t_j`.
    pub fn derivative(&self, j: usize) -> Self {
        let mut out = Self::new(self.cutoff);
        out.max_time = self.max_time;
        for (m, c) in &self.terms {
            let k = m.exp(j);
            if k == 0 {
                continue;
            }
            let mut e = m.e.clone();
            e[j] -= 1;
            out.add_term(Monomial::new(m.h, e), c * int(k as i64));
        }
        out
    }

    /// Multiplies by `ħ^p Π t^e`.
    pub fn times_monomial(&self, factor: &Monomial) -> Self {
        let mut out = Self::new(self.cutoff.map(|c| c + factor.h));
        out.max_time = self.max_time.max(factor.e.len().saturating_sub(1));
        for (m, c) in &self.terms {
            out.add_term(m.mul(factor), c.clone());
        }
        out
    }

    /// Terms grouped by `ħ` power.
    fn graded(&self, max_h: u32) -> Vec<Self> {
        let mut parts: Vec<Self> = (0..=max_h).map(|_| Self::new(None)).collect();
        for (m, c) in &self.terms {
            if m.h <= max_h {
                parts[m.h as usize].add_term(m.clone(), c.clone());
            }
        }
        parts
    }

    /// `log Z`, for `Z` with constant term 1 and a finite cutoff.
    pub fn free_energy(&self) -> Result<Self> {
        let cut = self
            .cutoff
            .ok_or_else(|| Error::Precondition("free energy needs a finite cutoff".into()))?;
        let z = self.graded(cut);
        if z[0] != Self::one(None) {
            return Err(Error::Precondition("free energy needs Z = 1 + O(ħ)".into()));
        }
        // h Z_h = Σ_{j=1}^{h} j F_j Z_{h-j}
        let mut f: Vec<Self> = vec![Self::new(None)];
        for h in 1..=cut as usize {
            let mut acc = z[h].scale(&int(h as i64));
            for j in 1..h {
                acc = acc.add(&f[j].mul(&z[h - j]).scale(&int(-(j as i64))));
            }
            f.push(acc.scale(&rat(1, h as i64)));
        }
        let mut out = Self::new(Some(cut));
        out.max_time = self.max_time;
        for part in f {
            for (m, c) in part.terms {
                out.add_term(m, c);
            }
        }
        Ok(out)
    }

    /// Reads `⟨τ_d⟩_g` back off the free energy.
    pub fn correlator(&self, g: u32, d: &[u32]) -> Result<Rational> {
        let w = 2 * g as i64 - 2 + d.len() as i64;
        if w < 1 || self.cutoff.is_some_and(|c| w > c as i64) {
            return Err(Error::Precondition(format!("Euler weight {w} outside the truncation")));
        }
        let m = Monomial::from_insertions(w as u32, d);
        let sym: BigInt = m.e.iter().map(|&k| crate::exact::numbers::factorial(k)).product();
        Ok(self.free_energy()?.coefficient(&m) * Rational::from_integer(sym))
    }
}

impl PartialEq for TruncatedZ {
    fn eq(&self, other: &Self) -> bool {
        self.cutoff == other.cutoff && self.terms == other.terms
    }
}

impl Eq for TruncatedZ {}

fn min_cutoff(a: Option<u32>, b: Option<u32>) -> Option<u32> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x.min(y)),
        (x, None) => x,
        (None, y) => y,
    }
}

impl fmt::Display for TruncatedZ {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            write!(f, "0")?;
        }
        for (i, (m, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{}", format_rational(c))?;
            if m.h > 0 {
                write!(f, "*hbar^{}", m.h)?;
            }
            for (j, &k) in m.e.iter().enumerate() {
                match k {
                    0 => {}
                    1 => write!(f, "*t{j}")?,
                    _ => write!(f, "*t{j}^{k}")?,
                }
            }
        }
        if let Some(c) = self.cutoff {
            write!(f, " + O(hbar^{})", c + 1)?;
        }
        Ok(())
    }
}

/// `Z = exp(Σ ħ^{2g-2+n} / n! Σ_d ⟨τ_d⟩_g Π t_{d_i})` up to Euler weight
/// `cutoff`. The times carried are `t_0..t_D` with `D` at least
/// `max_time` and at least the largest index that can occur.
pub fn build_partition_function(engine: &WittenEngine, cutoff: u32, max_time: usize) -> TruncatedZ {
    let mut graded: Vec<TruncatedZ> = (0..=cutoff).map(|_| TruncatedZ::new(None)).collect();
    let mut needed = 0usize;
    for w in 1..=cutoff as i64 {
        let mut g = 0i64;
        while 2 * g - 2 < w {
            let n = w - 2 * g + 2;
            let dim = 3 * g - 3 + n;
            if n >= 1 && dim >= 0 {
                let mut ds = Vec::new();
                multisets_with_sum(dim as u32, n as usize, dim as u32, &mut Vec::new(), &mut ds);
                for d in ds {
                    let v = engine.correlator(g as u32, &d);
                    if v.is_zero() {
                        continue;
                    }
                    needed = needed.max(d[0] as usize);
                    let m = Monomial::from_insertions(w as u32, &d);
                    let sym: BigInt = m.e.iter().map(|&k| crate::exact::numbers::factorial(k)).product();
                    graded[w as usize].add_term(m, v / Rational::from_integer(sym));
                }
            }
            g += 1;
        }
    }
    // h Z_h = Σ_{j=1}^{h} j F_j Z_{h-j}
    let mut z: Vec<TruncatedZ> = vec![TruncatedZ::one(None)];
    for h in 1..=cutoff as usize {
        let mut acc = TruncatedZ::new(None);
        for j in 1..=h {
            acc = acc.add(&graded[j].mul(&z[h - j]).scale(&int(j as i64)));
        }
        z.push(acc.scale(&rat(1, h as i64)));
    }
    let mut out = TruncatedZ::new(Some(cutoff));
    for part in z {
        for (m, c) in part.terms {
            out.add_term(m, c);
        }
    }
    out.max_time = max_time.max(needed);
    out
}

/// `L_n = ħ ∂_{n+1} − ħ² (Σ_k c_k t_k ∂_{k+n} + ½ Σ_{a+b=n-1} s_{a,b} ∂_a ∂_b + const)`,
/// plus `−ħ² t_0²/2` for `n = −1`.
#[derive(Clone, Debug, PartialEq)]
pub struct VirasoroOp {
    n: i64,
    /// `(a, b, ½ s_{a,b})` over ordered pairs `a + b = n − 1`.
    second: Vec<(usize, usize, Rational)>,
    constant: Rational,
    t0_squared: Rational,
}

impl VirasoroOp {
    pub fn new(n: i64) -> Result<Self> {
        if n < -1 {
            return Err(Error::Domain(format!("L_n needs n >= -1, got {n}")));
        }
        let mut second = Vec::new();
        if n >= 1 {
            let den = df(2 * n + 3);
            for a in 0..n {
                let b = n - 1 - a;
                let c = Rational::new(df(2 * a + 1) * df(2 * b + 1), den.clone()) / int(2);
                second.push((a as usize, b as usize, c));
            }
        }
        Ok(Self {
            n,
            second,
            constant: if n == 0 { rat(1, 24) } else { Rational::zero() },
            t0_squared: if n == -1 { rat(1, 2) } else { Rational::zero() },
        })
    }

    pub fn index(&self) -> i64 {
        self.n
    }

    /// Coefficient `(2n+2k+1)!! / ((2n+3)!! (2k−1)!!)` of `t_k ∂_{k+n}`.
    pub fn shift_coefficient(&self, k: usize) -> Rational {
        let (n, k) = (self.n, k as i64);
        Rational::new(df(2 * n + 2 * k + 1), df(2 * n + 3) * df(2 * k - 1))
    }

    pub fn apply(&self, f: &TruncatedZ) -> TruncatedZ {
        let h1 = Monomial::new(1, Vec::new());
        let h2 = Monomial::new(2, Vec::new());
        let mut inner = TruncatedZ::new(f.cutoff);
        inner.max_time = f.max_time;
        for (m, c) in &f.terms {
            for (j, &k) in m.e.iter().enumerate() {
                if k == 0 || (j as i64) < self.n {
                    continue;
                }
                let src = (j as i64 - self.n) as usize;
                let mut e = m.e.clone();
                e[j] -= 1;
                if e.len() <= src {
                    e.resize(src + 1, 0);
                }
                e[src] += 1;
                inner.add_term(Monomial::new(m.h, e), c * int(k as i64) * self.shift_coefficient(src));
            }
        }
        for (a, b, s) in &self.second {
            inner = inner.add(&f.derivative(*a).derivative(*b).scale(s));
        }
        if !self.constant.is_zero() {
            inner = inner.add(&f.scale(&self.constant));
        }
        if !self.t0_squared.is_zero() {
            let t0sq = f.times_monomial(&Monomial::new(0, vec![2]));
            inner = inner.add(&t0sq.scale(&self.t0_squared));
        }
        let lead = f.derivative((self.n + 1) as usize).times_monomial(&h1);
        let out = lead.add(&inner.times_monomial(&h2).scale(&int(-1)));
        let mut out = out.with_cutoff(f.cutoff.map(|c| c + 1));
        out.max_time = f.max_time;
        out
    }
}

fn df(m: i64) -> BigInt {
    double_factorial(m).expect("double factorial of an odd number >= -1")
}

pub fn apply_virasoro(n: i64, z: &TruncatedZ) -> Result<TruncatedZ> {
    Ok(VirasoroOp::new(n)?.apply(z))
}

/// `L_m L_n f − L_n L_m f − ħ² c L_{m+n} f` for a given structure constant `c`.
pub fn bracket_with(m: i64, n: i64, c: &Rational, test: &TruncatedZ) -> Result<TruncatedZ> {
    let lm = VirasoroOp::new(m)?;
    let ln = VirasoroOp::new(n)?;
    let mut out = lm
        .apply(&ln.apply(test))
        .add(&ln.apply(&lm.apply(test)).scale(&int(-1)));
    if !c.is_zero() {
        let lmn = VirasoroOp::new(m + n)?;
        let rhs = lmn.apply(test).times_monomial(&Monomial::new(2, Vec::new()));
        out = out.add(&rhs.scale(&-c));
    }
    Ok(out)
}

/// `(L_m L_n − L_n L_m − ħ²(m−n) L_{m+n})` applied to `test`.
pub fn bracket(m: i64, n: i64, test: &TruncatedZ) -> Result<TruncatedZ> {
    bracket_with(m, n, &int(m - n), test)
}

/// The constant `c_{m,n}` with `[L_m, L_n] = ħ² c_{m,n} L_{m+n}` for the
/// operators as normalized here: `−(m−n) · 2 (2m+2n+3)!! / ((2m+3)!! (2n+3)!!)`.
pub fn structure_constant(m: i64, n: i64) -> Rational {
    if m == n {
        return Rational::zero();
    }
    int(-(m - n)) * Rational::new(BigInt::from(2) * df(2 * (m + n) + 3), df(2 * m + 3) * df(2 * n + 3))
}

/// Random exact polynomial in `ħ, t_0..t_{max_time}` with `terms` monomials of
/// `t`-degree at most `degree`, `ħ`-degree at most 2, and small integer
/// coefficients.
pub fn random_test_polynomial(seed: u64, max_time: usize, degree: u32, terms: usize) -> TruncatedZ {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = TruncatedZ::new(None);
    out.max_time = max_time;
    while out.len() < terms {
        let mut e = vec![0u32; max_time + 1];
        let deg = rng.gen_range(0..=degree);
        for _ in 0..deg {
            e[rng.gen_range(0..=max_time)] += 1;
        }
        let m = Monomial::new(rng.gen_range(0..=2), e);
        debug_assert!(m.t_degree() <= degree);
        let c = rng.gen_range(-9i64..=9);
        out.add_term(m, int(c));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_partition_functions() {
        let w = WittenEngine::new();
        let z0 = build_partition_function(&w, 0, 1);
        assert_eq!(z0, TruncatedZ::one(Some(0)));
        let z1 = build_partition_function(&w, 1, 1);
        let f1 = z1.free_energy().unwrap();
        assert_eq!(f1.len(), 2);
        assert_eq!(f1.coefficient(&Monomial::new(1, vec![3])), rat(1, 6));
        assert_eq!(f1.coefficient(&Monomial::new(1, vec![0, 1])), rat(1, 24));
        let z2 = build_partition_function(&w, 2, 1);
        // 1/6 from <τ_0³τ_1>_0 plus 1/144 from the square of the C=1 part
        assert_eq!(z2.coefficient(&Monomial::new(2, vec![3, 1])), rat(25, 144));
        let f2 = z2.free_energy().unwrap();
        assert_eq!(f2.coefficient(&Monomial::new(2, vec![3, 1])), rat(1, 6));
    }

    #[test]
    fn l0_on_one() {
        let out = apply_virasoro(0, &TruncatedZ::one(None)).unwrap();
        let mut expect = TruncatedZ::new(None);
        expect.add_term(Monomial::new(2, Vec::new()), rat(-1, 24));
        assert_eq!(out, expect);
        assert!(apply_virasoro(-2, &TruncatedZ::one(None)).is_err());
    }

    #[test]
    fn annihilation() {
        let w = WittenEngine::new();
        let z = build_partition_function(&w, 4, 1);
        for n in -1..=4 {
            let r = apply_virasoro(n, &z).unwrap();
            assert!(r.is_zero(), "L_{n} Z = {r}");
            assert_eq!(r.cutoff(), Some(5));
        }
    }

    #[test]
    fn round_trip() {
        let w = WittenEngine::new();
        let z = build_partition_function(&w, 3, 1);
        assert_eq!(z.correlator(2, &[4]).unwrap(), rat(1, 1152));
        assert_eq!(z.correlator(1, &[1, 1, 1]).unwrap(), rat(1, 12));
        assert_eq!(z.correlator(0, &[0, 0, 0, 1, 1]).unwrap(), int(2));
        assert!(z.correlator(3, &[7]).is_err());
    }

    #[test]
    fn bracket_relation() {
        let f = random_test_polynomial(7, 5, 3, 12);
        assert!(bracket(1, 1, &f).unwrap().is_zero());
        for m in -1..=3 {
            for n in -1..=3 {
                let r = bracket_with(m, n, &structure_constant(m, n), &f).unwrap();
                assert!(r.is_zero(), "[L_{m}, L_{n}] residual {r}");
            }
        }
        assert_eq!(structure_constant(0, -1), rat(-2, 3));
        assert_eq!(structure_constant(1, -1), rat(-4, 5));
        // the unnormalized relation fails for these operators
        assert!(!bracket(0, -1, &f).unwrap().is_zero());
    }
}
