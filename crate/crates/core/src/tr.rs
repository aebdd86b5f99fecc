//! Eynard–Orantin topological recursion on a local spectral curve
//! `x = ζ²/2`, `y = y(ζ)`, `ω_{0,2} = dζ_1 dζ_2 / (ζ_1 − ζ_2)²`.
//!
//! Correlators are kept as principal parts
//! `ω_{g,n} = Σ_d c_d Π dζ_i / ζ_i^{2d_i+2}`.

use std::collections::{BTreeMap, HashMap};
use std::sync::RwLock;

use num_bigint::BigInt;

use crate::cohft::CohFTSpec;
use crate::error::{check_stable, Error, Result};
use crate::exact::numbers::{double_factorial, factorial, int, rat, Rational};
use crate::exact::{PiPoly, Ring, TruncatedSeries};

#[derive(Clone, Debug, PartialEq)]
pub struct LocalCurve<R: Ring> {
    /// `y(ζ)`, known up to `O(ζ^order)`.
    y: TruncatedSeries<R>,
}

impl<R: Ring> LocalCurve<R> {
    pub fn new(y: TruncatedSeries<R>) -> Result<Self> {
        if y.order() < 2 || y.coeff(1).inverse().is_none() {
            return Err(Error::Precondition(
                "the linear coefficient of y must be a unit (simple ramification)".into(),
            ));
        }
        Ok(Self { y })
    }

    pub fn y(&self) -> &TruncatedSeries<R> {
        &self.y
    }

    pub fn order(&self) -> i32 {
        self.y.order()
    }

    /// `y_{2k+1}`, or `None` beyond the truncation.
    fn odd_coeff(&self, k: usize) -> Option<R> {
        let e = 2 * k as i32 + 1;
        (e < self.y.order()).then(|| self.y.coeff(e))
    }
}

impl LocalCurve<Rational> {
    /// `y = ζ`, exact; the order only bounds the supported dimension.
    pub fn airy() -> Self {
        let y = TruncatedSeries::from_coeffs("z", vec![int(0), int(1)], 130);
        Self::new(y).expect("valid curve")
    }
}

impl LocalCurve<PiPoly> {
    /// `y = sin(2πζ) / (2π)`, with `π²` kept formal, up to `O(ζ^order)`.
    pub fn sine(order: i32) -> Self {
        let coeffs = (0..order.max(2))
            .map(|e| {
                if e % 2 == 0 {
                    return PiPoly::default();
                }
                // (−1)^k (2π)^{2k} / (2k+1)!  with  k = (e − 1)/2
                let k = (e - 1) / 2;
                let c = Rational::new(BigInt::from(-4).pow(k as u32), factorial(e as u32));
                PiPoly::monomial(c, k as usize)
            })
            .collect();
        Self::new(TruncatedSeries::from_coeffs("z", coeffs, order.max(2))).expect("valid curve")
    }
}

/// `ω_{g,n}` as coefficients of `Π dζ_i / ζ_i^{2d_i+2}`, keyed by the ordered
/// exponent vector `d`.
#[derive(Clone, Debug, PartialEq)]
pub struct CorrelatorForm<R: Ring> {
    pub g: u32,
    pub n: usize,
    pub coeffs: BTreeMap<Vec<u32>, R>,
}

impl<R: Ring> CorrelatorForm<R> {
    pub fn coeff(&self, d: &[u32]) -> R {
        self.coeffs.get(d).cloned().unwrap_or_else(R::zero)
    }
}

/// Memoizing recursion engine for one curve.
pub struct TrEngine<R: Ring> {
    curve: LocalCurve<R>,
    /// Coefficients of `1 / Y(w)` where `y(ζ) − y(−ζ) = 2ζ Y(ζ²)`.
    inv_y: Vec<R>,
    cache: RwLock<HashMap<(u32, usize), CorrelatorForm<R>>>,
}

impl<R: Ring> TrEngine<R> {
    pub fn new(curve: LocalCurve<R>) -> Self {
        let mut len = 0;
        while curve.odd_coeff(len).is_some() {
            len += 1;
        }
        let ys: Vec<R> = (0..len).map(|k| curve.odd_coeff(k).expect("in range")).collect();
        let inv_y = TruncatedSeries::from_coeffs("w", ys, len as i32)
            .inverse()
            .expect("unit leading coefficient");
        let inv_y = (0..len as i32).map(|m| inv_y.coeff(m)).collect();
        Self {
            curve,
            inv_y,
            cache: RwLock::new(HashMap::new()),
        }
    }

    pub fn curve(&self) -> &LocalCurve<R> {
        &self.curve
    }

    /// `ω_{g,n}`; fails if the curve is not known to high enough order.
    pub fn correlator(&self, g: u32, n: usize) -> Result<CorrelatorForm<R>> {
        check_stable(g, n)?;
        let dim = 3 * g as usize + n - 3;
        if dim >= self.inv_y.len() {
            return Err(Error::InsufficientTruncation {
                needed: 2 * dim + 2,
                available: self.curve.order().max(0) as usize,
            });
        }
        self.compute(g, n)
    }

    fn compute(&self, g: u32, n: usize) -> Result<CorrelatorForm<R>> {
        if let Some(f) = self.cache.read().unwrap().get(&(g, n)) {
            return Ok(f.clone());
        }
        // f(ζ) = Σ_k F_k(d_J) ζ^{-2k}: the bidifferential in the residue,
        // keyed by (k, exponents of the remaining variables)
        let mut f: BTreeMap<(u32, Vec<u32>), R> = BTreeMap::new();
        let mut add = |k: u32, rest: Vec<u32>, c: R| {
            let slot = f.entry((k, rest)).or_insert_with(R::zero);
            slot.add_assign(&c);
        };
        let others = n - 1;

        // ω_{g−1,n+1}(ζ, −ζ, J); the second point contributes a sign
        if g >= 1 {
            if g == 1 && n == 1 {
                // ω_{0,2}(ζ, −ζ) = −dζ² / (4ζ²)
                add(1, Vec::new(), R::from_rational(rat(-1, 4)));
            } else {
                for (d, c) in &self.compute(g - 1, n + 1)?.coeffs {
                    add(d[0] + d[1] + 2, d[2..].to_vec(), c.neg());
                }
            }
        }

        if g == 0 && n == 3 {
            // ω_{0,2}(ζ, ζ_1) ω_{0,2}(−ζ, ζ_2) + (1 ↔ 2), even part at ζ⁰
            add(0, vec![0, 0], R::from_rational(int(-2)));
        }

        // ω_{0,2}(±ζ, ζ_i) ω_{g,n−1}(∓ζ, J∖i): even part of ω_{0,2} gives
        // Σ_e (2e+1) ζ^{2e} / ζ_i^{2e+2}, doubled by the two orderings
        if others >= 1 && 2 * g as i64 - 2 + others as i64 > 0 {
            let lower = self.compute(g, others)?;
            for i in 0..others {
                for (d, c) in &lower.coeffs {
                    let a = d[0];
                    for e in 0..=a + 1 {
                        let mut rest: Vec<u32> = d[1..].to_vec();
                        rest.insert(i, e);
                        let w = c.scale(&int(-2 * (2 * e as i64 + 1)));
                        add(a + 1 - e, rest, w);
                    }
                }
            }
        }

        // stable products ω_{g1}(ζ, I) ω_{g2}(−ζ, J∖I)
        for g1 in 0..=g {
            let g2 = g - g1;
            for mask in 0u64..(1 << others) {
                let n1 = mask.count_ones() as usize + 1;
                let n2 = others + 2 - n1;
                if 2 * g1 as i64 - 2 + n1 as i64 <= 0 || 2 * g2 as i64 - 2 + n2 as i64 <= 0 {
                    continue;
                }
                if (g1 == 0 && n1 == 2) || (g2 == 0 && n2 == 2) {
                    continue;
                }
                let w1 = self.compute(g1, n1)?;
                let w2 = self.compute(g2, n2)?;
                for (d1, c1) in &w1.coeffs {
                    for (d2, c2) in &w2.coeffs {
                        let (mut i1, mut i2) = (1, 1);
                        let rest: Vec<u32> = (0..others)
                            .map(|j| {
                                if mask >> j & 1 == 1 {
                                    i1 += 1;
                                    d1[i1 - 1]
                                } else {
                                    i2 += 1;
                                    d2[i2 - 1]
                                }
                            })
                            .collect();
                        add(d1[0] + d2[0] + 2, rest, c1.mul(c2).neg());
                    }
                }
            }
        }

        // Res_{ζ=0} dζ_0 / ((ζ_0² − ζ²) 2ζ Y(ζ²) dζ) · f(ζ) dζ²
        let half = rat(1, 2);
        let mut coeffs: BTreeMap<Vec<u32>, R> = BTreeMap::new();
        for ((k, rest), c) in f {
            if c.is_zero() {
                continue;
            }
            for j in 0..=k {
                let m = (k - j) as usize;
                let q = self.inv_y.get(m).ok_or(Error::InsufficientTruncation {
                    needed: 2 * m + 2,
                    available: self.curve.order().max(0) as usize,
                })?;
                let term = c.mul(q).scale(&half);
                if term.is_zero() {
                    continue;
                }
                let mut d = vec![j];
                d.extend_from_slice(&rest);
                coeffs.entry(d).or_insert_with(R::zero).add_assign(&term);
            }
        }
        coeffs.retain(|_, v| !v.is_zero());
        let form = CorrelatorForm { g, n, coeffs };
        self.cache.write().unwrap().insert((g, n), form.clone());
        Ok(form)
    }

    /// Givental data reproducing this curve:
    /// `t = −y_1`, `R = Id`, `T_b = y_{2b+1} (2b+1)!!`, so that
    /// `c_d = ⟨τ_{d_1} ⋯ τ_{d_n}⟩^Ω_g Π (2d_i + 1)!!`.
    pub fn to_givental(&self, truncation: usize) -> Result<CohFTSpec<R>> {
        curve_to_givental(&self.curve, truncation)
    }
}

/// See [`TrEngine::to_givental`]. The Laplace transform of `y dx` along the
/// steepest-descent line gives `T(u) = u t + Σ_k y_{2k+1} (2k+1)!! u^{k+1}`;
/// the choice `t = −y_1` removes the `u¹` term and sends the Airy curve to
/// `t = −1`, `T = 0`.
pub fn curve_to_givental<R: Ring>(curve: &LocalCurve<R>, truncation: usize) -> Result<CohFTSpec<R>> {
    let y1 = curve.odd_coeff(0).expect("checked at construction");
    let mut legs = Vec::with_capacity(truncation);
    for b in 1..=truncation {
        let yb = curve.odd_coeff(b).ok_or(Error::InsufficientTruncation {
            needed: 2 * b + 2,
            available: curve.order().max(0) as usize,
        })?;
        let df = double_factorial(2 * b as i64 + 1)?;
        legs.push(yb.scale(&Rational::from_integer(df)));
    }
    CohFTSpec::new(vec![vec![int(1)]], vec![y1.neg()], Vec::new(), vec![legs], truncation)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cohft::givental_correlator;
    use crate::kappa::{ordered_compositions, KappaEngine};
    use crate::witten::WittenEngine;

    fn airy_expected(w: &WittenEngine, g: u32, d: &[u32]) -> Rational {
        let df: BigInt = d.iter().map(|&x| double_factorial(2 * x as i64 + 1).unwrap()).product();
        let sign = if d.len().is_multiple_of(2) { 1 } else { -1 };
        w.correlator(g, d) * Rational::from_integer(df) * int(sign)
    }

    #[test]
    fn airy_small() {
        let tr = TrEngine::new(LocalCurve::airy());
        let w11 = tr.correlator(1, 1).unwrap();
        assert_eq!(w11.coeff(&[1]), rat(-1, 8));
        assert_eq!(w11.coeffs.len(), 1);
        let w03 = tr.correlator(0, 3).unwrap();
        assert_eq!(w03.coeff(&[0, 0, 0]), int(-1));
        let w04 = tr.correlator(0, 4).unwrap();
        assert_eq!(w04.coeff(&[1, 0, 0, 0]), int(3));
        assert_eq!(w04.coeff(&[0, 0, 1, 0]), int(3));
    }

    #[test]
    fn airy_matches_witten() {
        let w = WittenEngine::new();
        let tr = TrEngine::new(LocalCurve::airy());
        for (g, n) in [(0u32, 3usize), (0, 4), (0, 5), (1, 1), (1, 2), (1, 3), (2, 1), (2, 2)] {
            let form = tr.correlator(g, n).unwrap();
            let dim = 3 * g + n as u32 - 3;
            for s in 0..=dim {
                for d in ordered_compositions(s, n) {
                    let expect = if s == dim { airy_expected(&w, g, &d) } else { int(0) };
                    assert_eq!(form.coeff(&d), expect, "({g},{n}) {d:?}");
                }
            }
        }
    }

    #[test]
    fn sine_matches_wp() {
        let w = WittenEngine::new();
        let k = KappaEngine::new(&w);
        let tr = TrEngine::new(LocalCurve::sine(16));
        let w11 = tr.correlator(1, 1).unwrap();
        assert_eq!(w11.coeff(&[1]), PiPoly::constant(rat(-1, 8)));
        assert_eq!(w11.coeff(&[0]), PiPoly::monomial(rat(-1, 12), 1));
        for (g, n) in [(0u32, 4usize), (1, 2), (2, 1)] {
            let vol = k.wp_volume(g, n).unwrap();
            let form = tr.correlator(g, n).unwrap();
            for (d, c) in &form.coeffs {
                let lambda = crate::exact::partition_of(d);
                let f: BigInt = d.iter().map(|&x| -factorial(2 * x + 1)).product();
                assert_eq!(*c, vol.coefficient(&lambda).scale(&Rational::from_integer(f)));
            }
            assert_eq!(form.coeffs.len(), {
                let mut count = 0;
                for (lambda, _) in vol.terms() {
                    let mut p = lambda.clone();
                    p.resize(n, 0);
                    p.sort_unstable();
                    let mut c = 1;
                    while crate::exact::volume::next_permutation(&mut p) {
                        c += 1;
                    }
                    count += c;
                }
                count
            });
        }
    }

    #[test]
    fn givental_dictionary() {
        let w = WittenEngine::new();
        let airy = TrEngine::new(LocalCurve::airy());
        let spec = airy.to_givental(4).unwrap();
        assert_eq!(spec.tft(), &[int(-1)]);
        assert_eq!(spec.translation_coeff(0, 1), int(0));
        let sine = TrEngine::new(LocalCurve::sine(16));
        let spec = sine.to_givental(6).unwrap();
        for (g, n) in [(1u32, 1usize), (0, 4), (1, 2)] {
            let form = sine.correlator(g, n).unwrap();
            for (d, c) in &form.coeffs {
                let ins: Vec<(usize, u32)> = d.iter().map(|&x| (0, x)).collect();
                let df: BigInt = d.iter().map(|&x| double_factorial(2 * x as i64 + 1).unwrap()).product();
                let v = givental_correlator(&w, &spec, g, &ins).unwrap();
                assert_eq!(v.scale(&Rational::from_integer(df)), *c);
            }
        }
    }

    #[test]
    fn truncation_is_reported() {
        let tr = TrEngine::new(LocalCurve::sine(4));
        assert!(matches!(tr.correlator(2, 1), Err(Error::InsufficientTruncation { .. })));
    }
}
