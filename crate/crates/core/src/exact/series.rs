//! Truncated formal Laurent series `Σ_{k < order} c_k x^k` with a finite
//! principal part.

use super::numbers::{int, Rational};
use super::ring::Ring;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct TruncatedSeries<R: Ring> {
    var: String,
    /// Exponent of `coeffs[0]`.
    start: i32,
    coeffs: Vec<R>,
    /// Every exponent `< order` is known exactly; the rest is `O(x^order)`.
    order: i32,
}

impl<R: Ring> TruncatedSeries<R> {
    /// Series with coefficients `coeffs[i]` at exponent `start + i`, known up
    /// to `O(x^order)`. Coefficients at exponents `>= order` are dropped.
    pub fn new(var: &str, start: i32, mut coeffs: Vec<R>, order: i32) -> Self {
        let keep = (order - start).max(0) as usize;
        coeffs.truncate(keep);
        let len = coeffs.len();
        coeffs.extend((len..keep).map(|_| R::zero()));
        Self {
            var: var.to_string(),
            start: start.min(order),
            coeffs,
            order,
        }
    }

    pub fn zero(var: &str, order: i32) -> Self {
        Self::new(var, 0, Vec::new(), order)
    }

    pub fn one(var: &str, order: i32) -> Self {
        Self::new(var, 0, vec![R::one()], order)
    }

    /// Power series from coefficients of `x^0, x^1, ...`.
    pub fn from_coeffs(var: &str, coeffs: Vec<R>, order: i32) -> Self {
        Self::new(var, 0, coeffs, order)
    }

    pub fn var(&self) -> &str {
        &self.var
    }

    pub fn order(&self) -> i32 {
        self.order
    }

    /// Coefficient of `x^k`; panics if `k` lies beyond the truncation order.
    pub fn coeff(&self, k: i32) -> R {
        assert!(k < self.order, "coefficient x^{k} beyond O(x^{})", self.order);
        if k < self.start {
            return R::zero();
        }
        self.coeffs[(k - self.start) as usize].clone()
    }

    /// Lowest exponent with a nonzero coefficient.
    pub fn valuation(&self) -> Option<i32> {
        self.coeffs
            .iter()
            .position(|c| !c.is_zero())
            .map(|i| self.start + i as i32)
    }

    pub fn truncate(&self, order: i32) -> Self {
        let order = order.min(self.order);
        Self::new(&self.var, self.start, self.coeffs.clone(), order)
    }

    fn combine(&self, other: &Self, f: impl Fn(&R, &R) -> R) -> Self {
        let order = self.order.min(other.order);
        let start = self.start.min(other.start).min(order);
        let coeffs = (start..order)
            .map(|k| f(&self.coeff_or_zero(k), &other.coeff_or_zero(k)))
            .collect();
        Self::new(&self.var, start, coeffs, order)
    }

    fn coeff_or_zero(&self, k: i32) -> R {
        if k < self.start || k >= self.order {
            R::zero()
        } else {
            self.coeffs[(k - self.start) as usize].clone()
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        self.combine(other, |a, b| a.add(b))
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.combine(other, |a, b| a.sub(b))
    }

    pub fn scale(&self, c: &R) -> Self {
        Self::new(
            &self.var,
            self.start,
            self.coeffs.iter().map(|a| a.mul(c)).collect(),
            self.order,
        )
    }

    /// Multiplies by `x^k`.
    pub fn shift(&self, k: i32) -> Self {
        Self::new(&self.var, self.start + k, self.coeffs.clone(), self.order + k)
    }

    pub fn mul(&self, other: &Self) -> Self {
        let va = self.valuation().unwrap_or(self.order);
        let vb = other.valuation().unwrap_or(other.order);
        let order = (self.order + vb).min(other.order + va);
        let start = (va + vb).min(order);
        let mut coeffs = vec![R::zero(); (order - start) as usize];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            let ea = self.start + i as i32;
            for (j, b) in other.coeffs.iter().enumerate() {
                let e = ea + other.start + j as i32;
                if e >= order {
                    break;
                }
                if !b.is_zero() {
                    coeffs[(e - start) as usize].add_assign(&a.mul(b));
                }
            }
        }
        Self::new(&self.var, start, coeffs, order)
    }

    /// Multiplicative inverse; the leading coefficient must be a unit.
    pub fn inverse(&self) -> Result<Self> {
        let v = self
            .valuation()
            .ok_or_else(|| Error::Domain("inverse of a series known to be zero".into()))?;
        let lead = self.coeff(v);
        let lead_inv = lead
            .inverse()
            .ok_or_else(|| Error::Domain("leading coefficient is not a unit".into()))?;
        // relative precision of self is order - v; the inverse keeps it
        let len = (self.order - v) as usize;
        let a: Vec<R> = (0..len).map(|i| self.coeff(v + i as i32)).collect();
        let mut b: Vec<R> = Vec::with_capacity(len);
        for k in 0..len {
            let mut s = if k == 0 { R::one() } else { R::zero() };
            for j in 1..=k {
                s = s.sub(&a[j].mul(&b[k - j]));
            }
            b.push(s.mul(&lead_inv));
        }
        Ok(Self::new(&self.var, -v, b, self.order - 2 * v))
    }

    /// Coefficient of `x^{-1}`.
    pub fn residue(&self) -> R {
        self.coeff_or_zero(-1)
    }

    /// `f(g(x))` for a power series `f` and `g` with zero constant term.
    pub fn compose(&self, g: &Self) -> Result<Self> {
        if self.start < 0 && self.valuation().is_some_and(|v| v < 0) {
            return Err(Error::Domain("compose: outer series has a principal part".into()));
        }
        let vg = g.valuation().unwrap_or(g.order);
        if vg < 1 {
            return Err(Error::Domain(
                "compose: inner series must have positive valuation".into(),
            ));
        }
        // g^k = O(x^{k vg}); terms of f beyond its own order are unknown, so
        // the result is known up to min(g.order, vg * f.order).
        let order = g.order.min(vg.saturating_mul(self.order));
        let mut acc = Self::zero(&g.var, order);
        let mut power = Self::one(&g.var, order);
        for k in 0..self.order {
            if k * vg >= order {
                break;
            }
            let c = self.coeff_or_zero(k);
            if !c.is_zero() {
                acc = acc.add(&power.scale(&c));
            }
            power = power.mul(g).truncate(order);
        }
        Ok(acc)
    }

    /// `exp(f)` for `f` with zero constant term.
    pub fn exp(&self) -> Result<Self> {
        let v = self.valuation().unwrap_or(self.order);
        if v < 1 {
            return Err(Error::Domain("exp: series must have positive valuation".into()));
        }
        // E' = f' E, solved coefficientwise
        let order = self.order;
        let n = order.max(0) as usize;
        let f: Vec<R> = (0..n).map(|k| self.coeff_or_zero(k as i32)).collect();
        let mut e: Vec<R> = Vec::with_capacity(n);
        for k in 0..n {
            if k == 0 {
                e.push(R::one());
                continue;
            }
            let mut s = R::zero();
            for j in 1..=k {
                s.add_assign(&f[j].mul(&e[k - j]).scale(&int(j as i64)));
            }
            e.push(s.scale(&(Rational::one() / int(k as i64))));
        }
        Ok(Self::new(&self.var, 0, e, order))
    }

    /// Substitutes `x -> c x`.
    pub fn rescale_var(&self, c: &R) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, a)| {
                let e = self.start + i as i32;
                let factor = if e >= 0 {
                    c.pow(e as u32)
                } else {
                    c.inverse().expect("rescale by a non-unit").pow((-e) as u32)
                };
                a.mul(&factor)
            })
            .collect();
        Self::new(&self.var, self.start, coeffs, self.order)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::numbers::rat;
    use crate::exact::poly::UniPoly;

    fn q(v: &[(i64, i64)]) -> Vec<Rational> {
        v.iter().map(|&(a, b)| rat(a, b)).collect()
    }

    #[test]
    fn exp_of_x() {
        let x = TruncatedSeries::from_coeffs("u", q(&[(0, 1), (1, 1)]), 6);
        let e = x.exp().unwrap();
        let expect = q(&[(1, 1), (1, 1), (1, 2), (1, 6), (1, 24), (1, 120)]);
        for (k, c) in expect.iter().enumerate() {
            assert_eq!(&e.coeff(k as i32), c);
        }
    }

    #[test]
    fn inverse_with_principal_part() {
        // x + x^2 truncated at x^5; its inverse is x^{-1} - 1 + x - x^2 ...
        let s = TruncatedSeries::from_coeffs("z", q(&[(0, 1), (1, 1), (1, 1)]), 5);
        let inv = s.inverse().unwrap();
        assert_eq!(inv.coeff(-1), rat(1, 1));
        assert_eq!(inv.coeff(0), rat(-1, 1));
        assert_eq!(inv.coeff(1), rat(1, 1));
        assert_eq!(inv.residue(), rat(1, 1));
        let prod = s.mul(&inv);
        assert_eq!(prod.coeff(0), rat(1, 1));
        for k in 1..prod.order() {
            assert_eq!(prod.coeff(k), rat(0, 1));
        }
    }

    #[test]
    fn compose_geometric() {
        // 1/(1-y) with y = 2x gives 1 + 2x + 4x^2 + ...
        let geo = TruncatedSeries::from_coeffs("y", vec![rat(1, 1); 6], 6);
        let y = TruncatedSeries::from_coeffs("x", q(&[(0, 1), (2, 1)]), 6);
        let c = geo.compose(&y).unwrap();
        for k in 0..6 {
            assert_eq!(c.coeff(k), rat(1 << k, 1));
        }
    }

    #[test]
    fn works_over_pipoly() {
        // exp(-p u) with p = pi^2 formal
        let f =
            TruncatedSeries::<UniPoly>::from_coeffs("u", vec![UniPoly::default(), UniPoly::monomial(rat(-1, 1), 1)], 4);
        let e = f.exp().unwrap();
        assert_eq!(e.coeff(2), UniPoly::monomial(rat(1, 2), 2));
        assert_eq!(e.coeff(3), UniPoly::monomial(rat(-1, 6), 3));
    }
}
