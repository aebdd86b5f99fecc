//! Mirzakhani's integral recursion for Weil–Petersson volumes, evaluated by
//! quadrature against the exact lower volumes.
//!
//! The double integral only sees `ℓ + ℓ'` through `C`, so
//! `∫∫ ℓ^p ℓ'^q C(L, ℓ, ℓ') = B(p+1, q+1) ∫ s^{p+q+1} C(L, s, 0) ds`
//! and every term reduces to one-dimensional moments.

use std::collections::{BTreeMap, HashMap};
use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::exact::VolumePoly;
use crate::kappa::KappaEngine;

#[derive(Clone, Debug, PartialEq)]
pub struct QuadratureConfig {
    /// Relative accuracy targeted for every moment.
    pub rel_tol: f64,
    /// Gauss–Legendre nodes per panel.
    pub order: usize,
    /// Total node evaluations allowed per moment.
    pub max_nodes: usize,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self {
            rel_tol: 1e-10,
            order: 24,
            max_nodes: 1 << 16,
        }
    }
}

fn check_length(l: f64) -> Result<()> {
    if l > 0.0 && l.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("boundary length must be positive, got {l}")))
    }
}

/// `B(L, L', ℓ) = 1 − (1/L) log[(cosh(L'/2) + cosh((L+ℓ)/2)) / (cosh(L'/2) + cosh((L−ℓ)/2))]`.
pub fn kernel_b(l: f64, lp: f64, ell: f64) -> Result<f64> {
    check_length(l)?;
    let c = (lp / 2.0).cosh();
    if ell >= l {
        // factor e^{(ℓ±L)/2}/2 out of both cosh terms
        let a = 2.0 * c * (-(ell + l) / 2.0).exp() + (-(ell + l)).exp();
        let b = 2.0 * c * (-(ell - l) / 2.0).exp() + (-(ell - l)).exp();
        Ok((b.ln_1p() - a.ln_1p()) / l)
    } else {
        let num = c + ((l + ell) / 2.0).cosh();
        let den = c + ((l - ell) / 2.0).cosh();
        Ok(1.0 - (num / den).ln() / l)
    }
}

/// `C(L, ℓ, ℓ') = (2/L) log[(e^{L/2} + e^{(ℓ+ℓ')/2}) / (e^{−L/2} + e^{(ℓ+ℓ')/2})]`.
pub fn kernel_c(l: f64, ell: f64, ellp: f64) -> Result<f64> {
    check_length(l)?;
    let s = ell + ellp;
    Ok(2.0 / l * (((l - s) / 2.0).exp().ln_1p() - (-(l + s) / 2.0).exp().ln_1p()))
}

/// Gauss–Legendre nodes and weights on `[−1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            // P_n(x) and P_n'(x) by the three-term recurrence
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 0 {
                1.0
            } else if n == 1 {
                x
            } else {
                p1
            };
            let pm = if n == 1 { 1.0 } else { p0 };
            dp = n as f64 * (x * pn - pm) / (x * x - 1.0);
            let dx = pn / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadratureResult {
    pub value: f64,
    pub error: f64,
    pub nodes: usize,
}

/// `∫_a^b f` by composite Gauss–Legendre, doubling the panel count until two
/// successive estimates agree to `rel_tol / 10`.
pub fn integrate(f: impl Fn(f64) -> f64, a: f64, b: f64, cfg: &QuadratureConfig) -> Result<QuadratureResult> {
    let (x, w) = gauss_legendre(cfg.order);
    let composite = |panels: usize| {
        let h = (b - a) / panels as f64;
        (0..panels)
            .map(|p| {
                let mid = a + h * (p as f64 + 0.5);
                x.iter().zip(&w).map(|(xi, wi)| wi * f(mid + 0.5 * h * xi)).sum::<f64>() * 0.5 * h
            })
            .sum::<f64>()
    };
    let mut panels = 4;
    let mut prev = composite(panels);
    let mut used = panels * cfg.order;
    loop {
        panels *= 2;
        used += panels * cfg.order;
        let next = composite(panels);
        let error = (next - prev).abs();
        if error <= cfg.rel_tol / 10.0 * next.abs() {
            return Ok(QuadratureResult {
                value: next,
                error,
                nodes: used,
            });
        }
        if used > cfg.max_nodes {
            return Err(Error::Tolerance {
                target: cfg.rel_tol,
                achieved: error / next.abs(),
            });
        }
        prev = next;
    }
}

/// `A ∫_Λ^∞ u^k e^{−u/2} du = A 2^{k+1} Γ(k+1, Λ/2)`.
fn exp_tail(k: u32, amplitude: f64, cut: f64) -> f64 {
    let x = cut / 2.0;
    let mut term = 1.0;
    let mut sum = 1.0;
    for j in 1..=k {
        term *= x / j as f64;
        sum += term;
    }
    let kfact: f64 = (1..=k).map(f64::from).product();
    amplitude * 2f64.powi(k as i32 + 1) * kfact * (-x).exp() * sum
}

/// `∫_0^∞ u^k f(u) du` for a positive integrand bounded by
/// `amplitude · e^{−u/2}` beyond `start`.
fn moment(
    k: u32,
    f: impl Fn(f64) -> f64,
    start: f64,
    amplitude: f64,
    cfg: &QuadratureConfig,
) -> Result<QuadratureResult> {
    // the integrand peaks near u = 2k; cut where the tail is negligible
    let mut cut = start.max(2.0 * k as f64) + 20.0;
    loop {
        let body = integrate(|u| u.powi(k as i32) * f(u), 0.0, cut, cfg)?;
        let tail = exp_tail(k, amplitude, cut);
        if tail <= cfg.rel_tol / 10.0 * body.value.abs() {
            return Ok(QuadratureResult {
                value: body.value,
                error: body.error + tail,
                nodes: body.nodes,
            });
        }
        cut += 20.0;
    }
}

/// `∫_0^∞ ℓ^k B(L, L', ℓ) dℓ`.
pub fn moment_b(k: u32, l: f64, lp: f64, cfg: &QuadratureConfig) -> Result<f64> {
    check_length(l)?;
    let amplitude = (2.0 * (lp / 2.0).cosh() + 1.0) * (l / 2.0).exp() / l;
    let f = |u: f64| kernel_b(l, lp, u).expect("checked length");
    Ok(moment(k, f, l, amplitude, cfg)?.value)
}

/// `∫_0^∞ s^k C(L, s, 0) ds`.
pub fn moment_c(k: u32, l: f64, cfg: &QuadratureConfig) -> Result<f64> {
    check_length(l)?;
    let amplitude = 2.0 / l * (l / 2.0).exp();
    let f = |s: f64| kernel_c(l, s, 0.0).expect("checked length");
    Ok(moment(k, f, 0.0, amplitude, cfg)?.value)
}

/// Coefficients of `Π_{i<k} x_i^{2e_i}` after substituting `rest` for the
/// last `n − k` lengths, keyed by `(e_0, …, e_{k−1})`.
fn leading_coefficients(vol: &VolumePoly, k: usize, rest: &[f64]) -> BTreeMap<Vec<u32>, f64> {
    let squares: Vec<f64> = rest.iter().map(|x| x * x).collect();
    let mut out = BTreeMap::new();
    for (lambda, c) in vol.terms() {
        let c = c.eval_f64(PI * PI);
        let mut exps = lambda.clone();
        exps.resize(vol.n(), 0);
        exps.sort_unstable();
        loop {
            let w: f64 = exps[k..].iter().zip(&squares).map(|(&e, x)| x.powi(e as i32)).product();
            *out.entry(exps[..k].to_vec()).or_insert(0.0) += c * w;
            if !crate::exact::volume::next_permutation(&mut exps) {
                break;
            }
        }
    }
    out
}

fn beta_odd(a: u32, b: u32) -> f64 {
    // B(2a+2, 2b+2) = (2a+1)! (2b+1)! / (2a+2b+3)!
    let f = |m: u32| (1..=m).map(f64::from).product::<f64>();
    f(2 * a + 1) * f(2 * b + 1) / f(2 * a + 2 * b + 3)
}

fn stable(g: u32, n: usize) -> bool {
    2 * g as i64 - 2 + n as i64 > 0
}

/// Right-hand side of the recursion at `lengths`, with lower volumes exact.
pub fn mirzakhani_rhs(kappa: &KappaEngine, g: u32, lengths: &[f64], cfg: &QuadratureConfig) -> Result<f64> {
    let n = lengths.len();
    if 2 * g as i64 - 2 + n as i64 <= 1 {
        return Err(Error::Precondition(format!(
            "the recursion applies for 2g - 2 + n > 1, got ({g},{n})"
        )));
    }
    for &l in lengths {
        check_length(l)?;
    }
    let mut volumes: HashMap<(u32, usize), VolumePoly> = HashMap::new();
    let mut volume = |g: u32, n: usize| -> Result<VolumePoly> {
        if let Some(v) = volumes.get(&(g, n)) {
            return Ok(v.clone());
        }
        let v = kappa.wp_volume(g, n)?;
        volumes.insert((g, n), v.clone());
        Ok(v)
    };
    let l1 = lengths[0];
    let mut total = 0.0;

    for m in 1..n {
        if !stable(g, n - 1) {
            continue;
        }
        let rest: Vec<f64> = (1..n).filter(|&i| i != m).map(|i| lengths[i]).collect();
        for (e, c) in leading_coefficients(&volume(g, n - 1)?, 1, &rest) {
            total += c * moment_b(2 * e[0] + 1, l1, lengths[m], cfg)?;
        }
    }

    let mut pairs: BTreeMap<(u32, u32), f64> = BTreeMap::new();
    if g >= 1 && stable(g - 1, n + 1) {
        for (e, c) in leading_coefficients(&volume(g - 1, n + 1)?, 2, &lengths[1..]) {
            *pairs.entry((e[0], e[1])).or_insert(0.0) += c;
        }
    }
    let others = n - 1;
    for g1 in 0..=g {
        for mask in 0u32..(1 << others) {
            let i1: Vec<f64> = (0..others)
                .filter(|j| mask >> j & 1 == 1)
                .map(|j| lengths[j + 1])
                .collect();
            let i2: Vec<f64> = (0..others)
                .filter(|j| mask >> j & 1 == 0)
                .map(|j| lengths[j + 1])
                .collect();
            let (n1, n2) = (i1.len() + 1, i2.len() + 1);
            if !stable(g1, n1) || !stable(g - g1, n2) {
                continue;
            }
            let a = leading_coefficients(&volume(g1, n1)?, 1, &i1);
            let b = leading_coefficients(&volume(g - g1, n2)?, 1, &i2);
            for (ea, ca) in &a {
                for (eb, cb) in &b {
                    *pairs.entry((ea[0], eb[0])).or_insert(0.0) += ca * cb;
                }
            }
        }
    }
    for ((a, b), c) in pairs {
        total += 0.5 * c * beta_odd(a, b) * moment_c(2 * a + 2 * b + 3, l1, cfg)?;
    }
    Ok(total)
}

#[derive(Clone, Debug, PartialEq)]
pub struct CheckRow {
    pub lengths: Vec<f64>,
    pub symbolic: f64,
    pub quadrature: f64,
    pub rel_err: f64,
    pub pass: bool,
}

/// Compares the recursion against the exact volume at `samples` random
/// points of `(0, 3]^n`.
pub fn mirzakhani_check(
    kappa: &KappaEngine,
    g: u32,
    n: usize,
    samples: usize,
    seed: u64,
    tol: f64,
) -> Result<Vec<CheckRow>> {
    let cfg = QuadratureConfig {
        rel_tol: (tol * 1e-3).max(1e-13),
        ..QuadratureConfig::default()
    };
    let vol = kappa.wp_volume(g, n)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..samples)
        .map(|_| {
            let lengths: Vec<f64> = (0..n).map(|_| 3.0 - rng.gen_range(0.0..3.0)).collect();
            let symbolic = vol.eval_f64(&lengths, PI * PI);
            let quadrature = mirzakhani_rhs(kappa, g, &lengths, &cfg)?;
            let rel_err = ((quadrature - symbolic) / symbolic).abs();
            Ok(CheckRow {
                lengths,
                symbolic,
                quadrature,
                rel_err,
                pass: rel_err < tol,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::witten::WittenEngine;

    #[test]
    fn kernels() {
        for l in [0.3f64, 1.0, 2.5] {
            let expect = 2.0 / l * (((l / 2.0).exp() + 1.0) / ((-l / 2.0).exp() + 1.0)).ln();
            assert!((kernel_c(l, 0.0, 0.0).unwrap() - expect).abs() < 1e-14);
            assert!((kernel_b(l, 0.7, 0.0).unwrap() - 1.0).abs() < 1e-14);
            // both branches of B agree near the switch
            let below = kernel_b(l, 0.7, l * (1.0 - 1e-12)).unwrap();
            let above = kernel_b(l, 0.7, l).unwrap();
            assert!((below - above).abs() < 1e-9);
            let mut prev_b = f64::INFINITY;
            let mut prev_c = f64::INFINITY;
            for i in 0..200 {
                let t = i as f64 * 0.25;
                let b = kernel_b(l, 1.3, t).unwrap();
                let c = kernel_c(l, t / 2.0, t / 2.0).unwrap();
                assert!(b > 0.0 && b <= 1.0 + 1e-15 && b <= prev_b);
                assert!(c > 0.0 && c <= 1.0 + 1e-15 && c <= prev_c);
                prev_b = b;
                prev_c = c;
            }
        }
        assert!(kernel_b(0.0, 1.0, 1.0).is_err());
        assert!(kernel_c(-1.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn gauss_legendre_exact_on_polynomials() {
        let (x, w) = gauss_legendre(10);
        for k in 0..20 {
            let q: f64 = x.iter().zip(&w).map(|(xi, wi)| wi * xi.powi(k)).sum();
            let exact = if k % 2 == 1 { 0.0 } else { 2.0 / (k as f64 + 1.0) };
            assert!((q - exact).abs() < 1e-14, "{k}");
        }
    }

    #[test]
    fn table_values() {
        let w = WittenEngine::new();
        let k = KappaEngine::new(&w);
        let cfg = QuadratureConfig::default();
        let v = mirzakhani_rhs(&k, 0, &[1.0, 2.0, 3.0, 4.0], &cfg).unwrap();
        let expect = (1.0 + 4.0 + 9.0 + 16.0) / 2.0 + 2.0 * PI * PI;
        assert!(((v - expect) / expect).abs() < 1e-6);
        assert!(mirzakhani_rhs(&k, 1, &[1.0], &cfg).is_err());
    }

    #[test]
    fn random_samples() {
        let w = WittenEngine::new();
        let k = KappaEngine::new(&w);
        for (g, n) in [(0, 4), (1, 2), (0, 5), (2, 1)] {
            for row in mirzakhani_check(&k, g, n, 5, 11, 1e-6).unwrap() {
                assert!(row.pass, "({g},{n}) {row:?}");
            }
        }
    }
}
