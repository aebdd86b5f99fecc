//! Cohomological field theories in the Givental orbit of a diagonal TFT,
//! evaluated at the level of correlators.
//!
//! A spec holds the TFT scalars `t^μ`, the pairing `η`, a rotation
//! `R(u) = Σ R_k u^k` and a translation `T^μ(u) = Σ_{b≥1} T^μ_b u^{b+1}`.
//! Correlators of `RTw` are computed as a sum over stable graphs.

use std::collections::HashMap;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::error::{check_stable, Error, Result};
use crate::exact::numbers::{bernoulli, factorial, int, parse_rational, Rational};
use crate::exact::{HodgePoly, PiPoly, Ring, TruncatedSeries, UniPoly};
use crate::stable_graphs::{enumerate, StableGraph};
use crate::witten::{multisets_with_sum, WittenEngine};

/// Square matrix over a coefficient ring, row-major: `m[a][b]` is `m^a_b`.
pub type Matrix<R> = Vec<Vec<R>>;

fn identity<R: Ring>(r: usize) -> Matrix<R> {
    (0..r)
        .map(|a| (0..r).map(|b| if a == b { R::one() } else { R::zero() }).collect())
        .collect()
}

fn zero_matrix<R: Ring>(r: usize) -> Matrix<R> {
    vec![vec![R::zero(); r]; r]
}

fn mat_mul<R: Ring>(a: &Matrix<R>, b: &Matrix<R>) -> Matrix<R> {
    let r = a.len();
    (0..r)
        .map(|i| {
            (0..r)
                .map(|j| (0..r).fold(R::zero(), |acc, k| acc.add(&a[i][k].mul(&b[k][j]))))
                .collect()
        })
        .collect()
}

fn transpose<R: Ring>(a: &Matrix<R>) -> Matrix<R> {
    let r = a.len();
    (0..r).map(|i| (0..r).map(|j| a[j][i].clone()).collect()).collect()
}

fn is_square<T>(m: &[Vec<T>], dim: usize) -> bool {
    m.len() == dim && m.iter().all(|row| row.len() == dim)
}

fn lift<R: Ring>(a: &Matrix<Rational>) -> Matrix<R> {
    a.iter()
        .map(|row| row.iter().map(|q| R::from_rational(q.clone())).collect())
        .collect()
}

/// Inverse of a rational matrix by Gauss–Jordan elimination.
pub fn invert_rational(a: &Matrix<Rational>) -> Result<Matrix<Rational>> {
    let r = a.len();
    let mut m: Vec<Vec<Rational>> = a
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut row = row.clone();
            row.extend((0..r).map(|j| if i == j { Rational::one() } else { Rational::zero() }));
            row
        })
        .collect();
    for col in 0..r {
        let pivot = (col..r)
            .find(|&i| !m[i][col].is_zero())
            .ok_or_else(|| Error::Precondition("pairing is degenerate".into()))?;
        m.swap(col, pivot);
        let inv = m[col][col].recip();
        for x in m[col].iter_mut() {
            *x *= &inv;
        }
        for i in 0..r {
            if i != col && !m[i][col].is_zero() {
                let f = m[i][col].clone();
                for j in 0..2 * r {
                    let sub = &f * &m[col][j];
                    m[i][j] -= sub;
                }
            }
        }
    }
    Ok(m.into_iter().map(|row| row[r..].to_vec()).collect())
}

#[derive(Clone, Debug, PartialEq)]
pub struct CohFTSpec<R: Ring> {
    dim: usize,
    eta: Matrix<Rational>,
    eta_inv: Matrix<Rational>,
    tft: Vec<R>,
    /// `rotation[k]` is `R_k`; missing entries up to `truncation` are zero.
    rotation: Vec<Matrix<R>>,
    /// `translation[μ][b - 1]` is `T^μ_b`.
    translation: Vec<Vec<R>>,
    /// `R_k` and `T_b` are known for `k, b <= truncation`.
    truncation: usize,
}

impl<R: Ring> CohFTSpec<R> {
    pub fn new(
        eta: Matrix<Rational>,
        tft: Vec<R>,
        rotation: Vec<Matrix<R>>,
        translation: Vec<Vec<R>>,
        truncation: usize,
    ) -> Result<Self> {
        let dim = tft.len();
        if dim == 0 || !is_square(&eta, dim) || !rotation.iter().all(|m| is_square(m, dim)) || translation.len() != dim
        {
            return Err(Error::Precondition("inconsistent CohFT dimensions".into()));
        }
        if (0..dim).any(|a| (0..dim).any(|b| eta[a][b] != eta[b][a])) {
            return Err(Error::Precondition("pairing is not symmetric".into()));
        }
        if tft.iter().any(|t| t.inverse().is_none()) {
            return Err(Error::Precondition("TFT scalars must be units".into()));
        }
        if let Some(r0) = rotation.first() {
            if *r0 != identity(dim) {
                return Err(Error::Precondition("R_0 must be the identity".into()));
            }
        }
        let eta_inv = invert_rational(&eta)?;
        let spec = Self {
            dim,
            eta,
            eta_inv,
            tft,
            rotation,
            translation,
            truncation,
        };
        spec.check_symplectic()?;
        Ok(spec)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn truncation(&self) -> usize {
        self.truncation
    }

    pub fn tft(&self) -> &[R] {
        &self.tft
    }

    pub fn eta(&self) -> &Matrix<Rational> {
        &self.eta
    }

    pub fn rotation_coeff(&self, k: usize) -> Matrix<R> {
        match self.rotation.get(k) {
            Some(m) => m.clone(),
            None if k == 0 => identity(self.dim),
            None => zero_matrix(self.dim),
        }
    }

    pub fn translation_coeff(&self, mu: usize, b: usize) -> R {
        self.translation[mu].get(b - 1).cloned().unwrap_or_else(R::zero)
    }

    /// `Σ_{a+b=k} (−1)^b R_a η⁻¹ R_bᵀ = δ_{k,0} η⁻¹` for `k <= truncation`.
    pub fn check_symplectic(&self) -> Result<()> {
        let eta_inv: Matrix<R> = lift(&self.eta_inv);
        // beyond twice the stored length every term is zero
        let top = self.truncation.min(2 * self.rotation.len());
        for k in 0..=top {
            let mut acc = zero_matrix::<R>(self.dim);
            for a in 0..=k {
                let term = mat_mul(
                    &mat_mul(&self.rotation_coeff(a), &eta_inv),
                    &transpose(&self.rotation_coeff(k - a)),
                );
                for i in 0..self.dim {
                    for j in 0..self.dim {
                        acc[i][j] = if (k - a) % 2 == 0 {
                            acc[i][j].add(&term[i][j])
                        } else {
                            acc[i][j].sub(&term[i][j])
                        };
                    }
                }
            }
            let expect = if k == 0 { eta_inv.clone() } else { zero_matrix(self.dim) };
            if acc != expect {
                return Err(Error::Precondition(format!(
                    "rotation fails the symplectic condition at order u^{k}"
                )));
            }
        }
        Ok(())
    }

    /// `v1 ⋆ v2` with `e_μ ⋆ e_ν = Σ_{α,β} w_{0;μνα} η^{αβ} e_β`.
    pub fn quantum_product(&self, v1: &[R], v2: &[R]) -> Vec<R> {
        let mut out = vec![R::zero(); self.dim];
        for mu in 0..self.dim {
            let w = v1[mu].mul(&v2[mu]).mul(&self.tft[mu].inverse().expect("unit"));
            if w.is_zero() {
                continue;
            }
            for (beta, slot) in out.iter_mut().enumerate() {
                slot.add_assign(&w.scale(&self.eta_inv[mu][beta]));
            }
        }
        out
    }

    /// `η(v1, v2)`.
    pub fn pairing(&self, v1: &[R], v2: &[R]) -> R {
        let mut acc = R::zero();
        for a in 0..self.dim {
            for b in 0..self.dim {
                acc.add_assign(&v1[a].mul(&v2[b]).scale(&self.eta[a][b]));
            }
        }
        acc
    }

    /// Edge kernel `E(u,v)` through total degree `order`.
    pub fn edge_kernel(&self, order: usize) -> Result<EdgeKernel<R>> {
        EdgeKernel::new(self, order)
    }
}

/// `E(u,v) = (η⁻¹ − R(u) η⁻¹ R(v)ᵀ) / (u + v) = Σ E_{k,l} u^k v^l`.
#[derive(Clone, Debug)]
pub struct EdgeKernel<R: Ring> {
    order: usize,
    coeffs: Vec<Vec<Matrix<R>>>,
    vanishes: bool,
}

impl<R: Ring> EdgeKernel<R> {
    fn new(spec: &CohFTSpec<R>, order: usize) -> Result<Self> {
        if order + 1 > spec.truncation {
            return Err(Error::InsufficientTruncation {
                needed: order + 1,
                available: spec.truncation,
            });
        }
        let r = spec.dim;
        let eta_inv: Matrix<R> = lift(&spec.eta_inv);
        let rot: Vec<Matrix<R>> = (0..=order + 1).map(|k| spec.rotation_coeff(k)).collect();
        let rot_t: Vec<Matrix<R>> = rot.iter().map(transpose).collect();
        let numer = |k: usize, l: usize| -> Matrix<R> {
            let prod = mat_mul(&mat_mul(&rot[k], &eta_inv), &rot_t[l]);
            let mut m = zero_matrix::<R>(r);
            for i in 0..r {
                for j in 0..r {
                    let base = if k == 0 && l == 0 {
                        eta_inv[i][j].clone()
                    } else {
                        R::zero()
                    };
                    m[i][j] = base.sub(&prod[i][j]);
                }
            }
            m
        };
        let mut coeffs: Vec<Vec<Matrix<R>>> = Vec::with_capacity(order + 1);
        for k in 0..=order {
            let mut row = Vec::with_capacity(order + 1 - k);
            for l in 0..=order - k {
                let n = numer(k, l + 1);
                let e = if k == 0 {
                    n
                } else {
                    let prev: &Matrix<R> = &coeffs[k - 1][l + 1];
                    (0..r)
                        .map(|i| (0..r).map(|j| n[i][j].sub(&prev[i][j])).collect())
                        .collect()
                };
                row.push(e);
            }
            coeffs.push(row);
        }
        // the u^k v^0 coefficients of (u+v)E must reproduce the numerator
        if numer(0, 0) != zero_matrix(r) {
            return Err(Error::Precondition("edge numerator has a constant term".into()));
        }
        for k in 1..=order + 1 {
            if numer(k, 0) != coeffs[k - 1][0] {
                return Err(Error::Precondition(format!(
                    "edge numerator not divisible by u + v at degree {k}"
                )));
            }
        }
        let vanishes = coeffs.iter().flatten().all(|m| m.iter().flatten().all(Ring::is_zero));
        Ok(Self {
            order,
            coeffs,
            vanishes,
        })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// `E^{μν}_{k,l}`.
    pub fn coeff(&self, k: usize, l: usize, mu: usize, nu: usize) -> R {
        if k + l > self.order {
            panic!("edge coefficient beyond the computed order");
        }
        self.coeffs[k][l][mu][nu].clone()
    }

    pub fn vanishes(&self) -> bool {
        self.vanishes
    }
}

/// `Σ_m 1/m! Σ_{b_1..b_m ≥ 1} Π T_{b_j} ⟨τ_d τ_{b_1+1} ⋯ τ_{b_m+1}⟩_g`, where
/// `legs[b - 1] = T_b`.
pub fn translated_correlator<R: Ring>(engine: &WittenEngine, legs: &[R], g: u32, d: &[u32]) -> R {
    let n = d.len() as i64;
    let dim = 3 * g as i64 - 3 + n;
    let excess = dim - d.iter().map(|&x| x as i64).sum::<i64>();
    if excess < 0 || 2 * g as i64 - 2 + n <= 0 && excess == 0 {
        return R::zero();
    }
    let excess = excess as u32;
    let mut total = R::zero();
    for m in 0..=excess as usize {
        let mut parts = Vec::new();
        if m == 0 {
            if excess == 0 {
                parts.push(Vec::new());
            }
        } else {
            multisets_with_sum(excess, m, excess, &mut Vec::new(), &mut parts);
        }
        for bs in parts {
            if bs.contains(&0) {
                continue;
            }
            let mut coeff = R::one();
            let mut ok = true;
            for &b in &bs {
                match legs.get(b as usize - 1) {
                    Some(t) if !t.is_zero() => coeff = coeff.mul(t),
                    _ => {
                        ok = false;
                        break;
                    }
                }
            }
            if !ok {
                continue;
            }
            let mut all = d.to_vec();
            all.extend(bs.iter().map(|&b| b + 1));
            let v = engine.correlator(g, &all);
            if v.is_zero() {
                continue;
            }
            let sym: BigInt = multiplicities(&bs).iter().map(|&k| factorial(k)).product();
            total.add_assign(&coeff.scale(&(v / Rational::from_integer(sym))));
        }
    }
    total
}

fn multiplicities(sorted: &[u32]) -> Vec<u32> {
    let mut out = Vec::new();
    let mut i = 0;
    while i < sorted.len() {
        let j = (i..sorted.len())
            .find(|&j| sorted[j] != sorted[i])
            .unwrap_or(sorted.len());
        out.push((j - i) as u32);
        i = j;
    }
    out
}

/// Correlator `⟨τ_{μ_1,d_1} ⋯ τ_{μ_n,d_n}⟩_g` of `RTw`.
pub fn givental_correlator<R: Ring>(
    engine: &WittenEngine,
    spec: &CohFTSpec<R>,
    g: u32,
    insertions: &[(usize, u32)],
) -> Result<R> {
    let n = insertions.len();
    check_stable(g, n)?;
    if insertions.iter().any(|&(mu, _)| mu >= spec.dim) {
        return Err(Error::Precondition("insertion index out of range".into()));
    }
    let dim = 3 * g as usize + n - 3;
    if spec.truncation < dim {
        return Err(Error::InsufficientTruncation {
            needed: dim,
            available: spec.truncation,
        });
    }
    let kernel = if dim >= 1 {
        Some(spec.edge_kernel(dim - 1)?)
    } else {
        None
    };
    let rot: Vec<Matrix<R>> = (0..=dim).map(|k| spec.rotation_coeff(k)).collect();
    let t_inv: Vec<R> = spec.tft.iter().map(|t| t.inverse().expect("unit")).collect();
    let legs: Vec<Vec<R>> = (0..spec.dim)
        .map(|mu| {
            (1..=dim)
                .map(|b| spec.translation_coeff(mu, b).mul(&t_inv[mu]))
                .collect()
        })
        .collect();
    let mut memo: HashMap<(usize, u32, Vec<u32>), R> = HashMap::new();
    let mut total = R::zero();
    for graph in enumerate(g, n)? {
        if graph.codim() > 0 && kernel.as_ref().is_none_or(|k| k.vanishes()) {
            continue;
        }
        let ctx = GraphSum {
            engine,
            spec,
            graph: &graph,
            insertions,
            kernel: kernel.as_ref(),
            rot: &rot,
            legs: &legs,
            t_inv: &t_inv,
        };
        let c = ctx.evaluate(&mut memo);
        if !c.is_zero() {
            total.add_assign(&c.scale(&Rational::new(BigInt::from(1), BigInt::from(graph.automorphisms()))));
        }
    }
    Ok(total)
}

struct GraphSum<'a, R: Ring> {
    engine: &'a WittenEngine,
    spec: &'a CohFTSpec<R>,
    graph: &'a StableGraph,
    insertions: &'a [(usize, u32)],
    kernel: Option<&'a EdgeKernel<R>>,
    rot: &'a [Matrix<R>],
    legs: &'a [Vec<R>],
    t_inv: &'a [R],
}

impl<R: Ring> GraphSum<'_, R> {
    fn evaluate(&self, memo: &mut HashMap<(usize, u32, Vec<u32>), R>) -> R {
        let nv = self.graph.num_vertices();
        let mut alpha = vec![0usize; nv];
        let mut total = R::zero();
        loop {
            total.add_assign(&self.with_indices(&alpha, memo));
            let mut i = 0;
            while i < nv {
                alpha[i] += 1;
                if alpha[i] < self.spec.dim {
                    break;
                }
                alpha[i] = 0;
                i += 1;
            }
            if i == nv {
                break;
            }
        }
        total
    }

    fn with_indices(&self, alpha: &[usize], memo: &mut HashMap<(usize, u32, Vec<u32>), R>) -> R {
        let graph = self.graph;
        let nv = graph.num_vertices();
        let budget: Vec<i64> = (0..nv)
            .map(|v| 3 * graph.genera()[v] as i64 - 3 + graph.valence(v) as i64)
            .collect();
        let mut exps: Vec<Vec<u32>> = vec![Vec::new(); nv];
        let mut used = vec![0i64; nv];
        let mut total = R::zero();
        self.leaf_step(0, alpha, &budget, &mut exps, &mut used, R::one(), &mut total, memo);
        total
    }

    #[allow(clippy::too_many_arguments)]
    fn leaf_step(
        &self,
        i: usize,
        alpha: &[usize],
        budget: &[i64],
        exps: &mut Vec<Vec<u32>>,
        used: &mut Vec<i64>,
        weight: R,
        total: &mut R,
        memo: &mut HashMap<(usize, u32, Vec<u32>), R>,
    ) {
        if i == self.insertions.len() {
            self.edge_step(0, alpha, budget, exps, used, weight, total, memo);
            return;
        }
        let v = self.graph.leaves()[i];
        let (mu, d) = self.insertions[i];
        let mut k = 0usize;
        while used[v] + d as i64 + k as i64 <= budget[v] {
            let r = &self.rot[k][alpha[v]][mu];
            if !r.is_zero() {
                exps[v].push(d + k as u32);
                used[v] += d as i64 + k as i64;
                self.leaf_step(i + 1, alpha, budget, exps, used, weight.mul(r), total, memo);
                used[v] -= d as i64 + k as i64;
                exps[v].pop();
            }
            k += 1;
        }
    }

    #[allow(clippy::too_many_arguments)]
    fn edge_step(
        &self,
        e: usize,
        alpha: &[usize],
        budget: &[i64],
        exps: &mut Vec<Vec<u32>>,
        used: &mut Vec<i64>,
        weight: R,
        total: &mut R,
        memo: &mut HashMap<(usize, u32, Vec<u32>), R>,
    ) {
        let edges = self.graph.edges();
        if e == edges.len() {
            let mut w = weight;
            for v in 0..self.graph.num_vertices() {
                let gv = self.graph.genera()[v];
                let mu = alpha[v];
                let mut key = exps[v].clone();
                key.sort_unstable_by(|a, b| b.cmp(a));
                let chi = 2 * gv as i64 - 2 + key.len() as i64;
                let vertex = memo
                    .entry((mu, gv, key.clone()))
                    .or_insert_with(|| {
                        translated_correlator(self.engine, &self.legs[mu], gv, &key)
                            .mul(&self.t_inv[mu].pow(chi as u32))
                    })
                    .clone();
                if vertex.is_zero() {
                    return;
                }
                w = w.mul(&vertex);
            }
            total.add_assign(&w);
            return;
        }
        let kernel = self.kernel.expect("graphs with edges need a kernel");
        let (a, b) = edges[e];
        let (ma, mb) = (alpha[a], alpha[b]);
        for k in 0..=kernel.order() {
            used[a] += k as i64;
            if used[a] <= budget[a] {
                for l in 0..=kernel.order() - k {
                    used[b] += l as i64;
                    if used[a] <= budget[a] && used[b] <= budget[b] {
                        let c = kernel.coeff(k, l, ma, mb);
                        if !c.is_zero() {
                            exps[a].push(k as u32);
                            exps[b].push(l as u32);
                            self.edge_step(e + 1, alpha, budget, exps, used, weight.mul(&c), total, memo);
                            exps[b].pop();
                            exps[a].pop();
                        }
                    }
                    used[b] -= l as i64;
                }
            }
            used[a] -= k as i64;
        }
    }
}

/// Trivial one-dimensional CohFT: `t = 1`, `R = Id`, `T = 0`.
pub fn preset_trivial<R: Ring>() -> CohFTSpec<R> {
    CohFTSpec::new(
        vec![vec![int(1)]],
        vec![R::one()],
        vec![identity(1)],
        vec![Vec::new()],
        usize::MAX,
    )
    .expect("trivial spec is valid")
}

/// `exp(2π²κ_1)`: `T(u) = u(1 − e^{−2π²u})` over polynomials in `π²`.
pub fn preset_wp(truncation: usize) -> CohFTSpec<PiPoly> {
    let legs = (1..=truncation)
        .map(|b| {
            // T_b = −(−2π²)^b / b!
            let c = -Rational::new(BigInt::from(-2).pow(b as u32), factorial(b as u32));
            PiPoly::monomial(c, b)
        })
        .collect();
    CohFTSpec::new(
        vec![vec![int(1)]],
        vec![PiPoly::one()],
        vec![identity(1)],
        vec![legs],
        truncation,
    )
    .expect("WP spec is valid")
}

/// Mumford's formula for `Λ(t)`: `R(u) = exp(−Σ_m B_{m+1}/(m(m+1)) (tu)^m)`
/// and `T(u) = u(1 − R(u))`, over polynomials in `t`.
pub fn preset_mumford(truncation: usize) -> CohFTSpec<HodgePoly> {
    let order = truncation as i32 + 1;
    let mut exponent = vec![HodgePoly::zero()];
    for m in 1..=truncation as u32 {
        let c = -bernoulli(m + 1) / int(m as i64 * (m as i64 + 1));
        exponent.push(HodgePoly::monomial(c, m as usize));
    }
    let r = TruncatedSeries::from_coeffs("u", exponent, order)
        .exp()
        .expect("zero constant term");
    let rotation: Vec<Matrix<HodgePoly>> = (0..=truncation as i32).map(|k| vec![vec![r.coeff(k)]]).collect();
    let legs = (1..=truncation as i32).map(|b| r.coeff(b).neg()).collect();
    CohFTSpec::new(
        vec![vec![int(1)]],
        vec![HodgePoly::one()],
        rotation,
        vec![legs],
        truncation,
    )
    .expect("Mumford spec is valid")
}

/// `∫_{M̄_{1,n}} λ_1 Π ψ_i^{d_i}` from the string equation and
/// `∫_{M̄_{1,1}} λ_1 = 1/24`; `λ_1` is pulled back along forgetful maps.
pub fn lambda1_correlator(d: &[u32]) -> Rational {
    let n = d.len();
    if n == 0 || d.iter().map(|&x| x as usize).sum::<usize>() + 1 != n {
        return Rational::zero();
    }
    if n == 1 {
        return Rational::new(BigInt::from(1), BigInt::from(24));
    }
    // Σd = n − 1 forces some d_i = 0
    let zero = d.iter().position(|&x| x == 0).expect("a zero exponent");
    let rest: Vec<u32> = d
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != zero)
        .map(|(_, &x)| x)
        .collect();
    let mut total = Rational::zero();
    for j in 0..rest.len() {
        if rest[j] > 0 {
            let mut lower = rest.clone();
            lower[j] -= 1;
            total += lambda1_correlator(&lower);
        }
    }
    total
}

/// JSON form of a spec over univariate polynomials. Ring elements are either a
/// single `"num/den"` string or an array of such strings (coefficients of the
/// formal variable, lowest degree first).
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CohFTJson {
    pub eta: Vec<Vec<String>>,
    pub tft: Vec<JsonElem>,
    #[serde(default)]
    pub rotation: Vec<Vec<Vec<JsonElem>>>,
    #[serde(default)]
    pub translation: Vec<Vec<JsonElem>>,
    pub truncation: usize,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum JsonElem {
    Scalar(String),
    Poly(Vec<String>),
}

impl JsonElem {
    fn to_poly(&self) -> Result<UniPoly> {
        match self {
            JsonElem::Scalar(s) => Ok(UniPoly::constant(parse_rational(s)?)),
            JsonElem::Poly(v) => UniPoly::from_strings(v),
        }
    }
}

impl CohFTSpec<UniPoly> {
    pub fn from_json(text: &str) -> Result<Self> {
        let doc: CohFTJson = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        let eta = doc
            .eta
            .iter()
            .map(|row| row.iter().map(|s| parse_rational(s)).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        let tft = doc.tft.iter().map(JsonElem::to_poly).collect::<Result<Vec<_>>>()?;
        let rotation = doc
            .rotation
            .iter()
            .map(|m| {
                m.iter()
                    .map(|row| row.iter().map(JsonElem::to_poly).collect::<Result<Vec<_>>>())
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        let mut translation = doc
            .translation
            .iter()
            .map(|row| row.iter().map(JsonElem::to_poly).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        if translation.is_empty() {
            translation = vec![Vec::new(); tft.len()];
        }
        Self::new(eta, tft, rotation, translation, doc.truncation)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::numbers::rat;
    use crate::kappa::KappaEngine;

    #[test]
    fn quantum_product_axioms() {
        let spec: CohFTSpec<Rational> = preset_trivial();
        assert_eq!(spec.quantum_product(&[int(1)], &[int(1)]), vec![int(1)]);
        let spec = CohFTSpec::new(
            vec![vec![int(1), int(0)], vec![int(0), int(1)]],
            vec![int(2), rat(-1, 3)],
            vec![identity(2)],
            vec![Vec::new(), Vec::new()],
            4,
        )
        .unwrap();
        let (a, b, c) = (vec![int(1), int(2)], vec![rat(1, 2), int(-3)], vec![int(5), rat(2, 7)]);
        assert_eq!(
            spec.pairing(&spec.quantum_product(&a, &b), &c),
            spec.pairing(&a, &spec.quantum_product(&b, &c))
        );
        assert_eq!(
            spec.quantum_product(&spec.quantum_product(&a, &b), &c),
            spec.quantum_product(&a, &spec.quantum_product(&b, &c))
        );
    }

    #[test]
    fn translation_presets() {
        let w = WittenEngine::new();
        let wp = preset_wp(6);
        assert_eq!(wp.translation_coeff(0, 1), PiPoly::monomial(int(2), 1));
        assert_eq!(wp.translation_coeff(0, 2), PiPoly::monomial(int(-2), 2));
        let legs: Vec<PiPoly> = (1..=6).map(|b| wp.translation_coeff(0, b)).collect();
        assert_eq!(
            translated_correlator(&w, &legs, 1, &[0]),
            PiPoly::monomial(rat(1, 12), 1)
        );
        assert_eq!(
            translated_correlator(&w, &legs, 0, &[0; 4]),
            PiPoly::monomial(int(2), 1)
        );
        let none: Vec<Rational> = Vec::new();
        assert_eq!(translated_correlator(&w, &none, 2, &[2, 3]), rat(29, 5760));
    }

    #[test]
    fn mumford_preset() {
        let m = preset_mumford(6);
        assert_eq!(m.rotation_coeff(1), vec![vec![HodgePoly::monomial(rat(-1, 12), 1)]]);
        // only odd powers appear in the exponent, so R(u)R(−u) = 1
        assert!(m.check_symplectic().is_ok());
    }

    #[test]
    fn trivial_action_is_identity() {
        let w = WittenEngine::new();
        let spec: CohFTSpec<Rational> = preset_trivial();
        for (key, value) in crate::witten::witten_table(&w, 4) {
            let ins: Vec<(usize, u32)> = key.d().iter().map(|&d| (0, d)).collect();
            assert_eq!(givental_correlator(&w, &spec, key.g(), &ins).unwrap(), value);
        }
    }

    #[test]
    fn wp_matches_kappa() {
        let w = WittenEngine::new();
        let k = KappaEngine::new(&w);
        let wp = preset_wp(6);
        for (g, n) in [(0u32, 4usize), (1, 1), (1, 2), (2, 1)] {
            let vol = k.wp_volume(g, n).unwrap();
            for (lambda, coeff) in vol.terms() {
                let mut d = lambda.clone();
                d.resize(n, 0);
                let ins: Vec<(usize, u32)> = d.iter().map(|&x| (0, x)).collect();
                let weight = d.iter().fold(Rational::one(), |acc, &x| {
                    acc / Rational::from_integer(BigInt::from(2u32).pow(x) * factorial(x))
                });
                let v = givental_correlator(&w, &wp, g, &ins).unwrap();
                assert_eq!(v.scale(&weight), *coeff, "(g,n)=({g},{n}) {lambda:?}");
            }
        }
    }

    #[test]
    fn hodge_checks() {
        let w = WittenEngine::new();
        let m = preset_mumford(6);
        let ins = |d: &[u32]| d.iter().map(|&x| (0usize, x)).collect::<Vec<_>>();
        let v = givental_correlator(&w, &m, 1, &ins(&[0])).unwrap();
        assert_eq!(v.coeff(1), rat(1, 24));
        assert_eq!(v.coeff(0), Rational::zero());
        for d in [[0u32, 0, 0, 0, 2], [1, 1, 0, 0, 0], [0, 0, 0, 0, 1]] {
            let v = givental_correlator(&w, &m, 0, &ins(&d)).unwrap();
            assert!(v.degree().unwrap_or(0) == 0, "{d:?}: {v}");
        }
        for d in [vec![0u32, 1], vec![0, 0, 2], vec![1, 0, 1], vec![0, 0, 0, 3]] {
            let v = givental_correlator(&w, &m, 1, &ins(&d)).unwrap();
            assert_eq!(v.coeff(1), lambda1_correlator(&d), "{d:?}");
            assert_eq!(v.coeff(2), Rational::zero());
        }
    }

    #[test]
    fn lambda1_values() {
        assert_eq!(lambda1_correlator(&[0]), rat(1, 24));
        assert_eq!(lambda1_correlator(&[1, 0]), rat(1, 24));
        assert_eq!(lambda1_correlator(&[1, 1, 0]), rat(1, 12));
        assert_eq!(lambda1_correlator(&[2, 0, 0]), rat(1, 24));
    }

    #[test]
    fn json_spec() {
        let text = r#"{"eta":[["1"]],"tft":["1"],"translation":[[["0","2"],["0","0","-2"]]],"truncation":2}"#;
        let spec = CohFTSpec::from_json(text).unwrap();
        assert_eq!(spec.translation_coeff(0, 2), PiPoly::monomial(int(-2), 2));
        let bad = r#"{"eta":[["1","0"]],"tft":["1"],"truncation":2}"#;
        assert!(CohFTSpec::from_json(bad).is_err());
    }
}
