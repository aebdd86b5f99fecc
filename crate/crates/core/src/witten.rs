//! ψ-class intersection numbers `⟨τ_{d_1} ⋯ τ_{d_n}⟩_g`.
//!
//! Values come from the DVV form of the Virasoro constraints, evaluated with a
//! memo cache keyed on the canonical multiset of exponents. The genus 0 and
//! genus 1 closed formulas and the string/dilaton reductions are provided as
//! independent checks.

use std::collections::HashMap;
use std::fmt;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::RwLock;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::exact::numbers::{binomial, double_factorial, factorial, int, multinomial, rat};
use crate::exact::Rational;

/// `(g, multiset of ψ-exponents)` with the exponents stored in decreasing order.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CorrelatorKey {
    g: u32,
    d: Vec<u32>,
}

impl CorrelatorKey {
    pub fn new(g: u32, d: &[u32]) -> Self {
        let mut d = d.to_vec();
        d.sort_unstable_by(|a, b| b.cmp(a));
        Self { g, d }
    }

    pub fn g(&self) -> u32 {
        self.g
    }

    /// Exponents in decreasing order.
    pub fn d(&self) -> &[u32] {
        &self.d
    }

    pub fn n(&self) -> usize {
        self.d.len()
    }

    /// `2g - 2 + n`.
    pub fn euler_weight(&self) -> i64 {
        2 * self.g as i64 - 2 + self.d.len() as i64
    }

    pub fn is_stable(&self) -> bool {
        self.euler_weight() > 0
    }

    /// `Σ d_i = 3g - 3 + n`.
    pub fn has_top_degree(&self) -> bool {
        self.d.iter().map(|&x| x as i64).sum::<i64>() == 3 * self.g as i64 - 3 + self.d.len() as i64
    }

    /// True unless the correlator vanishes for stability or degree reasons.
    pub fn can_be_nonzero(&self) -> bool {
        self.is_stable() && self.has_top_degree()
    }
}

impl fmt::Display for CorrelatorKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<")?;
        for (i, d) in self.d.iter().rev().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "tau_{d}")?;
        }
        write!(f, ">_{}", self.g)
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct CacheStats {
    pub entries: usize,
    pub hits: u64,
    pub misses: u64,
}

/// Memoized evaluator for Witten's correlators.
///
/// Lookups take a shared lock and insertions an exclusive one. Two threads may
/// compute the same key concurrently; both store the same value.
#[derive(Default)]
pub struct WittenEngine {
    cache: RwLock<HashMap<CorrelatorKey, Rational>>,
    hits: AtomicU64,
    misses: AtomicU64,
}

impl WittenEngine {
    pub fn new() -> Self {
        Self::default()
    }

    /// `⟨τ_{d_1} ⋯ τ_{d_n}⟩_g`. Total: unstable or dimension-violating inputs
    /// give 0.
    pub fn correlator(&self, g: u32, d: &[u32]) -> Rational {
        self.value(&CorrelatorKey::new(g, d))
    }

    pub fn value(&self, key: &CorrelatorKey) -> Rational {
        if !key.can_be_nonzero() {
            return Rational::zero();
        }
        if let Some(v) = self.cache.read().unwrap().get(key) {
            self.hits.fetch_add(1, Ordering::Relaxed);
            return v.clone();
        }
        self.misses.fetch_add(1, Ordering::Relaxed);
        let v = match (key.g, key.d.as_slice()) {
            (0, [0, 0, 0]) => Rational::one(),
            (1, [1]) => rat(1, 24),
            _ => self.recursion_step(key.g, key.d[0], &key.d[1..]),
        };
        self.cache.write().unwrap().insert(key.clone(), v.clone());
        v
    }

    /// One application of the DVV recursion with the insertion at position
    /// `pivot` of `d` singled out; lower terms come from the memoized engine.
    ///
    /// Agrees with [`correlator`](Self::correlator) for every pivot; the engine
    /// itself always pivots on a maximal exponent.
    pub fn correlator_with_pivot(&self, g: u32, d: &[u32], pivot: usize) -> Rational {
        let key = CorrelatorKey::new(g, d);
        if !key.can_be_nonzero() {
            return Rational::zero();
        }
        match (key.g, key.d.as_slice()) {
            (0, [0, 0, 0]) => return Rational::one(),
            (1, [1]) => return rat(1, 24),
            _ => {}
        }
        let mut rest = d.to_vec();
        let d1 = rest.remove(pivot);
        rest.sort_unstable_by(|a, b| b.cmp(a));
        self.recursion_step(g, d1, &rest)
    }

    /// The recursion with `d1` as distinguished insertion; `rest` must be
    /// sorted decreasingly.
    fn recursion_step(&self, g: u32, d1: u32, rest: &[u32]) -> Rational {
        let df1 = Rational::from_integer(df(2 * d1 as i64 + 1));
        let mut total = Rational::zero();

        // merge the pivot with another insertion
        for (value, count) in groups(rest) {
            if d1 + value == 0 {
                continue;
            }
            let merged = d1 + value - 1;
            let mut child: Vec<u32> = Vec::with_capacity(rest.len());
            child.push(merged);
            child.extend(remove_one(rest, value));
            let c = self.value(&CorrelatorKey::new(g, &child));
            if c.is_zero() {
                continue;
            }
            let coeff = Rational::new(
                df(2 * (d1 + value) as i64 - 1) * count,
                df(2 * d1 as i64 + 1) * df(2 * value as i64 - 1),
            );
            total += coeff * c;
        }

        if d1 < 2 {
            return total;
        }
        let top = d1 - 2;
        let mut split_sum = Rational::zero();

        // genus reduction
        if g >= 1 {
            for a in 0..=top {
                let b = top - a;
                let mut child = Vec::with_capacity(rest.len() + 2);
                child.push(a);
                child.push(b);
                child.extend_from_slice(rest);
                let c = self.value(&CorrelatorKey::new(g - 1, &child));
                if !c.is_zero() {
                    split_sum += Rational::from_integer(df(2 * a as i64 + 1) * df(2 * b as i64 + 1)) * c;
                }
            }
        }

        // separating splittings, over sub-multisets of the remaining insertions
        let grp = groups(rest);
        let mut take = vec![0u32; grp.len()];
        loop {
            let mut i1 = Vec::new();
            let mut i2 = Vec::new();
            let mut mult = BigInt::one();
            for ((value, count), &k) in grp.iter().zip(&take) {
                i1.extend(std::iter::repeat_n(*value, k as usize));
                i2.extend(std::iter::repeat_n(*value, (count - k) as usize));
                mult *= binomial(*count as u64, k as u64);
            }
            let sum1: i64 = i1.iter().map(|&x| x as i64).sum();
            let len1 = i1.len() as i64;
            for g1 in 0..=g {
                let g2 = g - g1;
                let a = 3 * g1 as i64 - 2 + len1 - sum1;
                if a < 0 || a > top as i64 {
                    continue;
                }
                if 2 * g1 as i64 + len1 < 2 || 2 * (g2 as i64) + (i2.len() as i64) < 2 {
                    continue;
                }
                let a = a as u32;
                let b = top - a;
                let mut left = vec![a];
                left.extend_from_slice(&i1);
                let lv = self.value(&CorrelatorKey::new(g1, &left));
                if lv.is_zero() {
                    continue;
                }
                let mut right = vec![b];
                right.extend_from_slice(&i2);
                let rv = self.value(&CorrelatorKey::new(g2, &right));
                if rv.is_zero() {
                    continue;
                }
                let weight = df(2 * a as i64 + 1) * df(2 * b as i64 + 1) * &mult;
                split_sum += Rational::from_integer(weight) * lv * rv;
            }
            if !advance(&mut take, &grp) {
                break;
            }
        }
        total + split_sum / (df1 * int(2))
    }

    /// String equation: the correlator `(g, d)` with one `τ_0` removed.
    ///
    /// Requires a 0 in `d` and a stable type after removal.
    pub fn string_reduce(&self, g: u32, d: &[u32]) -> Result<Rational> {
        let rest = remove_checked(g, d, 0)?;
        let mut total = Rational::zero();
        for i in 0..rest.len() {
            if rest[i] == 0 {
                continue;
            }
            let mut child = rest.clone();
            child[i] -= 1;
            total += self.correlator(g, &child);
        }
        Ok(total)
    }

    /// Dilaton equation: the correlator `(g, d)` with one `τ_1` removed.
    pub fn dilaton_reduce(&self, g: u32, d: &[u32]) -> Result<Rational> {
        let rest = remove_checked(g, d, 1)?;
        let factor = 2 * g as i64 - 2 + rest.len() as i64;
        Ok(int(factor) * self.correlator(g, &rest))
    }

    pub fn stats(&self) -> CacheStats {
        CacheStats {
            entries: self.cache.read().unwrap().len(),
            hits: self.hits.load(Ordering::Relaxed),
            misses: self.misses.load(Ordering::Relaxed),
        }
    }

    /// Every cached entry, sorted by key.
    pub fn entries(&self) -> Vec<(CorrelatorKey, Rational)> {
        let mut v: Vec<_> = self
            .cache
            .read()
            .unwrap()
            .iter()
            .map(|(k, v)| (k.clone(), v.clone()))
            .collect();
        v.sort_by(|a, b| a.0.cmp(&b.0));
        v
    }

    /// Seeds the cache with an externally stored value. Keys that fail the
    /// stability or dimension gate are rejected.
    pub fn insert_checked(&self, key: CorrelatorKey, value: Rational) -> Result<()> {
        if !key.can_be_nonzero() {
            return Err(Error::Precondition(format!("{key} violates the dimension gate")));
        }
        self.cache.write().unwrap().insert(key, value);
        Ok(())
    }
}

fn df(m: i64) -> BigInt {
    double_factorial(m).expect("argument >= -1")
}

/// `(value, multiplicity)` runs of a sorted slice.
fn groups(sorted: &[u32]) -> Vec<(u32, u32)> {
    let mut out: Vec<(u32, u32)> = Vec::new();
    for &x in sorted {
        match out.last_mut() {
            Some((v, c)) if *v == x => *c += 1,
            _ => out.push((x, 1)),
        }
    }
    out
}

fn advance(take: &mut [u32], grp: &[(u32, u32)]) -> bool {
    for (t, (_, c)) in take.iter_mut().zip(grp) {
        if *t < *c {
            *t += 1;
            return true;
        }
        *t = 0;
    }
    false
}

fn remove_one(v: &[u32], value: u32) -> Vec<u32> {
    let mut out = v.to_vec();
    if let Some(pos) = out.iter().position(|&x| x == value) {
        out.remove(pos);
    }
    out
}

fn remove_checked(g: u32, d: &[u32], value: u32) -> Result<Vec<u32>> {
    if !d.contains(&value) {
        return Err(Error::Precondition(format!("no tau_{value} insertion in {:?}", d)));
    }
    let rest = remove_one(d, value);
    if 2 * g as i64 - 2 + (rest.len() as i64) <= 0 {
        return Err(Error::Precondition(format!(
            "removing tau_{value} from genus {g}, {:?} leaves an unstable type",
            d
        )));
    }
    Ok(rest)
}

/// `⟨τ_d⟩_0 = (n-3)! / Π d_i!` when `Σ d = n - 3`, else 0.
pub fn genus0_closed(d: &[u32]) -> Rational {
    let n = d.len() as i64;
    if n < 3 {
        return Rational::zero();
    }
    let parts: Vec<i64> = d.iter().map(|&x| x as i64).collect();
    multinomial(n - 3, &parts).expect("parts are nonnegative")
}

/// Genus 1 closed formula:
/// `(1/24) [ (n; d) - Σ_{ε ∈ {0,1}^n, |ε| ≥ 2} (n-|ε|; d-ε) (|ε|-2)! ]`,
/// when `Σ d = n`, else 0.
pub fn genus1_closed(d: &[u32]) -> Rational {
    let n = d.len();
    if n == 0 || d.iter().map(|&x| x as usize).sum::<usize>() != n {
        return Rational::zero();
    }
    let parts: Vec<i64> = d.iter().map(|&x| x as i64).collect();
    let mut total = multinomial(n as i64, &parts).unwrap();
    for mask in 0u64..(1 << n) {
        let e = mask.count_ones() as i64;
        if e < 2 {
            continue;
        }
        let shifted: Vec<i64> = parts
            .iter()
            .enumerate()
            .map(|(i, &p)| p - ((mask >> i) & 1) as i64)
            .collect();
        if shifted.iter().any(|&p| p < 0) {
            continue;
        }
        let m = multinomial(n as i64 - e, &shifted).unwrap();
        total -= m * Rational::from_integer(factorial((e - 2) as u32));
    }
    total / int(24)
}

/// All nonzero correlators with `2g - 2 + n <= max_euler`, ordered by
/// `(g, n, d)` with `d` compared as an increasing sequence.
pub fn witten_table(engine: &WittenEngine, max_euler: u32) -> Vec<(CorrelatorKey, Rational)> {
    let mut rows = Vec::new();
    let max_euler = max_euler as i64;
    let mut g = 0i64;
    while 2 * g - 1 <= max_euler {
        let n_min = if g == 0 { 3 } else { 1 };
        for n in n_min..=(max_euler - 2 * g + 2) {
            let dim = 3 * g - 3 + n;
            let mut parts: Vec<Vec<u32>> = Vec::new();
            multisets_with_sum(dim as u32, n as usize, dim as u32, &mut Vec::new(), &mut parts);
            let mut keyed: Vec<(Vec<u32>, CorrelatorKey)> = parts
                .into_iter()
                .map(|p| {
                    let mut asc = p.clone();
                    asc.sort_unstable();
                    (asc, CorrelatorKey::new(g as u32, &p))
                })
                .collect();
            keyed.sort();
            for (_, key) in keyed {
                let v = engine.value(&key);
                if !v.is_zero() {
                    rows.push((key, v));
                }
            }
        }
        g += 1;
    }
    rows
}

/// Non-increasing sequences of exactly `len` entries, each `<= max`, summing
/// to `sum`.
pub(crate) fn multisets_with_sum(sum: u32, len: usize, max: u32, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
    if len == 0 {
        if sum == 0 {
            out.push(prefix.clone());
        }
        return;
    }
    if (max as u64) * (len as u64) < sum as u64 {
        return;
    }
    for x in (0..=max.min(sum)).rev() {
        prefix.push(x);
        multisets_with_sum(sum - x, len - 1, x, prefix, out);
        prefix.pop();
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn base_and_table_values() {
        let e = WittenEngine::new();
        assert_eq!(e.correlator(0, &[0, 0, 0]), int(1));
        assert_eq!(e.correlator(2, &[2, 3]), rat(29, 5760));
        assert_eq!(e.correlator(4, &[10]), rat(1, 7962624));
        assert_eq!(e.correlator(1, &[0, 0]), int(0));
        assert_eq!(e.correlator(0, &[0, 0]), int(0));
        assert_eq!(e.correlator(3, &[4, 4]), rat(607, 1451520));
    }

    #[test]
    fn string_and_dilaton() {
        let e = WittenEngine::new();
        assert_eq!(e.string_reduce(0, &[0, 0, 0, 1]).unwrap(), int(1));
        assert_eq!(e.dilaton_reduce(1, &[1, 1]).unwrap(), rat(1, 24));
        assert_eq!(e.string_reduce(1, &[0, 2]).unwrap(), rat(1, 24));
        assert!(e.string_reduce(1, &[1, 1]).is_err());
        assert!(e.dilaton_reduce(0, &[0, 0, 0]).is_err());
        assert!(e.string_reduce(0, &[0, 0, 0]).is_err());
    }

    #[test]
    fn closed_formulas() {
        assert_eq!(genus0_closed(&[1, 1, 0, 0, 0]), int(2));
        assert_eq!(genus0_closed(&[4, 0, 0, 0, 0, 0, 0]), int(1));
        assert_eq!(genus0_closed(&[1, 0, 0]), int(0));
        assert_eq!(genus1_closed(&[1]), rat(1, 24));
        assert_eq!(genus1_closed(&[1, 1, 1]), rat(1, 12));
        assert_eq!(genus1_closed(&[0, 1, 2]), rat(1, 12));
        assert_eq!(genus1_closed(&[0, 0]), int(0));
    }

    #[test]
    fn table_driver() {
        let e = WittenEngine::new();
        assert!(witten_table(&e, 0).is_empty());
        let t1 = witten_table(&e, 1);
        assert_eq!(
            t1,
            vec![
                (CorrelatorKey::new(0, &[0, 0, 0]), int(1)),
                (CorrelatorKey::new(1, &[1]), rat(1, 24)),
            ]
        );
        let t3 = witten_table(&e, 3);
        assert!(t3.contains(&(CorrelatorKey::new(2, &[4]), rat(1, 1152))));
        // ordering: (0,5) rows come as tau_0^4 tau_2 then tau_0^3 tau_1^2
        let g0n5: Vec<_> = t3
            .iter()
            .filter(|(k, _)| k.g() == 0 && k.n() == 5)
            .map(|(k, _)| k.d().to_vec())
            .collect();
        assert_eq!(g0n5, vec![vec![2, 0, 0, 0, 0], vec![1, 1, 0, 0, 0]]);
    }

    #[test]
    fn key_is_canonical() {
        assert_eq!(CorrelatorKey::new(1, &[0, 2, 1]), CorrelatorKey::new(1, &[2, 1, 0]));
        assert_eq!(CorrelatorKey::new(2, &[2, 3]).to_string(), "<tau_2 tau_3>_2");
    }

    #[test]
    fn cache_counts_and_seeding() {
        let e = WittenEngine::new();
        e.correlator(2, &[2, 3]);
        let s = e.stats();
        assert!(s.entries > 0 && s.misses as usize >= s.entries);
        e.correlator(2, &[3, 2]);
        assert!(e.stats().hits > s.hits);
        assert!(e.insert_checked(CorrelatorKey::new(1, &[0, 0]), int(1)).is_err());
    }
}
