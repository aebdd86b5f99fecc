//! Mixed κ–ψ intersection numbers and volume polynomials.

use std::collections::{BTreeMap, HashMap};
use std::sync::RwLock;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::error::{check_stable, Result};
use crate::exact::numbers::{factorial, int, odd_double_factorial, Rational};
use crate::exact::{partition_of, PiPoly, VolumePoly};
use crate::witten::{multisets_with_sum, WittenEngine};

/// `∫_{M̄_{g,n}} Π ψ_i^{d_i} · Π κ_{b_j} · κ_0^{k0}` in canonical form.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MixedKey {
    g: u32,
    d: Vec<u32>,
    b: Vec<u32>,
    k0: u32,
}

impl MixedKey {
    pub fn new(g: u32, d: &[u32], b: &[u32], k0: u32) -> Self {
        let mut d = d.to_vec();
        let mut b = b.to_vec();
        d.sort_unstable_by(|x, y| y.cmp(x));
        b.sort_unstable_by(|x, y| y.cmp(x));
        Self { g, d, b, k0 }
    }

    pub fn g(&self) -> u32 {
        self.g
    }

    pub fn d(&self) -> &[u32] {
        &self.d
    }

    pub fn b(&self) -> &[u32] {
        &self.b
    }

    pub fn k0(&self) -> u32 {
        self.k0
    }

    fn degree_matches(&self) -> bool {
        let deg: u64 = self.d.iter().chain(&self.b).map(|&x| x as u64).sum();
        let dim = 3 * self.g as i64 - 3 + self.d.len() as i64;
        dim >= 0 && deg == dim as u64
    }
}

/// Reduces κ classes to ψ correlators through the forgetful map, memoizing
/// every intermediate mixed number.
pub struct KappaEngine<'a> {
    psi: &'a WittenEngine,
    memo: RwLock<HashMap<MixedKey, Rational>>,
}

impl<'a> KappaEngine<'a> {
    pub fn new(psi: &'a WittenEngine) -> Self {
        Self {
            psi,
            memo: RwLock::new(HashMap::new()),
        }
    }

    pub fn psi(&self) -> &WittenEngine {
        self.psi
    }

    /// Mixed intersection number; 0 for unstable or degree-violating input.
    ///
    /// Panics if some entry of `b` is 0; use `k0` for κ_0.
    pub fn mixed_correlator(&self, g: u32, d: &[u32], b: &[u32], k0: u32) -> Rational {
        assert!(!b.contains(&0), "kappa_0 goes in k0, not b");
        self.value(&MixedKey::new(g, d, b, k0))
    }

    pub fn value(&self, key: &MixedKey) -> Rational {
        self.value_with(key, 0)
    }

    /// Same number, reducing the κ entry at position `first` of the sorted
    /// `b` before anything else. Used to check order independence.
    pub fn mixed_with_first(&self, g: u32, d: &[u32], b: &[u32], k0: u32, first: usize) -> Rational {
        self.value_with(&MixedKey::new(g, d, b, k0), first)
    }

    fn value_with(&self, key: &MixedKey, first: usize) -> Rational {
        let n = key.d.len();
        if 2 * key.g as i64 - 2 + n as i64 <= 0 || !key.degree_matches() {
            return Rational::zero();
        }
        if key.k0 > 0 {
            let chi = int(2 * key.g as i64 - 2 + n as i64);
            let rest = MixedKey::new(key.g, &key.d, &key.b, 0);
            return num_traits::pow(chi, key.k0 as usize) * self.value_with(&rest, first);
        }
        if key.b.is_empty() {
            return self.psi.correlator(key.g, &key.d);
        }
        if first == 0 {
            if let Some(v) = self.memo.read().unwrap().get(key) {
                return v.clone();
            }
        }
        let mut others = key.b.clone();
        let pivot = others.remove(first.min(others.len() - 1));
        let mut total = Rational::zero();
        // π^*κ_b = κ_b - ψ_{n+1}^b; the divisor corrections to π^*ψ_i vanish
        // against ψ_{n+1}^{pivot+1} since pivot + 1 >= 2
        for mask in 0u64..(1 << others.len()) {
            let mut power = pivot + 1;
            let mut kept = Vec::with_capacity(others.len());
            for (j, &bj) in others.iter().enumerate() {
                if mask >> j & 1 == 1 {
                    power += bj;
                } else {
                    kept.push(bj);
                }
            }
            let mut d = key.d.clone();
            d.push(power);
            let term = self.value(&MixedKey::new(key.g, &d, &kept, 0));
            if mask.count_ones() % 2 == 0 {
                total += term;
            } else {
                total -= term;
            }
        }
        if first == 0 {
            self.memo.write().unwrap().insert(key.clone(), total.clone());
        }
        total
    }

    /// `V_{g,n}(L) = Σ_d ⟨τ_d⟩_g Π L_i^{2d_i} / (2^{d_i} d_i!)`.
    pub fn kontsevich_volume(&self, g: u32, n: usize) -> Result<VolumePoly> {
        check_stable(g, n)?;
        let dim = 3 * g + n as u32 - 3;
        let mut vol = VolumePoly::new(n);
        for d in sorted_multisets(dim, n) {
            let v = self.psi.correlator(g, &d) * volume_weight(&d);
            if !v.is_zero() {
                vol.add_term(partition_of(&d), &PiPoly::constant(v));
            }
        }
        Ok(vol)
    }

    /// Laplace transform of `V_{g,n}`: the coefficient
    /// `⟨τ_d⟩_g Π (2d_i - 1)!!` of `Π 1 / λ_i^{2d_i + 1}`, keyed by ordered
    /// exponent vectors.
    pub fn laplace_volume(&self, g: u32, n: usize) -> Result<BTreeMap<Vec<u32>, Rational>> {
        check_stable(g, n)?;
        let dim = 3 * g + n as u32 - 3;
        let mut out = BTreeMap::new();
        for d in ordered_compositions(dim, n) {
            let c = self.psi.correlator(g, &d);
            if !c.is_zero() {
                let df = d.iter().fold(BigInt::one(), |acc, &di| acc * odd_double_factorial(di));
                out.insert(d, c * Rational::from_integer(df));
            }
        }
        Ok(out)
    }

    /// Weil–Petersson volume `∫ exp(2π²κ_1) Π exp(L_i² ψ_i / 2)` as a
    /// polynomial in `L_i²` with coefficients in `π²`.
    pub fn wp_volume(&self, g: u32, n: usize) -> Result<VolumePoly> {
        check_stable(g, n)?;
        let dim = 3 * g + n as u32 - 3;
        let mut vol = VolumePoly::new(n);
        for s in 0..=dim {
            let k = dim - s;
            let kappas = vec![1; k as usize];
            let pref = Rational::new(BigInt::from(2u32).pow(k), factorial(k));
            for d in sorted_multisets(s, n) {
                let v = self.value(&MixedKey::new(g, &d, &kappas, 0));
                if v.is_zero() {
                    continue;
                }
                let c = v * &pref * volume_weight(&d);
                vol.add_term(partition_of(&d), &PiPoly::monomial(c, k as usize));
            }
        }
        Ok(vol)
    }
}

/// `Π 1 / (2^{d_i} d_i!)`.
fn volume_weight(d: &[u32]) -> Rational {
    let den = d.iter().fold(BigInt::one(), |acc, &di| {
        acc * (BigInt::one() << di as usize) * factorial(di)
    });
    Rational::new(BigInt::one(), den)
}

fn sorted_multisets(sum: u32, len: usize) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    multisets_with_sum(sum, len, sum, &mut Vec::new(), &mut out);
    out
}

/// Ordered vectors of `len` nonnegative integers summing to `sum`, in
/// lexicographic order.
pub(crate) fn ordered_compositions(sum: u32, len: usize) -> Vec<Vec<u32>> {
    fn go(sum: u32, len: usize, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if len == 1 {
            prefix.push(sum);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for x in 0..=sum {
            prefix.push(x);
            go(sum - x, len - 1, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if len == 0 {
        if sum == 0 {
            out.push(Vec::new());
        }
        return out;
    }
    go(sum, len, &mut Vec::new(), &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::numbers::rat;

    #[test]
    fn mixed_examples() {
        let w = WittenEngine::new();
        let k = KappaEngine::new(&w);
        assert_eq!(k.mixed_correlator(1, &[0], &[1], 0), w.correlator(1, &[0, 2]));
        assert_eq!(k.mixed_correlator(1, &[0], &[1], 0), rat(1, 24));
        assert_eq!(k.mixed_correlator(0, &[0; 5], &[1, 1], 0), int(5));
        assert_eq!(k.mixed_correlator(1, &[1], &[], 1), int(1) / int(24));
        assert_eq!(k.mixed_correlator(1, &[0], &[], 1), int(0));
    }

    #[test]
    fn kappa_one_on_0_4_is_one() {
        let w = WittenEngine::new();
        let k = KappaEngine::new(&w);
        assert_eq!(k.mixed_correlator(0, &[0; 4], &[1], 0), int(1));
    }

    #[test]
    fn order_independence() {
        let w = WittenEngine::new();
        let k = KappaEngine::new(&w);
        for (g, n) in [(0usize, 5usize), (0, 6), (1, 2), (1, 3), (2, 1), (2, 2)] {
            let dim = 3 * g + n - 3;
            for nb in 1..=3.min(dim) {
                for bsum in nb..=dim {
                    for b in sorted_multisets(bsum as u32, nb) {
                        if b.contains(&0) {
                            continue;
                        }
                        for d in sorted_multisets((dim - bsum) as u32, n) {
                            let base = k.mixed_correlator(g as u32, &d, &b, 0);
                            for first in 1..b.len() {
                                assert_eq!(
                                    k.mixed_with_first(g as u32, &d, &b, 0, first),
                                    base,
                                    "g={g} d={d:?} b={b:?}"
                                );
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn volumes() {
        let w = WittenEngine::new();
        let k = KappaEngine::new(&w);
        let v11 = k.kontsevich_volume(1, 1).unwrap();
        assert_eq!(v11.coefficient(&[1]), PiPoly::constant(rat(1, 48)));
        let v04 = k.kontsevich_volume(0, 4).unwrap();
        assert_eq!(v04.coefficient(&[1]), PiPoly::constant(rat(1, 2)));
        assert_eq!(
            k.kontsevich_volume(0, 3).unwrap().coefficient(&[]),
            PiPoly::constant(int(1))
        );
        assert!(k.kontsevich_volume(0, 2).is_err());

        let wp = k.wp_volume(1, 1).unwrap();
        assert_eq!(wp.coefficient(&[1]), PiPoly::constant(rat(1, 48)));
        assert_eq!(wp.coefficient(&[]), PiPoly::monomial(rat(1, 12), 1));
        let wp21 = k.wp_volume(2, 1).unwrap();
        assert_eq!(wp21.coefficient(&[4]), PiPoly::constant(rat(1, 442368)));
        assert_eq!(wp21.coefficient(&[3]), PiPoly::monomial(rat(29, 138240), 1));
        assert_eq!(wp21.coefficient(&[2]), PiPoly::monomial(rat(139, 23040), 2));
        assert_eq!(wp21.coefficient(&[1]), PiPoly::monomial(rat(169, 2880), 3));
        assert_eq!(wp21.coefficient(&[]), PiPoly::monomial(rat(29, 192), 4));
        assert_eq!(wp21.pi_free_part(), k.kontsevich_volume(2, 1).unwrap());
    }

    #[test]
    fn laplace() {
        let w = WittenEngine::new();
        let k = KappaEngine::new(&w);
        let l = k.laplace_volume(2, 1).unwrap();
        assert_eq!(l.get(&vec![4]), Some(&rat(105, 1152)));
        let l = k.laplace_volume(0, 3).unwrap();
        assert_eq!(l.len(), 1);
        assert_eq!(l.get(&vec![0, 0, 0]), Some(&int(1)));
    }
}
