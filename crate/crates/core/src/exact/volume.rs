use std::collections::BTreeMap;

use super::numbers::format_rational;
use super::poly::PiPoly;
use super::ring::Ring;

/// Integer partition, parts sorted in decreasing order, zeros removed.
pub type Partition = Vec<u32>;

pub fn partition_of(exponents: &[u32]) -> Partition {
    let mut p: Vec<u32> = exponents.iter().copied().filter(|&e| e > 0).collect();
    p.sort_unstable_by(|a, b| b.cmp(a));
    p
}

/// Symmetric polynomial in `L_1², …, L_n²` over [`PiPoly`], stored in the
/// monomial symmetric basis: `Σ_λ c_λ(π²) m_λ(L_1², …, L_n²)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VolumePoly {
    n: usize,
    terms: BTreeMap<Partition, PiPoly>,
}

impl VolumePoly {
    pub fn new(n: usize) -> Self {
        Self {
            n,
            terms: BTreeMap::new(),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Adds `c · m_λ`. Panics if `λ` has more than `n` parts.
    pub fn add_term(&mut self, partition: Partition, c: &PiPoly) {
        assert!(
            partition.len() <= self.n,
            "partition {partition:?} has more than {} parts",
            self.n
        );
        debug_assert!(partition.windows(2).all(|w| w[0] >= w[1]) && !partition.contains(&0));
        let slot = self.terms.entry(partition).or_default();
        *slot = slot.add(c);
        self.terms.retain(|_, v| !v.is_zero());
    }

    pub fn coefficient(&self, partition: &[u32]) -> PiPoly {
        self.terms.get(partition).cloned().unwrap_or_default()
    }

    /// Nonzero terms in ascending partition order.
    pub fn terms(&self) -> impl Iterator<Item = (&Partition, &PiPoly)> {
        self.terms.iter()
    }

    /// The π-free part, i.e. the coefficient of `(π²)^0` in every term.
    pub fn pi_free_part(&self) -> VolumePoly {
        let mut out = VolumePoly::new(self.n);
        for (p, c) in &self.terms {
            let c0 = c.coeff(0);
            if !c0.is_zero() {
                out.add_term(p.clone(), &PiPoly::constant(c0));
            }
        }
        out
    }

    /// Evaluates at boundary lengths `lengths` (not squared), with `π²`
    /// replaced by `pi_sq`.
    pub fn eval_f64(&self, lengths: &[f64], pi_sq: f64) -> f64 {
        assert_eq!(lengths.len(), self.n);
        let squares: Vec<f64> = lengths.iter().map(|l| l * l).collect();
        self.terms
            .iter()
            .map(|(p, c)| c.eval_f64(pi_sq) * monomial_symmetric_f64(p, &squares))
            .sum()
    }
}

impl std::fmt::Display for VolumePoly {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(p, c)| {
                let coeffs: Vec<String> = c.coeffs().iter().map(format_rational).collect();
                format!("[{}]*m{:?}", coeffs.join(", "), p)
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// `m_λ(x_1, …, x_n)`: sum over the distinct rearrangements of `λ` padded
/// with zeros to length `n`.
pub fn monomial_symmetric_f64(partition: &[u32], x: &[f64]) -> f64 {
    let mut exps: Vec<u32> = partition.to_vec();
    exps.resize(x.len(), 0);
    exps.sort_unstable();
    let mut total = 0.0;
    loop {
        total += exps.iter().zip(x).map(|(&e, &xi)| xi.powi(e as i32)).product::<f64>();
        if !next_permutation(&mut exps) {
            break;
        }
    }
    total
}

/// Advances to the next lexicographic permutation; false after the last one.
pub(crate) fn next_permutation<T: Ord>(v: &mut [T]) -> bool {
    if v.len() < 2 {
        return false;
    }
    let mut i = v.len() - 1;
    while i > 0 && v[i - 1] >= v[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = v.len() - 1;
    while v[j] <= v[i - 1] {
        j -= 1;
    }
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::numbers::rat;

    #[test]
    fn monomial_symmetric_counts() {
        let x = [2.0, 3.0, 5.0];
        // m_(1) = x1 + x2 + x3
        assert_eq!(monomial_symmetric_f64(&[1], &x), 10.0);
        // m_(1,1) = x1x2 + x1x3 + x2x3
        assert_eq!(monomial_symmetric_f64(&[1, 1], &x), 6.0 + 10.0 + 15.0);
        assert_eq!(monomial_symmetric_f64(&[], &x), 1.0);
    }

    #[test]
    fn evaluates_wp_0_4() {
        let mut v = VolumePoly::new(4);
        v.add_term(vec![1], &PiPoly::constant(rat(1, 2)));
        v.add_term(vec![], &PiPoly::monomial(rat(2, 1), 1));
        let pi2 = std::f64::consts::PI.powi(2);
        let got = v.eval_f64(&[1.0, 2.0, 3.0, 4.0], pi2);
        let expect = 30.0 / 2.0 + 2.0 * pi2;
        assert!((got - expect).abs() < 1e-12);
        assert_eq!(v.pi_free_part().coefficient(&[]), PiPoly::default());
    }

    #[test]
    fn partition_normal_form() {
        assert_eq!(partition_of(&[0, 2, 1, 2, 0]), vec![2, 2, 1]);
    }
}
