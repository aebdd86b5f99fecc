//! Large-genus behaviour of ψ correlators:
//! `⟨τ_d⟩_g Π (2d_i+1)!! ≈ (2^{n−1}/2π) Γ(2g−2+n) (3/2)^{2g−2+n}`.

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::time::{Duration, Instant};

use num_bigint::BigInt;

use crate::exact::numbers::{double_factorial, factorial, format_rational, to_f64, Rational};
use crate::witten::WittenEngine;

#[derive(Clone, Debug, PartialEq)]
pub struct AsymptoticsRow {
    pub g: u32,
    pub d: Vec<u32>,
    /// `⟨τ_d⟩_g Π (2d_i+1)!!`.
    pub numerator: Rational,
    /// The ratio is `ratio_over_pi · π`, exact up to the final product.
    pub ratio_over_pi: Rational,
    pub ratio: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct AsymptoticsSeries {
    pub n: usize,
    pub rows: Vec<AsymptoticsRow>,
    /// False when the time budget stopped the series before `g_max`.
    pub complete: bool,
}

/// Assigns `(d_1, …, d_n)` with `Σ d = 3g − 3 + n` to each genus.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PartitionRule {
    /// `n = 1`: `(3g − 2)`.
    OnePoint,
    /// `n = 2`: `(3g − 2, 1)`.
    TopAndOne,
    /// `n = 2`: `(3g − 1, 0)`.
    TopAndZero,
    /// `n = 2`: the most balanced split of `3g − 1`.
    Balanced,
}

impl PartitionRule {
    pub const ALL: [PartitionRule; 4] = [
        PartitionRule::OnePoint,
        PartitionRule::TopAndOne,
        PartitionRule::TopAndZero,
        PartitionRule::Balanced,
    ];

    pub fn n(self) -> usize {
        match self {
            PartitionRule::OnePoint => 1,
            _ => 2,
        }
    }

    pub fn partition(self, g: u32) -> Vec<u32> {
        match self {
            PartitionRule::OnePoint => vec![3 * g - 2],
            PartitionRule::TopAndOne => vec![3 * g - 2, 1],
            PartitionRule::TopAndZero => vec![3 * g - 1, 0],
            PartitionRule::Balanced => {
                let s = 3 * g - 1;
                vec![s - s / 2, s / 2]
            }
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            PartitionRule::OnePoint => "one-point",
            PartitionRule::TopAndOne => "top-and-one",
            PartitionRule::TopAndZero => "top-and-zero",
            PartitionRule::Balanced => "balanced",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|r| r.name() == s)
    }
}

pub fn row(engine: &WittenEngine, g: u32, d: &[u32]) -> AsymptoticsRow {
    let n = d.len() as u32;
    let m = 2 * g + n - 2;
    let df: BigInt = d
        .iter()
        .map(|&x| double_factorial(2 * x as i64 + 1).expect("positive"))
        .product();
    let numerator = engine.correlator(g, d) * Rational::from_integer(df);
    // (2^{n−1}/2π) (m−1)! (3/2)^m = π^{-1} · 2^{n−2−m} 3^m (m−1)!
    let leading = Rational::new(
        BigInt::from(3).pow(m) * factorial(m - 1),
        BigInt::from(2).pow(m + 2 - n),
    );
    let ratio_over_pi = &numerator / leading;
    let ratio = to_f64(&ratio_over_pi) * PI;
    AsymptoticsRow {
        g,
        d: d.to_vec(),
        numerator,
        ratio_over_pi,
        ratio,
    }
}

/// Rows for `g = 2..=g_max`; stops early, flagging the series incomplete,
/// once `budget` has elapsed.
pub fn ratio_series(
    engine: &WittenEngine,
    rule: PartitionRule,
    g_max: u32,
    budget: Option<Duration>,
) -> AsymptoticsSeries {
    let start = Instant::now();
    let mut rows = Vec::new();
    let mut complete = true;
    for g in 2..=g_max {
        if budget.is_some_and(|b| start.elapsed() > b) {
            complete = false;
            break;
        }
        rows.push(row(engine, g, &rule.partition(g)));
    }
    AsymptoticsSeries {
        n: rule.n(),
        rows,
        complete,
    }
}

impl AsymptoticsSeries {
    /// `g,d_1,…,d_n,exact_numerator,ratio`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("g");
        for i in 1..=self.n {
            write!(out, ",d_{i}").unwrap();
        }
        out.push_str(",exact_numerator,ratio\n");
        for r in &self.rows {
            write!(out, "{}", r.g).unwrap();
            for d in &r.d {
                write!(out, ",{d}").unwrap();
            }
            writeln!(out, ",{},{:.17e}", format_rational(&r.numerator), r.ratio).unwrap();
        }
        out
    }

    /// `|ratio − 1|` strictly decreasing over the rows with `g ∈ range`.
    pub fn monotone_on(&self, lo: u32, hi: u32) -> bool {
        let errs: Vec<f64> = self
            .rows
            .iter()
            .filter(|r| (lo..=hi).contains(&r.g))
            .map(|r| (r.ratio - 1.0).abs())
            .collect();
        errs.len() as u32 == hi - lo + 1 && errs.windows(2).all(|w| w[1] < w[0])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{int, rat};

    #[test]
    fn genus_two_numerator() {
        let w = WittenEngine::new();
        let r = row(&w, 2, &[4]);
        assert_eq!(r.numerator, rat(1, 1152) * int(945));
        assert!(r.ratio.is_finite() && r.ratio > 0.0);
    }

    #[test]
    fn converges_slowly() {
        let w = WittenEngine::new();
        for rule in PartitionRule::ALL {
            let s = ratio_series(&w, rule, 10, None);
            assert!(s.complete);
            assert!(s.rows.iter().all(|r| r.ratio > 0.0 && r.ratio.is_finite()));
            assert!(s.monotone_on(6, 10), "{}", rule.name());
        }
    }

    #[test]
    fn csv_layout() {
        let w = WittenEngine::new();
        let s = ratio_series(&w, PartitionRule::TopAndOne, 3, None);
        let csv = s.to_csv();
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some("g,d_1,d_2,exact_numerator,ratio"));
        assert!(lines.next().unwrap().starts_with("2,4,1,"));
        let empty = ratio_series(&w, PartitionRule::OnePoint, 9, Some(Duration::ZERO));
        assert!(!empty.complete);
    }
}
