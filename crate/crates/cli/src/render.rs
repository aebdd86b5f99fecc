//! Text renderings of rationals and volume polynomials.

use moduli_core::exact::format_rational;
use moduli_core::{PiPoly, Rational, VolumePoly};
use num_traits::{One, Signed, Zero};
use serde_json::{json, Value};

/// `(2,1,1)` as `2,1^2`.
pub fn multiplicity_notation(partition: &[u32]) -> String {
    let mut parts = Vec::new();
    let mut i = 0;
    while i < partition.len() {
        let j = (i..partition.len())
            .find(|&j| partition[j] != partition[i])
            .unwrap_or(partition.len());
        match j - i {
            1 => parts.push(partition[i].to_string()),
            k => parts.push(format!("{}^{k}", partition[i])),
        }
        i = j;
    }
    parts.join(",")
}

/// Monomials `(coefficient, power of π², partition)` in table order: by power
/// of π², then partitions in decreasing lexicographic order.
fn monomials(v: &VolumePoly) -> Vec<(Rational, usize, Vec<u32>)> {
    let mut out: Vec<_> = v
        .terms()
        .flat_map(|(p, c)| {
            c.coeffs()
                .iter()
                .enumerate()
                .filter(|(_, q)| !q.is_zero())
                .map(move |(k, q)| (q.clone(), k, p.clone()))
        })
        .collect();
    out.sort_by(|a, b| a.1.cmp(&b.1).then_with(|| b.2.cmp(&a.2)));
    out
}

fn join_signed(terms: Vec<(bool, String)>) -> String {
    if terms.is_empty() {
        return "0".into();
    }
    let mut out = String::new();
    for (i, (neg, body)) in terms.into_iter().enumerate() {
        match (i, neg) {
            (0, false) => {}
            (0, true) => out.push('-'),
            (_, false) => out.push_str(" + "),
            (_, true) => out.push_str(" - "),
        }
        out.push_str(&body);
    }
    out
}

fn latex_pi(k: usize) -> String {
    match 2 * k {
        0 => String::new(),
        e if e < 10 => format!("\\pi^{e}"),
        e => format!("\\pi^{{{e}}}"),
    }
}

/// `c π^{2k}` in LaTeX, without sign; `bare` drops a unit coefficient.
fn latex_coeff(c: &Rational, k: usize, bare: bool) -> String {
    let num = c.numer().abs();
    let pi = latex_pi(k);
    let top = if num.is_one() && (k > 0 || bare) {
        pi
    } else {
        format!("{num}{pi}")
    };
    match (c.denom().is_one(), top.is_empty()) {
        (true, _) => top,
        (false, true) => format!("\\tfrac{{1}}{{{}}}", c.denom()),
        (false, false) => format!("\\tfrac{{{top}}}{{{}}}", c.denom()),
    }
}

pub fn latex_rational(c: &Rational) -> String {
    join_signed(vec![(c.is_negative(), latex_coeff(c, 0, false))])
}

pub fn latex_volume(v: &VolumePoly) -> String {
    let terms = monomials(v)
        .into_iter()
        .map(|(c, k, p)| {
            let body = if p.is_empty() {
                latex_coeff(&c, k, false)
            } else {
                let coeff = latex_coeff(&c, k, true);
                let m = format!("m_{{({})}}", multiplicity_notation(&p));
                if coeff.is_empty() {
                    m
                } else {
                    format!("{coeff} {m}")
                }
            };
            (c.is_negative(), body)
        })
        .collect();
    join_signed(terms)
}

/// Plain form such as `1/2 m(1) + 2 pi^2`.
pub fn plain_volume(v: &VolumePoly) -> String {
    let terms = monomials(v)
        .into_iter()
        .map(|(c, k, p)| {
            let abs = format_rational(&c.abs());
            let mut words = Vec::new();
            if !(abs == "1" && (k > 0 || !p.is_empty())) {
                words.push(abs);
            }
            match k {
                0 => {}
                1 => words.push("pi^2".into()),
                _ => words.push(format!("pi^{}", 2 * k)),
            }
            if !p.is_empty() {
                words.push(format!("m({})", multiplicity_notation(&p)));
            }
            (c.is_negative(), words.join(" "))
        })
        .collect();
    join_signed(terms)
}

pub fn json_volume(v: &VolumePoly) -> Value {
    let terms: Vec<Value> = monomial_partitions(v)
        .into_iter()
        .map(|(p, c)| json!({ "partition": p, "pi2": c.to_strings() }))
        .collect();
    json!({ "terms": terms })
}

/// `partition,pi2_power,coefficient` rows; partitions space-separated.
pub fn csv_volume(v: &VolumePoly) -> String {
    let mut out = String::from("partition,pi2_power,coefficient\n");
    for (c, k, p) in monomials(v) {
        out.push_str(&format!("{},{k},{}\n", join_u32(&p, " "), format_rational(&c)));
    }
    out
}

/// Partitions in table order, each with its full coefficient in `π²`.
fn monomial_partitions(v: &VolumePoly) -> Vec<(Vec<u32>, PiPoly)> {
    let mut out: Vec<_> = v.terms().map(|(p, c)| (p.clone(), c.clone())).collect();
    out.sort_by(|a, b| b.0.cmp(&a.0));
    out
}

pub fn join_u32(xs: &[u32], sep: &str) -> String {
    xs.iter().map(u32::to_string).collect::<Vec<_>>().join(sep)
}

/// Polynomial in a named variable, e.g. `1/48 + 1/12 t`; the variable `pi^2`
/// is written with its powers folded, as in `pi^4`.
pub fn plain_poly(c: &PiPoly, var: &str) -> String {
    let power = |k: usize| match (var, k) {
        (_, 1) => var.to_string(),
        ("pi^2", _) => format!("pi^{}", 2 * k),
        _ => format!("{var}^{k}"),
    };
    let terms = c
        .coeffs()
        .iter()
        .enumerate()
        .filter(|(_, q)| !q.is_zero())
        .map(|(k, q)| {
            let abs = format_rational(&q.abs());
            let body = match (k, abs.as_str()) {
                (0, _) => abs,
                (_, "1") => power(k),
                _ => format!("{abs} {}", power(k)),
            };
            (q.is_negative(), body)
        })
        .collect();
    join_signed(terms)
}

#[cfg(test)]
mod tests {
    use super::*;
    use moduli_core::exact::{int, rat};

    fn vol(terms: &[(&[u32], &[Rational])]) -> VolumePoly {
        let mut v = VolumePoly::new(4);
        for (p, c) in terms {
            v.add_term(p.to_vec(), &PiPoly::new(c.to_vec()));
        }
        v
    }

    #[test]
    fn table_typography() {
        let v = vol(&[(&[1], &[rat(1, 2)]), (&[], &[int(0), int(2)])]);
        assert_eq!(latex_volume(&v), "\\tfrac{1}{2} m_{(1)} + 2\\pi^2");
        assert_eq!(plain_volume(&v), "1/2 m(1) + 2 pi^2");
        let v = vol(&[
            (&[2, 1, 1], &[rat(3, 8)]),
            (&[2], &[int(0), rat(3, 2)]),
            (&[1], &[int(0), int(0), int(0), int(0), int(0), rat(1, 7)]),
            (&[3, 1], &[int(1)]),
        ]);
        assert_eq!(
            latex_volume(&v),
            "m_{(3,1)} + \\tfrac{3}{8} m_{(2,1^2)} + \\tfrac{3\\pi^2}{2} m_{(2)} + \\tfrac{\\pi^{10}}{7} m_{(1)}"
        );
        assert_eq!(latex_volume(&VolumePoly::new(1)), "0");
    }

    #[test]
    fn signs() {
        assert_eq!(latex_rational(&rat(-1, 12)), "-\\tfrac{1}{12}");
        assert_eq!(latex_rational(&int(3)), "3");
        assert_eq!(
            plain_poly(&PiPoly::new(vec![rat(1, 48), rat(-1, 12), int(1)]), "t"),
            "1/48 - 1/12 t + t^2"
        );
        assert_eq!(
            plain_poly(&PiPoly::new(vec![int(0), int(2), rat(1, 3)]), "pi^2"),
            "2 pi^2 + 1/3 pi^4"
        );
    }
}
