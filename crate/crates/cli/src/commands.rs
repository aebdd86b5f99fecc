use std::fmt::Write as _;
use std::fs;
use std::time::Duration;

use moduli_core::asymptotics::{ratio_series, PartitionRule};
use moduli_core::cohft::{givental_correlator, preset_mumford, preset_trivial, preset_wp, CohFTSpec};
use moduli_core::exact::{format_rational, UniPoly};
use moduli_core::kappa::KappaEngine;
use moduli_core::mirzakhani::mirzakhani_check;
use moduli_core::ribbon::{enumerate_ribbon_with_budget, sum_over};
use moduli_core::stable_graphs::{enumerate, euler_characteristic};
use moduli_core::tr::{LocalCurve, TrEngine};
use moduli_core::virasoro::{
    apply_virasoro, bracket_with, build_partition_function, random_test_polynomial, structure_constant,
};
use moduli_core::witten::witten_table;
use moduli_core::{PiPoly, Rational, VolumePoly, WittenEngine};
use serde_json::{json, Value};

use crate::render::{csv_volume, join_u32, json_volume, latex_rational, latex_volume, plain_poly, plain_volume};
use crate::{Command, Curve, Failure, Format, Preset};

/// Output on success; on failure, any partial output and the reason.
pub type Outcome = Result<String, (String, Failure)>;

fn unsupported(command: &str, format: Format) -> Failure {
    Failure::Usage(format!("{command} has no {format:?} output").to_lowercase())
}

fn json_line(v: Value) -> String {
    format!("{v}\n")
}

fn fail<T>(e: impl Into<Failure>) -> Result<T, (String, Failure)> {
    Err((String::new(), e.into()))
}

pub fn run(engine: &WittenEngine, command: &Command, format: Format) -> Outcome {
    match command {
        Command::Witten { g, d } => Ok(witten(engine, *g, d, format)),
        Command::WittenTable { max_euler } => witten_rows(engine, *max_euler, format),
        Command::Wp { g, n } => KappaEngine::new(engine)
            .wp_volume(*g, *n)
            .map(|v| volume(&v, format))
            .or_else(fail),
        Command::Kvol { g, n } => KappaEngine::new(engine)
            .kontsevich_volume(*g, *n)
            .map(|v| volume(&v, format))
            .or_else(fail),
        Command::KvolLaplace { g, n } => kvol_laplace(engine, *g, *n, format),
        Command::Graphs { g, n } => graphs(*g, *n, format),
        Command::Euler { g, n } => {
            let v = euler_characteristic(*g, *n).or_else(fail)?;
            Ok(match format {
                Format::Plain => format!("{}\n", format_rational(&v)),
                Format::Json => json_line(json!({ "g": g, "n": n, "value": format_rational(&v) })),
                Format::Csv => format!("g,n,value\n{g},{n},{}\n", format_rational(&v)),
                Format::Latex => format!("{}\n", latex_rational(&v)),
            })
        }
        Command::Ribbon { g, n, list, max_edges } => ribbon(*g, *n, *list, *max_edges, format),
        Command::Tr { curve, g, n } => tr(*curve, *g, *n, format),
        Command::Cohft { cohft, spec, g, d } => {
            let spec = match (cohft, spec) {
                (Some(p), _) => preset_spec(*p, *g, d.len()),
                (None, Some(path)) => {
                    let text = fs::read_to_string(path)
                        .map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))
                        .or_else(fail)?;
                    CohFTSpec::from_json(&text).or_else(fail)?
                }
                (None, None) => unreachable!("clap requires one of the two"),
            };
            let var = match cohft {
                Some(Preset::Wp) => "pi^2",
                Some(Preset::Hodge) => "t",
                _ => "x",
            };
            cohft_correlator(engine, &spec, var, *g, d, format)
        }
        Command::VirasoroCheck {
            cutoff,
            n_max,
            literal,
            seed,
        } => virasoro(engine, *cutoff, *n_max, *literal, *seed, format),
        Command::Asymptotics {
            rule,
            g_max,
            budget_secs,
        } => asymptotics(engine, rule, *g_max, *budget_secs, format),
        Command::MirzakhaniCheck {
            g,
            n,
            samples,
            tol,
            seed,
        } => mirzakhani(engine, *g, *n, *samples, *tol, *seed, format),
    }
}

fn witten(engine: &WittenEngine, g: u32, d: &[u32], format: Format) -> String {
    let v = engine.correlator(g, d);
    match format {
        Format::Plain => format!("{}\n", format_rational(&v)),
        Format::Json => json_line(json!({ "g": g, "d": d, "value": format_rational(&v) })),
        Format::Csv => format!("g,d,value\n{g},{},{}\n", join_u32(d, " "), format_rational(&v)),
        Format::Latex => format!("{} = {}\n", latex_bracket(g, d), latex_rational(&v)),
    }
}

fn latex_bracket(g: u32, d: &[u32]) -> String {
    let taus: String = d.iter().map(|x| format!("\\tau_{{{x}}}")).collect();
    format!("\\langle {taus} \\rangle_{{{g}}}")
}

fn witten_rows(engine: &WittenEngine, max_euler: u32, format: Format) -> Outcome {
    let rows: Vec<(u32, Vec<u32>, Rational)> = witten_table(engine, max_euler)
        .into_iter()
        .map(|(k, v)| (k.g(), k.d().iter().rev().copied().collect(), v))
        .collect();
    let mut out = String::new();
    match format {
        Format::Plain => {
            for (g, d, v) in &rows {
                writeln!(out, "{g} {} {}", join_u32(d, ","), format_rational(v)).unwrap();
            }
        }
        Format::Json => {
            let items: Vec<Value> = rows
                .iter()
                .map(|(g, d, v)| json!({ "g": g, "d": d, "value": format_rational(v) }))
                .collect();
            out = json_line(Value::Array(items));
        }
        Format::Csv => {
            out.push_str("g,d,value\n");
            for (g, d, v) in &rows {
                writeln!(out, "{g},{},{}", join_u32(d, " "), format_rational(v)).unwrap();
            }
        }
        Format::Latex => {
            for (g, d, v) in &rows {
                writeln!(out, "{} = {} \\\\", latex_bracket(*g, d), latex_rational(v)).unwrap();
            }
        }
    }
    Ok(out)
}

fn volume(v: &VolumePoly, format: Format) -> String {
    match format {
        Format::Plain => format!("{}\n", plain_volume(v)),
        Format::Json => json_line(json_volume(v)),
        Format::Csv => csv_volume(v),
        Format::Latex => format!("{}\n", latex_volume(v)),
    }
}

fn kvol_laplace(engine: &WittenEngine, g: u32, n: usize, format: Format) -> Outcome {
    let coeffs = KappaEngine::new(engine).laplace_volume(g, n).or_else(fail)?;
    let mut out = String::new();
    match format {
        Format::Plain => {
            for (d, c) in &coeffs {
                writeln!(out, "{} {}", join_u32(d, ","), format_rational(c)).unwrap();
            }
        }
        Format::Json => {
            let items: Vec<Value> = coeffs
                .iter()
                .map(|(d, c)| json!({ "d": d, "value": format_rational(c) }))
                .collect();
            out = json_line(Value::Array(items));
        }
        Format::Csv => {
            out.push_str("d,value\n");
            for (d, c) in &coeffs {
                writeln!(out, "{},{}", join_u32(d, " "), format_rational(c)).unwrap();
            }
        }
        Format::Latex => return fail(unsupported("kvol-laplace", format)),
    }
    Ok(out)
}

fn graphs(g: u32, n: usize, format: Format) -> Outcome {
    let graphs = enumerate(g, n).or_else(fail)?;
    let mut out = String::new();
    match format {
        Format::Plain => {
            for gr in &graphs {
                writeln!(out, "{gr}").unwrap();
            }
        }
        Format::Json => {
            let items: Vec<Value> = graphs
                .iter()
                .map(|gr| {
                    json!({
                        "genera": gr.genera(),
                        "edges": gr.edges(),
                        "leaves": gr.leaves(),
                        "automorphisms": gr.automorphisms(),
                    })
                })
                .collect();
            out = json_line(Value::Array(items));
        }
        Format::Csv => {
            out.push_str("genera,edges,leaves,automorphisms\n");
            for gr in &graphs {
                let edges: Vec<String> = gr.edges().iter().map(|(a, b)| format!("{a}-{b}")).collect();
                let leaves: Vec<String> = gr.leaves().iter().map(usize::to_string).collect();
                writeln!(
                    out,
                    "{},{},{},{}",
                    join_u32(gr.genera(), " "),
                    edges.join(" "),
                    leaves.join(" "),
                    gr.automorphisms()
                )
                .unwrap();
            }
        }
        Format::Latex => return fail(unsupported("graphs", format)),
    }
    Ok(out)
}

fn ribbon(g: u32, n: usize, list: bool, max_edges: usize, format: Format) -> Outcome {
    let graphs = enumerate_ribbon_with_budget(g, n, max_edges).or_else(fail)?;
    let sum = sum_over(g, n, &graphs);
    let pairs = |key: &[(usize, usize)]| -> String { key.iter().map(|(i, j)| format!("({i},{j})")).collect() };
    let mut out = String::new();
    match format {
        Format::Plain => {
            writeln!(out, "graphs: {}", graphs.len()).unwrap();
            for (key, w) in &sum.terms {
                writeln!(out, "{} {}", format_rational(w), pairs(key)).unwrap();
            }
            if list {
                for gr in &graphs {
                    writeln!(out, "{gr}").unwrap();
                }
            }
        }
        Format::Json => {
            let terms: Vec<Value> = sum
                .terms
                .iter()
                .map(|(key, w)| json!({ "edges": key, "weight": format_rational(w) }))
                .collect();
            let mut doc = json!({ "g": g, "n": n, "graphs": graphs.len(), "terms": terms });
            if list {
                doc["list"] = graphs.iter().map(|gr| gr.to_string()).collect();
            }
            out = json_line(doc);
        }
        Format::Csv => {
            out.push_str("edges,weight\n");
            for (key, w) in &sum.terms {
                writeln!(out, "{},{}", pairs(key), format_rational(w)).unwrap();
            }
        }
        Format::Latex => return fail(unsupported("ribbon", format)),
    }
    Ok(out)
}

fn tr(curve: Curve, g: u32, n: usize, format: Format) -> Outcome {
    // (exponents, plain text, JSON value) per coefficient
    let rows: Vec<(Vec<u32>, String, Value)> = match curve {
        Curve::Airy => {
            let form = TrEngine::new(LocalCurve::airy()).correlator(g, n).or_else(fail)?;
            form.coeffs
                .iter()
                .map(|(d, c)| (d.clone(), format_rational(c), json!(format_rational(c))))
                .collect()
        }
        Curve::Sine => {
            let dim = (3 * g as i64 + n as i64 - 3).max(0) as i32;
            let curve = LocalCurve::<PiPoly>::sine(2 * dim + 4);
            let form = TrEngine::new(curve).correlator(g, n).or_else(fail)?;
            form.coeffs
                .iter()
                .map(|(d, c)| (d.clone(), plain_poly(c, "pi^2"), json!(c.to_strings())))
                .collect()
        }
    };
    let mut out = String::new();
    match format {
        Format::Plain => {
            for (d, c, _) in &rows {
                writeln!(out, "{} {c}", join_u32(d, ",")).unwrap();
            }
        }
        Format::Json => {
            let items: Vec<Value> = rows.iter().map(|(d, _, c)| json!({ "d": d, "c": c })).collect();
            out = json_line(Value::Array(items));
        }
        Format::Csv => {
            out.push_str("d,c\n");
            for (d, c, _) in &rows {
                writeln!(out, "{},{c}", join_u32(d, " ")).unwrap();
            }
        }
        Format::Latex => return fail(unsupported("tr", format)),
    }
    Ok(out)
}

fn preset_spec(preset: Preset, g: u32, n: usize) -> CohFTSpec<UniPoly> {
    let dim = (3 * g as i64 + n as i64 - 3).max(1) as usize;
    match preset {
        Preset::Wp => preset_wp(dim),
        Preset::Hodge => preset_mumford(dim),
        Preset::Trivial => preset_trivial(),
    }
}

fn parse_insertion(s: &str) -> Result<(usize, u32), Failure> {
    let bad = || Failure::Usage(format!("invalid insertion {s:?}: expected d or mu:d"));
    match s.split_once(':') {
        None => Ok((0, s.trim().parse().map_err(|_| bad())?)),
        Some((mu, d)) => Ok((
            mu.trim().parse().map_err(|_| bad())?,
            d.trim().parse().map_err(|_| bad())?,
        )),
    }
}

fn cohft_correlator(
    engine: &WittenEngine,
    spec: &CohFTSpec<UniPoly>,
    var: &str,
    g: u32,
    d: &[String],
    format: Format,
) -> Outcome {
    let insertions: Vec<(usize, u32)> = d
        .iter()
        .map(|s| parse_insertion(s))
        .collect::<Result<_, _>>()
        .or_else(fail)?;
    let value = givental_correlator(engine, spec, g, &insertions).or_else(fail)?;
    let mus: Vec<usize> = insertions.iter().map(|&(mu, _)| mu).collect();
    let ds: Vec<u32> = insertions.iter().map(|&(_, d)| d).collect();
    Ok(match format {
        Format::Plain => format!("{}\n", plain_poly(&value, var)),
        Format::Json => json_line(json!({ "g": g, "mu": mus, "d": ds, "value": value.to_strings() })),
        Format::Csv => format!("g,insertions,value\n{g},{},{}\n", d.join(" "), plain_poly(&value, var)),
        Format::Latex => return fail(unsupported("cohft", format)),
    })
}

fn virasoro(engine: &WittenEngine, cutoff: u32, n_max: i64, literal: bool, seed: u64, format: Format) -> Outcome {
    if n_max < -1 {
        return fail(Failure::Usage("n-max must be at least -1".into()));
    }
    if matches!(format, Format::Csv | Format::Latex) {
        return fail(unsupported("virasoro-check", format));
    }
    let z = build_partition_function(engine, cutoff, (n_max + 2).max(cutoff as i64 + 2) as usize);
    let mut annihilation = Vec::new();
    for n in -1..=n_max {
        let r = apply_virasoro(n, &z).or_else(fail)?;
        annihilation.push((n, r));
    }
    let test = random_test_polynomial(seed, 8, 3, 12);
    let mut brackets = Vec::new();
    for m in -1..=n_max {
        for n in -1..=n_max {
            let c = if literal {
                Rational::from_integer((m - n).into())
            } else {
                structure_constant(m, n)
            };
            let r = bracket_with(m, n, &c, &test).or_else(fail)?;
            brackets.push((m, n, r));
        }
    }
    let failed = annihilation.iter().any(|(_, r)| !r.is_zero()) || brackets.iter().any(|(_, _, r)| !r.is_zero());
    let form = if literal { "literal" } else { "normalized" };
    let out = match format {
        Format::Json => {
            let ann: Vec<Value> = annihilation
                .iter()
                .map(|(n, r)| json!({ "n": n, "ok": r.is_zero(), "residual": r.to_string() }))
                .collect();
            let fails: Vec<Value> = brackets
                .iter()
                .filter(|(_, _, r)| !r.is_zero())
                .map(|(m, n, r)| json!({ "m": m, "n": n, "residual": r.to_string() }))
                .collect();
            json_line(json!({ "cutoff": cutoff, "annihilation": ann, "bracket": { "form": form, "failures": fails } }))
        }
        _ => {
            let mut out = String::new();
            for (n, r) in &annihilation {
                if r.is_zero() {
                    writeln!(out, "L_{n} Z = 0: ok").unwrap();
                } else {
                    writeln!(out, "L_{n} Z = 0: FAIL, residual {r}").unwrap();
                }
            }
            let bad: Vec<_> = brackets.iter().filter(|(_, _, r)| !r.is_zero()).collect();
            let pairs = brackets.len();
            if bad.is_empty() {
                writeln!(out, "[L_m, L_n] ({form}): ok for {pairs} pairs").unwrap();
            } else {
                writeln!(out, "[L_m, L_n] ({form}): FAIL for {} of {pairs} pairs", bad.len()).unwrap();
                for (m, n, r) in bad {
                    writeln!(out, "  m={m} n={n} residual {r}").unwrap();
                }
            }
            out
        }
    };
    if failed {
        Err((out, Failure::Compute("Virasoro check failed".into())))
    } else {
        Ok(out)
    }
}

fn asymptotics(engine: &WittenEngine, rule: &str, g_max: u32, budget_secs: Option<f64>, format: Format) -> Outcome {
    let rule = PartitionRule::parse(rule)
        .ok_or_else(|| Failure::Usage(format!("unknown rule {rule:?}")))
        .or_else(fail)?;
    let budget = budget_secs
        .map(|s| Duration::try_from_secs_f64(s).map_err(|_| Failure::Usage(format!("invalid budget {s}"))))
        .transpose()
        .or_else(fail)?;
    let series = ratio_series(engine, rule, g_max, budget);
    let out = match format {
        Format::Plain | Format::Csv => series.to_csv(),
        Format::Json => {
            let rows: Vec<Value> = series
                .rows
                .iter()
                .map(|r| json!({ "g": r.g, "d": r.d, "numerator": format_rational(&r.numerator), "ratio": r.ratio }))
                .collect();
            json_line(json!({ "rule": rule.name(), "complete": series.complete, "rows": rows }))
        }
        Format::Latex => return fail(unsupported("asymptotics", format)),
    };
    if series.complete {
        Ok(out)
    } else {
        let reached = series.rows.last().map_or(1, |r| r.g);
        Err((
            out,
            Failure::Compute(format!("time budget exhausted after genus {reached}")),
        ))
    }
}

fn mirzakhani(engine: &WittenEngine, g: u32, n: usize, samples: usize, tol: f64, seed: u64, format: Format) -> Outcome {
    if tol.is_nan() || tol <= 0.0 {
        return fail(Failure::Usage("tol must be positive".into()));
    }
    let kappa = KappaEngine::new(engine);
    let rows = mirzakhani_check(&kappa, g, n, samples, seed, tol).or_else(fail)?;
    let out = match format {
        Format::Plain | Format::Csv => {
            let mut out: String = (1..=n).map(|i| format!("l_{i},")).collect();
            out.push_str("symbolic,quadrature,rel_err,pass\n");
            for r in &rows {
                for l in &r.lengths {
                    write!(out, "{l:.12e},").unwrap();
                }
                writeln!(
                    out,
                    "{:.12e},{:.12e},{:.3e},{}",
                    r.symbolic,
                    r.quadrature,
                    r.rel_err,
                    if r.pass { "PASS" } else { "FAIL" }
                )
                .unwrap();
            }
            out
        }
        Format::Json => {
            let items: Vec<Value> = rows
                .iter()
                .map(|r| {
                    json!({
                        "lengths": r.lengths,
                        "symbolic": r.symbolic,
                        "quadrature": r.quadrature,
                        "rel_err": r.rel_err,
                        "pass": r.pass,
                    })
                })
                .collect();
            json_line(Value::Array(items))
        }
        Format::Latex => return fail(unsupported("mirzakhani-check", format)),
    };
    let failed = rows.iter().filter(|r| !r.pass).count();
    if failed == 0 {
        Ok(out)
    } else {
        Err((
            out,
            Failure::Compute(format!("{failed} of {} samples exceed tolerance {tol:e}", rows.len())),
        ))
    }
}
