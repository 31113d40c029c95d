//! CSV reproductions of the closed-form tables.

use std::fs;

use anyhow::Result;
use serde_json::json;

use qconsensus::graphs::FamilySpec;
use qconsensus::optimizer::{
    closed_form, cross_validate, solve_generic, CrossValidation, OptimizationResult, Regime, SolverOptions,
};
use qconsensus::scheme::{complete_graph_optimum, qubit_category_optimum};
use qconsensus::{fmt_sig, Exec};

use crate::{TablesArgs, Which};

const ORACLE_TOL: f64 = 1e-4;
/// Largest complete graph whose qubit optimum the solver re-derives.
const SOLVER_COMPLETE_MAX: usize = 7;

const LE: Regime = Regime::AtMostDSquared;
const EQ: Regime = Regime::DSquaredPlusOne;

fn family_name(spec: &FamilySpec) -> String {
    json!(spec)["family"].as_str().unwrap_or("family").to_string()
}

/// `n=4` or `p=3;q=2`, in declaration order.
fn params(spec: &FamilySpec) -> String {
    let v = json!(spec);
    let obj = v.as_object().expect("family specs serialise to objects");
    obj.iter()
        .filter(|(k, _)| k.as_str() != "family")
        .map(|(k, v)| match v {
            serde_json::Value::Array(factors) => {
                let inner: Vec<String> = factors
                    .iter()
                    .map(|f| {
                        let spec: FamilySpec = serde_json::from_value(f.clone()).expect("factor spec");
                        format!("{}({})", family_name(&spec), params(&spec))
                    })
                    .collect();
                format!("{k}={}", inner.join("x"))
            }
            other => format!("{k}={other}"),
        })
        .collect::<Vec<_>>()
        .join(";")
}

fn weights_cell(r: &OptimizationResult) -> String {
    r.group_names
        .iter()
        .zip(r.weights.as_slice())
        .map(|(g, w)| format!("{g}={}", fmt_sig(*w)))
        .collect::<Vec<_>>()
        .join(";")
}

fn opts() -> SolverOptions {
    SolverOptions::default()
}

fn lp_points() -> Vec<FamilySpec> {
    use FamilySpec::*;
    let mut v = Vec::new();
    for n in 3..=8 {
        v.push(Complete { n });
    }
    for n in 3..=8 {
        v.push(Cycle { n });
    }
    for n in 3..=8 {
        v.push(Star { n });
    }
    for (n1, n2) in [(3, 2), (4, 2), (4, 3)] {
        v.push(Prism { n1, n2 });
    }
    for factors in [
        vec![Cycle { n: 4 }, Complete { n: 3 }],
        vec![Cycle { n: 5 }, Path { n: 2 }],
        vec![Star { n: 4 }, Complete { n: 2 }],
    ] {
        v.push(CartesianProduct { factors });
    }
    v
}

fn sdp_points() -> Vec<FamilySpec> {
    use FamilySpec::*;
    let mut v = Vec::new();
    for (p, q) in [(3, 1), (3, 2), (4, 2), (2, 1), (2, 2), (2, 3)] {
        v.push(CcsStar { p, q });
    }
    for (p, q1, q2) in [(3, 1, 1), (5, 1, 2), (4, 2, 1)] {
        v.push(CcsStar2 { p, q1, q2 });
    }
    for (p, q) in [(3, 1), (5, 2), (4, 3)] {
        v.push(SymmetricStar { p, q });
    }
    for (p, q) in [(4, 2), (6, 2), (10, 3), (2, 2), (3, 3), (2, 3)] {
        v.push(Palm { p, q });
    }
    for (p, q) in [(2, 1), (3, 1), (4, 2), (8, 2)] {
        v.push(Lollipop { p, q });
    }
    for (n1, n2, n3) in [(1, 2, 1), (2, 2, 2), (1, 4, 1), (1, 5, 1)] {
        v.push(CoupledComplete { n1, n2, n3 });
    }
    v
}

type Rows = Vec<Vec<String>>;

/// Closed form per (spec, regime), with solver columns when `check` is set.
fn formula_rows(points: &[(FamilySpec, Regime)], check: bool) -> Result<(Vec<&'static str>, Rows)> {
    let mut header = vec!["topology", "params", "regime", "slem", "weights"];
    if check {
        header.extend(["oracle_slem", "delta_slem", "max_delta_weight", "pass"]);
    }
    let rows = Exec::default()
        .map(points, |(spec, regime)| -> Result<Vec<String>> {
            let mut row = vec![family_name(spec), params(spec), regime.to_string()];
            if check {
                let v = cross_validate(spec, *regime, &opts(), ORACLE_TOL)?;
                row.extend([fmt_sig(v.closed.slem), weights_cell(&v.closed)]);
                row.extend(check_cells(&v));
            } else {
                let r = closed_form(spec, *regime)?;
                row.extend([fmt_sig(r.slem), weights_cell(&r)]);
            }
            Ok(row)
        })
        .into_iter()
        .collect::<Result<_>>()?;
    Ok((header, rows))
}

fn check_cells(v: &CrossValidation) -> [String; 4] {
    [fmt_sig(v.generic.slem), fmt_sig(v.delta_slem), fmt_sig(v.max_delta_weight()), v.pass.to_string()]
}

/// The six connected graphs on four vertices. The row named lollipop is the
/// triangle with a pendant vertex; the row named paw is K4 minus an edge.
fn n4_rows() -> Result<(Vec<&'static str>, Rows)> {
    use FamilySpec::*;
    let header = vec![
        "table_row",
        "topology",
        "regime",
        "slem",
        "weights",
        "oracle_slem",
        "delta_slem",
        "verdict",
        "formula_slem",
        "formula_verdict",
    ];
    let points = [
        ("path", Path { n: 4 }),
        ("star", Star { n: 4 }),
        ("cycle", Cycle { n: 4 }),
        ("complete", Complete { n: 4 }),
        ("lollipop", Paw),
        ("paw", Diamond),
    ];
    let rows = Exec::default()
        .map(&points, |(label, spec)| -> Result<Vec<String>> {
            let v = cross_validate(spec, LE, &opts(), ORACLE_TOL)?;
            let verdict = if v.pass { "agree" } else { "disagree" };
            let mut row = vec![
                label.to_string(),
                family_name(spec),
                LE.to_string(),
                fmt_sig(v.closed.slem),
                weights_cell(&v.closed),
                fmt_sig(v.generic.slem),
                fmt_sig(v.delta_slem),
                verdict.to_string(),
            ];
            if *spec == Paw {
                // the general lollipop formula at the same graph
                let f = closed_form(&Lollipop { p: 2, q: 1 }, LE)?;
                let agree = (f.slem - v.generic.slem).abs() <= ORACLE_TOL;
                row.extend([fmt_sig(f.slem), if agree { "agree" } else { "disagree" }.to_string()]);
            } else {
                row.extend([String::new(), String::new()]);
            }
            Ok(row)
        })
        .into_iter()
        .collect::<Result<_>>()?;
    Ok((header, rows))
}

fn qubit_complete_rows(n_max: usize, check: bool) -> Result<(Vec<&'static str>, Rows)> {
    let mut header = vec!["N", "partition", "w", "slem"];
    if check {
        header.extend(["search_slem", "search_delta", "solver_slem", "solver_delta", "pass"]);
    }
    let ns: Vec<usize> = (4..=n_max).collect();
    let rows = Exec::default()
        .map(&ns, |&n| -> Result<Vec<String>> {
            let opt = qubit_category_optimum(n)?;
            let mut row = vec![n.to_string(), opt.argmin_partition.to_string(), fmt_sig(opt.w), fmt_sig(opt.slem)];
            if check {
                let search = complete_graph_optimum(n, 2)?;
                let search_delta = (search.slem - opt.slem).abs();
                let mut pass = search_delta <= 1e-12;
                row.extend([fmt_sig(search.slem), fmt_sig(search_delta)]);
                if n <= SOLVER_COMPLETE_MAX {
                    let g = qconsensus::graphs::build_family(&FamilySpec::Complete { n })?.graph;
                    let r = solve_generic(&g, n, 2, &opts())?;
                    let delta = (r.slem - opt.slem).abs();
                    pass &= r.converged && delta <= ORACLE_TOL;
                    row.extend([fmt_sig(r.slem), fmt_sig(delta)]);
                } else {
                    row.extend([String::new(), String::new()]);
                }
                row.push(pass.to_string());
            }
            Ok(row)
        })
        .into_iter()
        .collect::<Result<_>>()?;
    Ok((header, rows))
}

pub fn run(a: &TablesArgs) -> Result<u8> {
    let selected = a.graph.family_spec()?;
    let (header, rows) = match a.which {
        Which::N4 => n4_rows()?,
        Which::QubitComplete => {
            if a.n_max < 4 {
                return Err(crate::usage("--n-max must be at least 4"));
            }
            qubit_complete_rows(a.n_max, a.check)?
        }
        Which::Lp | Which::SdpLe | Which::SdpEq => {
            let specs = match selected {
                Some(spec) => vec![spec],
                None if a.which == Which::Lp => lp_points(),
                None => sdp_points(),
            };
            let regimes: &[Regime] = match a.which {
                Which::Lp => &[LE, EQ],
                Which::SdpLe => &[LE],
                _ => &[EQ],
            };
            let points: Vec<(FamilySpec, Regime)> =
                specs.iter().flat_map(|s| regimes.iter().map(move |r| (s.clone(), *r))).collect();
            formula_rows(&points, a.check)?
        }
    };
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(&header)?;
    for row in rows {
        w.write_record(&row)?;
    }
    let bytes = w.into_inner().map_err(|e| anyhow::anyhow!("csv: {e}"))?;
    match &a.out {
        Some(path) => fs::write(path, bytes)?,
        None => print!("{}", String::from_utf8(bytes)?),
    }
    Ok(0)
}
