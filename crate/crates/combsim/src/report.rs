//! Serializable views of verification reports. Mode numbers are 1-based.

use std::fmt::Write as _;

use combsim_core::verify::{ComponentReport, NullifierRow};
use combsim_core::VerificationReport;
use serde::Serialize;

use crate::io::{fmt_f64, matrix_rows};

#[derive(Debug, Serialize)]
pub struct NullifierJson {
    pub id: usize,
    pub mode: usize,
    pub component: usize,
    pub q: Vec<f64>,
    pub p: Vec<f64>,
    pub vacuum_variance: f64,
    pub variances: Vec<f64>,
    pub normalized: Vec<f64>,
    pub fitted_exponent: f64,
    pub intercept: f64,
    pub max_residual: f64,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub baseline: Vec<f64>,
    pub pass: bool,
}

#[derive(Debug, Serialize)]
pub struct ComponentJson {
    pub modes: Vec<usize>,
    /// Reference vertex `i` sits at mode `witness[i]`.
    pub witness: Option<Vec<usize>>,
    pub rotations: Vec<usize>,
    pub channel_exponents: Vec<f64>,
    pub pass: bool,
}

#[derive(Debug, Serialize)]
pub struct GridJson {
    pub rows: usize,
    pub cols: usize,
    pub weight: f64,
    pub signs: Vec<f64>,
    pub witness: Vec<usize>,
}

#[derive(Debug, Serialize)]
pub struct MeasurementJson {
    pub measured: Vec<usize>,
    pub remaining: Vec<usize>,
    pub reduced_graph: Vec<Vec<f64>>,
    pub grid: Option<GridJson>,
}

#[derive(Debug, Serialize)]
pub struct TolerancesJson {
    pub exponent: f64,
    pub variance_ratio: f64,
}

#[derive(Debug, Serialize)]
pub struct ReportJson {
    pub schedule: Vec<f64>,
    pub rotations: Vec<usize>,
    pub nullifiers: Vec<NullifierJson>,
    pub channel_exponents: Vec<f64>,
    pub channel_residual: f64,
    pub components: Vec<ComponentJson>,
    pub measurement: Option<MeasurementJson>,
    pub tolerances: TolerancesJson,
    pub pass: bool,
}

fn one_based(xs: &[usize]) -> Vec<usize> {
    xs.iter().map(|x| x + 1).collect()
}

fn nullifier(id: usize, row: &NullifierRow) -> NullifierJson {
    NullifierJson {
        id: id + 1,
        mode: row.mode + 1,
        component: row.component + 1,
        q: row.combination.q_coeffs().to_vec(),
        p: row.combination.p_coeffs().to_vec(),
        vacuum_variance: row.vacuum_variance,
        variances: row.variances.clone(),
        normalized: row.normalized(),
        fitted_exponent: row.fit.slope,
        intercept: row.fit.intercept,
        max_residual: row.fit.max_residual,
        baseline: row.baseline.clone(),
        pass: row.pass,
    }
}

fn component(c: &ComponentReport) -> ComponentJson {
    ComponentJson {
        modes: one_based(&c.modes),
        witness: c.witness.as_ref().map(|w| one_based(w.as_slice())),
        rotations: one_based(&c.rotations),
        channel_exponents: c.channel_exponents.clone(),
        pass: c.pass,
    }
}

impl From<&VerificationReport> for ReportJson {
    fn from(r: &VerificationReport) -> Self {
        Self {
            schedule: r.schedule.clone(),
            rotations: one_based(&r.rotations),
            nullifiers: r.nullifiers.iter().enumerate().map(|(i, n)| nullifier(i, n)).collect(),
            channel_exponents: r.channel_exponents.clone(),
            channel_residual: r.channel_residual,
            components: r.components.iter().map(component).collect(),
            measurement: r.measurement.as_ref().map(|m| MeasurementJson {
                measured: one_based(&m.measured),
                remaining: one_based(&m.remaining),
                reduced_graph: matrix_rows(m.reduced.entries()),
                grid: m.grid_match.as_ref().map(|g| GridJson {
                    rows: g.rows,
                    cols: g.cols,
                    weight: g.weight,
                    signs: g.signs.clone(),
                    // grid vertex i -> original cube vertex
                    witness: g.witness.as_slice().iter().map(|&k| m.remaining[k] + 1).collect(),
                }),
            }),
            tolerances: TolerancesJson {
                exponent: r.tolerances.exponent,
                variance_ratio: r.tolerances.variance_ratio,
            },
            pass: r.pass,
        }
    }
}

/// One row per `(r, nullifier)`.
pub fn report_csv(r: &VerificationReport) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["r", "nullifier_id", "variance", "normalized_variance", "fitted_exponent"])
        .expect("in-memory write");
    for (k, &rv) in r.schedule.iter().enumerate() {
        for (i, n) in r.nullifiers.iter().enumerate() {
            w.write_record([
                fmt_f64(rv),
                (i + 1).to_string(),
                fmt_f64(n.variances[k]),
                fmt_f64(n.variances[k] / n.vacuum_variance),
                fmt_f64(n.fit.slope),
            ])
            .expect("in-memory write");
        }
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8")
}

fn list(xs: &[usize]) -> String {
    xs.iter().map(|x| (x + 1).to_string()).collect::<Vec<_>>().join(",")
}

pub fn report_text(r: &VerificationReport) -> String {
    let mut s = String::new();
    let verdict = if r.pass { "PASS" } else { "FAIL" };
    let _ = writeln!(s, "{verdict}");
    let _ = writeln!(s, "schedule: {:?}", r.schedule);
    let _ = writeln!(s, "rotated modes: {}", list(&r.rotations));
    let _ = writeln!(s, "{:>4} {:>5} {:>14} {:>14}  ok", "id", "mode", "exponent", "final/vacuum");
    for (i, n) in r.nullifiers.iter().enumerate() {
        let last = n.variances.last().copied().unwrap_or(f64::NAN) / n.vacuum_variance;
        let ok = if n.pass { "yes" } else { "no" };
        let _ = writeln!(s, "{:>4} {:>5} {:>14.6} {:>14.6e}  {ok}", i + 1, n.mode + 1, n.fit.slope, last);
    }
    let exps: Vec<String> = r.channel_exponents.iter().map(|e| format!("{e:.6}")).collect();
    let _ = writeln!(s, "channel exponents: {}", exps.join(" "));
    if r.components.len() > 1 || r.components.iter().any(|c| c.witness.is_some()) {
        for (i, c) in r.components.iter().enumerate() {
            let ok = if c.pass { "pass" } else { "fail" };
            let _ = writeln!(s, "component {}: modes {} rotated {} {ok}", i + 1, list(&c.modes), list(&c.rotations));
        }
    }
    if let Some(m) = &r.measurement {
        let _ = writeln!(s, "measured Q on {}; remaining {}", list(&m.measured), list(&m.remaining));
        match &m.grid_match {
            Some(g) => {
                let signs: Vec<&str> = g.signs.iter().map(|x| if *x < 0.0 { "-" } else { "+" }).collect();
                let _ = writeln!(s, "reduced graph: {}x{} grid, edge signs {}", g.rows, g.cols, signs.join(""));
            }
            None => {
                let _ = writeln!(s, "reduced graph: no grid match");
            }
        }
    }
    s
}
