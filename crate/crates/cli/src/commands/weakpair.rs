use std::collections::BTreeMap;

use krein_lab::weakpair::{
    condition1_constant, double, weakpair_report, BracketKind, DiagnosticsConfig, DiagnosticsTable, OperatorPair,
    WeakpairReport,
};
use serde::Serialize;

use crate::config::AutoOr;
use crate::output::{CheckKind, Run, APPROX_IDENTITY_SLACK, DOUBLING_TOL};
use crate::CliError;

/// Fitted-rate window for the `lemma_a1_*` tables.
pub const A1_RATE: (f64, f64) = (-1.2, -0.8);
/// `‖A_nξ - ξ‖` rate window, `-1 ± 0.3`.
pub const APPROX_IDENTITY_RATE: (f64, f64) = (-1.3, -0.7);
/// Last value of the `lemma_a2_*` and `prop23_*` tables relative to the first.
pub const DECAY_FACTOR: f64 = 0.2;
/// Upper-half-grid max/min of the `lemma_a3_*` norms.
pub const A3_RATIO: f64 = 3.0;
/// Ceiling on the resolvent approximation rate.
pub const RESOLVENT_RATE: f64 = -0.8;

#[derive(Clone, Copy, Debug, Serialize)]
pub struct WeakpairArgs {
    pub lambda0: AutoOr,
    pub mu: AutoOr,
    pub grid_count: usize,
    pub seed: u64,
}

impl WeakpairArgs {
    fn diagnostics(&self) -> DiagnosticsConfig {
        DiagnosticsConfig {
            lambda0: self.lambda0.value(),
            grid_count: self.grid_count,
            mu: self.mu.value(),
            seed: self.seed,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct TableEntry {
    pub key: String,
    pub file: String,
    pub first: f64,
    pub last: f64,
    pub fitted_rate: Option<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct A3Entry {
    pub direction: String,
    pub sup_s: f64,
    pub sup_t: f64,
    pub upper_half_ratio_s: f64,
    pub upper_half_ratio_t: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct Bounds {
    pub lemma_a3: Vec<A3Entry>,
    pub approx_identity_max_norm: f64,
    /// `C` of the doubled pair, for anticommutator input.
    #[serde(rename = "C_doubled")]
    pub c_doubled: Option<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct WeakpairSummary {
    pub label: String,
    pub kind: BracketKind,
    pub dim: usize,
    pub doubled: bool,
    #[serde(rename = "C")]
    pub c: f64,
    #[serde(rename = "C_old")]
    pub c_old: f64,
    pub lambda0: f64,
    pub lambda0_auto: bool,
    /// Imaginary part of `μ` on the `+i` grid.
    pub mu: f64,
    pub grid_count: usize,
    pub seed: u64,
    pub test_vectors: usize,
    pub rates: BTreeMap<String, Option<f64>>,
    pub bounds: Bounds,
    pub tables: Vec<TableEntry>,
}

/// `lemma_a1_s_+i` becomes `lemma_a1_s_plus_i`.
pub fn file_key(key: &str) -> String {
    key.replace("+i", "plus_i").replace("-i", "minus_i")
}

fn write_table(run: &mut Run, prefix: &str, t: &DiagnosticsTable) -> Result<TableEntry, CliError> {
    let file = format!("{}.csv", file_key(&t.key()));
    run.write(&format!("{prefix}{file}"), &t.to_csv())?;
    Ok(TableEntry {
        key: t.key(),
        file,
        first: t.first(),
        last: t.last(),
        fitted_rate: t.fitted_rate,
    })
}

fn rate_in(t: &DiagnosticsTable, (lo, hi): (f64, f64)) -> (bool, f64) {
    if t.is_zero() {
        return (true, 0.0);
    }
    match t.fitted_rate {
        Some(r) => (lo <= r && r <= hi, r),
        None => (false, f64::NAN),
    }
}

/// Runs every diagnostic on `pair` and writes the tables and the summary.
pub fn weakpair(
    run: &mut Run,
    prefix: &str,
    label: &str,
    pair: &OperatorPair,
    args: &WeakpairArgs,
) -> Result<(WeakpairReport, WeakpairSummary), CliError> {
    let report = weakpair_report(pair, &args.diagnostics()).map_err(|e| CliError::input(label, e))?;
    let c_doubled = match pair.kind() {
        BracketKind::Anticommutator => {
            let d = double(pair).map_err(|e| CliError::input(label, e))?;
            Some(condition1_constant(&d).map_err(|e| CliError::input(label, e))?)
        }
        BracketKind::Commutator => None,
    };

    let mut tables = Vec::new();
    for t in &report.tables {
        tables.push(write_table(run, prefix, t)?);
    }
    let mut a3 = Vec::new();
    for b in &report.lemma_a3 {
        tables.push(write_table(run, prefix, &b.s_norms)?);
        tables.push(write_table(run, prefix, &b.t_norms)?);
        a3.push(A3Entry {
            direction: b.s_norms.meta.direction.label().to_string(),
            sup_s: b.sup_s,
            sup_t: b.sup_t,
            upper_half_ratio_s: b.upper_half_ratio_s,
            upper_half_ratio_t: b.upper_half_ratio_t,
        });
    }

    run.invariant_le(
        format!("{label}_approx_identity_norm"),
        report.approx_identity_max_norm,
        1.0 + APPROX_IDENTITY_SLACK,
    );
    if let Some(cd) = c_doubled {
        let rel = (cd - report.c).abs() / report.c.abs().max(f64::MIN_POSITIVE);
        let rel = if cd == report.c { 0.0 } else { rel };
        run.invariant_le(format!("{label}_doubling_preserves_C"), rel, DOUBLING_TOL);
    }
    findings(run, label, &report);

    let mut rates = report.rates.clone();
    for b in &report.lemma_a3 {
        rates.insert(b.s_norms.key(), b.s_norms.fitted_rate);
        rates.insert(b.t_norms.key(), b.t_norms.fitted_rate);
    }
    let summary = WeakpairSummary {
        label: label.to_string(),
        kind: report.kind,
        dim: report.dim,
        doubled: report.doubled,
        c: report.c,
        c_old: report.c_old,
        lambda0: report.lambda0,
        lambda0_auto: report.lambda0_auto,
        mu: report.mu.im,
        grid_count: report.grid_count,
        seed: report.seed,
        test_vectors: report.test_vectors,
        rates,
        bounds: Bounds {
            lemma_a3: a3,
            approx_identity_max_norm: report.approx_identity_max_norm,
            c_doubled,
        },
        tables,
    };
    run.write_json(&format!("{prefix}weakpair_summary.json"), &summary)?;
    Ok((report, summary))
}

fn findings(run: &mut Run, label: &str, report: &WeakpairReport) {
    for t in &report.tables {
        let key = t.key();
        let name = format!("{label}_{}", file_key(&key));
        if t.name.starts_with("lemma_a1") {
            let (ok, r) = rate_in(t, A1_RATE);
            run.check(CheckKind::Finding, format!("{name}_rate"), ok, r, "in [-1.2, -0.8]");
        } else if t.name.starts_with("lemma_a2") || t.name.starts_with("prop23") {
            let ratio = if t.is_zero() { 0.0 } else { t.last() / t.first() };
            run.check(
                CheckKind::Finding,
                format!("{name}_decay"),
                t.is_zero() || ratio < DECAY_FACTOR,
                ratio,
                format!("last/first < {DECAY_FACTOR}"),
            );
        } else if t.name == "approx_identity" {
            let (ok, r) = rate_in(t, APPROX_IDENTITY_RATE);
            run.check(CheckKind::Finding, format!("{name}_rate"), ok, r, "in [-1.3, -0.7]");
        } else if t.name == "resolvent_approx" {
            let (ok, r) = if t.is_zero() {
                (true, 0.0)
            } else {
                match t.fitted_rate {
                    Some(r) => (r <= RESOLVENT_RATE, r),
                    None => (false, f64::NAN),
                }
            };
            run.check(
                CheckKind::Finding,
                format!("{name}_rate"),
                ok,
                r,
                format!("<= {RESOLVENT_RATE}"),
            );
        }
    }
    for b in &report.lemma_a3 {
        let dir = b.s_norms.meta.direction.label();
        let finite = b.sup_s.is_finite() && b.sup_t.is_finite();
        let ratio = b.upper_half_ratio_s.max(b.upper_half_ratio_t);
        run.check(
            CheckKind::Finding,
            format!("{label}_lemma_a3_{}_sup", file_key(dir)),
            finite,
            b.sup_s.max(b.sup_t),
            "finite",
        );
        run.check(
            CheckKind::Finding,
            format!("{label}_lemma_a3_{}_upper_half_ratio", file_key(dir)),
            ratio <= A3_RATIO,
            ratio,
            format!("<= {A3_RATIO}"),
        );
    }
}
