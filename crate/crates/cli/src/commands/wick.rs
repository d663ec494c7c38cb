use krein_lab::linops::{BlockDiagonal, CMatrix};
use krein_lab::random;
use krein_lab::wick::{
    check_indefinite_module, lattice_operator, roundtrip_residual, roundtrip_residual_pair, wick_rotate,
    COMPACTNESS_CAVEAT,
};
use num_complex::Complex64;
use serde::Serialize;

use super::lattice::build_model;
use crate::config::ExperimentConfig;
use crate::output::{CheckKind, Run, WICK_TOL};
use crate::CliError;

/// Leading compactness-proxy values reported per operator.
pub const PROXY_HEAD: usize = 5;
/// Window for `‖[D, M_{exp(i x₁)}]‖` once `N ≥ 16`.
pub const COMMUTATOR_WINDOW: (f64, f64) = (0.9, 1.05);
/// Relative drift allowed in the proxy head between refinements.
pub const PROXY_STABILITY: f64 = 0.1;
/// Smallest `N` at which the lattice findings apply.
pub const MIN_FINDING_POINTS: usize = 16;

#[derive(Clone, Debug, Serialize)]
pub struct WickEntry {
    pub label: String,
    #[serde(rename = "N", skip_serializing_if = "Option::is_none")]
    pub points: Option<usize>,
    pub dim: usize,
    pub input_norm: f64,
    pub residual_forward: f64,
    pub residual_reverse: f64,
    pub tolerance: f64,
    pub re_hermitian_residual: f64,
    pub im_hermitian_residual: f64,
    #[serde(rename = "C_anticommute")]
    pub c_anticommute: f64,
    pub commutator_norms: Vec<f64>,
    pub proxy_eigs_head: Vec<f64>,
    pub proxy_decay_rate: Option<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct WickReport {
    pub source: String,
    pub caveat: &'static str,
    pub entries: Vec<WickEntry>,
}

fn entry(
    run: &mut Run,
    label: String,
    points: Option<usize>,
    d: &CMatrix,
    multipliers: &[BlockDiagonal],
) -> Result<WickEntry, CliError> {
    let err = |e| CliError::input(label.clone(), e);
    let residual_forward = roundtrip_residual(d).map_err(err)?;
    let q = wick_rotate(d).map_err(err)?;
    let residual_reverse = roundtrip_residual_pair(&q.d_plus, &q.d_minus).map_err(err)?;
    let module = check_indefinite_module(d, multipliers).map_err(err)?;
    let input_norm = d.fro_norm();
    let tolerance = WICK_TOL * (1.0 + input_norm);
    run.invariant_le(format!("wick_forward_{label}"), residual_forward, tolerance);
    run.invariant_le(format!("wick_reverse_{label}"), residual_reverse, tolerance);
    let herm = module.re_hermitian_residual.max(module.im_hermitian_residual);
    run.invariant_le(
        format!("wick_parts_hermitian_{label}"),
        herm,
        1e-14 * (1.0 + input_norm),
    );
    Ok(WickEntry {
        label,
        points,
        dim: d.rows(),
        input_norm,
        residual_forward,
        residual_reverse,
        tolerance,
        re_hermitian_residual: module.re_hermitian_residual,
        im_hermitian_residual: module.im_hermitian_residual,
        c_anticommute: module.c_anticommute,
        commutator_norms: module.commutator_norms.clone(),
        proxy_eigs_head: module.proxy_head(PROXY_HEAD).to_vec(),
        proxy_decay_rate: module.proxy_decay_rate,
    })
}

pub fn wick_input(run: &mut Run, prefix: &str, label: &str, d: &CMatrix) -> Result<WickReport, CliError> {
    let e = entry(run, label.to_string(), None, d, &[])?;
    finish(run, prefix, label.to_string(), vec![e])
}

pub fn random_operator(dim: usize, seed: u64) -> CMatrix {
    let mut rng = random::rng(seed);
    random::gaussian_matrix(dim, dim, &mut rng)
}

pub fn wick_random(run: &mut Run, prefix: &str, dims: &[usize], seed: u64) -> Result<WickReport, CliError> {
    let mut entries = Vec::new();
    for &dim in dims {
        let d = random_operator(dim, seed);
        entries.push(entry(run, format!("random_dim{dim}"), None, &d, &[])?);
    }
    finish(run, prefix, format!("random, seed {seed}"), entries)
}

/// `D = ½(D₁+D₂) + (i/2)(D₁-D₂)` at every `N`, with the multiplier `exp(i x₁)`.
pub fn wick_lattice(run: &mut Run, prefix: &str, cfg: &ExperimentConfig) -> Result<WickReport, CliError> {
    let mut entries = Vec::new();
    for &points in &cfg.n_list {
        run.say(format!("wick: N = {points}"));
        let model = build_model(cfg, points)?;
        let d = lattice_operator(&model).map_err(|e| CliError::input(format!("lattice N = {points}"), e))?;
        let m = model.multiplication(|x| Complex64::from_polar(1.0, x[0]));
        entries.push(entry(run, format!("lattice_N{points}"), Some(points), &d, &[m])?);
    }
    lattice_findings(run, &entries);
    finish(run, prefix, "lattice".into(), entries)
}

fn lattice_findings(run: &mut Run, entries: &[WickEntry]) {
    let fine: Vec<&WickEntry> = entries
        .iter()
        .filter(|e| e.points.is_some_and(|p| p >= MIN_FINDING_POINTS))
        .collect();
    let (lo, hi) = COMMUTATOR_WINDOW;
    for e in &fine {
        let v = e.commutator_norms[0];
        run.check(
            CheckKind::Finding,
            format!("commutator_norm_{}", e.label),
            (lo..=hi).contains(&v),
            v,
            format!("in [{lo}, {hi}]"),
        );
    }
    for w in fine.windows(2) {
        let drift = w[0]
            .proxy_eigs_head
            .iter()
            .zip(&w[1].proxy_eigs_head)
            .map(|(a, b)| (a - b).abs() / b.abs())
            .fold(0.0, f64::max);
        run.check(
            CheckKind::Finding,
            format!("proxy_head_stable_{}_{}", w[0].label, w[1].label),
            drift <= PROXY_STABILITY,
            drift,
            format!("<= {PROXY_STABILITY}"),
        );
    }
}

fn finish(run: &mut Run, prefix: &str, source: String, entries: Vec<WickEntry>) -> Result<WickReport, CliError> {
    let report = WickReport {
        source,
        caveat: COMPACTNESS_CAVEAT,
        entries,
    };
    run.write_json(&format!("{prefix}wick_roundtrip.json"), &report)?;
    Ok(report)
}
