use krein_lab::lattice::{
    lattice_row, DecompositionResiduals, LatticeRow, TorusLattice, TorusModel, LATTICE_TOL, STENCIL_TOL,
};
use krein_lab::linops::text::to_text;
use krein_lab::linops::CMatrix;
use serde::Serialize;

use crate::config::ExperimentConfig;
use crate::output::{csv_f64, CheckKind, Run};
use crate::CliError;

/// Factor by which `C_combined` may drift from its first value.
pub const C_COMBINED_BAND: f64 = 2.0;
/// Minimal growth of `C_old` between consecutive levels.
pub const C_OLD_GROWTH: f64 = 1.5;

#[derive(Clone, Debug, Serialize)]
pub struct LatticeLevel {
    #[serde(rename = "N")]
    pub points: usize,
    pub residuals: DecompositionResiduals,
    pub row: LatticeRow,
}

#[derive(Clone, Debug, Serialize)]
pub struct LatticeReport {
    pub n: usize,
    pub n1: usize,
    pub alpha: f64,
    pub rotating: bool,
    pub levels: Vec<LatticeLevel>,
}

pub const CSV_HEADER: &str = "N,dim,norm_anticomm,C_combined,C_old,K_split,bound_3K2_ok";

pub fn csv(levels: &[LatticeLevel]) -> String {
    let mut s = format!("{CSV_HEADER}\n");
    for l in levels {
        let r = &l.row;
        s.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            r.points,
            r.dim,
            csv_f64(r.norm_anticomm),
            csv_f64(r.c_combined),
            csv_f64(r.c_old),
            csv_f64(r.k_split),
            r.bound_3k2_ok
        ));
    }
    s
}

pub fn build_model(cfg: &ExperimentConfig, points: usize) -> Result<TorusModel, CliError> {
    let frame = cfg.frame().map_err(|error| CliError::bad_config(error))?;
    let lat = TorusLattice::new(cfg.n, points).map_err(|e| CliError::input("N_list", e))?;
    TorusModel::build(lat, frame).map_err(|e| CliError::input(format!("lattice N = {points}"), e))
}

fn write_matrix(run: &mut Run, rel: &str, label: &str, m: &CMatrix) -> Result<(), CliError> {
    run.write(rel, &format!("# {label}\n{}", to_text(m)))
}

pub fn lattice_report(run: &mut Run, prefix: &str, cfg: &ExperimentConfig) -> Result<LatticeReport, CliError> {
    let mut levels = Vec::new();
    for &points in &cfg.n_list {
        run.say(format!("lattice: N = {points}"));
        let model = build_model(cfg, points)?;
        if cfg.emit_matrices {
            write_matrix(run, &format!("{prefix}D_N{points}.txt"), "D", &model.d.to_dense())?;
            write_matrix(
                run,
                &format!("{prefix}Gamma1_N{points}.txt"),
                "Gamma1",
                &model.gamma1.to_dense(),
            )?;
            write_matrix(run, &format!("{prefix}D1_N{points}.txt"), "D1", &model.d1.to_dense())?;
            write_matrix(run, &format!("{prefix}D2_N{points}.txt"), "D2", &model.d2.to_dense())?;
        }
        let residuals = model.residuals();
        run.check(
            CheckKind::Invariant,
            format!("decomposition_sum_exact_N{points}"),
            residuals.sum_max_abs == 0.0,
            residuals.sum_max_abs,
            "== 0",
        );
        run.invariant_le(
            format!("decomposition_identities_N{points}"),
            residuals.max_hermitian_or_identity(),
            LATTICE_TOL,
        );
        let row = lattice_row(&model).map_err(|e| CliError::input(format!("lattice N = {points}"), e))?;
        run.invariant_le(
            format!("split_reconstruction_N{points}"),
            row.split_residual,
            STENCIL_TOL,
        );
        run.check(
            CheckKind::Invariant,
            format!("bound_3K2_N{points}"),
            row.bound_3k2_ok,
            row.c_combined / (3.0 * row.k_split * row.k_split),
            "C_combined / 3 K_split^2 <= 1",
        );
        if !cfg.is_rotating() {
            run.invariant_le(
                format!("constant_frame_anticomm_N{points}"),
                row.norm_anticomm,
                LATTICE_TOL,
            );
        }
        levels.push(LatticeLevel { points, residuals, row });
    }
    if cfg.is_rotating() && levels.len() >= 2 {
        separation_findings(run, &levels);
    }
    run.write(&format!("{prefix}lattice.csv"), &csv(&levels))?;
    let report = LatticeReport {
        n: cfg.n,
        n1: cfg.n1,
        alpha: cfg.alpha,
        rotating: cfg.is_rotating(),
        levels,
    };
    run.write_json(&format!("{prefix}lattice_report.json"), &report)?;
    Ok(report)
}

/// `C_combined` stays within a factor 2 of its first value while `C_old` and
/// `‖{D₁, D₂}‖` grow under refinement.
fn separation_findings(run: &mut Run, levels: &[LatticeLevel]) {
    let c0 = levels[0].row.c_combined;
    let drift = levels
        .iter()
        .map(|l| {
            let r = l.row.c_combined / c0;
            r.max(1.0 / r)
        })
        .fold(1.0, f64::max);
    run.check(
        CheckKind::Finding,
        "c_combined_within_factor_2",
        drift <= C_COMBINED_BAND,
        drift,
        format!("<= {C_COMBINED_BAND}"),
    );
    for (name, k) in [
        ("k1", (|r: &LatticeRow| r.k1) as fn(&LatticeRow) -> f64),
        ("k2", |r| r.k2),
    ] {
        let k0 = k(&levels[0].row);
        let drift = levels
            .iter()
            .map(|l| {
                let r = k(&l.row) / k0;
                r.max(1.0 / r)
            })
            .fold(1.0, f64::max);
        run.check(
            CheckKind::Finding,
            format!("relative_bound_{name}_within_factor_2"),
            drift <= C_COMBINED_BAND,
            drift,
            format!("<= {C_COMBINED_BAND}"),
        );
    }
    let growth = |f: fn(&LatticeRow) -> f64| {
        levels
            .windows(2)
            .map(|w| f(&w[1].row) / f(&w[0].row))
            .fold(f64::INFINITY, f64::min)
    };
    let g_old = growth(|r| r.c_old);
    run.check(
        CheckKind::Finding,
        "c_old_growth_per_level",
        g_old >= C_OLD_GROWTH,
        g_old,
        format!(">= {C_OLD_GROWTH}"),
    );
    let g_anti = growth(|r| r.norm_anticomm);
    run.check(
        CheckKind::Finding,
        "anticomm_norm_increasing",
        g_anti > 1.0,
        g_anti,
        "> 1",
    );
}
