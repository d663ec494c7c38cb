use krein_lab::clifford::{
    conjugation_signs, fundamental_symmetry, gamma_matrices, relation_residuals, symmetry_residuals, Frame,
    RelationResiduals, SignatureSplit, CLIFFORD_TOL, GAMMA1_PREFACTOR_CONVENTION,
};
use krein_lab::linops::text::to_text;
use krein_lab::random;
use serde::Serialize;

use crate::output::{CheckKind, Run};
use crate::CliError;

#[derive(Clone, Debug, Serialize)]
pub struct GammaReport {
    pub n: usize,
    pub dim: usize,
    pub residuals: RelationResiduals,
    pub max_residual: f64,
    pub tolerance: f64,
    pub passed: bool,
    pub files: Vec<String>,
}

fn clifford_err(what: &str, e: impl std::fmt::Display) -> CliError {
    CliError::Input {
        what: what.to_string(),
        message: e.to_string(),
    }
}

/// `γ_1..γ_n` as matrix files plus `gamma_report.json`.
pub fn gamma(run: &mut Run, prefix: &str, n: usize) -> Result<GammaReport, CliError> {
    let rep = gamma_matrices(n).map_err(|e| clifford_err("--n", e))?;
    let mut files = Vec::new();
    for (j, g) in rep.gammas().iter().enumerate() {
        let name = format!("gamma_{}.txt", j + 1);
        let text = format!("# gamma_{} of the n = {n} representation\n{}", j + 1, to_text(g));
        run.write(&format!("{prefix}{name}"), &text)?;
        files.push(name);
    }
    let residuals = relation_residuals(&rep);
    let max_residual = residuals.max();
    let report = GammaReport {
        n,
        dim: rep.dim(),
        residuals,
        max_residual,
        tolerance: CLIFFORD_TOL,
        passed: max_residual < CLIFFORD_TOL,
        files,
    };
    run.check(
        CheckKind::Invariant,
        format!("gamma_report_n{n}"),
        report.passed,
        max_residual,
        format!("< {CLIFFORD_TOL:e}"),
    );
    run.write_json(&format!("{prefix}gamma_report.json"), &report)?;
    Ok(report)
}

#[derive(Clone, Debug, Serialize)]
pub struct RelationRow {
    pub n: usize,
    pub dim: usize,
    pub residuals: RelationResiduals,
}

/// Relation residuals for every `n` in `1..=max_n`.
pub fn relation_sweep(run: &mut Run, prefix: &str, max_n: usize) -> Result<Vec<RelationRow>, CliError> {
    let mut rows = Vec::new();
    for n in 1..=max_n {
        let rep = gamma_matrices(n).map_err(|e| clifford_err("n", e))?;
        let residuals = relation_residuals(&rep);
        run.check(
            CheckKind::Invariant,
            format!("clifford_relations_n{n}"),
            residuals.max() < CLIFFORD_TOL,
            residuals.max(),
            format!("< {CLIFFORD_TOL:e}"),
        );
        rows.push(RelationRow {
            n,
            dim: rep.dim(),
            residuals,
        });
    }
    run.write_json(&format!("{prefix}relations.json"), &rows)?;
    Ok(rows)
}

#[derive(Clone, Debug, Serialize)]
pub struct SymmetryRow {
    pub n: usize,
    pub n1: usize,
    pub frames: usize,
    pub max_hermitian_residual: f64,
    pub max_unitary_residual: f64,
    pub sign_mismatches: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct SymmetrySweep {
    pub seed: u64,
    pub prefactor_convention: &'static str,
    pub rows: Vec<SymmetryRow>,
}

/// `Γ₁` over random orthonormal frames for every `n₁ ≤ n ≤ max_n`.
pub fn symmetry_sweep(
    run: &mut Run,
    prefix: &str,
    max_n: usize,
    frames: usize,
    seed: u64,
) -> Result<SymmetrySweep, CliError> {
    let mut rng = random::rng(seed);
    let mut rows = Vec::new();
    for n in 1..=max_n {
        let rep = gamma_matrices(n).map_err(|e| clifford_err("n", e))?;
        for n1 in 0..=n {
            let split = SignatureSplit::new(n1, n - n1);
            let mut row = SymmetryRow {
                n,
                n1,
                frames,
                max_hermitian_residual: 0.0,
                max_unitary_residual: 0.0,
                sign_mismatches: 0,
            };
            for _ in 0..frames {
                let frame = Frame::from_row_major(n, random::orthogonal(n, &mut rng));
                let g1 = fundamental_symmetry(&rep, split, &frame).map_err(|e| clifford_err("frame", e))?;
                let (h, u) = symmetry_residuals(&g1);
                row.max_hermitian_residual = row.max_hermitian_residual.max(h);
                row.max_unitary_residual = row.max_unitary_residual.max(u);
                if conjugation_signs(&rep, split, &frame).is_err() {
                    row.sign_mismatches += 1;
                }
            }
            let worst = row.max_hermitian_residual.max(row.max_unitary_residual);
            run.check(
                CheckKind::Invariant,
                format!("gamma1_symmetry_n{n}_n1{n1}"),
                worst < CLIFFORD_TOL,
                worst,
                format!("< {CLIFFORD_TOL:e}"),
            );
            run.check(
                CheckKind::Invariant,
                format!("gamma1_signs_n{n}_n1{n1}"),
                row.sign_mismatches == 0,
                row.sign_mismatches as f64,
                "== 0 mismatches",
            );
            rows.push(row);
        }
    }
    let sweep = SymmetrySweep {
        seed,
        prefactor_convention: GAMMA1_PREFACTOR_CONVENTION,
        rows,
    };
    run.write_json(&format!("{prefix}symmetry.json"), &sweep)?;
    Ok(sweep)
}
