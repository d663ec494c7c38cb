use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::Serialize;

use super::diagnostics::{
    approx_identity_table, lemma_a1_tables, lemma_a2_tables, lemma_a3_bound, lm_lemma32_table, prop23_tables,
    resolvent_approx_table, select_lambda0, sum_approx_table, test_vectors, DiagnosticsTable, Direction, Grid,
    LemmaA3Bound,
};
use super::{condition1_constant, double, old_constant, BracketKind, OperatorPair, WeakpairError};

/// Knobs for [`weakpair_report`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DiagnosticsConfig {
    /// `None` selects `λ₀` automatically.
    pub lambda0: Option<f64>,
    pub grid_count: usize,
    /// Imaginary part of `μ`; `None` means `2λ₀`.
    pub mu: Option<f64>,
    pub seed: u64,
}

impl Default for DiagnosticsConfig {
    fn default() -> Self {
        Self {
            lambda0: None,
            grid_count: 11,
            mu: None,
            seed: 42,
        }
    }
}

/// Everything measured for one pair. Anticommuting pairs run the
/// commutator diagnostics on their doubled pair.
#[derive(Clone, Debug, Serialize)]
pub struct WeakpairReport {
    pub kind: BracketKind,
    pub dim: usize,
    pub c: f64,
    pub c_old: f64,
    /// Whether the commutator diagnostics ran on the doubled pair.
    pub doubled: bool,
    pub lambda0: f64,
    pub lambda0_auto: bool,
    pub mu: Complex64,
    pub grid_count: usize,
    pub seed: u64,
    pub test_vectors: usize,
    pub tables: Vec<DiagnosticsTable>,
    pub lemma_a3: Vec<LemmaA3Bound>,
    /// `max_n ‖A_n‖` per grid direction (the grid of `n` is shared).
    pub approx_identity_max_norm: f64,
    pub rates: BTreeMap<String, Option<f64>>,
}

impl WeakpairReport {
    pub fn table(&self, key: &str) -> Option<&DiagnosticsTable> {
        self.tables.iter().find(|t| t.key() == key)
    }
}

pub fn weakpair_report(pair: &OperatorPair, cfg: &DiagnosticsConfig) -> Result<WeakpairReport, WeakpairError> {
    let c = condition1_constant(pair)?;
    let c_old = old_constant(pair)?;
    let (work, doubled) = match pair.kind() {
        BracketKind::Anticommutator => (double(pair)?, true),
        BracketKind::Commutator => (pair.clone(), false),
    };
    let lambda0 = match cfg.lambda0 {
        Some(v) if v > 0.0 && v.is_finite() => v,
        Some(v) => return Err(WeakpairError::BadParameter { value: v }),
        None => select_lambda0(&work, c, cfg.grid_count)?,
    };
    let mu_mag = cfg.mu.unwrap_or(2.0 * lambda0);
    let vectors = test_vectors(&work, cfg.seed)?;

    let mut tables = Vec::new();
    let mut lemma_a3 = Vec::new();
    let mut approx_identity_max_norm = 0.0_f64;
    for dir in Direction::BOTH {
        let grid = Grid::new(lambda0, cfg.grid_count, dir);
        let mu = dir.unit() * mu_mag;
        tables.extend(lemma_a1_tables(&work, &vectors, &grid)?);
        tables.extend(lemma_a2_tables(&work, mu, &vectors, &grid)?);
        tables.extend(prop23_tables(&work, &vectors, &grid)?);
        tables.push(lm_lemma32_table(&work, &grid)?);
        lemma_a3.push(lemma_a3_bound(&work, &grid)?);
        if dir == Direction::PlusI {
            // A_n and the sum residual depend only on |λ|
            let (t, norm) = approx_identity_table(&work, &vectors, &grid)?;
            approx_identity_max_norm = norm;
            tables.push(t);
            tables.push(sum_approx_table(&work, &vectors, &grid)?);
        }
        if doubled {
            tables.push(resolvent_approx_table(pair, mu, &grid)?);
        }
    }
    let rates = tables.iter().map(|t| (t.key(), t.fitted_rate)).collect();
    Ok(WeakpairReport {
        kind: pair.kind(),
        dim: pair.dim(),
        c,
        c_old,
        doubled,
        lambda0,
        lambda0_auto: cfg.lambda0.is_none(),
        mu: Direction::PlusI.unit() * mu_mag,
        grid_count: cfg.grid_count,
        seed: cfg.seed,
        test_vectors: vectors.len(),
        tables,
        lemma_a3,
        approx_identity_max_norm,
        rates,
    })
}
