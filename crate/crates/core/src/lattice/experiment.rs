use serde::Serialize;

use super::{relative_bound_norm, split_first_order, LatticeError, TorusModel};
use crate::linops::op_norm;
use crate::weakpair::{condition1_constant, old_constant, BracketKind, OperatorPair};

/// One refinement level of the lattice experiment.
#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct LatticeRow {
    #[serde(rename = "N")]
    pub points: usize,
    pub dim: usize,
    /// `‖{D₁, D₂}‖`
    pub norm_anticomm: f64,
    /// Optimal constant against `I + D₁² + D₂²`.
    pub c_combined: f64,
    /// Optimal constant against `I + D₁²`.
    pub c_old: f64,
    /// `max_± ‖A₁(D₁ ± i)^{-1}‖`
    pub k1: f64,
    /// `max_± ‖A₂(D₂ ± i)^{-1}‖`
    pub k2: f64,
    pub k_split: f64,
    /// `C_combined ≤ 3 K_split²`.
    pub bound_3k2_ok: bool,
    pub split_residual: f64,
    pub off_stencil_ratio: f64,
}

/// Relative slack allowed in the `3K²` comparison.
pub const BOUND_SLACK: f64 = 1e-9;

pub fn lattice_row(model: &TorusModel) -> Result<LatticeRow, LatticeError> {
    let anti = model.anticommutator();
    let split = split_first_order(&anti, model)?;
    let d1 = model.d1.to_dense();
    let d2 = model.d2.to_dense();
    let k1 = relative_bound_norm(&split.a1.to_dense(), &d1)?;
    let k2 = relative_bound_norm(&split.a2.to_dense(), &d2)?;
    let norm_anticomm = op_norm(&anti.to_dense());
    let pair = OperatorPair::new(d1, d2, BracketKind::Anticommutator)?;
    let c_combined = condition1_constant(&pair)?;
    let c_old = old_constant(&pair)?;
    let k_split = k1 + k2;
    Ok(LatticeRow {
        points: model.lattice.points(),
        dim: model.dim(),
        norm_anticomm,
        c_combined,
        c_old,
        k1,
        k2,
        k_split,
        bound_3k2_ok: c_combined <= 3.0 * k_split * k_split * (1.0 + BOUND_SLACK),
        split_residual: split.reconstruction_residual,
        off_stencil_ratio: split.off_stencil_ratio,
    })
}
