pub mod gamma;
pub mod lattice;
pub mod weakpair;
pub mod wick;

use krein_lab::linops::CMatrix;
use krein_lab::random;
use krein_lab::weakpair::{BracketKind, OperatorPair, WeakpairReport};
use rand::Rng;

use self::weakpair::WeakpairArgs;
use crate::config::ExperimentConfig;
use crate::output::{CheckKind, Run};
use crate::CliError;

/// Largest `n` in the Clifford relation sweep.
pub const RELATION_MAX_N: usize = 8;
/// Largest `n` in the `Γ₁` frame sweep.
pub const SYMMETRY_MAX_N: usize = 6;
pub const SYMMETRY_FRAMES: usize = 100;
/// Dimensions of the random Wick round trips.
pub const WICK_RANDOM_DIMS: [usize; 3] = [2, 8, 32];
/// Size of the diagonal commuting pair.
pub const COMMUTING_DIM: usize = 16;

impl WeakpairArgs {
    pub fn from_config(cfg: &ExperimentConfig) -> Self {
        Self {
            lambda0: cfg.lambda0,
            mu: cfg.mu,
            grid_count: cfg.grid_count,
            seed: cfg.seed,
        }
    }
}

/// `(D₁, D₂)` at the coarsest `N` of the config.
pub fn lattice_pair(cfg: &ExperimentConfig) -> Result<(usize, OperatorPair), CliError> {
    let points = cfg.n_list[0];
    let model = lattice::build_model(cfg, points)?;
    let pair = OperatorPair::new(model.d1.to_dense(), model.d2.to_dense(), BracketKind::Anticommutator)
        .map_err(|e| CliError::input(format!("lattice N = {points}"), e))?;
    Ok((points, pair))
}

/// Two real diagonal matrices: every commutator in the diagnostics vanishes
/// bit for bit.
pub fn commuting_pair(dim: usize, seed: u64) -> OperatorPair {
    let mut rng = random::rng(seed);
    let mut diag = || -> Vec<f64> { (0..dim).map(|_| rng.random_range(-2.0..2.0)).collect() };
    let s = CMatrix::from_real_diag(&diag());
    let t = CMatrix::from_real_diag(&diag());
    OperatorPair::new(s, t, BracketKind::Commutator).expect("diagonal matrices are hermitian")
}

/// Names of the tables that must vanish for a commuting pair.
pub fn commutator_tables(report: &WeakpairReport) -> Vec<(String, bool)> {
    let mut out: Vec<(String, bool)> = report
        .tables
        .iter()
        .filter(|t| {
            ["lemma_a2", "prop23", "lm_lemma32", "sum_approx"]
                .iter()
                .any(|p| t.name.starts_with(p))
        })
        .map(|t| (t.key(), t.is_zero()))
        .collect();
    for b in &report.lemma_a3 {
        out.push((b.s_norms.key(), b.s_norms.is_zero()));
        out.push((b.t_norms.key(), b.t_norms.is_zero()));
    }
    out
}

pub fn full_suite(run: &mut Run, cfg: &ExperimentConfig) -> Result<Option<f64>, CliError> {
    run.say("full-suite: clifford");
    gamma::gamma(run, "gamma/", cfg.n)?;
    gamma::relation_sweep(run, "gamma/", RELATION_MAX_N)?;
    gamma::symmetry_sweep(run, "gamma/", SYMMETRY_MAX_N, SYMMETRY_FRAMES, cfg.seed)?;

    lattice::lattice_report(run, "lattice/", cfg)?;

    run.say("full-suite: weakpair");
    let args = WeakpairArgs::from_config(cfg);
    let (points, pair) = lattice_pair(cfg)?;
    let (report, _) = weakpair::weakpair(run, "weakpair/lattice/", &format!("lattice_N{points}"), &pair, &args)?;
    let lambda0 = report.lambda0;
    let commuting = commuting_pair(COMMUTING_DIM, cfg.seed);
    let (report, _) = weakpair::weakpair(run, "weakpair/commuting/", "commuting", &commuting, &args)?;
    let tables = commutator_tables(&report);
    let nonzero = tables.iter().filter(|t| !t.1).count();
    run.check(
        CheckKind::Invariant,
        "commuting_pair_zero_tables",
        nonzero == 0,
        nonzero as f64,
        format!("== 0 nonzero tables of {}", tables.len()),
    );

    run.say("full-suite: wick");
    wick::wick_random(run, "wick/random/", &WICK_RANDOM_DIMS, cfg.seed)?;
    wick::wick_lattice(run, "wick/lattice/", cfg)?;
    Ok(Some(lambda0))
}
