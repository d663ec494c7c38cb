//! Output directory handling, checks and the run manifest.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use krein_lab::clifford::{CLIFFORD_TOL, GAMMA1_PREFACTOR_CONVENTION};
use krein_lab::lattice::{BOUND_SLACK, LATTICE_TOL, MAX_OPERATOR_DIM, STENCIL_TOL};
use krein_lab::linops::HERMITIAN_TOL;
use krein_lab::weakpair::{EXTREME_TEST_VECTORS, GAUSSIAN_TEST_VECTORS, MAX_LAMBDA0_DOUBLINGS};
use serde::Serialize;

use crate::config::{AutoOr, ExperimentConfig};
use crate::CliError;

/// Round-trip tolerance factor: residual `≤ WICK_TOL · (1 + ‖D‖_F)`.
pub const WICK_TOL: f64 = 1e-13;
/// Slack on `‖A_n‖ ≤ 1`.
pub const APPROX_IDENTITY_SLACK: f64 = 1e-9;
/// Relative tolerance for `C` under doubling.
pub const DOUBLING_TOL: f64 = 1e-9;

/// Write `bytes` to `path` through a temporary file in the same directory.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let io = |source| CliError::Io {
        path: path.to_path_buf(),
        source,
    };
    let dir = path
        .parent()
        .filter(|p| !p.as_os_str().is_empty())
        .unwrap_or(Path::new("."));
    std::fs::create_dir_all(dir).map_err(io)?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io)?;
    tmp.write_all(bytes).map_err(io)?;
    tmp.as_file().sync_all().map_err(io)?;
    tmp.persist(path).map_err(|e| io(e.error))?;
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CheckKind {
    /// A mathematical identity; failure means exit code 2.
    Invariant,
    /// An experimental expectation; recorded, never fatal.
    Finding,
}

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub kind: CheckKind,
    pub passed: bool,
    pub value: f64,
    /// What `value` was compared against, e.g. `<= 1e-12`.
    pub bound: String,
}

/// Everything a subcommand writes, rooted at one directory.
pub struct Run {
    root: PathBuf,
    files: Vec<String>,
    checks: Vec<Check>,
    quiet: bool,
    started: Instant,
}

impl Run {
    pub fn new(root: impl Into<PathBuf>, quiet: bool) -> Self {
        Self {
            root: root.into(),
            files: Vec::new(),
            checks: Vec::new(),
            quiet,
            started: Instant::now(),
        }
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn checks(&self) -> &[Check] {
        &self.checks
    }

    /// Progress line on stderr unless `--quiet`.
    pub fn say(&self, msg: impl AsRef<str>) {
        if !self.quiet {
            eprintln!("{}", msg.as_ref());
        }
    }

    pub fn write(&mut self, rel: &str, contents: &str) -> Result<(), CliError> {
        write_atomic(&self.root.join(rel), contents.as_bytes())?;
        self.files.push(rel.to_string());
        Ok(())
    }

    pub fn write_json<T: Serialize + ?Sized>(&mut self, rel: &str, value: &T) -> Result<(), CliError> {
        let mut text = serde_json::to_string_pretty(value).map_err(|e| CliError::Input {
            what: rel.to_string(),
            message: e.to_string(),
        })?;
        text.push('\n');
        self.write(rel, &text)
    }

    pub fn check(
        &mut self,
        kind: CheckKind,
        name: impl Into<String>,
        passed: bool,
        value: f64,
        bound: impl Into<String>,
    ) {
        let check = Check {
            name: name.into(),
            kind,
            passed,
            value,
            bound: bound.into(),
        };
        if !check.passed {
            self.say(format!(
                "{}: {} failed (value {:e}, expected {})",
                match kind {
                    CheckKind::Invariant => "INVARIANT",
                    CheckKind::Finding => "finding",
                },
                check.name,
                check.value,
                check.bound
            ));
        }
        self.checks.push(check);
    }

    /// `value <= limit` as an invariant.
    pub fn invariant_le(&mut self, name: impl Into<String>, value: f64, limit: f64) {
        self.check(
            CheckKind::Invariant,
            name,
            value <= limit,
            value,
            format!("<= {limit:e}"),
        );
    }

    pub fn invariants_ok(&self) -> bool {
        self.checks.iter().all(|c| c.kind != CheckKind::Invariant || c.passed)
    }

    /// Writes `manifest.json` and returns the exit code.
    pub fn finish(
        self,
        command: &str,
        config: Option<&ExperimentConfig>,
        arguments: serde_json::Value,
        knobs: Knobs,
    ) -> Result<i32, CliError> {
        let exit_code = if self.invariants_ok() { 0 } else { 2 };
        let count = |kind: CheckKind, passed: bool| {
            self.checks
                .iter()
                .filter(|c| c.kind == kind && c.passed == passed)
                .count()
        };
        let manifest = Manifest {
            tool: "krein-lab",
            version: env!("CARGO_PKG_VERSION"),
            command,
            config,
            arguments: &arguments,
            seed: knobs.seed,
            knobs: &knobs,
            files: &self.files,
            invariants_passed: count(CheckKind::Invariant, true),
            invariants_failed: count(CheckKind::Invariant, false),
            findings_passed: count(CheckKind::Finding, true),
            findings_failed: count(CheckKind::Finding, false),
            checks: &self.checks,
            exit_code,
            wall_time_s: self.started.elapsed().as_secs_f64(),
        };
        let mut text = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
        text.push('\n');
        write_atomic(&self.root.join("manifest.json"), text.as_bytes())?;
        if !self.quiet {
            eprintln!(
                "{command}: {} invariant(s) ok, {} failed; {} finding(s) ok, {} failed; wrote {}",
                manifest.invariants_passed,
                manifest.invariants_failed,
                manifest.findings_passed,
                manifest.findings_failed,
                self.root.display()
            );
        }
        Ok(exit_code)
    }
}

/// Every numeric decision that shapes the outputs.
#[derive(Clone, Debug, Serialize)]
pub struct Knobs {
    pub seed: Option<u64>,
    pub lambda0: AutoOr,
    /// `λ₀` actually used, when a weakpair report ran.
    pub lambda0_effective: Option<f64>,
    pub mu: AutoOr,
    pub mu_effective: Option<f64>,
    pub grid_count: usize,
    pub grid: &'static str,
    pub fitted_rate: &'static str,
    pub gaussian_test_vectors: usize,
    pub extreme_test_vectors: usize,
    pub max_lambda0_doublings: usize,
    pub gamma1_prefactor_convention: &'static str,
    pub clifford_tol: f64,
    pub hermitian_tol: f64,
    pub lattice_tol: f64,
    pub stencil_tol: f64,
    pub bound_slack: f64,
    pub wick_tol: f64,
    pub approx_identity_slack: f64,
    pub doubling_tol: f64,
    pub max_operator_dim: usize,
    pub rng: &'static str,
}

impl Knobs {
    pub fn new(seed: Option<u64>, lambda0: AutoOr, mu: AutoOr, grid_count: usize) -> Self {
        Self {
            seed,
            lambda0,
            lambda0_effective: None,
            mu,
            mu_effective: None,
            grid_count,
            grid: "lambda_k = ±i lambda0 2^k, k = 0..grid_count-1",
            fitted_rate: "least-squares log-log slope over the last half of the grid",
            gaussian_test_vectors: GAUSSIAN_TEST_VECTORS,
            extreme_test_vectors: EXTREME_TEST_VECTORS,
            max_lambda0_doublings: MAX_LAMBDA0_DOUBLINGS,
            gamma1_prefactor_convention: GAMMA1_PREFACTOR_CONVENTION,
            clifford_tol: CLIFFORD_TOL,
            hermitian_tol: HERMITIAN_TOL,
            lattice_tol: LATTICE_TOL,
            stencil_tol: STENCIL_TOL,
            bound_slack: BOUND_SLACK,
            wick_tol: WICK_TOL,
            approx_identity_slack: APPROX_IDENTITY_SLACK,
            doubling_tol: DOUBLING_TOL,
            max_operator_dim: MAX_OPERATOR_DIM,
            rng: "ChaCha8 seeded from a u64",
        }
    }

    pub fn from_config(cfg: &ExperimentConfig) -> Self {
        Self::new(Some(cfg.seed), cfg.lambda0, cfg.mu, cfg.grid_count)
    }
}

#[derive(Serialize)]
struct Manifest<'a> {
    tool: &'static str,
    version: &'static str,
    command: &'a str,
    config: Option<&'a ExperimentConfig>,
    arguments: &'a serde_json::Value,
    seed: Option<u64>,
    knobs: &'a Knobs,
    files: &'a [String],
    invariants_passed: usize,
    invariants_failed: usize,
    findings_passed: usize,
    findings_failed: usize,
    checks: &'a [Check],
    exit_code: i32,
    wall_time_s: f64,
}

/// CSV float formatting: shortest round-trip decimal.
pub fn csv_f64(v: f64) -> String {
    format!("{v}")
}
