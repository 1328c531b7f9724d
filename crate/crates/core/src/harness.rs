//! Convergence-study orchestration: manufactured solutions, horizon/grid
//! coupling regimes, rate fitting, and CSV/JSON reporting.

use std::io::Write;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::grid::{build_grid, classify_nodes, DomainSpec};
use crate::kernels::{NonlocalKernelSpec, Profile};
use crate::linsolve::{error_l2, expansion_coeffs, solve_direct, solve_krylov, SolveReport};
use crate::operators::{apply_nonlocal, assemble, Backend, CollocationSystem};
use crate::quadrature::{ball_rule, build_symmetric_set, rk_weights};
use crate::rk_basis::RKBasis;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Manufactured {
    Ms1,
    Ms2,
}

impl Manufactured {
    pub fn u(&self, x: &[f64]) -> f64 {
        match self {
            Manufactured::Ms1 => {
                x[0] * x[0] * (1.0 - x[0] * x[0]) + x[1] * x[1] * (1.0 - x[1] * x[1])
            }
            Manufactured::Ms2 => {
                x[0] * x[0] * x[1] * x[1] * (1.0 - x[0] * x[0]) * (1.0 - x[1] * x[1])
            }
        }
    }

    /// Local source f0 = -Laplacian(u).
    pub fn f0(&self, x: &[f64]) -> f64 {
        let (x1, x2) = (x[0], x[1]);
        match self {
            Manufactured::Ms1 => 12.0 * (x1 * x1 + x2 * x2) - 4.0,
            Manufactured::Ms2 => {
                (12.0 * x1 * x1 - 2.0) * x2 * x2 * (1.0 - x2 * x2)
                    + (12.0 * x2 * x2 - 2.0) * x1 * x1 * (1.0 - x1 * x1)
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Coupling {
    /// fixed horizon; solves with the nonlocal source f_delta
    Fixed { delta0: f64 },
    /// delta = h_max
    DeltaEqH,
    /// delta = h_max^2
    DeltaEqH2,
    /// delta = sqrt(h_max)
    DeltaEqSqrtH,
    /// delta = m0 * h_max
    DeltaEqM0H { m0: f64 },
}

impl Coupling {
    pub fn delta(&self, h_max: f64) -> f64 {
        match self {
            Coupling::Fixed { delta0 } => *delta0,
            Coupling::DeltaEqH => h_max,
            Coupling::DeltaEqH2 => h_max * h_max,
            Coupling::DeltaEqSqrtH => h_max.sqrt(),
            Coupling::DeltaEqM0H { m0 } => m0 * h_max,
        }
    }

    pub fn is_fixed(&self) -> bool {
        matches!(self, Coupling::Fixed { .. })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum BackendConfig {
    Gauss { n_r: usize, n_theta: usize },
    Meshfree { ratio: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BcMode {
    /// g = manufactured u on constrained nodes
    Exact,
    /// g = 0 (zero extension)
    Zero,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum SolverConfig {
    Direct,
    Krylov { tol: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSeq {
    /// strictly decreasing h_max values (>= 3 for rate fitting)
    pub h_max: Vec<f64>,
    /// per-dimension anisotropy, max component 1
    pub hat_h: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StudyConfig {
    pub manufactured: Manufactured,
    pub coupling: Coupling,
    pub backend: BackendConfig,
    pub bc_mode: BcMode,
    pub grid_seq: GridSeq,
    pub solver: SolverConfig,
    #[serde(default = "default_profile")]
    pub profile: String,
}

fn default_profile() -> String {
    "constant".into()
}

impl StudyConfig {
    /// The paper-style default: ms1, fixed delta = 1/8, Gauss backend,
    /// exact boundary data, h1 = 2 h2 anisotropy.
    pub fn default_ms1_fixed() -> Self {
        Self {
            manufactured: Manufactured::Ms1,
            coupling: Coupling::Fixed { delta0: 0.125 },
            backend: BackendConfig::Gauss { n_r: 25, n_theta: 40 },
            bc_mode: BcMode::Exact,
            grid_seq: GridSeq {
                h_max: vec![0.125, 0.0625, 0.03125, 0.015625],
                hat_h: vec![1.0, 0.5],
            },
            solver: SolverConfig::Direct,
            profile: default_profile(),
        }
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        if self.grid_seq.h_max.len() < 3 {
            return Err(HarnessError::BadConfig(
                "grid_seq must contain at least 3 h_max values".into(),
            ));
        }
        if !self.grid_seq.h_max.windows(2).all(|w| w[1] < w[0]) {
            return Err(HarnessError::BadConfig(
                "grid_seq h_max must be strictly decreasing".into(),
            ));
        }
        let max_hat = self.grid_seq.hat_h.iter().cloned().fold(0.0f64, f64::max);
        if (max_hat - 1.0).abs() > 1e-12 {
            return Err(HarnessError::BadConfig(
                "hat_h must have max component 1".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, thiserror::Error)]
pub enum HarnessError {
    #[error("invalid study config: {0}")]
    BadConfig(String),
    #[error("grid {index} (h_max = {h_max}) failed: {message}")]
    GridFailed {
        index: usize,
        h_max: f64,
        message: String,
        partial: ConvergenceReport,
    },
    #[error("rate fit needs at least 2 rows with positive errors, got {0}")]
    TooFewRows(usize),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, Serialize)]
pub struct ReportRow {
    pub h_max: f64,
    pub delta: f64,
    pub n_unknowns: usize,
    pub error_l2: f64,
    pub runtime_s: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ConvergenceReport {
    pub rows: Vec<ReportRow>,
    pub fitted_rate: f64,
    pub pair_rates: Vec<f64>,
    pub warnings: Vec<String>,
}

/// Least-squares slope of log(error) vs log(h_max), plus per-pair rates.
/// Rows with nonpositive error are excluded (with a warning).
pub fn fit_rate(rows: &[ReportRow]) -> Result<(f64, Vec<f64>, Vec<String>), HarnessError> {
    let mut warnings = Vec::new();
    let valid: Vec<(f64, f64)> = rows
        .iter()
        .filter_map(|r| {
            if r.error_l2 > 0.0 {
                Some((r.h_max.ln(), r.error_l2.ln()))
            } else {
                warnings.push(format!(
                    "row h_max = {} has nonpositive error {}; excluded from fit",
                    r.h_max, r.error_l2
                ));
                None
            }
        })
        .collect();
    if valid.len() < 2 {
        return Err(HarnessError::TooFewRows(valid.len()));
    }
    let n = valid.len() as f64;
    let sx: f64 = valid.iter().map(|v| v.0).sum();
    let sy: f64 = valid.iter().map(|v| v.1).sum();
    let sxx: f64 = valid.iter().map(|v| v.0 * v.0).sum();
    let sxy: f64 = valid.iter().map(|v| v.0 * v.1).sum();
    let slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    let pair_rates = valid
        .windows(2)
        .map(|w| (w[0].1 - w[1].1) / (w[0].0 - w[1].0))
        .collect();
    Ok((slope, pair_rates, warnings))
}

/// Outcome of a single grid solve, for the `solve` CLI path.
#[derive(Debug, Serialize)]
pub struct SolveSummary {
    pub h_max: f64,
    pub delta: f64,
    pub n_unknowns: usize,
    pub error_l2: f64,
    pub residual_norm: f64,
    pub method: String,
    pub iterations: usize,
    pub warnings: Vec<String>,
}

struct GridSolve {
    system: CollocationSystem<f64>,
    report: SolveReport<f64>,
    error: f64,
    n_unknowns: usize,
    grid: crate::grid::GridSpec<f64>,
    partition: crate::grid::NodePartition,
}

fn solve_one_grid(config: &StudyConfig, h_max: f64) -> Result<GridSolve, String> {
    let mf = config.manufactured;
    let delta = config.coupling.delta(h_max);
    let profile = Profile::parse(&config.profile).map_err(|e| e.to_string())?;
    let dom = DomainSpec::unit_box(2, delta);
    let h: Vec<f64> = config.grid_seq.hat_h.iter().map(|&r| r * h_max).collect();
    let grid = build_grid(&dom, &h).map_err(|e| e.to_string())?;
    let part = classify_nodes(&grid, &dom);
    let kernel = NonlocalKernelSpec::new(profile, 2, delta).map_err(|e| e.to_string())?;

    let u = move |x: &[f64]| mf.u(x);
    let g: Box<dyn Fn(&[f64]) -> f64 + Sync> = match config.bc_mode {
        BcMode::Exact => Box::new(u),
        BcMode::Zero => Box::new(|_: &[f64]| 0.0),
    };
    // fixed-delta studies solve the nonlocal problem with f_delta and
    // measure against the manufactured nonlocal solution; shrinking-delta
    // studies solve with f0 and measure against the local solution
    // (both exact solutions coincide with the manufactured u)
    let f: Box<dyn Fn(&[f64]) -> f64 + Sync> = if config.coupling.is_fixed() {
        match mf {
            Manufactured::Ms1 => {
                let shift = 2.0 * delta * delta;
                Box::new(move |x: &[f64]| mf.f0(x) + shift)
            }
            // no simple closed form for ms2's nonlocal source; the ball rule
            // is exact on polynomials, so evaluate f_delta = -L_delta u by it
            Manufactured::Ms2 => {
                let oracle = ball_rule(2, delta, 25, 40);
                let k = kernel.clone();
                Box::new(move |x: &[f64]| -apply_nonlocal(u, x, &k, &oracle))
            }
        }
    } else {
        Box::new(move |x: &[f64]| mf.f0(x))
    };

    let system = match config.backend {
        BackendConfig::Gauss { n_r, n_theta } => {
            let rule = ball_rule(2, delta, n_r, n_theta);
            assemble(&grid, &part, &kernel, &Backend::Ball(&rule), &f, &g)
        }
        BackendConfig::Meshfree { ratio } => {
            let set = build_symmetric_set(2, delta, delta / ratio).map_err(|e| e.to_string())?;
            let w = rk_weights(&set, &kernel).map_err(|e| e.to_string())?;
            assemble(&grid, &part, &kernel, &Backend::Meshfree(&set, &w), &f, &g)
        }
    }
    .map_err(|e| e.to_string())?;

    let report = match config.solver {
        SolverConfig::Direct => solve_direct(&system),
        SolverConfig::Krylov { tol } => solve_krylov(&system, tol, 200_000),
    }
    .map_err(|e| e.to_string())?;

    let basis = RKBasis::new(grid.clone());
    let coeffs = expansion_coeffs(&basis.grid, &part.roles, &system, &report.coefficients);
    let error = error_l2(&basis, &coeffs, u, &dom);
    let n_unknowns = system.matrix.n_rows;
    Ok(GridSolve {
        system,
        report,
        error,
        n_unknowns,
        grid,
        partition: part,
    })
}

/// Run the full convergence study over the configured grid sequence.
pub fn run_study(config: &StudyConfig) -> Result<ConvergenceReport, HarnessError> {
    config.validate()?;
    let mut rows = Vec::new();
    let mut warnings = Vec::new();
    for (index, &h_max) in config.grid_seq.h_max.iter().enumerate() {
        let start = Instant::now();
        let solved = solve_one_grid(config, h_max).map_err(|message| {
            let partial = finish_report(rows.clone(), Vec::new());
            HarnessError::GridFailed {
                index,
                h_max,
                message,
                partial,
            }
        })?;
        warnings.extend(solved.system.warnings.iter().cloned());
        rows.push(ReportRow {
            h_max,
            delta: config.coupling.delta(h_max),
            n_unknowns: solved.n_unknowns,
            error_l2: solved.error,
            runtime_s: start.elapsed().as_secs_f64(),
        });
    }
    let (fitted_rate, pair_rates, fit_warnings) = fit_rate(&rows)?;
    warnings.extend(fit_warnings);
    let mut report = finish_report(rows, warnings);
    report.fitted_rate = fitted_rate;
    report.pair_rates = pair_rates;
    Ok(report)
}

fn finish_report(rows: Vec<ReportRow>, warnings: Vec<String>) -> ConvergenceReport {
    ConvergenceReport {
        rows,
        fitted_rate: f64::NAN,
        pair_rates: Vec::new(),
        warnings,
    }
}

/// Everything produced by a single solve, for callers that also want the
/// assembled system (matrix export) and the grid partition (debug export).
pub struct SolveArtifacts {
    pub summary: SolveSummary,
    pub system: CollocationSystem<f64>,
    pub grid: crate::grid::GridSpec<f64>,
    pub partition: crate::grid::NodePartition,
}

/// Solve a single problem (first grid of the sequence) with full artifacts.
pub fn run_solve_full(config: &StudyConfig) -> Result<SolveArtifacts, HarnessError> {
    let h_max = *config
        .grid_seq
        .h_max
        .first()
        .ok_or_else(|| HarnessError::BadConfig("grid_seq.h_max is empty".into()))?;
    let solved =
        solve_one_grid(config, h_max).map_err(|message| HarnessError::GridFailed {
            index: 0,
            h_max,
            message,
            partial: finish_report(Vec::new(), Vec::new()),
        })?;
    let summary = SolveSummary {
        h_max,
        delta: config.coupling.delta(h_max),
        n_unknowns: solved.n_unknowns,
        error_l2: solved.error,
        residual_norm: solved.report.residual_norm,
        method: solved.report.method,
        iterations: solved.report.iterations,
        warnings: solved.system.warnings.clone(),
    };
    Ok(SolveArtifacts {
        summary,
        system: solved.system,
        grid: solved.grid,
        partition: solved.partition,
    })
}

/// Solve a single problem (first grid of the sequence) and summarize.
pub fn run_solve(config: &StudyConfig) -> Result<SolveSummary, HarnessError> {
    run_solve_full(config).map(|a| a.summary)
}

/// Write report.csv, report.json and loglog.csv into `out_dir`; returns the
/// paths. Byte-identical for identical configs.
pub fn emit(
    config: &StudyConfig,
    report: &ConvergenceReport,
    out_dir: &std::path::Path,
) -> Result<Vec<std::path::PathBuf>, HarnessError> {
    std::fs::create_dir_all(out_dir)?;
    let csv_path = out_dir.join("report.csv");
    let mut csv = std::fs::File::create(&csv_path)?;
    writeln!(csv, "h_max, delta, n_unknowns, error_l2, pair_rate")?;
    for (i, row) in report.rows.iter().enumerate() {
        let pair = if i == 0 {
            String::new()
        } else {
            format!("{:.12e}", report.pair_rates[i - 1])
        };
        writeln!(
            csv,
            "{:.12e}, {:.12e}, {}, {:.12e}, {}",
            row.h_max, row.delta, row.n_unknowns, row.error_l2, pair
        )?;
    }

    let loglog_path = out_dir.join("loglog.csv");
    let mut ll = std::fs::File::create(&loglog_path)?;
    writeln!(ll, "log_h_max, log_error_l2")?;
    for row in &report.rows {
        writeln!(ll, "{:.12e}, {:.12e}", row.h_max.ln(), row.error_l2.ln())?;
    }

    let json_path = out_dir.join("report.json");
    let payload = serde_json::json!({
        "version": VERSION,
        "config": config,
        "fitted_rate": report.fitted_rate,
        "pair_rates": report.pair_rates,
        "rows": report.rows,
        "warnings": report.warnings,
    });
    std::fs::write(&json_path, serde_json::to_string_pretty(&payload).unwrap())?;
    Ok(vec![csv_path, loglog_path, json_path])
}
