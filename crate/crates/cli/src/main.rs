//! `nlrk`: nonlocal RK collocation toolkit CLI.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde::Deserialize;

use nlrk_core::grid::partition_to_json;
use nlrk_core::harness::{emit, run_solve_full, run_study, HarnessError, StudyConfig, VERSION};
use nlrk_core::kernels::{NonlocalKernelSpec, Profile};
use nlrk_core::quadrature::{
    build_symmetric_set, gmls_default_weight, gmls_weights, rk_weights, verify_reproduction,
};
use nlrk_core::symbols::{scan_comparison, xi_grid};

#[derive(Parser)]
#[command(name = "nlrk", version = VERSION, about = "Nonlocal diffusion RK collocation toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve a single problem (first grid of the config's sequence) and print
    /// a JSON summary to stdout.
    Solve {
        /// study config (JSON)
        #[arg(long)]
        config: PathBuf,
        /// write the assembled matrix as "row col value" triplets
        #[arg(long)]
        export_matrix: Option<PathBuf>,
        /// write the grid partition (node coordinates, classification) as JSON
        #[arg(long)]
        export_grid: Option<PathBuf>,
    },
    /// Run a convergence study and write report.csv / loglog.csv /
    /// report.json into the output directory.
    Converge {
        /// study config (JSON)
        #[arg(long)]
        config: PathBuf,
        /// output directory
        #[arg(long)]
        out: PathBuf,
    },
    /// Build the symmetric point set on the delta-ball and print the
    /// quadrature weights as CSV (stdout) plus a JSON summary (stderr).
    Weights {
        /// horizon delta
        #[arg(long)]
        delta: f64,
        /// lattice spacing epsilon
        #[arg(long)]
        eps: f64,
        /// use the GMLS construction instead of the closed-form RK weights
        #[arg(long)]
        gmls: bool,
        /// spatial dimension
        #[arg(long, default_value_t = 2)]
        dim: usize,
        /// kernel profile: "constant" or "polynomial:p"
        #[arg(long, default_value = "constant")]
        profile: String,
    },
    /// Scan the Fourier-symbol stability ratios over a frequency grid;
    /// writes symbols.csv and symbols.json, prints the minima to stdout.
    Symbols {
        /// symbol scan config (JSON)
        #[arg(long)]
        config: PathBuf,
        /// output directory
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
}

/// Config for `nlrk symbols`.
#[derive(Debug, Deserialize)]
struct SymbolsConfig {
    /// horizon
    delta: f64,
    /// coarsest spacing; per-axis h = hat_h * h_max
    h_max: f64,
    #[serde(default = "default_hat_h")]
    hat_h: Vec<f64>,
    /// points per axis on Q = (-pi, pi)^2; must be odd
    #[serde(default = "default_n")]
    n: usize,
    /// lattice-sum truncation radius
    #[serde(default = "default_r_max")]
    r_max: i64,
    /// delta / eps ratio of the symmetric point set
    #[serde(default = "default_ratio")]
    ratio: f64,
    #[serde(default = "default_profile")]
    profile: String,
}

fn default_hat_h() -> Vec<f64> {
    vec![1.0, 0.5]
}
fn default_n() -> usize {
    51
}
fn default_r_max() -> i64 {
    20
}
fn default_ratio() -> f64 {
    3.0
}
fn default_profile() -> String {
    "constant".into()
}

fn main() -> ExitCode {
    init_threads();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Solve {
            config,
            export_matrix,
            export_grid,
        } => cmd_solve(&config, export_matrix.as_deref(), export_grid.as_deref()),
        Command::Converge { config, out } => cmd_converge(&config, &out),
        Command::Weights {
            delta,
            eps,
            gmls,
            dim,
            profile,
        } => cmd_weights(delta, eps, gmls, dim, &profile),
        Command::Symbols { config, out } => cmd_symbols(&config, &out),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::FAILURE
        }
    }
}

/// NLRK_THREADS caps assembly/scan parallelism via the global rayon pool.
fn init_threads() {
    if let Ok(v) = std::env::var("NLRK_THREADS") {
        match v.parse::<usize>() {
            Ok(n) if n >= 1 => {
                rayon::ThreadPoolBuilder::new()
                    .num_threads(n)
                    .build_global()
                    .ok();
            }
            _ => eprintln!("warning: ignoring invalid NLRK_THREADS value {v:?}"),
        }
    }
}

fn load_study_config(path: &std::path::Path) -> Result<StudyConfig, String> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
    serde_json::from_str(&text).map_err(|e| format!("invalid config {}: {e}", path.display()))
}

fn cmd_solve(
    config: &std::path::Path,
    export_matrix: Option<&std::path::Path>,
    export_grid: Option<&std::path::Path>,
) -> Result<(), String> {
    let config = load_study_config(config)?;
    let artifacts = run_solve_full(&config).map_err(|e| e.to_string())?;
    if let Some(path) = export_matrix {
        std::fs::write(path, artifacts.system.matrix.to_triplets())
            .map_err(|e| format!("cannot write {}: {e}", path.display()))?;
    }
    if let Some(path) = export_grid {
        let json = partition_to_json(&artifacts.grid, &artifacts.partition);
        std::fs::write(path, serde_json::to_string_pretty(&json).unwrap())
            .map_err(|e| format!("cannot write {}: {e}", path.display()))?;
    }
    println!(
        "{}",
        serde_json::to_string_pretty(&serde_json::json!({
            "version": VERSION,
            "summary": artifacts.summary,
        }))
        .unwrap()
    );
    Ok(())
}

fn cmd_converge(config: &std::path::Path, out: &std::path::Path) -> Result<(), String> {
    let config = load_study_config(config)?;
    match run_study(&config) {
        Ok(report) => {
            let paths = emit(&config, &report, out).map_err(|e| e.to_string())?;
            println!(
                "{}",
                serde_json::to_string_pretty(&serde_json::json!({
                    "fitted_rate": report.fitted_rate,
                    "pair_rates": report.pair_rates,
                    "warnings": report.warnings,
                    "files": paths,
                }))
                .unwrap()
            );
            Ok(())
        }
        Err(HarnessError::GridFailed {
            index,
            h_max,
            message,
            partial,
        }) => {
            // save what completed before failing
            emit(&config, &partial, out).ok();
            Err(format!(
                "grid {index} (h_max = {h_max}) failed: {message}; partial results saved to {}",
                out.display()
            ))
        }
        Err(e) => Err(e.to_string()),
    }
}

fn cmd_weights(
    delta: f64,
    eps: f64,
    gmls: bool,
    dim: usize,
    profile: &str,
) -> Result<(), String> {
    let profile = Profile::parse(profile).map_err(|e| e.to_string())?;
    let kernel = NonlocalKernelSpec::new(profile, dim, delta).map_err(|e| e.to_string())?;
    let set = build_symmetric_set::<f64>(dim, delta, eps).map_err(|e| e.to_string())?;
    let weights = if gmls {
        gmls_weights(&set, &kernel, gmls_default_weight(&kernel)).map_err(|e| e.to_string())?
    } else {
        rk_weights(&set, &kernel).map_err(|e| e.to_string())?
    };
    let report = verify_reproduction(&set, &weights, &kernel);

    let header: Vec<String> = (1..=dim).map(|j| format!("s{j}")).collect();
    println!("{}, |s|, omega", header.join(", "));
    for (s, w) in set.points.iter().zip(&weights.weights) {
        let coords: Vec<String> = s.iter().map(|v| format!("{v:.12e}")).collect();
        let norm = s.iter().map(|v| v * v).sum::<f64>().sqrt();
        println!("{}, {:.12e}, {:.12e}", coords.join(", "), norm, w);
    }

    let summary = serde_json::json!({
        "version": VERSION,
        "method": if gmls { "gmls" } else { "rk" },
        "delta": delta,
        "eps": eps,
        "n_points": set.count(),
        "min_weight": weights.weights.iter().cloned().fold(f64::INFINITY, f64::min),
        "denominator": weights.denom,
        "max_reproduction_violation": report.max_violation,
        "reproduction": report.violations.iter()
            .map(|(alpha, v)| serde_json::json!({"alpha": alpha, "residual": v}))
            .collect::<Vec<_>>(),
    });
    eprintln!("{}", serde_json::to_string_pretty(&summary).unwrap());
    Ok(())
}

fn cmd_symbols(config: &std::path::Path, out: &std::path::Path) -> Result<(), String> {
    let text = std::fs::read_to_string(config)
        .map_err(|e| format!("cannot read config {}: {e}", config.display()))?;
    let cfg: SymbolsConfig =
        serde_json::from_str(&text).map_err(|e| format!("invalid config: {e}"))?;
    if cfg.n % 2 == 0 {
        return Err("n must be odd (even grids sample degenerate frequencies)".into());
    }
    let d = cfg.hat_h.len();
    if d != 2 {
        return Err("symbol scans are 2D (hat_h must have length 2)".into());
    }
    let profile = Profile::parse(&cfg.profile).map_err(|e| e.to_string())?;
    let kernel = NonlocalKernelSpec::new(profile, d, cfg.delta).map_err(|e| e.to_string())?;
    let h: Vec<f64> = cfg.hat_h.iter().map(|&r| r * cfg.h_max).collect();
    let set =
        build_symmetric_set::<f64>(d, cfg.delta, cfg.delta / cfg.ratio).map_err(|e| e.to_string())?;
    let weights = rk_weights(&set, &kernel).map_err(|e| e.to_string())?;
    let grid = xi_grid::<f64>(d, cfg.n);
    let scan = scan_comparison(&kernel, &h, &set, &weights, &grid, cfg.r_max);

    std::fs::create_dir_all(out).map_err(|e| e.to_string())?;
    let csv_path = out.join("symbols.csv");
    let mut csv = String::from("xi1, xi2, lambda_g, lambda_c, lambda_c_eps, c_over_g, ceps_over_c\n");
    for (i, xi) in scan.xi_grid.iter().enumerate() {
        let (g, c, ce) = (scan.lambda_g[i], scan.lambda_c[i], scan.lambda_c_eps[i]);
        csv.push_str(&format!(
            "{:.12e}, {:.12e}, {:.12e}, {:.12e}, {:.12e}, {:.12e}, {:.12e}\n",
            xi[0],
            xi[1],
            g,
            c,
            ce,
            c / g,
            ce / c
        ));
    }
    std::fs::write(&csv_path, csv).map_err(|e| e.to_string())?;

    let summary = serde_json::json!({
        "version": VERSION,
        "delta": cfg.delta,
        "h": h,
        "n": cfg.n,
        "r_max": cfg.r_max,
        "n_points": set.count(),
        "min_c_over_g": scan.min_c_over_g,
        "min_ceps_over_c": scan.min_ceps_over_c,
        "max_tail_estimate": scan.tail_estimate,
    });
    let json_path = out.join("symbols.json");
    std::fs::write(&json_path, serde_json::to_string_pretty(&summary).unwrap())
        .map_err(|e| e.to_string())?;
    println!("{}", serde_json::to_string_pretty(&summary).unwrap());
    Ok(())
}
