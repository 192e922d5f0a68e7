//! `sievelab` — CLI for the sieve-function correlation lab.
//!
//! Exit codes: 0 success, 1 identity-suite failure, 2 configuration error,
//! 3 resource or budget error.

use clap::{Parser, Subcommand};
use sievelab::config::SweepConfig;
use sievelab::fit::{empirical_eps0, estimate_exponent};
use sievelab::identities;
use sievelab::io::{emit_csv, emit_json, emit_plot_data, read_csv, read_json};
use sievelab::sweep::{dyadic_block, preset_by_name, run_sweep};
use sievelab_core::corr::{
    bilinear_magnitude_report, decompose_correlation_general, BilinearTrialSet,
};
use sievelab_core::integrals::full_report;
use sievelab_core::rat::to_f64;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "sievelab",
    version,
    about = "Correlations, Selberg/symmetry integrals, and bilinear sums for sieve functions f = g*1"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Dump a sieved segment of f = g*1 as `n,value` lines.
    Sieve {
        /// Coefficient preset: unit, moebius, moebius_squared, zero.
        #[arg(long, default_value = "unit")]
        preset: String,
        /// Support bound Q for g.
        #[arg(long)]
        q: i64,
        #[arg(long)]
        start: i64,
        #[arg(long)]
        end: i64,
        /// Write to a file instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Single-shift correlation: direct, symmetrized, and opened forms.
    Corr {
        #[arg(long, default_value = "unit")]
        preset1: String,
        #[arg(long)]
        d: i64,
        #[arg(long, default_value = "unit")]
        preset2: String,
        #[arg(long)]
        q: i64,
        #[arg(long)]
        n: i64,
        #[arg(long)]
        a: i64,
    },
    /// Full exact decomposition of one symmetrized correlation.
    Decompose {
        #[arg(long, default_value = "unit")]
        preset1: String,
        #[arg(long)]
        d: i64,
        #[arg(long, default_value = "unit")]
        preset2: String,
        #[arg(long)]
        q: i64,
        #[arg(long)]
        n: i64,
        #[arg(long)]
        a: i64,
    },
    /// Exact J and I with their weighted-correlation reconstructions.
    Integrals {
        #[arg(long, default_value = "unit")]
        preset1: String,
        #[arg(long)]
        d: i64,
        #[arg(long, default_value = "unit")]
        preset2: String,
        #[arg(long)]
        q: i64,
        #[arg(long)]
        n: i64,
        #[arg(long)]
        h: i64,
        #[arg(long, default_value_t = 0.01)]
        delta: f64,
    },
    /// Kloosterman-fraction bilinear magnitude report over dyadic bases.
    Bilinear {
        #[arg(long, default_value = "unit")]
        preset1: String,
        #[arg(long, default_value = "moebius")]
        preset2: String,
        /// Comma-separated dyadic bases, one report row each.
        #[arg(long, value_delimiter = ',', default_values_t = vec![32i64, 64, 128])]
        bases: Vec<i64>,
        /// Frequency k of e_q(k d-bar).
        #[arg(long, default_value_t = 1)]
        k: i64,
    },
    /// Run every exact-identity suite; nonzero exit on any failure.
    Identities,
    /// Run a sweep from a config file (flags override file values).
    Sweep {
        #[arg(long)]
        config: Option<PathBuf>,
        /// Override a config key, e.g. --set theta=0.3 (repeatable).
        #[arg(long = "set", value_name = "KEY=VALUE")]
        overrides: Vec<String>,
        /// Run points on a worker pool (record order is unchanged).
        #[arg(long)]
        parallel: bool,
        /// Also write a JSON copy next to the CSV.
        #[arg(long)]
        json: bool,
    },
    /// Log-log exponent regression over a records file (CSV or JSON).
    Fit {
        #[arg(long)]
        records: PathBuf,
        #[arg(long, default_value = "n")]
        x: String,
        #[arg(long, default_value = "j_over_nh2")]
        y: String,
        /// Emit a two-column x,y CSV for plotting.
        #[arg(long)]
        plot_out: Option<PathBuf>,
    },
}

/// Error wrapper carrying the process exit code.
struct CliError {
    code: u8,
    message: String,
}

impl CliError {
    fn config(e: impl std::fmt::Display) -> CliError {
        CliError {
            code: 2,
            message: e.to_string(),
        }
    }

    fn resource(e: impl std::fmt::Display) -> CliError {
        CliError {
            code: 3,
            message: e.to_string(),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode, CliError> {
    match cli.command {
        Command::Sieve {
            preset,
            q,
            start,
            end,
            out,
        } => {
            if start < 1 || end < start {
                return Err(CliError::config(format!("bad range [{start}, {end}]")));
            }
            let g = preset_by_name(&preset, q).map_err(CliError::config)?;
            let f = g.sieve_segment(start, end);
            let mut lines = String::new();
            for n in start..=end {
                lines.push_str(&format!("{n},{}\n", f.value(n)));
            }
            match out {
                Some(path) => std::fs::write(&path, lines)
                    .map_err(|e| CliError::resource(format!("{}: {e}", path.display())))?,
                None => print!("{lines}"),
            }
        }
        Command::Corr {
            preset1,
            d,
            preset2,
            q,
            n,
            a,
        } => {
            let b = breakdown(&preset1, d, &preset2, q, n, a)?;
            println!("C({a})            = {}", b.direct);
            println!("symmetrized      = {}", b.symmetrized);
            println!("smooth main term = {}", b.smooth_main);
            println!("exact residual   = {}", b.exact_residual);
        }
        Command::Decompose {
            preset1,
            d,
            preset2,
            q,
            n,
            a,
        } => {
            let b = breakdown(&preset1, d, &preset2, q, n, a)?;
            println!("C({a})               = {}", b.direct);
            println!("symmetrized         = {}", b.symmetrized);
            println!("floor main term     = {}", b.floor_main);
            println!("Bernoulli remainder = {}", b.bernoulli_r);
            println!("integer correction  = {}", b.integer_correction);
            println!("smooth main term    = {}", b.smooth_main);
            println!("exact residual      = {}", b.exact_residual);
            println!("identity defect     = {}", b.identity_defect());
        }
        Command::Integrals {
            preset1,
            d,
            preset2,
            q,
            n,
            h,
            delta,
        } => {
            if h < 1 || h > n / 2 {
                return Err(CliError::config(format!("need 1 <= h <= N/2, got h={h}")));
            }
            let g1 = preset_by_name(&preset1, d).map_err(CliError::config)?;
            let g2 = preset_by_name(&preset2, q).map_err(CliError::config)?;
            let r = full_report(&g1, &g2, n, h, delta).map_err(CliError::resource)?;
            println!("J exact          = {} ({:.6})", r.j_exact, to_f64(&r.j_exact));
            println!("I exact          = {} ({:.6})", r.i_exact, to_f64(&r.i_exact));
            println!("J reconstructed  = {:.6}", r.j_reconstructed);
            println!("I reconstructed  = {:.6}", r.i_reconstructed);
            println!("mean product     = {}", r.mean_product);
            println!("J diff           = {:.6e}", r.j_diff);
            println!("I diff           = {:.6e}", r.i_diff);
            println!("envelope          = {:.6}", r.envelope);
        }
        Command::Bilinear {
            preset1,
            preset2,
            bases,
            k,
        } => {
            if k == 0 {
                return Err(CliError::config("frequency k must be nonzero"));
            }
            let mut sets = Vec::new();
            for &b in &bases {
                if b < 1 {
                    return Err(CliError::config(format!("bad dyadic base {b}")));
                }
                let g1 = dyadic_block(&preset1, b).map_err(CliError::config)?;
                let g2 = dyadic_block(&preset2, b).map_err(CliError::config)?;
                sets.push(BilinearTrialSet {
                    pairs: vec![(g1, g2)],
                });
            }
            let report = bilinear_magnitude_report(&sets, k);
            println!("D,Q,mean|B|,max|B|,envelope");
            for row in &report.rows {
                println!(
                    "{},{},{:.6},{:.6},{:.6}",
                    row.d_base, row.q_base, row.mean_magnitude, row.max_magnitude, row.envelope
                );
            }
            match report.magnitude_slope {
                Some(s) => println!("max|B| log-log slope vs DQ: {s:.6}"),
                None => println!("max|B| log-log slope vs DQ: n/a"),
            }
            match report.envelope_slope {
                Some(s) => println!("envelope log-log slope vs DQ: {s:.6}"),
                None => println!("envelope log-log slope vs DQ: n/a"),
            }
        }
        Command::Identities => {
            let mut all_ok = true;
            for r in identities::run_all() {
                if r.passed {
                    println!("PASS {}", r.name);
                } else {
                    all_ok = false;
                    println!("FAIL {} — {}", r.name, r.detail);
                }
            }
            if !all_ok {
                return Ok(ExitCode::from(1));
            }
        }
        Command::Sweep {
            config,
            overrides,
            parallel,
            json,
        } => {
            let mut cfg = match config {
                Some(path) => SweepConfig::from_file(&path).map_err(CliError::config)?,
                None => SweepConfig::default(),
            };
            for pair in &overrides {
                let (key, value) = pair
                    .split_once('=')
                    .ok_or_else(|| CliError::config(format!("override `{pair}` is not KEY=VALUE")))?;
                cfg.set(key.trim(), value.trim()).map_err(CliError::config)?;
            }
            cfg.validate().map_err(CliError::config)?;
            let records = run_sweep(&cfg, parallel).map_err(CliError::config)?;
            for rec in &records {
                if !rec.failure.is_empty() {
                    return Err(CliError::resource(format!(
                        "point N={} failed: {}",
                        rec.n, rec.failure
                    )));
                }
            }
            let csv_path = PathBuf::from(&cfg.output_path);
            emit_csv(&records, &csv_path).map_err(CliError::resource)?;
            println!("wrote {} records to {}", records.len(), csv_path.display());
            if json {
                let json_path = csv_path.with_extension("json");
                emit_json(&records, &json_path).map_err(CliError::resource)?;
                println!("wrote JSON copy to {}", json_path.display());
            }
            if records.len() >= 3 {
                if let Ok(eps) = empirical_eps0(&records) {
                    println!("empirical_eps0 = {eps:.6}");
                }
            }
        }
        Command::Fit {
            records,
            x,
            y,
            plot_out,
        } => {
            let recs = if records.extension().is_some_and(|e| e == "json") {
                read_json(&records).map_err(CliError::resource)?
            } else {
                read_csv(&records).map_err(CliError::resource)?
            };
            let fit = estimate_exponent(&recs, &x, &y).map_err(CliError::config)?;
            println!("log({y}) ~ {:.9}·log({x}) + {:.9}", fit.slope, fit.intercept);
            println!("slope     = {:.9}", fit.slope);
            println!("intercept = {:.9}", fit.intercept);
            println!("r2        = {:.9}", fit.r2);
            if y == "j_over_nh2" && x == "n" {
                println!("empirical_eps0 = {:.9}", -fit.slope);
            }
            if let Some(path) = plot_out {
                emit_plot_data(&recs, &x, &y, &path).map_err(CliError::resource)?;
                println!("wrote plot data to {}", path.display());
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn breakdown(
    preset1: &str,
    d: i64,
    preset2: &str,
    q: i64,
    n: i64,
    a: i64,
) -> Result<sievelab_core::corr::CorrelationBreakdown, CliError> {
    if a == 0 || a.abs() >= n {
        return Err(CliError::config(format!("need 0 < |a| < N, got a={a}, N={n}")));
    }
    let g1 = preset_by_name(preset1, d).map_err(CliError::config)?;
    let g2 = preset_by_name(preset2, q).map_err(CliError::config)?;
    decompose_correlation_general(&g1, &g2, n, a).map_err(CliError::resource)
}
