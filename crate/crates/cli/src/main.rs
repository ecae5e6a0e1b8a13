//! Command-line front end: verification campaigns, table regeneration,
//! stratum queries, fiber sampling, and numeric factorization.
//!
//! Flags can be supplied through the environment with the `SYMPFACT_`
//! prefix (`SYMPFACT_SEED`, `SYMPFACT_KMAX`, `SYMPFACT_SAMPLES`,
//! `SYMPFACT_TOL`); explicit flags win.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use sympfact_core::factor::{exp_factorization, factor_sp4};
use sympfact_core::fields::tables::{diff_tables, regen_tables, render_all};
use sympfact_core::jsonio::{parse_rat, FactorJson, FactorsJson, MatrixJson};
use sympfact_core::poly::Rat;
use sympfact_core::report::Report;
use sympfact_core::sampling::rng_for;
use sympfact_core::strata::{
    classify_fiber, sample_fiber_point, Component, FiberPoint, SampleMode, Stratum,
};
use sympfact_core::suites::{run_campaign, CampaignConfig};

#[derive(Parser)]
#[command(
    name = "sympfact",
    version,
    about = "Exact verification and numeric factorization for elementary symplectic products"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct CommonOpts {
    /// Campaign seed; falls back to SYMPFACT_SEED, then 1
    #[arg(long)]
    seed: Option<u64>,
    /// Largest product length for the symbolic suites (3..=6); falls
    /// back to SYMPFACT_KMAX, then 6
    #[arg(long)]
    kmax: Option<usize>,
    /// Rational samples per sampled suite; falls back to
    /// SYMPFACT_SAMPLES, then 200
    #[arg(long)]
    samples: Option<usize>,
    /// Numeric tolerance; falls back to SYMPFACT_TOL, then 1e-9
    #[arg(long)]
    tol: Option<f64>,
}

struct Config {
    seed: u64,
    kmax: usize,
    samples: usize,
    tol: f64,
}

impl CommonOpts {
    fn resolve(&self) -> Result<Config, String> {
        fn env_parse<T: std::str::FromStr>(key: &str) -> Result<Option<T>, String> {
            match std::env::var(key) {
                Ok(v) => v
                    .parse::<T>()
                    .map(Some)
                    .map_err(|_| format!("cannot parse {key}={v}")),
                Err(_) => Ok(None),
            }
        }
        let cfg = Config {
            seed: match self.seed {
                Some(s) => s,
                None => env_parse("SYMPFACT_SEED")?.unwrap_or(1),
            },
            kmax: match self.kmax {
                Some(k) => k,
                None => env_parse("SYMPFACT_KMAX")?.unwrap_or(6),
            },
            samples: match self.samples {
                Some(s) => s,
                None => env_parse("SYMPFACT_SAMPLES")?.unwrap_or(200),
            },
            tol: match self.tol {
                Some(t) => t,
                None => env_parse("SYMPFACT_TOL")?.unwrap_or(1e-9),
            },
        };
        if cfg.kmax < 3 {
            return Err(format!("kmax must be at least 3, got {}", cfg.kmax));
        }
        if cfg.kmax > 6 {
            return Err(format!(
                "kmax must be at most 6 for the symbolic suites, got {}",
                cfg.kmax
            ));
        }
        if cfg.samples < 1 {
            return Err("samples must be at least 1".to_string());
        }
        if !(cfg.tol > 0.0) {
            return Err(format!("tolerance must be positive, got {}", cfg.tol));
        }
        Ok(cfg)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Run the verification campaign and write a machine-readable report
    Verify {
        #[command(flatten)]
        common: CommonOpts,
        /// Report output path
        #[arg(long, default_value = "report.json")]
        out: PathBuf,
        /// Negative control: flip the correction signs of the lifted
        /// fields so the tangency suite fails
        #[arg(long, hide = true)]
        mutate_sign: bool,
    },
    /// Factor a symplectic matrix into elementary factors
    Factor {
        #[command(flatten)]
        common: CommonOpts,
        /// Input matrix (JSON)
        #[arg(long = "in")]
        input: PathBuf,
        /// Output factor list (JSON)
        #[arg(long, default_value = "factors.json")]
        out: PathBuf,
        /// Also emit the logarithms of the factors
        #[arg(long)]
        exp: bool,
    },
    /// Regenerate the reference tables and diff them against the
    /// embedded transcription
    Tables {
        /// Directory for the canonical table files
        #[arg(long, default_value = "tables")]
        emit: PathBuf,
        /// Only write the files, skip the diff
        #[arg(long)]
        emit_only: bool,
        /// Negative control: corrupt one regenerated cell
        /// (table:row-index:col-index) before diffing
        #[arg(long, hide = true)]
        corrupt_cell: Option<String>,
    },
    /// Classify fibers and sample points on strata
    Strata {
        #[command(subcommand)]
        action: StrataAction,
    },
    /// Sample a point of a fiber of the last-row map
    SampleFiber {
        #[command(flatten)]
        common: CommonOpts,
        #[arg(long)]
        k: usize,
        #[arg(long, default_value_t = 2)]
        n: usize,
        /// random | stratum:<name> | component:<a1|a2> where <name> is
        /// one of generic-smooth, generic-singular, non-generic-smooth,
        /// non-generic-singular
        #[arg(long, default_value = "random")]
        mode: String,
        /// Output path for the sampled point (JSON)
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum StrataAction {
    /// Classify the fiber over a target vector
    Classify {
        #[arg(long)]
        k: usize,
        /// Target vector, four comma-separated rationals ("1,0,1/2,-3")
        #[arg(long)]
        a: String,
    },
    /// Sample a point on a named stratum
    Sample {
        #[command(flatten)]
        common: CommonOpts,
        #[arg(long)]
        k: usize,
        /// generic-smooth | generic-singular | non-generic-smooth |
        /// non-generic-singular
        #[arg(long)]
        stratum: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode, String> {
    match cli.command {
        Command::Verify {
            common,
            out,
            mutate_sign,
        } => cmd_verify(&common, &out, mutate_sign),
        Command::Factor {
            common,
            input,
            out,
            exp,
        } => cmd_factor(&common, &input, &out, exp),
        Command::Tables {
            emit,
            emit_only,
            corrupt_cell,
        } => cmd_tables(&emit, emit_only, corrupt_cell.as_deref()),
        Command::Strata { action } => match action {
            StrataAction::Classify { k, a } => cmd_classify(k, &a),
            StrataAction::Sample {
                common,
                k,
                stratum,
                out,
            } => cmd_strata_sample(&common, k, &stratum, out.as_deref()),
        },
        Command::SampleFiber {
            common,
            k,
            n,
            mode,
            out,
        } => cmd_sample_fiber(&common, k, n, &mode, out.as_deref()),
    }
}

fn cmd_verify(common: &CommonOpts, out: &Path, mutate_sign: bool) -> Result<ExitCode, String> {
    let cfg = common.resolve()?;
    let campaign = CampaignConfig {
        seed: cfg.seed,
        kmax: cfg.kmax,
        samples: cfg.samples,
        tol: cfg.tol,
        mutate_sign,
    };
    let t0 = Instant::now();
    let reports = run_campaign(&campaign);
    let elapsed = t0.elapsed();
    for r in &reports {
        println!("{}", r.summary_line());
        for note in &r.notes {
            println!("     note: {note}");
        }
    }
    let all_passed = reports.iter().all(Report::passed);
    let doc = json!({
        "seed": cfg.seed,
        "kmax": cfg.kmax,
        "samples": cfg.samples,
        "tol": cfg.tol,
        "mutate_sign": mutate_sign,
        "passed": all_passed,
        "suites": reports,
    });
    write_text(
        out,
        &serde_json::to_string_pretty(&doc).map_err(|e| e.to_string())?,
    )?;
    println!(
        "campaign {} in {:.1} s, report written to {}",
        if all_passed { "passed" } else { "FAILED" },
        elapsed.as_secs_f64(),
        out.display()
    );
    Ok(if all_passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    })
}

fn cmd_factor(
    common: &CommonOpts,
    input: &Path,
    out: &Path,
    exp: bool,
) -> Result<ExitCode, String> {
    let cfg = common.resolve()?;
    let text = std::fs::read_to_string(input)
        .map_err(|e| format!("cannot read {}: {e}", input.display()))?;
    let mj: MatrixJson = serde_json::from_str(&text).map_err(|e| format!("parse error: {e}"))?;
    if mj.n != 2 {
        return Err(format!(
            "factorization handles 4x4 matrices (n = 2), got n = {}",
            mj.n
        ));
    }
    let matrix = mj.to_c64().map_err(|e| e.to_string())?;
    let result = factor_sp4(&matrix, cfg.tol).map_err(|e| e.to_string())?;
    let logs = exp.then(|| {
        let ef = exp_factorization(&result.factors);
        ef.logs
            .iter()
            .map(|g| MatrixJson::from_c64(g, 2))
            .collect::<Vec<_>>()
    });
    let doc = FactorsJson {
        factors: result.factors.iter().map(FactorJson::from_factor).collect(),
        count: result.count,
        residual: result.residual,
        logs,
    };
    write_text(
        out,
        &serde_json::to_string_pretty(&doc).map_err(|e| e.to_string())?,
    )?;
    println!(
        "factored into {} elementary factors, relative residual {:.3e}; written to {}",
        result.count,
        result.residual,
        out.display()
    );
    Ok(ExitCode::SUCCESS)
}

fn cmd_tables(emit: &Path, emit_only: bool, corrupt: Option<&str>) -> Result<ExitCode, String> {
    let mut tables = regen_tables();
    if let Some(spec) = corrupt {
        corrupt_cell(&mut tables, spec)?;
        println!("test mode: corrupted cell {spec}");
    }
    std::fs::create_dir_all(emit).map_err(|e| format!("cannot create {}: {e}", emit.display()))?;
    for (name, contents) in render_all(&tables) {
        write_text(&emit.join(&name), &contents)?;
    }
    println!("canonical tables written to {}", emit.display());
    if emit_only {
        return Ok(ExitCode::SUCCESS);
    }
    let diff = diff_tables(&tables);
    for e in &diff.errata_confirmed {
        println!(
            "erratum {} [{}][{}]: reference {:?}, recomputed {:?}",
            e.table, e.row, e.col, e.reference, e.recomputed
        );
    }
    for m in &diff.mismatches {
        println!(
            "MISMATCH {} [{}][{}]: reference {:?}, recomputed {:?}",
            m.table, m.row, m.col, m.reference, m.recomputed
        );
    }
    println!(
        "{} cells checked, {} mismatches, {} recorded errata confirmed",
        diff.cells_checked,
        diff.mismatches.len(),
        diff.errata_confirmed.len()
    );
    Ok(if diff.clean() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    })
}

fn corrupt_cell(
    tables: &mut sympfact_core::fields::tables::Tables,
    spec: &str,
) -> Result<(), String> {
    let parts: Vec<&str> = spec.splitn(3, ':').collect();
    let [table, row, col] = parts.as_slice() else {
        return Err("corrupt-cell spec must be table:row:col".to_string());
    };
    let ri: usize = row.parse().map_err(|_| "row must be an index".to_string())?;
    let ci: usize = col.parse().map_err(|_| "col must be an index".to_string())?;
    let t = match *table {
        "table1" => &mut tables.table1,
        "table2" => &mut tables.table2,
        "table3" => &mut tables.table3,
        other => return Err(format!("unknown table {other}")),
    };
    let cell = t
        .get_mut(ri)
        .and_then(|r| r.get_mut(ci))
        .ok_or_else(|| "cell index out of range".to_string())?;
    *cell = format!("corrupted({cell})");
    Ok(())
}

fn parse_target(a: &str) -> Result<[Rat; 4], String> {
    let parts: Vec<&str> = a.split(',').collect();
    if parts.len() != 4 {
        return Err(format!(
            "target must have four components, got {}",
            parts.len()
        ));
    }
    let mut out = Vec::with_capacity(4);
    for p in parts {
        out.push(parse_rat(p).map_err(|e| e.to_string())?);
    }
    Ok([
        out[0].clone(),
        out[1].clone(),
        out[2].clone(),
        out[3].clone(),
    ])
}

fn cmd_classify(k: usize, a: &str) -> Result<ExitCode, String> {
    let target = parse_target(a)?;
    let stratum = classify_fiber(k, &target).map_err(|e| e.to_string())?;
    println!("{}", stratum_name(stratum));
    Ok(ExitCode::SUCCESS)
}

fn stratum_name(s: Stratum) -> &'static str {
    match s {
        Stratum::GenericSmooth => "generic-smooth",
        Stratum::GenericSingular => "generic-singular",
        Stratum::NonGenericSmooth => "non-generic-smooth",
        Stratum::NonGenericSingular => "non-generic-singular",
    }
}

fn parse_stratum(s: &str) -> Result<Stratum, String> {
    Ok(match s {
        "generic-smooth" => Stratum::GenericSmooth,
        "generic-singular" => Stratum::GenericSingular,
        "non-generic-smooth" => Stratum::NonGenericSmooth,
        "non-generic-singular" => Stratum::NonGenericSingular,
        other => return Err(format!("unknown stratum {other}")),
    })
}

fn cmd_strata_sample(
    common: &CommonOpts,
    k: usize,
    stratum: &str,
    out: Option<&Path>,
) -> Result<ExitCode, String> {
    let cfg = common.resolve()?;
    let s = parse_stratum(stratum)?;
    let mut rng = rng_for(cfg.seed, &format!("cli-strata-sample-{k}-{stratum}"));
    let fp =
        sample_fiber_point(k, 2, SampleMode::OnStratum(s), &mut rng).map_err(|e| e.to_string())?;
    emit_fiber_point(&fp, out)
}

fn cmd_sample_fiber(
    common: &CommonOpts,
    k: usize,
    n: usize,
    mode: &str,
    out: Option<&Path>,
) -> Result<ExitCode, String> {
    let cfg = common.resolve()?;
    let parsed = if mode == "random" {
        SampleMode::Random
    } else if let Some(name) = mode.strip_prefix("stratum:") {
        SampleMode::OnStratum(parse_stratum(name)?)
    } else if let Some(c) = mode.strip_prefix("component:") {
        match c {
            "a1" | "A1" => SampleMode::OnComponent(Component::A1),
            "a2" | "A2" => SampleMode::OnComponent(Component::A2),
            other => return Err(format!("unknown component {other}")),
        }
    } else {
        return Err(format!("unknown mode {mode}"));
    };
    let mut rng = rng_for(cfg.seed, &format!("cli-sample-fiber-{k}-{n}-{mode}"));
    let fp = sample_fiber_point(k, n, parsed, &mut rng).map_err(|e| e.to_string())?;
    emit_fiber_point(&fp, out)
}

fn emit_fiber_point(fp: &FiberPoint, out: Option<&Path>) -> Result<ExitCode, String> {
    let point: BTreeMap<String, String> = fp
        .point
        .iter()
        .map(|(v, x)| (v.name(fp.n), x.to_string()))
        .collect();
    let doc = json!({
        "k": fp.k,
        "n": fp.n,
        "point": point,
        "target": fp.target.iter().map(|x| x.to_string()).collect::<Vec<_>>(),
        "valid": fp.validate(),
    });
    let text = serde_json::to_string_pretty(&doc).map_err(|e| e.to_string())?;
    match out {
        Some(path) => {
            write_text(path, &text)?;
            println!("fiber point written to {}", path.display());
        }
        None => println!("{text}"),
    }
    Ok(ExitCode::SUCCESS)
}

fn write_text(path: &Path, contents: &str) -> Result<(), String> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)
                .map_err(|e| format!("cannot create {}: {e}", parent.display()))?;
        }
    }
    std::fs::write(path, contents).map_err(|e| format!("cannot write {}: {e}", path.display()))
}
