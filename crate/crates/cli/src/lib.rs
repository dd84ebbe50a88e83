//! Command-line front end: cone discovery, measure estimation, and
//! verification suites.
//!
//! Exit codes: 0 success, 1 verification failure, 2 usage or input error.

pub mod suites;

use anyhow::{anyhow, bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use optcorr::discovery::{
    alpha_cone, classify_result, default_classify_samples, entropy_cone, tables, ClassifyConfig,
    ConeSelector,
};
use optcorr::entropy_space::{AlphaFloat, ALPHA_SLOT_LABELS};
use optcorr::estimator::{estimate_measure, EstimateConfig};
use optcorr::io::RayTable;
use optcorr::{DensityMatrix, NamedMeasure, StateFamily};
use serde::Serialize;
use std::path::PathBuf;

pub fn version_string() -> String {
    format!("optcorr {}", env!("CARGO_PKG_VERSION"))
}

#[derive(Parser, Debug)]
#[command(
    name = "optcorr",
    version,
    about = "Exact monotone-cone discovery and variational estimation of optimized bipartite correlation measures"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Enumerate a monotone cone and emit its ray table.
    Discover(DiscoverArgs),
    /// Estimate an optimized measure on a state.
    Evaluate(EvaluateArgs),
    /// Run a named verification suite.
    Verify(VerifyArgs),
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Json,
    Csv,
    Table,
}

#[derive(Args, Debug, Serialize)]
pub struct DiscoverArgs {
    /// Cone code: certificate bit for A then B, e.g. 00, 10, 01, 11.
    #[arg(long)]
    pub cone: String,
    /// Intersect with the finiteness halfspace.
    #[arg(long)]
    pub finite: bool,
    /// Compare against the built-in reference ray tables (`--expect paper`);
    /// exits 1 and prints a diff on mismatch.
    #[arg(long, value_name = "WHICH")]
    pub expect: Option<String>,
    /// Attach heuristic classifications to the finite rays.
    #[arg(long)]
    pub classify: bool,
    #[arg(long, value_enum, default_value_t = OutputFormat::Table)]
    pub format: OutputFormat,
    /// Write the artifact here instead of stdout.
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Seed for the classification estimator passes.
    #[arg(long, default_value_t = 7)]
    pub seed: u64,
    /// Write reference-style ray tables for every cone into this directory.
    #[arg(long, value_name = "DIR")]
    pub paper_tables: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
pub struct EvaluateArgs {
    /// Named measure: P, Q, R or sq.
    #[arg(long, conflicts_with = "alpha")]
    pub measure: Option<String>,
    /// Seven comma-separated alpha coefficients (A,B,V,AB,AV,BV,ABV).
    #[arg(long)]
    pub alpha: Option<String>,
    /// Named state spec (see --help of the grammar in the README).
    #[arg(long, conflicts_with = "state_file")]
    pub named: Option<String>,
    /// State-file JSON path.
    #[arg(long)]
    pub state_file: Option<PathBuf>,
    /// Extension dimension d_V (default: d_A * d_B of the state).
    #[arg(long)]
    pub dv: Option<usize>,
    /// Stinespring environment dimension (default: d_V * rank).
    #[arg(long)]
    pub df: Option<usize>,
    #[arg(long, default_value_t = 8)]
    pub restarts: usize,
    #[arg(long, default_value_t = 2000)]
    pub max_iters: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Write the estimate JSON here (printed summary always goes to stdout).
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Write the input state in state-file JSON form (17 significant digits).
    #[arg(long, value_name = "PATH")]
    pub dump_state: Option<PathBuf>,
    /// Also estimate at these extension dimensions and report the trend, as a
    /// convergence-in-d_V diagnostic (comma-separated list).
    #[arg(long, value_name = "DIMS")]
    pub dv_scan: Option<String>,
}

#[derive(Args, Debug, Serialize)]
pub struct VerifyArgs {
    /// Suite: tables, bounds, additivity, monotonicity, domination, duality,
    /// closed-forms, or all.
    #[arg(long)]
    pub suite: String,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Multiplier applied to every suite tolerance.
    #[arg(long, default_value_t = 1.0)]
    pub tolerance_scale: f64,
    /// Write the plain-text report here as well as stdout.
    #[arg(long)]
    pub report: Option<PathBuf>,
    /// Write a machine-readable JSON sidecar here.
    #[arg(long)]
    pub json: Option<PathBuf>,
}

/// Run a parsed command; `Ok(1)` is a verification failure, errors are usage
/// or input problems (exit 2).
pub fn run(cli: Cli) -> anyhow::Result<u8> {
    match cli.command {
        Command::Discover(args) => cmd_discover(args),
        Command::Evaluate(args) => cmd_evaluate(args),
        Command::Verify(args) => cmd_verify(args),
    }
}

fn alpha_columns() -> Vec<String> {
    ALPHA_SLOT_LABELS
        .iter()
        .map(|l| format!("alpha_{l}"))
        .collect()
}

fn cmd_discover(args: DiscoverArgs) -> anyhow::Result<u8> {
    let selector = ConeSelector::parse(&args.cone, args.finite)
        .map_err(|e| anyhow!("bad --cone value: {e}"))?;
    let entropy = entropy_cone();
    let mut result = alpha_cone(selector, entropy).context("cone enumeration failed")?;
    if args.classify {
        let samples = default_classify_samples().context("building classify samples")?;
        let cfg = ClassifyConfig {
            seed: args.seed,
            ..ClassifyConfig::default()
        };
        classify_result(&mut result, &samples, &cfg).context("classification failed")?;
    }

    if let Some(dir) = &args.paper_tables {
        write_reference_style_tables(dir)?;
    }

    let columns = alpha_columns();
    let column_refs: Vec<&str> = columns.iter().map(|s| s.as_str()).collect();
    let classifications: Vec<Option<String>> = result
        .classifications
        .iter()
        .map(|c| c.map(|t| t.to_string()))
        .collect();
    let table = RayTable::from_int_rows(
        &selector.label(),
        &column_refs,
        &result.generators,
        args.classify.then_some(classifications.as_slice()),
    )?;

    let artifact = match args.format {
        OutputFormat::Json => {
            let doc = serde_json::json!({
                "version": version_string(),
                "config": &args,
                "cone": selector.label(),
                "ray_count": result.generators.len(),
                "lineality_dim": result.lineality.len(),
                "table": table,
            });
            serde_json::to_string_pretty(&doc)? + "\n"
        }
        OutputFormat::Csv => {
            let mut out = format!("# version: {}\n", version_string());
            out.push_str(&format!("# config: {}\n", serde_json::to_string(&args)?));
            out.push_str(&table.to_csv());
            out
        }
        OutputFormat::Table => {
            let mut out = format!("# version: {}\n", version_string());
            out.push_str(&format!("# config: {}\n", serde_json::to_string(&args)?));
            out.push_str(&table.to_text());
            out
        }
    };
    match &args.output {
        Some(path) => std::fs::write(path, &artifact)
            .with_context(|| format!("writing {}", path.display()))?,
        None => print!("{artifact}"),
    }

    if let Some(which) = &args.expect {
        if which != "paper" {
            bail!("unknown --expect target `{which}` (only `paper` is built in)");
        }
        let expected: std::collections::BTreeSet<_> =
            tables::expected_generators(selector).into_iter().collect();
        let got = result.generator_set();
        if got == expected {
            println!(
                "expect check: cone {} matches the reference table ({} generators)",
                selector.label(),
                got.len()
            );
        } else {
            println!("expect check: MISMATCH for cone {}", selector.label());
            for extra in got.difference(&expected) {
                println!("  computed but not expected: {extra:?}");
            }
            for missing in expected.difference(&got) {
                println!("  expected but not computed: {missing:?}");
            }
            return Ok(1);
        }
    }
    Ok(0)
}

/// Emit every cone's generator table in a layout mirroring the published
/// reference tables, for eyeball diffing.
fn write_reference_style_tables(dir: &std::path::Path) -> anyhow::Result<()> {
    std::fs::create_dir_all(dir)?;
    let columns = alpha_columns();
    let column_refs: Vec<&str> = columns.iter().map(|s| s.as_str()).collect();
    for (file, finite) in [("table_i.txt", false), ("table_ii.txt", true)] {
        let mut out = format!("# version: {}\n", version_string());
        for code in ["00", "10", "01", "11"] {
            let selector = ConeSelector::parse(code, finite).expect("static selector");
            let result = alpha_cone(selector, entropy_cone())?;
            let table = RayTable::from_int_rows(
                &selector.label(),
                &column_refs,
                &result.generators,
                None,
            )?;
            out.push_str(&table.to_text());
            out.push('\n');
        }
        std::fs::write(dir.join(file), out)?;
    }
    Ok(())
}

fn parse_alpha(args: &EvaluateArgs) -> anyhow::Result<AlphaFloat> {
    if let Some(name) = &args.measure {
        let measure: NamedMeasure = name
            .parse()
            .map_err(|e: String| anyhow!("bad --measure: {e}"))?;
        return Ok(optcorr::named_alpha(measure));
    }
    let Some(text) = &args.alpha else {
        bail!("one of --measure or --alpha is required");
    };
    let parts: Vec<&str> = text.split(',').collect();
    if parts.len() != 7 {
        bail!("--alpha needs 7 comma-separated values, got {}", parts.len());
    }
    let mut coeffs = [0.0; 7];
    for (i, p) in parts.iter().enumerate() {
        coeffs[i] = p
            .trim()
            .parse()
            .with_context(|| format!("bad alpha coefficient `{p}`"))?;
    }
    Ok(AlphaFloat::new(coeffs))
}

fn load_state(args: &EvaluateArgs) -> anyhow::Result<DensityMatrix> {
    if let Some(spec) = &args.named {
        let family = StateFamily::parse(spec).map_err(|e| anyhow!("{e}"))?;
        return optcorr::named_state(&family).map_err(|e| anyhow!("{e}"));
    }
    let Some(path) = &args.state_file else {
        bail!("one of --named or --state-file is required");
    };
    optcorr::io::read_state_file(path)
        .with_context(|| format!("reading state file {}", path.display()))
}

fn cmd_evaluate(args: EvaluateArgs) -> anyhow::Result<u8> {
    let alpha = parse_alpha(&args)?;
    if !optcorr::discovery::finiteness_check_float(&alpha) {
        bail!(
            "infinite-measure alpha: the V-touching coefficients sum to a negative value, \
             so the optimized value diverges to -infinity"
        );
    }
    let rho = load_state(&args)?;
    rho.expect_labels(&["A", "B"])
        .map_err(|e| anyhow!("state must be bipartite on labels A, B: {e}"))?;
    if let Some(path) = &args.dump_state {
        optcorr::io::write_state_file(path, &rho)
            .with_context(|| format!("writing {}", path.display()))?;
    }
    let d_v = args
        .dv
        .unwrap_or_else(|| rho.dim_of("A").unwrap() * rho.dim_of("B").unwrap());
    let cfg = EstimateConfig {
        d_v,
        d_f: args.df,
        restarts: args.restarts,
        max_iters: args.max_iters,
        seed: args.seed,
        extra_starts: Vec::new(),
    };
    let estimate = estimate_measure(&alpha, &rho, &cfg).map_err(|e| anyhow!("{e}"))?;

    println!(
        "value       = {:.6} bits (upper bound at d_V = {d_v})",
        estimate.value
    );
    match estimate.lower_bound {
        Some(lb) => {
            println!("lower bound = {lb:.6} bits");
            println!("gap         = {:.6} bits", estimate.gap.unwrap());
        }
        None => println!("lower bound = (none certified for this alpha)"),
    }
    println!(
        "converged   = {} after {} iterations (best start: {})",
        estimate.diagnostics.converged,
        estimate.diagnostics.iterations,
        estimate.diagnostics.best_start
    );

    let mut scan_results: Vec<(usize, f64)> = Vec::new();
    if let Some(dims) = &args.dv_scan {
        for token in dims.split(',') {
            let k: usize = token
                .trim()
                .parse()
                .with_context(|| format!("bad --dv-scan entry `{token}`"))?;
            let scan_cfg = EstimateConfig {
                d_v: k,
                d_f: None,
                restarts: args.restarts,
                max_iters: args.max_iters,
                seed: args.seed,
                extra_starts: Vec::new(),
            };
            let est = estimate_measure(&alpha, &rho, &scan_cfg).map_err(|e| anyhow!("{e}"))?;
            println!("d_V = {k:>3}: upper bound {:.6} bits", est.value);
            scan_results.push((k, est.value));
        }
    }

    if let Some(path) = &args.output {
        let mut doc = serde_json::json!({
            "version": version_string(),
            "config": &args,
            "estimate": &estimate,
        });
        if !scan_results.is_empty() {
            doc["dv_scan"] = serde_json::json!(scan_results);
        }
        std::fs::write(path, serde_json::to_string_pretty(&doc)? + "\n")
            .with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(0)
}

/// Plain-text report and the exit code implied by the case results.
pub fn render_report(suite: &str, results: &[suites::CaseResult]) -> (String, u8) {
    let mut report = String::new();
    let mut failures = 0usize;
    for case in results {
        report.push_str(&format!(
            "{} {} (measured = {:.6e}, allowed = {:.6e}) {}\n",
            if case.pass { "PASS" } else { "FAIL" },
            case.name,
            case.measured,
            case.allowed,
            case.detail
        ));
        if !case.pass {
            failures += 1;
        }
    }
    report.push_str(&format!(
        "{}: {} cases, {} failures\n",
        suite,
        results.len(),
        failures
    ));
    (report, u8::from(failures > 0))
}

fn cmd_verify(args: VerifyArgs) -> anyhow::Result<u8> {
    let results = suites::run_suite(&args.suite, args.seed, args.tolerance_scale)?;
    let (report, code) = render_report(&args.suite, &results);
    let failures = results.iter().filter(|c| !c.pass).count();
    print!("{report}");
    if let Some(path) = &args.report {
        std::fs::write(path, &report)?;
    }
    if let Some(path) = &args.json {
        let doc = serde_json::json!({
            "version": version_string(),
            "config": &args,
            "cases": results,
            "failures": failures,
        });
        std::fs::write(path, serde_json::to_string_pretty(&doc)? + "\n")?;
    }
    Ok(code)
}
