use std::path::PathBuf;

use clap::Args;

use covfdr::io;
use covfdr::numerics::derive_seed;
use covfdr::pipeline::{monte_carlo, MethodSpec, MonteCarloConfig, Scenario};
use covfdr::procedures::{BocaLeekConfig, IhwConfig};
use covfdr::simgen::{scenario1, scenario2};

use crate::config::{resolve, FileConfig};
use crate::{resolve_out_dir, CliError, CliResult, OutputFormat};

#[derive(Args)]
pub struct SimulateArgs {
    /// Scenario: 1 (covariate-dependent null proportion) or 2 (size investing).
    #[arg(long)]
    scenario: Option<u8>,

    /// Number of hypotheses per replicate.
    #[arg(long)]
    m: Option<usize>,

    /// Number of covariates.
    #[arg(long)]
    d: Option<usize>,

    /// Monte Carlo replicates.
    #[arg(long)]
    reps: Option<usize>,

    /// Master seed; replicate seeds derive from it.
    #[arg(long)]
    seed: Option<u64>,

    /// Nominal FDR level.
    #[arg(long)]
    alpha: Option<f64>,

    /// Alternative proportion for scenario 2.
    #[arg(long)]
    pi1: Option<f64>,

    /// Comma-separated methods: bonferroni,bh,storey,ihw,bl,bl_all.
    #[arg(long)]
    methods: Option<String>,

    /// Output directory (or COVFDR_OUT_DIR).
    #[arg(long)]
    out: Option<PathBuf>,

    /// Write per-replicate metric dumps alongside the report.
    #[arg(long)]
    dump_replicates: bool,

    /// Export the first N replicate datasets as CSV.
    #[arg(long)]
    export_data: Option<usize>,

    #[arg(long)]
    ihw_groups: Option<usize>,

    #[arg(long)]
    ihw_step: Option<f64>,

    #[arg(long)]
    ihw_max_weight: Option<f64>,

    #[arg(long)]
    bl_degree: Option<usize>,

    /// csv, json, or both.
    #[arg(long)]
    format: Option<OutputFormat>,
}

pub fn parse_methods(spec: &str) -> Result<Vec<MethodSpec>, CliError> {
    let mut methods = Vec::new();
    for token in spec.split(',').map(str::trim).filter(|t| !t.is_empty()) {
        let m = match token {
            "bonferroni" | "bonf" => MethodSpec::Bonferroni,
            "bh" => MethodSpec::Bh,
            "storey" => MethodSpec::Storey,
            "ihw" => MethodSpec::IhwPcSweep,
            "bl" | "boca_leek" => MethodSpec::BocaLeekPcSweep,
            "bl_all" => MethodSpec::BocaLeekAllColumns,
            other => return Err(CliError::Usage(format!("unknown method `{other}`"))),
        };
        if !methods.contains(&m) {
            methods.push(m);
        }
    }
    if methods.is_empty() {
        return Err(CliError::Usage("empty method list".into()));
    }
    Ok(methods)
}

pub fn run(args: SimulateArgs, cfg: &FileConfig) -> CliResult {
    let scenario_no = resolve(
        args.scenario,
        cfg.get_parsed("scenario").map_err(CliError::Failure)?,
        1,
    );
    let pi1 = resolve(args.pi1, cfg.get_parsed("pi1").map_err(CliError::Failure)?, 0.1);
    let scenario = match scenario_no {
        1 => Scenario::One,
        2 => Scenario::Two { pi1 },
        other => return Err(CliError::Usage(format!("unknown scenario `{other}`"))),
    };
    let m = resolve(args.m, cfg.get_parsed("m").map_err(CliError::Failure)?, 20_000);
    let d = resolve(args.d, cfg.get_parsed("d").map_err(CliError::Failure)?, 30);
    let reps = resolve(args.reps, cfg.get_parsed("reps").map_err(CliError::Failure)?, 100);
    let seed = resolve(args.seed, cfg.get_parsed("seed").map_err(CliError::Failure)?, 0);
    let alpha = resolve(args.alpha, cfg.get_parsed("alpha").map_err(CliError::Failure)?, 0.05);
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(CliError::Usage(format!(
            "alpha must lie in (0, 1), got {alpha}"
        )));
    }
    if !(0.0..1.0).contains(&pi1) {
        return Err(CliError::Usage(format!(
            "pi1 must lie in [0, 1), got {pi1}"
        )));
    }
    let methods_spec = args
        .methods
        .or_else(|| cfg.get_string("methods"))
        .unwrap_or_else(|| "bonferroni,bh,storey,ihw,bl".to_string());
    let format = resolve(
        args.format,
        cfg.get_parsed("format").map_err(CliError::Failure)?,
        OutputFormat::Both,
    );
    let out = resolve_out_dir(args.out, cfg)?;

    let mut mc = MonteCarloConfig::new(scenario, m, reps, alpha, seed);
    mc.d = d;
    mc.methods = parse_methods(&methods_spec)?;
    mc.ihw = IhwConfig {
        n_groups: resolve(
            args.ihw_groups,
            cfg.get_parsed("ihw.groups").map_err(CliError::Failure)?,
            mc.ihw.n_groups,
        ),
        weight_grid_step: resolve(
            args.ihw_step,
            cfg.get_parsed("ihw.step").map_err(CliError::Failure)?,
            mc.ihw.weight_grid_step,
        ),
        max_weight: resolve(
            args.ihw_max_weight,
            cfg.get_parsed("ihw.max_weight").map_err(CliError::Failure)?,
            mc.ihw.max_weight,
        ),
        alpha,
    };
    mc.boca_leek = BocaLeekConfig {
        smoothing_degree: resolve(
            args.bl_degree,
            cfg.get_parsed("boca_leek.degree").map_err(CliError::Failure)?,
            mc.boca_leek.smoothing_degree,
        ),
        alpha,
        ..mc.boca_leek
    };

    let report = monte_carlo(&mc)?;
    io::write_eval_report(&report, &out, format.csv(), format.json())?;
    let dump = args.dump_replicates
        || cfg
            .get_bool("dump_replicates")
            .map_err(CliError::Failure)?
            .unwrap_or(false);
    if dump {
        io::write_replicate_dump(&report, &out, format.csv(), format.json())?;
    }
    if let Some(n) = args.export_data {
        for rep in 0..n.min(reps) {
            let rep_seed = derive_seed(seed, rep as u64);
            let ds = match scenario {
                Scenario::One => scenario1(m, d, rep_seed)?,
                Scenario::Two { pi1 } => scenario2(m, d, pi1, rep_seed)?,
            };
            io::write_sim_dataset(&ds, &out.join(format!("dataset_{rep}.csv")))?;
        }
    }

    println!(
        "{} | m = {m}, d = {d}, reps = {reps}, alpha = {alpha}, seed = {seed}",
        report.scenario
    );
    println!("mean alternatives: {:.2}", report.mean_alternatives);
    for row in &report.rows {
        if row.axis == "-" || row.axis == "selected" || row.axis == "all_columns" {
            println!(
                "  {:<12} {:<10} tpr = {:.4} +- {:.4}  fdr = {:.4} +- {:.4}",
                row.method, row.axis, row.tpr_mean, row.tpr_se, row.fdr_mean, row.fdr_se
            );
        }
    }
    println!("wrote {}", out.display());
    Ok(())
}
