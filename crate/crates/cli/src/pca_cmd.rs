use std::path::PathBuf;

use clap::Args;

use covfdr::io;
use covfdr::pca::{pca_fit, PcaMode};

use crate::config::{resolve, resolve_opt, FileConfig};
use crate::{resolve_out_dir, CliError, CliResult, OutputFormat};

#[derive(Args)]
pub struct PcaArgs {
    /// Input CSV with a header row.
    #[arg(long)]
    input: Option<PathBuf>,

    /// Standardize columns to unit variance before the eigendecomposition.
    #[arg(long)]
    standardize: Option<bool>,

    /// Output directory (or COVFDR_OUT_DIR).
    #[arg(long)]
    out: Option<PathBuf>,

    /// Comma-separated 1-based PC indices for the loadings table (default all).
    #[arg(long)]
    pcs: Option<String>,

    /// Sort the loadings table descending by this PC's loading.
    #[arg(long)]
    sort_by_pc: Option<usize>,

    #[arg(long)]
    p_column: Option<String>,

    #[arg(long)]
    id_column: Option<String>,

    /// csv, json, or both.
    #[arg(long)]
    format: Option<OutputFormat>,
}

pub fn run(args: PcaArgs, cfg: &FileConfig) -> CliResult {
    let input = resolve_opt(args.input, cfg.get_string("input").map(PathBuf::from))
        .ok_or_else(|| CliError::Usage("missing --input file".into()))?;
    let standardize = resolve(
        args.standardize,
        cfg.get_bool("standardize").map_err(CliError::Failure)?,
        true,
    );
    let p_column = args
        .p_column
        .or_else(|| cfg.get_string("p_column"))
        .unwrap_or_else(|| "p".to_string());
    let id_column = args.id_column.or_else(|| cfg.get_string("id_column"));
    let format = resolve(
        args.format,
        cfg.get_parsed("format").map_err(CliError::Failure)?,
        OutputFormat::Both,
    );
    let out = resolve_out_dir(args.out, cfg)?;

    let table = io::load_input(&input, &p_column, id_column.as_deref())?;
    let mode = if standardize {
        PcaMode::Standardized
    } else {
        PcaMode::Covariance
    };
    let model = pca_fit(&table.covariates, mode)?;
    if !model.zero_variance_columns.is_empty() {
        let names: Vec<&str> = model
            .zero_variance_columns
            .iter()
            .map(|&j| table.covariates.names()[j].as_str())
            .collect();
        eprintln!(
            "warning: zero-variance columns left unscaled: {}",
            names.join(", ")
        );
    }

    let pcs: Vec<usize> = match args.pcs.or_else(|| cfg.get_string("pcs")) {
        Some(spec) => spec
            .split(',')
            .map(|s| {
                s.trim()
                    .parse::<usize>()
                    .map_err(|_| CliError::Usage(format!("bad PC index `{s}`")))
            })
            .collect::<Result<_, _>>()?,
        None => (1..=model.n_components()).collect(),
    };
    let sort_by = resolve_opt(
        args.sort_by_pc,
        cfg.get_parsed("sort_by_pc").map_err(CliError::Failure)?,
    );

    io::write_loadings(
        &model,
        table.covariates.names(),
        &pcs,
        sort_by,
        &out,
        format.csv(),
        format.json(),
    )
    .map_err(|e| match e {
        covfdr::Error::Index(msg) => CliError::Usage(msg),
        other => other.into(),
    })?;
    io::write_eigenvalues(&model, &out, format.csv(), format.json())?;
    io::write_scores(&model, &table.ids, &out, format.csv(), format.json())?;

    let total: f64 = model.eigenvalues.iter().sum();
    println!(
        "pca: {} rows x {} covariates ({})",
        table.n_rows(),
        table.covariates.n_cols(),
        if standardize { "standardized" } else { "covariance" }
    );
    for (i, ev) in model.eigenvalues.iter().take(5).enumerate() {
        println!(
            "  PC{} eigenvalue {:.4} ({:.1}% of variance)",
            i + 1,
            ev,
            100.0 * ev / total
        );
    }
    println!("wrote {}", out.display());
    Ok(())
}
