//! The single-stage pipeline commands.

use std::io::BufReader;
use std::path::{Path, PathBuf};

use clap::Args;
use serde::Serialize;

use grimp_core::data::Dataset;
use grimp_core::groups::{CoefficientLayout, GroupFamily};
use grimp_core::importance::ImportanceConfig;
use grimp_core::panel::{
    design_from_decompositions, panel_from_decompositions, read_coefficients_csv,
    read_outcome_csv, write_coefficients_csv, write_outcome_csv, CurvePanel,
};
use grimp_core::selection::{
    repeat_selection, write_aggregate_csv, write_error_curve_csv, write_trace_csv, DataSource,
    SelectionConfig,
};
use grimp_core::shrinkage::{simultaneous_shrink, ShrinkageConfig};
use grimp_core::simulation::{
    self, appendix_b, experiment1_sim1, experiment1_sim2, experiment2, experiment3, AppendixCase,
    Link, SimulatedPanel,
};

use crate::runfile::RunContext;
use crate::{AlgorithmArg, CliError, CommonArgs, FilterArg, ForestArgs, SchemeArg};

fn open(path: &Path) -> Result<BufReader<std::fs::File>, CliError> {
    std::fs::File::open(path)
        .map(BufReader::new)
        .map_err(|e| CliError::data(format!("cannot open {}: {e}", path.display())))
}

// ---------------------------------------------------------------------------
// simulate
// ---------------------------------------------------------------------------

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Design name: exp1s1, exp1s2, exp2lin, exp2log, exp3, b1a..b1d, b2a,
    /// b2b, b3.
    #[arg(long)]
    pub design: String,
    /// Sample size (curves or rows).
    #[arg(long, default_value_t = 1000)]
    pub n: usize,
    /// Group size p for the tabular benchmark designs.
    #[arg(long, default_value_t = 8)]
    pub p: usize,
    /// Noisy replicates per correlated variable (exp3).
    #[arg(long, default_value_t = 10)]
    pub replicates: usize,
}

#[derive(Serialize)]
struct TruthFile<'a> {
    design: &'a str,
    relevant: &'a [String],
}

pub fn generate_panel(
    design: &str,
    n: usize,
    replicates: usize,
    seed: u64,
) -> Result<Option<SimulatedPanel>, CliError> {
    let panel = match design {
        "exp1s1" => Some(experiment1_sim1(n, seed)?),
        "exp1s2" => Some(experiment1_sim2(n, seed)?),
        "exp2lin" => Some(experiment2(Link::Linear, n, seed)?),
        "exp2log" => Some(experiment2(Link::Logistic, n, seed)?),
        "exp3" => Some(experiment3(n, replicates, seed)?),
        _ => None,
    };
    Ok(panel)
}

pub fn run_simulate(args: SimulateArgs) -> Result<(), CliError> {
    let mut ctx = RunContext::new("simulate", args.common.seed, args.common.threads, &args.common.out)?;
    ctx.set_config(&serde_json::json!({
        "design": args.design,
        "n": args.n,
        "p": args.p,
        "replicates": args.replicates,
    }))?;

    if let Some(sim) = generate_panel(&args.design, args.n, args.replicates, args.common.seed)? {
        let mut panel_csv = Vec::new();
        sim.panel
            .write_csv(&mut panel_csv)
            .map_err(|e| CliError::data(e.to_string()))?;
        ctx.write_output("panel.csv", &panel_csv)?;
        let mut outcome_csv = Vec::new();
        write_outcome_csv(&sim.response, &mut outcome_csv)
            .map_err(|e| CliError::data(e.to_string()))?;
        ctx.write_output("outcome.csv", &outcome_csv)?;
        let truth = serde_json::to_string_pretty(&TruthFile {
            design: &args.design,
            relevant: &sim.relevant,
        })
        .map_err(|e| CliError::data(e.to_string()))?;
        ctx.write_output("truth.json", truth.as_bytes())?;
    } else {
        let case = AppendixCase::from_name(&args.design)
            .map_err(|_| CliError::usage(format!("unknown design {:?}", args.design)))?;
        let data = appendix_b(case, args.p, args.n, args.common.seed)?;
        let mut design_csv = Vec::new();
        data.write_csv(&mut design_csv)
            .map_err(|e| CliError::data(e.to_string()))?;
        ctx.write_output("design.csv", &design_csv)?;
    }
    ctx.finish()
}

// ---------------------------------------------------------------------------
// dwt / idwt
// ---------------------------------------------------------------------------

#[derive(Debug, Args)]
pub struct DwtArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Long-form panel CSV (curve_id, variable, t_index, value).
    #[arg(long)]
    pub panel: PathBuf,
    #[arg(long, value_enum, default_value_t = FilterArg::Db4)]
    pub filter: FilterArg,
}

pub fn run_dwt(args: DwtArgs) -> Result<(), CliError> {
    let mut ctx = RunContext::new("dwt", args.common.seed, args.common.threads, &args.common.out)?;
    ctx.set_config(&serde_json::json!({
        "panel": args.panel.display().to_string(),
        "filter": args.filter.to_filter().name(),
    }))?;
    ctx.record_input(&args.panel)?;
    let panel = CurvePanel::read_csv(open(&args.panel)?)?;
    let decomps = panel.decompose(args.filter.to_filter())?;
    let mut csv = Vec::new();
    write_coefficients_csv(panel.variables(), &decomps, &mut csv)
        .map_err(|e| CliError::data(e.to_string()))?;
    ctx.write_output("coefficients.csv", &csv)?;
    ctx.finish()
}

#[derive(Debug, Args)]
pub struct IdwtArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Coefficient CSV (curve_id, variable, level, position, value).
    #[arg(long)]
    pub coeffs: PathBuf,
    #[arg(long, value_enum, default_value_t = FilterArg::Db4)]
    pub filter: FilterArg,
}

pub fn run_idwt(args: IdwtArgs) -> Result<(), CliError> {
    let mut ctx = RunContext::new("idwt", args.common.seed, args.common.threads, &args.common.out)?;
    ctx.set_config(&serde_json::json!({
        "coeffs": args.coeffs.display().to_string(),
        "filter": args.filter.to_filter().name(),
    }))?;
    ctx.record_input(&args.coeffs)?;
    let (variables, decomps) = read_coefficients_csv(open(&args.coeffs)?)?;
    let panel = panel_from_decompositions(&variables, &decomps, args.filter.to_filter())?;
    let mut csv = Vec::new();
    panel
        .write_csv(&mut csv)
        .map_err(|e| CliError::data(e.to_string()))?;
    ctx.write_output("panel.csv", &csv)?;
    ctx.finish()
}

// ---------------------------------------------------------------------------
// shrink
// ---------------------------------------------------------------------------

#[derive(Debug, Args)]
pub struct ShrinkArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[arg(long)]
    pub coeffs: PathBuf,
    /// Miss probability budget in (0,1).
    #[arg(long, default_value_t = 0.05)]
    pub q: f64,
    /// Known noise level; estimated per variable by MAD when absent.
    #[arg(long)]
    pub sigma: Option<f64>,
}

#[derive(Serialize)]
struct ShrinkVariableSummary {
    variable: String,
    sigma_hat: f64,
    threshold: f64,
    kept: Vec<(usize, usize)>,
}

#[derive(Serialize)]
struct ShrinkManifest {
    q: f64,
    sigma: Option<f64>,
    n_curves: usize,
    grid: usize,
    variables: Vec<ShrinkVariableSummary>,
}

pub fn run_shrink(args: ShrinkArgs) -> Result<(), CliError> {
    let mut ctx = RunContext::new("shrink", args.common.seed, args.common.threads, &args.common.out)?;
    ctx.set_config(&serde_json::json!({
        "coeffs": args.coeffs.display().to_string(),
        "q": args.q,
        "sigma": args.sigma,
    }))?;
    ctx.record_input(&args.coeffs)?;
    let (variables, decomps) = read_coefficients_csv(open(&args.coeffs)?)?;
    let config = ShrinkageConfig {
        q: args.q,
        sigma: args.sigma,
    };

    let mut summaries = Vec::new();
    let mut kept_labels: Vec<String> = Vec::new();
    let mut kept_columns: Vec<Vec<f64>> = Vec::new();
    let n_curves = decomps[0].len();
    let grid = 1usize << decomps[0][0].levels();
    for (variable, block) in variables.iter().zip(&decomps) {
        let result = simultaneous_shrink(block, &config)?;
        // scaling column always survives
        kept_labels.push(format!("{variable}_zeta"));
        kept_columns.push(block.iter().map(|d| d.scaling).collect());
        for &(j, k) in &result.kept {
            kept_labels.push(format!("{variable}_j{j}_k{k}"));
            kept_columns.push(block.iter().map(|d| d.details[j][k]).collect());
        }
        summaries.push(ShrinkVariableSummary {
            variable: variable.clone(),
            sigma_hat: result.sigma_hat,
            threshold: result.threshold,
            kept: result.kept,
        });
    }

    let mut reduced = Vec::new();
    write_reduced_csv(&kept_labels, &kept_columns, n_curves, &mut reduced)
        .map_err(|e| CliError::data(e.to_string()))?;
    ctx.write_output("reduced.csv", &reduced)?;
    let manifest = serde_json::to_string_pretty(&ShrinkManifest {
        q: args.q,
        sigma: args.sigma,
        n_curves,
        grid,
        variables: summaries,
    })
    .map_err(|e| CliError::data(e.to_string()))?;
    ctx.write_output("shrink_manifest.json", manifest.as_bytes())?;
    ctx.finish()
}

fn write_reduced_csv<W: std::io::Write>(
    labels: &[String],
    columns: &[Vec<f64>],
    n_curves: usize,
    mut w: W,
) -> std::io::Result<()> {
    write!(w, "curve_id")?;
    for label in labels {
        write!(w, ",{label}")?;
    }
    writeln!(w)?;
    for i in 0..n_curves {
        write!(w, "{i}")?;
        for col in columns {
            write!(w, ",{}", grimp_core::data::fmt_f64(col[i]))?;
        }
        writeln!(w)?;
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// select
// ---------------------------------------------------------------------------

#[derive(Debug, Args)]
pub struct SelectArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(flatten)]
    pub forest: ForestArgs,
    /// Coefficient CSV input (with --outcome).
    #[arg(long, conflicts_with = "design")]
    pub coeffs: Option<PathBuf>,
    /// Outcome CSV (curve_id, Y), required with --coeffs.
    #[arg(long, requires = "coeffs")]
    pub outcome: Option<PathBuf>,
    /// Tabular design CSV with final column Y (with --groups).
    #[arg(long)]
    pub design: Option<PathBuf>,
    /// Group family JSON, required with --design.
    #[arg(long, requires = "design")]
    pub groups: Option<PathBuf>,
    /// Grouping scheme for coefficient input.
    #[arg(long, value_enum, default_value_t = SchemeArg::ByVariable)]
    pub scheme: SchemeArg,
    /// Variable for --scheme levels-of.
    #[arg(long)]
    pub scheme_variable: Option<String>,
    #[arg(long, value_enum, default_value_t = AlgorithmArg::Rfe)]
    pub algorithm: AlgorithmArg,
    /// Independent selection runs (fresh train/validation split each).
    #[arg(long, default_value_t = 1)]
    pub runs: usize,
    #[arg(long, default_value_t = 0.9)]
    pub train_frac: f64,
    /// Eliminate by raw instead of rescaled importance.
    #[arg(long, default_value_t = false)]
    pub raw_importance: bool,
    /// Permutations per tree in the importance estimates.
    #[arg(long, default_value_t = 1)]
    pub repeats: usize,
}

#[derive(Serialize)]
struct ChosenFile {
    algorithm: String,
    runs: usize,
    chosen_size_from_mean_curve: usize,
    labels: Vec<String>,
    selection_counts: Vec<usize>,
    per_run: Vec<ChosenRun>,
}

#[derive(Serialize)]
struct ChosenRun {
    run: usize,
    size: usize,
    groups: Vec<String>,
}

pub fn build_family(
    layout: &CoefficientLayout,
    scheme: SchemeArg,
    scheme_variable: Option<&str>,
) -> Result<GroupFamily, CliError> {
    match scheme {
        SchemeArg::ByVariable => Ok(layout.variable_family()?),
        SchemeArg::ByLevel => Ok(layout.level_family()?),
        SchemeArg::LevelsOf => {
            let name = scheme_variable
                .ok_or_else(|| CliError::usage("--scheme levels-of needs --scheme-variable"))?;
            let u = layout
                .variable_index(name)
                .ok_or_else(|| CliError::data(format!("unknown variable {name:?}")))?;
            Ok(layout.level_family_for_variable(u)?)
        }
    }
}

fn load_select_inputs(
    args: &SelectArgs,
    ctx: &mut RunContext,
) -> Result<(Dataset, GroupFamily), CliError> {
    match (&args.coeffs, &args.design) {
        (Some(coeffs), None) => {
            let outcome = args
                .outcome
                .as_ref()
                .ok_or_else(|| CliError::usage("--coeffs needs --outcome"))?;
            ctx.record_input(coeffs)?;
            ctx.record_input(outcome)?;
            let (variables, decomps) = read_coefficients_csv(open(coeffs)?)?;
            let y = read_outcome_csv(open(outcome)?)?;
            let (data, layout) = design_from_decompositions(&variables, &decomps, &y)?;
            let family = build_family(&layout, args.scheme, args.scheme_variable.as_deref())?;
            Ok((data, family))
        }
        (None, Some(design)) => {
            let groups_path = args
                .groups
                .as_ref()
                .ok_or_else(|| CliError::usage("--design needs --groups"))?;
            ctx.record_input(design)?;
            ctx.record_input(groups_path)?;
            let data = Dataset::read_csv(design)?;
            let text = std::fs::read_to_string(groups_path)
                .map_err(|e| CliError::data(format!("cannot read {}: {e}", groups_path.display())))?;
            let family = GroupFamily::from_json(&text)?;
            Ok((data, family))
        }
        _ => Err(CliError::usage(
            "provide exactly one of --coeffs (with --outcome) or --design (with --groups)",
        )),
    }
}

pub fn run_select(args: SelectArgs) -> Result<(), CliError> {
    let mut ctx = RunContext::new("select", args.common.seed, args.common.threads, &args.common.out)?;
    let (data, family) = load_select_inputs(&args, &mut ctx)?;
    let config = SelectionConfig {
        train_fraction: args.train_frac,
        forest: args.forest.to_config(args.common.seed),
        importance_repeats: args.repeats,
        use_rescaled: !args.raw_importance,
        seed: args.common.seed,
    };
    ctx.set_config(&serde_json::json!({
        "scheme": format!("{:?}", args.scheme),
        "algorithm": format!("{:?}", args.algorithm),
        "runs": args.runs,
        "selection": &config,
    }))?;

    let report = repeat_selection(
        DataSource::Fixed(&data),
        &family,
        &config,
        args.runs,
        args.algorithm.to_algorithm(),
    )?;

    // per-run traces, replayed deterministically from the same derived seeds
    let mut trace_csv = Vec::new();
    for run in 0..args.runs {
        let mut run_config = config.clone();
        run_config.seed =
            grimp_core::rng::derive_seed(config.seed, &[grimp_core::rng::channel::RUN, run as u64]);
        let trace = match args.algorithm.to_algorithm() {
            grimp_core::selection::SelectionAlgorithm::Rfe => {
                grimp_core::selection::rfe_select(&data, &family, &run_config)?
            }
            grimp_core::selection::SelectionAlgorithm::Nrfe => {
                grimp_core::selection::nrfe_select(&data, &family, &run_config)?
            }
        };
        write_trace_csv(run, &trace, &mut trace_csv, run == 0)
            .map_err(|e| CliError::data(e.to_string()))?;
    }
    ctx.write_output("trace.csv", &trace_csv)?;

    let mut aggregate = Vec::new();
    write_aggregate_csv(&report, &mut aggregate).map_err(|e| CliError::data(e.to_string()))?;
    ctx.write_output("aggregate.csv", &aggregate)?;
    let mut curve = Vec::new();
    write_error_curve_csv(&report, &mut curve).map_err(|e| CliError::data(e.to_string()))?;
    ctx.write_output("error_curve.csv", &curve)?;

    let chosen = ChosenFile {
        algorithm: format!("{:?}", args.algorithm),
        runs: report.runs,
        chosen_size_from_mean_curve: report.chosen_size_from_mean_curve(),
        labels: report.labels.clone(),
        selection_counts: report.selection_counts.clone(),
        per_run: report
            .chosen_groups
            .iter()
            .enumerate()
            .map(|(run, groups)| ChosenRun {
                run,
                size: groups.len(),
                groups: groups.clone(),
            })
            .collect(),
    };
    let chosen_json =
        serde_json::to_string_pretty(&chosen).map_err(|e| CliError::data(e.to_string()))?;
    ctx.write_output("chosen.json", chosen_json.as_bytes())?;
    ctx.finish()
}

// ---------------------------------------------------------------------------
// timescan
// ---------------------------------------------------------------------------

#[derive(Debug, Args)]
pub struct TimescanArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(flatten)]
    pub forest: ForestArgs,
    #[arg(long)]
    pub panel: PathBuf,
    #[arg(long)]
    pub outcome: PathBuf,
    /// Number of evenly spaced scan times.
    #[arg(long, default_value_t = 50)]
    pub points: usize,
    #[arg(long, value_enum, default_value_t = FilterArg::Db4)]
    pub filter: FilterArg,
    #[arg(long, default_value_t = 1)]
    pub repeats: usize,
}

pub fn run_timescan(args: TimescanArgs) -> Result<(), CliError> {
    let mut ctx =
        RunContext::new("timescan", args.common.seed, args.common.threads, &args.common.out)?;
    ctx.record_input(&args.panel)?;
    ctx.record_input(&args.outcome)?;
    if args.filter != FilterArg::Db4 {
        return Err(CliError::usage(
            "timescan currently analyzes with db4 (the synthesis filter)",
        ));
    }
    let panel = CurvePanel::read_csv(open(&args.panel)?)?;
    let response = read_outcome_csv(open(&args.outcome)?)?;
    if response.len() != panel.n_curves() {
        return Err(CliError::data(format!(
            "outcome has {} rows, panel has {} curves",
            response.len(),
            panel.n_curves()
        )));
    }
    let forest_config = args.forest.to_config(args.common.seed);
    ctx.set_config(&serde_json::json!({
        "points": args.points,
        "forest": &forest_config,
        "repeats": args.repeats,
    }))?;
    let sim = SimulatedPanel {
        panel,
        response,
        relevant: vec![],
    };
    let grid = sim.panel.n_points();
    let scan = simulation::time_importance_scan(
        std::slice::from_ref(&sim),
        &forest_config,
        &ImportanceConfig {
            seed: args.common.seed,
            repeats: args.repeats,
        },
        args.points,
    )?;
    let mut csv = Vec::new();
    simulation::write_timescan_csv(&scan, grid, &mut csv)
        .map_err(|e| CliError::data(e.to_string()))?;
    ctx.write_output("timescan.csv", &csv)?;
    ctx.finish()
}

