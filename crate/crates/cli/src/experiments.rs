//! End-to-end reference experiments.
//!
//! Each named experiment regenerates its data from the seed, runs the full
//! pipeline, and writes the tables its figures are drawn from. `--scale
//! desk` shrinks sample sizes and repetition counts so a run finishes in
//! minutes on one machine; `--scale paper` uses the original sizes.

use clap::{Args, ValueEnum};
use serde::Serialize;

use grimp_core::data::{fmt_f64, Dataset};
use grimp_core::forest::{fit_forest, ForestConfig};
use grimp_core::groups::Group;
use grimp_core::importance::{
    grouped_importance, individual_importance, ImportanceConfig,
};
use grimp_core::rng::{channel, derive_seed};
use grimp_core::selection::{
    repeat_selection, write_aggregate_csv, write_error_curve_csv, AggregateReport, DataSource,
    SelectionAlgorithm, SelectionConfig,
};
use grimp_core::simulation::{
    appendix_b, experiment1_sim1, experiment1_sim2, experiment2, experiment3, time_importance_scan,
    write_timescan_csv, AppendixCase, Link, SimulatedPanel,
};

use crate::runfile::RunContext;
use crate::{CliError, CommonArgs};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Scale {
    /// Reduced sizes for a single desk machine.
    Desk,
    /// The original sample sizes and repetition counts.
    Paper,
}

#[derive(Debug, Args)]
pub struct ExperimentArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// exp1s1, exp1s2, exp2lin, exp2log, exp3, b1a..b1d, b2a, b2b, b3
    #[arg(long)]
    pub name: String,
    #[arg(long, value_enum, default_value_t = Scale::Desk)]
    pub scale: Scale,
}

struct ExperimentParams {
    n: usize,
    runs: usize,
    replicates: usize,
    trees: usize,
    min_leaf: usize,
}

fn params(scale: Scale) -> ExperimentParams {
    match scale {
        Scale::Desk => ExperimentParams {
            n: 400,
            runs: 20,
            replicates: 5,
            trees: 100,
            min_leaf: 1,
        },
        Scale::Paper => ExperimentParams {
            n: 1000,
            runs: 100,
            replicates: 10,
            trees: 100,
            min_leaf: 1,
        },
    }
}

pub fn run_experiment(args: ExperimentArgs) -> Result<(), CliError> {
    let mut ctx =
        RunContext::new("experiment", args.common.seed, args.common.threads, &args.common.out)?;
    ctx.set_config(&serde_json::json!({
        "name": args.name,
        "scale": format!("{:?}", args.scale),
    }))?;
    let p = params(args.scale);
    let seed = args.common.seed;
    match args.name.as_str() {
        "exp1s1" => run_detection(&mut ctx, seed, &p, true),
        "exp1s2" => run_detection(&mut ctx, seed, &p, false),
        "exp2lin" => run_level_selection(&mut ctx, seed, &p, Link::Linear),
        "exp2log" => run_level_selection(&mut ctx, seed, &p, Link::Logistic),
        "exp3" => run_variable_selection(&mut ctx, seed, &p, args.scale),
        name => match AppendixCase::from_name(name) {
            Ok(case) => run_benchmark(&mut ctx, seed, &p, case, args.scale),
            Err(_) => return Err(CliError::usage(format!("unknown experiment {name:?}"))),
        },
    }?;
    ctx.finish()
}

/// Experiment 1: time-interval detection via the time-importance scan.
fn run_detection(
    ctx: &mut RunContext,
    seed: u64,
    p: &ExperimentParams,
    first_variant: bool,
) -> Result<(), CliError> {
    let replicate_count = if p.runs >= 100 { 100 } else { 10 };
    let panels: Vec<SimulatedPanel> = (0..replicate_count)
        .map(|r| {
            let rep_seed = derive_seed(seed, &[channel::RUN, r as u64]);
            if first_variant {
                experiment1_sim1(p.n, rep_seed)
            } else {
                experiment1_sim2(p.n, rep_seed)
            }
        })
        .collect::<Result<_, _>>()?;
    let grid = panels[0].panel.n_points();
    let forest = ForestConfig {
        num_trees: p.trees,
        mtry: None,
        min_leaf_size: p.min_leaf,
        seed,
    };
    let scan = time_importance_scan(
        &panels,
        &forest,
        &ImportanceConfig { seed, repeats: 1 },
        50,
    )?;
    let mut csv = Vec::new();
    write_timescan_csv(&scan, grid, &mut csv).map_err(|e| CliError::data(e.to_string()))?;
    ctx.write_output("timescan.csv", &csv)?;
    Ok(())
}

fn write_step1_csv(report: &AggregateReport) -> Vec<u8> {
    let mut out = Vec::new();
    use std::io::Write;
    writeln!(out, "run,group,raw,rescaled").unwrap();
    for (run, (raws, rescaleds)) in report
        .step1_raw_by_run
        .iter()
        .zip(&report.step1_rescaled_by_run)
        .enumerate()
    {
        for (i, label) in report.labels.iter().enumerate() {
            writeln!(
                out,
                "{run},{label},{},{}",
                fmt_f64(raws[i]),
                fmt_f64(rescaleds[i])
            )
            .unwrap();
        }
    }
    out
}

#[derive(Serialize)]
struct ChosenSummary {
    algorithm: String,
    runs: usize,
    chosen_size_from_mean_curve: usize,
    labels: Vec<String>,
    selection_counts: Vec<usize>,
    chosen_sizes: Vec<usize>,
}

fn write_selection_outputs(
    ctx: &mut RunContext,
    report: &AggregateReport,
    suffix: &str,
) -> Result<(), CliError> {
    let mut aggregate = Vec::new();
    write_aggregate_csv(report, &mut aggregate).map_err(|e| CliError::data(e.to_string()))?;
    ctx.write_output(&format!("aggregate{suffix}.csv"), &aggregate)?;
    let mut curve = Vec::new();
    write_error_curve_csv(report, &mut curve).map_err(|e| CliError::data(e.to_string()))?;
    ctx.write_output(&format!("error_curve{suffix}.csv"), &curve)?;
    ctx.write_output(&format!("step1_importances{suffix}.csv"), &write_step1_csv(report))?;
    let chosen = ChosenSummary {
        algorithm: format!("{:?}", report.algorithm),
        runs: report.runs,
        chosen_size_from_mean_curve: report.chosen_size_from_mean_curve(),
        labels: report.labels.clone(),
        selection_counts: report.selection_counts.clone(),
        chosen_sizes: report.chosen_sizes.clone(),
    };
    let json = serde_json::to_string_pretty(&chosen).map_err(|e| CliError::data(e.to_string()))?;
    ctx.write_output(&format!("chosen{suffix}.json"), json.as_bytes())?;
    Ok(())
}

/// Experiment 2: selection of wavelet levels for one functional variable.
fn run_level_selection(
    ctx: &mut RunContext,
    seed: u64,
    p: &ExperimentParams,
    link: Link,
) -> Result<(), CliError> {
    let probe = experiment2(link, 2, seed)?;
    let (_, layout) = probe.to_design()?;
    let family = layout.level_family()?;
    let n = p.n;
    let make = move |run: usize| -> grimp_core::Result<Dataset> {
        let sim = experiment2(link, n, derive_seed(seed, &[channel::SIMULATION, run as u64]))?;
        Ok(sim.to_design()?.0)
    };
    let config = SelectionConfig {
        train_fraction: 0.9,
        forest: ForestConfig {
            num_trees: p.trees,
            mtry: None,
            min_leaf_size: p.min_leaf,
            seed,
        },
        importance_repeats: 1,
        use_rescaled: true,
        seed,
    };
    let report = repeat_selection(
        DataSource::Generator(&make),
        &family,
        &config,
        p.runs,
        SelectionAlgorithm::Rfe,
    )?;
    write_selection_outputs(ctx, &report, "")
}

/// Experiment 3: selection of functional variables under strong correlation,
/// RFE against the non-recursive baseline.
fn run_variable_selection(
    ctx: &mut RunContext,
    seed: u64,
    p: &ExperimentParams,
    scale: Scale,
) -> Result<(), CliError> {
    let runs = if scale == Scale::Desk { 10 } else { 100 };
    let replicates = p.replicates;
    let probe = experiment3(2, replicates, seed)?;
    let (_, layout) = probe.to_design()?;
    let family = layout.variable_family()?;
    let n = p.n;
    let make = move |run: usize| -> grimp_core::Result<Dataset> {
        let sim = experiment3(n, replicates, derive_seed(seed, &[channel::SIMULATION, run as u64]))?;
        Ok(sim.to_design()?.0)
    };
    let config = SelectionConfig {
        train_fraction: 0.9,
        forest: ForestConfig {
            num_trees: p.trees,
            mtry: None,
            min_leaf_size: p.min_leaf,
            seed,
        },
        importance_repeats: 1,
        use_rescaled: true,
        seed,
    };
    let rfe = repeat_selection(
        DataSource::Generator(&make),
        &family,
        &config,
        runs,
        SelectionAlgorithm::Rfe,
    )?;
    write_selection_outputs(ctx, &rfe, "_rfe")?;
    let nrfe = repeat_selection(
        DataSource::Generator(&make),
        &family,
        &config,
        runs,
        SelectionAlgorithm::Nrfe,
    )?;
    write_selection_outputs(ctx, &nrfe, "_nrfe")?;
    Ok(())
}

/// Tabular benchmarks: grouped importance of the informative block against
/// the sum of its individual importances, over a sweep of group sizes.
fn run_benchmark(
    ctx: &mut RunContext,
    seed: u64,
    p: &ExperimentParams,
    case: AppendixCase,
    scale: Scale,
) -> Result<(), CliError> {
    let (sizes, replicates): (&[usize], usize) = match scale {
        Scale::Desk => (&[2, 4, 8], 20),
        Scale::Paper => (&[1, 2, 4, 8, 16], 500),
    };
    let mut out = Vec::new();
    use std::io::Write;
    writeln!(out, "case,p,replicate,grouped,grouped_rescaled,sum_individual")
        .map_err(|e| CliError::data(e.to_string()))?;
    for &group_size in sizes {
        for rep in 0..replicates {
            let rep_seed = derive_seed(seed, &[channel::RUN, group_size as u64, rep as u64]);
            let data = appendix_b(case, group_size, 1000, rep_seed)?;
            let forest = fit_forest(
                &data,
                &ForestConfig {
                    num_trees: p.trees,
                    mtry: None,
                    min_leaf_size: p.min_leaf,
                    seed: rep_seed,
                },
            )?;
            let importance_config = ImportanceConfig {
                seed: rep_seed,
                repeats: 1,
            };
            let w_group = Group::new("W".into(), (0..group_size).collect())?;
            let grouped = grouped_importance(&forest, &data, &w_group, &importance_config)?;
            let mut sum_individual = 0.0;
            for j in 0..group_size {
                sum_individual +=
                    individual_importance(&forest, &data, j, &importance_config)?.raw;
            }
            writeln!(
                out,
                "{},{group_size},{rep},{},{},{}",
                case.name(),
                fmt_f64(grouped.raw),
                fmt_f64(grouped.rescaled),
                fmt_f64(sum_individual)
            )
            .map_err(|e| CliError::data(e.to_string()))?;
        }
    }
    ctx.write_output("importance_comparison.csv", &out)?;
    Ok(())
}
