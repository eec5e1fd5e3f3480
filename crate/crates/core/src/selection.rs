//! Backward grouped elimination guided by permutation importance.
//!
//! The recursive variant refits the forest and recomputes grouped
//! importances after every elimination; the non-recursive baseline ranks
//! groups once on the full model and only refits to score each model size.
//! Both need the family to be a partition of its columns: time groups
//! overlap and are rejected here.
//!
//! Each run owns a train/validation split; forests and importances see only
//! training rows, the validation split only scores the per-step MSE.

use serde::{Deserialize, Serialize};

use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::forest::{fit_forest, Forest, ForestConfig};
use crate::groups::{Group, GroupFamily};
use crate::importance::{importance_table, ImportanceConfig, ImportanceReport};
use crate::parallel::par_map_indexed;
use crate::rng::{channel, derive_rng, derive_seed};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SelectionAlgorithm {
    Rfe,
    Nrfe,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SelectionConfig {
    /// Fraction of rows used for fitting; the rest scores the step MSE.
    pub train_fraction: f64,
    pub forest: ForestConfig,
    /// Permutations per tree inside the importance estimates.
    pub importance_repeats: usize,
    /// Eliminate by rescaled importance (raw / group size) when true.
    pub use_rescaled: bool,
    pub seed: u64,
}

impl Default for SelectionConfig {
    fn default() -> Self {
        Self {
            train_fraction: 0.9,
            forest: ForestConfig::default(),
            importance_repeats: 1,
            use_rescaled: true,
            seed: 0,
        }
    }
}

impl SelectionConfig {
    fn validate(&self) -> Result<()> {
        if !(self.train_fraction > 0.0 && self.train_fraction < 1.0) {
            return Err(Error::InvalidConfig(format!(
                "train_fraction must be in (0,1), got {}",
                self.train_fraction
            )));
        }
        if self.importance_repeats == 0 {
            return Err(Error::InvalidConfig("importance_repeats must be >= 1".into()));
        }
        Ok(())
    }
}

/// One elimination step, recorded before the elimination itself.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SelectionStep {
    pub active: Vec<String>,
    pub validation_mse: f64,
    pub importances: Vec<ImportanceReport>,
    pub eliminated: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SelectionTrace {
    pub steps: Vec<SelectionStep>,
    /// Step whose active set minimizes validation MSE (ties to fewer groups).
    pub chosen_step: usize,
}

impl SelectionTrace {
    pub fn chosen_groups(&self) -> &[String] {
        &self.steps[self.chosen_step].active
    }

    /// Validation MSE indexed by step; step s has |family| - s active groups.
    pub fn mse_curve(&self) -> Vec<f64> {
        self.steps.iter().map(|s| s.validation_mse).collect()
    }
}

/// Active set at the MSE-minimizing step; ties break toward fewer groups.
pub fn choose_model(trace: &SelectionTrace) -> Vec<String> {
    trace.chosen_groups().to_vec()
}

fn chosen_step_index(steps: &[SelectionStep]) -> usize {
    let mut best = 0;
    for (i, step) in steps.iter().enumerate() {
        if step.validation_mse <= steps[best].validation_mse {
            best = i; // later steps have fewer groups
        }
    }
    best
}

/// Deterministic 90/10-style split of row indices.
fn split_rows(n: usize, train_fraction: f64, seed: u64) -> (Vec<usize>, Vec<usize>) {
    use rand::seq::SliceRandom;
    let mut rng = derive_rng(seed, &[channel::TRAIN_SPLIT]);
    let mut rows: Vec<usize> = (0..n).collect();
    rows.shuffle(&mut rng);
    let n_train = ((train_fraction * n as f64).floor() as usize).clamp(1, n - 1);
    let mut train = rows[..n_train].to_vec();
    let mut validation = rows[n_train..].to_vec();
    train.sort_unstable();
    validation.sort_unstable();
    (train, validation)
}

fn validate_family(data: &Dataset, family: &GroupFamily) -> Result<()> {
    if !family.is_partition() {
        return Err(Error::NotAPartition(
            "groups overlap; time groups cannot be eliminated".into(),
        ));
    }
    for g in family.groups() {
        for &c in g.columns() {
            if c >= data.n_cols() {
                return Err(Error::InvalidGroup(format!(
                    "group {}: column {c} out of range",
                    g.label()
                )));
            }
        }
    }
    Ok(())
}

/// Index of the least important active group, breaking ties toward larger
/// groups, then label order.
fn least_important(reports: &[ImportanceReport], use_rescaled: bool) -> usize {
    let score = |r: &ImportanceReport| if use_rescaled { r.rescaled } else { r.raw };
    let mut worst = 0;
    for i in 1..reports.len() {
        let (a, b) = (score(&reports[i]), score(&reports[worst]));
        let better_victim = a < b
            || (a == b
                && (reports[i].group_size > reports[worst].group_size
                    || (reports[i].group_size == reports[worst].group_size
                        && reports[i].label < reports[worst].label)));
        if better_victim {
            worst = i;
        }
    }
    worst
}

struct StepFit {
    forest: Forest,
    train_view: Dataset,
    validation_mse: f64,
    remapped: GroupFamily,
}

/// Fit a forest on the training rows restricted to the active groups'
/// columns and score it on the validation rows.
fn fit_step(
    data: &Dataset,
    train: &[usize],
    validation: &[usize],
    active: &[Group],
    config: &SelectionConfig,
    step_seed: u64,
) -> Result<StepFit> {
    let mut cols: Vec<usize> = active.iter().flat_map(|g| g.columns().iter().copied()).collect();
    cols.sort_unstable();
    let view = data.select_columns(&cols)?;
    let train_view = view.select_rows(train);
    let validation_view = view.select_rows(validation);

    let mut forest_config = config.forest.clone();
    forest_config.seed = step_seed;
    if let Some(mtry) = forest_config.mtry {
        forest_config.mtry = Some(mtry.min(cols.len()).max(1));
    }
    let forest = fit_forest(&train_view, &forest_config)?;
    let all_validation: Vec<usize> = (0..validation_view.n_rows()).collect();
    let validation_mse = forest.mse(&validation_view, &all_validation);

    let remapped = GroupFamily::new(
        active
            .iter()
            .map(|g| {
                let mapped = g
                    .columns()
                    .iter()
                    .map(|c| cols.binary_search(c).expect("active column"))
                    .collect();
                Group::new(g.label().to_string(), mapped)
            })
            .collect::<Result<Vec<_>>>()?,
    )?;
    Ok(StepFit {
        forest,
        train_view,
        validation_mse,
        remapped,
    })
}

/// Recursive grouped elimination: refit and re-rank after every step.
pub fn rfe_select(
    data: &Dataset,
    family: &GroupFamily,
    config: &SelectionConfig,
) -> Result<SelectionTrace> {
    config.validate()?;
    validate_family(data, family)?;
    let (train, validation) = split_rows(data.n_rows(), config.train_fraction, config.seed);

    let mut active: Vec<Group> = family.groups().to_vec();
    let mut steps = Vec::with_capacity(active.len());
    let mut step = 0u64;
    // One bootstrap stream for every step: common random numbers keep the
    // step-to-step MSE differences about the removed columns.
    let fit_seed = derive_seed(config.seed, &[channel::RUN, 0, 1]);
    while !active.is_empty() {
        let fit = fit_step(data, &train, &validation, &active, config, fit_seed)?;
        let importance_config = ImportanceConfig {
            seed: derive_seed(config.seed, &[channel::RUN, step, 2]),
            repeats: config.importance_repeats,
        };
        let reports = importance_table(&fit.forest, &fit.train_view, &fit.remapped, &importance_config)?;
        let victim = least_important(&reports, config.use_rescaled);
        steps.push(SelectionStep {
            active: active.iter().map(|g| g.label().to_string()).collect(),
            validation_mse: fit.validation_mse,
            importances: reports,
            eliminated: active[victim].label().to_string(),
        });
        active.remove(victim);
        step += 1;
    }
    let chosen_step = chosen_step_index(&steps);
    Ok(SelectionTrace { steps, chosen_step })
}

/// Non-recursive baseline: rank once on the full model, then refit only to
/// score each nested model size. Recorded importances are the initial ones
/// restricted to the still-active groups.
pub fn nrfe_select(
    data: &Dataset,
    family: &GroupFamily,
    config: &SelectionConfig,
) -> Result<SelectionTrace> {
    config.validate()?;
    validate_family(data, family)?;
    let (train, validation) = split_rows(data.n_rows(), config.train_fraction, config.seed);

    let mut active: Vec<Group> = family.groups().to_vec();
    let mut steps = Vec::with_capacity(active.len());
    let mut initial_reports: Vec<ImportanceReport> = Vec::new();
    let fit_seed = derive_seed(config.seed, &[channel::RUN, 0, 1]);
    for step in 0..family.len() as u64 {
        let fit = fit_step(data, &train, &validation, &active, config, fit_seed)?;
        if step == 0 {
            let importance_config = ImportanceConfig {
                seed: derive_seed(config.seed, &[channel::RUN, 0, 2]),
                repeats: config.importance_repeats,
            };
            initial_reports =
                importance_table(&fit.forest, &fit.train_view, &fit.remapped, &importance_config)?;
        }
        let reports: Vec<ImportanceReport> = active
            .iter()
            .map(|g| {
                initial_reports
                    .iter()
                    .find(|r| r.label == g.label())
                    .expect("initial report")
                    .clone()
            })
            .collect();
        let victim = least_important(&reports, config.use_rescaled);
        steps.push(SelectionStep {
            active: active.iter().map(|g| g.label().to_string()).collect(),
            validation_mse: fit.validation_mse,
            importances: reports,
            eliminated: active[victim].label().to_string(),
        });
        active.remove(victim);
    }
    let chosen_step = chosen_step_index(&steps);
    Ok(SelectionTrace { steps, chosen_step })
}

/// Data source for repeated selection: one fixed dataset resplit per run,
/// or freshly generated data per run.
pub enum DataSource<'a> {
    Fixed(&'a Dataset),
    Generator(&'a (dyn Fn(usize) -> Result<Dataset> + Sync)),
}

/// Aggregate over independent selection runs.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AggregateReport {
    pub labels: Vec<String>,
    pub runs: usize,
    pub algorithm: SelectionAlgorithm,
    /// Runs in which each group appears in the chosen model.
    pub selection_counts: Vec<usize>,
    /// Mean validation MSE by step: entry s has |family| - s active groups.
    pub mean_mse_curve: Vec<f64>,
    /// Mean step-1 importances per group.
    pub mean_step1_raw: Vec<f64>,
    pub mean_step1_rescaled: Vec<f64>,
    /// Per-run step-1 importances, indexed [run][group].
    pub step1_raw_by_run: Vec<Vec<f64>>,
    pub step1_rescaled_by_run: Vec<Vec<f64>>,
    pub chosen_sizes: Vec<usize>,
    /// Chosen group labels per run.
    pub chosen_groups: Vec<Vec<String>>,
}

impl AggregateReport {
    pub fn selection_frequency(&self, label: &str) -> f64 {
        match self.labels.iter().position(|l| l == label) {
            Some(i) => self.selection_counts[i] as f64 / self.runs as f64,
            None => 0.0,
        }
    }

    /// Model size minimizing the mean MSE curve (ties to fewer groups).
    pub fn chosen_size_from_mean_curve(&self) -> usize {
        let k = self.mean_mse_curve.len();
        let mut best = 0;
        for (i, mse) in self.mean_mse_curve.iter().enumerate() {
            if *mse <= self.mean_mse_curve[best] {
                best = i;
            }
        }
        k - best
    }
}

/// Run selection `runs` times with independent splits (and fresh data when
/// a generator is supplied) and aggregate frequencies and error curves.
pub fn repeat_selection(
    source: DataSource<'_>,
    family: &GroupFamily,
    config: &SelectionConfig,
    runs: usize,
    algorithm: SelectionAlgorithm,
) -> Result<AggregateReport> {
    if runs == 0 {
        return Err(Error::InvalidConfig("runs must be >= 1".into()));
    }
    config.validate()?;
    let traces: Vec<Result<SelectionTrace>> = par_map_indexed(runs, |run| {
        let mut run_config = config.clone();
        run_config.seed = derive_seed(config.seed, &[channel::RUN, run as u64]);
        let select = |data: &Dataset| match algorithm {
            SelectionAlgorithm::Rfe => rfe_select(data, family, &run_config),
            SelectionAlgorithm::Nrfe => nrfe_select(data, family, &run_config),
        };
        match &source {
            DataSource::Fixed(data) => select(data),
            DataSource::Generator(make) => {
                let data = make(run).map_err(|e| {
                    Error::InvalidData(format!("run {run}: data generation failed: {e}"))
                })?;
                select(&data)
            }
        }
    });
    let traces: Vec<SelectionTrace> = traces.into_iter().collect::<Result<_>>()?;

    let labels: Vec<String> = family.groups().iter().map(|g| g.label().to_string()).collect();
    let k = labels.len();
    let mut selection_counts = vec![0usize; k];
    let mut mean_mse_curve = vec![0.0; k];
    let mut mean_step1_raw = vec![0.0; k];
    let mut mean_step1_rescaled = vec![0.0; k];
    let mut step1_raw_by_run = Vec::with_capacity(runs);
    let mut step1_rescaled_by_run = Vec::with_capacity(runs);
    let mut chosen_sizes = Vec::with_capacity(runs);
    let mut chosen_groups = Vec::with_capacity(runs);
    for trace in &traces {
        let chosen = trace.chosen_groups();
        for (i, label) in labels.iter().enumerate() {
            if chosen.contains(label) {
                selection_counts[i] += 1;
            }
        }
        for (s, step) in trace.steps.iter().enumerate() {
            mean_mse_curve[s] += step.validation_mse / runs as f64;
        }
        let mut raw_row = vec![0.0; k];
        let mut rescaled_row = vec![0.0; k];
        for report in &trace.steps[0].importances {
            let i = labels.iter().position(|l| *l == report.label).expect("label");
            mean_step1_raw[i] += report.raw / runs as f64;
            mean_step1_rescaled[i] += report.rescaled / runs as f64;
            raw_row[i] = report.raw;
            rescaled_row[i] = report.rescaled;
        }
        step1_raw_by_run.push(raw_row);
        step1_rescaled_by_run.push(rescaled_row);
        chosen_sizes.push(chosen.len());
        chosen_groups.push(chosen.to_vec());
    }
    Ok(AggregateReport {
        labels,
        runs,
        algorithm,
        selection_counts,
        mean_mse_curve,
        mean_step1_raw,
        mean_step1_rescaled,
        step1_raw_by_run,
        step1_rescaled_by_run,
        chosen_sizes,
        chosen_groups,
    })
}

/// Trace CSV: one row per step.
pub fn write_trace_csv<W: std::io::Write>(
    run: usize,
    trace: &SelectionTrace,
    mut w: W,
    with_header: bool,
) -> std::io::Result<()> {
    use crate::data::fmt_f64;
    if with_header {
        writeln!(
            w,
            "run,step,active_count,validation_mse,eliminated,eliminated_rescaled_importance,chosen"
        )?;
    }
    for (s, step) in trace.steps.iter().enumerate() {
        let eliminated_score = step
            .importances
            .iter()
            .find(|r| r.label == step.eliminated)
            .map(|r| r.rescaled)
            .unwrap_or(f64::NAN);
        writeln!(
            w,
            "{run},{s},{},{},{},{},{}",
            step.active.len(),
            fmt_f64(step.validation_mse),
            step.eliminated,
            fmt_f64(eliminated_score),
            usize::from(s == trace.chosen_step)
        )?;
    }
    Ok(())
}

/// Aggregate CSV: one row per group.
pub fn write_aggregate_csv<W: std::io::Write>(
    report: &AggregateReport,
    mut w: W,
) -> std::io::Result<()> {
    use crate::data::fmt_f64;
    writeln!(
        w,
        "group,selected_runs,runs,frequency,mean_step1_raw,mean_step1_rescaled"
    )?;
    for (i, label) in report.labels.iter().enumerate() {
        writeln!(
            w,
            "{label},{},{},{},{},{}",
            report.selection_counts[i],
            report.runs,
            fmt_f64(report.selection_counts[i] as f64 / report.runs as f64),
            fmt_f64(report.mean_step1_raw[i]),
            fmt_f64(report.mean_step1_rescaled[i])
        )?;
    }
    Ok(())
}

/// Error-curve CSV: mean validation MSE per model size.
pub fn write_error_curve_csv<W: std::io::Write>(
    report: &AggregateReport,
    mut w: W,
) -> std::io::Result<()> {
    writeln!(w, "active_groups,mean_validation_mse")?;
    let k = report.mean_mse_curve.len();
    for (s, mse) in report.mean_mse_curve.iter().enumerate() {
        writeln!(w, "{},{}", k - s, crate::data::fmt_f64(*mse))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand_distr::{Distribution, Normal};

    /// Y = x1 + x2 + small noise; third column pure noise.
    fn three_group_data(n: usize, seed: u64) -> (Dataset, GroupFamily) {
        let mut rng = derive_rng(seed, &[50]);
        let normal = Normal::new(0.0, 1.0).unwrap();
        let x1: Vec<f64> = (0..n).map(|_| normal.sample(&mut rng)).collect();
        let x2: Vec<f64> = (0..n).map(|_| normal.sample(&mut rng)).collect();
        let noise: Vec<f64> = (0..n).map(|_| normal.sample(&mut rng)).collect();
        let y: Vec<f64> = (0..n)
            .map(|i| x1[i] + x2[i] + 0.2 * normal.sample(&mut rng))
            .collect();
        let data = Dataset::new(
            vec!["x1".into(), "x2".into(), "noise".into()],
            vec![x1, x2, noise],
            y,
        )
        .unwrap();
        let family = GroupFamily::new(vec![
            Group::new("x1".into(), vec![0]).unwrap(),
            Group::new("x2".into(), vec![1]).unwrap(),
            Group::new("noise".into(), vec![2]).unwrap(),
        ])
        .unwrap();
        (data, family)
    }

    fn quick_config(seed: u64) -> SelectionConfig {
        SelectionConfig {
            forest: ForestConfig {
                num_trees: 30,
                min_leaf_size: 2,
                ..ForestConfig::default()
            },
            seed,
            ..SelectionConfig::default()
        }
    }

    #[test]
    fn single_group_family_gives_one_step() {
        let (data, _) = three_group_data(60, 1);
        let family =
            GroupFamily::new(vec![Group::new("all".into(), vec![0, 1, 2]).unwrap()]).unwrap();
        let trace = rfe_select(&data, &family, &quick_config(3)).unwrap();
        assert_eq!(trace.steps.len(), 1);
        assert_eq!(trace.steps[0].eliminated, "all");
        assert_eq!(trace.chosen_groups(), &["all".to_string()]);
    }

    #[test]
    fn overlapping_family_rejected() {
        let (data, _) = three_group_data(40, 2);
        let family = GroupFamily::new(vec![
            Group::new("a".into(), vec![0, 1]).unwrap(),
            Group::new("b".into(), vec![1, 2]).unwrap(),
        ])
        .unwrap();
        assert!(matches!(
            rfe_select(&data, &family, &quick_config(1)),
            Err(Error::NotAPartition(_))
        ));
    }

    #[test]
    fn noise_group_eliminated_first_in_most_runs() {
        let mut first_out_noise = 0;
        for run in 0..20 {
            let (data, family) = three_group_data(250, 100 + run);
            let trace = rfe_select(&data, &family, &quick_config(run)).unwrap();
            if trace.steps[0].eliminated == "noise" {
                first_out_noise += 1;
            }
        }
        assert!(
            first_out_noise >= 18,
            "noise eliminated first in only {first_out_noise}/20 runs"
        );
    }

    #[test]
    fn trace_is_strictly_nested_and_eliminations_attain_minimum() {
        let (data, family) = three_group_data(150, 5);
        let config = quick_config(7);
        let trace = rfe_select(&data, &family, &config).unwrap();
        assert_eq!(trace.steps.len(), 3);
        for (s, step) in trace.steps.iter().enumerate() {
            assert_eq!(step.active.len(), 3 - s);
            // eliminated group attains the minimum rescaled importance
            let eliminated = step
                .importances
                .iter()
                .find(|r| r.label == step.eliminated)
                .unwrap();
            for r in &step.importances {
                assert!(eliminated.rescaled <= r.rescaled);
            }
            if s + 1 < trace.steps.len() {
                // nested chain: next active = active minus eliminated
                let next = &trace.steps[s + 1].active;
                assert!(next.iter().all(|l| step.active.contains(l)));
                assert!(!next.contains(&step.eliminated));
            }
        }
    }

    #[test]
    fn split_is_disjoint_and_deterministic() {
        let (train, val) = split_rows(100, 0.9, 42);
        assert_eq!(train.len(), 90);
        assert_eq!(val.len(), 10);
        for v in &val {
            assert!(!train.contains(v));
        }
        let (train2, val2) = split_rows(100, 0.9, 42);
        assert_eq!(train, train2);
        assert_eq!(val, val2);
        let (train3, _) = split_rows(100, 0.9, 43);
        assert_ne!(train, train3);
    }

    #[test]
    fn rescaled_toggle_keeps_order_for_equal_sizes() {
        let (data, family) = three_group_data(150, 6);
        let mut config = quick_config(9);
        config.use_rescaled = true;
        let a = rfe_select(&data, &family, &config).unwrap();
        config.use_rescaled = false;
        let b = rfe_select(&data, &family, &config).unwrap();
        let order_a: Vec<&String> = a.steps.iter().map(|s| &s.eliminated).collect();
        let order_b: Vec<&String> = b.steps.iter().map(|s| &s.eliminated).collect();
        assert_eq!(order_a, order_b);
    }

    #[test]
    fn choose_model_finds_valley_and_breaks_ties_small() {
        let step = |active: &[&str], mse: f64| SelectionStep {
            active: active.iter().map(|s| s.to_string()).collect(),
            validation_mse: mse,
            importances: vec![],
            eliminated: active.last().unwrap().to_string(),
        };
        let steps = vec![
            step(&["a", "b", "c"], 3.0),
            step(&["a", "b"], 1.0),
            step(&["a"], 2.0),
        ];
        assert_eq!(chosen_step_index(&steps), 1);
        let flat = vec![
            step(&["a", "b", "c"], 1.0),
            step(&["a", "b"], 1.0),
            step(&["a"], 1.0),
        ];
        assert_eq!(chosen_step_index(&flat), 2); // smallest set wins ties
    }

    #[test]
    fn nrfe_single_group_equals_rfe() {
        let (data, _) = three_group_data(80, 7);
        let family =
            GroupFamily::new(vec![Group::new("all".into(), vec![0, 1, 2]).unwrap()]).unwrap();
        let config = quick_config(11);
        let a = rfe_select(&data, &family, &config).unwrap();
        let b = nrfe_select(&data, &family, &config).unwrap();
        assert_eq!(a.steps.len(), b.steps.len());
        assert_eq!(
            a.steps[0].validation_mse.to_bits(),
            b.steps[0].validation_mse.to_bits()
        );
        assert_eq!(a.steps[0].eliminated, b.steps[0].eliminated);
    }

    #[test]
    fn nrfe_keeps_initial_ranking() {
        let (data, family) = three_group_data(150, 8);
        let trace = nrfe_select(&data, &family, &quick_config(13)).unwrap();
        // elimination order must be ascending in the step-1 importances
        let initial = &trace.steps[0].importances;
        let score =
            |label: &str| initial.iter().find(|r| r.label == label).unwrap().rescaled;
        let order: Vec<f64> = trace.steps.iter().map(|s| score(&s.eliminated)).collect();
        for pair in order.windows(2) {
            assert!(pair[0] <= pair[1]);
        }
    }

    #[test]
    fn repeat_selection_aggregates_and_is_deterministic() {
        let (data, family) = three_group_data(120, 9);
        let config = quick_config(17);
        let report = repeat_selection(
            DataSource::Fixed(&data),
            &family,
            &config,
            1,
            SelectionAlgorithm::Rfe,
        )
        .unwrap();
        assert_eq!(report.runs, 1);
        assert!(report.selection_counts.iter().all(|c| *c <= 1));
        assert_eq!(report.mean_mse_curve.len(), family.len());
        let again = repeat_selection(
            DataSource::Fixed(&data),
            &family,
            &config,
            1,
            SelectionAlgorithm::Rfe,
        )
        .unwrap();
        assert_eq!(
            serde_json::to_string(&report).unwrap(),
            serde_json::to_string(&again).unwrap()
        );
    }

    #[test]
    fn generator_source_gets_fresh_data_per_run() {
        let family = GroupFamily::new(vec![
            Group::new("x1".into(), vec![0]).unwrap(),
            Group::new("x2".into(), vec![1]).unwrap(),
            Group::new("noise".into(), vec![2]).unwrap(),
        ])
        .unwrap();
        let make = |run: usize| Ok(three_group_data(100, 1000 + run as u64).0);
        let report = repeat_selection(
            DataSource::Generator(&make),
            &family,
            &quick_config(21),
            4,
            SelectionAlgorithm::Rfe,
        )
        .unwrap();
        assert_eq!(report.chosen_sizes.len(), 4);
        // informative groups should essentially always be kept
        assert!(report.selection_frequency("x1") >= 0.75);
        assert!(report.selection_frequency("x2") >= 0.75);
    }

    #[test]
    fn csv_writers_produce_expected_shapes() {
        let (data, family) = three_group_data(100, 10);
        let config = quick_config(23);
        let trace = rfe_select(&data, &family, &config).unwrap();
        let mut buf = Vec::new();
        write_trace_csv(0, &trace, &mut buf, true).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 1 + family.len());
        let report = repeat_selection(
            DataSource::Fixed(&data),
            &family,
            &config,
            2,
            SelectionAlgorithm::Nrfe,
        )
        .unwrap();
        let mut buf = Vec::new();
        write_aggregate_csv(&report, &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap().lines().count(), 1 + 3);
        let mut buf = Vec::new();
        write_error_curve_csv(&report, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("active_groups,"));
        assert_eq!(text.lines().count(), 1 + 3);
    }
}
