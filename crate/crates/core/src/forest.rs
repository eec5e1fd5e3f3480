//! Regression CART trees and bagged random forests.
//!
//! Trees are grown unpruned: splitting continues until a node is pure, has
//! fewer than `2 * min_leaf_size` rows, or every sampled candidate feature
//! is constant. Splits maximize the sum-of-squared-errors decrease over
//! `mtry` features sampled per node; ties go to the lowest feature index,
//! then the lowest threshold, and thresholds are midpoints between
//! consecutive distinct sorted values, so fitting is fully deterministic
//! given (data, config).
//!
//! Each tree also keeps its bootstrap multiset and the complementary
//! out-of-bag rows; per-tree risks evaluated on those rows drive the
//! permutation importance estimators.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::parallel::par_map_indexed;
use crate::rng::{channel, derive_rng};

/// Version tag written into persisted forest documents.
pub const FOREST_FORMAT_VERSION: u32 = 1;

/// Forest hyperparameters.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ForestConfig {
    /// Number of bagged trees M.
    pub num_trees: usize,
    /// Features sampled per node; `None` means `max(1, P/3)`.
    pub mtry: Option<usize>,
    /// Minimum rows per leaf; 1 grows trees to purity.
    pub min_leaf_size: usize,
    pub seed: u64,
}

impl Default for ForestConfig {
    fn default() -> Self {
        Self {
            num_trees: 100,
            mtry: None,
            min_leaf_size: 1,
            seed: 0,
        }
    }
}

impl ForestConfig {
    pub fn resolved_mtry(&self, n_cols: usize) -> usize {
        self.mtry.unwrap_or_else(|| (n_cols / 3).max(1))
    }

    fn validate(&self, n_cols: usize) -> Result<()> {
        if self.num_trees == 0 {
            return Err(Error::InvalidConfig("num_trees must be >= 1".into()));
        }
        if self.min_leaf_size == 0 {
            return Err(Error::InvalidConfig("min_leaf_size must be >= 1".into()));
        }
        if let Some(mtry) = self.mtry {
            if mtry == 0 || mtry > n_cols {
                return Err(Error::InvalidConfig(format!(
                    "mtry {mtry} out of range 1..={n_cols}"
                )));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub enum Node {
    Internal {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
    },
    Leaf {
        value: f64,
    },
}

/// One regression tree plus its bootstrap bookkeeping. Root is node 0.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Tree {
    pub nodes: Vec<Node>,
    pub bootstrap_indices: Vec<usize>,
    pub oob_indices: Vec<usize>,
}

/// For out-of-bag risk evaluation: read the masked columns from another row
/// of the dataset instead of the row's own values. `source_rows[i]` is the
/// replacement row for the i-th out-of-bag row of the tree.
#[derive(Debug)]
pub struct PermutedBlock<'a> {
    pub column_mask: &'a [bool],
    pub source_rows: &'a [usize],
}

impl Tree {
    /// Prediction for a feature vector.
    pub fn predict(&self, x: &[f64]) -> f64 {
        let mut at = 0;
        loop {
            match &self.nodes[at] {
                Node::Leaf { value } => return *value,
                Node::Internal {
                    feature,
                    threshold,
                    left,
                    right,
                } => {
                    at = if x[*feature] <= *threshold { *left } else { *right };
                }
            }
        }
    }

    /// Prediction for a dataset row without copying it out.
    pub fn predict_row(&self, data: &Dataset, row: usize) -> f64 {
        let mut at = 0;
        loop {
            match &self.nodes[at] {
                Node::Leaf { value } => return *value,
                Node::Internal {
                    feature,
                    threshold,
                    left,
                    right,
                } => {
                    at = if data.value(row, *feature) <= *threshold {
                        *left
                    } else {
                        *right
                    };
                }
            }
        }
    }

    /// Prediction where masked columns are read from `source_row`.
    pub(crate) fn predict_row_permuted(
        &self,
        data: &Dataset,
        row: usize,
        column_mask: &[bool],
        source_row: usize,
    ) -> f64 {
        let mut at = 0;
        loop {
            match &self.nodes[at] {
                Node::Leaf { value } => return *value,
                Node::Internal {
                    feature,
                    threshold,
                    left,
                    right,
                } => {
                    let from = if column_mask[*feature] { source_row } else { row };
                    at = if data.value(from, *feature) <= *threshold {
                        *left
                    } else {
                        *right
                    };
                }
            }
        }
    }
}

/// Bagged regression forest; prediction is the mean of tree predictions.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Forest {
    pub trees: Vec<Tree>,
    pub config: ForestConfig,
    /// Number of columns the forest was fitted on.
    pub n_cols: usize,
}

impl Forest {
    pub fn predict(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.n_cols {
            return Err(Error::DimensionMismatch {
                expected: self.n_cols,
                actual: x.len(),
            });
        }
        let mut sum = 0.0;
        for tree in &self.trees {
            sum += tree.predict(x);
        }
        Ok(sum / self.trees.len() as f64)
    }

    pub fn predict_row(&self, data: &Dataset, row: usize) -> f64 {
        let mut sum = 0.0;
        for tree in &self.trees {
            sum += tree.predict_row(data, row);
        }
        sum / self.trees.len() as f64
    }

    /// Mean squared error over the given rows.
    pub fn mse(&self, data: &Dataset, rows: &[usize]) -> f64 {
        let y = data.response();
        let mut sum = 0.0;
        for &r in rows {
            let residual = y[r] - self.predict_row(data, r);
            sum += residual * residual;
        }
        sum / rows.len() as f64
    }

    /// Versioned JSON document.
    pub fn to_json(&self) -> Result<String> {
        let doc = VersionedForest {
            format_version: FOREST_FORMAT_VERSION,
            forest: self.clone(),
        };
        Ok(serde_json::to_string(&doc)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: VersionedForest = serde_json::from_str(text)?;
        if doc.format_version != FOREST_FORMAT_VERSION {
            return Err(Error::Parse(format!(
                "unsupported forest format version {}",
                doc.format_version
            )));
        }
        Ok(doc.forest)
    }
}

#[derive(Serialize, Deserialize)]
struct VersionedForest {
    format_version: u32,
    forest: Forest,
}

/// Fit a single CART tree on the given row multiset.
pub fn fit_tree(
    data: &Dataset,
    rows: &[usize],
    mtry: usize,
    min_leaf_size: usize,
    rng: &mut ChaCha8Rng,
) -> Result<Tree> {
    if rows.is_empty() {
        return Err(Error::EmptyTrainingSet);
    }
    if mtry == 0 || mtry > data.n_cols() {
        return Err(Error::InvalidConfig(format!(
            "mtry {mtry} out of range 1..={}",
            data.n_cols()
        )));
    }
    let const_mask = constant_columns(data);
    Ok(fit_tree_inner(
        data,
        rows.to_vec(),
        mtry,
        min_leaf_size,
        rng,
        &const_mask,
    ))
}

/// Fit the whole forest: M independent bootstraps, one seed-derived stream
/// per tree, so the result does not depend on scheduling.
pub fn fit_forest(data: &Dataset, config: &ForestConfig) -> Result<Forest> {
    let n = data.n_rows();
    if n < 2 {
        return Err(Error::TooFewRows(n));
    }
    config.validate(data.n_cols())?;
    let mtry = config.resolved_mtry(data.n_cols());
    let const_mask = constant_columns(data);
    let trees = par_map_indexed(config.num_trees, |m| {
        let mut rng = derive_rng(config.seed, &[channel::BOOTSTRAP, m as u64]);
        let rows: Vec<usize> = (0..n).map(|_| rng.random_range(0..n)).collect();
        fit_tree_inner(data, rows, mtry, config.min_leaf_size, &mut rng, &const_mask)
    });
    Ok(Forest {
        trees,
        config: config.clone(),
        n_cols: data.n_cols(),
    })
}

/// Out-of-bag mean squared error of one tree, optionally with a permuted
/// feature block. Errors if the tree has no out-of-bag rows.
pub fn oob_risk(tree: &Tree, data: &Dataset, permuted: Option<&PermutedBlock>) -> Result<f64> {
    let oob = &tree.oob_indices;
    if oob.is_empty() {
        return Err(Error::NoOobRows);
    }
    let y = data.response();
    let mut sum = 0.0;
    match permuted {
        None => {
            for &r in oob {
                let residual = y[r] - tree.predict_row(data, r);
                sum += residual * residual;
            }
        }
        Some(block) => {
            debug_assert_eq!(block.source_rows.len(), oob.len());
            for (i, &r) in oob.iter().enumerate() {
                let pred =
                    tree.predict_row_permuted(data, r, block.column_mask, block.source_rows[i]);
                let residual = y[r] - pred;
                sum += residual * residual;
            }
        }
    }
    Ok(sum / oob.len() as f64)
}

fn constant_columns(data: &Dataset) -> Vec<bool> {
    (0..data.n_cols())
        .map(|c| {
            let col = data.column(c);
            let first = col[0];
            col.iter().all(|&v| v == first)
        })
        .collect()
}

fn fit_tree_inner(
    data: &Dataset,
    rows: Vec<usize>,
    mtry: usize,
    min_leaf_size: usize,
    rng: &mut ChaCha8Rng,
    const_mask: &[bool],
) -> Tree {
    let n = data.n_rows();
    let mut in_bag = vec![false; n];
    for &r in &rows {
        in_bag[r] = true;
    }
    let oob_indices: Vec<usize> = (0..n).filter(|&r| !in_bag[r]).collect();
    let mut builder = TreeBuilder {
        data,
        mtry,
        min_leaf_size,
        rng,
        const_mask,
        rows: rows.clone(),
        feature_pool: (0..data.n_cols()).collect(),
        swap_log: Vec::with_capacity(mtry),
        gather: Vec::new(),
        nodes: Vec::new(),
    };
    let len = builder.rows.len();
    builder.build(0, len);
    Tree {
        nodes: builder.nodes,
        bootstrap_indices: rows,
        oob_indices,
    }
}

struct TreeBuilder<'a> {
    data: &'a Dataset,
    mtry: usize,
    min_leaf_size: usize,
    rng: &'a mut ChaCha8Rng,
    const_mask: &'a [bool],
    /// Row multiset, partitioned in place as the tree grows.
    rows: Vec<usize>,
    feature_pool: Vec<usize>,
    swap_log: Vec<(usize, usize)>,
    gather: Vec<(f64, f64)>,
    nodes: Vec<Node>,
}

struct BestSplit {
    score: f64,
    feature: usize,
    threshold: f64,
}

impl TreeBuilder<'_> {
    /// Grow the subtree over `rows[lo..hi]`, returning its node index.
    fn build(&mut self, lo: usize, hi: usize) -> usize {
        let m = hi - lo;
        let y = self.data.response();
        let mut sum = 0.0;
        for &r in &self.rows[lo..hi] {
            sum += y[r];
        }
        let mean = sum / m as f64;

        let first_y = y[self.rows[lo]];
        let pure = self.rows[lo..hi].iter().all(|&r| y[r] == first_y);
        if pure || m < 2 * self.min_leaf_size {
            return self.push(Node::Leaf { value: mean });
        }

        let best = self.best_split(lo, hi, sum);
        let Some(best) = best else {
            return self.push(Node::Leaf { value: mean });
        };

        let mid = self.partition(lo, hi, best.feature, best.threshold);
        debug_assert!(mid > lo && mid < hi);
        let node = self.push(Node::Leaf { value: mean }); // placeholder
        let left = self.build(lo, mid);
        let right = self.build(mid, hi);
        self.nodes[node] = Node::Internal {
            feature: best.feature,
            threshold: best.threshold,
            left,
            right,
        };
        node
    }

    fn push(&mut self, node: Node) -> usize {
        self.nodes.push(node);
        self.nodes.len() - 1
    }

    /// Sample mtry features and return the best valid split among them.
    fn best_split(&mut self, lo: usize, hi: usize, sum: f64) -> Option<BestSplit> {
        let p = self.feature_pool.len();
        self.swap_log.clear();
        for i in 0..self.mtry {
            let j = self.rng.random_range(i..p);
            self.feature_pool.swap(i, j);
            self.swap_log.push((i, j));
        }

        let m = hi - lo;
        let y = self.data.response();
        let min_leaf = self.min_leaf_size;
        let mut best: Option<BestSplit> = None;
        for idx in 0..self.mtry {
            let feature = self.feature_pool[idx];
            if self.const_mask[feature] {
                continue;
            }
            let col = self.data.column(feature);
            self.gather.clear();
            self.gather
                .extend(self.rows[lo..hi].iter().map(|&r| (col[r], y[r])));
            self.gather
                .sort_unstable_by(|a, b| a.0.total_cmp(&b.0));
            if self.gather[0].0 == self.gather[m - 1].0 {
                continue; // constant within the node
            }
            let mut left_sum = 0.0;
            for i in 0..m - 1 {
                left_sum += self.gather[i].1;
                let (xa, xb) = (self.gather[i].0, self.gather[i + 1].0);
                if xa == xb {
                    continue;
                }
                let left_count = i + 1;
                let right_count = m - left_count;
                if left_count < min_leaf || right_count < min_leaf {
                    continue;
                }
                let right_sum = sum - left_sum;
                let score = left_sum * left_sum / left_count as f64
                    + right_sum * right_sum / right_count as f64;
                let mut threshold = 0.5 * (xa + xb);
                if threshold >= xb {
                    threshold = xa; // midpoint rounded up to xb; xa keeps the cut exact
                }
                let better = match &best {
                    None => true,
                    Some(b) => {
                        score > b.score
                            || (score == b.score
                                && (feature < b.feature
                                    || (feature == b.feature && threshold < b.threshold)))
                    }
                };
                if better {
                    best = Some(BestSplit {
                        score,
                        feature,
                        threshold,
                    });
                }
            }
        }

        for &(i, j) in self.swap_log.iter().rev() {
            self.feature_pool.swap(i, j);
        }
        best
    }

    /// Two-pointer partition of rows[lo..hi]; left part gets value <= threshold.
    fn partition(&mut self, lo: usize, hi: usize, feature: usize, threshold: f64) -> usize {
        let col = self.data.column(feature);
        let rows = &mut self.rows[lo..hi];
        let mut i = 0;
        let mut j = rows.len();
        while i < j {
            if col[rows[i]] <= threshold {
                i += 1;
            } else {
                j -= 1;
                rows.swap(i, j);
            }
        }
        lo + i
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn dataset(columns: Vec<Vec<f64>>, y: Vec<f64>) -> Dataset {
        let names = (0..columns.len()).map(|i| format!("x{i}")).collect();
        Dataset::new(names, columns, y).unwrap()
    }

    fn tree_rng(seed: u64) -> ChaCha8Rng {
        derive_rng(seed, &[channel::BOOTSTRAP, 0])
    }

    #[test]
    fn constant_response_gives_single_leaf() {
        let data = dataset(vec![vec![1.0, 2.0, 3.0, 4.0]], vec![7.5; 4]);
        let tree = fit_tree(&data, &[0, 1, 2, 3], 1, 1, &mut tree_rng(1)).unwrap();
        assert_eq!(tree.nodes.len(), 1);
        assert_abs_diff_eq!(tree.predict(&[2.5]), 7.5);
    }

    #[test]
    fn single_row_gives_leaf_with_that_response() {
        let data = dataset(vec![vec![1.0, 2.0]], vec![3.0, -1.0]);
        let tree = fit_tree(&data, &[1], 1, 1, &mut tree_rng(2)).unwrap();
        assert_eq!(tree.nodes.len(), 1);
        assert_abs_diff_eq!(tree.predict(&[0.0]), -1.0);
    }

    #[test]
    fn empty_rows_error() {
        let data = dataset(vec![vec![1.0, 2.0]], vec![3.0, -1.0]);
        assert!(matches!(
            fit_tree(&data, &[], 1, 1, &mut tree_rng(3)),
            Err(Error::EmptyTrainingSet)
        ));
    }

    /// Brute force: evaluate every axis split at every midpoint.
    fn exhaustive_best_score(data: &Dataset, rows: &[usize]) -> f64 {
        let y = data.response();
        let total: f64 = rows.iter().map(|&r| y[r]).sum();
        let m = rows.len();
        let mut best = f64::NEG_INFINITY;
        for f in 0..data.n_cols() {
            let mut pairs: Vec<(f64, f64)> =
                rows.iter().map(|&r| (data.value(r, f), y[r])).collect();
            pairs.sort_unstable_by(|a, b| a.0.total_cmp(&b.0));
            let mut left = 0.0;
            for i in 0..m - 1 {
                left += pairs[i].1;
                if pairs[i].0 == pairs[i + 1].0 {
                    continue;
                }
                let score = left * left / (i + 1) as f64
                    + (total - left) * (total - left) / (m - i - 1) as f64;
                if score > best {
                    best = score;
                }
            }
        }
        best
    }

    #[test]
    fn step_function_learned_at_depth_one() {
        let data = dataset(
            vec![vec![-1.0, -1.0, 1.0, 1.0]],
            vec![0.0, 0.0, 1.0, 1.0],
        );
        let rows = [0, 1, 2, 3];
        let tree = fit_tree(&data, &rows, 1, 1, &mut tree_rng(4)).unwrap();
        // depth 1: one internal node, two leaves
        assert_eq!(tree.nodes.len(), 3);
        for (&r, expect) in rows.iter().zip([0.0, 0.0, 1.0, 1.0]) {
            assert_abs_diff_eq!(tree.predict_row(&data, r), expect);
        }
        // the root split attains the exhaustive best score
        let Node::Internal { feature, threshold, .. } = tree.nodes[0] else {
            panic!("expected internal root");
        };
        assert_eq!(feature, 0);
        let y = data.response();
        let (mut ls, mut lc) = (0.0, 0usize);
        for &r in &rows {
            if data.value(r, 0) <= threshold {
                ls += y[r];
                lc += 1;
            }
        }
        let total: f64 = y.iter().sum();
        let score =
            ls * ls / lc as f64 + (total - ls) * (total - ls) / (rows.len() - lc) as f64;
        assert_abs_diff_eq!(score, exhaustive_best_score(&data, &rows), epsilon = 1e-12);
    }

    #[test]
    fn forest_of_one_tree_equals_tree() {
        let data = dataset(
            vec![vec![0.0, 1.0, 2.0, 3.0], vec![3.0, 1.0, 0.0, 2.0]],
            vec![1.0, 2.0, 0.5, 3.0],
        );
        let config = ForestConfig {
            num_trees: 1,
            seed: 9,
            ..ForestConfig::default()
        };
        let forest = fit_forest(&data, &config).unwrap();
        let x = [1.5, 2.0];
        assert_abs_diff_eq!(forest.predict(&x).unwrap(), forest.trees[0].predict(&x));
    }

    #[test]
    fn fit_is_deterministic() {
        let mut rng = crate::rng::derive_rng(11, &[7]);
        let columns: Vec<Vec<f64>> = (0..3)
            .map(|_| (0..40).map(|_| rng.random_range(-1.0..1.0)).collect())
            .collect();
        let y: Vec<f64> = (0..40).map(|_| rng.random_range(-1.0..1.0)).collect();
        let data = dataset(columns, y);
        let config = ForestConfig {
            num_trees: 12,
            seed: 5,
            ..ForestConfig::default()
        };
        let a = fit_forest(&data, &config).unwrap();
        let b = fit_forest(&data, &config).unwrap();
        assert_eq!(a.to_json().unwrap(), b.to_json().unwrap());
        let q = [0.1, -0.3, 0.7];
        assert_eq!(a.predict(&q).unwrap().to_bits(), b.predict(&q).unwrap().to_bits());
    }

    #[test]
    fn constant_response_forest_predicts_constant() {
        let data = dataset(vec![vec![0.0, 1.0, 2.0, 3.0]], vec![4.0; 4]);
        let forest = fit_forest(&data, &ForestConfig::default()).unwrap();
        assert_abs_diff_eq!(forest.predict(&[1.7]).unwrap(), 4.0);
    }

    #[test]
    fn prediction_averages_trees() {
        let leaf = |v: f64| Tree {
            nodes: vec![Node::Leaf { value: v }],
            bootstrap_indices: vec![],
            oob_indices: vec![],
        };
        let forest = Forest {
            trees: vec![leaf(1.0), leaf(2.0)],
            config: ForestConfig::default(),
            n_cols: 1,
        };
        assert_abs_diff_eq!(forest.predict(&[0.0]).unwrap(), 1.5);
        let same = Forest {
            trees: vec![leaf(3.0), leaf(3.0), leaf(3.0)],
            config: ForestConfig::default(),
            n_cols: 1,
        };
        assert_abs_diff_eq!(same.predict(&[0.0]).unwrap(), 3.0);
        assert!(same.predict(&[0.0, 1.0]).is_err());
    }

    #[test]
    fn toy_forest_matches_manual_walk() {
        let data = dataset(
            vec![vec![0.0, 1.0, 2.0, 3.0], vec![1.0, 0.0, 1.0, 0.0]],
            vec![0.0, 1.0, 4.0, 9.0],
        );
        let config = ForestConfig {
            num_trees: 2,
            mtry: Some(2),
            seed: 123,
            ..ForestConfig::default()
        };
        let forest = fit_forest(&data, &config).unwrap();

        // independent walker over the serialized node arrays
        fn walk(nodes: &[Node], x: &[f64]) -> f64 {
            let mut at = 0;
            loop {
                match &nodes[at] {
                    Node::Leaf { value } => return *value,
                    Node::Internal {
                        feature,
                        threshold,
                        left,
                        right,
                    } => at = if x[*feature] <= *threshold { *left } else { *right },
                }
            }
        }
        for x in [[0.5, 0.5], [2.5, 0.0], [3.0, 1.0]] {
            let manual =
                (walk(&forest.trees[0].nodes, &x) + walk(&forest.trees[1].nodes, &x)) / 2.0;
            assert_abs_diff_eq!(forest.predict(&x).unwrap(), manual);
        }
    }

    #[test]
    fn bootstrap_and_oob_partition() {
        let n = 50;
        let data = dataset(vec![(0..n).map(|i| i as f64).collect()], vec![0.5; n]);
        let config = ForestConfig {
            num_trees: 20,
            seed: 3,
            ..ForestConfig::default()
        };
        let forest = fit_forest(&data, &config).unwrap();
        for tree in &forest.trees {
            assert_eq!(tree.bootstrap_indices.len(), n);
            let distinct: std::collections::HashSet<_> =
                tree.bootstrap_indices.iter().copied().collect();
            for oob in &tree.oob_indices {
                assert!(!distinct.contains(oob));
            }
            assert_eq!(distinct.len() + tree.oob_indices.len(), n);
        }
    }

    #[test]
    fn splits_never_increase_sse() {
        let mut rng = crate::rng::derive_rng(17, &[1]);
        let columns: Vec<Vec<f64>> = (0..2)
            .map(|_| (0..60).map(|_| rng.random_range(-1.0..1.0)).collect())
            .collect();
        let y: Vec<f64> = (0..60).map(|_| rng.random_range(-1.0..1.0)).collect();
        let data = dataset(columns, y);
        let rows: Vec<usize> = (0..60).collect();
        let tree = fit_tree(&data, &rows, 2, 1, &mut tree_rng(8)).unwrap();

        // replay the routing to recover each node's row set
        fn sse(data: &Dataset, rows: &[usize]) -> f64 {
            let y = data.response();
            let mean = rows.iter().map(|&r| y[r]).sum::<f64>() / rows.len() as f64;
            rows.iter().map(|&r| (y[r] - mean).powi(2)).sum()
        }
        fn check(tree: &Tree, data: &Dataset, at: usize, rows: Vec<usize>) {
            if let Node::Internal {
                feature,
                threshold,
                left,
                right,
            } = &tree.nodes[at]
            {
                let (l, r): (Vec<usize>, Vec<usize>) = rows
                    .iter()
                    .partition(|&&row| data.value(row, *feature) <= *threshold);
                assert!(!l.is_empty() && !r.is_empty());
                assert!(sse(data, &rows) >= sse(data, &l) + sse(data, &r) - 1e-9);
                check(tree, data, *left, l);
                check(tree, data, *right, r);
            }
        }
        check(&tree, &data, 0, rows);
    }

    #[test]
    fn fully_grown_tree_interpolates_bootstrap() {
        let mut rng = crate::rng::derive_rng(23, &[2]);
        let n = 64;
        // fully distinct feature rows
        let col: Vec<f64> = (0..n).map(|i| i as f64 + 0.1).collect();
        let y: Vec<f64> = (0..n).map(|_| rng.random_range(-2.0..2.0)).collect();
        let data = dataset(vec![col], y);
        let config = ForestConfig {
            num_trees: 5,
            seed: 31,
            ..ForestConfig::default()
        };
        let forest = fit_forest(&data, &config).unwrap();
        for tree in &forest.trees {
            for &r in &tree.bootstrap_indices {
                assert_abs_diff_eq!(
                    tree.predict_row(&data, r),
                    data.response()[r],
                    epsilon = 1e-12
                );
            }
        }
    }

    #[test]
    fn oob_risk_matches_direct_formula() {
        let mut rng = crate::rng::derive_rng(29, &[4]);
        let n = 30;
        let columns: Vec<Vec<f64>> =
            vec![(0..n).map(|_| rng.random_range(-1.0..1.0)).collect()];
        let y: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
        let data = dataset(columns, y);
        let forest = fit_forest(
            &data,
            &ForestConfig {
                num_trees: 3,
                seed: 77,
                ..ForestConfig::default()
            },
        )
        .unwrap();
        let tree = &forest.trees[0];
        let direct: f64 = tree
            .oob_indices
            .iter()
            .map(|&r| {
                let e = data.response()[r] - tree.predict_row(&data, r);
                e * e
            })
            .sum::<f64>()
            / tree.oob_indices.len() as f64;
        assert_abs_diff_eq!(oob_risk(tree, &data, None).unwrap(), direct, epsilon = 1e-12);
    }

    #[test]
    fn oob_risk_of_interpolating_tree_is_zero() {
        // leaf tree predicting exactly the common response
        let data = dataset(vec![vec![0.0, 1.0, 2.0]], vec![5.0, 5.0, 5.0]);
        let tree = Tree {
            nodes: vec![Node::Leaf { value: 5.0 }],
            bootstrap_indices: vec![0],
            oob_indices: vec![1, 2],
        };
        assert_abs_diff_eq!(oob_risk(&tree, &data, None).unwrap(), 0.0);
    }

    #[test]
    fn leaf_zero_tree_on_unit_responses() {
        let data = dataset(vec![vec![0.0, 1.0, 2.0]], vec![0.0, 1.0, -1.0]);
        let tree = Tree {
            nodes: vec![Node::Leaf { value: 0.0 }],
            bootstrap_indices: vec![0],
            oob_indices: vec![1, 2],
        };
        assert_abs_diff_eq!(oob_risk(&tree, &data, None).unwrap(), 1.0);
    }

    #[test]
    fn empty_oob_is_an_error() {
        let data = dataset(vec![vec![0.0, 1.0]], vec![0.0, 1.0]);
        let tree = Tree {
            nodes: vec![Node::Leaf { value: 0.0 }],
            bootstrap_indices: vec![0, 1],
            oob_indices: vec![],
        };
        assert!(matches!(
            oob_risk(&tree, &data, None),
            Err(Error::NoOobRows)
        ));
    }

    #[test]
    fn json_round_trip() {
        let data = dataset(
            vec![vec![0.0, 1.0, 2.0, 3.0], vec![1.0, 0.0, 1.0, 0.0]],
            vec![0.0, 1.0, 4.0, 9.0],
        );
        let forest = fit_forest(
            &data,
            &ForestConfig {
                num_trees: 3,
                seed: 2,
                ..ForestConfig::default()
            },
        )
        .unwrap();
        let json = forest.to_json().unwrap();
        let back = Forest::from_json(&json).unwrap();
        let x = [1.2, 0.4];
        assert_eq!(
            forest.predict(&x).unwrap().to_bits(),
            back.predict(&x).unwrap().to_bits()
        );
        assert!(Forest::from_json(&json.replace("\"format_version\":1", "\"format_version\":9")).is_err());
    }

    #[test]
    fn too_few_rows_rejected() {
        let data = dataset(vec![vec![1.0]], vec![2.0]);
        assert!(matches!(
            fit_forest(&data, &ForestConfig::default()),
            Err(Error::TooFewRows(1))
        ));
    }
}
