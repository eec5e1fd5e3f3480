//! Groups of design-matrix columns over wavelet coefficients.
//!
//! The design matrix stacks, per functional variable, the scaling
//! coefficient followed by all detail coefficients in flat layout. Groups
//! are index sets over those columns: per variable, per frequency level,
//! per level within one variable, and "active at a time point / on an
//! interval" via the support geometry of the basis.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::wavelets::{flat_index, SupportTable};

/// A named, sorted, duplicate-free set of column indices.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Group {
    label: String,
    columns: Vec<usize>,
}

impl Group {
    pub fn new(label: String, mut columns: Vec<usize>) -> Result<Self> {
        if columns.is_empty() {
            return Err(Error::InvalidGroup(format!("group {label}: empty")));
        }
        columns.sort_unstable();
        for pair in columns.windows(2) {
            if pair[0] == pair[1] {
                return Err(Error::InvalidGroup(format!(
                    "group {label}: duplicate column {}",
                    pair[0]
                )));
            }
        }
        Ok(Self { label, columns })
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn columns(&self) -> &[usize] {
        &self.columns
    }

    pub fn len(&self) -> usize {
        self.columns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.columns.is_empty()
    }

    pub fn contains(&self, column: usize) -> bool {
        self.columns.binary_search(&column).is_ok()
    }
}

/// An ordered list of groups, optionally a partition of its universe.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GroupFamily {
    groups: Vec<Group>,
    partition: bool,
}

impl GroupFamily {
    /// Family with the partition flag set from the actual disjointness.
    pub fn new(groups: Vec<Group>) -> Result<Self> {
        if groups.is_empty() {
            return Err(Error::InvalidGroup("empty group family".into()));
        }
        let mut labels = std::collections::HashSet::new();
        for g in &groups {
            if !labels.insert(g.label.as_str()) {
                return Err(Error::InvalidGroup(format!(
                    "duplicate group label {}",
                    g.label
                )));
            }
        }
        let partition = Self::disjoint(&groups);
        Ok(Self { groups, partition })
    }

    fn disjoint(groups: &[Group]) -> bool {
        let mut seen = std::collections::HashSet::new();
        for g in groups {
            for &c in &g.columns {
                if !seen.insert(c) {
                    return false;
                }
            }
        }
        true
    }

    pub fn groups(&self) -> &[Group] {
        &self.groups
    }

    pub fn len(&self) -> usize {
        self.groups.len()
    }

    pub fn is_empty(&self) -> bool {
        self.groups.is_empty()
    }

    /// True when the groups are pairwise disjoint.
    pub fn is_partition(&self) -> bool {
        self.partition
    }

    /// Sorted union of all member columns.
    pub fn universe(&self) -> Vec<usize> {
        let mut all: Vec<usize> = self
            .groups
            .iter()
            .flat_map(|g| g.columns.iter().copied())
            .collect();
        all.sort_unstable();
        all.dedup();
        all
    }

    pub fn get(&self, label: &str) -> Option<&Group> {
        self.groups.iter().find(|g| g.label == label)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let family: GroupFamily = serde_json::from_str(text)?;
        // re-validate: files may have been edited by hand
        let rebuilt = GroupFamily::new(
            family
                .groups
                .into_iter()
                .map(|g| Group::new(g.label, g.columns))
                .collect::<Result<Vec<_>>>()?,
        )?;
        Ok(rebuilt)
    }
}

/// Mapping between (variable, level, position) and design-matrix columns.
///
/// Columns are variable-major; within a variable the scaling coefficient
/// comes first, then details in flat layout, `p * N` columns in total.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CoefficientLayout {
    variables: Vec<String>,
    levels: usize,
}

impl CoefficientLayout {
    pub fn new(variables: Vec<String>, levels: usize) -> Result<Self> {
        if variables.is_empty() {
            return Err(Error::LayoutMismatch("no variables".into()));
        }
        let mut seen = std::collections::HashSet::new();
        for v in &variables {
            if v.is_empty() || v.contains(',') {
                return Err(Error::LayoutMismatch(format!("bad variable name {v:?}")));
            }
            if !seen.insert(v.as_str()) {
                return Err(Error::LayoutMismatch(format!("duplicate variable {v}")));
            }
        }
        if levels == 0 {
            return Err(Error::LayoutMismatch("need at least one level".into()));
        }
        Ok(Self { variables, levels })
    }

    pub fn variables(&self) -> &[String] {
        &self.variables
    }

    pub fn n_variables(&self) -> usize {
        self.variables.len()
    }

    pub fn levels(&self) -> usize {
        self.levels
    }

    /// Coefficients per variable, N = 2^J.
    pub fn coeffs_per_variable(&self) -> usize {
        1 << self.levels
    }

    pub fn n_columns(&self) -> usize {
        self.n_variables() * self.coeffs_per_variable()
    }

    pub fn variable_index(&self, name: &str) -> Option<usize> {
        self.variables.iter().position(|v| v == name)
    }

    pub fn scaling_column(&self, variable: usize) -> Result<usize> {
        self.check_variable(variable)?;
        Ok(variable * self.coeffs_per_variable())
    }

    pub fn detail_column(&self, variable: usize, level: usize, pos: usize) -> Result<usize> {
        self.check_variable(variable)?;
        if level >= self.levels || pos >= (1 << level) {
            return Err(Error::LayoutMismatch(format!(
                "detail ({level},{pos}) out of range for {} levels",
                self.levels
            )));
        }
        Ok(variable * self.coeffs_per_variable() + flat_index(level, pos))
    }

    /// Column labels in layout order, usable as dataset column names.
    pub fn column_labels(&self) -> Vec<String> {
        let mut labels = Vec::with_capacity(self.n_columns());
        for v in &self.variables {
            labels.push(format!("{v}_zeta"));
            for j in 0..self.levels {
                for k in 0..(1usize << j) {
                    labels.push(format!("{v}_j{j}_k{k}"));
                }
            }
        }
        labels
    }

    fn check_variable(&self, variable: usize) -> Result<()> {
        if variable >= self.n_variables() {
            return Err(Error::LayoutMismatch(format!(
                "variable index {variable} out of range (p = {})",
                self.n_variables()
            )));
        }
        Ok(())
    }

    /// G(u): every coefficient of one variable.
    pub fn by_variable(&self, variable: usize) -> Result<Group> {
        self.check_variable(variable)?;
        let n = self.coeffs_per_variable();
        let start = variable * n;
        Group::new(
            self.variables[variable].clone(),
            (start..start + n).collect(),
        )
    }

    /// G(j, u): detail coefficients of one variable at one level.
    pub fn by_level_and_variable(&self, level: usize, variable: usize) -> Result<Group> {
        let columns: Vec<usize> = (0..(1usize << level))
            .map(|k| self.detail_column(variable, level, k))
            .collect::<Result<_>>()?;
        Group::new(
            format!("{}_level{level}", self.variables[variable]),
            columns,
        )
    }

    /// Scaling coefficient of one variable as its own group.
    pub fn scaling_by_variable(&self, variable: usize) -> Result<Group> {
        Ok(Group::new(
            format!("{}_zeta", self.variables[variable.min(self.n_variables() - 1)]),
            vec![self.scaling_column(variable)?],
        )?)
    }

    /// G(j): level-j details of every variable.
    pub fn by_level(&self, level: usize) -> Result<Group> {
        let mut columns = Vec::new();
        for u in 0..self.n_variables() {
            for k in 0..(1usize << level) {
                columns.push(self.detail_column(u, level, k)?);
            }
        }
        Group::new(format!("level{level}"), columns)
    }

    /// All scaling coefficients as one group.
    pub fn scaling_group(&self) -> Result<Group> {
        let columns: Vec<usize> = (0..self.n_variables())
            .map(|u| self.scaling_column(u))
            .collect::<Result<_>>()?;
        Group::new("zeta".into(), columns)
    }

    /// G(t): all scaling coefficients plus, for every variable, the detail
    /// coefficients whose wavelet is non-null at grid time `t`.
    pub fn at_time(&self, t: usize, support: &SupportTable) -> Result<Group> {
        self.check_support(support)?;
        let active = support.wavelet_support(t)?;
        let mut columns = Vec::new();
        for u in 0..self.n_variables() {
            columns.push(self.scaling_column(u)?);
            for &(j, k) in active {
                columns.push(self.detail_column(u, j, k)?);
            }
        }
        Group::new(format!("t{t}"), columns)
    }

    /// G([a,b]): union of G(t) over grid indices a..=b.
    pub fn on_interval(&self, a: usize, b: usize, support: &SupportTable) -> Result<Group> {
        self.check_support(support)?;
        if a > b {
            return Err(Error::InvalidConfig(format!(
                "interval start {a} after end {b}"
            )));
        }
        let mut columns = Vec::new();
        for t in a..=b {
            columns.extend_from_slice(self.at_time(t, support)?.columns());
        }
        columns.sort_unstable();
        columns.dedup();
        Group::new(format!("t{a}..{b}"), columns)
    }

    fn check_support(&self, support: &SupportTable) -> Result<()> {
        if support.len() != self.coeffs_per_variable() || support.levels() != self.levels {
            return Err(Error::LayoutMismatch(format!(
                "support table for N = {} does not match layout N = {}",
                support.len(),
                self.coeffs_per_variable()
            )));
        }
        Ok(())
    }

    /// Family {G(u)}_u — partitions all columns.
    pub fn variable_family(&self) -> Result<GroupFamily> {
        GroupFamily::new(
            (0..self.n_variables())
                .map(|u| self.by_variable(u))
                .collect::<Result<Vec<_>>>()?,
        )
    }

    /// Family {zeta, G(0), ..., G(J-1)} — partitions all columns.
    pub fn level_family(&self) -> Result<GroupFamily> {
        let mut groups = vec![self.scaling_group()?];
        for j in 0..self.levels {
            groups.push(self.by_level(j)?);
        }
        GroupFamily::new(groups)
    }

    /// Family {zeta^u, G(0,u), ..., G(J-1,u)} for one variable — partitions
    /// that variable's columns.
    pub fn level_family_for_variable(&self, variable: usize) -> Result<GroupFamily> {
        let mut groups = vec![self.scaling_by_variable(variable)?];
        for j in 0..self.levels {
            groups.push(self.by_level_and_variable(j, variable)?);
        }
        GroupFamily::new(groups)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::wavelets::WaveletFilter;

    fn layout(p: usize, levels: usize) -> CoefficientLayout {
        let names = (1..=p).map(|u| format!("x{u}")).collect();
        CoefficientLayout::new(names, levels).unwrap()
    }

    #[test]
    fn group_sorts_and_rejects_duplicates() {
        let g = Group::new("g".into(), vec![5, 2, 9]).unwrap();
        assert_eq!(g.columns(), &[2, 5, 9]);
        assert!(Group::new("g".into(), vec![1, 1]).is_err());
        assert!(Group::new("g".into(), vec![]).is_err());
    }

    #[test]
    fn by_variable_covers_whole_block() {
        let l = layout(1, 8); // N = 256
        let g = l.by_variable(0).unwrap();
        assert_eq!(g.len(), 256);
        assert_eq!(g.columns()[0], 0);
        let l3 = layout(3, 4);
        let g2 = l3.by_variable(1).unwrap();
        assert_eq!(g2.len(), 16);
        assert_eq!(g2.columns()[0], 16);
        assert!(l3.by_variable(3).is_err());
    }

    #[test]
    fn variable_family_partitions_columns() {
        let l = layout(3, 4);
        let family = l.variable_family().unwrap();
        assert!(family.is_partition());
        assert_eq!(family.universe(), (0..l.n_columns()).collect::<Vec<_>>());
    }

    #[test]
    fn level_group_sizes() {
        let l = layout(1, 5);
        assert_eq!(l.by_level_and_variable(0, 0).unwrap().len(), 1);
        assert_eq!(l.by_level_and_variable(3, 0).unwrap().len(), 8);
        assert!(l.by_level_and_variable(5, 0).is_err());
        let l3 = layout(3, 5);
        assert_eq!(l3.by_level(2).unwrap().len(), 12);
        assert_eq!(l3.by_level(2).unwrap().len(), 3 * (1 << 2));
    }

    #[test]
    fn levels_plus_scaling_partition_variable_block() {
        let l = layout(1, 5);
        let family = l.level_family_for_variable(0).unwrap();
        assert!(family.is_partition());
        assert_eq!(
            family.universe(),
            l.by_variable(0).unwrap().columns().to_vec()
        );
        // p = 1: G(j) equals G(j, 0)
        assert_eq!(
            l.by_level(3).unwrap().columns(),
            l.by_level_and_variable(3, 0).unwrap().columns()
        );
    }

    #[test]
    fn level_family_partitions_everything() {
        let l = layout(2, 4);
        let family = l.level_family().unwrap();
        assert!(family.is_partition());
        assert_eq!(family.universe(), (0..l.n_columns()).collect::<Vec<_>>());
    }

    #[test]
    fn time_groups_contain_all_scaling_columns() {
        let p = 2;
        let levels = 5;
        let n = 1 << levels;
        let l = layout(p, levels);
        let support = SupportTable::new(WaveletFilter::Db2, n).unwrap();
        for t in [0usize, 7, 31] {
            let g = l.at_time(t, &support).unwrap();
            for u in 0..p {
                assert!(g.contains(l.scaling_column(u).unwrap()));
            }
            let s_len = support.wavelet_support(t).unwrap().len();
            assert_eq!(g.len(), p * (1 + s_len));
        }
    }

    #[test]
    fn interval_group_is_union_of_time_groups() {
        let l = layout(1, 5);
        let support = SupportTable::new(WaveletFilter::Db2, 32).unwrap();
        let (a, b) = (10, 14);
        let interval = l.on_interval(a, b, &support).unwrap();
        for t in a..=b {
            let at = l.at_time(t, &support).unwrap();
            assert!(at.columns().iter().all(|c| interval.contains(*c)));
        }
        // single-point interval equals the time group
        let single = l.on_interval(7, 7, &support).unwrap();
        assert_eq!(single.columns(), l.at_time(7, &support).unwrap().columns());
        // monotone: wider interval contains narrower
        let wider = l.on_interval(8, 16, &support).unwrap();
        let narrower = l.on_interval(10, 14, &support).unwrap();
        assert!(narrower.columns().iter().all(|c| wider.contains(*c)));
    }

    #[test]
    fn off_grid_time_errors() {
        let l = layout(1, 5);
        let support = SupportTable::new(WaveletFilter::Db2, 32).unwrap();
        assert!(l.at_time(32, &support).is_err());
        assert!(l.on_interval(30, 40, &support).is_err());
    }

    #[test]
    fn support_table_must_match_layout() {
        let l = layout(1, 5);
        let wrong = SupportTable::new(WaveletFilter::Db2, 16).unwrap();
        assert!(l.at_time(3, &wrong).is_err());
    }

    #[test]
    fn family_json_round_trip() {
        let l = layout(2, 3);
        let family = l.level_family().unwrap();
        let json = family.to_json().unwrap();
        assert!(json.contains("\"partition\": true"));
        let back = GroupFamily::from_json(&json).unwrap();
        assert_eq!(back.len(), family.len());
        assert!(back.is_partition());
        assert_eq!(back.groups()[1].columns(), family.groups()[1].columns());
    }

    #[test]
    fn column_labels_align_with_layout() {
        let l = layout(2, 2);
        let labels = l.column_labels();
        assert_eq!(labels.len(), l.n_columns());
        assert_eq!(labels[0], "x1_zeta");
        assert_eq!(labels[l.detail_column(0, 1, 1).unwrap()], "x1_j1_k1");
        assert_eq!(labels[l.scaling_column(1).unwrap()], "x2_zeta");
    }
}
