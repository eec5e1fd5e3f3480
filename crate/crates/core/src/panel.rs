//! Curve panels: n discrete curves of length N per functional variable.
//!
//! Panels move through the pipeline in long-form CSV (curve_id, variable,
//! t_index, value) with the scalar outcome in a separate two-column file.
//! Decomposing a panel yields per-variable coefficient matrices and the
//! tabular design matrix the forest trains on.

use std::io::{BufRead, Write};

use crate::data::{fmt_f64, parse_f64, Dataset};
use crate::error::{Error, Result};
use crate::groups::CoefficientLayout;
use crate::parallel::par_map_indexed;
use crate::wavelets::{dwt, idwt, WaveletDecomposition, WaveletFilter};

#[derive(Debug, Clone)]
pub struct CurvePanel {
    variables: Vec<String>,
    /// curves[u][i] is curve i of variable u; all curves share one length.
    curves: Vec<Vec<Vec<f64>>>,
}

impl CurvePanel {
    pub fn new(variables: Vec<String>, curves: Vec<Vec<Vec<f64>>>) -> Result<Self> {
        if variables.is_empty() || variables.len() != curves.len() {
            return Err(Error::InvalidData(
                "variable names and curve blocks must align".into(),
            ));
        }
        let n = curves[0].len();
        if n == 0 {
            return Err(Error::InvalidData("panel has no curves".into()));
        }
        let len = curves[0][0].len();
        for (name, block) in variables.iter().zip(&curves) {
            if block.len() != n {
                return Err(Error::InvalidData(format!(
                    "variable {name}: {} curves, expected {n}",
                    block.len()
                )));
            }
            for curve in block {
                if curve.len() != len {
                    return Err(Error::InvalidData(format!(
                        "variable {name}: ragged curve lengths"
                    )));
                }
            }
        }
        Ok(Self { variables, curves })
    }

    pub fn variables(&self) -> &[String] {
        &self.variables
    }

    pub fn n_variables(&self) -> usize {
        self.variables.len()
    }

    pub fn n_curves(&self) -> usize {
        self.curves[0].len()
    }

    pub fn n_points(&self) -> usize {
        self.curves[0][0].len()
    }

    pub fn curve(&self, variable: usize, curve: usize) -> &[f64] {
        &self.curves[variable][curve]
    }

    /// Wavelet decompositions, curves in parallel: result[u][i].
    pub fn decompose(&self, filter: WaveletFilter) -> Result<Vec<Vec<WaveletDecomposition>>> {
        // fail fast on bad lengths before fanning out
        dwt(&self.curves[0][0], filter)?;
        let n = self.n_curves();
        let flat = par_map_indexed(self.n_variables() * n, |idx| {
            let (u, i) = (idx / n, idx % n);
            dwt(&self.curves[u][i], filter).expect("validated length")
        });
        let mut out = Vec::with_capacity(self.n_variables());
        let mut it = flat.into_iter();
        for _ in 0..self.n_variables() {
            out.push(it.by_ref().take(n).collect());
        }
        Ok(out)
    }

    /// Coefficient design matrix plus its layout.
    pub fn to_design(
        &self,
        filter: WaveletFilter,
        response: &[f64],
    ) -> Result<(Dataset, CoefficientLayout)> {
        let decomps = self.decompose(filter)?;
        design_from_decompositions(&self.variables, &decomps, response)
    }

    /// Long-form CSV: curve_id, variable, t_index, value.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "curve_id,variable,t_index,value")?;
        for (u, name) in self.variables.iter().enumerate() {
            for i in 0..self.n_curves() {
                for (t, v) in self.curves[u][i].iter().enumerate() {
                    writeln!(w, "{i},{name},{t},{}", fmt_f64(*v))?;
                }
            }
        }
        Ok(())
    }

    /// Parse long-form CSV; rows may arrive in any order but must form a
    /// complete rectangular panel.
    pub fn read_csv<R: BufRead>(reader: R) -> Result<Self> {
        let mut lines = reader.lines();
        let header = lines
            .next()
            .ok_or_else(|| Error::Parse("empty panel CSV".into()))??;
        if header.trim() != "curve_id,variable,t_index,value" {
            return Err(Error::Parse(format!("unexpected panel header {header:?}")));
        }
        let mut variables: Vec<String> = Vec::new();
        let mut cells: Vec<Vec<Vec<(usize, f64)>>> = Vec::new();
        for (lineno, line) in lines.enumerate() {
            let line = line?;
            if line.is_empty() {
                continue;
            }
            let mut fields = line.split(',');
            let err = || Error::Parse(format!("line {}: malformed row", lineno + 2));
            let curve: usize = fields
                .next()
                .ok_or_else(err)?
                .trim()
                .parse()
                .map_err(|_| err())?;
            let variable = fields.next().ok_or_else(err)?.trim().to_string();
            let t: usize = fields
                .next()
                .ok_or_else(err)?
                .trim()
                .parse()
                .map_err(|_| err())?;
            let value = parse_f64(fields.next().ok_or_else(err)?, lineno + 2)?;
            let u = match variables.iter().position(|v| *v == variable) {
                Some(u) => u,
                None => {
                    variables.push(variable);
                    cells.push(Vec::new());
                    variables.len() - 1
                }
            };
            if cells[u].len() <= curve {
                cells[u].resize(curve + 1, Vec::new());
            }
            cells[u][curve].push((t, value));
        }
        if variables.is_empty() {
            return Err(Error::Parse("panel CSV has no data rows".into()));
        }
        let mut curves = Vec::with_capacity(variables.len());
        let mut expected_len = None;
        for (name, block) in variables.iter().zip(cells) {
            let mut block_curves = Vec::with_capacity(block.len());
            for (i, mut cell) in block.into_iter().enumerate() {
                cell.sort_unstable_by_key(|(t, _)| *t);
                let len = cell.len();
                if *expected_len.get_or_insert(len) != len {
                    return Err(Error::InvalidData(format!(
                        "variable {name} curve {i}: ragged length {len}"
                    )));
                }
                for (pos, (t, _)) in cell.iter().enumerate() {
                    if *t != pos {
                        return Err(Error::InvalidData(format!(
                            "variable {name} curve {i}: missing t_index {pos}"
                        )));
                    }
                }
                block_curves.push(cell.into_iter().map(|(_, v)| v).collect());
            }
            curves.push(block_curves);
        }
        Self::new(variables, curves)
    }
}

/// Build the design matrix from per-variable decomposition panels.
pub fn design_from_decompositions(
    variables: &[String],
    decomps: &[Vec<WaveletDecomposition>],
    response: &[f64],
) -> Result<(Dataset, CoefficientLayout)> {
    if variables.len() != decomps.len() || decomps.is_empty() {
        return Err(Error::InvalidData("variables and coefficient blocks differ".into()));
    }
    let n = decomps[0].len();
    if response.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            actual: response.len(),
        });
    }
    let levels = decomps[0][0].levels();
    let layout = CoefficientLayout::new(variables.to_vec(), levels)?;
    let width = layout.coeffs_per_variable();
    let mut columns: Vec<Vec<f64>> = vec![Vec::with_capacity(n); layout.n_columns()];
    for (u, block) in decomps.iter().enumerate() {
        if block.len() != n {
            return Err(Error::InvalidData(format!(
                "variable {}: {} decompositions, expected {n}",
                variables[u],
                block.len()
            )));
        }
        for d in block {
            if d.levels() != levels {
                return Err(Error::InvalidData("mixed decomposition depths".into()));
            }
            for (offset, v) in d.flatten().into_iter().enumerate() {
                columns[u * width + offset].push(v);
            }
        }
    }
    let data = Dataset::new(layout.column_labels(), columns, response.to_vec())?;
    Ok((data, layout))
}

/// Rebuild a panel from per-variable decompositions (inverse transform).
pub fn panel_from_decompositions(
    variables: &[String],
    decomps: &[Vec<WaveletDecomposition>],
    filter: WaveletFilter,
) -> Result<CurvePanel> {
    let curves = decomps
        .iter()
        .map(|block| block.iter().map(|d| idwt(d, filter)).collect::<Result<Vec<_>>>())
        .collect::<Result<Vec<_>>>()?;
    CurvePanel::new(variables.to_vec(), curves)
}

/// Coefficient CSV: curve_id, variable, level, position, value; the scaling
/// coefficient is written with level -1, position 0.
pub fn write_coefficients_csv<W: Write>(
    variables: &[String],
    decomps: &[Vec<WaveletDecomposition>],
    mut w: W,
) -> std::io::Result<()> {
    writeln!(w, "curve_id,variable,level,position,value")?;
    for (name, block) in variables.iter().zip(decomps) {
        for (i, d) in block.iter().enumerate() {
            writeln!(w, "{i},{name},-1,0,{}", fmt_f64(d.scaling))?;
            for (j, level) in d.details.iter().enumerate() {
                for (k, v) in level.iter().enumerate() {
                    writeln!(w, "{i},{name},{j},{k},{}", fmt_f64(*v))?;
                }
            }
        }
    }
    Ok(())
}

/// Parse the coefficient CSV back into per-variable decomposition panels.
pub fn read_coefficients_csv<R: BufRead>(
    reader: R,
) -> Result<(Vec<String>, Vec<Vec<WaveletDecomposition>>)> {
    let mut lines = reader.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::Parse("empty coefficient CSV".into()))??;
    if header.trim() != "curve_id,variable,level,position,value" {
        return Err(Error::Parse(format!(
            "unexpected coefficient header {header:?}"
        )));
    }
    struct Partial {
        scaling: Vec<Option<f64>>,
        details: Vec<Vec<Vec<Option<f64>>>>,
    }
    let mut variables: Vec<String> = Vec::new();
    let mut partials: Vec<Partial> = Vec::new();
    for (lineno, line) in lines.enumerate() {
        let line = line?;
        if line.is_empty() {
            continue;
        }
        let err = || Error::Parse(format!("line {}: malformed row", lineno + 2));
        let mut fields = line.split(',');
        let curve: usize = fields
            .next()
            .ok_or_else(err)?
            .trim()
            .parse()
            .map_err(|_| err())?;
        let variable = fields.next().ok_or_else(err)?.trim().to_string();
        let level: i64 = fields
            .next()
            .ok_or_else(err)?
            .trim()
            .parse()
            .map_err(|_| err())?;
        let pos: usize = fields
            .next()
            .ok_or_else(err)?
            .trim()
            .parse()
            .map_err(|_| err())?;
        let value = parse_f64(fields.next().ok_or_else(err)?, lineno + 2)?;
        let u = match variables.iter().position(|v| *v == variable) {
            Some(u) => u,
            None => {
                variables.push(variable);
                partials.push(Partial {
                    scaling: Vec::new(),
                    details: Vec::new(),
                });
                variables.len() - 1
            }
        };
        let part = &mut partials[u];
        if part.scaling.len() <= curve {
            part.scaling.resize(curve + 1, None);
            part.details.resize(curve + 1, Vec::new());
        }
        if level < 0 {
            part.scaling[curve] = Some(value);
        } else {
            let level = level as usize;
            let details = &mut part.details[curve];
            if details.len() <= level {
                details.resize(level + 1, Vec::new());
            }
            if details[level].len() <= pos {
                details[level].resize(pos + 1, None);
            }
            details[level][pos] = Some(value);
        }
    }
    if variables.is_empty() {
        return Err(Error::Parse("coefficient CSV has no data rows".into()));
    }
    let mut decomps = Vec::with_capacity(variables.len());
    for (name, part) in variables.iter().zip(partials) {
        let mut block = Vec::with_capacity(part.scaling.len());
        for (i, (scaling, details)) in part.scaling.iter().zip(part.details).enumerate() {
            let scaling = scaling.ok_or_else(|| {
                Error::InvalidData(format!("variable {name} curve {i}: missing scaling entry"))
            })?;
            let mut levels = Vec::with_capacity(details.len());
            for (j, level) in details.into_iter().enumerate() {
                if level.len() != (1 << j) {
                    return Err(Error::InvalidData(format!(
                        "variable {name} curve {i}: level {j} has {} entries, expected {}",
                        level.len(),
                        1 << j
                    )));
                }
                let complete: Option<Vec<f64>> = level.into_iter().collect();
                levels.push(complete.ok_or_else(|| {
                    Error::InvalidData(format!(
                        "variable {name} curve {i}: missing coefficient at level {j}"
                    ))
                })?);
            }
            block.push(WaveletDecomposition {
                scaling,
                details: levels,
            });
        }
        decomps.push(block);
    }
    Ok((variables, decomps))
}

/// Outcome CSV: curve_id, Y in curve order.
pub fn write_outcome_csv<W: Write>(response: &[f64], mut w: W) -> std::io::Result<()> {
    writeln!(w, "curve_id,Y")?;
    for (i, y) in response.iter().enumerate() {
        writeln!(w, "{i},{}", fmt_f64(*y))?;
    }
    Ok(())
}

pub fn read_outcome_csv<R: BufRead>(reader: R) -> Result<Vec<f64>> {
    let mut lines = reader.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::Parse("empty outcome CSV".into()))??;
    if header.trim() != "curve_id,Y" {
        return Err(Error::Parse(format!("unexpected outcome header {header:?}")));
    }
    let mut out = Vec::new();
    for (lineno, line) in lines.enumerate() {
        let line = line?;
        if line.is_empty() {
            continue;
        }
        let err = || Error::Parse(format!("line {}: malformed row", lineno + 2));
        let mut fields = line.split(',');
        let curve: usize = fields
            .next()
            .ok_or_else(err)?
            .trim()
            .parse()
            .map_err(|_| err())?;
        if curve != out.len() {
            return Err(Error::InvalidData(format!(
                "outcome rows must be in curve order; got {curve} at position {}",
                out.len()
            )));
        }
        out.push(parse_f64(fields.next().ok_or_else(err)?, lineno + 2)?);
    }
    if out.is_empty() {
        return Err(Error::Parse("outcome CSV has no rows".into()));
    }
    Ok(out)
}
