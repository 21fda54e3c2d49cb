//! Exhaustive grid search scored by cross-validation.

use crate::error::{HyperboxError, Result};
use crate::harness::cv::{cross_validate, CvReport};
use crate::hyperbox::Dataset;
use crate::learner::{GridParam, LearnerConfig};

#[derive(Debug, Clone, PartialEq)]
pub struct GridCell {
    pub values: Vec<(GridParam, f64)>,
    pub config: LearnerConfig,
    pub report: CvReport,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridSearchResult {
    pub best: LearnerConfig,
    pub report: CvReport,
    /// Every evaluated cell in grid order.
    pub cells: Vec<GridCell>,
}

/// Cartesian product of the grid; the last parameter varies fastest.
fn expand_grid(grid: &[(GridParam, Vec<f64>)]) -> Vec<Vec<(GridParam, f64)>> {
    grid.iter().fold(vec![Vec::new()], |acc, (param, values)| {
        acc.iter()
            .flat_map(|prefix| {
                values.iter().map(move |&v| {
                    let mut cell = prefix.clone();
                    cell.push((*param, v));
                    cell
                })
            })
            .collect()
    })
}

/// Picks the cell with the highest mean CV accuracy; ties go to the smaller
/// theta, then to the earlier cell.
pub fn grid_search(
    data: &Dataset,
    base: &LearnerConfig,
    grid: &[(GridParam, Vec<f64>)],
    k: usize,
    seed: u64,
) -> Result<GridSearchResult> {
    if grid.is_empty() || grid.iter().any(|(_, v)| v.is_empty()) {
        return Err(HyperboxError::InvalidInput("grid must list at least one value per parameter".into()));
    }
    let configs = expand_grid(grid)
        .into_iter()
        .map(|values| {
            let mut config = base.clone();
            for &(param, v) in &values {
                config.set(param, v)?;
            }
            Ok((values, config))
        })
        .collect::<Result<Vec<_>>>()?;

    let mut cells = Vec::with_capacity(configs.len());
    for (values, config) in configs {
        let report = cross_validate(data, &config, k, seed)?;
        cells.push(GridCell { values, config, report });
    }

    let mut best = 0;
    for (i, cell) in cells.iter().enumerate().skip(1) {
        let current = &cells[best];
        if cell.report.mean > current.report.mean
            || (cell.report.mean == current.report.mean && cell.config.theta() < current.config.theta())
        {
            best = i;
        }
    }
    Ok(GridSearchResult { best: cells[best].config.clone(), report: cells[best].report.clone(), cells })
}
