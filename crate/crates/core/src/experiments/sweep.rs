use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::config::RunConfig;
use crate::error::{Error, Result};
use crate::fmt::sig12;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum AxisValues {
    Numeric(Vec<f64>),
    Labels(Vec<String>),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Axis {
    pub name: String,
    pub values: AxisValues,
}

impl Axis {
    pub fn numeric(name: &str, values: Vec<f64>) -> Self {
        Axis { name: name.to_string(), values: AxisValues::Numeric(values) }
    }

    pub fn indices(name: &str, len: usize) -> Self {
        Self::numeric(name, (0..len).map(|i| i as f64).collect())
    }

    pub fn labels(name: &str, values: Vec<String>) -> Self {
        Axis { name: name.to_string(), values: AxisValues::Labels(values) }
    }

    pub fn len(&self) -> usize {
        match &self.values {
            AxisValues::Numeric(v) => v.len(),
            AxisValues::Labels(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn numeric_values(&self) -> Option<&[f64]> {
        match &self.values {
            AxisValues::Numeric(v) => Some(v),
            AxisValues::Labels(_) => None,
        }
    }

    fn format(&self, i: usize) -> String {
        match &self.values {
            AxisValues::Numeric(v) => sig12(v[i]),
            AxisValues::Labels(v) => v[i].clone(),
        }
    }
}

/// Named statistics of one cell, in output order.
pub type Stats = Vec<(String, f64)>;

/// Statistics aggregated over the trailing axes: `index` addresses only the
/// leading `index.len()` axes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub index: Vec<usize>,
    pub stats: Stats,
}

/// Reproducibility record written next to every result CSV.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Metadata {
    pub experiment: String,
    pub version: String,
    pub master_seed: u64,
    pub seed_hex: String,
    pub axes: Vec<Axis>,
    pub cell_count: usize,
    pub config: RunConfig,
}

/// Gridded statistics over the Cartesian product of `axes`. Cells are stored
/// row-major with the first axis outermost.
#[derive(Clone, Debug, PartialEq)]
pub struct SweepResult {
    pub experiment: String,
    pub axes: Vec<Axis>,
    pub cells: Vec<Stats>,
    pub summaries: Vec<Summary>,
    pub metadata: Option<Metadata>,
}

impl SweepResult {
    pub fn new(experiment: &str, axes: Vec<Axis>) -> Self {
        SweepResult {
            experiment: experiment.to_string(),
            axes,
            cells: Vec::new(),
            summaries: Vec::new(),
            metadata: None,
        }
    }

    pub fn expected_cells(&self) -> usize {
        self.axes.iter().map(Axis::len).product()
    }

    pub fn push_cell(&mut self, stats: Stats) {
        self.cells.push(stats);
    }

    pub fn push_summary(&mut self, index: Vec<usize>, stats: Stats) {
        self.summaries.push(Summary { index, stats });
    }

    fn flat_index(&self, index: &[usize]) -> Option<usize> {
        if index.len() != self.axes.len() {
            return None;
        }
        let mut flat = 0;
        for (i, axis) in index.iter().zip(&self.axes) {
            if *i >= axis.len() {
                return None;
            }
            flat = flat * axis.len() + i;
        }
        Some(flat)
    }

    pub fn cell(&self, index: &[usize]) -> Option<&Stats> {
        self.flat_index(index).and_then(|i| self.cells.get(i))
    }

    pub fn stat(&self, index: &[usize], name: &str) -> Option<f64> {
        lookup(self.cell(index)?, name)
    }

    pub fn summary(&self, index: &[usize], name: &str) -> Option<f64> {
        self.summaries
            .iter()
            .find(|s| s.index == index)
            .and_then(|s| lookup(&s.stats, name))
    }

    pub fn axis(&self, name: &str) -> Option<&Axis> {
        self.axes.iter().find(|a| a.name == name)
    }

    pub fn check_complete(&self) -> Result<()> {
        if self.cells.len() != self.expected_cells() {
            return Err(Error::invalid(
                "cells",
                format!("{} cells for a grid of {}", self.cells.len(), self.expected_cells()),
            ));
        }
        Ok(())
    }

    /// Long-format CSV: `axis1,...,axisN,stat,value`, cells first, then
    /// summaries with the aggregated axes left empty.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        self.check_complete()?;
        let header: Vec<&str> = self
            .axes
            .iter()
            .map(|a| a.name.as_str())
            .chain(["stat", "value"])
            .collect();
        writeln!(w, "{}", header.join(","))?;

        let mut index = vec![0usize; self.axes.len()];
        for stats in &self.cells {
            let coords: Vec<String> =
                index.iter().zip(&self.axes).map(|(i, a)| a.format(*i)).collect();
            for (name, value) in stats {
                writeln!(w, "{},{},{}", coords.join(","), name, sig12(*value))?;
            }
            advance(&mut index, &self.axes);
        }
        for s in &self.summaries {
            let coords: Vec<String> = (0..self.axes.len())
                .map(|d| s.index.get(d).map(|i| self.axes[d].format(*i)).unwrap_or_default())
                .collect();
            for (name, value) in &s.stats {
                writeln!(w, "{},{},{}", coords.join(","), name, sig12(*value))?;
            }
        }
        Ok(())
    }

    pub fn to_csv_string(&self) -> Result<String> {
        let mut buf = Vec::new();
        self.write_csv(&mut buf)?;
        Ok(String::from_utf8(buf).expect("CSV output is UTF-8"))
    }
}

fn lookup(stats: &Stats, name: &str) -> Option<f64> {
    stats.iter().find(|(n, _)| n == name).map(|(_, v)| *v)
}

fn advance(index: &mut [usize], axes: &[Axis]) {
    for d in (0..index.len()).rev() {
        index[d] += 1;
        if index[d] < axes[d].len() {
            return;
        }
        index[d] = 0;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn long_format() {
        let mut r = SweepResult::new(
            "demo",
            vec![Axis::numeric("d", vec![0.5, 2.0]), Axis::labels("g", vec!["a".into()])],
        );
        r.push_cell(vec![("mean".into(), 1.5)]);
        r.push_cell(vec![("mean".into(), f64::NAN)]);
        r.push_summary(vec![], vec![("best".into(), 2.0)]);
        let csv = r.to_csv_string().unwrap();
        assert_eq!(csv, "d,g,stat,value\n0.5,a,mean,1.5\n2,a,mean,nan\n,,best,2\n");
        assert_eq!(r.stat(&[0, 0], "mean"), Some(1.5));
        assert_eq!(r.stat(&[2, 0], "mean"), None);
        assert_eq!(r.summary(&[], "best"), Some(2.0));
    }

    #[test]
    fn incomplete_grid_is_an_error() {
        let r = SweepResult::new("demo", vec![Axis::indices("i", 2)]);
        assert!(r.to_csv_string().is_err());
    }
}
