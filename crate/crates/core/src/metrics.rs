//! Precision, recall, F1 and structural Hamming distance between adjacency matrices.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::CausalGraph;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub shd: usize,
}

/// Compares `pred` against `truth` entry by entry. Both graphs must list the same node
/// names in the same order.
pub fn evaluate(truth: &CausalGraph, pred: &CausalGraph) -> Result<MetricsReport> {
    if truth.names() != pred.names() {
        return Err(Error::data(format!(
            "node sets differ: truth has [{}], prediction has [{}]",
            truth.names().join(", "),
            pred.names().join(", ")
        )));
    }
    let (mut tp, mut predicted, mut actual, mut shd) = (0usize, 0usize, 0usize, 0usize);
    for (t_row, p_row) in truth.adjacency().iter().zip(pred.adjacency()) {
        for (&t, &p) in t_row.iter().zip(p_row) {
            tp += usize::from(t == 1 && p == 1);
            predicted += usize::from(p == 1);
            actual += usize::from(t == 1);
            shd += usize::from(t != p);
        }
    }
    let ratio = |num: usize, den: usize| {
        if den == 0 {
            0.0
        } else {
            num as f64 / den as f64
        }
    };
    let precision = ratio(tp, predicted);
    let recall = ratio(tp, actual);
    let f1 = if precision + recall > 0.0 {
        2.0 * precision * recall / (precision + recall)
    } else {
        0.0
    };
    Ok(MetricsReport {
        precision,
        recall,
        f1,
        shd,
    })
}

impl MetricsReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("metrics serialize")
    }
}

impl fmt::Display for MetricsReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "{:<10}{:>8}{:>8}{:>8}{:>6}",
            "", "prec", "rec", "f1", "shd"
        )?;
        write!(
            f,
            "{:<10}{:>8.4}{:>8.4}{:>8.4}{:>6}",
            "metrics", self.precision, self.recall, self.f1, self.shd
        )
    }
}
