use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::TrainReport;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Metrics {
    /// Mean cross-entropy.
    pub loss: f64,
    pub accuracy: f64,
    pub labels: Vec<String>,
    /// `confusion[true][predicted]`.
    pub confusion: Vec<Vec<u64>>,
    /// Recall per true class; 0 for classes without samples.
    pub per_class_recall: Vec<f64>,
}

impl Metrics {
    /// Builds metrics from `(true, predicted)` class pairs and the summed
    /// loss.
    pub fn from_pairs(labels: &[String], pairs: &[(usize, usize)], loss_sum: f64) -> Self {
        let k = labels.len();
        let mut confusion = vec![vec![0u64; k]; k];
        for &(t, p) in pairs {
            confusion[t][p] += 1;
        }
        let total = pairs.len().max(1) as f64;
        let trace: u64 = (0..k).map(|i| confusion[i][i]).sum();
        let per_class_recall = confusion
            .iter()
            .enumerate()
            .map(|(i, row)| {
                let n: u64 = row.iter().sum();
                if n == 0 {
                    0.0
                } else {
                    row[i] as f64 / n as f64
                }
            })
            .collect();
        Self {
            loss: loss_sum / total,
            accuracy: trace as f64 / total,
            labels: labels.to_vec(),
            confusion,
            per_class_recall,
        }
    }

    pub fn total(&self) -> u64 {
        self.confusion.iter().flatten().sum()
    }
}

/// Per-epoch metrics as a fixed-width table.
pub fn format_table(report: &TrainReport) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{:>5}  {:>10}  {:>9}  {:>10}  {:>9}",
        "epoch", "train_loss", "train_acc", "test_loss", "test_acc"
    );
    for e in &report.epochs {
        let (tl, ta) = match &e.held_out {
            Some(m) => (format!("{:.6}", m.loss), format!("{:.4}", m.accuracy)),
            None => ("-".into(), "-".into()),
        };
        let _ = writeln!(
            out,
            "{:>5}  {:>10.6}  {:>9.4}  {:>10}  {:>9}",
            e.epoch, e.train.loss, e.train.accuracy, tl, ta
        );
    }
    out
}

/// Confusion matrix with row/column labels, fixed width.
pub fn format_confusion(m: &Metrics) -> String {
    let width = m.labels.iter().map(|l| l.len()).max().unwrap_or(0).max(6);
    let mut out = format!("{:>width$}", "");
    for l in &m.labels {
        let _ = write!(out, "  {l:>width$}");
    }
    out.push('\n');
    for (l, row) in m.labels.iter().zip(&m.confusion) {
        let _ = write!(out, "{l:>width$}");
        for c in row {
            let _ = write!(out, "  {c:>width$}");
        }
        out.push('\n');
    }
    out
}
