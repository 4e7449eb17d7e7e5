use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::Quality;

pub const HISTOGRAM_BINS: usize = 20;

/// Counts over `[0, 1]` in bins of width 0.05; the last bin includes 1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    pub t_pred: f64,
    pub counts: Vec<u64>,
}

impl Histogram {
    pub fn new(t_pred: f64) -> Self {
        Self {
            t_pred,
            counts: vec![0; HISTOGRAM_BINS],
        }
    }

    pub fn bin_of(v: f64) -> usize {
        // scale first: 0.25 / 0.05 is not exactly 5 in binary
        ((v * HISTOGRAM_BINS as f64 + 1e-9).floor().max(0.0) as usize).min(HISTOGRAM_BINS - 1)
    }

    pub fn add(&mut self, v: f64) {
        self.counts[Self::bin_of(v)] += 1;
    }

    pub fn count_at(&self, v: f64) -> u64 {
        self.counts[Self::bin_of(v)]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SceneQuality {
    pub scene: usize,
    pub t_pred: f64,
    #[serde(flatten)]
    pub quality: Quality,
}

/// Means over the scenes of one prediction time. Each mean skips the scenes
/// where that value is undefined.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AggregateRow {
    pub t_pred: f64,
    pub scenes: usize,
    pub eps: Option<f64>,
    pub eps_low: Option<f64>,
    pub eps_med: Option<f64>,
    pub eps_high: Option<f64>,
    pub mean_per_cell: f64,
    pub eps_undefined: usize,
}

fn mean_defined(values: impl Iterator<Item = Option<f64>>) -> Option<f64> {
    let (sum, n) = values
        .flatten()
        .fold((0.0, 0usize), |(s, n), v| (s + v, n + 1));
    (n > 0).then(|| sum / n as f64)
}

pub fn aggregate(rows: &[SceneQuality], t_pred: f64) -> AggregateRow {
    let rows: Vec<&Quality> = rows
        .iter()
        .filter(|r| (r.t_pred - t_pred).abs() <= 1e-9)
        .map(|r| &r.quality)
        .collect();
    let n = rows.len();
    AggregateRow {
        t_pred,
        scenes: n,
        eps: mean_defined(rows.iter().map(|q| q.eps)),
        eps_low: mean_defined(rows.iter().map(|q| q.eps_low)),
        eps_med: mean_defined(rows.iter().map(|q| q.eps_med)),
        eps_high: mean_defined(rows.iter().map(|q| q.eps_high)),
        mean_per_cell: if n == 0 {
            0.0
        } else {
            rows.iter().map(|q| q.mean_per_cell).sum::<f64>() / n as f64
        },
        eps_undefined: rows.iter().filter(|q| q.eps.is_none()).count(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationReport {
    pub scenes: Vec<SceneQuality>,
    pub aggregates: Vec<AggregateRow>,
    /// Quantized ground-truth values of the non-road cells per instance.
    pub truth_histograms: Vec<Histogram>,
    pub estimate_histograms: Vec<Histogram>,
    pub eps_histograms: Vec<Histogram>,
}

impl EvaluationReport {
    /// Aggregate table, one line per prediction time.
    pub fn table(&self) -> String {
        let fmt = |v: Option<f64>| v.map_or_else(|| "-".to_string(), |v| format!("{v:.4}"));
        let mut out =
            String::from("t_pred  scenes  eps_low  eps_med  eps_high  eps      mean/cell\n");
        for a in &self.aggregates {
            let _ = writeln!(
                out,
                "{:<7} {:<7} {:<8} {:<8} {:<9} {:<8} {:.6}",
                a.t_pred,
                a.scenes,
                fmt(a.eps_low),
                fmt(a.eps_med),
                fmt(a.eps_high),
                fmt(a.eps),
                a.mean_per_cell
            );
        }
        out
    }

    pub fn histograms_csv(&self) -> String {
        let mut cols: Vec<(String, &Histogram)> = Vec::new();
        for (prefix, hs) in [
            ("truth", &self.truth_histograms),
            ("estimate", &self.estimate_histograms),
            ("eps", &self.eps_histograms),
        ] {
            for h in hs {
                cols.push((format!("{prefix}_t{}", h.t_pred), h));
            }
        }
        histograms_csv(&cols)
    }
}

/// CSV with the bin edges followed by one count column per histogram.
pub fn histograms_csv(columns: &[(String, &Histogram)]) -> String {
    let mut out = String::from("bin_lo,bin_hi");
    for (name, _) in columns {
        out.push(',');
        out.push_str(name);
    }
    out.push('\n');
    for b in 0..HISTOGRAM_BINS {
        let _ = write!(out, "{:.2},{:.2}", b as f64 * 0.05, (b + 1) as f64 * 0.05);
        for (_, h) in columns {
            let _ = write!(out, ",{}", h.counts[b]);
        }
        out.push('\n');
    }
    out
}
