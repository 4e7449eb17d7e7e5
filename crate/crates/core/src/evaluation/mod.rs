//! Target quantization, the symmetric-difference-normalized quality measure
//! with its low/medium/high splits, report aggregation, criticality and timing.

mod benchmark;
mod criticality;
mod report;

pub use benchmark::{median, time_repeated, BenchmarkReport};
pub use criticality::{criticality, CriticalityReport, InstanceCriticality};
pub use report::{
    aggregate, histograms_csv, AggregateRow, EvaluationReport, Histogram, SceneQuality,
    HISTOGRAM_BINS,
};

use serde::{Deserialize, Serialize};

use crate::grid::PredictedOccupancyGrid;
use crate::{Error, Result};

/// Ordered probability levels a target can take.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct QuantizationSet {
    values: Vec<f64>,
}

impl Default for QuantizationSet {
    fn default() -> Self {
        Self {
            values: vec![0.0, 0.25, 0.5, 0.75, 1.0],
        }
    }
}

impl TryFrom<Vec<f64>> for QuantizationSet {
    type Error = Error;

    fn try_from(values: Vec<f64>) -> Result<Self> {
        Self::new(values)
    }
}

impl From<QuantizationSet> for Vec<f64> {
    fn from(q: QuantizationSet) -> Self {
        q.values
    }
}

impl QuantizationSet {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        let sorted = values.windows(2).all(|w| w[0] < w[1]);
        if values.len() < 2 || !sorted || values[0] != 0.0 || values[values.len() - 1] != 1.0 {
            return Err(Error::InvalidParameter(format!(
                "quantization levels must increase strictly from 0 to 1, got {values:?}"
            )));
        }
        Ok(Self { values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Nearest level; exact midpoints go to the upper level.
    pub fn quantize(&self, p: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::ProbabilityRange(p));
        }
        let upper = self.values.partition_point(|&q| q < p);
        if upper == 0 {
            return Ok(self.values[0]);
        }
        let (lo, hi) = (self.values[upper - 1], self.values[upper]);
        Ok(if hi - p <= p - lo { hi } else { lo })
    }
}

pub fn quantize(
    pog: &PredictedOccupancyGrid,
    qset: &QuantizationSet,
) -> Result<PredictedOccupancyGrid> {
    let values = pog
        .values
        .iter()
        .map(|&p| qset.quantize(p))
        .collect::<Result<Vec<_>>>()?;
    PredictedOccupancyGrid::new(pog.spec, pog.t_pred, values)
}

/// Truth-value categories of the split errors.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Category {
    Low,
    Medium,
    High,
}

impl Category {
    pub const ALL: [Category; 3] = [Category::Low, Category::Medium, Category::High];

    pub fn of(p_q: f64) -> Option<Category> {
        if p_q == 0.25 {
            Some(Category::Low)
        } else if p_q == 0.5 || p_q == 0.75 {
            Some(Category::Medium)
        } else if p_q == 1.0 {
            Some(Category::High)
        } else {
            None
        }
    }
}

/// Quality of one estimated grid against its quantized ground truth.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Quality {
    /// `None` when estimate and truth occupy the same cells yet differ in value,
    /// where the normalization by the symmetric difference breaks down.
    pub eps: Option<f64>,
    /// `None` when the truth has no cell of that category.
    pub eps_low: Option<f64>,
    pub eps_med: Option<f64>,
    pub eps_high: Option<f64>,
    pub mean_per_cell: f64,
    pub sum_sq: f64,
    pub k: usize,
}

fn normalized(sum: f64, count: usize) -> Option<f64> {
    if count > 0 {
        Some((sum / count as f64).sqrt())
    } else if sum == 0.0 {
        Some(0.0)
    } else {
        None
    }
}

/// The squared error is summed over all cells; `K` counts the cells that are
/// nonzero in exactly one of the grids, ignoring road-limit cells. Category
/// errors only look at truth cells of that category and count the mismatching
/// ones.
pub fn quality(
    estimate: &PredictedOccupancyGrid,
    truth: &PredictedOccupancyGrid,
    road_limits: Option<&[bool]>,
) -> Result<Quality> {
    estimate.spec.ensure_same(&truth.spec)?;
    if let Some(mask) = road_limits {
        if mask.len() != truth.values.len() {
            return Err(Error::GridMismatch("road-limit mask size".into()));
        }
    }
    let mut sum_sq = 0.0;
    let mut k = 0;
    let mut cat_sum = [0.0; 3];
    let mut cat_mismatch = [0usize; 3];
    let mut cat_present = [false; 3];
    for (c, (&e, &t)) in estimate.values.iter().zip(&truth.values).enumerate() {
        let d2 = (e - t) * (e - t);
        sum_sq += d2;
        if road_limits.is_some_and(|m| m[c]) {
            continue;
        }
        if (e != 0.0) != (t != 0.0) {
            k += 1;
        }
        if let Some(cat) = Category::of(t) {
            let i = cat as usize;
            cat_present[i] = true;
            if e != t {
                cat_sum[i] += d2;
                cat_mismatch[i] += 1;
            }
        }
    }
    let cat = |i: usize| {
        if cat_present[i] {
            normalized(cat_sum[i], cat_mismatch[i])
        } else {
            None
        }
    };
    Ok(Quality {
        eps: normalized(sum_sq, k),
        eps_low: cat(0),
        eps_med: cat(1),
        eps_high: cat(2),
        mean_per_cell: sum_sq / truth.values.len() as f64,
        sum_sq,
        k,
    })
}
