use serde::{Deserialize, Serialize};

use crate::grid::PredictedOccupancyGrid;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InstanceCriticality {
    pub t_pred: f64,
    pub c: f64,
    /// First cell (row-major) attaining `c`, as `(column, row)`.
    pub cell: (usize, usize),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriticalityReport {
    pub instances: Vec<InstanceCriticality>,
    pub c_total: f64,
}

/// Per instance the largest product of ego and other-object occupancy over all
/// cells, and the maximum over instances.
pub fn criticality(
    ego: &[PredictedOccupancyGrid],
    others: &[PredictedOccupancyGrid],
) -> Result<CriticalityReport> {
    if ego.len() != others.len() || ego.is_empty() {
        return Err(Error::GridMismatch(format!(
            "{} ego and {} other grids",
            ego.len(),
            others.len()
        )));
    }
    let mut instances = Vec::with_capacity(ego.len());
    for (e, o) in ego.iter().zip(others) {
        e.spec.ensure_same(&o.spec)?;
        if (e.t_pred - o.t_pred).abs() > 1e-9 {
            return Err(Error::GridMismatch(format!(
                "prediction times {} and {}",
                e.t_pred, o.t_pred
            )));
        }
        let (mut best, mut at) = (0.0, 0);
        for (k, (&pe, &po)) in e.values.iter().zip(&o.values).enumerate() {
            let c = pe * po;
            if c > best {
                best = c;
                at = k;
            }
        }
        instances.push(InstanceCriticality {
            t_pred: e.t_pred,
            c: best,
            cell: e.spec.coords(at),
        });
    }
    let c_total = instances.iter().map(|i| i.c).fold(0.0, f64::max);
    Ok(CriticalityReport { instances, c_total })
}
