//! Deviation bounds and the quantized triangular sub-hypotheses around a main
//! hypothesis.

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Support of the longitudinal and lateral deviation pdfs [m]. The mode of
/// both triangles is zero deviation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DeviationBounds {
    pub lon_min: f64,
    pub lon_max: f64,
    pub lat_min: f64,
    pub lat_max: f64,
}

/// Acceleration limits that bound the deviations [m/s²].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AccelLimits {
    pub decel_max: f64,
    pub accel_max: f64,
    pub lat_max: f64,
}

impl Default for AccelLimits {
    fn default() -> Self {
        Self {
            decel_max: 9.0,
            accel_max: 4.5,
            lat_max: 7.0,
        }
    }
}

/// Kinematic bounds `±½ a t²`, with the rear bound limited to the distance the
/// main hypothesis has covered and the lateral bounds limited to the free room
/// towards the road limits on either side.
pub fn kinematic_bounds(
    t_pred: f64,
    travelled: f64,
    room_left: f64,
    room_right: f64,
    limits: &AccelLimits,
) -> DeviationBounds {
    let t2 = 0.5 * t_pred * t_pred;
    let lat = limits.lat_max * t2;
    DeviationBounds {
        lon_min: -(limits.decel_max * t2).min(travelled.max(0.0)),
        lon_max: limits.accel_max * t2,
        lat_min: -lat.min(room_right.max(0.0)),
        lat_max: lat.min(room_left.max(0.0)),
    }
}

/// One quantized deviation with its conditional probability.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SubHypothesis {
    pub d_lon: f64,
    pub d_lat: f64,
    pub probability: f64,
}

/// CDF of the triangular distribution on `[lo, hi]` with mode 0
/// (`lo <= 0 <= hi`, `lo < hi`).
pub fn triangular_cdf(x: f64, lo: f64, hi: f64) -> f64 {
    if x <= lo {
        return 0.0;
    }
    if x >= hi {
        return 1.0;
    }
    let width = hi - lo;
    if x <= 0.0 {
        (x - lo) * (x - lo) / (width * -lo)
    } else {
        1.0 - (hi - x) * (hi - x) / (width * hi)
    }
}

/// Quantization of one axis into `n` (odd) points: zero, plus `(n-1)/2` evenly
/// spaced points on each side reaching the bound. Each point owns the interval
/// between the midpoints to its neighbours and carries the triangular mass of
/// that interval. A side with zero extent collapses onto zero with zero mass.
pub fn quantize_axis(lo: f64, hi: f64, n: usize) -> Vec<(f64, f64)> {
    let half = (n - 1) / 2;
    let mut values = Vec::with_capacity(n);
    for k in (1..=half).rev() {
        values.push(lo * (k as f64 / half as f64));
    }
    values.push(0.0);
    for k in 1..=half {
        values.push(hi * (k as f64 / half as f64));
    }
    if hi - lo <= 0.0 {
        return values
            .into_iter()
            .enumerate()
            .map(|(i, v)| (v, if i == half { 1.0 } else { 0.0 }))
            .collect();
    }
    let mut edges = Vec::with_capacity(n + 1);
    edges.push(lo);
    for w in values.windows(2) {
        edges.push(0.5 * (w[0] + w[1]));
    }
    edges.push(hi);
    values
        .iter()
        .enumerate()
        .map(|(i, &v)| {
            (
                v,
                triangular_cdf(edges[i + 1], lo, hi) - triangular_cdf(edges[i], lo, hi),
            )
        })
        .collect()
}

/// `n_lon * n_lat` sub-hypotheses (longitudinal index outer) whose
/// probabilities are the product of the per-axis triangular masses, normalized
/// to sum to one.
pub fn sub_hypotheses(
    bounds: &DeviationBounds,
    n_lon: usize,
    n_lat: usize,
) -> Result<Vec<SubHypothesis>> {
    for n in [n_lon, n_lat] {
        if n == 0 || n % 2 == 0 {
            return Err(Error::InvalidParameter(format!(
                "sub-hypothesis counts must be odd and positive, got {n}"
            )));
        }
    }
    let ordered = bounds.lon_min <= 0.0
        && bounds.lon_max >= 0.0
        && bounds.lat_min <= 0.0
        && bounds.lat_max >= 0.0;
    if !ordered {
        return Err(Error::InvalidParameter(format!(
            "deviation bounds must bracket zero: {bounds:?}"
        )));
    }
    let lon = quantize_axis(bounds.lon_min, bounds.lon_max, n_lon);
    let lat = quantize_axis(bounds.lat_min, bounds.lat_max, n_lat);
    let mut out = Vec::with_capacity(n_lon * n_lat);
    for &(d_lon, p_lon) in &lon {
        for &(d_lat, p_lat) in &lat {
            out.push(SubHypothesis {
                d_lon,
                d_lat,
                probability: p_lon * p_lat,
            });
        }
    }
    let total: f64 = out.iter().map(|s| s.probability).sum();
    for s in &mut out {
        s.probability /= total;
    }
    Ok(out)
}
