use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkReport {
    pub repetitions: usize,
    /// Median seconds per model-based construction.
    pub t_model: f64,
    /// Median seconds per estimator inference.
    pub t_ml: f64,
    pub speedup: f64,
    pub model_times: Vec<f64>,
    pub ml_times: Vec<f64>,
}

pub fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n == 0 {
        f64::NAN
    } else if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// Wall-clock seconds of `reps` runs of `f`.
pub fn time_repeated(reps: usize, mut f: impl FnMut() -> Result<()>) -> Result<Vec<f64>> {
    (0..reps)
        .map(|_| {
            let start = Instant::now();
            f()?;
            Ok(start.elapsed().as_secs_f64())
        })
        .collect()
}

impl BenchmarkReport {
    /// Times both paths alternately, one warm-up run each, `reps >= 10`.
    pub fn measure(
        reps: usize,
        mut model: impl FnMut() -> Result<()>,
        mut ml: impl FnMut() -> Result<()>,
    ) -> Result<Self> {
        if reps < 10 {
            return Err(Error::InvalidParameter(format!(
                "at least 10 repetitions required, got {reps}"
            )));
        }
        model()?;
        ml()?;
        let mut model_times = Vec::with_capacity(reps);
        let mut ml_times = Vec::with_capacity(reps);
        for _ in 0..reps {
            model_times.extend(time_repeated(1, &mut model)?);
            ml_times.extend(time_repeated(1, &mut ml)?);
        }
        let t_model = median(&model_times);
        let t_ml = median(&ml_times);
        Ok(Self {
            repetitions: reps,
            t_model,
            t_ml,
            speedup: t_model / t_ml,
            model_times,
            ml_times,
        })
    }
}
