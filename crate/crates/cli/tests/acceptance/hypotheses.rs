//! Hypothesis weights sum to one and every sub-hypothesis carries the
//! triangular mass of its bin, checked against numerical quadrature.

use pogrid_core::hypotheses::{
    deviation_bounds, sub_hypotheses, DeviationBounds, HypothesisConfig, ObjectPrediction,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::common::random_scene;

/// Triangular density on `[lo, hi]` with its mode at zero.
fn density(x: f64, lo: f64, hi: f64) -> f64 {
    if x < lo || x > hi {
        0.0
    } else if x < 0.0 {
        2.0 * (x - lo) / ((hi - lo) * -lo)
    } else {
        2.0 * (hi - x) / ((hi - lo) * hi)
    }
}

/// Midpoint rule with 10⁴ nodes.
fn integrate(a: f64, b: f64, lo: f64, hi: f64) -> f64 {
    const NODES: usize = 10_000;
    let h = (b - a) / NODES as f64;
    (0..NODES)
        .map(|k| density(a + (k as f64 + 0.5) * h, lo, hi))
        .sum::<f64>()
        * h
}

/// Bin masses of one axis: `n` equally spaced points per side out to the
/// bounds, each bin reaching halfway to its neighbours.
fn axis_masses(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if hi - lo <= 0.0 {
        return (0..n).map(|i| f64::from(u8::from(i == n / 2))).collect();
    }
    let half = (n / 2) as f64;
    let points: Vec<f64> = (0..n)
        .map(|i| {
            let k = i as f64 - half;
            if k < 0.0 {
                -lo * k / half
            } else if k > 0.0 {
                hi * k / half
            } else {
                0.0
            }
        })
        .collect();
    (0..n)
        .map(|i| {
            let a = if i == 0 {
                lo
            } else {
                (points[i - 1] + points[i]) / 2.0
            };
            let b = if i + 1 == n {
                hi
            } else {
                (points[i] + points[i + 1]) / 2.0
            };
            integrate(a, b, lo, hi)
        })
        .collect()
}

fn check_bins(bounds: &DeviationBounds, n_lon: usize, n_lat: usize) -> Result<f64, String> {
    let subs = sub_hypotheses(bounds, n_lon, n_lat).map_err(|e| e.to_string())?;
    let lon = axis_masses(bounds.lon_min, bounds.lon_max, n_lon);
    let lat = axis_masses(bounds.lat_min, bounds.lat_max, n_lat);
    let mut worst = 0.0f64;
    for (i, pl) in lon.iter().enumerate() {
        for (j, pt) in lat.iter().enumerate() {
            let got = subs[i * n_lat + j].probability;
            worst = worst.max((got - pl * pt).abs());
        }
    }
    if worst > 1e-6 {
        return Err(format!("bin mass off by {worst:e} for {bounds:?}"));
    }
    Ok(worst)
}

pub fn run() -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(22);
    let odd = [1, 3, 5, 7, 9];
    let mut worst_sum = 0.0f64;
    let mut worst_bin = check_bins(
        &DeviationBounds {
            lon_min: -4.5,
            lon_max: 2.25,
            lat_min: -2.0,
            lat_max: 2.0,
        },
        3,
        3,
    )?;
    let mut sets = 0;
    for _ in 0..100 {
        let scene = random_scene(&mut rng);
        let config = if rng.random_bool(0.5) {
            HypothesisConfig::default()
        } else {
            HypothesisConfig {
                n_lon: odd[rng.random_range(0..odd.len())],
                n_lat: odd[rng.random_range(0..odd.len())],
                ..HypothesisConfig::default()
            }
        };
        let n = config.n_lon * config.n_lat;
        for o in &scene.objects {
            let prediction =
                ObjectPrediction::new(&scene, o.id, 2.0, &config).map_err(|e| e.to_string())?;
            for t in [0.5, 1.0, 2.0] {
                let set = prediction
                    .at(&scene, t, &config)
                    .map_err(|e| e.to_string())?;
                sets += 1;
                let sum: f64 = set.weights().sum();
                worst_sum = worst_sum.max((sum - 1.0).abs());
                if (sum - 1.0).abs() > 1e-9 {
                    return Err(format!("object {} at {t} s: weights sum to {sum}", o.id));
                }
                if set.len() != prediction.mains.len() * n {
                    return Err(format!(
                        "object {} at {t} s: {} hypotheses",
                        o.id,
                        set.len()
                    ));
                }
                for (m, main) in prediction.mains.iter().enumerate() {
                    let bounds = deviation_bounds(&scene, main, t, &config.limits());
                    worst_bin = worst_bin.max(check_bins(&bounds, config.n_lon, config.n_lat)?);
                    let subs = sub_hypotheses(&bounds, config.n_lon, config.n_lat)
                        .map_err(|e| e.to_string())?;
                    for (k, sub) in subs.iter().enumerate() {
                        let w = set.hypotheses[m * n + k].weight;
                        if (w - main.probability * sub.probability).abs() > 1e-12 {
                            return Err(format!(
                                "object {} at {t} s: weight {w} is not main x sub",
                                o.id
                            ));
                        }
                    }
                }
            }
        }
    }
    Ok(format!(
        "{sets} hypothesis sets, max |sum - 1| {worst_sum:.1e}, max bin deviation {worst_bin:.1e}"
    ))
}
