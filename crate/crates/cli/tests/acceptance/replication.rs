//! Single car on a straight road, one hypothesis per scene: the estimated
//! occupied region of held-out scenes sits where the model puts the car.

use pogrid_core::config::RunConfig;
use pogrid_core::grid::{GridSpec, PredictedOccupancyGrid};
use pogrid_core::hypotheses::HypothesisConfig;
use pogrid_core::pipeline::{generate_dataset, train_from_dataset, Dataset};
use pogrid_core::scenario::straight_road_preset;

/// Occupancy-weighted centre of the cells off the road limits.
fn centroid(pog: &PredictedOccupancyGrid, mask: &[bool]) -> Option<(f64, f64)> {
    let (mut w, mut x, mut y) = (0.0, 0.0, 0.0);
    for (k, &p) in pog.values.iter().enumerate() {
        if mask[k] || p == 0.0 {
            continue;
        }
        let (i, j) = pog.spec.coords(k);
        let c = pog.spec.center(i, j);
        w += p;
        x += p * c.x;
        y += p * c.y;
    }
    (w > 0.0).then(|| (x / w, y / w))
}

pub fn run() -> Result<String, String> {
    let config = RunConfig {
        grid: GridSpec::new([-4.0, -4.0], 0.5, 0.5, 64, 16).unwrap(),
        instances: vec![1.0],
        hypotheses: HypothesisConfig {
            n_lon: 1,
            n_lat: 1,
            ..HypothesisConfig::default()
        },
        ..RunConfig::default()
    };
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let out = dir.path().join("straight");
    let scenario = straight_road_preset();
    let manifest = generate_dataset(&scenario, &config, &out).map_err(|e| e.to_string())?;
    if manifest.scene_count != 300 {
        return Err(format!("{} scenes generated", manifest.scene_count));
    }
    let dataset = Dataset::open(&out).map_err(|e| e.to_string())?;
    let estimator = train_from_dataset(&dataset, &config).map_err(|e| e.to_string())?;
    let mask = dataset.road_mask().map_err(|e| e.to_string())?;
    let tolerance = 2.0 * config.grid.cell_length;
    let mut hits = 0;
    let mut worst = 0.0f64;
    for &s in &dataset.manifest.test {
        let aog = dataset.aog(s).map_err(|e| e.to_string())?;
        let truth = &dataset.pogs(s).map_err(|e| e.to_string())?[0];
        let estimate = estimator
            .estimate_pog(&aog, 1.0)
            .map_err(|e| e.to_string())?;
        let Some(expected) = centroid(truth, &mask) else {
            return Err(format!(
                "scene {s} has no occupied cell in its ground truth"
            ));
        };
        let offset = centroid(&estimate, &mask).map_or(f64::INFINITY, |c| {
            (c.0 - expected.0).hypot(c.1 - expected.1)
        });
        worst = worst.max(offset);
        if offset <= tolerance {
            hits += 1;
        }
    }
    let n = dataset.manifest.test.len();
    let share = hits as f64 / n as f64;
    let detail = format!(
        "{hits}/{n} held-out centroids within {tolerance} m ({:.1}%), worst {worst:.2} m",
        100.0 * share
    );
    if share >= 0.9 {
        Ok(detail)
    } else {
        Err(detail)
    }
}
