//! Predicted occupancy against a cell-by-cell, hypothesis-by-hypothesis
//! summation, and the clamp on overlapping certain objects.

use pogrid_core::geometry::{Point, Pose};
use pogrid_core::grid::{build_pog, GridSpec};
use pogrid_core::hypotheses::{Hypothesis, HypothesisSet};
use pogrid_core::scenario::{Footprint, ManeuverLabel};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Strictly inside the rectangle: on the inner side of all four edges.
fn covers(pose: &Pose, f: &Footprint, p: Point) -> bool {
    let (s, c) = pose.heading.sin_cos();
    let (a, b) = (f.length / 2.0, f.width / 2.0);
    let corner = |u: f64, v: f64| (pose.x + u * c - v * s, pose.y + u * s + v * c);
    let ring = [corner(a, b), corner(-a, b), corner(-a, -b), corner(a, -b)];
    (0..4).all(|k| {
        let (x0, y0) = ring[k];
        let (x1, y1) = ring[(k + 1) % 4];
        (x1 - x0) * (p.y - y0) - (y1 - y0) * (p.x - x0) > 0.0
    })
}

fn holds_pose(spec: &GridSpec, i: usize, j: usize, pose: &Pose) -> bool {
    let x0 = spec.origin[0] + i as f64 * spec.cell_length;
    let y0 = spec.origin[1] + j as f64 * spec.cell_width;
    pose.x >= x0 && pose.x < x0 + spec.cell_length && pose.y >= y0 && pose.y < y0 + spec.cell_width
}

fn oracle(sets: &[(HypothesisSet, Footprint)], spec: &GridSpec, mask: Option<&[bool]>) -> Vec<f64> {
    let mut out = vec![0.0; spec.cell_count()];
    for j in 0..spec.rows {
        for i in 0..spec.cols {
            let centre = spec.center(i, j);
            let mut p = 0.0;
            for (set, footprint) in sets {
                for h in &set.hypotheses {
                    if covers(&h.pose, footprint, centre) || holds_pose(spec, i, j, &h.pose) {
                        p += h.weight;
                    }
                }
            }
            let k = spec.index(i, j);
            out[k] = if mask.is_some_and(|m| m[k]) {
                1.0
            } else {
                p.min(1.0)
            };
        }
    }
    out
}

fn random_instance(rng: &mut ChaCha8Rng) -> (GridSpec, Vec<(HypothesisSet, Footprint)>) {
    let spec = GridSpec::new(
        [rng.random_range(-5.0..5.0), rng.random_range(-5.0..5.0)],
        rng.random_range(0.3..1.5),
        rng.random_range(0.3..1.5),
        10,
        10,
    )
    .unwrap();
    let span = (10.0 * spec.cell_length, 10.0 * spec.cell_width);
    let objects = rng.random_range(1..=3);
    let sets = (0..objects)
        .map(|id| {
            let footprint = Footprint {
                length: rng.random_range(0.5..5.0),
                width: rng.random_range(0.3..2.5),
            };
            let n = rng.random_range(1..=12);
            let raw: Vec<f64> = (0..n).map(|_| rng.random_range(0.01..1.0)).collect();
            let total: f64 = raw.iter().sum();
            let hypotheses = raw
                .iter()
                .map(|w| Hypothesis {
                    label: ManeuverLabel::FollowLane,
                    pose: Pose::new(
                        spec.origin[0] + rng.random_range(-0.2..1.2) * span.0,
                        spec.origin[1] + rng.random_range(-0.2..1.2) * span.1,
                        rng.random_range(-4.0..4.0),
                    ),
                    weight: w / total,
                })
                .collect();
            (
                HypothesisSet {
                    object: id,
                    t_pred: 1.0,
                    hypotheses,
                },
                footprint,
            )
        })
        .collect();
    (spec, sets)
}

/// Two cars certain to stand on the same spot.
fn crash_overlap() -> Result<(), String> {
    let spec = GridSpec::new([0.0, 0.0], 0.5, 0.5, 10, 10).unwrap();
    let set = |object| HypothesisSet {
        object,
        t_pred: 1.0,
        hypotheses: vec![Hypothesis {
            label: ManeuverLabel::FollowLane,
            pose: Pose::new(2.6, 2.4, 0.3),
            weight: 1.0,
        }],
    };
    let sets = [(set(1), Footprint::CAR), (set(2), Footprint::CAR)];
    let pog = build_pog(&sets, &spec, 1.0, None).map_err(|e| e.to_string())?;
    let overlap: Vec<f64> = (0..spec.cell_count())
        .filter(|&k| {
            let (i, j) = spec.coords(k);
            covers(
                &sets[0].0.hypotheses[0].pose,
                &Footprint::CAR,
                spec.center(i, j),
            )
        })
        .map(|k| pog.values[k])
        .collect();
    if overlap.is_empty() || overlap.iter().any(|&v| v != 1.0) {
        return Err(format!("overlap cells {overlap:?} are not exactly 1"));
    }
    Ok(())
}

pub fn run() -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(33);
    let mut clamped = 0;
    for n in 0..50 {
        let (spec, sets) = random_instance(&mut rng);
        let mask: Option<Vec<bool>> = (n % 5 == 0).then(|| {
            (0..spec.cell_count())
                .map(|_| rng.random_bool(0.1))
                .collect()
        });
        let pog = build_pog(&sets, &spec, 1.0, mask.as_deref()).map_err(|e| e.to_string())?;
        let expected = oracle(&sets, &spec, mask.as_deref());
        if let Some(k) = (0..expected.len()).find(|&k| pog.values[k] != expected[k]) {
            return Err(format!(
                "instance {n}, cell {k}: {} vs brute force {}",
                pog.values[k], expected[k]
            ));
        }
        if pog.values.iter().any(|v| !(0.0..=1.0).contains(v)) {
            return Err(format!("instance {n}: value outside [0, 1]"));
        }
        clamped += pog.values.iter().filter(|&&v| v == 1.0).count();
    }
    crash_overlap()?;
    Ok(format!(
        "50 random instances identical to brute force ({clamped} cells at 1), crash overlap clamps to 1"
    ))
}
