//! Criticality against a direct maximum over cell products, on disjoint
//! supports, and under increasing occupancy.

use pogrid_core::evaluation::criticality;
use pogrid_core::grid::{GridSpec, PredictedOccupancyGrid};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const TIMES: [f64; 3] = [0.5, 1.0, 2.0];

fn stack(spec: &GridSpec, values: &[Vec<f64>]) -> Vec<PredictedOccupancyGrid> {
    TIMES
        .iter()
        .zip(values)
        .map(|(&t, v)| PredictedOccupancyGrid::new(*spec, t, v.clone()).unwrap())
        .collect()
}

fn random_values(rng: &mut ChaCha8Rng, n: usize) -> Vec<Vec<f64>> {
    TIMES
        .iter()
        .map(|_| {
            (0..n)
                .map(|_| match rng.random_range(0..4) {
                    0 => 0.0,
                    1 => 1.0,
                    _ => rng.random::<f64>(),
                })
                .collect()
        })
        .collect()
}

fn brute_force(ego: &[Vec<f64>], others: &[Vec<f64>]) -> (Vec<(f64, usize)>, f64) {
    let mut per_instance = Vec::new();
    for (e, o) in ego.iter().zip(others) {
        let mut best = (0.0, 0);
        for k in 0..e.len() {
            if e[k] * o[k] > best.0 {
                best = (e[k] * o[k], k);
            }
        }
        per_instance.push(best);
    }
    let total = per_instance.iter().map(|b| b.0).fold(0.0, f64::max);
    (per_instance, total)
}

pub fn run() -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(88);
    for n in 0..50 {
        let spec = GridSpec::new(
            [0.0, 0.0],
            0.5,
            0.5,
            rng.random_range(1..12),
            rng.random_range(1..12),
        )
        .unwrap();
        let (e, o) = (
            random_values(&mut rng, spec.cell_count()),
            random_values(&mut rng, spec.cell_count()),
        );
        let report =
            criticality(&stack(&spec, &e), &stack(&spec, &o)).map_err(|e| e.to_string())?;
        let (expected, total) = brute_force(&e, &o);
        let matches = report.c_total == total
            && report
                .instances
                .iter()
                .zip(&expected)
                .all(|(got, &(c, k))| got.c == c && got.cell == spec.coords(k));
        if !matches {
            return Err(format!("pair {n}: {report:?} vs brute force {expected:?}"));
        }
    }

    let spec = GridSpec::new([0.0, 0.0], 1.0, 1.0, 6, 6).unwrap();
    let half = |left: bool| -> Vec<Vec<f64>> {
        TIMES
            .iter()
            .map(|_| {
                (0..36)
                    .map(|k| if (k % 6 < 3) == left { 0.9 } else { 0.0 })
                    .collect()
            })
            .collect()
    };
    let disjoint = criticality(&stack(&spec, &half(true)), &stack(&spec, &half(false)))
        .map_err(|e| e.to_string())?;
    if disjoint.c_total != 0.0 || disjoint.instances.iter().any(|i| i.c != 0.0) {
        return Err(format!("disjoint supports give {disjoint:?}"));
    }

    for n in 0..100 {
        let spec = GridSpec::new([0.0, 0.0], 0.5, 0.5, 8, 8).unwrap();
        let (e, o) = (random_values(&mut rng, 64), random_values(&mut rng, 64));
        let (mut e2, mut o2) = (e.clone(), o.clone());
        for layer in e2.iter_mut().chain(o2.iter_mut()) {
            for v in layer.iter_mut() {
                if rng.random_bool(0.3) {
                    *v = (*v + rng.random::<f64>() * 0.5).min(1.0);
                }
            }
        }
        let before =
            criticality(&stack(&spec, &e), &stack(&spec, &o)).map_err(|e| e.to_string())?;
        let after =
            criticality(&stack(&spec, &e2), &stack(&spec, &o2)).map_err(|e| e.to_string())?;
        let monotone = after.c_total >= before.c_total
            && after
                .instances
                .iter()
                .zip(&before.instances)
                .all(|(a, b)| a.c >= b.c);
        if !monotone {
            return Err(format!("pair {n}: raising occupancy lowered criticality"));
        }
    }
    Ok(
        "50 random stack pairs identical to brute force, disjoint supports give 0, \
        100 raised pairs never lower c"
            .into(),
    )
}
