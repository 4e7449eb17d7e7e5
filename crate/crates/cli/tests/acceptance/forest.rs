//! Tree induction against exhaustive split search, and out-of-bag behaviour
//! of the ensemble on separable, label-permuted and noisy data.

use pogrid_core::forest::{train_forest, train_tree, ForestConfig, TrainingSet};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Reference tree: every feature, every midpoint, lowest weighted Gini with
/// ties to the lower feature and threshold.
enum RefTree {
    Leaf(u8),
    Split(usize, f64, Box<RefTree>, Box<RefTree>),
}

impl RefTree {
    fn grow(rows: &[Vec<f64>], labels: &[u8], idx: &[usize], classes: usize) -> RefTree {
        let mut counts = vec![0usize; classes];
        for &s in idx {
            counts[labels[s] as usize] += 1;
        }
        let majority = (0..classes).rev().max_by_key(|&k| counts[k]).unwrap() as u8;
        if counts.iter().filter(|&&c| c > 0).count() <= 1 {
            return RefTree::Leaf(majority);
        }
        let gini = |part: &[usize]| -> f64 {
            let mut c = vec![0.0; classes];
            for &s in part {
                c[labels[s] as usize] += 1.0;
            }
            let n = part.len() as f64;
            n * (1.0 - c.iter().map(|k| (k / n) * (k / n)).sum::<f64>())
        };
        let mut best: Option<(f64, usize, f64)> = None;
        for f in 0..rows[0].len() {
            let mut values: Vec<f64> = idx.iter().map(|&s| rows[s][f]).collect();
            values.sort_by(f64::total_cmp);
            values.dedup();
            for w in values.windows(2) {
                let thr = (w[0] + w[1]) / 2.0;
                let (l, r): (Vec<usize>, Vec<usize>) =
                    idx.iter().partition(|&&s| rows[s][f] <= thr);
                let imp = (gini(&l) + gini(&r)) / idx.len() as f64;
                let better = match best {
                    None => true,
                    Some((b, _, _)) => imp < b - 1e-12,
                };
                if better {
                    best = Some((imp, f, thr));
                }
            }
        }
        match best {
            None => RefTree::Leaf(majority),
            Some((_, f, thr)) => {
                let (l, r): (Vec<usize>, Vec<usize>) =
                    idx.iter().partition(|&&s| rows[s][f] <= thr);
                RefTree::Split(
                    f,
                    thr,
                    Box::new(Self::grow(rows, labels, &l, classes)),
                    Box::new(Self::grow(rows, labels, &r, classes)),
                )
            }
        }
    }

    fn predict(&self, x: &[f64]) -> u8 {
        match self {
            RefTree::Leaf(c) => *c,
            RefTree::Split(f, thr, l, r) => {
                if x[*f] <= *thr {
                    l.predict(x)
                } else {
                    r.predict(x)
                }
            }
        }
    }

    fn nodes(&self) -> usize {
        match self {
            RefTree::Leaf(_) => 1,
            RefTree::Split(_, _, l, r) => 1 + l.nodes() + r.nodes(),
        }
    }
}

fn exhaustive_split_oracle(rng: &mut ChaCha8Rng) -> Result<usize, String> {
    let mut datasets = 0;
    for _ in 0..300 {
        let n = rng.random_range(2..=10);
        let features = rng.random_range(1..=4);
        let classes = rng.random_range(2..=3);
        let rows: Vec<Vec<f64>> = (0..n)
            .map(|_| {
                (0..features)
                    .map(|_| rng.random_range(0..4) as f64)
                    .collect()
            })
            .collect();
        let labels: Vec<u8> = (0..n).map(|_| rng.random_range(0..classes) as u8).collect();
        let data = TrainingSet::new(&rows).map_err(|e| e.to_string())?;
        let tree = train_tree(&data, &labels, classes, &vec![1; n], features, 1, rng);
        let idx: Vec<usize> = (0..n).collect();
        let reference = RefTree::grow(&rows, &labels, &idx, classes);
        if tree.node_count() != reference.nodes() {
            return Err(format!(
                "{} nodes, exhaustive search gives {} on {rows:?} / {labels:?}",
                tree.node_count(),
                reference.nodes()
            ));
        }
        // every point of the value lattice, including values outside the data
        let lattice = 6usize.pow(features as u32);
        for code in 0..lattice {
            let x: Vec<f64> = (0..features)
                .map(|f| ((code / 6usize.pow(f as u32)) % 6) as f64 - 1.0)
                .collect();
            if tree.predict(&x) != reference.predict(&x) {
                return Err(format!(
                    "prediction at {x:?} differs on {rows:?} / {labels:?}"
                ));
            }
        }
        datasets += 1;
    }
    Ok(datasets)
}

/// Two classes around centres `0` and `gap` in every coordinate.
fn blobs(rng: &mut ChaCha8Rng, n: usize, dims: usize, gap: f64) -> (Vec<Vec<f64>>, Vec<u8>) {
    let mut rows = Vec::with_capacity(n);
    let mut labels = Vec::with_capacity(n);
    for s in 0..n {
        let class = (s % 2) as u8;
        let centre = gap * f64::from(class);
        rows.push(
            (0..dims)
                .map(|_| {
                    // sum of uniforms: cheap, roughly normal, unit variance
                    let u: f64 = (0..12).map(|_| rng.random::<f64>()).sum();
                    centre + u - 6.0
                })
                .collect(),
        );
        labels.push(class);
    }
    (rows, labels)
}

fn oob(rows: &[Vec<f64>], labels: &[u8], n_trees: usize, seed: u64) -> Result<f64, String> {
    let data = TrainingSet::new(rows).map_err(|e| e.to_string())?;
    let config = ForestConfig {
        n_trees,
        ..ForestConfig::default()
    };
    let forest = train_forest(&data, labels, 2, &config, seed).map_err(|e| e.to_string())?;
    Ok(forest
        .oob_error(&data, labels)
        .map_err(|e| e.to_string())?
        .0)
}

pub fn run() -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(44);
    let datasets = exhaustive_split_oracle(&mut rng)?;

    let (rows, labels) = blobs(&mut rng, 400, 4, 3.0);
    let separable = oob(&rows, &labels, 100, 1)?;
    if separable > 0.05 {
        return Err(format!("oob {separable:.3} on separable data"));
    }

    let permuted: Vec<u8> = (0..labels.len()).map(|_| rng.random_range(0..2)).collect();
    let random = oob(&rows, &permuted, 100, 2)?;
    if (random - 0.5).abs() > 0.1 {
        return Err(format!("oob {random:.3} on permuted labels"));
    }

    let (rows, labels) = blobs(&mut rng, 400, 6, 0.8);
    let (few, many) = (oob(&rows, &labels, 10, 3)?, oob(&rows, &labels, 200, 3)?);
    if many > few + 0.05 {
        return Err(format!(
            "oob rises from {few:.3} (10 trees) to {many:.3} (200 trees)"
        ));
    }
    Ok(format!(
        "{datasets} trees match exhaustive search; oob separable {separable:.3}, \
         permuted {random:.3}, 10 trees {few:.3} vs 200 trees {many:.3}"
    ))
}
