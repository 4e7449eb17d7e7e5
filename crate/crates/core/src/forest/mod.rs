//! Random-forest classification from scratch (CART trees on Gini impurity,
//! bagging, random feature subsets, plurality vote, out-of-bag error) and the
//! per-cell estimator that maps an augmented occupancy grid to predicted
//! occupancy grids.

mod data;
mod ensemble;
mod estimator;
mod model_file;
mod tree;

pub use data::TrainingSet;
pub use ensemble::{bootstrap_counts, train_forest, train_tree, ForestClassifier, ForestConfig};
pub use estimator::{train_estimator, CellClassifier, PogEstimator};
pub use model_file::{ModelReader, MODEL_VERSION};
pub use tree::DecisionTree;

/// splitmix64 finalizer.
fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed of an independent work unit identified by `path` under `seed`.
pub fn mix_seed(seed: u64, path: &[u64]) -> u64 {
    path.iter()
        .fold(splitmix(seed), |h, &p| splitmix(h ^ splitmix(p)))
}
