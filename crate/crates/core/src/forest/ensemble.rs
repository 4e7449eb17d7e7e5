use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::tree::TreeBuilder;
use super::{mix_seed, DecisionTree, TrainingSet};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ForestConfig {
    pub n_trees: usize,
    /// Features scored per split; `None` means `ceil(sqrt(F))`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m_try: Option<usize>,
    pub min_leaf: usize,
    /// Train every tree on a bootstrap resample; without it each tree sees the
    /// whole set once.
    pub bootstrap: bool,
}

impl Default for ForestConfig {
    fn default() -> Self {
        Self {
            n_trees: 100,
            m_try: None,
            min_leaf: 1,
            bootstrap: true,
        }
    }
}

impl ForestConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_trees == 0 || self.min_leaf == 0 || self.m_try == Some(0) {
            return Err(Error::InvalidParameter(format!(
                "forest needs n_trees, min_leaf and m_try >= 1: {self:?}"
            )));
        }
        Ok(())
    }

    pub fn m_try_for(&self, n_features: usize) -> usize {
        self.m_try
            .unwrap_or_else(|| (n_features as f64).sqrt().ceil() as usize)
            .clamp(1, n_features.max(1))
    }
}

/// Bagged ensemble of CART trees voting by plurality.
#[derive(Debug, Clone, PartialEq)]
pub struct ForestClassifier {
    pub n_classes: usize,
    pub n_features: usize,
    pub m_try: usize,
    pub trees: Vec<DecisionTree>,
    /// Per tree, a bitset over training samples that were drawn into its
    /// bootstrap; empty when the forest was loaded without it.
    pub in_bag: Vec<Vec<u64>>,
}

/// Multiplicity of every sample in a bootstrap resample of size `n`.
pub fn bootstrap_counts(n: usize, rng: &mut ChaCha8Rng) -> Vec<u32> {
    let mut w = vec![0u32; n];
    for _ in 0..n {
        w[rng.random_range(0..n)] += 1;
    }
    w
}

/// One tree trained on `weights` (sample multiplicities).
pub fn train_tree(
    data: &TrainingSet,
    labels: &[u8],
    n_classes: usize,
    weights: &[u32],
    m_try: usize,
    min_leaf: usize,
    rng: &mut ChaCha8Rng,
) -> DecisionTree {
    TreeBuilder::new(data, labels, n_classes, weights, m_try, min_leaf).build(rng)
}

fn check_labels(data: &TrainingSet, labels: &[u8], n_classes: usize) -> Result<()> {
    if labels.len() != data.len() {
        return Err(Error::InvalidParameter(format!(
            "{} labels for {} samples",
            labels.len(),
            data.len()
        )));
    }
    if n_classes == 0 || n_classes > 256 || labels.iter().any(|&l| l as usize >= n_classes) {
        return Err(Error::InvalidParameter(format!(
            "labels must lie in 0..{n_classes}"
        )));
    }
    Ok(())
}

/// Trains `config.n_trees` trees; tree `t` draws from its own RNG seeded by
/// `(seed, t)`, so the result depends on nothing but the inputs.
pub fn train_forest(
    data: &TrainingSet,
    labels: &[u8],
    n_classes: usize,
    config: &ForestConfig,
    seed: u64,
) -> Result<ForestClassifier> {
    config.validate()?;
    check_labels(data, labels, n_classes)?;
    let n = data.len();
    let m_try = config.m_try_for(data.n_features());
    let mut trees = Vec::with_capacity(config.n_trees);
    let mut in_bag = Vec::with_capacity(config.n_trees);
    for t in 0..config.n_trees {
        let mut rng = ChaCha8Rng::seed_from_u64(mix_seed(seed, &[t as u64]));
        let weights = if config.bootstrap {
            bootstrap_counts(n, &mut rng)
        } else {
            vec![1; n]
        };
        let mut bits = vec![0u64; n.div_ceil(64)];
        for (s, &w) in weights.iter().enumerate() {
            if w > 0 {
                bits[s / 64] |= 1 << (s % 64);
            }
        }
        trees.push(train_tree(
            data,
            labels,
            n_classes,
            &weights,
            m_try,
            config.min_leaf,
            &mut rng,
        ));
        in_bag.push(bits);
    }
    Ok(ForestClassifier {
        n_classes,
        n_features: data.n_features(),
        m_try,
        trees,
        in_bag,
    })
}

fn plurality(votes: &[u32]) -> usize {
    (0..votes.len()).fold(0, |best, k| if votes[k] > votes[best] { k } else { best })
}

impl ForestClassifier {
    pub fn votes(&self, x: &[f64]) -> Result<Vec<u32>> {
        if x.len() != self.n_features {
            return Err(Error::FeatureLength {
                expected: self.n_features,
                got: x.len(),
            });
        }
        let mut votes = vec![0u32; self.n_classes];
        for t in &self.trees {
            votes[t.predict(x) as usize] += 1;
        }
        Ok(votes)
    }

    /// Plurality class (ties toward the lower class) and the vote fractions.
    pub fn predict(&self, x: &[f64]) -> Result<(u8, Vec<f64>)> {
        let votes = self.votes(x)?;
        let n = self.trees.len() as f64;
        Ok((
            plurality(&votes) as u8,
            votes.iter().map(|&v| f64::from(v) / n).collect(),
        ))
    }

    pub fn predict_class(&self, x: &[f64]) -> Result<u8> {
        Ok(plurality(&self.votes(x)?) as u8)
    }

    pub fn is_in_bag(&self, tree: usize, sample: usize) -> bool {
        self.in_bag[tree]
            .get(sample / 64)
            .is_some_and(|w| w & (1 << (sample % 64)) != 0)
    }

    /// Out-of-bag error on the training set the forest was built from:
    /// misclassified fraction under the vote of the trees that did not see each
    /// sample. Returns the error and the number of samples that every tree
    /// saw (those are left out).
    pub fn oob_error(&self, data: &TrainingSet, labels: &[u8]) -> Result<(f64, usize)> {
        check_labels(data, labels, self.n_classes)?;
        if self.in_bag.len() != self.trees.len() {
            return Err(Error::InvalidParameter(
                "forest carries no bootstrap record".into(),
            ));
        }
        let mut wrong = 0usize;
        let mut scored = 0usize;
        for (s, &label) in labels.iter().enumerate() {
            let x = data.row(s);
            let mut votes = vec![0u32; self.n_classes];
            let mut any = false;
            for (t, tree) in self.trees.iter().enumerate() {
                if !self.is_in_bag(t, s) {
                    votes[tree.predict(x) as usize] += 1;
                    any = true;
                }
            }
            if any {
                scored += 1;
                if plurality(&votes) != label as usize {
                    wrong += 1;
                }
            }
        }
        let error = if scored == 0 {
            0.0
        } else {
            wrong as f64 / scored as f64
        };
        Ok((error, labels.len() - scored))
    }
}
