use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::TrainingSet;

const LEAF: u32 = u32::MAX;
/// Splits whose impurities differ by less than this are considered equal.
const IMPURITY_TOL: f64 = 1e-12;

/// Internal nodes send `x[feature] <= threshold` left. Leaves have
/// `feature == LEAF`, `left` = majority class and `right` = offset of their
/// class counts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Node {
    pub feature: u32,
    pub threshold: f64,
    pub left: u32,
    pub right: u32,
}

impl Node {
    pub fn is_leaf(&self) -> bool {
        self.feature == LEAF
    }
}

/// Fully grown CART classification tree.
#[derive(Debug, Clone, PartialEq)]
pub struct DecisionTree {
    pub(crate) n_classes: usize,
    pub(crate) nodes: Vec<Node>,
    pub(crate) leaf_counts: Vec<u32>,
}

impl DecisionTree {
    fn leaf<'a>(&'a self, x: &[f64]) -> &'a Node {
        let mut node = &self.nodes[0];
        while !node.is_leaf() {
            let next = if x[node.feature as usize] <= node.threshold {
                node.left
            } else {
                node.right
            };
            node = &self.nodes[next as usize];
        }
        node
    }

    /// Majority class of the leaf reached by `x`; ties go to the lower class.
    pub fn predict(&self, x: &[f64]) -> u8 {
        self.leaf(x).left as u8
    }

    /// Class counts of the leaf reached by `x`.
    pub fn leaf_counts(&self, x: &[f64]) -> &[u32] {
        let off = self.leaf(x).right as usize;
        &self.leaf_counts[off..off + self.n_classes]
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn depth(&self) -> usize {
        fn walk(t: &DecisionTree, k: usize) -> usize {
            let n = &t.nodes[k];
            if n.is_leaf() {
                0
            } else {
                1 + walk(t, n.left as usize).max(walk(t, n.right as usize))
            }
        }
        walk(self, 0)
    }

    /// Root split as `(feature, threshold)`, `None` for a single leaf.
    pub fn root_split(&self) -> Option<(usize, f64)> {
        let root = &self.nodes[0];
        (!root.is_leaf()).then_some((root.feature as usize, root.threshold))
    }
}

#[derive(Debug, Clone, Copy)]
struct Split {
    impurity: f64,
    feature: u32,
    threshold: f64,
}

impl Split {
    fn better_than(&self, other: &Option<Split>) -> bool {
        match other {
            None => true,
            Some(o) => {
                if self.impurity < o.impurity - IMPURITY_TOL {
                    true
                } else if self.impurity > o.impurity + IMPURITY_TOL {
                    false
                } else {
                    (self.feature, self.threshold) < (o.feature, o.threshold)
                }
            }
        }
    }
}

/// Weighted Gini impurity of a split, `(n_l * g_l + n_r * g_r) / n`.
fn split_impurity(left: &[u64], right: &[u64]) -> f64 {
    let part = |c: &[u64]| -> (f64, f64) {
        let n: u64 = c.iter().sum();
        let sq: f64 = c.iter().map(|&k| (k * k) as f64).sum();
        (n as f64, n as f64 - sq / n as f64)
    };
    let (nl, il) = part(left);
    let (nr, ir) = part(right);
    (il + ir) / (nl + nr)
}

fn midpoint(a: f64, b: f64) -> f64 {
    let m = a + (b - a) / 2.0;
    if m >= b {
        a
    } else {
        m
    }
}

pub(crate) struct TreeBuilder<'a> {
    data: &'a TrainingSet,
    labels: &'a [u8],
    n_classes: usize,
    weights: &'a [u32],
    m_try: usize,
    min_leaf: u64,
    perm: Vec<u32>,
    stamp: Vec<u32>,
    current: u32,
    items: Vec<(f64, u8, u32)>,
    nodes: Vec<Node>,
    leaf_counts: Vec<u32>,
}

impl<'a> TreeBuilder<'a> {
    /// `weights[s]` is how often sample `s` occurs in the (bootstrap) training
    /// set of this tree; samples with weight 0 are ignored.
    pub fn new(
        data: &'a TrainingSet,
        labels: &'a [u8],
        n_classes: usize,
        weights: &'a [u32],
        m_try: usize,
        min_leaf: usize,
    ) -> Self {
        Self {
            data,
            labels,
            n_classes,
            weights,
            m_try: m_try.max(1),
            min_leaf: min_leaf.max(1) as u64,
            perm: (0..data.candidates().len() as u32).collect(),
            stamp: vec![0; data.len()],
            current: 0,
            items: Vec::new(),
            nodes: Vec::new(),
            leaf_counts: Vec::new(),
        }
    }

    pub fn build(mut self, rng: &mut ChaCha8Rng) -> DecisionTree {
        let samples: Vec<u32> = (0..self.data.len() as u32)
            .filter(|&s| self.weights[s as usize] > 0)
            .collect();
        self.grow(samples, rng);
        DecisionTree {
            n_classes: self.n_classes,
            nodes: self.nodes,
            leaf_counts: self.leaf_counts,
        }
    }

    fn counts(&self, samples: &[u32]) -> Vec<u64> {
        let mut c = vec![0u64; self.n_classes];
        for &s in samples {
            c[self.labels[s as usize] as usize] += u64::from(self.weights[s as usize]);
        }
        c
    }

    fn grow(&mut self, samples: Vec<u32>, rng: &mut ChaCha8Rng) -> u32 {
        let index = self.nodes.len() as u32;
        let counts = self.counts(&samples);
        let total: u64 = counts.iter().sum();
        let pure = counts.iter().filter(|&&c| c > 0).count() <= 1;
        let split = if pure || total < 2 * self.min_leaf {
            None
        } else {
            self.best_split(&samples, &counts, rng)
        };
        let Some(split) = split else {
            let majority =
                (0..self.n_classes)
                    .fold(0, |best, k| if counts[k] > counts[best] { k } else { best });
            self.nodes.push(Node {
                feature: LEAF,
                threshold: 0.0,
                left: majority as u32,
                right: self.leaf_counts.len() as u32,
            });
            self.leaf_counts.extend(counts.iter().map(|&c| c as u32));
            return index;
        };
        self.nodes.push(Node {
            feature: split.feature,
            threshold: split.threshold,
            left: 0,
            right: 0,
        });
        let (left, right): (Vec<u32>, Vec<u32>) = samples
            .into_iter()
            .partition(|&s| self.data.value(s, split.feature) <= split.threshold);
        let l = self.grow(left, rng);
        let r = self.grow(right, rng);
        self.nodes[index as usize].left = l;
        self.nodes[index as usize].right = r;
        index
    }

    /// Visits candidate features in random order until `m_try` of them that
    /// vary within the node have been scored.
    fn best_split(
        &mut self,
        samples: &[u32],
        counts: &[u64],
        rng: &mut ChaCha8Rng,
    ) -> Option<Split> {
        self.current += 1;
        for &s in samples {
            self.stamp[s as usize] = self.current;
        }
        let mut best = None;
        let mut evaluated = 0;
        let n = self.perm.len();
        for k in 0..n {
            if evaluated == self.m_try {
                break;
            }
            let r = rng.random_range(k..n);
            self.perm.swap(k, r);
            let cand = self.perm[k] as usize;
            if self.collect(cand, samples, counts) {
                evaluated += 1;
                let feature = self.data.candidates()[cand];
                if let Some(split) = self.scan(feature, counts) {
                    if split.better_than(&best) {
                        best = Some(split);
                    }
                }
            }
        }
        best
    }

    /// Fills `items` with `(value, class, weight)` of the node's samples in
    /// ascending value order; returns false if the feature is constant there.
    fn collect(&mut self, cand: usize, samples: &[u32], counts: &[u64]) -> bool {
        let feature = self.data.candidates()[cand];
        let column = self.data.column(cand);
        self.items.clear();
        if samples.len() <= column.len() {
            for &s in samples {
                let w = self.weights[s as usize];
                self.items
                    .push((self.data.value(s, feature), self.labels[s as usize], w));
            }
            self.items.sort_by(|a, b| a.0.total_cmp(&b.0));
        } else {
            let mut zeros: Vec<u64> = counts.to_vec();
            let mut zero_at = None;
            for &(v, s) in column {
                if self.stamp[s as usize] != self.current {
                    continue;
                }
                if v > 0.0 && zero_at.is_none() {
                    zero_at = Some(self.items.len());
                }
                let class = self.labels[s as usize];
                let w = self.weights[s as usize];
                zeros[class as usize] -= u64::from(w);
                self.items.push((v, class, w));
            }
            let at = zero_at.unwrap_or(self.items.len());
            let zero_items: Vec<(f64, u8, u32)> = zeros
                .iter()
                .enumerate()
                .filter(|(_, &c)| c > 0)
                .map(|(k, &c)| (0.0, k as u8, c as u32))
                .collect();
            self.items.splice(at..at, zero_items);
        }
        match (self.items.first(), self.items.last()) {
            (Some(a), Some(b)) => a.0 < b.0,
            _ => false,
        }
    }

    fn scan(&self, feature: u32, counts: &[u64]) -> Option<Split> {
        let mut left = vec![0u64; self.n_classes];
        let mut right = counts.to_vec();
        let mut n_left = 0u64;
        let total: u64 = counts.iter().sum();
        let mut best: Option<Split> = None;
        for w in 0..self.items.len() - 1 {
            let (v, class, weight) = self.items[w];
            left[class as usize] += u64::from(weight);
            right[class as usize] -= u64::from(weight);
            n_left += u64::from(weight);
            let next = self.items[w + 1].0;
            if next == v || n_left < self.min_leaf || total - n_left < self.min_leaf {
                continue;
            }
            let split = Split {
                impurity: split_impurity(&left, &right),
                feature,
                threshold: midpoint(v, next),
            };
            if split.better_than(&best) {
                best = Some(split);
            }
        }
        best
    }
}
