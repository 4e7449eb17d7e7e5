use crate::{Error, Result};

/// Training features shared by every classifier of an estimator: a dense
/// row-major copy for small nodes and, per feature that varies at all, the
/// nonzero entries sorted by value for large ones. Occupancy-grid features are
/// overwhelmingly zero, so the sparse columns are short.
#[derive(Debug, Clone)]
pub struct TrainingSet {
    n_features: usize,
    rows: Vec<f64>,
    /// Features that are not constant over the whole set, ascending.
    candidates: Vec<u32>,
    /// Per candidate: `(value, sample)` for nonzero values, ascending by value.
    columns: Vec<Vec<(f64, u32)>>,
}

impl TrainingSet {
    pub fn new<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let n_features = rows.first().map_or(0, |r| r.as_ref().len());
        if rows.is_empty() || n_features == 0 {
            return Err(Error::InvalidParameter(
                "training set needs at least one sample and feature".into(),
            ));
        }
        if rows.len() > u32::MAX as usize || n_features > u32::MAX as usize {
            return Err(Error::InvalidParameter("training set too large".into()));
        }
        let mut dense = Vec::with_capacity(rows.len() * n_features);
        for r in rows {
            let r = r.as_ref();
            if r.len() != n_features {
                return Err(Error::FeatureLength {
                    expected: n_features,
                    got: r.len(),
                });
            }
            if let Some(bad) = r.iter().find(|v| !v.is_finite()) {
                return Err(Error::InvalidParameter(format!(
                    "non-finite feature value {bad}"
                )));
            }
            dense.extend_from_slice(r);
        }
        let n = rows.len();
        let mut candidates = Vec::new();
        let mut columns = Vec::new();
        for f in 0..n_features {
            let first = dense[f];
            if (1..n).all(|s| dense[s * n_features + f] == first) {
                continue;
            }
            let mut col: Vec<(f64, u32)> = (0..n)
                .filter_map(|s| {
                    let v = dense[s * n_features + f];
                    (v != 0.0).then_some((v, s as u32))
                })
                .collect();
            col.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
            candidates.push(f as u32);
            columns.push(col);
        }
        Ok(Self {
            n_features,
            rows: dense,
            candidates,
            columns,
        })
    }

    pub fn len(&self) -> usize {
        self.rows.len() / self.n_features
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn n_features(&self) -> usize {
        self.n_features
    }

    pub fn row(&self, sample: usize) -> &[f64] {
        &self.rows[sample * self.n_features..(sample + 1) * self.n_features]
    }

    pub(crate) fn value(&self, sample: u32, feature: u32) -> f64 {
        self.rows[sample as usize * self.n_features + feature as usize]
    }

    pub(crate) fn candidates(&self) -> &[u32] {
        &self.candidates
    }

    /// Sparse column of the `k`-th candidate feature.
    pub(crate) fn column(&self, k: usize) -> &[(f64, u32)] {
        &self.columns[k]
    }
}
