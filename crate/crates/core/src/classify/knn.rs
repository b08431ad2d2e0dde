//! k-nearest-neighbor classification with inverse-distance weighting.

use crate::dataset::Matrix;

#[derive(Debug, Clone)]
pub struct KnnModel {
    x: Matrix,
    y: Vec<usize>,
    k: usize,
    n_classes: usize,
}

/// Memorize the training rows. `k` larger than the row count degrades to
/// using every row.
pub(crate) fn train(x: &Matrix, y: &[usize], n_classes: usize, k: usize) -> KnnModel {
    KnnModel {
        x: x.clone(),
        y: y.to_vec(),
        k,
        n_classes,
    }
}

impl KnnModel {
    /// Vote among the k nearest rows (Euclidean; distance ties resolve to
    /// the lower row index). Votes are weighted 1/distance. An exact match
    /// short-circuits the weighting: all zero-distance neighbors among the
    /// selected k share the vote uniformly and everything else is ignored.
    pub fn distribution(&self, q: &[f64]) -> Vec<f64> {
        let n = self.x.rows;
        let mut d2: Vec<(f64, usize)> = (0..n)
            .map(|i| {
                let row = self.x.row(i);
                let mut s = 0.0;
                for (&a, &b) in row.iter().zip(q) {
                    let d = a - b;
                    s += d * d;
                }
                (s, i)
            })
            .collect();
        let take = self.k.min(n);
        d2.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        let selected = &d2[..take];

        let mut scores = vec![0.0f64; self.n_classes];
        let zero_hits: Vec<usize> = selected
            .iter()
            .filter(|(s, _)| *s == 0.0)
            .map(|&(_, i)| i)
            .collect();
        if !zero_hits.is_empty() {
            let w = 1.0 / zero_hits.len() as f64;
            for &i in &zero_hits {
                scores[self.y[i]] += w;
            }
            return scores;
        }
        let mut total = 0.0;
        for &(s, i) in selected {
            let w = 1.0 / s.sqrt();
            scores[self.y[i]] += w;
            total += w;
        }
        for v in scores.iter_mut() {
            *v /= total;
        }
        scores
    }
}
