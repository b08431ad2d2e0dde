//! Gaussian naive Bayes with a variance floor.

use crate::dataset::Matrix;

#[derive(Debug, Clone)]
pub struct NbModel {
    pub priors: Vec<f64>,
    /// Per class, per feature.
    pub means: Vec<Vec<f64>>,
    pub vars: Vec<Vec<f64>>,
    n_classes: usize,
}

/// Fit class priors and per-feature Gaussian parameters. Variances are
/// maximum-likelihood (divide by the class count) and never fall below
/// `var_floor`, which also covers single-row classes. Classes absent from
/// the training rows keep prior zero and are never predicted.
pub(crate) fn train(x: &Matrix, y: &[usize], n_classes: usize, var_floor: f64) -> NbModel {
    let n_features = x.cols;
    let mut counts = vec![0usize; n_classes];
    let mut means = vec![vec![0.0f64; n_features]; n_classes];
    for (i, &c) in y.iter().enumerate() {
        counts[c] += 1;
        for (m, &v) in means[c].iter_mut().zip(x.row(i)) {
            *m += v;
        }
    }
    for (c, m) in means.iter_mut().enumerate() {
        if counts[c] > 0 {
            let inv = 1.0 / counts[c] as f64;
            m.iter_mut().for_each(|v| *v *= inv);
        }
    }
    let mut vars = vec![vec![0.0f64; n_features]; n_classes];
    for (i, &c) in y.iter().enumerate() {
        for ((s, &m), &v) in vars[c].iter_mut().zip(&means[c]).zip(x.row(i)) {
            let d = v - m;
            *s += d * d;
        }
    }
    for (c, vars_c) in vars.iter_mut().enumerate() {
        if counts[c] > 0 {
            let inv = 1.0 / counts[c] as f64;
            for v in vars_c.iter_mut() {
                *v = (*v * inv).max(var_floor);
            }
        }
    }
    let n = y.len() as f64;
    let priors = counts.iter().map(|&c| c as f64 / n).collect();
    NbModel {
        priors,
        means,
        vars,
        n_classes,
    }
}

impl NbModel {
    pub fn distribution(&self, x: &[f64]) -> Vec<f64> {
        const LN_2PI: f64 = 1.8378770664093453;
        let mut log_post = vec![f64::NEG_INFINITY; self.n_classes];
        for c in 0..self.n_classes {
            if self.priors[c] == 0.0 {
                continue;
            }
            let mut lp = self.priors[c].ln();
            for ((&m, &v), &xv) in self.means[c].iter().zip(&self.vars[c]).zip(x) {
                let d = xv - m;
                lp -= 0.5 * (LN_2PI + v.ln() + d * d / v);
            }
            log_post[c] = lp;
        }
        let m = log_post.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let mut sum = 0.0;
        let mut out = vec![0.0; self.n_classes];
        for (o, &lp) in out.iter_mut().zip(&log_post) {
            if lp > f64::NEG_INFINITY {
                *o = (lp - m).exp();
                sum += *o;
            }
        }
        for o in out.iter_mut() {
            *o /= sum;
        }
        out
    }
}
