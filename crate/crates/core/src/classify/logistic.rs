//! Multinomial logistic regression trained by batch gradient descent with a
//! backtracking (Armijo) step size.
//!
//! The loss is the mean cross-entropy in natural log plus an L2 penalty of
//! `ridge/2` on all non-bias weights. Weights are laid out row-major per
//! class, `[class][feature..., bias]`, and start at zero, where the loss is
//! exactly `ln(n_classes)`.
//!
//! This trainer also powers wrapper fitness, which calls it hundreds of
//! thousands of times, so the training loop runs on specialized kernels: a
//! feature-major weight layout whose inner dimension is the (const-generic)
//! class count, polynomial exp/ln, and a fused loss pass that retains each
//! row's softmax so the following gradient pass needs no second forward
//! sweep. The reference loss/gradient below the training section stays on
//! libm and backs the public `lr_loss_and_gradient`.

use crate::classify::math::{exp_block, ln_block};
use crate::dataset::Matrix;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogisticConfig {
    pub ridge: f64,
    pub max_iter: usize,
    pub tol: f64,
}

impl Default for LogisticConfig {
    fn default() -> Self {
        LogisticConfig {
            ridge: 1e-8,
            max_iter: 200,
            tol: 1e-8,
        }
    }
}

/// Rows to exclude from training: the half-open range
/// `skip_start..skip_end`. Cross-validation sorts rows by fold, so a test
/// fold is one contiguous range and training covers the two flanks without
/// copying.
#[derive(Debug, Clone, Copy)]
pub(crate) struct RowSpan {
    pub skip_start: usize,
    pub skip_end: usize,
}

impl RowSpan {
    pub fn all() -> RowSpan {
        RowSpan {
            skip_start: 0,
            skip_end: 0,
        }
    }

    fn segments(&self, n_rows: usize) -> [(usize, usize); 2] {
        [(0, self.skip_start), (self.skip_end, n_rows)]
    }

    fn len(&self, n_rows: usize) -> usize {
        n_rows - (self.skip_end - self.skip_start)
    }
}

#[derive(Debug, Clone)]
pub struct LogisticModel {
    /// `n_classes * (n_features + 1)` weights, bias last in each class row.
    pub weights: Vec<f64>,
    pub n_features: usize,
    pub n_classes: usize,
}

impl LogisticModel {
    pub(crate) fn logits(&self, x: &[f64], out: &mut [f64]) {
        logits_into(&self.weights, self.n_features, self.n_classes, x, out);
    }

    /// Softmax distribution for one row.
    pub fn distribution(&self, x: &[f64]) -> Vec<f64> {
        let mut z = vec![0.0; self.n_classes];
        self.logits(x, &mut z);
        softmax_in_place(&mut z);
        z
    }
}

#[inline]
fn logits_into(w: &[f64], n_features: usize, n_classes: usize, x: &[f64], out: &mut [f64]) {
    let stride = n_features + 1;
    for (k, o) in out.iter_mut().enumerate().take(n_classes) {
        let wk = &w[k * stride..k * stride + n_features];
        let mut acc = w[k * stride + n_features];
        for (wv, xv) in wk.iter().zip(x) {
            acc += wv * xv;
        }
        *o = acc;
    }
}

pub(crate) fn softmax_in_place(z: &mut [f64]) {
    let mut m = f64::NEG_INFINITY;
    for &v in z.iter() {
        if v > m {
            m = v;
        }
    }
    let mut sum = 0.0;
    for v in z.iter_mut() {
        *v = (*v - m).exp();
        sum += *v;
    }
    for v in z.iter_mut() {
        *v /= sum;
    }
}

/// Class with the highest logit (ties to the lower id); avoids the softmax
/// when only the decision is needed.
#[inline]
pub(crate) fn predict_class_from_logits(
    w: &[f64],
    n_features: usize,
    n_classes: usize,
    x: &[f64],
    scratch: &mut [f64],
) -> usize {
    logits_into(w, n_features, n_classes, x, scratch);
    let mut best = 0;
    for k in 1..n_classes {
        if scratch[k] > scratch[best] {
            best = k;
        }
    }
    best
}

// ---------------------------------------------------------------------------
// Training kernels. Weights here are feature-major: `w_t[f * K + k]` with the
// bias in the final feature row, so one row's logits accumulate K-wide over
// contiguous memory.

fn to_feature_major(w: &[f64], n_features: usize, k: usize) -> Vec<f64> {
    let stride = n_features + 1;
    let mut t = vec![0.0; stride * k];
    for c in 0..k {
        for f in 0..stride {
            t[f * k + c] = w[c * stride + f];
        }
    }
    t
}

fn to_class_major(w_t: &[f64], n_features: usize, k: usize) -> Vec<f64> {
    let stride = n_features + 1;
    let mut w = vec![0.0; stride * k];
    for c in 0..k {
        for f in 0..stride {
            w[c * stride + f] = w_t[f * k + c];
        }
    }
    w
}

/// `FUSED` selects `mul_add`: a single instruction where hardware FMA is
/// compiled in, but a libm call where it is not — so it is only ever true
/// inside the feature-gated instantiation below.
#[inline(always)]
fn row_logits<const K: usize, const FUSED: bool>(w_t: &[f64], x: &[f64]) -> [f64; K] {
    let mut z = [0.0f64; K];
    let (feat, bias) = w_t.split_at(x.len() * K);
    for (wf, &xv) in feat.chunks_exact(K).zip(x) {
        for k in 0..K {
            if FUSED {
                z[k] = wf[k].mul_add(xv, z[k]);
            } else {
                z[k] += wf[k] * xv;
            }
        }
    }
    for k in 0..K {
        z[k] += bias[k];
    }
    z
}

/// Rows processed per chunk of the loss pass; the per-row scratch stays on
/// the stack and in L1.
const BLOCK: usize = 64;

/// Mean cross-entropy over the spanned rows plus the ridge term, retaining
/// each row's softmax distribution in `probs` (indexed by absolute row).
///
/// Work is phase-separated over row blocks so each phase is an independent
/// element-wise loop the compiler can vectorize: logits and max-shift per
/// row (staging shifted logits in the `probs` slots), one exp sweep over
/// the whole block, row normalization, then one ln sweep over the
/// denominators. The per-row loss term is `ln(sum) - (z_y - m)`, which is
/// algebraically `m + ln(sum) - z_y` without re-adding `m`.
#[inline(always)]
fn loss_pass<const K: usize, const FUSED: bool>(
    x: &Matrix,
    y: &[usize],
    w_t: &[f64],
    ridge: f64,
    span: RowSpan,
    probs: &mut [f64],
) -> f64 {
    let mut d = [0.0f64; BLOCK];
    let mut sums = [0.0f64; BLOCK];
    let mut loss = 0.0;
    for (start, end) in span.segments(x.rows) {
        let mut b0 = start;
        while b0 < end {
            let blen = (end - b0).min(BLOCK);
            for j in 0..blen {
                let i = b0 + j;
                let z = row_logits::<K, FUSED>(w_t, x.row(i));
                let mut m = z[0];
                for k in 1..K {
                    if z[k] > m {
                        m = z[k];
                    }
                }
                let p = &mut probs[i * K..i * K + K];
                for k in 0..K {
                    p[k] = z[k] - m;
                }
                d[j] = p[y[i]];
            }
            exp_block(&mut probs[b0 * K..(b0 + blen) * K]);
            for j in 0..blen {
                let p = &mut probs[(b0 + j) * K..(b0 + j) * K + K];
                let mut s = 0.0;
                for k in 0..K {
                    s += p[k];
                }
                sums[j] = s;
                let inv = 1.0 / s;
                for k in 0..K {
                    p[k] *= inv;
                }
            }
            ln_block(&mut sums[..blen]);
            for j in 0..blen {
                loss += sums[j] - d[j];
            }
            b0 += blen;
        }
    }
    loss /= span.len(x.rows) as f64;
    if ridge > 0.0 {
        let mut reg = 0.0;
        for wf in w_t[..x.cols * K].iter() {
            reg += wf * wf;
        }
        loss += 0.5 * ridge * reg;
    }
    loss
}

/// Gradient of the spanned loss from stored probabilities; no exp needed.
#[inline(always)]
fn grad_pass<const K: usize, const FUSED: bool>(
    x: &Matrix,
    y: &[usize],
    w_t: &[f64],
    ridge: f64,
    span: RowSpan,
    probs: &[f64],
    grad_t: &mut [f64],
) {
    grad_t.iter_mut().for_each(|g| *g = 0.0);
    let inv_n = 1.0 / span.len(x.rows) as f64;
    let nf = x.cols;
    let (gfeat, gbias) = grad_t.split_at_mut(nf * K);
    for (start, end) in span.segments(x.rows) {
        for i in start..end {
            let row = x.row(i);
            let mut coef = [0.0f64; K];
            let p = &probs[i * K..i * K + K];
            for k in 0..K {
                coef[k] = (p[k] - ((y[i] == k) as u8 as f64)) * inv_n;
            }
            for (gf, &xv) in gfeat.chunks_exact_mut(K).zip(row) {
                for k in 0..K {
                    if FUSED {
                        gf[k] = coef[k].mul_add(xv, gf[k]);
                    } else {
                        gf[k] += coef[k] * xv;
                    }
                }
            }
            for k in 0..K {
                gbias[k] += coef[k];
            }
        }
    }
    if ridge > 0.0 {
        for (g, wv) in gfeat.iter_mut().zip(&w_t[..nf * K]) {
            if FUSED {
                *g = ridge.mul_add(*wv, *g);
            } else {
                *g += ridge * wv;
            }
        }
    }
}

/// How much the lookahead loss may rise before momentum is treated as an
/// overshoot; mild non-monotonicity is normal for accelerated descent.
const RESTART_SLACK: f64 = 0.05;

/// Nesterov-accelerated gradient descent with a restart safeguard: whenever
/// the lookahead loss jumps, momentum resets and the step halves, which
/// keeps the fixed step safe under any column scaling. There is no line
/// search — each extra loss pass costs as much as a gradient step, and
/// acceleration buys far more progress per pass inside the small iteration
/// budgets the subset-search fitness runs on.
#[inline(always)]
fn train_loop_body<const K: usize, const FUSED: bool>(
    x: &Matrix,
    y: &[usize],
    cfg: &LogisticConfig,
    span: RowSpan,
) -> Vec<f64> {
    let dim = (x.cols + 1) * K;
    let mut w = vec![0.0f64; dim];
    let mut w_prev = vec![0.0f64; dim];
    let mut look = vec![0.0f64; dim];
    let mut grad = vec![0.0f64; dim];
    // At w = 0 every logit is zero: the loss is exactly ln K (the ridge term
    // vanishes) and every row's distribution is uniform, so the first pass
    // is free.
    let mut probs = vec![1.0 / K as f64; x.rows * K];
    let mut loss_prev = (K as f64).ln();
    let mut step = 1.0f64;

    grad_pass::<K, FUSED>(x, y, &w, cfg.ridge, span, &probs, &mut grad);
    if grad.iter().map(|g| g * g).sum::<f64>().sqrt() <= cfg.tol {
        return w;
    }
    for (wv, &g) in w.iter_mut().zip(&grad) {
        *wv = -step * g;
    }

    for it in 2..=cfg.max_iter {
        let mu = (it as f64 - 1.0) / (it as f64 + 2.0);
        for ((l, &wv), &pv) in look.iter_mut().zip(&w).zip(&w_prev) {
            *l = wv + mu * (wv - pv);
        }
        let mut loss_look = loss_pass::<K, FUSED>(x, y, &look, cfg.ridge, span, &mut probs);
        if loss_look > loss_prev + RESTART_SLACK {
            step *= 0.5;
            look.copy_from_slice(&w);
            w_prev.copy_from_slice(&w);
            loss_look = loss_pass::<K, FUSED>(x, y, &look, cfg.ridge, span, &mut probs);
        }
        grad_pass::<K, FUSED>(x, y, &look, cfg.ridge, span, &probs, &mut grad);
        if grad.iter().map(|g| g * g).sum::<f64>().sqrt() <= cfg.tol {
            break;
        }
        std::mem::swap(&mut w_prev, &mut w);
        for ((wv, &l), &g) in w.iter_mut().zip(&look).zip(&grad) {
            *wv = l - step * g;
        }
        loss_prev = loss_look;
    }
    w
}

/// Count rows in `start..end` whose highest logit matches `y`; ties go to
/// the lower class id, matching `predict_class_from_logits`.
#[inline(always)]
fn count_correct_body<const K: usize, const FUSED: bool>(
    x: &Matrix,
    y: &[usize],
    w_t: &[f64],
    start: usize,
    end: usize,
) -> usize {
    let mut correct = 0usize;
    for i in start..end {
        let z = row_logits::<K, FUSED>(w_t, x.row(i));
        let mut best = 0usize;
        for k in 1..K {
            if z[k] > z[best] {
                best = k;
            }
        }
        correct += (best == y[i]) as usize;
    }
    correct
}

/// AVX2+FMA instantiations; the `inline(always)` bodies compile under these
/// features, which is what lets the lane loops above become vector code.
///
/// Safety: callers must have verified avx2 and fma are available.
#[cfg(target_arch = "x86_64")]
#[target_feature(enable = "avx2,fma")]
unsafe fn train_loop_avx2<const K: usize>(
    x: &Matrix,
    y: &[usize],
    cfg: &LogisticConfig,
    span: RowSpan,
) -> Vec<f64> {
    train_loop_body::<K, true>(x, y, cfg, span)
}

#[cfg(target_arch = "x86_64")]
#[target_feature(enable = "avx2,fma")]
unsafe fn count_correct_avx2<const K: usize>(
    x: &Matrix,
    y: &[usize],
    w_t: &[f64],
    start: usize,
    end: usize,
) -> usize {
    count_correct_body::<K, true>(x, y, w_t, start, end)
}

#[inline]
fn simd_available() -> bool {
    #[cfg(target_arch = "x86_64")]
    {
        std::arch::is_x86_feature_detected!("avx2") && std::arch::is_x86_feature_detected!("fma")
    }
    #[cfg(not(target_arch = "x86_64"))]
    {
        false
    }
}

fn train_loop<const K: usize>(
    x: &Matrix,
    y: &[usize],
    cfg: &LogisticConfig,
    span: RowSpan,
) -> Vec<f64> {
    #[cfg(target_arch = "x86_64")]
    {
        if simd_available() {
            // Safety: both features were just detected at runtime.
            return unsafe { train_loop_avx2::<K>(x, y, cfg, span) };
        }
    }
    train_loop_body::<K, false>(x, y, cfg, span)
}

/// Batched accuracy count over a contiguous row range, taking the public
/// class-major weight layout.
pub(crate) fn count_correct_span(
    x: &Matrix,
    y: &[usize],
    n_classes: usize,
    w: &[f64],
    start: usize,
    end: usize,
) -> usize {
    macro_rules! run {
        ($k:literal) => {{
            let w_t = to_feature_major(w, x.cols, $k);
            #[cfg(target_arch = "x86_64")]
            {
                if simd_available() {
                    // Safety: features detected at runtime.
                    return unsafe { count_correct_avx2::<$k>(x, y, &w_t, start, end) };
                }
            }
            count_correct_body::<$k, false>(x, y, &w_t, start, end)
        }};
    }
    match n_classes {
        2 => run!(2),
        3 => run!(3),
        4 => run!(4),
        5 => run!(5),
        6 => run!(6),
        _ => {
            let mut scratch = vec![0.0f64; n_classes];
            let mut correct = 0usize;
            for i in start..end {
                let c = predict_class_from_logits(w, x.cols, n_classes, x.row(i), &mut scratch);
                correct += (c == y[i]) as usize;
            }
            correct
        }
    }
}

/// Training loop for a class count with no specialized kernel. Same
/// algorithm as `train_loop`, on the reference math; class counts this high
/// only occur through hand-built datasets, never in the pipeline.
fn train_loop_dyn(
    x: &Matrix,
    y: &[usize],
    n_classes: usize,
    cfg: &LogisticConfig,
    span: RowSpan,
) -> Vec<f64> {
    let restricted = restrict_rows(x, y, span);
    let (rx, ry) = (&restricted.0, &restricted.1);
    let dim = n_classes * (x.cols + 1);
    let mut w = vec![0.0f64; dim];
    let mut w_prev = vec![0.0f64; dim];
    let mut look = vec![0.0f64; dim];
    let mut probs = vec![0.0f64; rx.rows * n_classes];

    let mut loss_prev = loss_ref(rx, ry, n_classes, &w, cfg.ridge, &mut probs);
    let mut grad = grad_ref(rx, ry, n_classes, &w, cfg.ridge, &probs);
    let mut step = 1.0f64;

    if grad.iter().map(|g| g * g).sum::<f64>().sqrt() <= cfg.tol {
        return w;
    }
    for (wv, &g) in w.iter_mut().zip(&grad) {
        *wv = -step * g;
    }

    for it in 2..=cfg.max_iter {
        let mu = (it as f64 - 1.0) / (it as f64 + 2.0);
        for ((l, &wv), &pv) in look.iter_mut().zip(&w).zip(&w_prev) {
            *l = wv + mu * (wv - pv);
        }
        let mut loss_look = loss_ref(rx, ry, n_classes, &look, cfg.ridge, &mut probs);
        if loss_look > loss_prev + RESTART_SLACK {
            step *= 0.5;
            look.copy_from_slice(&w);
            w_prev.copy_from_slice(&w);
            loss_look = loss_ref(rx, ry, n_classes, &look, cfg.ridge, &mut probs);
        }
        grad = grad_ref(rx, ry, n_classes, &look, cfg.ridge, &probs);
        if grad.iter().map(|g| g * g).sum::<f64>().sqrt() <= cfg.tol {
            break;
        }
        std::mem::swap(&mut w_prev, &mut w);
        for ((wv, &l), &g) in w.iter_mut().zip(&look).zip(&grad) {
            *wv = l - step * g;
        }
        loss_prev = loss_look;
    }
    w
}

fn restrict_rows(x: &Matrix, y: &[usize], span: RowSpan) -> (Matrix, Vec<usize>) {
    let mut data = Vec::with_capacity(span.len(x.rows) * x.cols);
    let mut labels = Vec::with_capacity(span.len(x.rows));
    for (start, end) in span.segments(x.rows) {
        for i in start..end {
            data.extend_from_slice(x.row(i));
            labels.push(y[i]);
        }
    }
    (Matrix::new(labels.len(), x.cols, data), labels)
}

pub(crate) fn lr_train_span(
    x: &Matrix,
    y: &[usize],
    n_classes: usize,
    cfg: &LogisticConfig,
    span: RowSpan,
) -> Vec<f64> {
    let w_t = match n_classes {
        2 => train_loop::<2>(x, y, cfg, span),
        3 => train_loop::<3>(x, y, cfg, span),
        4 => train_loop::<4>(x, y, cfg, span),
        5 => train_loop::<5>(x, y, cfg, span),
        6 => train_loop::<6>(x, y, cfg, span),
        k => return train_loop_dyn(x, y, k, cfg, span),
    };
    to_class_major(&w_t, x.cols, n_classes)
}

pub(crate) fn train(x: &Matrix, y: &[usize], n_classes: usize, cfg: &LogisticConfig) -> LogisticModel {
    let weights = lr_train_span(x, y, n_classes, cfg, RowSpan::all());
    LogisticModel {
        weights,
        n_features: x.cols,
        n_classes,
    }
}

// ---------------------------------------------------------------------------
// Reference loss/gradient on libm, backing the public gradient-check entry
// point. Kept separate from the training kernels so the oracle math is the
// plainest possible transcription of the objective.

fn loss_ref(
    x: &Matrix,
    y: &[usize],
    n_classes: usize,
    w: &[f64],
    ridge: f64,
    probs: &mut [f64],
) -> f64 {
    let n_features = x.cols;
    let mut z = vec![0.0f64; n_classes];
    let mut loss = 0.0;
    for i in 0..x.rows {
        logits_into(w, n_features, n_classes, x.row(i), &mut z);
        let mut m = f64::NEG_INFINITY;
        for &v in z.iter() {
            if v > m {
                m = v;
            }
        }
        let zy = z[y[i]];
        let mut sum = 0.0;
        for v in z.iter_mut() {
            *v = (*v - m).exp();
            sum += *v;
        }
        loss += m + sum.ln() - zy;
        let inv = 1.0 / sum;
        for (k, &e) in z.iter().enumerate() {
            probs[i * n_classes + k] = e * inv;
        }
    }
    loss /= x.rows as f64;
    if ridge > 0.0 {
        let stride = n_features + 1;
        let mut reg = 0.0;
        for k in 0..n_classes {
            for f in 0..n_features {
                let v = w[k * stride + f];
                reg += v * v;
            }
        }
        loss += 0.5 * ridge * reg;
    }
    loss
}

/// Loss and gradient of the regularized mean cross-entropy at `w`, over all
/// rows. `w` holds `n_classes * (n_features + 1)` values, bias last per
/// class; the bias is not penalized.
pub fn lr_loss_and_gradient(
    x: &Matrix,
    y: &[usize],
    n_classes: usize,
    w: &[f64],
    ridge: f64,
) -> Result<(f64, Vec<f64>)> {
    if x.rows == 0 {
        return Err(Error::Invalid("loss needs at least one row".into()));
    }
    if y.len() != x.rows {
        return Err(Error::Invalid(format!(
            "{} labels for {} rows",
            y.len(),
            x.rows
        )));
    }
    if n_classes < 2 {
        return Err(Error::Invalid("need at least 2 classes".into()));
    }
    if let Some(&bad) = y.iter().find(|&&c| c >= n_classes) {
        return Err(Error::Invalid(format!(
            "label {bad} outside 0..{n_classes}"
        )));
    }
    let expect = n_classes * (x.cols + 1);
    if w.len() != expect {
        return Err(Error::Invalid(format!(
            "weight vector has {} entries, expected {expect}",
            w.len()
        )));
    }
    if !(ridge.is_finite() && ridge >= 0.0) {
        return Err(Error::Invalid(format!("bad ridge: {ridge}")));
    }
    let mut probs = vec![0.0f64; x.rows * n_classes];
    let loss = loss_ref(x, y, n_classes, w, ridge, &mut probs);
    let grad = grad_ref(x, y, n_classes, w, ridge, &probs);
    Ok((loss, grad))
}

/// Gradient of the reference loss from stored row probabilities.
fn grad_ref(
    x: &Matrix,
    y: &[usize],
    n_classes: usize,
    w: &[f64],
    ridge: f64,
    probs: &[f64],
) -> Vec<f64> {
    let stride = x.cols + 1;
    let mut grad = vec![0.0f64; n_classes * stride];
    let inv_n = 1.0 / x.rows as f64;
    for i in 0..x.rows {
        let row = x.row(i);
        for k in 0..n_classes {
            let coef = (probs[i * n_classes + k] - if y[i] == k { 1.0 } else { 0.0 }) * inv_n;
            let gk = &mut grad[k * stride..(k + 1) * stride];
            for (g, &xv) in gk[..x.cols].iter_mut().zip(row) {
                *g += coef * xv;
            }
            gk[x.cols] += coef;
        }
    }
    if ridge > 0.0 {
        for k in 0..n_classes {
            for f in 0..x.cols {
                grad[k * stride + f] += ridge * w[k * stride + f];
            }
        }
    }
    grad
}
