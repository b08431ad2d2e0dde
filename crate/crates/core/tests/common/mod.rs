//! Reference implementations used to cross-check the library's scorers and
//! trainers. Everything here favors the most literal textbook formulation
//! over speed, and where possible a *different* algebraic form than the
//! library uses (mutual information instead of conditional entropy, central
//! differences instead of analytic gradients), so agreement is evidence
//! rather than repetition.

#![allow(dead_code)]

use attrsel_core::dataset::{Column, ColumnData, Matrix};
use attrsel_core::{AttributeGroup, AttributeInfo, Dataset, IncomeClass, SubsetFitness};
use rand::Rng;

/// Shannon entropy in bits of a count vector.
pub fn entropy_direct(counts: &[usize]) -> f64 {
    let n: usize = counts.iter().sum();
    if n == 0 {
        return 0.0;
    }
    let mut h = 0.0;
    for &c in counts {
        if c > 0 {
            let p = c as f64 / n as f64;
            h -= p * p.log2();
        }
    }
    h
}

fn joint_counts(x: &[u32], y: &[usize]) -> (Vec<Vec<usize>>, usize, usize) {
    let nx = *x.iter().max().unwrap() as usize + 1;
    let ny = *y.iter().max().unwrap() + 1;
    let mut t = vec![vec![0usize; ny]; nx];
    for (&a, &b) in x.iter().zip(y) {
        t[a as usize][b] += 1;
    }
    (t, nx, ny)
}

/// Information gain via the mutual-information double sum
/// Σ p(x,y)·log2(p(x,y) / (p(x)p(y))), algebraically equal to
/// H(Y) − H(Y|X) but a different computation.
pub fn info_gain_direct(x: &[u32], y: &[usize]) -> f64 {
    let (t, nx, ny) = joint_counts(x, y);
    let n = x.len() as f64;
    let row: Vec<usize> = t.iter().map(|r| r.iter().sum()).collect();
    let mut col = vec![0usize; ny];
    for r in &t {
        for (j, &v) in r.iter().enumerate() {
            col[j] += v;
        }
    }
    let mut mi = 0.0;
    for i in 0..nx {
        for j in 0..ny {
            let c = t[i][j];
            if c > 0 {
                let pxy = c as f64 / n;
                let px = row[i] as f64 / n;
                let py = col[j] as f64 / n;
                mi += pxy * (pxy / (px * py)).log2();
            }
        }
    }
    mi
}

pub fn gain_ratio_direct(x: &[u32], y: &[usize]) -> f64 {
    let nx = *x.iter().max().unwrap() as usize + 1;
    let mut counts = vec![0usize; nx];
    for &a in x {
        counts[a as usize] += 1;
    }
    let hx = entropy_direct(&counts);
    if hx == 0.0 {
        0.0
    } else {
        info_gain_direct(x, y) / hx
    }
}

/// Pearson chi-square from marginals; zero-marginal rows and columns are
/// skipped (their observed counts are necessarily zero).
pub fn chi_square_direct(x: &[u32], y: &[usize]) -> f64 {
    let (t, nx, ny) = joint_counts(x, y);
    let n = x.len() as f64;
    let row: Vec<usize> = t.iter().map(|r| r.iter().sum()).collect();
    let mut col = vec![0usize; ny];
    for r in &t {
        for (j, &v) in r.iter().enumerate() {
            col[j] += v;
        }
    }
    let mut stat = 0.0;
    for i in 0..nx {
        for j in 0..ny {
            if row[i] == 0 || col[j] == 0 {
                continue;
            }
            let e = row[i] as f64 * col[j] as f64 / n;
            let d = t[i][j] as f64 - e;
            stat += d * d / e;
        }
    }
    stat
}

/// Training accuracy of the one-rule: each attribute value predicts its
/// majority class, ties to the lower class id.
pub fn oner_direct(x: &[u32], y: &[usize]) -> f64 {
    let (t, nx, _) = joint_counts(x, y);
    let mut correct = 0usize;
    for i in 0..nx {
        let mut best_class = 0usize;
        let mut best = 0usize;
        for (c, &cnt) in t[i].iter().enumerate() {
            if cnt > best {
                best = cnt;
                best_class = c;
            }
        }
        correct += t[i][best_class];
    }
    correct as f64 / x.len() as f64
}

/// Brute-force neighbor-weighting reference: full distance matrix, full
/// sorts, no reuse. Hits pull a column's weight down by its normalized
/// difference; misses push it up, scaled by the miss class prior
/// renormalized over non-target classes; the sum is divided by rows × k.
pub fn relief_direct(d: &Dataset, k: usize) -> Vec<f64> {
    let n = d.n_rows();
    let labels = d.label_ids();
    let n_classes = d.n_classes();
    let counts = d.class_counts();
    let cols = d.columns();

    let value = |c: &Column, i: usize| -> f64 {
        match &c.data {
            ColumnData::Numeric(v) => v[i],
            ColumnData::Nominal { codes, .. } => codes[i] as f64,
        }
    };
    let range: Vec<f64> = cols
        .iter()
        .map(|c| match &c.data {
            ColumnData::Numeric(v) => {
                let lo = v.iter().cloned().fold(f64::INFINITY, f64::min);
                let hi = v.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
                hi - lo
            }
            ColumnData::Nominal { .. } => 1.0,
        })
        .collect();
    let diff = |ci: usize, a: usize, b: usize| -> f64 {
        match &cols[ci].data {
            ColumnData::Numeric(v) => {
                if range[ci] > 0.0 {
                    (v[a] - v[b]).abs() / range[ci]
                } else {
                    0.0
                }
            }
            ColumnData::Nominal { codes, .. } => (codes[a] != codes[b]) as usize as f64,
        }
    };
    let dist2 = |a: usize, b: usize| -> f64 {
        let mut s = 0.0;
        for c in cols {
            let dv = match &c.data {
                ColumnData::Numeric(_) => value(c, a) - value(c, b),
                ColumnData::Nominal { codes, .. } => (codes[a] != codes[b]) as usize as f64,
            };
            s += dv * dv;
        }
        s
    };

    let mut w = vec![0.0f64; cols.len()];
    for i in 0..n {
        for class in 0..n_classes {
            let mut cand: Vec<(f64, usize)> = (0..n)
                .filter(|&j| j != i && labels[j] == class)
                .map(|j| (dist2(i, j), j))
                .collect();
            cand.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
            cand.truncate(k);
            if class == labels[i] {
                for &(_, j) in &cand {
                    for (ci, wv) in w.iter_mut().enumerate() {
                        *wv -= diff(ci, i, j);
                    }
                }
            } else {
                let prior = counts[class] as f64 / n as f64;
                let target_prior = counts[labels[i]] as f64 / n as f64;
                let scale = prior / (1.0 - target_prior);
                for &(_, j) in &cand {
                    for (ci, wv) in w.iter_mut().enumerate() {
                        *wv += scale * diff(ci, i, j);
                    }
                }
            }
        }
    }
    for wv in w.iter_mut() {
        *wv /= (n * k) as f64;
    }
    w
}

/// Mean softmax cross-entropy plus an L2 term on the non-bias weights,
/// written from the definition with std exp/ln.
pub fn lr_loss_direct(x: &Matrix, y: &[usize], n_classes: usize, w: &[f64], ridge: f64) -> f64 {
    let stride = x.cols + 1;
    let mut loss = 0.0;
    for i in 0..x.rows {
        let row = x.row(i);
        let z: Vec<f64> = (0..n_classes)
            .map(|c| {
                let wc = &w[c * stride..(c + 1) * stride];
                row.iter().zip(wc).map(|(a, b)| a * b).sum::<f64>() + wc[x.cols]
            })
            .collect();
        let m = z.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let sum: f64 = z.iter().map(|v| (v - m).exp()).sum();
        loss += m + sum.ln() - z[y[i]];
    }
    loss /= x.rows as f64;
    let mut reg = 0.0;
    for c in 0..n_classes {
        for f in 0..x.cols {
            let v = w[c * stride + f];
            reg += v * v;
        }
    }
    loss + 0.5 * ridge * reg
}

/// Central-difference gradient of `lr_loss_direct`.
pub fn fd_gradient(
    x: &Matrix,
    y: &[usize],
    n_classes: usize,
    w: &[f64],
    ridge: f64,
    h: f64,
) -> Vec<f64> {
    let mut g = vec![0.0f64; w.len()];
    let mut probe = w.to_vec();
    for i in 0..w.len() {
        probe[i] = w[i] + h;
        let up = lr_loss_direct(x, y, n_classes, &probe, ridge);
        probe[i] = w[i] - h;
        let down = lr_loss_direct(x, y, n_classes, &probe, ridge);
        probe[i] = w[i];
        g[i] = (up - down) / (2.0 * h);
    }
    g
}

/// Best subset over all 2^n bitmasks; ties keep the earliest mask, the same
/// order a search that only improves on strict gains would settle on.
pub fn exhaustive_best<F: SubsetFitness + ?Sized>(n_bits: usize, f: &F) -> (Vec<bool>, f64) {
    assert!(n_bits <= 20, "exhaustive search explodes past 20 bits");
    let mut best_bits = vec![false; n_bits];
    let mut best = f.eval(&best_bits);
    for mask in 1u64..(1u64 << n_bits) {
        let bits: Vec<bool> = (0..n_bits).map(|b| mask >> b & 1 == 1).collect();
        let fit = f.eval(&bits);
        if fit > best {
            best = fit;
            best_bits = bits;
        }
    }
    (best_bits, best)
}

/// All-numeric dataset from column vectors; groups cycle through the five
/// families so grouping code has something to chew on.
pub fn numeric_dataset(cols: &[Vec<f64>], label_ids: &[usize], n_classes: usize) -> Dataset {
    let attributes: Vec<AttributeInfo> = (0..cols.len())
        .map(|i| AttributeInfo {
            name: format!("a{i}"),
            group: AttributeGroup::ALL[i % AttributeGroup::ALL.len()],
        })
        .collect();
    let columns: Vec<Column> = cols
        .iter()
        .enumerate()
        .map(|(i, v)| Column {
            name: format!("a{i}"),
            attr: i,
            data: ColumnData::Numeric(v.clone()),
        })
        .collect();
    let labels: Vec<IncomeClass> = label_ids.iter().map(|&c| IncomeClass::ALL[c]).collect();
    Dataset::new(attributes, columns, labels, n_classes, "income").unwrap()
}

/// Random discrete column/label pair with bounded alphabet sizes. Both
/// alphabets are guaranteed non-degenerate in length but not in usage, so
/// constant columns and single-class labels do occur.
pub fn random_table<R: Rng>(rng: &mut R, max_rows: usize, max_bins: u32) -> (Vec<u32>, Vec<usize>) {
    let rows = rng.random_range(1..=max_rows);
    let nx = rng.random_range(1..=max_bins);
    let ny = rng.random_range(1..=max_bins as usize);
    let x = (0..rows).map(|_| rng.random_range(0..nx)).collect();
    let y = (0..rows).map(|_| rng.random_range(0..ny)).collect();
    (x, y)
}
