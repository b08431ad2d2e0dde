//! Greedy decision tree on numeric features, splitting by information gain
//! at midpoint thresholds.

use crate::dataset::Matrix;
use crate::error::{Error, Result};
use crate::filters::entropy;

#[derive(Debug, Clone)]
pub(crate) enum Node {
    Leaf {
        dist: Vec<f64>,
    },
    Split {
        col: usize,
        threshold: f64,
        left: Box<Node>,
        right: Box<Node>,
    },
}

#[derive(Debug, Clone)]
pub struct TreeModel {
    root: Node,
    /// Deepest split level reached; a training diagnostic.
    #[allow(dead_code)]
    pub depth: usize,
}

/// Grow a tree until nodes are pure, too small to split with `min_leaf`
/// rows per side, or `max_depth` deep. The best split maximizes information
/// gain; ties resolve to the lower column index, then the lower threshold.
/// A node that is not pure still splits on a zero-gain candidate when one is
/// legal, which lets parity-style interactions (invisible to any single
/// split's gain) be separated one level further down.
pub(crate) fn train(
    x: &Matrix,
    y: &[usize],
    n_classes: usize,
    min_leaf: usize,
    max_depth: usize,
) -> Result<TreeModel> {
    if x.rows == 0 {
        return Err(Error::Invalid("cannot grow a tree on zero rows".into()));
    }
    let rows: Vec<usize> = (0..x.rows).collect();
    let mut depth_seen = 0;
    let root = grow(x, y, n_classes, &rows, min_leaf, max_depth, 0, &mut depth_seen);
    Ok(TreeModel {
        root,
        depth: depth_seen,
    })
}

fn class_counts(y: &[usize], rows: &[usize], n_classes: usize) -> Vec<usize> {
    let mut counts = vec![0usize; n_classes];
    for &r in rows {
        counts[y[r]] += 1;
    }
    counts
}

fn leaf(counts: &[usize]) -> Node {
    let total: usize = counts.iter().sum();
    let dist = counts
        .iter()
        .map(|&c| c as f64 / total as f64)
        .collect();
    Node::Leaf { dist }
}

struct Candidate {
    col: usize,
    threshold: f64,
    gain: f64,
}

fn best_split(
    x: &Matrix,
    y: &[usize],
    n_classes: usize,
    rows: &[usize],
    min_leaf: usize,
    parent_entropy: f64,
) -> Option<Candidate> {
    let n = rows.len();
    let mut best: Option<Candidate> = None;
    let mut col_vals: Vec<(f64, usize)> = Vec::with_capacity(n);
    for col in 0..x.cols {
        col_vals.clear();
        col_vals.extend(rows.iter().map(|&r| (x.get(r, col), y[r])));
        col_vals.sort_by(|a, b| a.0.total_cmp(&b.0));

        let mut left = vec![0usize; n_classes];
        let mut right = class_counts(y, rows, n_classes);
        let mut moved = 0usize;
        for w in 0..n - 1 {
            let (v, c) = col_vals[w];
            left[c] += 1;
            right[c] -= 1;
            moved += 1;
            let next = col_vals[w + 1].0;
            if next == v {
                continue; // can't cut between equal values
            }
            if moved < min_leaf || n - moved < min_leaf {
                continue;
            }
            let threshold = v + (next - v) / 2.0;
            let h_left = entropy(&left);
            let h_right = entropy(&right);
            let frac = moved as f64 / n as f64;
            let gain = parent_entropy - frac * h_left - (1.0 - frac) * h_right;
            let better = match &best {
                None => true,
                Some(b) => {
                    gain > b.gain
                        || (gain == b.gain
                            && (col < b.col || (col == b.col && threshold < b.threshold)))
                }
            };
            if better {
                best = Some(Candidate {
                    col,
                    threshold,
                    gain,
                });
            }
        }
    }
    best
}

#[allow(clippy::too_many_arguments)]
fn grow(
    x: &Matrix,
    y: &[usize],
    n_classes: usize,
    rows: &[usize],
    min_leaf: usize,
    max_depth: usize,
    depth: usize,
    depth_seen: &mut usize,
) -> Node {
    *depth_seen = (*depth_seen).max(depth);
    let counts = class_counts(y, rows, n_classes);
    let pure = counts.iter().filter(|&&c| c > 0).count() <= 1;
    if pure || depth >= max_depth {
        return leaf(&counts);
    }
    let parent_entropy = entropy(&counts);
    let Some(cand) = best_split(x, y, n_classes, rows, min_leaf, parent_entropy) else {
        return leaf(&counts);
    };
    let (left_rows, right_rows): (Vec<usize>, Vec<usize>) = rows
        .iter()
        .partition(|&&r| x.get(r, cand.col) <= cand.threshold);
    Node::Split {
        col: cand.col,
        threshold: cand.threshold,
        left: Box::new(grow(
            x, y, n_classes, &left_rows, min_leaf, max_depth, depth + 1, depth_seen,
        )),
        right: Box::new(grow(
            x, y, n_classes, &right_rows, min_leaf, max_depth, depth + 1, depth_seen,
        )),
    }
}

impl TreeModel {
    pub fn distribution(&self, x: &[f64]) -> Vec<f64> {
        let mut node = &self.root;
        loop {
            match node {
                Node::Leaf { dist } => return dist.clone(),
                Node::Split {
                    col,
                    threshold,
                    left,
                    right,
                } => {
                    node = if x[*col] <= *threshold { left } else { right };
                }
            }
        }
    }
}
