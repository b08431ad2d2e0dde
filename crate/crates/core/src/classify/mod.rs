//! The five classifiers behind one train/predict interface.
//!
//! All models consume a dense feature matrix (the pipeline feeds them
//! standardized, one-hot encoded data) and predict a class index plus a
//! probability distribution over all classes. The class space is taken from
//! the dataset, so a training fold missing a class still yields
//! distributions over the full space with that class at probability zero
//! (or near it, for the discriminative models).

mod bayes;
mod knn;
mod logistic;
mod math;
mod oner;
mod tree;

pub use logistic::{lr_loss_and_gradient, LogisticConfig, LogisticModel};
pub(crate) use logistic::{count_correct_span, lr_train_span, RowSpan};

use crate::dataset::{Dataset, Matrix};
use crate::error::{Error, Result};

/// Which classifier to train, with its hyperparameters.
#[derive(Debug, Clone, PartialEq)]
pub enum ClassifierSpec {
    Logistic {
        ridge: f64,
        max_iter: usize,
        tol: f64,
    },
    NaiveBayes {
        var_floor: f64,
    },
    Knn {
        k: usize,
    },
    DecisionTree {
        min_leaf: usize,
        max_depth: usize,
    },
    OneRule,
}

impl ClassifierSpec {
    pub fn logistic_default() -> ClassifierSpec {
        let c = LogisticConfig::default();
        ClassifierSpec::Logistic {
            ridge: c.ridge,
            max_iter: c.max_iter,
            tol: c.tol,
        }
    }

    pub fn naive_bayes_default() -> ClassifierSpec {
        ClassifierSpec::NaiveBayes { var_floor: 1e-9 }
    }

    pub fn knn_default() -> ClassifierSpec {
        ClassifierSpec::Knn { k: 1 }
    }

    pub fn tree_default() -> ClassifierSpec {
        ClassifierSpec::DecisionTree {
            min_leaf: 2,
            max_depth: 25,
        }
    }

    /// The default evaluation panel.
    pub fn default_panel() -> Vec<ClassifierSpec> {
        vec![
            ClassifierSpec::logistic_default(),
            ClassifierSpec::naive_bayes_default(),
            ClassifierSpec::knn_default(),
            ClassifierSpec::tree_default(),
            ClassifierSpec::OneRule,
        ]
    }

    /// Stable name used in reports and config files.
    pub fn name(&self) -> String {
        match self {
            ClassifierSpec::Logistic { .. } => "logistic".to_string(),
            ClassifierSpec::NaiveBayes { .. } => "naive_bayes".to_string(),
            ClassifierSpec::Knn { k } => format!("knn:{k}"),
            ClassifierSpec::DecisionTree { .. } => "tree".to_string(),
            ClassifierSpec::OneRule => "oner".to_string(),
        }
    }

    /// Parse a config token: `logistic`, `naive_bayes`, `knn`, `knn:<k>`,
    /// `tree`, or `oner`.
    pub fn parse(token: &str) -> Result<ClassifierSpec> {
        let t = token.trim();
        if let Some(rest) = t.strip_prefix("knn:") {
            let k: usize = rest
                .trim()
                .parse()
                .map_err(|_| Error::Config(format!("bad knn neighbor count: {rest}")))?;
            if k == 0 {
                return Err(Error::Config("knn needs k >= 1".into()));
            }
            return Ok(ClassifierSpec::Knn { k });
        }
        match t {
            "logistic" | "logistic_regression" => Ok(ClassifierSpec::logistic_default()),
            "naive_bayes" | "nb" => Ok(ClassifierSpec::naive_bayes_default()),
            "knn" => Ok(ClassifierSpec::knn_default()),
            "tree" | "decision_tree" => Ok(ClassifierSpec::tree_default()),
            "oner" | "one_rule" => Ok(ClassifierSpec::OneRule),
            other => Err(Error::Config(format!("unknown classifier: {other}"))),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            ClassifierSpec::Logistic {
                ridge,
                max_iter,
                tol,
            } => {
                if !ridge.is_finite() || *ridge < 0.0 {
                    return Err(Error::Config(format!("bad ridge: {ridge}")));
                }
                if *max_iter == 0 {
                    return Err(Error::Config("logistic max_iter must be >= 1".into()));
                }
                if !tol.is_finite() || *tol < 0.0 {
                    return Err(Error::Config(format!("bad tol: {tol}")));
                }
            }
            ClassifierSpec::NaiveBayes { var_floor } => {
                if !var_floor.is_finite() || *var_floor <= 0.0 {
                    return Err(Error::Config(format!("bad var_floor: {var_floor}")));
                }
            }
            ClassifierSpec::Knn { k } => {
                if *k == 0 {
                    return Err(Error::Config("knn needs k >= 1".into()));
                }
            }
            ClassifierSpec::DecisionTree {
                min_leaf,
                max_depth,
            } => {
                if *min_leaf == 0 {
                    return Err(Error::Config("tree min_leaf must be >= 1".into()));
                }
                if *max_depth == 0 {
                    return Err(Error::Config("tree max_depth must be >= 1".into()));
                }
            }
            ClassifierSpec::OneRule => {}
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
enum ModelKind {
    Logistic(logistic::LogisticModel),
    NaiveBayes(bayes::NbModel),
    Knn(knn::KnnModel),
    Tree(tree::TreeModel),
    OneRule(oner::OneRuleModel),
}

/// A trained classifier ready to score feature rows.
#[derive(Debug, Clone)]
pub struct TrainedModel {
    pub spec: ClassifierSpec,
    pub n_features: usize,
    pub n_classes: usize,
    kind: ModelKind,
}

impl TrainedModel {
    /// Predict one row: the class index (ties in the distribution go to the
    /// lower class id) and the full probability distribution.
    pub fn predict(&self, x: &[f64]) -> Result<(usize, Vec<f64>)> {
        if x.len() != self.n_features {
            return Err(Error::Invalid(format!(
                "row has {} features, model expects {}",
                x.len(),
                self.n_features
            )));
        }
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::Invalid("row contains non-finite values".into()));
        }
        let dist = match &self.kind {
            ModelKind::Logistic(m) => m.distribution(x),
            ModelKind::NaiveBayes(m) => m.distribution(x),
            ModelKind::Knn(m) => m.distribution(x),
            ModelKind::Tree(m) => m.distribution(x),
            ModelKind::OneRule(m) => m.distribution(x),
        };
        let class = argmax(&dist);
        Ok((class, dist))
    }
}

/// Lowest index of the maximum value.
pub(crate) fn argmax(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate().skip(1) {
        if v > values[best] {
            best = i;
        }
    }
    best
}

/// Train `spec` on all rows of `d`.
pub fn train(spec: &ClassifierSpec, d: &Dataset) -> Result<TrainedModel> {
    spec.validate()?;
    if d.n_rows() == 0 {
        return Err(Error::Invalid("cannot train on an empty dataset".into()));
    }
    if d.n_cols() == 0 {
        return Err(Error::Invalid("cannot train with zero feature columns".into()));
    }
    let x = d.feature_matrix();
    let y = d.label_ids();
    let n_classes = d.n_classes();
    train_on_matrix(spec, &x, &y, n_classes)
}

/// Train on a prepared matrix; used by cross-validation to avoid rebuilding
/// datasets when only rows change.
pub(crate) fn train_on_matrix(
    spec: &ClassifierSpec,
    x: &Matrix,
    y: &[usize],
    n_classes: usize,
) -> Result<TrainedModel> {
    let kind = match spec {
        ClassifierSpec::Logistic {
            ridge,
            max_iter,
            tol,
        } => ModelKind::Logistic(logistic::train(
            x,
            y,
            n_classes,
            &LogisticConfig {
                ridge: *ridge,
                max_iter: *max_iter,
                tol: *tol,
            },
        )),
        ClassifierSpec::NaiveBayes { var_floor } => {
            ModelKind::NaiveBayes(bayes::train(x, y, n_classes, *var_floor))
        }
        ClassifierSpec::Knn { k } => ModelKind::Knn(knn::train(x, y, n_classes, *k)),
        ClassifierSpec::DecisionTree {
            min_leaf,
            max_depth,
        } => ModelKind::Tree(tree::train(x, y, n_classes, *min_leaf, *max_depth)?),
        ClassifierSpec::OneRule => ModelKind::OneRule(oner::train(x, y, n_classes)?),
    };
    Ok(TrainedModel {
        spec: spec.clone(),
        n_features: x.cols,
        n_classes,
        kind,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spec_tokens_round_trip() {
        for token in ["logistic", "naive_bayes", "knn:7", "tree", "oner"] {
            let spec = ClassifierSpec::parse(token).unwrap();
            assert_eq!(spec.name(), token);
        }
        assert_eq!(ClassifierSpec::parse("knn").unwrap().name(), "knn:1");
        assert!(ClassifierSpec::parse("svm").is_err());
        assert!(ClassifierSpec::parse("knn:0").is_err());
        assert!(ClassifierSpec::parse("knn:x").is_err());
    }

    #[test]
    fn argmax_breaks_ties_low() {
        assert_eq!(argmax(&[0.2, 0.5, 0.5]), 1);
        assert_eq!(argmax(&[0.5, 0.2, 0.5]), 0);
        assert_eq!(argmax(&[0.1]), 0);
    }
}
