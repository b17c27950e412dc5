//! Multi-class linear SVM classification with one-vs-one machines,
//! cross-validated cost search and subject-grouped evaluation protocols.

pub mod svm;

mod protocol;

pub use protocol::{loso_evaluate, select_cost, CostSelection, EvalOutcome, Protocol, COST_GRID};
pub use svm::{decision, train_binary, BinaryOutcome, DUAL_TOLERANCE, MAX_EPOCHS};

use std::collections::BTreeSet;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One training or test example.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabeledSample {
    pub values: Vec<f64>,
    pub label: String,
    pub subject: String,
}

/// Training options.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SvmOptions {
    pub cost: f64,
    /// Per-dimension z-scoring from training statistics.
    pub standardize: bool,
}

impl Default for SvmOptions {
    fn default() -> Self {
        SvmOptions {
            cost: 1.0,
            standardize: true,
        }
    }
}

/// Per-dimension affine scaler fitted on training data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scaler {
    pub mean: Vec<f64>,
    pub std: Vec<f64>,
}

impl Scaler {
    fn fit(rows: &[&[f64]]) -> Scaler {
        let d = rows[0].len();
        let n = rows.len() as f64;
        let mut mean = vec![0.0; d];
        for r in rows {
            for (m, v) in mean.iter_mut().zip(*r) {
                *m += v;
            }
        }
        for m in &mut mean {
            *m /= n;
        }
        let mut var = vec![0.0; d];
        for r in rows {
            for ((s, v), m) in var.iter_mut().zip(*r).zip(&mean) {
                *s += (v - m) * (v - m);
            }
        }
        let std = var
            .iter()
            .map(|v| {
                let s = (v / n).sqrt();
                if s < 1e-12 {
                    1.0
                } else {
                    s
                }
            })
            .collect();
        Scaler { mean, std }
    }

    fn apply(&self, row: &[f64]) -> Vec<f64> {
        row.iter()
            .zip(&self.mean)
            .zip(&self.std)
            .map(|((v, m), s)| (v - m) / s)
            .collect()
    }
}

/// One pairwise machine; a positive decision votes for `class_a`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairMachine {
    pub class_a: usize,
    pub class_b: usize,
    pub weights: Vec<f64>,
}

/// A trained one-vs-one multi-class model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SvmModel {
    pub classes: Vec<String>,
    pub machines: Vec<PairMachine>,
    pub scaler: Option<Scaler>,
    pub cost: f64,
}

/// Trains one-vs-one machines over every class pair.
pub fn svm_train(samples: &[LabeledSample], cost: f64) -> Result<SvmModel> {
    svm_train_with(
        samples,
        &SvmOptions {
            cost,
            ..Default::default()
        },
    )
}

pub fn svm_train_with(samples: &[LabeledSample], options: &SvmOptions) -> Result<SvmModel> {
    if samples.is_empty() {
        return Err(Error::InvalidParameter("no training samples".into()));
    }
    let d = samples[0].values.len();
    if samples.iter().any(|s| s.values.len() != d) {
        return Err(Error::InvalidParameter(
            "feature dimension mismatch across samples".into(),
        ));
    }
    let classes: Vec<String> = samples
        .iter()
        .map(|s| s.label.clone())
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    if classes.len() < 2 {
        return Err(Error::InvalidParameter(
            "training needs at least two classes".into(),
        ));
    }

    let scaler = options.standardize.then(|| {
        Scaler::fit(
            &samples
                .iter()
                .map(|s| s.values.as_slice())
                .collect::<Vec<_>>(),
        )
    });
    let scaled: Vec<Vec<f64>> = samples
        .iter()
        .map(|s| match &scaler {
            Some(sc) => sc.apply(&s.values),
            None => s.values.clone(),
        })
        .collect();

    let mut machines = Vec::new();
    for a in 0..classes.len() {
        for b in a + 1..classes.len() {
            let mut x = Vec::new();
            let mut y = Vec::new();
            for (s, row) in samples.iter().zip(&scaled) {
                if s.label == classes[a] {
                    x.push(row.clone());
                    y.push(1.0);
                } else if s.label == classes[b] {
                    x.push(row.clone());
                    y.push(-1.0);
                }
            }
            let out = train_binary(&x, &y, options.cost)?;
            machines.push(PairMachine {
                class_a: a,
                class_b: b,
                weights: out.weights,
            });
        }
    }
    Ok(SvmModel {
        classes,
        machines,
        scaler,
        cost: options.cost,
    })
}

impl SvmModel {
    /// Majority vote over the pairwise machines; ties break on summed
    /// signed decision values, then on the lowest class index.
    pub fn predict(&self, values: &[f64]) -> Result<&str> {
        let row = match &self.scaler {
            Some(sc) => {
                if values.len() != sc.mean.len() {
                    return Err(Error::InvalidParameter(format!(
                        "expected {} features, got {}",
                        sc.mean.len(),
                        values.len()
                    )));
                }
                sc.apply(values)
            }
            None => values.to_vec(),
        };
        let mut votes = vec![0usize; self.classes.len()];
        let mut scores = vec![0.0f64; self.classes.len()];
        for m in &self.machines {
            let dv = decision(&m.weights, &row);
            if dv >= 0.0 {
                votes[m.class_a] += 1;
            } else {
                votes[m.class_b] += 1;
            }
            scores[m.class_a] += dv;
            scores[m.class_b] -= dv;
        }
        let mut best = 0usize;
        for i in 1..self.classes.len() {
            if votes[i] > votes[best] || (votes[i] == votes[best] && scores[i] > scores[best]) {
                best = i;
            }
        }
        Ok(&self.classes[best])
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<SvmModel> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_json()?).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<SvmModel> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        SvmModel::from_json(&text)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    pub(crate) fn sample(values: Vec<f64>, label: &str, subject: &str) -> LabeledSample {
        LabeledSample {
            values,
            label: label.into(),
            subject: subject.into(),
        }
    }

    fn three_class_blobs(seed: u64, per_class: usize, spread: f64) -> Vec<LabeledSample> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let centers = [(0.0, 3.0), (3.0, -2.0), (-3.0, -2.0)];
        let labels = ["positive", "negative", "surprise"];
        let mut out = Vec::new();
        for (c, (cx, cy)) in centers.iter().enumerate() {
            for i in 0..per_class {
                out.push(sample(
                    vec![
                        cx + rng.gen_range(-spread..spread),
                        cy + rng.gen_range(-spread..spread),
                    ],
                    labels[c],
                    &format!("s{}", i % 4),
                ));
            }
        }
        out
    }

    #[test]
    fn three_classes_build_three_machines_and_separate() {
        let data = three_class_blobs(1, 12, 0.5);
        let model = svm_train(&data, 10.0).unwrap();
        assert_eq!(model.machines.len(), 3);
        let correct = data
            .iter()
            .filter(|s| model.predict(&s.values).unwrap() == s.label)
            .count();
        assert_eq!(correct, data.len());
    }

    #[test]
    fn duplicating_samples_keeps_decisions() {
        let data = three_class_blobs(2, 10, 0.8);
        let mut doubled = data.clone();
        doubled.extend(data.iter().cloned());
        let a = svm_train(&data, 1.0).unwrap();
        let b = svm_train(&doubled, 1.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            let p = vec![rng.gen_range(-5.0..5.0), rng.gen_range(-5.0..5.0)];
            assert_eq!(a.predict(&p).unwrap(), b.predict(&p).unwrap());
        }
    }

    #[test]
    fn predictions_invariant_under_training_order() {
        let data = three_class_blobs(4, 10, 0.8);
        let mut shuffled = data.clone();
        shuffled.reverse();
        shuffled.swap(0, 7);
        let a = svm_train(&data, 10.0).unwrap();
        let b = svm_train(&shuffled, 10.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..200 {
            let p = vec![rng.gen_range(-5.0..5.0), rng.gen_range(-5.0..5.0)];
            assert_eq!(a.predict(&p).unwrap(), b.predict(&p).unwrap());
        }
    }

    #[test]
    fn single_class_and_dimension_mismatch_are_rejected() {
        let one = vec![sample(vec![1.0], "a", "s"); 4];
        assert!(svm_train(&one, 1.0).is_err());
        let bad = vec![
            sample(vec![1.0], "a", "s"),
            sample(vec![1.0, 2.0], "b", "s"),
        ];
        assert!(svm_train(&bad, 1.0).is_err());
    }

    #[test]
    fn vote_cycle_breaks_on_summed_decision_values() {
        // force a three-way vote cycle (a beats b, b beats c, c beats a);
        // every class holds one vote, so the summed signed decision
        // values decide, and the margins below favor class b
        let model = SvmModel {
            classes: vec!["a".into(), "b".into(), "c".into()],
            machines: vec![
                PairMachine {
                    class_a: 0,
                    class_b: 1,
                    weights: vec![0.0, 0.1], // a beats b, small margin
                },
                PairMachine {
                    class_a: 1,
                    class_b: 2,
                    weights: vec![0.0, 5.0], // b beats c, large margin
                },
                PairMachine {
                    class_a: 0,
                    class_b: 2,
                    weights: vec![0.0, -1.0], // c beats a
                },
            ],
            scaler: None,
            cost: 1.0,
        };
        // scores: a = 0.1 - 1.0, b = -0.1 + 5.0, c = -5.0 + 1.0
        assert_eq!(model.predict(&[1.0]).unwrap(), "b");
    }

    #[test]
    fn model_json_round_trip() {
        let data = three_class_blobs(6, 8, 0.5);
        let model = svm_train(&data, 2.0).unwrap();
        let text = model.to_json().unwrap();
        let back = SvmModel::from_json(&text).unwrap();
        assert_eq!(model, back);
    }
}
