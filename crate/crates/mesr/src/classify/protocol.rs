//! Cost selection by stratified cross-validation and the subject-grouped
//! evaluation protocols.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::classify::{svm_train_with, LabeledSample, SvmOptions};
use crate::error::{Error, Result};

/// The cost search grid.
pub const COST_GRID: [f64; 6] = [0.1, 1.0, 2.0, 10.0, 100.0, 1000.0];

/// Folds of the cost search.
pub const COST_FOLDS: usize = 5;

/// Outcome of the cross-validated cost search.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CostSelection {
    pub cost: f64,
    /// Mean fold accuracy per grid entry, aligned with [`COST_GRID`].
    pub mean_accuracy: Vec<f64>,
    pub warnings: Vec<String>,
}

/// Stratified fold assignment: samples of each class are dealt round-robin
/// over the folds in input order.
fn stratified_folds(samples: &[LabeledSample], folds: usize) -> Vec<usize> {
    let mut counters: BTreeMap<&str, usize> = BTreeMap::new();
    samples
        .iter()
        .map(|s| {
            let c = counters.entry(s.label.as_str()).or_insert(0);
            let fold = *c % folds;
            *c += 1;
            fold
        })
        .collect()
}

/// Picks the cost with the best stratified cross-validation accuracy on
/// the training data; ties resolve to the smallest cost.
pub fn select_cost(samples: &[LabeledSample], options: &SvmOptions) -> Result<CostSelection> {
    if samples.len() < COST_FOLDS {
        return Err(Error::InvalidParameter(format!(
            "cost search needs at least {COST_FOLDS} samples, got {}",
            samples.len()
        )));
    }
    let assignment = stratified_folds(samples, COST_FOLDS);
    let mut warnings = Vec::new();
    let mut mean_accuracy = Vec::with_capacity(COST_GRID.len());

    for &cost in COST_GRID.iter() {
        let mut fold_scores = Vec::new();
        for fold in 0..COST_FOLDS {
            let train: Vec<LabeledSample> = samples
                .iter()
                .zip(&assignment)
                .filter(|(_, &f)| f != fold)
                .map(|(s, _)| s.clone())
                .collect();
            let test: Vec<&LabeledSample> = samples
                .iter()
                .zip(&assignment)
                .filter(|(_, &f)| f == fold)
                .map(|(s, _)| s)
                .collect();
            if test.is_empty() {
                continue;
            }
            let classes: BTreeSet<&str> = train.iter().map(|s| s.label.as_str()).collect();
            if classes.len() < 2 {
                warnings.push(format!(
                    "fold {fold} skipped at cost {cost}: training part has {} class(es)",
                    classes.len()
                ));
                continue;
            }
            let model = svm_train_with(&train, &SvmOptions { cost, ..*options })?;
            let correct = test
                .iter()
                .filter(|s| {
                    model
                        .predict(&s.values)
                        .map(|p| p == s.label)
                        .unwrap_or(false)
                })
                .count();
            fold_scores.push(correct as f64 / test.len() as f64);
        }
        if fold_scores.is_empty() {
            return Err(Error::Validation(
                "every fold was degenerate in the cost search".into(),
            ));
        }
        mean_accuracy.push(fold_scores.iter().sum::<f64>() / fold_scores.len() as f64);
    }

    let mut best = 0usize;
    for i in 1..COST_GRID.len() {
        if mean_accuracy[i] > mean_accuracy[best] {
            best = i;
        }
    }
    Ok(CostSelection {
        cost: COST_GRID[best],
        mean_accuracy,
        warnings,
    })
}

/// Evaluation protocol.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Protocol {
    LeaveOneSubjectOut,
    LeaveOneSampleOut,
}

/// Protocol evaluation report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalOutcome {
    pub accuracy: f64,
    pub correct: usize,
    pub total: usize,
    /// Class names indexing the confusion matrix.
    pub classes: Vec<String>,
    /// `confusion[true][predicted]`.
    pub confusion: Vec<Vec<usize>>,
    /// Per-group `(group, correct, total)` in deterministic group order.
    pub per_group: Vec<(String, usize, usize)>,
    pub rounds: usize,
    pub warnings: Vec<String>,
}

/// Evaluates samples under the chosen protocol: per held-out group, the
/// cost search and training see only the remaining groups.
pub fn loso_evaluate(
    samples: &[LabeledSample],
    options: &SvmOptions,
    protocol: Protocol,
) -> Result<EvalOutcome> {
    if samples.is_empty() {
        return Err(Error::InvalidParameter("no samples".into()));
    }
    let classes: Vec<String> = samples
        .iter()
        .map(|s| s.label.clone())
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let class_index: BTreeMap<&str, usize> = classes
        .iter()
        .enumerate()
        .map(|(i, c)| (c.as_str(), i))
        .collect();

    let groups: Vec<String> = match protocol {
        Protocol::LeaveOneSubjectOut => samples
            .iter()
            .map(|s| s.subject.clone())
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect(),
        Protocol::LeaveOneSampleOut => (0..samples.len()).map(|i| format!("#{i}")).collect(),
    };
    if protocol == Protocol::LeaveOneSubjectOut && groups.len() < 2 {
        return Err(Error::InvalidParameter(
            "leave-one-subject-out needs at least two subjects".into(),
        ));
    }

    let in_group = |s_idx: usize, group: &str| -> bool {
        match protocol {
            Protocol::LeaveOneSubjectOut => samples[s_idx].subject == group,
            Protocol::LeaveOneSampleOut => format!("#{s_idx}") == group,
        }
    };

    let mut confusion = vec![vec![0usize; classes.len()]; classes.len()];
    let mut per_group = Vec::new();
    let mut warnings = Vec::new();
    let mut correct = 0usize;
    let mut total = 0usize;
    let mut rounds = 0usize;

    for group in &groups {
        let train: Vec<LabeledSample> = (0..samples.len())
            .filter(|&i| !in_group(i, group))
            .map(|i| samples[i].clone())
            .collect();
        let test: Vec<&LabeledSample> = (0..samples.len())
            .filter(|&i| in_group(i, group))
            .map(|i| &samples[i])
            .collect();
        if test.is_empty() {
            continue;
        }
        rounds += 1;

        let train_classes: BTreeSet<&str> = train.iter().map(|s| s.label.as_str()).collect();
        let mut group_correct = 0usize;
        if train_classes.len() < 2 {
            warnings.push(format!(
                "group {group}: training data degenerate ({} class(es)); all samples counted as errors",
                train_classes.len()
            ));
            for s in &test {
                let t = class_index[s.label.as_str()];
                // no prediction possible; count in the confusion diagonal's
                // complement by attributing to the first other class
                let p = (t + 1) % classes.len();
                confusion[t][p] += 1;
            }
            total += test.len();
            per_group.push((group.clone(), 0, test.len()));
            continue;
        }

        // classes present in the test group but absent from training
        for s in &test {
            if !train_classes.contains(s.label.as_str()) {
                warnings.push(format!(
                    "group {group}: class {:?} unseen in training; its samples count as errors",
                    s.label
                ));
                break;
            }
        }

        let selection = if train.len() >= COST_FOLDS {
            select_cost(&train, options)?
        } else {
            CostSelection {
                cost: options.cost,
                mean_accuracy: vec![],
                warnings: vec![format!(
                    "group {group}: too few training samples for the cost search; using cost {}",
                    options.cost
                )],
            }
        };
        warnings.extend(selection.warnings.iter().cloned());
        let model = svm_train_with(
            &train,
            &SvmOptions {
                cost: selection.cost,
                ..*options
            },
        )?;

        for s in &test {
            let predicted = model.predict(&s.values)?;
            let t = class_index[s.label.as_str()];
            let p = class_index[predicted];
            confusion[t][p] += 1;
            if predicted == s.label {
                group_correct += 1;
            }
        }
        correct += group_correct;
        total += test.len();
        per_group.push((group.clone(), group_correct, test.len()));
    }

    Ok(EvalOutcome {
        accuracy: if total == 0 {
            0.0
        } else {
            correct as f64 / total as f64
        },
        correct,
        total,
        classes,
        confusion,
        per_group,
        rounds,
        warnings,
    })
}
