//! Train the linear SVM on toy data: cost search, one-vs-one machines,
//! and both grouped evaluation protocols.

use mesr::classify::{
    loso_evaluate, select_cost, svm_train, LabeledSample, Protocol, SvmOptions, COST_GRID,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn blobs(seed: u64, per_class: usize, spread: f64) -> Vec<LabeledSample> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let centers = [(0.0, 3.0), (3.0, -2.0), (-3.0, -2.0)];
    let labels = ["positive", "negative", "surprise"];
    let mut out = Vec::new();
    for (c, (cx, cy)) in centers.iter().enumerate() {
        for i in 0..per_class {
            out.push(LabeledSample {
                values: vec![
                    cx + rng.gen_range(-spread..spread),
                    cy + rng.gen_range(-spread..spread),
                ],
                label: labels[c].into(),
                subject: format!("s{}", i % 4),
            });
        }
    }
    out
}

fn main() -> mesr::Result<()> {
    let data = blobs(11, 20, 2.0);
    println!("cost grid: {COST_GRID:?}");

    let selection = select_cost(&data, &SvmOptions::default())?;
    for (c, acc) in COST_GRID.iter().zip(&selection.mean_accuracy) {
        println!("  C = {c:6}: mean fold accuracy {acc:.3}");
    }
    println!("selected C = {}", selection.cost);

    let model = svm_train(&data, selection.cost)?;
    println!(
        "{} classes -> {} pairwise machines",
        model.classes.len(),
        model.machines.len()
    );

    for protocol in [Protocol::LeaveOneSubjectOut, Protocol::LeaveOneSampleOut] {
        let outcome = loso_evaluate(&data, &SvmOptions::default(), protocol)?;
        println!(
            "{protocol:?}: accuracy {:.3} over {} rounds",
            outcome.accuracy, outcome.rounds
        );
    }
    Ok(())
}
