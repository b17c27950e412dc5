//! Compute the dynamic-texture descriptors of a clip on each plane
//! combination and show the layout arithmetic and the slicing property.

use mesr::features::{
    higo_top, hog_top, lbp_top, CuboidPartition, GlobalNorm, LbpParams, PlaneCombination,
};
use mesr::media::synth::textured_frame;
use mesr::media::FrameSequence;

fn main() -> mesr::Result<()> {
    let clip = FrameSequence::new(
        (0..10).map(|i| textured_frame(48, 48, 7000 + i)).collect(),
        25.0,
        "demo",
    )?;
    let partition = CuboidPartition::new(4, 4, 2);
    let lbp = LbpParams {
        p: 8,
        r: 1.0,
        uniform: true,
    };

    println!("partition 4x4x2 = {} cuboids", partition.count());
    for combo in PlaneCombination::ALL {
        let d = lbp_top(&clip, &partition, combo, &lbp)?;
        let g = higo_top(&clip, &partition, combo, 8, GlobalNorm::L2)?;
        println!(
            "{combo:>5}: lbp-{combo} length {:5} ({} planes x 59 bins), gradient length {:4}",
            d.len(),
            combo.planes().len(),
            g.len()
        );
    }

    // plane-combination vectors are exact sub-slices of the all-planes
    // vector
    let top = hog_top(
        &clip,
        &partition,
        PlaneCombination::Top,
        8,
        GlobalNorm::None,
    )?;
    let xot = hog_top(
        &clip,
        &partition,
        PlaneCombination::XOt,
        8,
        GlobalNorm::None,
    )?;
    let mut gathered = Vec::new();
    for cuboid in 0..partition.count() {
        gathered.extend_from_slice(top.segment(cuboid, 1)); // XT is plane 1 of TOP
    }
    println!(
        "xot equals the XT slices of top: {}",
        if gathered == xot.values { "yes" } else { "no" }
    );
    Ok(())
}
