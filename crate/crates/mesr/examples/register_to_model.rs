//! Register a clip to the built-in model face through a local-weighted-
//! mean warp fitted on frame-1 landmarks.

use mesr::geometry::{landmark_eye_centers, lwm_fit, model_face, register_clip};
use mesr::media::synth::textured_frame;
use mesr::media::FrameSequence;
use mesr::raster::Point;

fn main() -> mesr::Result<()> {
    let model = model_face();
    let (eye_a, eye_b) = landmark_eye_centers(&model);
    println!(
        "model face: inter-ocular distance {:.1} px",
        eye_a.distance(&eye_b)
    );

    // pretend the clip's face sits slightly scaled and shifted
    let clip_landmarks = model.map(|p| Point::new(0.95 * p.x + 6.0, 0.95 * p.y + 4.0));
    let warp = lwm_fit(&model, &clip_landmarks)?;
    println!(
        "max control residual of the fitted warp: {:.4} px",
        warp.max_control_residual(&model, &clip_landmarks)
    );

    let clip = FrameSequence::new(
        (0..4).map(|i| textured_frame(200, 200, 1234 + i)).collect(),
        25.0,
        "demo",
    )?;
    let registered = register_clip(&clip, &clip_landmarks, &model)?;
    println!(
        "registered clip: {} frames of {}x{} (face crop)",
        registered.len(),
        registered.width(),
        registered.height()
    );
    Ok(())
}
