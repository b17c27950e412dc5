//! Magnify a sub-pixel oscillation and measure the displacement before
//! and after, at several magnification levels.

use mesr::magnify::{magnify, MagnifyParams};
use mesr::media::{Frame, FrameSequence};

/// Horizontal displacement of the sinusoidal test pattern, via its phase.
fn measure_shift(frame: &Frame, wavelength: f64) -> f64 {
    let mut s = 0.0;
    let mut c = 0.0;
    for y in 0..frame.height() {
        for x in 0..frame.width() {
            let a = std::f64::consts::TAU * x as f64 / wavelength;
            let v = frame.get(x, y) - 0.5;
            s += v * a.sin();
            c += v * a.cos();
        }
    }
    (-c).atan2(s) * wavelength / std::f64::consts::TAU
}

fn main() -> mesr::Result<()> {
    let fps = 30.0;
    let amplitude = 0.5; // pixels
    let clip = FrameSequence::new(
        (0..60)
            .map(|t| {
                let d = amplitude * (std::f64::consts::TAU * 2.0 * t as f64 / fps).sin();
                Frame::from_fn(64, 32, |x, _| {
                    0.5 + 0.2 * (std::f64::consts::TAU * (x as f64 - d) / 64.0).sin()
                })
            })
            .collect(),
        fps,
        "oscillation",
    )?;

    println!("input oscillation: +/-{amplitude} px at 2 Hz, {fps} fps");
    for alpha in [1.0, 2.0, 4.0, 8.0] {
        let params = MagnifyParams {
            alpha,
            levels: 5,
            // match the guard to the actual half-pixel motion
            delta_assumed: 0.5,
            ..Default::default()
        };
        let out = magnify(&clip, &params)?;
        let measured = out
            .frames()
            .iter()
            .map(|f| measure_shift(f, 64.0).abs())
            .fold(0.0f64, f64::max);
        println!("alpha {alpha:4}: measured amplitude {measured:.3} px");
    }
    Ok(())
}
