//! Pyramidal Lucas-Kanade point tracking.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::media::Frame;
use crate::raster::{bilinear, reduce, Border, Point};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KltParams {
    /// Pyramid depth (1 = single scale).
    pub levels: usize,
    /// Side of the square integration window, odd.
    pub window: usize,
    /// Newton iterations per level.
    pub max_iterations: usize,
    /// Convergence threshold on the incremental update, in pixels.
    pub epsilon: f64,
    /// Minimum acceptable eigenvalue of the structure tensor; below this
    /// the window is considered textureless and tracking fails.
    pub min_eigenvalue: f64,
    /// Mean absolute residual above which a track counts as lost.
    pub max_residual: f64,
}

impl Default for KltParams {
    fn default() -> Self {
        KltParams {
            levels: 3,
            window: 15,
            max_iterations: 30,
            epsilon: 0.01,
            min_eigenvalue: 1e-8,
            max_residual: 0.25,
        }
    }
}

fn gaussian_pyramid(frame: &Frame, levels: usize) -> Vec<Frame> {
    let mut pyr = vec![frame.clone()];
    for _ in 1..levels {
        let last = pyr.last().unwrap();
        if last.width() < 16 || last.height() < 16 {
            break;
        }
        pyr.push(reduce(last));
    }
    pyr
}

/// Tracks a single point from `prev` to `next`, returning the new position.
pub fn track_point(prev: &Frame, next: &Frame, at: Point, params: &KltParams) -> Result<Point> {
    if params.window % 2 == 0 || params.window < 3 {
        return Err(Error::InvalidParameter(format!(
            "window must be odd and >= 3, got {}",
            params.window
        )));
    }
    let prev_pyr = gaussian_pyramid(prev, params.levels.max(1));
    let next_pyr = gaussian_pyramid(next, params.levels.max(1));
    let levels = prev_pyr.len();
    let half = (params.window / 2) as isize;

    let scale0 = (1 << (levels - 1)) as f64;
    let mut guess = Point::new(at.x / scale0, at.y / scale0);

    for level in (0..levels).rev() {
        let scale = (1 << level) as f64;
        let p = Point::new(at.x / scale, at.y / scale);
        let a = &prev_pyr[level];
        let b = &next_pyr[level];

        // structure tensor of the template window
        let mut gxx = 0.0;
        let mut gxy = 0.0;
        let mut gyy = 0.0;
        let mut gradients = Vec::with_capacity(params.window * params.window);
        for wy in -half..=half {
            for wx in -half..=half {
                let sx = p.x + wx as f64;
                let sy = p.y + wy as f64;
                let ix = (bilinear(a, sx + 1.0, sy, Border::Replicate)
                    - bilinear(a, sx - 1.0, sy, Border::Replicate))
                    / 2.0;
                let iy = (bilinear(a, sx, sy + 1.0, Border::Replicate)
                    - bilinear(a, sx, sy - 1.0, Border::Replicate))
                    / 2.0;
                gxx += ix * ix;
                gxy += ix * iy;
                gyy += iy * iy;
                gradients.push((ix, iy));
            }
        }
        let trace = gxx + gyy;
        let det = gxx * gyy - gxy * gxy;
        let min_eig = trace / 2.0 - ((trace / 2.0) * (trace / 2.0) - det).max(0.0).sqrt();
        if min_eig < params.min_eigenvalue {
            return Err(Error::TrackingDiverged {
                frame: 0,
                reason: format!("textureless window (min eigenvalue {min_eig:.2e})"),
            });
        }

        for _ in 0..params.max_iterations {
            let mut bx = 0.0;
            let mut by = 0.0;
            let mut gi = 0;
            for wy in -half..=half {
                for wx in -half..=half {
                    let sx = p.x + wx as f64;
                    let sy = p.y + wy as f64;
                    let diff = bilinear(a, sx, sy, Border::Replicate)
                        - bilinear(
                            b,
                            guess.x + wx as f64,
                            guess.y + wy as f64,
                            Border::Replicate,
                        );
                    let (ix, iy) = gradients[gi];
                    gi += 1;
                    bx += diff * ix;
                    by += diff * iy;
                }
            }
            let dx = (gyy * bx - gxy * by) / det;
            let dy = (gxx * by - gxy * bx) / det;
            guess.x += dx;
            guess.y += dy;
            if dx.hypot(dy) < params.epsilon {
                break;
            }
        }

        if level > 0 {
            guess.x *= 2.0;
            guess.y *= 2.0;
        }
    }

    // residual check at full resolution
    let mut residual = 0.0;
    let mut count = 0.0;
    for wy in -half..=half {
        for wx in -half..=half {
            let va = bilinear(prev, at.x + wx as f64, at.y + wy as f64, Border::Replicate);
            let vb = bilinear(
                next,
                guess.x + wx as f64,
                guess.y + wy as f64,
                Border::Replicate,
            );
            residual += (va - vb).abs();
            count += 1.0;
        }
    }
    if residual / count > params.max_residual {
        return Err(Error::TrackingDiverged {
            frame: 0,
            reason: format!(
                "residual {:.3} above {}",
                residual / count,
                params.max_residual
            ),
        });
    }
    if guess.x < 0.0
        || guess.y < 0.0
        || guess.x > (next.width() - 1) as f64
        || guess.y > (next.height() - 1) as f64
    {
        return Err(Error::TrackingDiverged {
            frame: 0,
            reason: format!("point left the frame at ({:.1}, {:.1})", guess.x, guess.y),
        });
    }
    Ok(guess)
}
