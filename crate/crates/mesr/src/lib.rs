//! Micro-expression spotting and recognition toolkit.
//!
//! Two workflows share the building blocks in this crate:
//!
//! - **Spotting** locates rapid, low-intensity facial motions inside long
//!   sequences by contrasting per-block appearance features across a short
//!   sliding interval and picking peaks of the contrasted difference signal.
//! - **Recognition** classifies a short clip of such motion: register the
//!   face to a model, magnify sub-pixel motion, interpolate to a fixed
//!   length, describe the volume with dynamic-texture histograms and
//!   classify with a linear SVM under a leave-one-subject-out protocol.
//!
//! The `examples/` directory contains one runnable example per capability;
//! the `mesr` binary wires the same pieces into `spot`, `recognize`,
//! `mesr`, `eval`, `synth` and `config` commands.

pub mod classify;
pub mod error;
pub mod features;
pub mod geometry;
pub mod magnify;
pub mod media;
pub mod pipeline;
pub mod raster;
pub mod spotting;
pub mod tim;

pub use error::{Error, Result};
pub use media::{Frame, FrameSequence};
pub use raster::{Point, Rect};
