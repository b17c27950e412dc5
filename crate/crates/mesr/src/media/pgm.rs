//! Binary PGM (P5) reading and writing plus directory-based sequences.
//!
//! Frames on disk are named `frame_%06d.pgm` starting at `frame_000001.pgm`;
//! lexicographic filename order defines temporal order.

use std::fs;
use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};
use crate::media::{Frame, FrameSequence};

/// 8-bit luminance weights applied to 3-channel (P6) input.
pub const LUMA_WEIGHTS: [f64; 3] = [0.299, 0.587, 0.114];

/// Reads a binary PGM (P5) or PPM (P6) file with maxval 255 into a
/// luminance frame. 3-channel rasters are converted with [`LUMA_WEIGHTS`].
pub fn read_pgm(path: impl AsRef<Path>) -> Result<Frame> {
    let path = path.as_ref();
    let data = fs::read(path).map_err(|e| Error::io(path, e))?;
    let bad = |reason: &str| Error::PgmFormat {
        path: path.to_path_buf(),
        reason: reason.to_string(),
    };

    let mut pos = 0usize;
    let mut token = |data: &[u8]| -> Result<String> {
        // skip whitespace and comment lines
        loop {
            while pos < data.len() && data[pos].is_ascii_whitespace() {
                pos += 1;
            }
            if pos < data.len() && data[pos] == b'#' {
                while pos < data.len() && data[pos] != b'\n' {
                    pos += 1;
                }
            } else {
                break;
            }
        }
        let start = pos;
        while pos < data.len() && !data[pos].is_ascii_whitespace() {
            pos += 1;
        }
        if start == pos {
            return Err(bad("truncated header"));
        }
        Ok(String::from_utf8_lossy(&data[start..pos]).into_owned())
    };

    let channels = match token(&data)?.as_str() {
        "P5" => 1,
        "P6" => 3,
        _ => return Err(bad("not a binary P5/P6 file")),
    };
    let width: usize = token(&data)?.parse().map_err(|_| bad("bad width"))?;
    let height: usize = token(&data)?.parse().map_err(|_| bad("bad height"))?;
    let maxval: usize = token(&data)?.parse().map_err(|_| bad("bad maxval"))?;
    if maxval != 255 {
        return Err(bad("only maxval 255 is supported"));
    }
    // exactly one whitespace byte separates the header from the raster
    pos += 1;
    if pos > data.len() || data.len() - pos < width * height * channels {
        return Err(bad("truncated pixel data"));
    }
    let raster = &data[pos..pos + width * height * channels];
    let pixels = if channels == 1 {
        raster.iter().map(|&b| b as f64 / 255.0).collect()
    } else {
        raster
            .chunks_exact(3)
            .map(|rgb| {
                let y = LUMA_WEIGHTS[0] * rgb[0] as f64
                    + LUMA_WEIGHTS[1] * rgb[1] as f64
                    + LUMA_WEIGHTS[2] * rgb[2] as f64;
                (y / 255.0).clamp(0.0, 1.0)
            })
            .collect()
    };
    Frame::from_pixels(width, height, pixels)
}

/// Writes a frame as binary PGM, quantizing luminance to 8 bits.
pub fn write_pgm(path: impl AsRef<Path>, frame: &Frame) -> Result<()> {
    let path = path.as_ref();
    let mut out = Vec::with_capacity(frame.width() * frame.height() + 32);
    write!(out, "P5\n{} {}\n255\n", frame.width(), frame.height())
        .expect("writing to vec cannot fail");
    out.extend(
        frame
            .pixels()
            .iter()
            .map(|&v| (v.clamp(0.0, 1.0) * 255.0).round() as u8),
    );
    fs::write(path, out).map_err(|e| Error::io(path, e))
}

fn frame_file_name(index1: usize) -> String {
    format!("frame_{index1:06}.pgm")
}

/// Loads every `frame_%06d.pgm` file from a directory, in lexicographic
/// order, into a sequence.
pub fn load_sequence(
    dir: impl AsRef<Path>,
    fps: f64,
    id: impl Into<String>,
) -> Result<FrameSequence> {
    let dir = dir.as_ref();
    let entries = fs::read_dir(dir).map_err(|e| Error::io(dir, e))?;
    let mut names: Vec<String> = entries
        .filter_map(|e| e.ok())
        .filter_map(|e| e.file_name().into_string().ok())
        .filter(|n| is_frame_name(n))
        .collect();
    if names.is_empty() {
        return Err(Error::InvalidSequence(format!(
            "no frame_NNNNNN.pgm files in {}",
            dir.display()
        )));
    }
    names.sort();
    let mut frames = Vec::with_capacity(names.len());
    for name in &names {
        frames.push(read_pgm(dir.join(name))?);
    }
    FrameSequence::new(frames, fps, id)
}

/// Loads only frames `range` (0-based indices into the sorted file list)
/// from a sequence directory.
pub fn load_sequence_range(
    dir: impl AsRef<Path>,
    fps: f64,
    id: impl Into<String>,
    range: std::ops::Range<usize>,
) -> Result<FrameSequence> {
    let dir = dir.as_ref();
    let entries = fs::read_dir(dir).map_err(|e| Error::io(dir, e))?;
    let mut names: Vec<String> = entries
        .filter_map(|e| e.ok())
        .filter_map(|e| e.file_name().into_string().ok())
        .filter(|n| is_frame_name(n))
        .collect();
    names.sort();
    if range.start >= range.end || range.end > names.len() {
        return Err(Error::InvalidSequence(format!(
            "frame range {range:?} out of 0..{} in {}",
            names.len(),
            dir.display()
        )));
    }
    let mut frames = Vec::with_capacity(range.len());
    for name in &names[range] {
        frames.push(read_pgm(dir.join(name))?);
    }
    FrameSequence::new(frames, fps, id)
}

/// Writes a sequence to a directory using the frame naming convention.
pub fn save_sequence(dir: impl AsRef<Path>, seq: &FrameSequence) -> Result<()> {
    let dir = dir.as_ref();
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    for (i, frame) in seq.frames().iter().enumerate() {
        write_pgm(dir.join(frame_file_name(i + 1)), frame)?;
    }
    Ok(())
}

fn is_frame_name(name: &str) -> bool {
    name.len() == "frame_000001.pgm".len()
        && name.starts_with("frame_")
        && name.ends_with(".pgm")
        && name["frame_".len()..name.len() - 4]
            .bytes()
            .all(|b| b.is_ascii_digit())
}
