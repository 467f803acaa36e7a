//! Fixed-length, non-overlapping segmentation.

use super::check_rate;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Analysis frame duration. At 8 kHz this gives 504 samples.
pub const FRAME_SECONDS: f64 = 0.063;

/// Frame length for a sample rate: `8 * round(0.063 * fs / 8)`, at least 16.
pub fn frame_length_for(fs: u32) -> Result<usize> {
    check_rate(fs)?;
    let granules = (FRAME_SECONDS * fs as f64 / 8.0).round() as usize;
    Ok((8 * granules).max(16))
}

#[derive(Debug, Clone, PartialEq)]
pub struct FrameSet<T> {
    pub frames: Vec<Vec<T>>,
    /// Zeros appended to the last frame.
    pub pad_len: usize,
    pub source_rate: u32,
}

impl<T> FrameSet<T> {
    pub fn frame_len(&self) -> usize {
        self.frames.first().map_or(0, Vec::len)
    }

    /// Length of the signal before padding.
    pub fn signal_len(&self) -> usize {
        self.frames.len() * self.frame_len() - self.pad_len
    }
}

pub fn frame_signal<T: Scalar>(samples: &[T], frame_len: usize, source_rate: u32) -> Result<FrameSet<T>> {
    if samples.is_empty() {
        return Err(Error::EmptyInput);
    }
    if frame_len == 0 || !frame_len.is_multiple_of(8) {
        return Err(Error::BadLength(format!(
            "frame length {frame_len} is not a positive multiple of 8"
        )));
    }
    let frames: Vec<Vec<T>> = samples
        .chunks(frame_len)
        .map(|c| {
            let mut f = c.to_vec();
            f.resize(frame_len, T::zero());
            f
        })
        .collect();
    let pad_len = frames.len() * frame_len - samples.len();
    Ok(FrameSet {
        frames,
        pad_len,
        source_rate,
    })
}

pub fn deframe<T: Scalar>(set: &FrameSet<T>) -> Result<Vec<T>> {
    let len = set.frame_len();
    if set.frames.is_empty() || len == 0 {
        return Err(Error::InvalidFrameSet("no frames".into()));
    }
    if set.frames.iter().any(|f| f.len() != len) {
        return Err(Error::InvalidFrameSet("frames differ in length".into()));
    }
    if set.pad_len >= len {
        return Err(Error::InvalidFrameSet(format!(
            "pad {} not below frame length {len}",
            set.pad_len
        )));
    }
    let mut out: Vec<T> = set.frames.iter().flatten().copied().collect();
    out.truncate(out.len() - set.pad_len);
    Ok(out)
}
