//! Audio containers, WAV I/O, framing and rate conversion.

mod frame;
mod resample;
mod wav;

pub use frame::{deframe, frame_length_for, frame_signal, FrameSet, FRAME_SECONDS};
pub use resample::{resample, resample_channel, Resampler};
pub use wav::{read_wav, read_wav_from, write_wav, write_wav_to};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Lowest sample rate any stage accepts.
pub const MIN_SAMPLE_RATE: u32 = 2000;

/// A sampled waveform, one vector per channel, amplitudes in `[-1, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct AudioClip<T> {
    channels: Vec<Vec<T>>,
    sample_rate: u32,
    clipped: usize,
}

impl<T: Scalar> AudioClip<T> {
    /// Builds a clip, clamping out-of-range samples to `[-1, 1]`.
    ///
    /// Clamped samples are counted in [`AudioClip::clipped`]. NaN samples are
    /// replaced by zero and also counted.
    pub fn new(mut channels: Vec<Vec<T>>, sample_rate: u32) -> Result<Self> {
        if channels.is_empty() {
            return Err(Error::InvalidConfig("clip needs at least one channel".into()));
        }
        if sample_rate == 0 {
            return Err(Error::InvalidConfig("sample rate must be positive".into()));
        }
        let len = channels[0].len();
        if channels.iter().any(|c| c.len() != len) {
            return Err(Error::BadLength("channels differ in length".into()));
        }
        let mut clipped = 0;
        for ch in &mut channels {
            clipped += clamp_unit(ch);
        }
        Ok(Self {
            channels,
            sample_rate,
            clipped,
        })
    }

    pub fn mono(samples: Vec<T>, sample_rate: u32) -> Result<Self> {
        Self::new(vec![samples], sample_rate)
    }

    pub fn sample_rate(&self) -> u32 {
        self.sample_rate
    }

    pub fn channel_count(&self) -> usize {
        self.channels.len()
    }

    /// Samples per channel.
    pub fn len(&self) -> usize {
        self.channels[0].len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn channel(&self, idx: usize) -> &[T] {
        &self.channels[idx]
    }

    pub fn channels(&self) -> &[Vec<T>] {
        &self.channels
    }

    pub fn into_channels(self) -> Vec<Vec<T>> {
        self.channels
    }

    /// Number of samples clamped into range when this clip was built.
    pub fn clipped(&self) -> usize {
        self.clipped
    }

    pub(crate) fn with_clipped(mut self, clipped: usize) -> Self {
        self.clipped = clipped;
        self
    }

    pub fn duration_secs(&self) -> f64 {
        self.len() as f64 / self.sample_rate as f64
    }

    /// Applies `f` to every channel and rebuilds the clip (re-clamping).
    pub fn map_channels<F>(&self, mut f: F) -> Result<Self>
    where
        F: FnMut(&[T]) -> Vec<T>,
    {
        let channels = self.channels.iter().map(|c| f(c)).collect();
        Self::new(channels, self.sample_rate)
    }

    /// Converts the sample type.
    pub fn cast<U: Scalar>(&self) -> AudioClip<U> {
        AudioClip {
            channels: self
                .channels
                .iter()
                .map(|c| c.iter().map(|&x| U::lit(x.to_f64_lossy())).collect())
                .collect(),
            sample_rate: self.sample_rate,
            clipped: self.clipped,
        }
    }
}

/// Clamps in place and returns how many samples were out of range.
pub(crate) fn clamp_unit<T: Scalar>(samples: &mut [T]) -> usize {
    let one = T::one();
    let mut n = 0;
    for s in samples {
        if s.is_nan() {
            *s = T::zero();
            n += 1;
        } else if *s > one {
            *s = one;
            n += 1;
        } else if *s < -one {
            *s = -one;
            n += 1;
        }
    }
    n
}

pub(crate) fn check_rate(fs: u32) -> Result<()> {
    if fs < MIN_SAMPLE_RATE {
        Err(Error::RateTooLow(fs))
    } else {
        Ok(())
    }
}
