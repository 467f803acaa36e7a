//! Band-limited sample-rate conversion with a Kaiser-windowed sinc kernel.
//!
//! The kernel is zero-phase: output sample `j` sits exactly at input time
//! `j * from / to`, so a round trip through another rate stays aligned.

use super::{check_rate, AudioClip};
use crate::error::Result;
use crate::scalar::Scalar;

/// Zero crossings of the sinc on each side of the kernel centre.
const ZERO_CROSSINGS: usize = 128;
const KAISER_BETA: f64 = 8.0;
/// Cutoff as a fraction of the lower Nyquist frequency.
const ROLLOFF: f64 = 0.995;
/// Table entries per zero crossing.
const OVERSAMPLE: usize = 512;

#[derive(Debug, Clone)]
pub struct Resampler {
    from: u32,
    to: u32,
    /// Cutoff in cycles per input sample.
    cutoff: f64,
    table: Vec<f64>,
}

impl Resampler {
    pub fn new(from: u32, to: u32) -> Result<Self> {
        check_rate(from)?;
        check_rate(to)?;
        let cutoff = 0.5 * (to.min(from) as f64 / from as f64) * ROLLOFF;
        let norm = bessel_i0(KAISER_BETA);
        let n = ZERO_CROSSINGS * OVERSAMPLE;
        let table = (0..=n + 1)
            .map(|i| {
                let u = i as f64 / OVERSAMPLE as f64;
                if u >= ZERO_CROSSINGS as f64 {
                    return 0.0;
                }
                let r = u / ZERO_CROSSINGS as f64;
                sinc(u) * bessel_i0(KAISER_BETA * (1.0 - r * r).sqrt()) / norm
            })
            .collect();
        Ok(Self {
            from,
            to,
            cutoff,
            table,
        })
    }

    pub fn output_len(&self, input_len: usize) -> usize {
        ((input_len as u128 * self.to as u128 + self.from as u128 / 2) / self.from as u128) as usize
    }

    /// Windowed sinc evaluated at `u` zero crossings from the centre.
    #[inline]
    fn kernel(&self, u: f64) -> f64 {
        let pos = u.abs() * OVERSAMPLE as f64;
        let i = pos as usize;
        if i >= self.table.len() - 1 {
            return 0.0;
        }
        let frac = pos - i as f64;
        self.table[i] + (self.table[i + 1] - self.table[i]) * frac
    }

    pub fn process<T: Scalar>(&self, input: &[T]) -> Vec<T> {
        if self.from == self.to {
            return input.to_vec();
        }
        let n = input.len() as i64;
        let scale = 2.0 * self.cutoff;
        let half = ZERO_CROSSINGS as f64 / scale;
        (0..self.output_len(input.len()))
            .map(|j| {
                let centre = (j as u128 * self.from as u128) as f64 / self.to as f64;
                let lo = ((centre - half).ceil() as i64).max(0);
                let hi = ((centre + half).floor() as i64).min(n - 1);
                let mut acc = 0.0;
                for m in lo..=hi {
                    acc += input[m as usize].to_f64_lossy() * self.kernel((m as f64 - centre) * scale);
                }
                T::lit(acc * scale)
            })
            .collect()
    }
}

fn sinc(x: f64) -> f64 {
    if x == 0.0 {
        1.0
    } else {
        let px = std::f64::consts::PI * x;
        px.sin() / px
    }
}

fn bessel_i0(x: f64) -> f64 {
    let mut sum = 1.0;
    let mut term = 1.0;
    let q = x * x / 4.0;
    for k in 1..200 {
        term *= q / (k * k) as f64;
        sum += term;
        if term < 1e-17 * sum {
            break;
        }
    }
    sum
}

pub fn resample_channel<T: Scalar>(samples: &[T], from: u32, to: u32) -> Result<Vec<T>> {
    Ok(Resampler::new(from, to)?.process(samples))
}

/// Converts every channel of `clip` to `target_fs`. Identity when rates match.
pub fn resample<T: Scalar>(clip: &AudioClip<T>, target_fs: u32) -> Result<AudioClip<T>> {
    check_rate(target_fs)?;
    if target_fs == clip.sample_rate() {
        return Ok(clip.clone());
    }
    let r = Resampler::new(clip.sample_rate(), target_fs)?;
    let channels = clip.channels().iter().map(|c| r.process(c)).collect();
    AudioClip::new(channels, target_fs)
}
