//! Attacker-side preprocessing: rate conversion, spectral-subtraction
//! denoising, additive noise and requantization.
//!
//! Every attack returns a clip with the input's sample rate and length.

use std::fmt;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::audio::{check_rate, AudioClip, Resampler};
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::stft::{frame_size_for, Stft};

pub const DEFAULT_BETA: f64 = 1.5;
pub const DEFAULT_GAIN_FLOOR: f64 = 0.05;
/// Percentile of per-bin magnitudes taken as the noise floor.
pub const NOISE_PERCENTILE: f64 = 0.10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AttackSpec {
    /// Round trip through `target_hz`.
    Resample { target_hz: u32 },
    /// Magnitude spectral subtraction with over-subtraction `beta` and gain floor.
    Denoise { beta: f64, gain_floor: f64 },
    /// White Gaussian noise at `snr_db`; `f64::INFINITY` adds nothing.
    Noise { snr_db: f64, seed: u64 },
    /// Uniform mid-rise requantization to `bits` (4..=16).
    Requantize { bits: u32 },
}

impl AttackSpec {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidAttack(m));
        match *self {
            Self::Resample { target_hz } => check_rate(target_hz),
            Self::Denoise { beta, gain_floor } => {
                if !(0.0..=10.0).contains(&beta) {
                    return bad(format!("beta {beta} outside [0, 10]"));
                }
                if !(0.0..=1.0).contains(&gain_floor) {
                    return bad(format!("gain floor {gain_floor} outside [0, 1]"));
                }
                Ok(())
            }
            Self::Noise { snr_db, .. } => {
                if snr_db.is_nan() || snr_db == f64::NEG_INFINITY {
                    return bad(format!("snr {snr_db} dB"));
                }
                Ok(())
            }
            Self::Requantize { bits } => {
                if !(4..=16).contains(&bits) {
                    return bad(format!("bit depth {bits} outside 4..=16"));
                }
                Ok(())
            }
        }
    }
}

/// `resample:<hz>`, `denoise[:<beta>[:<floor>]]`, `noise:<snr dB|inf>[:<seed>]`,
/// `requantize:<bits>`.
impl FromStr for AttackSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.trim().split(':').collect();
        let bad = || Error::InvalidAttack(format!("cannot parse `{s}`"));
        let num = |v: &str| v.parse::<f64>().map_err(|_| bad());
        let spec = match parts.as_slice() {
            ["resample", hz] => Self::Resample {
                target_hz: hz.parse().map_err(|_| bad())?,
            },
            ["denoise"] => Self::Denoise {
                beta: DEFAULT_BETA,
                gain_floor: DEFAULT_GAIN_FLOOR,
            },
            ["denoise", b] => Self::Denoise {
                beta: num(b)?,
                gain_floor: DEFAULT_GAIN_FLOOR,
            },
            ["denoise", b, g] => Self::Denoise {
                beta: num(b)?,
                gain_floor: num(g)?,
            },
            ["noise", snr] => Self::Noise {
                snr_db: num(snr)?,
                seed: 0,
            },
            ["noise", snr, seed] => Self::Noise {
                snr_db: num(snr)?,
                seed: seed.parse().map_err(|_| bad())?,
            },
            ["requantize", bits] => Self::Requantize {
                bits: bits.parse().map_err(|_| bad())?,
            },
            _ => return Err(bad()),
        };
        spec.validate()?;
        Ok(spec)
    }
}

impl fmt::Display for AttackSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Resample { target_hz } => write!(f, "resample:{target_hz}"),
            Self::Denoise { beta, gain_floor } => write!(f, "denoise:{beta}:{gain_floor}"),
            Self::Noise { snr_db, seed } => write!(f, "noise:{snr_db}:{seed}"),
            Self::Requantize { bits } => write!(f, "requantize:{bits}"),
        }
    }
}

pub fn apply_attack<T: Scalar>(clip: &AudioClip<T>, spec: &AttackSpec) -> Result<AudioClip<T>> {
    spec.validate()?;
    match *spec {
        AttackSpec::Resample { target_hz } => attack_resample(clip, target_hz),
        AttackSpec::Denoise { beta, gain_floor } => attack_denoise(clip, beta, gain_floor),
        AttackSpec::Noise { snr_db, seed } => attack_noise(clip, snr_db, seed),
        AttackSpec::Requantize { bits } => attack_requantize(clip, bits),
    }
}

/// Converts to `target_hz` and back, trimming or zero-padding to the input length.
pub fn attack_resample<T: Scalar>(clip: &AudioClip<T>, target_hz: u32) -> Result<AudioClip<T>> {
    check_rate(target_hz)?;
    let fs = clip.sample_rate();
    if fs == target_hz {
        return Ok(clip.clone());
    }
    let down = Resampler::new(fs, target_hz)?;
    let up = Resampler::new(target_hz, fs)?;
    clip.map_channels(|c| {
        let mut y = up.process(&down.process(c));
        y.resize(c.len(), T::zero());
        y
    })
}

pub fn attack_denoise<T: Scalar>(clip: &AudioClip<T>, beta: f64, gain_floor: f64) -> Result<AudioClip<T>> {
    AttackSpec::Denoise { beta, gain_floor }.validate()?;
    let stft = Stft::<T>::new(frame_size_for(clip.sample_rate()));
    clip.map_channels(|c| spectral_subtract(&stft, c, beta, gain_floor))
}

fn spectral_subtract<T: Scalar>(stft: &Stft<T>, x: &[T], beta: f64, gain_floor: f64) -> Vec<T> {
    let mut spectra = stft.analyze(x);
    let n = stft.size();
    let bins = n / 2 + 1;
    let frames = spectra.len();
    let rank = ((NOISE_PERCENTILE * frames as f64).ceil() as usize).clamp(1, frames) - 1;
    let (beta, floor) = (T::lit(beta), T::lit(gain_floor));
    let mut column: Vec<T> = Vec::with_capacity(frames);
    for k in 0..bins {
        column.clear();
        column.extend(spectra.iter().map(|s| s[k].norm()));
        column.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let noise = column[rank];
        for s in spectra.iter_mut() {
            let mag = s[k].norm();
            let gain = if mag > T::zero() {
                (T::one() - beta * noise / mag).max(floor)
            } else {
                T::one()
            };
            s[k] = s[k] * gain;
            if k != 0 && k != n - k {
                s[n - k] = s[n - k] * gain;
            }
        }
    }
    stft.synthesize(&spectra, x.len())
}

/// Adds seeded white Gaussian noise so that signal power over noise power is `snr_db`.
pub fn attack_noise<T: Scalar>(clip: &AudioClip<T>, snr_db: f64, seed: u64) -> Result<AudioClip<T>> {
    AttackSpec::Noise { snr_db, seed }.validate()?;
    if snr_db == f64::INFINITY {
        return Ok(clip.clone());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let noise: Vec<Vec<f64>> = clip
        .channels()
        .iter()
        .map(|c| c.iter().map(|_| StandardNormal.sample(&mut rng)).collect())
        .collect();
    let p_signal: f64 = clip.channels().iter().flatten().map(|v| v.to_f64_lossy().powi(2)).sum();
    let p_noise: f64 = noise.iter().flatten().map(|v| v * v).sum();
    let gain = if p_noise > 0.0 {
        (p_signal / p_noise * 10f64.powf(-snr_db / 10.0)).sqrt()
    } else {
        0.0
    };
    let channels = clip
        .channels()
        .iter()
        .zip(&noise)
        .map(|(c, n)| c.iter().zip(n).map(|(&x, &w)| x + T::lit(gain * w)).collect())
        .collect();
    AudioClip::new(channels, clip.sample_rate())
}

/// Mid-rise quantizer with `2^bits` levels spanning `[-1, 1]`.
pub fn attack_requantize<T: Scalar>(clip: &AudioClip<T>, bits: u32) -> Result<AudioClip<T>> {
    AttackSpec::Requantize { bits }.validate()?;
    let step = 2.0 / (1u64 << bits) as f64;
    let top = 1.0 - step / 2.0;
    clip.map_channels(|c| {
        c.iter()
            .map(|&x| {
                let v = step * ((x.to_f64_lossy() / step).floor() + 0.5);
                T::lit(v.clamp(-top, top))
            })
            .collect()
    })
}
