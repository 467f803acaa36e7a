//! Payload bit sources.
//!
//! Keyed mode hashes `(key, frame, band, index)` with a chain of splitmix64
//! finalizers and takes the top bit:
//!
//! ```text
//! h = mix(key); h = mix(h ^ frame); h = mix(h ^ band); h = mix(h ^ index); bit = h >> 63
//! ```
//!
//! Decoy mode frames and transforms a second recording exactly like the
//! host and uses the sign of the matching DCT coefficient (negative is 1).

use crate::audio::{frame_signal, resample, AudioClip};
use crate::error::{Error, Result};
use crate::psychoacoustics::{BarkLayout, CriticalBand};
use crate::scalar::Scalar;
use crate::transforms::{FrameTransform, SubbandSpectrum};

#[derive(Debug, Clone)]
pub enum PseudoTimbreSource<T> {
    Keyed { key: u64 },
    Decoy(AudioClip<T>),
}

#[inline]
fn splitmix64(z: u64) -> u64 {
    let mut z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn keyed_bit(key: u64, frame: u64, band: u64, index: u64) -> bool {
    let mut h = splitmix64(key);
    h = splitmix64(h ^ frame);
    h = splitmix64(h ^ band);
    h = splitmix64(h ^ index);
    h >> 63 == 1
}

pub fn keyed_bits(key: u64, frame: usize, band: usize, count: usize) -> Vec<bool> {
    (0..count)
        .map(|i| keyed_bit(key, frame as u64, band as u64, i as u64))
        .collect()
}

/// A source bound to one host layout, ready to hand out bits.
#[derive(Debug, Clone)]
pub enum PreparedSource<T> {
    Keyed {
        key: u64,
    },
    /// Decoy spectra per channel, per frame.
    Decoy(Vec<Vec<SubbandSpectrum<T>>>),
}

impl<T: Scalar> PreparedSource<T> {
    pub fn prepare(
        src: &PseudoTimbreSource<T>,
        layout: &BarkLayout,
        host_len: usize,
        host_channels: usize,
    ) -> Result<Self> {
        match src {
            PseudoTimbreSource::Keyed { key } => Ok(Self::Keyed { key: *key }),
            PseudoTimbreSource::Decoy(decoy) => {
                let decoy = resample(decoy, layout.sample_rate)?;
                if decoy.len() < host_len {
                    return Err(Error::DecoyTooShort {
                        host: host_len,
                        decoy: decoy.len(),
                    });
                }
                let transform = FrameTransform::new(layout.frame_len)?;
                let frames_needed = host_len.div_ceil(layout.frame_len);
                let mut per_channel = Vec::with_capacity(host_channels);
                for ch in 0..host_channels {
                    let samples = decoy.channel(ch.min(decoy.channel_count() - 1));
                    let set = frame_signal(samples, layout.frame_len, layout.sample_rate)?;
                    let spectra = set
                        .frames
                        .iter()
                        .take(frames_needed)
                        .map(|f| transform.analyze(f))
                        .collect::<Result<Vec<_>>>()?;
                    per_channel.push(spectra);
                }
                Ok(Self::Decoy(per_channel))
            }
        }
    }

    /// Payload bits for every coefficient of `band` in `frame`.
    pub fn bits(&self, channel: usize, frame: usize, band: &CriticalBand) -> Vec<bool> {
        match self {
            Self::Keyed { key } => keyed_bits(*key, frame, band.index, band.count()),
            Self::Decoy(spectra) => {
                let s = &spectra[channel][frame];
                band.coefficients().map(|(sb, k)| s.get(sb)[k] < T::zero()).collect()
            }
        }
    }
}
