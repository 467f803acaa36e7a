//! Masking-threshold pseudo-timbre embedding for speech audio.
//!
//! Each frame is split by a three-level Haar wavelet; the level-3 subbands
//! are taken to the DCT domain and mapped onto Bark critical bands. A
//! per-band masking threshold sets a quantizer step, and keyed payload bits
//! are written into the low critical bands by dither-modulated quantization
//! so the added noise stays below the threshold.

pub mod attacks;
pub mod audio;
pub mod embedder;
pub mod error;
pub mod metrics;
pub mod psychoacoustics;
pub mod report;
pub mod scalar;
mod stft;
pub mod synth;
pub mod transforms;

pub use error::{Error, Result};
pub use scalar::Scalar;

pub type Clip = audio::AudioClip<f64>;
pub type Clip32 = audio::AudioClip<f32>;
pub type Spectrum = transforms::SubbandSpectrum<f64>;
pub type Pyramid = transforms::WaveletPyramid<f64>;
