//! Simultaneous masking threshold per critical band.
//!
//! Per frame: band energy, spectral flatness and tonality, energy spread
//! across bands, tonality-dependent offset, and a floor at the absolute
//! threshold of hearing.

use rayon::prelude::*;

use super::bark::BarkLayout;
use crate::audio::{frame_signal, AudioClip};
use crate::error::Result;
use crate::scalar::Scalar;
use crate::transforms::{FrameTransform, SubbandSpectrum};

/// Floor applied to coefficient energies before the flatness means.
pub const ENERGY_FLOOR: f64 = 1e-12;

/// Energy of one 16-bit LSB amplitude, taken as 0 dB SPL.
pub const SPL_REFERENCE_ENERGY: f64 = 1.0 / (32768.0 * 32768.0);

/// Schroeder spreading function in dB at Bark distance `dz` (maskee minus masker).
pub fn schroeder_spread_db(dz: f64) -> f64 {
    let u = dz + 0.474;
    15.81 + 7.5 * u - 17.5 * (1.0 + u * u).sqrt()
}

/// Sum of squared coefficients per band, aligned with `layout.bands`.
pub fn band_energy<T: Scalar>(s: &SubbandSpectrum<T>, layout: &BarkLayout) -> Vec<T> {
    layout
        .bands
        .iter()
        .map(|b| b.coefficients().map(|(sb, k)| s.get(sb)[k] * s.get(sb)[k]).sum())
        .collect()
}

pub fn spread<T: Scalar>(energy: &[T], layout: &BarkLayout) -> Vec<T> {
    spread_with(energy, layout, |dz| schroeder_spread_db(dz as f64))
}

/// Spreads band energies with an arbitrary spreading function (dB per Bark distance).
///
/// `C_j = sum_i B_i * 10^(sf(j - i) / 10)` over the bands present in the layout.
pub fn spread_with<T, F>(energy: &[T], layout: &BarkLayout, sf_db: F) -> Vec<T>
where
    T: Scalar,
    F: Fn(i64) -> f64,
{
    let idx: Vec<i64> = layout.bands.iter().map(|b| b.index as i64).collect();
    idx.iter()
        .map(|&j| {
            idx.iter()
                .zip(energy)
                .map(|(&i, &e)| {
                    let g = sf_db(j - i);
                    if g == f64::NEG_INFINITY {
                        T::zero()
                    } else {
                        e * T::lit(10f64.powf(g / 10.0))
                    }
                })
                .sum()
        })
        .collect()
}

/// Spectral flatness in dB of a set of coefficient energies; always `<= 0`.
pub fn spectral_flatness_of<T: Scalar>(energies: &[T]) -> T {
    if energies.is_empty() {
        return T::zero();
    }
    let floor = T::lit(ENERGY_FLOOR);
    let n = T::from_usize_lossy(energies.len());
    let mut log_sum = T::zero();
    let mut sum = T::zero();
    for &e in energies {
        let e = e.max(floor);
        log_sum += e.ln();
        sum += e;
    }
    let geometric = (log_sum / n).exp();
    let arithmetic = sum / n;
    (T::lit(10.0) * (geometric / arithmetic).log10()).min(T::zero())
}

/// Flatness of band `index` of `s`.
pub fn spectral_flatness<T: Scalar>(s: &SubbandSpectrum<T>, layout: &BarkLayout, index: usize) -> Option<T> {
    let band = layout.band(index)?;
    let e: Vec<T> = band.coefficients().map(|(sb, k)| s.get(sb)[k] * s.get(sb)[k]).collect();
    Some(spectral_flatness_of(&e))
}

/// Tonality coefficient from flatness: `min(SFM / -60, 1)`.
pub fn tonality<T: Scalar>(sfm_db: T) -> T {
    (sfm_db / T::lit(-60.0)).min(T::one()).max(T::zero())
}

/// Threshold offset in dB for band `j` given tonality `alpha`.
pub fn offset_db<T: Scalar>(alpha: T, j: usize) -> T {
    alpha * T::lit(14.5 + j as f64) + (T::one() - alpha) * T::lit(5.5)
}

pub fn raw_threshold<T: Scalar>(spread_energy: T, offset_db: T) -> T {
    if spread_energy <= T::zero() {
        return T::zero();
    }
    spread_energy * T::lit(10.0).powf(-offset_db / T::lit(10.0))
}

/// Absolute threshold of hearing in dB SPL at `f` Hz.
pub fn ath_db(f: f64) -> f64 {
    let k = f / 1000.0;
    let dip = 6.5 * (-0.6 * (k - 3.3).powi(2)).exp();
    3.64 * k.powf(-0.8) - dip + 0.001 * k.powi(4)
}

/// Per-coefficient energy for a level in dB SPL.
pub fn spl_to_energy(db: f64) -> f64 {
    SPL_REFERENCE_ENERGY * 10f64.powf(db / 10.0)
}

/// `max(T_j, I_j * S(j))` for band `index`.
pub fn final_threshold<T: Scalar>(raw: T, layout: &BarkLayout, index: usize) -> Option<T> {
    let b = layout.band(index)?;
    Some(raw.max(T::lit(b.count() as f64 * b.ath_energy)))
}

/// Everything computed for one band of one frame.
#[derive(Debug, Clone, PartialEq)]
pub struct BandMasking<T> {
    pub band: usize,
    pub count: usize,
    pub energy: T,
    pub sfm_db: T,
    pub tonality: T,
    pub offset_db: T,
    pub spread: T,
    pub raw_threshold: T,
    pub ath_db: f64,
    pub ath_energy: T,
    pub threshold: T,
    /// Quantizer half-step, set by the embedder for payload bands.
    pub step: Option<T>,
    pub skipped: bool,
}

/// Masking quantities for every band of `layout` in one frame.
pub fn masking_report<T: Scalar>(s: &SubbandSpectrum<T>, layout: &BarkLayout) -> Vec<BandMasking<T>> {
    let energy = band_energy(s, layout);
    let spread_e = spread(&energy, layout);
    layout
        .bands
        .iter()
        .enumerate()
        .map(|(pos, b)| {
            let energies: Vec<T> = b.coefficients().map(|(sb, k)| s.get(sb)[k] * s.get(sb)[k]).collect();
            let sfm = spectral_flatness_of(&energies);
            let alpha = tonality(sfm);
            let offset = offset_db(alpha, b.index);
            let raw = raw_threshold(spread_e[pos], offset);
            let ath_energy = T::lit(b.ath_energy);
            BandMasking {
                band: b.index,
                count: b.count(),
                energy: energy[pos],
                sfm_db: sfm,
                tonality: alpha,
                offset_db: offset,
                spread: spread_e[pos],
                raw_threshold: raw,
                ath_db: b.ath_db,
                ath_energy,
                threshold: raw.max(ath_energy * T::from_usize_lossy(b.count())),
                step: None,
                skipped: false,
            }
        })
        .collect()
}

/// Masking analysis of one channel of a clip.
#[derive(Debug, Clone)]
pub struct MaskingReport<T> {
    pub channel: usize,
    /// `frames[f][p]` is band position `p` of frame `f`.
    pub frames: Vec<Vec<BandMasking<T>>>,
}

/// Frames, transforms and analyzes every channel of `clip`.
pub fn analyze_clip<T: Scalar>(clip: &AudioClip<T>, layout: &BarkLayout) -> Result<Vec<MaskingReport<T>>> {
    let transform = FrameTransform::new(layout.frame_len)?;
    clip.channels()
        .iter()
        .enumerate()
        .map(|(channel, samples)| {
            let set = frame_signal(samples, layout.frame_len, clip.sample_rate())?;
            let frames = set
                .frames
                .par_iter()
                .map(|f| transform.analyze(f).map(|s| masking_report(&s, layout)))
                .collect::<Result<Vec<_>>>()?;
            Ok(MaskingReport { channel, frames })
        })
        .collect()
}
