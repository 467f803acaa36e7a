//! Objective distortion measures between an original and a processed clip.

use rayon::prelude::*;

use crate::audio::{frame_length_for, frame_signal, AudioClip};
use crate::embedder::{verify, BerReport, PseudoTimbreSource, Sidecar};
use crate::error::{Error, Result};
use crate::psychoacoustics::{masking_report, BarkLayout, DEFAULT_EMBED_BANDS};
use crate::scalar::Scalar;
use crate::stft::{frame_size_for, Stft};
use crate::transforms::FrameTransform;

/// Limit reported when the error vanishes.
pub const SNR_CAP_DB: f64 = 120.0;
pub const SEGMENT_SECONDS: f64 = 0.030;
pub const SEG_SNR_RANGE_DB: (f64, f64) = (-10.0, 35.0);
const POWER_FLOOR: f64 = 1e-12;

fn ratio_db(signal: f64, error: f64) -> f64 {
    if error <= 0.0 {
        return SNR_CAP_DB;
    }
    if signal <= 0.0 {
        return -SNR_CAP_DB;
    }
    (10.0 * (signal / error).log10()).clamp(-SNR_CAP_DB, SNR_CAP_DB)
}

fn energies<T: Scalar>(x: &[T], y: &[T]) -> (f64, f64) {
    x.iter().zip(y).fold((0.0, 0.0), |(s, e), (&a, &b)| {
        let (a, b) = (a.to_f64_lossy(), b.to_f64_lossy());
        (s + a * a, e + (a - b) * (a - b))
    })
}

/// `10·log10(sum x² / sum (x-y)²)`, within ±120 dB.
pub fn snr_db<T: Scalar>(x: &[T], y: &[T]) -> f64 {
    let (s, e) = energies(x, y);
    ratio_db(s, e)
}

/// Mean of per-window SNR over 30 ms windows, each clamped to [-10, 35] dB.
/// Windows where the original is exactly silent are left out.
pub fn segmental_snr_db<T: Scalar>(x: &[T], y: &[T], fs: u32) -> f64 {
    let w = ((SEGMENT_SECONDS * fs as f64).round() as usize).max(1);
    let (lo, hi) = SEG_SNR_RANGE_DB;
    let vals: Vec<f64> = x
        .chunks(w)
        .zip(y.chunks(w))
        .filter_map(|(a, b)| {
            let (s, e) = energies(a, b);
            (s > 0.0).then(|| ratio_db(s, e).clamp(lo, hi))
        })
        .collect();
    if vals.is_empty() {
        hi
    } else {
        vals.iter().sum::<f64>() / vals.len() as f64
    }
}

/// Log-spectral distance in dB: RMS over bins of the log power ratio,
/// averaged over STFT frames where either signal has energy.
pub fn log_spectral_distance<T: Scalar>(x: &[T], y: &[T], fs: u32) -> f64 {
    let stft = Stft::<T>::new(frame_size_for(fs));
    let (sx, sy) = (stft.analyze(x), stft.analyze(y));
    let bins = stft.size() / 2 + 1;
    let mut total = 0.0;
    let mut frames = 0usize;
    for (a, b) in sx.iter().zip(&sy) {
        let pa: Vec<f64> = a[..bins].iter().map(|c| c.norm_sqr().to_f64_lossy()).collect();
        let pb: Vec<f64> = b[..bins].iter().map(|c| c.norm_sqr().to_f64_lossy()).collect();
        if pa.iter().chain(&pb).all(|&p| p == 0.0) {
            continue;
        }
        let msq = pa
            .iter()
            .zip(&pb)
            .map(|(&p, &q)| (10.0 * ((p + POWER_FLOOR) / (q + POWER_FLOOR)).log10()).powi(2))
            .sum::<f64>()
            / bins as f64;
        total += msq.sqrt();
        frames += 1;
    }
    if frames == 0 {
        0.0
    } else {
        total / frames as f64
    }
}

/// Noise-to-mask ratio of the difference in one critical band, over all
/// frames and channels where the band carries payload.
#[derive(Debug, Clone, PartialEq)]
pub struct BandNmr {
    pub band: usize,
    pub frames: usize,
    pub mean_db: f64,
    pub max_db: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MetricsReport {
    pub snr_db: f64,
    pub seg_snr_db: f64,
    pub lsd_db: f64,
    pub bands: Vec<BandNmr>,
    pub ber: Option<BerReport>,
    pub clipped: usize,
}

fn same_shape<T: Scalar>(a: &AudioClip<T>, b: &AudioClip<T>) -> Result<()> {
    if a.sample_rate() != b.sample_rate() || a.channel_count() != b.channel_count() || a.len() != b.len() {
        return Err(Error::BadLength(format!(
            "clips differ in shape: {} Hz x{} x{} vs {} Hz x{} x{}",
            a.sample_rate(),
            a.channel_count(),
            a.len(),
            b.sample_rate(),
            b.channel_count(),
            b.len()
        )));
    }
    if a.is_empty() {
        return Err(Error::EmptyInput);
    }
    Ok(())
}

/// Per-band NMR of `processed - original` against the original's thresholds.
/// With a sidecar only its bands and unskipped frames count.
pub fn band_nmr<T: Scalar>(
    original: &AudioClip<T>,
    processed: &AudioClip<T>,
    sidecar: Option<&Sidecar>,
) -> Result<Vec<BandNmr>> {
    same_shape(original, processed)?;
    let fs = original.sample_rate();
    let frame_len = frame_length_for(fs)?;
    let wanted = sidecar.map_or(DEFAULT_EMBED_BANDS.to_vec(), |s| s.bands.clone());
    let layout = BarkLayout::new(fs, frame_len, &wanted)?;
    let transform = FrameTransform::<T>::new(frame_len)?;
    let embed: Vec<_> = layout.embed_iter().collect();
    let mut per_band: Vec<Vec<f64>> = vec![Vec::new(); embed.len()];
    for ch in 0..original.channel_count() {
        let a = frame_signal(original.channel(ch), frame_len, fs)?;
        let b = frame_signal(processed.channel(ch), frame_len, fs)?;
        let rows = a
            .frames
            .par_iter()
            .zip(b.frames.par_iter())
            .enumerate()
            .map(|(f, (fa, fb))| {
                let (sa, sb) = (transform.analyze(fa)?, transform.analyze(fb)?);
                let masking = masking_report(&sa, &layout);
                let row: Vec<Option<f64>> = embed
                    .iter()
                    .enumerate()
                    .map(|(i, &(pos, band))| {
                        let skipped = sidecar
                            .and_then(|s| s.steps.get(ch)?.get(f)?.get(i).map(|st| st.skipped))
                            .unwrap_or(false);
                        if skipped {
                            return None;
                        }
                        let noise: f64 = band
                            .coefficients()
                            .map(|(s, k)| (sb.get(s)[k] - sa.get(s)[k]).to_f64_lossy().powi(2))
                            .sum();
                        let t = masking[pos].threshold.to_f64_lossy();
                        let v = 10.0 * (noise / t).log10();
                        v.is_finite().then_some(v)
                    })
                    .collect();
                Ok(row)
            })
            .collect::<Result<Vec<_>>>()?;
        for row in rows {
            for (acc, v) in per_band.iter_mut().zip(row) {
                acc.extend(v);
            }
        }
    }
    Ok(embed
        .iter()
        .zip(per_band)
        .map(|(&(_, band), v)| BandNmr {
            band: band.index,
            frames: v.len(),
            mean_db: if v.is_empty() {
                f64::NEG_INFINITY
            } else {
                v.iter().sum::<f64>() / v.len() as f64
            },
            max_db: v.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        })
        .collect())
}

/// All metrics for one pair of clips. Channels are concatenated for the
/// waveform measures. BER needs both the sidecar and the payload source.
pub fn compare<T: Scalar>(
    original: &AudioClip<T>,
    processed: &AudioClip<T>,
    payload: Option<(&Sidecar, &PseudoTimbreSource<T>)>,
) -> Result<MetricsReport> {
    same_shape(original, processed)?;
    let fs = original.sample_rate();
    let (mut s, mut e) = (0.0, 0.0);
    let (mut seg, mut lsd) = (0.0, 0.0);
    for (a, b) in original.channels().iter().zip(processed.channels()) {
        let (si, ei) = energies(a, b);
        s += si;
        e += ei;
        seg += segmental_snr_db(a, b, fs);
        lsd += log_spectral_distance(a, b, fs);
    }
    let n = original.channel_count() as f64;
    let ber = payload.map(|(sc, src)| verify(processed, sc, src)).transpose()?;
    Ok(MetricsReport {
        snr_db: ratio_db(s, e),
        seg_snr_db: seg / n,
        lsd_db: lsd / n,
        bands: band_nmr(original, processed, payload.map(|p| p.0))?,
        ber,
        clipped: processed.clipped(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn snr_known_values() {
        let x = vec![1.0f64, -1.0, 1.0, -1.0];
        let y: Vec<f64> = x.iter().map(|v| v * 0.9).collect();
        // error power is 0.01 of the signal
        assert!((snr_db(&x, &y) - 20.0).abs() < 1e-9);
        let z: Vec<f64> = x.iter().map(|v| v * 1.1).collect();
        assert!((snr_db(&x, &z) - 20.0).abs() < 1e-9);
        assert_eq!(log_spectral_distance(&x, &x, 8000), 0.0);
        assert_eq!(snr_db(&x, &x), SNR_CAP_DB);
        assert_eq!(snr_db(&[0.0f64; 4], &x), -SNR_CAP_DB);
    }

    #[test]
    fn segmental_snr_clamps_and_skips_silence() {
        let fs = 1000;
        let mut x = vec![0.5f64; 60];
        x.extend(vec![0.0; 30]);
        let mut y = x.clone();
        for v in &mut y[..30] {
            *v *= 0.99; // 40 dB, clamped to 35
        }
        for v in &mut y[30..60] {
            *v = -*v; // -6 dB
        }
        let got = segmental_snr_db(&x, &y, fs);
        let want = (35.0 + 10.0 * (0.25f64 / 1.0).log10()) / 2.0;
        assert!((got - want).abs() < 1e-9, "{got} vs {want}");
    }

    #[test]
    fn lsd_of_a_gain() {
        let x: Vec<f64> = (0..4000).map(|i| ((i * 31 % 97) as f64 / 97.0 - 0.5) * 0.4).collect();
        assert_eq!(log_spectral_distance(&x, &x, 8000), 0.0);
        let y: Vec<f64> = x.iter().map(|v| v * 0.5).collect();
        let got = log_spectral_distance(&x, &y, 8000);
        assert!((got - 6.0206).abs() < 0.05, "{got}");
    }

    #[test]
    fn shape_mismatch_is_rejected() {
        let a = AudioClip::mono(vec![0.1f64; 100], 8000).unwrap();
        let b = AudioClip::mono(vec![0.1f64; 101], 8000).unwrap();
        assert!(compare(&a, &b, None).is_err());
    }
}
