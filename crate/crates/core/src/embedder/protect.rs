use rayon::prelude::*;

use super::pseudo::{PreparedSource, PseudoTimbreSource};
use super::qim::{qim_embed, qim_extract, quant_step};
use super::sidecar::{BandStep, Sidecar, SourceTag};
use crate::audio::{clamp_unit, deframe, frame_length_for, frame_signal, AudioClip};
use crate::error::{Error, Result};
use crate::psychoacoustics::{
    masking_report, BandMasking, BarkLayout, CriticalBand, MaskingReport, DEFAULT_EMBED_BANDS,
};
use crate::scalar::Scalar;
use crate::transforms::FrameTransform;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ClipPolicy {
    /// Clamp to `[-1, 1]` and count.
    #[default]
    Clamp,
    /// Fail if any output sample leaves `[-1, 1]`.
    Reject,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EmbedConfig {
    /// Noise-to-mask ratio every payload band is held to, dB. Must be negative.
    pub nmr_limit_db: f64,
    pub embed_bands: Vec<usize>,
    /// A band is skipped when its threshold is below the absolute floor
    /// `I_j·S(j)` raised by this many dB. 0 never skips.
    pub skip_floor_db: f64,
    pub clip: ClipPolicy,
}

impl Default for EmbedConfig {
    fn default() -> Self {
        Self {
            nmr_limit_db: -5.0,
            embed_bands: DEFAULT_EMBED_BANDS.to_vec(),
            skip_floor_db: 0.0,
            clip: ClipPolicy::Clamp,
        }
    }
}

impl EmbedConfig {
    pub fn validate(&self) -> Result<()> {
        if self.nmr_limit_db.partial_cmp(&0.0) != Some(std::cmp::Ordering::Less) || !self.nmr_limit_db.is_finite() {
            return Err(Error::InvalidConfig(format!(
                "nmr limit {} dB must be negative",
                self.nmr_limit_db
            )));
        }
        if !self.skip_floor_db.is_finite() {
            return Err(Error::InvalidConfig("skip floor must be finite".into()));
        }
        if self.embed_bands.is_empty() || self.embed_bands.iter().any(|&b| b == 0 || b > 25) {
            return Err(Error::InvalidConfig(format!(
                "embed bands {:?} must be within 1..=25",
                self.embed_bands
            )));
        }
        Ok(())
    }
}

/// What happened in one payload band of one frame.
#[derive(Debug, Clone, PartialEq)]
pub struct BandOutcome<T> {
    pub band: usize,
    pub count: usize,
    pub threshold: T,
    pub step: Option<T>,
    /// Largest per-coefficient change.
    pub max_error: T,
    /// Sum of squared coefficient changes.
    pub noise_energy: T,
}

impl<T: Scalar> BandOutcome<T> {
    pub fn skipped(&self) -> bool {
        self.step.is_none()
    }

    /// Worst-case noise-to-mask ratio, `10·log10(I·e_max² / T_z)`.
    pub fn worst_nmr_db(&self) -> f64 {
        let e = self.max_error.to_f64_lossy();
        10.0 * (self.count as f64 * e * e / self.threshold.to_f64_lossy()).log10()
    }

    /// Actual noise-to-mask ratio, `10·log10(sum e² / T_z)`.
    pub fn nmr_db(&self) -> f64 {
        10.0 * (self.noise_energy.to_f64_lossy() / self.threshold.to_f64_lossy()).log10()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Warning {
    /// Every payload band of every complete frame was skipped.
    SilentInput,
    /// The clip is shorter than one frame, so nothing was embedded.
    NoCompleteFrame,
}

#[derive(Debug, Clone)]
pub struct ProtectOutcome<T> {
    pub clip: AudioClip<T>,
    pub sidecar: Sidecar,
    pub layout: BarkLayout,
    /// `bands[channel][frame][i]` for `layout.embed_bands[i]`.
    pub bands: Vec<Vec<Vec<BandOutcome<T>>>>,
    /// Per-frame masking analysis of the input, with steps filled in.
    pub masking: Vec<Vec<Vec<BandMasking<T>>>>,
    pub clipped: usize,
    pub warnings: Vec<Warning>,
}

impl<T: Scalar> ProtectOutcome<T> {
    pub fn frames(&self) -> usize {
        self.bands.first().map_or(0, Vec::len)
    }

    fn embedded(&self) -> impl Iterator<Item = &BandOutcome<T>> {
        self.bands.iter().flatten().flatten().filter(|b| !b.skipped())
    }

    pub fn skipped_count(&self) -> usize {
        self.bands.iter().flatten().flatten().filter(|b| b.skipped()).count()
    }

    pub fn embedded_count(&self) -> usize {
        self.embedded().count()
    }

    /// Mean over embedded bands of the actual NMR in dB.
    pub fn mean_nmr_db(&self) -> Option<f64> {
        let v: Vec<f64> = self
            .embedded()
            .map(BandOutcome::nmr_db)
            .filter(|v| v.is_finite())
            .collect();
        (!v.is_empty()).then(|| v.iter().sum::<f64>() / v.len() as f64)
    }

    /// Largest worst-case NMR over embedded bands.
    pub fn max_worst_nmr_db(&self) -> Option<f64> {
        self.embedded()
            .map(BandOutcome::worst_nmr_db)
            .filter(|v| v.is_finite())
            .reduce(f64::max)
    }
}

/// Quantizer step for one band, or `None` when the band is skipped because
/// its threshold sits below the configured floor.
pub fn band_step<T: Scalar>(m: &BandMasking<T>, band: &CriticalBand, cfg: &EmbedConfig) -> Result<Option<T>> {
    let floor = T::lit(10f64.powf(cfg.skip_floor_db / 10.0) * band.count() as f64 * band.ath_energy);
    if m.threshold < floor {
        return Ok(None);
    }
    match quant_step(m.threshold, band.count(), cfg.nmr_limit_db) {
        Ok(s) => Ok(Some(s)),
        Err(Error::SkippedBand { .. }) => Ok(None),
        Err(e) => Err(e),
    }
}

/// Fills `step` and `skipped` of the payload bands in an analysis, as
/// [`protect`] would for the same input.
pub fn plan_steps<T: Scalar>(reports: &mut [MaskingReport<T>], layout: &BarkLayout, cfg: &EmbedConfig) -> Result<()> {
    cfg.validate()?;
    for r in reports.iter_mut() {
        for frame in r.frames.iter_mut() {
            for (pos, band) in layout.embed_iter() {
                let step = band_step(&frame[pos], band, cfg)?;
                frame[pos].step = step;
                frame[pos].skipped = step.is_none();
            }
        }
    }
    Ok(())
}

/// Embeds payload bits below the masking threshold of every payload band.
pub fn protect<T: Scalar>(
    clip: &AudioClip<T>,
    src: &PseudoTimbreSource<T>,
    cfg: &EmbedConfig,
) -> Result<ProtectOutcome<T>> {
    cfg.validate()?;
    if clip.is_empty() {
        return Err(Error::EmptyInput);
    }
    let fs = clip.sample_rate();
    let frame_len = frame_length_for(fs)?;
    let layout = BarkLayout::new(fs, frame_len, &cfg.embed_bands)?;
    let transform = FrameTransform::<T>::new(frame_len)?;
    let source = PreparedSource::prepare(src, &layout, clip.len(), clip.channel_count())?;
    let embed_positions: Vec<usize> = layout.embed_iter().map(|(p, _)| p).collect();

    let mut out_channels = Vec::with_capacity(clip.channel_count());
    let mut outcomes = Vec::with_capacity(clip.channel_count());
    let mut masking_all = Vec::with_capacity(clip.channel_count());
    let mut clipped = 0;
    for (ch, samples) in clip.channels().iter().enumerate() {
        let mut set = frame_signal(samples, frame_len, fs)?;
        // the padded tail of a partial last frame is cut off by deframe and
        // would take part of the payload with it
        let partial = (set.pad_len > 0).then(|| set.frames.len() - 1);
        let processed = set
            .frames
            .par_iter()
            .enumerate()
            .map(|(f, frame)| {
                let mut spec = transform.analyze(frame)?;
                let mut report = masking_report(&spec, &layout);
                let mut bands = Vec::with_capacity(embed_positions.len());
                for &pos in &embed_positions {
                    let band = &layout.bands[pos];
                    let m = &mut report[pos];
                    let mut outcome = BandOutcome {
                        band: band.index,
                        count: band.count(),
                        threshold: m.threshold,
                        step: None,
                        max_error: T::zero(),
                        noise_energy: T::zero(),
                    };
                    let step = if partial == Some(f) {
                        None
                    } else {
                        band_step(m, band, cfg)?
                    };
                    let Some(step) = step else {
                        m.skipped = true;
                        bands.push(outcome);
                        continue;
                    };
                    m.step = Some(step);
                    let bits = source.bits(ch, f, band);
                    for ((sb, k), bit) in band.coefficients().zip(bits) {
                        let x = &mut spec.get_mut(sb)[k];
                        let y = qim_embed(*x, bit, step);
                        let e = (y - *x).abs();
                        outcome.max_error = outcome.max_error.max(e);
                        outcome.noise_energy += e * e;
                        *x = y;
                    }
                    outcome.step = Some(step);
                    bands.push(outcome);
                }
                let frame_out = transform.synthesize(&spec)?;
                Ok((frame_out, bands, report))
            })
            .collect::<Result<Vec<_>>>()?;

        let mut ch_bands = Vec::with_capacity(processed.len());
        let mut ch_masking = Vec::with_capacity(processed.len());
        for (slot, (frame_out, bands, report)) in set.frames.iter_mut().zip(processed) {
            *slot = frame_out;
            ch_bands.push(bands);
            ch_masking.push(report);
        }
        let mut out = deframe(&set)?;
        let n = clamp_unit(&mut out);
        if n > 0 && cfg.clip == ClipPolicy::Reject {
            return Err(Error::Clipped(n));
        }
        clipped += n;
        out_channels.push(out);
        outcomes.push(ch_bands);
        masking_all.push(ch_masking);
    }

    let sidecar = Sidecar {
        sample_rate: fs,
        frame_len,
        bands: layout.embed_bands.clone(),
        source: match src {
            PseudoTimbreSource::Keyed { key } => SourceTag::Keyed(*key),
            PseudoTimbreSource::Decoy(_) => SourceTag::Decoy,
        },
        steps: outcomes
            .iter()
            .map(|frames| {
                frames
                    .iter()
                    .map(|bands| {
                        bands
                            .iter()
                            .map(|b| BandStep {
                                step: b.step.map_or(0.0, Scalar::to_f64_lossy),
                                skipped: b.skipped(),
                            })
                            .collect()
                    })
                    .collect()
            })
            .collect(),
    };
    let mut warnings = Vec::new();
    let complete = clip.len() / frame_len;
    if complete == 0 {
        warnings.push(Warning::NoCompleteFrame);
    } else if outcomes
        .iter()
        .all(|ch| ch[..complete].iter().flatten().all(BandOutcome::skipped))
    {
        warnings.push(Warning::SilentInput);
    }
    let out_clip = AudioClip::new(out_channels, fs)?.with_clipped(clipped);
    Ok(ProtectOutcome {
        clip: out_clip,
        sidecar,
        layout,
        bands: outcomes,
        masking: masking_all,
        clipped,
        warnings,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BandBer {
    pub band: usize,
    pub errors: usize,
    pub bits: usize,
}

impl BandBer {
    pub fn rate(&self) -> f64 {
        if self.bits == 0 {
            0.0
        } else {
            self.errors as f64 / self.bits as f64
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BerReport {
    pub per_band: Vec<BandBer>,
}

impl BerReport {
    pub fn errors(&self) -> usize {
        self.per_band.iter().map(|b| b.errors).sum()
    }

    pub fn bits(&self) -> usize {
        self.per_band.iter().map(|b| b.bits).sum()
    }

    pub fn overall(&self) -> f64 {
        if self.bits() == 0 {
            0.0
        } else {
            self.errors() as f64 / self.bits() as f64
        }
    }
}

/// Re-reads the payload with the sidecar steps and counts bit errors.
pub fn verify<T: Scalar>(clip: &AudioClip<T>, sidecar: &Sidecar, src: &PseudoTimbreSource<T>) -> Result<BerReport> {
    let mismatch = |m: String| Error::SidecarMismatch(m);
    if clip.sample_rate() != sidecar.sample_rate {
        return Err(mismatch(format!(
            "clip rate {} Hz, sidecar rate {} Hz",
            clip.sample_rate(),
            sidecar.sample_rate
        )));
    }
    if clip.channel_count() != sidecar.channels() {
        return Err(mismatch(format!(
            "clip has {} channels, sidecar {}",
            clip.channel_count(),
            sidecar.channels()
        )));
    }
    let frame_len = frame_length_for(clip.sample_rate())?;
    if frame_len != sidecar.frame_len {
        return Err(mismatch(format!(
            "frame length {} vs sidecar {}",
            frame_len, sidecar.frame_len
        )));
    }
    if clip.is_empty() {
        return Err(Error::EmptyInput);
    }
    let frames = clip.len().div_ceil(frame_len);
    if frames != sidecar.frames() {
        return Err(mismatch(format!(
            "clip has {frames} frames, sidecar {}",
            sidecar.frames()
        )));
    }
    let layout = BarkLayout::new(clip.sample_rate(), frame_len, &sidecar.bands)?;
    if layout.embed_bands != sidecar.bands {
        return Err(mismatch(format!(
            "sidecar bands {:?} not available at this rate",
            sidecar.bands
        )));
    }
    let transform = FrameTransform::<T>::new(frame_len)?;
    let source = PreparedSource::prepare(src, &layout, clip.len(), clip.channel_count())?;
    let bands: Vec<_> = layout.embed_iter().map(|(_, b)| b).collect();

    let mut totals: Vec<BandBer> = bands
        .iter()
        .map(|b| BandBer {
            band: b.index,
            errors: 0,
            bits: 0,
        })
        .collect();
    for (ch, samples) in clip.channels().iter().enumerate() {
        let set = frame_signal(samples, frame_len, clip.sample_rate())?;
        let counts = set
            .frames
            .par_iter()
            .enumerate()
            .map(|(f, frame)| {
                let spec = transform.analyze(frame)?;
                let mut row = vec![(0usize, 0usize); bands.len()];
                for (i, band) in bands.iter().enumerate() {
                    let st = sidecar.steps[ch][f][i];
                    if st.skipped {
                        continue;
                    }
                    let step = T::lit(st.step);
                    let expected = source.bits(ch, f, band);
                    for ((sb, k), bit) in band.coefficients().zip(expected) {
                        if qim_extract(spec.get(sb)[k], step) != bit {
                            row[i].0 += 1;
                        }
                        row[i].1 += 1;
                    }
                }
                Ok(row)
            })
            .collect::<Result<Vec<_>>>()?;
        for row in counts {
            for (t, (e, n)) in totals.iter_mut().zip(row) {
                t.errors += e;
                t.bits += n;
            }
        }
    }
    Ok(BerReport { per_band: totals })
}
