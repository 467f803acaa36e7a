use std::ops::Range;

use super::masking::{ath_db, spl_to_energy};
use crate::audio::check_rate;
use crate::error::{Error, Result};
use crate::transforms::Subband;

/// Critical band edges in Hz; band `j` (1-based) spans `(EDGES[j-1], EDGES[j]]`.
pub const BAND_EDGES_HZ: [u32; 26] = [
    20, 100, 200, 300, 400, 510, 630, 770, 920, 1080, 1270, 1480, 1720, 2000, 2320, 2700, 3150, 3700, 4400, 5300, 6400,
    7700, 9500, 12000, 15500, 22050,
];

/// Nominal centre frequency of each band, used for the absolute threshold.
pub const BAND_CENTERS_HZ: [f64; 25] = [
    50.0, 150.0, 250.0, 350.0, 450.0, 570.0, 700.0, 840.0, 1000.0, 1170.0, 1370.0, 1600.0, 1850.0, 2150.0, 2500.0,
    2900.0, 3400.0, 4000.0, 4800.0, 5800.0, 7000.0, 8500.0, 10500.0, 13500.0, 19500.0,
];

pub const DEFAULT_EMBED_BANDS: [usize; 7] = [1, 2, 3, 4, 5, 6, 7];

/// A contiguous run of coefficients of one subband spectrum.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BandSegment {
    pub subband: Subband,
    pub range: Range<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CriticalBand {
    /// 1-based Bark band number.
    pub index: usize,
    pub low_hz: f64,
    pub high_hz: f64,
    pub center_hz: f64,
    pub segments: Vec<BandSegment>,
    /// Absolute threshold at the centre frequency, dB SPL.
    pub ath_db: f64,
    /// Per-coefficient energy of the absolute threshold.
    pub ath_energy: f64,
}

impl CriticalBand {
    /// Number of DCT coefficients in the band.
    pub fn count(&self) -> usize {
        self.segments.iter().map(|s| s.range.len()).sum()
    }

    pub fn coefficients(&self) -> impl Iterator<Item = (Subband, usize)> + '_ {
        self.segments
            .iter()
            .flat_map(|s| s.range.clone().map(move |k| (s.subband, k)))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BarkLayout {
    pub sample_rate: u32,
    pub frame_len: usize,
    /// Spacing between DCT coefficients, `fs / (2L)`.
    pub resolution_hz: f64,
    /// Bands with at least one coefficient, in ascending order.
    pub bands: Vec<CriticalBand>,
    /// Band numbers that carry payload.
    pub embed_bands: Vec<usize>,
    /// Requested embed bands that have no coefficients at this rate.
    pub dropped: Vec<usize>,
}

/// Layout with the default embed set (bands 1 to 7).
pub fn bark_layout(fs: u32, frame_len: usize) -> Result<BarkLayout> {
    BarkLayout::new(fs, frame_len, &DEFAULT_EMBED_BANDS)
}

impl BarkLayout {
    pub fn new(fs: u32, frame_len: usize, embed: &[usize]) -> Result<Self> {
        check_rate(fs)?;
        if frame_len == 0 || !frame_len.is_multiple_of(8) {
            return Err(Error::BadLength(format!(
                "frame length {frame_len} is not a positive multiple of 8"
            )));
        }
        let n = frame_len / 8;
        let (fs64, l64) = (fs as u64, frame_len as u64);
        let denom = 16 * l64;
        // frequency of a coefficient scaled by 16L, so band tests stay in integers
        let scaled = |sb: Subband, k: usize| -> u64 {
            let k = k as u64;
            match sb {
                Subband::Approx => 8 * k * fs64,
                Subband::Detail => fs64 * l64 + 8 * k * fs64,
            }
        };
        let mut bands = Vec::new();
        for j in 1..=BAND_CENTERS_HZ.len() {
            let (low, high) = (BAND_EDGES_HZ[j - 1] as u64, BAND_EDGES_HZ[j] as u64);
            if 8 * low >= fs64 {
                break;
            }
            let mut segments = Vec::new();
            for sb in [Subband::Approx, Subband::Detail] {
                let inside: Vec<usize> = (0..n)
                    .filter(|&k| {
                        let f = scaled(sb, k);
                        f > low * denom && f <= high * denom
                    })
                    .collect();
                if let (Some(&a), Some(&b)) = (inside.first(), inside.last()) {
                    segments.push(BandSegment {
                        subband: sb,
                        range: a..b + 1,
                    });
                }
            }
            if segments.is_empty() {
                continue;
            }
            let center = BAND_CENTERS_HZ[j - 1];
            let ath = ath_db(center);
            bands.push(CriticalBand {
                index: j,
                low_hz: low as f64,
                high_hz: high as f64,
                center_hz: center,
                segments,
                ath_db: ath,
                ath_energy: spl_to_energy(ath),
            });
        }
        let mut embed_bands = Vec::new();
        let mut dropped = Vec::new();
        let mut requested = embed.to_vec();
        requested.sort_unstable();
        requested.dedup();
        for j in requested {
            if bands.iter().any(|b| b.index == j) {
                embed_bands.push(j);
            } else {
                dropped.push(j);
            }
        }
        Ok(Self {
            sample_rate: fs,
            frame_len,
            resolution_hz: fs as f64 / (2.0 * frame_len as f64),
            bands,
            embed_bands,
            dropped,
        })
    }

    pub fn band(&self, index: usize) -> Option<&CriticalBand> {
        self.bands.iter().find(|b| b.index == index)
    }

    /// Position of band `index` within [`BarkLayout::bands`].
    pub fn position(&self, index: usize) -> Option<usize> {
        self.bands.iter().position(|b| b.index == index)
    }

    pub fn embed_iter(&self) -> impl Iterator<Item = (usize, &CriticalBand)> + '_ {
        self.bands
            .iter()
            .enumerate()
            .filter(|(_, b)| self.embed_bands.contains(&b.index))
    }
}
