//! Deterministic speech-like test material: a pitched glottal source through
//! moving formant resonators, fricative noise, syllabic envelopes, pauses
//! between words and a low room-noise floor.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::audio::AudioClip;
use crate::error::Result;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpeechParams {
    pub seed: u64,
    pub sample_rate: u32,
    pub seconds: f64,
    /// Mean pitch, Hz.
    pub f0_hz: f64,
    /// RMS of the active (non-pause) part, dBFS.
    pub level_dbfs: f64,
    /// RMS of the added white noise floor, dBFS.
    pub noise_floor_dbfs: f64,
}

impl Default for SpeechParams {
    fn default() -> Self {
        Self {
            seed: 0,
            sample_rate: 16000,
            seconds: 3.0,
            f0_hz: 120.0,
            level_dbfs: -22.0,
            noise_floor_dbfs: -65.0,
        }
    }
}

const VOWELS: [[f64; 3]; 6] = [
    [730.0, 1090.0, 2440.0],
    [270.0, 2290.0, 3010.0],
    [300.0, 870.0, 2240.0],
    [530.0, 1840.0, 2480.0],
    [570.0, 840.0, 2410.0],
    [660.0, 1720.0, 2410.0],
];
const BANDWIDTHS: [f64; 4] = [60.0, 90.0, 120.0, 150.0];
const F4: f64 = 3500.0;

#[derive(Clone, Copy, Default)]
struct Resonator {
    y1: f64,
    y2: f64,
}

impl Resonator {
    /// Two-pole resonator with unity gain at DC.
    fn tick(&mut self, x: f64, f: f64, bw: f64, fs: f64) -> f64 {
        let r = (-PI * bw / fs).exp();
        let a1 = 2.0 * r * (2.0 * PI * f / fs).cos();
        let a2 = -r * r;
        let y = (1.0 - a1 - a2) * x + a1 * self.y1 + a2 * self.y2;
        self.y2 = self.y1;
        self.y1 = y;
        y
    }
}

/// Rosenberg glottal flow over one period, `phase` in [0, 1).
fn glottal_flow(phase: f64) -> f64 {
    const OPEN: f64 = 0.4;
    const CLOSE: f64 = 0.16;
    if phase < OPEN {
        0.5 * (1.0 - (PI * phase / OPEN).cos())
    } else if phase < OPEN + CLOSE {
        (PI * (phase - OPEN) / (2.0 * CLOSE)).cos()
    } else {
        0.0
    }
}

struct Plan {
    voice: Vec<f64>,
    noise: Vec<f64>,
    noise_fc: Vec<f64>,
    formants: Vec<[f64; 3]>,
    pitch_scale: Vec<f64>,
}

fn ramp(n: usize, i: usize, edge: usize) -> f64 {
    let edge = edge.min(n / 2).max(1);
    let d = i.min(n - 1 - i);
    if d >= edge {
        1.0
    } else {
        0.5 - 0.5 * (PI * d as f64 / edge as f64).cos()
    }
}

fn plan(p: &SpeechParams, rng: &mut ChaCha8Rng) -> Plan {
    let fs = p.sample_rate as f64;
    let n = (p.seconds * fs).round() as usize;
    let ms = |v: f64| (v * fs / 1000.0).round() as usize;
    let mut pl = Plan {
        voice: vec![0.0; n],
        noise: vec![0.0; n],
        noise_fc: vec![4500.0; n],
        formants: vec![VOWELS[0]; n],
        pitch_scale: vec![1.0; n],
    };
    let scale = p.f0_hz.max(80.0) / 120.0;
    let formant_scale = if scale > 1.4 { 1.17 } else { 1.0 };
    let mut t = ms(rng.random_range(50.0..200.0));
    let mut target = VOWELS[0];
    while t < n {
        for _ in 0..rng.random_range(1..=3) {
            let roll: f64 = rng.random();
            if roll < 0.45 {
                let len = ms(rng.random_range(60.0..130.0));
                let fc = rng.random_range(2500.0..5500.0);
                let amp = rng.random_range(0.15..0.4);
                for i in 0..len.min(n.saturating_sub(t)) {
                    pl.noise[t + i] = amp * ramp(len, i, ms(15.0));
                    pl.noise_fc[t + i] = fc;
                }
                t += len;
            } else if roll < 0.7 {
                t += ms(rng.random_range(20.0..50.0));
                let len = ms(12.0);
                for i in 0..len.min(n.saturating_sub(t)) {
                    pl.noise[t + i] = 0.8 * (1.0 - i as f64 / len as f64);
                    pl.noise_fc[t + i] = 3000.0;
                }
                t += len;
            }
            let len = ms(rng.random_range(100.0..260.0));
            let next = VOWELS[rng.random_range(0..VOWELS.len())].map(|f| f * formant_scale);
            let accent = rng.random_range(0.92..1.1);
            let amp = rng.random_range(0.6..1.0);
            for i in 0..len.min(n.saturating_sub(t)) {
                let w = (i as f64 / ms(40.0).max(1) as f64).min(1.0);
                pl.voice[t + i] = amp * ramp(len, i, ms(25.0));
                pl.formants[t + i] = [0, 1, 2].map(|k| target[k] + w * (next[k] - target[k]));
                pl.pitch_scale[t + i] = accent;
            }
            target = next;
            t += len;
        }
        t += ms(if rng.random::<f64>() < 0.25 {
            rng.random_range(300.0..500.0)
        } else {
            rng.random_range(60.0..220.0)
        });
    }
    pl
}

/// Renders one clip. The same parameters always give the same samples.
pub fn speech_like(p: &SpeechParams) -> Result<AudioClip<f64>> {
    let fs = p.sample_rate as f64;
    let mut rng = ChaCha8Rng::seed_from_u64(p.seed);
    let pl = plan(p, &mut rng);
    let n = pl.voice.len();
    let nyq_cap = 0.45 * fs;
    let mut formant_bank = [Resonator::default(); 4];
    let mut fric = [Resonator::default(); 2];
    let mut phase = 0.0;
    let mut prev_flow = 0.0;
    let mut prev_noise = 0.0;
    let vibrato_phase: f64 = rng.random_range(0.0..2.0 * PI);
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let time = i as f64 / fs;
        let f0 = p.f0_hz
            * pl.pitch_scale[i]
            * (1.0 - 0.12 * time / p.seconds)
            * (1.0 + 0.03 * (2.0 * PI * 5.0 * time + vibrato_phase).sin());
        phase = (phase + f0 / fs).fract();
        let flow = glottal_flow(phase);
        let mut v = (flow - prev_flow) * pl.voice[i];
        prev_flow = flow;
        let fr = pl.formants[i];
        for (k, res) in formant_bank.iter_mut().enumerate() {
            let f = if k < 3 { fr[k] } else { F4 };
            if f < nyq_cap {
                v = res.tick(v, f, BANDWIDTHS[k], fs);
            }
        }

        let w: f64 = StandardNormal.sample(&mut rng);
        let w = w * pl.noise[i];
        let hp = w - prev_noise;
        prev_noise = w;
        let fc = pl.noise_fc[i].min(nyq_cap);
        let s = fric[0].tick(hp, fc, 1500.0, fs) + 0.3 * fric[1].tick(hp, 0.6 * fc, 2500.0, fs);
        out.push(40.0 * v + 0.5 * s);
    }

    let active: Vec<f64> = out
        .iter()
        .zip(pl.voice.iter().zip(&pl.noise))
        .filter(|(_, (v, w))| **v > 0.1 || **w > 0.1)
        .map(|(x, _)| *x)
        .collect();
    let rms = (active.iter().map(|x| x * x).sum::<f64>() / active.len().max(1) as f64).sqrt();
    if rms > 0.0 {
        let mut g = 10f64.powf(p.level_dbfs / 20.0) / rms;
        let peak = out.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        g = g.min(0.95 / peak);
        out.iter_mut().for_each(|x| *x *= g);
    }
    let floor = 10f64.powf(p.noise_floor_dbfs / 20.0);
    for x in out.iter_mut() {
        let w: f64 = StandardNormal.sample(&mut rng);
        *x += floor * w;
    }
    AudioClip::mono(out, p.sample_rate)
}

pub const CORPUS_RATES: [u32; 3] = [8000, 16000, 44100];

/// Parameters of clip `i` of the standard test corpus: rates cycle through
/// 8, 16 and 44.1 kHz, pitch alternates between low and high voices.
pub fn corpus_params(i: usize) -> SpeechParams {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0000 + i as u64);
    let high = i % 2 == 1;
    SpeechParams {
        seed: i as u64,
        sample_rate: CORPUS_RATES[i % 3],
        seconds: rng.random_range(3.0..5.0),
        f0_hz: if high {
            rng.random_range(185.0..235.0)
        } else {
            rng.random_range(95.0..135.0)
        },
        level_dbfs: rng.random_range(-28.0..-18.0),
        noise_floor_dbfs: -65.0,
    }
}

pub fn corpus(count: usize) -> Result<Vec<AudioClip<f64>>> {
    (0..count).map(|i| speech_like(&corpus_params(i))).collect()
}
