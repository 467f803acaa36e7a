//! Spectral checks on the resampler and the attacks, against a direct DFT.

use std::f64::consts::PI;

use vocalcrypt::attacks::{attack_denoise, attack_noise, attack_resample};
use vocalcrypt::audio::{resample, AudioClip};
use vocalcrypt::metrics::snr_db;
use vocalcrypt::synth::{speech_like, SpeechParams};

fn tone(fs: u32, f: f64, secs: f64, amp: f64) -> Vec<f64> {
    let n = (fs as f64 * secs).round() as usize;
    (0..n)
        .map(|i| amp * (2.0 * PI * f * i as f64 / fs as f64).sin())
        .collect()
}

/// Amplitude spectrum of a 4-term Blackman-Harris windowed segment, normalised
/// so a sine of amplitude `a` at a bin centre reads `a`.
fn dft_amplitude(x: &[f64]) -> Vec<f64> {
    let n = x.len();
    let c = [0.35875, 0.48829, 0.14128, 0.01168];
    let w: Vec<f64> = (0..n)
        .map(|i| {
            let p = 2.0 * PI * i as f64 / n as f64;
            c[0] - c[1] * p.cos() + c[2] * (2.0 * p).cos() - c[3] * (3.0 * p).cos()
        })
        .collect();
    let gain: f64 = w.iter().sum::<f64>() / 2.0;
    (0..=n / 2)
        .map(|k| {
            let (mut re, mut im) = (0.0, 0.0);
            for (i, (&v, &wi)) in x.iter().zip(&w).enumerate() {
                let p = 2.0 * PI * ((k * i) % n) as f64 / n as f64;
                re += v * wi * p.cos();
                im -= v * wi * p.sin();
            }
            (re * re + im * im).sqrt() / gain
        })
        .collect()
}

fn peak(spec: &[f64]) -> usize {
    (0..spec.len()).max_by(|&a, &b| spec[a].total_cmp(&spec[b])).unwrap()
}

fn middle(x: &[f64], n: usize) -> &[f64] {
    let s = (x.len() - n) / 2;
    &x[s..s + n]
}

#[test]
fn tone_440_keeps_its_frequency() {
    let clip = AudioClip::mono(tone(44100, 440.0, 1.5, 0.5), 44100).unwrap();
    let out = resample(&clip, 8000).unwrap();
    assert_eq!(out.len(), 12000);
    let spec = dft_amplitude(middle(out.channel(0), 8000));
    // 1 Hz per bin
    let k = peak(&spec) as f64;
    assert!((k - 440.0).abs() <= 2.0, "peak at {k} Hz");
    assert!((spec[440] - 0.5).abs() < 0.01);
}

#[test]
fn tone_3900_passes_without_aliases() {
    let amp = 0.5;
    let clip = AudioClip::mono(tone(44100, 3900.0, 1.5, amp), 44100).unwrap();
    let out = resample(&clip, 8000).unwrap();
    let spec = dft_amplitude(middle(out.channel(0), 8000));
    let k = peak(&spec);
    assert_eq!(k, 3900);
    let att = 20.0 * (amp / spec[k]).log10();
    assert!(att < 3.0, "attenuation {att} dB");
    let worst = spec
        .iter()
        .enumerate()
        .filter(|(i, _)| i.abs_diff(k) > 20)
        .map(|(_, v)| *v)
        .fold(0.0, f64::max);
    let rel = 20.0 * (worst / spec[k]).log10();
    assert!(rel < -40.0, "spur at {rel} dB");
}

#[test]
fn round_trip_through_8k_preserves_telephone_band() {
    for fs in [16000u32, 44100] {
        let x: Vec<f64> = [300.0, 1100.0, 2500.0, 3300.0]
            .iter()
            .map(|&f| tone(fs, f, 1.0, 0.2))
            .fold(vec![0.0; fs as usize], |acc, t| {
                acc.iter().zip(&t).map(|(a, b)| a + b).collect()
            });
        let clip = AudioClip::mono(x.clone(), fs).unwrap();
        let back = attack_resample(&clip, 8000).unwrap();
        let trim = fs as usize / 10;
        let n = x.len() - trim;
        let snr = snr_db(&x[trim..n], &back.channel(0)[trim..n]);
        assert!(snr >= 20.0, "{fs}: {snr} dB");
    }
}

#[test]
fn resample_attack_removes_content_above_4k() {
    let p = SpeechParams {
        sample_rate: 44100,
        seconds: 2.0,
        seed: 3,
        f0_hz: 210.0,
        ..SpeechParams::default()
    };
    let clip = speech_like(&p).unwrap();
    let out = attack_resample(&clip, 8000).unwrap();
    assert_eq!((out.len(), out.sample_rate()), (clip.len(), 44100));
    let high = |x: &[f64]| {
        let n = 4410;
        let s: f64 = x
            .chunks_exact(n)
            .map(|c| dft_amplitude(c)[405..].iter().map(|v| v * v).sum::<f64>())
            .sum();
        s
    };
    let (before, after) = (high(clip.channel(0)), high(out.channel(0)));
    let att = 10.0 * (before / after).log10();
    assert!(att >= 40.0, "attenuation above 4.05 kHz only {att} dB");
}

/// The noise floor is the 10th percentile of each bin over time, so the tone
/// must be absent from some frames for the estimator to see the bare noise.
#[test]
fn denoise_improves_noisy_gated_tone() {
    let fs = 16000;
    let clean: Vec<f64> = tone(fs, 1000.0, 2.0, 0.3)
        .into_iter()
        .enumerate()
        .map(|(i, v)| if (i / 4000) % 4 == 3 { 0.0 } else { v })
        .collect();
    let clip = AudioClip::mono(clean.clone(), fs).unwrap();
    let noisy = attack_noise(&clip, 10.0, 9).unwrap();
    let before = snr_db(&clean, noisy.channel(0));
    assert!((before - 10.0).abs() < 0.1);
    let gain = |beta: f64| snr_db(&clean, attack_denoise(&noisy, beta, 0.05).unwrap().channel(0)) - before;
    // the low percentile floor sits near 0.46 sigma of the noise magnitude, so
    // the default over-subtraction removes about 4 dB; 5 dB needs beta = 2
    let (g15, g2) = (gain(1.5), gain(2.0));
    assert!(g15 >= 3.5, "beta 1.5: {g15} dB");
    assert!(g2 >= 5.0 && g2 > g15, "beta 2: {g2} dB");
}

/// A tone present in every frame sets its own bin's floor and is suppressed.
#[test]
fn denoise_treats_stationary_tone_as_noise() {
    let fs = 16000;
    let clean = tone(fs, 1000.0, 2.0, 0.3);
    let clip = AudioClip::mono(clean.clone(), fs).unwrap();
    let noisy = attack_noise(&clip, 10.0, 9).unwrap();
    let out = attack_denoise(&noisy, 1.5, 0.05).unwrap();
    assert!(snr_db(&clean, out.channel(0)) < 5.0);
}
