//! Square-root Hann STFT at 50% overlap: analysis followed by synthesis with
//! the same window reconstructs the input exactly.

use std::sync::Arc;

use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};

use crate::scalar::Scalar;

pub(crate) struct Stft<T: Scalar> {
    size: usize,
    window: Vec<T>,
    forward: Arc<dyn Fft<T>>,
    inverse: Arc<dyn Fft<T>>,
}

/// Power-of-two frame of roughly 32 ms.
pub(crate) fn frame_size_for(fs: u32) -> usize {
    ((0.032 * fs as f64).round() as usize).next_power_of_two().max(64)
}

impl<T: Scalar> Stft<T> {
    pub fn new(size: usize) -> Self {
        assert!(size >= 4 && size.is_multiple_of(2));
        let window = (0..size)
            .map(|i| {
                let h = 0.5 - 0.5 * (2.0 * std::f64::consts::PI * i as f64 / size as f64).cos();
                T::lit(h.sqrt())
            })
            .collect();
        let mut planner = FftPlanner::new();
        Self {
            size,
            window,
            forward: planner.plan_fft_forward(size),
            inverse: planner.plan_fft_inverse(size),
        }
    }

    pub fn size(&self) -> usize {
        self.size
    }

    fn hop(&self) -> usize {
        self.size / 2
    }

    /// Full complex spectra of every frame; the signal is padded by one hop in front.
    pub fn analyze(&self, x: &[T]) -> Vec<Vec<Complex<T>>> {
        let hop = self.hop();
        let frames = (x.len() + hop).div_ceil(hop) + 1;
        (0..frames)
            .map(|m| {
                let mut buf: Vec<Complex<T>> = (0..self.size)
                    .map(|i| {
                        let t = (m * hop + i) as isize - hop as isize;
                        let v = if t >= 0 && (t as usize) < x.len() {
                            x[t as usize]
                        } else {
                            T::zero()
                        };
                        Complex::new(v * self.window[i], T::zero())
                    })
                    .collect();
                self.forward.process(&mut buf);
                buf
            })
            .collect()
    }

    /// Inverse of [`Stft::analyze`] for a signal of `len` samples.
    pub fn synthesize(&self, spectra: &[Vec<Complex<T>>], len: usize) -> Vec<T> {
        let hop = self.hop();
        let scale = T::one() / T::from_usize_lossy(self.size);
        let mut out = vec![T::zero(); len];
        for (m, spec) in spectra.iter().enumerate() {
            let mut buf = spec.clone();
            self.inverse.process(&mut buf);
            for (i, c) in buf.iter().enumerate() {
                let t = (m * hop + i) as isize - hop as isize;
                if t >= 0 && (t as usize) < len {
                    out[t as usize] += c.re * scale * self.window[i];
                }
            }
        }
        out
    }
}
