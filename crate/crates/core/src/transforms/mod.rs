//! Three-level orthonormal Haar analysis and orthonormal DCT-II of the
//! level-3 subbands.

mod dct;
mod haar;

pub use dct::{dct, idct, DctPlan};
pub use haar::{dwt3, idwt3, WaveletPyramid};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// DCT spectra of the level-3 subbands plus the untouched finer details.
#[derive(Debug, Clone, PartialEq)]
pub struct SubbandSpectrum<T> {
    /// DCT of the approximation `c3`.
    pub xc: Vec<T>,
    /// DCT of the detail `d3`.
    pub xd: Vec<T>,
    pub d2: Vec<T>,
    pub d1: Vec<T>,
}

/// Which level-3 spectrum a coefficient lives in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Subband {
    Approx,
    Detail,
}

impl<T> SubbandSpectrum<T> {
    pub fn get(&self, sb: Subband) -> &[T] {
        match sb {
            Subband::Approx => &self.xc,
            Subband::Detail => &self.xd,
        }
    }

    pub fn get_mut(&mut self, sb: Subband) -> &mut [T] {
        match sb {
            Subband::Approx => &mut self.xc,
            Subband::Detail => &mut self.xd,
        }
    }
}

/// Frame analysis/synthesis with a cached DCT plan for one frame length.
#[derive(Debug, Clone)]
pub struct FrameTransform<T> {
    frame_len: usize,
    plan: DctPlan<T>,
}

impl<T: Scalar> FrameTransform<T> {
    pub fn new(frame_len: usize) -> Result<Self> {
        if frame_len == 0 || !frame_len.is_multiple_of(8) {
            return Err(Error::BadLength(format!(
                "frame length {frame_len} is not a positive multiple of 8"
            )));
        }
        Ok(Self {
            frame_len,
            plan: DctPlan::new(frame_len / 8),
        })
    }

    pub fn frame_len(&self) -> usize {
        self.frame_len
    }

    pub fn analyze(&self, frame: &[T]) -> Result<SubbandSpectrum<T>> {
        if frame.len() != self.frame_len {
            return Err(Error::BadLength(format!(
                "frame has {} samples, expected {}",
                frame.len(),
                self.frame_len
            )));
        }
        let p = dwt3(frame)?;
        Ok(SubbandSpectrum {
            xc: self.plan.forward(&p.c3),
            xd: self.plan.forward(&p.d3),
            d2: p.d2,
            d1: p.d1,
        })
    }

    pub fn synthesize(&self, s: &SubbandSpectrum<T>) -> Result<Vec<T>> {
        let n = self.frame_len / 8;
        if s.xc.len() != n || s.xd.len() != n {
            return Err(Error::BadLength("subband spectrum does not match frame length".into()));
        }
        let p = WaveletPyramid {
            c3: self.plan.inverse(&s.xc),
            d3: self.plan.inverse(&s.xd),
            d2: s.d2.clone(),
            d1: s.d1.clone(),
        };
        idwt3(&p)
    }
}
