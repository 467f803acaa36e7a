use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Coefficients of a three-level Haar decomposition of one frame.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveletPyramid<T> {
    pub c3: Vec<T>,
    pub d3: Vec<T>,
    pub d2: Vec<T>,
    pub d1: Vec<T>,
}

impl<T: Scalar> WaveletPyramid<T> {
    pub fn len(&self) -> usize {
        self.c3.len() + self.d3.len() + self.d2.len() + self.d1.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn energy(&self) -> T {
        [&self.c3, &self.d3, &self.d2, &self.d1]
            .iter()
            .flat_map(|v| v.iter())
            .map(|&c| c * c)
            .sum()
    }
}

fn split<T: Scalar>(x: &[T]) -> (Vec<T>, Vec<T>) {
    let r = T::FRAC_1_SQRT_2();
    x.chunks_exact(2)
        .map(|p| ((p[0] + p[1]) * r, (p[0] - p[1]) * r))
        .unzip()
}

fn merge<T: Scalar>(approx: &[T], detail: &[T]) -> Vec<T> {
    let r = T::FRAC_1_SQRT_2();
    approx
        .iter()
        .zip(detail)
        .flat_map(|(&a, &d)| [(a + d) * r, (a - d) * r])
        .collect()
}

pub fn dwt3<T: Scalar>(frame: &[T]) -> Result<WaveletPyramid<T>> {
    if frame.is_empty() || !frame.len().is_multiple_of(8) {
        return Err(Error::BadLength(format!(
            "frame length {} is not a positive multiple of 8",
            frame.len()
        )));
    }
    let (a1, d1) = split(frame);
    let (a2, d2) = split(&a1);
    let (c3, d3) = split(&a2);
    Ok(WaveletPyramid { c3, d3, d2, d1 })
}

pub fn idwt3<T: Scalar>(p: &WaveletPyramid<T>) -> Result<Vec<T>> {
    let n = p.c3.len();
    if n == 0 || p.d3.len() != n || p.d2.len() != 2 * n || p.d1.len() != 4 * n {
        return Err(Error::BadLength(format!(
            "inconsistent pyramid lengths c3={} d3={} d2={} d1={}",
            n,
            p.d3.len(),
            p.d2.len(),
            p.d1.len()
        )));
    }
    let a2 = merge(&p.c3, &p.d3);
    let a1 = merge(&a2, &p.d2);
    Ok(merge(&a1, &p.d1))
}
