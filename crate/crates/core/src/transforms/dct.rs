use crate::scalar::Scalar;

/// Orthonormal DCT-II of a fixed length, backed by a precomputed basis.
///
/// Frame lengths give odd sizes (63 at 8 kHz), so no radix-2 path applies;
/// a direct product against the cached basis is fast enough at these sizes.
#[derive(Debug, Clone)]
pub struct DctPlan<T> {
    n: usize,
    /// Row `k` holds basis function `k` sampled at `i = 0..n`.
    basis: Vec<T>,
}

impl<T: Scalar> DctPlan<T> {
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "DCT length must be at least 1");
        let nf = n as f64;
        let mut basis = Vec::with_capacity(n * n);
        for k in 0..n {
            let scale = if k == 0 { (1.0 / nf).sqrt() } else { (2.0 / nf).sqrt() };
            for i in 0..n {
                // reduce the argument modulo 4n to keep cos accurate for large n
                let m = ((2 * i + 1) * k) % (4 * n);
                let arg = std::f64::consts::PI * m as f64 / (2.0 * nf);
                basis.push(T::lit(scale * arg.cos()));
            }
        }
        Self { n, basis }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn forward(&self, x: &[T]) -> Vec<T> {
        assert_eq!(x.len(), self.n);
        self.basis
            .chunks_exact(self.n)
            .map(|row| row.iter().zip(x).map(|(&b, &v)| b * v).sum())
            .collect()
    }

    pub fn inverse(&self, coeffs: &[T]) -> Vec<T> {
        assert_eq!(coeffs.len(), self.n);
        let mut out = vec![T::zero(); self.n];
        for (row, &c) in self.basis.chunks_exact(self.n).zip(coeffs) {
            if c == T::zero() {
                continue;
            }
            for (o, &b) in out.iter_mut().zip(row) {
                *o += b * c;
            }
        }
        out
    }
}

pub fn dct<T: Scalar>(v: &[T]) -> Vec<T> {
    DctPlan::new(v.len()).forward(v)
}

pub fn idct<T: Scalar>(v: &[T]) -> Vec<T> {
    DctPlan::new(v.len()).inverse(v)
}
