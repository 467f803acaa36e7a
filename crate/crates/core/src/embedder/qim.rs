//! Binary dither-modulated quantization.
//!
//! A coefficient is moved to the nearest point of the lattice `2Δ·Z + d_b`
//! with `d_0 = 0` and `d_1 = Δ`, so the change never exceeds `Δ` and the two
//! cosets are `Δ` apart.

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Quantizer half-step for a band: `sqrt(10^(nmr/10) * T_z / I)`.
///
/// With `I` coefficients each moved by at most `Δ`, band noise `I·Δ²` sits
/// exactly `nmr_limit_db` below the threshold.
pub fn quant_step<T: Scalar>(threshold: T, count: usize, nmr_limit_db: f64) -> Result<T> {
    if threshold.partial_cmp(&T::zero()) != Some(std::cmp::Ordering::Greater) || count == 0 {
        return Err(Error::SkippedBand {
            threshold: threshold.to_f64_lossy(),
            count,
        });
    }
    let ratio = T::lit(10f64.powf(nmr_limit_db / 10.0));
    Ok((ratio * threshold / T::from_usize_lossy(count)).sqrt())
}

#[inline]
fn dither<T: Scalar>(bit: bool, step: T) -> T {
    if bit {
        step
    } else {
        T::zero()
    }
}

pub fn qim_embed<T: Scalar>(x: T, bit: bool, step: T) -> T {
    let q = step + step;
    let d = dither(bit, step);
    q * ((x - d) / q).round() + d
}

/// Minimum-distance decoding; exact ties decode as `false`.
pub fn qim_extract<T: Scalar>(y: T, step: T) -> bool {
    let q = step + step;
    let dist = |d: T| (y - d - q * ((y - d) / q).round()).abs();
    dist(step) < dist(T::zero())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn step_values() {
        let d: f64 = quant_step(1.0, 10, -5.0).unwrap();
        assert!((d - (10f64.powf(-0.5) / 10.0).sqrt()).abs() < 1e-15);
        assert!((d - 0.177_827_94).abs() < 1e-8);
        let d: f64 = quant_step(9.262_129e-5, 10, -5.0).unwrap();
        assert!((d - 1.711_415e-3).abs() < 1e-9, "{d}");
        assert!(matches!(quant_step(0.0f64, 10, -5.0), Err(Error::SkippedBand { .. })));
        assert!(matches!(quant_step(1.0f64, 0, -5.0), Err(Error::SkippedBand { .. })));
    }

    #[test]
    fn lattice_examples() {
        assert_eq!(qim_embed(0.7f64, false, 0.5), 1.0);
        assert_eq!(qim_embed(0.7f64, true, 0.5), 0.5);
    }

    #[test]
    fn tie_decodes_zero() {
        // y = Δ/2 is equidistant from 0 (coset 0) and Δ (coset 1)
        assert!(!qim_extract(0.125f64, 0.25));
        assert!(!qim_extract(-0.125f64, 0.25));
        // 0.25 is itself a coset-1 point for Δ = 0.25
        assert!(qim_extract(0.25f64, 0.25));
    }

    proptest! {
        #[test]
        fn nmr_closure(t in 1e-12f64..1e3, n in 1usize..400, nmr in -30.0f64..-0.5) {
            let d = quant_step(t, n, nmr).unwrap();
            let got = 10.0 * (n as f64 * d * d / t).log10();
            prop_assert!((got - nmr).abs() < 1e-9);
        }

        #[test]
        fn embed_error_bounded_and_decodes(x in -10.0f64..10.0, bit in any::<bool>(), step in 1e-6f64..1.0) {
            let y = qim_embed(x, bit, step);
            prop_assert!((y - x).abs() <= step * (1.0 + 1e-12));
            prop_assert_eq!(qim_extract(y, step), bit);
        }

        #[test]
        fn survives_small_noise(x in -10.0f64..10.0, bit in any::<bool>(), step in 1e-4f64..1.0, frac in -0.49f64..0.49) {
            let y = qim_embed(x, bit, step) + frac * step;
            prop_assert_eq!(qim_extract(y, step), bit);
        }
    }
}
