//! Polynomial exp/ln for the logistic training loop.
//!
//! The trainer spends nearly all of its time exponentiating logits, and the
//! libm calls neither inline nor vectorize. These replacements are written
//! branch-free so that element-wise loops over them compile to SIMD code,
//! and their relative error stays below ~1e-12 — far inside the trainer's
//! tolerance.
//!
//! Domain contracts, chosen for softmax work:
//! - `fast_exp` clamps its argument to [-708, 709]. Outside that range the
//!   true result would underflow past the normal range or overflow; the
//!   clamp saturates instead, which a softmax never notices (a term 1e-308
//!   from the denominator's point of view is zero).
//! - `fast_ln` expects a positive normal finite input.
//!
//! Everything here must stay `#[inline(always)]`: the callers are compiled
//! once per SIMD feature set, and these bodies only vectorize if they
//! inline into those contexts.

const LN2_HI: f64 = 0.693_147_180_559_945_3;
const LN2_LO: f64 = 2.399_651_470_185_284e-17;
const INV_LN2: f64 = 1.442_695_040_888_963_4;

/// 1.5 * 2^52 + 1023: adding this to a float in [-1022, 1024] rounds it to
/// an integer held in the low mantissa bits, pre-biased for an exponent
/// field. Exactly representable, so recovering the integer by subtraction
/// is exact.
const ROUND_BIAS: f64 = 6_755_399_441_056_767.0;

/// exp(x) with the argument clamped to [-708, 709]; branch-free.
///
/// Reduction: n = round(x/ln2), r = x - n*ln2 (two-part ln2 for accuracy),
/// so |r| <= ln2/2. A degree-11 Taylor polynomial covers that interval to
/// ~1e-17, and 2^n is assembled directly from the rounding trick's bits:
/// the clamp guarantees 1023+n lands in [1, 2046], a valid normal exponent
/// field, so the scale is a single exact multiply.
#[inline(always)]
pub(crate) fn fast_exp(x: f64) -> f64 {
    let xc = x.clamp(-708.0, 709.0);
    let v = xc * INV_LN2 + ROUND_BIAS;
    let n = v - ROUND_BIAS;
    let r = (xc - n * LN2_HI) - n * LN2_LO;

    let mut p = 1.0 / 39_916_800.0; // 1/11!
    p = p * r + 1.0 / 3_628_800.0;
    p = p * r + 1.0 / 362_880.0;
    p = p * r + 1.0 / 40_320.0;
    p = p * r + 1.0 / 5_040.0;
    p = p * r + 1.0 / 720.0;
    p = p * r + 1.0 / 120.0;
    p = p * r + 1.0 / 24.0;
    p = p * r + 1.0 / 6.0;
    p = p * r + 0.5;
    p = p * r + 1.0;
    p = p * r + 1.0;

    let scale = f64::from_bits(v.to_bits() << 52);
    p * scale
}

/// `z[i] <- exp(z[i])` for every element; the straight-line body of
/// `fast_exp` vectorizes across iterations.
#[inline(always)]
pub(crate) fn exp_block(z: &mut [f64]) {
    for v in z.iter_mut() {
        *v = fast_exp(*v);
    }
}

/// Natural log for positive normal finite inputs; branch-free.
///
/// The exponent field of x*sqrt(2) is round(log2 x), which splits
/// x = m * 2^e with m in [sqrt(1/2), sqrt(2)). Then ln m = 2 atanh(t) for
/// t = (m-1)/(m+1), |t| < 0.1716, through t^13.
#[inline(always)]
pub(crate) fn fast_ln(x: f64) -> f64 {
    debug_assert!(
        x.is_finite() && x >= f64::MIN_POSITIVE,
        "fast_ln domain: {x}"
    );
    let e32 = ((x * std::f64::consts::SQRT_2).to_bits() >> 52) as u32;
    let m = f64::from_bits(
        (x.to_bits() as i64 - (((e32 as i64) - 1023) << 52)) as u64,
    );
    let ef = e32 as f64 - 1023.0;

    let t = (m - 1.0) / (m + 1.0);
    let t2 = t * t;
    let mut p = 1.0 / 13.0;
    p = p * t2 + 1.0 / 11.0;
    p = p * t2 + 1.0 / 9.0;
    p = p * t2 + 1.0 / 7.0;
    p = p * t2 + 1.0 / 5.0;
    p = p * t2 + 1.0 / 3.0;
    p = p * t2 + 1.0;
    ef * LN2_HI + (2.0 * t * p + ef * LN2_LO)
}

/// `z[i] <- ln(z[i])` for every element; vectorizes like `exp_block`.
#[inline(always)]
pub(crate) fn ln_block(z: &mut [f64]) {
    for v in z.iter_mut() {
        *v = fast_ln(*v);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exp_tracks_libm_over_the_working_range() {
        let mut worst = 0.0f64;
        let mut x = -40.0;
        while x <= 40.0 {
            let got = fast_exp(x);
            let want = x.exp();
            let rel = ((got - want) / want).abs();
            if rel > worst {
                worst = rel;
            }
            x += 0.0173;
        }
        assert!(worst < 1e-12, "worst relative error {worst:e}");
    }

    #[test]
    fn exp_saturates_at_the_clamp_bounds() {
        assert_eq!(fast_exp(0.0), 1.0);
        assert_eq!(fast_exp(800.0), fast_exp(709.0));
        assert_eq!(fast_exp(-800.0), fast_exp(-708.0));
        let hi = fast_exp(709.0);
        assert!(hi.is_finite() && hi > 8.0e307, "{hi:e}");
        let lo = fast_exp(-708.0);
        assert!(lo > 0.0 && lo < 4.0e-308, "{lo:e}");
        // Near the bounds the values still track libm.
        for x in [-707.5, -650.0, 700.0, 708.9] {
            let rel = ((fast_exp(x) - x.exp()) / x.exp()).abs();
            assert!(rel < 1e-11, "exp({x}) off by {rel:e}");
        }
    }

    #[test]
    fn exp_block_matches_scalar() {
        let src = [-3.7, 0.0, 0.5, 12.25, -701.0, 14.0, -0.25, 3.5];
        let mut z = src;
        exp_block(&mut z);
        for (a, &x) in z.iter().zip(&src) {
            assert_eq!(*a, fast_exp(x));
        }
    }

    #[test]
    fn ln_tracks_libm() {
        let mut worst = 0.0f64;
        let mut x = 1e-6f64;
        while x < 1e6 {
            let denom = x.ln().abs().max(1e-12);
            let rel = ((fast_ln(x) - x.ln()) / denom).abs();
            if rel > worst {
                worst = rel;
            }
            x *= 1.37;
        }
        assert!(worst < 1e-11, "worst relative error {worst:e}");
    }

    #[test]
    fn ln_on_softmax_sums_is_tight() {
        // Softmax denominators live in [1, n_classes].
        let mut x = 1.0;
        while x <= 6.0 {
            let got = fast_ln(x);
            let want = x.ln();
            assert!((got - want).abs() < 1e-12, "ln({x}): {got} vs {want}");
            x += 0.0117;
        }
    }

    #[test]
    fn ln_block_matches_scalar() {
        let src = [1.0, 1.5, 2.0, 3.9, 4.0, 5.5, 0.25, 1e9];
        let mut z = src;
        ln_block(&mut z);
        for (a, &x) in z.iter().zip(&src) {
            assert_eq!(*a, fast_ln(x));
        }
    }

    #[test]
    fn exp_ln_round_trip() {
        let mut x = 0.01;
        while x < 100.0 {
            let rt = fast_ln(fast_exp(x));
            assert!((rt - x).abs() / x < 1e-11, "{x}: {rt}");
            x *= 1.618;
        }
    }
}
