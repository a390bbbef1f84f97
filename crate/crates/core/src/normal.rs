//! Standard normal density and distribution function.
//!
//! The distribution function follows W. J. Cody's rational Chebyshev
//! approximations for `erf`/`erfc`. The Gaussian factor `exp(-x^2/2)` is
//! evaluated with an exact split of `x^2` so the upper tail keeps full
//! relative precision out to the underflow threshold.

use crate::scalar::Scalar;

const A: [f64; 5] = [
    3.161_123_743_870_565_60e0,
    1.138_641_541_510_501_56e2,
    3.774_852_376_853_020_21e2,
    3.209_377_589_138_469_47e3,
    1.857_777_061_846_031_53e-1,
];
const B: [f64; 4] = [
    2.360_129_095_234_412_09e1,
    2.440_246_379_344_441_73e2,
    1.282_616_526_077_372_28e3,
    2.844_236_833_439_170_62e3,
];
const C: [f64; 9] = [
    5.641_884_969_886_700_89e-1,
    8.883_149_794_388_375_94e0,
    6.611_919_063_714_162_95e1,
    2.986_351_381_974_001_31e2,
    8.819_522_212_417_690_90e2,
    1.712_047_612_634_070_58e3,
    2.051_078_377_826_071_47e3,
    1.230_339_354_797_997_25e3,
    2.153_115_354_744_038_46e-8,
];
const D: [f64; 8] = [
    1.574_492_611_070_983_47e1,
    1.176_939_508_913_124_99e2,
    5.371_811_018_620_098_58e2,
    1.621_389_574_566_690_19e3,
    3.290_799_235_733_459_63e3,
    4.362_619_090_143_247_16e3,
    3.439_367_674_143_721_64e3,
    1.230_339_354_803_749_42e3,
];
const P: [f64; 6] = [
    3.053_266_349_612_323_44e-1,
    3.603_448_999_498_044_39e-1,
    1.257_817_261_112_292_46e-1,
    1.608_378_514_874_227_66e-2,
    6.587_491_615_298_378_03e-4,
    1.631_538_713_730_209_78e-2,
];
const Q: [f64; 5] = [
    2.568_520_192_289_822_42e0,
    1.872_952_849_923_467_25e0,
    5.279_051_029_514_284_12e-1,
    6.051_834_131_244_131_91e-2,
    2.335_204_976_268_691_85e-3,
];

/// `1/sqrt(pi)`
const FRAC_1_SQRT_PI: f64 = 5.641_895_835_477_562_869_5e-1;
/// `ln(sqrt(2*pi))`
const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_741_78;
/// `1/sqrt(2*pi)`
const FRAC_1_SQRT_2PI: f64 = 0.398_942_280_401_432_677_94;

/// Stateless evaluator for the standard normal `phi` and `Phi`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct StdNormal;

impl StdNormal {
    /// Density `exp(-x^2/2)/sqrt(2 pi)`.
    #[inline]
    pub fn pdf<T: Scalar>(x: T) -> T {
        gauss_factor(x) * T::lit(FRAC_1_SQRT_2PI)
    }

    /// `ln phi(x)`, exact in the tails where `pdf` underflows.
    #[inline]
    pub fn ln_pdf<T: Scalar>(x: T) -> T {
        -(x * x) * T::lit(0.5) - T::lit(LN_SQRT_2PI)
    }

    /// Distribution function `Phi(x)`.
    pub fn cdf<T: Scalar>(x: T) -> T {
        if x.is_nan() {
            return x;
        }
        if x >= T::zero() {
            T::one() - upper_tail(x)
        } else {
            upper_tail(-x)
        }
    }

    /// Upper tail `1 - Phi(x)` without cancellation for large `x`.
    pub fn sf<T: Scalar>(x: T) -> T {
        Self::cdf(-x)
    }
}

/// `exp(-x^2/2)` with `x^2` split into an exactly representable head
/// (four fractional bits) and a small correction.
#[inline]
fn gauss_factor<T: Scalar>(x: T) -> T {
    let ax = x.abs();
    if !ax.is_finite() {
        return if ax.is_nan() { ax } else { T::zero() };
    }
    let sixteen = T::lit(16.0);
    let head = (ax * sixteen).trunc() / sixteen;
    let tail = (ax - head) * (ax + head);
    let half = T::lit(0.5);
    (-(head * head) * half).exp() * (-tail * half).exp()
}

/// `P(Z > x)` for `x >= 0`.
fn upper_tail<T: Scalar>(x: T) -> T {
    if x.is_infinite() {
        return T::zero();
    }
    let y = x * T::FRAC_1_SQRT_2();
    let half = T::lit(0.5);
    if y <= T::lit(0.468_75) {
        let ysq = y * y;
        let mut num = T::lit(A[4]) * ysq;
        let mut den = ysq;
        for i in 0..3 {
            num = (num + T::lit(A[i])) * ysq;
            den = (den + T::lit(B[i])) * ysq;
        }
        let erf = y * (num + T::lit(A[3])) / (den + T::lit(B[3]));
        return half - half * erf;
    }
    let ratio = if y <= T::lit(4.0) {
        let mut num = T::lit(C[8]) * y;
        let mut den = y;
        for i in 0..7 {
            num = (num + T::lit(C[i])) * y;
            den = (den + T::lit(D[i])) * y;
        }
        (num + T::lit(C[7])) / (den + T::lit(D[7]))
    } else {
        let ysq = (y * y).recip();
        let mut num = T::lit(P[5]) * ysq;
        let mut den = ysq;
        for i in 0..4 {
            num = (num + T::lit(P[i])) * ysq;
            den = (den + T::lit(Q[i])) * ysq;
        }
        let r = ysq * (num + T::lit(P[4])) / (den + T::lit(Q[4]));
        (T::lit(FRAC_1_SQRT_PI) - r) / y
    };
    half * ratio * gauss_factor(x)
}
