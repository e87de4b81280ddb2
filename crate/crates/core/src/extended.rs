//! Double-double and quad-double floating-point types.
//!
//! Arithmetic, `sqrt`, `abs`, rounding and comparisons carry the full
//! extended precision (about 106 and 212 bits). Transcendental functions
//! are evaluated in `f64` and promoted, which is enough for the places the
//! crate uses them (arguments, logarithms of moduli, plotting).
//!
//! These types exist because non-Hermitian Toeplitz matrices of a few
//! hundred sites are too ill-conditioned for a double-precision eigensolver.

use std::cmp::Ordering;
use std::fmt;
use std::num::FpCategory;
use std::ops::{Add, AddAssign, Div, DivAssign, Mul, MulAssign, Neg, Rem, RemAssign, Sub, SubAssign};

use num_traits::{Float, FloatConst, FromPrimitive, Num, NumCast, One, ToPrimitive, Zero};

use crate::scalar::Real;

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

#[inline]
fn split(a: f64) -> (f64, f64) {
    const SPLITTER: f64 = 134_217_729.0;
    // Dekker's split overflows for huge inputs; rescale around it.
    if a.abs() > 6.696_928_794_914_17e299 {
        let a = a * 3.725_290_298_461_914e-9;
        let t = SPLITTER * a;
        let hi = t - (t - a);
        let lo = a - hi;
        (hi * 268_435_456.0, lo * 268_435_456.0)
    } else {
        let t = SPLITTER * a;
        let hi = t - (t - a);
        (hi, a - hi)
    }
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    let (ah, al) = split(a);
    let (bh, bl) = split(b);
    (p, ((ah * bh - p) + ah * bl + al * bh) + al * bl)
}

#[inline]
fn three_sum(a: f64, b: f64, c: f64) -> (f64, f64, f64) {
    let (t1, t2) = two_sum(a, b);
    let (a, t3) = two_sum(c, t1);
    let (b, c) = two_sum(t2, t3);
    (a, b, c)
}

#[inline]
fn three_sum2(a: f64, b: f64, c: f64) -> (f64, f64) {
    let (t1, t2) = two_sum(a, b);
    let (a, t3) = two_sum(c, t1);
    (a, t2 + t3)
}

/// Unevaluated sum of two doubles, `hi + lo` with `|lo| <= ulp(hi)/2`.
#[derive(Clone, Copy, Default, PartialEq)]
pub struct DoubleDouble([f64; 2]);

/// Unevaluated sum of four doubles in decreasing magnitude.
#[derive(Clone, Copy, Default, PartialEq)]
pub struct QuadDouble([f64; 4]);

impl DoubleDouble {
    pub const fn from_parts(hi: f64, lo: f64) -> Self {
        Self([hi, lo])
    }

    pub fn parts(self) -> [f64; 2] {
        self.0
    }

    #[inline]
    fn from_f(x: f64) -> Self {
        Self([x, 0.0])
    }

    #[inline]
    fn add_(self, b: Self) -> Self {
        let (a, b) = (self.0, b.0);
        let (s1, s2) = two_sum(a[0], b[0]);
        let (t1, t2) = two_sum(a[1], b[1]);
        let (s1, s2) = quick_two_sum(s1, s2 + t1);
        let (s1, s2) = quick_two_sum(s1, s2 + t2);
        Self([s1, s2])
    }

    #[inline]
    fn mul_(self, b: Self) -> Self {
        let (a, b) = (self.0, b.0);
        let (p1, p2) = two_prod(a[0], b[0]);
        let p2 = p2 + (a[0] * b[1] + a[1] * b[0]);
        let (s, e) = quick_two_sum(p1, p2);
        Self([s, e])
    }

    #[inline]
    fn mul_f(self, b: f64) -> Self {
        let (p1, p2) = two_prod(self.0[0], b);
        let (s, e) = quick_two_sum(p1, p2 + self.0[1] * b);
        Self([s, e])
    }

    fn div_(self, b: Self) -> Self {
        let q1 = self.0[0] / b.0[0];
        if !q1.is_finite() {
            return Self::from_f(q1);
        }
        let r = self - b.mul_f(q1);
        let q2 = r.0[0] / b.0[0];
        let r = r - b.mul_f(q2);
        let q3 = r.0[0] / b.0[0];
        let (q1, q2) = quick_two_sum(q1, q2);
        Self([q1, q2]) + Self::from_f(q3)
    }

    fn sqrt_(self) -> Self {
        let a = self.0[0];
        if a <= 0.0 {
            return Self::from_f(a.sqrt());
        }
        let x = 1.0 / a.sqrt();
        let ax = a * x;
        let ax2 = Self::from_f(ax).mul_(Self::from_f(ax));
        let corr = (self - ax2).0[0] * (x * 0.5);
        let (s, e) = two_sum(ax, corr);
        Self([s, e])
    }

    fn renorm_parts(p: &[f64]) -> Self {
        p.iter().fold(Self::zero(), |acc, &x| acc + Self::from_f(x))
    }
}

impl QuadDouble {
    pub const fn from_parts(p: [f64; 4]) -> Self {
        Self(p)
    }

    pub fn parts(self) -> [f64; 4] {
        self.0
    }

    #[inline]
    fn from_f(x: f64) -> Self {
        Self([x, 0.0, 0.0, 0.0])
    }

    #[inline]
    fn renorm(c0: f64, c1: f64, c2: f64, c3: f64, c4: f64) -> Self {
        if !c0.is_finite() {
            return Self([c0, 0.0, 0.0, 0.0]);
        }
        let (s0, c4) = quick_two_sum(c3, c4);
        let (s0, c3) = quick_two_sum(c2, s0);
        let (s0, c2) = quick_two_sum(c1, s0);
        let (c0, c1) = quick_two_sum(c0, s0);
        let (mut s0, mut s1, mut s2, mut s3) = (c0, c1, 0.0, 0.0);
        if s1 != 0.0 {
            (s1, s2) = quick_two_sum(s1, c2);
            if s2 != 0.0 {
                (s2, s3) = quick_two_sum(s2, c3);
                if s3 != 0.0 {
                    s3 += c4;
                } else {
                    (s2, s3) = quick_two_sum(s2, c4);
                }
            } else {
                (s1, s2) = quick_two_sum(s1, c3);
                if s2 != 0.0 {
                    (s2, s3) = quick_two_sum(s2, c4);
                } else {
                    (s1, s2) = quick_two_sum(s1, c4);
                }
            }
        } else {
            (s0, s1) = quick_two_sum(s0, c2);
            if s1 != 0.0 {
                (s1, s2) = quick_two_sum(s1, c3);
                if s2 != 0.0 {
                    (s2, s3) = quick_two_sum(s2, c4);
                } else {
                    (s1, s2) = quick_two_sum(s1, c4);
                }
            } else {
                (s0, s1) = quick_two_sum(s0, c3);
                if s1 != 0.0 {
                    (s1, s2) = quick_two_sum(s1, c4);
                } else {
                    (s0, s1) = quick_two_sum(s0, c4);
                }
            }
        }
        Self([s0, s1, s2, s3])
    }

    #[inline]
    fn add_(self, b: Self) -> Self {
        let (a, b) = (self.0, b.0);
        let (s0, t0) = two_sum(a[0], b[0]);
        let (s1, t1) = two_sum(a[1], b[1]);
        let (s2, t2) = two_sum(a[2], b[2]);
        let (s3, t3) = two_sum(a[3], b[3]);
        let (s1, t0) = two_sum(s1, t0);
        let (s2, t0, t1) = three_sum(s2, t0, t1);
        let (s3, t0) = three_sum2(s3, t0, t2);
        let t0 = t0 + t1 + t3;
        Self::renorm(s0, s1, s2, s3, t0)
    }

    #[inline]
    fn mul_(self, b: Self) -> Self {
        let (a, b) = (self.0, b.0);
        let (p0, q0) = two_prod(a[0], b[0]);
        let (p1, q1) = two_prod(a[0], b[1]);
        let (p2, q2) = two_prod(a[1], b[0]);
        let (p3, q3) = two_prod(a[0], b[2]);
        let (p4, q4) = two_prod(a[1], b[1]);
        let (p5, q5) = two_prod(a[2], b[0]);
        let (p1, p2, q0) = three_sum(p1, p2, q0);
        let (p2, q1, q2) = three_sum(p2, q1, q2);
        let (p3, p4, p5) = three_sum(p3, p4, p5);
        let (s0, t0) = two_sum(p2, p3);
        let (s1, t1) = two_sum(q1, p4);
        let s2 = q2 + p5;
        let (s1, t0) = two_sum(s1, t0);
        let s2 = s2 + (t0 + t1);
        let s1 = s1
            + (a[0] * b[3] + a[1] * b[2] + a[2] * b[1] + a[3] * b[0] + q0 + q3 + q4 + q5);
        Self::renorm(p0, p1, s0, s1, s2)
    }

    #[inline]
    fn mul_f(self, b: f64) -> Self {
        self.mul_(Self::from_f(b))
    }

    fn div_(self, b: Self) -> Self {
        let q0 = self.0[0] / b.0[0];
        if !q0.is_finite() {
            return Self::from_f(q0);
        }
        let r = self - b.mul_f(q0);
        let q1 = r.0[0] / b.0[0];
        let r = r - b.mul_f(q1);
        let q2 = r.0[0] / b.0[0];
        let r = r - b.mul_f(q2);
        let q3 = r.0[0] / b.0[0];
        let r = r - b.mul_f(q3);
        let q4 = r.0[0] / b.0[0];
        Self::renorm(q0, q1, q2, q3, q4)
    }

    fn sqrt_(self) -> Self {
        let a = self.0[0];
        if a <= 0.0 {
            return Self::from_f(a.sqrt());
        }
        // Newton iteration on 1/sqrt, doubling the correct digits each step.
        let half = Self::from_f(0.5);
        let mut x = Self::from_f(1.0 / a.sqrt());
        let h = self * half;
        for _ in 0..3 {
            x = x + x * (half - h * x * x);
        }
        self * x
    }

    fn renorm_parts(p: &[f64]) -> Self {
        p.iter().fold(Self::zero(), |acc, &x| acc + Self::from_f(x))
    }
}

macro_rules! impl_extended {
    ($t:ident, $n:expr, $eps:expr, $consts:ident) => {
        impl $t {
            /// Leading component, the nearest `f64`.
            #[inline]
            pub fn hi(self) -> f64 {
                self.0[0]
            }

            fn floor_(self) -> Self {
                let mut out = [0.0; $n];
                for i in 0..$n {
                    let f = self.0[i].floor();
                    out[i] = f;
                    if f != self.0[i] {
                        break;
                    }
                }
                Self::renorm_parts(&out)
            }
        }

        impl fmt::Debug for $t {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                write!(f, "{}{:?}", stringify!($t), self.0)
            }
        }

        impl fmt::Display for $t {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                fmt::Display::fmt(&self.0[0], f)
            }
        }

        impl fmt::LowerExp for $t {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                fmt::LowerExp::fmt(&self.0[0], f)
            }
        }

        impl PartialOrd for $t {
            fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
                for i in 0..$n {
                    match self.0[i].partial_cmp(&other.0[i])? {
                        Ordering::Equal => continue,
                        o => return Some(o),
                    }
                }
                Some(Ordering::Equal)
            }
        }

        impl Neg for $t {
            type Output = Self;
            #[inline]
            fn neg(self) -> Self {
                let mut p = self.0;
                for x in p.iter_mut() {
                    *x = -*x;
                }
                Self(p)
            }
        }

        impl Add for $t {
            type Output = Self;
            #[inline]
            fn add(self, b: Self) -> Self {
                self.add_(b)
            }
        }

        impl Sub for $t {
            type Output = Self;
            #[inline]
            fn sub(self, b: Self) -> Self {
                self.add_(-b)
            }
        }

        impl Mul for $t {
            type Output = Self;
            #[inline]
            fn mul(self, b: Self) -> Self {
                self.mul_(b)
            }
        }

        impl Div for $t {
            type Output = Self;
            #[inline]
            fn div(self, b: Self) -> Self {
                self.div_(b)
            }
        }

        impl Rem for $t {
            type Output = Self;
            fn rem(self, b: Self) -> Self {
                self - (self / b).trunc() * b
            }
        }

        impl AddAssign for $t {
            #[inline]
            fn add_assign(&mut self, b: Self) {
                *self = *self + b;
            }
        }

        impl SubAssign for $t {
            #[inline]
            fn sub_assign(&mut self, b: Self) {
                *self = *self - b;
            }
        }

        impl MulAssign for $t {
            #[inline]
            fn mul_assign(&mut self, b: Self) {
                *self = *self * b;
            }
        }

        impl DivAssign for $t {
            #[inline]
            fn div_assign(&mut self, b: Self) {
                *self = *self / b;
            }
        }

        impl RemAssign for $t {
            fn rem_assign(&mut self, b: Self) {
                *self = *self % b;
            }
        }

        impl Zero for $t {
            fn zero() -> Self {
                Self([0.0; $n])
            }
            fn is_zero(&self) -> bool {
                self.0[0] == 0.0
            }
        }

        impl One for $t {
            fn one() -> Self {
                Self::from_f(1.0)
            }
        }

        impl Num for $t {
            type FromStrRadixErr = std::num::ParseFloatError;
            fn from_str_radix(s: &str, _radix: u32) -> Result<Self, Self::FromStrRadixErr> {
                s.parse::<f64>().map(Self::from_f)
            }
        }

        impl ToPrimitive for $t {
            fn to_i64(&self) -> Option<i64> {
                self.trunc().0.iter().try_fold(0i64, |acc, &x| acc.checked_add(x.to_i64()?))
            }
            fn to_u64(&self) -> Option<u64> {
                let t = self.to_i64()?;
                u64::try_from(t).ok()
            }
            fn to_f64(&self) -> Option<f64> {
                Some(self.0[0])
            }
            fn to_f32(&self) -> Option<f32> {
                Some(self.0[0] as f32)
            }
        }

        impl FromPrimitive for $t {
            fn from_i64(n: i64) -> Option<Self> {
                let hi = n as f64;
                let lo = (n - hi as i64) as f64;
                Some(Self::from_f(hi) + Self::from_f(lo))
            }
            fn from_u64(n: u64) -> Option<Self> {
                let hi = n as f64;
                let lo = (n as i128 - hi as i128) as f64;
                Some(Self::from_f(hi) + Self::from_f(lo))
            }
            fn from_f64(x: f64) -> Option<Self> {
                Some(Self::from_f(x))
            }
            fn from_f32(x: f32) -> Option<Self> {
                Some(Self::from_f(x as f64))
            }
        }

        impl NumCast for $t {
            fn from<T: ToPrimitive>(n: T) -> Option<Self> {
                n.to_f64().map(Self::from_f)
            }
        }

        impl FloatConst for $t {
            fn PI() -> Self {
                Self::renorm_parts(&$consts::PI)
            }
            fn E() -> Self {
                Self::renorm_parts(&$consts::E)
            }
            fn LN_2() -> Self {
                Self::renorm_parts(&$consts::LN_2)
            }
            fn LN_10() -> Self {
                Self::renorm_parts(&$consts::LN_10)
            }
            fn SQRT_2() -> Self {
                Self::renorm_parts(&$consts::SQRT_2)
            }
            fn FRAC_1_SQRT_2() -> Self {
                Self::one() / Self::SQRT_2()
            }
            fn FRAC_1_PI() -> Self {
                Self::one() / Self::PI()
            }
            fn FRAC_2_PI() -> Self {
                Self::from_f(2.0) / Self::PI()
            }
            fn FRAC_2_SQRT_PI() -> Self {
                Self::from_f(2.0) / Self::PI().sqrt()
            }
            fn FRAC_PI_2() -> Self {
                Self::PI() * Self::from_f(0.5)
            }
            fn FRAC_PI_3() -> Self {
                Self::PI() / Self::from_f(3.0)
            }
            fn FRAC_PI_4() -> Self {
                Self::PI() * Self::from_f(0.25)
            }
            fn FRAC_PI_6() -> Self {
                Self::PI() / Self::from_f(6.0)
            }
            fn FRAC_PI_8() -> Self {
                Self::PI() * Self::from_f(0.125)
            }
            fn LOG2_E() -> Self {
                Self::one() / Self::LN_2()
            }
            fn LOG10_E() -> Self {
                Self::one() / Self::LN_10()
            }
            fn LOG2_10() -> Self {
                Self::LN_10() / Self::LN_2()
            }
            fn LOG10_2() -> Self {
                Self::LN_2() / Self::LN_10()
            }
            fn TAU() -> Self {
                Self::PI() * Self::from_f(2.0)
            }
        }

        impl Float for $t {
            fn nan() -> Self {
                Self::from_f(f64::NAN)
            }
            fn infinity() -> Self {
                Self::from_f(f64::INFINITY)
            }
            fn neg_infinity() -> Self {
                Self::from_f(f64::NEG_INFINITY)
            }
            fn neg_zero() -> Self {
                Self::from_f(-0.0)
            }
            fn min_value() -> Self {
                Self::from_f(f64::MIN)
            }
            fn min_positive_value() -> Self {
                Self::from_f(f64::MIN_POSITIVE)
            }
            fn max_value() -> Self {
                Self::from_f(f64::MAX)
            }
            fn epsilon() -> Self {
                Self::from_f($eps)
            }
            fn is_nan(self) -> bool {
                self.0[0].is_nan()
            }
            fn is_infinite(self) -> bool {
                self.0[0].is_infinite()
            }
            fn is_finite(self) -> bool {
                self.0[0].is_finite()
            }
            fn is_normal(self) -> bool {
                self.0[0].is_normal()
            }
            fn classify(self) -> FpCategory {
                self.0[0].classify()
            }
            fn floor(self) -> Self {
                self.floor_()
            }
            fn ceil(self) -> Self {
                -(-self).floor_()
            }
            fn round(self) -> Self {
                if self.0[0] >= 0.0 {
                    (self + Self::from_f(0.5)).floor_()
                } else {
                    -((-self) + Self::from_f(0.5)).floor_()
                }
            }
            fn trunc(self) -> Self {
                if self.0[0] >= 0.0 {
                    self.floor_()
                } else {
                    self.ceil()
                }
            }
            fn fract(self) -> Self {
                self - self.trunc()
            }
            fn abs(self) -> Self {
                if self.0[0] < 0.0 {
                    -self
                } else {
                    self
                }
            }
            fn signum(self) -> Self {
                Self::from_f(self.0[0].signum())
            }
            fn is_sign_positive(self) -> bool {
                self.0[0].is_sign_positive()
            }
            fn is_sign_negative(self) -> bool {
                self.0[0].is_sign_negative()
            }
            fn mul_add(self, a: Self, b: Self) -> Self {
                self * a + b
            }
            fn recip(self) -> Self {
                Self::one() / self
            }
            fn powi(self, n: i32) -> Self {
                let mut base = if n < 0 { self.recip() } else { self };
                let mut e = n.unsigned_abs();
                let mut acc = Self::one();
                while e > 0 {
                    if e & 1 == 1 {
                        acc *= base;
                    }
                    base *= base;
                    e >>= 1;
                }
                acc
            }
            fn powf(self, n: Self) -> Self {
                Self::from_f(self.0[0].powf(n.0[0]))
            }
            fn sqrt(self) -> Self {
                self.sqrt_()
            }
            fn exp(self) -> Self {
                Self::from_f(self.0[0].exp())
            }
            fn exp2(self) -> Self {
                Self::from_f(self.0[0].exp2())
            }
            fn ln(self) -> Self {
                Self::from_f(self.0[0].ln())
            }
            fn log(self, base: Self) -> Self {
                Self::from_f(self.0[0].log(base.0[0]))
            }
            fn log2(self) -> Self {
                Self::from_f(self.0[0].log2())
            }
            fn log10(self) -> Self {
                Self::from_f(self.0[0].log10())
            }
            fn max(self, other: Self) -> Self {
                if self.is_nan() || other > self {
                    other
                } else {
                    self
                }
            }
            fn min(self, other: Self) -> Self {
                if self.is_nan() || other < self {
                    other
                } else {
                    self
                }
            }
            fn abs_sub(self, other: Self) -> Self {
                if self > other {
                    self - other
                } else {
                    Self::zero()
                }
            }
            fn cbrt(self) -> Self {
                Self::from_f(self.0[0].cbrt())
            }
            fn hypot(self, other: Self) -> Self {
                (self * self + other * other).sqrt()
            }
            fn sin(self) -> Self {
                Self::from_f(self.0[0].sin())
            }
            fn cos(self) -> Self {
                Self::from_f(self.0[0].cos())
            }
            fn tan(self) -> Self {
                Self::from_f(self.0[0].tan())
            }
            fn asin(self) -> Self {
                Self::from_f(self.0[0].asin())
            }
            fn acos(self) -> Self {
                Self::from_f(self.0[0].acos())
            }
            fn atan(self) -> Self {
                Self::from_f(self.0[0].atan())
            }
            fn atan2(self, other: Self) -> Self {
                Self::from_f(self.0[0].atan2(other.0[0]))
            }
            fn sin_cos(self) -> (Self, Self) {
                (self.sin(), self.cos())
            }
            fn exp_m1(self) -> Self {
                Self::from_f(self.0[0].exp_m1())
            }
            fn ln_1p(self) -> Self {
                Self::from_f(self.0[0].ln_1p())
            }
            fn sinh(self) -> Self {
                Self::from_f(self.0[0].sinh())
            }
            fn cosh(self) -> Self {
                Self::from_f(self.0[0].cosh())
            }
            fn tanh(self) -> Self {
                Self::from_f(self.0[0].tanh())
            }
            fn asinh(self) -> Self {
                Self::from_f(self.0[0].asinh())
            }
            fn acosh(self) -> Self {
                Self::from_f(self.0[0].acosh())
            }
            fn atanh(self) -> Self {
                Self::from_f(self.0[0].atanh())
            }
            fn integer_decode(self) -> (u64, i16, i8) {
                self.0[0].integer_decode()
            }
        }

        impl Real for $t {
            fn of(x: f64) -> Self {
                Self::from_f(x)
            }
        }
    };
}

mod dd_consts {
    use std::f64::consts as C;

    pub const PI: [f64; 2] = [C::PI, 1.2246467991473532e-16];
    pub const E: [f64; 2] = [C::E, 1.4456468917292502e-16];
    pub const LN_2: [f64; 2] = [C::LN_2, 2.3190468138462996e-17];
    pub const LN_10: [f64; 2] = [C::LN_10, -2.1707562233822494e-16];
    pub const SQRT_2: [f64; 2] = [C::SQRT_2, -9.667293313452913e-17];
}

mod qd_consts {
    use std::f64::consts as C;

    pub const PI: [f64; 4] = [
        C::PI,
        1.2246467991473532e-16,
        -2.9947698097183397e-33,
        1.1124542208633653e-49,
    ];
    pub const E: [f64; 4] = [
        C::E,
        1.4456468917292502e-16,
        -2.1277171080381768e-33,
        1.5156301598412191e-49,
    ];
    pub const LN_2: [f64; 4] = [
        C::LN_2,
        2.3190468138462996e-17,
        5.707708438416212e-34,
        -3.5824322106018114e-50,
    ];
    pub const LN_10: [f64; 4] = [
        C::LN_10,
        -2.1707562233822494e-16,
        -9.984262454465777e-33,
        -4.023357454450206e-49,
    ];
    pub const SQRT_2: [f64; 4] = [
        C::SQRT_2,
        -9.667293313452913e-17,
        4.1386753086994136e-33,
        4.935546991468351e-50,
    ];
}

impl_extended!(DoubleDouble, 2, 4.930_380_657_631_324e-32, dd_consts);
impl_extended!(QuadDouble, 4, 1.215_432_671_457_254e-63, qd_consts);

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn third_roundtrip() {
        let three = QuadDouble::of(3.0);
        let x = QuadDouble::one() / three;
        let err = (x * three - QuadDouble::one()).abs();
        assert!(err.hi() < 1e-62, "{err:?}");
        let y = DoubleDouble::one() / DoubleDouble::of(3.0);
        assert!((y * DoubleDouble::of(3.0) - DoubleDouble::one()).abs().hi() < 1e-31);
    }

    #[test]
    fn sqrt_two_matches_constant() {
        let s = QuadDouble::of(2.0).sqrt();
        assert!((s - QuadDouble::SQRT_2()).abs().hi() < 1e-62);
        let d = DoubleDouble::of(2.0).sqrt();
        assert!((d - DoubleDouble::SQRT_2()).abs().hi() < 1e-31);
    }

    #[test]
    fn floor_and_ordering() {
        let x = QuadDouble::of(2.5) + QuadDouble::of(1e-40);
        assert_eq!(x.floor(), QuadDouble::of(2.0));
        assert_eq!(x.round(), QuadDouble::of(3.0));
        assert!(x > QuadDouble::of(2.5));
        assert_eq!((-x).trunc(), QuadDouble::of(-2.0));
    }

    #[test]
    fn cancellation_keeps_tail() {
        let big = QuadDouble::of(1e20);
        let tiny = QuadDouble::of(1e-30);
        let r = (big + tiny) - big;
        assert!((r - tiny).abs().hi() < 1e-45);
    }
}
