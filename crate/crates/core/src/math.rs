//! Scalar math shim and a minimal complex type.
//!
//! The crate builds without `std`; float transcendentals then come from
//! `libm` instead of the standard library intrinsics.

#[cfg(feature = "std")]
macro_rules! shim {
    ($name:ident, $method:ident) => {
        #[inline(always)]
        pub fn $name(x: f64) -> f64 {
            x.$method()
        }
    };
}

#[cfg(not(feature = "std"))]
macro_rules! shim {
    ($name:ident, $method:ident) => {
        #[inline(always)]
        pub fn $name(x: f64) -> f64 {
            libm::$name(x)
        }
    };
}

shim!(cos, cos);
shim!(sin, sin);
shim!(exp, exp);
shim!(log2, log2);
shim!(sqrt, sqrt);
shim!(round, round);
shim!(ceil, ceil);
shim!(floor, floor);
shim!(fabs, abs);

#[inline(always)]
pub fn atan2(y: f64, x: f64) -> f64 {
    #[cfg(feature = "std")]
    {
        y.atan2(x)
    }
    #[cfg(not(feature = "std"))]
    {
        libm::atan2(y, x)
    }
}

/// Complex number with `f64` parts; just enough for Fourier coefficients.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Complex {
    pub re: f64,
    pub im: f64,
}

impl Complex {
    pub const ZERO: Complex = Complex { re: 0.0, im: 0.0 };

    #[inline(always)]
    pub fn new(re: f64, im: f64) -> Self {
        Complex { re, im }
    }

    /// `e^{i*angle}`
    #[inline(always)]
    pub fn cis(angle: f64) -> Self {
        Complex {
            re: cos(angle),
            im: sin(angle),
        }
    }

    #[inline(always)]
    pub fn scale(self, s: f64) -> Self {
        Complex {
            re: self.re * s,
            im: self.im * s,
        }
    }

    #[inline(always)]
    pub fn norm_sqr(self) -> f64 {
        self.re * self.re + self.im * self.im
    }

    #[inline(always)]
    pub fn norm(self) -> f64 {
        sqrt(self.norm_sqr())
    }

    /// Argument in (-pi, pi]; 0 for the zero element.
    #[inline(always)]
    pub fn arg(self) -> f64 {
        if self.re == 0.0 && self.im == 0.0 {
            0.0
        } else {
            atan2(self.im, self.re)
        }
    }
}

impl core::ops::Add for Complex {
    type Output = Complex;
    #[inline(always)]
    fn add(self, rhs: Complex) -> Complex {
        Complex::new(self.re + rhs.re, self.im + rhs.im)
    }
}

impl core::ops::Sub for Complex {
    type Output = Complex;
    #[inline(always)]
    fn sub(self, rhs: Complex) -> Complex {
        Complex::new(self.re - rhs.re, self.im - rhs.im)
    }
}

impl core::ops::Mul for Complex {
    type Output = Complex;
    #[inline(always)]
    fn mul(self, rhs: Complex) -> Complex {
        Complex::new(
            self.re * rhs.re - self.im * rhs.im,
            self.re * rhs.im + self.im * rhs.re,
        )
    }
}

impl core::ops::AddAssign for Complex {
    #[inline(always)]
    fn add_assign(&mut self, rhs: Complex) {
        self.re += rhs.re;
        self.im += rhs.im;
    }
}
