//! Scalar math shim: `std` float intrinsics when available, `libm` otherwise.

#![allow(dead_code)]

macro_rules! shim {
    ($name:ident, $std:ident, $libm:ident $(, $arg:ident)*) => {
        #[inline(always)]
        pub fn $name(x: f64 $(, $arg: f64)*) -> f64 {
            #[cfg(feature = "std")]
            {
                x.$std($($arg),*)
            }
            #[cfg(not(feature = "std"))]
            {
                libm::$libm(x $(, $arg)*)
            }
        }
    };
}

shim!(ln, ln, log);
shim!(exp, exp, exp);
shim!(sqrt, sqrt, sqrt);
shim!(sin, sin, sin);
shim!(cos, cos, cos);
shim!(tanh, tanh, tanh);
shim!(abs, abs, fabs);
shim!(floor, floor, floor);
shim!(round, round, round);
shim!(atan2, atan2, atan2, y);
shim!(hypot, hypot, hypot, y);
shim!(powf, powf, pow, y);
shim!(powi_via, powf, pow, y);
