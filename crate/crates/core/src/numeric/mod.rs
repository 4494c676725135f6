//! Small numerical building blocks shared by the solvers.

pub mod cauchy;
pub mod lsq;
pub mod poly;
pub mod quad;

pub use num_complex::Complex64 as C64;

/// The imaginary unit.
pub const I: C64 = C64 { re: 0.0, im: 1.0 };


/// Binomial coefficient as a float.
pub fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    let mut acc = 1.0;
    for i in 0..k {
        acc = acc * (n - i) as f64 / (i + 1) as f64;
    }
    acc
}

pub fn factorial(n: usize) -> f64 {
    (1..=n).fold(1.0, |a, k| a * k as f64)
}
