//! Central finite-difference stencils.

use std::ops::{Add, Mul, Sub};

use crate::error::{GeomError, Result};

/// Accuracy order of a central stencil.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Stencil {
    Second,
    Fourth,
}

impl Stencil {
    pub fn from_order(order: u32) -> Result<Self> {
        match order {
            2 => Ok(Stencil::Second),
            4 => Ok(Stencil::Fourth),
            o => Err(GeomError::InvalidArgument(format!(
                "stencil order must be 2 or 4, got {o}"
            ))),
        }
    }

    pub fn order(self) -> u32 {
        match self {
            Stencil::Second => 2,
            Stencil::Fourth => 4,
        }
    }

    /// Number of nodes the stencil reaches on each side.
    pub fn half_width(self) -> usize {
        match self {
            Stencil::Second => 1,
            Stencil::Fourth => 2,
        }
    }
}

pub fn check_step(h: f64) -> Result<()> {
    if h > 0.0 && h.is_finite() {
        Ok(())
    } else {
        Err(GeomError::NonPositiveStep(h))
    }
}

/// `f'(0)` by a central difference with step `h`.
pub fn first<T, F>(f: F, h: f64, stencil: Stencil) -> T
where
    T: Copy + Add<Output = T> + Sub<Output = T> + Mul<f64, Output = T>,
    F: Fn(f64) -> T,
{
    match stencil {
        Stencil::Second => (f(h) - f(-h)) * (0.5 / h),
        Stencil::Fourth => {
            ((f(-2.0 * h) - f(2.0 * h)) + (f(h) - f(-h)) * 8.0) * (1.0 / (12.0 * h))
        }
    }
}

/// `f''(0)` by a central difference with step `h`.
pub fn second<T, F>(f: F, h: f64, stencil: Stencil) -> T
where
    T: Copy + Add<Output = T> + Sub<Output = T> + Mul<f64, Output = T>,
    F: Fn(f64) -> T,
{
    let f0 = f(0.0);
    match stencil {
        Stencil::Second => ((f(h) + f(-h)) - f0 * 2.0) * (1.0 / (h * h)),
        Stencil::Fourth => {
            (((f(h) + f(-h)) * 16.0 - (f(2.0 * h) + f(-2.0 * h))) - f0 * 30.0)
                * (1.0 / (12.0 * h * h))
        }
    }
}

/// Weights of the central first- and second-derivative stencils on offsets
/// `−w..=w` (unit spacing).
pub fn weights(stencil: Stencil) -> (&'static [f64], &'static [f64]) {
    match stencil {
        Stencil::Second => (&[-0.5, 0.0, 0.5], &[1.0, -2.0, 1.0]),
        Stencil::Fourth => (
            &[1.0 / 12.0, -8.0 / 12.0, 0.0, 8.0 / 12.0, -1.0 / 12.0],
            &[-1.0 / 12.0, 16.0 / 12.0, -30.0 / 12.0, 16.0 / 12.0, -1.0 / 12.0],
        ),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_on_low_degree_polynomials() {
        let cubic = |x: f64| 2.0 + 3.0 * x - x * x + 0.5 * x * x * x;
        assert!((first(cubic, 0.1, Stencil::Second) - 3.0 - 0.005).abs() < 1e-12);
        assert!((first(cubic, 0.1, Stencil::Fourth) - 3.0).abs() < 1e-12);
        assert!((second(cubic, 0.1, Stencil::Second) + 2.0).abs() < 1e-10);
        let quartic = |x: f64| x.powi(4);
        assert!(second(quartic, 0.1, Stencil::Second) > 0.01);
        assert!((second(quartic, 0.1, Stencil::Fourth)).abs() < 1e-10);
    }

    #[test]
    fn convergence_orders() {
        let f = |x: f64| (1.3 * x).sin() + x.exp();
        let exact = 1.3 + 1.0;
        for (st, expected) in [(Stencil::Second, 4.0), (Stencil::Fourth, 16.0)] {
            let e1 = (first(f, 0.1, st) - exact).abs();
            let e2 = (first(f, 0.05, st) - exact).abs();
            assert!((e1 / e2 - expected).abs() < 0.2 * expected, "{st:?}: {}", e1 / e2);
        }
    }

    #[test]
    fn weights_reproduce_stencils() {
        let f = |x: f64| (0.7 * x).cos();
        let h = 0.05;
        for st in [Stencil::Second, Stencil::Fourth] {
            let w = st.half_width() as i64;
            let (d1, d2) = weights(st);
            let a: f64 = (-w..=w).zip(d1).map(|(o, c)| c * f(o as f64 * h)).sum::<f64>() / h;
            let b: f64 = (-w..=w).zip(d2).map(|(o, c)| c * f(o as f64 * h)).sum::<f64>() / (h * h);
            assert!((a - first(f, h, st)).abs() < 1e-12);
            assert!((b - second(f, h, st)).abs() < 1e-9);
        }
    }

    #[test]
    fn rejects_bad_steps() {
        assert!(check_step(0.0).is_err());
        assert!(check_step(-1e-3).is_err());
        assert!(check_step(f64::NAN).is_err());
        assert!(check_step(1e-4).is_ok());
        assert!(Stencil::from_order(3).is_err());
    }
}
