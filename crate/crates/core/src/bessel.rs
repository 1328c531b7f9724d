//! Bessel functions J0 and J1: power series for small arguments, classic
//! rational/asymptotic approximations (Abramowitz & Stegun 9.4) for large
//! ones (~1e-7 absolute accuracy, plenty for the symbol diagnostics).

use crate::scalar::Real;

pub fn j0<T: Real>(x: T) -> T {
    T::of(j0_f64(x.to_f64().unwrap_or(f64::NAN)))
}

pub fn j1<T: Real>(x: T) -> T {
    T::of(j1_f64(x.to_f64().unwrap_or(f64::NAN)))
}

fn j0_f64(x: f64) -> f64 {
    let ax = x.abs();
    if ax < 12.0 {
        // sum_k (-1)^k (x^2/4)^k / (k!)^2
        let q = ax * ax / 4.0;
        let mut term = 1.0;
        let mut sum = 1.0;
        for k in 1..40 {
            term *= -q / ((k * k) as f64);
            sum += term;
            if term.abs() < 1e-18 * sum.abs().max(1.0) {
                break;
            }
        }
        sum
    } else {
        let z = 8.0 / ax;
        let y = z * z;
        let p0 = 1.0
            + y * (-0.1098628627e-2
                + y * (0.2734510407e-4 + y * (-0.2073370639e-5 + y * 0.2093887211e-6)));
        let q0 = -0.1562499995e-1
            + y * (0.1430488765e-3
                + y * (-0.6911147651e-5 + y * (0.7621095161e-6 + y * (-0.934935152e-7))));
        let xx = ax - 0.785398164;
        (0.636619772 / ax).sqrt() * (xx.cos() * p0 - z * xx.sin() * q0)
    }
}

fn j1_f64(x: f64) -> f64 {
    let ax = x.abs();
    let v = if ax < 12.0 {
        // (x/2) sum_k (-1)^k (x^2/4)^k / (k! (k+1)!)
        let q = ax * ax / 4.0;
        let mut term = ax / 2.0;
        let mut sum = term;
        for k in 1..40 {
            term *= -q / ((k * (k + 1)) as f64);
            sum += term;
            if term.abs() < 1e-18 * sum.abs().max(1.0) {
                break;
            }
        }
        sum
    } else {
        let z = 8.0 / ax;
        let y = z * z;
        let p1 = 1.0
            + y * (0.183105e-2
                + y * (-0.3516396496e-4 + y * (0.2457520174e-5 + y * (-0.240337019e-6))));
        let q1 = 0.04687499995
            + y * (-0.2002690873e-3
                + y * (0.8449199096e-5 + y * (-0.88228987e-6 + y * 0.105787412e-6)));
        let xx = ax - 2.356194491;
        (0.636619772 / ax).sqrt() * (xx.cos() * p1 - z * xx.sin() * q1)
    };
    if x < 0.0 {
        -v
    } else {
        v
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gauss::gauss_legendre_on;
    use std::f64::consts::PI;

    /// Integral-representation oracle: J_n(x) = (1/pi) int_0^pi cos(n t - x sin t) dt.
    fn j_oracle(n: u32, x: f64) -> f64 {
        let pts = (64 + 2 * x.abs() as usize).min(2000);
        let (ts, ws) = gauss_legendre_on::<f64>(pts, 0.0, PI);
        ts.iter()
            .zip(&ws)
            .map(|(&t, &w)| w * (n as f64 * t - x * t.sin()).cos())
            .sum::<f64>()
            / PI
    }

    #[test]
    fn matches_integral_oracle() {
        for &x in &[0.0, 0.1, 1.0, 3.83, 7.0, 11.9, 12.1, 30.0, 123.4, 900.0] {
            assert!((j0(x) - j_oracle(0, x)).abs() < 2e-7, "J0({x})");
            assert!((j1(x) - j_oracle(1, x)).abs() < 2e-7, "J1({x})");
        }
        // high precision in the series region
        for &x in &[0.5, 2.0, 8.0, 11.5] {
            assert!((j0(x) - j_oracle(0, x)).abs() < 1e-12, "J0({x})");
            assert!((j1(x) - j_oracle(1, x)).abs() < 1e-12, "J1({x})");
        }
    }

    #[test]
    fn small_argument_expansions() {
        // J0(x) ~ 1 - x^2/4, J1(x) ~ x/2 - x^3/16
        let x = 1e-3f64;
        assert!((j0(x) - (1.0 - x * x / 4.0)).abs() < 1e-13);
        assert!((j1(x) - (x / 2.0 - x * x * x / 16.0)).abs() < 1e-15);
        assert_eq!(j1(0.0f64), 0.0);
        assert!((j1(-2.0f64) + j1(2.0f64)).abs() < 1e-15);
    }
}
