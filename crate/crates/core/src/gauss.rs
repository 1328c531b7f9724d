//! Gauss–Legendre rules on intervals, plus a composite/adaptive helper used
//! for kernel normalization and for independent quadrature oracles.

use crate::scalar::Real;

/// Nodes and weights of the `n`-point Gauss–Legendre rule on (-1, 1).
///
/// Newton iteration on the Legendre recurrence; accurate to machine
/// precision for the orders used here (n <= a few hundred).
pub fn gauss_legendre<T: Real>(n: usize) -> (Vec<T>, Vec<T>) {
    assert!(n >= 1);
    let mut nodes = vec![T::zero(); n];
    let mut weights = vec![T::zero(); n];
    let nf = T::of_usize(n);
    for i in 0..(n + 1) / 2 {
        // Chebyshev-based initial guess.
        let theta = T::PI() * (T::of_usize(i) + T::of(0.75)) / (nf + T::of(0.5));
        let mut x = theta.cos();
        let mut dp;
        loop {
            // Legendre polynomial P_n(x) and derivative by recurrence.
            let mut p0 = T::one();
            let mut p1 = x;
            for k in 2..=n {
                let kf = T::of_usize(k);
                let p2 = ((T::of(2.0) * kf - T::one()) * x * p1 - (kf - T::one()) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            dp = nf * (x * p1 - p0) / (x * x - T::one());
            let dx = p1 / dp;
            x = x - dx;
            if dx.abs() <= T::epsilon() * (T::one() + x.abs()) {
                break;
            }
        }
        let w = T::of(2.0) / ((T::one() - x * x) * dp * dp);
        nodes[i] = -x;
        weights[i] = w;
        nodes[n - 1 - i] = x;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = T::zero();
    }
    (nodes, weights)
}

/// `n`-point Gauss–Legendre rule mapped to (a, b).
pub fn gauss_legendre_on<T: Real>(n: usize, a: T, b: T) -> (Vec<T>, Vec<T>) {
    let (x, w) = gauss_legendre::<T>(n);
    let half = T::of(0.5);
    let mid = half * (a + b);
    let rad = half * (b - a);
    (
        x.iter().map(|&t| mid + rad * t).collect(),
        w.iter().map(|&wi| rad * wi).collect(),
    )
}

/// Integrate `f` on (a, b) with a composite 16-point Gauss rule, doubling the
/// number of panels until two successive levels agree to `tol` (relative).
///
/// Returns `(value, converged)`.
pub fn integrate_adaptive<T: Real>(f: impl Fn(T) -> T, a: T, b: T, tol: T) -> (T, bool) {
    let (x0, w0) = gauss_legendre::<T>(16);
    let panel = |lo: T, hi: T| -> T {
        let half = T::of(0.5);
        let mid = half * (lo + hi);
        let rad = half * (hi - lo);
        x0.iter()
            .zip(&w0)
            .map(|(&t, &w)| w * rad * f(mid + rad * t))
            .sum()
    };
    let mut n_panels = 1usize;
    let mut prev = panel(a, b);
    for _ in 0..16 {
        n_panels *= 2;
        let step = (b - a) / T::of_usize(n_panels);
        let mut val = T::zero();
        for i in 0..n_panels {
            let lo = a + step * T::of_usize(i);
            val += panel(lo, lo + step);
        }
        let scale = T::one().max(val.abs());
        if (val - prev).abs() <= tol * scale {
            return (val, true);
        }
        prev = val;
    }
    (prev, false)
}
