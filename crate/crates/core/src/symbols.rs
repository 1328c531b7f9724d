//! Fourier-symbol diagnostics: the nonlocal symbol lambda_delta, its
//! quasi-discrete analogue, the Galerkin / collocation lattice sums, and
//! ratio scans of the stability comparisons.

use rayon::prelude::*;

use crate::bessel::{j0, j1};
use crate::gauss::gauss_legendre_on;
use crate::kernels::{eval_window, NonlocalKernelSpec, Profile};
use crate::quadrature::{MeshfreeWeights, SymmetricPointSet};
use crate::scalar::{norm2, Real};

/// lambda_delta(xi) = int_{B_delta} rho_delta(|s|)(1 - cos(s . xi)) ds,
/// by radial-angular Gauss quadrature with oscillation-adapted orders.
pub fn lambda_delta<T: Real>(kernel: &NonlocalKernelSpec<T>, xi: &[T]) -> T {
    let q = (kernel.delta * norm2(xi)).to_f64().unwrap_or(0.0);
    let n = 24 + q.abs() as usize;
    match kernel.d {
        1 => {
            let (rs, ws) = gauss_legendre_on(n.min(400), T::zero(), kernel.delta);
            let two = T::of(2.0);
            rs.iter()
                .zip(&ws)
                .map(|(&r, &w)| {
                    two * w * kernel.eval_scaled_radial(r) * (T::one() - (r * xi[0]).cos())
                })
                .sum()
        }
        2 => {
            let xin = norm2(xi);
            let (rs, wr) = gauss_legendre_on(n.min(400), T::zero(), kernel.delta);
            let (ts, wt) = gauss_legendre_on((n + 8).min(400), T::zero(), T::of(2.0) * T::PI());
            // angle measured against xi: the integrand depends on |s||xi| cos(theta)
            rs.iter()
                .zip(&wr)
                .map(|(&r, &wri)| {
                    let inner: T = ts
                        .iter()
                        .zip(&wt)
                        .map(|(&t, &wti)| wti * (T::one() - (r * xin * t.cos()).cos()))
                        .sum();
                    wri * r * kernel.eval_scaled_radial(r) * inner
                })
                .sum()
        }
        _ => unimplemented!("d > 2 symbols are out of scope"),
    }
}

/// Fast radial evaluation of lambda_delta used inside lattice sums, where
/// arguments reach O(R / h) and direct angular quadrature is infeasible.
/// Constant profile: closed Bessel forms. Other profiles: radial Gauss rule
/// with the angular integral replaced by its J0 closed form.
pub fn lambda_delta_fast<T: Real>(kernel: &NonlocalKernelSpec<T>, xi_norm: T) -> T {
    let delta = kernel.delta;
    let q = delta * xi_norm;
    if q == T::zero() {
        return T::zero();
    }
    let d2 = delta * delta;
    if kernel.profile == Profile::Constant {
        return match kernel.d {
            // (6/delta^2)(1 - sin(q)/q)
            1 => T::of(6.0) / d2 * (T::one() - q.sin() / q),
            // (8/delta^2)(1 - 2 J1(q)/q)
            2 => T::of(8.0) / d2 * (T::one() - T::of(2.0) * j1(q) / q),
            _ => unimplemented!(),
        };
    }
    let n = (24 + q.to_f64().unwrap_or(0.0).abs() as usize).min(4000);
    let (rs, wr) = gauss_legendre_on(n, T::zero(), delta);
    match kernel.d {
        1 => rs
            .iter()
            .zip(&wr)
            .map(|(&r, &w)| {
                T::of(2.0) * w * kernel.eval_scaled_radial(r) * (T::one() - (r * xi_norm).cos())
            })
            .sum(),
        2 => rs
            .iter()
            .zip(&wr)
            .map(|(&r, &w)| {
                T::of(2.0) * T::PI()
                    * w
                    * r
                    * kernel.eval_scaled_radial(r)
                    * (T::one() - j0(r * xi_norm))
            })
            .sum(),
        _ => unimplemented!(),
    }
}

/// Quasi-discrete symbol: includes the operator's leading factor 2, so
/// -L^eps_delta e^{i x . xi} = lambda^eps_delta(xi) e^{i x . xi} exactly.
pub fn lambda_delta_eps<T: Real>(
    kernel: &NonlocalKernelSpec<T>,
    set: &SymmetricPointSet<T>,
    weights: &MeshfreeWeights<T>,
    xi: &[T],
) -> T {
    let delta = kernel.delta;
    let two = T::of(2.0);
    // 2 sum omega_delta rho_delta (1 - cos(delta s . xi))
    //   = (2/delta^2) sum omega(s) rho-hat(|s|) (1 - cos(delta s . xi))
    let total: T = set
        .points
        .iter()
        .zip(&weights.weights)
        .map(|(s, &w)| {
            if w == T::zero() {
                return T::zero();
            }
            let dot: T = s.iter().zip(xi).map(|(&sj, &xj)| sj * xj).sum();
            w * kernel.normalized_profile(norm2(s)) * (T::one() - (delta * dot).cos())
        })
        .sum();
    two / (delta * delta) * total
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SymbolKind {
    /// Galerkin: 2^{8d}, sinc^8
    G,
    /// Collocation: 2^{4d}, sinc^4
    C,
    /// Quasi-discrete collocation: 2^{4d}, sinc^4, lambda^eps factors
    CEps,
}

/// One lattice-sum evaluation with its truncation-tail estimate.
#[derive(Debug, Clone, Copy)]
pub struct LatticeValue<T> {
    pub value: T,
    pub tail_estimate: T,
    pub tail_warning: bool,
}

/// Centered cubic cardinal B-spline (support [-2, 2]); its Fourier transform
/// is (sin(w/2) / (w/2))^4, which is what makes the closed lattice-sum
/// identities below work.
fn bspline4<T: Real>(x: T) -> T {
    eval_window(x.abs() / T::of(2.0))
}

/// Closed form of the 1D lattice sum sum_r (sin(xi/2) / (xi + 2 pi r))^4
/// = (2 + cos xi) / 48, by Poisson summation against the cubic B-spline.
fn sinc4_lattice_const<T: Real>(xi: T) -> T {
    (T::of(2.0) + xi.cos()) / T::of(48.0)
}

/// Oscillatory 1D lattice sum, as (re, im):
/// sum_r e^{i c (xi + 2 pi r)} (sin(xi/2) / (xi + 2 pi r))^4
/// = (1/16) sum_m B4(c + m) e^{-i m xi}  (finite: B4 supported on [-2, 2]).
fn sinc4_lattice_osc<T: Real>(xi: T, c: T) -> (T, T) {
    let lo = (-c - T::of(2.0)).ceil().to_i64().unwrap_or(0);
    let hi = (-c + T::of(2.0)).floor().to_i64().unwrap_or(0);
    let mut re = T::zero();
    let mut im = T::zero();
    for m in lo..=hi {
        let mt = T::of_i64(m);
        let b = bspline4(c + mt) / T::of(16.0);
        re += b * (mt * xi).cos();
        im -= b * (mt * xi).sin();
    }
    (re, im)
}

/// Truncated lattice sum over r in Z^d, |r_j| <= R:
/// prefactor * sum lambda((xi + 2 pi r) (/) h) prod_j h_j sinc_j^p.
///
/// The raw C-symbol sum converges only like R^{-2} (lambda_delta saturates to
/// the kernel's total mass at large frequencies while the sinc^4 weights decay
/// like r^{-4}), so the saturated part is summed exactly with the closed-form
/// identity above and only the Bessel-type remainder, which decays like
/// |zeta|^{-(d+1)/2} r^{-4}, is truncated. For the quasi-discrete C symbol the
/// oscillatory part is itself a finite Poisson sum, so the value is exact and
/// the tail estimate is zero. The Galerkin sum (sinc^8) converges rapidly and
/// is evaluated directly.
pub fn lattice_sum<T: Real>(
    kind: SymbolKind,
    kernel: &NonlocalKernelSpec<T>,
    h: &[T],
    meshfree: Option<(&SymmetricPointSet<T>, &MeshfreeWeights<T>)>,
    xi: &[T],
    r_max: i64,
) -> LatticeValue<T> {
    assert!(r_max >= 5);
    let d = h.len();
    let (power, prefactor) = match kind {
        SymbolKind::G => (8, T::of(2.0).powi(8 * d as i32)),
        SymbolKind::C | SymbolKind::CEps => (4, T::of(2.0).powi(4 * d as i32)),
    };
    let two_pi = T::of(2.0) * T::PI();
    let h_prod: T = h.iter().copied().fold(T::one(), |a, b| a * b);

    if kind == SymbolKind::CEps {
        // Exact: constant part by the closed-form identity, oscillatory part by
        // the finite Poisson sum per axis and quadrature point.
        let (set, w) = meshfree.expect("meshfree data required for the C_eps symbol");
        let delta = kernel.delta;
        let scale = T::of(2.0) / (delta * delta);
        let const_axes = xi
            .iter()
            .map(|&x| sinc4_lattice_const(x))
            .fold(T::one(), |a, b| a * b);
        let mut lam_inf = T::zero();
        let mut osc = T::zero();
        for (s, &ws) in set.points.iter().zip(&w.weights) {
            if ws == T::zero() {
                continue;
            }
            let rho = kernel.normalized_profile(norm2(s));
            lam_inf += ws * rho;
            let mut re = T::one();
            let mut im = T::zero();
            for j in 0..d {
                let (ar, ai) = sinc4_lattice_osc(xi[j], delta * s[j] / h[j]);
                let nr = re * ar - im * ai;
                im = re * ai + im * ar;
                re = nr;
            }
            osc += ws * rho * re;
        }
        return LatticeValue {
            value: prefactor * scale * h_prod * (lam_inf * const_axes - osc),
            tail_estimate: T::zero(),
            tail_warning: false,
        };
    }

    // G: direct sum. C: exact saturated part minus truncated remainder sum.
    let mut value = match kind {
        SymbolKind::C => {
            kernel.total_mass()
                * h_prod
                * xi.iter()
                    .map(|&x| sinc4_lattice_const(x))
                    .fold(T::one(), |a, b| a * b)
        }
        _ => T::zero(),
    };
    let mass = kernel.total_mass();
    let mut shell_max = T::zero(); // largest |r|_inf = r_max term, for the tail estimate
    let mut r = vec![-r_max; d];
    let mut zeta_norm_sq;
    'outer: loop {
        let mut weight = T::one();
        zeta_norm_sq = T::zero();
        for j in 0..d {
            let xr = xi[j] + two_pi * T::of_i64(r[j]);
            let s = (xi[j] / T::of(2.0)).sin() / xr;
            weight = weight * h[j] * s.powi(power);
            let zj = xr / h[j];
            zeta_norm_sq += zj * zj;
        }
        let lam = lambda_delta_fast(kernel, zeta_norm_sq.sqrt());
        let term = match kind {
            SymbolKind::G => lam * weight,
            _ => (mass - lam) * weight,
        };
        match kind {
            SymbolKind::G => value += term,
            _ => value -= term,
        }
        if r.iter().any(|&rj| rj.abs() == r_max) {
            shell_max = shell_max.max(term.abs());
        }
        for j in (0..d).rev() {
            if r[j] < r_max {
                r[j] += 1;
                for rj in r.iter_mut().skip(j + 1) {
                    *rj = -r_max;
                }
                continue 'outer;
            }
        }
        break;
    }
    // truncated terms decay like |r|^{-8} (G) or |r|^{-4} |zeta_r|^{-(d+1)/2}
    // (C remainder); bound the omitted tail by the outermost-shell maximum
    // times the shell count folded into sum_{k > R} k^{-4} <= C / R^3
    let shells = T::of_usize((2 * r_max as usize + 1).pow(d as u32 - 1) * 2 * d);
    let tail_estimate = shell_max * shells * T::of_i64(r_max) / T::of(3.0);
    let tail_warning = tail_estimate > T::of(1e-6) * value.abs().max(T::min_positive_value());
    LatticeValue {
        value: prefactor * value,
        tail_estimate: prefactor * tail_estimate,
        tail_warning,
    }
}

/// Scan of the stability ratios over a frequency grid.
#[derive(Debug, Clone)]
pub struct SymbolScan<T> {
    pub xi_grid: Vec<Vec<T>>,
    pub lambda_g: Vec<T>,
    pub lambda_c: Vec<T>,
    pub lambda_c_eps: Vec<T>,
    pub trunc_radius: i64,
    pub tail_estimate: T,
    pub min_c_over_g: T,
    pub min_ceps_over_c: T,
}

/// Frequency grid on Q: xi_j = -pi + 2 pi i / n, i = 0..n-1. For odd `n` no
/// coordinate ever equals zero, so the sinc factors of the lattice sums
/// never degenerate and the origin is excluded automatically.
pub fn xi_grid<T: Real>(d: usize, n: usize) -> Vec<Vec<T>> {
    assert!(n % 2 == 1, "odd point counts avoid zero coordinates");
    let step = T::of(2.0) * T::PI() / T::of_usize(n);
    let mut grid = Vec::with_capacity(n.pow(d as u32));
    let mut idx = vec![0usize; d];
    'outer: loop {
        grid.push(
            idx.iter()
                .map(|&i| -T::PI() + step * T::of_usize(i))
                .collect(),
        );
        for j in (0..d).rev() {
            if idx[j] + 1 < n {
                idx[j] += 1;
                for ij in idx.iter_mut().skip(j + 1) {
                    *ij = 0;
                }
                continue 'outer;
            }
        }
        break;
    }
    grid
}

/// Evaluate lambda_G, lambda_C and lambda^eps_C over a frequency grid and
/// record the minima of lambda_C / lambda_G and lambda^eps_C / lambda_C.
pub fn scan_comparison<T: Real>(
    kernel: &NonlocalKernelSpec<T>,
    h: &[T],
    set: &SymmetricPointSet<T>,
    weights: &MeshfreeWeights<T>,
    xi_grid: &[Vec<T>],
    r_max: i64,
) -> SymbolScan<T> {
    let rows: Vec<(T, T, T, T)> = xi_grid
        .par_iter()
        .map(|xi| {
            let g = lattice_sum(SymbolKind::G, kernel, h, None, xi, r_max);
            let c = lattice_sum(SymbolKind::C, kernel, h, None, xi, r_max);
            let ce = lattice_sum(SymbolKind::CEps, kernel, h, Some((set, weights)), xi, r_max);
            let tail = g.tail_estimate.max(c.tail_estimate).max(ce.tail_estimate);
            (g.value, c.value, ce.value, tail)
        })
        .collect();
    let mut lambda_g = Vec::with_capacity(rows.len());
    let mut lambda_c = Vec::with_capacity(rows.len());
    let mut lambda_c_eps = Vec::with_capacity(rows.len());
    let mut tail_estimate = T::zero();
    let mut min_c_over_g = T::infinity();
    let mut min_ceps_over_c = T::infinity();
    for (g, c, ce, tail) in rows {
        min_c_over_g = min_c_over_g.min(c / g);
        min_ceps_over_c = min_ceps_over_c.min(ce / c);
        tail_estimate = tail_estimate.max(tail);
        lambda_g.push(g);
        lambda_c.push(c);
        lambda_c_eps.push(ce);
    }
    SymbolScan {
        xi_grid: xi_grid.to_vec(),
        lambda_g,
        lambda_c,
        lambda_c_eps,
        trunc_radius: r_max,
        tail_estimate,
        min_c_over_g,
        min_ceps_over_c,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::{build_symmetric_set, rk_weights};

    fn kernel(delta: f64) -> NonlocalKernelSpec<f64> {
        NonlocalKernelSpec::new(Profile::Constant, 2, delta).unwrap()
    }

    #[test]
    fn lambda_delta_basics() {
        let k = kernel(0.125);
        assert_eq!(lambda_delta(&k, &[0.0, 0.0]), 0.0);
        // symmetry and rotation invariance
        let a = lambda_delta(&k, &[1.3, 0.7]);
        let b = lambda_delta(&k, &[-1.3, -0.7]);
        let n = (1.3f64 * 1.3 + 0.7 * 0.7).sqrt();
        let c = lambda_delta(&k, &[n, 0.0]);
        assert!((a - b).abs() < 1e-12 * a);
        assert!((a - c).abs() < 1e-10 * a);
    }

    #[test]
    fn lambda_delta_matches_closed_form() {
        let k = kernel(0.125);
        for &xin in &[0.5, 2.0, 10.0, 40.0] {
            let quad = lambda_delta(&k, &[xin, 0.0]);
            let fast = lambda_delta_fast(&k, xin);
            assert!(
                (quad - fast).abs() < 1e-7 * fast.max(1.0),
                "xi = {xin}: {quad} vs {fast}"
            );
        }
    }

    #[test]
    fn lambda_delta_small_frequency_limit() {
        let k = kernel(0.125);
        // delta |xi| <= 0.3 -> within 5% of |xi|^2
        for &xin in &[0.1, 0.5, 1.0, 2.0, 2.4] {
            let v = lambda_delta(&k, &[xin * 0.6, xin * 0.8]);
            assert!((v - xin * xin).abs() <= 0.05 * xin * xin, "|xi| = {xin}");
        }
    }

    #[test]
    fn lambda_delta_homogeneity() {
        // lambda_delta(xi) = delta^{-2} lambda_1(delta xi)
        let xi = [3.0, -1.5];
        for &delta in &[0.125, 0.37] {
            let kd = kernel(delta);
            let k1 = kernel(1.0);
            let lhs = lambda_delta(&kd, &xi);
            let rhs = lambda_delta(&k1, &[xi[0] * delta, xi[1] * delta]) / (delta * delta);
            assert!((lhs - rhs).abs() < 1e-10 * lhs.max(1.0), "{lhs} vs {rhs}");
        }
    }

    #[test]
    fn lambda_delta_1d_closed_form() {
        let k = NonlocalKernelSpec::<f64>::new(Profile::Constant, 1, 0.25).unwrap();
        for &xin in &[0.5f64, 3.0, 20.0] {
            let quad = lambda_delta(&k, &[xin]);
            let fast = lambda_delta_fast(&k, xin);
            assert!((quad - fast).abs() < 1e-10 * fast.max(1.0));
        }
    }

    #[test]
    fn polynomial_profile_fast_path_matches_quadrature() {
        let k = NonlocalKernelSpec::<f64>::new(Profile::Polynomial(2), 2, 0.125).unwrap();
        for &xin in &[0.7, 5.0, 30.0] {
            let quad = lambda_delta(&k, &[0.0, xin]);
            let fast = lambda_delta_fast(&k, xin);
            assert!((quad - fast).abs() < 1e-6 * fast.max(1.0), "{quad} vs {fast}");
        }
    }

    fn meshfree(delta: f64) -> (SymmetricPointSet<f64>, MeshfreeWeights<f64>) {
        let set = build_symmetric_set::<f64>(2, delta, delta / 3.0).unwrap();
        let w = rk_weights(&set, &kernel(delta)).unwrap();
        (set, w)
    }

    #[test]
    fn lambda_eps_basics_and_small_frequency() {
        let k = kernel(0.125);
        let (set, w) = meshfree(0.125);
        assert_eq!(lambda_delta_eps(&k, &set, &w, &[0.0, 0.0]), 0.0);
        for &xin in &[0.2, 1.0, 2.4] {
            let v = lambda_delta_eps(&k, &set, &w, &[xin, 0.0]);
            assert!(
                (v / (xin * xin) - 1.0).abs() <= 0.05,
                "|xi| = {xin}: ratio {}",
                v / (xin * xin)
            );
        }
        // nonnegative on a coarse grid
        for xi in xi_grid::<f64>(2, 21) {
            assert!(lambda_delta_eps(&k, &set, &w, &xi) >= 0.0);
        }
    }

    #[test]
    fn sinc4_lattice_identities_match_brute_force() {
        // constant identity: sum_r (sin(xi/2)/(xi+2pi r))^4 = (2 + cos xi)/48
        for &xi in &[0.3f64, 1.1, -2.7, 3.0] {
            let mut brute = 0.0;
            for r in -4000i64..=4000 {
                let xr = xi + 2.0 * std::f64::consts::PI * r as f64;
                brute += ((xi / 2.0).sin() / xr).powi(4);
            }
            let closed = sinc4_lattice_const(xi);
            assert!((brute - closed).abs() < 1e-11, "xi = {xi}: {brute} vs {closed}");
        }
        // oscillatory identity, complex-valued, for non-integer shifts c
        for &(xi, c) in &[(0.7f64, 0.37f64), (-1.9, 1.25), (2.2, -0.666), (0.5, 0.0)] {
            let (mut bre, mut bim) = (0.0, 0.0);
            for r in -4000i64..=4000 {
                let xr = xi + 2.0 * std::f64::consts::PI * r as f64;
                let w = ((xi / 2.0).sin() / xr).powi(4);
                bre += w * (c * xr).cos();
                bim += w * (c * xr).sin();
            }
            let (re, im) = sinc4_lattice_osc(xi, c);
            assert!((bre - re).abs() < 1e-11, "re xi={xi} c={c}: {bre} vs {re}");
            assert!((bim - im).abs() < 1e-11, "im xi={xi} c={c}: {bim} vs {im}");
        }
    }

    /// Raw truncated lattice sum (no tail acceleration), as an oracle.
    fn raw_lattice_sum(
        kind: SymbolKind,
        k: &NonlocalKernelSpec<f64>,
        h: &[f64],
        meshfree: Option<(&SymmetricPointSet<f64>, &MeshfreeWeights<f64>)>,
        xi: &[f64],
        r_max: i64,
    ) -> f64 {
        let d = h.len();
        let power = if kind == SymbolKind::G { 8 } else { 4 };
        let prefactor = 2.0f64.powi(power * d as i32);
        let two_pi = 2.0 * std::f64::consts::PI;
        let mut value = 0.0;
        for r0 in -r_max..=r_max {
            for r1 in -r_max..=r_max {
                let r = [r0, r1];
                let mut weight = 1.0;
                let mut zeta = vec![0.0; d];
                for j in 0..d {
                    let xr = xi[j] + two_pi * r[j] as f64;
                    weight *= h[j] * ((xi[j] / 2.0).sin() / xr).powi(power);
                    zeta[j] = xr / h[j];
                }
                let lam = match kind {
                    SymbolKind::CEps => {
                        let (set, w) = meshfree.unwrap();
                        lambda_delta_eps(k, set, w, &zeta)
                    }
                    _ => lambda_delta_fast(k, norm2(&zeta)),
                };
                value += lam * weight;
            }
        }
        prefactor * value
    }

    #[test]
    fn accelerated_sums_match_raw_oracle() {
        let k = kernel(0.125);
        let h = [0.125, 0.0625];
        let (set, w) = meshfree(0.125);
        for xi in [[1.1, -0.4], [3.0, 3.0], [0.3, 0.1]] {
            let c = lattice_sum(SymbolKind::C, &k, &h, None, &xi, 12);
            let c_raw = raw_lattice_sum(SymbolKind::C, &k, &h, None, &xi, 240);
            assert!(
                (c.value - c_raw).abs() < 5e-8 * c_raw.abs(),
                "C at {xi:?}: {} vs {}",
                c.value,
                c_raw
            );
            let ce = lattice_sum(SymbolKind::CEps, &k, &h, Some((&set, &w)), &xi, 12);
            let ce_raw = raw_lattice_sum(SymbolKind::CEps, &k, &h, Some((&set, &w)), &xi, 120);
            assert!(
                (ce.value - ce_raw).abs() < 5e-6 * ce_raw.abs(),
                "C_eps at {xi:?}: {} vs {}",
                ce.value,
                ce_raw
            );
            assert_eq!(ce.tail_estimate, 0.0);
        }
    }

    #[test]
    fn lattice_sums_nonnegative_and_truncation_stable() {
        let k = kernel(0.125);
        let h = [0.125, 0.0625];
        let xi = [1.1, -0.4];
        let g10 = lattice_sum(SymbolKind::G, &k, &h, None, &xi, 10);
        let g20 = lattice_sum(SymbolKind::G, &k, &h, None, &xi, 20);
        let c10 = lattice_sum(SymbolKind::C, &k, &h, None, &xi, 10);
        let c20 = lattice_sum(SymbolKind::C, &k, &h, None, &xi, 20);
        assert!(g20.value > 0.0 && c20.value > 0.0);
        assert!((g10.value - g20.value).abs() < 1e-8 * g20.value);
        assert!((c10.value - c20.value).abs() < 1e-8 * c20.value);
        assert!(!c20.tail_warning);
        // termwise sinc domination: lambda_G <= lambda_C
        assert!(g20.value <= c20.value * (1.0 + 1e-12));
    }

    #[test]
    fn lattice_sum_1d_collocation_dominates_galerkin() {
        let k = NonlocalKernelSpec::<f64>::new(Profile::Constant, 1, 0.125).unwrap();
        for &x in &[0.3, 1.0, 2.8, -2.0] {
            let g = lattice_sum(SymbolKind::G, &k, &[0.125], None, &[x], 12);
            let c = lattice_sum(SymbolKind::C, &k, &[0.125], None, &[x], 12);
            assert!(c.value >= g.value * (1.0 - 1e-12), "xi = {x}");
        }
    }

    #[test]
    fn scan_minima_positive_on_small_grid() {
        let k = kernel(0.125);
        let (set, w) = meshfree(0.125);
        let grid = xi_grid::<f64>(2, 9);
        assert!(grid.iter().all(|xi| xi.iter().any(|&x| x != 0.0)));
        let scan = scan_comparison(&k, &[0.125, 0.0625], &set, &w, &grid, 10);
        assert!(scan.min_c_over_g > 0.0);
        assert!(scan.min_ceps_over_c > 0.0);
        assert!(scan.lambda_g.iter().all(|&v| v >= 0.0));
        assert!(scan.lambda_c.iter().all(|&v| v >= 0.0));
        assert!(scan.lambda_c_eps.iter().all(|&v| v >= 0.0));
    }
}
