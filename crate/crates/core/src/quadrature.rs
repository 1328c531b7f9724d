//! Integration rules on delta-balls: polar tensor Gauss rules, symmetric
//! quasi-discrete point sets, and meshfree quadrature weights obtained from
//! the reproducing-kernel closed form or the GMLS saddle-point construction.

use crate::gauss::gauss_legendre_on;
use crate::kernels::{eval_window, NonlocalKernelSpec};
use crate::la::{pinv_solve_sym, DenseMat};
use crate::scalar::{norm2, Real};

#[derive(Debug, thiserror::Error)]
pub enum QuadError {
    #[error("point set has {count} points; at least {required} required")]
    TooFewPoints { count: usize, required: usize },
    #[error("point set is not closed under sign flips and coordinate permutations")]
    NotSymmetric,
    #[error("weight denominator vanishes (degenerate point set / profile)")]
    DegenerateDenominator,
    #[error("quadrature weights infeasible: constraint {constraint} violated by {residual:.3e}")]
    Infeasible { constraint: String, residual: f64 },
    #[error("spacing ratio delta/eps = {0} must be >= 1")]
    BadSpacingRatio(f64),
}

/// Quadrature rule on B_delta(0): displacement points and positive weights.
#[derive(Debug, Clone)]
pub struct BallRule<T> {
    pub points: Vec<Vec<T>>,
    pub weights: Vec<T>,
}

impl<T: Real> BallRule<T> {
    /// Apply the rule to a function of the displacement.
    pub fn integrate(&self, f: impl Fn(&[T]) -> T) -> T {
        self.points
            .iter()
            .zip(&self.weights)
            .map(|(s, &w)| w * f(s))
            .sum()
    }
}

/// Polar tensor Gauss rule on the 2D disk B_delta(0): Gauss-Legendre in
/// r on (0, delta) with the Jacobian r folded into the weights, and
/// Gauss-Legendre in theta on (0, 2 pi). Defaults n_r = 25, n_theta = 40.
pub fn gauss_ball<T: Real>(delta: T, n_r: usize, n_theta: usize) -> BallRule<T> {
    assert!(n_r >= 1 && n_theta >= 1);
    let (rs, wr) = gauss_legendre_on(n_r, T::zero(), delta);
    let (ts, wt) = gauss_legendre_on(n_theta, T::zero(), T::of(2.0) * T::PI());
    let mut points = Vec::with_capacity(n_r * n_theta);
    let mut weights = Vec::with_capacity(n_r * n_theta);
    for (&r, &wri) in rs.iter().zip(&wr) {
        for (&t, &wti) in ts.iter().zip(&wt) {
            points.push(vec![r * t.cos(), r * t.sin()]);
            weights.push(wri * wti * r);
        }
    }
    let rule = BallRule { points, weights };
    debug_assert!({
        let vol = rule.integrate(|_| T::one());
        (vol - T::PI() * delta * delta).abs() < T::of(1e-10) * (T::one() + vol.abs())
    });
    rule
}

/// Gauss-Legendre rule on the 1D "ball" (-delta, delta).
pub fn gauss_segment<T: Real>(delta: T, n: usize) -> BallRule<T> {
    let (xs, ws) = gauss_legendre_on(n, -delta, delta);
    BallRule {
        points: xs.iter().map(|&x| vec![x]).collect(),
        weights: ws,
    }
}

/// Ball rule for a given dimension with point budget near `n_r * n_theta`.
pub fn ball_rule<T: Real>(d: usize, delta: T, n_r: usize, n_theta: usize) -> BallRule<T> {
    match d {
        1 => gauss_segment(delta, (n_r * n_theta).max(16).min(200)),
        2 => gauss_ball(delta, n_r, n_theta),
        _ => unimplemented!("d > 2 ball rules are out of scope"),
    }
}

/// Symmetric lattice point set on the closed unit ball: points eps*k with
/// |eps*k| <= delta, normalized by delta.
#[derive(Debug, Clone)]
pub struct SymmetricPointSet<T> {
    /// unit-ball normalized coordinates, lexicographic in the lattice index
    pub points: Vec<Vec<T>>,
    /// lattice multi-indices matching `points`
    pub lattice: Vec<Vec<i64>>,
    /// normalized spacing eps1 = eps / delta
    pub eps1: T,
}

impl<T: Real> SymmetricPointSet<T> {
    pub fn dim(&self) -> usize {
        self.points.first().map_or(0, Vec::len)
    }

    pub fn count(&self) -> usize {
        self.points.len()
    }

    /// Validate symmetry closure and the minimum point count N_d >= 4d.
    pub fn from_lattice(lattice: Vec<Vec<i64>>, eps1: T) -> Result<Self, QuadError> {
        let d = lattice.first().map_or(0, Vec::len);
        let required = 4 * d;
        if lattice.len() < required {
            return Err(QuadError::TooFewPoints {
                count: lattice.len(),
                required,
            });
        }
        let index: std::collections::HashSet<Vec<i64>> = lattice.iter().cloned().collect();
        for k in &lattice {
            // closure under per-axis sign flips
            for mask in 0..(1u32 << d) {
                let flipped: Vec<i64> = k
                    .iter()
                    .enumerate()
                    .map(|(j, &kj)| if mask >> j & 1 == 1 { -kj } else { kj })
                    .collect();
                if !index.contains(&flipped) {
                    return Err(QuadError::NotSymmetric);
                }
            }
            // closure under coordinate swaps (adjacent transpositions generate all)
            for j in 0..d.saturating_sub(1) {
                let mut swapped = k.clone();
                swapped.swap(j, j + 1);
                if !index.contains(&swapped) {
                    return Err(QuadError::NotSymmetric);
                }
            }
        }
        let points = lattice
            .iter()
            .map(|k| k.iter().map(|&kj| T::of_i64(kj) * eps1).collect())
            .collect();
        Ok(Self {
            points,
            lattice,
            eps1,
        })
    }
}

/// Lattice points eps*k inside the closed ball of radius delta, normalized
/// to the unit ball. The origin is included (it receives weight zero).
pub fn build_symmetric_set<T: Real>(
    d: usize,
    delta: T,
    eps: T,
) -> Result<SymmetricPointSet<T>, QuadError> {
    let ratio = delta / eps;
    if !(ratio >= T::one()) {
        return Err(QuadError::BadSpacingRatio(ratio.to_f64().unwrap_or(f64::NAN)));
    }
    let rmax = ratio.to_f64().unwrap();
    // closed ball with a relative fuzz so |k| = delta/eps stays in; shells
    // are >= 1 lattice unit apart, so 1e-9 is far from ambiguous and also
    // absorbs decimal round-off in user-supplied eps values
    let kmax = (rmax * (1.0 + 1e-9)).floor() as i64;
    let r2_cut = rmax * rmax * (1.0 + 1e-9);
    let mut lattice = Vec::new();
    let mut k = vec![-kmax; d];
    'outer: loop {
        let r2: f64 = k.iter().map(|&kj| (kj * kj) as f64).sum();
        if r2 <= r2_cut {
            lattice.push(k.clone());
        }
        for j in (0..d).rev() {
            if k[j] < kmax {
                k[j] += 1;
                for kj in k.iter_mut().skip(j + 1) {
                    *kj = -kmax;
                }
                continue 'outer;
            }
        }
        break;
    }
    SymmetricPointSet::from_lattice(lattice, eps / delta)
}

/// Meshfree quadrature weights omega(s), one per point in set order.
#[derive(Debug, Clone)]
pub struct MeshfreeWeights<T> {
    pub weights: Vec<T>,
    /// moment denominator of the closed-form route (reported for GMLS too,
    /// where it equals the pseudo-inverted Gram's relevant combination)
    pub denom: T,
}

/// Moment m~_alpha = sum_s s^alpha rho(|s|) phi(|s|) over the unit-ball set.
fn set_moment<T: Real>(
    set: &SymmetricPointSet<T>,
    rho: &impl Fn(T) -> T,
    alpha: &[u32],
) -> T {
    set.points
        .iter()
        .map(|s| {
            let r = norm2(s);
            let mono = alpha
                .iter()
                .zip(s)
                .map(|(&aj, &sj)| sj.powi(aj as i32))
                .fold(T::one(), |p, v| p * v);
            mono * rho(r) * eval_window(r)
        })
        .sum()
}

/// Closed-form RK weights: omega(s) = phi(|s|) |s|^2 / denom with
/// denom = m~_4 (d = 1) or (d-1) m~_{220..} + m~_{40..} (d >= 2).
/// `kernel` supplies the normalized profile c*rho.
pub fn rk_weights<T: Real>(
    set: &SymmetricPointSet<T>,
    kernel: &NonlocalKernelSpec<T>,
) -> Result<MeshfreeWeights<T>, QuadError> {
    let d = set.dim();
    let rho = |t: T| kernel.normalized_profile(t);
    let mut a4 = vec![0u32; d];
    a4[0] = 4;
    let m4 = set_moment(set, &rho, &a4);
    let denom = if d == 1 {
        m4
    } else {
        let mut a22 = vec![0u32; d];
        a22[0] = 2;
        a22[1] = 2;
        let m22 = set_moment(set, &rho, &a22);
        T::of_usize(d - 1) * m22 + m4
    };
    if !(denom > T::zero()) {
        return Err(QuadError::DegenerateDenominator);
    }
    let weights = set
        .points
        .iter()
        .map(|s| {
            let r = norm2(s);
            eval_window(r) * r * r / denom
        })
        .collect();
    Ok(MeshfreeWeights { weights, denom })
}

/// Monomial multi-indices of total degree 1 and 2 in d variables, ordered by
/// degree then lexicographically; the constraint rows of the weight system.
pub fn constraint_exponents(d: usize) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    for deg in 1..=2u32 {
        let mut alpha = vec![0u32; d];
        fill(&mut out, &mut alpha, 0, deg);
    }
    return out;

    fn fill(out: &mut Vec<Vec<u32>>, alpha: &mut Vec<u32>, j: usize, left: u32) {
        if j + 1 == alpha.len() {
            alpha[j] = left;
            out.push(alpha.clone());
            alpha[j] = 0;
            return;
        }
        for v in (0..=left).rev() {
            alpha[j] = v;
            fill(out, alpha, j + 1, left - v);
            alpha[j] = 0;
        }
    }
}

/// Right-hand side of the reproduction constraints: 1 for pure squares
/// s_j^2, 0 for every other monomial of degree 1-2.
fn constraint_rhs<T: Real>(exponents: &[Vec<u32>]) -> Vec<T> {
    exponents
        .iter()
        .map(|alpha| {
            let deg: u32 = alpha.iter().sum();
            if deg == 2 && alpha.iter().any(|&a| a == 2) {
                T::one()
            } else {
                T::zero()
            }
        })
        .collect()
}

/// GMLS weights: minimize sum omega_i^2 / W(|s_i|) subject to the
/// reproduction constraints. Rank deficiency is handled by a minimum-norm
/// pseudoinverse of the Gram matrix. The solution formula
/// omega = W H^T lambda never divides by W, so W = 0 at individual points
/// (e.g. radius 1 where phi vanishes) is fine and simply forces omega = 0.
pub fn gmls_weights<T: Real>(
    set: &SymmetricPointSet<T>,
    kernel: &NonlocalKernelSpec<T>,
    w_fn: impl Fn(T) -> T,
) -> Result<MeshfreeWeights<T>, QuadError> {
    let d = set.dim();
    let n = set.count();
    let exps = constraint_exponents(d);
    let m = exps.len();
    let rho = |t: T| kernel.normalized_profile(t);
    // H[alpha][i] = rho(|s_i|) s_i^alpha ; W diagonal
    let mut hmat = DenseMat::<T>::zeros(m, n);
    let mut wdiag = vec![T::zero(); n];
    for (i, s) in set.points.iter().enumerate() {
        let r = norm2(s);
        wdiag[i] = w_fn(r);
        let rv = rho(r);
        for (a, alpha) in exps.iter().enumerate() {
            let mono = alpha
                .iter()
                .zip(s)
                .map(|(&aj, &sj)| sj.powi(aj as i32))
                .fold(T::one(), |p, v| p * v);
            *hmat.at_mut(a, i) = rv * mono;
        }
    }
    // Gram G = H W H^T
    let mut gram = DenseMat::<T>::zeros(m, m);
    for a in 0..m {
        for b in a..m {
            let mut v = T::zero();
            for i in 0..n {
                v += hmat.at(a, i) * wdiag[i] * hmat.at(b, i);
            }
            *gram.at_mut(a, b) = v;
            *gram.at_mut(b, a) = v;
        }
    }
    let rhs = constraint_rhs::<T>(&exps);
    let lambda = pinv_solve_sym(&gram, &rhs);
    let weights: Vec<T> = (0..n)
        .map(|i| {
            let mut v = T::zero();
            for a in 0..m {
                v += hmat.at(a, i) * lambda[a];
            }
            wdiag[i] * v
        })
        .collect();
    // feasibility: residual of each constraint
    for (a, alpha) in exps.iter().enumerate() {
        let mut v = T::zero();
        for i in 0..n {
            v += hmat.at(a, i) * weights[i];
        }
        let res = (v - rhs[a]).abs();
        if res > T::of(1e-8) {
            return Err(QuadError::Infeasible {
                constraint: format!("alpha = {alpha:?}"),
                residual: res.to_f64().unwrap_or(f64::NAN),
            });
        }
    }
    // report the same denominator the closed form would use
    let denom = {
        let mut a4 = vec![0u32; d];
        a4[0] = 4;
        let m4 = set_moment(set, &rho, &a4);
        if d == 1 {
            m4
        } else {
            let mut a22 = vec![0u32; d];
            a22[0] = 2;
            a22[1] = 2;
            T::of_usize(d - 1) * set_moment(set, &rho, &a22) + m4
        }
    };
    Ok(MeshfreeWeights { weights, denom })
}

/// Default GMLS weight W = phi / rho-hat, the choice under which GMLS and
/// the closed form coincide.
pub fn gmls_default_weight<T: Real>(kernel: &NonlocalKernelSpec<T>) -> impl Fn(T) -> T + '_ {
    move |r: T| {
        let rho = kernel.normalized_profile(r);
        if rho == T::zero() {
            T::zero()
        } else {
            eval_window(r) / rho
        }
    }
}

/// Reproduction report: per-constraint residuals of
/// sum omega rho s^alpha = target over degrees 1-3.
#[derive(Debug, Clone)]
pub struct ReproductionReport<T> {
    pub violations: Vec<(Vec<u32>, T)>,
    pub max_violation: T,
}

/// Check the reproduction constraints (odd moments of degree 1 and 3 vanish;
/// each pure square moment equals 1) by direct summation.
pub fn verify_reproduction<T: Real>(
    set: &SymmetricPointSet<T>,
    weights: &MeshfreeWeights<T>,
    kernel: &NonlocalKernelSpec<T>,
) -> ReproductionReport<T> {
    let d = set.dim();
    let rho = |t: T| kernel.normalized_profile(t);
    let mut exps = constraint_exponents(d);
    // degree-3 odd moments
    {
        let mut alpha = vec![0u32; d];
        push_deg(&mut exps, &mut alpha, 0, 3);
    }
    let mut violations = Vec::new();
    let mut max_violation = T::zero();
    for alpha in exps {
        let deg: u32 = alpha.iter().sum();
        let target = if deg == 2 && alpha.iter().any(|&a| a == 2) {
            T::one()
        } else {
            T::zero()
        };
        let mut v = T::zero();
        for (s, &w) in set.points.iter().zip(&weights.weights) {
            let mono = alpha
                .iter()
                .zip(s)
                .map(|(&aj, &sj)| sj.powi(aj as i32))
                .fold(T::one(), |p, m| p * m);
            v += w * rho(norm2(s)) * mono;
        }
        let res = (v - target).abs();
        max_violation = max_violation.max(res);
        violations.push((alpha, res));
    }
    return ReproductionReport {
        violations,
        max_violation,
    };

    fn push_deg(out: &mut Vec<Vec<u32>>, alpha: &mut Vec<u32>, j: usize, left: u32) {
        if j + 1 == alpha.len() {
            alpha[j] = left;
            out.push(alpha.clone());
            alpha[j] = 0;
            return;
        }
        for v in (0..=left).rev() {
            alpha[j] = v;
            push_deg(out, alpha, j + 1, left - v);
            alpha[j] = 0;
        }
    }
}
