//! Cubic B-spline window function and nonlocal kernel profiles with
//! second-moment normalization.

use crate::gauss::integrate_adaptive;
use crate::scalar::Real;

/// Cubic B-spline window on [0, 1]:
/// 2/3 - 4x^2 + 4x^3 on [0, 1/2], (4/3)(1-x)^3 on [1/2, 1], 0 elsewhere.
pub fn eval_window<T: Real>(x: T) -> T {
    if x < T::zero() || x >= T::one() {
        return T::zero();
    }
    let four = T::of(4.0);
    if x < T::of(0.5) {
        T::of(2.0 / 3.0) - four * x * x + four * x * x * x
    } else {
        let r = T::one() - x;
        T::of(4.0 / 3.0) * r * r * r
    }
}

/// Derivative of the window, defined one-sidedly at the breakpoints.
pub fn eval_window_deriv<T: Real>(x: T) -> T {
    if x < T::zero() || x >= T::one() {
        return T::zero();
    }
    if x < T::of(0.5) {
        T::of(-8.0) * x + T::of(12.0) * x * x
    } else {
        let r = T::one() - x;
        T::of(-4.0) * r * r
    }
}

/// Radial kernel profile rho(t) on [0, 1].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Profile {
    /// rho(t) = 1.
    Constant,
    /// rho(t) = (1 - t)^p.
    Polynomial(u32),
}

impl Profile {
    pub fn eval<T: Real>(&self, t: T) -> T {
        if t < T::zero() || t > T::one() {
            return T::zero();
        }
        match self {
            Profile::Constant => T::one(),
            Profile::Polynomial(p) => (T::one() - t).powi(*p as i32),
        }
    }

    /// Parse the config name: "constant" or "polynomial:p".
    pub fn parse(name: &str) -> Result<Self, KernelError> {
        if name == "constant" {
            return Ok(Profile::Constant);
        }
        if let Some(p) = name.strip_prefix("polynomial:") {
            let p: u32 = p
                .parse()
                .map_err(|_| KernelError::UnknownProfile(name.to_string()))?;
            return Ok(Profile::Polynomial(p));
        }
        Err(KernelError::UnknownProfile(name.to_string()))
    }
}

#[derive(Debug, thiserror::Error)]
pub enum KernelError {
    #[error("unknown kernel profile {0:?}")]
    UnknownProfile(String),
    #[error("second moment of the profile is not finite or vanishes")]
    DegenerateMoment,
    #[error("normalization quadrature did not converge to 1e-12")]
    QuadratureNotConverged,
}

/// Surface area of the unit sphere S^{d-1} (2 for d=1, 2 pi for d=2).
fn sphere_area<T: Real>(d: usize) -> T {
    match d {
        1 => T::of(2.0),
        2 => T::of(2.0) * T::PI(),
        3 => T::of(4.0) * T::PI(),
        _ => unimplemented!("dimensions above 3 are out of scope"),
    }
}

/// Normalization constant c so that the second moment of c*rho over the
/// unit ball equals 2d.
pub fn normalize_profile<T: Real>(profile: Profile, d: usize) -> Result<T, KernelError> {
    let area = sphere_area::<T>(d);
    let (moment, ok) = integrate_adaptive(
        |t: T| area * profile.eval(t) * t.powi(d as i32 + 1),
        T::zero(),
        T::one(),
        T::of(1e-12),
    );
    if !ok {
        return Err(KernelError::QuadratureNotConverged);
    }
    if !moment.is_finite() || moment <= T::epsilon() {
        return Err(KernelError::DegenerateMoment);
    }
    Ok(T::of_usize(2 * d) / moment)
}

/// Radial kernel with horizon delta and second-moment normalization:
/// rho_delta(|s|) = (c / delta^{d+2}) rho(|s| / delta).
#[derive(Debug, Clone)]
pub struct NonlocalKernelSpec<T> {
    pub profile: Profile,
    pub d: usize,
    pub delta: T,
    pub norm_const: T,
}

impl<T: Real> NonlocalKernelSpec<T> {
    pub fn new(profile: Profile, d: usize, delta: T) -> Result<Self, KernelError> {
        let norm_const = normalize_profile(profile, d)?;
        // sanity re-check of the construction-time moment identity
        let area = sphere_area::<T>(d);
        let (moment, _) = integrate_adaptive(
            |t: T| area * norm_const * profile.eval(t) * t.powi(d as i32 + 1),
            T::zero(),
            T::one(),
            T::of(1e-12),
        );
        let target = T::of_usize(2 * d);
        debug_assert!((moment - target).abs() <= T::of(1e-10) * target);
        Ok(Self {
            profile,
            d,
            delta,
            norm_const,
        })
    }

    /// Normalized profile c*rho at unit-ball radius t.
    pub fn normalized_profile(&self, t: T) -> T {
        self.norm_const * self.profile.eval(t)
    }

    /// Scaled kernel rho_delta at radius r = |s| (zero beyond delta).
    pub fn eval_scaled_radial(&self, r: T) -> T {
        if r > self.delta {
            return T::zero();
        }
        self.norm_const / self.delta.powi(self.d as i32 + 2) * self.profile.eval(r / self.delta)
    }

    /// Scaled kernel at a displacement vector.
    pub fn eval_scaled(&self, s: &[T]) -> T {
        self.eval_scaled_radial(crate::scalar::norm2(s))
    }

    /// Total mass int_{B_delta} rho_delta(|s|) ds = (c / delta^2) int_{B_1} rho;
    /// the large-frequency limit of the Fourier symbol lambda_delta.
    pub fn total_mass(&self) -> T {
        let area = sphere_area::<T>(self.d);
        let (mass, _) = integrate_adaptive(
            |t: T| area * self.profile.eval(t) * t.powi(self.d as i32 - 1),
            T::zero(),
            T::one(),
            T::of(1e-13),
        );
        self.norm_const * mass / (self.delta * self.delta)
    }

    /// Same kernel with a different horizon.
    pub fn with_delta(&self, delta: T) -> Self {
        Self {
            profile: self.profile,
            d: self.d,
            delta,
            norm_const: self.norm_const,
        }
    }
}
