//! Two-mode Gaussian primitives in shot-noise units (vacuum variance = 1).
//!
//! Only the block-symmetric form
//!
//! ```text
//!     [ a·I   c·Z ]
//!     [ c·Z   b·I ]      I = diag(1, 1), Z = diag(1, -1)
//! ```
//!
//! is needed, so everything here is closed form on the three scalars.

use serde::Serialize;

use crate::error::{Error, Result};

/// Slack allowed below the vacuum floor before a value is called unphysical.
pub const PHYSICALITY_SLACK: f64 = 1e-9;

/// Block covariance of a two-mode state with `σ_z` cross-correlation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BipartiteCovariance {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl BipartiteCovariance {
    /// Builds a covariance and checks both the vacuum floor and the symplectic
    /// spectrum.
    pub fn new(a: f64, b: f64, c: f64) -> Result<Self> {
        let cov = Self::new_unchecked(a, b, c);
        cov.validate()?;
        Ok(cov)
    }

    pub const fn new_unchecked(a: f64, b: f64, c: f64) -> Self {
        Self { a, b, c }
    }

    /// The pure two-mode squeezed vacuum `(V, V, √(V²−1))`.
    pub fn epr(v: f64) -> Result<Self> {
        if !(v >= 1.0) {
            return Err(Error::Domain(format!("EPR variance {v} < 1")));
        }
        Ok(Self::new_unchecked(v, v, (v * v - 1.0).sqrt()))
    }

    pub fn validate(&self) -> Result<()> {
        let Self { a, b, c } = *self;
        if !(a.is_finite() && b.is_finite() && c.is_finite()) {
            return Err(Error::Unphysical(format!("non-finite entries ({a}, {b}, {c})")));
        }
        if a < 1.0 - PHYSICALITY_SLACK || b < 1.0 - PHYSICALITY_SLACK {
            return Err(Error::Unphysical(format!("local variance below vacuum: a={a}, b={b}")));
        }
        symplectic_pair(self).map(|_| ())
    }

    /// `a² + b² − 2c²`
    pub fn seralian(&self) -> f64 {
        self.a * self.a + self.b * self.b - 2.0 * self.c * self.c
    }

    /// `ab − c²`, the square root of the determinant.
    pub fn det_sqrt(&self) -> f64 {
        self.a * self.b - self.c * self.c
    }
}

/// Von Neumann entropy (bits) of a thermal state with mean photon number `x`.
pub fn entropy_g(x: f64) -> Result<f64> {
    if x.is_nan() || x < -PHYSICALITY_SLACK {
        return Err(Error::Domain(format!("thermal occupation {x} is negative")));
    }
    if x <= 0.0 {
        return Ok(0.0);
    }
    // (x+1)·log2(x+1) − x·log2(x) = log2(x+1) + x·log2(1 + 1/x)
    let value = x.ln_1p() + x * (1.0 / x).ln_1p();
    Ok(value / std::f64::consts::LN_2)
}

fn clamp_to_vacuum(value: f64, what: &str) -> Result<f64> {
    if value.is_nan() || value < 1.0 - PHYSICALITY_SLACK {
        return Err(Error::Unphysical(format!("{what} = {value} < 1")));
    }
    Ok(value.max(1.0))
}

/// Symplectic eigenvalues `(λ1, λ2)`, `λ1 ≥ λ2 ≥ 1`.
pub fn symplectic_pair(cov: &BipartiteCovariance) -> Result<(f64, f64)> {
    let sum_sq = cov.seralian();
    let product = cov.det_sqrt();
    let mut disc = sum_sq * sum_sq - 4.0 * product * product;
    if disc < 0.0 {
        let scale = (sum_sq * sum_sq).max(1.0);
        if disc < -PHYSICALITY_SLACK * scale {
            return Err(Error::Unphysical(format!(
                "negative discriminant {disc:e} for ({}, {}, {})",
                cov.a, cov.b, cov.c
            )));
        }
        disc = 0.0;
    }
    let root = disc.sqrt();
    let l1_sq = 0.5 * (sum_sq + root);
    // The smaller root loses precision when it is tiny next to A, so take it
    // from the product λ1²·λ2² = B².
    let l2_sq = if l1_sq > 0.0 { product * product / l1_sq } else { 0.5 * (sum_sq - root) };
    let l1 = clamp_to_vacuum(l1_sq.sqrt(), "λ1")?;
    let l2 = clamp_to_vacuum(l2_sq.sqrt(), "λ2")?;
    if product < 0.0 {
        return Err(Error::Unphysical(format!("ab − c² = {product} < 0")));
    }
    Ok((l1, l2))
}

/// Symplectic eigenvalue of mode 1 after heterodyning mode 2.
pub fn conditional_eigenvalue(cov: &BipartiteCovariance) -> Result<f64> {
    let lambda3 = cov.a - cov.c * cov.c / (cov.b + 1.0);
    clamp_to_vacuum(lambda3, "λ3")
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn entropy_fixed_points() {
        assert_eq!(entropy_g(0.0).unwrap(), 0.0);
        assert_relative_eq!(entropy_g(1.0).unwrap(), 2.0, epsilon = 1e-15);
        // 1.5·log2(1.5) + 0.5 = 1.377443751...
        assert_relative_eq!(entropy_g(0.5).unwrap(), 1.377_443_751_081_734, epsilon = 1e-12);
        assert_eq!(entropy_g(-5e-10).unwrap(), 0.0);
        assert!(entropy_g(-1e-6).is_err());
    }

    #[test]
    fn entropy_matches_direct_formula() {
        for &x in &[1e-3, 0.1, 3.0, 42.0, 1e3] {
            let direct = (x + 1.0) * (x + 1.0f64).log2() - x * x.log2();
            assert_relative_eq!(entropy_g(x).unwrap(), direct, max_relative = 1e-12);
        }
    }

    #[test]
    fn decoupled_modes() {
        let (l1, l2) = symplectic_pair(&BipartiteCovariance::new_unchecked(5.0, 3.0, 0.0)).unwrap();
        assert_relative_eq!(l1, 5.0, epsilon = 1e-12);
        assert_relative_eq!(l2, 3.0, epsilon = 1e-12);
        let cov = BipartiteCovariance::new_unchecked(7.0, 4.0, 0.0);
        assert_eq!(conditional_eigenvalue(&cov).unwrap(), 7.0);
    }

    #[test]
    fn pure_epr_has_unit_spectrum() {
        let cov = BipartiteCovariance::epr(15.0).unwrap();
        let (l1, l2) = symplectic_pair(&cov).unwrap();
        assert_relative_eq!(l1, 1.0, epsilon = 1e-9);
        assert_relative_eq!(l2, 1.0, epsilon = 1e-9);
        assert_relative_eq!(conditional_eigenvalue(&cov).unwrap(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn identities_on_reference_point() {
        let cov = BipartiteCovariance::new(15.0, 3.764, 6.550).unwrap();
        let (l1, l2) = symplectic_pair(&cov).unwrap();
        assert!(l1 >= l2);
        assert_relative_eq!(l1 * l1 + l2 * l2, cov.seralian(), max_relative = 1e-9);
        assert_relative_eq!(l1 * l2, cov.det_sqrt(), max_relative = 1e-9);
    }

    #[test]
    fn rejects_unphysical() {
        // c too large: ab − c² < 0
        assert!(BipartiteCovariance::new(2.0, 2.0, 2.5).is_err());
        assert!(BipartiteCovariance::new(0.5, 2.0, 0.0).is_err());
        // Local floors fine but the spectrum dips below one.
        assert!(BipartiteCovariance::new(3.0, 3.0, 2.9).is_err());
    }
}
