//! Absolutely homogeneous weights `ω(x) = |x|^γ · ω(x/|x|)` and dyadic geometry.

use crate::error::{Error, Result};
use crate::functions::{norm, validation_nodes, AngularFn};
use crate::quadrature::{integrate_sphere, Tolerance};

/// A weight in `W_γ`, stored in factored form so that homogeneity is exact.
#[derive(Clone, Debug)]
pub struct Weight {
    pub gamma: f64,
    pub angular: AngularFn,
    pub dim: usize,
    /// Declared `c > 0` with `ω(x') ≥ c` on the sphere.
    pub angular_lower_bound: Option<f64>,
    sphere_mass: f64,
}

impl Weight {
    /// Builds a weight, checking positivity (and the declared lower bound)
    /// at the validation nodes and computing `ω(S^{n-1})`.
    pub fn new(gamma: f64, angular: AngularFn, dim: usize, angular_lower_bound: Option<f64>) -> Result<Self> {
        crate::check_dim(dim)?;
        if !gamma.is_finite() {
            return Err(Error::Parameter(format!("weight degree must be finite, got {gamma}")));
        }
        if let Some(c) = angular_lower_bound {
            if !(c > 0.0) {
                return Err(Error::Validation(format!("angular lower bound must be positive, got {c}")));
            }
        }
        for y in validation_nodes(dim) {
            let v = angular.eval(&y);
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::Validation(format!("angular part of weight is {v} at {y:?}; it must be positive")));
            }
            if let Some(c) = angular_lower_bound {
                if v < c {
                    return Err(Error::Validation(format!("angular part {v} at {y:?} is below the declared bound {c}")));
                }
            }
        }
        let sphere_mass = angular.integral(dim, Tolerance::rel(1e-14))?;
        if !(sphere_mass > 0.0 && sphere_mass.is_finite()) {
            return Err(Error::Validation(format!("angular mass {sphere_mass} must be positive and finite")));
        }
        Ok(Weight { gamma, angular, dim, angular_lower_bound, sphere_mass })
    }

    /// The power weight `|x|^γ` (angular part ≡ 1, lower bound 1).
    pub fn power(gamma: f64, dim: usize) -> Result<Self> {
        Weight::new(gamma, AngularFn::constant(1.0), dim, Some(1.0))
    }

    pub fn is_power(&self) -> bool {
        self.angular.as_constant() == Some(1.0)
    }

    /// Constant angular part, if any.
    pub fn angular_constant(&self) -> Option<f64> {
        self.angular.as_constant()
    }

    /// `ω(x) = |x|^γ · angular(x/|x|)`.
    pub fn eval(&self, x: &[f64]) -> Result<f64> {
        let r = norm(x);
        if r == 0.0 {
            return Err(Error::Domain("weight is not evaluated at the origin".into()));
        }
        if x.len() != self.dim {
            return Err(Error::Domain(format!("point has dimension {}, weight has {}", x.len(), self.dim)));
        }
        let y: Vec<f64> = x.iter().map(|v| v / r).collect();
        Ok(r.powf(self.gamma) * self.angular.eval(&y))
    }

    /// `ω(S^{n-1}) = ∫_{S^{n-1}} angular dσ`.
    pub fn sphere_mass(&self) -> f64 {
        self.sphere_mass
    }

    /// The declared angular lower bound, or the smallest sampled value.
    pub fn lower_bound(&self) -> f64 {
        self.angular_lower_bound.unwrap_or_else(|| {
            validation_nodes(self.dim).iter().map(|y| self.angular.eval(y)).fold(f64::INFINITY, f64::min)
        })
    }

    fn check_integrable(&self) -> Result<()> {
        if self.gamma > -(self.dim as f64) {
            Ok(())
        } else {
            Err(Error::NonIntegrableWeight { gamma: self.gamma, dim: self.dim })
        }
    }

    /// `ω(B(0,R)) = R^{n+γ} ω(S^{n-1}) / (n+γ)`.
    pub fn ball_mass(&self, radius: f64) -> Result<f64> {
        self.check_integrable()?;
        if !(radius > 0.0) {
            return Err(Error::Domain(format!("ball radius must be positive, got {radius}")));
        }
        let d = self.dim as f64 + self.gamma;
        Ok(radius.powf(d) * self.sphere_mass / d)
    }

    /// `ω(C_k) = ω(B_k) − ω(B_{k-1})`.
    pub fn annulus_mass(&self, k: i32) -> Result<f64> {
        let d = self.dim as f64 + self.gamma;
        let outer = self.ball_mass(2f64.powi(k))?;
        Ok(outer * -(-d * std::f64::consts::LN_2).exp_m1())
    }

    /// `ω(B(0,R/t)) / ω(B(0,R)) = t^{−(γ+n)}`.
    pub fn dilation_mass_ratio(&self, t: f64) -> Result<f64> {
        self.check_integrable()?;
        if !(t > 0.0) {
            return Err(Error::Domain(format!("dilation must be positive, got {t}")));
        }
        Ok(t.powf(-(self.gamma + self.dim as f64)))
    }

    /// `∫_{S^{n-1}} h(y) angular(y) dσ(y)` to relative tolerance.
    pub fn angular_integral(&self, h: &dyn Fn(&[f64]) -> f64, tol: f64) -> Result<f64> {
        if let Some(c) = self.angular.as_constant() {
            return Ok(c * integrate_sphere(self.dim, h, Tolerance::rel(tol))?.value);
        }
        Ok(integrate_sphere(self.dim, &|y| h(y) * self.angular.eval(y), Tolerance::rel(tol))?.value)
    }
}

/// Dyadic balls `B_k = {|x| ≤ 2^k}` and annuli `C_k = B_k \ B_{k-1}` for
/// `k_min ≤ k ≤ k_max`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DyadicGeometry {
    pub dim: usize,
    pub k_min: i32,
    pub k_max: i32,
}

impl DyadicGeometry {
    pub fn new(dim: usize, k_min: i32, k_max: i32) -> Result<Self> {
        crate::check_dim(dim)?;
        if k_min > k_max {
            return Err(Error::Parameter(format!("empty dyadic range [{k_min}, {k_max}]")));
        }
        Ok(DyadicGeometry { dim, k_min, k_max })
    }

    pub fn ball_radius(k: i32) -> f64 {
        2f64.powi(k)
    }

    /// Radii `(2^{k-1}, 2^k)` of `C_k`.
    pub fn annulus(k: i32) -> (f64, f64) {
        (2f64.powi(k - 1), 2f64.powi(k))
    }

    /// Index `k` of the annulus containing a point at radius `r > 0`.
    pub fn annulus_index(r: f64) -> i32 {
        let k = r.log2().ceil() as i32;
        // guard against rounding at exact powers of two
        if 2f64.powi(k - 1) >= r {
            k - 1
        } else if 2f64.powi(k) < r {
            k + 1
        } else {
            k
        }
    }

    pub fn indices(&self) -> std::ops::RangeInclusive<i32> {
        self.k_min..=self.k_max
    }

    /// Radial extent of `∪ C_k` over the range.
    pub fn covered(&self) -> (f64, f64) {
        (2f64.powi(self.k_min - 1), 2f64.powi(self.k_max))
    }
}
