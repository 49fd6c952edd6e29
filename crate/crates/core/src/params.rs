use alloc::format;

#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};

/// Converts dBm to watts.
pub fn dbm_to_watts(dbm: f64) -> f64 {
    10f64.powf((dbm - 30.0) / 10.0)
}

/// Converts a dB ratio to linear scale.
pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// Radius of the Frobenius trust region around the SCA expansion point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TrustRadius {
    /// `xi = c * (L + 1)`.
    PerElement(f64),
    Fixed(f64),
}

/// Interior-point solver settings shared by both convex kernels.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverSettings {
    pub feasibility_tol: f64,
    pub gap_tol: f64,
    pub max_newton: usize,
}

impl Default for SolverSettings {
    fn default() -> Self {
        Self {
            feasibility_tol: 1e-7,
            gap_tol: 1e-6,
            max_newton: 200,
        }
    }
}

/// Physical and algorithmic constants of one simulation.
///
/// All powers and variances are linear watts, path loss `l0` is linear.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemParams {
    /// IRS element count.
    pub irs_elements: usize,
    /// Number of user pairs.
    pub pairs: usize,
    pub l0: f64,
    pub alpha_irs: f64,
    pub alpha_direct: f64,
    pub beta_irs: f64,
    pub beta_direct: f64,
    pub sigma2: f64,
    pub sigma_l2: f64,
    pub p_min: f64,
    pub p_max: f64,
    /// Power-loop fractional-increase tolerance.
    pub eps1: f64,
    /// Phase-loop fractional-increase tolerance.
    pub eps2: f64,
    /// Outer-loop fractional-increase tolerance.
    pub eps3: f64,
    pub trust_radius: TrustRadius,
    pub randomization_samples: usize,
    pub fp_max_iter: usize,
    pub sca_max_iter: usize,
    pub outer_max_iter: usize,
    pub solver: SolverSettings,
}

impl SystemParams {
    /// Values used in the reference simulation setup, for `l` IRS elements
    /// and `pairs` user pairs.
    pub fn reference(irs_elements: usize, pairs: usize) -> Self {
        Self {
            irs_elements,
            pairs,
            l0: db_to_linear(-30.0),
            alpha_irs: 2.0,
            alpha_direct: 3.0,
            beta_irs: 8.0,
            beta_direct: 0.0,
            sigma2: dbm_to_watts(-105.0),
            sigma_l2: dbm_to_watts(-100.0),
            p_min: dbm_to_watts(0.0),
            p_max: dbm_to_watts(15.0),
            eps1: 1e-2,
            eps2: 1e-2,
            eps3: 1e-2,
            trust_radius: TrustRadius::PerElement(0.25),
            randomization_samples: 100,
            fp_max_iter: 25,
            sca_max_iter: 8,
            outer_max_iter: 4,
            solver: SolverSettings::default(),
        }
    }

    /// Number of legitimate users, `2N`.
    pub fn users(&self) -> usize {
        2 * self.pairs
    }

    /// Trust-region radius `xi` for the current element count.
    pub fn xi(&self) -> f64 {
        match self.trust_radius {
            TrustRadius::PerElement(c) => c * (self.irs_elements as f64 + 1.0),
            TrustRadius::Fixed(x) => x,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |what: &str| Err(Error::InvalidParams(what.into()));
        if self.pairs < 1 {
            return bad("pairs must be at least 1");
        }
        let positive = [
            ("l0", self.l0),
            ("sigma2", self.sigma2),
            ("sigma_l2", self.sigma_l2),
            ("p_min", self.p_min),
            ("p_max", self.p_max),
            ("eps1", self.eps1),
            ("eps2", self.eps2),
            ("eps3", self.eps3),
            ("xi", self.xi()),
        ];
        for (name, v) in positive {
            if !(v > 0.0) {
                return bad(&format!("{name} must be positive, got {v}"));
            }
        }
        for (name, v) in [
            ("alpha_irs", self.alpha_irs),
            ("alpha_direct", self.alpha_direct),
        ] {
            if !(v >= 0.0) || !v.is_finite() {
                return bad(&format!("{name} must be finite and nonnegative, got {v}"));
            }
        }
        // an infinite K-factor is pure line of sight
        for (name, v) in [
            ("beta_irs", self.beta_irs),
            ("beta_direct", self.beta_direct),
        ] {
            if !(v >= 0.0) {
                return bad(&format!("{name} must be nonnegative, got {v}"));
            }
        }
        if self.p_min > self.p_max {
            return bad("p_min exceeds p_max");
        }
        Ok(())
    }
}
