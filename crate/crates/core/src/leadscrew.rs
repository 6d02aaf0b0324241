//! Lead-screw power transmission between motor torque and nut thrust.
//!
//! Raising (driving) torque for a multi-start acme thread without collar
//! friction, with `F` in N and lengths in mm:
//!
//! ```text
//! l   = pitch * n_starts
//! d_m = d_outer - pitch / 2
//! T   = (F d_m / 2) (l + pi d_m mu sec(phi)) / (pi d_m - mu l sec(phi)) / 1000   [N m]
//! ```
//!
//! The lowering torque swaps the signs of the lead terms; a negative value
//! means the load alone turns the screw.

use core::f64::consts::PI;

use libm::cos;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScrewParams {
    /// Thread pitch, mm.
    pub pitch: f64,
    pub n_starts: u32,
    /// Acme half-angle, rad.
    pub thread_angle: f64,
    /// Major diameter, mm.
    pub d_outer: f64,
    pub mu: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScrewDerived {
    /// Lead, mm.
    pub lead: f64,
    /// Mean thread diameter, mm.
    pub d_mean: f64,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ScrewError {
    #[error("invalid screw parameter {name}: {value}")]
    InvalidParameter { name: &'static str, value: f64 },
    #[error(
        "screw friction exceeds the thread lead: pi*d_m = {pi_dm} <= mu*l*sec(phi) = {friction}"
    )]
    DenominatorNonpositive { pi_dm: f64, friction: f64 },
    #[error("{name} must be finite and non-negative, got {value}")]
    NegativeLoad { name: &'static str, value: f64 },
}

impl ScrewParams {
    /// Tr8x8 screw of the prototype: 2 mm pitch, 4 starts, 14.5 deg thread.
    pub const TR8X8: ScrewParams = ScrewParams {
        pitch: 2.0,
        n_starts: 4,
        thread_angle: 14.5 * PI / 180.0,
        d_outer: 8.0,
        mu: 0.2,
    };

    pub fn validate(&self) -> Result<(), ScrewError> {
        let bad = |name, value| Err(ScrewError::InvalidParameter { name, value });
        if !(self.pitch > 0.0 && self.pitch.is_finite()) {
            return bad("pitch", self.pitch);
        }
        if self.n_starts == 0 {
            return bad("n_starts", 0.0);
        }
        if !(self.thread_angle >= 0.0 && self.thread_angle < PI / 2.0) {
            return bad("thread_angle", self.thread_angle);
        }
        if !(self.d_outer > self.pitch / 2.0 && self.d_outer.is_finite()) {
            return bad("d_outer", self.d_outer);
        }
        if !(self.mu >= 0.0 && self.mu.is_finite()) {
            return bad("mu", self.mu);
        }
        Ok(())
    }

    pub fn derive(&self) -> Result<ScrewDerived, ScrewError> {
        self.validate()?;
        Ok(ScrewDerived {
            lead: self.pitch * f64::from(self.n_starts),
            d_mean: self.d_outer - self.pitch / 2.0,
        })
    }

    fn sec_phi(&self) -> f64 {
        1.0 / cos(self.thread_angle)
    }

    /// Returns `(pi d_m, mu l sec(phi))` after checking the raising
    /// denominator is positive.
    fn raising_terms(&self) -> Result<(ScrewDerived, f64, f64), ScrewError> {
        let d = self.derive()?;
        let pi_dm = PI * d.d_mean;
        let friction = self.mu * d.lead * self.sec_phi();
        if pi_dm - friction <= 0.0 {
            return Err(ScrewError::DenominatorNonpositive { pi_dm, friction });
        }
        Ok((d, pi_dm, friction))
    }

    /// Torque per newton of thrust, N m / N.
    fn torque_per_newton(&self) -> Result<f64, ScrewError> {
        let (d, pi_dm, friction) = self.raising_terms()?;
        let friction_term = pi_dm * self.mu * self.sec_phi();
        Ok(d.d_mean / 2.0 * (d.lead + friction_term) / (pi_dm - friction) / 1000.0)
    }

    /// Motor torque needed to push the nut with `f_nut`.
    pub fn torque_for_thrust(&self, f_nut: f64) -> Result<f64, ScrewError> {
        check_load("f_nut", f_nut)?;
        Ok(f_nut * self.torque_per_newton()?)
    }

    /// Nut thrust produced by motor torque `t_motor`.
    pub fn thrust_for_torque(&self, t_motor: f64) -> Result<f64, ScrewError> {
        check_load("t_motor", t_motor)?;
        Ok(t_motor / self.torque_per_newton()?)
    }

    /// Torque needed to lower the load. Negative means the screw
    /// back-drives.
    pub fn back_drive_torque(&self, f_nut: f64) -> Result<f64, ScrewError> {
        check_load("f_nut", f_nut)?;
        let d = self.derive()?;
        let pi_dm = PI * d.d_mean;
        let sec = self.sec_phi();
        Ok(f_nut * d.d_mean / 2.0 * (pi_dm * self.mu * sec - d.lead)
            / (pi_dm + self.mu * d.lead * sec)
            / 1000.0)
    }

    /// True when the screw holds its load with the motor unpowered.
    pub fn is_self_locking(&self) -> Result<bool, ScrewError> {
        let d = self.derive()?;
        Ok(self.mu * self.sec_phi() >= d.lead / (PI * d.d_mean))
    }
}

impl Default for ScrewParams {
    fn default() -> Self {
        Self::TR8X8
    }
}

fn check_load(name: &'static str, value: f64) -> Result<(), ScrewError> {
    if value >= 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(ScrewError::NegativeLoad { name, value })
    }
}
