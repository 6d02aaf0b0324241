//! Crank-slider statics of the finger linkage in the fruit-clamping region.
//!
//! The lead-screw nut slides along the screw axis and pushes a bar (`l_b`)
//! whose far end drives a crank (`l_k`) about the inner finger pivot. The
//! pivot sits `p_x` off the screw axis and `y = p_y - l_n - x` ahead of the
//! nut face, where `x` is the nut travel. The finger lever (`l_f`) is rigid
//! with the crank, so the pad force follows from a moment balance about the
//! pivot:
//!
//! ```text
//! gamma = acos((l_b^2 + l_k^2 - p_x^2 - y^2) / (2 l_b l_k))   bar/crank angle
//! alpha = atan(p_x / y)                                       pivot sight line
//! theta = asin(l_k sin(gamma) / sqrt(p_x^2 + y^2))            bar vs sight line
//! F_bar = F_nut / cos(alpha + theta)
//! ratio = F_out / F_nut = (l_k / l_f) sin(gamma) / cos(alpha + theta)
//! ```
//!
//! `theta` is taken on the acute branch, which is the physical one whenever
//! the triangle angle at the nut is acute (always true for `l_b >= l_k`).

use alloc::vec::Vec;
use core::f64::consts::FRAC_PI_2;

use libm::{acos, asin, atan, cos, floor, sin, sqrt};
use nalgebra::Vector2;
use serde::{Deserialize, Serialize};

use crate::leadscrew::{ScrewError, ScrewParams};

/// Slack allowed on inverse-trig arguments before a configuration counts as
/// infeasible.
pub const TRIG_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinkageParams {
    /// Lateral offset of the inner pivot from the screw axis, mm.
    pub p_x: f64,
    /// Bar length, mm.
    pub l_b: f64,
    /// Crank length, mm.
    pub l_k: f64,
    /// Finger lever length from pivot to pad, mm.
    pub l_f: f64,
    /// Axial distance from the nut datum to the pivot, mm.
    pub p_y: f64,
    /// Nut length, mm.
    pub l_n: f64,
}

impl LinkageParams {
    /// Linkage of the built prototype.
    pub const PROTOTYPE: LinkageParams = LinkageParams {
        p_x: 12.0,
        l_b: 18.5,
        l_k: 17.5,
        l_f: 48.0,
        p_y: 90.0,
        l_n: 7.0,
    };

    pub fn validate(&self) -> Result<(), LinkageError> {
        for (name, value) in [
            ("p_x", self.p_x),
            ("l_b", self.l_b),
            ("l_k", self.l_k),
            ("l_f", self.l_f),
            ("p_y", self.p_y),
            ("l_n", self.l_n),
        ] {
            if !(value > 0.0 && value.is_finite()) {
                return Err(LinkageError::NonPositiveLength { name, value });
            }
        }
        Ok(())
    }

    /// Axial pivot distance for a given nut travel.
    pub fn y_at(&self, x: f64) -> f64 {
        self.p_y - self.l_n - x
    }
}

impl Default for LinkageParams {
    fn default() -> Self {
        Self::PROTOTYPE
    }
}

/// Nut travel interval over which the linkage is analysed, mm.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TravelRange {
    pub x_min: f64,
    pub x_max: f64,
}

impl TravelRange {
    /// Clamp region of the prototype: fingers touch the fruit from about
    /// 50 mm of travel and the nut is stopped at 59 mm.
    pub const CLAMP_REGION: TravelRange = TravelRange {
        x_min: 50.0,
        x_max: 59.0,
    };

    pub fn new(x_min: f64, x_max: f64) -> Result<Self, LinkageError> {
        if !(x_min.is_finite() && x_max.is_finite() && x_min < x_max) {
            return Err(LinkageError::InvalidRange { x_min, x_max });
        }
        Ok(Self { x_min, x_max })
    }

    /// Checks that both ends of the range solve. The transmission is
    /// monotone in `x` over any range whose ends solve for the linkages this
    /// crate targets, but interior points are re-checked by the sweep.
    pub fn check_realizable(&self, params: &LinkageParams) -> Result<(), LinkageError> {
        solve_geometry(params, self.x_min)?;
        solve_geometry(params, self.x_max)?;
        Ok(())
    }

    pub fn contains(&self, x: f64) -> bool {
        x >= self.x_min && x <= self.x_max
    }
}

impl Default for TravelRange {
    fn default() -> Self {
        Self::CLAMP_REGION
    }
}

/// Derived geometry at one nut position. Angles in radians.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinkageState {
    pub x: f64,
    pub y: f64,
    pub gamma: f64,
    pub alpha: f64,
    pub theta: f64,
    pub ratio: f64,
}

impl LinkageState {
    /// Angle between the bar and the screw axis.
    pub fn bar_angle(&self) -> f64 {
        self.alpha + self.theta
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ForceState {
    pub f_nut: f64,
    pub f_bar: f64,
    pub f_out: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Infeasibility {
    /// Law-of-cosines argument for the bar/crank angle left [-1, 1].
    CrankTriangle { argument: f64 },
    /// Law-of-sines argument for the bar angle left [-1, 1].
    BarAngle { argument: f64 },
    /// The bar is at or past perpendicular to the screw axis.
    Toggle { bar_angle: f64 },
}

impl core::fmt::Display for Infeasibility {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            Infeasibility::CrankTriangle { argument } => {
                write!(f, "crank triangle does not close (cos gamma = {argument})")
            }
            Infeasibility::BarAngle { argument } => {
                write!(f, "bar angle undefined (sin theta = {argument})")
            }
            Infeasibility::Toggle { bar_angle } => write!(
                f,
                "bar reaches toggle (alpha + theta = {} deg)",
                bar_angle.to_degrees()
            ),
        }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum LinkageError {
    #[error("linkage length {name} must be positive and finite, got {value}")]
    NonPositiveLength { name: &'static str, value: f64 },
    #[error("nut travel x = {x} mm puts the pivot at y = {y} mm (must be > 0)")]
    NegativeY { x: f64, y: f64 },
    #[error("linkage geometry infeasible at x = {x} mm: {reason}")]
    GeometryInfeasible { x: f64, reason: Infeasibility },
    #[error("travel range [{x_min}, {x_max}] mm is empty or not finite")]
    InvalidRange { x_min: f64, x_max: f64 },
    #[error("sweep step must be positive, got {0} mm")]
    InvalidStep(f64),
    #[error("nut force must be finite and non-negative, got {0} N")]
    InvalidForce(f64),
    #[error(transparent)]
    Screw(#[from] ScrewError),
}

fn clamp_unit(argument: f64) -> Option<f64> {
    if !argument.is_finite() || argument.abs() > 1.0 + TRIG_SLACK {
        None
    } else {
        Some(argument.clamp(-1.0, 1.0))
    }
}

/// Solves the clamp-region linkage at nut travel `x`.
pub fn solve_geometry(params: &LinkageParams, x: f64) -> Result<LinkageState, LinkageError> {
    params.validate()?;
    let y = params.y_at(x);
    if !(y > 0.0) {
        return Err(LinkageError::NegativeY { x, y });
    }
    let LinkageParams {
        p_x, l_b, l_k, l_f, ..
    } = *params;

    let sight2 = p_x * p_x + y * y;
    let cos_gamma = (l_b * l_b + l_k * l_k - sight2) / (2.0 * l_b * l_k);
    let gamma = acos(
        clamp_unit(cos_gamma).ok_or(LinkageError::GeometryInfeasible {
            x,
            reason: Infeasibility::CrankTriangle {
                argument: cos_gamma,
            },
        })?,
    );

    let alpha = atan(p_x / y);

    let sin_theta = l_k * sin(gamma) / sqrt(sight2);
    let theta = asin(
        clamp_unit(sin_theta).ok_or(LinkageError::GeometryInfeasible {
            x,
            reason: Infeasibility::BarAngle {
                argument: sin_theta,
            },
        })?,
    );

    let bar_angle = alpha + theta;
    let cos_bar = cos(bar_angle);
    if bar_angle >= FRAC_PI_2 || cos_bar <= 0.0 {
        return Err(LinkageError::GeometryInfeasible {
            x,
            reason: Infeasibility::Toggle { bar_angle },
        });
    }

    let ratio = (l_k / l_f) * sin(gamma) / cos_bar;
    Ok(LinkageState {
        x,
        y,
        gamma,
        alpha,
        theta,
        ratio,
    })
}

/// Pad force per unit nut thrust, `F_out / F_nut`.
pub fn transmission_ratio(params: &LinkageParams, x: f64) -> Result<f64, LinkageError> {
    solve_geometry(params, x).map(|s| s.ratio)
}

pub fn force_out(params: &LinkageParams, x: f64, f_nut: f64) -> Result<ForceState, LinkageError> {
    if !(f_nut >= 0.0 && f_nut.is_finite()) {
        return Err(LinkageError::InvalidForce(f_nut));
    }
    let state = solve_geometry(params, x)?;
    Ok(ForceState {
        f_nut,
        f_bar: f_nut / cos(state.bar_angle()),
        f_out: state.ratio * f_nut,
    })
}

/// Joint coordinates of the linkage in the plane of the finger, mm. The nut
/// face is the origin and the screw axis is `+v` (second component).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkagePoints {
    pub nut: Vector2<f64>,
    pub pivot: Vector2<f64>,
    pub crank_tip: Vector2<f64>,
}

/// Places the joints by intersecting the bar circle about the nut with the
/// crank circle about the pivot, keeping the branch that opens away from
/// the screw axis.
pub fn joint_positions(params: &LinkageParams, x: f64) -> Result<LinkagePoints, LinkageError> {
    params.validate()?;
    let y = params.y_at(x);
    if !(y > 0.0) {
        return Err(LinkageError::NegativeY { x, y });
    }
    let nut = Vector2::zeros();
    let pivot = Vector2::new(params.p_x, y);
    let d = pivot.norm();
    let along = (params.l_b * params.l_b - params.l_k * params.l_k + d * d) / (2.0 * d);
    let h2 = params.l_b * params.l_b - along * along;
    let slack = TRIG_SLACK * params.l_b * params.l_b;
    if h2 < -slack {
        return Err(LinkageError::GeometryInfeasible {
            x,
            reason: Infeasibility::CrankTriangle {
                argument: (params.l_b * params.l_b + params.l_k * params.l_k - d * d)
                    / (2.0 * params.l_b * params.l_k),
            },
        });
    }
    let h = sqrt(h2.max(0.0));
    let e = pivot / d;
    // Clockwise normal: rotates the sight line away from the screw axis.
    let outward = Vector2::new(e.y, -e.x);
    Ok(LinkagePoints {
        nut,
        pivot,
        crank_tip: nut + e * along + outward * h,
    })
}

fn cross2(a: &Vector2<f64>, b: &Vector2<f64>) -> f64 {
    a.x * b.y - a.y * b.x
}

/// Recomputes the pad force from joint coordinates with vector statics and
/// compares it with the closed form. Returns
/// `|f_out_vector - f_out_closed_form| / max(f_out_closed_form, 1 N)`.
pub fn moment_balance_check(
    params: &LinkageParams,
    x: f64,
    f_nut: f64,
) -> Result<f64, LinkageError> {
    let closed = force_out(params, x, f_nut)?;
    let joints = joint_positions(params, x)?;

    // Two-force bar: its axial component must carry the nut thrust.
    let bar = joints.crank_tip - joints.nut;
    let bar_dir = bar / bar.norm();
    let axis = Vector2::new(0.0, 1.0);
    let f_bar = bar_dir * (f_nut / bar_dir.dot(&axis));

    let crank = joints.crank_tip - joints.pivot;
    let torque = cross2(&crank, &f_bar);

    // The lever orientation is irrelevant to the magnitude; carry it along
    // the crank so the pad reaction is a genuine vector.
    let lever_dir = crank / crank.norm();
    let lever = lever_dir * params.l_f;
    // Pad reaction R at the lever tip with (lever x R) + torque = 0 and R
    // normal to the lever; the finger pushes the fruit with -R.
    let normal = Vector2::new(-lever_dir.y, lever_dir.x);
    let reaction = normal * (-torque / cross2(&lever, &normal));
    let f_out_vec = -reaction;

    let closed_vec = if f_out_vec.norm() > 0.0 {
        f_out_vec / f_out_vec.norm() * closed.f_out
    } else {
        normal * closed.f_out
    };
    Ok((f_out_vec - closed_vec).norm() / closed.f_out.max(1.0))
}

/// One sample of a transmission sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TransmissionSample {
    pub state: LinkageState,
    pub f_nut: f64,
    pub t_motor: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum SweepRow {
    Feasible(TransmissionSample),
    Infeasible { x: f64, reason: LinkageError },
}

impl SweepRow {
    pub fn x(&self) -> f64 {
        match self {
            SweepRow::Feasible(s) => s.state.x,
            SweepRow::Infeasible { x, .. } => *x,
        }
    }

    pub fn sample(&self) -> Option<&TransmissionSample> {
        match self {
            SweepRow::Feasible(s) => Some(s),
            SweepRow::Infeasible { .. } => None,
        }
    }
}

/// Number of samples `x_min + i * step` that fit in the range.
pub fn sample_count(range: &TravelRange, step: f64) -> usize {
    floor((range.x_max - range.x_min) / step + 1e-9) as usize + 1
}

/// Sweeps the travel range and reports, per sample, the nut thrust and
/// motor torque needed to hold `f_out_target` at the pad.
pub fn sweep_transmission(
    params: &LinkageParams,
    range: &TravelRange,
    step: f64,
    f_out_target: f64,
    screw: &ScrewParams,
) -> Result<Vec<SweepRow>, LinkageError> {
    params.validate()?;
    screw.validate()?;
    if !(step > 0.0 && step.is_finite()) {
        return Err(LinkageError::InvalidStep(step));
    }
    if !(range.x_min.is_finite() && range.x_max.is_finite() && range.x_min <= range.x_max) {
        return Err(LinkageError::InvalidRange {
            x_min: range.x_min,
            x_max: range.x_max,
        });
    }
    if !(f_out_target >= 0.0 && f_out_target.is_finite()) {
        return Err(LinkageError::InvalidForce(f_out_target));
    }

    let n = sample_count(range, step);
    let mut rows = Vec::with_capacity(n);
    for i in 0..n {
        let x = range.x_min + i as f64 * step;
        let row = match solve_geometry(params, x) {
            Ok(state) if state.ratio > 0.0 => {
                let f_nut = f_out_target / state.ratio;
                match screw.torque_for_thrust(f_nut) {
                    Ok(t_motor) => SweepRow::Feasible(TransmissionSample {
                        state,
                        f_nut,
                        t_motor,
                    }),
                    Err(e) => SweepRow::Infeasible {
                        x,
                        reason: e.into(),
                    },
                }
            }
            Ok(state) => SweepRow::Infeasible {
                x,
                reason: LinkageError::GeometryInfeasible {
                    x,
                    reason: Infeasibility::CrankTriangle {
                        argument: cos(state.gamma),
                    },
                },
            },
            Err(reason) => SweepRow::Infeasible { x, reason },
        };
        rows.push(row);
    }
    Ok(rows)
}
