//! Design and analysis models for a tandem-actuated fruit gripper: a palm of
//! three suction cups plus three telescoping, cam-driven fingers that are
//! closed by a stepper motor through a lead screw and a crank-slider linkage.
//!
//! The crate is `no_std` (it needs `alloc`) and holds only pure numerical
//! code. File formats, the command-line front end and multi-threaded
//! campaign execution live in the `tandemgrip` crate.
//!
//! Units follow the gripper drawings: lengths in millimetres, forces in
//! newtons, torques in newton-metres, angles in radians. Degrees appear only
//! in configuration files and reports.
//!
//! Modules:
//! - [`linkage`]: crank-slider statics in the fruit-clamping region.
//! - [`leadscrew`]: motor torque to nut thrust, and back-drive analysis.
//! - [`cam`]: two-region cam tracks and the finger pose they induce.
//! - [`simplex`]: the small dense LP solver used by [`grasp`].
//! - [`grasp`]: pull-off strength from linearized contact wrench LPs.
//! - [`quantile`]: five-number summaries and inverse-CDF sampling.
//! - [`pick`]: pick protocol state machine and Monte-Carlo campaigns.

#![cfg_attr(not(feature = "std"), no_std)]
// `!(x > 0.0)` is used on purpose so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod cam;
pub mod grasp;
pub mod leadscrew;
pub mod linkage;
pub mod nelder_mead;
pub mod pick;
pub mod quantile;
pub mod simplex;

pub use nalgebra;

pub use cam::{CamError, CamTrackSpec, FingerPose, PathReport, Region};
pub use grasp::{ActuationMode, ContactSet, GraspError, GraspModelParams, GraspScenario, PullType};
pub use leadscrew::{ScrewDerived, ScrewError, ScrewParams};
pub use linkage::{ForceState, LinkageError, LinkageParams, LinkageState, TravelRange};
pub use pick::{CampaignResult, PickOutcome, PickState, ProxyModel, TrialStats};
pub use quantile::FiveNumberSummary;
