//! Pick protocol state machine and Monte-Carlo pick campaigns.
//!
//! A pick runs approach, suction engagement, finger deployment and a
//! quasi-static pull-back. The pull succeeds when the grasp strength of the
//! contacts actually in place is at least the fruit detachment force; every
//! failure is an outcome, never an error.
//!
//! Campaign trials draw their inputs from five-number summaries through a
//! piecewise-linear inverse CDF. Trial `i` uses a ChaCha8 stream `i` keyed
//! by the campaign seed, so trials can run in any order or in parallel.

use alloc::vec::Vec;
use core::f64::consts::PI;

use libm::cos;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::cam::{self, FingerPose, Point, Region};
use crate::grasp::{
    predict_strength_with, ActuationMode, ContactLayout, GraspModelParams, GraspScenario, PullType,
};
use crate::quantile::FiveNumberSummary;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProxyModel {
    /// N
    pub detachment_force: f64,
    /// N/m
    pub branch_stiffness: f64,
    /// mm
    pub fruit_diameter: f64,
    /// g
    pub fruit_mass: f64,
}

impl ProxyModel {
    /// Lab proxy tuned to median field values.
    pub const LAB: ProxyModel = ProxyModel {
        detachment_force: 16.0,
        branch_stiffness: 455.0,
        fruit_diameter: 75.0,
        fruit_mass: 220.0,
    };

    pub fn is_valid(&self) -> bool {
        [
            self.detachment_force,
            self.branch_stiffness,
            self.fruit_diameter,
            self.fruit_mass,
        ]
        .iter()
        .all(|v| *v > 0.0 && v.is_finite())
    }

    /// Branch deflection at which the stem lets go, mm.
    pub fn detachment_travel(&self) -> f64 {
        self.detachment_force / self.branch_stiffness * 1000.0
    }
}

impl Default for ProxyModel {
    fn default() -> Self {
        Self::LAB
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Phase {
    Approach,
    SuctionEngage,
    FingerDeploy,
    Pull,
    Done,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PickOutcome {
    Picked,
    GraspSlip,
    NoEngage,
    Pending,
}

impl PickOutcome {
    pub fn name(self) -> &'static str {
        match self {
            PickOutcome::Picked => "picked",
            PickOutcome::GraspSlip => "grasp_slip",
            PickOutcome::NoEngage => "no_engage",
            PickOutcome::Pending => "pending",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PickState {
    pub phase: Phase,
    pub cups_engaged: u8,
    /// Approach travel, mm.
    pub travel: f64,
    /// Pull-back travel until detachment or slip, mm.
    pub pull_travel: f64,
    /// Grasp strength of the contacts in place, N.
    pub strength: f64,
    pub fingers_deployed: bool,
    pub outcome: PickOutcome,
    /// Phases visited, in order.
    pub history: Vec<Phase>,
}

impl PickState {
    fn new() -> Self {
        Self {
            phase: Phase::Approach,
            cups_engaged: 0,
            travel: 0.0,
            pull_travel: 0.0,
            strength: 0.0,
            fingers_deployed: false,
            outcome: PickOutcome::Pending,
            history: alloc::vec![Phase::Approach],
        }
    }

    fn advance(&mut self, next: Phase) {
        debug_assert!(next > self.phase, "pick phases only move forward");
        self.phase = next;
        self.history.push(next);
    }

    fn finish(&mut self, outcome: PickOutcome) {
        self.advance(Phase::Done);
        self.outcome = outcome;
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PickOptions {
    /// Cups that must seal before the fingers deploy.
    pub engage_rule: u8,
    /// Largest positional error at which a cup still seals, mm.
    pub cup_tolerance: f64,
    /// Distance covered by the approach, mm.
    pub approach_distance: f64,
    /// Lateral misplacement of the gripper relative to the fruit, mm.
    pub lateral_offset: f64,
    /// Direction of the misplacement about the gripper axis, rad.
    pub offset_direction: f64,
    /// Foliage blocked the cups.
    pub occluded: bool,
    /// The finger tracks clear the fruit, so the fingers may deploy.
    pub fingers_clear: bool,
    pub layout: ContactLayout,
}

impl Default for PickOptions {
    fn default() -> Self {
        Self {
            engage_rule: 2,
            cup_tolerance: 15.0,
            approach_distance: 50.0,
            lateral_offset: 0.0,
            offset_direction: 0.0,
            occluded: false,
            fingers_clear: true,
            layout: ContactLayout::default(),
        }
    }
}

/// Longitude of suction cup `k`, rad. Matches the grasp contact layout.
pub fn cup_longitude(k: usize) -> f64 {
    (60.0 + 120.0 * k as f64) * PI / 180.0
}

/// Which cups seal for a lateral misplacement. A cup on the side the
/// gripper is displaced away from must stretch by the projected offset.
pub fn engaged_cups(lateral_offset: f64, direction: f64, tolerance: f64) -> [bool; 3] {
    core::array::from_fn(|k| {
        let stretch = (-lateral_offset * cos(cup_longitude(k) - direction)).max(0.0);
        stretch <= tolerance
    })
}

/// Runs one pick with default options apart from the engagement rule.
pub fn run_pick(
    proxy: &ProxyModel,
    scenario: &GraspScenario,
    model: &GraspModelParams,
    engage_rule: u8,
) -> PickState {
    run_pick_with(
        proxy,
        scenario,
        model,
        &PickOptions {
            engage_rule,
            ..Default::default()
        },
    )
}

pub fn run_pick_with(
    proxy: &ProxyModel,
    scenario: &GraspScenario,
    model: &GraspModelParams,
    options: &PickOptions,
) -> PickState {
    let mut state = PickState::new();
    let rule = options.engage_rule.clamp(1, 3);

    // Approach: the gripper closes the standoff until the palm meets the fruit.
    state.travel = options.approach_distance;
    state.advance(Phase::SuctionEngage);

    let uses_suction = scenario.mode.uses_suction();
    let mut cups = [false; 3];
    if uses_suction && !options.occluded {
        cups = engaged_cups(
            options.lateral_offset,
            options.offset_direction,
            options.cup_tolerance,
        );
    }
    state.cups_engaged = cups.iter().filter(|c| **c).count() as u8;
    if uses_suction && state.cups_engaged < rule {
        state.finish(PickOutcome::NoEngage);
        return state;
    }

    state.advance(Phase::FingerDeploy);
    state.fingers_deployed = scenario.mode.uses_fingers() && options.fingers_clear;
    let effective_mode = match (uses_suction, state.fingers_deployed) {
        (true, true) => Some(ActuationMode::Dual),
        (true, false) => Some(ActuationMode::Suction),
        (false, true) => Some(ActuationMode::Fingers),
        (false, false) => None,
    };

    state.advance(Phase::Pull);
    let layout = ContactLayout {
        cups_engaged: cups,
        ..options.layout
    };
    state.strength = effective_mode
        .and_then(|mode| predict_strength_with(&scenario.with_mode(mode), model, &layout).ok())
        .unwrap_or(0.0);

    let stiffness = proxy.branch_stiffness;
    if state.strength >= proxy.detachment_force {
        state.pull_travel = proxy.detachment_travel();
        state.finish(PickOutcome::Picked);
    } else {
        state.pull_travel = state.strength / stiffness * 1000.0;
        state.finish(PickOutcome::GraspSlip);
    }
    state
}

/// Five-number summaries of the field-trial variables.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrialStats {
    /// mm
    pub fruit_diameter: FiveNumberSummary,
    /// mm
    pub fruit_height: FiveNumberSummary,
    /// g
    pub fruit_weight: FiveNumberSummary,
    /// N
    pub net_fdf: FiveNumberSummary,
    /// N
    pub tangential_fdf: FiveNumberSummary,
    /// N
    pub normal_fdf: FiveNumberSummary,
    /// N/m
    pub branch_stiffness: FiveNumberSummary,
    /// mm
    pub offset: FiveNumberSummary,
}

const fn summary(v: [f64; 5]) -> FiveNumberSummary {
    FiveNumberSummary {
        min: v[0],
        q1: v[1],
        median: v[2],
        q3: v[3],
        max: v[4],
    }
}

impl TrialStats {
    /// Orchard field-trial summary.
    pub const FIELD: TrialStats = TrialStats {
        fruit_diameter: summary([70.0, 76.0, 78.0, 81.0, 86.0]),
        fruit_height: summary([61.0, 70.0, 73.0, 75.0, 79.0]),
        fruit_weight: summary([181.0, 222.0, 235.0, 248.0, 284.0]),
        net_fdf: summary([7.0, 11.0, 15.0, 28.0, 38.0]),
        tangential_fdf: summary([1.0, 3.0, 7.0, 19.0, 31.0]),
        normal_fdf: summary([-2.0, 7.0, 12.0, 19.0, 33.0]),
        branch_stiffness: summary([71.0, 234.0, 410.0, 780.0, 1324.0]),
        offset: summary([1.0, 5.0, 10.0, 16.0, 30.0]),
    };

    pub const COLUMNS: [&'static str; 8] = [
        "fruit_diameter_mm",
        "fruit_height_mm",
        "fruit_weight_g",
        "net_fdf_N",
        "tangential_fdf_N",
        "normal_fdf_N",
        "branch_stiffness_Npm",
        "offset_mm",
    ];

    pub fn columns(&self) -> [(&'static str, &FiveNumberSummary); 8] {
        [
            (Self::COLUMNS[0], &self.fruit_diameter),
            (Self::COLUMNS[1], &self.fruit_height),
            (Self::COLUMNS[2], &self.fruit_weight),
            (Self::COLUMNS[3], &self.net_fdf),
            (Self::COLUMNS[4], &self.tangential_fdf),
            (Self::COLUMNS[5], &self.normal_fdf),
            (Self::COLUMNS[6], &self.branch_stiffness),
            (Self::COLUMNS[7], &self.offset),
        ]
    }

    pub fn validate(&self) -> Result<(), crate::quantile::QuantileError> {
        for (_, s) in self.columns() {
            s.validate()?;
        }
        Ok(())
    }
}

impl Default for TrialStats {
    fn default() -> Self {
        Self::FIELD
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CampaignOptions {
    pub engage_rule: u8,
    pub cup_tolerance: f64,
    pub approach_distance: f64,
    /// Per-trial chance that foliage blocks the cups.
    pub occlusion_probability: f64,
    /// Extra attempts after a failure; each re-draws the offset only.
    pub retries: u32,
    /// Check the finger sweep against each trial's fruit.
    pub check_cam: bool,
    /// Clearance used when building tracks for the median fruit, mm.
    pub cam_clearance: f64,
    /// Samples of the finger path used by the clearance check.
    pub cam_samples: usize,
    pub layout: ContactLayout,
}

impl Default for CampaignOptions {
    fn default() -> Self {
        Self {
            engage_rule: 2,
            cup_tolerance: 15.0,
            approach_distance: 50.0,
            occlusion_probability: 0.04,
            retries: 0,
            check_cam: true,
            cam_clearance: 3.0,
            cam_samples: 200,
            layout: ContactLayout::default(),
        }
    }
}

/// Finger sweep sampled once, for clearance checks against other fruit.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepEnvelope {
    poses: Vec<FingerPose>,
    pad_half_width: f64,
}

impl SweepEnvelope {
    pub fn from_spec(spec: &cam::CamTrackSpec, samples: usize) -> Result<Self, cam::CamError> {
        let poses = cam::sample_poses(spec, samples)?
            .into_iter()
            .filter(|p| p.region == Region::Sweeping)
            .collect();
        Ok(Self {
            poses,
            pad_half_width: spec.pad_half_width,
        })
    }

    /// Smallest sweep clearance to a fruit of `radius` resting on the palm.
    pub fn clearance(&self, radius: f64) -> f64 {
        let center = Point::new(0.0, radius);
        self.poses
            .iter()
            .map(|p| {
                let ab = p.pad_tip - p.inner_pin;
                let t = ((center - p.inner_pin).dot(&ab) / ab.norm_squared()).clamp(0.0, 1.0);
                (p.inner_pin + ab * t - center).norm() - radius - self.pad_half_width
            })
            .fold(f64::INFINITY, f64::min)
    }

    pub fn clears(&self, radius: f64) -> bool {
        self.clearance(radius) >= 0.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub trial: u64,
    pub fdf: f64,
    pub offset: f64,
    pub stiffness: f64,
    pub diameter: f64,
    pub mode: ActuationMode,
    pub strength: f64,
    pub outcome: PickOutcome,
    pub attempts: u32,
    pub fingers_deployed: bool,
}

/// Everything a trial needs besides its index; shareable across threads.
#[derive(Debug, Clone)]
pub struct Campaign {
    pub stats: TrialStats,
    pub model: GraspModelParams,
    pub mode: ActuationMode,
    pub seed: u64,
    pub options: CampaignOptions,
    envelope: Option<SweepEnvelope>,
}

impl Campaign {
    pub fn new(
        stats: TrialStats,
        model: GraspModelParams,
        mode: ActuationMode,
        seed: u64,
        options: CampaignOptions,
    ) -> Self {
        let envelope = if options.check_cam && mode.uses_fingers() {
            let radius = stats.fruit_diameter.median / 2.0;
            cam::build_default_tracks(radius, options.cam_clearance)
                .and_then(|spec| SweepEnvelope::from_spec(&spec, options.cam_samples.max(2)))
                .ok()
        } else {
            None
        };
        Self {
            stats,
            model,
            mode,
            seed,
            options,
            envelope,
        }
    }

    fn rng(&self, trial: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(trial);
        rng
    }

    pub fn simulate_trial(&self, trial: u64) -> TrialRecord {
        let mut rng = self.rng(trial);
        let mut draw = |s: &FiveNumberSummary| s.inverse_cdf(rng.random::<f64>());
        let fdf = draw(&self.stats.net_fdf);
        let mut offset = draw(&self.stats.offset);
        let diameter = draw(&self.stats.fruit_diameter);
        let stiffness = draw(&self.stats.branch_stiffness);
        let mut direction = rng.random::<f64>() * 2.0 * PI;
        let occluded = rng.random::<f64>() < self.options.occlusion_probability;

        let proxy = ProxyModel {
            detachment_force: fdf,
            branch_stiffness: stiffness,
            fruit_diameter: diameter,
            fruit_mass: self.stats.fruit_weight.median,
        };
        let scenario = GraspScenario {
            fruit_radius: diameter / 2.0,
            fruit_offset: 0.0,
            pull_angle: 0.0,
            pull_type: PullType::Axial,
            mode: self.mode,
        };
        let fingers_clear = match &self.envelope {
            Some(env) => env.clears(diameter / 2.0),
            None => !self.options.check_cam || !self.mode.uses_fingers(),
        };

        let mut attempts = 0;
        loop {
            attempts += 1;
            let state = run_pick_with(
                &proxy,
                &scenario,
                &self.model,
                &PickOptions {
                    engage_rule: self.options.engage_rule,
                    cup_tolerance: self.options.cup_tolerance,
                    approach_distance: self.options.approach_distance,
                    lateral_offset: offset,
                    offset_direction: direction,
                    occluded,
                    fingers_clear,
                    layout: self.options.layout,
                },
            );
            let done = state.outcome == PickOutcome::Picked || attempts > self.options.retries;
            if done {
                return TrialRecord {
                    trial,
                    fdf,
                    offset,
                    stiffness,
                    diameter,
                    mode: self.mode,
                    strength: state.strength,
                    outcome: state.outcome,
                    attempts,
                    fingers_deployed: state.fingers_deployed,
                };
            }
            offset = self.stats.offset.inverse_cdf(rng.random::<f64>());
            direction = rng.random::<f64>() * 2.0 * PI;
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CampaignResult {
    pub trials: usize,
    pub picked: usize,
    pub grasp_slip: usize,
    pub no_engage: usize,
    pub success_rate: f64,
    pub records: Vec<TrialRecord>,
}

impl CampaignResult {
    /// Folds records in the order given.
    pub fn from_records(records: Vec<TrialRecord>) -> Self {
        let mut picked = 0;
        let mut grasp_slip = 0;
        let mut no_engage = 0;
        for r in &records {
            match r.outcome {
                PickOutcome::Picked => picked += 1,
                PickOutcome::GraspSlip => grasp_slip += 1,
                PickOutcome::NoEngage | PickOutcome::Pending => no_engage += 1,
            }
        }
        let trials = records.len();
        Self {
            trials,
            picked,
            grasp_slip,
            no_engage,
            success_rate: if trials == 0 {
                0.0
            } else {
                picked as f64 / trials as f64
            },
            records,
        }
    }

    pub fn rate(&self, outcome: PickOutcome) -> f64 {
        let n = match outcome {
            PickOutcome::Picked => self.picked,
            PickOutcome::GraspSlip => self.grasp_slip,
            PickOutcome::NoEngage => self.no_engage,
            PickOutcome::Pending => 0,
        };
        if self.trials == 0 {
            0.0
        } else {
            n as f64 / self.trials as f64
        }
    }
}

/// Sequential campaign. `trials` of zero is treated as one.
pub fn run_campaign(
    stats: &TrialStats,
    model: &GraspModelParams,
    mode: ActuationMode,
    trials: usize,
    seed: u64,
) -> CampaignResult {
    run_campaign_with(
        stats,
        model,
        mode,
        trials,
        seed,
        &CampaignOptions::default(),
    )
}

pub fn run_campaign_with(
    stats: &TrialStats,
    model: &GraspModelParams,
    mode: ActuationMode,
    trials: usize,
    seed: u64,
    options: &CampaignOptions,
) -> CampaignResult {
    let campaign = Campaign::new(*stats, *model, mode, seed, *options);
    let records = (0..trials.max(1) as u64)
        .map(|i| campaign.simulate_trial(i))
        .collect();
    CampaignResult::from_records(records)
}
