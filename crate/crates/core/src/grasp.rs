//! Grasp pull-off strength from linearized contact wrench LPs.
//!
//! Coordinates are relative to the fruit centre, in mm. The gripper axis is
//! `+z` and points away from the palm, so the palm-side pole of the fruit is
//! at `(0, 0, -R)` and the stem at `(0, 0, R)`. A pull of magnitude `alpha`
//! along `u` applied at point `a` is resisted if contact forces inside their
//! linearized capacity sets balance it:
//!
//! ```text
//! sum f_i + alpha u = 0
//! sum p_i x f_i + alpha (a x u) = 0
//! ```
//!
//! Finger pads are point contacts with an inscribed `m`-sided Coulomb
//! pyramid: `f = sum_k l_k (n + mu t_k)`, `l_k >= 0`, `sum_k l_k <= cap`.
//! Suction cups pull along `-n` up to their tension capacity, push along `n`
//! up to their (usually zero) compression capacity, and carry shear
//! `sum_k s_k t_k` with `sum_k s_k <= kappa * tension`.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use libm::{asin, cos, sin, sqrt};
use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use crate::nelder_mead::{self, NelderMeadOptions};
use crate::simplex::{LinearProgram, LpError, Relation};

/// Witness tolerance for equilibrium and capacity checks, N or N mm / R.
pub const WITNESS_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ActuationMode {
    Suction,
    Fingers,
    Dual,
}

impl ActuationMode {
    pub const ALL: [ActuationMode; 3] = [
        ActuationMode::Suction,
        ActuationMode::Fingers,
        ActuationMode::Dual,
    ];

    pub fn uses_fingers(self) -> bool {
        matches!(self, ActuationMode::Fingers | ActuationMode::Dual)
    }

    pub fn uses_suction(self) -> bool {
        matches!(self, ActuationMode::Suction | ActuationMode::Dual)
    }

    pub fn name(self) -> &'static str {
        match self {
            ActuationMode::Suction => "suction",
            ActuationMode::Fingers => "fingers",
            ActuationMode::Dual => "dual",
        }
    }
}

impl core::str::FromStr for ActuationMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "suction" => Ok(ActuationMode::Suction),
            "fingers" | "finger" => Ok(ActuationMode::Fingers),
            "dual" => Ok(ActuationMode::Dual),
            other => Err(format!("unknown actuation mode `{other}`")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PullType {
    Axial,
    Rotational,
}

impl PullType {
    pub fn name(self) -> &'static str {
        match self {
            PullType::Axial => "axial",
            PullType::Rotational => "rotational",
        }
    }
}

impl core::str::FromStr for PullType {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "axial" => Ok(PullType::Axial),
            "rotational" | "rot" => Ok(PullType::Rotational),
            other => Err(format!("unknown pull type `{other}`")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GraspScenario {
    /// mm
    pub fruit_radius: f64,
    /// Axial displacement of the fruit away from the palm, mm.
    pub fruit_offset: f64,
    /// Gripper-to-fruit angle, degrees.
    pub pull_angle: f64,
    pub pull_type: PullType,
    pub mode: ActuationMode,
}

impl GraspScenario {
    /// 75 mm test apple, no offset, straight axial pull.
    pub fn new(mode: ActuationMode) -> Self {
        Self {
            fruit_radius: 37.5,
            fruit_offset: 0.0,
            pull_angle: 0.0,
            pull_type: PullType::Axial,
            mode,
        }
    }

    pub fn with_offset(mut self, offset: f64) -> Self {
        self.fruit_offset = offset;
        self
    }

    pub fn with_angle(mut self, degrees: f64) -> Self {
        self.pull_angle = degrees;
        self
    }

    pub fn with_pull(mut self, pull_type: PullType) -> Self {
        self.pull_type = pull_type;
        self
    }

    pub fn with_mode(mut self, mode: ActuationMode) -> Self {
        self.mode = mode;
        self
    }

    pub fn validate(&self) -> Result<(), GraspError> {
        if !(self.fruit_radius > 0.0 && self.fruit_radius.is_finite()) {
            return Err(GraspError::InvalidScenario("fruit_radius must be positive"));
        }
        if !(self.fruit_offset >= 0.0 && self.fruit_offset.is_finite()) {
            return Err(GraspError::InvalidScenario("fruit_offset must be >= 0"));
        }
        if !(0.0..=90.0).contains(&self.pull_angle) {
            return Err(GraspError::InvalidScenario(
                "pull_angle must be in [0, 90] deg",
            ));
        }
        if self.fruit_offset > self.fruit_radius {
            return Err(GraspError::OffsetExceedsRadius {
                offset: self.fruit_offset,
                radius: self.fruit_radius,
            });
        }
        Ok(())
    }

    /// Pull direction and application point.
    pub fn load(&self) -> (Vector3<f64>, Vector3<f64>) {
        match self.pull_type {
            PullType::Axial => {
                let w = self.pull_angle.to_radians();
                (Vector3::new(sin(w), 0.0, cos(w)), Vector3::zeros())
            }
            PullType::Rotational => (
                Vector3::new(1.0, 0.0, 0.0),
                Vector3::new(0.0, 0.0, self.fruit_radius),
            ),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GraspModelParams {
    /// Finger pad normal force capacity at the final clamp, N.
    pub pad_force: f64,
    pub mu_pad: f64,
    /// Tension capacity of one suction cup, N.
    pub suction_axial: f64,
    /// Cup shear capacity as a fraction of its tension capacity.
    pub shear_fraction: f64,
}

impl GraspModelParams {
    pub const DEFAULT: GraspModelParams = GraspModelParams {
        pad_force: 18.0,
        mu_pad: 1.0,
        suction_axial: 4.0,
        shear_fraction: 0.5,
    };

    pub fn validate(&self) -> Result<(), GraspError> {
        let ok = |v: f64| v >= 0.0 && v.is_finite();
        if !(ok(self.pad_force) && ok(self.mu_pad) && ok(self.suction_axial)) {
            return Err(GraspError::InvalidModel(
                "capacities and friction must be >= 0",
            ));
        }
        if !(self.shear_fraction > 0.0 && self.shear_fraction <= 1.0) {
            return Err(GraspError::InvalidModel("shear_fraction must be in (0, 1]"));
        }
        Ok(())
    }

    pub fn to_vec(&self) -> [f64; 4] {
        [
            self.pad_force,
            self.mu_pad,
            self.suction_axial,
            self.shear_fraction,
        ]
    }

    pub fn from_slice(v: &[f64]) -> Self {
        Self {
            pad_force: v[0],
            mu_pad: v[1],
            suction_axial: v[2],
            shear_fraction: v[3],
        }
    }

    /// Every capacity scaled by `factor` (friction and shear fraction kept).
    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            pad_force: self.pad_force * factor,
            suction_axial: self.suction_axial * factor,
            ..*self
        }
    }
}

impl Default for GraspModelParams {
    fn default() -> Self {
        Self::DEFAULT
    }
}

/// Placement of the contacts on the fruit, independent of the scenario.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContactLayout {
    /// Polar angle of the cup ring measured from the palm-side pole, deg.
    pub cup_polar_angle: f64,
    /// Sides of each linearized friction pyramid.
    pub cone_sides: usize,
    /// Which of the three cups hold a seal.
    pub cups_engaged: [bool; 3],
    /// Compression the cups can carry, N. Zero models pure tension.
    pub cup_compression: f64,
}

impl Default for ContactLayout {
    fn default() -> Self {
        Self {
            cup_polar_angle: 75.0,
            cone_sides: 8,
            cups_engaged: [true; 3],
            cup_compression: 0.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ContactKind {
    FingerPad,
    SuctionCup,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Contact {
    pub position: Vector3<f64>,
    /// Unit normal pointing into the fruit.
    pub normal: Vector3<f64>,
    pub kind: ContactKind,
    pub normal_capacity: f64,
    pub tension_capacity: f64,
    /// Friction coefficient for pads, shear fraction for cups.
    pub mu: f64,
    pub cone_sides: usize,
}

impl Contact {
    /// Tangent frame `(t1, t2)` with `t1` horizontal where possible, so the
    /// frame rotates with the contact about the gripper axis.
    pub fn tangents(&self) -> (Vector3<f64>, Vector3<f64>) {
        tangent_frame(&self.normal)
    }

    fn generator_directions(&self) -> impl Iterator<Item = Vector3<f64>> + '_ {
        let (t1, t2) = self.tangents();
        let m = self.cone_sides;
        (0..m).map(move |k| {
            let th = 2.0 * PI * k as f64 / m as f64;
            t1 * cos(th) + t2 * sin(th)
        })
    }
}

pub fn tangent_frame(n: &Vector3<f64>) -> (Vector3<f64>, Vector3<f64>) {
    let z = Vector3::z();
    let mut t1 = z.cross(n);
    if t1.norm() < 1e-9 {
        t1 = Vector3::x().cross(n);
    }
    let t1 = t1.normalize();
    let t2 = n.cross(&t1);
    (t1, t2)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContactSet {
    pub fruit_radius: f64,
    pub contacts: Vec<Contact>,
}

impl ContactSet {
    pub fn validate(&self) -> Result<(), GraspError> {
        if self.contacts.is_empty() {
            return Err(GraspError::EmptyContacts);
        }
        for (i, c) in self.contacts.iter().enumerate() {
            let bad = |reason| Err(GraspError::InvalidContact { index: i, reason });
            if (c.position.norm() - self.fruit_radius).abs() > 1e-6 {
                return bad("position is not on the fruit surface");
            }
            if (c.normal.norm() - 1.0).abs() > 1e-9 {
                return bad("normal is not unit length");
            }
            if c.cone_sides < 3 {
                return bad("friction pyramid needs at least 3 sides");
            }
            if !(c.normal_capacity >= 0.0 && c.tension_capacity >= 0.0 && c.mu >= 0.0) {
                return bad("capacities and friction must be >= 0");
            }
            match c.kind {
                ContactKind::FingerPad if c.tension_capacity != 0.0 => {
                    return bad("finger pads cannot pull");
                }
                ContactKind::SuctionCup if !(c.tension_capacity > 0.0) => {
                    return bad("suction cups need a positive tension capacity");
                }
                _ => {}
            }
        }
        Ok(())
    }

    pub fn count(&self, kind: ContactKind) -> usize {
        self.contacts.iter().filter(|c| c.kind == kind).count()
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum GraspError {
    #[error("invalid grasp scenario: {0}")]
    InvalidScenario(&'static str),
    #[error("invalid grasp model: {0}")]
    InvalidModel(&'static str),
    #[error("fruit offset {offset} mm exceeds the fruit radius {radius} mm")]
    OffsetExceedsRadius { offset: f64, radius: f64 },
    #[error("contact set is empty")]
    EmptyContacts,
    #[error("contact {index}: {reason}")]
    InvalidContact { index: usize, reason: &'static str },
    #[error("pull direction must be a nonzero finite vector")]
    InvalidPull,
    #[error("grasp LP numerical failure: {0}")]
    LpNumericalFailure(String),
    #[error("reference dataset is empty")]
    EmptyReference,
    #[error("calibration diverged: mean relative error {mean_relative_error}")]
    CalibrationDiverged { mean_relative_error: f64 },
}

/// Builds the contact set for a scenario with the default layout.
pub fn build_contacts(
    scenario: &GraspScenario,
    model: &GraspModelParams,
) -> Result<ContactSet, GraspError> {
    build_contacts_with(scenario, model, &ContactLayout::default())
}

pub fn build_contacts_with(
    scenario: &GraspScenario,
    model: &GraspModelParams,
    layout: &ContactLayout,
) -> Result<ContactSet, GraspError> {
    scenario.validate()?;
    model.validate()?;
    let r = scenario.fruit_radius;
    let mut contacts = Vec::with_capacity(6);

    if scenario.mode.uses_fingers() {
        let lat = asin(scenario.fruit_offset / r);
        for k in 0..3 {
            let lon = (120.0 * k as f64).to_radians();
            let p = Vector3::new(
                r * cos(lat) * cos(lon),
                r * cos(lat) * sin(lon),
                -r * sin(lat),
            );
            contacts.push(Contact {
                position: p,
                normal: -p / r,
                kind: ContactKind::FingerPad,
                normal_capacity: model.pad_force,
                tension_capacity: 0.0,
                mu: model.mu_pad,
                cone_sides: layout.cone_sides,
            });
        }
    }
    if scenario.mode.uses_suction() {
        let psi = layout.cup_polar_angle.to_radians();
        for k in 0..3 {
            if !layout.cups_engaged[k] {
                continue;
            }
            let lon = (60.0 + 120.0 * k as f64).to_radians();
            let p = Vector3::new(
                r * sin(psi) * cos(lon),
                r * sin(psi) * sin(lon),
                -r * cos(psi),
            );
            contacts.push(Contact {
                position: p,
                normal: -p / r,
                kind: ContactKind::SuctionCup,
                normal_capacity: layout.cup_compression,
                tension_capacity: model.suction_axial,
                mu: model.shear_fraction,
                cone_sides: layout.cone_sides,
            });
        }
    }
    Ok(ContactSet {
        fruit_radius: r,
        contacts,
    })
}

/// LP optimum together with the contact forces that realize it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PullResult {
    /// Largest resistible pull, N.
    pub alpha: f64,
    /// Net force of each contact on the fruit, N.
    pub forces: Vec<Vector3<f64>>,
    /// Largest constraint violation found when re-checking the witness.
    pub max_violation: f64,
    pub iterations: usize,
}

/// One LP column: which contact owns it and the unit force it represents.
#[derive(Debug, Clone, Copy)]
struct Column {
    contact: usize,
    direction: Vector3<f64>,
}

/// Capacity row: sum of the listed columns stays below `cap`.
struct Budget {
    columns: Vec<usize>,
    cap: f64,
}

fn lp_columns(set: &ContactSet) -> (Vec<Column>, Vec<Budget>) {
    let mut columns = Vec::new();
    let mut budgets = Vec::new();
    for (i, c) in set.contacts.iter().enumerate() {
        match c.kind {
            ContactKind::FingerPad => {
                if c.normal_capacity > 0.0 {
                    let start = columns.len();
                    for t in c.generator_directions() {
                        columns.push(Column {
                            contact: i,
                            direction: c.normal + t * c.mu,
                        });
                    }
                    budgets.push(Budget {
                        columns: (start..columns.len()).collect(),
                        cap: c.normal_capacity,
                    });
                }
            }
            ContactKind::SuctionCup => {
                if c.normal_capacity > 0.0 {
                    columns.push(Column {
                        contact: i,
                        direction: c.normal,
                    });
                    budgets.push(Budget {
                        columns: vec![columns.len() - 1],
                        cap: c.normal_capacity,
                    });
                }
                columns.push(Column {
                    contact: i,
                    direction: -c.normal,
                });
                budgets.push(Budget {
                    columns: vec![columns.len() - 1],
                    cap: c.tension_capacity,
                });
                let shear_cap = c.mu * c.tension_capacity;
                if shear_cap > 0.0 {
                    let start = columns.len();
                    for t in c.generator_directions() {
                        columns.push(Column {
                            contact: i,
                            direction: t,
                        });
                    }
                    budgets.push(Budget {
                        columns: (start..columns.len()).collect(),
                        cap: shear_cap,
                    });
                }
            }
        }
    }
    (columns, budgets)
}

/// Largest pull magnitude along `direction`, applied at `point`, that the
/// contacts can balance. Returns 0 when only the zero load is resistible.
pub fn max_resistible_pull(
    set: &ContactSet,
    direction: &Vector3<f64>,
    point: &Vector3<f64>,
) -> Result<PullResult, GraspError> {
    set.validate()?;
    let norm = direction.norm();
    if !(norm > 0.0 && norm.is_finite()) || !point.iter().all(|v| v.is_finite()) {
        return Err(GraspError::InvalidPull);
    }
    let u = direction / norm;
    let r = set.fruit_radius;
    let (columns, budgets) = lp_columns(set);
    let n = 1 + columns.len();

    let mut objective = vec![0.0; n];
    objective[0] = 1.0;
    let mut lp = LinearProgram::new(objective);

    // Moment rows are divided by the radius so both blocks are in newtons.
    let load_moment = point.cross(&u) / r;
    let moments: Vec<Vector3<f64>> = columns
        .iter()
        .map(|c| set.contacts[c.contact].position.cross(&c.direction) / r)
        .collect();
    for axis in 0..3 {
        let mut row = vec![0.0; n];
        row[0] = u[axis];
        for (j, c) in columns.iter().enumerate() {
            row[1 + j] = c.direction[axis];
        }
        lp.push(row, Relation::Eq, 0.0);
    }
    for axis in 0..3 {
        let mut row = vec![0.0; n];
        row[0] = load_moment[axis];
        for (j, m) in moments.iter().enumerate() {
            row[1 + j] = m[axis];
        }
        lp.push(row, Relation::Eq, 0.0);
    }
    for b in &budgets {
        let mut row = vec![0.0; n];
        for &j in &b.columns {
            row[1 + j] = 1.0;
        }
        lp.push(row, Relation::Le, b.cap);
    }

    let solution = lp.solve().map_err(|e| match e {
        // Unbounded means a capacity-free set of columns, which the column
        // builder never produces; treat it like any other solver failure.
        LpError::IterationLimit { .. } | LpError::Unbounded { .. } | LpError::Infeasible { .. } => {
            GraspError::LpNumericalFailure(format!("{e}"))
        }
        other => GraspError::LpNumericalFailure(format!("{other}")),
    })?;

    let alpha = solution.x[0];
    let mut forces = vec![Vector3::zeros(); set.contacts.len()];
    for (j, c) in columns.iter().enumerate() {
        forces[c.contact] += c.direction * solution.x[1 + j];
    }

    let mut result = PullResult {
        alpha,
        forces,
        max_violation: 0.0,
        iterations: solution.iterations,
    };
    let violation = witness_violation(
        set,
        &u,
        point,
        &result,
        Some((&columns, &budgets, &solution.x)),
    );
    result.max_violation = violation;
    if !(violation <= WITNESS_TOL) {
        return Err(GraspError::LpNumericalFailure(format!(
            "witness violates constraints by {violation:e} (alpha = {alpha}, {} pivots)",
            solution.iterations
        )));
    }
    Ok(result)
}

/// Largest violation of equilibrium and per-contact capacity constraints by
/// a pull result. Contact checks use the exact (circular) cones, which
/// contain the linearized ones.
pub fn check_witness(
    set: &ContactSet,
    direction: &Vector3<f64>,
    point: &Vector3<f64>,
    result: &PullResult,
) -> f64 {
    let u = direction / direction.norm();
    witness_violation(set, &u, point, result, None)
}

fn witness_violation(
    set: &ContactSet,
    u: &Vector3<f64>,
    point: &Vector3<f64>,
    result: &PullResult,
    lp_vars: Option<(&[Column], &[Budget], &[f64])>,
) -> f64 {
    let r = set.fruit_radius;
    let mut worst: f64 = 0.0;
    if result.alpha < 0.0 {
        worst = worst.max(-result.alpha);
    }
    if result.forces.len() != set.contacts.len() {
        return f64::INFINITY;
    }

    let mut net_force = u * result.alpha;
    let mut net_moment = point.cross(u) * result.alpha;
    for (c, f) in set.contacts.iter().zip(&result.forces) {
        net_force += f;
        net_moment += c.position.cross(f);
    }
    worst = worst.max(net_force.amax()).max(net_moment.amax() / r);

    for (c, f) in set.contacts.iter().zip(&result.forces) {
        let fn_ = f.dot(&c.normal);
        let ft = sqrt((f.norm_squared() - fn_ * fn_).max(0.0));
        match c.kind {
            ContactKind::FingerPad => {
                worst = worst
                    .max(-fn_)
                    .max(fn_ - c.normal_capacity)
                    .max(ft - c.mu * fn_.max(0.0));
            }
            ContactKind::SuctionCup => {
                worst = worst
                    .max(-fn_ - c.tension_capacity)
                    .max(fn_ - c.normal_capacity)
                    .max(ft - c.mu * c.tension_capacity);
            }
        }
    }

    if let Some((columns, budgets, x)) = lp_vars {
        for v in &x[1..1 + columns.len()] {
            worst = worst.max(-v);
        }
        for b in budgets {
            let used: f64 = b.columns.iter().map(|&j| x[1 + j]).sum();
            worst = worst.max(used - b.cap);
        }
    }
    worst
}

/// Strength of a scenario, with the witness.
pub fn solve_scenario(
    scenario: &GraspScenario,
    model: &GraspModelParams,
    layout: &ContactLayout,
) -> Result<PullResult, GraspError> {
    let set = build_contacts_with(scenario, model, layout)?;
    if set.contacts.is_empty() {
        return Ok(PullResult {
            alpha: 0.0,
            forces: Vec::new(),
            max_violation: 0.0,
            iterations: 0,
        });
    }
    let (u, a) = scenario.load();
    max_resistible_pull(&set, &u, &a)
}

pub fn predict_strength(
    scenario: &GraspScenario,
    model: &GraspModelParams,
) -> Result<f64, GraspError> {
    predict_strength_with(scenario, model, &ContactLayout::default())
}

pub fn predict_strength_with(
    scenario: &GraspScenario,
    model: &GraspModelParams,
    layout: &ContactLayout,
) -> Result<f64, GraspError> {
    solve_scenario(scenario, model, layout).map(|r| r.alpha)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReferenceRow {
    pub scenario: GraspScenario,
    pub strength: f64,
    pub stdev: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RowResidual {
    pub scenario: GraspScenario,
    pub measured: f64,
    pub predicted: f64,
    pub relative_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalibrationReport {
    pub params: GraspModelParams,
    pub rows: Vec<RowResidual>,
    /// Mean of `|relative error|` over the rows.
    pub mean_relative_error: f64,
    /// Objective value: mean squared relative error.
    pub mean_squared_relative_error: f64,
    pub iterations: usize,
    pub evaluations: usize,
    pub converged: bool,
}

/// Objective value assigned outside the valid parameter domain.
const OUT_OF_DOMAIN: f64 = 1e3;

fn calibration_objective(
    reference: &[ReferenceRow],
    layout: &ContactLayout,
    params: &GraspModelParams,
) -> f64 {
    let v = params.to_vec();
    if v.iter().any(|x| !(*x > 0.0)) || params.shear_fraction > 1.0 {
        return OUT_OF_DOMAIN;
    }
    let mut total = 0.0;
    for row in reference {
        match predict_strength_with(&row.scenario, params, layout) {
            Ok(p) => {
                let e = (p - row.strength) / row.strength;
                total += e * e;
            }
            Err(_) => return OUT_OF_DOMAIN,
        }
    }
    total / reference.len() as f64
}

/// Fits the model to measured strengths by Nelder–Mead on the mean squared
/// relative error.
pub fn calibrate(
    reference: &[ReferenceRow],
    initial: &GraspModelParams,
    layout: &ContactLayout,
    options: &NelderMeadOptions,
) -> Result<CalibrationReport, GraspError> {
    if reference.is_empty() {
        return Err(GraspError::EmptyReference);
    }
    for row in reference {
        row.scenario.validate()?;
        if !(row.strength > 0.0 && row.strength.is_finite()) {
            return Err(GraspError::InvalidScenario(
                "reference strengths must be positive",
            ));
        }
    }
    initial.validate()?;

    let min = nelder_mead::minimize(
        |x| calibration_objective(reference, layout, &GraspModelParams::from_slice(x)),
        &initial.to_vec(),
        options,
    );
    let params = GraspModelParams::from_slice(&min.x);
    let mut rows = Vec::with_capacity(reference.len());
    for row in reference {
        let predicted = predict_strength_with(&row.scenario, &params, layout)?;
        rows.push(RowResidual {
            scenario: row.scenario,
            measured: row.strength,
            predicted,
            relative_error: (predicted - row.strength) / row.strength,
        });
    }
    let mean_relative_error =
        rows.iter().map(|r| r.relative_error.abs()).sum::<f64>() / rows.len() as f64;
    let mean_squared_relative_error = rows
        .iter()
        .map(|r| r.relative_error * r.relative_error)
        .sum::<f64>()
        / rows.len() as f64;
    if !(mean_relative_error < 0.5) {
        return Err(GraspError::CalibrationDiverged {
            mean_relative_error,
        });
    }
    Ok(CalibrationReport {
        params,
        rows,
        mean_relative_error,
        mean_squared_relative_error,
        iterations: min.iterations,
        evaluations: min.evaluations,
        converged: min.converged,
    })
}
