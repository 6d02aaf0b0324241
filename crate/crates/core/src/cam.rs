//! Two-region cam tracks and the finger pose they induce.
//!
//! Everything lives in one finger's axial plane: the first coordinate is the
//! radial distance from the gripper axis, the second the axial height above
//! the palm plane (fruit side positive). The finger is a rigid bar carrying
//! an inner and an outer pin a fixed distance apart; the pad tip lies on the
//! same line, `finger_length` from the inner pin.
//!
//! While the inner pin travels its track the finger translates (sweeping:
//! out and around the fruit). Once the inner pin reaches the hard stop the
//! outer track becomes a circle about it and the finger rotates inward onto
//! the fruit (clamping).
//!
//! Tracks are piecewise cubic Bézier curves. A segment may carry weights,
//! which makes it rational; the default clamp segment uses this to represent
//! the circular arc exactly.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use libm::{atan2, cos, floor, sin, sqrt};
use nalgebra::Vector2;
use serde::{Deserialize, Serialize};

pub type Point = Vector2<f64>;

/// Pose solver tolerance on the pin distance, mm.
pub const POSE_TOL: f64 = 1e-10;
/// Samples of the inner track scanned for root brackets.
const SCAN_SAMPLES: usize = 256;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BezierSegment {
    pub points: [Point; 4],
    pub weights: [f64; 4],
}

impl BezierSegment {
    pub fn cubic(points: [Point; 4]) -> Self {
        Self {
            points,
            weights: [1.0; 4],
        }
    }

    /// Exact circular arc about `center` from `start`, sweeping `angle`
    /// radians (positive counter-clockwise, `|angle| < pi`).
    pub fn arc(center: Point, start: Point, angle: f64) -> Self {
        let end = center + rotate(&(start - center), angle);
        let half = angle / 2.0;
        // Tangent intersection of the rational quadratic arc.
        let mid_dir = rotate(&(start - center), half);
        let apex = center + mid_dir / cos(half);
        let w = cos(half);
        // Degree elevation of (start, apex, end; 1, w, 1).
        let w1 = (1.0 + 2.0 * w) / 3.0;
        let p1 = (start + apex * (2.0 * w)) / (1.0 + 2.0 * w);
        let p2 = (apex * (2.0 * w) + end) / (2.0 * w + 1.0);
        Self {
            points: [start, p1, p2, end],
            weights: [1.0, w1, w1, 1.0],
        }
    }

    pub fn is_rational(&self) -> bool {
        self.weights.iter().any(|w| *w != 1.0)
    }

    /// Point and first derivative at `t` in [0, 1].
    pub fn eval(&self, t: f64) -> (Point, Point) {
        let s = 1.0 - t;
        let b = [s * s * s, 3.0 * s * s * t, 3.0 * s * t * t, t * t * t];
        let db = [
            -3.0 * s * s,
            3.0 * s * s - 6.0 * s * t,
            6.0 * s * t - 3.0 * t * t,
            3.0 * t * t,
        ];
        let mut n = Point::zeros();
        let mut dn = Point::zeros();
        let mut w = 0.0;
        let mut dw = 0.0;
        for i in 0..4 {
            let wp = self.points[i] * self.weights[i];
            n += wp * b[i];
            dn += wp * db[i];
            w += self.weights[i] * b[i];
            dw += self.weights[i] * db[i];
        }
        let p = n / w;
        (p, (dn - p * dw) / w)
    }

    pub fn point(&self, t: f64) -> Point {
        self.eval(t).0
    }

    /// Arc length from 0 to `t`.
    pub fn length_to(&self, t: f64) -> f64 {
        gauss_legendre(|x| self.eval(x).1.norm(), 0.0, t)
    }

    pub fn length(&self) -> f64 {
        self.length_to(1.0)
    }

    /// Parameter at which the arc length from 0 equals `s`.
    pub fn param_at_length(&self, s: f64) -> f64 {
        let total = self.length();
        if s <= 0.0 {
            return 0.0;
        }
        if s >= total {
            return 1.0;
        }
        let (mut lo, mut hi) = (0.0, 1.0);
        for _ in 0..64 {
            let mid = 0.5 * (lo + hi);
            if self.length_to(mid) < s {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }
}

/// Piecewise Bézier curve; the global parameter runs over [0, 1] with each
/// segment taking an equal share.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Curve {
    pub segments: Vec<BezierSegment>,
}

impl Curve {
    pub fn new(segments: Vec<BezierSegment>) -> Self {
        Self { segments }
    }

    fn locate(&self, t: f64) -> (usize, f64) {
        let n = self.segments.len();
        let h = t.clamp(0.0, 1.0) * n as f64;
        let i = (floor(h) as usize).min(n - 1);
        (i, h - i as f64)
    }

    pub fn eval(&self, t: f64) -> (Point, Point) {
        let (i, local) = self.locate(t);
        let (p, d) = self.segments[i].eval(local);
        (p, d * self.segments.len() as f64)
    }

    pub fn point(&self, t: f64) -> Point {
        self.eval(t).0
    }

    pub fn length(&self) -> f64 {
        self.segments.iter().map(BezierSegment::length).sum()
    }

    /// Global parameter at arc-length fraction `u`.
    pub fn param_at_fraction(&self, u: f64) -> f64 {
        let lengths: Vec<f64> = self.segments.iter().map(BezierSegment::length).collect();
        let total: f64 = lengths.iter().sum();
        let mut remaining = u.clamp(0.0, 1.0) * total;
        let n = self.segments.len();
        for (i, len) in lengths.iter().enumerate() {
            if remaining <= *len || i == n - 1 {
                let local = self.segments[i].param_at_length(remaining);
                return (i as f64 + local) / n as f64;
            }
            remaining -= len;
        }
        1.0
    }

    pub fn validate(&self) -> Result<(), CamError> {
        if self.segments.is_empty() {
            return Err(CamError::InvalidSpec("curve has no segments"));
        }
        for s in &self.segments {
            if s.weights.iter().any(|w| !(*w > 0.0 && w.is_finite()))
                || s.points
                    .iter()
                    .any(|p| !(p.x.is_finite() && p.y.is_finite()))
            {
                return Err(CamError::InvalidSpec(
                    "control points and weights must be finite, weights positive",
                ));
            }
        }
        Ok(())
    }
}

/// 16-point Gauss–Legendre quadrature on [a, b].
fn gauss_legendre(f: impl Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    const NODES: [(f64, f64); 8] = [
        (0.095_012_509_837_637_44, 0.189_450_610_455_068_5),
        (0.281_603_550_779_258_9, 0.182_603_415_044_923_6),
        (0.458_016_777_657_227_4, 0.169_156_519_395_002_5),
        (0.617_876_244_402_643_7, 0.149_595_988_816_576_7),
        (0.755_404_408_355_003, 0.124_628_971_255_533_9),
        (0.865_631_202_387_831_7, 0.095_158_511_682_492_78),
        (0.944_575_023_073_232_6, 0.062_253_523_938_647_89),
        (0.989_400_934_991_649_9, 0.027_152_459_411_754_09),
    ];
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    let mut sum = 0.0;
    for (x, w) in NODES {
        sum += w * (f(mid + half * x) + f(mid - half * x));
    }
    sum * half
}

fn rotate(v: &Point, angle: f64) -> Point {
    let (s, c) = (sin(angle), cos(angle));
    Point::new(c * v.x - s * v.y, s * v.x + c * v.y)
}

/// Unit finger direction tilted `tilt` radians inward from the gripper axis.
pub fn finger_direction(tilt: f64) -> Point {
    Point::new(-sin(tilt), cos(tilt))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CamTrackSpec {
    pub outer_path: Curve,
    pub inner_path: Curve,
    /// Distance between the inner and outer pins, mm.
    pub pin_separation: f64,
    /// Inner-track parameter of the hard stop.
    pub inner_hard_stop: f64,
    pub fruit_radius: f64,
    pub fruit_center: Point,
    pub palm_plane_z: f64,
    /// Inner pin to pad tip, mm.
    pub finger_length: f64,
    /// Half-width of the finger body used for clearance, mm.
    pub pad_half_width: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Region {
    Sweeping,
    Clamping,
}

impl Region {
    pub fn name(self) -> &'static str {
        match self {
            Region::Sweeping => "sweeping",
            Region::Clamping => "clamping",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FingerPose {
    pub u: f64,
    pub inner_pin: Point,
    pub outer_pin: Point,
    pub pad_tip: Point,
    pub region: Region,
    /// Inward tilt of the finger from the gripper axis, rad.
    pub rotation: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PathReport {
    /// Smallest signed distance from finger body to fruit while sweeping, mm.
    pub min_clearance: f64,
    /// Largest radial reach of the pad tip while sweeping, mm.
    pub max_sweep_radius: f64,
    /// Pad tip angle below the fruit equator at the final pose, rad.
    pub clamp_contact_latitude: f64,
    pub interference: bool,
    /// Number of region changes along the sampled path.
    pub transitions: usize,
    /// Largest deviation of the pin distance from `pin_separation`, mm.
    pub max_pin_error: f64,
    /// Highest pad tip position above the palm plane, mm.
    pub max_tip_height: f64,
    pub samples: usize,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CamError {
    #[error("invalid cam input: {0}")]
    InvalidInput(&'static str),
    #[error("invalid cam track spec: {0}")]
    InvalidSpec(&'static str),
    #[error("cam synthesis failed: {0}")]
    SynthesisFailed(String),
    #[error("no inner-track point lies at the pin separation for u = {u}")]
    PoseUnsolvable { u: f64 },
}

impl CamTrackSpec {
    pub fn validate(&self) -> Result<(), CamError> {
        self.outer_path.validate()?;
        self.inner_path.validate()?;
        if !(self.pin_separation > 0.0 && self.pin_separation.is_finite()) {
            return Err(CamError::InvalidSpec("pin_separation must be positive"));
        }
        if !(0.0..=1.0).contains(&self.inner_hard_stop) {
            return Err(CamError::InvalidSpec("inner_hard_stop must be in [0, 1]"));
        }
        if !(self.fruit_radius > 0.0 && self.fruit_radius.is_finite()) {
            return Err(CamError::InvalidSpec("fruit_radius must be positive"));
        }
        if !(self.finger_length >= self.pin_separation) {
            return Err(CamError::InvalidSpec(
                "finger_length must reach past the outer pin",
            ));
        }
        if !(self.pad_half_width >= 0.0) {
            return Err(CamError::InvalidSpec("pad_half_width must be >= 0"));
        }
        Ok(())
    }

    pub fn hard_stop(&self) -> Point {
        self.inner_path.point(self.inner_hard_stop)
    }

    /// Signed distance from the finger body (a capsule around the segment
    /// inner pin to pad tip) to the fruit surface.
    pub fn body_clearance(&self, pose: &FingerPose) -> f64 {
        segment_distance(&self.fruit_center, &pose.inner_pin, &pose.pad_tip)
            - self.fruit_radius
            - self.pad_half_width
    }

    fn pose_from_pins(&self, u: f64, inner: Point, outer: Point, region: Region) -> FingerPose {
        let axis = (outer - inner) / (outer - inner).norm();
        FingerPose {
            u,
            inner_pin: inner,
            outer_pin: outer,
            pad_tip: inner + axis * self.finger_length,
            region,
            rotation: atan2(-axis.x, axis.y),
        }
    }
}

fn segment_distance(p: &Point, a: &Point, b: &Point) -> f64 {
    let ab = b - a;
    let len2 = ab.norm_squared();
    let t = if len2 > 0.0 {
        ((p - a).dot(&ab) / len2).clamp(0.0, 1.0)
    } else {
        0.0
    };
    (a + ab * t - p).norm()
}

/// Solves the finger pose with the outer pin at arc-length fraction `u` of
/// the outer track.
pub fn solve_finger_pose(spec: &CamTrackSpec, u: f64) -> Result<FingerPose, CamError> {
    if !(0.0..=1.0).contains(&u) {
        return Err(CamError::InvalidInput("u must be in [0, 1]"));
    }
    spec.validate()?;
    let outer_t = spec.outer_path.param_at_fraction(u);
    let outer = spec.outer_path.point(outer_t);
    let d = spec.pin_separation;
    let stop = spec.inner_hard_stop;

    let g = |t: f64| (outer - spec.inner_path.point(t)).norm() - d;

    let g_stop = g(stop);
    if g_stop.abs() <= 1e-9 {
        let inner = spec.hard_stop();
        return Ok(spec.pose_from_pins(u, inner, outer, Region::Clamping));
    }

    // The inner pin trails the outer pin along its own direction of travel.
    let trailing = |t: f64| {
        let (p, dp) = spec.inner_path.eval(t);
        (outer - p).dot(&dp) > 0.0
    };
    // Prefer the root nearest to where the outer pin is along its own track.
    let hint = (outer_t * spec.outer_path.segments.len() as f64).min(1.0) * stop;

    let mut best: Option<(f64, f64)> = None;
    let mut prev_t = 0.0;
    let mut prev_g = g(0.0);
    // A root sitting exactly on the start of the track has no sign change.
    if prev_g.abs() <= 1e-9 && trailing(0.0) {
        best = Some((0.0, hint));
    }
    for i in 1..=SCAN_SAMPLES {
        let t = stop * i as f64 / SCAN_SAMPLES as f64;
        let gt = g(t);
        let bracket = prev_g == 0.0 || prev_g.signum() != gt.signum();
        if bracket {
            let root = bisect(&g, prev_t, t, prev_g);
            if trailing(root) && g(root).abs() <= 1e-9 {
                let score = (root - hint).abs();
                if best.map_or(true, |(_, s)| score < s) {
                    best = Some((root, score));
                }
            }
        }
        prev_t = t;
        prev_g = gt;
    }
    let Some((t, _)) = best else {
        return Err(CamError::PoseUnsolvable { u });
    };
    let inner = spec.inner_path.point(t);
    Ok(spec.pose_from_pins(u, inner, outer, Region::Sweeping))
}

fn bisect(g: &impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, mut g_lo: f64) -> f64 {
    if g_lo == 0.0 {
        return lo;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let gm = g(mid);
        if gm == 0.0 || gm.abs() < POSE_TOL * 1e-2 || (hi - lo) < 1e-16 {
            return mid;
        }
        if gm.signum() == g_lo.signum() {
            lo = mid;
            g_lo = gm;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Poses at `samples` evenly spaced values of `u`.
pub fn sample_poses(spec: &CamTrackSpec, samples: usize) -> Result<Vec<FingerPose>, CamError> {
    if samples < 2 {
        return Err(CamError::InvalidInput("at least two samples are needed"));
    }
    (0..samples)
        .map(|i| solve_finger_pose(spec, i as f64 / (samples - 1) as f64))
        .collect()
}

/// Builds a report from already-solved poses, in order of increasing `u`.
pub fn report_from_poses(spec: &CamTrackSpec, poses: &[FingerPose]) -> PathReport {
    let mut min_clearance = f64::INFINITY;
    let mut max_sweep_radius: f64 = 0.0;
    let mut transitions = 0;
    let mut max_pin_error: f64 = 0.0;
    let mut max_tip_height = f64::NEG_INFINITY;
    for (i, p) in poses.iter().enumerate() {
        max_tip_height = max_tip_height.max(p.pad_tip.y - spec.palm_plane_z);
        max_pin_error =
            max_pin_error.max(((p.outer_pin - p.inner_pin).norm() - spec.pin_separation).abs());
        if i > 0 && poses[i - 1].region != p.region {
            transitions += 1;
        }
        if p.region == Region::Sweeping {
            min_clearance = min_clearance.min(spec.body_clearance(p));
            max_sweep_radius = max_sweep_radius.max(p.pad_tip.x);
        }
    }
    let last = poses.last().expect("at least two poses");
    let rel = last.pad_tip - spec.fruit_center;
    PathReport {
        min_clearance,
        max_sweep_radius,
        clamp_contact_latitude: atan2(-rel.y, rel.x),
        interference: min_clearance < 0.0,
        transitions,
        max_pin_error,
        max_tip_height,
        samples: poses.len(),
    }
}

pub fn validate_path(spec: &CamTrackSpec, samples: usize) -> Result<PathReport, CamError> {
    let poses = sample_poses(spec, samples)?;
    Ok(report_from_poses(spec, &poses))
}

/// Knobs of the default track generator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrackOptions {
    /// Required sweep clearance, mm.
    pub clearance: f64,
    pub finger_length: f64,
    pub pin_separation: f64,
    pub pad_half_width: f64,
    /// Finger tilt at the end of clamping, deg.
    pub final_tilt: f64,
    /// Pad contact angle below the equator, deg.
    pub contact_latitude: f64,
    /// Accepted deviation of the final contact latitude, deg.
    pub latitude_band: f64,
    /// How far behind the palm plane the pad tip starts, mm.
    pub retraction: f64,
    /// Palm envelope: largest radial reach of any pin or the tip, mm.
    pub max_reach: f64,
    /// Palm envelope: largest tip height above the palm plane, mm.
    pub max_height: f64,
}

impl Default for TrackOptions {
    fn default() -> Self {
        Self {
            clearance: 3.0,
            finger_length: 60.0,
            pin_separation: 20.0,
            pad_half_width: 5.0,
            final_tilt: 20.0,
            contact_latitude: 0.0,
            latitude_band: 1.0,
            retraction: 5.0,
            max_reach: 100.0,
            max_height: 110.0,
        }
    }
}

/// Margin added to the requested clearance when choosing the clamp angle,
/// so sampled validation never lands below the request.
const CLEARANCE_MARGIN: f64 = 0.05;

struct Candidate {
    spec: CamTrackSpec,
    sweep_clearance: f64,
}

fn candidate(fruit_radius: f64, opts: &TrackOptions, clamp_angle: f64) -> Option<Candidate> {
    let r = fruit_radius;
    let center = Point::new(0.0, r);
    let lat = opts.contact_latitude.to_radians();
    let final_tilt = opts.final_tilt.to_radians();
    let sweep_tilt = final_tilt - clamp_angle;
    let l = opts.finger_length;
    let d = opts.pin_separation;

    let tip_final = center + Point::new(cos(lat), -sin(lat)) * (r + opts.pad_half_width);
    let stop = tip_final - finger_direction(final_tilt) * l;
    let e_s = finger_direction(sweep_tilt);
    let tip_sweep_end = stop + e_s * l;
    let tip_start = Point::new(0.8 * r, -opts.retraction);
    if !(tip_sweep_end.x > tip_start.x && tip_sweep_end.y > tip_start.y) {
        return None;
    }
    let rise = tip_sweep_end.y - tip_start.y;
    let tip = BezierSegment::cubic([
        tip_start,
        Point::new(tip_sweep_end.x, tip_start.y + rise / 3.0),
        Point::new(tip_sweep_end.x, tip_start.y + 2.0 * rise / 3.0),
        tip_sweep_end,
    ]);
    let shifted = |offset: Point| BezierSegment::cubic(tip.points.map(|p| p - offset));
    let inner = shifted(e_s * l);
    let outer_sweep = shifted(e_s * (l - d));
    // Inward tilt is counter-clockwise in the (r, z) plane.
    let outer_clamp = BezierSegment::arc(stop, stop + e_s * d, clamp_angle);

    let spec = CamTrackSpec {
        outer_path: Curve::new(alloc::vec![outer_sweep, outer_clamp]),
        inner_path: Curve::new(alloc::vec![inner]),
        pin_separation: d,
        inner_hard_stop: 1.0,
        fruit_radius: r,
        fruit_center: center,
        palm_plane_z: 0.0,
        finger_length: l,
        pad_half_width: opts.pad_half_width,
    };
    let sweep_clearance = (0..=400)
        .map(|i| {
            let t = i as f64 / 400.0;
            let tip_p = tip.point(t);
            segment_distance(&center, &(tip_p - e_s * l), &tip_p) - r - opts.pad_half_width
        })
        .fold(f64::INFINITY, f64::min);
    Some(Candidate {
        spec,
        sweep_clearance,
    })
}

fn envelope_violation(spec: &CamTrackSpec, opts: &TrackOptions) -> Option<String> {
    let pts = spec
        .outer_path
        .segments
        .iter()
        .chain(&spec.inner_path.segments)
        .flat_map(|s| s.points);
    for p in pts {
        if p.x.abs() > opts.max_reach {
            return Some(format!(
                "palm envelope: track reaches {:.1} mm from the axis (limit {} mm)",
                p.x.abs(),
                opts.max_reach
            ));
        }
    }
    let reach_tip = spec.fruit_center.x + spec.fruit_radius + spec.pad_half_width;
    if reach_tip > opts.max_reach {
        return Some(format!(
            "palm envelope: pad must reach {reach_tip:.1} mm from the axis (limit {} mm)",
            opts.max_reach
        ));
    }
    None
}

/// Generates tracks for a fruit of the given radius that keep the finger at
/// least `clearance` from the fruit while sweeping and end with the pad on
/// the fruit at the requested latitude.
pub fn build_default_tracks(fruit_radius: f64, clearance: f64) -> Result<CamTrackSpec, CamError> {
    build_tracks(
        fruit_radius,
        &TrackOptions {
            clearance,
            ..Default::default()
        },
    )
}

pub fn build_tracks(fruit_radius: f64, opts: &TrackOptions) -> Result<CamTrackSpec, CamError> {
    if !(fruit_radius > 0.0 && fruit_radius.is_finite()) {
        return Err(CamError::InvalidInput("fruit_radius must be positive"));
    }
    if !(opts.clearance >= 0.0 && opts.clearance.is_finite()) {
        return Err(CamError::InvalidInput("clearance must be >= 0"));
    }
    if !(opts.finger_length > opts.pin_separation && opts.pin_separation > 0.0) {
        return Err(CamError::InvalidInput(
            "need finger_length > pin_separation > 0",
        ));
    }
    let target = opts.clearance + CLEARANCE_MARGIN;
    let final_tilt = opts.final_tilt.to_radians();
    // Keep the sweep tilt shallow enough that the inner pin always advances
    // along the finger direction, which keeps the pose solve well posed.
    let max_clamp = final_tilt + 15f64.to_radians();
    let step = 0.5f64.to_radians();

    let passes = |angle: f64| -> Option<bool> {
        candidate(fruit_radius, opts, angle).map(|c| c.sweep_clearance >= target)
    };

    // Coarse scan for the smallest passing clamp angle, then bisect.
    let mut prev_fail = 0.0;
    let mut first_pass = None;
    let mut a = step;
    while a <= max_clamp + 1e-12 {
        if let Some(spec) = candidate(fruit_radius, opts, a) {
            if let Some(msg) = envelope_violation(&spec.spec, opts) {
                return Err(CamError::SynthesisFailed(msg));
            }
        }
        match passes(a) {
            Some(true) => {
                first_pass = Some(a);
                break;
            }
            _ => prev_fail = a,
        }
        a += step;
    }
    let Some(mut hi) = first_pass else {
        return Err(CamError::SynthesisFailed(format!(
            "sweep clearance: no clamp rotation up to {:.1} deg keeps {} mm clear of the fruit",
            max_clamp.to_degrees(),
            opts.clearance
        )));
    };
    let mut lo = prev_fail;
    for _ in 0..40 {
        let mid = 0.5 * (lo + hi);
        if passes(mid) == Some(true) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let spec = candidate(fruit_radius, opts, hi)
        .expect("passing angle has a candidate")
        .spec;
    if let Some(msg) = envelope_violation(&spec, opts) {
        return Err(CamError::SynthesisFailed(msg));
    }
    let report = validate_path(&spec, 200)
        .map_err(|e| CamError::SynthesisFailed(format!("generated tracks do not solve: {e}")))?;
    if report.max_tip_height > opts.max_height {
        return Err(CamError::SynthesisFailed(format!(
            "palm envelope: pad rises {:.1} mm above the palm (limit {} mm)",
            report.max_tip_height, opts.max_height
        )));
    }
    if report.min_clearance < opts.clearance {
        return Err(CamError::SynthesisFailed(format!(
            "sweep clearance {:.3} mm below the requested {} mm",
            report.min_clearance, opts.clearance
        )));
    }
    if report.transitions != 1 {
        return Err(CamError::SynthesisFailed(format!(
            "expected one sweeping/clamping transition, found {}",
            report.transitions
        )));
    }
    let lat_err = (report.clamp_contact_latitude.to_degrees() - opts.contact_latitude).abs();
    if lat_err > opts.latitude_band {
        return Err(CamError::SynthesisFailed(format!(
            "final contact latitude off by {lat_err:.2} deg"
        )));
    }
    Ok(spec)
}

/// Brute-force counterpart of the pose solve: the inner-track grid point
/// that trails `outer` and is closest to being `pin_separation` from it.
pub fn dense_inner_search(spec: &CamTrackSpec, outer: &Point, samples: usize) -> (f64, f64) {
    let mut best = (0.0, f64::INFINITY);
    for i in 0..=samples {
        let t = spec.inner_hard_stop * i as f64 / samples as f64;
        let (p, dp) = spec.inner_path.eval(t);
        if (outer - p).dot(&dp) <= 0.0 {
            continue;
        }
        let err = ((outer - p).norm() - spec.pin_separation).abs();
        if err < best.1 {
            best = (t, err);
        }
    }
    best
}

/// Finger tilt change over the clamping region, rad.
pub fn clamp_rotation(spec: &CamTrackSpec) -> Result<f64, CamError> {
    let start = solve_finger_pose(spec, 0.0)?;
    let end = solve_finger_pose(spec, 1.0)?;
    Ok(end.rotation - start.rotation)
}

/// Euclidean distance helper for 2D points.
pub fn distance(a: &Point, b: &Point) -> f64 {
    sqrt((a - b).norm_squared())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn default_spec() -> CamTrackSpec {
        build_default_tracks(37.5, 3.0).unwrap()
    }

    #[test]
    fn rational_arc_is_circular() {
        let c = Point::new(1.0, 2.0);
        let seg = BezierSegment::arc(c, Point::new(4.0, 2.0), 1.2);
        for i in 0..=50 {
            let p = seg.point(i as f64 / 50.0);
            assert_relative_eq!((p - c).norm(), 3.0, epsilon = 1e-13);
        }
        assert_relative_eq!(seg.length(), 3.6, epsilon = 1e-12);
    }

    #[test]
    fn cubic_length_of_straight_line() {
        let seg = BezierSegment::cubic([
            Point::new(0.0, 0.0),
            Point::new(1.0, 0.0),
            Point::new(2.0, 0.0),
            Point::new(3.0, 0.0),
        ]);
        assert_relative_eq!(seg.length(), 3.0, epsilon = 1e-13);
        assert_relative_eq!(seg.param_at_length(1.5), 0.5, epsilon = 1e-12);
    }

    #[test]
    fn start_is_retracted_and_sweeping() {
        let spec = default_spec();
        let p = solve_finger_pose(&spec, 0.0).unwrap();
        assert_eq!(p.region, Region::Sweeping);
        assert!(p.pad_tip.y < spec.palm_plane_z);
    }

    #[test]
    fn end_is_clamping_on_the_equator() {
        let spec = default_spec();
        let p = solve_finger_pose(&spec, 1.0).unwrap();
        assert_eq!(p.region, Region::Clamping);
        let rel = p.pad_tip - spec.fruit_center;
        assert!(atan2(-rel.y, rel.x).to_degrees().abs() < 1.0);
        assert_relative_eq!(rel.norm(), 37.5 + 5.0, epsilon = 1e-6);
    }

    #[test]
    fn pose_matches_dense_search() {
        let spec = default_spec();
        for &u in &[0.1, 0.35, 0.6, 0.8] {
            let p = solve_finger_pose(&spec, u).unwrap();
            if p.region == Region::Sweeping {
                let (t, err) = dense_inner_search(&spec, &p.outer_pin, 20_000);
                assert!(err < 1e-2);
                assert!((spec.inner_path.point(t) - p.inner_pin).norm() < 0.05);
            }
        }
    }

    #[test]
    fn default_tracks_validate() {
        let spec = default_spec();
        let r = validate_path(&spec, 500).unwrap();
        assert!(!r.interference);
        assert!(r.min_clearance >= 3.0);
        assert_eq!(r.transitions, 1);
        assert!(r.max_pin_error < 1e-9);
    }

    #[test]
    fn zero_clearance_is_valid() {
        let spec = build_default_tracks(37.5, 0.0).unwrap();
        assert!(validate_path(&spec, 200).unwrap().min_clearance >= 0.0);
    }

    #[test]
    fn huge_fruit_fails() {
        assert!(matches!(
            build_default_tracks(500.0, 50.0),
            Err(CamError::SynthesisFailed(_))
        ));
    }

    #[test]
    fn moved_fruit_interferes() {
        let mut spec = default_spec();
        spec.fruit_center.x += 10.0;
        assert!(validate_path(&spec, 500).unwrap().interference);
    }

    #[test]
    fn two_samples_use_endpoints() {
        let spec = default_spec();
        let r = validate_path(&spec, 2).unwrap();
        assert_eq!(r.samples, 2);
        let start = solve_finger_pose(&spec, 0.0).unwrap();
        assert_eq!(r.min_clearance, spec.body_clearance(&start));
        assert!(validate_path(&spec, 1).is_err());
    }

    #[test]
    fn oversized_pin_separation_is_unsolvable() {
        let mut spec = default_spec();
        spec.pin_separation = 200.0;
        spec.finger_length = 240.0;
        assert!(matches!(
            solve_finger_pose(&spec, 1.0),
            Err(CamError::PoseUnsolvable { .. })
        ));
    }

    #[test]
    fn clamping_rotates_inward() {
        let spec = default_spec();
        let poses = sample_poses(&spec, 300).unwrap();
        let clamp: Vec<_> = poses
            .iter()
            .filter(|p| p.region == Region::Clamping)
            .collect();
        assert!(clamp.len() > 5);
        for w in clamp.windows(2) {
            assert_eq!(w[0].inner_pin, w[1].inner_pin);
            assert!(w[1].rotation > w[0].rotation);
        }
        assert!(clamp_rotation(&spec).unwrap() > 0.0);
    }

    #[test]
    fn tip_radius_is_unimodal() {
        let spec = default_spec();
        let r: Vec<f64> = sample_poses(&spec, 500)
            .unwrap()
            .iter()
            .map(|p| p.pad_tip.x)
            .collect();
        let peak = r
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .unwrap()
            .0;
        assert!(r[..=peak].windows(2).all(|w| w[1] >= w[0] - 1e-9));
        assert!(r[peak..].windows(2).all(|w| w[1] <= w[0] + 1e-9));
    }
}
