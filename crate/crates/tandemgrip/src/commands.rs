//! Command implementations. Each returns its artifacts in memory; the binary
//! decides whether they go to stdout or to files.

use std::path::Path;

use serde::Serialize;
use serde_json::json;
use tandemgrip_core::cam;
use tandemgrip_core::grasp::{
    self, ActuationMode, ContactKind, GraspScenario, PullType, WITNESS_TOL,
};
use tandemgrip_core::linkage::{self, SweepRow, TravelRange};
use tandemgrip_core::nelder_mead::NelderMeadOptions;
use tandemgrip_core::pick::{Campaign, CampaignOptions, TrialStats};

use crate::svg::{self, Panel, Series};
use crate::tables::{self, BruiseSample};
use crate::{parallel, Error, GripperConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
    Svg,
    Text,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
            Format::Svg => "svg",
            Format::Text => "txt",
        }
    }
}

#[derive(Debug)]
pub struct Output {
    /// File stem used when writing to a directory.
    pub stem: &'static str,
    /// Artifacts in order of preference; the first one goes to stdout by
    /// default.
    pub artifacts: Vec<(Format, String)>,
    /// Warnings for stderr.
    pub notes: Vec<String>,
    /// Set when the command produced output but still has to fail.
    pub failure: Option<Error>,
}

impl Output {
    fn new(stem: &'static str) -> Self {
        Self {
            stem,
            artifacts: Vec::new(),
            notes: Vec::new(),
            failure: None,
        }
    }

    fn with(mut self, format: Format, contents: String) -> Self {
        self.artifacts.push((format, contents));
        self
    }

    pub fn get(&self, format: Format) -> Option<&str> {
        self.artifacts
            .iter()
            .find(|(f, _)| *f == format)
            .map(|(_, s)| s.as_str())
    }

    pub fn primary(&self) -> &str {
        &self.artifacts[0].1
    }
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("plain data serializes");
    s.push('\n');
    s
}

/// Travel samples `start:end:step`, or a single position.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct XRange {
    pub start: f64,
    pub end: f64,
    pub step: f64,
}

impl std::str::FromStr for XRange {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<&str> = s.split(':').collect();
        let num = |t: &str| {
            t.trim()
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| format!("`{t}` is not a number"))
        };
        let r = match parts.as_slice() {
            [x] => {
                let x = num(x)?;
                XRange {
                    start: x,
                    end: x,
                    step: 1.0,
                }
            }
            [a, b] => XRange {
                start: num(a)?,
                end: num(b)?,
                step: 0.1,
            },
            [a, b, c] => XRange {
                start: num(a)?,
                end: num(b)?,
                step: num(c)?,
            },
            _ => return Err("expected START:END[:STEP] or a single X".to_string()),
        };
        if r.start > r.end {
            return Err(format!("empty range: {} > {}", r.start, r.end));
        }
        if !(r.step > 0.0) {
            return Err(format!("step must be positive, got {}", r.step));
        }
        Ok(r)
    }
}

pub fn transmission(
    cfg: &GripperConfig,
    range: Option<XRange>,
    f_out: f64,
) -> Result<Output, Error> {
    let r = range.unwrap_or(XRange {
        start: cfg.travel.x_min,
        end: cfg.travel.x_max,
        step: 0.1,
    });
    let travel = TravelRange {
        x_min: r.start,
        x_max: r.end,
    };
    let rows = linkage::sweep_transmission(&cfg.linkage, &travel, r.step, f_out, &cfg.screw)?;
    let mut out = Output::new("transmission").with(Format::Csv, tables::sweep_csv(&rows));

    let feasible: Vec<_> = rows.iter().filter_map(SweepRow::sample).collect();
    let series = |name: &str, f: &dyn Fn(&linkage::TransmissionSample) -> f64| {
        Series::new(name, feasible.iter().map(|s| (s.state.x, f(s))).collect())
    };
    let panels = vec![
        Panel {
            y_label: "ratio".into(),
            series: vec![series("ratio", &|s| s.state.ratio)],
        },
        Panel {
            y_label: "alpha+theta [deg]".into(),
            series: vec![series("alpha+theta", &|s| {
                (s.state.alpha + s.state.theta).to_degrees()
            })],
        },
        Panel {
            y_label: "torque [N m]".into(),
            series: vec![series("torque", &|s| s.t_motor)],
        },
    ];
    out = out.with(
        Format::Svg,
        svg::stacked_chart(
            &format!("Transmission, F_out = {f_out} N"),
            "nut travel x [mm]",
            &panels,
        ),
    );
    let max_torque = feasible
        .iter()
        .max_by(|a, b| a.t_motor.total_cmp(&b.t_motor))
        .map(|s| json!({ "x_mm": s.state.x, "t_motor_Nm": s.t_motor }));
    let peak_nut = feasible.iter().map(|s| s.f_nut).fold(0.0, f64::max);
    let derived = cfg.screw.derive()?;
    let screw = json!({
        "lead_mm": derived.lead,
        "d_mean_mm": derived.d_mean,
        "self_locking": cfg.screw.is_self_locking()?,
        // Negative: the clamp load turns the screw back once the motor lets go.
        "back_drive_torque_Nm": cfg.screw.back_drive_torque(peak_nut)?,
        "at_f_nut_N": peak_nut,
    });
    out = out.with(
        Format::Json,
        to_json(&json!({
            "f_out_N": f_out,
            "samples": rows.len(),
            "infeasible": rows.len() - feasible.len(),
            "max_torque": max_torque,
            "screw": screw,
        })),
    );
    if let Some(SweepRow::Infeasible { reason, .. }) = rows.iter().find(|r| r.sample().is_none()) {
        out.failure = Some(Error::Linkage(reason.clone()));
    }
    Ok(out)
}

/// How the nut force of the bruise curve is chosen.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NutForce {
    /// Pad force `f_out` N at travel `x` mm.
    Anchor { f_out: f64, x: f64 },
    /// Nut force in N.
    Explicit(f64),
}

impl std::str::FromStr for NutForce {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let num = |t: &str| {
            t.trim()
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite() && *v >= 0.0)
                .ok_or_else(|| format!("`{t}` is not a non-negative number"))
        };
        match s.split_once('@') {
            Some((f, x)) => Ok(NutForce::Anchor {
                f_out: num(f)?,
                x: num(x)?,
            }),
            None => Ok(NutForce::Explicit(num(s)?)),
        }
    }
}

pub fn bruise(cfg: &GripperConfig, nut: NutForce, step: f64) -> Result<Output, Error> {
    let f_nut = match nut {
        NutForce::Explicit(f) => f,
        NutForce::Anchor { f_out, x } => {
            if !cfg.travel.contains(x) {
                return Err(Error::Usage(format!(
                    "anchor x = {x} mm lies outside the travel range [{}, {}] mm",
                    cfg.travel.x_min, cfg.travel.x_max
                )));
            }
            f_out / linkage::transmission_ratio(&cfg.linkage, x)?
        }
    };
    if !(step > 0.0 && step.is_finite()) {
        return Err(Error::Usage(format!("step must be positive, got {step}")));
    }
    let n = linkage::sample_count(&cfg.travel, step);
    let mut rows = Vec::with_capacity(n);
    for i in 0..n {
        let x = cfg.travel.x_min + i as f64 * step;
        let ratio = linkage::transmission_ratio(&cfg.linkage, x)?;
        let f_out = ratio * f_nut;
        rows.push(BruiseSample {
            x,
            ratio,
            f_nut,
            f_out,
            exceeds_threshold: f_out > cfg.bruise_threshold,
        });
    }
    let exceeding: Vec<f64> = rows
        .iter()
        .filter(|r| r.exceeds_threshold)
        .map(|r| r.x)
        .collect();
    let max = rows
        .iter()
        .map(|r| r.f_out)
        .fold(f64::NEG_INFINITY, f64::max);

    let mut out = Output::new("bruise").with(Format::Csv, tables::bruise_csv(&rows));
    let threshold = cfg.bruise_threshold;
    let panel = Panel {
        y_label: "F_out [N]".into(),
        series: vec![
            Series::new("F_out", rows.iter().map(|r| (r.x, r.f_out)).collect()),
            Series::new(
                "bruise threshold",
                vec![(cfg.travel.x_min, threshold), (cfg.travel.x_max, threshold)],
            ),
        ],
    };
    out = out.with(
        Format::Svg,
        svg::stacked_chart(
            &format!("Pad force, F_nut = {f_nut:.3} N"),
            "nut travel x [mm]",
            &[panel],
        ),
    );
    out = out.with(
        Format::Json,
        to_json(&json!({
            "f_nut_N": f_nut,
            "max_f_out_N": max,
            "bruise_threshold_N": threshold,
            "exceeds_threshold": !exceeding.is_empty(),
            "exceeding_x_mm": exceeding,
        })),
    );
    if let (Some(first), Some(last)) = (exceeding.first(), exceeding.last()) {
        out.notes.push(format!(
            "pad force exceeds the {threshold} N bruise threshold for x in [{first}, {last}] mm (max {max:.2} N)"
        ));
    }
    Ok(out)
}

pub fn campath(
    cfg: &GripperConfig,
    fruit_diameter: Option<f64>,
    clearance: Option<f64>,
    samples: usize,
    threads: Option<usize>,
) -> Result<Output, Error> {
    let diameter = fruit_diameter.unwrap_or(cfg.fruit_diameter);
    if !(diameter > 0.0 && diameter.is_finite()) {
        return Err(Error::Usage(format!(
            "fruit diameter must be positive, got {diameter}"
        )));
    }
    let spec = cfg.cam_spec(diameter / 2.0, clearance.unwrap_or(cfg.cam_clearance))?;
    let poses = parallel::sample_poses(&spec, samples, threads)?;
    let report = cam::report_from_poses(&spec, &poses);
    let rotation = cam::clamp_rotation(&spec)?;

    let mut out = Output::new("campath").with(Format::Csv, tables::pose_csv(&poses));
    out = out.with(
        Format::Json,
        to_json(&json!({
            "fruit_diameter_mm": diameter,
            "report": report,
            "clamp_contact_latitude_deg": report.clamp_contact_latitude.to_degrees(),
            "clamp_rotation_deg": rotation.to_degrees(),
            "spec": spec,
        })),
    );
    let trace = |name: &str, c: &cam::Curve| {
        Series::new(
            name,
            (0..=200)
                .map(|i| c.point(i as f64 / 200.0))
                .map(|p| (p.x, p.y))
                .collect(),
        )
    };
    let mut curves = vec![
        trace("outer", &spec.outer_path),
        trace("inner", &spec.inner_path),
    ];
    curves.push(Series::new(
        "tip",
        poses.iter().map(|p| (p.pad_tip.x, p.pad_tip.y)).collect(),
    ));
    for p in [poses.first(), poses.last()].into_iter().flatten() {
        curves.push(Series::new(
            "finger",
            vec![(p.inner_pin.x, p.inner_pin.y), (p.pad_tip.x, p.pad_tip.y)],
        ));
    }
    let c = spec.fruit_center;
    out = out.with(
        Format::Svg,
        svg::drawing(
            &format!("Cam tracks, {diameter} mm fruit"),
            &curves,
            &[(c.x, c.y, spec.fruit_radius)],
        ),
    );
    if report.interference {
        out.failure = Some(Error::Domain(format!(
            "finger sweep interferes with the fruit (min clearance {:.3} mm)",
            report.min_clearance
        )));
    } else if report.transitions != 1 {
        out.failure = Some(Error::Domain(format!(
            "expected one sweeping/clamping transition, found {}",
            report.transitions
        )));
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GraspArgs {
    pub mode: ActuationMode,
    pub offset: f64,
    pub angle: f64,
    pub pull: PullType,
    pub fruit_diameter: Option<f64>,
}

pub fn grasp(cfg: &GripperConfig, args: &GraspArgs) -> Result<Output, Error> {
    let scenario = GraspScenario {
        fruit_radius: args.fruit_diameter.unwrap_or(cfg.fruit_diameter) / 2.0,
        fruit_offset: args.offset,
        pull_angle: args.angle,
        pull_type: args.pull,
        mode: args.mode,
    };
    let set = grasp::build_contacts_with(&scenario, &cfg.grasp_model, &cfg.layout)?;
    let (u, a) = scenario.load();
    let result = if set.contacts.is_empty() {
        None
    } else {
        Some(grasp::max_resistible_pull(&set, &u, &a)?)
    };
    let (strength, violation, iterations) = match &result {
        Some(r) => {
            let v = grasp::check_witness(&set, &u, &a, r);
            if !(v <= WITNESS_TOL) {
                return Err(Error::Numerical(format!(
                    "witness re-check failed by {v:e}"
                )));
            }
            (r.alpha, v, r.iterations)
        }
        None => (0.0, 0.0, 0),
    };
    let contacts: Vec<_> = set
        .contacts
        .iter()
        .enumerate()
        .map(|(i, c)| {
            let f = result
                .as_ref()
                .map_or([0.0; 3], |r| [r.forces[i].x, r.forces[i].y, r.forces[i].z]);
            json!({
                "kind": match c.kind {
                    ContactKind::FingerPad => "finger_pad",
                    ContactKind::SuctionCup => "suction_cup",
                },
                "position_mm": [c.position.x, c.position.y, c.position.z],
                "force_N": f,
            })
        })
        .collect();
    Ok(Output::new("grasp").with(
        Format::Json,
        to_json(&json!({
            "scenario": scenario,
            "model": cfg.grasp_model,
            "strength_N": strength,
            "max_violation": violation,
            "iterations": iterations,
            "contacts": contacts,
        })),
    ))
}

/// Fits the grasp model to measured strengths, starting from the generic
/// defaults rather than the configured model so the fit does not depend on
/// an earlier one.
pub fn calibrate(cfg: &GripperConfig, data: &Path) -> Result<Output, Error> {
    let reference = tables::read_reference(data)?;
    let report = grasp::calibrate(
        &reference,
        &grasp::GraspModelParams::DEFAULT,
        &cfg.layout,
        &NelderMeadOptions::default(),
    )?;
    let mut out = Output::new("calibrate").with(Format::Json, to_json(&report));
    if !report.converged {
        out.notes.push(format!(
            "calibration stopped after {} iterations without converging",
            report.iterations
        ));
    }
    Ok(out)
}

#[derive(Debug, Clone)]
pub struct SimulateArgs<'a> {
    pub trials: usize,
    pub seed: u64,
    pub mode: ActuationMode,
    pub threads: Option<usize>,
    pub retries: u32,
    /// Field log to draw trial variables from instead of the built-in
    /// summary.
    pub field_log: Option<&'a Path>,
}

pub fn simulate(cfg: &GripperConfig, args: &SimulateArgs) -> Result<Output, Error> {
    if args.trials == 0 {
        return Err(Error::Usage("--trials must be at least 1".to_string()));
    }
    let stats = match args.field_log {
        Some(p) => tables::trial_stats(&tables::summarize_csv(p)?, p)?,
        None => TrialStats::FIELD,
    };
    let options = CampaignOptions {
        retries: args.retries,
        cam_clearance: cfg.cam_clearance,
        layout: cfg.layout,
        ..Default::default()
    };
    let campaign = Campaign::new(stats, cfg.grasp_model, args.mode, args.seed, options);
    let result = parallel::run_campaign(&campaign, args.trials, args.threads)?;
    let summary = json!({
        "mode": args.mode,
        "seed": args.seed,
        "trials": result.trials,
        "picked": result.picked,
        "grasp_slip": result.grasp_slip,
        "no_engage": result.no_engage,
        "success_rate": result.success_rate,
        "fingers_deployed": result.records.iter().filter(|r| r.fingers_deployed).count(),
        "model": cfg.grasp_model,
    });
    Ok(Output::new("simulate")
        .with(Format::Json, to_json(&summary))
        .with(Format::Csv, tables::trial_csv(&result.records)))
}

pub fn stats(csv: &Path) -> Result<Output, Error> {
    let columns = tables::summarize_csv(csv)?;
    let rows: Vec<_> = columns
        .iter()
        .map(|c| {
            let s = &c.summary;
            [
                c.name.clone(),
                c.count.to_string(),
                crate::num::sig(s.min),
                crate::num::sig(s.q1),
                crate::num::sig(s.median),
                crate::num::sig(s.q3),
                crate::num::sig(s.max),
            ]
        })
        .collect();
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    w.write_record(["variable", "n", "min", "q1", "median", "q3", "max"])
        .expect("write to memory");
    for r in &rows {
        w.write_record(r).expect("write to memory");
    }
    let csv_text = String::from_utf8(w.into_inner().expect("flush")).expect("utf-8");
    Ok(Output::new("stats")
        .with(Format::Text, tables::stats_text(&columns))
        .with(Format::Json, to_json(&columns))
        .with(Format::Csv, csv_text))
}
