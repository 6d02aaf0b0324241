//! Gripper configuration: one JSON document, one section per model, units
//! spelled out in the key names.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use tandemgrip_core::cam::{self, CamTrackSpec};
use tandemgrip_core::grasp::{ContactLayout, GraspModelParams};
use tandemgrip_core::leadscrew::ScrewParams;
use tandemgrip_core::linkage::{LinkageParams, TravelRange};

use crate::Error;

/// The configuration shipped in `configs/prototype.json`.
pub const PROTOTYPE_JSON: &str = include_str!("../configs/prototype.json");

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub linkage: LinkageSection,
    pub screw: ScrewSection,
    pub travel: TravelSection,
    pub grasp_model: GraspModelSection,
    #[serde(default)]
    pub contact_layout: LayoutSection,
    /// `"default"` or a path to a track-spec JSON, relative to the config.
    #[serde(default = "default_cam")]
    pub cam: String,
    #[serde(default = "default_clearance")]
    pub cam_clearance_mm: f64,
    #[serde(default = "default_diameter")]
    pub fruit_diameter_mm: f64,
    #[serde(default = "default_threshold", rename = "bruise_threshold_N")]
    pub bruise_threshold_n: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LinkageSection {
    pub p_x_mm: f64,
    pub l_b_mm: f64,
    pub l_k_mm: f64,
    pub l_f_mm: f64,
    pub p_y_mm: f64,
    pub l_n_mm: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScrewSection {
    pub pitch_mm: f64,
    pub n_starts: u32,
    pub thread_angle_deg: f64,
    pub d_outer_mm: f64,
    pub mu: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TravelSection {
    pub x_min_mm: f64,
    pub x_max_mm: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraspModelSection {
    #[serde(rename = "pad_force_N")]
    pub pad_force_n: f64,
    pub mu_pad: f64,
    #[serde(rename = "suction_axial_N")]
    pub suction_axial_n: f64,
    pub shear_fraction: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LayoutSection {
    pub cup_polar_angle_deg: f64,
    pub cone_sides: usize,
    #[serde(rename = "cup_compression_N")]
    pub cup_compression_n: f64,
}

impl Default for LayoutSection {
    fn default() -> Self {
        let l = ContactLayout::default();
        Self {
            cup_polar_angle_deg: l.cup_polar_angle,
            cone_sides: l.cone_sides,
            cup_compression_n: l.cup_compression,
        }
    }
}

fn default_cam() -> String {
    "default".to_string()
}
fn default_clearance() -> f64 {
    3.0
}
fn default_diameter() -> f64 {
    75.0
}
fn default_threshold() -> f64 {
    30.0
}

#[derive(Debug, Clone, PartialEq)]
pub enum CamSource {
    /// Tracks generated for the fruit at hand.
    Default,
    File(PathBuf),
}

/// Validated configuration in model units.
#[derive(Debug, Clone, PartialEq)]
pub struct GripperConfig {
    pub linkage: LinkageParams,
    pub screw: ScrewParams,
    pub travel: TravelRange,
    pub grasp_model: GraspModelParams,
    pub layout: ContactLayout,
    pub cam: CamSource,
    pub cam_clearance: f64,
    pub fruit_diameter: f64,
    pub bruise_threshold: f64,
}

impl GripperConfig {
    pub fn prototype() -> Self {
        Self::from_json(PROTOTYPE_JSON, Path::new("."), Path::new("<prototype>"))
            .expect("shipped configuration is valid")
    }

    pub fn load(path: &Path) -> Result<Self, Error> {
        let text = fs::read_to_string(path).map_err(|e| Error::Config {
            path: path.to_path_buf(),
            msg: e.to_string(),
        })?;
        let base = path.parent().unwrap_or(Path::new("."));
        Self::from_json(&text, base, path)
    }

    /// Parses and validates. `base` resolves relative file references;
    /// `origin` only labels errors.
    pub fn from_json(text: &str, base: &Path, origin: &Path) -> Result<Self, Error> {
        let err = |msg: String| Error::Config {
            path: origin.to_path_buf(),
            msg,
        };
        let raw: ConfigFile = serde_json::from_str(text).map_err(|e| err(e.to_string()))?;
        Self::from_file(&raw, base).map_err(|e| match e {
            Error::Config { msg, .. } => err(msg),
            other => err(other.to_string()),
        })
    }

    pub fn from_file(raw: &ConfigFile, base: &Path) -> Result<Self, Error> {
        let l = &raw.linkage;
        let linkage = LinkageParams {
            p_x: l.p_x_mm,
            l_b: l.l_b_mm,
            l_k: l.l_k_mm,
            l_f: l.l_f_mm,
            p_y: l.p_y_mm,
            l_n: l.l_n_mm,
        };
        linkage.validate()?;
        let s = &raw.screw;
        let screw = ScrewParams {
            pitch: s.pitch_mm,
            n_starts: s.n_starts,
            thread_angle: s.thread_angle_deg.to_radians(),
            d_outer: s.d_outer_mm,
            mu: s.mu,
        };
        screw.validate()?;
        let travel = TravelRange::new(raw.travel.x_min_mm, raw.travel.x_max_mm)?;
        travel.check_realizable(&linkage)?;
        let g = &raw.grasp_model;
        let grasp_model = GraspModelParams {
            pad_force: g.pad_force_n,
            mu_pad: g.mu_pad,
            suction_axial: g.suction_axial_n,
            shear_fraction: g.shear_fraction,
        };
        grasp_model.validate()?;
        let cl = &raw.contact_layout;
        if !(cl.cup_polar_angle_deg >= 0.0 && cl.cup_polar_angle_deg < 180.0) {
            return Err(config_msg(
                "contact_layout.cup_polar_angle_deg must be in [0, 180)",
            ));
        }
        if cl.cone_sides < 3 {
            return Err(config_msg("contact_layout.cone_sides must be at least 3"));
        }
        if !(cl.cup_compression_n >= 0.0 && cl.cup_compression_n.is_finite()) {
            return Err(config_msg("contact_layout.cup_compression_N must be >= 0"));
        }
        let layout = ContactLayout {
            cup_polar_angle: cl.cup_polar_angle_deg,
            cone_sides: cl.cone_sides,
            cup_compression: cl.cup_compression_n,
            ..ContactLayout::default()
        };
        let cam = if raw.cam == "default" {
            CamSource::Default
        } else {
            let p = base.join(&raw.cam);
            if !p.is_file() {
                return Err(config_msg(&format!(
                    "cam track file {} does not exist",
                    p.display()
                )));
            }
            CamSource::File(p)
        };
        if !(raw.cam_clearance_mm >= 0.0 && raw.cam_clearance_mm.is_finite()) {
            return Err(config_msg("cam_clearance_mm must be >= 0"));
        }
        if !(raw.fruit_diameter_mm > 0.0 && raw.fruit_diameter_mm.is_finite()) {
            return Err(config_msg("fruit_diameter_mm must be positive"));
        }
        if !(raw.bruise_threshold_n > 0.0 && raw.bruise_threshold_n.is_finite()) {
            return Err(config_msg("bruise_threshold_N must be positive"));
        }
        Ok(Self {
            linkage,
            screw,
            travel,
            grasp_model,
            layout,
            cam,
            cam_clearance: raw.cam_clearance_mm,
            fruit_diameter: raw.fruit_diameter_mm,
            bruise_threshold: raw.bruise_threshold_n,
        })
    }

    /// Cam tracks for a fruit of `fruit_radius`: generated, or read from the
    /// referenced file.
    pub fn cam_spec(&self, fruit_radius: f64, clearance: f64) -> Result<CamTrackSpec, Error> {
        match &self.cam {
            CamSource::Default => Ok(cam::build_default_tracks(fruit_radius, clearance)?),
            CamSource::File(path) => load_cam_spec(path),
        }
    }
}

pub fn load_cam_spec(path: &Path) -> Result<CamTrackSpec, Error> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let spec: CamTrackSpec = serde_json::from_str(&text).map_err(|e| Error::Config {
        path: path.to_path_buf(),
        msg: e.to_string(),
    })?;
    spec.validate()?;
    Ok(spec)
}

fn config_msg(msg: &str) -> Error {
    Error::Config {
        path: PathBuf::new(),
        msg: msg.to_string(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prototype_matches_core_constants() {
        let c = GripperConfig::prototype();
        assert_eq!(c.linkage, LinkageParams::PROTOTYPE);
        assert_eq!(c.screw.n_starts, 4);
        assert!((c.screw.thread_angle - ScrewParams::TR8X8.thread_angle).abs() < 1e-15);
        assert_eq!(c.travel, TravelRange::CLAMP_REGION);
        assert_eq!(c.bruise_threshold, 30.0);
        assert_eq!(c.cam, CamSource::Default);
    }

    #[test]
    fn rejects_unknown_keys_and_bad_values() {
        let bad = PROTOTYPE_JSON.replace("\"p_x_mm\"", "\"p_x\"");
        assert!(matches!(
            GripperConfig::from_json(&bad, Path::new("."), Path::new("x.json")),
            Err(Error::Config { .. })
        ));
        let bad = PROTOTYPE_JSON.replace("\"l_k_mm\": 17.5", "\"l_k_mm\": -1");
        assert!(GripperConfig::from_json(&bad, Path::new("."), Path::new("x.json")).is_err());
        let bad = PROTOTYPE_JSON.replace("\"cam\": \"default\"", "\"cam\": \"missing.json\"");
        let e = GripperConfig::from_json(&bad, Path::new("."), Path::new("x.json")).unwrap_err();
        assert_eq!(e.exit_code(), 2);
        assert!(e.to_string().contains("missing.json"));
    }
}
