//! CSV formats. Writers use nine significant digits so output is stable
//! byte for byte; readers report the 1-based line and column of bad cells.

use std::fs::File;
use std::io::Read;
use std::path::Path;

use serde::Serialize;
use tandemgrip_core::cam::FingerPose;
use tandemgrip_core::grasp::{ActuationMode, GraspScenario, PullType, ReferenceRow};
use tandemgrip_core::linkage::SweepRow;
use tandemgrip_core::pick::{TrialRecord, TrialStats};
use tandemgrip_core::quantile::FiveNumberSummary;

use crate::num::sig;
use crate::Error;

pub const SWEEP_HEADER: [&str; 9] = [
    "x_mm",
    "y_mm",
    "gamma_deg",
    "alpha_deg",
    "theta_deg",
    "alpha_plus_theta_deg",
    "ratio",
    "f_nut_N",
    "t_motor_Nm",
];
pub const BRUISE_HEADER: [&str; 5] = ["x_mm", "ratio", "f_nut_N", "f_out_N", "exceeds_threshold"];
pub const POSE_HEADER: [&str; 8] = [
    "u", "inner_x", "inner_z", "outer_x", "outer_z", "tip_x", "tip_z", "region",
];
pub const REFERENCE_HEADER: [&str; 6] = [
    "mode",
    "offset_mm",
    "angle_deg",
    "pull_type",
    "strength_N",
    "stdev_N",
];
pub const TRIAL_HEADER: [&str; 7] = [
    "trial",
    "fdf_N",
    "offset_mm",
    "stiffness_Npm",
    "mode",
    "strength_N",
    "outcome",
];

fn write_rows<const N: usize>(
    header: [&str; N],
    rows: impl IntoIterator<Item = [String; N]>,
) -> String {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    w.write_record(header).expect("write to memory");
    for row in rows {
        w.write_record(&row).expect("write to memory");
    }
    String::from_utf8(w.into_inner().expect("flush to memory")).expect("utf-8 cells")
}

/// Infeasible samples keep their `x` with the remaining cells empty.
pub fn sweep_csv(rows: &[SweepRow]) -> String {
    write_rows(
        SWEEP_HEADER,
        rows.iter().map(|row| match row.sample() {
            Some(s) => {
                let st = &s.state;
                [
                    sig(st.x),
                    sig(st.y),
                    sig(st.gamma.to_degrees()),
                    sig(st.alpha.to_degrees()),
                    sig(st.theta.to_degrees()),
                    sig((st.alpha + st.theta).to_degrees()),
                    sig(st.ratio),
                    sig(s.f_nut),
                    sig(s.t_motor),
                ]
            }
            None => core::array::from_fn(|i| if i == 0 { sig(row.x()) } else { String::new() }),
        }),
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BruiseSample {
    pub x: f64,
    pub ratio: f64,
    pub f_nut: f64,
    pub f_out: f64,
    pub exceeds_threshold: bool,
}

pub fn bruise_csv(rows: &[BruiseSample]) -> String {
    write_rows(
        BRUISE_HEADER,
        rows.iter().map(|r| {
            [
                sig(r.x),
                sig(r.ratio),
                sig(r.f_nut),
                sig(r.f_out),
                r.exceeds_threshold.to_string(),
            ]
        }),
    )
}

pub fn pose_csv(poses: &[FingerPose]) -> String {
    write_rows(
        POSE_HEADER,
        poses.iter().map(|p| {
            [
                sig(p.u),
                sig(p.inner_pin.x),
                sig(p.inner_pin.y),
                sig(p.outer_pin.x),
                sig(p.outer_pin.y),
                sig(p.pad_tip.x),
                sig(p.pad_tip.y),
                p.region.name().to_string(),
            ]
        }),
    )
}

pub fn trial_csv(records: &[TrialRecord]) -> String {
    write_rows(
        TRIAL_HEADER,
        records.iter().map(|r| {
            [
                r.trial.to_string(),
                sig(r.fdf),
                sig(r.offset),
                sig(r.stiffness),
                r.mode.name().to_string(),
                sig(r.strength),
                r.outcome.name().to_string(),
            ]
        }),
    )
}

pub fn reference_csv(rows: &[ReferenceRow]) -> String {
    write_rows(
        REFERENCE_HEADER,
        rows.iter().map(|r| {
            [
                r.scenario.mode.name().to_string(),
                sig(r.scenario.fruit_offset),
                sig(r.scenario.pull_angle),
                r.scenario.pull_type.name().to_string(),
                sig(r.strength),
                r.stdev.map(sig).unwrap_or_default(),
            ]
        }),
    )
}

/// Header-indexed CSV reader with located errors.
struct Table {
    path: std::path::PathBuf,
    headers: Vec<String>,
    records: Vec<csv::StringRecord>,
}

impl Table {
    fn read(path: &Path, input: impl Read) -> Result<Self, Error> {
        let mut r = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .from_reader(input);
        let parse_err = |e: csv::Error| {
            let row = e.position().map_or(0, |p| p.line());
            Error::Parse {
                path: path.to_path_buf(),
                row,
                column: String::new(),
                msg: e.to_string(),
            }
        };
        let headers = r
            .headers()
            .map_err(parse_err)?
            .iter()
            .map(str::to_string)
            .collect();
        let records = r
            .records()
            .collect::<Result<Vec<_>, _>>()
            .map_err(parse_err)?;
        Ok(Self {
            path: path.to_path_buf(),
            headers,
            records,
        })
    }

    fn open(path: &Path) -> Result<Self, Error> {
        let f = File::open(path).map_err(|e| Error::io(path, e))?;
        Self::read(path, f)
    }

    fn column(&self, name: &str) -> Result<usize, Error> {
        self.headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::Parse {
                path: self.path.clone(),
                row: 1,
                column: name.to_string(),
                msg: "missing column".to_string(),
            })
    }

    fn error(&self, rec: &csv::StringRecord, col: usize, msg: String) -> Error {
        Error::Parse {
            path: self.path.clone(),
            row: rec.position().map_or(0, |p| p.line()),
            column: self
                .headers
                .get(col)
                .cloned()
                .unwrap_or_else(|| format!("#{}", col + 1)),
            msg,
        }
    }

    fn cell<'a>(&self, rec: &'a csv::StringRecord, col: usize) -> &'a str {
        rec.get(col).unwrap_or("")
    }

    /// Parsed cell, `None` when blank.
    fn number(&self, rec: &csv::StringRecord, col: usize) -> Result<Option<f64>, Error> {
        let s = self.cell(rec, col);
        if s.is_empty() {
            return Ok(None);
        }
        match s.parse::<f64>() {
            Ok(v) if v.is_finite() => Ok(Some(v)),
            _ => Err(self.error(rec, col, format!("not a finite number: `{s}`"))),
        }
    }

    fn required(&self, rec: &csv::StringRecord, col: usize) -> Result<f64, Error> {
        self.number(rec, col)?
            .ok_or_else(|| self.error(rec, col, "value required".to_string()))
    }
}

/// Reads measured grasp strengths for calibration.
pub fn read_reference(path: &Path) -> Result<Vec<ReferenceRow>, Error> {
    let t = Table::open(path)?;
    let cols: Vec<usize> = REFERENCE_HEADER
        .iter()
        .map(|h| t.column(h))
        .collect::<Result<_, _>>()?;
    let mut rows = Vec::with_capacity(t.records.len());
    for rec in &t.records {
        let mode: ActuationMode = t
            .cell(rec, cols[0])
            .parse()
            .map_err(|e| t.error(rec, cols[0], e))?;
        let pull: PullType = t
            .cell(rec, cols[3])
            .parse()
            .map_err(|e| t.error(rec, cols[3], e))?;
        let scenario = GraspScenario::new(mode)
            .with_offset(t.required(rec, cols[1])?)
            .with_angle(t.required(rec, cols[2])?)
            .with_pull(pull);
        let strength = t.required(rec, cols[4])?;
        if strength <= 0.0 {
            return Err(t.error(rec, cols[4], "strength must be positive".to_string()));
        }
        rows.push(ReferenceRow {
            scenario,
            strength,
            stdev: t.number(rec, cols[5])?,
        });
    }
    Ok(rows)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ColumnSummary {
    pub name: String,
    /// Non-blank cells.
    pub count: usize,
    pub summary: FiveNumberSummary,
}

/// Five-number summary of every column; blank cells are skipped.
pub fn summarize_csv(path: &Path) -> Result<Vec<ColumnSummary>, Error> {
    summarize_table(&Table::open(path)?)
}

pub fn summarize_reader(label: &Path, input: impl Read) -> Result<Vec<ColumnSummary>, Error> {
    summarize_table(&Table::read(label, input)?)
}

fn summarize_table(t: &Table) -> Result<Vec<ColumnSummary>, Error> {
    let mut values = vec![Vec::new(); t.headers.len()];
    for rec in &t.records {
        for (col, v) in values.iter_mut().enumerate() {
            if let Some(x) = t.number(rec, col)? {
                v.push(x);
            }
        }
    }
    t.headers
        .iter()
        .zip(values)
        .map(|(name, v)| {
            let summary = FiveNumberSummary::from_samples(&v).map_err(|e| Error::Parse {
                path: t.path.clone(),
                row: 1,
                column: name.clone(),
                msg: e.to_string(),
            })?;
            Ok(ColumnSummary {
                name: name.clone(),
                count: v.len(),
                summary,
            })
        })
        .collect()
}

/// Picks the field-trial columns out of a summarized log.
pub fn trial_stats(columns: &[ColumnSummary], path: &Path) -> Result<TrialStats, Error> {
    let get = |name: &str| {
        columns
            .iter()
            .find(|c| c.name == name)
            .map(|c| c.summary)
            .ok_or_else(|| Error::Parse {
                path: path.to_path_buf(),
                row: 1,
                column: name.to_string(),
                msg: "missing column".to_string(),
            })
    };
    let c = TrialStats::COLUMNS;
    Ok(TrialStats {
        fruit_diameter: get(c[0])?,
        fruit_height: get(c[1])?,
        fruit_weight: get(c[2])?,
        net_fdf: get(c[3])?,
        tangential_fdf: get(c[4])?,
        normal_fdf: get(c[5])?,
        branch_stiffness: get(c[6])?,
        offset: get(c[7])?,
    })
}

/// Fixed-width text table in the layout of a field-trial summary.
pub fn stats_text(columns: &[ColumnSummary]) -> String {
    let width = columns
        .iter()
        .map(|c| c.name.len())
        .max()
        .unwrap_or(8)
        .max(8);
    let mut out = format!(
        "{:<width$} {:>5} {:>9} {:>9} {:>9} {:>9} {:>9}\n",
        "variable", "n", "min", "q1", "median", "q3", "max"
    );
    for c in columns {
        let s = &c.summary;
        out += &format!(
            "{:<width$} {:>5} {:>9} {:>9} {:>9} {:>9} {:>9}\n",
            c.name,
            c.count,
            sig(s.min),
            sig(s.q1),
            sig(s.median),
            sig(s.q3),
            sig(s.max)
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn summarize(text: &str) -> Result<Vec<ColumnSummary>, Error> {
        summarize_reader(Path::new("log.csv"), text.as_bytes())
    }

    #[test]
    fn blank_cells_are_skipped() {
        let s = summarize("a,b\n1,\n2,5\n3,\n").unwrap();
        assert_eq!(s[0].count, 3);
        assert_eq!(s[0].summary.median, 2.0);
        assert_eq!(s[1].count, 1);
        assert_eq!(s[1].summary, FiveNumberSummary::constant(5.0));
    }

    #[test]
    fn bad_cell_is_located() {
        match summarize("a,b\n1,2\n3,oops\n").unwrap_err() {
            Error::Parse { row, column, .. } => {
                assert_eq!(row, 3);
                assert_eq!(column, "b");
            }
            e => panic!("unexpected {e}"),
        }
    }

    #[test]
    fn empty_column_is_an_error() {
        assert!(matches!(summarize("a,b\n1,\n"), Err(Error::Parse { .. })));
    }
}
