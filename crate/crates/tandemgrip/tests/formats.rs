use std::path::Path;

use tandemgrip::commands;
use tandemgrip::config::PROTOTYPE_JSON;
use tandemgrip::core::cam;
use tandemgrip::core::grasp::ActuationMode;
use tandemgrip::core::pick::{self, Campaign, CampaignOptions, TrialStats};
use tandemgrip::tables;
use tandemgrip::{parallel, Error, GripperConfig};

fn data(name: &str) -> std::path::PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("data")
        .join(name)
}

#[test]
fn campaign_matches_across_thread_counts() {
    let cfg = GripperConfig::prototype();
    for mode in ActuationMode::ALL {
        let c = Campaign::new(
            TrialStats::FIELD,
            cfg.grasp_model,
            mode,
            11,
            CampaignOptions::default(),
        );
        let seq = pick::run_campaign_with(
            &TrialStats::FIELD,
            &cfg.grasp_model,
            mode,
            400,
            11,
            &CampaignOptions::default(),
        );
        for threads in [1, 4, 8] {
            let par = parallel::run_campaign(&c, 400, Some(threads)).unwrap();
            assert_eq!(par, seq, "{mode:?} on {threads} threads");
        }
    }
    let c = Campaign::new(
        TrialStats::FIELD,
        cfg.grasp_model,
        ActuationMode::Dual,
        1,
        CampaignOptions::default(),
    );
    assert!(matches!(
        parallel::run_campaign(&c, 10, Some(0)),
        Err(Error::Usage(_))
    ));
}

#[test]
fn parallel_path_validation_matches() {
    let spec = cam::build_default_tracks(37.5, 3.0).unwrap();
    let seq = cam::validate_path(&spec, 500).unwrap();
    for threads in [1, 3] {
        assert_eq!(
            parallel::validate_path(&spec, 500, Some(threads)).unwrap(),
            seq
        );
    }
    assert!(parallel::validate_path(&spec, 1, None).is_err());
}

#[test]
fn reference_dataset_round_trip() {
    let rows = tables::read_reference(&data("grasp_strength.csv")).unwrap();
    assert_eq!(rows.len(), 13);
    assert_eq!(rows.iter().filter(|r| r.stdev.is_none()).count(), 5);
    let text = tables::reference_csv(&rows);
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("ref.csv");
    std::fs::write(&p, &text).unwrap();
    assert_eq!(tables::read_reference(&p).unwrap(), rows);
}

#[test]
fn reference_errors_are_located() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("ref.csv");
    std::fs::write(&p, "mode,offset_mm,angle_deg,pull_type,strength_N,stdev_N\ndual,0,0,axial,30,\nclaw,0,0,axial,30,\n").unwrap();
    match tables::read_reference(&p).unwrap_err() {
        Error::Parse { row, column, .. } => assert_eq!((row, column.as_str()), (3, "mode")),
        e => panic!("{e}"),
    }
    std::fs::write(
        &p,
        "mode,offset_mm,angle_deg,pull_type,strength_N,stdev_N\ndual,0,,axial,30,\n",
    )
    .unwrap();
    match tables::read_reference(&p).unwrap_err() {
        Error::Parse { row, column, .. } => assert_eq!((row, column.as_str()), (2, "angle_deg")),
        e => panic!("{e}"),
    }
    std::fs::write(&p, "mode,offset_mm\n").unwrap();
    assert!(matches!(
        tables::read_reference(&p),
        Err(Error::Parse { .. })
    ));
}

#[test]
fn field_log_reproduces_the_field_summary() {
    let p = data("field_log.csv");
    let cols = tables::summarize_csv(&p).unwrap();
    assert_eq!(tables::trial_stats(&cols, &p).unwrap(), TrialStats::FIELD);
    let counts: Vec<usize> = cols.iter().map(|c| c.count).collect();
    assert_eq!(counts, [24, 24, 21, 22, 22, 22, 34, 39]);
}

#[test]
fn single_row_log() {
    let cols = tables::summarize_reader(Path::new("one.csv"), "a\n4.5\n".as_bytes()).unwrap();
    assert_eq!(cols[0].summary.values(), [4.5; 5]);
}

#[test]
fn config_with_track_file() {
    let dir = tempfile::tempdir().unwrap();
    let mut spec = cam::build_default_tracks(37.5, 3.0).unwrap();
    std::fs::write(
        dir.path().join("tracks.json"),
        serde_json::to_string(&spec).unwrap(),
    )
    .unwrap();
    let text = PROTOTYPE_JSON.replace("\"cam\": \"default\"", "\"cam\": \"tracks.json\"");
    let cfg_path = dir.path().join("gripper.json");
    std::fs::write(&cfg_path, &text).unwrap();
    let cfg = GripperConfig::load(&cfg_path).unwrap();
    let out = commands::campath(&cfg, None, None, 100, None).unwrap();
    assert!(out.failure.is_none());

    // A track file whose fruit sits in the finger's way is reported after
    // the output is produced.
    spec.fruit_center.x += 10.0;
    std::fs::write(
        dir.path().join("tracks.json"),
        serde_json::to_string(&spec).unwrap(),
    )
    .unwrap();
    let cfg = GripperConfig::load(&cfg_path).unwrap();
    let out = commands::campath(&cfg, None, None, 100, None).unwrap();
    assert_eq!(out.failure.map(|e| e.exit_code()), Some(3));
}

#[test]
fn csv_is_byte_stable() {
    let cfg = GripperConfig::prototype();
    let a = commands::transmission(&cfg, None, 30.0).unwrap();
    let b = commands::transmission(&cfg, None, 30.0).unwrap();
    assert_eq!(a.primary(), b.primary());
    let row = a.primary().lines().nth(1).unwrap();
    // Nine significant digits at most per cell.
    for cell in row.split(',') {
        let digits = cell
            .chars()
            .filter(|c| c.is_ascii_digit())
            .collect::<String>();
        assert!(digits.trim_start_matches('0').len() <= 9, "{cell}");
    }
}
