use proptest::prelude::*;
use tandemgrip_core::cam::{
    build_default_tracks, dense_inner_search, sample_poses, solve_finger_pose, validate_path,
    CamTrackSpec, Point, Region,
};

fn tracks(radius: f64, clearance: f64) -> CamTrackSpec {
    build_default_tracks(radius, clearance).unwrap()
}

#[test]
fn default_tracks_for_75mm_fruit() {
    let spec = tracks(37.5, 3.0);
    let report = validate_path(&spec, 500).unwrap();
    assert!(!report.interference);
    assert!(report.min_clearance >= 3.0);
    assert_eq!(report.transitions, 1);
    assert!(report.max_pin_error < 1e-9);
    assert!(report.clamp_contact_latitude.to_degrees().abs() <= 1.0);
}

#[test]
fn moved_fruit_interferes() {
    let mut spec = tracks(37.5, 3.0);
    spec.fruit_center += Point::new(10.0, 0.0);
    assert!(validate_path(&spec, 500).unwrap().interference);
}

#[test]
fn two_samples_use_the_endpoints() {
    let spec = tracks(37.5, 3.0);
    let report = validate_path(&spec, 2).unwrap();
    assert_eq!(report.samples, 2);
    assert_eq!(report.transitions, 1);
    let end = solve_finger_pose(&spec, 1.0).unwrap();
    assert_eq!(
        report.max_tip_height,
        end.pad_tip
            .y
            .max(solve_finger_pose(&spec, 0.0).unwrap().pad_tip.y)
    );
}

#[test]
fn pose_solve_agrees_with_dense_scan() {
    let spec = tracks(37.5, 3.0);
    for i in 0..=40 {
        let pose = solve_finger_pose(&spec, i as f64 / 40.0).unwrap();
        let (_, err) = dense_inner_search(&spec, &pose.outer_pin, 20_000);
        assert!(err < 0.05, "u {}: dense scan misses by {err}", pose.u);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn path_shape(radius in 32.0..43.0f64, clearance in 1.0..5.0f64) {
        let spec = tracks(radius, clearance);
        let poses = sample_poses(&spec, 300).unwrap();
        let stop = spec.hard_stop();

        // Rigid pins everywhere.
        for p in &poses {
            prop_assert!(((p.outer_pin - p.inner_pin).norm() - spec.pin_separation).abs() < 1e-9);
        }

        // One transition, never reverting; clamping exactly at the stop.
        let first_clamp = poses.iter().position(|p| p.region == Region::Clamping).unwrap();
        prop_assert!(poses[first_clamp..].iter().all(|p| p.region == Region::Clamping));
        for p in &poses {
            let at_stop = (p.inner_pin - stop).norm() < 1e-6;
            prop_assert_eq!(at_stop, p.region == Region::Clamping);
        }

        // Clamping turns the finger inward monotonically about a fixed pin.
        let clamp = &poses[first_clamp..];
        prop_assert!(clamp.windows(2).all(|w| w[1].rotation >= w[0].rotation - 1e-12));
        prop_assert!(clamp.last().unwrap().rotation > clamp[0].rotation);

        // Tip radius rises then falls.
        let r: Vec<f64> = poses.iter().map(|p| p.pad_tip.x).collect();
        let peak = r.iter().enumerate().max_by(|a, b| a.1.total_cmp(b.1)).unwrap().0;
        prop_assert!(r[..=peak].windows(2).all(|w| w[1] >= w[0] - 1e-9));
        prop_assert!(r[peak..].windows(2).all(|w| w[1] <= w[0] + 1e-9));

        let report = validate_path(&spec, 300).unwrap();
        prop_assert!(report.min_clearance >= clearance);
    }

    #[test]
    fn rigid_at_random_parameters(u in 0.0..=1.0f64) {
        let spec = tracks(37.5, 3.0);
        let p = solve_finger_pose(&spec, u).unwrap();
        prop_assert!(((p.outer_pin - p.inner_pin).norm() - spec.pin_separation).abs() < 1e-9);
    }
}
