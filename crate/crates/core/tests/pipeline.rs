use planograsp::features::{BinaryDescriptor, FastBrief, Keypoint, Match};
use planograsp::pose::{
    estimate_pose, pose_from_matches, AbsenceReason, CameraIntrinsics, PoseConfig, ReferenceObject,
};
use planograsp::synth::{
    generate_texture, render, render_empty, sweep_out_of_plane, RenderNoise, ScenePose, SweepConfig,
};

fn book() -> ReferenceObject<BinaryDescriptor> {
    // Spans 240/525 m so that at 1 m it images at native resolution.
    let color = generate_texture(240, 180, 11);
    ReferenceObject::train(
        "book",
        color,
        &FastBrief::default(),
        Some(240.0 / 525.0),
        None,
    )
}

fn run(angle: f64, distance: f64, noise: RenderNoise) -> (f64, f64, usize) {
    let obj = book();
    let k = CameraIntrinsics::default();
    let truth = ScenePose::out_of_plane(angle, distance).unwrap();
    let scene = render(&truth, &obj, &k, &noise).unwrap();
    let est = estimate_pose(
        &obj,
        &scene.gray,
        &scene.depth,
        &FastBrief::default(),
        &PoseConfig::default(),
    )
    .unwrap();
    let pose = est
        .pose()
        .unwrap_or_else(|| panic!("not detected at {angle}: {est:?}"));
    let rot = pose.frame.angle_to(truth.frame()).to_degrees();
    let pos = (pose.position - truth.position()).norm();
    eprintln!(
        "angle {angle}: rot {rot:.4} deg, pos {:.3} mm, matches {}, inliers {}",
        pos * 1e3,
        pose.num_matches,
        pose.num_inliers
    );
    (rot, pos, pose.num_inliers)
}

#[test]
fn frontal_book_at_one_meter() {
    let (rot, pos, inliers) = run(0.0, 1.0, RenderNoise::default());
    assert!(rot < 0.5, "rotation error {rot} deg");
    assert!(pos < 2e-3, "position error {pos} m");
    assert!(inliers >= 10);
}

#[test]
fn tilted_book_within_tolerance() {
    for angle in [5.0, 10.0, 20.0] {
        let (rot, pos, _) = run(angle, 1.0, RenderNoise::default());
        assert!(rot < 2.0, "rotation error {rot} deg at {angle}");
        assert!(pos < 5e-3, "position error {pos} m at {angle}");
    }
}

#[test]
fn empty_scene_reports_absence() {
    let obj = book();
    let k = CameraIntrinsics::default();
    let scene = render_empty(
        &k,
        &RenderNoise {
            seed: 3,
            ..Default::default()
        },
    )
    .unwrap();
    let est = estimate_pose(
        &obj,
        &scene.gray,
        &scene.depth,
        &FastBrief::default(),
        &PoseConfig::default(),
    )
    .unwrap();
    assert!(!est.is_present());
}

#[test]
fn grazing_angle_is_not_detected() {
    let obj = book();
    let k = CameraIntrinsics::default();
    let truth = ScenePose::out_of_plane(89.0, 1.0).unwrap();
    let scene = render(&truth, &obj, &k, &RenderNoise::default()).unwrap();
    let est = estimate_pose(
        &obj,
        &scene.gray,
        &scene.depth,
        &FastBrief::default(),
        &PoseConfig::default(),
    )
    .unwrap();
    if let Some(p) = est.pose() {
        assert!(
            p.frame.angle_to(truth.frame()).to_degrees() > 10.0,
            "unexpected accurate detection at 89 deg"
        );
    }
}

#[test]
fn all_holes_reports_no_depth() {
    let obj = book();
    let k = CameraIntrinsics::default();
    let truth = ScenePose::out_of_plane(0.0, 1.0).unwrap();
    let noise = RenderNoise {
        hole_rate: 1.0,
        ..Default::default()
    };
    let scene = render(&truth, &obj, &k, &noise).unwrap();
    let est = estimate_pose(
        &obj,
        &scene.gray,
        &scene.depth,
        &FastBrief::default(),
        &PoseConfig::default(),
    )
    .unwrap();
    assert_eq!(est.absence_reason(), Some(AbsenceReason::NoDepth));
}

fn crafted(n: usize) -> (ReferenceObject<BinaryDescriptor>, Vec<Keypoint>, Vec<Match>) {
    let obj = book();
    let k = CameraIntrinsics::default();
    let truth = ScenePose::out_of_plane(0.0, 1.0).unwrap();
    let scene = render(&truth, &obj, &k, &RenderNoise::default()).unwrap();
    let h = scene.homography;
    // Exact correspondences from spread reference keypoints.
    let mut frame_kps = Vec::new();
    let mut matches = Vec::new();
    let step = obj.features.keypoints.len() / n;
    for i in 0..n {
        let q = i * step;
        let kp = obj.features.keypoints[q];
        let p = planograsp::homography::project(&h, [kp.x, kp.y]).unwrap();
        frame_kps.push(Keypoint {
            x: p[0],
            y: p[1],
            score: 1.0,
        });
        matches.push(Match {
            query_index: q,
            train_index: i,
            distance: 0.0,
        });
    }
    (obj, frame_kps, matches)
}

#[test]
fn nine_matches_absent_ten_present() {
    let k = CameraIntrinsics::default();
    let truth = ScenePose::out_of_plane(0.0, 1.0).unwrap();
    for (n, present) in [(9, false), (10, true)] {
        let (obj, kps, matches) = crafted(n);
        let scene = render(&truth, &obj, &k, &RenderNoise::default()).unwrap();
        let est = pose_from_matches(&obj, &kps, &matches, &scene.depth, &PoseConfig::default());
        assert_eq!(est.is_present(), present, "{n} matches: {est:?}");
        if !present {
            assert_eq!(
                est.absence_reason(),
                Some(AbsenceReason::InsufficientMatches)
            );
        }
    }
}

#[test]
fn noiseless_frontal_sweep_has_tiny_epsilon() {
    let obj = book();
    let cfg = SweepConfig {
        angles_deg: vec![0.0, 10.0],
        ..Default::default()
    };
    let rows = sweep_out_of_plane(&obj, &FastBrief::default(), &cfg).unwrap();
    eprintln!("{rows:?}");
    assert!(rows[0].detected);
    assert!(rows[0].epsilon < 1e-3, "epsilon {}", rows[0].epsilon);
}
