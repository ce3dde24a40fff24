//! Behaviour of full reduction runs on the six-rung ladder.

use hsred_core::criticality::fixed_point_drift;
use hsred_core::{
    run_reduction, AmplitudeOrdering, CoarseSchedule, EigenOptions, LadderConfig, ReductionOptions, StopReason,
};

#[test]
fn coupling_is_a_fixed_point_only_at_the_crossing() {
    let eopts = EigenOptions::default();
    let ropts = ReductionOptions { n_min: 100, ..ReductionOptions::default() };
    let critical = run_reduction(&LadderConfig::new(6, 15.0, 12.2112133, 12.2112133), &eopts, &ropts).unwrap();
    let critical_drift = fixed_point_drift(&critical, 100).unwrap();
    assert!(critical_drift.drift <= 0.01, "{critical_drift:?}");

    let ropts = ReductionOptions { n_min: 250, ..ReductionOptions::default() };
    let off = run_reduction(&LadderConfig::new(6, 2.5, 5.0, 3.0), &eopts, &ropts).unwrap();
    let off_drift = fixed_point_drift(&off, 250).unwrap();
    assert!(off_drift.drift > 0.01, "{off_drift:?}");
}

#[test]
fn initial_ordering_follows_the_full_space_ranking() {
    let cfg = LadderConfig::new(4, 15.0, 5.0, 3.0);
    let eopts = EigenOptions::default();
    let ropts = ReductionOptions { n_min: 20, ordering: AmplitudeOrdering::Initial, ..ReductionOptions::default() };
    let traj = run_reduction(&cfg, &eopts, &ropts).unwrap();
    assert_eq!(traj.stop_reason, StopReason::ReachedNMin);
    let ground = traj.initial.ground();
    let removed: Vec<usize> = traj.steps.iter().flat_map(|s| s.eliminated.iter().copied()).collect();
    assert_eq!(removed.len(), 70 - 20);
    // each removal is the weakest survivor of the full-space ground state
    for w in removed.windows(2) {
        assert!(ground[w[0]].abs() <= ground[w[1]].abs());
    }
    let lambda1 = traj.lambda1();
    assert!(traj.steps.iter().all(|s| (s.lambdas[0] - lambda1).abs() <= 1e-10 * lambda1.abs()));
}

#[test]
fn coarse_batches_stop_at_their_threshold() {
    let cfg = LadderConfig::new(6, 15.0, 5.0, 3.0);
    let ropts = ReductionOptions {
        n_min: 500,
        coarse: Some(CoarseSchedule { above: 600, fraction: 0.1 }),
        ..ReductionOptions::default()
    };
    let traj = run_reduction(&cfg, &EigenOptions::default(), &ropts).unwrap();
    let dims: Vec<usize> = traj.steps.iter().map(|s| s.n).collect();
    assert_eq!(&dims[..5], &[924, 832, 749, 675, 608]);
    assert_eq!(dims[5], 600);
    assert!(dims[5..].windows(2).all(|w| w[0] - w[1] == 1));
    assert_eq!(*dims.last().unwrap(), 500);
}
