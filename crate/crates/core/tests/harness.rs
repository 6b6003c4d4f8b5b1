use std::fs;

use colourer::enumerate::{
    run_harness, run_harness_with, verify_witness, Check, HarnessConfig, HarnessError, RunOptions, Verdict,
};

fn small() -> HarnessConfig {
    HarnessConfig { max_n: 5, condition_max_n: 5, four_colour_max_n: 8, wheel_ks: vec![4], ..HarnessConfig::default() }
}

#[test]
fn all_checks_at_n5_match_fixture_counts() {
    let r = run_harness(&small()).unwrap();
    // rooted instances per (n, k) up to n = 5: (3,3) 1, (4,3) 1, (4,4) 2, (5,3) 3, (5,4) 5, (5,5) 5;
    // admissible outer assignments: 12 * 5 for k = 3, 12 * 4 * 5^(k - 3) otherwise
    let assignments = 60 * (1 + 1 + 3) + 240 * (2 + 5) + 1200 * 5;
    let e = &r.checks[&Check::EngineVsOracle].summary;
    assert_eq!(e.totals.instances, assignments);
    assert_eq!(e.counters.get("soundness_violations"), None);
    assert_eq!(r.checks[&Check::ThomassenControl].summary.totals.instances, 17);
    assert_eq!(r.checks[&Check::ThomassenControl].verdict, Verdict::ConfirmedAtScale);
    assert_eq!(r.checks[&Check::FourColourability].summary.totals.instances, 1 + 1 + 2 + 5 + 14);
    for c in r.checks.values() {
        let t = c.summary.totals;
        assert_eq!(t.passes + t.failures, t.instances);
        assert_eq!(c.verdict == Verdict::CounterexampleFound, t.failures > 0);
        for w in &c.summary.witnesses {
            assert_eq!(verify_witness(w), Ok(()));
        }
    }
}

#[test]
fn report_independent_of_jobs() {
    let a = run_harness(&small()).unwrap();
    let b = run_harness(&HarnessConfig { jobs: 3, ..small() }).unwrap();
    assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
}

#[test]
fn checkpoint_resume_and_mismatch() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cp.jsonl");
    let opts = RunOptions { checkpoint: Some(path.clone()), resume: false };
    let full = run_harness_with(&small(), &opts).unwrap();
    let lines = fs::read_to_string(&path).unwrap();
    let kept: Vec<&str> = lines.lines().step_by(2).collect();
    fs::write(&path, kept.join("\n") + "\n{\"config_hash\":").unwrap();
    let resume = RunOptions { checkpoint: Some(path.clone()), resume: true };
    let resumed = run_harness_with(&small(), &resume).unwrap();
    assert_eq!(serde_json::to_string(&full).unwrap(), serde_json::to_string(&resumed).unwrap());
    let other = HarnessConfig { seed: 9, ..small() };
    assert!(matches!(run_harness_with(&other, &resume), Err(HarnessError::Checkpoint { .. })));
}
