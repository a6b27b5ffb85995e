//! Frozen outcome of scoring the two-candidate closed-form readings against the LP support.

use afr_core::afr::calibration::{all_readings, sweep, CALIBRATED_READING};
use afr_core::gen::{random_resource, seeded};
use afr_core::FlexResource;

#[test]
fn only_the_calibrated_reading_is_sound_and_none_is_exact() {
    let mut rng = seeded(2024);
    let resources: Vec<FlexResource> =
        (1..=5).flat_map(|t| std::iter::repeat(t).take(20)).map(|t| random_resource(&mut rng, "r", t)).collect();
    let scores = sweep(&resources, &all_readings()).unwrap();
    assert_eq!(scores.len(), 16);
    for s in &scores {
        assert!(!s.exact() || s.reading == CALIBRATED_READING, "{:?} is exact", s.reading);
        if s.reading == CALIBRATED_READING {
            assert_eq!(s.unsound, 0);
        } else {
            assert!(s.unsound > 0, "{:?} unexpectedly sound", s.reading);
        }
    }
}

#[test]
fn calibrated_reading_is_loose_somewhere_at_five_intervals() {
    let mut rng = seeded(7);
    let resources: Vec<FlexResource> = (0..100).map(|_| random_resource(&mut rng, "r", 5)).collect();
    let score = &sweep(&resources, &[CALIBRATED_READING]).unwrap()[0];
    assert_eq!(score.unsound, 0);
    assert!(score.mismatched > 0);
}
