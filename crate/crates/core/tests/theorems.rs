use darp_core::gen::{point_window_suite, random_suite, two_request_fixture};
use darp_core::harness::theorems::{check_t1, check_t2, check_t3};
use darp_core::harness::{verify_theorems, TheoremSuite};
use darp_core::solver::{brute_force, BackendConfig};

fn backend() -> BackendConfig {
    BackendConfig::from_env().expect("no backend available").with_time_limit(120.0)
}

#[test]
fn laeb_and_alaeb_relaxations_coincide() {
    for inst in random_suite(10, 41) {
        let c = check_t1(&inst, &backend()).unwrap();
        assert!(c.passed, "{}: {}", c.instance, c.detail);
    }
}

#[test]
fn point_windows_give_integral_relaxations() {
    for inst in point_window_suite(6, 43) {
        let c = check_t2(&inst, &backend()).unwrap();
        assert!(c.passed, "{}: {}", c.instance, c.detail);
    }
}

#[test]
fn event_relaxation_dominates_location_relaxation() {
    for inst in random_suite(10, 47) {
        let c = check_t3(&inst, &backend(), false).unwrap();
        assert!(c.passed, "{}: {}", c.instance, c.detail);
    }
    let c = check_t3(&two_request_fixture(5), &backend(), true).unwrap();
    assert!(c.passed, "{}", c.detail);
}

#[test]
fn fixture_optima() {
    // pooled tour 0,1+,2+,2-,1-,0 costs 23; serving one after the other costs 38
    let pooled = brute_force(&two_request_fixture(6)).unwrap().unwrap().objective;
    let serial = brute_force(&two_request_fixture(5)).unwrap().unwrap().objective;
    assert_eq!((pooled, serial), (23.0, 38.0));
}

/// With room for both groups the pooled tour of cost 23 is optimal for the
/// location-based LP too, so strictness is not expected.
#[test]
fn fixture_with_room_for_both_is_not_strict() {
    let c = check_t3(&two_request_fixture(6), &backend(), true).unwrap();
    assert!(!c.passed, "{}", c.detail);
}

#[test]
fn report_groups_suites() {
    let r = verify_theorems(&random_suite(2, 3), &point_window_suite(2, 3), &[two_request_fixture(5)], &backend());
    assert!(r.all_passed(), "{:?}", r.checks);
    assert_eq!(r.of(TheoremSuite::T1).count(), 2);
    assert_eq!(r.of(TheoremSuite::T2).count(), 2);
    assert_eq!(r.of(TheoremSuite::T3).count(), 3);
}
