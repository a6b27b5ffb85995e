//! The build against the Fourier-Motzkin projection.

use afr_core::afr::afr_as_system;
use afr_core::fme::aggregate_projection_oracle;
use afr_core::gen::random_fleet;
use afr_core::linear::system_equivalent;
use afr_core::rational::{format_rational, int, parse_rational};
use afr_core::{build_afr, FlexResource, ResourceSet};

fn res(id: &str, p: (i64, i64), e_lo: &[i64], e_hi: &[i64]) -> FlexResource {
    let horizon = e_lo.len();
    FlexResource::new(
        id,
        vec![int(p.0); horizon],
        vec![int(p.1); horizon],
        e_lo.iter().map(|&v| int(v)).collect(),
        e_hi.iter().map(|&v| int(v)).collect(),
    )
    .unwrap()
}

fn agrees(rs: &ResourceSet) -> bool {
    let oracle = aggregate_projection_oracle(rs).unwrap();
    system_equivalent(&afr_as_system(&build_afr(rs).unwrap()), &oracle).unwrap()
}

#[test]
fn worked_examples() {
    let single = ResourceSet::new(vec![res("a", (0, 1), &[0], &[1])]).unwrap();
    let opposite = ResourceSet::new(vec![res("a", (0, 1), &[0], &[1]), res("b", (-1, 0), &[-1], &[0])]).unwrap();
    let pair =
        ResourceSet::new(vec![res("a", (0, 1), &[0, 0], &[1, 2]), res("b", (-1, 1), &[-1, -1], &[1, 1])]).unwrap();
    for rs in [single, opposite, pair] {
        assert!(agrees(&rs));
    }
}

#[test]
fn random_small_fleets() {
    for seed in 0..12 {
        let n = 1 + seed as usize % 2;
        let horizon = 1 + seed as usize % 3;
        assert!(agrees(&random_fleet(seed, n, horizon)), "seed {seed}");
    }
}

#[test]
fn a_perturbed_bound_is_detected() {
    let rs = random_fleet(3, 2, 3);
    let oracle = aggregate_projection_oracle(&rs).unwrap();
    let m = build_afr(&rs).unwrap();
    let mut doc: serde_json::Value =
        serde_json::from_str(&afr_core::afr::io::afr_to_json(&m.without_contributions(), None)).unwrap();
    let row = &mut doc["constraints"][0];
    let lo = parse_rational(row["lo"].as_str().unwrap()).unwrap();
    let hi = parse_rational(row["hi"].as_str().unwrap()).unwrap();
    assert!(lo < hi);
    row["hi"] = serde_json::Value::String(format_rational(&((lo + hi) / int(2))));
    let bad = afr_core::afr::io::afr_from_json(doc.to_string().as_bytes()).unwrap();
    assert!(!system_equivalent(&afr_as_system(&bad), &oracle).unwrap());
}
