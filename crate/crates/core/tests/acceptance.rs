//! Acceptance gate: one PASS/FAIL line per criterion; exits nonzero if any fails.
//!
//! Run with `cargo test -p afr-core --test acceptance` (add `--release` for
//! representative timings in criterion 8).

use std::process::ExitCode;
use std::time::{Duration, Instant};

use afr_core::afr::{
    afr_as_system, disaggregate, support_lower_closed, support_lower_lp, support_upper_closed, support_upper_lp,
    AfrModel,
};
use afr_core::fme::aggregate_projection_oracle;
use afr_core::gen::{generator_fleet, random_fleet, random_resource, random_trajectory, seeded};
use afr_core::linear::system_equivalent;
use afr_core::rational::{int, Rational};
use afr_core::scaling::{exp2_fit, linear_fit, time_build};
use afr_core::theorem::{run_suite, SuiteOptions};
use afr_core::{build_afr, build_afr_with, BuildOptions, DirectionIndex, FlexResource};
use rand::Rng;

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict { pass, detail: detail.into() }
}

fn oracle_equality() -> Verdict {
    let sizes: Vec<(usize, usize)> = (1..=3).flat_map(|n| (1..=4).map(move |t| (n, t))).collect();
    let mut bad = Vec::new();
    for k in 0..50u64 {
        let (n, horizon) = sizes[k as usize % sizes.len()];
        let rs = random_fleet(1000 + k, n, horizon);
        let equal = aggregate_projection_oracle(&rs)
            .ok()
            .and_then(|oracle| system_equivalent(&afr_as_system(&build_afr(&rs).ok()?), &oracle).ok());
        if equal != Some(true) {
            bad.push(format!("seed {} N={n} T={horizon}", 1000 + k));
        }
    }
    verdict(bad.is_empty(), format!("{}/50 instances equal the FME projection {bad:?}", 50 - bad.len()))
}

fn constraint_count() -> Verdict {
    let mut bad = Vec::new();
    for horizon in 1..=12 {
        let m = build_afr(&random_fleet(horizon as u64, 3, horizon)).expect("valid fleet");
        if m.inequality_count() != 2 * ((1 << horizon) - 1) {
            bad.push(horizon);
        }
    }
    verdict(bad.is_empty(), format!("2(2^T-1) rows for T=1..12, mismatches at {bad:?}"))
}

fn calibration() -> Verdict {
    let mut checked = 0;
    let mut bad = 0;
    for horizon in 1..=5 {
        let mut rng = seeded(300 + horizon as u64);
        for _ in 0..100 {
            let r = random_resource(&mut rng, "r", horizon);
            for mask in 1..1u64 << horizon {
                let d = DirectionIndex::from_mask(horizon, mask).expect("valid mask");
                let s = d.intervals();
                checked += 1;
                let same = support_upper_closed(&r, &d).ok() == support_upper_lp(&r, &s).ok()
                    && support_lower_closed(&r, &d).ok() == support_lower_lp(&r, &s).ok();
                if !same {
                    bad += 1;
                }
            }
        }
    }
    verdict(bad == 0, format!("closed form = LP support on {}/{checked} (resource, direction) pairs", checked - bad))
}

fn soundness_sampling() -> Verdict {
    let instances = [(10, 8), (6, 6), (3, 4), (1, 8), (10, 3)];
    let mut violations = 0;
    let mut samples = 0;
    for (k, &(n, horizon)) in instances.iter().enumerate() {
        let rs = random_fleet(40 + k as u64, n, horizon);
        let m = build_afr(&rs).expect("valid fleet");
        let mut rng = seeded(k as u64);
        for _ in 0..1000 {
            let mut total = vec![Rational::default(); horizon];
            for r in rs.iter() {
                for (acc, e) in total.iter_mut().zip(random_trajectory(&mut rng, r)) {
                    *acc += e + r.energy_offset();
                }
            }
            samples += 1;
            if !m.check_membership(&total).map(|v| v.is_inside()).unwrap_or(false) {
                violations += 1;
            }
        }
    }
    verdict(
        violations == 0,
        format!("{samples} aggregated trajectories over {} instances, {violations} outside", instances.len()),
    )
}

fn completeness() -> Verdict {
    let instances = [(2, 3), (3, 3), (2, 4)];
    let mut failures = 0;
    let mut total = 0;
    for (k, &(n, horizon)) in instances.iter().enumerate() {
        let rs = random_fleet(70 + k as u64, n, horizon);
        let m = build_afr(&rs).expect("valid fleet");
        let sys = afr_as_system(&m);
        let mut rng = seeded(k as u64 + 7);
        for _ in 0..200 {
            let objective: Vec<(usize, Rational)> =
                (0..horizon).map(|t| (t, int(if rng.gen_bool(0.5) { 1 } else { -1 }))).collect();
            total += 1;
            let ok = sys.sample_vertex(&objective).ok().is_some_and(|v| {
                let profile: Vec<Rational> = v.iter().map(|e| e + m.energy_offset()).collect();
                disaggregate(&rs, &profile).is_ok_and(|a| a.totals() == profile)
            });
            if !ok {
                failures += 1;
            }
        }
    }
    verdict(failures == 0, format!("{}/{total} AFR vertices disaggregate exactly", total - failures))
}

fn theorem_suites() -> Verdict {
    let records = run_suite(&SuiteOptions::default());
    let failed: Vec<String> = records.iter().filter(|r| !r.pass).map(|r| format!("{}#{}", r.check, r.seed)).collect();
    let checks = records.iter().map(|r| &r.check).collect::<std::collections::BTreeSet<_>>().len();
    verdict(
        failed.is_empty() && !records.is_empty(),
        format!(
            "{}/{} records pass over {checks} checks x 100 seeds {:?}",
            records.len() - failed.len(),
            records.len(),
            &failed[..failed.len().min(5)]
        ),
    )
}

fn merge_algebra() -> Verdict {
    let mut bad = 0;
    for k in 0..50u64 {
        let mut rng = seeded(900 + k);
        let n = rng.gen_range(2..=8);
        let horizon = rng.gen_range(1..=5);
        let rs = random_fleet(900 + k, n, horizon);
        let direct = build_afr(&rs).expect("valid fleet");
        let parts = rng.gen_range(2..=3);
        let label: Vec<usize> = (0..n).map(|_| rng.gen_range(0..parts)).collect();
        let merged = (0..parts)
            .map(|p| {
                let picks: Vec<usize> = (0..n).filter(|&i| label[i] == p).collect();
                build_afr(&rs.subset(&picks)).expect("valid fleet")
            })
            .try_fold(AfrModel::empty(horizon).expect("small horizon"), |acc, m| acc.merge(&m));
        let added = rs.iter().try_fold(AfrModel::empty(horizon).expect("small horizon"), |acc, r| acc.add_resource(r));
        let same = |m: &AfrModel| m.lower() == direct.lower() && m.upper() == direct.upper();
        if !(merged.as_ref().is_ok_and(same) && added.as_ref().is_ok_and(same)) {
            bad += 1;
        }
    }
    verdict(bad == 0, format!("{}/50 partitions: merge and add chains equal the direct build", 50 - bad))
}

fn scaling() -> Verdict {
    let reps = 3;
    let ns = [100, 200, 400, 800];
    let by_n: Vec<f64> = ns.iter().map(|&n| secs(time_build(n, 10, 1, reps).map(|m| m.time))).collect();
    let fit_n = linear_fit(&ns.map(|n| n as f64), &by_n);
    let ts: Vec<usize> = (8..=14).collect();
    let by_t: Vec<f64> = ts.iter().map(|&t| secs(time_build(100, t, 2, reps).map(|m| m.time))).collect();
    let fit_t = exp2_fit(&ts, &by_t);
    let rs = random_fleet(3, 1000, 12);
    let start = Instant::now();
    let big = build_afr_with(&rs, &BuildOptions { threads: Some(1), contributions: false });
    let big_time = start.elapsed();
    let pass = fit_n.r_squared >= 0.95 && fit_t.r_squared >= 0.95 && big.is_ok() && big_time <= Duration::from_secs(60);
    verdict(
        pass,
        format!(
            "R^2 linear in N (T=10) = {:.4}; R^2 of c*2^T (N=100, log) = {:.4}; N=1000 T=12 single-threaded in {:.2}s",
            fit_n.r_squared,
            fit_t.r_squared,
            big_time.as_secs_f64()
        ),
    )
}

fn secs(t: Result<Duration, afr_core::AfrError>) -> f64 {
    t.map_or(f64::NAN, |d| d.as_secs_f64())
}

fn generators() -> Verdict {
    let mut bad = 0;
    let mut checked = 0;
    for k in 0..20u64 {
        let n = 1 + k as usize % 5;
        let horizon = 1 + k as usize % 6;
        let rs = generator_fleet(k, n, horizon);
        let m = build_afr(&rs).expect("generators are valid");
        for t in 1..=horizon {
            let d = DirectionIndex::from_intervals(horizon, &[t]).expect("valid interval");
            let lo: Rational = rs.iter().map(|r: &FlexResource| r.p_lo(t).clone()).sum();
            let hi: Rational = rs.iter().map(|r| r.p_hi(t).clone()).sum();
            checked += 1;
            if m.bounds(&d) != Some((&lo, &hi)) {
                bad += 1;
            }
        }
    }
    verdict(bad == 0, format!("{}/{checked} singleton rows equal the summed power bounds", checked - bad))
}

type Criterion = (&'static str, fn() -> Verdict);

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("oracle equality", oracle_equality),
        ("constraint count", constraint_count),
        ("closed-form calibration", calibration),
        ("soundness sampling", soundness_sampling),
        ("completeness", completeness),
        ("theorem suites", theorem_suites),
        ("merge and incremental algebra", merge_algebra),
        ("scaling shape", scaling),
        ("generator fleets", generators),
    ];
    let mut failed = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let v = run();
        failed += usize::from(!v.pass);
        println!(
            "criterion {} [{name}]: {} ({}; {:.1}s)",
            k + 1,
            if v.pass { "PASS" } else { "FAIL" },
            v.detail,
            start.elapsed().as_secs_f64()
        );
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}
