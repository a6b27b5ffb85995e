//! LP checks of the redundancy claims on concrete instances.
//!
//! Every check starts from a row produced by a random chain of SA and RA
//! steps from the trivial row at the last interval, so its shape is one the
//! elimination actually generates.

use rand::seq::SliceRandom;
use rand::Rng;
use serde::Serialize;

use super::bounds::{psi_row, psi_sign};
use super::{members, Calculus, Group, Symbol, SymbolicInequality, TheoremError};
use crate::afr::{build_afr, DirectionIndex};
use crate::flex::ResourceSet;
use crate::fme::joint_system;
use crate::gen::{random_fleet, seeded, SeededRng};
use crate::linear::{Constraint, Relation};
use crate::rational::Rational;

/// Variable index of a symbol in the joint system's layout.
pub fn joint_index(rs: &ResourceSet) -> impl Fn(Symbol) -> usize + Copy {
    let (n, horizon) = (rs.len(), rs.horizon());
    move |s| match s {
        Symbol::Energy { resource, t } => (t - 1) * n + resource,
        Symbol::Aggregate { t } => n * horizon + t - 1,
    }
}

/// Both sides of `target` follow from `family` plus `extra` rows.
fn implied(rs: &ResourceSet, family: &[SymbolicInequality], extra: &[Constraint], target: &SymbolicInequality) -> bool {
    if !target.has_symbols() {
        return *target.lower() <= Rational::default() && Rational::default() <= *target.upper();
    }
    let mut sys = joint_system(rs).with_rows(Vec::new());
    let index = joint_index(rs);
    for f in family {
        for row in f.rows(index) {
            if sys.push(row).is_err() {
                // a false constant row: the family is empty and implies everything
                return true;
            }
        }
    }
    for row in extra {
        sys.push(row.clone()).expect("extra rows are well formed");
    }
    target.rows(index).iter().all(|row| sys.implies(row))
}

/// `target` follows from the full joint system.
pub fn is_sound(rs: &ResourceSet, target: &SymbolicInequality) -> bool {
    let sys = joint_system(rs);
    if !target.has_symbols() {
        return *target.lower() <= Rational::default() && Rational::default() <= *target.upper();
    }
    target.rows(joint_index(rs)).iter().all(|row| sys.implies(row))
}

/// Energy rows `e_lo(t) ≤ e_i(t) ≤ e_hi(t)` of every resource (none for `t = 0`).
fn energy_rows(rs: &ResourceSet, t: usize) -> Vec<Constraint> {
    if t == 0 {
        return Vec::new();
    }
    let index = joint_index(rs);
    let one = Rational::from_integer(1.into());
    rs.iter()
        .enumerate()
        .flat_map(|(i, r)| {
            let v = index(Symbol::Energy { resource: i, t });
            [
                Constraint::new([(v, one.clone())], Relation::Ge, r.e_lo(t).clone()),
                Constraint::new([(v, one.clone())], Relation::Le, r.e_hi(t).clone()),
            ]
        })
        .collect()
}

/// A row whose interval-`t` group is `group`.
#[derive(Debug, Clone)]
pub struct Start {
    pub row: SymbolicInequality,
    pub group: Group,
    pub t: usize,
}

fn random_subset(rng: &mut SeededRng, of: Group) -> Group {
    members(of).filter(|_| rng.gen_bool(0.5)).fold(0, |g, i| g | 1 << i)
}

fn random_nonempty(rng: &mut SeededRng, of: Group) -> Option<Group> {
    if of == 0 {
        return None;
    }
    loop {
        let g = random_subset(rng, of);
        if g != 0 {
            return Some(g);
        }
    }
}

/// Random nonempty strict subset.
fn random_proper(rng: &mut SeededRng, of: Group) -> Option<Group> {
    if of.count_ones() < 2 {
        return None;
    }
    loop {
        let g = random_subset(rng, of);
        if g != 0 && g != of {
            return Some(g);
        }
    }
}

/// Applies `op` with sign `−1` to a row whose interval group is empty.
fn with_sign(
    f: &SymbolicInequality,
    negative: bool,
    op: impl Fn(&SymbolicInequality) -> Result<SymbolicInequality, TheoremError>,
) -> Result<SymbolicInequality, TheoremError> {
    if negative {
        Ok(op(&f.negated())?.negated())
    } else {
        op(f)
    }
}

/// One random SA or RA step at interval `u`; returns the new row and its group at `u − 1`.
fn random_step(
    calc: &Calculus,
    rng: &mut SeededRng,
    f: &SymbolicInequality,
    x: Group,
    u: usize,
) -> Result<(SymbolicInequality, Group), TheoremError> {
    let all = calc.everyone();
    let negative = x == 0 && rng.gen_bool(0.5);
    if rng.gen_bool(0.5) || x == 0 {
        let y = random_subset(rng, all & !x);
        Ok((with_sign(f, negative, |g| calc.apply_sa(g, x, y, u))?, y))
    } else {
        let y = random_subset(rng, x);
        Ok((with_sign(f, negative, |g| calc.apply_ra(g, x, y, u))?, y))
    }
}

/// Rows of a random chain from the trivial row at `T` down to interval `t`, first to last.
pub fn random_chain(
    calc: &Calculus,
    rng: &mut SeededRng,
    t: usize,
) -> Result<Vec<(SymbolicInequality, Group)>, TheoremError> {
    let horizon = calc.resources().horizon();
    let mut out = Vec::new();
    let (mut f, mut x) = (SymbolicInequality::trivial(), 0);
    for u in (t + 1..=horizon).rev() {
        (f, x) = random_step(calc, rng, &f, x, u)?;
        out.push((f.clone(), x));
    }
    Ok(out)
}

/// A chain end at interval `t` whose group satisfies `accept`.
pub fn random_start(calc: &Calculus, rng: &mut SeededRng, t: usize, accept: impl Fn(Group) -> bool) -> Option<Start> {
    for _ in 0..400 {
        let chain = random_chain(calc, rng, t).ok()?;
        if let Some((row, group)) = chain.last() {
            if accept(*group) {
                return Some(Start { row: row.clone(), group: *group, t });
            }
        }
    }
    None
}

/// Method 1: the power-energy combination of one resource is implied by its energy rows at `t − 1`.
pub fn check_method1_redundancy(rs: &ResourceSet, t: usize) -> bool {
    rs.iter().enumerate().all(|(i, r)| {
        let mut row = SymbolicInequality::new(r.e_lo(t) - r.p_hi(t), r.e_hi(t) - r.p_lo(t));
        row.add_term(Symbol::Energy { resource: i, t: t - 1 }, Rational::from_integer(1.into()));
        implied(rs, &[], &energy_rows(rs, t - 1), &row)
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Theorem1Variant {
    SpRa,
    RpSa,
    Loop,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Theorem1Config {
    /// SP to `target` (power rows `wp`), then RA with power rows `vp`.
    SpRa { target: Group, wp: Group, vp: Group },
    /// RP to `target` (power rows `wp`), then SA with power rows `vp`.
    RpSa { target: Group, wp: Group, vp: Group },
    /// SP, RP, SP, then RA.
    Loop { steps: [(Group, Group); 3], vp: Group },
}

pub fn sample_theorem1(
    calc: &Calculus,
    rng: &mut SeededRng,
    variant: Theorem1Variant,
) -> Option<(Start, Theorem1Config)> {
    let all = calc.everyone();
    let horizon = calc.resources().horizon();
    if horizon < 2 {
        return None;
    }
    for _ in 0..50 {
        let t = rng.gen_range(1..horizon);
        match variant {
            Theorem1Variant::SpRa => {
                let Some(s) = random_start(calc, rng, t, |x| (all & !x).count_ones() >= 2) else { continue };
                let target = s.group | random_proper(rng, all & !s.group)?;
                let wp = random_subset(rng, target & !s.group);
                let vp = random_subset(rng, target);
                return Some((s, Theorem1Config::SpRa { target, wp, vp }));
            }
            Theorem1Variant::RpSa => {
                let Some(s) = random_start(calc, rng, t, |x| x.count_ones() >= 2) else { continue };
                let target = random_proper(rng, s.group)?;
                let wp = random_subset(rng, s.group & !target);
                let vp = random_subset(rng, all & !target);
                return Some((s, Theorem1Config::RpSa { target, wp, vp }));
            }
            Theorem1Variant::Loop => {
                let Some(s) = random_start(calc, rng, t, |x| (all & !x).count_ones() >= 2) else { continue };
                let first = s.group | random_proper(rng, all & !s.group)?;
                let Some(second) = random_proper(rng, first) else { continue };
                let Some(extra) = random_proper(rng, all & !second) else { continue };
                let third = second | extra;
                let steps = [
                    (first, random_subset(rng, first & !s.group)),
                    (second, random_subset(rng, first & !second)),
                    (third, random_subset(rng, third & !second)),
                ];
                let vp = random_subset(rng, third);
                return Some((s, Theorem1Config::Loop { steps, vp }));
            }
        }
    }
    None
}

/// The composite chain is implied by a direct operation plus the energy rows at `t − 1`.
pub fn check_theorem1(calc: &Calculus, start: &Start, cfg: &Theorem1Config) -> Result<bool, TheoremError> {
    let (f, x, t) = (&start.row, start.group, start.t);
    let rs = calc.resources();
    let all = calc.everyone();
    let extra = energy_rows(rs, t - 1);
    match cfg {
        Theorem1Config::SpRa { target, wp, vp } => {
            let chain = calc.apply_ra(&calc.apply_sp(f, x, *target, *wp, t)?, *target, *vp, t)?;
            let direct = calc.apply_ra(f, x, vp & x, t)?;
            Ok(implied(rs, &[direct], &extra, &chain))
        }
        Theorem1Config::RpSa { target, wp, vp } => {
            let chain = calc.apply_sa(&calc.apply_rp(f, x, *target, *wp, t)?, *target, *vp, t)?;
            let direct = calc.apply_sa(f, x, vp & !x & all, t)?;
            Ok(implied(rs, &[direct], &extra, &chain))
        }
        Theorem1Config::Loop { steps, vp } => {
            let [(a, wa), (b, wb), (c, wc)] = *steps;
            let g = calc.apply_sp(f, x, a, wa, t)?;
            let g = calc.apply_rp(&g, a, b, wb, t)?;
            let g = calc.apply_sp(&g, b, c, wc, t)?;
            let chain = calc.apply_ra(&g, c, *vp, t)?;
            for y in 0..=x {
                if y & !x == 0 && implied(rs, &[calc.apply_ra(f, x, y, t)?], &extra, &chain) {
                    return Ok(true);
                }
            }
            Ok(false)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Theorem2Case {
    A,
    B,
    C,
    D,
}

pub fn sample_theorem2(calc: &Calculus, rng: &mut SeededRng, case: Theorem2Case) -> Option<(Start, Group, Group)> {
    let all = calc.everyone();
    let horizon = calc.resources().horizon();
    if horizon < 3 {
        return None;
    }
    for _ in 0..50 {
        let t = rng.gen_range(2..horizon);
        let sa_first = matches!(case, Theorem2Case::A | Theorem2Case::B);
        let accept = |x: Group| if sa_first { all & !x != 0 } else { x != 0 };
        let Some(s) = random_start(calc, rng, t, accept) else { continue };
        let y = random_nonempty(rng, if sa_first { all & !s.group } else { s.group })?;
        let z = match case {
            Theorem2Case::A | Theorem2Case::C => random_subset(rng, all & !y),
            Theorem2Case::B | Theorem2Case::D => random_subset(rng, y),
        };
        return Some((s, y, z));
    }
    None
}

/// The two-step chain and the replacement chain named by the case; returns `(chain, replacement)`.
pub fn theorem2_rows(
    calc: &Calculus,
    start: &Start,
    case: Theorem2Case,
    y: Group,
    z: Group,
) -> Result<(SymbolicInequality, SymbolicInequality), TheoremError> {
    let (f, x, t) = (&start.row, start.group, start.t);
    let all = calc.everyone();
    let sigma = f.energy_group(t)?.1.unwrap_or(1);
    match case {
        Theorem2Case::A => {
            let chain = calc.apply_sa(&calc.apply_sa(f, x, y, t)?, y, z, t - 1)?;
            let first = calc.apply_sa(f, x, all & !(x | z), t)?;
            let filled = calc.supplement_energy(&first, x & !z, t - 1, -sigma)?;
            Ok((chain, calc.apply_sa(&filled, all & !z, z, t - 1)?))
        }
        Theorem2Case::B => {
            let chain = calc.apply_ra(&calc.apply_sa(f, x, y, t)?, y, z, t - 1)?;
            let repl = calc.apply_ra(&calc.apply_sa(f, x, z, t)?, z, z, t - 1)?;
            Ok((chain, repl))
        }
        Theorem2Case::C => {
            let chain = calc.apply_sa(&calc.apply_ra(f, x, y, t)?, y, z, t - 1)?;
            let first = calc.apply_ra(f, x, x & !z, t)?;
            let filled = calc.supplement_energy(&first, all & !x & !z, t - 1, sigma)?;
            Ok((chain, calc.apply_sa(&filled, all & !z, z, t - 1)?))
        }
        Theorem2Case::D => {
            let chain = calc.apply_ra(&calc.apply_ra(f, x, y, t)?, y, z, t - 1)?;
            let repl = calc.apply_ra(&calc.apply_ra(f, x, z, t)?, z, z, t - 1)?;
            Ok((chain, repl))
        }
    }
}

/// The two-step chain is implied by the replacement chain alone.
pub fn check_theorem2(
    calc: &Calculus,
    start: &Start,
    case: Theorem2Case,
    y: Group,
    z: Group,
) -> Result<bool, TheoremError> {
    let (chain, repl) = theorem2_rows(calc, start, case, y, z)?;
    Ok(implied(calc.resources(), &[repl], &[], &chain))
}

/// A ψ-row pair at depth `q` for Theorem 3.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Theorem3Config {
    pub la: DirectionIndex,
    pub lb: DirectionIndex,
    pub xa: Group,
    pub xb: Group,
    pub j: usize,
}

/// Directions at depth `q` with indicator `indicator`.
fn directions_at(horizon: usize, q: usize, indicator: i8) -> Vec<DirectionIndex> {
    (1..1u64 << horizon)
        .filter_map(|m| DirectionIndex::at_depth(horizon, q, m).ok())
        .filter(|d| d.indicator() == indicator)
        .collect()
}

pub fn sample_theorem3(rs: &ResourceSet, rng: &mut SeededRng, ia: i8, ib: i8) -> Option<(usize, Theorem3Config)> {
    let (horizon, all) = (rs.horizon(), (1u64 << rs.len()) - 1);
    let min_q = if ia < 0 || ib < 0 { 2 } else { 1 };
    if horizon < min_q + 1 || all == 0 {
        return None;
    }
    let q = rng.gen_range(min_q..horizon);
    let la = *directions_at(horizon, q, ia).choose(rng)?;
    let lb = *directions_at(horizon, q, ib).choose(rng)?;
    let j = rng.gen_range(0..rs.len());
    let xa = random_subset(rng, all) | 1 << j;
    let xb = random_subset(rng, all) | 1 << j;
    Some((q, Theorem3Config { la, lb, xa, xb, j }))
}

/// Combination of the two ψ rows that cancels `e_j(t)`.
pub fn theorem3_combination(rs: &ResourceSet, cfg: &Theorem3Config) -> Result<SymbolicInequality, TheoremError> {
    if cfg.xa & cfg.xb & (1 << cfg.j) == 0 {
        return Err(TheoremError::Precondition("j must lie in both groups".into()));
    }
    if cfg.la.depth() != cfg.lb.depth() {
        return Err(TheoremError::Precondition("both directions must share the depth".into()));
    }
    let (a, b) = (psi_row(&cfg.la, cfg.xa, rs), psi_row(&cfg.lb, cfg.xb, rs));
    Ok(if psi_sign(&cfg.la) == psi_sign(&cfg.lb) { a.plus(&b.negated()) } else { a.plus(&b) })
}

/// The combination is implied by every ψ row at that depth, the energy rows
/// at `t` and the rows of the AFR.
pub fn check_theorem3(rs: &ResourceSet, cfg: &Theorem3Config) -> Result<bool, TheoremError> {
    let combined = theorem3_combination(rs, cfg)?;
    let (horizon, q) = (rs.horizon(), cfg.la.depth());
    let all = (1u64 << rs.len()) - 1;
    let mut family = Vec::new();
    for d in (1..1u64 << horizon).filter_map(|m| DirectionIndex::at_depth(horizon, q, m).ok()) {
        for x in 0..=all {
            family.push(psi_row(&d, x, rs));
        }
    }
    let model = build_afr(rs).map_err(|e| TheoremError::Precondition(e.to_string()))?;
    for (d, lo, hi) in model.rows() {
        let mut row = SymbolicInequality::new(lo.clone(), hi.clone());
        for (k, c) in d.coefficients().into_iter().enumerate() {
            if c != 0 {
                row.add_term(Symbol::Aggregate { t: k + 1 }, Rational::from_integer(c.into()));
            }
        }
        family.push(row);
    }
    Ok(implied(rs, &family, &energy_rows(rs, cfg.la.elimination_interval()), &combined))
}

/// Every row of a random chain to interval 1 is implied by the joint system
/// and keeps a uniform sign on its newest interval.
pub fn check_soundness(calc: &Calculus, rng: &mut SeededRng) -> Result<bool, TheoremError> {
    let chain = random_chain(calc, rng, 0)?;
    for (k, (row, _)) in chain.iter().enumerate() {
        let t = calc.resources().horizon() - k - 1;
        if row.energy_group(t).is_err() || !is_sound(calc.resources(), row) {
            return Ok(false);
        }
    }
    Ok(true)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CheckRecord {
    pub check: String,
    pub seed: u64,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

#[derive(Debug, Clone)]
pub struct SuiteOptions {
    pub seeds: u64,
    pub first_seed: u64,
    /// `(N, T)` pairs cycled over seeds; checks skip sizes they cannot use.
    pub sizes: Vec<(usize, usize)>,
    pub mutant: bool,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        SuiteOptions { seeds: 100, first_seed: 0, sizes: vec![(2, 3), (3, 3), (2, 4), (3, 4)], mutant: false }
    }
}

/// Names of every check in suite order.
pub const CHECKS: [&str; 13] = [
    "soundness",
    "method1",
    "theorem1-sp-ra",
    "theorem1-rp-sa",
    "theorem1-loop",
    "theorem2-a",
    "theorem2-b",
    "theorem2-c",
    "theorem2-d",
    "theorem3-plus-plus",
    "theorem3-plus-minus",
    "theorem3-minus-plus",
    "theorem3-minus-minus",
];

fn admits(check: &str, n: usize, horizon: usize) -> bool {
    match check {
        "soundness" | "method1" => n >= 1 && horizon >= 1,
        "theorem1-sp-ra" | "theorem1-rp-sa" => n >= 2 && horizon >= 2,
        "theorem1-loop" => n >= 3 && horizon >= 2,
        c if c.starts_with("theorem2") => n >= 1 && horizon >= 3,
        "theorem3-plus-plus" => n >= 1 && horizon >= 2,
        c if c.starts_with("theorem3") => n >= 1 && horizon >= 3,
        _ => false,
    }
}

/// Stable per-check offset so different checks see different instances.
fn check_salt(check: &str) -> u64 {
    check.bytes().fold(0xcbf29ce484222325u64, |h, b| (h ^ b as u64).wrapping_mul(0x100000001b3))
}

fn run_one(check: &str, seed: u64, rs: &ResourceSet, mutant: bool) -> Result<bool, String> {
    let calc = Calculus::with_mutant(rs, mutant);
    let mut rng = seeded(seed ^ check_salt(check));
    let none = || "no admissible configuration".to_string();
    let err = |e: TheoremError| e.to_string();
    match check {
        "soundness" => check_soundness(&calc, &mut rng).map_err(err),
        "method1" => Ok((1..=rs.horizon()).all(|t| check_method1_redundancy(rs, t))),
        "theorem1-sp-ra" | "theorem1-rp-sa" | "theorem1-loop" => {
            let variant = match check {
                "theorem1-sp-ra" => Theorem1Variant::SpRa,
                "theorem1-rp-sa" => Theorem1Variant::RpSa,
                _ => Theorem1Variant::Loop,
            };
            let (start, cfg) = sample_theorem1(&calc, &mut rng, variant).ok_or_else(none)?;
            check_theorem1(&calc, &start, &cfg).map_err(err)
        }
        "theorem2-a" | "theorem2-b" | "theorem2-c" | "theorem2-d" => {
            let case = match check {
                "theorem2-a" => Theorem2Case::A,
                "theorem2-b" => Theorem2Case::B,
                "theorem2-c" => Theorem2Case::C,
                _ => Theorem2Case::D,
            };
            let (start, y, z) = sample_theorem2(&calc, &mut rng, case).ok_or_else(none)?;
            check_theorem2(&calc, &start, case, y, z).map_err(err)
        }
        _ => {
            let (ia, ib) = match check {
                "theorem3-plus-plus" => (1, 1),
                "theorem3-plus-minus" => (1, -1),
                "theorem3-minus-plus" => (-1, 1),
                _ => (-1, -1),
            };
            let (_, cfg) = sample_theorem3(rs, &mut rng, ia, ib).ok_or_else(none)?;
            check_theorem3(rs, &cfg).map_err(err)
        }
    }
}

/// Runs every check over `seeds` seeds; one record per (check, seed).
pub fn run_suite(opts: &SuiteOptions) -> Vec<CheckRecord> {
    run_checks(opts, &CHECKS)
}

pub fn run_checks(opts: &SuiteOptions, checks: &[&str]) -> Vec<CheckRecord> {
    let mut out = Vec::new();
    for &check in checks {
        let sizes: Vec<(usize, usize)> = opts.sizes.iter().copied().filter(|&(n, t)| admits(check, n, t)).collect();
        for seed in opts.first_seed..opts.first_seed + opts.seeds {
            let record =
                |pass: bool, detail: Option<String>| CheckRecord { check: check.to_string(), seed, pass, detail };
            let Some(&(n, horizon)) = sizes.get(seed as usize % sizes.len().max(1)) else {
                out.push(record(false, Some("no admissible size".into())));
                continue;
            };
            let rs = random_fleet(seed ^ check_salt(check).rotate_left(17), n, horizon);
            out.push(match run_one(check, seed, &rs, opts.mutant) {
                Ok(pass) => record(pass, (!pass).then(|| format!("N={n} T={horizon}"))),
                Err(e) => record(false, Some(e)),
            });
        }
    }
    out
}

/// `[{"check", "seed", "pass"}, ...]`, pretty-printed.
pub fn report_to_json(records: &[CheckRecord]) -> String {
    let mut out = serde_json::to_string_pretty(records).expect("serializable records");
    out.push('\n');
    out
}
