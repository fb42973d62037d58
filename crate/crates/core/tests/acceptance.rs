//! Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_rational::Ratio;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use finite_bb84::bounds::{
    averaged_eve_info_bound, averaged_success_bound, phase_error_bound, verify_proposition_decoding, BoundInputs,
    DecodingInstance, Direction, SeedSampling,
};
use finite_bb84::channel::{ChannelStrategy, ClassCounts, MultiResponse, PauliWeights};
use finite_bb84::decoy::{
    estimate_interval, estimate_interval_symmetric, estimate_vacuum_single, simulate_observed_rates, ChannelParameters,
    SourceDistribution,
};
use finite_bb84::oracle::ensemble::{run_ensemble, EnsembleConfig};
use finite_bb84::oracle::suite::{run_oracle_suite, SuiteConfig};
use finite_bb84::privacy::universality_profile;
use finite_bb84::protocol::{run_session, EcDirection, SacrificeRule, SessionConfig, SessionStatus, DEFAULT_EC_GUARD};
use finite_bb84::rates::{verify_rate_ordering, Eta, RateInputs, RateTable};

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict {
        pass,
        detail: detail.into(),
    }
}

fn within(elapsed: Duration, limit_secs: u64) -> bool {
    elapsed <= Duration::from_secs(limit_secs)
}

fn toeplitz_universality() -> Verdict {
    let start = Instant::now();
    let mut checked = 0usize;
    let mut failures = Vec::new();
    for l in 1..=10usize {
        for m in 0..=10 - l {
            let profile = universality_profile(l, m).expect("l + m <= 10 is inside the guard");
            let bound = Ratio::new(1u64, 1u64 << m);
            for (z, &frac) in &profile.fractions {
                checked += 1;
                let mask = z.to_mask();
                let x = mask & ((1u64 << m) - 1);
                let y = mask >> m;
                let ok = frac <= bound
                    && (x == 0 || y == 0 || frac == bound)
                    && (y != 0 || x == 0 || frac == Ratio::from_integer(0));
                if !ok {
                    failures.push(format!("l={l} m={m} Z={z} fraction={frac}"));
                }
            }
        }
    }
    let elapsed = start.elapsed();
    verdict(
        failures.is_empty() && within(elapsed, 120),
        format!(
            "{checked} nonzero Z over l+m <= 10, {} mismatches {:?}, {:.2?}",
            failures.len(),
            failures.first(),
            elapsed
        ),
    )
}

fn oracle_dominance() -> Verdict {
    let start = Instant::now();
    let report = run_oracle_suite(&SuiteConfig::default()).expect("default suite is inside the guard");
    let stated = [
        "mutual-information",
        "pair-fidelity",
        "pair-trace-norm",
        "average-fidelity",
        "average-trace-norm",
        "success-probability",
        "dense-mutual-information",
    ];
    let mut parts = Vec::new();
    let mut pass = true;
    for name in stated {
        let row = report.row(name).expect("every stated row is reported");
        pass &= row.holds();
        parts.push(format!(
            "{name}:{}({} viol, worst {:.3e})",
            if row.holds() { "ok" } else { "FAIL" },
            row.violations,
            row.worst_slack
        ));
    }
    let elapsed = start.elapsed();
    verdict(pass && within(elapsed, 300), format!("{}; {:.2?}", parts.join(" "), elapsed))
}

fn decoding_grid() -> Verdict {
    let start = Instant::now();
    let mut grid = Vec::new();
    let mut vacuous = 0usize;
    for n in 1..=10usize {
        for n1 in 0..=n {
            for n2 in 0..=n - n1 {
                for t in 0..=n1 {
                    for code_dim in [n, n - 1] {
                        for m in 0..code_dim {
                            let inst = DecodingInstance {
                                n0: n - n1 - n2,
                                n1,
                                n2,
                                t,
                                code_dim,
                                m,
                                code_seed: n as u64,
                            };
                            // A bound of at least 1 holds for any probability.
                            if inst.bound() < 1.0 {
                                grid.push(inst);
                            } else {
                                vacuous += 1;
                            }
                        }
                    }
                }
            }
        }
    }
    let checks: Vec<_> = grid
        .par_iter()
        .map(|i| verify_proposition_decoding(i, SeedSampling::Exhaustive))
        .collect::<Result<_, _>>()
        .expect("grid is inside the decoding guard");
    let violations = checks.iter().filter(|c| !c.satisfied()).count();
    let min_slack = checks.iter().map(|c| c.slack()).fold(f64::INFINITY, f64::min);
    let elapsed = start.elapsed();
    verdict(
        violations == 0 && min_slack < 0.1 && within(elapsed, 600),
        format!(
            "{} evaluated configs (+{vacuous} with bound >= 1), {violations} violations, min slack {min_slack:.3e}, {:.2?}",
            checks.len(),
            elapsed
        ),
    )
}

fn dark_count_structure() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut violations = 0usize;
    for _ in 0..10_000 {
        let j: [usize; 6] = std::array::from_fn(|_| rng.random_range(0..8));
        let weights: Vec<f64> = (0..=j[1]).map(|_| rng.random::<f64>()).collect();
        let total: f64 = weights.iter().sum();
        let inputs = BoundInputs {
            counts: ClassCounts::from_parts(j, 0),
            m: rng.random_range(0..30),
            l: 1,
            n_bar: 1,
            n_under: 1,
            t_distribution: Some(weights.iter().map(|w| w / total).collect()),
        };
        let [fwd, rev, two] = [Direction::Forward, Direction::Reverse, Direction::TwoWay]
            .map(|d| phase_error_bound(&inputs, d).expect("valid instance"));
        let k2 = |d: Direction| d.untrusted(&j);
        let exponent_ok = k2(Direction::TwoWay) >= k2(Direction::Forward) && k2(Direction::TwoWay) >= k2(Direction::Reverse);
        if !(exponent_ok && two >= fwd && two >= rev) {
            violations += 1;
        }
    }
    verdict(violations == 0, format!("10000 random (J, p(t), m), {violations} violations"))
}

fn strategy(dark: f64, single_yield: f64, bit: f64, phase: f64, vacuum: f64, multi: f64, flip: f64) -> ChannelStrategy {
    ChannelStrategy {
        dark_count: dark,
        vacuum_yield: vacuum,
        single_yield,
        single_errors: PauliWeights::independent(bit, phase),
        multi_plus: MultiResponse { yield_: multi, flip },
        multi_times: MultiResponse { yield_: multi, flip },
        mode: Default::default(),
    }
}

fn averaged_bounds() -> Verdict {
    let start = Instant::now();
    let strategies = [
        strategy(0.0, 0.9, 0.05, 0.1, 0.2, 0.9, 0.0),
        strategy(0.05, 0.6, 0.0, 0.25, 0.3, 0.9, 0.5),
        strategy(0.1, 0.8, 0.1, 0.05, 0.5, 0.5, 0.2),
        strategy(0.02, 0.98, 0.0, 0.0, 0.0, 0.98, 0.0),
    ];
    let mut configs = Vec::new();
    for (i, s) in strategies.iter().enumerate() {
        for direction in Direction::ALL {
            configs.push(EnsembleConfig {
                positions: 8,
                redundancy: 2,
                n_under: 2,
                n_bar: 4,
                class_probs: [0.2, 0.7, 0.1],
                strategy: s.clone(),
                direction,
                sessions: 1000,
                seed: 100 + i as u64,
            });
        }
    }
    let results: Vec<(f64, f64)> = configs
        .par_iter()
        .map(|cfg| {
            let summary = run_ensemble(cfg).expect("ensemble config is valid");
            let p = summary.mean_phase_error;
            let info_slack = averaged_eve_info_bound(p, cfg.n_bar).unwrap() - summary.mean_eve_info;
            let success_slack = averaged_success_bound(p, cfg.n_under).unwrap() - summary.mean_success;
            (info_slack, success_slack)
        })
        .collect();
    let ensemble_violations = results.iter().filter(|(a, b)| *a < -1e-9 || *b < -1e-9).count();
    let worst = results.iter().map(|(a, b)| a.min(*b)).fold(f64::INFINITY, f64::min);

    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut shape_violations = 0usize;
    for _ in 0..1000 {
        let (a, b, lam): (f64, f64, f64) = (rng.random(), rng.random(), rng.random());
        let (lo, hi) = (a.min(b), a.max(b));
        let n_bar = rng.random_range(1..20);
        let n_under = rng.random_range(1..20);
        let q_top = 1.0 - 0.5f64.powi(n_under as i32);
        let f = |x: f64| averaged_eve_info_bound(x, n_bar).unwrap();
        let g = |x: f64| averaged_success_bound(x, n_under).unwrap();
        let mid = lam * a + (1.0 - lam) * b;
        let concave = f(mid) >= lam * f(a) + (1.0 - lam) * f(b) - 1e-12 && g(mid) >= lam * g(a) + (1.0 - lam) * g(b) - 1e-12;
        let monotone = f(lo) <= f(hi) + 1e-12 && g(lo * q_top) <= g(hi * q_top) + 1e-12;
        if !(concave && monotone) {
            shape_violations += 1;
        }
    }
    let elapsed = start.elapsed();
    verdict(
        ensemble_violations == 0 && shape_violations == 0,
        format!(
            "{} ensembles x 1000 sessions, {ensemble_violations} violations (worst slack {worst:.3e}); 1000 triples, {shape_violations} shape violations; {:.2?}",
            configs.len(),
            elapsed
        ),
    )
}

fn random_params<R: Rng>(rng: &mut R, p_d: f64, symmetric: bool) -> ChannelParameters {
    let mut p = ChannelParameters {
        q1: rng.random_range(0.0..1.0 - p_d),
        r1_x: rng.random_range(0.0..0.5),
        r1_plus: rng.random_range(0.0..0.5),
        q2_x: rng.random_range(0.0..1.0 - p_d),
        q2_plus: rng.random_range(0.0..1.0 - p_d),
        r2_x: rng.random(),
        r2_plus: rng.random(),
    };
    if symmetric {
        p.r1_plus = p.r1_x;
        p.q2_plus = p.q2_x;
        p.r2_plus = p.r2_x;
    }
    p
}

fn random_nu<R: Rng>(rng: &mut R, multi: bool) -> SourceDistribution {
    let n0 = rng.random_range(0.0..0.5);
    let n2 = if multi { rng.random_range(0.01..0.4) } else { 0.0 };
    SourceDistribution::new([n0, 1.0 - n0 - n2, n2]).unwrap()
}

fn decoy_round_trip() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut exact_err = 0.0f64;
    let mut bracket_failures = 0usize;
    let mut width_err = 0.0f64;
    for _ in 0..1000 {
        let p_d = rng.random_range(0.0..0.05);
        let p0 = p_d + rng.random_range(0.0..0.05);
        let nu = random_nu(&mut rng, false);
        let truth = random_params(&mut rng, p_d, false);
        let est = estimate_vacuum_single(&nu, &truth.observed(&nu, p0, p_d)).unwrap();
        exact_err = exact_err.max((est.q1 - truth.q1).abs()).max((est.r1 - truth.r1_x).abs());

        let nu = random_nu(&mut rng, true);
        let truth = random_params(&mut rng, p_d, false);
        let iv = estimate_interval(&nu, &truth.observed(&nu, p0, p_d)).unwrap();
        let eps = 1e-12;
        if !(iv.q1_min - eps <= truth.q1
            && truth.q1 <= iv.q1_max + eps
            && iv.r1_min_tilde - eps <= truth.r1_x
            && truth.r1_x <= iv.r1_max + eps)
        {
            bracket_failures += 1;
        }

        let truth = random_params(&mut rng, p_d, true);
        let obs = truth.observed(&nu, p0, p_d);
        if let Ok(sym) = estimate_interval_symmetric(&nu, &obs) {
            let expected = nu.nu[2] * (1.0 - p_d) / nu.nu[1];
            width_err = width_err
                .max(((sym.q1_max - sym.q1_min) - expected).abs())
                .max((sym.q_width_bound - expected).abs());
        }
    }

    let mut worst_sigma = 0.0f64;
    let pulses = 1_000_000;
    for trial in 0..4 {
        let p_d = 0.01;
        let p0 = 0.02;
        let nu = random_nu(&mut rng, false);
        let mut truth = random_params(&mut rng, p_d, false);
        truth.q1 = 0.2 + 0.2 * trial as f64;
        let obs = simulate_observed_rates(&nu, &truth, p0, p_d, pulses, &mut rng).unwrap();
        let est = estimate_vacuum_single(&nu, &obs).unwrap();
        let exact = truth.observed(&nu, p0, p_d);
        let n = pulses as f64;
        let (p, e) = (exact.p_nu_x, exact.s_nu_x * exact.p_nu_x);
        let [n0, n1, _] = nu.nu;
        let d = n0 * p0 + n1 * p_d;
        let sigma_q = (p * (1.0 - p) / n).sqrt() / n1;
        let r = truth.r1_x;
        let var_r = (e * (1.0 - e) + r * r * p * (1.0 - p) - 2.0 * r * e * (1.0 - p)) / n;
        let sigma_r = var_r.max(0.0).sqrt() / (p - d);
        worst_sigma = worst_sigma
            .max((est.q1 - truth.q1).abs() / sigma_q)
            .max((est.r1 - truth.r1_x).abs() / sigma_r);
    }
    verdict(
        exact_err <= 1e-12 && bracket_failures == 0 && width_err <= 1e-12 && worst_sigma <= 5.0,
        format!(
            "exact round trip err {exact_err:.2e}; {bracket_failures} bracket failures in 1000; width err {width_err:.2e}; MC worst {worst_sigma:.2} sigma at 1e6 pulses"
        ),
    )
}

fn akg_ordering() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut violations = 0usize;
    let mut degenerate_failures = 0usize;
    let mut worst = f64::INFINITY;
    let chain = [
        "I_fwd >= Ibar_fwd",
        "Ibar_fwd >= I_GLLP",
        "I_rev >= I_two",
        "I_two >= Ibar_rev",
        "Ibar_rev >= I_GLLP",
        "I_fwd >= I_two",
    ];
    for _ in 0..10_000 {
        let multi = rng.random_bool(0.5);
        let nu = random_nu(&mut rng, multi);
        let p_d = if rng.random_bool(0.2) { 0.0 } else { rng.random_range(0.0..0.05) };
        let inputs = RateInputs {
            nu,
            q1: rng.random_range(0.0..1.0 - p_d),
            r1: rng.random_range(0.0..0.6),
            p0: p_d + rng.random_range(0.0..0.1),
            p_d,
            p_nu_plus: rng.random_range(0.001..1.0),
            s_nu_plus: rng.random_range(0.0..0.5),
            eta: match rng.random_range(0..3) {
                0 => Eta::Shannon,
                1 => Eta::Efficiency { f: 1.16 },
                _ => Eta::Constant { eta: rng.random() },
            },
        };
        if inputs.q1 + p_d == 0.0 {
            continue;
        }
        let report = verify_rate_ordering(&inputs).unwrap();
        for check in report.checks.iter().filter(|c| chain.contains(&c.relation.as_str())) {
            worst = worst.min(check.slack);
            if !check.holds(1e-12) {
                violations += 1;
            }
        }
        if p_d == 0.0 {
            let t: RateTable = report.rates;
            if !(t.bar_reverse == t.reverse && t.twoway == t.reverse && t.bar_forward == t.forward) {
                degenerate_failures += 1;
            }
        }
    }
    verdict(
        violations == 0 && degenerate_failures == 0,
        format!("10000 draws, {violations} chain violations (worst slack {worst:.3e}), {degenerate_failures} inexact pD=0 degeneracies"),
    )
}

fn base_session() -> SessionConfig {
    SessionConfig {
        n: 64,
        n_bar: 48,
        n_under: 8,
        n_prime: 512,
        k: 1,
        nus: vec![[0.0, 1.0, 0.0]],
        i0: 1,
        p_bar: vec![0.1, 0.45, 0.45],
        p_d: 0.0,
        p_s: 0.0,
        p_s_tilde: 0.0,
        eta: Eta::Shannon,
        m_rule: SacrificeRule::DecoyEstimate {
            margin: 4,
            resolution: 1e-3,
        },
        ec_direction: EcDirection::Forward,
        rng_seed: 2024,
        ec_guard: DEFAULT_EC_GUARD,
    }
}

fn protocol_end_to_end() -> Verdict {
    let start = Instant::now();
    let noiseless = ChannelStrategy::noiseless();
    let mut notes = Vec::new();
    let mut pass = true;
    for direction in [EcDirection::Forward, EcDirection::Reverse] {
        let mut cfg = base_session();
        cfg.ec_direction = direction;
        let out = run_session(&cfg, &noiseless).unwrap();
        let ok = out.completed()
            && out.keys_equal
            && out.final_key_plus().is_some_and(|k| k.alice == k.bob)
            && out.final_key_times().is_some_and(|k| k.alice == k.bob);
        pass &= ok;
        notes.push(format!("{direction:?} completed={ok}"));
    }

    let mut branches = Vec::new();
    let aborted = |cfg: &SessionConfig, s: &ChannelStrategy, step: u8, prefix: &str| {
        matches!(run_session(cfg, s).unwrap().status,
            SessionStatus::Aborted { step: st, ref reason } if st == step && reason.starts_with(prefix))
    };
    let mut multi_only = base_session();
    multi_only.nus = vec![[0.0, 0.0, 1.0]];
    multi_only.m_rule = SacrificeRule::Fixed { plus: 0, times: 0 };
    let mut lose_times = noiseless.clone();
    lose_times.multi_times.yield_ = 0.0;
    branches.push(("step4 E_i0", aborted(&multi_only, &lose_times, 4, "E1=")));
    let mut lose_plus = noiseless.clone();
    lose_plus.multi_plus.yield_ = 0.0;
    branches.push(("step4 E_i0+k", aborted(&multi_only, &lose_plus, 4, "E2=")));
    let mut short = base_session();
    short.m_rule = SacrificeRule::Fixed { plus: 60, times: 0 };
    branches.push(("step6 plus", aborted(&short, &noiseless, 6, "basis=+ key length")));
    short.m_rule = SacrificeRule::Fixed { plus: 0, times: 60 };
    branches.push(("step6 times", aborted(&short, &noiseless, 6, "basis=x key length")));
    let mut bad_decoy = base_session();
    bad_decoy.p_d = 0.9;
    branches.push(("step6 decoy", aborted(&bad_decoy, &noiseless, 6, "basis=+ decoy estimate failed")));
    let missing: Vec<_> = branches.iter().filter(|b| !b.1).map(|b| b.0).collect();
    pass &= missing.is_empty();

    let mut noisy = strategy(0.01, 0.6, 0.03, 0.03, 0.1, 0.8, 0.1);
    noisy.single_errors = PauliWeights::independent(0.03, 0.03);
    let mut cfg = base_session();
    cfg.nus = vec![[0.1, 0.8, 0.1]];
    cfg.n = 32;
    cfg.n_bar = 24;
    cfg.n_under = 1;
    cfg.n_prime = 2000;
    cfg.p_d = 0.01;
    cfg.m_rule = SacrificeRule::Fixed { plus: 4, times: 4 };
    let a = run_session(&cfg, &noisy).unwrap();
    let b = run_session(&cfg, &noisy).unwrap();
    let identical = a.transcript.to_string().into_bytes() == b.transcript.to_string().into_bytes() && a == b;
    pass &= identical;

    let elapsed = start.elapsed();
    pass &= within(elapsed, 60);
    verdict(
        pass,
        format!(
            "{}; abort branches {}/{} hit {missing:?} missing; deterministic transcripts {identical}; {:.2?}",
            notes.join(", "),
            branches.len() - missing.len(),
            branches.len(),
            elapsed
        ),
    )
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Verdict); 8] = [
        ("toeplitz-universality", toeplitz_universality),
        ("oracle-dominance", oracle_dominance),
        ("decoding-grid", decoding_grid),
        ("dark-count-structure", dark_count_structure),
        ("averaged-bounds", averaged_bounds),
        ("decoy-round-trip", decoy_round_trip),
        ("akg-ordering", akg_ordering),
        ("protocol-end-to-end", protocol_end_to_end),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let v = run();
        if !v.pass {
            failed += 1;
        }
        println!("{} [{}] {name}: {}", if v.pass { "PASS" } else { "FAIL" }, i + 1, v.detail);
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
