//! Acceptance suite: one test per criterion, each printing a PASS line with
//! the measured quantities (run with `--nocapture` to see them). Tolerances
//! are pinned here, not configurable.

mod common;

use std::time::Instant;

use common::{hausdorff, random_rational, spectrum_graph};
use koch_core::{
    curve, dynamics, estimators, measure, Digit, ModelParams, Rational, SymbolicPoint,
    CLASSIC_LAMBDA,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn rat(n: i64, d: i64) -> Rational {
    Rational::new(n, d).unwrap()
}

#[test]
fn criterion_01_dimension_equation() {
    let start = Instant::now();
    let s = measure::infinite_derivative_dimension();
    let elapsed = start.elapsed();
    let residual = 2.0 * 3f64.powf(-s) + 6f64.powf(-s) - 1.0;
    assert!(s >= 0.8528 && s <= 0.8538, "dimension {s} outside [0.8528, 0.8538]");
    assert!(residual.abs() <= 1e-12, "residual {residual}");
    assert!(elapsed.as_micros() < 1000, "solve took {elapsed:?}, budget 1 ms");
    println!(
        "criterion 01: PASS  dimension {s:.6}, residual {residual:.2e}, solved in {elapsed:?}"
    );
}

#[test]
fn criterion_02_exact_anchors() {
    let lambdas =
        [0.25, 2f64.sqrt() / 6.0, CLASSIC_LAMBDA, 1.0 / 3.0, 0.5, 0.75];
    for lam in lambdas {
        let p = ModelParams::solve(lam).unwrap();
        let t1 = measure::tau(&p, 1.0);
        let t0 = measure::tau(&p, 0.0);
        assert!(t1.abs() <= 1e-12, "tau(1) = {t1} at lambda {lam}");
        assert!((t0 + 1.0).abs() <= 1e-12, "tau(0) = {t0} at lambda {lam}");
    }
    let boundary = measure::gamma_residual(1.0 / 6.0, 1.0);
    assert!(boundary.abs() <= 1e-12, "boundary residual {boundary}");
    println!(
        "criterion 02: PASS  tau(1)=0 and tau(0)=-1 to 1e-12 on {} lambdas; \
         boundary residual {boundary:.2e}",
        lambdas.len()
    );
}

#[test]
fn criterion_03_spectrum_landmarks() {
    let start = Instant::now();
    let p = ModelParams::solve(CLASSIC_LAMBDA).unwrap();
    let alpha_min = p.alpha_min();
    let rebuilt = 1.0 - (1.0 + 3f64.sqrt()).ln() / 6f64.ln();
    assert!((alpha_min - rebuilt).abs() <= 1e-12);
    assert!((alpha_min - 0.4390).abs() <= 1e-4, "alpha_min {alpha_min}");
    assert_eq!(measure::spectrum(&p, alpha_min).unwrap(), 0.0);

    let alpha_l = p.alpha_lebesgue();
    let rebuilt_l = 1.0 - 2f64.ln() / (4.0 * 3f64.ln() + 2.0 * 6f64.ln());
    assert!((alpha_l - rebuilt_l).abs() <= 1e-12);
    assert!((alpha_l - 0.9131).abs() <= 1e-4, "alpha_L {alpha_l}");
    let top = measure::spectrum(&p, alpha_l).unwrap();
    assert!((top - 1.0).abs() <= 1e-9, "spectrum at alpha_L = {top}");
    let elapsed = start.elapsed();
    assert!(elapsed.as_millis() < 1000, "landmarks took {elapsed:?}, budget 1 s");
    println!(
        "criterion 03: PASS  alpha_min {alpha_min:.5}, alpha_L {alpha_l:.5}, \
         d(alpha_L) {top:.12}, in {elapsed:?}"
    );
}

#[test]
fn criterion_04_phase_transition() {
    let cantor_dim = 2f64.ln() / 3f64.ln();
    for lam in [0.35, 0.5, 0.75] {
        let p = ModelParams::solve(lam).unwrap();
        let d1 = measure::spectrum(&p, 1.0).unwrap();
        assert!((d1 - cantor_dim).abs() <= 1e-6, "d(1) = {d1} at lambda {lam}");
    }
    let p = ModelParams::solve(1.0 / 3.0).unwrap();
    let d1 = measure::spectrum(&p, 1.0).unwrap();
    let s = measure::infinite_derivative_dimension();
    assert!((d1 - s).abs() <= 1e-6, "d(1) = {d1} at the transition, expected {s}");

    let below = spectrum_graph(1.0 / 3.0 - 1e-3, 120);
    let above = spectrum_graph(1.0 / 3.0 + 1e-3, 120);
    let jump = hausdorff(&below, &above);
    assert!(jump >= 0.11, "graph jump {jump} under 0.11");
    println!(
        "criterion 04: PASS  d(1) = log2/log3 above 1/3, jumps to {d1:.4} at 1/3; \
         graph distance across the transition {jump:.4}"
    );
}

#[test]
fn criterion_05_convergence_bound() {
    let start = Instant::now();
    let mut worst_margin = f64::INFINITY;
    for lam in [0.25, CLASSIC_LAMBDA, 0.5, 0.75] {
        let rho = curve::contraction_ratio(lam);
        let mut max_diff = [0.0f64; 15];
        for k in 0..=1000 {
            let x = rat(k, 1000);
            let vals = curve::generation_values(lam, &x, 15).unwrap();
            for n in 0..=14 {
                max_diff[n] = max_diff[n].max((vals[n + 1] - vals[n]).abs());
            }
        }
        for (n, diff) in max_diff.iter().enumerate() {
            let bound = lam * rho.powi(n as i32) * (1.0 + 1e-9);
            assert!(diff <= &bound, "lambda {lam} n {n}: {diff} > {bound}");
            worst_margin = worst_margin.min(bound / diff.max(1e-300));
        }
    }
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs() < 30, "grid sweep took {elapsed:?}, budget 30 s");
    println!(
        "criterion 05: PASS  sup|F_(n+1)-F_n| under the geometric bound for n <= 14 \
         on 4 lambdas (tightest bound/observed ratio {worst_margin:.3}), in {elapsed:?}"
    );
}

#[test]
fn criterion_06_mass_oracle_equivalence() {
    let p = ModelParams::solve(CLASSIC_LAMBDA).unwrap();
    // every generation-6 interval: product mass vs recursive subdivision
    let mut words = vec![Vec::new()];
    for _ in 0..6 {
        words = words
            .iter()
            .flat_map(|w: &Vec<Digit>| {
                Digit::ALL.iter().map(move |d| {
                    let mut next = w.clone();
                    next.push(*d);
                    next
                })
            })
            .collect();
    }
    assert_eq!(words.len(), 4096);
    let mut worst = 0.0f64;
    for word in &words {
        let state = dynamics::interval_of_digits(word, CLASSIC_LAMBDA).unwrap();
        let (lo, hi) = state.interval();
        let (mass, err) = measure::mass_of_interval(&p, &lo, &hi, 1e-15).unwrap();
        assert_eq!(err, 0.0, "recursive mass did not resolve exactly");
        let gap = (mass.ln() - measure::mass_of_state(&p, &state)).abs();
        worst = worst.max(gap);
        assert!(gap <= 1e-12, "log-domain gap {gap}");
    }

    // additivity over random splits
    let mut rng = ChaCha8Rng::seed_from_u64(606);
    let tol = 1e-9;
    for _ in 0..500 {
        let mut ks = [0i64; 3];
        for k in &mut ks {
            *k = rng.gen_range(1..10_000);
        }
        ks.sort_unstable();
        if ks[0] == ks[1] || ks[1] == ks[2] {
            continue;
        }
        let (a, c, b) = (rat(ks[0], 10_000), rat(ks[1], 10_000), rat(ks[2], 10_000));
        let (m_ac, _) = measure::mass_of_interval(&p, &a, &c, tol).unwrap();
        let (m_cb, _) = measure::mass_of_interval(&p, &c, &b, tol).unwrap();
        let (m_ab, _) = measure::mass_of_interval(&p, &a, &b, tol).unwrap();
        assert!(
            (m_ac + m_cb - m_ab).abs() <= 2.0 * tol,
            "additivity violated: {} + {} vs {}",
            m_ac,
            m_cb,
            m_ab
        );
    }
    println!(
        "criterion 06: PASS  4096 generation-6 masses agree exactly \
         (worst log gap {worst:.2e}); additivity held on 500 splits"
    );
}

#[test]
fn criterion_07_holder_consistency() {
    use Digit::*;
    let lam = CLASSIC_LAMBDA;
    let p = ModelParams::solve(lam).unwrap();
    // periods with enough 1-digits that the slope growth rate is positive
    let candidates: Vec<SymbolicPoint> = vec![
        SymbolicPoint::periodic(vec![D1]),
        SymbolicPoint::periodic(vec![D1, D0]),
        SymbolicPoint::periodic(vec![D1, D3]),
        SymbolicPoint::periodic(vec![D1, D0, D3]),
        SymbolicPoint::periodic(vec![D1, D1, D2]),
        SymbolicPoint::periodic(vec![D1, D2, D1]),
        SymbolicPoint::periodic(vec![D1, D1, D0, D2]),
        SymbolicPoint::periodic(vec![D1, D0, D0, D3]),
        SymbolicPoint::periodic(vec![D1, D1, D3]),
        SymbolicPoint::periodic(vec![D1, D3, D3]),
        SymbolicPoint::periodic(vec![D1, D0, D1, D3]),
        SymbolicPoint::periodic(vec![D1, D1, D3, D2]),
        SymbolicPoint::periodic(vec![D1, D2, D1, D1, D0]),
        SymbolicPoint::periodic(vec![D1, D1, D1, D2]),
        SymbolicPoint::new(vec![D2], vec![D1]),
        SymbolicPoint::new(vec![D0, D2], vec![D1, D0]),
        SymbolicPoint::new(vec![D3], vec![D1, D1, D2]),
        SymbolicPoint::periodic(vec![D1, D0, D0]),
        SymbolicPoint::periodic(vec![D1, D1, D0]),
        SymbolicPoint::periodic(vec![D1, D3, D0]),
    ];
    let mut checked = 0;
    let mut worst_est = 0.0f64;
    for point in &candidates {
        let (h, validity) = curve::holder_frequency(lam, point).unwrap();
        assert_eq!(validity, curve::HolderValidity::Exact);
        if h >= 1.0 {
            continue; // want points with genuinely positive growth rate
        }
        let digits = point.digits(400).unwrap();
        let estimate = curve::holder_slope_estimate(lam, &digits);
        let gap = (estimate - h).abs();
        worst_est = worst_est.max(gap);
        assert!(gap <= 1e-2, "slope estimate {estimate} vs frequency {h}");

        let local = measure::local_dimension(&p, point).unwrap();
        let translated = local + 1.0 - p.gamma;
        assert!(
            (h - translated).abs() <= 1e-12,
            "exponent {h} vs shifted local dimension {translated}"
        );
        checked += 1;
    }
    assert!(checked >= 20, "only {checked} usable points");
    println!(
        "criterion 07: PASS  {checked} periodic points: depth-400 slope estimate within \
         1e-2 (worst {worst_est:.2e}), exponent equals shifted local dimension to 1e-12"
    );
}

#[test]
fn criterion_08_function_identities() {
    let lam = CLASSIC_LAMBDA;
    let tol = 1e-9;
    let mut rng = ChaCha8Rng::seed_from_u64(808);
    for _ in 0..100 {
        let x = random_rational(&mut rng, 1_000_000);
        let fx = curve::evaluate(lam, &x, tol).unwrap();
        let mirrored = Rational::one() - x.clone();
        let fm = curve::evaluate(lam, &mirrored, tol).unwrap();
        assert!(
            (fx.value - fm.value).abs() <= fx.error_bound + fm.error_bound + 1e-14,
            "symmetry violated"
        );
        let third = &x * &rat(1, 3);
        let ft = curve::evaluate(lam, &third, tol).unwrap();
        assert!(
            (ft.value - fx.value / 3.0).abs() <= ft.error_bound + fx.error_bound / 3.0 + 1e-14,
            "scaling violated"
        );
    }
    for i in 0..50 {
        let mut word = Vec::new();
        let mut v = i;
        for _ in 0..10 {
            word.push(if v % 2 == 0 { Digit::D0 } else { Digit::D3 });
            v /= 2;
        }
        let x = SymbolicPoint::new(word, vec![Digit::D0]).value().unwrap();
        let r = curve::evaluate(lam, &x, tol).unwrap();
        assert_eq!(r.value, 0.0, "nonzero at a Cantor breakpoint");
        assert_eq!(r.error_bound, 0.0);
    }
    println!(
        "criterion 08: PASS  symmetry and third-scaling inside certified bounds on 100 \
         rationals; exact zero at 50 Cantor breakpoints"
    );
}

#[test]
fn criterion_09_monte_carlo_typicality() {
    let start = Instant::now();
    let p = ModelParams::solve(CLASSIC_LAMBDA).unwrap();
    let report = estimators::monte_carlo_typical(&p, 10_000, 1_000, 42);
    let n = report.sample_count as f64;
    let checks = [
        ("outer pair", &report.outer_pair, 2.0 / 3.0),
        ("inner pair", &report.inner_pair, 1.0 / 3.0),
        ("digit one", &report.digit_one, 1.0 / 6.0),
        ("digit two", &report.digit_two, 1.0 / 6.0),
    ];
    for (name, stat, want) in checks {
        let sigma = stat.stddev / n.sqrt();
        assert!(
            (stat.mean - want).abs() <= 3.0 * sigma,
            "{name}: mean {} vs {want} with 3 sigma {}",
            stat.mean,
            3.0 * sigma
        );
    }
    let alpha_l = p.alpha_lebesgue();
    assert!(
        (report.exponent.mean - alpha_l).abs() <= 1e-2,
        "mean exponent {} vs {alpha_l}",
        report.exponent.mean
    );
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs() < 60, "sampling took {elapsed:?}, budget 60 s");
    println!(
        "criterion 09: PASS  frequencies within 3 sigma of (2/3, 1/3, 1/6, 1/6); \
         mean exponent {:.5} vs {alpha_l:.5}; in {elapsed:?}",
        report.exponent.mean
    );
}

#[test]
fn criterion_10_empirical_tau() {
    let p = ModelParams::solve(CLASSIC_LAMBDA).unwrap();
    let qs = [-1.0, 0.5, 2.0];
    let analytic: Vec<f64> = qs.iter().map(|&q| measure::tau(&p, q)).collect();

    let at9 = estimators::tau_empirical_many(&p, &qs, 9).unwrap();
    let mut worst = 0.0f64;
    for i in 0..3 {
        let gap = (at9[i] - analytic[i]).abs();
        worst = worst.max(gap);
        assert!(gap <= 0.05, "q={}: empirical {} analytic {}", qs[i], at9[i], analytic[i]);
    }

    // monotone trend across levels
    let mut prev: Option<Vec<f64>> = None;
    for j in [4u32, 6, 8, 10] {
        let emp = estimators::tau_empirical_many(&p, &qs, j).unwrap();
        let gaps: Vec<f64> =
            emp.iter().zip(&analytic).map(|(e, a)| (e - a).abs()).collect();
        if let Some(prev_gaps) = &prev {
            for i in 0..3 {
                assert!(
                    gaps[i] <= prev_gaps[i] + 1e-6,
                    "gap grew for q={} at level {j}",
                    qs[i]
                );
            }
        }
        prev = Some(gaps);
    }
    println!(
        "criterion 10: PASS  |tau_emp(q, 9) - tau(q)| <= 0.05 (worst {worst:.4}); \
         gaps shrink over levels 4, 6, 8, 10"
    );
}
