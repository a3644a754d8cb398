//! Shared helpers for the integration suites.

use koch_core::{measure, ModelParams, Rational};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

/// Samples the curve spectrum as a point set, with both endpoints included
/// and extra resolution packed against the right edge where the graph can be
/// nearly vertical.
pub fn spectrum_graph(lambda: f64, interior: usize) -> Vec<(f64, f64)> {
    let params = ModelParams::solve(lambda).expect("lambda in range");
    let amin = params.alpha_min();
    let mut alphas = vec![amin];
    for k in 1..interior {
        alphas.push(amin + (1.0 - amin) * k as f64 / interior as f64);
    }
    for e in 2..=12 {
        alphas.push(1.0 - 10f64.powi(-e));
    }
    alphas.push(1.0);
    alphas.sort_by(|a, b| a.partial_cmp(b).unwrap());
    alphas
        .into_par_iter()
        .filter_map(|a| measure::spectrum(&params, a).map(|d| (a, d)))
        .collect()
}

/// Hausdorff distance between two finite point sets.
pub fn hausdorff(a: &[(f64, f64)], b: &[(f64, f64)]) -> f64 {
    fn one_sided(p: &[(f64, f64)], q: &[(f64, f64)]) -> f64 {
        p.iter()
            .map(|(px, py)| {
                q.iter()
                    .map(|(qx, qy)| ((px - qx).powi(2) + (py - qy).powi(2)).sqrt())
                    .fold(f64::INFINITY, f64::min)
            })
            .fold(0.0, f64::max)
    }
    one_sided(a, b).max(one_sided(b, a))
}

/// Random rational in (0, 1) with denominator at most `max_den`.
pub fn random_rational(rng: &mut ChaCha8Rng, max_den: i64) -> Rational {
    let den = rng.gen_range(2..=max_den);
    let num = rng.gen_range(1..den);
    Rational::new(num, den).unwrap()
}
