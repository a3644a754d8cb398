//! The self-similar measure attached to the construction and its analytic
//! multifractal machinery: the normalizing exponent, the weight vector, the
//! moment scaling function and its Legendre transform, dimension formulas,
//! and exact interval masses.

use crate::dynamics::{self, check_lambda, Digit, OrbitState, SymbolicPoint};
use crate::error::{Error, Result};
use crate::exactnum::Rational;

const LN3: f64 = 1.0986122886681098;
const LN6: f64 = 1.791759469228055;

/// x-contraction ratios of the four branches.
pub const CONTRACTION_RATIOS: [f64; 4] = [1.0 / 3.0, 1.0 / 6.0, 1.0 / 6.0, 1.0 / 3.0];

/// |ln r_i| per digit.
const ABS_LN_R: [f64; 4] = [LN3, LN6, LN6, LN3];

/// Threshold above which the spectrum formula is exact rather than a lower
/// bound.
pub const LAMBDA_EXACT_THRESHOLD: f64 = 0.23570226039551584; // sqrt(2)/6

/// Residual of the normalization equation 2*3^-g + 12 lambda 6^-g = 1.
pub fn gamma_residual(lambda: f64, gamma: f64) -> f64 {
    2.0 * (-gamma * LN3).exp() + 12.0 * lambda * (-gamma * LN6).exp() - 1.0
}

/// Parameter block of the measure: lambda, the normalizing exponent, and the
/// branch weights.
#[derive(Clone, Debug)]
pub struct ModelParams {
    pub lambda: f64,
    pub gamma: f64,
    pub weights: [f64; 4],
    pub ratios: [f64; 4],
    ln_weights: [f64; 4],
}

impl ModelParams {
    /// Solves the normalization equation for gamma (bisection on [1, 3],
    /// Newton polish) and fills in the weights. The weight of the reversing
    /// branch is positive precisely on the accepted open lambda range.
    pub fn solve(lambda: f64) -> Result<ModelParams> {
        check_lambda(lambda)?;
        let (mut lo, mut hi) = (1.0f64, 3.0f64);
        // residual is strictly decreasing in gamma
        for _ in 0..70 {
            let mid = 0.5 * (lo + hi);
            if gamma_residual(lambda, mid) > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let mut gamma = 0.5 * (lo + hi);
        for _ in 0..8 {
            let res = gamma_residual(lambda, gamma);
            if res.abs() <= 5e-16 {
                break;
            }
            let deriv = -2.0 * LN3 * (-gamma * LN3).exp() - 12.0 * lambda * LN6 * (-gamma * LN6).exp();
            gamma -= res / deriv;
        }
        let p0 = (-gamma * LN3).exp();
        let p1 = (6.0 * lambda + 1.0) * (-gamma * LN6).exp();
        let p2 = (6.0 * lambda - 1.0) * (-gamma * LN6).exp();
        let weights = [p0, p1, p2, p0];
        let ln_weights = [p0.ln(), p1.ln(), p2.ln(), p0.ln()];
        Ok(ModelParams { lambda, gamma, weights, ratios: CONTRACTION_RATIOS, ln_weights })
    }

    pub fn ln_weights(&self) -> &[f64; 4] {
        &self.ln_weights
    }

    /// ln p_i / ln r_i per digit: the candidate local dimensions of the
    /// branch fixed points.
    pub fn dimension_ratios(&self) -> [f64; 4] {
        let mut out = [0.0; 4];
        for i in 0..4 {
            out[i] = self.ln_weights[i] / CONTRACTION_RATIOS[i].ln();
        }
        out
    }

    /// Left edge of the measure spectrum support.
    pub fn alpha_tilde_min(&self) -> f64 {
        self.gamma - (6.0 * self.lambda + 1.0).ln() / LN6
    }

    /// Right edge of the measure spectrum support.
    pub fn alpha_tilde_max(&self) -> f64 {
        let two = self.gamma - (6.0 * self.lambda - 1.0).ln() / LN6;
        self.gamma.max(two)
    }

    /// Exponent carried by Lebesgue-almost every point of the measure.
    pub fn alpha_tilde_lebesgue(&self) -> f64 {
        self.gamma - (36.0 * self.lambda * self.lambda - 1.0).ln() / (4.0 * LN3 + 2.0 * LN6)
    }

    /// Left edge of the curve spectrum support.
    pub fn alpha_min(&self) -> f64 {
        1.0 - (6.0 * self.lambda + 1.0).ln() / LN6
    }

    /// Exponent of the curve at Lebesgue-almost every point.
    pub fn alpha_lebesgue(&self) -> f64 {
        1.0 - (36.0 * self.lambda * self.lambda - 1.0).ln() / (4.0 * LN3 + 2.0 * LN6)
    }
}

fn logsumexp4(t: &[f64; 4]) -> f64 {
    let mx = t.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let s: f64 = t.iter().map(|v| (v - mx).exp()).sum();
    mx + s.ln()
}

fn terms(params: &ModelParams, q: f64, tau: f64) -> [f64; 4] {
    let mut t = [0.0; 4];
    for i in 0..4 {
        t[i] = q * params.ln_weights[i] + tau * ABS_LN_R[i];
    }
    t
}

/// Moment scaling exponent: the unique tau with
/// sum of p_i^q r_i^-tau equal to 1, solved in log space.
pub fn tau(params: &ModelParams, q: f64) -> f64 {
    // each term q ln p_i + tau |ln r_i| is increasing in tau; the root of
    // the log-sum lies within ln4/ln3 below the smallest single-term root
    let m = (0..4)
        .map(|i| -q * params.ln_weights[i] / ABS_LN_R[i])
        .fold(f64::INFINITY, f64::min);
    let mut lo = m - 4f64.ln() / LN3 - 1e-9;
    let mut hi = m + 1e-9;
    for _ in 0..20 {
        let mid = 0.5 * (lo + hi);
        if logsumexp4(&terms(params, q, mid)) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    // Newton polish with the bracket as a safeguard; keep the iterate with
    // the smallest residual since the evaluation noise floor scales with |q|
    let mut t = 0.5 * (lo + hi);
    let mut best = (f64::INFINITY, t);
    for _ in 0..12 {
        let vals = terms(params, q, t);
        let val = logsumexp4(&vals);
        if val.abs() < best.0 {
            best = (val.abs(), t);
        }
        if val.abs() <= 1e-15 {
            break;
        }
        if val < 0.0 {
            lo = t;
        } else {
            hi = t;
        }
        let w = softmax(&vals);
        let deriv: f64 = (0..4).map(|i| w[i] * ABS_LN_R[i]).sum();
        let nt = t - val / deriv;
        let nt = if nt.is_finite() && nt >= lo && nt <= hi { nt } else { 0.5 * (lo + hi) };
        if nt == t {
            break;
        }
        t = nt;
    }
    best.1
}

fn softmax(t: &[f64; 4]) -> [f64; 4] {
    let mx = t.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let mut w = [0.0; 4];
    let mut z = 0.0;
    for i in 0..4 {
        w[i] = (t[i] - mx).exp();
        z += w[i];
    }
    for wi in &mut w {
        *wi /= z;
    }
    w
}

/// Derivative of the scaling exponent, from the implicit equation at the
/// solved tau.
pub fn tau_prime(params: &ModelParams, q: f64) -> f64 {
    let t = tau(params, q);
    tau_prime_at(params, q, t)
}

fn tau_prime_at(params: &ModelParams, q: f64, tau: f64) -> f64 {
    let w = softmax(&terms(params, q, tau));
    let num: f64 = (0..4).map(|i| w[i] * params.ln_weights[i]).sum();
    let den: f64 = (0..4).map(|i| w[i] * CONTRACTION_RATIOS[i].ln()).sum();
    num / den
}

/// Bound on |q| used when inverting the derivative; the transform endpoints
/// are handed out analytically instead of chasing the divergence.
pub const Q_CAP: f64 = 1e3;

/// Legendre transform value and the optimizing q at an interior exponent.
pub fn legendre(params: &ModelParams, alpha: f64) -> Result<(f64, f64)> {
    let lo_a = params.alpha_tilde_min();
    let hi_a = params.alpha_tilde_max();
    if !(alpha > lo_a && alpha < hi_a) {
        return Err(Error::AlphaOutOfRange { alpha, lo: lo_a, hi: hi_a });
    }
    // tau' is strictly decreasing, so bisect q
    let (mut lo, mut hi) = (-Q_CAP, Q_CAP);
    for _ in 0..50 {
        let mid = 0.5 * (lo + hi);
        if tau_prime(params, mid) > alpha {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let q = 0.5 * (lo + hi);
    Ok((alpha * q - tau(params, q), q))
}

/// One row of a spectrum curve: q, tau(q), alpha = tau'(q), and the
/// transform value q alpha - tau(q).
#[derive(Clone, Copy, Debug)]
pub struct SpectrumSample {
    pub q: f64,
    pub tau: f64,
    pub alpha: f64,
    pub tau_star: f64,
}

impl SpectrumSample {
    pub fn at(params: &ModelParams, q: f64) -> SpectrumSample {
        let t = tau(params, q);
        let alpha = tau_prime_at(params, q, t);
        SpectrumSample { q, tau: t, alpha, tau_star: q * alpha - t }
    }
}

/// Digit frequency vector: nonnegative entries summing to one.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FrequencyVector {
    beta: [f64; 4],
}

impl FrequencyVector {
    pub fn new(beta: [f64; 4]) -> Result<FrequencyVector> {
        let sum: f64 = beta.iter().sum();
        if beta.iter().any(|b| *b < -1e-12) || (sum - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidFrequencyVector { sum });
        }
        let mut clean = beta;
        for b in &mut clean {
            *b = b.max(0.0);
        }
        Ok(FrequencyVector { beta: clean })
    }

    pub fn beta(&self) -> &[f64; 4] {
        &self.beta
    }
}

/// Hausdorff dimension of the set of points with prescribed digit
/// frequencies: entropy over the frequency-weighted length logs, with the
/// 0 log 0 = 0 convention.
pub fn frequency_set_dimension(fv: &FrequencyVector) -> f64 {
    let mut num = 0.0;
    let mut den = 0.0;
    for i in 0..4 {
        let b = fv.beta[i];
        if b > 0.0 {
            num += b * b.ln();
            den += b * CONTRACTION_RATIOS[i].ln();
        }
    }
    if num == 0.0 {
        return 0.0; // single-digit vector: num is 0, dimension 0
    }
    num / den
}

/// The frequency vector maximizing dimension at a given exponent:
/// beta_i = p_i^q r_i^-tau(q) at the optimizing q.
pub fn optimal_frequencies(params: &ModelParams, alpha: f64) -> Result<FrequencyVector> {
    let (_, q) = legendre(params, alpha)?;
    let t = tau(params, q);
    let w = softmax(&terms(params, q, t));
    FrequencyVector::new(w)
}

/// Local dimension of the measure at an eventually periodic point, from its
/// period frequencies.
pub fn local_dimension(params: &ModelParams, p: &SymbolicPoint) -> Result<f64> {
    let counts = p.period_counts()?;
    Ok(params.gamma - dynamics::frequency_ratio(params.lambda, &counts))
}

/// Solves sum r_i^s = 1 over a subset of contraction ratios.
pub fn moran_dimension(ratios: &[f64]) -> f64 {
    let f = |s: f64| ratios.iter().map(|r| (s * r.ln()).exp()).sum::<f64>() - 1.0;
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if f(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let mut s = 0.5 * (lo + hi);
    for _ in 0..4 {
        let val = f(s);
        let deriv: f64 = ratios.iter().map(|r| r.ln() * (s * r.ln()).exp()).sum();
        if deriv == 0.0 {
            break;
        }
        let ns = s - val / deriv;
        if ns.is_finite() && ns >= lo && ns <= hi {
            s = ns;
        }
    }
    s
}

/// Hausdorff dimension of the set where the curve has an infinite
/// derivative: the root of 2*3^-s + 6^-s = 1.
pub fn infinite_derivative_dimension() -> f64 {
    moran_dimension(&[1.0 / 3.0, 1.0 / 3.0, 1.0 / 6.0])
}

/// Whether the curve-spectrum formula is exact or only a lower bound at this
/// lambda.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SpectrumValidity {
    Exact,
    LowerBound,
}

impl std::fmt::Display for SpectrumValidity {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SpectrumValidity::Exact => write!(f, "EXACT"),
            SpectrumValidity::LowerBound => write!(f, "LOWER_BOUND"),
        }
    }
}

pub fn spectrum_validity(lambda: f64) -> SpectrumValidity {
    if lambda > LAMBDA_EXACT_THRESHOLD {
        SpectrumValidity::Exact
    } else {
        SpectrumValidity::LowerBound
    }
}

const ENDPOINT_EPS: f64 = 1e-12;

/// Multifractal spectrum of the curve: the measure transform shifted by
/// gamma - 1, supported on [alpha_min, 1]; None outside the support.
///
/// Both endpoints come from limit formulas rather than inversion: the left
/// endpoint is 0, and the right endpoint is the dimension of the sub-system
/// of branches whose fixed-point dimension attains the maximum. That set is
/// {0,3} above lambda = 1/3 (dimension log2/log3), gains the reversing
/// branch exactly at 1/3 (the phase transition), and at smaller lambda the
/// right endpoint value is an interior transform value.
pub fn spectrum(params: &ModelParams, alpha: f64) -> Option<f64> {
    let amin = params.alpha_min();
    if alpha < amin - ENDPOINT_EPS || alpha > 1.0 + ENDPOINT_EPS {
        return None;
    }
    if alpha <= amin + ENDPOINT_EPS {
        return Some(0.0);
    }
    if alpha >= 1.0 - ENDPOINT_EPS {
        return Some(right_end_dimension(params));
    }
    let at = alpha + params.gamma - 1.0;
    Some(legendre(params, at).expect("interior exponent").0)
}

fn right_end_dimension(params: &ModelParams) -> f64 {
    let ratios = params.dimension_ratios();
    let mx = ratios.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if params.gamma >= mx - ENDPOINT_EPS {
        // gamma attains the maximum: the exponent 1 level set is the
        // attractor of the tied branches
        let tied: Vec<f64> = (0..4)
            .filter(|&i| ratios[i] >= mx - ENDPOINT_EPS)
            .map(|i| CONTRACTION_RATIOS[i])
            .collect();
        moran_dimension(&tied)
    } else {
        legendre(params, params.gamma).expect("interior exponent").0
    }
}

/// Log mass of the generation interval recorded in an orbit state: the
/// weights multiply along the digits.
pub fn mass_of_state(params: &ModelParams, state: &OrbitState) -> f64 {
    (0..4).map(|i| state.beta[i] as f64 * params.ln_weights[i]).sum()
}

/// Measure of [a, b] by recursive subdivision along generation intervals.
///
/// Intervals fully inside contribute their product mass; straddling
/// intervals recurse until their mass falls under tol/2. At most two
/// straddling chains survive (one per endpoint), so the unresolved mass
/// reported in `err` is at most tol. The true mass lies in
/// [mass, mass + err].
pub fn mass_of_interval(
    params: &ModelParams,
    a: &Rational,
    b: &Rational,
    tol: f64,
) -> Result<(f64, f64)> {
    if tol <= 0.0 {
        return Err(Error::InvalidTolerance { tol });
    }
    if !(a.is_unit_interval() && b.is_unit_interval() && a < b) {
        return Err(Error::InvalidInterval);
    }
    let cut = 0.5 * tol;
    let mut mass = 0.0;
    let mut err = 0.0;
    let mut stack: Vec<(Rational, i8, Rational, f64)> =
        vec![(Rational::zero(), 1, Rational::one(), 1.0)];
    while let Some((anchor, eps, ell, m)) = stack.pop() {
        let other = &anchor + &(Rational::from_int(eps as i64) * ell.clone());
        let (lo, hi) = if eps > 0 { (&anchor, &other) } else { (&other, &anchor) };
        if lo >= b || hi <= a {
            continue; // endpoints carry no mass
        }
        if a <= lo && hi <= b {
            mass += m;
            continue;
        }
        if m <= cut {
            err += m;
            continue;
        }
        for d in Digit::ALL {
            let child_anchor =
                &anchor + &(d.anchor_offset() * Rational::from_int(eps as i64) * ell.clone());
            let child_eps = if d.flips_orientation() { -eps } else { eps };
            let child_ell = &ell * &d.contraction();
            stack.push((child_anchor, child_eps, child_ell, m * params.weights[d.index()]));
        }
    }
    Ok((mass, err))
}
