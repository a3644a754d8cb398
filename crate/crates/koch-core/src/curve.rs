//! The piecewise-affine approximants, their limit, and pointwise regularity.
//!
//! Construction replaces each segment's middle third with a tent of height
//! lambda times the segment length. Evaluation never materializes a
//! generation: it walks the digit string of the query point, tracking the
//! anchor value, and certifies the tail with the geometric bound on segment
//! lengths.

use rayon::prelude::*;

use crate::dynamics::{
    self, check_lambda, digit_of, step, Digit, OrbitState, SymbolicPoint,
};
use crate::error::{Error, Result};
use crate::exactnum::{Rational, SignedLog};

/// Default cap on materialized generations (4^13 segments is about 6.7e7).
pub const DEFAULT_GENERATION_CAP: u32 = 13;

/// Line segment with exact x-endpoints and float heights.
#[derive(Clone, Debug)]
pub struct Segment {
    pub x0: Rational,
    pub x1: Rational,
    pub y0: f64,
    pub y1: f64,
}

impl Segment {
    pub fn new(x0: Rational, x1: Rational, y0: f64, y1: f64) -> Self {
        assert!(x0 < x1, "segment endpoints out of order");
        Segment { x0, x1, y0, y1 }
    }

    pub fn dx(&self) -> f64 {
        (&self.x1 - &self.x0).to_f64()
    }

    pub fn slope(&self) -> f64 {
        (self.y1 - self.y0) / self.dx()
    }

    pub fn len(&self) -> f64 {
        let dx = self.dx();
        let dy = self.y1 - self.y0;
        (dx * dx + dy * dy).sqrt()
    }
}

/// One subdivision step: splits a segment at 1/3, 1/2, 2/3 of its x-extent
/// and raises the midpoint by lambda times the segment length. The returned
/// segments share endpoints, and the outer two keep the parent's slope while
/// the inner two get slope m ± 6 lambda sqrt(1+m^2).
pub fn apply_omega(s: &Segment, lambda: f64) -> Result<[Segment; 4]> {
    if lambda < 1.0 / 6.0 {
        return Err(Error::LambdaOutOfRange { lambda, lo: 1.0 / 6.0, hi: f64::INFINITY });
    }
    let ell = &s.x1 - &s.x0;
    let third = Rational::new(1, 3).unwrap();
    let half = Rational::new(1, 2).unwrap();
    let xc = &s.x0 + &(&ell * &third);
    let xm = &s.x0 + &(&ell * &half);
    let xe = &s.x1 - &(&ell * &third);
    let dy = s.y1 - s.y0;
    let yc = s.y0 + dy / 3.0;
    let ye = s.y0 + 2.0 * dy / 3.0;
    let ym = 0.5 * (s.y0 + s.y1) + lambda * s.len();
    Ok([
        Segment::new(s.x0.clone(), xc.clone(), s.y0, yc),
        Segment::new(xc, xm.clone(), yc, ym),
        Segment::new(xm, xe.clone(), ym, ye),
        Segment::new(xe, s.x1.clone(), ye, s.y1),
    ])
}

/// Breakpoint list of one generation. x strictly increasing from (0,0) to
/// (1,0), exactly 4^n segments.
#[derive(Clone, Debug)]
pub struct Polyline {
    pub breakpoints: Vec<(Rational, f64)>,
    pub generation: u32,
}

impl Polyline {
    pub fn segment_count(&self) -> usize {
        self.breakpoints.len() - 1
    }

    pub fn max_y(&self) -> f64 {
        self.breakpoints.iter().fold(0.0, |acc, (_, y)| acc.max(*y))
    }

    pub fn segments(&self) -> impl Iterator<Item = Segment> + '_ {
        self.breakpoints.windows(2).map(|w| {
            Segment::new(w[0].0.clone(), w[1].0.clone(), w[0].1, w[1].1)
        })
    }

    /// Value of the generation function at x by interpolation on the
    /// enclosing segment.
    pub fn value_at(&self, x: &Rational) -> f64 {
        let n = self.breakpoints.len();
        let idx = self.breakpoints.partition_point(|(bx, _)| bx <= x);
        let i = idx.clamp(1, n - 1) - 1;
        let (x0, y0) = &self.breakpoints[i];
        let (x1, y1) = &self.breakpoints[i + 1];
        let t = (&(x - x0) / &(x1 - x0)).to_f64();
        y0 + (y1 - y0) * t
    }
}

fn unit_segment() -> Segment {
    Segment::new(Rational::zero(), Rational::one(), 0.0, 0.0)
}

fn emit_left_endpoints(
    seg: &Segment,
    depth: u32,
    lambda: f64,
    out: &mut impl FnMut(&Rational, f64),
) {
    if depth == 0 {
        out(&seg.x0, seg.y0);
        return;
    }
    for child in apply_omega(seg, lambda).expect("lambda checked upstream") {
        emit_left_endpoints(&child, depth - 1, lambda, out);
    }
}

/// Streams the breakpoints of one generation in x order without holding the
/// polyline in memory.
pub fn walk_breakpoints(
    lambda: f64,
    generation: u32,
    cap: u32,
    mut f: impl FnMut(&Rational, f64),
) -> Result<()> {
    check_lambda(lambda)?;
    if generation > cap {
        return Err(Error::GenerationCapExceeded { requested: generation, cap });
    }
    let root = unit_segment();
    emit_left_endpoints(&root, generation, lambda, &mut f);
    f(&Rational::one(), 0.0);
    Ok(())
}

/// Builds the generation-n polyline, subject to the default cap.
pub fn build_polyline(lambda: f64, generation: u32) -> Result<Polyline> {
    build_polyline_with_cap(lambda, generation, DEFAULT_GENERATION_CAP)
}

/// Same with an explicit cap. Generations of eight and above are expanded in
/// parallel over subtrees; the subtree arithmetic is independent of the
/// split, so the result is identical to the sequential construction.
pub fn build_polyline_with_cap(lambda: f64, generation: u32, cap: u32) -> Result<Polyline> {
    check_lambda(lambda)?;
    if generation > cap {
        return Err(Error::GenerationCapExceeded { requested: generation, cap });
    }
    let root = unit_segment();
    let mut breakpoints;
    const PAR_PREFIX: u32 = 4;
    if generation >= 8 {
        let mut tops = vec![root];
        for _ in 0..PAR_PREFIX {
            tops = tops
                .iter()
                .flat_map(|s| apply_omega(s, lambda).expect("lambda checked"))
                .collect();
        }
        let rest = generation - PAR_PREFIX;
        let chunks: Vec<Vec<(Rational, f64)>> = tops
            .par_iter()
            .map(|seg| {
                let mut part = Vec::new();
                emit_left_endpoints(seg, rest, lambda, &mut |x, y| part.push((x.clone(), y)));
                part
            })
            .collect();
        breakpoints = Vec::with_capacity(4usize.pow(generation) + 1);
        for chunk in chunks {
            breakpoints.extend(chunk);
        }
    } else {
        breakpoints = Vec::with_capacity(4usize.pow(generation) + 1);
        emit_left_endpoints(&root, generation, lambda, &mut |x, y| {
            breakpoints.push((x.clone(), y))
        });
    }
    breakpoints.push((Rational::one(), 0.0));
    Ok(Polyline { breakpoints, generation })
}

/// Geometric decay ratio of segment lengths under one subdivision.
pub fn contraction_ratio(lambda: f64) -> f64 {
    if lambda < 1.0 / 3.0 {
        1.0 / 3.0 + 2.0 * lambda
    } else {
        1.0 / 6.0 + lambda
    }
}

/// Certified evaluation of the limit function.
#[derive(Clone, Copy, Debug)]
pub struct EvalResult {
    pub value: f64,
    /// Rigorous bound on |value - F(x)| from the geometric tail; float
    /// roundoff in the walk is orders of magnitude below it at reachable
    /// depths.
    pub error_bound: f64,
    pub depth_used: usize,
}

const EVAL_DEPTH_CAP: usize = 200_000;

/// Walks the digits of x until the certified tail drops under `tol`.
/// Breakpoints are recognized exactly (orbit hits 0 or 1) and returned with
/// error 0.
pub fn evaluate(lambda: f64, x: &Rational, tol: f64) -> Result<EvalResult> {
    check_lambda(lambda)?;
    if tol <= 0.0 {
        return Err(Error::InvalidTolerance { tol });
    }
    if !x.is_unit_interval() {
        return Err(Error::OutsideUnitInterval);
    }
    let tail = lambda / (1.0 - contraction_ratio(lambda));
    let one = Rational::one();
    let mut state = OrbitState::initial();
    let mut cur = x.clone();
    loop {
        if cur.is_zero() {
            return Ok(EvalResult { value: state.anchor_value, error_bound: 0.0, depth_used: state.n });
        }
        if cur == one {
            let value = state.anchor_value + signed_product(&state.slope, state.eps, state.ln_ell());
            return Ok(EvalResult { value, error_bound: 0.0, depth_used: state.n });
        }
        let bound = tail * state.seg_len;
        if bound <= tol {
            let value = state.anchor_value + slope_times(&state.slope, &(x - &state.anchor));
            return Ok(EvalResult { value, error_bound: bound, depth_used: state.n });
        }
        if state.n >= EVAL_DEPTH_CAP {
            return Err(Error::ToleranceUnreachable { depth: state.n, bound });
        }
        let d = digit_of(&cur)?;
        state = state.advance_unchecked(d, lambda);
        cur = step(&cur)?;
    }
}

/// slope * (eps * ell) without leaving log space.
fn signed_product(slope: &SignedLog, eps: i8, ln_ell: f64) -> f64 {
    if slope.is_zero() {
        return 0.0;
    }
    (slope.sign() * eps) as f64 * (slope.ln_abs() + ln_ell).exp()
}

/// slope * dx for an exact rational dx.
fn slope_times(slope: &SignedLog, dx: &Rational) -> f64 {
    if slope.is_zero() || dx.is_zero() {
        return 0.0;
    }
    let sign = if *dx > Rational::zero() { 1.0 } else { -1.0 };
    slope.sign() as f64 * sign * (slope.ln_abs() + dx.abs().ln()).exp()
}

/// Value of the generation-n approximant at x, via the same walk.
pub fn generation_value(lambda: f64, x: &Rational, n: usize) -> Result<f64> {
    Ok(generation_values(lambda, x, n)?[n])
}

/// Values of all approximants 0..=max_n at x in a single walk.
pub fn generation_values(lambda: f64, x: &Rational, max_n: usize) -> Result<Vec<f64>> {
    check_lambda(lambda)?;
    if !x.is_unit_interval() {
        return Err(Error::OutsideUnitInterval);
    }
    let mut out = Vec::with_capacity(max_n + 1);
    let mut state = OrbitState::initial();
    let mut cur = x.clone();
    for _ in 0..=max_n {
        out.push(state.anchor_value + slope_times(&state.slope, &(x - &state.anchor)));
        let d = digit_of(&cur)?;
        state = state.advance_unchecked(d, lambda);
        cur = step(&cur)?;
    }
    Ok(out)
}

/// Slopes m_0..m_N over the intervals selected by a digit word.
///
/// The recursion itself is meaningful for any lambda >= 1/6, including the
/// boundary 5/6 used by the divergence demonstration, so no range error is
/// raised here.
pub fn slope_sequence(lambda: f64, digits: &[Digit]) -> Vec<SignedLog> {
    assert!(lambda >= 1.0 / 6.0, "slope recursion needs lambda >= 1/6");
    let mut out = Vec::with_capacity(digits.len() + 1);
    let mut m = SignedLog::ZERO;
    out.push(m);
    for &d in digits {
        m = dynamics::slope_step(&m, d, lambda);
        out.push(m);
    }
    out
}

/// Idealized slopes: the same walk without the sqrt(1+m^2) correction, which
/// has the closed product form 6λ (6λ+1)^(ones-1) (6λ-1)^(twos) once active.
pub fn ideal_slope_sequence(lambda: f64, digits: &[Digit]) -> Vec<SignedLog> {
    assert!(lambda >= 1.0 / 6.0, "slope recursion needs lambda >= 1/6");
    let mut out = Vec::with_capacity(digits.len() + 1);
    let mut m = SignedLog::ZERO;
    out.push(m);
    for &d in digits {
        m = dynamics::ideal_slope_step(&m, d, lambda);
        out.push(m);
    }
    out
}

/// Finite-depth surrogate of the pointwise exponent: one minus the largest
/// ratio log|m_n| / |log ell_n| over the last half of the walk, clamped to
/// [0, 1].
pub fn holder_slope_estimate(lambda: f64, digits: &[Digit]) -> f64 {
    assert!(digits.len() >= 10, "need at least 10 digits for the tail window");
    let slopes = slope_sequence(lambda, digits);
    let ln3 = 3f64.ln();
    let ln6 = 6f64.ln();
    let mut ln_ell = 0.0;
    let mut ratios = Vec::with_capacity(digits.len());
    for (k, &d) in digits.iter().enumerate() {
        ln_ell -= if d.is_outer() { ln3 } else { ln6 };
        let m = &slopes[k + 1];
        if m.is_zero() {
            ratios.push(f64::NEG_INFINITY);
        } else {
            ratios.push(m.ln_abs() / ln_ell.abs());
        }
    }
    let window = &ratios[digits.len() / 2..];
    let max_ratio = window.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if max_ratio == f64::NEG_INFINITY {
        return 1.0;
    }
    (1.0 - max_ratio).clamp(0.0, 1.0)
}

/// Whether a formula value is the exact exponent or only an upper bound.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HolderValidity {
    Exact,
    UpperBound,
}

impl std::fmt::Display for HolderValidity {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            HolderValidity::Exact => write!(f, "EXACT"),
            HolderValidity::UpperBound => write!(f, "UPPER_BOUND"),
        }
    }
}

/// Pointwise exponent from the digit frequencies of an eventually periodic
/// point: 1 - max(0, growth ratio of the period).
///
/// Points with a periodic tail always have limit digit frequencies, so one
/// of the exactness cases applies: finitely many inner digits (exponent 1),
/// a positive growth rate (slopes diverge along the period), or lambda above
/// 1/3 off the finite-inner set; a non-positive growth rate forces exponent
/// exactly 1. `UpperBound` is reserved for inputs without limit frequencies,
/// which a periodic word cannot encode.
pub fn holder_frequency(lambda: f64, p: &SymbolicPoint) -> Result<(f64, HolderValidity)> {
    check_lambda(lambda)?;
    let counts = p.period_counts()?;
    let ratio = dynamics::frequency_ratio(lambda, &counts);
    let h = (1.0 - ratio.max(0.0)).clamp(0.0, 1.0);
    Ok((h, HolderValidity::Exact))
}
