//! The piecewise-affine map on [0, 1], its digit coding, and the exact
//! bookkeeping that walks a point down the generation intervals.
//!
//! The map has four branches. The outer two contract x by 1/3, the inner two
//! by 1/6, and the third branch is orientation reversing. Iterating the map
//! assigns every point a digit string over {0,1,2,3}; the first n digits
//! identify the generation-n interval the point lives in, together with the
//! orientation, the interval length, the construction slope above it, and the
//! anchor value of the approximating curve.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::exactnum::{Rational, SignedLog};

/// Inclusive parameter window on which the digit machinery applies.
pub const LAMBDA_LO: f64 = 1.0 / 6.0;
pub const LAMBDA_HI: f64 = 5.0 / 6.0;

/// Default iteration cap for orbit cycle detection.
pub const DEFAULT_ORBIT_DEPTH: usize = 10_000;

pub(crate) fn check_lambda(lambda: f64) -> Result<()> {
    if lambda > LAMBDA_LO && lambda < LAMBDA_HI {
        Ok(())
    } else {
        Err(Error::LambdaOutOfRange { lambda, lo: LAMBDA_LO, hi: LAMBDA_HI })
    }
}

/// Branch index of the map, the "digit" of a point at one time step.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Digit {
    D0 = 0,
    D1 = 1,
    D2 = 2,
    D3 = 3,
}

impl Digit {
    pub const ALL: [Digit; 4] = [Digit::D0, Digit::D1, Digit::D2, Digit::D3];

    pub fn from_index(i: usize) -> Option<Digit> {
        match i {
            0 => Some(Digit::D0),
            1 => Some(Digit::D1),
            2 => Some(Digit::D2),
            3 => Some(Digit::D3),
            _ => None,
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }

    /// True for the two outer branches (digits 0 and 3), which contract x by
    /// 1/3; the inner branches contract by 1/6.
    pub fn is_outer(self) -> bool {
        matches!(self, Digit::D0 | Digit::D3)
    }

    /// x-contraction ratio of this branch.
    pub fn contraction(self) -> Rational {
        if self.is_outer() {
            Rational::new(1, 3).unwrap()
        } else {
            Rational::new(1, 6).unwrap()
        }
    }

    /// Anchor offset: the branch's base point relative to the current
    /// interval (0, 1/3, 2/3, 2/3).
    pub fn anchor_offset(self) -> Rational {
        match self {
            Digit::D0 => Rational::zero(),
            Digit::D1 => Rational::new(1, 3).unwrap(),
            Digit::D2 | Digit::D3 => Rational::new(2, 3).unwrap(),
        }
    }

    /// Digit 2 is the orientation-reversing branch.
    pub fn flips_orientation(self) -> bool {
        self == Digit::D2
    }
}

fn third() -> Rational {
    Rational::new(1, 3).unwrap()
}
fn half() -> Rational {
    Rational::new(1, 2).unwrap()
}
fn two_thirds() -> Rational {
    Rational::new(2, 3).unwrap()
}

/// One step of the interval map, exact.
///
/// Branches are half-open on the right except the last: [0,1/3), [1/3,1/2),
/// [1/2,2/3), [2/3,1].
pub fn step(x: &Rational) -> Result<Rational> {
    if !x.is_unit_interval() {
        return Err(Error::OutsideUnitInterval);
    }
    let three = Rational::from_int(3);
    let six = Rational::from_int(6);
    Ok(if *x < third() {
        &three * x
    } else if *x < half() {
        &six * x - Rational::from_int(2)
    } else if *x < two_thirds() {
        Rational::from_int(4) - &six * x
    } else {
        &three * x - Rational::from_int(2)
    })
}

/// Digit of a point under the same half-open branch convention; x = 1 gets
/// digit 3.
pub fn digit_of(x: &Rational) -> Result<Digit> {
    if !x.is_unit_interval() {
        return Err(Error::OutsideUnitInterval);
    }
    Ok(if *x < third() {
        Digit::D0
    } else if *x < half() {
        Digit::D1
    } else if *x < two_thirds() {
        Digit::D2
    } else {
        Digit::D3
    })
}

/// The first `n` digits of the orbit of `x`.
pub fn orbit_digits(x: &Rational, n: usize) -> Result<Vec<Digit>> {
    let mut digits = Vec::with_capacity(n);
    let mut cur = x.clone();
    for _ in 0..n {
        digits.push(digit_of(&cur)?);
        cur = step(&cur)?;
    }
    Ok(digits)
}

/// Eventually periodic digit word. An empty period means the point is known
/// only to finite depth.
///
/// The representation is canonical: the period is primitive (not a repetition
/// of a shorter word) and the preperiod is as short as possible.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SymbolicPoint {
    preperiod: Vec<Digit>,
    period: Vec<Digit>,
}

impl SymbolicPoint {
    pub fn new(preperiod: Vec<Digit>, period: Vec<Digit>) -> Self {
        let mut pre = preperiod;
        let mut per = primitive_period(period);
        while let (Some(&last_pre), Some(&last_per)) = (pre.last(), per.last()) {
            if last_pre != last_per {
                break;
            }
            pre.pop();
            per.rotate_right(1);
        }
        SymbolicPoint { preperiod: pre, period: per }
    }

    pub fn periodic(period: Vec<Digit>) -> Self {
        SymbolicPoint::new(Vec::new(), period)
    }

    pub fn preperiod(&self) -> &[Digit] {
        &self.preperiod
    }

    pub fn period(&self) -> &[Digit] {
        &self.period
    }

    /// The first `n` digits of the stream preperiod + period^inf.
    pub fn digits(&self, n: usize) -> Result<Vec<Digit>> {
        if self.period.is_empty() && n > self.preperiod.len() {
            return Err(Error::EmptyPeriod);
        }
        let mut out = Vec::with_capacity(n);
        out.extend_from_slice(&self.preperiod[..self.preperiod.len().min(n)]);
        let mut k = 0usize;
        while out.len() < n {
            out.push(self.period[k % self.period.len()]);
            k += 1;
        }
        Ok(out)
    }

    /// Digit counts inside one period, indexed by digit.
    pub fn period_counts(&self) -> Result<[usize; 4]> {
        if self.period.is_empty() {
            return Err(Error::EmptyPeriod);
        }
        let mut counts = [0usize; 4];
        for d in &self.period {
            counts[d.index()] += 1;
        }
        Ok(counts)
    }

    /// Exact value of the represented point, by summing the anchor series:
    /// the preperiod is summed term by term and the periodic tail is an exact
    /// geometric series because orientation and length multiply by a fixed
    /// signed rational over each period.
    pub fn value(&self) -> Result<Rational> {
        if self.period.is_empty() {
            return Err(Error::EmptyPeriod);
        }
        let mut sum = Rational::zero();
        let mut eps = 1i64;
        let mut ell = Rational::one();
        for &d in &self.preperiod {
            sum = sum + term(d, eps, &ell);
            advance_eps_ell(d, &mut eps, &mut ell);
        }
        let eps0 = eps;
        let ell0 = ell.clone();
        let mut period_sum = Rational::zero();
        for &d in &self.period {
            period_sum = period_sum + term(d, eps, &ell);
            advance_eps_ell(d, &mut eps, &mut ell);
        }
        // ratio of consecutive period blocks
        let rho = Rational::from_int((eps * eps0) as i64) * (&ell / &ell0);
        let tail = period_sum / (Rational::one() - rho);
        Ok(sum + tail)
    }
}

fn term(d: Digit, eps: i64, ell: &Rational) -> Rational {
    d.anchor_offset() * Rational::from_int(eps) * ell.clone()
}

fn advance_eps_ell(d: Digit, eps: &mut i64, ell: &mut Rational) {
    if d.flips_orientation() {
        *eps = -*eps;
    }
    *ell = &*ell * &d.contraction();
}

fn primitive_period(period: Vec<Digit>) -> Vec<Digit> {
    let n = period.len();
    for d in 1..n {
        if n % d == 0 && period.chunks(d).all(|c| c == &period[..d]) {
            return period[..d].to_vec();
        }
    }
    period
}

/// Where a point sits relative to the special digit sets.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PointClass {
    /// Digits eventually constant 0 or constant 3: the breakpoints.
    InE,
    /// Finitely many inner digits but not a breakpoint.
    InEtildeOnly,
    /// Infinitely many 1-digits, finitely many 2-digits: the curve has an
    /// infinite derivative of the recorded sign here.
    InV { derivative_sign: i8 },
    Generic,
}

/// Classifies an eventually periodic point by its digit tail.
pub fn classify(p: &SymbolicPoint) -> Result<PointClass> {
    if p.period().is_empty() {
        return Err(Error::EmptyPeriod);
    }
    let per = p.period();
    if per == [Digit::D0] || per == [Digit::D3] {
        return Ok(PointClass::InE);
    }
    if per.iter().all(|d| d.is_outer()) {
        return Ok(PointClass::InEtildeOnly);
    }
    let has_one = per.contains(&Digit::D1);
    let has_two = per.contains(&Digit::D2);
    if has_one && !has_two {
        let twos = p.preperiod().iter().filter(|d| **d == Digit::D2).count();
        let sign = if twos % 2 == 0 { 1 } else { -1 };
        return Ok(PointClass::InV { derivative_sign: sign });
    }
    Ok(PointClass::Generic)
}

/// Finds the eventually periodic digit word of a rational by iterating the
/// map with cycle detection. Rational orbits have bounded denominators so
/// they always cycle, but the cycle length can exceed any fixed budget,
/// hence the explicit cap.
pub fn to_symbolic(x: &Rational, max_depth: usize) -> Result<SymbolicPoint> {
    if !x.is_unit_interval() {
        return Err(Error::OutsideUnitInterval);
    }
    let mut seen: HashMap<Rational, usize> = HashMap::new();
    let mut digits = Vec::new();
    let mut cur = x.clone();
    for k in 0..max_depth {
        if let Some(&start) = seen.get(&cur) {
            let period = digits.split_off(start);
            return Ok(SymbolicPoint::new(digits, period));
        }
        seen.insert(cur.clone(), k);
        digits.push(digit_of(&cur)?);
        cur = step(&cur)?;
    }
    Err(Error::OrbitUndetermined { max_depth })
}

/// Cycle-detecting classification of a rational point.
pub fn classify_rational(x: &Rational, max_depth: usize) -> Result<PointClass> {
    classify(&to_symbolic(x, max_depth)?)
}

/// Generation-n bookkeeping for the walk down the construction: digit
/// counts, orientation, interval length and anchor, slope of the n-th
/// approximant over the interval, its idealized multiplicative counterpart,
/// the curve value at the anchor, and the segment length.
#[derive(Clone, Debug)]
pub struct OrbitState {
    pub n: usize,
    /// Digit counts by digit index.
    pub beta: [usize; 4],
    /// Orientation: sign of the slope of the n-th iterate on the interval.
    pub eps: i8,
    /// Interval length, exactly 3^-(outer count) * 6^-(inner count).
    pub ell: Rational,
    /// Anchor: the endpoint mapped to 0 by the n-th iterate.
    pub anchor: Rational,
    /// Slope of the n-th approximant over the interval.
    pub slope: SignedLog,
    /// Idealized slope: same recursion without the sqrt(1+m^2) correction.
    pub ideal_slope: SignedLog,
    /// Value of the n-th approximant at the anchor.
    pub anchor_value: f64,
    /// Length of the graph segment over the interval.
    pub seg_len: f64,
}

impl OrbitState {
    pub fn initial() -> Self {
        OrbitState {
            n: 0,
            beta: [0; 4],
            eps: 1,
            ell: Rational::one(),
            anchor: Rational::zero(),
            slope: SignedLog::ZERO,
            ideal_slope: SignedLog::ZERO,
            anchor_value: 0.0,
            seg_len: 1.0,
        }
    }

    pub fn beta_outer(&self) -> usize {
        self.beta[0] + self.beta[3]
    }

    pub fn beta_inner(&self) -> usize {
        self.beta[1] + self.beta[2]
    }

    /// The non-anchor endpoint, anchor + eps * ell.
    pub fn endpoint(&self) -> Rational {
        &self.anchor + &(Rational::from_int(self.eps as i64) * self.ell.clone())
    }

    /// Closed interval as an ordered pair.
    pub fn interval(&self) -> (Rational, Rational) {
        let b = self.endpoint();
        if self.eps > 0 {
            (self.anchor.clone(), b)
        } else {
            (b, self.anchor.clone())
        }
    }

    pub fn contains(&self, x: &Rational) -> bool {
        let (lo, hi) = self.interval();
        lo <= *x && *x <= hi
    }

    /// ln of the interval length, from the digit counts alone, so it never
    /// underflows.
    pub fn ln_ell(&self) -> f64 {
        -(self.beta_outer() as f64) * 3f64.ln() - (self.beta_inner() as f64) * 6f64.ln()
    }

    /// One construction step along digit `d`.
    pub fn advance(&self, d: Digit, lambda: f64) -> Result<OrbitState> {
        check_lambda(lambda)?;
        Ok(self.advance_unchecked(d, lambda))
    }

    pub(crate) fn advance_unchecked(&self, d: Digit, lambda: f64) -> OrbitState {
        let delta = term(d, self.eps as i64, &self.ell);
        let anchor = &self.anchor + &delta;
        let mut beta = self.beta;
        beta[d.index()] += 1;
        let eps = if d.flips_orientation() { -self.eps } else { self.eps };
        let ell = &self.ell * &d.contraction();
        let slope = slope_step(&self.slope, d, lambda);
        let ideal_slope = ideal_slope_step(&self.ideal_slope, d, lambda);

        // The new anchor lies on the old segment, so the value moves along
        // the old slope. Product in log space: delta underflows f64 past
        // generation ~400 but slope * delta stays bounded.
        let anchor_value = if self.slope.is_zero() || delta.is_zero() {
            self.anchor_value
        } else {
            let dv_sign = if delta > Rational::zero() { 1.0 } else { -1.0 };
            let dv = self.slope.sign() as f64
                * dv_sign
                * (self.slope.ln_abs() + delta.abs().ln()).exp();
            self.anchor_value + dv
        };

        let ln_ell = self.ln_ell() - if d.is_outer() { 3f64.ln() } else { 6f64.ln() };
        let seg_len = (ln_ell + slope.ln_hypot1()).exp();

        OrbitState { n: self.n + 1, beta, eps, ell, anchor, slope, ideal_slope, anchor_value, seg_len }
    }
}

/// Slope recursion: unchanged on outer digits; digit 1 adds 6λ sqrt(1+m²)
/// to the magnitude; digit 2 replaces the magnitude by
/// 6λ sqrt(1+m²) − |m| (positive for λ > 1/6) and flips the sign. The first
/// inner digit activates the slope at ±6λ.
pub(crate) fn slope_step(m: &SignedLog, d: Digit, lambda: f64) -> SignedLog {
    let c = 6.0 * lambda;
    match d {
        Digit::D0 | Digit::D3 => *m,
        Digit::D1 => {
            if m.is_zero() {
                return SignedLog::from_f64(c);
            }
            let lnm = m.ln_abs();
            let ln_new = if lnm > 0.0 {
                let s = 0.5 * (-2.0 * lnm).exp().ln_1p(); // ln sqrt(1+1/m²)
                lnm + (c * s.exp()).ln_1p()
            } else {
                let v = lnm.exp();
                (v + c * (1.0 + v * v).sqrt()).ln()
            };
            SignedLog::new(m.sign(), ln_new)
        }
        Digit::D2 => {
            if m.is_zero() {
                return SignedLog::from_f64(-c);
            }
            let lnm = m.ln_abs();
            let ln_new = if lnm > 0.0 {
                let s = 0.5 * (-2.0 * lnm).exp().ln_1p();
                // c e^s − 1 = (c − 1) + c (e^s − 1), keeps precision near λ = 1/6
                lnm + ((c - 1.0) + c * s.exp_m1()).ln()
            } else {
                let v = lnm.exp();
                (c * (1.0 + v * v).sqrt() - v).ln()
            };
            SignedLog::new(-m.sign(), ln_new)
        }
    }
}

/// Idealized slope recursion: multiply by (6λ+1) per 1-digit and (6λ−1) per
/// 2-digit after activating at 6λ. Magnitudes only.
pub(crate) fn ideal_slope_step(m: &SignedLog, d: Digit, lambda: f64) -> SignedLog {
    let c = 6.0 * lambda;
    match d {
        Digit::D0 | Digit::D3 => *m,
        Digit::D1 => {
            if m.is_zero() {
                SignedLog::from_f64(c)
            } else {
                SignedLog::new(1, m.ln_abs() + (c + 1.0).ln())
            }
        }
        Digit::D2 => {
            if m.is_zero() {
                SignedLog::from_f64(c)
            } else {
                SignedLog::new(1, m.ln_abs() + (c - 1.0).ln())
            }
        }
    }
}

/// Growth-rate ratio of a digit-count vector: slope-log numerator over
/// length-log denominator. Shared by the exponent and local-dimension
/// formulas so their algebraic relation holds to machine precision.
pub(crate) fn frequency_ratio(lambda: f64, counts: &[usize; 4]) -> f64 {
    let ones = counts[1] as f64;
    let twos = counts[2] as f64;
    let outer = (counts[0] + counts[3]) as f64;
    let num = ones * (6.0 * lambda + 1.0).ln() + twos * (6.0 * lambda - 1.0).ln();
    let den = outer * 3f64.ln() + (ones + twos) * 6f64.ln();
    num / den
}

/// State after folding the first `n` digits of `x` through the construction.
pub fn interval_of(x: &Rational, n: usize, lambda: f64) -> Result<OrbitState> {
    check_lambda(lambda)?;
    let digits = orbit_digits(x, n)?;
    Ok(fold_digits(&digits, lambda))
}

/// State after folding an explicit digit word.
pub fn interval_of_digits(digits: &[Digit], lambda: f64) -> Result<OrbitState> {
    check_lambda(lambda)?;
    Ok(fold_digits(digits, lambda))
}

pub(crate) fn fold_digits(digits: &[Digit], lambda: f64) -> OrbitState {
    let mut state = OrbitState::initial();
    for &d in digits {
        state = state.advance_unchecked(d, lambda);
    }
    state
}
