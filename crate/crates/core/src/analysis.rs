//! Energy functionals, the semigroup maximal-regularity identity, weighted
//! sup/integral tests on time grids, and log-log decay-rate fitting.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::exp_poly::ExpPoly;
use crate::profiles::{binomial, ModalCurve};
use crate::spectral::{lambda_pow, ModalVector, SpectralMeasure};

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct EnergyReport {
    pub t: f64,
    /// `||u'||^2 + ||A^(1/2) u||^2`
    pub energy: f64,
    /// `||u||^2 + 2 (u, u')`
    pub e_star: f64,
    /// `||u||^2`
    pub l2: f64,
}

/// A modal state with its time derivative, for repeated energy evaluation.
#[derive(Clone, Debug)]
pub struct EnergyTracker<'a> {
    measure: &'a SpectralMeasure,
    u: ModalCurve,
    du: ModalCurve,
}

impl<'a> EnergyTracker<'a> {
    pub fn new(measure: &'a SpectralMeasure, state: &[ExpPoly]) -> Result<Self> {
        if state.len() != measure.len() {
            return Err(Error::Shape {
                expected: measure.len(),
                found: state.len(),
            });
        }
        let u = ModalCurve {
            modes: state.to_vec(),
        };
        let du = u.derivative(1);
        Ok(Self { measure, u, du })
    }

    pub fn at(&self, t: f64) -> EnergyReport {
        let (mut energy, mut e_star, mut l2) = (0.0, 0.0, 0.0);
        for (k, mode) in self.measure.modes().iter().enumerate() {
            let u = self.u.modes[k].eval_re(t);
            let du = self.du.modes[k].eval_re(t);
            energy += mode.weight * (du * du + mode.lambda * u * u);
            e_star += mode.weight * (u * u + 2.0 * u * du);
            l2 += mode.weight * u * u;
        }
        EnergyReport { t, energy, e_star, l2 }
    }

    /// `int_0^t ||u'(s)||^2 ds`, exactly per mode.
    pub fn dissipation(&self, t: f64) -> f64 {
        self.measure.weighted_sum(|k, _| {
            let du = &self.du.modes[k];
            (du * du).definite_integral(t).re
        })
    }

    /// `|E(t) + 2 int_0^t ||u'||^2 - E(0)|`, relative to `E(0)` when it is nonzero.
    pub fn identity_defect(&self, t: f64) -> f64 {
        let e0 = self.at(0.0).energy;
        let gap = (self.at(t).energy + 2.0 * self.dissipation(t) - e0).abs();
        if e0 > 0.0 {
            gap / e0
        } else {
            gap
        }
    }
}

pub fn energy(measure: &SpectralMeasure, state: &[ExpPoly], t: f64) -> Result<EnergyReport> {
    if !(t >= 0.0) {
        return Err(Error::Argument(format!("time {t} must be nonnegative")));
    }
    Ok(EnergyTracker::new(measure, state)?.at(t))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MaxRegIdentity {
    /// `||e^{-tA}f||^2/2 + gap + (2^n/n!) int_0^t s^n ||A^((n+1)/2) e^{-sA} f||^2 ds`
    pub lhs: f64,
    /// `||f||^2 / 2`
    pub rhs: f64,
    /// `(1/2) sum_{k<n} (2t)^(k+1)/(k+1)! ||A^((k+1)/2) e^{-tA} f||^2`
    pub paper_form_gap: f64,
}

/// The time-weighted energy identity of the heat semigroup, with the evaluated
/// lower-order sum that the telescoping argument leaves at time `t`.
pub fn max_reg_identity(measure: &SpectralMeasure, f: &ModalVector, n: usize, t: f64) -> Result<MaxRegIdentity> {
    f.conform(measure)?;
    if !(t >= 0.0) {
        return Err(Error::Argument(format!("time {t} must be nonnegative")));
    }
    let n_fact = (1..=n).fold(1.0, |acc, i| acc * i as f64);
    let lead = 2f64.powi(n as i32) / n_fact;
    let (mut heat, mut gap, mut integral) = (0.0, 0.0, 0.0);
    for (k, mode) in measure.modes().iter().enumerate() {
        let c2 = f.coeffs[k] * f.coeffs[k];
        let lambda = mode.lambda;
        let decay = (-2.0 * lambda * t).exp();
        heat += mode.weight * 0.5 * decay * c2;
        let mut mid = 0.0;
        let mut factor = 1.0; // (2t)^(k+1)/(k+1)!
        for j in 0..n {
            factor *= 2.0 * t / (j as f64 + 1.0);
            mid += factor * lambda.powi(j as i32 + 1) * decay;
        }
        gap += mode.weight * 0.5 * mid * c2;
        let weighted = ExpPoly::real_term(lambda.powi(n as i32 + 1), n as u32, -2.0 * lambda);
        integral += mode.weight * lead * weighted.definite_integral(t).re * c2;
    }
    let rhs = 0.5 * measure.weighted_sum(|k, _| f.coeffs[k] * f.coeffs[k]);
    Ok(MaxRegIdentity {
        lhs: heat + gap + integral,
        rhs,
        paper_form_gap: gap,
    })
}

/// Exact `int_0^inf (1+s)^n ||A^((n+1)/2) e^{-sA} f||^2 ds`.
pub fn max_reg_weighted_integral(measure: &SpectralMeasure, f: &ModalVector, n: usize) -> Result<f64> {
    f.conform(measure)?;
    let mut coefs = Vec::with_capacity(n + 1);
    for k in 0..=n {
        let k_fact = (1..=k).fold(1.0, |acc, i| acc * i as f64);
        coefs.push(binomial(n as u64, k as u64)? as f64 * k_fact / 2f64.powi(k as i32 + 1));
    }
    Ok(measure.weighted_sum(|k, lambda| {
        if lambda == 0.0 {
            return 0.0;
        }
        // sum_j C(n,j) j! lambda^(n-j) / 2^(j+1)
        let per: f64 = coefs
            .iter()
            .enumerate()
            .map(|(j, c)| c * lambda.powi((n - j) as i32))
            .sum();
        per * f.coeffs[k] * f.coeffs[k]
    }))
}

/// A constant `C_n` with `int_0^inf (1+s)^n ||A^((n+1)/2) e^{-sA} f||^2 ds <= C_n (||f||^2 + ||A^(n/2) f||^2)`.
pub fn max_reg_constant(n: usize) -> Result<f64> {
    let mut c = 0.0;
    for k in 0..=n {
        let k_fact = (1..=k).fold(1.0, |acc, i| acc * i as f64);
        c += binomial(n as u64, k as u64)? as f64 * k_fact / 2f64.powi(k as i32 + 1);
    }
    Ok(c)
}

/// `||A^s e^{-tA} f||^2`.
pub fn heat_norm_sq(measure: &SpectralMeasure, f: &ModalVector, s: f64, t: f64) -> f64 {
    measure.weighted_sum(|k, lambda| {
        let c = f.coeffs[k] * (-lambda * t).exp();
        lambda_pow(lambda, 2.0 * s) * c * c
    })
}

/// `n` points log-spaced in `1 + t` from `t_min` to `t_max` inclusive.
pub fn log_grid(t_min: f64, t_max: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![t_min];
    }
    let (a, b) = ((1.0 + t_min).ln(), (1.0 + t_max).ln());
    (0..n)
        .map(|i| {
            if i == n - 1 {
                t_max
            } else {
                (a + (b - a) * i as f64 / (n - 1) as f64).exp() - 1.0
            }
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum TailMode {
    Supremum,
    Integral,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TimeWindow {
    pub t_min: f64,
    /// May be infinite in integral mode.
    pub t_max: f64,
    pub points: usize,
}

impl Default for TimeWindow {
    fn default() -> Self {
        Self {
            t_min: 0.0,
            t_max: 1e4,
            points: 200,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TailCheck {
    pub finite: bool,
    pub value: f64,
    /// Location of the supremum (supremum mode only).
    pub argmax: Option<f64>,
    /// Estimated absolute quadrature error (integral mode only).
    pub error_estimate: Option<f64>,
}

const TAIL_SLACK: f64 = 1e-9;

/// Weighted supremum or integral of `(1+t)^p curve(t)` on a window.
///
/// In supremum mode the value is the grid maximum (refined locally by golden
/// section) and `finite` requires the weighted curve to be nonincreasing over
/// the last decade of the window. In integral mode the value is a composite
/// Simpson integral in `s = ln(1+t)` refined until the Richardson estimate
/// meets the tolerance; infinite windows are extended decade by decade.
pub fn weighted_tail_check(
    curve: impl Fn(f64) -> f64,
    weight_exponent: f64,
    mode: TailMode,
    window: TimeWindow,
) -> Result<TailCheck> {
    let g = |t: f64| -> Result<f64> {
        let v = curve(t);
        if !v.is_finite() {
            return Err(Error::NonFinite { t, value: v });
        }
        Ok((1.0 + t).powf(weight_exponent) * v)
    };
    if !(window.t_min >= 0.0 && window.t_max > window.t_min) {
        return Err(Error::Argument(format!(
            "invalid window [{}, {}]",
            window.t_min, window.t_max
        )));
    }
    match mode {
        TailMode::Supremum => {
            if !window.t_max.is_finite() || window.points < 3 {
                return Err(Error::Argument("supremum needs a finite window with at least 3 points".into()));
            }
            let grid = log_grid(window.t_min, window.t_max, window.points);
            let values = grid.iter().map(|&t| g(t)).collect::<Result<Vec<_>>>()?;
            let (imax, _) = values
                .iter()
                .enumerate()
                .fold((0, f64::NEG_INFINITY), |acc, (i, &v)| if v > acc.1 { (i, v) } else { acc });
            let (mut best_t, mut best) = (grid[imax], values[imax]);
            if imax > 0 && imax + 1 < grid.len() {
                let (t, v) = golden_max(&g, grid[imax - 1], grid[imax + 1])?;
                if v > best {
                    best_t = t;
                    best = v;
                }
            }
            let tail_start = window.t_max / 10.0;
            let mut nonincreasing = true;
            let mut prev: Option<f64> = None;
            for (&t, &v) in grid.iter().zip(&values) {
                if t < tail_start {
                    continue;
                }
                if let Some(p) = prev {
                    if v > p * (1.0 + TAIL_SLACK) + f64::MIN_POSITIVE {
                        nonincreasing = false;
                    }
                }
                prev = Some(v);
            }
            Ok(TailCheck {
                finite: nonincreasing && best.is_finite(),
                value: best,
                argmax: Some(best_t),
                error_estimate: None,
            })
        }
        TailMode::Integral => integral_in_log_time(&g, window.t_min, window.t_max),
    }
}

fn golden_max(g: &impl Fn(f64) -> Result<f64>, mut a: f64, mut b: f64) -> Result<(f64, f64)> {
    let r = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let (mut gc, mut gd) = (g(c)?, g(d)?);
    for _ in 0..80 {
        if gc > gd {
            b = d;
            d = c;
            gd = gc;
            c = b - r * (b - a);
            gc = g(c)?;
        } else {
            a = c;
            c = d;
            gc = gd;
            d = a + r * (b - a);
            gd = g(d)?;
        }
        if (b - a).abs() <= 1e-12 * (1.0 + a.abs()) {
            break;
        }
    }
    let t = 0.5 * (a + b);
    Ok((t, g(t)?))
}

const INTEGRAL_RTOL: f64 = 1e-10;
const TAIL_RTOL: f64 = 1e-7;
const MAX_UPPER: f64 = 1e16;

fn simpson_log(g: &impl Fn(f64) -> Result<f64>, t0: f64, t1: f64) -> Result<(f64, f64, bool)> {
    let (s0, s1) = ((1.0 + t0).ln(), (1.0 + t1).ln());
    let h_of = |s: f64| -> Result<f64> { Ok(g(s.exp() - 1.0)? * s.exp()) };
    let simpson = |n: usize| -> Result<f64> {
        let h = (s1 - s0) / n as f64;
        let mut acc = h_of(s0)? + h_of(s1)?;
        for i in 1..n {
            let w = if i % 2 == 1 { 4.0 } else { 2.0 };
            acc += w * h_of(s0 + i as f64 * h)?;
        }
        Ok(acc * h / 3.0)
    };
    let mut n = 64;
    let mut coarse = simpson(n)?;
    loop {
        n *= 2;
        let fine = simpson(n)?;
        let err = (fine - coarse).abs() / 15.0;
        if err <= INTEGRAL_RTOL * fine.abs() || fine == 0.0 {
            return Ok((fine + (fine - coarse) / 15.0, err, true));
        }
        if n >= 1 << 16 {
            return Ok((fine, err, false));
        }
        coarse = fine;
    }
}

fn integral_in_log_time(g: &impl Fn(f64) -> Result<f64>, t_min: f64, t_max: f64) -> Result<TailCheck> {
    if t_max.is_finite() {
        let (value, err, converged) = simpson_log(g, t_min, t_max)?;
        return Ok(TailCheck {
            finite: converged,
            value,
            argmax: None,
            error_estimate: Some(err),
        });
    }
    let mut lower = t_min;
    let mut upper = (1.0 + t_min) * 10.0 - 1.0;
    let (mut total, mut err_total) = (0.0, 0.0);
    let mut converged = true;
    loop {
        let (piece, err, ok) = simpson_log(g, lower, upper)?;
        total += piece;
        err_total += err;
        converged &= ok;
        if piece.abs() <= TAIL_RTOL * total.abs() || total == 0.0 && piece == 0.0 {
            break;
        }
        if upper >= MAX_UPPER {
            converged = false;
            break;
        }
        lower = upper;
        upper = (1.0 + upper) * 10.0 - 1.0;
    }
    Ok(TailCheck {
        finite: converged && total.is_finite(),
        value: total,
        argmax: None,
        error_estimate: Some(err_total),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DecayFit {
    pub slope: f64,
    pub intercept: f64,
    pub max_abs_residual: f64,
    pub window: (f64, f64),
    pub sample_count: usize,
}

pub const MIN_FIT_SAMPLES: usize = 8;
pub const MIN_FIT_DECADES: f64 = 1.5;
/// Fitted slopes steeper than this are reported as faster than any power.
pub const SUPER_POLYNOMIAL_SLOPE: f64 = -10.0;

/// Least-squares line through `(ln(1+t), ln value)`.
pub fn fit_decay(samples: &[(f64, f64)]) -> Result<DecayFit> {
    if samples.len() < MIN_FIT_SAMPLES {
        return Err(Error::CannotFit(format!(
            "{} samples, at least {MIN_FIT_SAMPLES} needed",
            samples.len()
        )));
    }
    if let Some(&(t, v)) = samples.iter().find(|s| !(s.1 > 0.0 && s.1.is_finite())) {
        return Err(Error::CannotFit(format!("value {v} at t = {t} is not positive")));
    }
    let t_min = samples.iter().map(|s| s.0).fold(f64::INFINITY, f64::min);
    let t_max = samples.iter().map(|s| s.0).fold(f64::NEG_INFINITY, f64::max);
    let decades = ((1.0 + t_max) / (1.0 + t_min)).log10();
    if !(decades >= MIN_FIT_DECADES) {
        return Err(Error::Window(format!(
            "samples span {decades:.3} decades of 1+t, at least {MIN_FIT_DECADES} needed"
        )));
    }
    let n = samples.len() as f64;
    let xs: Vec<f64> = samples.iter().map(|s| (1.0 + s.0).ln()).collect();
    let ys: Vec<f64> = samples.iter().map(|s| s.1.ln()).collect();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let max_abs_residual = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (y - intercept - slope * x).abs())
        .fold(0.0, f64::max);
    Ok(DecayFit {
        slope,
        intercept,
        max_abs_residual,
        window: (t_min, t_max),
        sample_count: samples.len(),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum DecayClass {
    Power(DecayFit),
    /// Exponential-type decay: values underflow or the slope is below [`SUPER_POLYNOMIAL_SLOPE`].
    SuperPolynomial,
    /// Every sample is exactly zero.
    Vanishing,
}

/// Routes spectral-gap (exponential) decay away from power-law fitting.
pub fn classify_decay(samples: &[(f64, f64)]) -> Result<DecayClass> {
    if let Some(&(t, v)) = samples.iter().find(|s| !(s.1 >= 0.0 && s.1.is_finite())) {
        return Err(Error::CannotFit(format!("value {v} at t = {t} is negative or non-finite")));
    }
    if samples.iter().all(|s| s.1 == 0.0) {
        return Ok(DecayClass::Vanishing);
    }
    if samples.iter().any(|s| s.1 == 0.0) {
        return Ok(DecayClass::SuperPolynomial);
    }
    let fit = fit_decay(samples)?;
    if fit.slope < SUPER_POLYNOMIAL_SLOPE {
        Ok(DecayClass::SuperPolynomial)
    } else {
        Ok(DecayClass::Power(fit))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::modal::solve_damped_mode;
    use crate::spectral::{path_graph_measure, Mode};

    fn single(lambda: f64) -> SpectralMeasure {
        SpectralMeasure::new("single", vec![Mode { lambda, weight: 1.0 }]).unwrap()
    }

    #[test]
    fn energy_of_zero_mode() {
        let m = single(0.0);
        let u = solve_damped_mode(0.0, 0.0, 1.0).unwrap().u;
        for &t in &[0.0, 0.5, 3.0] {
            let e = energy(&m, std::slice::from_ref(&u), t).unwrap();
            assert!((e.energy - (-2.0 * t).exp()).abs() < 1e-15);
            let l2 = (1.0 - (-t).exp()).powi(2);
            assert!((e.l2 - l2).abs() < 1e-15);
        }
        let tracker = EnergyTracker::new(&m, std::slice::from_ref(&u)).unwrap();
        assert!(tracker.identity_defect(2.0) < 1e-15);
        let zero = energy(&m, &[ExpPoly::zero()], 1.0).unwrap();
        assert_eq!((zero.energy, zero.e_star, zero.l2), (0.0, 0.0, 0.0));
        assert!(energy(&m, &[], 1.0).is_err());
    }

    #[test]
    fn max_reg_examples() {
        let lambda = 0.5;
        let m = single(lambda);
        let f = ModalVector::new(vec![1.0]);
        let r = max_reg_identity(&m, &f, 0, 1.3).unwrap();
        assert_eq!(r.paper_form_gap, 0.0);
        assert!((r.lhs - 0.5).abs() < 1e-15);
        let r = max_reg_identity(&m, &f, 1, 1.0).unwrap();
        assert!((r.lhs - r.rhs).abs() < 1e-15);
        assert!((r.paper_form_gap - 0.5 * (-1.0f64).exp()).abs() < 1e-15);
        let z = max_reg_identity(&m, &ModalVector::new(vec![0.0]), 3, 2.0).unwrap();
        assert_eq!((z.lhs, z.rhs, z.paper_form_gap), (0.0, 0.0, 0.0));
        assert!(max_reg_identity(&m, &f, 1, -1.0).is_err());
    }

    #[test]
    fn max_reg_on_path_graph() {
        let m = path_graph_measure(7).unwrap();
        let f = ModalVector::new(vec![0.3, -1.0, 0.4, 2.0, 0.0, 0.1, -0.6]);
        for n in 0..5 {
            for &t in &[0.0, 0.5, 20.0] {
                let r = max_reg_identity(&m, &f, n, t).unwrap();
                assert!((r.lhs - r.rhs).abs() <= 1e-12 * 2.0 * r.rhs, "n={n} t={t}");
                assert!(r.paper_form_gap >= 0.0);
            }
        }
    }

    #[test]
    fn max_reg_weighted_integral_closed_form() {
        // one mode: int_0^inf (1+s) lambda^2 e^{-2 lambda s} ds = lambda/2 + 1/4
        let m = single(3.0);
        let f = ModalVector::new(vec![1.0]);
        let v = max_reg_weighted_integral(&m, &f, 1).unwrap();
        assert!((v - (1.5 + 0.25)).abs() < 1e-14);
        assert_eq!(max_reg_constant(1).unwrap(), 0.75);
    }

    #[test]
    fn sup_example_stationary_point() {
        let r = weighted_tail_check(|t| (-t).exp(), 3.0, TailMode::Supremum, TimeWindow::default()).unwrap();
        assert!(r.finite);
        assert!((r.argmax.unwrap() - 2.0).abs() < 1e-6);
        assert!((r.value - 27.0 * (-2.0f64).exp()).abs() < 1e-12);
    }

    #[test]
    fn sup_of_balanced_power_is_one() {
        let r = weighted_tail_check(|t| (1.0 + t).powi(-2), 2.0, TailMode::Supremum, TimeWindow::default()).unwrap();
        assert!(r.finite);
        assert!((r.value - 1.0).abs() < 1e-12);
        let grow = weighted_tail_check(|t| (1.0 + t).powi(-2), 3.0, TailMode::Supremum, TimeWindow::default()).unwrap();
        assert!(!grow.finite);
    }

    #[test]
    fn integral_of_inverse_square() {
        let window = TimeWindow {
            t_min: 0.0,
            t_max: f64::INFINITY,
            points: 0,
        };
        let r = weighted_tail_check(|t| (1.0 + t).powi(-2), 0.0, TailMode::Integral, window).unwrap();
        assert!(r.finite);
        assert!((r.value - 1.0).abs() < 1e-6, "{}", r.value);
        let finite = TimeWindow { t_max: 1e4, ..window };
        let r = weighted_tail_check(|t| (1.0 + t).powi(-2), 0.0, TailMode::Integral, finite).unwrap();
        assert!((r.value - (1.0 - 1.0 / 10001.0)).abs() < 1e-9);
        let diverge = weighted_tail_check(|t| (1.0 + t).powi(-1), 0.0, TailMode::Integral, window).unwrap();
        assert!(!diverge.finite);
    }

    #[test]
    fn non_finite_curve_is_reported() {
        let err = weighted_tail_check(|t| if t > 5.0 { f64::NAN } else { 1.0 }, 0.0, TailMode::Supremum, TimeWindow::default())
            .unwrap_err();
        assert!(matches!(err, Error::NonFinite { .. }));
    }

    fn samples(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> Vec<(f64, f64)> {
        log_grid(a, b, n).into_iter().map(|t| (t, f(t))).collect()
    }

    #[test]
    fn fit_examples() {
        let fit = fit_decay(&samples(|t| 1.0 / (1.0 + t), 0.0, 1e3, 32)).unwrap();
        assert!((fit.slope + 1.0).abs() < 1e-12);
        assert!(fit.max_abs_residual < 1e-12);
        let fit = fit_decay(&samples(|t| 3.0 * (1.0 + t).powf(-2.5), 1.0, 1e3, 32)).unwrap();
        assert!((fit.slope + 2.5).abs() < 1e-12);
        assert!((fit.intercept - 3f64.ln()).abs() < 1e-12);
        let fit = fit_decay(&samples(|t| 1.0 / (1.0 + t) + (1.0 + t).powi(-3), 1e2, 1e4, 32)).unwrap();
        assert!((fit.slope + 1.0).abs() < 0.02);
    }

    #[test]
    fn fit_errors_and_classification() {
        assert!(matches!(fit_decay(&samples(|t| 1.0 / (1.0 + t), 0.0, 1e3, 4)), Err(Error::CannotFit(_))));
        assert!(matches!(fit_decay(&samples(|t| 1.0 / (1.0 + t), 10.0, 100.0, 16)), Err(Error::Window(_))));
        assert!(matches!(fit_decay(&samples(|_| 0.0, 10.0, 1e3, 16)), Err(Error::CannotFit(_))));
        assert_eq!(classify_decay(&samples(|_| 0.0, 10.0, 1e3, 16)).unwrap(), DecayClass::Vanishing);
        assert_eq!(
            classify_decay(&samples(|t| (-t).exp(), 10.0, 1e3, 16)).unwrap(),
            DecayClass::SuperPolynomial
        );
        assert_eq!(
            classify_decay(&samples(|t| (-0.5 * t).exp(), 10.0, 1e3, 16)).unwrap(),
            DecayClass::SuperPolynomial
        );
        assert!(matches!(
            classify_decay(&samples(|t| (1.0 + t).powi(-2), 10.0, 1e3, 16)).unwrap(),
            DecayClass::Power(_)
        ));
    }
}
