//! Asymptotic profile families of the damped equation, per mode.
//!
//! With `v0 = u0 + u1`, every profile is `polynomial(t) * exp(-lambda t)`:
//!
//! * `V_m` — the successive corrections, `V_0 = e^{-t lambda} v0`;
//! * `V_{m,l}` — defined by `d^l/dt^l V_m = (-lambda)^l V_{m,l}`;
//! * `ubar_l = (-lambda)^l V_{l,l}` — the grade-`l` term of the expansion
//!   `u ~ sum_l ubar_l`.
//!
//! Binomial coefficients are exact integers; the rational coefficient arrays
//! of `ubar_l` are exposed so that an independent series expansion can check
//! them exactly.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::exp_poly::ExpPoly;
use crate::modal;
use crate::spectral::{ModalVector, SpectralMeasure};

/// Exact `C(n, k)`; zero when `k > n`.
pub fn binomial(n: u64, k: u64) -> Result<u64> {
    if k > n {
        return Ok(0);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc
            .checked_mul((n - i) as u128)
            .ok_or_else(|| Error::Overflow(format!("C({n}, {k})")))?
            / (i as u128 + 1);
    }
    u64::try_from(acc).map_err(|_| Error::Overflow(format!("C({n}, {k}) exceeds 64 bits")))
}

fn factorial(n: u64) -> Result<u64> {
    (1..=n).try_fold(1u64, |acc, i| {
        acc.checked_mul(i)
            .ok_or_else(|| Error::Overflow(format!("{n}!")))
    })
}

fn sign(power: usize) -> f64 {
    if power % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// `sum_j coef_j (-lambda)^j / j! t^j e^{-lambda t}` times `prefactor`.
fn poly_times_heat(coefs: &[u64], lambda: f64, prefactor: f64) -> Result<ExpPoly> {
    let mut terms = ExpPoly::zero();
    let mut power = 1.0; // (-lambda)^j / j!
    for (j, &c) in coefs.iter().enumerate() {
        if j > 0 {
            power *= -lambda / j as f64;
        }
        let coef = prefactor * c as f64 * power;
        terms = &terms + &ExpPoly::real_term(coef, j as u32, -lambda);
    }
    Ok(terms)
}

/// `V_m` for one mode with transformed data `v0_hat`, `u1_hat`.
pub fn profile_v(m: usize, lambda: f64, v0_hat: f64, u1_hat: f64) -> Result<ExpPoly> {
    check_lambda(lambda)?;
    if m == 0 {
        return Ok(ExpPoly::real_term(v0_hat, 0, -lambda));
    }
    let n = (m - 1) as u64;
    // j = 0 carries C(m-1, -1) = 0
    let mut first = vec![0u64];
    for j in 1..=m as u64 {
        first.push(binomial(n, j - 1)?);
    }
    let second = (0..m as u64).map(|k| binomial(n, k)).collect::<Result<Vec<_>>>()?;
    let s = sign(m);
    Ok(&poly_times_heat(&first, lambda, s * v0_hat)? + &poly_times_heat(&second, lambda, s * u1_hat)?)
}

/// `V_{m,l}` with `d^l/dt^l V_m = (-lambda)^l V_{m,l}`; requires `m, l >= 1`.
pub fn profile_v_ml(m: usize, ell: usize, lambda: f64, v0_hat: f64, u1_hat: f64) -> Result<ExpPoly> {
    check_lambda(lambda)?;
    if m == 0 || ell == 0 {
        return Err(Error::Argument(format!(
            "V_(m,l) needs m >= 1 and l >= 1, got m = {m}, l = {ell}"
        )));
    }
    let top = (ell + m - 1) as u64;
    let first = (0..=m as u64)
        .map(|j| binomial(top, ell as u64 + j - 1))
        .collect::<Result<Vec<_>>>()?;
    let second = (0..m as u64)
        .map(|k| binomial(top, ell as u64 + k))
        .collect::<Result<Vec<_>>>()?;
    let s = sign(m);
    Ok(&poly_times_heat(&first, lambda, s * v0_hat)? + &poly_times_heat(&second, lambda, s * u1_hat)?)
}

/// Exact coefficients of `ubar_l = sum_j a_j lambda^(l+j) t^j e^{-lambda t} v0
/// + sum_k b_k lambda^(l+k) t^k e^{-lambda t} u1`.
#[derive(Clone, Debug, PartialEq)]
pub struct ProfileCoefficients {
    pub ell: usize,
    /// `a_j = C(2l-1, l+j-1) (-1)^j / j!`, `j = 0..=l` (for `l = 0`: `a = [1]`).
    pub v0: Vec<BigRational>,
    /// `b_k = C(2l-1, l+k) (-1)^k / k!`, `k = 0..l`.
    pub u1: Vec<BigRational>,
}

pub fn u_bar_coefficients(ell: usize) -> Result<ProfileCoefficients> {
    if ell == 0 {
        return Ok(ProfileCoefficients {
            ell,
            v0: vec![BigRational::one()],
            u1: Vec::new(),
        });
    }
    let top = (2 * ell - 1) as u64;
    let entry = |binom: u64, j: usize| -> Result<BigRational> {
        let f = factorial(j as u64)?;
        let r = BigRational::new(BigInt::from(binom), BigInt::from(f));
        Ok(if j % 2 == 0 { r } else { -r })
    };
    let v0 = (0..=ell)
        .map(|j| entry(binomial(top, (ell + j - 1) as u64)?, j))
        .collect::<Result<Vec<_>>>()?;
    let u1 = (0..ell)
        .map(|k| entry(binomial(top, (ell + k) as u64)?, k))
        .collect::<Result<Vec<_>>>()?;
    Ok(ProfileCoefficients { ell, v0, u1 })
}

/// The `l`-th asymptotic profile for one mode.
pub fn profile_u_bar(ell: usize, lambda: f64, v0_hat: f64, u1_hat: f64) -> Result<ExpPoly> {
    check_lambda(lambda)?;
    let coefs = u_bar_coefficients(ell)?;
    let mut out = ExpPoly::zero();
    for (data, arr) in [(v0_hat, &coefs.v0), (u1_hat, &coefs.u1)] {
        for (j, c) in arr.iter().enumerate() {
            let c = c.to_f64().unwrap_or(0.0);
            let coef = data * c * lambda.powi((ell + j) as i32);
            out = &out + &ExpPoly::real_term(coef, j as u32, -lambda);
        }
    }
    Ok(out)
}

/// `V_{m+1}' + lambda V_{m+1} + V_m'`, identically zero when the profiles are consistent.
pub fn recursion_residual(m: usize, lambda: f64, v0_hat: f64, u1_hat: f64) -> Result<ExpPoly> {
    let next = profile_v(m + 1, lambda, v0_hat, u1_hat)?;
    let cur = profile_v(m, lambda, v0_hat, u1_hat)?;
    let lhs = &next.derivative(1) + &next.scale_real(lambda);
    Ok(&lhs + &cur.derivative(1))
}

fn check_lambda(lambda: f64) -> Result<()> {
    if !lambda.is_finite() || lambda < 0.0 {
        return Err(Error::Domain(format!(
            "eigenvalue {lambda} must be finite and nonnegative"
        )));
    }
    Ok(())
}

/// A vector-valued time function, one exp-polynomial per mode of a measure.
#[derive(Clone, Debug)]
pub struct ModalCurve {
    pub modes: Vec<ExpPoly>,
}

impl ModalCurve {
    /// Builds the curve mode by mode (in parallel); order follows the measure.
    pub fn build(
        measure: &SpectralMeasure,
        f: impl Fn(usize, f64) -> Result<ExpPoly> + Sync,
    ) -> Result<Self> {
        let lambdas: Vec<f64> = measure.lambdas().collect();
        let modes = lambdas
            .par_iter()
            .enumerate()
            .map(|(k, &lambda)| f(k, lambda))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { modes })
    }

    pub fn derivative(&self, order: u32) -> Self {
        Self {
            modes: self.modes.iter().map(|e| e.derivative(order)).collect(),
        }
    }

    pub fn values_at(&self, t: f64) -> ModalVector {
        ModalVector::new(self.modes.iter().map(|e| e.eval_re(t)).collect())
    }

    /// `||A^s x(t)||` in ascending-mode order.
    pub fn norm_at(&self, measure: &SpectralMeasure, t: f64, s: f64) -> f64 {
        measure
            .weighted_sum(|k, lambda| {
                let v = self.modes[k].eval_re(t);
                crate::spectral::lambda_pow(lambda, 2.0 * s) * v * v
            })
            .sqrt()
    }
}

/// Per-mode data `(v0_hat, u1_hat)` with `v0 = u0 + u1`.
pub fn diffusion_data(measure: &SpectralMeasure, u0: &ModalVector, u1: &ModalVector) -> Result<Vec<(f64, f64)>> {
    u0.conform(measure)?;
    u1.conform(measure)?;
    Ok(u0.coeffs.iter().zip(&u1.coeffs).map(|(a, b)| (a + b, *b)).collect())
}

/// `u - sum_{l <= m} ubar_l` as a modal curve.
pub fn expansion_error_curve(
    measure: &SpectralMeasure,
    u0: &ModalVector,
    u1: &ModalVector,
    m: usize,
) -> Result<ModalCurve> {
    let data = diffusion_data(measure, u0, u1)?;
    ModalCurve::build(measure, |k, lambda| {
        let (v0, w1) = data[k];
        let mut err = modal::solve_damped_mode(lambda, u0.coeffs[k], w1)?.u;
        for ell in 0..=m {
            err = &err - &profile_u_bar(ell, lambda, v0, w1)?;
        }
        Ok(err)
    })
}

/// `|| u(t) - sum_{l <= m} ubar_l(t) ||`.
pub fn expansion_error(
    measure: &SpectralMeasure,
    u0: &ModalVector,
    u1: &ModalVector,
    m: usize,
    t: f64,
) -> Result<f64> {
    if !(t >= 0.0) {
        return Err(Error::Argument(format!("time {t} must be nonnegative")));
    }
    Ok(expansion_error_curve(measure, u0, u1, m)?.norm_at(measure, t, 0.0))
}

/// Profile `ubar_l` over all modes.
pub fn u_bar_curve(measure: &SpectralMeasure, u0: &ModalVector, u1: &ModalVector, ell: usize) -> Result<ModalCurve> {
    let data = diffusion_data(measure, u0, u1)?;
    ModalCurve::build(measure, |k, lambda| profile_u_bar(ell, lambda, data[k].0, data[k].1))
}

/// Profile `V_m` over all modes.
pub fn v_curve(measure: &SpectralMeasure, u0: &ModalVector, u1: &ModalVector, m: usize) -> Result<ModalCurve> {
    let data = diffusion_data(measure, u0, u1)?;
    ModalCurve::build(measure, |k, lambda| profile_v(m, lambda, data[k].0, data[k].1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::Mode;

    const TOL: f64 = 1e-12;

    #[test]
    fn binomials_are_exact_and_checked() {
        assert_eq!(binomial(5, 2).unwrap(), 10);
        assert_eq!(binomial(11, 5).unwrap(), 462);
        assert_eq!(binomial(3, 4).unwrap(), 0);
        assert_eq!(binomial(0, 0).unwrap(), 1);
        assert_eq!(binomial(59, 29).unwrap(), 59_132_290_782_430_712);
        assert!(matches!(binomial(200, 100), Err(Error::Overflow(_))));
    }

    #[test]
    fn v_examples() {
        let (lambda, v0, u1) = (0.8, 1.3, -0.4);
        let v = profile_v(0, lambda, v0, u1).unwrap();
        assert_eq!(v, ExpPoly::real_term(v0, 0, -lambda));
        // t lambda e^{-lambda t} v0 - e^{-lambda t} u1
        let v1 = profile_v(1, lambda, v0, u1).unwrap();
        let expected = &ExpPoly::real_term(lambda * v0, 1, -lambda) - &ExpPoly::real_term(u1, 0, -lambda);
        assert!((&v1 - &expected).is_negligible(TOL));
        for m in 1..6 {
            let at0 = profile_v(m, lambda, v0, u1).unwrap().eval_re(0.0);
            assert!((at0 - sign(m) * u1).abs() < TOL, "m = {m}");
        }
    }

    #[test]
    fn v_ml_examples() {
        let (lambda, v0, u1) = (0.6, 0.9, 0.35);
        let v11 = profile_v_ml(1, 1, lambda, v0, u1).unwrap();
        let expected = -(&(&ExpPoly::real_term(v0, 0, -lambda) - &ExpPoly::real_term(lambda * v0, 1, -lambda))
            + &ExpPoly::real_term(u1, 0, -lambda));
        assert!((&v11 - &expected).is_negligible(TOL));
        assert!(profile_v_ml(4, 3, lambda, 0.0, 0.0).unwrap().is_zero());
        let dv1 = profile_v(1, lambda, v0, u1).unwrap().derivative(1);
        assert!((&dv1 - &v11.scale_real(-lambda)).is_negligible(TOL));
        assert!(matches!(profile_v_ml(0, 1, lambda, v0, u1), Err(Error::Argument(_))));
        assert!(matches!(profile_v_ml(1, 0, lambda, v0, u1), Err(Error::Argument(_))));
    }

    #[test]
    fn u_bar_examples() {
        let (lambda, v0, u1) = (0.45, 1.1, -0.7);
        assert_eq!(profile_u_bar(0, lambda, v0, u1).unwrap(), ExpPoly::real_term(v0, 0, -lambda));
        // lambda [(1 - t lambda) v0 + u1] e^{-lambda t}
        let u = profile_u_bar(1, lambda, v0, u1).unwrap();
        let expected = ExpPoly::real_term(lambda * (v0 + u1), 0, -lambda)
            - ExpPoly::real_term(lambda * lambda * v0, 1, -lambda);
        assert!((&u - &expected).is_negligible(TOL));
        for ell in 1..5 {
            assert!(profile_u_bar(ell, 0.0, v0, u1).unwrap().is_zero());
        }
    }

    #[test]
    fn coefficient_arrays() {
        let c = u_bar_coefficients(2).unwrap();
        let r = |n: i64, d: i64| BigRational::new(n.into(), d.into());
        // C(3,1), -C(3,2), C(3,3)/2 and C(3,2), -C(3,3)
        assert_eq!(c.v0, vec![r(3, 1), r(-3, 1), r(1, 2)]);
        assert_eq!(c.u1, vec![r(3, 1), r(-1, 1)]);
    }

    #[test]
    fn recursion_examples() {
        assert!(recursion_residual(0, 1.0, 1.0, 0.0).unwrap().is_negligible(TOL));
        assert!(recursion_residual(2, 0.3, 0.0, 0.0).unwrap().is_zero());
        assert!(recursion_residual(3, 0.5, 2.0, -1.0).unwrap().is_negligible(1e-12));
    }

    #[test]
    fn expansion_error_examples() {
        let zero = SpectralMeasure::new("z", vec![Mode { lambda: 0.0, weight: 1.0 }]).unwrap();
        let u0 = ModalVector::new(vec![0.37]);
        let u1 = ModalVector::new(vec![1.0]);
        for m in 0..4 {
            for &t in &[0.0, 1.0, 5.0] {
                let e = expansion_error(&zero, &u0, &u1, m, t).unwrap();
                assert!((e - (-t).exp()).abs() < 1e-15, "m={m} t={t}");
            }
        }
        let m = crate::spectral::path_graph_measure(5).unwrap();
        let u0 = ModalVector::new(vec![0.2, -0.1, 0.5, 1.0, 0.3]);
        let u1 = ModalVector::new(vec![0.4, 0.1, -0.2, 0.0, 0.7]);
        let e = expansion_error(&m, &u0, &u1, 0, 0.0).unwrap();
        let n1 = crate::spectral::sobolev_norm(&m, &u1, 0.0).unwrap();
        assert!((e - n1).abs() < 1e-14);
        let z = ModalVector::zeros(5);
        assert_eq!(expansion_error(&m, &z, &z, 2, 3.0).unwrap(), 0.0);
        assert!(expansion_error(&m, &z, &ModalVector::zeros(2), 0, 1.0).is_err());
    }
}
