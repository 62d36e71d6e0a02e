//! Per-mode defects of the profile identities, as relative coefficient sizes.
//!
//! Each function returns `max |coef(lhs - rhs)| / max |coef(pieces)|`, or 0
//! when the difference vanishes identically.

use crate::error::Result;
use crate::exp_poly::ExpPoly;
use crate::modal::{build_u_chain, solve_damped_mode};
use crate::profiles::{profile_v, profile_v_ml, recursion_residual};

fn relative(diff: &ExpPoly, pieces: &[&ExpPoly]) -> f64 {
    if diff.is_zero() {
        return 0.0;
    }
    let scale = pieces
        .iter()
        .map(|p| p.max_abs_coef())
        .fold(f64::MIN_POSITIVE, f64::max);
    diff.max_abs_coef() / scale
}

/// `V_{m+1}' + lambda V_{m+1} + V_m'`.
pub fn recursion_defect(m: usize, lambda: f64, v0: f64, u1: f64) -> Result<f64> {
    let next = profile_v(m + 1, lambda, v0, u1)?;
    let cur = profile_v(m, lambda, v0, u1)?;
    let residual = recursion_residual(m, lambda, v0, u1)?;
    Ok(relative(&residual, &[&next.derivative(1), &next.scale_real(lambda), &cur.derivative(1)]))
}

/// `V_m(0) - (-1)^m u1` for `m >= 1`; expected to vanish exactly.
pub fn initial_value_gap(m: usize, lambda: f64, v0: f64, u1: f64) -> Result<f64> {
    let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
    Ok(profile_v(m, lambda, v0, u1)?.eval_re(0.0) - sign * u1)
}

/// `d^l/dt^l V_m - (-lambda)^l V_{m,l}`, with `V_{m,0} = V_m` and `V_{0,l} = V_0`.
pub fn derivative_formula_defect(m: usize, ell: usize, lambda: f64, v0: f64, u1: f64) -> Result<f64> {
    let v = profile_v(m, lambda, v0, u1)?;
    let lhs = v.derivative(ell as u32);
    let vml = if m == 0 || ell == 0 {
        v.clone()
    } else {
        profile_v_ml(m, ell, lambda, v0, u1)?
    };
    let rhs = vml.scale_real((-lambda).powi(ell as i32));
    Ok(relative(&(&lhs - &rhs), &[&lhs, &rhs]))
}

/// `u - e^{-lambda t} v0 - U_1'` for data `(u0, u1)`.
pub fn first_order_defect(lambda: f64, u0: f64, u1: f64) -> Result<f64> {
    let u = solve_damped_mode(lambda, u0, u1)?.u;
    let heat = ExpPoly::real_term(u0 + u1, 0, -lambda);
    let du1 = build_u_chain(lambda, u0 + u1, u1, 0)?[0].u.derivative(1);
    Ok(relative(&(&(&u - &heat) - &du1), &[&u, &heat, &du1]))
}

/// Largest defect among `U_k - V_k - U_{k+1}'` for `1 <= k <= m` and the full
/// decomposition `u - sum_{l <= m} d^l V_l - d^{m+1} U_{m+1}`.
pub fn chain_defect(m: usize, lambda: f64, u0: f64, u1: f64) -> Result<f64> {
    let v0 = u0 + u1;
    let chain = build_u_chain(lambda, v0, u1, m)?;
    let mut worst: f64 = 0.0;
    for k in 1..=m {
        let uk = &chain[k - 1].u;
        let vk = profile_v(k, lambda, v0, u1)?;
        let next = chain[k].u.derivative(1);
        worst = worst.max(relative(&(&(uk - &vk) - &next), &[uk, &vk, &next]));
    }
    let u = solve_damped_mode(lambda, u0, u1)?.u;
    let mut rest = u.clone();
    let mut pieces = vec![u];
    for ell in 0..=m {
        let d = profile_v(ell, lambda, v0, u1)?.derivative(ell as u32);
        rest = &rest - &d;
        pieces.push(d);
    }
    let tail = chain[m].u.derivative(m as u32 + 1);
    rest = &rest - &tail;
    pieces.push(tail);
    let refs: Vec<&ExpPoly> = pieces.iter().collect();
    Ok(worst.max(relative(&rest, &refs)))
}

/// `d^{m+1}/dt^{m+1} U_{m+1}` for one mode, solved through the chain.
pub fn chain_remainder(m: usize, lambda: f64, u0: f64, u1: f64) -> Result<ExpPoly> {
    let chain = build_u_chain(lambda, u0 + u1, u1, m)?;
    Ok(chain[m].u.derivative(m as u32 + 1))
}

/// The same remainder as [`chain_remainder`], written as `u - sum_{l <= m} d^l V_l`.
/// Unlike the chain it stays accurate as `lambda -> 0`.
pub fn decomposition_remainder(m: usize, lambda: f64, u0: f64, u1: f64) -> Result<ExpPoly> {
    let v0 = u0 + u1;
    let mut rest = solve_damped_mode(lambda, u0, u1)?.u;
    for ell in 0..=m {
        rest = &rest - &profile_v(ell, lambda, v0, u1)?.derivative(ell as u32);
    }
    Ok(rest)
}

/// Largest chain coefficient relative to the data. The chain members grow like
/// `lambda^-(k+1)` for small `lambda`, and coefficient identities lose about
/// `eps` times this factor.
pub fn chain_amplification(m: usize, lambda: f64, u0: f64, u1: f64) -> Result<f64> {
    let data = (u0 + u1).abs().max(u1.abs());
    if data == 0.0 {
        return Ok(1.0);
    }
    let chain = build_u_chain(lambda, u0 + u1, u1, m)?;
    Ok(chain.iter().map(|s| s.u.max_abs_coef()).fold(0.0, f64::max) / data)
}

#[cfg(test)]
mod tests {
    use super::*;

    const GRID: [f64; 6] = [0.0, 0.1, 0.25, 0.5, 1.0, 3.0];

    #[test]
    fn identities_hold_on_grid() {
        for &lambda in &GRID {
            assert!(first_order_defect(lambda, 0.4, -1.3).unwrap() < 1e-10, "{lambda}");
            for m in 0..=4 {
                assert!(chain_defect(m, lambda, 0.4, -1.3).unwrap() < 1e-10, "{lambda} {m}");
            }
            for m in 0..=6 {
                assert!(recursion_defect(m, lambda, 0.7, 0.2).unwrap() < 1e-10);
                assert_eq!(initial_value_gap(m + 1, lambda, 0.7, 0.2).unwrap(), 0.0);
            }
        }
    }

    #[test]
    fn remainders_agree_where_chain_is_well_conditioned() {
        for &lambda in &GRID {
            for m in 0..=3 {
                let a = chain_remainder(m, lambda, 0.4, -1.3).unwrap();
                let b = decomposition_remainder(m, lambda, 0.4, -1.3).unwrap();
                for &t in &[0.0, 1.0, 10.0] {
                    assert!((a.eval_re(t) - b.eval_re(t)).abs() < 1e-9, "{lambda} {m} {t}");
                }
            }
        }
        assert!(chain_amplification(3, 1e-3, 1.0, 0.0).unwrap() > 1e11);
    }

    #[test]
    fn broken_identity_is_detected() {
        let v = profile_v(2, 0.5, 1.0, 1.0).unwrap();
        let w = profile_v(3, 0.5, 1.0, 1.0).unwrap();
        assert!(relative(&(&v - &w), &[&v, &w]) > 1e-3);
    }
}
