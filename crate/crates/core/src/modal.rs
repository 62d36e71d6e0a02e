//! Per-mode closed-form solutions of `u'' + u' + lambda u = f`.
//!
//! With `A` diagonalized, the damped equation decouples into scalar ODEs with
//! characteristic polynomial `s^2 + s + lambda`. Solutions with exp-polynomial
//! forcing are again exp-polynomials and are obtained exactly by undetermined
//! coefficients.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::exp_poly::{same_rate, ExpPoly, Term};
use crate::profiles;

/// `lambda` values this close to `1/4` give a double characteristic root.
pub const DEGENERATE_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CharRoots {
    pub mu_plus: Complex64,
    pub mu_minus: Complex64,
    pub degenerate: bool,
}

/// Roots of `s^2 + s + lambda`, ordered so that `Re mu_plus >= Re mu_minus`
/// (and `Im mu_plus >= 0` in the oscillatory regime).
pub fn char_roots(lambda: f64) -> Result<CharRoots> {
    check_lambda(lambda)?;
    let disc = 0.25 - lambda;
    if disc.abs() <= DEGENERATE_TOL {
        let r = Complex64::new(-0.5, 0.0);
        return Ok(CharRoots {
            mu_plus: r,
            mu_minus: r,
            degenerate: true,
        });
    }
    let (mu_plus, mu_minus) = if disc > 0.0 {
        let s = disc.sqrt();
        // -1/2 + s loses digits for small lambda; use mu_plus = lambda / mu_minus
        let minus = -0.5 - s;
        (Complex64::new(lambda / minus, 0.0), Complex64::new(minus, 0.0))
    } else {
        let w = (-disc).sqrt();
        (Complex64::new(-0.5, w), Complex64::new(-0.5, -w))
    };
    Ok(CharRoots {
        mu_plus,
        mu_minus,
        degenerate: false,
    })
}

fn check_lambda(lambda: f64) -> Result<()> {
    if !lambda.is_finite() || lambda < 0.0 {
        return Err(Error::Domain(format!(
            "eigenvalue {lambda} must be finite and nonnegative"
        )));
    }
    Ok(())
}

/// Exact solution of one mode, with the data it was built from.
#[derive(Clone, Debug)]
pub struct ModalSolution {
    pub lambda: f64,
    pub u: ExpPoly,
    pub initial: (f64, f64),
    pub forcing: ExpPoly,
}

impl ModalSolution {
    /// `u'' + u' + lambda u - f` as an exp-polynomial.
    pub fn residual(&self) -> ExpPoly {
        let lhs = &(&self.u.derivative(2) + &self.u.derivative(1)) + &self.u.scale_real(self.lambda);
        &lhs - &self.forcing
    }

    /// Magnitude against which residual coefficients are judged.
    pub fn scale(&self) -> f64 {
        [
            self.initial.0.abs(),
            self.initial.1.abs(),
            self.forcing.max_abs_coef(),
            self.u.max_abs_coef(),
        ]
        .into_iter()
        .fold(f64::MIN_POSITIVE, f64::max)
    }

    pub fn residual_is_zero(&self, rel_tol: f64) -> bool {
        self.residual().is_negligible(rel_tol * self.scale())
    }
}

/// Homogeneous solution with `u(0) = a`, `u'(0) = b`.
fn homogeneous(lambda: f64, a: f64, b: f64) -> Result<ExpPoly> {
    let roots = char_roots(lambda)?;
    if roots.degenerate {
        // (a + (b + a/2) t) e^{-t/2}
        return Ok(&ExpPoly::real_term(a, 0, -0.5) + &ExpPoly::real_term(b + 0.5 * a, 1, -0.5));
    }
    let (p, m) = (roots.mu_plus, roots.mu_minus);
    let a_c = Complex64::new(a, 0.0);
    let b_c = Complex64::new(b, 0.0);
    let c_plus = (b_c - m * a_c) / (p - m);
    let c_minus = (p * a_c - b_c) / (p - m);
    Ok(&ExpPoly::term(c_plus, 0, p) + &ExpPoly::term(c_minus, 0, m))
}

pub fn solve_damped_mode(lambda: f64, a: f64, b: f64) -> Result<ModalSolution> {
    Ok(ModalSolution {
        lambda,
        u: homogeneous(lambda, a, b)?,
        initial: (a, b),
        forcing: ExpPoly::zero(),
    })
}

/// Particular solution for one forcing rate: `L[h(t) e^{mu t}] = P(t) e^{mu t}`
/// where `P` has coefficients `poly` and `L = D^2 + D + lambda`.
fn particular_for_rate(lambda: f64, roots: &CharRoots, mu: Complex64, poly: &[Complex64]) -> Vec<Term> {
    let d = poly.len() - 1;
    let beta = mu * 2.0 + 1.0;
    let chi = mu * mu + mu + lambda;
    let multiplicity = if roots.degenerate && same_rate(mu, roots.mu_plus) {
        2
    } else if same_rate(mu, roots.mu_plus) || same_rate(mu, roots.mu_minus) {
        1
    } else {
        0
    };
    let mut h = Vec::new();
    match multiplicity {
        0 => {
            // h'' + beta h' + chi h = P, solved from the top degree down
            let mut q = vec![Complex64::new(0.0, 0.0); d + 3];
            for n in (0..=d).rev() {
                let nf = n as f64;
                q[n] = (poly[n] - beta * (nf + 1.0) * q[n + 1] - q[n + 2] * ((nf + 2.0) * (nf + 1.0))) / chi;
            }
            for (n, &c) in q.iter().enumerate().take(d + 1) {
                h.push(Term { coef: c, power: n as u32, rate: mu });
            }
        }
        1 => {
            // chi = 0: y = h' solves y' + beta y = P; h = int y
            let mut y = vec![Complex64::new(0.0, 0.0); d + 2];
            for n in (0..=d).rev() {
                y[n] = (poly[n] - y[n + 1] * (n as f64 + 1.0)) / beta;
            }
            for (n, &c) in y.iter().enumerate().take(d + 1) {
                h.push(Term {
                    coef: c / (n as f64 + 1.0),
                    power: n as u32 + 1,
                    rate: mu,
                });
            }
        }
        _ => {
            // chi = beta = 0: h'' = P
            for (n, &c) in poly.iter().enumerate() {
                let nf = n as f64;
                h.push(Term {
                    coef: c / ((nf + 1.0) * (nf + 2.0)),
                    power: n as u32 + 2,
                    rate: mu,
                });
            }
        }
    }
    h
}

/// Solves `u'' + u' + lambda u = forcing`, `u(0) = a`, `u'(0) = b`.
pub fn solve_forced_mode(lambda: f64, forcing: &ExpPoly, a: f64, b: f64) -> Result<ModalSolution> {
    let roots = char_roots(lambda)?;
    // group forcing terms by rate into polynomial coefficient vectors
    let mut groups: Vec<(Complex64, Vec<Complex64>)> = Vec::new();
    for t in forcing.terms() {
        let idx = match groups.iter().position(|g| same_rate(g.0, t.rate)) {
            Some(i) => i,
            None => {
                groups.push((t.rate, Vec::new()));
                groups.len() - 1
            }
        };
        let poly = &mut groups[idx].1;
        let p = t.power as usize;
        if poly.len() <= p {
            poly.resize(p + 1, Complex64::new(0.0, 0.0));
        }
        poly[p] += t.coef;
    }
    let mut terms = Vec::new();
    for (mu, poly) in &groups {
        terms.extend(particular_for_rate(lambda, &roots, *mu, poly));
    }
    let particular = ExpPoly::from_terms(terms);
    let p0 = particular.eval(0.0).re;
    let p1 = particular.derivative(1).eval(0.0).re;
    let u = &particular + &homogeneous(lambda, a - p0, b - p1)?;
    Ok(ModalSolution {
        lambda,
        u,
        initial: (a, b),
        forcing: forcing.clone(),
    })
}

/// The auxiliary chain `[U_1, ..., U_{m+1}]` for one mode.
///
/// `U_1'' + U_1' + lambda U_1 = lambda e^{-lambda t} v0` with `(U_1, U_1')(0) = (0, -u1)`,
/// and `U_{k+1}'' + U_{k+1}' + lambda U_{k+1} = -V_k'` with
/// `(U_{k+1}, U_{k+1}')(0) = (0, (-1)^(k+1) u1)`.
pub fn build_u_chain(lambda: f64, v0: f64, u1: f64, m: usize) -> Result<Vec<ModalSolution>> {
    check_lambda(lambda)?;
    let mut chain = Vec::with_capacity(m + 1);
    let forcing = ExpPoly::real_term(lambda * v0, 0, -lambda);
    chain.push(solve_forced_mode(lambda, &forcing, 0.0, -u1)?);
    for k in 1..=m {
        let forcing = -profiles::profile_v(k, lambda, v0, u1)?.derivative(1);
        let sign = if (k + 1) % 2 == 0 { 1.0 } else { -1.0 };
        chain.push(solve_forced_mode(lambda, &forcing, 0.0, sign * u1)?);
    }
    Ok(chain)
}
