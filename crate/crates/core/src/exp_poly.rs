//! Exact closed-form time functions `sum c t^p exp(mu t)`.
//!
//! Every modal quantity in this crate (solutions of the damped equation, the
//! heat flow, profiles, auxiliary chain members) is an exp-polynomial, and the
//! class is closed under sums, products, derivatives and integrals. Terms are
//! kept in a canonical form: equal `(power, rate)` pairs are merged (rates are
//! compared with a tolerance of [`RATE_TOL`]), exact zeros are dropped, and
//! terms are ordered by `(Re mu, Im mu, power)`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;

/// Two rates closer than `RATE_TOL * max(|a|, |b|)` are the same rate.
pub const RATE_TOL: f64 = 1e-12;

pub fn same_rate(a: Complex64, b: Complex64) -> bool {
    let scale = a.norm().max(b.norm());
    (a.re - b.re).abs() <= RATE_TOL * scale && (a.im - b.im).abs() <= RATE_TOL * scale
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Term {
    pub coef: Complex64,
    pub power: u32,
    pub rate: Complex64,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct ExpPoly {
    terms: Vec<Term>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CombineOp {
    Add,
    Multiply,
}

impl ExpPoly {
    pub fn zero() -> Self {
        Self { terms: Vec::new() }
    }

    pub fn constant(c: f64) -> Self {
        Self::term(Complex64::new(c, 0.0), 0, Complex64::new(0.0, 0.0))
    }

    pub fn term(coef: Complex64, power: u32, rate: Complex64) -> Self {
        Self::from_terms(vec![Term { coef, power, rate }])
    }

    /// `c t^p exp(mu t)` with real `c` and `mu`.
    pub fn real_term(coef: f64, power: u32, rate: f64) -> Self {
        Self::term(Complex64::new(coef, 0.0), power, Complex64::new(rate, 0.0))
    }

    pub fn from_terms(terms: Vec<Term>) -> Self {
        let mut groups: Vec<Term> = Vec::with_capacity(terms.len());
        for t in terms {
            if t.coef == Complex64::new(0.0, 0.0) {
                continue;
            }
            match groups
                .iter_mut()
                .find(|g| g.power == t.power && same_rate(g.rate, t.rate))
            {
                Some(g) => g.coef += t.coef,
                None => groups.push(t),
            }
        }
        groups.retain(|g| g.coef != Complex64::new(0.0, 0.0));
        groups.sort_by(|a, b| {
            a.rate
                .re
                .total_cmp(&b.rate.re)
                .then(a.rate.im.total_cmp(&b.rate.im))
                .then(a.power.cmp(&b.power))
        });
        Self { terms: groups }
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn max_abs_coef(&self) -> f64 {
        self.terms.iter().map(|t| t.coef.norm()).fold(0.0, f64::max)
    }

    /// True when every coefficient is at most `tol` in magnitude.
    pub fn is_negligible(&self, tol: f64) -> bool {
        self.max_abs_coef() <= tol
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self::from_terms(
            self.terms
                .iter()
                .map(|t| Term { coef: t.coef * s, ..*t })
                .collect(),
        )
    }

    pub fn scale_real(&self, s: f64) -> Self {
        self.scale(Complex64::new(s, 0.0))
    }

    /// Multiplies every term by `exp(shift t)`.
    pub fn shift_rate(&self, shift: Complex64) -> Self {
        Self::from_terms(
            self.terms
                .iter()
                .map(|t| Term { rate: t.rate + shift, ..*t })
                .collect(),
        )
    }

    pub fn conj(&self) -> Self {
        Self::from_terms(
            self.terms
                .iter()
                .map(|t| Term {
                    coef: t.coef.conj(),
                    power: t.power,
                    rate: t.rate.conj(),
                })
                .collect(),
        )
    }

    /// Largest coefficient of `self - conj(self)`, relative to the largest coefficient.
    /// Zero (up to rounding) exactly when the function is real-valued.
    pub fn imaginary_defect(&self) -> f64 {
        let scale = self.max_abs_coef();
        if scale == 0.0 {
            return 0.0;
        }
        (self - &self.conj()).max_abs_coef() / scale
    }

    pub fn derivative(&self, order: u32) -> Self {
        let mut cur = self.clone();
        for _ in 0..order {
            let mut out = Vec::with_capacity(2 * cur.terms.len());
            for t in &cur.terms {
                if t.power > 0 {
                    out.push(Term {
                        coef: t.coef * t.power as f64,
                        power: t.power - 1,
                        rate: t.rate,
                    });
                }
                out.push(Term {
                    coef: t.coef * t.rate,
                    power: t.power,
                    rate: t.rate,
                });
            }
            cur = Self::from_terms(out);
        }
        cur
    }

    /// An antiderivative `F` with `F' = self`, built termwise from
    /// `int t^p e^{mu t} = t^p e^{mu t}/mu - (p/mu) int t^(p-1) e^{mu t}` (or
    /// `t^(p+1)/(p+1)` when `mu = 0`).
    pub fn antiderivative(&self) -> Self {
        let mut out = Vec::new();
        for t in &self.terms {
            if same_rate(t.rate, Complex64::new(0.0, 0.0)) {
                out.push(Term {
                    coef: t.coef / (t.power as f64 + 1.0),
                    power: t.power + 1,
                    rate: Complex64::new(0.0, 0.0),
                });
                continue;
            }
            // e^{mu t} sum_k (-1)^k p!/(p-k)! t^(p-k) / mu^(k+1)
            let mut c = t.coef / t.rate;
            for k in 0..=t.power {
                out.push(Term {
                    coef: c,
                    power: t.power - k,
                    rate: t.rate,
                });
                c = -c * (t.power - k) as f64 / t.rate;
            }
        }
        Self::from_terms(out)
    }

    /// `int_0^t self(s) ds`.
    pub fn definite_integral(&self, t: f64) -> Complex64 {
        self.terms
            .iter()
            .map(|term| integrate_term(term, t))
            .sum()
    }

    pub fn eval(&self, t: f64) -> Complex64 {
        self.terms.iter().map(|term| eval_term(term, t)).sum()
    }

    pub fn eval_re(&self, t: f64) -> f64 {
        self.eval(t).re
    }

    /// `a op b`, then scaled by `scale`.
    pub fn combine(a: &ExpPoly, b: &ExpPoly, op: CombineOp, scale: Complex64) -> ExpPoly {
        let raw = match op {
            CombineOp::Add => a + b,
            CombineOp::Multiply => a * b,
        };
        raw.scale(scale)
    }
}

fn eval_term(term: &Term, t: f64) -> Complex64 {
    let phase = Complex64::from_polar(1.0, term.rate.im * t);
    // combine the polynomial and exponential magnitudes in log space
    let magnitude = if term.power == 0 {
        (term.rate.re * t).exp()
    } else if t == 0.0 {
        0.0
    } else {
        let log_mag = term.power as f64 * t.abs().ln() + term.rate.re * t;
        let sign = if t < 0.0 && term.power % 2 == 1 { -1.0 } else { 1.0 };
        sign * log_mag.exp()
    };
    term.coef * phase * magnitude
}

fn integrate_term(term: &Term, t: f64) -> Complex64 {
    let z = term.rate * t;
    if z.norm() <= 1.0 {
        // int_0^t s^p e^{mu s} ds = t^(p+1) sum_k (mu t)^k / (k! (p+k+1))
        let p = term.power as f64;
        let mut sum = Complex64::new(0.0, 0.0);
        let mut zk = Complex64::new(1.0, 0.0);
        for k in 0..60 {
            let add = zk / (p + k as f64 + 1.0);
            sum += add;
            if add.norm() <= 1e-18 * sum.norm() {
                break;
            }
            zk = zk * z / (k as f64 + 1.0);
        }
        return term.coef * sum * t.powi(term.power as i32 + 1);
    }
    let anti = ExpPoly::from_terms(vec![*term]).antiderivative();
    anti.eval(t) - anti.eval(0.0)
}

impl Add for &ExpPoly {
    type Output = ExpPoly;
    fn add(self, rhs: &ExpPoly) -> ExpPoly {
        ExpPoly::from_terms(self.terms.iter().chain(&rhs.terms).copied().collect())
    }
}

impl Sub for &ExpPoly {
    type Output = ExpPoly;
    fn sub(self, rhs: &ExpPoly) -> ExpPoly {
        self + &(-rhs)
    }
}

impl Neg for &ExpPoly {
    type Output = ExpPoly;
    fn neg(self) -> ExpPoly {
        self.scale_real(-1.0)
    }
}

impl Mul for &ExpPoly {
    type Output = ExpPoly;
    fn mul(self, rhs: &ExpPoly) -> ExpPoly {
        let mut out = Vec::with_capacity(self.terms.len() * rhs.terms.len());
        for a in &self.terms {
            for b in &rhs.terms {
                out.push(Term {
                    coef: a.coef * b.coef,
                    power: a.power + b.power,
                    rate: a.rate + b.rate,
                });
            }
        }
        ExpPoly::from_terms(out)
    }
}

impl Add for ExpPoly {
    type Output = ExpPoly;
    fn add(self, rhs: ExpPoly) -> ExpPoly {
        &self + &rhs
    }
}

impl Sub for ExpPoly {
    type Output = ExpPoly;
    fn sub(self, rhs: ExpPoly) -> ExpPoly {
        &self - &rhs
    }
}

impl Mul for ExpPoly {
    type Output = ExpPoly;
    fn mul(self, rhs: ExpPoly) -> ExpPoly {
        &self * &rhs
    }
}

impl Neg for ExpPoly {
    type Output = ExpPoly;
    fn neg(self) -> ExpPoly {
        -&self
    }
}

impl fmt::Display for ExpPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, t) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({}) * t^{} * exp(({}) t)", t.coef, t.power, t.rate)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn combine_examples() {
        let e = ExpPoly::real_term(1.0, 0, -1.0);
        assert!(ExpPoly::combine(&e, &e.scale_real(-1.0), CombineOp::Add, c(1.0, 0.0)).is_zero());
        let te = ExpPoly::real_term(1.0, 1, -1.0);
        let sq = ExpPoly::combine(&te, &te, CombineOp::Multiply, c(1.0, 0.0));
        assert_eq!(sq, ExpPoly::real_term(1.0, 2, -2.0));
        let sum = &ExpPoly::constant(1.0) + &ExpPoly::real_term(1.0, 1, 0.0);
        assert_eq!(sum.terms().len(), 2);
        assert_eq!((sum.terms()[0].power, sum.terms()[1].power), (0, 1));
        let scaled = ExpPoly::combine(&e, &e, CombineOp::Add, c(0.0, 1.0));
        assert_eq!(scaled, ExpPoly::term(c(0.0, 2.0), 0, c(-1.0, 0.0)));
    }

    #[test]
    fn nearly_equal_rates_merge() {
        let a = ExpPoly::real_term(1.0, 0, -0.5);
        let b = ExpPoly::real_term(2.0, 0, -0.5 + 1e-14);
        assert_eq!((&a + &b).terms().len(), 1);
        let far = ExpPoly::real_term(2.0, 0, -0.5 + 1e-9);
        assert_eq!((&a + &far).terms().len(), 2);
    }

    #[test]
    fn derivative_examples() {
        let lam = 0.7;
        let d = ExpPoly::real_term(1.0, 0, -lam).derivative(1);
        assert_eq!(d, ExpPoly::real_term(-lam, 0, -lam));
        let d = ExpPoly::real_term(1.0, 1, -1.0).derivative(1);
        let expected = &ExpPoly::real_term(1.0, 0, -1.0) - &ExpPoly::real_term(1.0, 1, -1.0);
        assert_eq!(d, expected);
        assert!(ExpPoly::real_term(1.0, 1, 0.0).derivative(2).is_zero());
        assert_eq!(ExpPoly::real_term(3.0, 2, -1.0).derivative(0), ExpPoly::real_term(3.0, 2, -1.0));
    }

    #[test]
    fn integral_examples() {
        let e2 = ExpPoly::real_term(1.0, 0, -2.0);
        let t = 3.0f64;
        assert!((e2.definite_integral(t).re - (1.0 - (-2.0 * t).exp()) / 2.0).abs() < 1e-15);
        assert!((e2.definite_integral(60.0).re - 0.5).abs() < 1e-15);
        assert!((ExpPoly::real_term(1.0, 1, 0.0).definite_integral(1.0).re - 0.5).abs() < 1e-15);
        // by parts: [1 - e^{-2t}(2t + 1)]/4 at t = 1
        let se = ExpPoly::real_term(1.0, 1, -2.0);
        let expected = (1.0 - 3.0 * (-2.0f64).exp()) / 4.0;
        assert!((expected - 0.148_499).abs() < 1e-6);
        assert!((se.definite_integral(1.0).re - expected).abs() < 1e-15);
        assert!((se.definite_integral(0.1).re - (1.0 - (-0.2f64).exp() * 1.2) / 4.0).abs() < 1e-16);
    }

    #[test]
    fn eval_examples() {
        let one_minus = &ExpPoly::constant(1.0) - &ExpPoly::real_term(1.0, 0, -1.0);
        assert_eq!(one_minus.eval(0.0), c(0.0, 0.0));
        let te = ExpPoly::real_term(1.0, 1, -1.0);
        assert!((te.eval(1.0).re - (-1.0f64).exp()).abs() < 1e-16);
        let osc = ExpPoly::term(c(1.0, 0.0), 0, c(-0.5, 0.5));
        let real = &osc + &osc.conj();
        let v = real.eval(std::f64::consts::PI);
        assert!(v.norm() < 1e-16);
        assert!(real.imaginary_defect() == 0.0);
        // no overflow when t^p is huge and e^{mu t} tiny
        let big = ExpPoly::real_term(1.0, 40, -1.0);
        assert!(big.eval(1e4).re.is_finite());
        assert_eq!(big.eval(1e4).re, 0.0);
    }

    #[test]
    fn display_renders_terms() {
        assert_eq!(ExpPoly::zero().to_string(), "0");
        let s = ExpPoly::real_term(2.0, 1, -1.0).to_string();
        assert!(s.contains("* t^1 * exp("), "{s}");
    }
}
