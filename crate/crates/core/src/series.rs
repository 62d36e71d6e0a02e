//! Exact-rational power series and the low-frequency expansion oracle.
//!
//! The diffusive characteristic root `mu_plus(lambda) = (-1 + sqrt(1 - 4 lambda)) / 2`
//! and the coefficient `c_plus` of `e^{mu_plus t}` in the modal solution are
//! expanded exactly in powers of `lambda`. Writing
//! `c_plus e^{mu_plus t} = e^{-lambda t} c_plus(lambda) exp(t (mu_plus + lambda))`
//! and collecting monomials `lambda^a t^b` by grade `a - b` yields, grade by
//! grade, the coefficient arrays of the profiles `ubar_l`. This path shares no
//! code with the binomial formulas in [`crate::profiles`].

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::profiles;

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// `c_0 + c_1 r + ... + c_N r^N + O(r^(N+1))` with exact rational coefficients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TruncatedSeries {
    coeffs: Vec<BigRational>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SeriesOp {
    Add,
    Mul,
    Reciprocal,
    Sqrt,
    IntPow(i64),
}

impl TruncatedSeries {
    pub fn new(coeffs: Vec<BigRational>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::Argument("a truncated series needs at least one coefficient".into()));
        }
        Ok(Self { coeffs })
    }

    /// `[c_0, ..., c_k]` padded with zeros up to `order`.
    pub fn from_ints(values: &[i64], order: usize) -> Self {
        let mut coeffs: Vec<BigRational> = values.iter().map(|&v| rat(v, 1)).collect();
        coeffs.resize(order + 1, BigRational::zero());
        coeffs.truncate(order + 1);
        Self { coeffs }
    }

    pub fn constant(c: BigRational, order: usize) -> Self {
        let mut coeffs = vec![BigRational::zero(); order + 1];
        coeffs[0] = c;
        Self { coeffs }
    }

    /// The series of the variable itself, `r`.
    pub fn variable(order: usize) -> Self {
        let mut coeffs = vec![BigRational::zero(); order + 1];
        if order >= 1 {
            coeffs[1] = BigRational::one();
        }
        Self { coeffs }
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> BigRational {
        self.coeffs.get(k).cloned().unwrap_or_else(BigRational::zero)
    }

    fn check_order(&self, other: &Self) -> Result<()> {
        if self.order() != other.order() {
            return Err(Error::Argument(format!(
                "truncation orders differ: {} vs {}",
                self.order(),
                other.order()
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_order(other)?;
        Ok(Self {
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect(),
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(&rat(-1, 1)))
    }

    pub fn scale(&self, s: &BigRational) -> Self {
        Self {
            coeffs: self.coeffs.iter().map(|c| c * s).collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_order(other)?;
        let n = self.order();
        let mut out = vec![BigRational::zero(); n + 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate().take(n + 1 - i) {
                out[i + j] += a * b;
            }
        }
        Ok(Self { coeffs: out })
    }

    pub fn reciprocal(&self) -> Result<Self> {
        let c0 = &self.coeffs[0];
        if c0.is_zero() {
            return Err(Error::SingularSeries("reciprocal of a series with zero constant term".into()));
        }
        let n = self.order();
        let inv0 = c0.recip();
        let mut out = vec![BigRational::zero(); n + 1];
        out[0] = inv0.clone();
        for k in 1..=n {
            let mut acc = BigRational::zero();
            for i in 1..=k {
                acc += &self.coeffs[i] * &out[k - i];
            }
            out[k] = -acc * &inv0;
        }
        Ok(Self { coeffs: out })
    }

    /// Square root with positive constant term; `c_0` must be a rational square.
    pub fn sqrt(&self) -> Result<Self> {
        let c0 = &self.coeffs[0];
        if !c0.is_positive() {
            return Err(Error::SingularSeries(format!(
                "square root needs a positive constant term, got {c0}"
            )));
        }
        let s0 = rational_sqrt(c0).ok_or_else(|| {
            Error::SingularSeries(format!("constant term {c0} is not a rational square"))
        })?;
        let n = self.order();
        let mut out = vec![BigRational::zero(); n + 1];
        let two_s0 = &s0 * rat(2, 1);
        out[0] = s0;
        for k in 1..=n {
            let mut acc = self.coeffs[k].clone();
            for i in 1..k {
                acc -= &out[i] * &out[k - i];
            }
            out[k] = acc / &two_s0;
        }
        Ok(Self { coeffs: out })
    }

    /// `self^k`; negative powers go through the reciprocal.
    pub fn int_pow(&self, k: i64) -> Result<Self> {
        let base = if k < 0 { self.reciprocal()? } else { self.clone() };
        let mut result = Self::constant(BigRational::one(), self.order());
        let mut sq = base;
        let mut e = k.unsigned_abs();
        while e > 0 {
            if e & 1 == 1 {
                result = result.mul(&sq)?;
            }
            e >>= 1;
            if e > 0 {
                sq = sq.mul(&sq)?;
            }
        }
        Ok(result)
    }
}

fn rational_sqrt(r: &BigRational) -> Option<BigRational> {
    let n = r.numer().sqrt();
    let d = r.denom().sqrt();
    (&n * &n == *r.numer() && &d * &d == *r.denom()).then(|| BigRational::new(n, d))
}

/// Applies `op` to `a` (and `b` for binary operations).
pub fn series_arith(a: &TruncatedSeries, b: Option<&TruncatedSeries>, op: SeriesOp) -> Result<TruncatedSeries> {
    let need_b = || b.ok_or_else(|| Error::Argument(format!("{op:?} needs two operands")));
    match op {
        SeriesOp::Add => a.add(need_b()?),
        SeriesOp::Mul => a.mul(need_b()?),
        SeriesOp::Reciprocal => a.reciprocal(),
        SeriesOp::Sqrt => a.sqrt(),
        SeriesOp::IntPow(k) => a.int_pow(k),
    }
}

/// `sqrt(1/4 - r)` to the given order.
fn quarter_root(order: usize) -> Result<TruncatedSeries> {
    let mut base = TruncatedSeries::constant(rat(1, 4), order);
    if order >= 1 {
        base.coeffs[1] = rat(-1, 1);
    }
    base.sqrt()
}

/// `phi_j(r) = (1/2 + sqrt(1/4 - r))^(-2j)`.
pub fn phi_series(j: usize, order: usize) -> Result<TruncatedSeries> {
    let half = TruncatedSeries::constant(rat(1, 2), order);
    half.add(&quarter_root(order)?)?.int_pow(-2 * j as i64)
}

/// `psi(r) = (1/2) (1/4 - r)^(-1/2)`.
pub fn psi_series(order: usize) -> Result<TruncatedSeries> {
    Ok(quarter_root(order)?.reciprocal()?.scale(&rat(1, 2)))
}

/// Exact `alpha_{j,k} = [r^k] phi_j / j!` and `beta_k = [r^k] psi`.
#[derive(Clone, Debug, PartialEq)]
pub struct TakedaTable {
    /// `alpha[j][k]`
    pub alpha: Vec<Vec<BigRational>>,
    pub beta: Vec<BigRational>,
}

pub fn takeda_coefficients(j_max: usize, k_max: usize) -> Result<TakedaTable> {
    let mut alpha = Vec::with_capacity(j_max + 1);
    let mut j_fact = BigInt::one();
    for j in 0..=j_max {
        if j > 0 {
            j_fact *= BigInt::from(j);
        }
        let phi = phi_series(j, k_max)?;
        let inv = BigRational::new(BigInt::one(), j_fact.clone());
        alpha.push(phi.coeffs().iter().map(|c| c * &inv).collect());
    }
    let beta = psi_series(k_max)?.coeffs().to_vec();
    Ok(TakedaTable { alpha, beta })
}

impl TakedaTable {
    /// `j,k,alpha_num,alpha_den` rows, a blank line, then `k,beta_num,beta_den` rows.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("j,k,alpha_num,alpha_den\n");
        for (j, row) in self.alpha.iter().enumerate() {
            for (k, a) in row.iter().enumerate() {
                let _ = writeln!(out, "{j},{k},{},{}", a.numer(), a.denom());
            }
        }
        out.push_str("\nk,beta_num,beta_den\n");
        for (k, b) in self.beta.iter().enumerate() {
            let _ = writeln!(out, "{k},{},{}", b.numer(), b.denom());
        }
        out
    }
}

/// `mu_plus(lambda) + lambda` to order `n`: coefficients `0, 0, -1, -2, -5, -14, ...`.
pub fn mu_plus_shifted_series(n: usize) -> Result<TruncatedSeries> {
    if n < 2 {
        return Err(Error::Argument(format!("order {n} must be at least 2")));
    }
    let mu = mu_plus_series(n)?;
    mu.add(&TruncatedSeries::variable(n))
}

/// `mu_plus(lambda) = (-1 + sqrt(1 - 4 lambda)) / 2`.
fn mu_plus_series(n: usize) -> Result<TruncatedSeries> {
    let root = sqrt_one_minus_four(n)?;
    Ok(root
        .sub(&TruncatedSeries::constant(BigRational::one(), n))?
        .scale(&rat(1, 2)))
}

fn sqrt_one_minus_four(n: usize) -> Result<TruncatedSeries> {
    TruncatedSeries::from_ints(&[1, -4], n).sqrt()
}

/// Catalan numbers `C_0..=C_n` from `C_{k+1} = sum_i C_i C_{k-i}`.
pub fn catalan_numbers(n: usize) -> Vec<BigInt> {
    let mut c = vec![BigInt::one()];
    for k in 0..n {
        let next = (0..=k).map(|i| &c[i] * &c[k - i]).sum();
        c.push(next);
    }
    c
}

/// Coefficients of `c_plus` on the `(v0, u1)` basis:
/// `c_plus = [(1 + mu_plus) v0 - mu_plus u1] / sqrt(1 - 4 lambda)`.
pub fn c_plus_series(n: usize) -> Result<(TruncatedSeries, TruncatedSeries)> {
    let inv_root = sqrt_one_minus_four(n)?.reciprocal()?;
    let mu = mu_plus_series(n)?;
    let one = TruncatedSeries::constant(BigRational::one(), n);
    let on_v0 = one.add(&mu)?.mul(&inv_root)?;
    let on_u1 = mu.scale(&rat(-1, 1)).mul(&inv_root)?;
    Ok((on_v0, on_u1))
}

/// Series in `lambda` and `t` keeping monomials `lambda^a t^b` with `b <= a`
/// and grade `a - b <= max_grade`.
#[derive(Clone, Debug, PartialEq)]
pub struct BigradedSeries {
    entries: BTreeMap<(u32, u32), BigRational>,
    max_grade: u32,
}

impl BigradedSeries {
    pub fn zero(max_grade: u32) -> Self {
        Self {
            entries: BTreeMap::new(),
            max_grade,
        }
    }

    pub fn one(max_grade: u32) -> Self {
        let mut s = Self::zero(max_grade);
        s.entries.insert((0, 0), BigRational::one());
        s
    }

    pub fn max_grade(&self) -> u32 {
        self.max_grade
    }

    fn insert_add(&mut self, a: u32, b: u32, c: BigRational) -> Result<()> {
        if b > a {
            return Err(Error::Argument(format!("monomial lambda^{a} t^{b} has b > a")));
        }
        if a - b > self.max_grade || c.is_zero() {
            return Ok(());
        }
        let slot = self.entries.entry((a, b)).or_insert_with(BigRational::zero);
        *slot += c;
        if slot.is_zero() {
            self.entries.remove(&(a, b));
        }
        Ok(())
    }

    /// Embeds a series in `lambda`, multiplied by `t^t_power`.
    pub fn from_lambda_series(s: &TruncatedSeries, t_power: u32, max_grade: u32) -> Result<Self> {
        let mut out = Self::zero(max_grade);
        for (a, c) in s.coeffs().iter().enumerate() {
            let a = a as u32;
            if a < t_power {
                if !c.is_zero() {
                    return Err(Error::Argument(format!(
                        "lambda^{a} t^{t_power} violates b <= a"
                    )));
                }
                continue;
            }
            out.insert_add(a, t_power, c.clone())?;
        }
        Ok(out)
    }

    pub fn get(&self, a: u32, b: u32) -> BigRational {
        self.entries.get(&(a, b)).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        let mut out = Self::zero(self.max_grade.min(other.max_grade));
        for (&(a, b), c) in self.entries.iter().chain(&other.entries) {
            out.insert_add(a, b, c.clone())?;
        }
        Ok(out)
    }

    pub fn scale(&self, s: &BigRational) -> Self {
        let mut out = Self::zero(self.max_grade);
        for (&(a, b), c) in &self.entries {
            let _ = out.insert_add(a, b, c * s);
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        let mut out = Self::zero(self.max_grade.min(other.max_grade));
        for (&(a1, b1), c1) in &self.entries {
            for (&(a2, b2), c2) in &other.entries {
                out.insert_add(a1 + a2, b1 + b2, c1 * c2)?;
            }
        }
        Ok(out)
    }

    /// `exp(self)` for a series without grade-0 part (the sum terminates after
    /// `max_grade` powers).
    pub fn exp(&self) -> Result<Self> {
        if self.entries.keys().any(|&(a, b)| a == b) {
            return Err(Error::SingularSeries(
                "exponential needs every monomial to have positive grade".into(),
            ));
        }
        let mut out = Self::one(self.max_grade);
        let mut power = Self::one(self.max_grade);
        for k in 1..=self.max_grade {
            power = power.mul(self)?.scale(&rat(1, k as i64));
            out = out.add(&power)?;
        }
        Ok(out)
    }

    /// Entries of grade exactly `g`, keyed by `(a, b)`.
    pub fn grade_slice(&self, g: u32) -> Vec<((u32, u32), BigRational)> {
        self.entries
            .iter()
            .filter(|(&(a, b), _)| a - b == g)
            .map(|(&k, c)| (k, c.clone()))
            .collect()
    }
}

/// Diffusive branch `c_plus(lambda) exp(t (mu_plus + lambda))` on the `v0` and
/// `u1` bases, truncated at `max_grade`, built from series of the given order.
pub fn diffusive_branch(max_grade: u32, order: usize) -> Result<(BigradedSeries, BigradedSeries)> {
    if order < 2 * max_grade as usize {
        return Err(Error::Capacity(format!(
            "series order {order} is too small for grade {max_grade} (needs {})",
            2 * max_grade
        )));
    }
    let (on_v0, on_u1) = c_plus_series(order)?;
    let shift = mu_plus_shifted_series(order.max(2))?;
    let t_shift = BigradedSeries::from_lambda_series(&shift, 1, max_grade)?;
    let growth = t_shift.exp()?;
    let v0 = BigradedSeries::from_lambda_series(&on_v0, 0, max_grade)?.mul(&growth)?;
    let u1 = BigradedSeries::from_lambda_series(&on_u1, 0, max_grade)?.mul(&growth)?;
    Ok((v0, u1))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Basis {
    V0,
    U1,
}

#[derive(Clone, Debug, Serialize)]
pub struct CoefficientCheck {
    pub ell: usize,
    pub basis: Basis,
    /// Power of `t`; the monomial is `lambda^(ell + t_power) t^t_power`.
    pub t_power: usize,
    pub expected: String,
    pub computed: String,
    pub matches: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct CoefficientReport {
    pub max_grade: usize,
    pub entries: Vec<CoefficientCheck>,
}

impl CoefficientReport {
    pub fn all_match(&self) -> bool {
        self.entries.iter().all(|e| e.matches)
    }

    pub fn mismatches(&self) -> usize {
        self.entries.iter().filter(|e| !e.matches).count()
    }
}

/// Compares every grade-`l` slice (`l <= m_max`) of the diffusive branch with
/// the exact coefficient arrays of `ubar_l`.
pub fn verify_theorem_coefficients(m_max: usize) -> Result<CoefficientReport> {
    verify_with_order(m_max, 2 * m_max)
}

/// As [`verify_theorem_coefficients`] with an explicit series order.
pub fn verify_with_order(m_max: usize, order: usize) -> Result<CoefficientReport> {
    if m_max > 8 {
        return Err(Error::Argument(format!("grade {m_max} exceeds the supported maximum 8")));
    }
    let (v0, u1) = diffusive_branch(m_max as u32, order)?;
    let mut entries = Vec::new();
    for ell in 0..=m_max {
        let expected = profiles::u_bar_coefficients(ell)?;
        for (basis, series, arr) in [(Basis::V0, &v0, &expected.v0), (Basis::U1, &u1, &expected.u1)] {
            for j in 0..=ell {
                let want = arr.get(j).cloned().unwrap_or_else(BigRational::zero);
                let got = series.get((ell + j) as u32, j as u32);
                entries.push(CoefficientCheck {
                    ell,
                    basis,
                    t_power: j,
                    matches: want == got,
                    expected: want.to_string(),
                    computed: got.to_string(),
                });
            }
        }
    }
    Ok(CoefficientReport {
        max_grade: m_max,
        entries,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sqrt_of_one_minus_four_r() {
        let s = sqrt_one_minus_four(3).unwrap();
        assert_eq!(s, TruncatedSeries::from_ints(&[1, -2, -2, -4], 3));
        assert_eq!(s.mul(&s).unwrap(), TruncatedSeries::from_ints(&[1, -4], 3));
    }

    #[test]
    fn reciprocal_and_group_law() {
        let one = TruncatedSeries::constant(BigRational::one(), 5);
        assert_eq!(one.reciprocal().unwrap(), one);
        let s = TruncatedSeries::from_ints(&[2, 3, -1, 7], 5);
        assert_eq!(s.mul(&s.reciprocal().unwrap()).unwrap(), one);
        let zero_const = TruncatedSeries::from_ints(&[0, 1], 5);
        assert!(matches!(zero_const.reciprocal(), Err(Error::SingularSeries(_))));
        assert!(matches!(zero_const.sqrt(), Err(Error::SingularSeries(_))));
        let not_square = TruncatedSeries::from_ints(&[2, 1], 5);
        assert!(matches!(not_square.sqrt(), Err(Error::SingularSeries(_))));
        let mismatch = TruncatedSeries::from_ints(&[1], 2);
        assert!(s.add(&mismatch).is_err());
    }

    #[test]
    fn series_arith_dispatch() {
        let s = TruncatedSeries::from_ints(&[1, 1], 4);
        let cube = series_arith(&s, None, SeriesOp::IntPow(3)).unwrap();
        assert_eq!(cube, TruncatedSeries::from_ints(&[1, 3, 3, 1], 4));
        let inv = series_arith(&s, None, SeriesOp::IntPow(-1)).unwrap();
        assert_eq!(inv, TruncatedSeries::from_ints(&[1, -1, 1, -1, 1], 4));
        assert!(series_arith(&s, None, SeriesOp::Add).is_err());
    }

    #[test]
    fn takeda_examples() {
        let table = takeda_coefficients(3, 4).unwrap();
        assert_eq!(table.alpha[0][0], BigRational::one());
        assert!(table.alpha[0][1..].iter().all(|a| a.is_zero()));
        assert_eq!(table.beta[0], rat(1, 1));
        assert_eq!(table.beta[1], rat(2, 1));
        // phi_1 = (1/2 + sqrt(1/4 - r))^-2 = 1 + 2r + ...
        assert_eq!(table.alpha[1][0], rat(1, 1));
        assert_eq!(table.alpha[1][1], rat(2, 1));
    }

    #[test]
    fn takeda_csv_is_stable() {
        let a = takeda_coefficients(1, 1).unwrap().to_csv();
        assert_eq!(a, takeda_coefficients(1, 1).unwrap().to_csv());
        assert_eq!(
            a,
            "j,k,alpha_num,alpha_den\n0,0,1,1\n0,1,0,1\n1,0,1,1\n1,1,2,1\n\nk,beta_num,beta_den\n0,1,1\n1,2,1\n"
        );
    }

    #[test]
    fn shifted_root_series() {
        let s = mu_plus_shifted_series(6).unwrap();
        let want: Vec<_> = [0, 0, -1, -2, -5, -14, -42].iter().map(|&v| rat(v, 1)).collect();
        assert_eq!(s.coeffs(), &want[..]);
        assert!(mu_plus_shifted_series(1).is_err());
        assert_eq!(
            catalan_numbers(6),
            [1, 1, 2, 5, 14, 42, 132].iter().map(|&v| BigInt::from(v)).collect::<Vec<_>>()
        );
    }

    #[test]
    fn c_plus_on_v0_is_central_binomial() {
        let (on_v0, _) = c_plus_series(6).unwrap();
        let want = [1, 1, 3, 10, 35, 126, 462];
        for (l, w) in want.iter().enumerate() {
            assert_eq!(on_v0.coeff(l), rat(*w, 1), "lambda^{l}");
        }
    }

    #[test]
    fn low_grades_match_hand_expansion() {
        let (v0, u1) = diffusive_branch(2, 4).unwrap();
        assert_eq!(v0.get(0, 0), rat(1, 1));
        assert_eq!(v0.get(1, 0), rat(1, 1));
        assert_eq!(v0.get(2, 1), rat(-1, 1));
        assert_eq!(u1.get(1, 0), rat(1, 1));
        assert!(u1.get(0, 0).is_zero());
        assert_eq!(v0.get(3, 1), rat(-3, 1));
        assert_eq!(v0.get(4, 2), rat(1, 2));
    }

    #[test]
    fn capacity_is_enforced() {
        assert!(matches!(verify_with_order(4, 5), Err(Error::Capacity(_))));
        assert!(matches!(verify_theorem_coefficients(9), Err(Error::Argument(_))));
        let graded = BigradedSeries::one(2);
        assert!(matches!(graded.exp(), Err(Error::SingularSeries(_))));
    }

    #[test]
    fn theorem_coefficients_agree() {
        let report = verify_theorem_coefficients(6).unwrap();
        let bad: Vec<_> = report.entries.iter().filter(|e| !e.matches).collect();
        assert!(bad.is_empty(), "{bad:#?}");
    }
}
