//! Coefficients of `p(t) = t^3 (3 - t^2) / ((1 - t^2)(1 - t^2 - t^3))`,
//! the free-Lie dimensions they encode, and their exponential growth rate.
//!
//! `p = t f'/(1 - f)` for `f = t^3/(1 - t^2)`, and `a_n = Σ_{d|n} d A_d`
//! where `A_d` is the dimension of the degree-`d` part of the free Lie
//! algebra on one generator in each odd degree `>= 3`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};

/// `[1, 0, -2, -1, 1, 1]`: `(1 - t^2)(1 - t^2 - t^3)`.
const DENOMINATOR: [i64; 6] = [1, 0, -2, -1, 1, 1];
/// `3 t^3 - t^5`.
const NUMERATOR: [i64; 6] = [0, 0, 0, 3, 0, -1];

/// `a_0 ..= a_n` from the recurrence given by the denominator.
pub fn p_coefficients(n: usize) -> Vec<BigInt> {
    let mut a: Vec<BigInt> = Vec::with_capacity(n + 1);
    for k in 0..=n {
        let mut v = BigInt::from(*NUMERATOR.get(k).unwrap_or(&0));
        for (j, &d) in DENOMINATOR.iter().enumerate().skip(1) {
            if j <= k {
                v -= &a[k - j] * d;
            }
        }
        a.push(v);
    }
    a
}

/// Möbius function by trial division.
pub fn mobius(mut n: u64) -> i64 {
    assert!(n >= 1);
    let mut mu = 1;
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            n /= d;
            if n % d == 0 {
                return 0;
            }
            mu = -mu;
        }
        d += 1;
    }
    if n > 1 {
        mu = -mu;
    }
    mu
}

fn divisors(n: usize) -> impl Iterator<Item = usize> {
    (1..=n).filter(move |d| n % d == 0)
}

/// `A_0 ..= A_n` with `A_n = (1/n) Σ_{d|n} μ(n/d) a_d`; `A_0 = 0`. Fails if
/// some `A_n` is not a nonnegative integer.
pub fn lie_dimensions(n: usize) -> Result<Vec<BigInt>> {
    let a = p_coefficients(n);
    let mut out = vec![BigInt::zero()];
    for m in 1..=n {
        let sum: BigInt = divisors(m)
            .map(|d| &a[d] * mobius((m / d) as u64))
            .sum();
        let (q, r) = sum.div_rem(&BigInt::from(m));
        if !r.is_zero() || q.is_negative() {
            return Err(Error::NonIntegralLieDimension(m));
        }
        out.push(q);
    }
    Ok(out)
}

/// Smallest positive root of `1 - t^2 - t^3` and the real root of
/// `t^3 - t - 1`, both by bisection.
pub fn roots() -> (f64, f64) {
    let alpha = bisect(|t| 1.0 - t * t - t * t * t, 0.5, 1.0);
    let beta = bisect(|t| t * t * t - t - 1.0, 1.0, 2.0);
    assert!((beta - 1.0 / alpha).abs() < 1e-10, "β_0 = 1/α");
    (alpha, beta)
}

fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let flo = f(lo);
    assert!(flo * f(hi) < 0.0, "bracket must change sign");
    while hi - lo > 1e-15 {
        let mid = 0.5 * (lo + hi);
        if (f(mid) < 0.0) == (flo < 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

pub fn p_value(t: f64) -> f64 {
    let poly = |c: &[i64]| c.iter().rev().fold(0.0, |acc, &x| acc * t + x as f64);
    poly(&NUMERATOR) / poly(&DENOMINATOR)
}

/// `(t - α) p(t)` averaged over `t = α ± h`.
pub fn residue_estimate(alpha: f64, h: f64) -> f64 {
    0.5 * (h * p_value(alpha + h) + (-h) * p_value(alpha - h))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GrowthRow {
    pub n: usize,
    pub a_n: String,
    pub lie_dim: String,
    /// `a_n α^n`
    pub product: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GrowthReport {
    pub alpha: f64,
    pub beta0: f64,
    pub residue: f64,
    pub rows: Vec<GrowthRow>,
    pub threshold: f64,
    /// least `n` from which `|a_m α^m - 1| < threshold` for every listed `m >= n`
    pub settled_from: Option<usize>,
}

pub fn growth_report(n: usize, threshold: f64) -> Result<GrowthReport> {
    let (alpha, beta0) = roots();
    let a = p_coefficients(n);
    let lie = lie_dimensions(n)?;
    let rows: Vec<GrowthRow> = (1..=n)
        .map(|m| GrowthRow {
            n: m,
            a_n: a[m].to_string(),
            lie_dim: lie[m].to_string(),
            product: a[m].to_f64().expect("finite") * alpha.powi(m as i32),
        })
        .collect();
    let settled_from = rows
        .iter()
        .rposition(|r| (r.product - 1.0).abs() >= threshold)
        .map_or(Some(1), |i| (i + 1 < rows.len()).then(|| rows[i + 1].n));
    Ok(GrowthReport {
        alpha,
        beta0,
        residue: residue_estimate(alpha, 1e-5),
        rows,
        threshold,
        settled_from,
    })
}

/// The report as CSV `n,a_n,A_n,product`, the float to 15 significant digits.
pub fn growth_csv(report: &GrowthReport) -> String {
    let mut s = String::from("n,a_n,A_n,product\n");
    for r in &report.rows {
        s.push_str(&format!("{},{},{},{}\n", r.n, r.a_n, r.lie_dim, format_sig(r.product, 15)));
    }
    s
}

/// Scientific notation with `digits` significant digits.
pub fn format_sig(x: f64, digits: usize) -> String {
    format!("{:.*e}", digits - 1, x)
}

/// Truncated power series with exact rational coefficients.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PowerSeries {
    pub coeffs: Vec<BigRational>,
}

impl PowerSeries {
    pub fn from_ints(c: &[i64], order: usize) -> Self {
        let coeffs = (0..=order)
            .map(|i| BigRational::from_integer(BigInt::from(*c.get(i).unwrap_or(&0))))
            .collect();
        PowerSeries { coeffs }
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        let n = self.order().min(rhs.order());
        let coeffs = (0..=n)
            .map(|k| (0..=k).map(|i| &self.coeffs[i] * &rhs.coeffs[k - i]).sum())
            .collect();
        PowerSeries { coeffs }
    }

    /// Multiplicative inverse; the constant term must be nonzero.
    pub fn inverse(&self) -> Self {
        let c0 = &self.coeffs[0];
        assert!(!c0.is_zero(), "constant term must be invertible");
        let mut inv: Vec<BigRational> = vec![c0.recip()];
        for k in 1..=self.order() {
            let s: BigRational = (1..=k).map(|i| &self.coeffs[i] * &inv[k - i]).sum();
            inv.push(-s / c0);
        }
        PowerSeries { coeffs: inv }
    }

    /// `log(1 - self)^{-1} = Σ_{k>=1} self^k / k` for a series without
    /// constant term.
    pub fn log_inverse_one_minus(&self) -> Self {
        assert!(self.coeffs[0].is_zero());
        let n = self.order();
        let mut acc = PowerSeries::from_ints(&[], n);
        let mut power = PowerSeries::from_ints(&[1], n);
        for k in 1..=n {
            power = power.mul(self);
            let kk = BigRational::from_integer(BigInt::from(k));
            for (a, b) in acc.coeffs.iter_mut().zip(&power.coeffs) {
                *a += b / &kk;
            }
        }
        acc
    }
}

/// `a_n` by dividing the numerator by the denominator as power series.
pub fn p_coefficients_by_division(n: usize) -> Vec<BigRational> {
    let num = PowerSeries::from_ints(&NUMERATOR, n);
    let den = PowerSeries::from_ints(&DENOMINATOR, n);
    num.mul(&den.inverse()).coeffs
}

/// `A_n` read off `log 1/(1 - f) = Σ_d A_d Σ_k t^{dk}/k` triangularly.
pub fn lie_dimensions_by_log(n: usize) -> Vec<BigRational> {
    // f = t^3 / (1 - t^2)
    let f = PowerSeries::from_ints(&[0, 0, 0, 1], n).mul(&PowerSeries::from_ints(&[1, 0, -1], n).inverse());
    let log = f.log_inverse_one_minus();
    let mut lie = vec![BigRational::zero(); n + 1];
    for m in 1..=n {
        let mut v = log.coeffs[m].clone();
        for d in divisors(m).filter(|&d| d < m) {
            v -= &lie[d] / BigRational::from_integer(BigInt::from(m / d));
        }
        lie[m] = v;
    }
    lie
}

/// Rechecks `a_n = Σ_{d|n} d A_d`.
pub fn check_divisor_sums(a: &[BigInt], lie: &[BigInt]) -> bool {
    (1..a.len()).all(|m| divisors(m).map(|d| &lie[d] * d).sum::<BigInt>() == a[m])
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::One;

    #[test]
    fn first_coefficients() {
        let a = p_coefficients(10);
        assert_eq!(a[1], BigInt::zero());
        assert_eq!(a[2], BigInt::zero());
        assert_eq!(a[3], BigInt::from(3));
        let lie = lie_dimensions(10).unwrap();
        assert_eq!(lie[3], BigInt::one());
        assert_eq!(lie[4], BigInt::zero());
        // σ_5 alone; [σ_3, σ_3] = 0; [σ_3, σ_5]
        assert_eq!(lie[5], BigInt::one());
        assert_eq!(lie[6], BigInt::zero());
        assert_eq!(lie[8], BigInt::one());
    }

    #[test]
    fn division_oracle() {
        let a = p_coefficients(30);
        let b = p_coefficients_by_division(30);
        for n in 0..=30 {
            assert_eq!(BigRational::from_integer(a[n].clone()), b[n], "n = {n}");
        }
    }

    #[test]
    fn log_oracle() {
        let lie = lie_dimensions(30).unwrap();
        let by_log = lie_dimensions_by_log(30);
        for n in 1..=30 {
            assert_eq!(BigRational::from_integer(lie[n].clone()), by_log[n], "n = {n}");
        }
        assert!(check_divisor_sums(&p_coefficients(30), &lie));
    }

    #[test]
    fn mobius_values() {
        let expected = [1, -1, -1, 0, -1, 1, -1, 0, 0, 1, -1, 0];
        for (i, &m) in expected.iter().enumerate() {
            assert_eq!(mobius(i as u64 + 1), m);
        }
    }

    #[test]
    fn roots_and_residue() {
        let (alpha, beta) = roots();
        assert!((alpha - 0.75488).abs() < 1e-4);
        assert!((beta - 1.3247).abs() < 1e-4);
        assert!((beta.powi(3) - beta - 1.0).abs() < 1e-10);
        assert!((residue_estimate(alpha, 1e-5) + alpha).abs() < 1e-8);
    }

    #[test]
    fn report_and_csv() {
        let r = growth_report(40, 1e-6).unwrap();
        assert_eq!(r.rows.len(), 40);
        let csv = growth_csv(&r);
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some("n,a_n,A_n,product"));
        assert!(lines.nth(2).unwrap().starts_with("3,3,1,"));
        assert_eq!(format_sig(1.0, 15), "1.00000000000000e0");
    }

    #[test]
    fn power_series_inverse() {
        let s = PowerSeries::from_ints(&[1, -1], 6);
        assert!(s.inverse().coeffs.iter().all(|c| c.is_one()));
    }
}
