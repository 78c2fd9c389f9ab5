use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Chi2Result {
    pub statistic: f64,
    pub df: u32,
    pub p: f64,
    /// Whether the Yates continuity correction was applied.
    pub corrected: bool,
}

impl Chi2Result {
    fn new(statistic: f64, df: u32, corrected: bool) -> Self {
        Chi2Result {
            statistic,
            df,
            p: chi2_p(statistic, df),
            corrected,
        }
    }
}

/// Goodness of fit against `expected` proportions, uniform when `None`.
pub fn chi2_gof(observed: &[u64], expected: Option<&[f64]>) -> Result<Chi2Result> {
    if observed.len() < 2 {
        return Err(Error::validation("observed", "need at least two cells"));
    }
    let total: u64 = observed.iter().sum();
    if total == 0 {
        return Err(Error::validation("observed", "total count is zero"));
    }
    let n = total as f64;
    let uniform = vec![1.0 / observed.len() as f64; observed.len()];
    let props = match expected {
        Some(p) => {
            if p.len() != observed.len() {
                return Err(Error::validation(
                    "expected",
                    format!("{} proportions for {} cells", p.len(), observed.len()),
                ));
            }
            if p.iter().any(|x| !(*x > 0.0) || !x.is_finite()) {
                return Err(Error::validation("expected", "proportions must be positive"));
            }
            let s: f64 = p.iter().sum();
            if (s - 1.0).abs() > 1e-9 {
                return Err(Error::validation(
                    "expected",
                    format!("proportions sum to {s}, not 1"),
                ));
            }
            p
        }
        None => &uniform[..],
    };
    let statistic = observed
        .iter()
        .zip(props)
        .map(|(&o, &q)| {
            let e = n * q;
            let d = o as f64 - e;
            d * d / e
        })
        .sum();
    Ok(Chi2Result::new(statistic, observed.len() as u32 - 1, false))
}

/// Test of independence on `[[a, b], [c, d]]`.
pub fn chi2_2x2(table: [[u64; 2]; 2], yates: bool) -> Result<Chi2Result> {
    let [[a, b], [c, d]] = table.map(|r| r.map(|x| x as f64));
    let margins = [a + b, c + d, a + c, b + d];
    if margins.iter().any(|m| *m == 0.0) {
        return Err(Error::validation("table", "a row or column total is zero"));
    }
    let n = a + b + c + d;
    let mut diff = (a * d - b * c).abs();
    if yates {
        diff = (diff - n / 2.0).max(0.0);
    }
    let statistic = n * diff * diff / margins.iter().product::<f64>();
    Ok(Chi2Result::new(statistic, 1, yates))
}

/// Upper-tail probability of the chi-square distribution with `df` degrees of freedom.
pub fn chi2_p(statistic: f64, df: u32) -> f64 {
    if statistic <= 0.0 || statistic.is_nan() {
        return 1.0;
    }
    if statistic.is_infinite() {
        return 0.0;
    }
    gamma_q(df as f64 / 2.0, statistic / 2.0).clamp(0.0, 1.0)
}

const EPS: f64 = 1e-15;
const MAX_ITER: usize = 500;

/// Regularized upper incomplete gamma Q(a, x). Uses the power series for
/// P when x < a + 1 and a Lentz continued fraction for Q otherwise.
fn gamma_q(a: f64, x: f64) -> f64 {
    if x < a + 1.0 {
        1.0 - gamma_p_series(a, x)
    } else {
        gamma_q_fraction(a, x)
    }
}

fn gamma_p_series(a: f64, x: f64) -> f64 {
    let mut ap = a;
    let mut term = 1.0 / a;
    let mut sum = term;
    for _ in 0..MAX_ITER {
        ap += 1.0;
        term *= x / ap;
        sum += term;
        if term.abs() < sum.abs() * EPS {
            break;
        }
    }
    sum * (-x + a * x.ln() - ln_gamma(a)).exp()
}

fn gamma_q_fraction(a: f64, x: f64) -> f64 {
    let tiny = f64::MIN_POSITIVE / EPS;
    let mut b = x + 1.0 - a;
    let mut c = 1.0 / tiny;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..=MAX_ITER {
        let an = -(i as f64) * (i as f64 - a);
        b += 2.0;
        d = an * d + b;
        if d.abs() < tiny {
            d = tiny;
        }
        c = b + an / c;
        if c.abs() < tiny {
            c = tiny;
        }
        d = 1.0 / d;
        let delta = d * c;
        h *= delta;
        if (delta - 1.0).abs() < EPS {
            break;
        }
    }
    (-x + a * x.ln() - ln_gamma(a)).exp() * h
}

/// Lanczos approximation (g = 7, n = 9).
fn ln_gamma(x: f64) -> f64 {
    const G: f64 = 7.0;
    const COEF: [f64; 9] = [
        0.999_999_999_999_809_9,
        676.520_368_121_885_1,
        -1_259.139_216_722_402_8,
        771.323_428_777_653_1,
        -176.615_029_162_140_6,
        12.507_343_278_686_905,
        -0.138_571_095_265_720_12,
        9.984_369_578_019_572e-6,
        1.505_632_735_149_311_6e-7,
    ];
    if x < 0.5 {
        let pi = std::f64::consts::PI;
        return (pi / (pi * x).sin()).ln() - ln_gamma(1.0 - x);
    }
    let x = x - 1.0;
    let mut acc = COEF[0];
    for (i, c) in COEF.iter().enumerate().skip(1) {
        acc += c / (x + i as f64);
    }
    let t = x + G + 0.5;
    0.5 * (2.0 * std::f64::consts::PI).ln() + (x + 0.5) * t.ln() - t + acc.ln()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gof_examples() {
        let r = chi2_gof(&[54, 12], None).unwrap();
        assert!((r.statistic - 26.7273).abs() < 1e-3);
        assert_eq!(r.df, 1);
        assert!(r.p < 0.001);
        let r = chi2_gof(&[50, 50], None).unwrap();
        assert_eq!(r.statistic, 0.0);
        assert_eq!(r.p, 1.0);
        let r = chi2_gof(&[71, 50], None).unwrap();
        assert!((r.statistic - 3.6446).abs() < 1e-3);
        assert!((r.p - 0.056).abs() < 1e-3);
    }

    #[test]
    fn gof_weighted() {
        let r = chi2_gof(&[30, 70], Some(&[0.3, 0.7])).unwrap();
        assert!(r.statistic.abs() < 1e-12);
        assert!(chi2_gof(&[1, 2], Some(&[0.5, 0.4])).is_err());
        assert!(chi2_gof(&[1, 2], Some(&[1.0, 0.0])).is_err());
        assert!(chi2_gof(&[1, 2], Some(&[1.0])).is_err());
    }

    #[test]
    fn gof_errors() {
        assert!(chi2_gof(&[0, 0], None).is_err());
        assert!(chi2_gof(&[5], None).is_err());
    }

    #[test]
    fn two_by_two() {
        let t = [[54, 12], [1344, 1128]];
        let y = chi2_2x2(t, true).unwrap();
        assert!((y.statistic - 18.4827).abs() < 1e-3);
        assert!(y.corrected);
        let u = chi2_2x2(t, false).unwrap();
        assert!((u.statistic - 19.5764).abs() < 1e-3);
        assert_eq!(chi2_2x2([[10, 10], [10, 10]], false).unwrap().statistic, 0.0);
        assert_eq!(chi2_2x2([[10, 10], [10, 10]], true).unwrap().statistic, 0.0);
        assert!(chi2_2x2([[0, 0], [1, 2]], true).is_err());
    }

    #[test]
    fn p_values() {
        assert_eq!(chi2_p(0.0, 1), 1.0);
        assert!((chi2_p(3.65, 1) - 0.056).abs() < 1e-3);
        // df = 2 has the closed form exp(-x/2)
        for x in [0.1, 1.0, 5.0, 30.0] {
            assert!((chi2_p(x, 2) - (-x / 2.0).exp()).abs() < 1e-12);
        }
    }

    #[test]
    fn ln_gamma_integers() {
        let mut fact = 1.0f64;
        for n in 1..20 {
            assert!((ln_gamma(n as f64) - fact.ln()).abs() < 1e-10, "{n}");
            fact *= n as f64;
        }
        assert!((ln_gamma(0.5) - std::f64::consts::PI.sqrt().ln()).abs() < 1e-12);
    }
}
