//! Rank correlation for noise curves.

use gcff_core::synth::SweepPoint;
use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Spearman {
    pub rho: f64,
    /// Two-sided p-value from the t approximation with `n - 2` degrees of
    /// freedom.
    pub p_value: f64,
}

/// Ranks starting at 1, ties sharing their average rank.
fn ranks(values: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..values.len()).collect();
    idx.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut out = vec![0.0; values.len()];
    let mut start = 0;
    while start < idx.len() {
        let mut end = start + 1;
        while end < idx.len() && values[idx[end]] == values[idx[start]] {
            end += 1;
        }
        let avg = (start + end + 1) as f64 / 2.0;
        for &i in &idx[start..end] {
            out[i] = avg;
        }
        start = end;
    }
    out
}

fn pearson(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let (mx, my) = (x.iter().sum::<f64>() / n, y.iter().sum::<f64>() / n);
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
        syy += (b - my) * (b - my);
    }
    if sxx == 0.0 || syy == 0.0 {
        return 0.0;
    }
    sxy / (sxx * syy).sqrt()
}

pub fn spearman(x: &[f64], y: &[f64]) -> Result<Spearman> {
    if x.len() != y.len() || x.len() < 3 {
        return Err(Error::InvalidInput(
            "rank correlation needs two equal series of at least 3 values".into(),
        ));
    }
    let rho = pearson(&ranks(x), &ranks(y)).clamp(-1.0, 1.0);
    let df = (x.len() - 2) as f64;
    let p_value = if rho.abs() == 1.0 {
        0.0
    } else {
        let t = rho * (df / (1.0 - rho * rho)).sqrt();
        let dist = StudentsT::new(0.0, 1.0, df).map_err(|e| Error::InvalidInput(e.to_string()))?;
        2.0 * dist.cdf(-t.abs())
    };
    Ok(Spearman { rho, p_value })
}

/// Rank correlation between noise level and F1.
pub fn curve_trend(curve: &[SweepPoint]) -> Result<Spearman> {
    let levels: Vec<f64> = curve.iter().map(|p| f64::from(p.level)).collect();
    let f1: Vec<f64> = curve.iter().map(|p| p.f1).collect();
    spearman(&levels, &f1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn average_ranks() {
        assert_eq!(ranks(&[3.0, 1.0, 3.0, 2.0]), [3.5, 1.0, 3.5, 2.0]);
    }

    #[test]
    fn perfect_orders() {
        let x = [0.0, 1.0, 2.0, 3.0, 4.0];
        let s = spearman(&x, &[1.0, 0.9, 0.5, 0.2, 0.1]).unwrap();
        assert_eq!(s.rho, -1.0);
        assert_eq!(s.p_value, 0.0);
        assert_eq!(spearman(&x, &[0.0, 2.0, 4.0, 8.0, 16.0]).unwrap().rho, 1.0);
    }

    #[test]
    fn matches_reference_values() {
        // scipy.stats.spearmanr gives rho = 0.8, p = 0.104
        let s = spearman(&[1.0, 2.0, 3.0, 4.0, 5.0], &[2.0, 1.0, 4.0, 3.0, 5.0]).unwrap();
        assert_abs_diff_eq!(s.rho, 0.8, epsilon = 1e-12);
        assert_abs_diff_eq!(s.p_value, 0.10408803866182788, epsilon = 1e-9);
    }

    #[test]
    fn short_series_rejected() {
        assert!(spearman(&[1.0, 2.0], &[2.0, 1.0]).is_err());
    }
}
