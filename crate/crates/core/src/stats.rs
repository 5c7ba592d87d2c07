//! Rank correlation used when relating target structure to energy.

use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::error::{invalid, Result};

/// Ranks starting at 1, ties sharing their average rank.
pub fn average_ranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0.0; values.len()];
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len() && values[order[end]] == values[order[start]] {
            end += 1;
        }
        let rank = (start + end + 1) as f64 / 2.0;
        for &k in &order[start..end] {
            ranks[k] = rank;
        }
        start = end;
    }
    ranks
}

fn pearson(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx).powi(2);
        syy += (b - my).powi(2);
    }
    sxy / (sxx * syy).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Correlation {
    pub rho: f64,
    /// Two-sided p-value from the t approximation with `n − 2` degrees of freedom.
    pub p_value: f64,
    pub n: usize,
}

/// Spearman rank correlation between paired samples.
pub fn spearman(x: &[f64], y: &[f64]) -> Result<Correlation> {
    if x.len() != y.len() {
        return Err(invalid("spearman: samples differ in length"));
    }
    let n = x.len();
    if n < 3 {
        return Err(invalid("spearman: need at least three pairs"));
    }
    let rho = pearson(&average_ranks(x), &average_ranks(y));
    if rho.is_nan() {
        return Err(invalid("spearman: a sample is constant"));
    }
    let df = (n - 2) as f64;
    let p_value = if rho.abs() >= 1.0 {
        0.0
    } else {
        let t = rho * (df / (1.0 - rho * rho)).sqrt();
        let dist = StudentsT::new(0.0, 1.0, df).expect("positive degrees of freedom");
        2.0 * dist.cdf(-t.abs())
    };
    Ok(Correlation { rho, p_value, n })
}

pub fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranks_with_ties() {
        assert_eq!(
            average_ranks(&[3.0, 1.0, 3.0, 2.0]),
            vec![3.5, 1.0, 3.5, 2.0]
        );
    }

    #[test]
    fn perfect_monotone_relations() {
        let x = [1.0, 2.0, 3.0, 4.0, 5.0];
        let up = spearman(&x, &[1.0, 4.0, 9.0, 16.0, 100.0]).unwrap();
        assert_eq!(up.rho, 1.0);
        let down = spearman(&x, &[5.0, 3.0, 2.0, 1.0, 0.0]).unwrap();
        assert_eq!(down.rho, -1.0);
        assert_eq!(down.p_value, 0.0);
    }

    #[test]
    fn reference_value() {
        // scipy.stats.spearmanr([1,2,3,4,5,6,7,8,9,10],[2,1,4,3,7,5,6,9,10,8])
        // -> statistic 0.903030303..., pvalue 0.000344...
        let x: Vec<f64> = (1..=10).map(f64::from).collect();
        let y = [2.0, 1.0, 4.0, 3.0, 7.0, 5.0, 6.0, 9.0, 10.0, 8.0];
        let c = spearman(&x, &y).unwrap();
        assert!((c.rho - 0.903_030_303_030_303).abs() < 1e-12);
        assert!((c.p_value - 3.4e-4).abs() < 1e-5, "{}", c.p_value);
    }

    #[test]
    fn degenerate_inputs() {
        assert!(spearman(&[1.0, 2.0], &[1.0, 2.0]).is_err());
        assert!(spearman(&[1.0, 1.0, 1.0], &[1.0, 2.0, 3.0]).is_err());
        assert!(spearman(&[1.0, 2.0, 3.0], &[1.0, 2.0]).is_err());
    }
}
