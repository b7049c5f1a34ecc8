//! Summary statistics for paired runs.

use statrs::distribution::{ContinuousCDF, StudentsT};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PairedTest {
    pub n: usize,
    pub mean_diff: f64,
    pub t: f64,
    /// One-sided p-value for `mean(a - b) > 0`.
    pub p_greater: f64,
}

pub fn mean(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        0.0
    } else {
        xs.iter().sum::<f64>() / xs.len() as f64
    }
}

/// Paired t-test of `a` against `b`. Returns `None` for fewer than two pairs.
pub fn paired_t_test(a: &[f64], b: &[f64]) -> Option<PairedTest> {
    assert_eq!(a.len(), b.len(), "paired samples differ in length");
    let n = a.len();
    if n < 2 {
        return None;
    }
    let d: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    let m = mean(&d);
    let var = d.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1) as f64;
    let se = (var / n as f64).sqrt();
    let (t, p) = if se == 0.0 {
        // every difference is identical
        if m > 0.0 {
            (f64::INFINITY, 0.0)
        } else {
            (if m < 0.0 { f64::NEG_INFINITY } else { 0.0 }, if m < 0.0 { 1.0 } else { 0.5 })
        }
    } else {
        let t = m / se;
        let dist = StudentsT::new(0.0, 1.0, (n - 1) as f64).ok()?;
        (t, 1.0 - dist.cdf(t))
    };
    Some(PairedTest { n, mean_diff: m, t, p_greater: p })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn known_t_value() {
        // differences 1, 2, 3, 4: mean 2.5, sd 1.291, t = 3.873
        let a = [2.0, 4.0, 6.0, 8.0];
        let b = [1.0, 2.0, 3.0, 4.0];
        let r = paired_t_test(&a, &b).unwrap();
        assert!((r.t - 3.872983346207417).abs() < 1e-9);
        // one-sided p from the t distribution with 3 degrees of freedom
        assert!((r.p_greater - 0.015233145831085489).abs() < 1e-9);
    }

    #[test]
    fn degenerate_inputs() {
        assert!(paired_t_test(&[1.0], &[0.0]).is_none());
        assert_eq!(paired_t_test(&[1.0, 1.0], &[1.0, 1.0]).unwrap().p_greater, 0.5);
        assert_eq!(paired_t_test(&[2.0, 3.0], &[1.0, 2.0]).unwrap().p_greater, 0.0);
    }
}
