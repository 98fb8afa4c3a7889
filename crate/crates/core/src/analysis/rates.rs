use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct RateRow {
    pub h: f64,
    pub dofs: usize,
    pub errors: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RateTable {
    pub norms: Vec<String>,
    /// Sorted by decreasing `h`.
    pub rows: Vec<RateRow>,
    /// Least-squares slope of `log(error)` against `log(h)` per norm.
    pub slopes: Vec<f64>,
    /// `false` where the error does not decrease strictly with `h`.
    pub monotone: Vec<bool>,
}

/// Slope of the least-squares line through `(x_i, y_i)`.
pub fn least_squares_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

pub fn rate_table(norms: &[&str], mut rows: Vec<RateRow>) -> Result<RateTable> {
    if rows.len() < 2 {
        return Err(Error::Config(format!("rate fit needs at least 2 refinement levels, got {}", rows.len())));
    }
    if rows.len() < 3 {
        log::warn!("fitting rates from only {} levels", rows.len());
    }
    if let Some(r) = rows.iter().find(|r| r.errors.len() != norms.len()) {
        return Err(Error::Contract(format!("row with h={} has {} errors for {} norms", r.h, r.errors.len(), norms.len())));
    }
    rows.sort_by(|a, b| b.h.total_cmp(&a.h));
    if rows.windows(2).any(|w| w[1].h >= w[0].h) {
        return Err(Error::Config("mesh sizes must be distinct".into()));
    }
    let log_h: Vec<f64> = rows.iter().map(|r| r.h.ln()).collect();
    let mut slopes = Vec::with_capacity(norms.len());
    let mut monotone = Vec::with_capacity(norms.len());
    for j in 0..norms.len() {
        let log_e: Vec<f64> = rows.iter().map(|r| r.errors[j].ln()).collect();
        slopes.push(least_squares_slope(&log_h, &log_e));
        let mono = rows.windows(2).all(|w| w[1].errors[j] < w[0].errors[j]);
        if !mono {
            log::warn!("{} error is not monotone under refinement", norms[j]);
        }
        monotone.push(mono);
    }
    Ok(RateTable { norms: norms.iter().map(|s| s.to_string()).collect(), rows, slopes, monotone })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn rows(hs: &[f64], f: impl Fn(f64) -> f64) -> Vec<RateRow> {
        hs.iter().map(|&h| RateRow { h, dofs: 0, errors: vec![f(h)] }).collect()
    }

    #[test]
    fn quadratic_errors_give_slope_two() {
        let t = rate_table(&["e"], rows(&[0.4, 0.2, 0.1, 0.05], |h| h * h)).unwrap();
        assert!((t.slopes[0] - 2.0).abs() < 1e-10);
        assert!(t.monotone[0]);
    }

    #[test]
    fn constant_errors_give_slope_zero() {
        let t = rate_table(&["e"], rows(&[0.4, 0.2, 0.1], |_| 3.0)).unwrap();
        assert!(t.slopes[0].abs() < 1e-12);
        assert!(!t.monotone[0]);
    }

    #[test]
    fn one_level_is_not_enough() {
        assert!(rate_table(&["e"], rows(&[0.4], |h| h)).is_err());
    }

    proptest! {
        #[test]
        fn power_laws_are_recovered(c in 0.1f64..10.0, k in 0.5f64..5.0, h0 in 0.1f64..1.0) {
            let hs = [h0, h0 / 1.5, h0 / 2.3, h0 / 3.7];
            let t = rate_table(&["e"], rows(&hs, |h| c * h.powf(k))).unwrap();
            prop_assert!((t.slopes[0] - k).abs() < 1e-9);
        }
    }
}
