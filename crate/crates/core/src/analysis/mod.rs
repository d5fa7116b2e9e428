//! Reduction of infidelity curves to logical error rates, and of error-rate
//! tables to suppression factors, thresholds and qubit-count estimates.

pub mod fit;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use fit::{fit_infidelity, fit_infidelity_in, logical_error_rate, FitResult, TimeUnit};

/// Logical error rates indexed by code size and physical error rate.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlTable {
    pub sizes: Vec<usize>,
    pub gamma_es: Vec<f64>,
    /// `values[size][gamma_e]`; `None` where the fit failed.
    pub values: Vec<Vec<Option<f64>>>,
}

impl PlTable {
    pub fn new(sizes: Vec<usize>, gamma_es: Vec<f64>, values: Vec<Vec<Option<f64>>>) -> Result<Self> {
        if values.len() != sizes.len() || values.iter().any(|row| row.len() != gamma_es.len()) {
            return Err(Error::InvalidConfig("table shape does not match its axes".into()));
        }
        if sizes.windows(2).any(|w| w[1] <= w[0]) || gamma_es.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidConfig("table axes must be strictly increasing".into()));
        }
        Ok(Self { sizes, gamma_es, values })
    }

    /// Tabulates `f(n, gamma_e)`.
    pub fn from_fn(sizes: &[usize], gamma_es: &[f64], mut f: impl FnMut(usize, f64) -> Option<f64>) -> Result<Self> {
        let values = sizes.iter().map(|&n| gamma_es.iter().map(|&g| f(n, g)).collect()).collect();
        Self::new(sizes.to_vec(), gamma_es.to_vec(), values)
    }

    pub fn get(&self, n: usize, gamma_index: usize) -> Option<f64> {
        let row = self.sizes.iter().position(|&s| s == n)?;
        self.values[row].get(gamma_index).copied().flatten()
    }

    fn positive(&self, row: usize, col: usize) -> Option<f64> {
        self.values[row][col].filter(|v| v.is_finite() && *v > 0.0)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairRatio {
    pub n_small: usize,
    pub n_large: usize,
    /// `(p_small / p_large)^(1/k)` with `k = (n_large - n_small) / 2`.
    pub ratio: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LambdaPoint {
    pub gamma_e: f64,
    pub ratios: Vec<PairRatio>,
    pub mean: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LambdaEstimate {
    pub points: Vec<LambdaPoint>,
    /// Least-squares fit `Lambda = a / gamma_e + b`.
    pub a: f64,
    pub b: f64,
    pub gamma_e_star: f64,
}

impl LambdaEstimate {
    pub fn model(&self, gamma_e: f64) -> f64 {
        self.a / gamma_e + self.b
    }
}

/// Minimum code size entering the suppression factor; `n = 3` has too
/// little head room before its onset to follow the power law.
pub const LAMBDA_MIN_SIZE: usize = 5;

/// Per-rate suppression factor averaged over every pair of sizes
/// `>= LAMBDA_MIN_SIZE`, then fitted to `a / gamma_e + b`.
pub fn lambda_estimate(table: &PlTable) -> Result<LambdaEstimate> {
    let rows: Vec<usize> = (0..table.sizes.len()).filter(|&r| table.sizes[r] >= LAMBDA_MIN_SIZE).collect();
    if rows.len() < 2 {
        return Err(Error::InsufficientSizes { needed: 2, got: rows.len() });
    }
    let mut points = Vec::new();
    for (col, &gamma_e) in table.gamma_es.iter().enumerate() {
        let mut ratios = Vec::new();
        for (u, &ra) in rows.iter().enumerate() {
            for &rb in &rows[u + 1..] {
                let (Some(pa), Some(pb)) = (table.positive(ra, col), table.positive(rb, col)) else {
                    continue;
                };
                let (na, nb) = (table.sizes[ra], table.sizes[rb]);
                let k = (nb - na) as f64 / 2.0;
                ratios.push(PairRatio { n_small: na, n_large: nb, ratio: (pa / pb).powf(1.0 / k) });
            }
        }
        if ratios.is_empty() {
            continue;
        }
        let mean = ratios.iter().map(|r| r.ratio).sum::<f64>() / ratios.len() as f64;
        points.push(LambdaPoint { gamma_e, ratios, mean });
    }
    if points.len() < 2 {
        return Err(Error::DegenerateData(format!("{} usable rates for the Lambda fit", points.len())));
    }
    let (a, b) = least_squares_inverse(&points);
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::FitFailure("Lambda fit is singular".into()));
    }
    Ok(LambdaEstimate { points, a, b, gamma_e_star: a })
}

/// Ordinary least squares for `y = a x + b` with `x = 1 / gamma_e`.
fn least_squares_inverse(points: &[LambdaPoint]) -> (f64, f64) {
    let m = points.len() as f64;
    let (mut sx, mut sy, mut sxx, mut sxy) = (0.0, 0.0, 0.0, 0.0);
    for p in points {
        let x = 1.0 / p.gamma_e;
        sx += x;
        sy += p.mean;
        sxx += x * x;
        sxy += x * p.mean;
    }
    let det = m * sxx - sx * sx;
    ((m * sxy - sx * sy) / det, (sxx * sy - sx * sxy) / det)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Crossing {
    pub n_small: usize,
    pub n_large: usize,
    pub gamma_e: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThresholdResult {
    pub crossings: Vec<Crossing>,
    /// Median over all pairwise crossings.
    pub median: f64,
    /// Crossing of the smallest and largest size, when they cross.
    pub extreme_pair: Option<f64>,
}

/// Rate at which the larger code stops outperforming the smaller one, for
/// every pair of sizes. The first sign change of `ln p_small - ln p_large`
/// from positive to non-positive is interpolated linearly in `ln gamma_e`.
pub fn threshold_estimate(table: &PlTable) -> Result<ThresholdResult> {
    if table.sizes.len() < 3 {
        return Err(Error::InsufficientSizes { needed: 3, got: table.sizes.len() });
    }
    let logs = &table.gamma_es.iter().map(|g| g.ln()).collect::<Vec<_>>();
    let mut crossings = Vec::new();
    for a in 0..table.sizes.len() {
        for b in a + 1..table.sizes.len() {
            let d: Vec<Option<f64>> =
                (0..logs.len()).map(|c| Some(table.positive(a, c)?.ln() - table.positive(b, c)?.ln())).collect();
            for k in 0..logs.len().saturating_sub(1) {
                if let (Some(d0), Some(d1)) = (d[k], d[k + 1]) {
                    if d0 > 0.0 && d1 <= 0.0 {
                        let f = d0 / (d0 - d1);
                        let x = (logs[k] + f * (logs[k + 1] - logs[k])).exp();
                        crossings.push(Crossing { n_small: table.sizes[a], n_large: table.sizes[b], gamma_e: x });
                        break;
                    }
                }
            }
        }
    }
    if crossings.is_empty() {
        return Err(Error::NoCrossing);
    }
    let mut xs: Vec<f64> = crossings.iter().map(|c| c.gamma_e).collect();
    xs.sort_by(f64::total_cmp);
    let mid = xs.len() / 2;
    let median = if xs.len() % 2 == 1 { xs[mid] } else { 0.5 * (xs[mid - 1] + xs[mid]) };
    let (lo, hi) = (table.sizes[0], table.sizes[table.sizes.len() - 1]);
    let extreme_pair = crossings.iter().find(|c| c.n_small == lo && c.n_large == hi).map(|c| c.gamma_e);
    Ok(ThresholdResult { crossings, median, extreme_pair })
}

/// How `ell` relates to the code size when turning an exponent into `n`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SizeConvention {
    /// `ell = (n - 1) / 2`, the number of correctable errors.
    #[default]
    Distance,
    /// `ell = (n + 1) / 2`.
    Shifted,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Extrapolation {
    /// Exponent `ell + 1` solving `c (gamma_e / gamma_e_star)^(ell + 1) = target`.
    pub exponent: f64,
    pub n_real: f64,
    /// Smallest odd size `>= n_real` (at least 3).
    pub n: usize,
    pub convention: SizeConvention,
}

/// Code size needed to reach `target` under `p_L = c (gamma_e / gamma_e_star)^(ell + 1)`.
pub fn extrapolate_qubits(
    gamma_e_star: f64,
    c: f64,
    gamma_e: f64,
    target: f64,
    convention: SizeConvention,
) -> Result<Extrapolation> {
    if [gamma_e_star, c, gamma_e, target].iter().any(|v| !(v.is_finite() && *v > 0.0)) {
        return Err(Error::InvalidConfig("extrapolation inputs must be positive".into()));
    }
    if gamma_e >= gamma_e_star {
        return Err(Error::NoSuppression { gamma_e, gamma_e_star });
    }
    let exponent = (target / c).ln() / (gamma_e / gamma_e_star).ln();
    if !(exponent > 0.0) {
        return Err(Error::DegenerateTarget(format!("target {target} needs exponent {exponent}")));
    }
    let ell = exponent - 1.0;
    let n_real = match convention {
        SizeConvention::Distance => 2.0 * ell + 1.0,
        SizeConvention::Shifted => 2.0 * ell - 1.0,
    };
    let mut n = n_real.ceil().max(3.0) as usize;
    if n.is_multiple_of(2) {
        n += 1;
    }
    Ok(Extrapolation { exponent, n_real, n, convention })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engines::log_spaced;

    fn power_law(star: f64) -> PlTable {
        let ges = log_spaced(0.01, 1.0, 21);
        PlTable::from_fn(&[3, 5, 7, 9, 11], &ges, |n, g| Some((g / star).powi((n as i32 + 1) / 2))).unwrap()
    }

    #[test]
    fn lambda_of_power_law() {
        let est = lambda_estimate(&power_law(0.2)).unwrap();
        for p in &est.points {
            assert!((p.mean - 0.2 / p.gamma_e).abs() < 1e-9 * p.mean);
        }
        assert!((est.gamma_e_star - 0.2).abs() < 1e-9);
        assert!(est.b.abs() < 1e-9);
    }

    #[test]
    fn power_law_crosses_at_star() {
        let th = threshold_estimate(&power_law(0.1)).unwrap();
        assert_eq!(th.crossings.len(), 10);
        assert!(th.crossings.iter().all(|c| (c.gamma_e - 0.1).abs() < 1e-9));
    }

    #[test]
    fn extrapolation_examples() {
        let e = extrapolate_qubits(0.2, 0.7, 0.01, 1e-15, SizeConvention::Distance).unwrap();
        assert!((e.n_real - 21.82).abs() < 0.01);
        assert_eq!(e.n, 23);
        assert!(matches!(
            extrapolate_qubits(0.2, 0.7, 0.2, 1e-15, SizeConvention::Distance),
            Err(Error::NoSuppression { .. })
        ));
        assert!(matches!(
            extrapolate_qubits(0.2, 0.7, 0.01, 0.7, SizeConvention::Distance),
            Err(Error::DegenerateTarget(_))
        ));
    }
}
