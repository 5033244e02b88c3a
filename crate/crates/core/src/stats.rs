//! Small summary statistics used by the experiments.

/// Sample variance (n - 1 denominator) and the standard error of that estimate,
/// taken as the standard deviation of the squared deviations over `sqrt(n)`.
pub fn variance_with_stderr(xs: &[f64]) -> (f64, f64) {
    let n = xs.len();
    if n < 2 {
        return (0.0, 0.0);
    }
    let m = mean(xs);
    let sq: Vec<f64> = xs.iter().map(|x| (x - m) * (x - m)).collect();
    let variance = sq.iter().sum::<f64>() / (n - 1) as f64;
    let sq_mean = mean(&sq);
    let spread = sq
        .iter()
        .map(|d| (d - sq_mean) * (d - sq_mean))
        .sum::<f64>()
        / (n - 1) as f64;
    (variance, (spread / n as f64).sqrt())
}

/// Sample mean and its standard error.
pub fn mean_with_stderr(xs: &[f64]) -> (f64, f64) {
    let n = xs.len();
    let m = mean(xs);
    if n < 2 {
        return (m, 0.0);
    }
    let var = xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (n - 1) as f64;
    (m, (var / n as f64).sqrt())
}

pub fn mean(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        0.0
    } else {
        xs.iter().sum::<f64>() / xs.len() as f64
    }
}
