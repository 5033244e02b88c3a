//! Ground truth for the toy problem: maxg@k of the Gaussian policy by adaptive
//! Gauss-Kronrod quadrature, and its theta-gradient by central differences.
//!
//! With reward `Y = g(X)` supported on `[0, 1]`,
//! `E[max of k] = int_0^1 P(max > t) dt = int_0^1 (1 - G(t)^k) dt` where
//! `1 - G(t) = P(sqrt(t) < X <= 1)`. Substituting `t = u^2` removes the
//! square-root kink at the origin:
//! `int_0^1 2u (1 - (1 - P(u < X <= 1))^k) du`.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use statrs::function::erf::erfc;

use crate::error::{Error, Result};

pub const DEFAULT_FD_STEP: f64 = 1e-4;
pub const DEFAULT_TOL: f64 = 1e-12;
const MAX_INTERVALS: usize = 20_000;

/// `E[max(g(X_1), ..., g(X_k))]` for `X_i ~ N(theta, sigma^2)` i.i.d.
pub fn true_maxg_quadrature(theta: f64, sigma: f64, k: usize, tol: f64) -> Result<f64> {
    check_args(theta, sigma, k)?;
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::Domain(format!(
            "tolerance must be positive, got {tol}"
        )));
    }
    let top = (1.0 - theta) / sigma;
    let (top_upper, top_lower) = (upper_tail(top), lower_tail(top));
    let kf = k as f64;
    let integrand = |u: f64| {
        // P(u < X <= 1), differenced on whichever tail keeps precision
        let z = (u - theta) / sigma;
        let p = if z > 0.0 {
            upper_tail(z) - top_upper
        } else {
            top_lower - lower_tail(z)
        };
        let p = p.clamp(0.0, 1.0);
        // 1 - (1 - p)^k
        let hit = -(kf * (-p).ln_1p()).exp_m1();
        2.0 * u * hit
    };

    let mut cuts = vec![0.0, 1.0];
    for m in [-6.0, -3.0, 0.0, 3.0, 6.0] {
        let c = theta + m * sigma;
        if c > 0.0 && c < 1.0 {
            cuts.push(c);
        }
    }
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    adaptive_gauss_kronrod(integrand, &cuts, tol)
}

/// Central difference `(Q(theta + h) - Q(theta - h)) / 2h` of [`true_maxg_quadrature`].
pub fn true_grad_fd(theta: f64, sigma: f64, k: usize, h: f64, tol: f64) -> Result<f64> {
    if h.is_nan() || h <= 0.0 {
        return Err(Error::Domain(format!(
            "finite-difference step must be positive, got {h}"
        )));
    }
    let hi = true_maxg_quadrature(theta + h, sigma, k, tol)?;
    let lo = true_maxg_quadrature(theta - h, sigma, k, tol)?;
    Ok((hi - lo) / (2.0 * h))
}

fn check_args(theta: f64, sigma: f64, k: usize) -> Result<()> {
    if k == 0 {
        return Err(Error::ZeroK);
    }
    if !theta.is_finite() {
        return Err(Error::Domain(format!("theta must be finite, got {theta}")));
    }
    if !(sigma > 0.0 && sigma.is_finite()) {
        return Err(Error::Domain(format!(
            "sigma must be positive, got {sigma}"
        )));
    }
    Ok(())
}

fn lower_tail(z: f64) -> f64 {
    0.5 * erfc(-z / std::f64::consts::SQRT_2)
}

fn upper_tail(z: f64) -> f64 {
    0.5 * erfc(z / std::f64::consts::SQRT_2)
}

// 15-point Kronrod abscissae (non-negative half) and weights; the 7-point Gauss
// rule uses the odd-indexed abscissae.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

#[derive(Debug, Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    value: f64,
    err: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.err == other.err
    }
}

impl Eq for Segment {}

impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.err.total_cmp(&other.err)
    }
}

fn kronrod_segment(f: &impl Fn(f64) -> f64, a: f64, b: f64) -> Segment {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for j in 0..7 {
        let dx = half * XGK[j];
        let pair = f(center - dx) + f(center + dx);
        kronrod += WGK[j] * pair;
        if j % 2 == 1 {
            gauss += WG[j / 2] * pair;
        }
    }
    Segment {
        a,
        b,
        value: kronrod * half,
        err: ((kronrod - gauss) * half).abs(),
    }
}

/// Globally adaptive G7-K15 over the segments delimited by `cuts`, bisecting the
/// segment with the largest error estimate until the summed estimate is `<= tol`.
pub(crate) fn adaptive_gauss_kronrod(
    f: impl Fn(f64) -> f64,
    cuts: &[f64],
    tol: f64,
) -> Result<f64> {
    let mut heap: BinaryHeap<Segment> = cuts
        .windows(2)
        .map(|w| kronrod_segment(&f, w[0], w[1]))
        .collect();
    loop {
        let err: f64 = heap.iter().map(|s| s.err).sum();
        if err <= tol {
            return Ok(heap.iter().map(|s| s.value).sum());
        }
        if heap.len() >= MAX_INTERVALS {
            return Err(Error::Quadrature {
                tol,
                err,
                intervals: heap.len(),
            });
        }
        let worst = heap.pop().expect("at least one segment");
        let mid = 0.5 * (worst.a + worst.b);
        heap.push(kronrod_segment(&f, worst.a, mid));
        heap.push(kronrod_segment(&f, mid, worst.b));
    }
}
