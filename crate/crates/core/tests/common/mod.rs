#![allow(dead_code)]

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use relay_sinr::charcoef::InterferenceSpectrum;
use relay_sinr::specfun::{meijer_g_frac, meijer_g_ln, mellin_barnes_oracle, MeijerFamily};

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

/// Partial-fraction coefficients found the slow way: evaluate
/// `Π (1 + μ_l s)^{-τ_l}` and every basis term `(1 + μ_i s)^{-j}` at `L`
/// random rational points and solve the square system exactly over the
/// rationals. The means are taken at their exact binary values, so the
/// result is the true expansion of the given floats, however close two of
/// them are. Rows follow the spectrum's distinct means; row `i` has `τ_i`
/// entries, `j = 1..=τ_i`.
pub fn charcoef_oracle(spectrum: &InterferenceSpectrum, seed: u64) -> Vec<Vec<f64>> {
    let means: Vec<BigRational> = spectrum
        .distinct_means()
        .iter()
        .map(|&m| BigRational::from_float(m).expect("finite mean"))
        .collect();
    let taus = spectrum.multiplicities();
    let unknowns: usize = taus.iter().map(|&t| t as usize).sum();
    assert!((1..=12).contains(&unknowns), "oracle is limited to L <= 12");
    let mut r = rng(seed);
    for _attempt in 0..8 {
        let points: Vec<BigRational> = (0..unknowns)
            .map(|_| BigRational::new(BigInt::from(r.random_range(1..4000)), BigInt::from(1000)))
            .collect();
        let mut rows: Vec<Vec<BigRational>> = points
            .iter()
            .map(|s| {
                let mut row: Vec<BigRational> = (0..unknowns)
                    .map(|col| {
                        let (i, j) = locate(taus, col);
                        inv_pow(&(BigRational::one() + &means[i] * s), j as u32)
                    })
                    .collect();
                let target = means
                    .iter()
                    .zip(taus)
                    .map(|(m, &t)| inv_pow(&(BigRational::one() + m * s), t))
                    .fold(BigRational::one(), |acc, x| acc * x);
                row.push(target);
                row
            })
            .collect();
        if let Some(x) = solve_exact(&mut rows) {
            let mut out = Vec::with_capacity(means.len());
            let mut col = 0;
            for &t in taus {
                out.push(x[col..col + t as usize].iter().map(|q| q.to_f64().unwrap()).collect());
                col += t as usize;
            }
            return out;
        }
    }
    panic!("oracle system stayed singular after resampling");
}

fn inv_pow(x: &BigRational, n: u32) -> BigRational {
    num_traits::pow(x.recip(), n as usize)
}

/// Gauss-Jordan elimination on an augmented matrix; `None` if singular.
fn solve_exact(rows: &mut [Vec<BigRational>]) -> Option<Vec<BigRational>> {
    let n = rows.len();
    for c in 0..n {
        let p = (c..n).find(|&k| !rows[k][c].is_zero())?;
        rows.swap(c, p);
        let pivot = rows[c][c].clone();
        rows[c].iter_mut().for_each(|v| *v /= &pivot);
        let pivot_row = rows[c].clone();
        for (k, row) in rows.iter_mut().enumerate() {
            if k == c || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for (v, pv) in row.iter_mut().zip(&pivot_row) {
                *v -= &f * pv;
            }
        }
    }
    Some(rows.iter().map(|row| row[n].clone()).collect())
}

fn locate(taus: &[u32], col: usize) -> (usize, usize) {
    let mut c = col;
    for (i, &t) in taus.iter().enumerate() {
        if c < t as usize {
            return (i, c + 1);
        }
        c -= t as usize;
    }
    unreachable!()
}

/// Two-sided KS distance between sorted draws and a CDF.
pub fn ks_distance(sorted: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    let n = sorted.len() as f64;
    sorted
        .iter()
        .enumerate()
        .map(|(k, &x)| {
            let f = cdf(x);
            (f - k as f64 / n).abs().max((f - (k + 1) as f64 / n).abs())
        })
        .fold(0.0, f64::max)
}

/// `n` points evenly spaced in log between `lo` and `hi`.
pub fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let (a, b) = (lo.ln(), hi.ln());
    (0..n).map(|k| (a + (b - a) * k as f64 / (n - 1) as f64).exp()).collect()
}

/// Largest relative disagreement between the integral representations and
/// the contour integral over `n` random `(a, y)`; the contour returns the
/// signed value of the fraction family, which is negative.
pub fn meijer_vs_contour(n: usize, seed: u64) -> f64 {
    let mut r = rng(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..n {
        let a = r.random_range(1.0..12.0);
        let y = r.random_range((0.01f64).ln()..(50.0f64).ln()).exp();
        let ln = meijer_g_ln(a, y).unwrap();
        let ln_mb = mellin_barnes_oracle(MeijerFamily::Log, a, y).unwrap();
        let frac = meijer_g_frac(a, y).unwrap();
        let frac_mb = -mellin_barnes_oracle(MeijerFamily::Frac, a, y).unwrap();
        worst = worst.max((ln - ln_mb).abs() / ln_mb.abs());
        worst = worst.max((frac - frac_mb).abs() / frac_mb.abs());
    }
    worst
}

/// Whether `p` lies in the Wilson interval at quantile `z` of the fraction
/// of sorted draws at or below `x`.
pub fn within_wilson(sorted: &[f64], x: f64, p: f64, z: f64) -> bool {
    let count = sorted.partition_point(|&s| s <= x) as u64;
    let (lo, hi) = relay_sinr::oracle::wilson_interval(count, sorted.len() as u64, z);
    (lo..=hi).contains(&p)
}
