//! Characteristic coefficients of a diagonal mean-INR matrix and the
//! density of `U = 1 + Σ_l E_l`, `E_l ~ Exp(λ_l)` independent.
//!
//! With distinct means `μ_1 > … > μ_K` of multiplicities `τ_i`,
//!
//! ```text
//! Π_l (1 + λ_l s)^{-1} = Σ_i Σ_{j=1}^{τ_i} X_{i,j} (1 + μ_i s)^{-j}
//! ```
//!
//! and inverting term by term gives
//! `f_U(u) = Σ X_{i,j} (u-1)^{j-1} e^{-(u-1)/μ_i} / (Γ(j) μ_i^j)`.

use crate::ddouble::DoubleDouble;
use crate::error::{domain, Error, Result};
use crate::specfun::ln_gamma;

/// Default relative tolerance under which two means are treated as equal.
pub const DEFAULT_GROUP_TOL: f64 = 1e-9;

const MAX_GROUP_TOL: f64 = 1e-6;
// Coefficients beyond this magnitude cancel away every significant digit
// of an f64 density evaluation.
const MAX_COEFF: f64 = 1e13;

/// Distinct mean INRs, strictly decreasing, with their multiplicities.
#[derive(Debug, Clone, PartialEq)]
pub struct InterferenceSpectrum {
    distinct_means: Vec<f64>,
    multiplicities: Vec<u32>,
    rel_tol: f64,
}

impl InterferenceSpectrum {
    /// Builds a spectrum from already-grouped values.
    pub fn new(distinct_means: Vec<f64>, multiplicities: Vec<u32>) -> Result<Self> {
        if distinct_means.len() != multiplicities.len() {
            return Err(Error::InvalidConfig(
                "means and multiplicities differ in length".into(),
            ));
        }
        if let Some(&m) = distinct_means.iter().find(|m| !(**m > 0.0) || !m.is_finite()) {
            return Err(Error::InvalidConfig(format!("mean INR {m} is not positive")));
        }
        if multiplicities.contains(&0) {
            return Err(Error::InvalidConfig("zero multiplicity".into()));
        }
        if distinct_means.windows(2).any(|w| w[0] <= w[1]) {
            return Err(Error::InvalidConfig(
                "distinct means must be strictly decreasing".into(),
            ));
        }
        Ok(Self {
            distinct_means,
            multiplicities,
            rel_tol: DEFAULT_GROUP_TOL,
        })
    }

    /// The spectrum of no interferers.
    pub fn empty() -> Self {
        Self {
            distinct_means: Vec::new(),
            multiplicities: Vec::new(),
            rel_tol: DEFAULT_GROUP_TOL,
        }
    }

    /// `count` interferers of identical mean.
    pub fn iid(count: u32, mean: f64) -> Result<Self> {
        if count == 0 {
            return Ok(Self::empty());
        }
        Self::new(vec![mean], vec![count])
    }

    pub fn distinct_means(&self) -> &[f64] {
        &self.distinct_means
    }

    pub fn multiplicities(&self) -> &[u32] {
        &self.multiplicities
    }

    /// Number of distinct means.
    pub fn distinct_len(&self) -> usize {
        self.distinct_means.len()
    }

    /// Total number of interferers `L`.
    pub fn total(&self) -> u64 {
        self.multiplicities.iter().map(|&t| u64::from(t)).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.distinct_means.is_empty()
    }

    /// `E[U - 1]`, the mean aggregate INR.
    pub fn aggregate_mean(&self) -> f64 {
        self.distinct_means
            .iter()
            .zip(&self.multiplicities)
            .map(|(&m, &t)| m * f64::from(t))
            .sum()
    }

    /// Multiplies every mean by `factor > 0`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        if !(factor > 0.0) || !factor.is_finite() {
            return Err(Error::InvalidConfig(format!("scale factor {factor}")));
        }
        let mut out = self.clone();
        for m in &mut out.distinct_means {
            *m *= factor;
        }
        Ok(out)
    }
}

/// Sorts `mean_inrs` decreasingly and merges runs whose relative spread is
/// within `rel_tol` into their average.
pub fn group_spectrum(mean_inrs: &[f64], rel_tol: f64) -> Result<InterferenceSpectrum> {
    if !(0.0..=MAX_GROUP_TOL).contains(&rel_tol) {
        return Err(Error::InvalidConfig(format!(
            "grouping tolerance {rel_tol} outside [0, {MAX_GROUP_TOL}]"
        )));
    }
    if let Some(&m) = mean_inrs.iter().find(|m| !(**m > 0.0) || !m.is_finite()) {
        return Err(Error::InvalidConfig(format!("mean INR {m} is not positive")));
    }
    let mut sorted = mean_inrs.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));

    let mut distinct: Vec<f64> = Vec::new();
    let mut multiplicities: Vec<u32> = Vec::new();
    let mut run: Vec<f64> = Vec::new();
    let mut flush = |run: &mut Vec<f64>| {
        if !run.is_empty() {
            distinct.push(run.iter().sum::<f64>() / run.len() as f64);
            multiplicities.push(run.len() as u32);
            run.clear();
        }
    };
    for m in sorted {
        match run.first() {
            Some(&lead) if (lead - m) <= rel_tol * lead => run.push(m),
            _ => {
                flush(&mut run);
                run.push(m);
            }
        }
    }
    flush(&mut run);

    Ok(InterferenceSpectrum {
        distinct_means: distinct,
        multiplicities,
        rel_tol,
    })
}

/// The coefficients `X_{i,j}`, `j = 1..=τ_i`, for each distinct mean `i`.
#[derive(Debug, Clone, PartialEq)]
pub struct CharCoeffTable {
    coeffs: Vec<Vec<f64>>,
}

impl CharCoeffTable {
    /// `X_{i,j}` with one-based `j`.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.coeffs[i][j - 1]
    }

    /// Row `i`, indexed by `j - 1`.
    pub fn row(&self, i: usize) -> &[f64] {
        &self.coeffs[i]
    }

    pub fn rows(&self) -> usize {
        self.coeffs.len()
    }

    /// Sum of all coefficients; one up to rounding.
    pub fn sum(&self) -> f64 {
        self.coeffs.iter().flatten().sum()
    }

    /// Largest coefficient magnitude, a measure of cancellation in the
    /// partial-fraction sum.
    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().flatten().fold(0.0, |m, x| m.max(x.abs()))
    }
}

/// Partial-fraction coefficients, computed per distinct mean from the power
/// series of `h_i(x) = Π_{l≠i} (d_l + (μ_l/μ_i) x)^{-τ_l}` in double-double
/// arithmetic via its logarithmic derivative.
pub fn characteristic_coefficients(spectrum: &InterferenceSpectrum) -> Result<CharCoeffTable> {
    if spectrum.is_empty() {
        return Err(Error::InvalidConfig(
            "characteristic coefficients of an empty spectrum".into(),
        ));
    }
    let means = &spectrum.distinct_means;
    let taus = &spectrum.multiplicities;
    let floor = spectrum.rel_tol.max(DEFAULT_GROUP_TOL);
    for w in means.windows(2) {
        if (w[0] - w[1]) <= floor * w[0] {
            return Err(Error::IllConditioned(format!(
                "means {} and {} are closer than the grouping tolerance",
                w[0], w[1]
            )));
        }
    }

    let mut coeffs = Vec::with_capacity(means.len());
    for (i, (&mu_i, &tau_i)) in means.iter().zip(taus).enumerate() {
        let order = tau_i as usize;
        let mut row = vec![0.0; order];
        if means.len() == 1 {
            row[order - 1] = 1.0;
            coeffs.push(row);
            continue;
        }

        let mu_i_dd = DoubleDouble::from_f64(mu_i);
        // b_0 = Π d_l^{-τ_l}; c_l = μ_l / (μ_i - μ_l)
        let mut b0 = DoubleDouble::ONE;
        let mut neg_c = Vec::with_capacity(means.len() - 1);
        for (l, (&mu_l, &tau_l)) in means.iter().zip(taus).enumerate() {
            if l == i {
                continue;
            }
            let gap = DoubleDouble::diff(mu_i, mu_l);
            let d = gap / mu_i_dd;
            b0 = b0 / d.powi(tau_l);
            neg_c.push((-(DoubleDouble::from_f64(mu_l) / gap), f64::from(tau_l)));
        }

        // m a_m = Σ_l τ_l (-c_l)^m
        let mut m_a = Vec::with_capacity(order);
        let mut powers: Vec<DoubleDouble> = neg_c.iter().map(|_| DoubleDouble::ONE).collect();
        for _ in 1..order {
            let mut acc = DoubleDouble::ZERO;
            for (p, &(nc, tau)) in powers.iter_mut().zip(&neg_c) {
                *p = *p * nc;
                acc = acc + p.scale(tau);
            }
            m_a.push(acc);
        }

        let mut b = Vec::with_capacity(order);
        b.push(b0);
        for k in 1..order {
            let mut acc = DoubleDouble::ZERO;
            for m in 1..=k {
                acc = acc + m_a[m - 1] * b[k - m];
            }
            b.push(acc.scale(1.0 / k as f64));
        }
        for (k, bk) in b.iter().enumerate() {
            row[order - 1 - k] = bk.to_f64();
        }
        coeffs.push(row);
    }

    let table = CharCoeffTable { coeffs };
    let worst = table.max_abs();
    if !worst.is_finite() || worst > MAX_COEFF {
        return Err(Error::IllConditioned(format!(
            "coefficient magnitude {worst:e} leaves no significant digits"
        )));
    }
    Ok(table)
}

/// `1 + Σ E_l` as a spectrum with its coefficient table.
#[derive(Debug, Clone, PartialEq)]
pub struct ShiftedSum {
    spectrum: InterferenceSpectrum,
    table: CharCoeffTable,
}

/// One nonzero partial-fraction term `X (u-1)^{j-1} e^{-(u-1)/μ} / (Γ(j) μ^j)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Term {
    pub mean: f64,
    pub order: u32,
    pub coeff: f64,
}

impl ShiftedSum {
    /// Groups `mean_inrs` at [`DEFAULT_GROUP_TOL`]. Fails on an empty list.
    pub fn from_means(mean_inrs: &[f64]) -> Result<Self> {
        Self::from_spectrum(group_spectrum(mean_inrs, DEFAULT_GROUP_TOL)?)
    }

    pub fn from_spectrum(spectrum: InterferenceSpectrum) -> Result<Self> {
        let table = characteristic_coefficients(&spectrum)?;
        Ok(Self { spectrum, table })
    }

    pub fn spectrum(&self) -> &InterferenceSpectrum {
        &self.spectrum
    }

    pub fn table(&self) -> &CharCoeffTable {
        &self.table
    }

    /// The nonzero terms of the mixture.
    pub fn terms(&self) -> impl Iterator<Item = Term> + '_ {
        self.spectrum
            .distinct_means
            .iter()
            .enumerate()
            .flat_map(move |(i, &mean)| {
                self.table.row(i).iter().enumerate().filter_map(move |(j, &coeff)| {
                    (coeff != 0.0).then_some(Term {
                        mean,
                        order: j as u32 + 1,
                        coeff,
                    })
                })
            })
    }

    /// `E[U]`.
    pub fn mean(&self) -> f64 {
        1.0 + self.spectrum.aggregate_mean()
    }

    /// Density of `U` at `u >= 1`.
    pub fn pdf(&self, u: f64) -> Result<f64> {
        shifted_sum_pdf(u, &self.spectrum, &self.table)
    }

    /// `P(U <= u)`.
    pub fn cdf(&self, u: f64) -> Result<f64> {
        if !(u >= 1.0) {
            return if u < 1.0 { Ok(0.0) } else { Err(domain("ShiftedSum::cdf", u)) };
        }
        let x = u - 1.0;
        let mut acc = 0.0;
        for t in self.terms() {
            acc += t.coeff * erlang_cdf(t.order, x / t.mean);
        }
        Ok(acc)
    }
}

/// `P(j, x)` for integer shape: `1 - e^{-x} Σ_{n<j} x^n / n!`.
fn erlang_cdf(order: u32, x: f64) -> f64 {
    if x == 0.0 {
        return 0.0;
    }
    let j = f64::from(order);
    if x < j {
        // lower series: e^{-x} Σ_{n>=j} x^n / n!
        let mut term = (j * x.ln() - x - ln_gamma(j + 1.0)).exp();
        let mut acc = term;
        let mut n = j;
        while term > 1e-17 * acc {
            n += 1.0;
            term *= x / n;
            acc += term;
        }
        acc
    } else {
        // upper sum taken from the top term downwards
        let mut term = ((j - 1.0) * x.ln() - x - ln_gamma(j)).exp();
        let mut acc = term;
        let mut n = j - 1.0;
        while n > 0.0 && term > 1e-17 * acc {
            term *= n / x;
            acc += term;
            n -= 1.0;
        }
        1.0 - acc
    }
}

/// `Σ X_{i,j} (u-1)^{j-1} e^{-(u-1)/μ_i} / (Γ(j) μ_i^j)`.
pub fn shifted_sum_pdf(u: f64, spectrum: &InterferenceSpectrum, table: &CharCoeffTable) -> Result<f64> {
    if spectrum.is_empty() {
        return Err(Error::PointMass);
    }
    if !(u >= 1.0) || !u.is_finite() {
        return Err(domain("shifted_sum_pdf", u));
    }
    let x = u - 1.0;
    let mut acc = 0.0;
    for (i, &mu) in spectrum.distinct_means.iter().enumerate() {
        for (jm1, &coeff) in table.row(i).iter().enumerate() {
            if coeff == 0.0 {
                continue;
            }
            let j = jm1 as f64 + 1.0;
            let density = if jm1 == 0 {
                (-x / mu).exp() / mu
            } else if x == 0.0 {
                0.0
            } else {
                ((j - 1.0) * x.ln() - x / mu - ln_gamma(j) - j * mu.ln()).exp()
            };
            acc += coeff * density;
        }
    }
    Ok(acc)
}
