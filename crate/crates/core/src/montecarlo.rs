//! Stochastic cross-validation of the closed-form noise algebra, and
//! synthesis of spectrum-analyzer style traces with SNR extraction.
//!
//! Sampling uses ChaCha8, a counter-based stream cipher RNG, so results are
//! bit-reproducible across runs and platforms.  Work is split into
//! fixed-size chunks; chunk `i` draws from the stream seeded with
//! `seed ^ i`, so parallel execution cannot change the output.  All basis
//! variables are drawn for every sample index, which makes sample sets of
//! different forms over the same basis jointly consistent (usable for
//! covariance estimation).

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma, StandardNormal};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::noise::{LinearForm, NoiseBasis};

const CHUNK: usize = 1 << 14;

/// Samples of one observable, reproducible from `(seed, n, form, basis)`.
#[derive(Debug, Clone)]
pub struct SampleSet {
    pub values: Vec<f64>,
    pub seed: u64,
}

impl SampleSet {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Draw `n` joint samples of the basis variables and evaluate `form` on
/// each, plus its offset.
pub fn sample(form: &LinearForm, basis: &NoiseBasis, n: usize, seed: u64) -> Result<SampleSet> {
    if n == 0 {
        return Err(Error::Domain("sample count must be at least 1".into()));
    }
    // Validates basis membership.
    basis.variance(form)?;

    let sigmas: Vec<f64> = basis.entries().iter().map(|v| v.variance.sqrt()).collect();
    let mut coeffs = vec![0.0f64; sigmas.len()];
    for (id, c) in form.coefficients() {
        coeffs[id.index()] = c;
    }
    let offset = form.offset;

    let n_chunks = n.div_ceil(CHUNK);
    let chunks: Vec<Vec<f64>> = (0..n_chunks)
        .into_par_iter()
        .map(|chunk| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ chunk as u64);
            let len = CHUNK.min(n - chunk * CHUNK);
            let mut out = Vec::with_capacity(len);
            for _ in 0..len {
                let mut value = offset;
                for (sigma, c) in sigmas.iter().zip(&coeffs) {
                    let z: f64 = StandardNormal.sample(&mut rng);
                    value += c * sigma * z;
                }
                out.push(value);
            }
            out
        })
        .collect();

    let mut values = Vec::with_capacity(n);
    for chunk in chunks {
        values.extend(chunk);
    }
    Ok(SampleSet { values, seed })
}

#[derive(Debug, Clone, Copy)]
pub struct Moments {
    pub mean: f64,
    pub variance: f64,
}

/// Unbiased mean and variance estimators.
pub fn estimate_moments(s: &SampleSet) -> Result<Moments> {
    if s.len() < 2 {
        return Err(Error::Domain(
            "moment estimation needs at least 2 samples".into(),
        ));
    }
    let n = s.len() as f64;
    let mean = s.values.iter().sum::<f64>() / n;
    let variance = s.values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0);
    Ok(Moments { mean, variance })
}

/// Unbiased covariance of two jointly drawn sample sets (same basis, same
/// seed, same length).
pub fn estimate_covariance(s1: &SampleSet, s2: &SampleSet) -> Result<f64> {
    if s1.len() != s2.len() {
        return Err(Error::Domain(
            "covariance estimation needs matched sample lengths".into(),
        ));
    }
    if s1.len() < 2 {
        return Err(Error::Domain(
            "covariance estimation needs at least 2 samples".into(),
        ));
    }
    let n = s1.len() as f64;
    let m1 = s1.values.iter().sum::<f64>() / n;
    let m2 = s2.values.iter().sum::<f64>() / n;
    Ok(s1
        .values
        .iter()
        .zip(&s2.values)
        .map(|(a, b)| (a - m1) * (b - m2))
        .sum::<f64>()
        / (n - 1.0))
}

/// A synthetic spectrum-analyzer trace in dB relative to the shot-noise
/// limit.
#[derive(Debug, Clone)]
pub struct SpectrumTrace {
    pub frequencies: Vec<f64>,
    pub power_db: Vec<f64>,
    pub rbw: f64,
    pub vbw: f64,
    pub center: f64,
}

const TRACE_POINTS: usize = 501;

/// Synthesize a trace: a noise floor at `noise_variance` (shot-noise
/// units) with RBW-limited fluctuation smoothed by the video bandwidth,
/// plus a deterministic signal peak at `center` of height
/// `10 log10(1 + 4 alpha^2 / V)` above the floor.
///
/// The peak calibration matches the quadrature convention `X = 2 alpha +
/// dX`: the coherent power in one RBW bin is `4 alpha^2`, so SNR extraction
/// recovers `alpha^2 / V` based definitions up to the fixed factor 4, which
/// cancels in transfer-coefficient ratios.
pub fn synthesize_spectrum(
    noise_variance: f64,
    signal_alpha: f64,
    center: f64,
    span: f64,
    rbw: f64,
    vbw: f64,
    seed: u64,
) -> Result<SpectrumTrace> {
    if !(noise_variance > 0.0) {
        return Err(Error::Domain(format!(
            "noise variance must be positive, got {noise_variance}"
        )));
    }
    if !(span > 0.0) || !(rbw > 0.0) || !(vbw > 0.0) {
        return Err(Error::Domain(
            "span, rbw and vbw must all be positive".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // Video filtering averages ~rbw/vbw independent power readings per
    // displayed point; a Gamma(m)/m multiplier models the residual
    // fluctuation of that average around the true power.
    let m = (rbw / vbw).round().max(1.0);
    let gamma = Gamma::new(m, 1.0 / m)
        .map_err(|e| Error::Domain(format!("invalid RBW/VBW ratio: {e}")))?;

    let step = span / (TRACE_POINTS - 1) as f64;
    let start = center - span / 2.0;
    let frequencies: Vec<f64> = (0..TRACE_POINTS).map(|i| start + step * i as f64).collect();
    let mut power: Vec<f64> = (0..TRACE_POINTS)
        .map(|_| noise_variance * gamma.sample(&mut rng))
        .collect();

    // Residual display smoothing across bins, window capped at the trace
    // length.
    let window = (m as usize).clamp(1, TRACE_POINTS);
    let smoothed = moving_average(&power, window);
    power = smoothed;

    if signal_alpha != 0.0 {
        let peak_bin = nearest_bin(&frequencies, center);
        power[peak_bin] += 4.0 * signal_alpha * signal_alpha;
    }

    let power_db = power.iter().map(|p| 10.0 * p.log10()).collect();
    Ok(SpectrumTrace {
        frequencies,
        power_db,
        rbw,
        vbw,
        center,
    })
}

fn moving_average(values: &[f64], window: usize) -> Vec<f64> {
    let half = window / 2;
    (0..values.len())
        .map(|i| {
            let lo = i.saturating_sub(half);
            let hi = (i + half + 1).min(values.len());
            values[lo..hi].iter().sum::<f64>() / (hi - lo) as f64
        })
        .collect()
}

fn nearest_bin(frequencies: &[f64], f: f64) -> usize {
    frequencies
        .iter()
        .enumerate()
        .min_by(|(_, a), (_, b)| {
            (*a - f).abs().partial_cmp(&(*b - f).abs()).unwrap()
        })
        .map(|(i, _)| i)
        .unwrap()
}

/// Peak power at `center` over the mean of the noise at the two offset
/// frequencies, in linear units.
pub fn extract_snr(trace: &SpectrumTrace, center: f64, offsets: (f64, f64)) -> Result<f64> {
    let lo = trace.frequencies[0];
    let hi = *trace.frequencies.last().unwrap();
    for f in [center, offsets.0, offsets.1] {
        if f < lo || f > hi {
            return Err(Error::Domain(format!(
                "frequency {f} outside trace span [{lo}, {hi}]"
            )));
        }
    }
    let p = |f: f64| 10f64.powf(trace.power_db[nearest_bin(&trace.frequencies, f)] / 10.0);
    let noise = (p(offsets.0) + p(offsets.1)) / 2.0;
    Ok(p(center) / noise)
}
