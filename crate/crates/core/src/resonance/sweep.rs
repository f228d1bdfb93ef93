//! Seeded sampling sweeps over frequency triples.
//!
//! Samples are drawn sequentially from a ChaCha stream, evaluated in parallel,
//! and reduced in sample order, so results do not depend on the thread count.

use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::*;
use crate::error::Result;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Log-uniform on `[lo, hi]`.
pub fn log_uniform<R: Rng>(rng: &mut R, lo: f64, hi: f64) -> f64 {
    (rng.gen_range(lo.ln()..=hi.ln())).exp()
}

fn random_sign<R: Rng>(rng: &mut R) -> f64 {
    if rng.gen::<bool>() {
        1.0
    } else {
        -1.0
    }
}

/// Uniform `(ξ1, ξ2) ∈ [-c, c]²` conditioned on `|ξ1 + ξ2| ≤ c`.
pub fn uniform_in_band<R: Rng>(rng: &mut R, cutoff: f64) -> FrequencyTriple {
    loop {
        let a = rng.gen_range(-cutoff..=cutoff);
        let b = rng.gen_range(-cutoff..=cutoff);
        let t = FrequencyTriple::new(a, b);
        if t.xi().abs() <= cutoff && !t.has_zero() {
            return t;
        }
    }
}

/// Entries with log-uniform magnitudes in `[lo, hi]` and random signs,
/// conditioned on `|ξ| ≤ hi` and all entries nonzero.
pub fn log_scale_in_band<R: Rng>(rng: &mut R, lo: f64, hi: f64) -> FrequencyTriple {
    loop {
        let a = random_sign(rng) * log_uniform(rng, lo, hi);
        let b = random_sign(rng) * log_uniform(rng, lo, hi);
        let t = FrequencyTriple::new(a, b);
        if t.xi().abs() <= hi && !t.has_zero() {
            return t;
        }
    }
}

/// One CSV row of a sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub regime: String,
    pub delta: f64,
    pub xi: f64,
    pub xi1: f64,
    pub xi2: f64,
    pub ratio: f64,
}

/// Writes rows with full precision (`{:.16e}`).
pub fn write_rows_csv(rows: &[SweepRow], path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["regime", "delta", "xi", "xi1", "xi2", "ratio"])?;
    for r in rows {
        w.write_record([
            r.regime.clone(),
            format!("{:.16e}", r.delta),
            format!("{:.16e}", r.xi),
            format!("{:.16e}", r.xi1),
            format!("{:.16e}", r.xi2),
            format!("{:.16e}", r.ratio),
        ])?;
    }
    w.flush().map_err(|e| crate::Error::io(path, e))?;
    Ok(())
}

fn max_in_order(values: impl IntoIterator<Item = f64>) -> f64 {
    values.into_iter().fold(0.0, f64::max)
}

fn rel(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / b.abs()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdentitySweep {
    pub samples: usize,
    /// max relative gap between `ξ³ - ξ1³ - ξ2³` and `3ξξ1ξ2`.
    pub max_rel_kdv: f64,
    /// max relative gap between `|Ξ_BO|` and `2 ξ_med ξ_min`.
    pub max_rel_bo: f64,
}

/// Triples with magnitudes log-uniform in `[1e-3, 1e3]` and random signs.
pub fn identity_sweep(samples: usize, seed: u64) -> IdentitySweep {
    let mut r = rng(seed);
    let triples: Vec<FrequencyTriple> = (0..samples)
        .map(|_| {
            let a = random_sign(&mut r) * log_uniform(&mut r, 1e-3, 1e3);
            let b = random_sign(&mut r) * log_uniform(&mut r, 1e-3, 1e3);
            FrequencyTriple::new(a, b)
        })
        .collect();
    let errs: Vec<(f64, f64)> = triples
        .par_iter()
        .map(|t| {
            let k = rel(xi_kdv(t), xi_kdv_factored(t));
            let [_, med, min] = t.ordered_magnitudes();
            let b = rel(xi_bo(t).abs(), 2.0 * med * min);
            (k, b)
        })
        .collect();
    IdentitySweep {
        samples,
        max_rel_kdv: max_in_order(errs.iter().map(|e| e.0)),
        max_rel_bo: max_in_order(errs.iter().map(|e| e.1)),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleSweep {
    pub samples: usize,
    /// Samples whose direct difference raised the cancellation warning.
    pub warnings: usize,
    /// Worst series-vs-direct relative gap over samples without a warning.
    pub max_rel_quiet: f64,
    /// Worst series-vs-[`xi_tilde`] relative gap over all samples.
    pub max_rel_stable: f64,
}

/// Uniform in-band triples, spread evenly over `deltas` (all positive).
pub fn series_direct_sweep(deltas: &[f64], samples: usize, seed: u64, tol: f64) -> Result<OracleSweep> {
    let mut r = rng(seed);
    let mut jobs = Vec::with_capacity(samples);
    for i in 0..samples {
        let delta = DepthParameter::new(deltas[i % deltas.len()])?;
        jobs.push((delta, uniform_in_band(&mut r, delta.cutoff())));
    }
    let out: Vec<Result<(bool, f64, f64)>> = jobs
        .par_iter()
        .map(|(delta, t)| {
            let s = xi_tilde_series(*delta, t, tol)?.value;
            let d = xi_tilde_direct(*delta, t);
            Ok((d.cancellation_warning, rel(s, d.value), rel(s, xi_tilde(*delta, t))))
        })
        .collect();
    let mut sweep = OracleSweep {
        samples,
        warnings: 0,
        max_rel_quiet: 0.0,
        max_rel_stable: 0.0,
    };
    for o in out {
        let (warn, quiet, stable) = o?;
        if warn {
            sweep.warnings += 1;
        } else {
            sweep.max_rel_quiet = sweep.max_rel_quiet.max(quiet);
        }
        sweep.max_rel_stable = sweep.max_rel_stable.max(stable);
    }
    Ok(sweep)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Bx5Sweep {
    pub samples: usize,
    pub sup: f64,
    pub argmax_delta: f64,
    pub argmax_k: u64,
    pub argmax_triple: FrequencyTriple,
}

/// `δ` log-uniform in `[1e-3, 1]`, `k` log-uniform in `[1, 1e4]`; entries are
/// uniform in the band for half the samples and log-uniform in magnitude
/// (down to `1e-8/δ`) for the rest.
pub fn bx5_sweep(samples: usize, seed: u64) -> Result<Bx5Sweep> {
    let mut r = rng(seed);
    let mut jobs = Vec::with_capacity(samples);
    for i in 0..samples {
        let delta = DepthParameter::new(log_uniform(&mut r, 1e-3, 1.0))?;
        let k = log_uniform(&mut r, 1.0, 1e4).floor() as u64;
        let c = delta.cutoff();
        let t = if i % 2 == 0 {
            uniform_in_band(&mut r, c)
        } else {
            log_scale_in_band(&mut r, 1e-8 * c, c)
        };
        jobs.push((delta, k.max(1), t));
    }
    let vals: Vec<Result<f64>> = jobs.par_iter().map(|(d, k, t)| bx5_bound(*d, t, *k)).collect();
    let mut best = (f64::NEG_INFINITY, 0);
    for (i, v) in vals.into_iter().enumerate() {
        let v = v?;
        if v > best.0 {
            best = (v, i);
        }
    }
    let (d, k, t) = jobs[best.1];
    Ok(Bx5Sweep {
        samples,
        sup: best.0,
        argmax_delta: d.value(),
        argmax_k: k,
        argmax_triple: t,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RatioRange {
    pub count: usize,
    pub min: f64,
    pub max: f64,
}

impl RatioRange {
    fn from_values(values: &[f64]) -> Self {
        Self {
            count: values.len(),
            min: values.iter().copied().fold(f64::INFINITY, f64::min),
            max: values.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        }
    }

    /// `C / c`.
    pub fn spread(&self) -> f64 {
        self.max / self.min
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparabilityAtDepth {
    pub delta: f64,
    pub low: RatioRange,
    pub high: RatioRange,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparabilitySweep {
    pub per_delta: Vec<ComparabilityAtDepth>,
    #[serde(skip)]
    pub rows: Vec<SweepRow>,
}

impl ComparabilitySweep {
    /// Largest relative deviation of the per-depth endpoints from their mean,
    /// for the low band (`high = false`) or the high band.
    pub fn endpoint_variation(&self, high: bool) -> f64 {
        let pick = |c: &ComparabilityAtDepth| if high { c.high } else { c.low };
        let n = self.per_delta.len() as f64;
        let mean_min = self.per_delta.iter().map(|c| pick(c).min).sum::<f64>() / n;
        let mean_max = self.per_delta.iter().map(|c| pick(c).max).sum::<f64>() / n;
        self.per_delta
            .iter()
            .map(|c| {
                let r = pick(c);
                ((r.min - mean_min) / mean_min).abs().max(((r.max - mean_max) / mean_max).abs())
            })
            .fold(0.0, f64::max)
    }

    pub fn worst_spread(&self, high: bool) -> f64 {
        self.per_delta
            .iter()
            .map(|c| if high { c.high.spread() } else { c.low.spread() })
            .fold(0.0, f64::max)
    }
}

fn low_band_sample<R: Rng>(rng: &mut R, i: usize, cutoff: f64) -> FrequencyTriple {
    if i % 2 == 0 {
        uniform_in_band(rng, cutoff)
    } else {
        log_scale_in_band(rng, 1e-4 * cutoff, cutoff)
    }
}

fn high_band_sample<R: Rng>(rng: &mut R, cutoff: f64) -> FrequencyTriple {
    loop {
        let a = random_sign(rng) * log_uniform(rng, 1e-3 * cutoff, 1e3 * cutoff);
        let b = random_sign(rng) * log_uniform(rng, 1e-3 * cutoff, 1e3 * cutoff);
        let t = FrequencyTriple::new(a, b);
        if !t.has_zero() && t.ordered_magnitudes()[0] >= HIGH_BAND_FACTOR * cutoff {
            return t;
        }
    }
}

/// For each `δ`, `per_delta` low-band and `per_delta` high-band samples.
/// Sampling is relative to `1/δ`, so only the sampled points change with δ.
pub fn comparability_sweep(deltas: &[f64], per_delta: usize, seed: u64, keep_rows: bool) -> Result<ComparabilitySweep> {
    let mut r = rng(seed);
    let mut per = Vec::with_capacity(deltas.len());
    let mut rows = Vec::new();
    for &dv in deltas {
        let delta = DepthParameter::new(dv)?;
        if delta.is_kdv() {
            return Err(Error::Parameter("comparability sweep needs delta > 0".into()));
        }
        let c = delta.cutoff();
        let mut triples: Vec<FrequencyTriple> = (0..per_delta).map(|i| low_band_sample(&mut r, i, c)).collect();
        triples.extend((0..per_delta).map(|_| high_band_sample(&mut r, c)));
        let ratios: Vec<Result<ComparabilityRatio>> =
            triples.par_iter().map(|t| lemma22_ratio(delta, t)).collect();
        let mut low = Vec::with_capacity(per_delta);
        let mut high = Vec::with_capacity(per_delta);
        for (t, res) in triples.iter().zip(ratios) {
            let cr = res?;
            match cr.regime {
                Regime::LowBand => low.push(cr.ratio),
                Regime::HighBand => high.push(cr.ratio),
                Regime::Mixed => {}
            }
            if keep_rows {
                rows.push(SweepRow {
                    regime: cr.regime.as_str().to_string(),
                    delta: dv,
                    xi: t.xi(),
                    xi1: t.xi1(),
                    xi2: t.xi2(),
                    ratio: cr.ratio,
                });
            }
        }
        per.push(ComparabilityAtDepth {
            delta: dv,
            low: RatioRange::from_values(&low),
            high: RatioRange::from_values(&high),
        });
    }
    Ok(ComparabilitySweep { per_delta: per, rows })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JacobianAtDepth {
    pub delta: f64,
    pub samples: usize,
    pub sign_mismatches: usize,
    pub max_rel_fd: f64,
    /// `min |∂μ| / ξ²` over samples with `|ξ - 2ξ1| ≥ |ξ|/2`.
    pub lower_constant: f64,
}

/// Relative finite-difference step.
pub const JACOBIAN_FD_STEP: f64 = 1e-3;

/// In-band samples `(ξ, ξ1)` with `|ξ|, |ξ1|, |ξ - ξ1| ≤ 1/δ`.
pub fn jacobian_sweep(deltas: &[f64], per_delta: usize, seed: u64) -> Result<Vec<JacobianAtDepth>> {
    let mut r = rng(seed);
    let mut out = Vec::with_capacity(deltas.len());
    for &dv in deltas {
        let delta = DepthParameter::new(dv)?;
        let c = delta.cutoff();
        let triples: Vec<FrequencyTriple> = (0..per_delta).map(|_| uniform_in_band(&mut r, c)).collect();
        let res: Vec<(bool, f64, Option<f64>)> = triples
            .par_iter()
            .map(|t| {
                let (xi, xi1) = (t.xi(), t.xi1());
                let j = jacobian_mu(delta, xi, xi1);
                let lever = xi * (xi - 2.0 * xi1);
                let sign_ok = j.signum() == lever.signum() || (j == 0.0 && lever == 0.0);
                let h = JACOBIAN_FD_STEP * t.ordered_magnitudes()[0];
                let fd = jacobian_mu_fd(delta, xi, xi1, h);
                let lower = if (xi - 2.0 * xi1).abs() >= 0.5 * xi.abs() {
                    Some(j.abs() / (xi * xi))
                } else {
                    None
                };
                (sign_ok, rel(fd, j), lower)
            })
            .collect();
        out.push(JacobianAtDepth {
            delta: dv,
            samples: per_delta,
            sign_mismatches: res.iter().filter(|r| !r.0).count(),
            max_rel_fd: max_in_order(res.iter().map(|r| r.1)),
            lower_constant: res.iter().filter_map(|r| r.2).fold(f64::INFINITY, f64::min),
        });
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GapSweep {
    pub samples: usize,
    /// Samples where the gap exceeded `3δ²ξ_max⁵`.
    pub violations: usize,
    /// Largest gap / bound ratio seen.
    pub max_ratio: f64,
}

/// `δ` log-uniform in `[1e-4, 1]`, triples in the band with log-uniform magnitudes.
pub fn gap_sweep(samples: usize, seed: u64) -> Result<GapSweep> {
    let mut r = rng(seed);
    let mut jobs = Vec::with_capacity(samples);
    for _ in 0..samples {
        let delta = DepthParameter::new(log_uniform(&mut r, 1e-4, 1.0))?;
        let c = delta.cutoff();
        jobs.push((delta, log_scale_in_band(&mut r, 1e-6 * c, c)));
    }
    let ratios: Vec<f64> = jobs
        .par_iter()
        .map(|(d, t)| kdv_resonance_gap(*d, t) / kdv_resonance_gap_bound(*d, t))
        .collect();
    Ok(GapSweep {
        samples,
        violations: ratios.iter().filter(|&&q| q > 1.0).count(),
        max_ratio: max_in_order(ratios),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_sweep_small() {
        let s = identity_sweep(2000, 1);
        assert!(s.max_rel_kdv < 1e-12 && s.max_rel_bo < 1e-12, "{s:?}");
    }

    #[test]
    fn sweeps_are_reproducible() {
        let a = comparability_sweep(&[0.5, 0.25], 500, 9, true).unwrap();
        let b = comparability_sweep(&[0.5, 0.25], 500, 9, true).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.rows, b.rows);
    }

    #[test]
    fn rows_round_trip_through_csv() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("rows.csv");
        let s = comparability_sweep(&[0.5], 50, 3, true).unwrap();
        write_rows_csv(&s.rows, &path).unwrap();
        let mut rd = csv::Reader::from_path(&path).unwrap();
        let back: Vec<SweepRow> = rd.deserialize().map(|r| r.unwrap()).collect();
        assert_eq!(back, s.rows);
    }
}
