//! Monte Carlo estimates of how often generic class members are reachable
//! or convertible.
//!
//! Every sample draws from its own ChaCha stream selected by the sample
//! index, so results do not depend on thread scheduling.

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analysis::{is_convertible, is_reachable, SearchConfig};
use crate::error::{Error, Result};
use crate::linalg::{matrix_sqrt_psd, proportional, LocalOperator, ProductOperator};
use crate::scalar::{Real, Tolerances};
use crate::seed::StabilizerGroup;

/// Largest accepted condition number of a sampled factor.
pub const MAX_CONDITION: f64 = 1e6;
/// Resampling attempts per factor before giving up.
pub const MAX_ATTEMPTS: usize = 100;
/// Two-sided 95% normal quantile.
pub const Z_95: f64 = 1.959963984540054;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampleConfig {
    pub n_samples: usize,
    pub rng_seed: u64,
    pub tol: f64,
    pub nz_threshold: f64,
    pub party_dims: Vec<usize>,
}

impl SampleConfig {
    pub fn new(party_dims: Vec<usize>, n_samples: usize, rng_seed: u64) -> Self {
        Self {
            n_samples,
            rng_seed,
            tol: Tolerances::<f64>::DEFAULT_EQ,
            nz_threshold: Tolerances::<f64>::DEFAULT_NONZERO,
            party_dims,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_samples == 0 {
            return Err(Error::ParameterOutOfRange("n_samples must be at least 1".into()));
        }
        if !(self.tol > 0.0 && self.nz_threshold > 0.0 && self.tol < self.nz_threshold) {
            return Err(Error::ParameterOutOfRange(format!(
                "need 0 < tol < nz_threshold, got tol = {}, nz_threshold = {}",
                self.tol, self.nz_threshold
            )));
        }
        if self.party_dims.len() < 2 || self.party_dims.iter().any(|&d| d < 2) {
            return Err(Error::ParameterOutOfRange("need at least two parties of dimension >= 2".into()));
        }
        Ok(())
    }

    pub fn tolerances<T: Real>(&self) -> Tolerances<T> {
        Tolerances::new(T::lit(self.tol), T::lit(self.nz_threshold))
    }
}

/// The RNG for sample `index`: stream `index` of a ChaCha8 generator seeded
/// with `seed`.
pub fn sample_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Matrix with i.i.d. standard complex Gaussian entries `(a + ib)/√2`.
pub fn ginibre<T: Real, R: Rng + ?Sized>(d: usize, rng: &mut R) -> LocalOperator<T> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    LocalOperator::from_fn(d, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        Complex::new(T::lit(re * s), T::lit(im * s))
    })
}

/// A Ginibre factor with condition number at most [`MAX_CONDITION`],
/// rescaled so that `tr(g†g) = 1`.
pub fn sample_local_operator<T: Real, R: Rng + ?Sized>(d: usize, rng: &mut R) -> Result<LocalOperator<T>> {
    for _ in 0..MAX_ATTEMPTS {
        let g = ginibre::<T, R>(d, rng);
        if g.condition_number() <= T::lit(MAX_CONDITION) {
            return Ok(g.trace_normalized_factor());
        }
    }
    Err(Error::SamplingFailed(format!("no well-conditioned {d}x{d} factor after {MAX_ATTEMPTS} attempts")))
}

pub fn sample_product_operator<T: Real, R: Rng + ?Sized>(
    party_dims: &[usize],
    rng: &mut R,
) -> Result<ProductOperator<T>> {
    if party_dims.iter().any(|&d| d < 2) {
        return Err(Error::ParameterOutOfRange("party dimensions must be at least 2".into()));
    }
    let factors = party_dims.iter().map(|&d| sample_local_operator(d, rng)).collect::<Result<Vec<_>>>()?;
    ProductOperator::new(factors)
}

/// Haar-random unitary from Gram-Schmidt on Ginibre columns.
pub fn random_unitary<T: Real, R: Rng + ?Sized>(d: usize, rng: &mut R) -> LocalOperator<T> {
    let g = ginibre::<T, R>(d, rng);
    let mut cols: Vec<Vec<Complex<T>>> = Vec::with_capacity(d);
    for c in 0..d {
        let mut v: Vec<Complex<T>> = (0..d).map(|r| g.get(r, c)).collect();
        for q in &cols {
            let ip = q.iter().zip(&v).fold(Complex::new(T::zero(), T::zero()), |acc, (a, b)| acc + a.conj() * b);
            for (vi, qi) in v.iter_mut().zip(q) {
                *vi -= ip * qi;
            }
        }
        let n = v.iter().fold(T::zero(), |acc, z| acc + z.norm_sqr()).sqrt();
        cols.push(v.into_iter().map(|z| z / n).collect());
    }
    LocalOperator::from_fn(d, |r, c| cols[c][r])
}

/// A random complete measurement `A_i = B_i (Σ_k B_k†B_k)^{-1/2}` with
/// Ginibre `B_i`.
pub fn random_povm<T: Real, R: Rng + ?Sized>(d: usize, outcomes: usize, rng: &mut R) -> Result<Vec<LocalOperator<T>>> {
    if outcomes == 0 {
        return Err(Error::ParameterOutOfRange("a measurement needs at least one outcome".into()));
    }
    let raw: Vec<LocalOperator<T>> = (0..outcomes).map(|_| ginibre(d, rng)).collect();
    let sum = raw.iter().fold(LocalOperator::zeros(d), |acc, b| &acc + &b.gram());
    let root = matrix_sqrt_psd(&sum, T::lit(1e-9))?;
    let inv = root.inverse()?;
    Ok(raw.iter().map(|b| b.matmul(&inv)).collect())
}

/// Positive-control target: a product operator satisfying the reachability
/// conditions for a randomly chosen nontrivial symmetry `S` and party `j`.
///
/// For `i ≠ j`, `H_i` is a random positive operator averaged over the
/// cyclic group generated by `S^{(i)}`, so it commutes with `S^{(i)}`; each
/// `h_i` carries a random left unitary. `h_j` is generic.
pub fn construct_reachable<T: Real, R: Rng + ?Sized>(
    group: &StabilizerGroup<T>,
    rng: &mut R,
    tol: Tolerances<T>,
) -> Result<ProductOperator<T>> {
    let dims = group.party_dims().to_vec();
    let is_scalar = |f: &LocalOperator<T>| proportional(f, &LocalOperator::identity(f.dim()), tol.eq).is_some();
    let candidates: Vec<(usize, Vec<usize>)> = (0..group.len())
        .map(|s| {
            let parties = (0..dims.len()).filter(|&j| !is_scalar(group.element(s).operator.factor(j))).collect();
            (s, parties)
        })
        .filter(|(_, parties): &(usize, Vec<usize>)| !parties.is_empty())
        .collect();
    if candidates.is_empty() {
        return Err(Error::SamplingFailed("group has no element acting nontrivially on any party".into()));
    }
    for _ in 0..MAX_ATTEMPTS {
        let (s, parties) = &candidates[rng.random_range(0..candidates.len())];
        let j = parties[rng.random_range(0..parties.len())];
        let sym = &group.element(*s).operator;
        let mut factors = Vec::with_capacity(dims.len());
        for (i, &d) in dims.iter().enumerate() {
            if i == j {
                factors.push(sample_local_operator(d, rng)?);
                continue;
            }
            let r = sample_local_operator::<T, R>(d, rng)?.gram();
            let si = sym.factor(i);
            let mut power = LocalOperator::identity(d);
            let mut avg = LocalOperator::zeros(d);
            let mut order = 0;
            loop {
                avg = &avg + &power.adjoint().matmul(&r).matmul(&power);
                order += 1;
                power = power.matmul(si);
                if is_scalar(&power) || order > group.len() {
                    break;
                }
            }
            let t = avg.trace().re;
            let h = matrix_sqrt_psd(&avg.scale_real(T::one() / t), tol.eq)?;
            factors.push(random_unitary(d, rng).matmul(&h));
        }
        let h = ProductOperator::new(factors)?;
        if is_reachable(&h, group, tol)?.is_some() {
            return Ok(h);
        }
    }
    Err(Error::SamplingFailed("could not construct a reachable target".into()))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FractionEstimate {
    pub n_samples: usize,
    pub hits: usize,
    pub fraction: f64,
    pub ci_low: f64,
    pub ci_high: f64,
}

/// Wilson score interval at 95% confidence.
pub fn wilson_interval(hits: usize, n: usize) -> (f64, f64) {
    if n == 0 {
        return (0.0, 1.0);
    }
    let n = n as f64;
    let p = hits as f64 / n;
    let z2 = Z_95 * Z_95;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = Z_95 / denom * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt();
    let lo = if hits == 0 { 0.0 } else { (center - half).max(0.0) };
    let hi = if hits as f64 == n { 1.0 } else { (center + half).min(1.0) };
    (lo, hi)
}

/// Evaluates `predicate(index, rng)` on `cfg.n_samples` independent streams
/// in parallel and reports the hit fraction.
pub fn estimate_fraction<F>(cfg: &SampleConfig, predicate: F) -> Result<FractionEstimate>
where
    F: Fn(u64, &mut ChaCha8Rng) -> Result<bool> + Sync,
{
    cfg.validate()?;
    let verdicts = (0..cfg.n_samples as u64)
        .into_par_iter()
        .map(|i| predicate(i, &mut sample_rng(cfg.rng_seed, i)))
        .collect::<Vec<_>>()
        .into_iter()
        .collect::<Result<Vec<bool>>>()?;
    let hits = verdicts.iter().filter(|&&b| b).count();
    let (ci_low, ci_high) = wilson_interval(hits, cfg.n_samples);
    Ok(FractionEstimate {
        n_samples: cfg.n_samples,
        hits,
        fraction: hits as f64 / cfg.n_samples as f64,
        ci_low,
        ci_high,
    })
}

fn check_dims<T: Real>(group: &StabilizerGroup<T>, cfg: &SampleConfig) -> Result<()> {
    if group.party_dims() != cfg.party_dims.as_slice() {
        return Err(Error::ParameterOutOfRange(format!(
            "sample dimensions {:?} do not match group dimensions {:?}",
            cfg.party_dims,
            group.party_dims()
        )));
    }
    Ok(())
}

/// Fraction of Ginibre-random `h` with a reachability certificate.
pub fn reachable_fraction<T: Real>(group: &StabilizerGroup<T>, cfg: &SampleConfig) -> Result<FractionEstimate> {
    check_dims(group, cfg)?;
    let tol = cfg.tolerances::<T>();
    estimate_fraction(cfg, |_, rng| {
        let h = sample_product_operator::<T, _>(&cfg.party_dims, rng)?;
        Ok(is_reachable(&h, group, tol)?.is_some())
    })
}

/// Fraction of Ginibre-random `g` convertible with party `party` measuring,
/// or with any party when `party` is `None`.
pub fn convertible_fraction<T: Real>(
    group: &StabilizerGroup<T>,
    cfg: &SampleConfig,
    party: Option<usize>,
    search: &SearchConfig,
) -> Result<FractionEstimate> {
    check_dims(group, cfg)?;
    if let Some(j) = party.filter(|&j| j >= cfg.party_dims.len()) {
        return Err(Error::PartyOutOfRange { party: j, parties: cfg.party_dims.len() });
    }
    let tol = cfg.tolerances::<T>();
    let parties: Vec<usize> = party.map_or_else(|| (0..cfg.party_dims.len()).collect(), |j| vec![j]);
    estimate_fraction(cfg, |_, rng| {
        let g = sample_product_operator::<T, _>(&cfg.party_dims, rng)?;
        for &j in &parties {
            if is_convertible(&g, group, j, search, tol)?.is_convertible() {
                return Ok(true);
            }
        }
        Ok(false)
    })
}

/// Reachable fraction over targets built by [`construct_reachable`].
pub fn constructed_reachable_fraction<T: Real>(
    group: &StabilizerGroup<T>,
    cfg: &SampleConfig,
) -> Result<FractionEstimate> {
    check_dims(group, cfg)?;
    let tol = cfg.tolerances::<T>();
    estimate_fraction(cfg, |_, rng| {
        let h = construct_reachable(group, rng, tol)?;
        Ok(is_reachable(&h, group, tol)?.is_some())
    })
}

/// Wire format of a sampling experiment.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampleReport {
    pub n_samples: usize,
    pub fraction: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub rng_seed: u64,
    pub tol: f64,
    pub nz_threshold: f64,
}

impl SampleReport {
    pub fn new(cfg: &SampleConfig, est: &FractionEstimate) -> Self {
        Self {
            n_samples: est.n_samples,
            fraction: est.fraction,
            ci_low: est.ci_low,
            ci_high: est.ci_high,
            rng_seed: cfg.rng_seed,
            tol: cfg.tol,
            nz_threshold: cfg.nz_threshold,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seed::{enumerate_l_symmetries, make_abstract_group, pauli_group};

    #[test]
    fn fixed_seed_is_reproducible() {
        let a = sample_product_operator::<f64, _>(&[2, 3], &mut sample_rng(9, 4)).unwrap();
        let b = sample_product_operator::<f64, _>(&[2, 3], &mut sample_rng(9, 4)).unwrap();
        let c = sample_product_operator::<f64, _>(&[2, 3], &mut sample_rng(9, 5)).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn samples_are_invertible_and_canonical() {
        for i in 0..1000 {
            let g = sample_product_operator::<f64, _>(&[2, 2, 2, 2], &mut sample_rng(1, i)).unwrap();
            for f in g.factors() {
                assert!(f.min_singular_value() > 0.0);
                assert!(f.condition_number() <= MAX_CONDITION);
                assert!((f.gram().trace().re - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn random_unitary_and_povm() {
        let mut rng = sample_rng(3, 0);
        let u = random_unitary::<f64, _>(3, &mut rng);
        assert!(u.unitarity_residual() < 1e-12);
        let povm = random_povm::<f64, _>(2, 3, &mut rng).unwrap();
        let sum = povm.iter().fold(LocalOperator::zeros(2), |acc, a| &acc + &a.gram());
        assert!((&sum - &LocalOperator::identity(2)).frobenius_norm() < 1e-12);
    }

    #[test]
    fn wilson_interval_values() {
        // n = 1000, 0 hits: upper bound z²/(n + z²)
        let (lo, hi) = wilson_interval(0, 1000);
        let z2 = Z_95 * Z_95;
        assert_eq!(lo, 0.0);
        assert!((hi - z2 / (1000.0 + z2)).abs() < 1e-12);
        let (lo, hi) = wilson_interval(50, 100);
        assert!((lo + hi - 1.0).abs() < 1e-12);
        assert!((hi - 0.596170).abs() < 1e-5);
    }

    #[test]
    fn identity_group_has_zero_reachable_fraction() {
        let group = make_abstract_group(vec![2, 2], vec![ProductOperator::<f64>::identity(&[2, 2])], 1e-9).unwrap();
        let est = reachable_fraction(&group, &SampleConfig::new(vec![2, 2], 50, 1)).unwrap();
        assert_eq!(est.hits, 0);
    }

    #[test]
    fn positive_control_hits_every_sample() {
        let group = enumerate_l_symmetries::<f64>(1e-10).unwrap();
        let est = constructed_reachable_fraction(&group, &SampleConfig::new(vec![2; 4], 100, 5)).unwrap();
        assert_eq!(est.fraction, 1.0);
        let pauli = pauli_group::<f64>(3, 1e-9).unwrap();
        let est = constructed_reachable_fraction(&pauli, &SampleConfig::new(vec![2; 3], 100, 5)).unwrap();
        assert_eq!(est.fraction, 1.0);
    }

    #[test]
    fn single_sample_is_deterministic() {
        let group = enumerate_l_symmetries::<f64>(1e-10).unwrap();
        let cfg = SampleConfig::new(vec![2; 4], 1, 42);
        let a = convertible_fraction(&group, &cfg, Some(0), &SearchConfig::default()).unwrap();
        let b = convertible_fraction(&group, &cfg, Some(0), &SearchConfig::default()).unwrap();
        assert_eq!(a, b);
        assert_eq!(SampleReport::new(&cfg, &a), SampleReport::new(&cfg, &b));
    }

    #[test]
    fn config_validation() {
        let mut cfg = SampleConfig::new(vec![2, 2], 0, 1);
        assert!(cfg.validate().is_err());
        cfg.n_samples = 3;
        cfg.tol = 1e-3;
        assert!(cfg.validate().is_err());
    }
}
