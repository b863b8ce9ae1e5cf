//! AWGN generation, power measurement and dB bookkeeping.
//!
//! Noise is circularly symmetric: independent N(0, σ²) per axis, so the
//! total noise power is 2σ² and the sample phase is uniform on [0, 2π).
//! Deviates come from a ChaCha8 stream (I noise drawn before Q noise for
//! each sample) through the ziggurat transform, so a seed pins the output
//! bit-for-bit on every platform.

use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::iq::IqSample;
use crate::rng::{seeded_rng, SeededRng};

/// Per-axis Gaussian noise description plus its seed.
#[derive(Clone, Copy, Debug)]
pub struct NoiseSpec {
    sigma: f64,
    seed: u64,
}

impl NoiseSpec {
    pub fn new(sigma: f64, seed: u64) -> Result<NoiseSpec> {
        if !sigma.is_finite() || sigma < 0.0 {
            return Err(Error::InvalidNoiseSigma(sigma));
        }
        Ok(NoiseSpec { sigma, seed })
    }

    /// Noise of the given total power (2σ² split over both axes).
    pub fn from_power(power: f64, seed: u64) -> Result<NoiseSpec> {
        if !power.is_finite() || power < 0.0 {
            return Err(Error::InvalidNoiseSigma(power));
        }
        NoiseSpec::new((power / 2.0).sqrt(), seed)
    }

    /// Noise sized so that `signal_power / noise_power` equals the given dB
    /// ratio.
    pub fn from_snr_db(snr_db: f64, signal_power: f64, seed: u64) -> Result<NoiseSpec> {
        let budget = budget_from_db(signal_power, snr_db)?;
        NoiseSpec::from_power(budget.perturbation_power(), seed)
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Total noise power: both axes contribute σ².
    pub fn power(&self) -> f64 {
        2.0 * self.sigma * self.sigma
    }

    pub(crate) fn sample_into(&self, rng: &mut SeededRng) -> IqSample {
        let ni: f64 = StandardNormal.sample(rng);
        let nq: f64 = StandardNormal.sample(rng);
        IqSample::new(ni * self.sigma, nq * self.sigma)
    }
}

/// Add seeded white Gaussian noise to every sample. σ = 0 returns the input
/// unchanged, bit for bit.
pub fn awgn(samples: &[IqSample], noise: &NoiseSpec) -> Vec<IqSample> {
    let mut rng = seeded_rng(noise.seed);
    samples
        .iter()
        .map(|&s| s + noise.sample_into(&mut rng))
        .collect()
}

/// Mean of i² + q² over the sequence.
pub fn measure_power(samples: &[IqSample]) -> Result<f64> {
    if samples.is_empty() {
        return Err(Error::EmptySequence);
    }
    Ok(samples.iter().map(|s| s.power()).sum::<f64>() / samples.len() as f64)
}

/// A signal power, a dB ratio (SNR or SJR) and the perturbation power they
/// imply: `perturbation = signal / 10^(ratio/10)`.
#[derive(Clone, Copy, Debug)]
pub struct PowerBudget {
    signal_power: f64,
    ratio_db: f64,
    perturbation_power: f64,
}

impl PowerBudget {
    pub fn signal_power(&self) -> f64 {
        self.signal_power
    }

    pub fn ratio_db(&self) -> f64 {
        self.ratio_db
    }

    pub fn perturbation_power(&self) -> f64 {
        self.perturbation_power
    }
}

/// Turn a dB ratio into an absolute perturbation power budget.
pub fn budget_from_db(signal_power: f64, ratio_db: f64) -> Result<PowerBudget> {
    if !(signal_power > 0.0) || !signal_power.is_finite() {
        return Err(Error::NonPositiveSignalPower(signal_power));
    }
    Ok(PowerBudget {
        signal_power,
        ratio_db,
        perturbation_power: signal_power * 10f64.powf(-ratio_db / 10.0),
    })
}

/// Inverse of [`budget_from_db`]: the dB ratio of two powers.
pub fn ratio_db(signal_power: f64, perturbation_power: f64) -> f64 {
    10.0 * (signal_power / perturbation_power).log10()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constellation::ConstellationSpec;

    #[test]
    fn zero_sigma_is_identity() {
        let samples: Vec<IqSample> = (0..64)
            .map(|k| IqSample::new(k as f64 * 0.1, -(k as f64) * 0.3))
            .collect();
        let noise = NoiseSpec::new(0.0, 12).unwrap();
        assert_eq!(awgn(&samples, &noise), samples);
    }

    #[test]
    fn negative_sigma_is_rejected() {
        assert!(matches!(
            NoiseSpec::new(-0.1, 0),
            Err(Error::InvalidNoiseSigma(_))
        ));
        assert!(NoiseSpec::new(f64::NAN, 0).is_err());
    }

    #[test]
    fn added_power_matches_two_sigma_squared() {
        let n = 1_000_000;
        let sigma = 0.1;
        let clean = vec![IqSample::ZERO; n];
        let noise = NoiseSpec::new(sigma, 77).unwrap();
        let noisy = awgn(&clean, &noise);
        let measured = measure_power(&noisy).unwrap();
        // population value 2σ² = 0.02; 0.0002 is a ten-sigma band at n = 1e6
        assert!(
            (measured - 0.02).abs() < 0.0002,
            "measured noise power {measured}"
        );
    }

    #[test]
    fn power_estimate_converges_like_sqrt_n() {
        let sigma = 0.2;
        let expected = 2.0 * sigma * sigma;
        for n in [10_000usize, 1_000_000] {
            let noise = NoiseSpec::new(sigma, 4242).unwrap();
            let noisy = awgn(&vec![IqSample::ZERO; n], &noise);
            let err = (measure_power(&noisy).unwrap() - expected).abs();
            // mean-power std is 2σ²/√n; allow five of them
            assert!(
                err <= 5.0 * expected / (n as f64).sqrt(),
                "n = {n}: error {err}"
            );
        }
    }

    #[test]
    fn noise_phase_is_uniform() {
        // chi-square over 36 phase bins; 57.342 is the 99th percentile at
        // 35 degrees of freedom, so this rejects only below p = 0.01
        let n = 1_000_000usize;
        let noise = NoiseSpec::new(0.5, 901).unwrap();
        let noisy = awgn(&vec![IqSample::ZERO; n], &noise);
        let bins = 36usize;
        let mut counts = vec![0u64; bins];
        for s in &noisy {
            let mut ph = s.phase();
            if ph < 0.0 {
                ph += std::f64::consts::TAU;
            }
            let b = ((ph / std::f64::consts::TAU) * bins as f64) as usize;
            counts[b.min(bins - 1)] += 1;
        }
        let expected = n as f64 / bins as f64;
        let chi2: f64 = counts
            .iter()
            .map(|&c| {
                let d = c as f64 - expected;
                d * d / expected
            })
            .sum();
        assert!(chi2 < 57.342, "chi-square {chi2} rejects uniformity");
    }

    #[test]
    fn awgn_is_deterministic_per_seed() {
        let samples: Vec<IqSample> = (0..100).map(|k| IqSample::new(k as f64, 0.0)).collect();
        let noise = NoiseSpec::new(0.3, 5).unwrap();
        let a = awgn(&samples, &noise);
        let b = awgn(&samples, &noise);
        assert_eq!(a, b);
        let other = awgn(&samples, &NoiseSpec::new(0.3, 6).unwrap());
        assert_ne!(a, other);
    }

    #[test]
    fn measure_power_examples() {
        let spec = ConstellationSpec::qam(16).unwrap();
        let p = measure_power(spec.points()).unwrap();
        assert!((p - 1.0).abs() < 1e-12);
        assert_eq!(measure_power(&[IqSample::ZERO; 8]).unwrap(), 0.0);
        assert_eq!(measure_power(&[IqSample::new(3.0, 4.0)]).unwrap(), 25.0);
        assert!(matches!(measure_power(&[]), Err(Error::EmptySequence)));
    }

    #[test]
    fn budget_examples() {
        assert!((budget_from_db(1.0, 0.0).unwrap().perturbation_power() - 1.0).abs() < 1e-15);
        assert!((budget_from_db(1.0, 10.0).unwrap().perturbation_power() - 0.1).abs() < 1e-15);
        // 10^(-0.3)
        assert!(
            (budget_from_db(1.0, 3.0).unwrap().perturbation_power() - 0.501187).abs() < 1e-6
        );
        assert!(matches!(
            budget_from_db(0.0, 3.0),
            Err(Error::NonPositiveSignalPower(_))
        ));
    }

    #[test]
    fn budget_roundtrips_within_1e9_db() {
        let mut db = -20.0;
        while db <= 40.0 {
            let budget = budget_from_db(1.0, db).unwrap();
            let back = ratio_db(budget.signal_power(), budget.perturbation_power());
            assert!((back - db).abs() < 1e-9, "{db} dB -> {back} dB");
            db += 0.5;
        }
    }

    #[test]
    fn infinite_ratio_means_zero_power() {
        let b = budget_from_db(1.0, f64::INFINITY).unwrap();
        assert_eq!(b.perturbation_power(), 0.0);
    }
}
