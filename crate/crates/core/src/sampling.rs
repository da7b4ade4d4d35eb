//! Seeded Monte-Carlo simulation of the position-basis measurement, and
//! the frequency estimators recovering the probability functionals.
//!
//! A measurement run draws basis indices i.i.d. with probability equal to
//! the state's diagonal and records per-index counts. Frequencies over the
//! subsystem support estimate the lower probability; frequencies over the
//! complement of the reduced negation support estimate the upper one; and
//! any divisor `k` between `m` and its double negation yields an
//! intermediate estimate. Because those regions are nested as sets, the
//! ordering `lower <= intermediate <= upper` holds exactly for every
//! record, not just in expectation.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lattice::{DivisorLattice, LatticeError};
use crate::quantum::{DensityMatrix, ProjectorSupport, QuantumError};

/// Name of the generator recorded in every measurement record. Records are
/// portable across implementations only as (seed, algorithm) pairs;
/// bit-equality of counts is promised only within one implementation.
pub const RNG_ALGORITHM: &str = "chacha12";

/// Errors from simulation and estimation.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum SamplingError {
    /// At least one shot is required.
    #[error("shots must be at least 1")]
    ZeroShots,
    /// A record with no counts cannot estimate frequencies.
    #[error("record has zero total count")]
    EmptyRecord,
    /// Intermediate estimates need `m | k` and `k | neg neg m`.
    #[error("divisor {k} is not between {m} and its double negation {bound}")]
    ChainCondition { m: u64, k: u64, bound: u64 },
    /// Malformed serialized record.
    #[error("invalid measurement record: {0}")]
    Format(String),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error(transparent)]
    Quantum(#[from] QuantumError),
}

/// Outcome counts of a simulated measurement run.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MeasurementRecord {
    n: u64,
    seed: u64,
    algorithm: String,
    counts: Vec<u64>,
}

impl MeasurementRecord {
    /// Draw `shots` outcomes from the diagonal of `rho` using a seeded
    /// stream; identical inputs give identical records.
    ///
    /// Sampling inverts the cumulative distribution of the diagonal,
    /// renormalized (and floored at zero) so states that pass validation
    /// only within tolerance still sample cleanly.
    pub fn simulate(rho: &DensityMatrix, shots: u64, seed: u64) -> Result<Self, SamplingError> {
        use rand::{Rng, SeedableRng};
        if shots == 0 {
            return Err(SamplingError::ZeroShots);
        }
        let n = rho.dim();
        let weights: Vec<f64> = rho.diagonal().iter().map(|&p| p.max(0.0)).collect();
        let total: f64 = weights.iter().sum();
        let mut cumulative = Vec::with_capacity(n);
        let mut acc = 0.0;
        for w in &weights {
            acc += w / total;
            cumulative.push(acc);
        }
        // Guard the final bin against rounding shortfall.
        cumulative[n - 1] = 1.0;

        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(seed);
        let mut counts = vec![0u64; n];
        for _ in 0..shots {
            let x: f64 = rng.gen();
            let idx = cumulative.partition_point(|&c| c <= x).min(n - 1);
            counts[idx] += 1;
        }
        Ok(Self {
            n: n as u64,
            seed,
            algorithm: RNG_ALGORITHM.to_string(),
            counts,
        })
    }

    /// Context dimension.
    pub fn n(&self) -> u64 {
        self.n
    }

    /// Seed the run was drawn with.
    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Generator name.
    pub fn algorithm(&self) -> &str {
        &self.algorithm
    }

    /// Per-index outcome counts.
    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    /// Total number of shots recorded.
    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    /// Frequency of outcomes landing in a support region.
    fn frequency_over(&self, support: &ProjectorSupport) -> Result<f64, SamplingError> {
        let total = self.total();
        if total == 0 {
            return Err(SamplingError::EmptyRecord);
        }
        let hits: u64 = support
            .indices()
            .iter()
            .map(|&r| self.counts[r as usize])
            .sum();
        Ok(hits as f64 / total as f64)
    }

    /// Estimate of the lower probability: frequency over the order-`m`
    /// subsystem support.
    pub fn estimate_lower(&self, m: u64) -> Result<f64, SamplingError> {
        let support = ProjectorSupport::subsystem(m, self.n)?;
        self.frequency_over(&support)
    }

    /// Estimate of the upper probability: frequency over the complement of
    /// the reduced negation support.
    pub fn estimate_upper(&self, m: u64) -> Result<f64, SamplingError> {
        let support = ProjectorSupport::upper_region(m, self.n)?;
        self.frequency_over(&support)
    }

    /// Width of the estimated ambiguity interval, exposed as the
    /// difference of the two estimators.
    pub fn estimate_dont_know(&self, m: u64) -> Result<f64, SamplingError> {
        Ok(self.estimate_upper(m)? - self.estimate_lower(m)?)
    }

    /// Intermediate estimate: frequency over the order-`k` subsystem
    /// support, admissible when `m | k` and `k` divides the double
    /// negation of `m`. Lies between the lower and upper estimates for
    /// every record because the regions are nested.
    pub fn estimate_intermediate(&self, m: u64, k: u64) -> Result<f64, SamplingError> {
        let lattice = DivisorLattice::new(self.n)?;
        let bound = lattice.double_negation(m)?;
        if !lattice.contains(k) || k % m != 0 || bound % k != 0 {
            return Err(SamplingError::ChainCondition { m, k, bound });
        }
        let support = ProjectorSupport::subsystem(k, self.n)?;
        self.frequency_over(&support)
    }

    /// Serialize to JSON.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plain data serializes")
    }

    /// Parse and validate the JSON form.
    pub fn from_json(text: &str) -> Result<Self, SamplingError> {
        let record: Self =
            serde_json::from_str(text).map_err(|e| SamplingError::Format(e.to_string()))?;
        if record.n == 0 || record.counts.len() != record.n as usize {
            return Err(SamplingError::Format(format!(
                "counts length {} does not match n = {}",
                record.counts.len(),
                record.n
            )));
        }
        Ok(record)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::StateVector;

    #[test]
    fn vacuum_concentrates_all_counts() {
        let vacuum = DensityMatrix::pure(&StateVector::basis(6, 0).unwrap());
        let record = MeasurementRecord::simulate(&vacuum, 1000, 1).unwrap();
        assert_eq!(record.counts()[0], 1000);
        assert_eq!(record.total(), 1000);
        for &m in DivisorLattice::new(6).unwrap().divisors() {
            assert_eq!(record.estimate_lower(m).unwrap(), 1.0);
            assert_eq!(record.estimate_upper(m).unwrap(), 1.0);
            assert_eq!(record.estimate_dont_know(m).unwrap(), 0.0);
        }
    }

    #[test]
    fn simulation_is_deterministic() {
        let rho = DensityMatrix::random(12, 77).unwrap();
        let a = MeasurementRecord::simulate(&rho, 5000, 9).unwrap();
        let b = MeasurementRecord::simulate(&rho, 5000, 9).unwrap();
        assert_eq!(a, b);
        let c = MeasurementRecord::simulate(&rho, 5000, 10).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn zero_shots_rejected() {
        let rho = DensityMatrix::maximally_mixed(4).unwrap();
        assert_eq!(
            MeasurementRecord::simulate(&rho, 0, 0),
            Err(SamplingError::ZeroShots)
        );
    }

    #[test]
    fn mixed_state_frequencies_concentrate() {
        let rho = DensityMatrix::maximally_mixed(6).unwrap();
        let shots = 100_000u64;
        let record = MeasurementRecord::simulate(&rho, shots, 3).unwrap();
        let p = 1.0 / 6.0;
        let band = 5.0 * (p * (1.0 - p) / shots as f64).sqrt();
        for &c in record.counts() {
            let freq = c as f64 / shots as f64;
            assert!((freq - p).abs() <= band, "freq {freq} vs {p}");
        }
    }

    #[test]
    fn sandwich_holds_exactly_per_record() {
        let lattice = DivisorLattice::new(18).unwrap();
        for seed in 0..5u64 {
            let rho = DensityMatrix::random(18, 100 + seed).unwrap();
            let record = MeasurementRecord::simulate(&rho, 2000, seed).unwrap();
            for &m in lattice.divisors() {
                let lower = record.estimate_lower(m).unwrap();
                let upper = record.estimate_upper(m).unwrap();
                assert!(lower <= upper);
                let bound = lattice.double_negation(m).unwrap();
                for &k in lattice.divisors() {
                    if k % m == 0 && bound % k == 0 {
                        let q = record.estimate_intermediate(m, k).unwrap();
                        assert!(lower <= q && q <= upper, "m={m} k={k}");
                    }
                }
            }
        }
    }

    #[test]
    fn intermediate_at_m_is_the_lower_estimate() {
        let rho = DensityMatrix::random(18, 5).unwrap();
        let record = MeasurementRecord::simulate(&rho, 3000, 4).unwrap();
        for &m in DivisorLattice::new(18).unwrap().divisors() {
            assert_eq!(
                record.estimate_intermediate(m, m).unwrap().to_bits(),
                record.estimate_lower(m).unwrap().to_bits()
            );
        }
    }

    #[test]
    fn chain_condition_is_enforced() {
        let rho = DensityMatrix::maximally_mixed(18).unwrap();
        let record = MeasurementRecord::simulate(&rho, 100, 0).unwrap();
        // Double negation of 3 is 9; 18 is above it.
        assert_eq!(
            record.estimate_intermediate(3, 18),
            Err(SamplingError::ChainCondition { m: 3, k: 18, bound: 9 })
        );
        // Double negation of 2 is 2; 6 is not below it.
        assert_eq!(
            record.estimate_intermediate(2, 6),
            Err(SamplingError::ChainCondition { m: 2, k: 6, bound: 2 })
        );
        // 9 does not contain 2 at all.
        assert!(record.estimate_intermediate(2, 9).is_err());
        // Admissible: 3 | 9 | 9.
        assert!(record.estimate_intermediate(3, 9).is_ok());
    }

    #[test]
    fn upper_estimate_is_one_when_negation_is_trivial() {
        // Negation of 6 in the 18-dimensional system is 1, so the upper
        // region is the whole index set and the estimate is exactly 1.
        for seed in 0..4u64 {
            let rho = DensityMatrix::random(18, 40 + seed).unwrap();
            let record = MeasurementRecord::simulate(&rho, 1500, seed).unwrap();
            assert_eq!(record.estimate_upper(6).unwrap(), 1.0);
            assert_eq!(record.estimate_upper(18).unwrap(), 1.0);
        }
    }

    #[test]
    fn record_round_trips_through_json() {
        let rho = DensityMatrix::random(6, 2).unwrap();
        let record = MeasurementRecord::simulate(&rho, 500, 11).unwrap();
        let text = record.to_json();
        assert!(text.contains("\"algorithm\": \"chacha12\""));
        let back = MeasurementRecord::from_json(&text).unwrap();
        assert_eq!(record, back);

        let bad = r#"{"n":3,"seed":0,"algorithm":"chacha12","counts":[1,2]}"#;
        assert!(matches!(
            MeasurementRecord::from_json(bad),
            Err(SamplingError::Format(_))
        ));
    }
}
