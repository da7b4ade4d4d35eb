//! Lower and upper probability functionals on the divisor lattice.
//!
//! For a state of dimension `n` and each divisor `m`, the lower probability
//! is the weight of the order-`m` subsystem support and the upper
//! probability is one minus the weight of the reduced negation support.
//! The gap between them is the "don't know" weight, and the failure of
//! modularity of the lower functional across incomparable divisors is
//! captured by `sigma`. [`Probabilities`] memoizes the lower values per
//! divisor once, so derived quantities are reproducible bit for bit, and
//! [`Probabilities::verify`] re-checks every structural property of the
//! functionals on the given state.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lattice::{DivisorLattice, LatticeError};
use crate::quantum::{DensityMatrix, ProjectorSupport, QuantumError};

/// Slack tolerance for all inequality and identity checks.
pub const SLACK_TOL: f64 = 1e-10;

/// Errors from functional evaluation.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum MeasureError {
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error(transparent)]
    Quantum(#[from] QuantumError),
    /// Malformed serialized report.
    #[error("invalid report: {0}")]
    Format(String),
}

/// Verdict and worst margin for one verified property.
///
/// `worst_slack` is the smallest signed margin encountered: inequality
/// checks record the minimum of `lhs - rhs` over all instances, and
/// identity checks record the negated largest absolute deviation. A check
/// passes when the margin stays above `-tolerance`, so `pass` is always
/// `worst_slack >= -SLACK_TOL` for the built-in checks.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub pass: bool,
    pub worst_slack: f64,
}

impl CheckResult {
    /// Grade a margin against a tolerance.
    pub fn from_slack(worst: f64, tol: f64) -> Self {
        // Vacuous checks (no instances) pass with zero margin; infinities
        // would not survive the JSON round trip.
        let worst_slack = if worst.is_finite() { worst } else { 0.0 };
        Self {
            pass: worst_slack >= -tol,
            worst_slack,
        }
    }
}

/// Named property verdicts, ordered by name.
pub type Checks = BTreeMap<String, CheckResult>;

/// Whether every check in a verdict map passed.
pub fn checks_pass(checks: &Checks) -> bool {
    checks.values().all(|c| c.pass)
}

/// Modularity classification of a lattice function.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Modularity {
    /// All defects within tolerance of zero.
    Modular,
    /// All defects above `-tol`, some positive.
    Supermodular,
    /// All defects below `tol`, some negative.
    Submodular,
    /// Defects of both signs beyond tolerance.
    Neither,
}

/// Modularity defect `f(join) + f(meet) - f(m1) - f(m2)`.
///
/// The two comparable-pair terms are grouped before subtraction, so when
/// `m1` divides `m2` the expression cancels exactly in floating point.
pub fn modularity_defect(
    lattice: &DivisorLattice,
    f: impl Fn(u64) -> f64,
    m1: u64,
    m2: u64,
) -> Result<f64, MeasureError> {
    let join = lattice.join(m1, m2)?;
    let meet = lattice.meet(m1, m2)?;
    Ok((f(join) + f(meet)) - (f(m1) + f(m2)))
}

/// Scan all divisor pairs and classify the sign pattern of the defect.
pub fn classify(lattice: &DivisorLattice, f: impl Fn(u64) -> f64, tol: f64) -> Modularity {
    let mut min = f64::INFINITY;
    let mut max = f64::NEG_INFINITY;
    for &m1 in lattice.divisors() {
        for &m2 in lattice.divisors() {
            let d = modularity_defect(lattice, &f, m1, m2).expect("members");
            min = min.min(d);
            max = max.max(d);
        }
    }
    match (min >= -tol, max <= tol) {
        (true, true) => Modularity::Modular,
        (true, false) => Modularity::Supermodular,
        (false, true) => Modularity::Submodular,
        (false, false) => Modularity::Neither,
    }
}

/// Per-divisor row of a probability report. Values are clamped to `[0, 1]`
/// for reporting; `d` is the clamped gap `u - l`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbabilityRow {
    pub m: u64,
    pub l: f64,
    pub lt: f64,
    pub u: f64,
    pub ut: f64,
    pub d: f64,
}

/// Full probability table for one state: per-divisor rows, the pairwise
/// defect table, and the property verdicts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbabilityReport {
    pub n: u64,
    pub rows: Vec<ProbabilityRow>,
    pub sigma: Vec<Vec<f64>>,
    pub checks: Checks,
}

/// The probability functionals of one state, with the lower value
/// memoized per divisor.
///
/// Memoization makes every derived quantity a deterministic function of
/// the per-divisor table: upper values for `m` and for its double negation
/// read the same entries and therefore agree bit for bit, and defects of
/// comparable pairs cancel exactly.
#[derive(Debug, Clone)]
pub struct Probabilities {
    lattice: DivisorLattice,
    diagonal: Vec<f64>,
    lower_by_divisor: BTreeMap<u64, f64>,
    upper_by_divisor: BTreeMap<u64, f64>,
}

impl Probabilities {
    /// Evaluate the functionals of `rho` on the divisor lattice of its
    /// dimension.
    pub fn new(rho: &DensityMatrix) -> Result<Self, MeasureError> {
        let n = rho.dim() as u64;
        let lattice = DivisorLattice::new(n)?;
        let diagonal = rho.diagonal();
        let mut lower_by_divisor = BTreeMap::new();
        for &m in lattice.divisors() {
            let support = ProjectorSupport::subsystem(m, n)?;
            let value: f64 = support
                .indices()
                .iter()
                .map(|&r| diagonal[r as usize])
                .sum();
            lower_by_divisor.insert(m, value);
        }
        let vacuum = lower_by_divisor[&1];
        let mut upper_by_divisor = BTreeMap::new();
        for &m in lattice.divisors() {
            let neg = lattice.negation(m)?;
            upper_by_divisor.insert(m, 1.0 - lower_by_divisor[&neg] + vacuum);
        }
        Ok(Self {
            lattice,
            diagonal,
            lower_by_divisor,
            upper_by_divisor,
        })
    }

    /// The lattice the functionals live on.
    pub fn lattice(&self) -> &DivisorLattice {
        &self.lattice
    }

    /// Context dimension.
    pub fn n(&self) -> u64 {
        self.lattice.n()
    }

    /// Diagonal weights of the underlying state.
    pub fn diagonal(&self) -> &[f64] {
        &self.diagonal
    }

    fn require(&self, m: u64) -> Result<(), MeasureError> {
        if self.lattice.contains(m) {
            Ok(())
        } else {
            Err(LatticeError::NotADivisor { value: m, n: self.n() }.into())
        }
    }

    /// Lower probability: weight of the order-`m` subsystem support.
    pub fn lower(&self, m: u64) -> Result<f64, MeasureError> {
        self.require(m)?;
        Ok(self.lower_by_divisor[&m])
    }

    /// Lower probability with the shared vacuum weight removed.
    pub fn lower_tilde(&self, m: u64) -> Result<f64, MeasureError> {
        Ok(self.lower(m)? - self.lower_by_divisor[&1])
    }

    /// Upper probability: `1 - lower(neg m) + lower(1)`.
    pub fn upper(&self, m: u64) -> Result<f64, MeasureError> {
        self.require(m)?;
        Ok(self.upper_by_divisor[&m])
    }

    /// Upper probability with the vacuum weight removed: `u - lower(1)`.
    pub fn upper_tilde(&self, m: u64) -> Result<f64, MeasureError> {
        Ok(self.upper(m)? - self.lower_by_divisor[&1])
    }

    /// Width of the ambiguity interval: `u - l`.
    pub fn dont_know(&self, m: u64) -> Result<f64, MeasureError> {
        Ok(self.upper(m)? - self.lower(m)?)
    }

    /// Lower probability of the complementary question:
    /// `lower_tilde(neg m)`.
    pub fn complement_lower(&self, m: u64) -> Result<f64, MeasureError> {
        let neg = self.lattice.negation(m)?;
        self.lower_tilde(neg)
    }

    /// Upper probability of the complementary question:
    /// `1 - lower(neg neg m)`.
    pub fn complement_upper(&self, m: u64) -> Result<f64, MeasureError> {
        let negneg = self.lattice.double_negation(m)?;
        Ok(1.0 - self.lower(negneg)?)
    }

    /// Modularity defect of the lower functional,
    /// `l(join) + l(meet) - l(m1) - l(m2)`; nonnegative, zero on
    /// comparable pairs exactly.
    pub fn sigma(&self, m1: u64, m2: u64) -> Result<f64, MeasureError> {
        let join = self.lattice.join(m1, m2)?;
        let meet = self.lattice.meet(m1, m2)?;
        let l = &self.lower_by_divisor;
        Ok((l[&join] + l[&meet]) - (l[&m1] + l[&m2]))
    }

    /// Modularity defect of the upper functional; nonpositive, and equal
    /// to `-sigma(neg m1, neg m2)` within tolerance.
    pub fn upper_modularity_defect(&self, m1: u64, m2: u64) -> Result<f64, MeasureError> {
        let join = self.lattice.join(m1, m2)?;
        let meet = self.lattice.meet(m1, m2)?;
        let u = &self.upper_by_divisor;
        Ok((u[&join] + u[&meet]) - (u[&m1] + u[&m2]))
    }

    /// Pairwise defect table of the upper functional over ascending
    /// divisors (not serialized into reports).
    pub fn upper_defect_matrix(&self) -> Vec<Vec<f64>> {
        let divisors = self.lattice.divisors().to_vec();
        divisors
            .iter()
            .map(|&a| {
                divisors
                    .iter()
                    .map(|&b| self.upper_modularity_defect(a, b).expect("members"))
                    .collect()
            })
            .collect()
    }

    /// Lower capacity of a divisor subset: the lower probability of the
    /// join of its elements; 0 for the empty set.
    pub fn capacity_lower(&self, subset: &[u64]) -> Result<f64, MeasureError> {
        match self.join_of(subset)? {
            None => Ok(0.0),
            Some(join) => self.lower(join),
        }
    }

    /// Upper capacity of a divisor subset; 0 for the empty set.
    pub fn capacity_upper(&self, subset: &[u64]) -> Result<f64, MeasureError> {
        match self.join_of(subset)? {
            None => Ok(0.0),
            Some(join) => self.upper(join),
        }
    }

    fn join_of(&self, subset: &[u64]) -> Result<Option<u64>, MeasureError> {
        let mut acc: Option<u64> = None;
        for &m in subset {
            self.require(m)?;
            acc = Some(match acc {
                None => m,
                Some(prev) => self.lattice.join(prev, m)?,
            });
        }
        Ok(acc)
    }

    /// Added value of joining `m` onto `k`: `l(m v k) - l(k)`; exactly 0
    /// when `m` divides `k`.
    pub fn added_value(&self, m: u64, k: u64) -> Result<f64, MeasureError> {
        let join = self.lattice.join(m, k)?;
        Ok(self.lower_by_divisor[&join] - self.lower_by_divisor[&k])
    }

    /// Diagonal weight of a support region.
    fn region_weight(&self, support: &ProjectorSupport) -> f64 {
        support
            .indices()
            .iter()
            .map(|&r| self.diagonal[r as usize])
            .sum()
    }

    /// One report row for divisor `m`, clamped for reporting.
    pub fn row(&self, m: u64) -> Result<ProbabilityRow, MeasureError> {
        let clamp = |x: f64| x.clamp(0.0, 1.0);
        let l = clamp(self.lower(m)?);
        // Rounding can land the upper value an ulp under the lower one at
        // the vacuum; reported intervals stay well-formed.
        let u = clamp(self.upper(m)?).max(l);
        Ok(ProbabilityRow {
            m,
            l,
            lt: clamp(self.lower_tilde(m)?),
            u,
            ut: clamp(self.upper_tilde(m)?),
            d: u - l,
        })
    }

    /// Pairwise `sigma` table over ascending divisors.
    pub fn sigma_matrix(&self) -> Vec<Vec<f64>> {
        let divisors = self.lattice.divisors().to_vec();
        divisors
            .iter()
            .map(|&a| {
                divisors
                    .iter()
                    .map(|&b| self.sigma(a, b).expect("members"))
                    .collect()
            })
            .collect()
    }

    /// Run every structural check on this state's functionals.
    ///
    /// Inequality checks record their minimum margin; identity checks
    /// record the negated worst absolute deviation; a check passes when
    /// the margin is at least `-SLACK_TOL`.
    pub fn verify(&self) -> Result<Checks, MeasureError> {
        let n = self.n();
        let lat = &self.lattice;
        let divisors = lat.divisors().to_vec();
        let mut checks = Checks::new();
        let mut add = |name: &str, worst: f64| {
            checks.insert(name.to_string(), CheckResult::from_slack(worst, SLACK_TOL));
        };

        // Monotonicity of both functionals along divisibility.
        let mut lower_mono = f64::INFINITY;
        let mut upper_mono = f64::INFINITY;
        for &k in &divisors {
            for &m in &divisors {
                if m % k == 0 {
                    lower_mono = lower_mono.min(self.lower(m)? - self.lower(k)?);
                    upper_mono = upper_mono.min(self.upper(m)? - self.upper(k)?);
                }
            }
        }
        add("lower_monotone", lower_mono);
        add("upper_monotone", upper_mono);

        // Chain through the double negation:
        // l(m) + lt(neg m) <= l(neg neg m) + lt(neg m) <= 1.
        let mut chain = f64::INFINITY;
        for &m in &divisors {
            let neg = lat.negation(m)?;
            let negneg = lat.double_negation(m)?;
            let left = self.lower(m)? + self.lower_tilde(neg)?;
            let mid = self.lower(negneg)? + self.lower_tilde(neg)?;
            chain = chain.min(mid - left).min(1.0 - mid);
        }
        add("double_negation_chain", chain);

        // Pairwise defects: supermodularity of the lower functional, its
        // agreement with the excess-region weight, and the upper-defect
        // identity.
        let mut super_min = f64::INFINITY;
        let mut sigma_dev = 0.0f64;
        let mut upper_defect_dev = 0.0f64;
        for &m1 in &divisors {
            for &m2 in &divisors {
                let sigma = self.sigma(m1, m2)?;
                super_min = super_min.min(sigma);
                let excess = ProjectorSupport::join_excess(m1, m2, n)?;
                sigma_dev = sigma_dev.max((sigma - self.region_weight(&excess)).abs());
                let neg_sigma = self.sigma(lat.negation(m1)?, lat.negation(m2)?)?;
                let defect = self.upper_modularity_defect(m1, m2)?;
                upper_defect_dev = upper_defect_dev.max((defect + neg_sigma).abs());
            }
        }
        add("supermodularity", super_min);
        add("sigma_trace_identity", -sigma_dev);
        add("upper_defect_identity", -upper_defect_dev);

        // Gap equals the weight of the don't-know region.
        let mut dont_know_dev = 0.0f64;
        for &m in &divisors {
            let region = ProjectorSupport::dont_know(m, n)?;
            dont_know_dev =
                dont_know_dev.max((self.dont_know(m)? - self.region_weight(&region)).abs());
        }
        add("dont_know_trace_identity", -dont_know_dev);

        // Complement sandwich: l + complement_lower <= 1 <= u + complement_upper.
        let mut sandwich = f64::INFINITY;
        for &m in &divisors {
            sandwich = sandwich.min(1.0 - (self.lower(m)? + self.complement_lower(m)?));
            sandwich = sandwich.min((self.upper(m)? + self.complement_upper(m)?) - 1.0);
        }
        add("complement_sandwich", sandwich);

        // Upper functional is blind to double negation.
        let mut dn_dev = 0.0f64;
        for &m in &divisors {
            let negneg = lat.double_negation(m)?;
            dn_dev = dn_dev.max((self.upper(m)? - self.upper(negneg)?).abs());
        }
        add("upper_double_negation", -dn_dev);

        // The upper gap across the negation equals the lower gap between
        // the two negations, and the lower functional never loses ground
        // across the double negation.
        let mut gap_worst = f64::INFINITY;
        for &m in &divisors {
            let neg = lat.negation(m)?;
            let negneg = lat.double_negation(m)?;
            let upper_gap = self.upper(m)? - self.upper(neg)?;
            let lower_gap = self.lower(negneg)? - self.lower(neg)?;
            let growth = self.lower(negneg)? - self.lower(m)?;
            gap_worst = gap_worst.min(-(upper_gap - lower_gap).abs()).min(growth);
        }
        add("negation_gap_identity", gap_worst);

        // Intermediate divisors between m and its double negation stay
        // inside the ambiguity interval of m.
        let mut inter = f64::INFINITY;
        for &m in &divisors {
            let negneg = lat.double_negation(m)?;
            for &k in &divisors {
                if k % m == 0 && negneg % k == 0 {
                    inter = inter.min(self.lower(k)? - self.lower(m)?);
                    inter = inter.min(self.upper(m)? - self.lower(k)?);
                }
            }
        }
        add("intermediate_sandwich", inter);

        // Divisors sharing every prime of n have upper probability 1.
        let radical_n = lat.factorization().radical();
        let mut full_dev = 0.0f64;
        for &m in &divisors {
            if crate::lattice::Factorization::of(m)?.radical() == radical_n {
                full_dev = full_dev.max((self.upper(m)? - 1.0).abs());
            }
        }
        add("full_radical_upper", -full_dev);

        Ok(checks)
    }

    /// Assemble the serializable report.
    pub fn report(&self) -> Result<ProbabilityReport, MeasureError> {
        let rows = self
            .lattice
            .divisors()
            .to_vec()
            .into_iter()
            .map(|m| self.row(m))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(ProbabilityReport {
            n: self.n(),
            rows,
            sigma: self.sigma_matrix(),
            checks: self.verify()?,
        })
    }
}

/// Convenience wrapper: evaluate and verify in one call.
pub fn verify_propositions(rho: &DensityMatrix) -> Result<Checks, MeasureError> {
    Probabilities::new(rho)?.verify()
}

impl ProbabilityReport {
    /// Compute the full report for a state.
    pub fn compute(rho: &DensityMatrix) -> Result<Self, MeasureError> {
        Probabilities::new(rho)?.report()
    }

    /// Whether every recorded check passed.
    pub fn all_checks_pass(&self) -> bool {
        checks_pass(&self.checks)
    }

    /// Pretty JSON form (stable key order).
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plain data serializes")
    }

    /// Parse the JSON form.
    pub fn from_json(text: &str) -> Result<Self, MeasureError> {
        serde_json::from_str(text).map_err(|e| MeasureError::Format(e.to_string()))
    }

    /// CSV form: one row per divisor.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("m,l,lt,u,ut,d\n");
        for row in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{},{}\n",
                row.m, row.l, row.lt, row.u, row.ut, row.d
            ));
        }
        out
    }
}
