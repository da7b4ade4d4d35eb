//! Python bindings for the divisor-lattice probability toolkit.
//!
//! The module mirrors the core crate's surface: the divisor lattice and
//! its operations, density matrices and their lower/upper probability
//! functionals, measurement simulation, classical interval evidence, and
//! the law-verification sweeps. Fractions are returned as
//! `(numerator, denominator)` tuples; feed them to `fractions.Fraction`
//! on the Python side for exact arithmetic.

use std::collections::{BTreeMap, BTreeSet};

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use sublat_core::dempster::{Evidence, Fraction, Frame};
use sublat_core::lattice::DivisorLattice;
use sublat_core::measures::{self, Checks, Probabilities};
use sublat_core::quantum::DensityMatrix;
use sublat_core::sampling::{MeasurementRecord, RNG_ALGORITHM};
use sublat_core::verify;

fn invalid(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn fraction_parts(f: Fraction) -> (i64, i64) {
    (*f.numer(), *f.denom())
}

fn checks_to_map(checks: Checks) -> BTreeMap<String, (bool, f64)> {
    checks
        .into_iter()
        .map(|(name, c)| (name, (c.pass, c.worst_slack)))
        .collect()
}

/// The divisors of a modulus, ordered by divisibility.
#[pyclass(name = "DivisorLattice")]
struct PyDivisorLattice {
    inner: DivisorLattice,
}

#[pymethods]
impl PyDivisorLattice {
    #[new]
    fn new(n: u64) -> PyResult<Self> {
        Ok(Self {
            inner: DivisorLattice::new(n).map_err(invalid)?,
        })
    }

    /// Modulus generating the lattice.
    #[getter]
    fn n(&self) -> u64 {
        self.inner.n()
    }

    /// All divisors in increasing order.
    fn divisors(&self) -> Vec<u64> {
        self.inner.divisors().to_vec()
    }

    /// Whether `k` divides `m` (the lattice order).
    fn leq(&self, k: u64, m: u64) -> PyResult<bool> {
        self.inner.leq(k, m).map_err(invalid)
    }

    /// Greatest common divisor of two lattice elements.
    fn meet(&self, k: u64, m: u64) -> PyResult<u64> {
        self.inner.meet(k, m).map_err(invalid)
    }

    /// Least common multiple of two lattice elements.
    fn join(&self, k: u64, m: u64) -> PyResult<u64> {
        self.inner.join(k, m).map_err(invalid)
    }

    /// Largest divisor coprime to `k`.
    fn negation(&self, k: u64) -> PyResult<u64> {
        self.inner.negation(k).map_err(invalid)
    }

    /// Closure of `k` under double negation: the full prime powers of
    /// the primes dividing `k`.
    fn double_negation(&self, k: u64) -> PyResult<u64> {
        self.inner.double_negation(k).map_err(invalid)
    }

    /// Largest divisor whose meet with `k` lies below `m`.
    fn implication(&self, k: u64, m: u64) -> PyResult<u64> {
        self.inner.implication(k, m).map_err(invalid)
    }

    /// Whether `r` has a complement (is coprime to its cofactor).
    fn is_hall(&self, r: u64) -> PyResult<bool> {
        self.inner.is_hall(r).map_err(invalid)
    }

    /// The complemented elements, a Boolean sublattice.
    fn hall_divisors(&self) -> Vec<u64> {
        self.inner.hall_divisors()
    }

    /// All covering pairs `(a, b)` with `b / a` prime.
    fn covering_pairs(&self) -> Vec<(u64, u64)> {
        self.inner.covering_pairs()
    }

    /// All maximal chains from the top to the bottom element.
    fn maximal_chains(&self) -> Vec<Vec<u64>> {
        self.inner.maximal_chains()
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    fn __contains__(&self, m: u64) -> bool {
        self.inner.contains(m)
    }

    fn __repr__(&self) -> String {
        format!("DivisorLattice(n={})", self.inner.n())
    }
}

/// A density matrix; diagonal states are the common case and the
/// constructor takes the diagonal directly. Full complex matrices enter
/// through `from_json`.
#[pyclass(name = "DensityMatrix")]
struct PyDensityMatrix {
    inner: DensityMatrix,
}

#[pymethods]
impl PyDensityMatrix {
    #[new]
    fn new(diagonal: Vec<f64>) -> PyResult<Self> {
        Ok(Self {
            inner: DensityMatrix::from_diagonal(&diagonal).map_err(invalid)?,
        })
    }

    /// Uniform state of the given dimension.
    #[staticmethod]
    fn maximally_mixed(n: usize) -> PyResult<Self> {
        Ok(Self {
            inner: DensityMatrix::maximally_mixed(n).map_err(invalid)?,
        })
    }

    /// Seeded random diagonal state (uniform on the simplex).
    #[staticmethod]
    fn random(n: usize, seed: u64) -> PyResult<Self> {
        Ok(Self {
            inner: DensityMatrix::random(n, seed).map_err(invalid)?,
        })
    }

    /// Parse the JSON interchange form (`diagonal` or `entries` shape).
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(Self {
            inner: DensityMatrix::from_json(text).map_err(invalid)?,
        })
    }

    /// Dimension of the underlying space.
    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    /// Real diagonal of the matrix.
    fn diagonal(&self) -> Vec<f64> {
        self.inner.diagonal()
    }

    /// Trace (1 within tolerance for a valid state).
    fn trace(&self) -> f64 {
        self.inner.trace()
    }

    /// Smallest eigenvalue; nonnegative within tolerance for a state.
    fn min_eigenvalue(&self) -> f64 {
        self.inner.min_eigenvalue()
    }

    /// Whether all off-diagonal entries vanish.
    fn is_diagonal(&self) -> bool {
        self.inner.is_diagonal()
    }

    /// JSON interchange form.
    fn to_json(&self) -> String {
        self.inner.to_json()
    }

    fn __repr__(&self) -> String {
        format!("DensityMatrix(dim={})", self.inner.dim())
    }
}

/// Lower/upper probability functionals of one state on the divisor
/// lattice of its dimension.
#[pyclass(name = "Probabilities")]
struct PyProbabilities {
    inner: Probabilities,
}

#[pymethods]
impl PyProbabilities {
    #[new]
    fn new(state: &PyDensityMatrix) -> PyResult<Self> {
        Ok(Self {
            inner: Probabilities::new(&state.inner).map_err(invalid)?,
        })
    }

    /// Context dimension.
    #[getter]
    fn n(&self) -> u64 {
        self.inner.n()
    }

    /// Lower probability of the divisor `m`.
    fn lower(&self, m: u64) -> PyResult<f64> {
        self.inner.lower(m).map_err(invalid)
    }

    /// Upper probability of the divisor `m`.
    fn upper(&self, m: u64) -> PyResult<f64> {
        self.inner.upper(m).map_err(invalid)
    }

    /// Lower probability with the vacuum weight removed.
    fn lower_tilde(&self, m: u64) -> PyResult<f64> {
        self.inner.lower_tilde(m).map_err(invalid)
    }

    /// Upper probability with the vacuum weight removed.
    fn upper_tilde(&self, m: u64) -> PyResult<f64> {
        self.inner.upper_tilde(m).map_err(invalid)
    }

    /// Width of the probability interval at `m`.
    fn dont_know(&self, m: u64) -> PyResult<f64> {
        self.inner.dont_know(m).map_err(invalid)
    }

    /// Lower probability of the negation of `m`.
    fn complement_lower(&self, m: u64) -> PyResult<f64> {
        self.inner.complement_lower(m).map_err(invalid)
    }

    /// One minus the lower probability of the double negation of `m`.
    fn complement_upper(&self, m: u64) -> PyResult<f64> {
        self.inner.complement_upper(m).map_err(invalid)
    }

    /// Supermodularity defect of the lower functional at a pair.
    fn sigma(&self, m1: u64, m2: u64) -> PyResult<f64> {
        self.inner.sigma(m1, m2).map_err(invalid)
    }

    /// Submodularity defect of the upper functional at a pair.
    fn upper_modularity_defect(&self, m1: u64, m2: u64) -> PyResult<f64> {
        self.inner.upper_modularity_defect(m1, m2).map_err(invalid)
    }

    /// Lower capacity of an arbitrary divisor subset.
    fn capacity_lower(&self, subset: Vec<u64>) -> PyResult<f64> {
        self.inner.capacity_lower(&subset).map_err(invalid)
    }

    /// Upper capacity of an arbitrary divisor subset.
    fn capacity_upper(&self, subset: Vec<u64>) -> PyResult<f64> {
        self.inner.capacity_upper(&subset).map_err(invalid)
    }

    /// All property checks for this state: name -> (pass, worst_slack).
    fn verify(&self) -> PyResult<BTreeMap<String, (bool, f64)>> {
        Ok(checks_to_map(self.inner.verify().map_err(invalid)?))
    }

    /// Full tabulated report (rows, defect table, checks) as JSON.
    fn report_json(&self) -> PyResult<String> {
        Ok(self.inner.report().map_err(invalid)?.to_json())
    }

    fn __repr__(&self) -> String {
        format!("Probabilities(n={})", self.inner.n())
    }
}

/// Counts from simulating the canonical measurement of a state.
#[pyclass(name = "MeasurementRecord")]
struct PyMeasurementRecord {
    inner: MeasurementRecord,
}

#[pymethods]
impl PyMeasurementRecord {
    /// Draw `shots` outcomes from the state's diagonal with a seeded
    /// generator; identical arguments give identical counts.
    #[staticmethod]
    fn simulate(state: &PyDensityMatrix, shots: u64, seed: u64) -> PyResult<Self> {
        Ok(Self {
            inner: MeasurementRecord::simulate(&state.inner, shots, seed).map_err(invalid)?,
        })
    }

    /// Parse the JSON interchange form.
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(Self {
            inner: MeasurementRecord::from_json(text).map_err(invalid)?,
        })
    }

    /// Context dimension.
    #[getter]
    fn n(&self) -> u64 {
        self.inner.n()
    }

    /// Seed the outcomes were drawn with.
    #[getter]
    fn seed(&self) -> u64 {
        self.inner.seed()
    }

    /// Total number of shots.
    #[getter]
    fn total(&self) -> u64 {
        self.inner.total()
    }

    /// Generator identifier.
    #[getter]
    fn algorithm(&self) -> String {
        self.inner.algorithm().to_string()
    }

    /// Outcome counts indexed by residue.
    fn counts(&self) -> Vec<u64> {
        self.inner.counts().to_vec()
    }

    /// Frequency estimate of the lower probability of `m`.
    fn estimate_lower(&self, m: u64) -> PyResult<f64> {
        self.inner.estimate_lower(m).map_err(invalid)
    }

    /// Frequency estimate of the upper probability of `m`.
    fn estimate_upper(&self, m: u64) -> PyResult<f64> {
        self.inner.estimate_upper(m).map_err(invalid)
    }

    /// Frequency estimate of the interval width at `m`.
    fn estimate_dont_know(&self, m: u64) -> PyResult<f64> {
        self.inner.estimate_dont_know(m).map_err(invalid)
    }

    /// Frequency landing in the sandwich layer of `k` between `m` and
    /// its double negation; requires `m | k` and `k | ~~m`.
    fn estimate_intermediate(&self, m: u64, k: u64) -> PyResult<f64> {
        self.inner.estimate_intermediate(m, k).map_err(invalid)
    }

    /// JSON interchange form.
    fn to_json(&self) -> String {
        self.inner.to_json()
    }

    fn __repr__(&self) -> String {
        format!(
            "MeasurementRecord(n={}, total={}, seed={})",
            self.inner.n(),
            self.inner.total(),
            self.inner.seed()
        )
    }
}

/// Equally credible set-valued sources over a finite frame; queries
/// return exact fractions as `(numerator, denominator)`.
#[pyclass(name = "Evidence")]
struct PyEvidence {
    inner: Evidence,
}

impl PyEvidence {
    fn query(&self, set: Vec<i64>) -> BTreeSet<i64> {
        set.into_iter().collect()
    }
}

#[pymethods]
impl PyEvidence {
    /// Evidence over the integer frame `frame_min..=frame_max`.
    #[new]
    fn new(frame_min: i64, frame_max: i64, sets: Vec<Vec<i64>>) -> PyResult<Self> {
        let frame = Frame::range(frame_min, frame_max).map_err(invalid)?;
        Ok(Self {
            inner: Evidence::new(frame, sets).map_err(invalid)?,
        })
    }

    /// Evidence over an explicit list of frame labels.
    #[staticmethod]
    fn over_labels(labels: Vec<i64>, sets: Vec<Vec<i64>>) -> PyResult<Self> {
        let frame = Frame::new(labels).map_err(invalid)?;
        Ok(Self {
            inner: Evidence::new(frame, sets).map_err(invalid)?,
        })
    }

    /// Parse the JSON interchange form.
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(Self {
            inner: Evidence::from_json(text).map_err(invalid)?,
        })
    }

    /// Number of sources.
    #[getter]
    fn source_count(&self) -> usize {
        self.inner.source_count()
    }

    /// The frame's elements in increasing order.
    fn frame_elements(&self) -> Vec<i64> {
        self.inner.frame().elements().iter().copied().collect()
    }

    /// The source sets, each in increasing order.
    fn sets(&self) -> Vec<Vec<i64>> {
        self.inner
            .sets()
            .iter()
            .map(|s| s.iter().copied().collect())
            .collect()
    }

    /// Sources (inside, straddling, outside) the query set.
    fn categorize(&self, set: Vec<i64>) -> PyResult<(usize, usize, usize)> {
        self.inner.categorize(&self.query(set)).map_err(invalid)
    }

    /// Fraction of sources certainly inside the query set.
    fn belief(&self, set: Vec<i64>) -> PyResult<(i64, i64)> {
        Ok(fraction_parts(
            self.inner.belief(&self.query(set)).map_err(invalid)?,
        ))
    }

    /// Fraction of sources compatible with the query set.
    fn plausibility(&self, set: Vec<i64>) -> PyResult<(i64, i64)> {
        Ok(fraction_parts(
            self.inner.plausibility(&self.query(set)).map_err(invalid)?,
        ))
    }

    /// Width of the belief/plausibility interval.
    fn dont_know(&self, set: Vec<i64>) -> PyResult<(i64, i64)> {
        Ok(fraction_parts(
            self.inner.dont_know(&self.query(set)).map_err(invalid)?,
        ))
    }

    /// Number of single-element refinements of the sources.
    fn selection_count(&self) -> u128 {
        self.inner.selection_count()
    }

    /// Quotient evidence over the coarsest partition separating the
    /// sources and queries, returned with the queries translated to
    /// block labels; beliefs and plausibilities are preserved.
    fn coarsen(&self, queries: Vec<Vec<i64>>) -> (Self, Vec<Vec<i64>>) {
        let queries: Vec<BTreeSet<i64>> =
            queries.into_iter().map(|q| q.into_iter().collect()).collect();
        let (quotient, mapped) = self.inner.coarsen(&queries);
        (
            Self { inner: quotient },
            mapped
                .into_iter()
                .map(|q| q.into_iter().collect())
                .collect(),
        )
    }

    /// JSON interchange form.
    fn to_json(&self) -> String {
        self.inner.to_json()
    }

    fn __repr__(&self) -> String {
        format!(
            "Evidence(sources={}, frame={})",
            self.inner.source_count(),
            self.inner.frame().len()
        )
    }
}

/// Exhaustively check the order/lattice laws for one modulus; returns
/// (assertions_checked, failure_descriptions).
#[pyfunction]
fn lattice_laws(n: u64) -> PyResult<(u64, Vec<String>)> {
    let report = verify::lattice_laws(n).map_err(invalid)?;
    Ok((report.checked, report.failures))
}

/// Exhaustively check the projector-support identities for one modulus;
/// returns (assertions_checked, failure_descriptions).
#[pyfunction]
fn projector_identities(n: u64) -> PyResult<(u64, Vec<String>)> {
    let report = verify::projector_identities(n).map_err(invalid)?;
    Ok((report.checked, report.failures))
}

/// Operator-norm-style defect of the discrete Fourier matrix from
/// unitarity; tiny for all practical dimensions.
#[pyfunction]
fn fourier_unitarity(n: u64) -> PyResult<f64> {
    verify::fourier_unitarity(n).map_err(invalid)
}

/// Deterministic per-cell seed used by the randomized sweep.
#[pyfunction]
fn cell_seed(base_seed: u64, n: u64, trial: u32) -> u64 {
    verify::cell_seed(base_seed, n, trial)
}

/// Randomized property sweep over all moduli up to `n_max` with
/// `trials` seeded states each; returns the summary as JSON.
#[pyfunction]
fn sweep_json(n_max: u64, trials: u32, base_seed: u64) -> PyResult<String> {
    Ok(verify::sweep(n_max, trials, base_seed)
        .map_err(invalid)?
        .to_json())
}

/// All property checks for one state: name -> (pass, worst_slack).
#[pyfunction]
fn verify_propositions(state: &PyDensityMatrix) -> PyResult<BTreeMap<String, (bool, f64)>> {
    Ok(checks_to_map(
        measures::verify_propositions(&state.inner).map_err(invalid)?,
    ))
}

#[pymodule]
fn sublat_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyDivisorLattice>()?;
    m.add_class::<PyDensityMatrix>()?;
    m.add_class::<PyProbabilities>()?;
    m.add_class::<PyMeasurementRecord>()?;
    m.add_class::<PyEvidence>()?;
    m.add_function(wrap_pyfunction!(lattice_laws, m)?)?;
    m.add_function(wrap_pyfunction!(projector_identities, m)?)?;
    m.add_function(wrap_pyfunction!(fourier_unitarity, m)?)?;
    m.add_function(wrap_pyfunction!(cell_seed, m)?)?;
    m.add_function(wrap_pyfunction!(sweep_json, m)?)?;
    m.add_function(wrap_pyfunction!(verify_propositions, m)?)?;
    m.add("RNG_ALGORITHM", RNG_ALGORITHM)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    /// One embedded-interpreter test: register the module, then drive it
    /// through Python attribute access exactly as a script would.
    #[test]
    fn module_is_usable_from_an_embedded_interpreter() {
        pyo3::append_to_inittab!(sublat_py);
        Python::initialize();
        Python::attach(|py| {
            let m = py.import("sublat_py").expect("module imports");

            let lattice = m
                .getattr("DivisorLattice")
                .unwrap()
                .call1((18u64,))
                .unwrap();
            let meet: u64 = lattice
                .call_method1("meet", (6u64, 9u64))
                .unwrap()
                .extract()
                .unwrap();
            assert_eq!(meet, 3);
            let negation: u64 = lattice
                .call_method1("negation", (2u64,))
                .unwrap()
                .extract()
                .unwrap();
            assert_eq!(negation, 9);
            let hall: Vec<u64> = lattice
                .call_method0("hall_divisors")
                .unwrap()
                .extract()
                .unwrap();
            assert_eq!(hall, vec![1, 2, 9, 18]);
            assert!(lattice
                .getattr("n")
                .unwrap()
                .extract::<u64>()
                .unwrap()
                == 18);

            let state = m
                .getattr("DensityMatrix")
                .unwrap()
                .call_method1("maximally_mixed", (18usize,))
                .unwrap();
            let probabilities = m
                .getattr("Probabilities")
                .unwrap()
                .call1((&state,))
                .unwrap();
            let lower: f64 = probabilities
                .call_method1("lower", (9u64,))
                .unwrap()
                .extract()
                .unwrap();
            assert!((lower - 0.5).abs() < 1e-12);
            let checks: BTreeMap<String, (bool, f64)> = probabilities
                .call_method0("verify")
                .unwrap()
                .extract()
                .unwrap();
            assert_eq!(checks.len(), 12);
            assert!(checks.values().all(|(pass, _)| *pass));

            let record = m
                .getattr("MeasurementRecord")
                .unwrap()
                .call_method1("simulate", (&state, 1000u64, 7u64))
                .unwrap();
            let total: u64 = record.getattr("total").unwrap().extract().unwrap();
            assert_eq!(total, 1000);

            let evidence = m
                .getattr("Evidence")
                .unwrap()
                .call1((0i64, 10i64, vec![vec![1i64, 2], vec![2i64, 3]]))
                .unwrap();
            let belief: (i64, i64) = evidence
                .call_method1("belief", (vec![1i64, 2],))
                .unwrap()
                .extract()
                .unwrap();
            assert_eq!(belief, (1, 2));

            let defect: f64 = m
                .getattr("fourier_unitarity")
                .unwrap()
                .call1((12u64,))
                .unwrap()
                .extract()
                .unwrap();
            assert!(defect < 1e-12);
        });
    }
}
