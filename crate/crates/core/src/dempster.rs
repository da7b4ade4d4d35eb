//! Classical lower/upper probabilities from multivalued evidence.
//!
//! Evidence is a list of nonempty subsets of a finite frame, one per
//! source. A query set is scored by counting sources whose set lies
//! entirely inside it (belief), sources that straddle the boundary, and
//! sources entirely outside; belief and plausibility are exact rationals.
//! Selection maps refine each source to a single element and always
//! produce a probability between belief and plausibility. Capacity
//! checks classify arbitrary set functions on small frames.

use std::collections::{BTreeMap, BTreeSet};

use num_rational::Ratio;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Exact fraction type used throughout this module.
pub type Fraction = Ratio<i64>;

/// Largest frame for which subset enumeration is attempted.
pub const MAX_ENUMERATED_FRAME: usize = 20;

/// Errors from evidence construction and queries.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvidenceError {
    /// Frames must be nonempty.
    #[error("frame must be nonempty")]
    EmptyFrame,
    /// Frames must be duplicate-free.
    #[error("duplicate frame label {label}")]
    DuplicateLabel { label: i64 },
    /// There must be at least one evidence source.
    #[error("evidence must contain at least one set")]
    NoSources,
    /// Every evidence set must be nonempty.
    #[error("evidence set {index} is empty; every source must commit to at least one element")]
    EmptySet { index: usize },
    /// Evidence sets must live inside the frame.
    #[error("evidence set {index} contains {label}, which is outside the frame")]
    SetOutsideFrame { index: usize, label: i64 },
    /// Query sets must live inside the frame.
    #[error("query contains {label}, which is outside the frame")]
    QueryOutsideFrame { label: i64 },
    /// A selection must pick one element from each evidence set.
    #[error("selection has {found} choices, expected {expected}")]
    ChoiceCount { expected: usize, found: usize },
    /// Each selected element must belong to its source's set.
    #[error("choice {label} at position {index} is not in that evidence set")]
    InvalidChoice { index: usize, label: i64 },
    /// Subset enumeration is capped.
    #[error("frame of size {size} exceeds the enumeration limit {limit}")]
    FrameTooLarge { size: usize, limit: usize },
    /// Malformed serialized evidence or query syntax.
    #[error("invalid evidence: {0}")]
    Format(String),
}

/// Finite frame of integer labels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Frame {
    elements: BTreeSet<i64>,
}

impl Frame {
    /// Build from labels; rejects empty input and duplicates.
    pub fn new(labels: impl IntoIterator<Item = i64>) -> Result<Self, EvidenceError> {
        let mut elements = BTreeSet::new();
        for label in labels {
            if !elements.insert(label) {
                return Err(EvidenceError::DuplicateLabel { label });
            }
        }
        if elements.is_empty() {
            return Err(EvidenceError::EmptyFrame);
        }
        Ok(Self { elements })
    }

    /// The inclusive integer range `[min, max]`.
    pub fn range(min: i64, max: i64) -> Result<Self, EvidenceError> {
        if min > max {
            return Err(EvidenceError::EmptyFrame);
        }
        Ok(Self {
            elements: (min..=max).collect(),
        })
    }

    /// Number of labels.
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    /// Frames are never empty.
    pub fn is_empty(&self) -> bool {
        false
    }

    /// Membership test.
    pub fn contains(&self, label: i64) -> bool {
        self.elements.contains(&label)
    }

    /// Labels in increasing order.
    pub fn elements(&self) -> &BTreeSet<i64> {
        &self.elements
    }

    /// Complement of a set within the frame.
    pub fn complement(&self, a: &BTreeSet<i64>) -> BTreeSet<i64> {
        self.elements.difference(a).copied().collect()
    }
}

/// Parse a query set against a frame: either an inclusive range `"lo..hi"`
/// (intersected with the frame) or a comma-separated list of labels (each
/// of which must belong to the frame).
pub fn parse_set_spec(spec: &str, frame: &Frame) -> Result<BTreeSet<i64>, EvidenceError> {
    let spec = spec.trim();
    if let Some((lo, hi)) = spec.split_once("..") {
        let lo: i64 = lo
            .trim()
            .parse()
            .map_err(|_| EvidenceError::Format(format!("bad range bound {lo:?}")))?;
        let hi: i64 = hi
            .trim()
            .parse()
            .map_err(|_| EvidenceError::Format(format!("bad range bound {hi:?}")))?;
        Ok(frame
            .elements()
            .iter()
            .copied()
            .filter(|&x| lo <= x && x <= hi)
            .collect())
    } else {
        let mut out = BTreeSet::new();
        for part in spec.split(',') {
            let part = part.trim();
            if part.is_empty() {
                continue;
            }
            let label: i64 = part
                .parse()
                .map_err(|_| EvidenceError::Format(format!("bad label {part:?}")))?;
            if !frame.contains(label) {
                return Err(EvidenceError::QueryOutsideFrame { label });
            }
            out.insert(label);
        }
        Ok(out)
    }
}

/// Serialized evidence: a frame (range form or explicit labels) and the
/// per-source sets.
#[derive(Serialize, Deserialize)]
struct EvidenceFile {
    frame: FrameSpec,
    sets: Vec<Vec<i64>>,
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum FrameSpec {
    Range { min: i64, max: i64 },
    List(Vec<i64>),
}

/// A multivalued evidence map: one nonempty subset of the frame per source.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Evidence {
    frame: Frame,
    sets: Vec<BTreeSet<i64>>,
}

impl Evidence {
    /// Validate sources against the frame. Every set must be nonempty and
    /// contained in the frame; there must be at least one source.
    pub fn new(frame: Frame, sets: Vec<Vec<i64>>) -> Result<Self, EvidenceError> {
        if sets.is_empty() {
            return Err(EvidenceError::NoSources);
        }
        let mut checked = Vec::with_capacity(sets.len());
        for (index, raw) in sets.into_iter().enumerate() {
            let set: BTreeSet<i64> = raw.into_iter().collect();
            if set.is_empty() {
                return Err(EvidenceError::EmptySet { index });
            }
            if let Some(&label) = set.iter().find(|&&x| !frame.contains(x)) {
                return Err(EvidenceError::SetOutsideFrame { index, label });
            }
            checked.push(set);
        }
        Ok(Self { frame, sets: checked })
    }

    /// The frame.
    pub fn frame(&self) -> &Frame {
        &self.frame
    }

    /// Per-source sets in input order.
    pub fn sets(&self) -> &[BTreeSet<i64>] {
        &self.sets
    }

    /// Number of sources.
    pub fn source_count(&self) -> usize {
        self.sets.len()
    }

    fn check_query(&self, a: &BTreeSet<i64>) -> Result<(), EvidenceError> {
        if let Some(&label) = a.iter().find(|&&x| !self.frame.contains(x)) {
            return Err(EvidenceError::QueryOutsideFrame { label });
        }
        Ok(())
    }

    /// Count sources that are inside the query, straddling it, and outside
    /// it; the three counts sum to the number of sources.
    pub fn categorize(&self, a: &BTreeSet<i64>) -> Result<(usize, usize, usize), EvidenceError> {
        self.check_query(a)?;
        let mut inside = 0;
        let mut straddling = 0;
        let mut outside = 0;
        for set in &self.sets {
            if set.is_subset(a) {
                inside += 1;
            } else if set.iter().any(|x| a.contains(x)) {
                straddling += 1;
            } else {
                outside += 1;
            }
        }
        Ok((inside, straddling, outside))
    }

    /// Belief (lower probability): fraction of sources entirely inside the
    /// query.
    pub fn belief(&self, a: &BTreeSet<i64>) -> Result<Fraction, EvidenceError> {
        let (inside, _, _) = self.categorize(a)?;
        Ok(Fraction::new(inside as i64, self.sets.len() as i64))
    }

    /// Plausibility (upper probability): fraction of sources touching the
    /// query; equals `1 - belief(complement)` exactly.
    pub fn plausibility(&self, a: &BTreeSet<i64>) -> Result<Fraction, EvidenceError> {
        let (inside, straddling, _) = self.categorize(a)?;
        Ok(Fraction::new(
            (inside + straddling) as i64,
            self.sets.len() as i64,
        ))
    }

    /// Don't-know weight: plausibility minus belief, the straddling
    /// fraction.
    pub fn dont_know(&self, a: &BTreeSet<i64>) -> Result<Fraction, EvidenceError> {
        let (_, straddling, _) = self.categorize(a)?;
        Ok(Fraction::new(straddling as i64, self.sets.len() as i64))
    }

    /// Validate a selection: one chosen element per source, each from its
    /// own set.
    pub fn selection(&self, choices: Vec<i64>) -> Result<Selection<'_>, EvidenceError> {
        if choices.len() != self.sets.len() {
            return Err(EvidenceError::ChoiceCount {
                expected: self.sets.len(),
                found: choices.len(),
            });
        }
        for (index, (&label, set)) in choices.iter().zip(&self.sets).enumerate() {
            if !set.contains(&label) {
                return Err(EvidenceError::InvalidChoice { index, label });
            }
        }
        Ok(Selection { evidence: self, choices })
    }

    /// Number of distinct selections (product of the set sizes).
    pub fn selection_count(&self) -> u128 {
        self.sets.iter().map(|s| s.len() as u128).product()
    }

    /// Iterate over every selection, in lexicographic order of per-source
    /// element choices.
    pub fn selections(&self) -> Selections<'_> {
        Selections {
            evidence: self,
            pools: self.sets.iter().map(|s| s.iter().copied().collect()).collect(),
            odometer: vec![0; self.sets.len()],
            done: false,
        }
    }

    /// Coarsen the frame to the algebra generated by the evidence sets and
    /// the given queries.
    ///
    /// Frame elements with identical membership patterns collapse into one
    /// block; the returned evidence and translated queries give the same
    /// belief and plausibility values as the originals, which makes
    /// exhaustive subset scans feasible.
    pub fn coarsen(&self, queries: &[BTreeSet<i64>]) -> (Evidence, Vec<BTreeSet<i64>>) {
        let mut block_of: BTreeMap<Vec<bool>, i64> = BTreeMap::new();
        let mut assignment: BTreeMap<i64, i64> = BTreeMap::new();
        for &x in self.frame.elements() {
            let signature: Vec<bool> = self
                .sets
                .iter()
                .map(|s| s.contains(&x))
                .chain(queries.iter().map(|q| q.contains(&x)))
                .collect();
            let next = block_of.len() as i64;
            let block = *block_of.entry(signature).or_insert(next);
            assignment.insert(x, block);
        }
        let frame = Frame::new(0..block_of.len() as i64).expect("nonempty");
        let sets = self
            .sets
            .iter()
            .map(|s| s.iter().map(|x| assignment[x]).collect::<BTreeSet<i64>>())
            .map(|s| s.into_iter().collect::<Vec<i64>>())
            .collect();
        let mapped_queries = queries
            .iter()
            .map(|q| q.iter().map(|x| assignment[x]).collect())
            .collect();
        let evidence = Evidence::new(frame, sets).expect("coarsening preserves validity");
        (evidence, mapped_queries)
    }

    /// Parse the JSON form and validate.
    pub fn from_json(text: &str) -> Result<Self, EvidenceError> {
        let file: EvidenceFile =
            serde_json::from_str(text).map_err(|e| EvidenceError::Format(e.to_string()))?;
        let frame = match file.frame {
            FrameSpec::Range { min, max } => Frame::range(min, max)?,
            FrameSpec::List(labels) => Frame::new(labels)?,
        };
        Evidence::new(frame, file.sets)
    }

    /// Serialize to the JSON form (explicit label list for the frame).
    pub fn to_json(&self) -> String {
        let file = EvidenceFile {
            frame: FrameSpec::List(self.frame.elements().iter().copied().collect()),
            sets: self
                .sets
                .iter()
                .map(|s| s.iter().copied().collect())
                .collect(),
        };
        serde_json::to_string_pretty(&file).expect("plain data serializes")
    }
}

/// A single-valued refinement: one chosen element per source.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Selection<'a> {
    evidence: &'a Evidence,
    choices: Vec<i64>,
}

impl Selection<'_> {
    /// The chosen elements in source order.
    pub fn choices(&self) -> &[i64] {
        &self.choices
    }

    /// Ordinary probability of the query under this selection: the
    /// fraction of chosen elements landing in it. Always between the
    /// evidence's belief and plausibility.
    pub fn probability(&self, a: &BTreeSet<i64>) -> Result<Fraction, EvidenceError> {
        self.evidence.check_query(a)?;
        let hits = self.choices.iter().filter(|x| a.contains(x)).count();
        Ok(Fraction::new(hits as i64, self.choices.len() as i64))
    }
}

/// Iterator over all selections of an evidence map.
pub struct Selections<'a> {
    evidence: &'a Evidence,
    pools: Vec<Vec<i64>>,
    odometer: Vec<usize>,
    done: bool,
}

impl<'a> Iterator for Selections<'a> {
    type Item = Selection<'a>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.done {
            return None;
        }
        let choices: Vec<i64> = self
            .pools
            .iter()
            .zip(&self.odometer)
            .map(|(pool, &i)| pool[i])
            .collect();
        // Advance the rightmost position, carrying leftward.
        let mut pos = self.pools.len();
        loop {
            if pos == 0 {
                self.done = true;
                break;
            }
            pos -= 1;
            self.odometer[pos] += 1;
            if self.odometer[pos] < self.pools[pos].len() {
                break;
            }
            self.odometer[pos] = 0;
        }
        Some(Selection {
            evidence: self.evidence,
            choices,
        })
    }
}

/// Verdicts of a capacity classification.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CapacityCheck {
    /// `mu(empty) = 0` and `mu(frame) = 1`.
    pub normalized: bool,
    /// `A subset of B` implies `mu(A) <= mu(B)`.
    pub monotone: bool,
    /// `mu` is the sum of its singleton values on every subset.
    pub additive: bool,
}

impl CapacityCheck {
    /// A capacity is a normalized monotone set function.
    pub fn is_capacity(&self) -> bool {
        self.normalized && self.monotone
    }

    /// An additive capacity is an ordinary probability measure.
    pub fn is_probability_measure(&self) -> bool {
        self.is_capacity() && self.additive
    }
}

/// Classify a set function by enumerating all subsets of the frame.
///
/// Monotonicity is checked on covering pairs `A` vs `A + {x}`, which
/// suffices by transitivity; additivity is checked as agreement with the
/// sum of singleton values, which on a finite powerset is equivalent to
/// finite additivity. Frames larger than [`MAX_ENUMERATED_FRAME`] are
/// rejected.
pub fn capacity_check(
    frame: &Frame,
    mu: impl Fn(&BTreeSet<i64>) -> Fraction,
) -> Result<CapacityCheck, EvidenceError> {
    let labels: Vec<i64> = frame.elements().iter().copied().collect();
    let k = labels.len();
    if k > MAX_ENUMERATED_FRAME {
        return Err(EvidenceError::FrameTooLarge {
            size: k,
            limit: MAX_ENUMERATED_FRAME,
        });
    }
    let subset = |mask: u32| -> BTreeSet<i64> {
        labels
            .iter()
            .enumerate()
            .filter(|(i, _)| mask >> i & 1 == 1)
            .map(|(_, &x)| x)
            .collect()
    };
    let full = (1u32 << k) - 1;
    let zero = Fraction::new(0, 1);
    let one = Fraction::new(1, 1);
    let normalized = mu(&subset(0)) == zero && mu(&subset(full)) == one;

    let mut monotone = true;
    let mut additive = true;
    let singleton_sum = |mask: u32| -> Fraction {
        (0..k)
            .filter(|i| mask >> i & 1 == 1)
            .map(|i| mu(&subset(1 << i)))
            .sum()
    };
    for mask in 0..=full {
        let value = mu(&subset(mask));
        if value != singleton_sum(mask) {
            additive = false;
        }
        for i in 0..k {
            if mask >> i & 1 == 0 && mu(&subset(mask | 1 << i)) < value {
                monotone = false;
            }
        }
    }
    Ok(CapacityCheck {
        normalized,
        monotone,
        additive,
    })
}

/// Added value of element `i` on top of the set `B`:
/// `mu(B + {i}) - mu(B)`.
pub fn capacity_added_value(
    mu: impl Fn(&BTreeSet<i64>) -> Fraction,
    i: i64,
    b: &BTreeSet<i64>,
) -> Fraction {
    let mut extended = b.clone();
    extended.insert(i);
    mu(&extended) - mu(b)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fr(n: i64, d: i64) -> Fraction {
        Fraction::new(n, d)
    }

    fn set(xs: &[i64]) -> BTreeSet<i64> {
        xs.iter().copied().collect()
    }

    /// Four sources of mark sets over the 0..=100 frame.
    fn marks() -> Evidence {
        Evidence::new(
            Frame::range(0, 100).unwrap(),
            vec![
                vec![60, 65, 72],
                vec![70, 72],
                vec![61, 65, 68],
                vec![50, 55, 58, 65],
            ],
        )
        .unwrap()
    }

    fn interval(lo: i64, hi: i64) -> BTreeSet<i64> {
        (lo..=hi).collect()
    }

    #[test]
    fn construction_is_validated() {
        assert_eq!(Frame::new(vec![]), Err(EvidenceError::EmptyFrame));
        assert_eq!(
            Frame::new(vec![1, 2, 1]),
            Err(EvidenceError::DuplicateLabel { label: 1 })
        );
        assert_eq!(Frame::range(5, 4), Err(EvidenceError::EmptyFrame));

        let frame = Frame::range(0, 9).unwrap();
        assert_eq!(
            Evidence::new(frame.clone(), vec![]),
            Err(EvidenceError::NoSources)
        );
        assert_eq!(
            Evidence::new(frame.clone(), vec![vec![1], vec![]]),
            Err(EvidenceError::EmptySet { index: 1 })
        );
        assert_eq!(
            Evidence::new(frame, vec![vec![1], vec![12]]),
            Err(EvidenceError::SetOutsideFrame { index: 1, label: 12 })
        );
    }

    #[test]
    fn mark_table_beliefs() {
        let ev = marks();
        let a1 = interval(60, 69);
        let a2 = interval(70, 100);
        let a12 = interval(60, 100);
        let a3 = interval(65, 75);

        assert_eq!(ev.belief(&a1).unwrap(), fr(1, 4));
        assert_eq!(ev.plausibility(&a1).unwrap(), fr(3, 4));
        assert_eq!(ev.belief(&a2).unwrap(), fr(1, 4));
        assert_eq!(ev.plausibility(&a2).unwrap(), fr(1, 2));
        assert_eq!(ev.belief(&a12).unwrap(), fr(3, 4));
        assert_eq!(ev.plausibility(&a12).unwrap(), fr(1, 1));
        assert_eq!(ev.belief(&a3).unwrap(), fr(1, 4));
        assert_eq!(ev.plausibility(&a3).unwrap(), fr(1, 1));

        assert_eq!(ev.categorize(&a1).unwrap(), (1, 2, 1));
    }

    #[test]
    fn whole_frame_and_empty_set() {
        let ev = marks();
        let omega: BTreeSet<i64> = ev.frame().elements().clone();
        assert_eq!(ev.belief(&omega).unwrap(), fr(1, 1));
        assert_eq!(ev.categorize(&omega).unwrap(), (4, 0, 0));
        assert_eq!(ev.plausibility(&set(&[])).unwrap(), fr(0, 1));
        assert!(ev.belief(&set(&[777])).is_err());
    }

    #[test]
    fn duality_is_exact() {
        let ev = marks();
        for a in [interval(60, 69), interval(70, 100), interval(65, 75), set(&[0])] {
            let complement = ev.frame().complement(&a);
            assert_eq!(
                ev.plausibility(&a).unwrap(),
                fr(1, 1) - ev.belief(&complement).unwrap()
            );
            assert!(ev.belief(&a).unwrap() + ev.belief(&complement).unwrap() <= fr(1, 1));
            // Double complement returns the original values.
            let back = ev.frame().complement(&complement);
            assert_eq!(ev.belief(&a).unwrap(), ev.belief(&back).unwrap());
            assert_eq!(ev.plausibility(&a).unwrap(), ev.plausibility(&back).unwrap());
        }
    }

    #[test]
    fn monotone_under_inclusion() {
        let ev = marks();
        let pairs = [
            (interval(60, 69), interval(60, 100)),
            (interval(70, 75), interval(65, 100)),
            (set(&[65]), interval(60, 69)),
        ];
        for (a, b) in pairs {
            assert!(a.is_subset(&b));
            assert!(ev.belief(&a).unwrap() <= ev.belief(&b).unwrap());
            assert!(ev.plausibility(&a).unwrap() <= ev.plausibility(&b).unwrap());
        }
    }

    #[test]
    fn selection_minimums_example() {
        let ev = marks();
        let mins: Vec<i64> = ev.sets().iter().map(|s| *s.iter().next().unwrap()).collect();
        assert_eq!(mins, vec![60, 70, 61, 50]);
        let selection = ev.selection(mins).unwrap();
        assert_eq!(
            selection.probability(&interval(70, 100)).unwrap(),
            fr(1, 4)
        );
        assert_eq!(
            selection.probability(&ev.frame().elements().clone()).unwrap(),
            fr(1, 1)
        );
    }

    #[test]
    fn invalid_selections_are_rejected() {
        let ev = marks();
        assert_eq!(
            ev.selection(vec![60, 70, 61]),
            Err(EvidenceError::ChoiceCount { expected: 4, found: 3 })
        );
        assert_eq!(
            ev.selection(vec![60, 70, 61, 51]),
            Err(EvidenceError::InvalidChoice { index: 3, label: 51 })
        );
    }

    #[test]
    fn all_selections_stay_in_the_interval() {
        let ev = marks();
        assert_eq!(ev.selection_count(), 72);
        let queries = [interval(60, 69), interval(70, 100), interval(65, 75)];
        let mut seen = 0usize;
        for selection in ev.selections() {
            for a in &queries {
                let q = selection.probability(a).unwrap();
                assert!(ev.belief(a).unwrap() <= q);
                assert!(q <= ev.plausibility(a).unwrap());
            }
            seen += 1;
        }
        assert_eq!(seen, 72);
    }

    #[test]
    fn coarsening_preserves_values() {
        let ev = marks();
        let queries = vec![interval(60, 69), interval(70, 100), interval(65, 75)];
        let (small, mapped) = ev.coarsen(&queries);
        assert_eq!(small.frame().len(), 12);
        for (a, b) in queries.iter().zip(&mapped) {
            assert_eq!(ev.belief(a).unwrap(), small.belief(b).unwrap());
            assert_eq!(ev.plausibility(a).unwrap(), small.plausibility(b).unwrap());
        }
    }

    #[test]
    fn belief_is_supermodular_plausibility_submodular() {
        let ev = marks();
        let (small, _) = ev.coarsen(&[]);
        let labels: Vec<i64> = small.frame().elements().iter().copied().collect();
        let k = labels.len();
        assert_eq!(k, 7);
        let subset = |mask: u32| -> BTreeSet<i64> {
            labels
                .iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .map(|(_, &x)| x)
                .collect()
        };
        for am in 0..(1u32 << k) {
            for bm in 0..(1u32 << k) {
                let a = subset(am);
                let b = subset(bm);
                let union = subset(am | bm);
                let inter = subset(am & bm);
                let l = |s: &BTreeSet<i64>| small.belief(s).unwrap();
                let u = |s: &BTreeSet<i64>| small.plausibility(s).unwrap();
                assert!(l(&union) + l(&inter) >= l(&a) + l(&b));
                assert!(u(&union) + u(&inter) <= u(&a) + u(&b));
            }
        }
    }

    #[test]
    fn singleton_evidence_is_kolmogorov() {
        let frame = Frame::range(0, 9).unwrap();
        let ev = Evidence::new(
            frame,
            vec![vec![1], vec![4], vec![4], vec![7], vec![9]],
        )
        .unwrap();
        let (small, _) = ev.coarsen(&[]);
        let labels: Vec<i64> = small.frame().elements().iter().copied().collect();
        let k = labels.len();
        let subset = |mask: u32| -> BTreeSet<i64> {
            labels
                .iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .map(|(_, &x)| x)
                .collect()
        };
        for am in 0..(1u32 << k) {
            let a = subset(am);
            // No straddling sources, so belief and plausibility agree.
            let (_, straddling, _) = small.categorize(&a).unwrap();
            assert_eq!(straddling, 0);
            assert_eq!(small.belief(&a).unwrap(), small.plausibility(&a).unwrap());
            for bm in 0..(1u32 << k) {
                let b = subset(bm);
                let union = subset(am | bm);
                let inter = subset(am & bm);
                let q = |s: &BTreeSet<i64>| small.belief(s).unwrap();
                // Modularity holds with equality, exactly.
                assert_eq!(q(&union) + q(&inter), q(&a) + q(&b));
            }
        }
    }

    #[test]
    fn capacity_classification() {
        let ev = marks();
        let (small, _) = ev.coarsen(&[]);
        let belief = |a: &BTreeSet<i64>| small.belief(a).unwrap();
        let verdict = capacity_check(small.frame(), belief).unwrap();
        assert!(verdict.is_capacity());
        assert!(!verdict.additive);
        assert!(!verdict.is_probability_measure());

        let frame = Frame::range(1, 4).unwrap();
        let counting = |a: &BTreeSet<i64>| fr(a.len() as i64, 4);
        let verdict = capacity_check(&frame, counting).unwrap();
        assert!(verdict.is_probability_measure());

        let too_big = Frame::range(0, 40).unwrap();
        assert!(matches!(
            capacity_check(&too_big, counting),
            Err(EvidenceError::FrameTooLarge { .. })
        ));
    }

    #[test]
    fn capacity_added_value_for_additive_measures() {
        let counting = |a: &BTreeSet<i64>| fr(a.len() as i64, 4);
        // For an additive measure the added value of a fresh element is
        // its singleton weight.
        assert_eq!(capacity_added_value(counting, 3, &set(&[1, 2])), fr(1, 4));
        assert_eq!(capacity_added_value(counting, 2, &set(&[1, 2])), fr(0, 1));
        // For belief it can exceed the singleton weight: committing the
        // last member of a source's set unlocks that source.
        let ev = marks();
        let belief = |a: &BTreeSet<i64>| ev.belief(a).unwrap();
        let base = interval(70, 71);
        assert_eq!(belief(&set(&[72])), fr(0, 1));
        assert_eq!(capacity_added_value(belief, 72, &base), fr(1, 4));
    }

    #[test]
    fn set_specs_parse() {
        let frame = Frame::range(0, 100).unwrap();
        assert_eq!(parse_set_spec("60..69", &frame).unwrap(), interval(60, 69));
        assert_eq!(
            parse_set_spec("60, 65,72", &frame).unwrap(),
            set(&[60, 65, 72])
        );
        assert!(matches!(
            parse_set_spec("60..x", &frame),
            Err(EvidenceError::Format(_))
        ));
        assert_eq!(
            parse_set_spec("101", &frame),
            Err(EvidenceError::QueryOutsideFrame { label: 101 })
        );
        // Ranges clip to the frame.
        let sparse = Frame::new(vec![2, 4, 8]).unwrap();
        assert_eq!(parse_set_spec("3..9", &sparse).unwrap(), set(&[4, 8]));
    }

    #[test]
    fn evidence_round_trips_through_json() {
        let ev = marks();
        let text = ev.to_json();
        let back = Evidence::from_json(&text).unwrap();
        assert_eq!(ev, back);

        let range_form = r#"{"frame":{"min":0,"max":10},"sets":[[1,2],[3]]}"#;
        let parsed = Evidence::from_json(range_form).unwrap();
        assert_eq!(parsed.frame().len(), 11);
        assert_eq!(parsed.source_count(), 2);

        let empty_set = r#"{"frame":{"min":0,"max":10},"sets":[[1],[]]}"#;
        assert_eq!(
            Evidence::from_json(empty_set),
            Err(EvidenceError::EmptySet { index: 1 })
        );
    }
}
