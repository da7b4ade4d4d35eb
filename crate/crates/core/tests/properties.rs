//! Randomized cross-module properties: the lattice laws feed the
//! projector supports, the supports feed the functionals, and the
//! functionals bound every estimator and refinement.

use std::collections::BTreeSet;

use proptest::prelude::*;

use sublat_core::dempster::{Evidence, Fraction, Frame};
use sublat_core::lattice::DivisorLattice;
use sublat_core::measures::{classify, Modularity, Probabilities};
use sublat_core::quantum::{DensityMatrix, ProjectorSupport};
use sublat_core::sampling::MeasurementRecord;

const TOL: f64 = 1e-10;

fn divisor(lattice: &DivisorLattice, pick: u64) -> u64 {
    let ds = lattice.divisors();
    ds[(pick % ds.len() as u64) as usize]
}

fn seeded_state(n: u64, seed: u64) -> Probabilities {
    let diagonal = DensityMatrix::random_diagonal(n as usize, seed).unwrap();
    let rho = DensityMatrix::from_diagonal(&diagonal).unwrap();
    Probabilities::new(&rho).unwrap()
}

proptest! {
    #[test]
    fn implication_is_the_residual_of_the_meet(
        n in 1u64..=200,
        pa in any::<u64>(),
        pb in any::<u64>(),
        pc in any::<u64>(),
    ) {
        let lat = DivisorLattice::new(n).unwrap();
        let (a, b, c) = (divisor(&lat, pa), divisor(&lat, pb), divisor(&lat, pc));
        let imp = lat.implication(b, c).unwrap();
        prop_assert_eq!(
            lat.leq(lat.meet(a, b).unwrap(), c).unwrap(),
            lat.leq(a, imp).unwrap()
        );
    }

    #[test]
    fn negation_is_antitone_and_stabilizes(
        n in 1u64..=200,
        pa in any::<u64>(),
        pb in any::<u64>(),
    ) {
        let lat = DivisorLattice::new(n).unwrap();
        let (a, b) = (divisor(&lat, pa), divisor(&lat, pb));
        if b % a == 0 {
            prop_assert_eq!(lat.negation(a).unwrap() % lat.negation(b).unwrap(), 0);
        }
        let neg = lat.negation(a).unwrap();
        prop_assert_eq!(
            lat.negation(lat.double_negation(a).unwrap()).unwrap(),
            neg
        );
        prop_assert_eq!(lat.meet(a, neg).unwrap(), 1);
    }

    #[test]
    fn support_intersection_is_the_meet_support(
        n in 1u64..=200,
        pa in any::<u64>(),
        pb in any::<u64>(),
    ) {
        let lat = DivisorLattice::new(n).unwrap();
        let (a, b) = (divisor(&lat, pa), divisor(&lat, pb));
        let sa = ProjectorSupport::subsystem(a, n).unwrap();
        let sb = ProjectorSupport::subsystem(b, n).unwrap();
        let meet = ProjectorSupport::subsystem(lat.meet(a, b).unwrap(), n).unwrap();
        let inter: BTreeSet<u64> =
            sa.indices().intersection(sb.indices()).copied().collect();
        prop_assert_eq!(&inter, meet.indices());
    }

    #[test]
    fn lower_functional_is_supermodular_on_random_states(
        n in 1u64..=60,
        seed in any::<u64>(),
        pa in any::<u64>(),
        pb in any::<u64>(),
    ) {
        let p = seeded_state(n, seed);
        let (a, b) = (divisor(p.lattice(), pa), divisor(p.lattice(), pb));
        prop_assert!(p.sigma(a, b).unwrap() >= -TOL);
        prop_assert!(p.upper_modularity_defect(a, b).unwrap() <= TOL);
    }

    #[test]
    fn ambiguity_gap_is_the_undecided_region_weight(
        n in 1u64..=60,
        seed in any::<u64>(),
        pm in any::<u64>(),
    ) {
        let p = seeded_state(n, seed);
        let m = divisor(p.lattice(), pm);
        let region = ProjectorSupport::dont_know(m, n).unwrap();
        let weight: f64 = region
            .indices()
            .iter()
            .map(|&r| p.diagonal()[r as usize])
            .sum();
        prop_assert!((p.dont_know(m).unwrap() - weight).abs() <= TOL);
        prop_assert!(p.dont_know(m).unwrap() >= -TOL);
    }

    #[test]
    fn added_value_difference_is_the_modularity_defect(
        n in 1u64..=60,
        seed in any::<u64>(),
        pa in any::<u64>(),
        pb in any::<u64>(),
    ) {
        let p = seeded_state(n, seed);
        let (m, k) = (divisor(p.lattice(), pa), divisor(p.lattice(), pb));
        let meet = p.lattice().meet(m, k).unwrap();
        let diff = p.added_value(m, k).unwrap() - p.added_value(m, meet).unwrap();
        prop_assert!((diff - p.sigma(m, k).unwrap()).abs() <= TOL);
        // Joining something you already cover adds nothing.
        prop_assert_eq!(p.added_value(meet, k).unwrap(), 0.0);
    }

    #[test]
    fn lower_functional_classifies_supermodular(
        n in 2u64..=36,
        seed in any::<u64>(),
    ) {
        let p = seeded_state(n, seed);
        let verdict = classify(p.lattice(), |m| p.lower(m).unwrap(), TOL);
        prop_assert!(matches!(
            verdict,
            Modularity::Supermodular | Modularity::Modular
        ));
        let upper = classify(p.lattice(), |m| p.upper(m).unwrap(), TOL);
        prop_assert!(matches!(
            upper,
            Modularity::Submodular | Modularity::Modular
        ));
    }

    #[test]
    fn estimates_are_frequencies_inside_the_interval(
        seed in any::<u64>(),
        shots in 200u64..=2000,
    ) {
        let rho = DensityMatrix::from_json(
            &std::fs::read_to_string(
                concat!(env!("CARGO_MANIFEST_DIR"), "/../../fixtures/rho18.json"),
            )
            .unwrap(),
        )
        .unwrap();
        let record = MeasurementRecord::simulate(&rho, shots, seed).unwrap();
        let lat = DivisorLattice::new(18).unwrap();
        for &m in lat.divisors() {
            let low = record.estimate_lower(m).unwrap();
            let high = record.estimate_upper(m).unwrap();
            prop_assert!((0.0..=1.0).contains(&low));
            prop_assert!(low <= high);
            let gap = record.estimate_dont_know(m).unwrap();
            prop_assert_eq!(gap, high - low);
        }
    }

    #[test]
    fn belief_and_plausibility_are_dual_frequencies(
        sets in proptest::collection::vec(
            proptest::collection::btree_set(0i64..8, 1..=3),
            1..=4,
        ),
        query_mask in 0u32..256,
    ) {
        let frame = Frame::range(0, 7).unwrap();
        let query: BTreeSet<i64> =
            (0..8).filter(|i| query_mask >> i & 1 == 1).collect();
        let evidence = Evidence::new(
            frame,
            sets.into_iter().map(|s| s.into_iter().collect()).collect(),
        )
        .unwrap();
        let belief = evidence.belief(&query).unwrap();
        let plausibility = evidence.plausibility(&query).unwrap();
        prop_assert!(belief <= plausibility);
        let complement = evidence.frame().complement(&query);
        prop_assert_eq!(
            plausibility,
            Fraction::new(1, 1) - evidence.belief(&complement).unwrap()
        );
        let (inside, straddling, outside) = evidence.categorize(&query).unwrap();
        prop_assert_eq!(inside + straddling + outside, evidence.source_count());
    }
}

/// Exhaustive monotonicity of the set capacities over small subsets of
/// the divisors of 18.
#[test]
fn capacities_are_monotone_over_small_subsets() {
    let p = seeded_state(18, 23);
    let divisors = p.lattice().divisors().to_vec();
    let mut subsets: Vec<Vec<u64>> = vec![vec![]];
    for size in 1..=3usize {
        let mut next = Vec::new();
        for held in subsets.iter().filter(|s| s.len() == size - 1) {
            let start = held
                .last()
                .map(|&v| divisors.iter().position(|&d| d == v).unwrap() + 1)
                .unwrap_or(0);
            for &d in &divisors[start..] {
                let mut grown = held.clone();
                grown.push(d);
                next.push(grown);
            }
        }
        subsets.extend(next);
    }
    for a in &subsets {
        for b in &subsets {
            let a_set: BTreeSet<u64> = a.iter().copied().collect();
            let b_set: BTreeSet<u64> = b.iter().copied().collect();
            if a_set.is_subset(&b_set) {
                assert!(
                    p.capacity_lower(a).unwrap() <= p.capacity_lower(b).unwrap() + 1e-12,
                    "lower capacity not monotone at {a:?} vs {b:?}"
                );
                assert!(
                    p.capacity_upper(a).unwrap() <= p.capacity_upper(b).unwrap() + 1e-12,
                    "upper capacity not monotone at {a:?} vs {b:?}"
                );
            }
        }
    }
}
