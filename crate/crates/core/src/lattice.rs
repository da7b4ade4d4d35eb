//! The divisor lattice `D(n)` of a finite cyclic group `Z(n)`.
//!
//! Divisors of `n` ordered by divisibility form a distributive lattice with
//! meet `gcd` and join `lcm`. The lattice carries a negation (largest
//! divisor coprime to the argument) and a relative pseudocomplement, which
//! make it a Heyting algebra; it is Boolean exactly when `n` is square-free.
//! Hall divisors (those coprime to their cofactor) form the largest Boolean
//! sublattice. Each divisor `m` also labels the unique subgroup of `Z(n)`
//! of order `m`, and that correspondence is what the quantum layer builds
//! on.

use std::collections::BTreeMap;

use num_integer::Integer;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Errors from lattice construction and arithmetic.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LatticeError {
    /// The modulus of a cyclic group must be at least 1.
    #[error("modulus must be positive, got 0")]
    ZeroModulus,
    /// An element was used as a lattice member without dividing the modulus.
    #[error("{value} is not a divisor of {n}")]
    NotADivisor { value: u64, n: u64 },
    /// A group element lies outside `{0, .., modulus-1}`.
    #[error("{value} is not an element of Z({modulus})")]
    OutOfRange { value: u64, modulus: u64 },
    /// Embedding `Z(m)` into `Z(k)` requires `m` to divide `k`.
    #[error("Z({from}) does not embed into Z({into}): {from} does not divide {into}")]
    NoEmbedding { from: u64, into: u64 },
}

/// Prime factorization of a positive integer.
///
/// The exponent map is keyed by prime in increasing order; the empty map
/// represents 1.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Factorization {
    value: u64,
    exponents: BTreeMap<u64, u32>,
}

impl Factorization {
    /// Factor `n` by trial division. Fails only for `n = 0`.
    pub fn of(n: u64) -> Result<Self, LatticeError> {
        if n == 0 {
            return Err(LatticeError::ZeroModulus);
        }
        let mut exponents = BTreeMap::new();
        let mut rest = n;
        let mut p = 2u64;
        while p * p <= rest {
            if rest % p == 0 {
                let mut e = 0u32;
                while rest % p == 0 {
                    rest /= p;
                    e += 1;
                }
                exponents.insert(p, e);
            }
            p += if p == 2 { 1 } else { 2 };
        }
        if rest > 1 {
            exponents.insert(rest, 1);
        }
        Ok(Self { value: n, exponents })
    }

    /// The factored integer.
    pub fn value(&self) -> u64 {
        self.value
    }

    /// Exponent map, keyed by prime in increasing order.
    pub fn exponents(&self) -> &BTreeMap<u64, u32> {
        &self.exponents
    }

    /// Exponent of `p`, zero when `p` does not divide the value.
    pub fn exponent_of(&self, p: u64) -> u32 {
        self.exponents.get(&p).copied().unwrap_or(0)
    }

    /// Primes dividing the value, in increasing order.
    pub fn primes(&self) -> impl Iterator<Item = u64> + '_ {
        self.exponents.keys().copied()
    }

    /// Product of the distinct primes (the radical); 1 for value 1.
    pub fn radical(&self) -> u64 {
        self.exponents.keys().product()
    }

    /// Number of divisors, `prod (e_p + 1)`.
    pub fn divisor_count(&self) -> u64 {
        self.exponents.values().map(|&e| u64::from(e) + 1).product()
    }

    /// Whether no prime occurs with exponent above 1.
    pub fn is_square_free(&self) -> bool {
        self.exponents.values().all(|&e| e == 1)
    }
}

/// Exponent of `p` in `x` (`x >= 1`, `p >= 2`).
fn valuation(mut x: u64, p: u64) -> u32 {
    let mut e = 0;
    while x % p == 0 {
        x /= p;
        e += 1;
    }
    e
}

/// The lattice of divisors of a fixed modulus `n`.
///
/// Construction enumerates the divisors once; all operations stay inside
/// that finite carrier and reject arguments that are not divisors of `n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DivisorLattice {
    factorization: Factorization,
    divisors: Vec<u64>,
}

impl DivisorLattice {
    /// Build the lattice `D(n)`; fails only for `n = 0`.
    pub fn new(n: u64) -> Result<Self, LatticeError> {
        let factorization = Factorization::of(n)?;
        let mut divisors: Vec<u64> = vec![1];
        for (&p, &e) in factorization.exponents() {
            let mut extended = Vec::with_capacity(divisors.len() * (e as usize + 1));
            for &d in &divisors {
                let mut q = d;
                for _ in 0..=e {
                    extended.push(q);
                    q *= p;
                }
            }
            divisors = extended;
        }
        divisors.sort_unstable();
        Ok(Self {
            factorization,
            divisors,
        })
    }

    /// The modulus `n` (the top element).
    pub fn n(&self) -> u64 {
        self.factorization.value()
    }

    /// Factorization of the modulus.
    pub fn factorization(&self) -> &Factorization {
        &self.factorization
    }

    /// All divisors of `n` in increasing order.
    pub fn divisors(&self) -> &[u64] {
        &self.divisors
    }

    /// Number of lattice elements.
    pub fn len(&self) -> usize {
        self.divisors.len()
    }

    /// Always false: 1 and `n` are members (they coincide for `n = 1`).
    pub fn is_empty(&self) -> bool {
        false
    }

    /// Membership test.
    pub fn contains(&self, m: u64) -> bool {
        m >= 1 && self.n() % m == 0
    }

    fn require(&self, m: u64) -> Result<(), LatticeError> {
        if self.contains(m) {
            Ok(())
        } else {
            Err(LatticeError::NotADivisor { value: m, n: self.n() })
        }
    }

    /// Partial order: `k <= m` iff `k` divides `m`.
    pub fn leq(&self, k: u64, m: u64) -> Result<bool, LatticeError> {
        self.require(k)?;
        self.require(m)?;
        Ok(m % k == 0)
    }

    /// Meet (greatest lower bound): the greatest common divisor.
    pub fn meet(&self, k: u64, m: u64) -> Result<u64, LatticeError> {
        self.require(k)?;
        self.require(m)?;
        Ok(k.gcd(&m))
    }

    /// Join (least upper bound): the least common multiple.
    pub fn join(&self, k: u64, m: u64) -> Result<u64, LatticeError> {
        self.require(k)?;
        self.require(m)?;
        Ok(k.lcm(&m))
    }

    /// Negation of `k`: the largest divisor of `n` coprime to `k`.
    ///
    /// Equivalently the product of `p^(e_p(n))` over primes of `n` that do
    /// not divide `k`. Satisfies `meet(k, neg k) = 1` but in general only
    /// `join(k, neg k) <= n`, with equality exactly on Hall divisors.
    pub fn negation(&self, k: u64) -> Result<u64, LatticeError> {
        self.require(k)?;
        let mut out = 1u64;
        for (&p, &e) in self.factorization.exponents() {
            if k % p != 0 {
                out *= p.pow(e);
            }
        }
        Ok(out)
    }

    /// Double negation: saturates every prime of `k` to its full exponent
    /// in `n`. Fixed points are exactly the Hall divisors.
    pub fn double_negation(&self, k: u64) -> Result<u64, LatticeError> {
        let neg = self.negation(k)?;
        self.negation(neg)
    }

    /// Relative pseudocomplement `k -> m`: the largest `d` with
    /// `meet(k, d)` dividing `m`.
    ///
    /// Per prime `p` of `n` the exponent of the result is `e_p(n)` when
    /// `e_p(k) <= e_p(m)` and `e_p(m)` otherwise. Negation is recovered as
    /// `k -> 1`.
    pub fn implication(&self, k: u64, m: u64) -> Result<u64, LatticeError> {
        self.require(k)?;
        self.require(m)?;
        let mut out = 1u64;
        for (&p, &e_n) in self.factorization.exponents() {
            let e_k = valuation(k, p);
            let e_m = valuation(m, p);
            let e = if e_k <= e_m { e_n } else { e_m };
            out *= p.pow(e);
        }
        Ok(out)
    }

    /// Whether `r` is a Hall divisor of `n`: coprime to its cofactor.
    pub fn is_hall(&self, r: u64) -> Result<bool, LatticeError> {
        self.require(r)?;
        Ok(r.gcd(&(self.n() / r)) == 1)
    }

    /// The Hall divisors in increasing order.
    ///
    /// They form a Boolean sublattice of size `2^k` where `k` is the number
    /// of distinct primes of `n`; negation restricted to it is a complement.
    pub fn hall_divisors(&self) -> Vec<u64> {
        self.divisors
            .iter()
            .copied()
            .filter(|&r| r.gcd(&(self.n() / r)) == 1)
            .collect()
    }

    /// Covering pairs `(d, d * p)` of the Hasse diagram, each listed once
    /// with the smaller element first, ordered by `(lower, upper)`.
    pub fn covering_pairs(&self) -> Vec<(u64, u64)> {
        let n = self.n();
        let mut pairs = Vec::new();
        for &d in &self.divisors {
            for p in self.factorization.primes() {
                let up = d * p;
                if n % up == 0 {
                    pairs.push((d, up));
                }
            }
        }
        pairs.sort_unstable();
        pairs
    }

    /// All maximal chains from `n` down to 1.
    ///
    /// Each chain steps down by one prime at a time, so its length is
    /// `Omega(n) + 1` (prime factors counted with multiplicity). Chains are
    /// returned in decreasing lexicographic order; for `n = p^a q^b` there
    /// are `binomial(a + b, a)` of them.
    pub fn maximal_chains(&self) -> Vec<Vec<u64>> {
        let mut chains = Vec::new();
        let mut current = vec![self.n()];
        self.descend(&mut current, &mut chains);
        chains.sort_unstable_by(|a, b| b.cmp(a));
        chains
    }

    fn descend(&self, current: &mut Vec<u64>, chains: &mut Vec<Vec<u64>>) {
        let d = *current.last().expect("chain starts at n");
        if d == 1 {
            chains.push(current.clone());
            return;
        }
        for p in self.factorization.primes() {
            if d % p == 0 {
                current.push(d / p);
                self.descend(current, chains);
                current.pop();
            }
        }
    }
}

/// The subgroup of `Z(n)` of order `m`, for `m` dividing `n`.
///
/// Its elements are the multiples of `n / m`; it is the image of the
/// canonical embedding of `Z(m)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubgroupView {
    order: u64,
    modulus: u64,
}

impl SubgroupView {
    /// View the order-`m` subgroup of `Z(n)`.
    pub fn new(m: u64, n: u64) -> Result<Self, LatticeError> {
        if n == 0 {
            return Err(LatticeError::ZeroModulus);
        }
        if m == 0 || n % m != 0 {
            return Err(LatticeError::NotADivisor { value: m, n });
        }
        Ok(Self { order: m, modulus: n })
    }

    /// Order of the subgroup.
    pub fn order(&self) -> u64 {
        self.order
    }

    /// Modulus of the ambient group.
    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    /// Elements in increasing order: `{ r * (n / m) : r = 0, .., m-1 }`.
    pub fn elements(&self) -> Vec<u64> {
        let step = self.modulus / self.order;
        (0..self.order).map(|r| r * step).collect()
    }

    /// Membership test in the ambient group.
    pub fn contains(&self, x: u64) -> bool {
        x < self.modulus && x % (self.modulus / self.order) == 0
    }
}

/// Canonical embedding of `a` from `Z(m)` into `Z(k)` for `m | k`:
/// `a` maps to `(k / m) * a`.
///
/// The embeddings compose transitively along divisibility, so the groups
/// `Z(m)` with these maps form a directed system over the lattice.
pub fn embed_group(a: u64, m: u64, k: u64) -> Result<u64, LatticeError> {
    if m == 0 || k == 0 {
        return Err(LatticeError::ZeroModulus);
    }
    if k % m != 0 {
        return Err(LatticeError::NoEmbedding { from: m, into: k });
    }
    if a >= m {
        return Err(LatticeError::OutOfRange { value: a, modulus: m });
    }
    Ok(a * (k / m))
}

/// Residues in `{0, .., m-1}` coprime to `m`.
///
/// For `m = 1` this is `{0}`, since `gcd(0, 1) = 1`; hence the count equals
/// Euler's totient for `m > 1` and is 1 for `m = 1`.
pub fn reduced_residues(m: u64) -> Result<Vec<u64>, LatticeError> {
    if m == 0 {
        return Err(LatticeError::ZeroModulus);
    }
    Ok((0..m).filter(|a| a.gcd(&m) == 1).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Oracle: divisors by full scan.
    fn scan_divisors(n: u64) -> Vec<u64> {
        (1..=n).filter(|d| n % d == 0).collect()
    }

    /// Oracle: negation as the largest divisor coprime to `k`.
    fn scan_negation(n: u64, k: u64) -> u64 {
        scan_divisors(n)
            .into_iter()
            .filter(|d| d.gcd(&k) == 1)
            .max()
            .unwrap()
    }

    /// Oracle: implication as the largest `d` with `gcd(k, d) | m`.
    fn scan_implication(n: u64, k: u64, m: u64) -> u64 {
        scan_divisors(n)
            .into_iter()
            .filter(|d| m % d.gcd(&k) == 0)
            .max()
            .unwrap()
    }

    fn binomial(n: u64, k: u64) -> u64 {
        (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
    }

    #[test]
    fn factorization_rejects_zero() {
        assert_eq!(Factorization::of(0), Err(LatticeError::ZeroModulus));
    }

    #[test]
    fn factorization_of_one_is_empty() {
        let f = Factorization::of(1).unwrap();
        assert!(f.exponents().is_empty());
        assert_eq!(f.radical(), 1);
        assert_eq!(f.divisor_count(), 1);
        assert!(f.is_square_free());
    }

    #[test]
    fn factorization_reconstructs_value() {
        for n in 1..=2000u64 {
            let f = Factorization::of(n).unwrap();
            let product: u64 = f.exponents().iter().map(|(&p, &e)| p.pow(e)).product();
            assert_eq!(product, n);
        }
    }

    #[test]
    fn divisors_match_scan() {
        for n in 1..=500u64 {
            let lat = DivisorLattice::new(n).unwrap();
            assert_eq!(lat.divisors(), scan_divisors(n).as_slice());
            assert_eq!(lat.len() as u64, lat.factorization().divisor_count());
        }
    }

    #[test]
    fn divisors_of_eighteen() {
        let lat = DivisorLattice::new(18).unwrap();
        assert_eq!(lat.divisors(), &[1, 2, 3, 6, 9, 18]);
    }

    #[test]
    fn meet_join_are_gcd_lcm() {
        let lat = DivisorLattice::new(360).unwrap();
        for &k in lat.divisors() {
            for &m in lat.divisors() {
                let meet = lat.meet(k, m).unwrap();
                let join = lat.join(k, m).unwrap();
                assert_eq!(meet, k.gcd(&m));
                assert_eq!(join, k.lcm(&m));
                // Absorption pins the pair down as lattice operations.
                assert_eq!(lat.meet(k, join).unwrap(), k);
                assert_eq!(lat.join(k, meet).unwrap(), k);
            }
        }
    }

    #[test]
    fn negation_table_for_eighteen() {
        let lat = DivisorLattice::new(18).unwrap();
        let expected = [(1, 18), (2, 9), (3, 2), (6, 1), (9, 2), (18, 1)];
        for (k, neg) in expected {
            assert_eq!(lat.negation(k).unwrap(), neg, "negation of {k}");
        }
    }

    #[test]
    fn negation_matches_scan_oracle() {
        for n in 1..=200u64 {
            let lat = DivisorLattice::new(n).unwrap();
            for &k in lat.divisors() {
                assert_eq!(lat.negation(k).unwrap(), scan_negation(n, k));
            }
        }
    }

    #[test]
    fn implication_matches_scan_oracle() {
        for n in [1u64, 2, 12, 18, 36, 60, 128, 180] {
            let lat = DivisorLattice::new(n).unwrap();
            for &k in lat.divisors() {
                for &m in lat.divisors() {
                    assert_eq!(
                        lat.implication(k, m).unwrap(),
                        scan_implication(n, k, m),
                        "({k} -> {m}) in D({n})"
                    );
                }
            }
        }
    }

    #[test]
    fn implication_into_bottom_is_negation() {
        let lat = DivisorLattice::new(540).unwrap();
        for &k in lat.divisors() {
            assert_eq!(lat.implication(k, 1).unwrap(), lat.negation(k).unwrap());
        }
    }

    #[test]
    fn double_negation_saturates_exponents() {
        let lat = DivisorLattice::new(18).unwrap();
        assert_eq!(lat.double_negation(2).unwrap(), 2);
        assert_eq!(lat.double_negation(3).unwrap(), 9);
        assert_eq!(lat.double_negation(6).unwrap(), 18);
        assert_eq!(lat.double_negation(1).unwrap(), 1);
    }

    #[test]
    fn hall_divisors_of_eighteen() {
        let lat = DivisorLattice::new(18).unwrap();
        assert_eq!(lat.hall_divisors(), vec![1, 2, 9, 18]);
        assert!(lat.is_hall(9).unwrap());
        assert!(!lat.is_hall(6).unwrap());
    }

    #[test]
    fn hall_divisors_form_boolean_complements() {
        for n in 1..=300u64 {
            let lat = DivisorLattice::new(n).unwrap();
            let hall = lat.hall_divisors();
            let k = lat.factorization().primes().count() as u32;
            assert_eq!(hall.len() as u64, 1u64 << k);
            for &r in &hall {
                let neg = lat.negation(r).unwrap();
                assert_eq!(lat.meet(r, neg).unwrap(), 1);
                assert_eq!(lat.join(r, neg).unwrap(), n);
                assert_eq!(lat.double_negation(r).unwrap(), r);
            }
        }
    }

    #[test]
    fn covering_pairs_step_by_one_prime() {
        let lat = DivisorLattice::new(18).unwrap();
        assert_eq!(
            lat.covering_pairs(),
            vec![(1, 2), (1, 3), (2, 6), (3, 6), (3, 9), (6, 18), (9, 18)]
        );
    }

    #[test]
    fn maximal_chains_of_eighteen() {
        let lat = DivisorLattice::new(18).unwrap();
        assert_eq!(
            lat.maximal_chains(),
            vec![
                vec![18, 9, 3, 1],
                vec![18, 6, 3, 1],
                vec![18, 6, 2, 1],
            ]
        );
    }

    #[test]
    fn maximal_chain_count_is_binomial_for_two_primes() {
        // For n = p^a q^b the chain count is binomial(a + b, a).
        for (n, a, b) in [(72u64, 3u64, 2u64), (200, 3, 2), (144, 4, 2), (96, 5, 1)] {
            let lat = DivisorLattice::new(n).unwrap();
            let chains = lat.maximal_chains();
            assert_eq!(chains.len() as u64, binomial(a + b, a), "n = {n}");
            let omega = (a + b) as usize;
            for chain in &chains {
                assert_eq!(chain.len(), omega + 1);
                assert_eq!(chain[0], n);
                assert_eq!(*chain.last().unwrap(), 1);
                for w in chain.windows(2) {
                    let ratio = w[0] / w[1];
                    assert!(w[0] % w[1] == 0);
                    assert!(Factorization::of(ratio).unwrap().divisor_count() == 2);
                }
            }
        }
    }

    #[test]
    fn non_divisor_arguments_are_rejected() {
        let lat = DivisorLattice::new(18).unwrap();
        assert_eq!(
            lat.meet(4, 6),
            Err(LatticeError::NotADivisor { value: 4, n: 18 })
        );
        assert_eq!(
            lat.negation(5),
            Err(LatticeError::NotADivisor { value: 5, n: 18 })
        );
        assert_eq!(
            lat.implication(18, 0),
            Err(LatticeError::NotADivisor { value: 0, n: 18 })
        );
    }

    #[test]
    fn subgroup_elements_and_membership() {
        let sub = SubgroupView::new(6, 18).unwrap();
        assert_eq!(sub.elements(), vec![0, 3, 6, 9, 12, 15]);
        assert!(sub.contains(9));
        assert!(!sub.contains(10));
        assert!(!sub.contains(18));
        assert!(SubgroupView::new(5, 18).is_err());
    }

    #[test]
    fn embedding_is_transitive() {
        // Z(3) -> Z(6) -> Z(18) agrees with Z(3) -> Z(18).
        for a in 0..3u64 {
            let via = embed_group(embed_group(a, 3, 6).unwrap(), 6, 18).unwrap();
            let direct = embed_group(a, 3, 18).unwrap();
            assert_eq!(via, direct);
        }
        assert_eq!(embed_group(2, 3, 18).unwrap(), 12);
        assert!(embed_group(3, 3, 18).is_err());
        assert!(embed_group(1, 4, 18).is_err());
    }

    #[test]
    fn embedding_image_is_subgroup() {
        let sub = SubgroupView::new(6, 18).unwrap();
        let image: Vec<u64> = (0..6).map(|a| embed_group(a, 6, 18).unwrap()).collect();
        assert_eq!(image, sub.elements());
    }

    #[test]
    fn reduced_residues_examples() {
        assert_eq!(reduced_residues(1).unwrap(), vec![0]);
        assert_eq!(reduced_residues(2).unwrap(), vec![1]);
        assert_eq!(reduced_residues(6).unwrap(), vec![1, 5]);
        assert_eq!(reduced_residues(9).unwrap(), vec![1, 2, 4, 5, 7, 8]);
        assert!(reduced_residues(0).is_err());
    }
}
