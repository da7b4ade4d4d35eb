//! Event structures on the divisor lattice of a finite cyclic group, the
//! finite quantum systems they index, and the non-additive probability
//! functionals those systems induce.
//!
//! The layers build on each other:
//!
//! * [`lattice`] — arithmetic of the divisor lattice `D(n)`: meet, join,
//!   negation, implication, Hall divisors, covering relations, chains, and
//!   the subgroup/embedding picture of `Z(n)`.
//! * [`quantum`] — the `n`-dimensional Hilbert space attached to `Z(n)`:
//!   states, density matrices, the finite Fourier transform, and the
//!   diagonal projectors whose supports mirror the lattice.
//! * [`measures`] — lower and upper probability functionals obtained by
//!   tracing a density matrix against those projectors, their interference
//!   and modularity structure, and a structured verification report.
//! * [`sampling`] — seeded measurement simulation in the position basis and
//!   the frequency estimators that recover the functionals from counts.
//! * [`dempster`] — the classical counterpart: multivalued evidence over a
//!   finite frame, belief/plausibility with exact rational arithmetic, and
//!   capacity checks.
//! * [`verify`] — exhaustive law scans and randomized sweeps used by the
//!   command-line `check` subcommand and the integration suite.

pub mod dempster;
pub mod lattice;
pub mod measures;
pub mod quantum;
pub mod sampling;
pub mod verify;
