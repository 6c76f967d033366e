//! Exact computational-algebra engine for hermitian Deligne-Lusztig strata,
//! truncated lattice models of the affine Grassmannian, their irreducible
//! components, and component intersections over small finite fields.
//!
//! Everything is exhaustive and exact: point sets are enumerated over
//! `F_{q^{2k}}`, structural identities are checked as set identities, and
//! all enumeration orders are deterministic.

pub mod budget;
pub mod components;
pub mod ff;
pub mod flags;
pub mod intersections;
pub mod lattice;
pub mod linalg;
pub mod perm;
