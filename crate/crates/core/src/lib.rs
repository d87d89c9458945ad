//! Exact arithmetic over finite rings, CNC ideal chains and generalized
//! Fermat-Euler exponents.
//!
//! - [`ring`]: descriptors, canonical elements, enumeration, units and orders.
//! - [`ideal`] and [`cnc`]: ideal closure, products, quotients and chain checks.
//! - [`exponent`]: the ring exponent `o(R)`, the bounds `M1 <= M2 <= M3` and
//!   their brute-force confirmation.
//! - [`constructions`]: matrix rings, group rings, Galois rings, direct
//!   products and sampled polynomial units.
//! - [`expr`]: the ring and element expression language.

pub mod arith;
pub mod cnc;
pub mod constructions;
pub mod error;
pub mod exponent;
pub mod expr;
pub mod group;
pub mod ideal;
pub mod ring;

pub use cnc::{power_chain, verify_cnc, CncChain, CncCondition, CncFailure, CncVerdict, Witness};
pub use constructions::{
    galois_ring, lift_chain_group, lift_chain_matrix, sample_polynomial_units, GaloisRing,
    LiftedChain, SampleReport,
};
pub use error::{Error, Result};
pub use exponent::{
    euler_lcm, exponent_member, fermat_bounds, ring_order, EulerReport, ExponentReport, Verdict,
    WMode,
};
pub use expr::{
    parse_chain, parse_element, parse_generators, parse_ring, parse_ring_expr, RingAst, RingExpr,
};
pub use group::GroupDescriptor;
pub use ideal::Ideal;
pub use ring::{Cardinality, Ring, RingElement, RingKind, DEFAULT_CAP};
