//! Binomial states, hole burning and nonclassicality witnesses in a finite
//! Fock basis.
//!
//! States live in `span{|0>, ..., |M>}` and are carried as normalized
//! amplitude vectors ([`FockSuperposition`]). Every witness is built from
//! normally-ordered moments `<a†^t a^r>`, which [`moments::moment`] evaluates
//! by a direct sum over the Fock basis.
//!
//! ```
//! use holeburn::{states, witnesses, BinomialParams};
//!
//! let params = BinomialParams::new(0.5, 10).unwrap();
//! let state = states::vacuum_filtered_binomial(params).unwrap();
//! let d = witnesses::antibunching(&state, 2).unwrap();
//! assert!(d.nonclassical);
//! ```

pub mod error;
pub mod moments;
pub mod numerics;
pub mod states;
pub mod sweep;
pub mod witnesses;

pub use error::{Error, Result};
pub use moments::MomentOrder;
pub use numerics::LogReal;
pub use states::{BinomialParams, FockSuperposition};
pub use witnesses::{MonomialBasis, WitnessKind, WitnessRecord};

/// Largest moment power and witness order accepted anywhere in the crate.
pub const ORDER_CAP: usize = 20;
