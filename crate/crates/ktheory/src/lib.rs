//! Exact K-theory for the Ruelle algebras of shifts of finite type.
//!
//! Everything here runs over arbitrary-precision integers or rationals:
//! Smith normal form with certified transforms, abelian groups in invariant-factor form,
//! the K-groups of the stable and unstable Ruelle algebras, their K-homology via the
//! universal coefficient sequence, the duality verdict comparing the two, and rational
//! rank bookkeeping on the eventual range.
//!
//! ```
//! use smale_ktheory::{duality_verdict, AbelianGroup, TransitionMatrix};
//!
//! let a = TransitionMatrix::new(vec![vec![1, 2], vec![2, 1]]).unwrap();
//! let v = duality_verdict(&a);
//! assert!(v.pass);
//! assert_eq!(v.k_theory.k0_unstable, AbelianGroup::from_factors(0, &[2, 2]));
//! ```

pub mod corpus;
pub mod duality;
pub mod error;
pub mod group;
pub mod matrix;
pub mod pv;
pub mod ruelle;
pub mod snf;
pub mod uct;

pub use duality::{duality_verdict, DualityVerdict, IsoCheck};
pub use error::KError;
pub use group::{group_isomorphic, AbelianGroup};
pub use matrix::{IntMatrix, TransitionMatrix};
pub use pv::{pv_ranks, DimensionGroupAction, PvRanks, RankPair};
pub use ruelle::{ruelle_k_groups, RuelleKGroups};
pub use snf::{coker_ker, smith_normal_form, SmithDecomposition};
pub use uct::uct_dual;
