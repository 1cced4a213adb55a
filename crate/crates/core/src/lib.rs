//! Decision procedure for the intuitionistic modal logic IK.
//!
//! [`search::prove`] runs terminating proof search over annotated bi-nested
//! sequents. A provable formula comes with a derivation that
//! [`calculus::check_proof`] replays rule by rule. An unprovable one ends in a
//! global-saturated leaf, from which [`model::extract_countermodel`] builds a
//! bi-relational model and verifies it.
//!
//! ```
//! use ikp::formula::parse;
//! use ikp::model::extract_countermodel;
//! use ikp::search::{prove, Options, Verdict};
//!
//! let a = parse("box p -> p").unwrap();
//! let r = prove(&a, Options::default());
//! assert_eq!(r.outcome.verdict(), Verdict::Unprovable);
//! let m = extract_countermodel(r.outcome.leaf().unwrap()).unwrap();
//! assert!(m.refutes(&a));
//! ```

pub mod calculus;
pub mod cli;
pub mod formula;
pub mod model;
pub mod oracle;
pub mod search;
pub mod sequent;
pub mod translate;
