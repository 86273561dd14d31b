//! Exact-arithmetic apportionment.
//!
//! Divisor methods, quota methods and quotatone methods behind one
//! [`Method`] handle, with checkers for quota, house monotonicity,
//! homogeneity, weak proportionality and proportional consistency, and a
//! reproducible counterexample search.
//!
//! ```
//! use apportion::{Instance, Method, TiePolicy};
//!
//! let v = Instance::from_u64(&[5, 3, 1]).unwrap();
//! let webster: Method = "webster".parse().unwrap();
//! let h = webster.apportion(&v, 6, TiePolicy::default()).unwrap();
//! assert_eq!(h.seats(), &[3, 2, 1]);
//! ```
//!
//! Populations are held sorted by size, largest first; seat vectors and state
//! indices refer to that order unless a function says otherwise.
//! [`Instance::input_order`] maps back to the order given.

pub mod arith;
pub mod cli;
pub mod divisor;
pub mod error;
pub mod fixtures;
pub mod io;
pub mod method;
pub mod model;
pub mod properties;
pub mod quota_methods;
pub mod quotatone;
pub mod search;

pub use divisor::SignpostRule;
pub use error::{Error, Result};
pub use method::Method;
pub use model::{Apportionment, Instance, ScaleFactor, TiePolicy};
pub use properties::{check_pc, PCReport};
pub use search::{search_pc_violations, SearchConfig, SearchMode, SearchOutcome};
