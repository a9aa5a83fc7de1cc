//! Pre- and postselected quantum systems: strong-measurement and ABL
//! probabilities, weak values, and logic audits of projector sums and
//! products.
//!
//! The crate is organized bottom-up:
//!
//! - [`linalg`]: dense states, operators and projectors;
//! - [`expr`]: the `L1*L2 + R1*R2` channel-expression language;
//! - [`scenario`]: scenario files and the built-in catalog
//!   (`pigeonhole2`, `pigeonhole3`, `three-box`, `hardy`);
//! - [`strong`]: Born, collapse, postselected and ABL probabilities;
//! - [`weak`]: weak values with zero detection;
//! - [`audit`]: classification of weak-value zero patterns for OR/AND;
//! - [`meter`]: a finite-strength Gaussian-pointer meter;
//! - [`format`]: number formatting shared by reports.
//!
//! ```
//! use wvlogic::{catalog, weak_value_expr};
//!
//! let s = catalog("three-box").unwrap();
//! let w = weak_value_expr(&s, "A + C").unwrap();
//! assert!(w.is_zero);
//! ```

pub mod audit;
pub mod error;
pub mod expr;
pub mod format;
pub mod linalg;
pub mod meter;
pub mod scenario;
pub mod strong;
pub mod weak;

pub use audit::{
    audit_all, classify_exprs, classify_product, classify_sum, AuditKind, AuditPair, AuditReport,
    AuditVerdict, Case, ProductCase, SumCase,
};
pub use error::{Error, ErrorKind, Result};
pub use expr::{evaluate, parse, ChannelTable, Expr, ParseError};
pub use linalg::{Amplitude, Operator, Projector, StateVector};
pub use meter::{
    measure_pointer, sequential_disturbance, weak_limit_estimate, MeterConfig, PointerStats,
};
pub use scenario::{catalog, load_scenario, Scenario};
pub use strong::{abl_prob, bayes_check, born_prob, collapse, cond_prob_post, CollapseOutcome};
pub use weak::{weak_value, weak_value_expr, WeakValue};
