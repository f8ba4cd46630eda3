//! Restricted-variable Chevalley-Warning toolkit.
//!
//! * [`ring`]: exact coefficient domains (integers, p-local rationals, `F_q`).
//! * [`multipoly`]: sparse multivariate polynomials over those domains.
//! * [`balls_bins`]: the minimum product `m(a_1, ..., a_n; N)`.
//! * [`schanuel_brink`]: the operator `Delta` on restricted boxes.
//! * [`warning_verify`]: solution counting and bound verdicts.
//! * [`zerosum`]: Davenport constants, subsequence and set-system counts.
//! * [`instances`]: seeded random inputs for all of the above.

pub mod balls_bins;
pub mod error;
pub mod grid;
pub mod instances;
pub mod multipoly;
pub mod report;
pub mod ring;
pub mod schanuel_brink;
pub mod warning_verify;
pub mod zerosum;

pub use error::{Error, Result};
pub use multipoly::{Degree, Monomial, MultiPoly};
pub use report::{CountReport, Verdict};
pub use ring::{FqElem, FqField, PLocalRational, PLocalRing};
pub use schanuel_brink::{RestrictedBox, SBContext};
pub use warning_verify::{CongruenceSystem, FqSystem};
pub use zerosum::{GSequence, GroupSpec, SetSystem, WeightBox};
