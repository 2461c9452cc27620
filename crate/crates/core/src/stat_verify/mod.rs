//! Statistical and deterministic acceptance checks: moment identities,
//! two-sample laws against oracles, martingale residuals, folding and
//! rotation identities, each with a deliberately mismatched control.

mod checks;
mod ks;
mod oracle;
mod report;
mod suite;

pub use checks::*;
pub use ks::{kolmogorov_survival, ks_two_sample, KsResult};
pub use oracle::{besq_exact_oracle, bessel_em_oracle};
pub use report::{render_table, Role, VerificationReport};
pub use suite::{harmonic_reports, martingale_reports, run_suite, SuiteOutcome, SuiteSettings, SuiteTarget};
