//! Catalyst verification and synthesis.
//!
//! Synthesis reduces a pair to the form `x_i = K·ω^{β_i}`, `y_i = K·ω^{α_i}`,
//! builds a catalyst from a nonnegative series multiple of
//! `Σ(s^{α_i} − s^{β_i})/(1 − s)` and accepts it only after an exact check.

mod case_a;
mod necessity;
mod pipeline;
mod reduce;
mod verify;

pub use case_a::{delta_breakpoints_nonnegative, run_case_a, CaseAInstance, CaseAOutcome};
pub use necessity::{necessity_certificate, NecessityCertificate, NecessitySample, DEFAULT_NU_SAMPLES};
pub use pipeline::{
    synthesize_case_a, synthesize_catalyst, CaseARecord, PowerForm, SynthesisCertificate, SynthesisRoute,
    SynthesisSettings, ZeroLifting,
};
pub use reduce::{direct_case_a, reduce_case_b, reduce_case_c, CaseBReduction, CaseCReduction};
pub use verify::{verify_catalyst, verify_catalyst_with_cap, DEFAULT_PRODUCT_CAP};
