pub mod catalysis;
pub mod error;
pub mod number;
pub mod polyseries;
pub mod real;
pub mod conversion;
pub mod sequences;

pub use catalysis::{synthesize_catalyst, verify_catalyst, SynthesisCertificate, SynthesisRoute, SynthesisSettings};
pub use conversion::{ConversionReport, ConversionSettings};
pub use error::{Error, Result};
pub use real::Real;
pub use sequences::{Catalyst, CharacteristicFunction, SchmidtVector};
