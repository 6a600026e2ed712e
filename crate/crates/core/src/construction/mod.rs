//! Constructions built on the formal system: proof enumeration in size
//! order, the bound-driven composite program with its size accounting, the
//! target-driven searcher, and the first-unproduced-string driver.

pub mod berry;
pub mod composite;
pub mod museum;
pub mod search;

pub use berry::{first_unproduced_string, BerryResult};
pub use composite::{build_composite, decompose, CompositeProgram, Decomposition};
pub use museum::{british_museum, MuseumMode, MuseumResult, MuseumStats};
pub use search::{
    search_proof_stream, search_proof_stream_with, target_complexity_audit, AuditRecord,
    ProofStream, SearchOutcome, SearchTarget, StreamConfig,
};
