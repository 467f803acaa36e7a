//! Adaptive-step payload embedding and informed verification.

mod protect;
mod pseudo;
mod qim;
mod sidecar;

pub use protect::{
    band_step, plan_steps, protect, verify, BandBer, BandOutcome, BerReport, ClipPolicy, EmbedConfig, ProtectOutcome,
    Warning,
};
pub use pseudo::{keyed_bit, keyed_bits, PreparedSource, PseudoTimbreSource};
pub use qim::{qim_embed, qim_extract, quant_step};
pub use sidecar::{BandStep, Sidecar, SourceTag, SIDECAR_MAGIC, SIDECAR_VERSION};
