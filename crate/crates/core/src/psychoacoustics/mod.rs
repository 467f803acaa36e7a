//! Critical-band layout over the level-3 DCT spectra and the simultaneous
//! masking threshold per band.

mod bark;
mod masking;

pub use bark::{
    bark_layout, BandSegment, BarkLayout, CriticalBand, BAND_CENTERS_HZ, BAND_EDGES_HZ, DEFAULT_EMBED_BANDS,
};
pub use masking::{
    analyze_clip, ath_db, band_energy, final_threshold, masking_report, offset_db, raw_threshold, schroeder_spread_db,
    spectral_flatness, spectral_flatness_of, spl_to_energy, spread, spread_with, tonality, BandMasking, MaskingReport,
    ENERGY_FLOOR, SPL_REFERENCE_ENERGY,
};
