//! Shared inputs for the benchmarks.

use sdgnet_core::ingest::{clean_panel, CleanedPanels, YearWindow};
use sdgnet_core::synthetic::{generate, SyntheticSpec};

/// Cleaned synthetic panel of `countries` × `indicators` series.
pub fn cleaned_panel(countries: usize, indicators: usize) -> CleanedPanels {
    let data = generate(&SyntheticSpec { countries, indicators, seed: 17, ..Default::default() });
    clean_panel(&data.records, YearWindow::default()).expect("synthetic panel is well formed")
}
