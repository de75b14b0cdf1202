//! Parameter-plane sweeps, class tuples and document emission.

mod emit;
mod sweep;
mod tuples;

pub use emit::{
    emit_portrait, emit_sweep, portrait_csv, portrait_svg, portrait_text, region_color, sweep_csv, sweep_csv_header,
    sweep_svg, sweep_text, write_document, Format,
};
pub use sweep::{analyze_point, sweep, InventoryEntry, Sweep, SweepCell, MAX_RESOLUTION};
pub use tuples::{admissible_tuples, class_tuple, is_admissible, ClassTuple, TUPLES_CASE_A, TUPLES_CASE_B};
