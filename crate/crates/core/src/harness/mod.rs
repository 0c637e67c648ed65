//! Plumbing shared by the command-line tool: the randomized bound verifier,
//! curve data, system files and report formatting.

mod curve;
mod format;
mod system_file;
mod verify;

pub use curve::{curve_rows, emit_curves, CurveRow, CURVE_HEADER};
pub use format::{
    format_number, report_csv_header, report_csv_row, report_text, Units, REPORT_FIELDS,
};
pub use system_file::{load_system, parse_system, LoadedSystem, SystemFile};
pub use verify::{
    random_hermitian, random_state, trial_rng, verify_random, verify_saturating, BcEnvelope,
    RunConfig, SaturationReport, Tolerances, VerificationReport, Violation,
};
