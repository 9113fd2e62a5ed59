//! Window-level versions of coinduction, the restricted wreath jump, the prefix-rewrite
//! F₂ action generating tail equivalence, and the ℤ/4 odometer with its compression.

mod coinduce;
mod jump;
mod odometer;
mod tail;

pub use coinduce::{check_compatibility, coinduce, lift_family, CosetStructure, Subgroup};
pub use jump::{lamplighter_word, wreath_jump, CyclicAction, JumpLetter, WreathJump};
pub use odometer::{
    format_digits, odometer_compression, odometer_decompression, odometer_step, parse_digits, stable_tail_start,
    Direction, OdometerStep, BASE,
};
pub use tail::{
    f2_orbit_check, f2_tail_action, first_bit_separation_scan, format_bits, format_tail_word, orbit_ball, parse_bits,
    parse_tail_word, separated, Bits, LabelTable, OrbitOutcome, OrbitReport, PrefixMap, SeparationScan, TailCheck,
    TailGen, TailOutcome,
};
