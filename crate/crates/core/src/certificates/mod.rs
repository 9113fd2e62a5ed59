//! Certificates on both sides of the amenability dichotomy.

mod expansion;
mod folner;
mod paradox;
mod probe;

pub use expansion::{
    expansion_certificate, reach, verify_expansion, ExpansionCertificate, ExpansionOutcome, ExpansionViolator,
};
pub use folner::{
    default_family, family_set, folner_boundary, folner_ratio, folner_search, lamplighter_rectangle, verify_folner,
    FolnerCertificate, FolnerFamily,
};
pub use paradox::{
    reference_f2_pieces, tarski_report, verify_paradox, xst_certificate, xt_patch_from_expansion, ParadoxCertificate,
    ParadoxKind, Piece, PieceLabel, Predicate, TarskiReport,
};
pub use probe::{amenability_probe, ProbeOptions, ProbeOutcome};

use crate::error::{Error, Result};
use num_rational::Ratio;

/// Parses `0.05`, `1/20` or `2` into an exact non-negative rational.
pub fn parse_ratio(s: &str) -> Result<Ratio<u64>> {
    let s = s.trim();
    let bad = || Error::parse(s, "expected a decimal or a fraction");
    if let Some((n, d)) = s.split_once('/') {
        let n: u64 = n.trim().parse().map_err(|_| bad())?;
        let d: u64 = d.trim().parse().map_err(|_| bad())?;
        if d == 0 {
            return Err(bad());
        }
        return Ok(Ratio::new(n, d));
    }
    let (int, frac) = s.split_once('.').unwrap_or((s, ""));
    if (int.is_empty() && frac.is_empty()) || !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    if frac.len() > 18 {
        return Err(bad());
    }
    let den = 10u64.pow(frac.len() as u32);
    let int: u64 = if int.is_empty() { 0 } else { int.parse().map_err(|_| bad())? };
    let frac_v: u64 = if frac.is_empty() { 0 } else { frac.parse().map_err(|_| bad())? };
    let num = int.checked_mul(den).and_then(|v| v.checked_add(frac_v)).ok_or_else(bad)?;
    Ok(Ratio::new(num, den))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ratios() {
        assert_eq!(parse_ratio("0.05").unwrap(), Ratio::new(1, 20));
        assert_eq!(parse_ratio("1/5").unwrap(), Ratio::new(1, 5));
        assert_eq!(parse_ratio("2").unwrap(), Ratio::from_integer(2));
        assert_eq!(parse_ratio(".5").unwrap(), Ratio::new(1, 2));
        assert!(parse_ratio("-1").is_err());
        assert!(parse_ratio("1/0").is_err());
        assert!(parse_ratio("abc").is_err());
    }
}
