use crate::error::{Error, Result};

/// Digits of ℤ/4, least significant first.
pub const BASE: u8 = 4;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    Up,
    Down,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum OdometerStep {
    Value(Vec<u8>),
    /// The carry (or borrow) left position L − 1.
    CarryOverflow,
}

pub fn parse_digits(s: &str) -> Result<Vec<u8>> {
    s.trim()
        .chars()
        .map(|c| match c.to_digit(10) {
            Some(d) if d < BASE as u32 => Ok(d as u8),
            _ => Err(Error::Parse { input: s.into(), reason: format!("`{c}` is not a base-{BASE} digit") }),
        })
        .collect()
}

pub fn format_digits(x: &[u8]) -> String {
    x.iter().map(|d| char::from(b'0' + d)).collect()
}

fn validate(x: &[u8]) -> Result<()> {
    if x.is_empty() {
        return Err(Error::InvalidInput("truncation must have length at least 1".into()));
    }
    if let Some(d) = x.iter().find(|&&d| d >= BASE) {
        return Err(Error::InvalidInput(format!("digit {d} is not below {BASE}")));
    }
    Ok(())
}

/// Adds ±1 with carry.
pub fn odometer_step(x: &[u8], dir: Direction) -> Result<OdometerStep> {
    validate(x)?;
    let mut out = x.to_vec();
    for d in out.iter_mut() {
        match dir {
            Direction::Up if *d == BASE - 1 => *d = 0,
            Direction::Up => {
                *d += 1;
                return Ok(OdometerStep::Value(out));
            }
            Direction::Down if *d == 0 => *d = BASE - 1,
            Direction::Down => {
                *d -= 1;
                return Ok(OdometerStep::Value(out));
            }
        }
    }
    Ok(OdometerStep::CarryOverflow)
}

/// Least n with every x_k ∈ {1, 2} for k ≥ n; L when the last digit is 0 or 3.
pub fn stable_tail_start(x: &[u8]) -> usize {
    x.len() - x.iter().rev().take_while(|&&d| d == 1 || d == 2).count()
}

/// f(x)_n = x_n + 2 at n = n_x, identity elsewhere. `declared` is the index from which the
/// truncation claims its tail lies in {1, 2}.
pub fn odometer_compression(x: &[u8], declared: Option<usize>) -> Result<Vec<u8>> {
    validate(x)?;
    let Some(from) = declared else {
        return Err(Error::Precondition("no stable tail declared".into()));
    };
    let n = stable_tail_start(x);
    if from >= x.len() || n > from {
        return Err(Error::Precondition(format!("no tail in {{1,2}} from index {from} within length {}", x.len())));
    }
    let mut out = x.to_vec();
    out[n] = (out[n] + 2) % BASE;
    Ok(out)
}

/// Inverse of the compression on its image: the changed digit is the last one outside {1, 2},
/// and the digit before it (if any) is outside {1, 2} as well.
pub fn odometer_decompression(y: &[u8]) -> Result<Vec<u8>> {
    validate(y)?;
    let n = stable_tail_start(y)
        .checked_sub(1)
        .ok_or_else(|| Error::Precondition("every digit is in {1,2}: not in the image".into()))?;
    if n > 0 && matches!(y[n - 1], 1 | 2) {
        return Err(Error::Precondition(format!(
            "digit {} before position {n} is in {{1,2}}: not in the image",
            y[n - 1]
        )));
    }
    let mut out = y.to_vec();
    out[n] = (out[n] + 2) % BASE;
    Ok(out)
}
