//! Exact decimal numbers for measurement values and conversion factors.
//!
//! Represented as an i128 mantissa and a base-10 scale, so multiplying a
//! measurement by a conversion factor never rounds. Rendering strips
//! trailing fraction zeros and never uses scientific notation.

use std::fmt;

use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum DecimalError {
    #[error("{0:?} is not a decimal number")]
    Invalid(String),
    #[error("decimal overflow while scaling {0:?}")]
    Overflow(String),
}

/// value = mantissa / 10^scale
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Decimal {
    mantissa: i128,
    scale: u32,
}

impl Decimal {
    /// Parse a plain decimal: optional sign, digits, optional fraction.
    /// Exponents and other notations are rejected.
    pub fn parse(text: &str) -> Result<Decimal, DecimalError> {
        let invalid = || DecimalError::Invalid(text.to_string());
        let rest = text.strip_prefix('+').unwrap_or(text);
        let (negative, rest) = match rest.strip_prefix('-') {
            Some(r) => (true, r),
            None => (false, rest),
        };
        let (int_part, frac_part) = match rest.split_once('.') {
            Some((i, f)) => (i, f),
            None => (rest, ""),
        };
        if int_part.is_empty() && frac_part.is_empty() {
            return Err(invalid());
        }
        let all_digits = |s: &str| s.bytes().all(|b| b.is_ascii_digit());
        if !all_digits(int_part) || !all_digits(frac_part) {
            return Err(invalid());
        }
        let mut mantissa: i128 = 0;
        for b in int_part.bytes().chain(frac_part.bytes()) {
            mantissa = mantissa
                .checked_mul(10)
                .and_then(|m| m.checked_add((b - b'0') as i128))
                .ok_or_else(|| DecimalError::Overflow(text.to_string()))?;
        }
        if negative {
            mantissa = -mantissa;
        }
        Ok(Decimal { mantissa, scale: frac_part.len() as u32 }.normalized())
    }

    /// Exact product. Scales add; mantissas multiply with overflow checks.
    pub fn mul(self, other: Decimal) -> Result<Decimal, DecimalError> {
        let mantissa = self
            .mantissa
            .checked_mul(other.mantissa)
            .ok_or_else(|| DecimalError::Overflow(format!("{self} * {other}")))?;
        Ok(Decimal { mantissa, scale: self.scale + other.scale }.normalized())
    }

    pub fn is_negative(self) -> bool {
        self.mantissa < 0
    }

    pub fn is_zero(self) -> bool {
        self.mantissa == 0
    }

    /// Drop factors of ten shared between mantissa and scale.
    fn normalized(mut self) -> Decimal {
        while self.scale > 0 && self.mantissa % 10 == 0 {
            self.mantissa /= 10;
            self.scale -= 1;
        }
        self
    }
}

impl fmt::Display for Decimal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let norm = self.normalized();
        let sign = if norm.mantissa < 0 { "-" } else { "" };
        let digits = norm.mantissa.unsigned_abs().to_string();
        if norm.scale == 0 {
            return write!(f, "{sign}{digits}");
        }
        let scale = norm.scale as usize;
        if digits.len() > scale {
            let (int_part, frac_part) = digits.split_at(digits.len() - scale);
            write!(f, "{sign}{int_part}.{frac_part}")
        } else {
            write!(f, "{sign}0.{digits:0>scale$}")
        }
    }
}
