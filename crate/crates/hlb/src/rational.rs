//! Exponents given on the command line: `4`, `7/2`, `199999/1000`, `3.5`, `inf`.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ParseError {
    #[error("cannot parse {0:?} as a rational number or \"inf\"")]
    Malformed(String),
    #[error("zero denominator in {0:?}")]
    ZeroDenominator(String),
    #[error("{0:?} does not fit in 64-bit numerator/denominator")]
    TooLarge(String),
    #[error("cannot parse {0:?} as a seed")]
    Seed(String),
}

/// A nonnegative rational, kept in lowest terms, or `+∞`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Rational {
    Finite { num: u64, den: u64 },
    Infinite,
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

impl Rational {
    pub fn new(num: u64, den: u64) -> Option<Self> {
        if den == 0 {
            return None;
        }
        let g = gcd(num, den).max(1);
        Some(Rational::Finite { num: num / g, den: den / g })
    }

    pub fn integer(n: u64) -> Self {
        Rational::Finite { num: n, den: 1 }
    }

    pub fn to_f64(self) -> f64 {
        match self {
            Rational::Finite { num, den } => num as f64 / den as f64,
            Rational::Infinite => f64::INFINITY,
        }
    }

    /// `(p_num, p_den)` columns: `("inf", 1)` at infinity.
    pub fn parts(self) -> (String, u64) {
        match self {
            Rational::Finite { num, den } => (num.to_string(), den),
            Rational::Infinite => ("inf".to_string(), 1),
        }
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Rational::Finite { num, den: 1 } => write!(f, "{num}"),
            Rational::Finite { num, den } => write!(f, "{num}/{den}"),
            Rational::Infinite => f.write_str("inf"),
        }
    }
}

fn parse_u64(s: &str, whole: &str) -> Result<u64, ParseError> {
    if s.is_empty() || !s.bytes().all(|b| b.is_ascii_digit()) {
        return Err(ParseError::Malformed(whole.to_string()));
    }
    s.parse().map_err(|_| ParseError::TooLarge(whole.to_string()))
}

impl FromStr for Rational {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, ParseError> {
        let t = s.trim();
        if matches!(t.to_ascii_lowercase().as_str(), "inf" | "infinity") || t == "∞" {
            return Ok(Rational::Infinite);
        }
        if let Some((a, b)) = t.split_once('/') {
            let (num, den) = (parse_u64(a, s)?, parse_u64(b, s)?);
            return Rational::new(num, den).ok_or_else(|| ParseError::ZeroDenominator(s.to_string()));
        }
        if let Some((int, frac)) = t.split_once('.') {
            let digits = format!("{int}{frac}");
            let num = parse_u64(&digits, s)?;
            let den = 10u64.checked_pow(frac.len() as u32).ok_or_else(|| ParseError::TooLarge(s.to_string()))?;
            return Ok(Rational::new(num, den).expect("nonzero power of ten"));
        }
        Ok(Rational::integer(parse_u64(t, s)?))
    }
}

/// Seeds: decimal or `0x` hexadecimal, `_` separators allowed.
pub fn parse_seed(s: &str) -> Result<u64, ParseError> {
    let t: String = s.trim().chars().filter(|&c| c != '_').collect();
    let parsed = match t.strip_prefix("0x").or_else(|| t.strip_prefix("0X")) {
        Some(hex) => u64::from_str_radix(hex, 16),
        None => t.parse(),
    };
    parsed.map_err(|_| ParseError::Seed(s.to_string()))
}
