//! Line-oriented UTF-8 key document.
//!
//! Canonical form, one `field = value` per line:
//!
//! ```text
//! r = 3.912345678
//! x0 = 5.0000000000000000e-1
//! n1 = 3
//! n2 = 4
//! k0 = 1 1
//! k1 = 0 1
//! mode = lenient
//! ```
//!
//! `r` is printed with 9 decimal places (its canonical 10⁻⁹ grid) and `x0`
//! with 17 significant digits so the exact f64 round-trips. Parsing
//! normalizes `r` onto the grid, so serialize∘parse is the identity on
//! canonical documents. Blank lines and `#` comments are accepted on input.

use hmec::cipher::{CipherKey, KeyError, Mode};
use hmec::hill::{HillError, HillKey};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum KeyFileError {
    #[error("line {0:?} is not a `field = value` pair")]
    MalformedLine(String),
    #[error("missing field `{0}`")]
    MissingField(&'static str),
    #[error("duplicate field `{0}`")]
    DuplicateField(String),
    #[error("unknown field `{0}`")]
    UnknownField(String),
    #[error("field `{field}` has invalid value {value:?}")]
    InvalidValue { field: &'static str, value: String },
    #[error(transparent)]
    InvalidKey(#[from] KeyError),
    #[error(transparent)]
    InvalidHill(#[from] HillError),
}

/// A parsed key document: the cipher key plus the embedding mode.
#[derive(Debug, Clone, PartialEq)]
pub struct KeyFile {
    pub key: CipherKey,
    pub mode: Mode,
}

const FIELDS: [&str; 7] = ["r", "x0", "n1", "n2", "k0", "k1", "mode"];

impl KeyFile {
    pub fn new(key: CipherKey, mode: Mode) -> Self {
        Self { key, mode }
    }

    pub fn parse(text: &str) -> Result<Self, KeyFileError> {
        let mut values: [Option<String>; 7] = Default::default();
        for line in text.lines() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (field, value) = line
                .split_once('=')
                .ok_or_else(|| KeyFileError::MalformedLine(line.to_string()))?;
            let field = field.trim();
            let value = value.trim();
            let slot = FIELDS
                .iter()
                .position(|f| *f == field)
                .ok_or_else(|| KeyFileError::UnknownField(field.to_string()))?;
            if values[slot].is_some() {
                return Err(KeyFileError::DuplicateField(field.to_string()));
            }
            values[slot] = Some(value.to_string());
        }

        let take = |slot: usize| -> Result<&str, KeyFileError> {
            values[slot]
                .as_deref()
                .ok_or(KeyFileError::MissingField(FIELDS[slot]))
        };
        let r = parse_f64("r", take(0)?)?;
        let x0 = parse_f64("x0", take(1)?)?;
        let n1 = parse_u32("n1", take(2)?)?;
        let n2 = parse_u32("n2", take(3)?)?;
        let row0 = parse_row("k0", take(4)?)?;
        let row1 = parse_row("k1", take(5)?)?;
        let mode = match take(6)? {
            "strict" => Mode::Strict,
            "lenient" => Mode::Lenient,
            other => {
                return Err(KeyFileError::InvalidValue {
                    field: "mode",
                    value: other.to_string(),
                })
            }
        };
        let hill = HillKey::new([row0, row1])?;
        let key = CipherKey::new(r, x0, n1, n2, hill)?;
        Ok(Self { key, mode })
    }

    pub fn serialize(&self) -> String {
        let k = self.key.hill().entries();
        format!(
            "r = {:.9}\nx0 = {:.16e}\nn1 = {}\nn2 = {}\nk0 = {} {}\nk1 = {} {}\nmode = {}\n",
            self.key.r(),
            self.key.x0(),
            self.key.n1(),
            self.key.n2(),
            k[0][0],
            k[0][1],
            k[1][0],
            k[1][1],
            match self.mode {
                Mode::Strict => "strict",
                Mode::Lenient => "lenient",
            },
        )
    }
}

fn parse_f64(field: &'static str, value: &str) -> Result<f64, KeyFileError> {
    value.parse().map_err(|_| KeyFileError::InvalidValue {
        field,
        value: value.to_string(),
    })
}

fn parse_u32(field: &'static str, value: &str) -> Result<u32, KeyFileError> {
    value.parse().map_err(|_| KeyFileError::InvalidValue {
        field,
        value: value.to_string(),
    })
}

fn parse_row(field: &'static str, value: &str) -> Result<[u8; 2], KeyFileError> {
    let invalid = || KeyFileError::InvalidValue {
        field,
        value: value.to_string(),
    };
    let mut parts = value.split_whitespace();
    let a = parts.next().ok_or_else(invalid)?;
    let b = parts.next().ok_or_else(invalid)?;
    if parts.next().is_some() {
        return Err(invalid());
    }
    Ok([
        a.parse().map_err(|_| invalid())?,
        b.parse().map_err(|_| invalid())?,
    ])
}
