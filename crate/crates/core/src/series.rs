//! Reversible number-series encodings: planet names per digit, planet
//! codepoint sums per digit, and MD5 digests per term. Every encoder logs
//! the forward mapping so decoding is exact; type-3 surfaces can also be
//! inverted without a log through a bounded digest table.

use std::collections::HashMap;
use std::fmt::Write as _;

use md5::{Digest as _, Md5};
use serde::{Deserialize, Serialize};

/// The digit-to-planet bijection used by types 1 and 2.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct PlanetMap;

const TOKENS: [&str; 10] = [
    "Sun", "Mercury", "Venus", "Earth", "Mars", "Jupiter", "Saturn", "Uranus", "Neptune", "Pluto",
];

impl PlanetMap {
    pub fn token(self, digit: u8) -> &'static str {
        TOKENS[usize::from(digit)]
    }

    pub fn digit(self, token: &str) -> Option<u8> {
        TOKENS.iter().position(|t| *t == token).map(|i| i as u8)
    }

    /// Sum of the token's character code points, e.g. Mars = 403.
    pub fn codepoint_sum(self, digit: u8) -> u32 {
        self.token(digit).chars().map(u32::from).sum()
    }

    /// Inverse of [`codepoint_sum`](Self::codepoint_sum); total because the
    /// ten sums are pairwise distinct.
    pub fn digit_from_sum(self, sum: u32) -> Option<u8> {
        (0..10).find(|&d| self.codepoint_sum(d) == sum)
    }
}

/// A number-series puzzle: the full term list, which slot (if any) is
/// hidden in the rendered surface, the gold answer, and a free-text note
/// describing the pattern.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeriesInstance {
    pub terms: Vec<i64>,
    pub hidden_index: Option<usize>,
    pub answer: i64,
    pub pattern_note: String,
}

impl SeriesInstance {
    /// Checks that the hidden slot, when present, holds the answer.
    pub fn validate(&self) -> Result<(), SeriesError> {
        if let Some(i) = self.hidden_index {
            if self.terms.get(i) != Some(&self.answer) {
                return Err(SeriesError::HiddenSlotMismatch {
                    index: i,
                    answer: self.answer,
                });
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum EncoderId {
    Type1,
    Type2,
    Type3,
}

/// One term's recorded forward mapping.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MappingEntry {
    pub term: i64,
    /// Planet tokens for types 1 and 2; the decimal string for type 3.
    pub intermediate: Vec<String>,
    pub surface: String,
    pub encoder: EncoderId,
}

/// Forward/reverse mapping log; holds everything needed to reconstruct
/// the base instance exactly.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MappingLog {
    pub entries: Vec<MappingEntry>,
    pub hidden_index: Option<usize>,
    pub answer: i64,
    pub pattern_note: String,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SeriesError {
    #[error("term {term} is negative")]
    NegativeTerm { term: i64 },
    #[error("hidden slot {index} does not hold the answer {answer}")]
    HiddenSlotMismatch { index: usize, answer: i64 },
    #[error("unrecognized token `{token}`")]
    UnrecognizedToken { token: String },
    #[error("digest `{digest}` is not in the inversion table")]
    DigestNotInTable { digest: String },
}

/// Lowercase 32-hex MD5 digest of a string.
pub fn md5_hex(s: &str) -> String {
    let digest = Md5::digest(s.as_bytes());
    let mut out = String::with_capacity(32);
    for b in digest {
        write!(out, "{b:02x}").expect("writing to a String cannot fail");
    }
    out
}

fn digits_of(term: i64) -> Vec<u8> {
    term.to_string().bytes().map(|b| b - b'0').collect()
}

fn encode_with(
    s: &SeriesInstance,
    encoder: EncoderId,
    term_surface: impl Fn(i64) -> (Vec<String>, String),
) -> Result<(String, MappingLog), SeriesError> {
    s.validate()?;
    if let Some(&term) = s.terms.iter().find(|&&t| t < 0) {
        return Err(SeriesError::NegativeTerm { term });
    }
    let mut entries = Vec::with_capacity(s.terms.len());
    let mut rendered = Vec::with_capacity(s.terms.len());
    for (i, &term) in s.terms.iter().enumerate() {
        let (intermediate, surface) = term_surface(term);
        rendered.push(if s.hidden_index == Some(i) {
            "?".to_string()
        } else {
            surface.clone()
        });
        entries.push(MappingEntry {
            term,
            intermediate,
            surface,
            encoder,
        });
    }
    Ok((
        rendered.join(", "),
        MappingLog {
            entries,
            hidden_index: s.hidden_index,
            answer: s.answer,
            pattern_note: s.pattern_note.clone(),
        },
    ))
}

/// Digit-wise planet names: 516 becomes "Jupiter Mercury Saturn".
pub fn encode_type1(s: &SeriesInstance) -> Result<(String, MappingLog), SeriesError> {
    encode_with(s, EncoderId::Type1, |term| {
        let tokens: Vec<String> = digits_of(term)
            .into_iter()
            .map(|d| PlanetMap.token(d).to_string())
            .collect();
        let surface = tokens.join(" ");
        (tokens, surface)
    })
}

/// Digit-wise planet codepoint sums: 4 becomes Mars, rendered as 403.
pub fn encode_type2(s: &SeriesInstance) -> Result<(String, MappingLog), SeriesError> {
    encode_with(s, EncoderId::Type2, |term| {
        let digits = digits_of(term);
        let tokens: Vec<String> = digits
            .iter()
            .map(|&d| PlanetMap.token(d).to_string())
            .collect();
        let surface = digits
            .iter()
            .map(|&d| PlanetMap.codepoint_sum(d).to_string())
            .collect::<Vec<_>>()
            .join(" ");
        (tokens, surface)
    })
}

/// Whole-term MD5: each term is the digest of its decimal string.
pub fn encode_type3(s: &SeriesInstance) -> Result<(String, MappingLog), SeriesError> {
    encode_with(s, EncoderId::Type3, |term| {
        let decimal = term.to_string();
        let surface = md5_hex(&decimal);
        (vec![decimal], surface)
    })
}

/// Inverts an encoded surface back to the base instance using its log.
pub fn decode(surface: &str, log: &MappingLog) -> Result<SeriesInstance, SeriesError> {
    let rendered: Vec<&str> = if surface.is_empty() {
        Vec::new()
    } else {
        surface.split(", ").collect()
    };
    if rendered.len() != log.entries.len() {
        return Err(SeriesError::UnrecognizedToken {
            token: surface.to_string(),
        });
    }
    let mut terms = Vec::with_capacity(log.entries.len());
    for (i, (shown, entry)) in rendered.iter().zip(&log.entries).enumerate() {
        let expected = if log.hidden_index == Some(i) {
            "?"
        } else {
            entry.surface.as_str()
        };
        if *shown != expected {
            return Err(SeriesError::UnrecognizedToken {
                token: shown.to_string(),
            });
        }
        let recovered = match entry.encoder {
            EncoderId::Type1 => {
                let mut digits = String::new();
                for token in &entry.intermediate {
                    let d =
                        PlanetMap
                            .digit(token)
                            .ok_or_else(|| SeriesError::UnrecognizedToken {
                                token: token.clone(),
                            })?;
                    digits.push(char::from(b'0' + d));
                }
                digits.parse::<i64>().expect("digits form a valid integer")
            }
            EncoderId::Type2 => {
                let mut digits = String::new();
                for part in entry.surface.split(' ') {
                    let sum: u32 = part.parse().map_err(|_| SeriesError::UnrecognizedToken {
                        token: part.to_string(),
                    })?;
                    let d = PlanetMap.digit_from_sum(sum).ok_or_else(|| {
                        SeriesError::UnrecognizedToken {
                            token: part.to_string(),
                        }
                    })?;
                    digits.push(char::from(b'0' + d));
                }
                digits.parse::<i64>().expect("digits form a valid integer")
            }
            EncoderId::Type3 => entry
                .intermediate
                .first()
                .and_then(|s| s.parse::<i64>().ok())
                .ok_or_else(|| SeriesError::UnrecognizedToken {
                    token: entry.surface.clone(),
                })?,
        };
        if recovered != entry.term {
            return Err(SeriesError::UnrecognizedToken {
                token: shown.to_string(),
            });
        }
        terms.push(recovered);
    }
    let instance = SeriesInstance {
        terms,
        hidden_index: log.hidden_index,
        answer: log.answer,
        pattern_note: log.pattern_note.clone(),
    };
    instance.validate()?;
    Ok(instance)
}

/// Log-free inversion table for type-3 surfaces over a bounded universe.
#[derive(Debug, Clone)]
pub struct DigestTable {
    map: HashMap<String, i64>,
}

impl DigestTable {
    pub fn new(universe: std::ops::RangeInclusive<i64>) -> Self {
        DigestTable {
            map: universe.map(|n| (md5_hex(&n.to_string()), n)).collect(),
        }
    }

    pub fn invert(&self, digest: &str) -> Result<i64, SeriesError> {
        self.map
            .get(digest)
            .copied()
            .ok_or_else(|| SeriesError::DigestNotInTable {
                digest: digest.to_string(),
            })
    }
}
