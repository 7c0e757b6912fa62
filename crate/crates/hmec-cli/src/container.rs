//! Binary ciphertext container.
//!
//! Layout, all fields big-endian and fixed-width:
//!
//! ```text
//! offset 0   magic    "HMEC" (4 octets)
//! offset 4   version  0x01
//! offset 5   mode     0x00 strict | 0x01 lenient
//! offset 6   original_length   u64
//! offset 14  payload  ciphertext octets
//! ```
//!
//! The payload length is fully determined by the mode and the original
//! length, and parsing rejects any mismatch. There is no integrity or
//! authentication tag: decrypting with the wrong key succeeds mechanically
//! and yields garbage.

use hmec::cipher::{self, CipherError, CipherKey, Mode};
use thiserror::Error;

pub const MAGIC: [u8; 4] = *b"HMEC";
pub const VERSION: u8 = 0x01;
pub const HEADER_LEN: usize = 14;

#[derive(Debug, Error, PartialEq)]
pub enum ContainerError {
    #[error("{0} bytes is too short for the {HEADER_LEN}-byte header")]
    TooShort(usize),
    #[error("bad magic {0:02x?}")]
    BadMagic([u8; 4]),
    #[error("unsupported version {0:#04x}")]
    UnsupportedVersion(u8),
    #[error("unknown mode byte {0:#04x}")]
    UnknownMode(u8),
    #[error("payload holds {actual} bytes but mode and length demand {expected}")]
    PayloadLengthMismatch { expected: u64, actual: u64 },
    #[error("original length {0} is not representable on this platform")]
    LengthOverflow(u64),
}

/// A ciphertext with the metadata needed to invert it.
#[derive(Debug, Clone, PartialEq)]
pub struct CipherContainer {
    pub mode: Mode,
    pub original_length: u64,
    pub payload: Vec<u8>,
}

impl CipherContainer {
    /// Payload size that `mode` produces for an `original_length`-byte
    /// plaintext: the input is zero-padded to an even length, and lenient
    /// embedding doubles it.
    pub fn expected_payload_len(mode: Mode, original_length: u64) -> Option<u64> {
        let padded = original_length.checked_add(original_length % 2)?;
        match mode {
            Mode::Strict => Some(padded),
            Mode::Lenient => padded.checked_mul(2),
        }
    }

    /// Encrypt `plaintext` and wrap it.
    pub fn seal(key: &CipherKey, mode: Mode, plaintext: &[u8]) -> Result<Self, CipherError> {
        let payload = cipher::encrypt(key, mode, plaintext)?;
        Ok(Self {
            mode,
            original_length: plaintext.len() as u64,
            payload,
        })
    }

    /// Decrypt the payload and strip the padding.
    pub fn open(&self, key: &CipherKey) -> Result<Vec<u8>, CipherError> {
        cipher::decrypt_exact(key, self.mode, &self.payload, self.original_length as usize)
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut bytes = Vec::with_capacity(HEADER_LEN + self.payload.len());
        bytes.extend_from_slice(&MAGIC);
        bytes.push(VERSION);
        bytes.push(match self.mode {
            Mode::Strict => 0x00,
            Mode::Lenient => 0x01,
        });
        bytes.extend_from_slice(&self.original_length.to_be_bytes());
        bytes.extend_from_slice(&self.payload);
        bytes
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, ContainerError> {
        if bytes.len() < HEADER_LEN {
            return Err(ContainerError::TooShort(bytes.len()));
        }
        let magic: [u8; 4] = bytes[0..4].try_into().expect("fixed-width slice");
        if magic != MAGIC {
            return Err(ContainerError::BadMagic(magic));
        }
        if bytes[4] != VERSION {
            return Err(ContainerError::UnsupportedVersion(bytes[4]));
        }
        let mode = match bytes[5] {
            0x00 => Mode::Strict,
            0x01 => Mode::Lenient,
            other => return Err(ContainerError::UnknownMode(other)),
        };
        let original_length =
            u64::from_be_bytes(bytes[6..14].try_into().expect("fixed-width slice"));
        if usize::try_from(original_length).is_err() {
            return Err(ContainerError::LengthOverflow(original_length));
        }
        let payload = &bytes[HEADER_LEN..];
        let expected = Self::expected_payload_len(mode, original_length)
            .ok_or(ContainerError::LengthOverflow(original_length))?;
        if payload.len() as u64 != expected {
            return Err(ContainerError::PayloadLengthMismatch {
                expected,
                actual: payload.len() as u64,
            });
        }
        Ok(Self {
            mode,
            original_length,
            payload: payload.to_vec(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use hmec::hill::HillKey;
    use proptest::prelude::*;

    fn key() -> CipherKey {
        CipherKey::new(
            3.912345678,
            0.5,
            3,
            4,
            HillKey::new([[1, 1], [0, 1]]).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn seal_then_open_round_trips() {
        let key = key();
        for mode in [Mode::Strict, Mode::Lenient] {
            let sealed = CipherContainer::seal(&key, mode, b"container payload").unwrap();
            assert_eq!(sealed.open(&key).unwrap(), b"container payload");
        }
    }

    #[test]
    fn empty_plaintext_gives_an_empty_payload() {
        let sealed = CipherContainer::seal(&key(), Mode::Lenient, b"").unwrap();
        assert_eq!(sealed.original_length, 0);
        assert!(sealed.payload.is_empty());
        let bytes = sealed.to_bytes();
        assert_eq!(bytes.len(), HEADER_LEN);
        assert_eq!(CipherContainer::from_bytes(&bytes).unwrap(), sealed);
    }

    #[test]
    fn header_errors_are_distinguished() {
        let sealed = CipherContainer::seal(&key(), Mode::Strict, b"HI").unwrap();
        let good = sealed.to_bytes();

        assert_eq!(
            CipherContainer::from_bytes(&good[..10]),
            Err(ContainerError::TooShort(10))
        );

        let mut bad = good.clone();
        bad[0] = b'X';
        assert_eq!(
            CipherContainer::from_bytes(&bad),
            Err(ContainerError::BadMagic(*b"XMEC"))
        );

        let mut bad = good.clone();
        bad[4] = 0x02;
        assert_eq!(
            CipherContainer::from_bytes(&bad),
            Err(ContainerError::UnsupportedVersion(0x02))
        );

        let mut bad = good.clone();
        bad[5] = 0x07;
        assert_eq!(
            CipherContainer::from_bytes(&bad),
            Err(ContainerError::UnknownMode(0x07))
        );

        let mut truncated = good.clone();
        truncated.pop();
        assert_eq!(
            CipherContainer::from_bytes(&truncated),
            Err(ContainerError::PayloadLengthMismatch {
                expected: 2,
                actual: 1
            })
        );
    }

    #[test]
    fn payload_length_tracks_mode_and_padding() {
        assert_eq!(
            CipherContainer::expected_payload_len(Mode::Strict, 5),
            Some(6)
        );
        assert_eq!(
            CipherContainer::expected_payload_len(Mode::Strict, 6),
            Some(6)
        );
        assert_eq!(
            CipherContainer::expected_payload_len(Mode::Lenient, 5),
            Some(12)
        );
        assert_eq!(
            CipherContainer::expected_payload_len(Mode::Lenient, u64::MAX),
            None
        );
    }

    proptest! {
        #[test]
        fn container_bytes_round_trip(
            plaintext in prop::collection::vec(any::<u8>(), 0..512),
            strict in prop::bool::ANY,
        ) {
            let mode = if strict { Mode::Strict } else { Mode::Lenient };
            let plaintext = if strict {
                plaintext.iter().map(|b| b & 0x7F).collect::<Vec<_>>()
            } else {
                plaintext
            };
            let sealed = CipherContainer::seal(&key(), mode, &plaintext).unwrap();
            let reparsed = CipherContainer::from_bytes(&sealed.to_bytes()).unwrap();
            prop_assert_eq!(&reparsed, &sealed);
            prop_assert_eq!(reparsed.open(&key()).unwrap(), plaintext);
        }
    }
}
