//! Hybrid message-embedded chaotic cipher and its cryptanalysis toolkit.
//!
//! The cipher combines three stages, in order:
//!
//! 1. a 2×2 Hill cipher over the 7-bit alphabet (mod 128),
//! 2. an invertible 8-bit NLFSR byte substitution,
//! 3. a two-stage keystream mix driven by the logistic map, where every
//!    produced ciphertext byte perturbs the chaotic state before the next
//!    byte is processed (ciphertext feedback).
//!
//! The logistic parameter `r`, the initial state `x0`, the per-byte
//! iteration counts `n1`/`n2` and the Hill matrix together form the key
//! ([`CipherKey`]). Because the feedback value is the ciphertext byte,
//! which the receiver also holds, decryption replays the exact state
//! trajectory and inverts each stage.
//!
//! The [`cryptanalysis`] module implements the measurement side: avalanche
//! (plaintext/key sensitivity) statistics, output-equality identifiability
//! scans, brute-force known-plaintext key search over parameter grids, and
//! key-space accounting.
//!
//! This is a research artifact for studying chaotic ciphers. It is not a
//! production cipher and makes no real-world security claims.

pub mod chaos;
pub mod cipher;
pub mod cryptanalysis;
pub mod hill;
pub mod nlfsr;

pub use chaos::{generate_orbit, LogisticParams, LogisticState, Orbit};
pub use cipher::{decrypt, decrypt_exact, encrypt, CipherKey, Mode};
pub use hill::HillKey;
pub use nlfsr::NlfsrSpec;
