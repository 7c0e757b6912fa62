//! The hybrid message-embedded cipher.
//!
//! Encryption pipeline, per byte stream:
//!
//! 1. zero-pad the plaintext to a multiple of the Hill block size;
//! 2. embed each byte into the 7-bit alphabet (identity in strict mode,
//!    base-128 digit split in lenient mode) and Hill-encrypt block-wise;
//! 3. for each resulting symbol: substitute it through the NLFSR, iterate
//!    the logistic map `n1` times and add the quantized state mod 256,
//!    iterate `n2` more times and XOR the quantized state to get the
//!    ciphertext byte, then perturb the map state with that ciphertext
//!    byte before the next symbol.
//!
//! The feedback value is the ciphertext byte itself, so the receiver can
//! replay the identical state trajectory and run every stage backwards.
//! Wrong-key decryption is mechanically well-defined and silently yields
//! garbage; there is no integrity tag.

use thiserror::Error;

use crate::chaos::{
    logistic_iterate, perturb_state, quantize_state, LogisticParams, LogisticState, CHAOTIC_R_MAX,
    CHAOTIC_R_MIN,
};
use crate::hill::{HillError, HillKey, BLOCK_SIZE};
use crate::nlfsr::NlfsrSpec;

/// Canonical key-grid resolution for the logistic parameter `r`.
pub const R_STEP: f64 = 1e-9;

/// Inclusive bounds for the per-symbol iteration counts `n1`, `n2`.
pub const ITERATIONS_MIN: u32 = 1;
pub const ITERATIONS_MAX: u32 = 1000;

#[derive(Debug, Error, PartialEq)]
pub enum KeyError {
    #[error(
        "logistic parameter r = {0} outside the chaotic region [{CHAOTIC_R_MIN}, {CHAOTIC_R_MAX}]"
    )]
    ParameterOutsideChaoticRegion(f64),
    #[error("initial state x0 = {0} outside (0, 1)")]
    InitialStateOutOfRange(f64),
    #[error("iteration count {name} = {value} outside [{ITERATIONS_MIN}, {ITERATIONS_MAX}]")]
    IterationCountOutOfRange { name: &'static str, value: u32 },
}

#[derive(Debug, Error, PartialEq)]
pub enum CipherError {
    #[error(transparent)]
    Hill(#[from] HillError),
    /// Strict mode admits only 7-bit plaintext bytes.
    #[error("plaintext byte {0:#04x} is not 7-bit clean; strict mode rejects it")]
    NonAsciiByte(u8),
    #[error("ciphertext length {0} is not a multiple of the block size {BLOCK_SIZE}")]
    MalformedCiphertext(usize),
    /// Requested plaintext length exceeds what the ciphertext carries.
    #[error("original length {requested} exceeds the {available} bytes recovered")]
    LengthBeyondStream { requested: usize, available: usize },
}

/// How plaintext bytes are embedded into the 7-bit Hill alphabet.
///
/// Strict mode rejects bytes ≥ 128 and keeps ciphertext exactly as long as
/// the padded plaintext. Lenient mode splits every byte into two base-128
/// digits (high digit first), doubling the stream but admitting arbitrary
/// binary input.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum Mode {
    Strict,
    #[default]
    Lenient,
}

impl Mode {
    /// Stream length produced by embedding `padded_len` plaintext bytes.
    pub fn embedded_len(&self, padded_len: usize) -> usize {
        match self {
            Mode::Strict => padded_len,
            Mode::Lenient => padded_len * 2,
        }
    }
}

/// The full secret material: logistic parameter `r` (canonicalized to the
/// 10⁻⁹ grid), initial state `x0`, the per-symbol iteration counts and the
/// Hill matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct CipherKey {
    r: f64,
    x0: f64,
    n1: u32,
    n2: u32,
    hill: HillKey,
}

impl CipherKey {
    pub fn new(r: f64, x0: f64, n1: u32, n2: u32, hill: HillKey) -> Result<Self, KeyError> {
        let r = Self::normalize_r(r);
        if !(CHAOTIC_R_MIN..=CHAOTIC_R_MAX).contains(&r) {
            return Err(KeyError::ParameterOutsideChaoticRegion(r));
        }
        if !(x0 > 0.0 && x0 < 1.0) {
            return Err(KeyError::InitialStateOutOfRange(x0));
        }
        for (name, value) in [("n1", n1), ("n2", n2)] {
            if !(ITERATIONS_MIN..=ITERATIONS_MAX).contains(&value) {
                return Err(KeyError::IterationCountOutOfRange { name, value });
            }
        }
        Ok(Self {
            r,
            x0,
            n1,
            n2,
            hill,
        })
    }

    /// Snap `r` onto the canonical 10⁻⁹ fixed-point grid.
    pub fn normalize_r(r: f64) -> f64 {
        (r * 1e9).round() / 1e9
    }

    /// Same key with a different (normalized) `r`.
    pub fn with_r(&self, r: f64) -> Result<Self, KeyError> {
        Self::new(r, self.x0, self.n1, self.n2, self.hill)
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn x0(&self) -> f64 {
        self.x0
    }

    pub fn n1(&self) -> u32 {
        self.n1
    }

    pub fn n2(&self) -> u32 {
        self.n2
    }

    pub fn hill(&self) -> &HillKey {
        &self.hill
    }
}

/// The chaotic keystream: per symbol it yields the stage-1 additive byte,
/// the stage-2 XOR byte and the raw stage-2 state, and absorbs the emitted
/// ciphertext byte between symbols.
struct Keystream {
    params: LogisticParams,
    state: LogisticState,
    n1: usize,
    n2: usize,
}

impl Keystream {
    fn new(key: &CipherKey) -> Self {
        let params = LogisticParams::new(key.r).expect("CipherKey guarantees the chaotic region");
        let state = LogisticState::new(key.x0).expect("CipherKey guarantees x0 in (0, 1)");
        Self {
            params,
            state,
            n1: key.n1 as usize,
            n2: key.n2 as usize,
        }
    }

    fn next(&mut self) -> (u8, u8, f64) {
        self.state = logistic_iterate(&self.params, &self.state, self.n1);
        let additive = quantize_state(&self.state);
        self.state = logistic_iterate(&self.params, &self.state, self.n2);
        let xor = quantize_state(&self.state);
        (additive, xor, self.state.x())
    }

    fn absorb(&mut self, ciphertext_byte: u8) {
        self.state = perturb_state(&self.state, ciphertext_byte);
    }
}

fn pad(plaintext: &[u8]) -> Vec<u8> {
    let mut padded = plaintext.to_vec();
    padded.resize(plaintext.len().next_multiple_of(BLOCK_SIZE), 0);
    padded
}

fn embed(mode: Mode, padded: &[u8]) -> Result<Vec<u8>, CipherError> {
    match mode {
        Mode::Strict => {
            if let Some(&bad) = padded.iter().find(|&&b| b >= 128) {
                return Err(CipherError::NonAsciiByte(bad));
            }
            Ok(padded.to_vec())
        }
        Mode::Lenient => Ok(padded.iter().flat_map(|&b| [b >> 7, b & 0x7F]).collect()),
    }
}

fn extract(mode: Mode, symbols: &[u8]) -> Vec<u8> {
    match mode {
        Mode::Strict => symbols.to_vec(),
        Mode::Lenient => symbols
            .chunks_exact(2)
            .map(|pair| ((pair[0] & 1) << 7) | (pair[1] & 0x7F))
            .collect(),
    }
}

/// Encrypt `plaintext` under `key`. The ciphertext is exactly as long as
/// the embedded, padded stream; the original length travels out of band
/// (see the container format in the CLI).
pub fn encrypt(key: &CipherKey, mode: Mode, plaintext: &[u8]) -> Result<Vec<u8>, CipherError> {
    encrypt_with_trace(key, mode, plaintext).map(|(ciphertext, _)| ciphertext)
}

/// [`encrypt`] that also reports the raw logistic state backing each
/// ciphertext byte (the stage-2 state before quantization). The trace is
/// what tolerance-based output-equality comparisons inspect.
pub fn encrypt_with_trace(
    key: &CipherKey,
    mode: Mode,
    plaintext: &[u8],
) -> Result<(Vec<u8>, Vec<f64>), CipherError> {
    let symbols = embed(mode, &pad(plaintext))?;
    let nlfsr = NlfsrSpec;
    let mut hill_stage = Vec::with_capacity(symbols.len());
    for block in symbols.chunks_exact(BLOCK_SIZE) {
        hill_stage.extend(key.hill.encrypt_block([block[0], block[1]])?);
    }

    let mut keystream = Keystream::new(key);
    let mut ciphertext = Vec::with_capacity(hill_stage.len());
    let mut trace = Vec::with_capacity(hill_stage.len());
    for z in hill_stage {
        let substituted = nlfsr.substitute(z);
        let (additive, xor, state) = keystream.next();
        let intermediate = substituted.wrapping_add(additive);
        let c = intermediate ^ xor;
        ciphertext.push(c);
        trace.push(state);
        keystream.absorb(c);
    }
    Ok((ciphertext, trace))
}

/// Decrypt to the padded plaintext stream (pad bytes retained). Callers
/// that know the original length should use [`decrypt_exact`].
pub fn decrypt(key: &CipherKey, mode: Mode, ciphertext: &[u8]) -> Result<Vec<u8>, CipherError> {
    if !ciphertext.len().is_multiple_of(BLOCK_SIZE) {
        return Err(CipherError::MalformedCiphertext(ciphertext.len()));
    }
    let nlfsr = NlfsrSpec;
    let mut keystream = Keystream::new(key);
    let mut hill_stage = Vec::with_capacity(ciphertext.len());
    for &c in ciphertext {
        let (additive, xor, _) = keystream.next();
        let intermediate = c ^ xor;
        let substituted = intermediate.wrapping_sub(additive);
        // Mask to the alphabet: a no-op for genuine ciphertext, and keeps
        // wrong-key decryption mechanically valid for the Hill stage.
        hill_stage.push(nlfsr.inverse(substituted) & 0x7F);
        keystream.absorb(c);
    }

    let inverse = key.hill.inverse();
    let mut symbols = Vec::with_capacity(hill_stage.len());
    for block in hill_stage.chunks_exact(BLOCK_SIZE) {
        symbols.extend(inverse.encrypt_block([block[0], block[1]])?);
    }
    Ok(extract(mode, &symbols))
}

/// Decrypt and truncate the padded stream to `original_len` bytes.
pub fn decrypt_exact(
    key: &CipherKey,
    mode: Mode,
    ciphertext: &[u8],
    original_len: usize,
) -> Result<Vec<u8>, CipherError> {
    let mut padded = decrypt(key, mode, ciphertext)?;
    if original_len > padded.len() {
        return Err(CipherError::LengthBeyondStream {
            requested: original_len,
            available: padded.len(),
        });
    }
    padded.truncate(original_len);
    Ok(padded)
}
