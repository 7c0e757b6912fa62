//! Measurement battery for the cipher: avalanche statistics, output-equality
//! identifiability scans, brute-force known-plaintext key search over
//! parameter grids, and key-space accounting.
//!
//! Grid scans and corpus suites are embarrassingly parallel; work is split
//! into independent chunks (each owning its own cipher state) and the
//! results are merged in deterministic order.

use std::collections::HashMap;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::chaos::{CHAOTIC_R_MAX, CHAOTIC_R_MIN};
use crate::cipher::{decrypt, encrypt, encrypt_with_trace, CipherError, CipherKey, KeyError, Mode};
use crate::hill::{HillKey, BLOCK_SIZE};

#[derive(Debug, Error, PartialEq)]
pub enum AnalysisError {
    #[error("sequences differ in length ({left} vs {right} bytes)")]
    LengthMismatch { left: usize, right: usize },
    #[error("bit position {position} out of range for a {bits}-bit plaintext")]
    BitPositionOutOfRange { position: usize, bits: usize },
    #[error("grid bounds [{r_min}, {r_max}] must be ordered and inside [{CHAOTIC_R_MIN}, {CHAOTIC_R_MAX}]")]
    InvalidGridBounds { r_min: f64, r_max: f64 },
    #[error("grid step {0} must be positive and finite")]
    InvalidGridStep(f64),
    #[error("scan input must be non-empty")]
    EmptyInput,
    #[error("known prefix must hold at least one byte")]
    EmptyPrefix,
    #[error("output-equality scans need at least one output byte")]
    NoOutputBytes,
    #[error("tolerance {0} must be non-negative")]
    InvalidTolerance(f64),
    #[error("corpus must hold at least one plaintext")]
    EmptyCorpus,
    #[error("ciphertext holds {available} bytes but the prefix needs {needed}")]
    CiphertextTooShort { needed: usize, available: usize },
    #[error(transparent)]
    Key(#[from] KeyError),
    #[error(transparent)]
    Cipher(#[from] CipherError),
}

/// Evenly spaced candidate values for the logistic parameter `r`:
/// `r_min + i·step` for `i = 0 .. key_space_size − 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KeyGrid {
    r_min: f64,
    r_max: f64,
    step: f64,
}

impl KeyGrid {
    /// Bounds must be ordered (`r_min = r_max` makes a single-point grid)
    /// and inside the chaotic region; the step must be positive.
    pub fn new(r_min: f64, r_max: f64, step: f64) -> Result<Self, AnalysisError> {
        let in_region = |r: f64| (CHAOTIC_R_MIN..=CHAOTIC_R_MAX).contains(&r);
        if !(in_region(r_min) && in_region(r_max) && r_min <= r_max) {
            return Err(AnalysisError::InvalidGridBounds { r_min, r_max });
        }
        if !(step > 0.0 && step.is_finite()) {
            return Err(AnalysisError::InvalidGridStep(step));
        }
        Ok(Self { r_min, r_max, step })
    }

    /// The whole chaotic region at the given step.
    pub fn full_region(step: f64) -> Result<Self, AnalysisError> {
        Self::new(CHAOTIC_R_MIN, CHAOTIC_R_MAX, step)
    }

    /// A grid of at most `max_points` values at the given step that
    /// contains `r` on a grid point, clipped to the chaotic region and
    /// centered on `r` as far as the clipping allows.
    pub fn aligned_window(r: f64, step: f64, max_points: u64) -> Result<Self, AnalysisError> {
        if !(CHAOTIC_R_MIN..=CHAOTIC_R_MAX).contains(&r) {
            return Err(AnalysisError::InvalidGridBounds { r_min: r, r_max: r });
        }
        if !(step > 0.0 && step.is_finite()) {
            return Err(AnalysisError::InvalidGridStep(step));
        }
        if max_points == 0 {
            return Err(AnalysisError::InvalidGridStep(step));
        }
        let below_available = ((r - CHAOTIC_R_MIN) / step).floor() as u64;
        let above_available = ((CHAOTIC_R_MAX - r) / step).floor() as u64;
        let half = (max_points - 1) / 2;
        let below = below_available.min(max_points - 1 - half.min(above_available));
        let above = above_available.min(max_points - 1 - below);
        let r_min = (r - below as f64 * step).max(CHAOTIC_R_MIN);
        let r_max = (r + above as f64 * step).min(CHAOTIC_R_MAX);
        Self::new(r_min, r_max, step)
    }

    pub fn r_min(&self) -> f64 {
        self.r_min
    }

    pub fn r_max(&self) -> f64 {
        self.r_max
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    /// The `i`-th grid value.
    pub fn point(&self, i: u64) -> f64 {
        self.r_min + i as f64 * self.step
    }

    pub fn points(&self) -> impl Iterator<Item = f64> + '_ {
        (0..key_space_size(self)).map(move |i| self.point(i))
    }
}

/// Number of grid points: `floor((r_max − r_min)/step) + 1`.
///
/// The quotient is snapped to the nearest integer when it lands within
/// 10⁻⁶ of one, so that grids specified with decimal bounds and steps
/// (which are not exactly representable in binary) count the way the
/// decimal arithmetic would.
pub fn key_space_size(grid: &KeyGrid) -> u64 {
    let q = (grid.r_max - grid.r_min) / grid.step;
    let n = if (q - q.round()).abs() < 1e-6 {
        q.round()
    } else {
        q.floor()
    };
    n as u64 + 1
}

/// Percentage of differing bits between two equal-length byte sequences.
pub fn bit_change_percent(a: &[u8], b: &[u8]) -> Result<f64, AnalysisError> {
    if a.len() != b.len() {
        return Err(AnalysisError::LengthMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    if a.is_empty() {
        return Ok(0.0);
    }
    let differing: u64 = a
        .iter()
        .zip(b)
        .map(|(x, y)| (x ^ y).count_ones() as u64)
        .sum();
    Ok(100.0 * differing as f64 / (8 * a.len()) as f64)
}

/// Which input the sensitivity trial perturbed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SensitivityKind {
    Plaintext,
    Key,
}

/// Percent-bit-change samples over a batch of trials, with summary
/// statistics. An empty report (zero trials) reports 0 for all three.
#[derive(Debug, Clone, PartialEq)]
pub struct SensitivityReport {
    kind: SensitivityKind,
    samples: Vec<(usize, f64)>,
}

impl SensitivityReport {
    fn new(kind: SensitivityKind, samples: Vec<(usize, f64)>) -> Self {
        Self { kind, samples }
    }

    pub fn kind(&self) -> SensitivityKind {
        self.kind
    }

    /// `(trial id, percent)` pairs in trial order.
    pub fn samples(&self) -> &[(usize, f64)] {
        &self.samples
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn mean(&self) -> f64 {
        if self.samples.is_empty() {
            return 0.0;
        }
        self.samples.iter().map(|(_, p)| p).sum::<f64>() / self.samples.len() as f64
    }

    pub fn min(&self) -> f64 {
        if self.samples.is_empty() {
            return 0.0;
        }
        self.samples
            .iter()
            .map(|(_, p)| *p)
            .fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.samples.iter().map(|(_, p)| *p).fold(0.0, f64::max)
    }
}

/// Encrypts the plaintext once per flipped bit position and records the
/// ciphertext bit-change percentage against the unmodified encryption.
pub fn plaintext_sensitivity(
    key: &CipherKey,
    mode: Mode,
    plaintext: &[u8],
    flips: &[usize],
) -> Result<SensitivityReport, AnalysisError> {
    let bits = plaintext.len() * 8;
    if let Some(&position) = flips.iter().find(|&&p| p >= bits) {
        return Err(AnalysisError::BitPositionOutOfRange { position, bits });
    }
    let base = encrypt(key, mode, plaintext)?;
    let mut samples = Vec::with_capacity(flips.len());
    for (trial, &position) in flips.iter().enumerate() {
        let mut mutated = plaintext.to_vec();
        mutated[position / 8] ^= 1 << (position % 8);
        let ciphertext = encrypt(key, mode, &mutated)?;
        samples.push((trial, bit_change_percent(&base, &ciphertext)?));
    }
    Ok(SensitivityReport::new(SensitivityKind::Plaintext, samples))
}

/// Encrypts the same plaintext under `r` and `r + delta_r` and records the
/// ciphertext bit-change percentage. The perturbed parameter must stay in
/// the chaotic region.
pub fn key_sensitivity(
    key: &CipherKey,
    mode: Mode,
    plaintext: &[u8],
    delta_r: f64,
) -> Result<SensitivityReport, AnalysisError> {
    let perturbed = key.with_r(key.r() + delta_r)?;
    let base = encrypt(key, mode, plaintext)?;
    let changed = encrypt(&perturbed, mode, plaintext)?;
    let percent = bit_change_percent(&base, &changed)?;
    Ok(SensitivityReport::new(
        SensitivityKind::Key,
        vec![(0, percent)],
    ))
}

/// Outcome of an output-equality scan over a parameter grid.
#[derive(Debug, Clone, PartialEq)]
pub struct IdentifiabilityReport {
    grid: KeyGrid,
    iterations: usize,
    tolerance: f64,
    equivalent_pairs: Vec<(f64, f64)>,
    degenerate: bool,
}

impl IdentifiabilityReport {
    pub fn grid(&self) -> &KeyGrid {
        &self.grid
    }

    pub fn iterations(&self) -> usize {
        self.iterations
    }

    pub fn tolerance(&self) -> f64 {
        self.tolerance
    }

    /// Grid value pairs whose output responses coincided, ordered by value.
    pub fn equivalent_pairs(&self) -> &[(f64, f64)] {
        &self.equivalent_pairs
    }

    pub fn identifiable(&self) -> bool {
        self.equivalent_pairs.is_empty()
    }

    /// True when the grid held fewer than two points, making the scan
    /// trivially identifiable.
    pub fn degenerate(&self) -> bool {
        self.degenerate
    }
}

/// Compares the output responses of every pair of distinct grid parameters
/// on identical input and initial conditions.
///
/// With `tolerance = 0` the responses are the first `iterations` ciphertext
/// bytes and equality is exact; with `tolerance > 0` the raw keystream
/// states backing those bytes are compared positionwise within the
/// tolerance. Two parameters that normalize onto the same 10⁻⁹ grid point
/// always coincide and are reported as an equivalent pair.
pub fn identifiability_scan(
    base: &CipherKey,
    mode: Mode,
    input: &[u8],
    grid: &KeyGrid,
    iterations: usize,
    tolerance: f64,
) -> Result<IdentifiabilityReport, AnalysisError> {
    if input.is_empty() {
        return Err(AnalysisError::EmptyInput);
    }
    if iterations == 0 {
        return Err(AnalysisError::NoOutputBytes);
    }
    if !(tolerance >= 0.0 && tolerance.is_finite()) {
        return Err(AnalysisError::InvalidTolerance(tolerance));
    }
    let count = key_space_size(grid);
    let degenerate = count < 2;

    let responses: Vec<(Vec<u8>, Vec<f64>)> = (0..count)
        .into_par_iter()
        .map(|i| {
            let key = base
                .with_r(grid.point(i))
                .expect("grid points lie in the chaotic region");
            let (mut bytes, mut states) =
                encrypt_with_trace(&key, mode, input).expect("scan input already validated");
            bytes.truncate(iterations);
            states.truncate(iterations);
            (bytes, states)
        })
        .collect();

    let mut pairs: Vec<(u64, u64)> = if tolerance == 0.0 {
        // Exact mode: bucket identical byte responses, then pair within
        // buckets.
        let mut buckets: HashMap<&[u8], Vec<u64>> = HashMap::new();
        for (i, (bytes, _)) in responses.iter().enumerate() {
            buckets.entry(bytes).or_default().push(i as u64);
        }
        buckets
            .into_values()
            .filter(|members| members.len() > 1)
            .flat_map(|members| {
                let mut found = Vec::new();
                for (a, &i) in members.iter().enumerate() {
                    for &j in &members[a + 1..] {
                        found.push((i, j));
                    }
                }
                found
            })
            .collect()
    } else {
        (0..count as usize)
            .flat_map(|i| ((i + 1)..count as usize).map(move |j| (i, j)))
            .filter(|&(i, j)| {
                let (_, ref a) = responses[i];
                let (_, ref b) = responses[j];
                a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tolerance)
            })
            .map(|(i, j)| (i as u64, j as u64))
            .collect()
    };
    pairs.sort_unstable();

    Ok(IdentifiabilityReport {
        grid: *grid,
        iterations,
        tolerance,
        equivalent_pairs: pairs
            .into_iter()
            .map(|(i, j)| (grid.point(i), grid.point(j)))
            .collect(),
        degenerate,
    })
}

/// Everything the known-plaintext attacker is granted besides `r`: the
/// initial state, both iteration counts and the Hill matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PublicParams {
    pub x0: f64,
    pub n1: u32,
    pub n2: u32,
    pub hill: HillKey,
}

impl PublicParams {
    pub fn from_key(key: &CipherKey) -> Self {
        Self {
            x0: key.x0(),
            n1: key.n1(),
            n2: key.n2(),
            hill: *key.hill(),
        }
    }

    fn key_with_r(&self, r: f64) -> Result<CipherKey, KeyError> {
        CipherKey::new(r, self.x0, self.n1, self.n2, self.hill)
    }
}

/// Outcome of a known-plaintext grid search.
#[derive(Debug, Clone)]
pub struct AttackResult {
    candidates: Vec<f64>,
    searched: u64,
    elapsed: Duration,
    prefix_len: usize,
}

impl AttackResult {
    /// Grid values whose trial decryption reproduced the known prefix,
    /// in grid order.
    pub fn candidates(&self) -> &[f64] {
        &self.candidates
    }

    pub fn searched(&self) -> u64 {
        self.searched
    }

    pub fn elapsed(&self) -> Duration {
        self.elapsed
    }

    pub fn prefix_len(&self) -> usize {
        self.prefix_len
    }

    /// CSV export: header `rank,r,matched_bytes`, one row per candidate.
    pub fn write_candidates_csv<W: std::io::Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "rank,r,matched_bytes")?;
        for (rank, r) in self.candidates.iter().enumerate() {
            writeln!(w, "{},{:.9},{}", rank + 1, r, self.prefix_len)?;
        }
        Ok(())
    }
}

/// Exhaustive key search: trial-decrypts the ciphertext head under every
/// grid value of `r` and keeps those that reproduce the known plaintext
/// prefix. Everything except `r` is assumed known.
pub fn known_plaintext_attack(
    ciphertext: &[u8],
    known_prefix: &[u8],
    public: &PublicParams,
    mode: Mode,
    grid: &KeyGrid,
) -> Result<AttackResult, AnalysisError> {
    if known_prefix.is_empty() {
        return Err(AnalysisError::EmptyPrefix);
    }
    let symbols = mode.embedded_len(known_prefix.len());
    let needed = symbols.next_multiple_of(BLOCK_SIZE);
    if ciphertext.len() < needed {
        return Err(AnalysisError::CiphertextTooShort {
            needed,
            available: ciphertext.len(),
        });
    }
    let window = &ciphertext[..needed];

    let started = Instant::now();
    let count = key_space_size(grid);
    let mut matches: Vec<(u64, f64)> = (0..count)
        .into_par_iter()
        .filter_map(|i| {
            let r = grid.point(i);
            let key = public
                .key_with_r(r)
                .expect("grid points lie in the chaotic region");
            let recovered = decrypt(&key, mode, window).expect("window length is block-aligned");
            (recovered[..known_prefix.len()] == *known_prefix).then_some((i, r))
        })
        .collect();
    matches.sort_unstable_by_key(|&(i, _)| i);

    Ok(AttackResult {
        candidates: matches.into_iter().map(|(_, r)| r).collect(),
        searched: count,
        elapsed: started.elapsed(),
        prefix_len: known_prefix.len(),
    })
}

/// Batch parameters for [`avalanche_suite`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SuiteConfig {
    /// Random single-bit plaintext flips per corpus text.
    pub flips_per_text: usize,
    /// Parameter increment for the key-sensitivity trial.
    pub delta_r: f64,
    /// Seed for the flip-position stream (per-text streams derive from it).
    pub seed: u64,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self {
            flips_per_text: 50,
            delta_r: 1e-9,
            seed: 0x484d_4543,
        }
    }
}

/// Per-text sensitivity outcome within a suite run.
#[derive(Debug, Clone, PartialEq)]
pub struct TextAvalanche {
    pub index: usize,
    pub plaintext: SensitivityReport,
    pub key: SensitivityReport,
}

/// Aggregate over a corpus: one [`TextAvalanche`] per text.
#[derive(Debug, Clone, PartialEq)]
pub struct AvalancheReport {
    per_text: Vec<TextAvalanche>,
}

impl AvalancheReport {
    pub fn per_text(&self) -> &[TextAvalanche] {
        &self.per_text
    }

    /// Mean percent over every plaintext-flip sample in the corpus.
    pub fn plaintext_mean(&self) -> f64 {
        let (sum, n) = self
            .per_text
            .iter()
            .flat_map(|t| t.plaintext.samples())
            .fold((0.0, 0usize), |(s, n), (_, p)| (s + p, n + 1));
        if n == 0 {
            0.0
        } else {
            sum / n as f64
        }
    }

    /// Mean percent over the per-text key-sensitivity trials.
    pub fn key_mean(&self) -> f64 {
        let (sum, n) = self
            .per_text
            .iter()
            .flat_map(|t| t.key.samples())
            .fold((0.0, 0usize), |(s, n), (_, p)| (s + p, n + 1));
        if n == 0 {
            0.0
        } else {
            sum / n as f64
        }
    }
}

/// Runs [`plaintext_sensitivity`] and [`key_sensitivity`] over every corpus
/// entry with reproducible random flip positions.
pub fn avalanche_suite(
    key: &CipherKey,
    mode: Mode,
    corpus: &[Vec<u8>],
    config: &SuiteConfig,
) -> Result<AvalancheReport, AnalysisError> {
    if corpus.is_empty() {
        return Err(AnalysisError::EmptyCorpus);
    }
    let per_text = corpus
        .par_iter()
        .enumerate()
        .map(|(index, text)| {
            let mut rng = ChaCha8Rng::seed_from_u64(config.seed.wrapping_add(index as u64));
            let bits = text.len() * 8;
            let flips: Vec<usize> = if bits == 0 {
                Vec::new()
            } else {
                (0..config.flips_per_text)
                    .map(|_| rng.gen_range(0..bits))
                    .collect()
            };
            Ok(TextAvalanche {
                index,
                plaintext: plaintext_sensitivity(key, mode, text, &flips)?,
                key: key_sensitivity(key, mode, text, config.delta_r)?,
            })
        })
        .collect::<Result<Vec<_>, AnalysisError>>()?;
    Ok(AvalancheReport { per_text })
}
