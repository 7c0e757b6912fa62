//! Implementations behind the `hmec` subcommands.
//!
//! Every function here is a thin orchestration layer: read inputs, call the
//! library, write outputs. Data goes to `--out` (or stdout when the flag is
//! omitted); nothing but diagnostics is ever printed to stderr.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use hmec::chaos::{self, LogisticParams, CHAOTIC_R_MAX, CHAOTIC_R_MIN};
use hmec::cipher::{encrypt, CipherKey, Mode};
use hmec::cryptanalysis::{
    identifiability_scan, key_sensitivity, key_space_size, known_plaintext_attack,
    plaintext_sensitivity, AnalysisError, KeyGrid, PublicParams,
};
use hmec::hill::HillKey;

use crate::container::CipherContainer;
use crate::keyfile::KeyFile;
use crate::CliError;

/// Default corpus synthesized when `--corpus` is omitted: twenty 1 KiB
/// printable-ASCII texts derived from the analyze seed.
pub const DEFAULT_CORPUS_TEXTS: usize = 20;
pub const DEFAULT_CORPUS_TEXT_LEN: usize = 1024;

fn read_file(path: &Path) -> Result<Vec<u8>, CliError> {
    fs::read(path).map_err(|e| CliError::io(path, e))
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    fs::write(path, bytes).map_err(|e| CliError::io(path, e))
}

fn write_output<F>(out: Option<&Path>, write: F) -> Result<(), CliError>
where
    F: FnOnce(&mut dyn Write) -> std::io::Result<()>,
{
    match out {
        Some(path) => {
            let mut file = fs::File::create(path).map_err(|e| CliError::io(path, e))?;
            write(&mut file).map_err(|e| CliError::io(path, e))
        }
        None => write(&mut std::io::stdout().lock()).map_err(|e| CliError::io("<stdout>", e)),
    }
}

pub fn load_key(path: &Path) -> Result<KeyFile, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    Ok(KeyFile::parse(&text)?)
}

/// `encrypt`: seal a file into a ciphertext container. Byte-identical
/// output for identical inputs.
pub fn encrypt_file(
    key_path: &Path,
    in_path: &Path,
    out_path: &Path,
    mode_override: Option<Mode>,
) -> Result<(), CliError> {
    let keyfile = load_key(key_path)?;
    let mode = mode_override.unwrap_or(keyfile.mode);
    let plaintext = read_file(in_path)?;
    let sealed = CipherContainer::seal(&keyfile.key, mode, &plaintext)?;
    write_file(out_path, &sealed.to_bytes())
}

/// `decrypt`: open a container and write the recovered plaintext. The
/// embedding mode comes from the container itself. A wrong key is not
/// detectable: decryption succeeds mechanically and yields garbage.
pub fn decrypt_file(key_path: &Path, in_path: &Path, out_path: &Path) -> Result<(), CliError> {
    let keyfile = load_key(key_path)?;
    let bytes = read_file(in_path)?;
    let container = CipherContainer::from_bytes(&bytes)?;
    let plaintext = container.open(&keyfile.key)?;
    write_file(out_path, &plaintext)
}

/// `orbit`: export map iterates as CSV for external plotting.
pub fn orbit(
    r: f64,
    x0: f64,
    n: usize,
    out: Option<&Path>,
    override_region: bool,
) -> Result<(), CliError> {
    let params = if override_region {
        LogisticParams::unrestricted(r)
    } else {
        LogisticParams::new(r)
    }
    .map_err(|e| CliError::InvalidParameter(e.to_string()))?;
    let orbit = chaos::generate_orbit(&params, x0, n)
        .map_err(|e| CliError::InvalidParameter(e.to_string()))?;
    write_output(out, |w| orbit.write_csv(w))
}

#[derive(Debug, Clone, Default)]
pub struct KeygenOptions {
    pub r: Option<f64>,
    pub x0: Option<f64>,
    pub n1: Option<u32>,
    pub n2: Option<u32>,
    pub hill: Option<[[u8; 2]; 2]>,
    pub mode: Mode,
    pub seed: Option<u64>,
}

/// `keygen`: write a key file, drawing any unspecified field at random.
pub fn keygen(opts: &KeygenOptions, out: Option<&Path>) -> Result<(), CliError> {
    let mut rng = match opts.seed {
        Some(seed) => ChaCha8Rng::seed_from_u64(seed),
        None => ChaCha8Rng::from_entropy(),
    };
    let r = opts
        .r
        .unwrap_or_else(|| rng.gen_range(3_570_000_000u64..=4_000_000_000) as f64 / 1e9);
    let x0 = opts.x0.unwrap_or_else(|| rng.gen_range(1e-9..1.0));
    let n1 = opts.n1.unwrap_or_else(|| rng.gen_range(1..=10));
    let n2 = opts.n2.unwrap_or_else(|| rng.gen_range(1..=10));
    let hill = match opts.hill {
        Some(entries) => {
            HillKey::new(entries).map_err(|e| CliError::InvalidParameter(e.to_string()))?
        }
        None => random_hill(&mut rng),
    };
    let key = CipherKey::new(r, x0, n1, n2, hill)
        .map_err(|e| CliError::InvalidParameter(e.to_string()))?;
    let keyfile = KeyFile::new(key, opts.mode);
    write_output(out, |w| w.write_all(keyfile.serialize().as_bytes()))
}

fn random_hill(rng: &mut ChaCha8Rng) -> HillKey {
    loop {
        let entries = [
            [rng.gen::<u8>() & 0x7F, rng.gen::<u8>() & 0x7F],
            [rng.gen::<u8>() & 0x7F, rng.gen::<u8>() & 0x7F],
        ];
        if let Ok(key) = HillKey::new(entries) {
            return key;
        }
    }
}

/// The selectable analysis tests.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AnalysisTest {
    Sensitivity,
    KeySensitivity,
    Identifiability,
    KnownPlaintext,
    KeySpace,
}

impl AnalysisTest {
    pub const ALL: [AnalysisTest; 5] = [
        AnalysisTest::Sensitivity,
        AnalysisTest::KeySensitivity,
        AnalysisTest::Identifiability,
        AnalysisTest::KnownPlaintext,
        AnalysisTest::KeySpace,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            AnalysisTest::Sensitivity => "sensitivity",
            AnalysisTest::KeySensitivity => "keysens",
            AnalysisTest::Identifiability => "identifiability",
            AnalysisTest::KnownPlaintext => "kpa",
            AnalysisTest::KeySpace => "keyspace",
        }
    }

    /// Parse a comma-separated test list; unknown names are usage errors.
    pub fn parse_list(list: &str) -> Result<Vec<AnalysisTest>, CliError> {
        list.split(',')
            .map(str::trim)
            .filter(|name| !name.is_empty())
            .map(|name| {
                Self::ALL
                    .into_iter()
                    .find(|t| t.name() == name)
                    .ok_or_else(|| CliError::Usage(format!("unknown test name `{name}`")))
            })
            .collect()
    }
}

#[derive(Debug, Clone)]
pub struct AnalyzeOptions {
    pub key_path: PathBuf,
    pub corpus_dir: Option<PathBuf>,
    pub tests: Vec<AnalysisTest>,
    pub out: Option<PathBuf>,
    pub kpa_out: Option<PathBuf>,
    /// `(r_min, r_max, step)` overriding each test's default grid.
    pub grid: Option<(f64, f64, f64)>,
    pub flips: usize,
    pub delta_r: f64,
    pub output_bytes: usize,
    pub tolerance: f64,
    pub prefix_len: usize,
    pub seed: u64,
}

impl AnalyzeOptions {
    pub fn new(key_path: impl Into<PathBuf>) -> Self {
        Self {
            key_path: key_path.into(),
            corpus_dir: None,
            tests: AnalysisTest::ALL.to_vec(),
            out: None,
            kpa_out: None,
            grid: None,
            flips: 50,
            delta_r: 1e-9,
            output_bytes: 64,
            tolerance: 0.0,
            prefix_len: 5,
            seed: 0x484d_4543,
        }
    }
}

fn analysis_error(err: AnalysisError) -> CliError {
    match err {
        AnalysisError::Cipher(e) => CliError::Cipher(e),
        other => CliError::InvalidParameter(other.to_string()),
    }
}

fn load_corpus(opts: &AnalyzeOptions) -> Result<Vec<Vec<u8>>, CliError> {
    match &opts.corpus_dir {
        Some(dir) => {
            let mut paths: Vec<PathBuf> = fs::read_dir(dir)
                .map_err(|e| CliError::io(dir, e))?
                .filter_map(|entry| entry.ok())
                .map(|entry| entry.path())
                .filter(|path| path.is_file())
                .collect();
            paths.sort();
            if paths.is_empty() {
                return Err(CliError::InvalidParameter(format!(
                    "corpus directory {} holds no files",
                    dir.display()
                )));
            }
            paths.iter().map(|path| read_file(path)).collect()
        }
        None => {
            let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
            Ok((0..DEFAULT_CORPUS_TEXTS)
                .map(|_| {
                    (0..DEFAULT_CORPUS_TEXT_LEN)
                        .map(|_| rng.gen_range(32u8..=126))
                        .collect()
                })
                .collect())
        }
    }
}

fn grid_or(opts: &AnalyzeOptions, default: KeyGrid) -> Result<KeyGrid, CliError> {
    match opts.grid {
        Some((r_min, r_max, step)) => KeyGrid::new(r_min, r_max, step).map_err(analysis_error),
        None => Ok(default),
    }
}

struct Report {
    rows: Vec<(String, String, &'static str, String)>,
}

impl Report {
    fn new() -> Self {
        Self { rows: Vec::new() }
    }

    fn push(
        &mut self,
        test: &AnalysisTest,
        subject: impl Into<String>,
        metric: &'static str,
        value: impl Into<String>,
    ) {
        self.rows.push((
            test.name().to_string(),
            subject.into(),
            metric,
            value.into(),
        ));
    }

    fn write<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "test,subject,metric,value")?;
        for (test, subject, metric, value) in &self.rows {
            writeln!(w, "{test},{subject},{metric},{value}")?;
        }
        Ok(())
    }
}

/// `analyze`: run the selected tests and write the `test,subject,metric,value`
/// CSV report. When the known-plaintext attack runs, the first instance's
/// candidate list is additionally written as `rank,r,matched_bytes` CSV to
/// `--kpa-out` (or `<out>.kpa.csv` when only `--out` is given).
pub fn analyze(opts: &AnalyzeOptions) -> Result<(), CliError> {
    let keyfile = load_key(&opts.key_path)?;
    let key = &keyfile.key;
    let mode = keyfile.mode;

    let needs_corpus = opts.tests.iter().any(|t| {
        matches!(
            t,
            AnalysisTest::Sensitivity
                | AnalysisTest::KeySensitivity
                | AnalysisTest::Identifiability
                | AnalysisTest::KnownPlaintext
        )
    });
    let corpus = if needs_corpus {
        load_corpus(opts)?
    } else {
        Vec::new()
    };

    let mut report = Report::new();
    for test in &opts.tests {
        match test {
            AnalysisTest::Sensitivity => {
                let mut all: Vec<f64> = Vec::new();
                for (i, text) in corpus.iter().enumerate() {
                    let bits = text.len() * 8;
                    let flips: Vec<usize> = if bits == 0 {
                        Vec::new()
                    } else {
                        // Strict mode admits only 7-bit bytes, so flips that
                        // would set a byte's top bit are redrawn there.
                        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed.wrapping_add(i as u64));
                        std::iter::from_fn(|| Some(rng.gen_range(0..bits)))
                            .filter(|p| mode == Mode::Lenient || p % 8 != 7)
                            .take(opts.flips)
                            .collect()
                    };
                    let rep =
                        plaintext_sensitivity(key, mode, text, &flips).map_err(analysis_error)?;
                    report.push(
                        test,
                        format!("text{i}"),
                        "mean_percent",
                        format_percent(rep.mean()),
                    );
                    all.extend(rep.samples().iter().map(|(_, p)| *p));
                }
                push_aggregate(&mut report, test, &all);
            }
            AnalysisTest::KeySensitivity => {
                let mut all: Vec<f64> = Vec::new();
                for (i, text) in corpus.iter().enumerate() {
                    let rep =
                        key_sensitivity(key, mode, text, opts.delta_r).map_err(analysis_error)?;
                    report.push(
                        test,
                        format!("text{i}"),
                        "percent",
                        format_percent(rep.mean()),
                    );
                    all.extend(rep.samples().iter().map(|(_, p)| *p));
                }
                push_aggregate(&mut report, test, &all);
            }
            AnalysisTest::Identifiability => {
                let default_step = (CHAOTIC_R_MAX - CHAOTIC_R_MIN) / 999.0;
                let grid = grid_or(
                    opts,
                    KeyGrid::full_region(default_step).map_err(analysis_error)?,
                )?;
                let input = corpus.first().ok_or_else(|| {
                    CliError::InvalidParameter("identifiability needs a corpus text".into())
                })?;
                let scan = identifiability_scan(
                    key,
                    mode,
                    input,
                    &grid,
                    opts.output_bytes,
                    opts.tolerance,
                )
                .map_err(analysis_error)?;
                report.push(test, "grid", "points", key_space_size(&grid).to_string());
                report.push(test, "grid", "output_bytes", scan.iterations().to_string());
                report.push(
                    test,
                    "grid",
                    "equivalent_pairs",
                    scan.equivalent_pairs().len().to_string(),
                );
                report.push(test, "grid", "identifiable", bool_bit(scan.identifiable()));
                report.push(test, "grid", "degenerate", bool_bit(scan.degenerate()));
            }
            AnalysisTest::KnownPlaintext => {
                let grid = grid_or(
                    opts,
                    KeyGrid::aligned_window(key.r(), 1e-6, 100_000).map_err(analysis_error)?,
                )?;
                let public = PublicParams::from_key(key);
                let mut first_candidates: Option<Vec<u8>> = None;
                for (i, text) in corpus.iter().enumerate() {
                    let take = opts.prefix_len.min(text.len());
                    if take == 0 {
                        return Err(CliError::InvalidParameter(format!(
                            "corpus text {i} is empty; the attack needs a known prefix"
                        )));
                    }
                    let ciphertext = encrypt(key, mode, text)?;
                    let result =
                        known_plaintext_attack(&ciphertext, &text[..take], &public, mode, &grid)
                            .map_err(analysis_error)?;
                    let found = result
                        .candidates()
                        .iter()
                        .any(|&r| CipherKey::normalize_r(r) == key.r());
                    report.push(
                        test,
                        format!("text{i}"),
                        "searched",
                        result.searched().to_string(),
                    );
                    report.push(
                        test,
                        format!("text{i}"),
                        "candidates",
                        result.candidates().len().to_string(),
                    );
                    report.push(test, format!("text{i}"), "true_key_found", bool_bit(found));
                    report.push(
                        test,
                        format!("text{i}"),
                        "elapsed_ms",
                        result.elapsed().as_millis().to_string(),
                    );
                    if first_candidates.is_none() {
                        let mut buf = Vec::new();
                        result
                            .write_candidates_csv(&mut buf)
                            .expect("writing to memory cannot fail");
                        first_candidates = Some(buf);
                    }
                }
                if let Some(csv) = first_candidates {
                    if let Some(path) = kpa_candidates_path(opts) {
                        write_file(&path, &csv)?;
                    }
                }
            }
            AnalysisTest::KeySpace => {
                let grid = grid_or(opts, KeyGrid::full_region(1e-9).map_err(analysis_error)?)?;
                report.push(test, "grid", "keys", key_space_size(&grid).to_string());
            }
        }
    }

    write_output(opts.out.as_deref(), |w| report.write(w))
}

fn kpa_candidates_path(opts: &AnalyzeOptions) -> Option<PathBuf> {
    if let Some(path) = &opts.kpa_out {
        return Some(path.clone());
    }
    opts.out.as_ref().map(|out| {
        let mut name = out.file_stem().unwrap_or_default().to_os_string();
        name.push(".kpa.csv");
        out.with_file_name(name)
    })
}

fn push_aggregate(report: &mut Report, test: &AnalysisTest, samples: &[f64]) {
    let mean = if samples.is_empty() {
        0.0
    } else {
        samples.iter().sum::<f64>() / samples.len() as f64
    };
    let min = samples.iter().copied().fold(f64::INFINITY, f64::min);
    let max = samples.iter().copied().fold(0.0f64, f64::max);
    report.push(test, "aggregate", "mean_percent", format_percent(mean));
    report.push(
        test,
        "aggregate",
        "min_percent",
        format_percent(if samples.is_empty() { 0.0 } else { min }),
    );
    report.push(test, "aggregate", "max_percent", format_percent(max));
}

fn format_percent(value: f64) -> String {
    format!("{value:.4}")
}

fn bool_bit(value: bool) -> String {
    (value as u8).to_string()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn test_names_parse() {
        assert_eq!(
            AnalysisTest::parse_list("keyspace,kpa").unwrap(),
            vec![AnalysisTest::KeySpace, AnalysisTest::KnownPlaintext]
        );
        assert_eq!(
            AnalysisTest::parse_list(" sensitivity , keysens ").unwrap(),
            vec![AnalysisTest::Sensitivity, AnalysisTest::KeySensitivity]
        );
        assert!(matches!(
            AnalysisTest::parse_list("keyspace,bogus"),
            Err(CliError::Usage(_))
        ));
    }

    #[test]
    fn random_hill_always_yields_an_invertible_matrix() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..32 {
            let key = random_hill(&mut rng);
            assert_eq!(key.det() % 2, 1);
        }
    }

    #[test]
    fn kpa_path_derives_from_the_report_path() {
        let mut opts = AnalyzeOptions::new("key.txt");
        assert_eq!(kpa_candidates_path(&opts), None);
        opts.out = Some(PathBuf::from("/tmp/report.csv"));
        assert_eq!(
            kpa_candidates_path(&opts),
            Some(PathBuf::from("/tmp/report.kpa.csv"))
        );
        opts.kpa_out = Some(PathBuf::from("/tmp/cands.csv"));
        assert_eq!(
            kpa_candidates_path(&opts),
            Some(PathBuf::from("/tmp/cands.csv"))
        );
    }
}
