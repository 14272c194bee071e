//! Protocol configuration and its flat `key = value` file format.

use std::path::Path;

use crate::error::{Error, Result};
use crate::gf2::{Bits, Gf2Matrix};

/// Built-in error-correction code selection.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum EcCodeSpec {
    /// No syndrome exchange.
    None,
    /// Blockwise Hamming (7,4); requires `n % 7 == 0`.
    Hamming74,
    /// Blockwise length-`r` repetition-style check `[I | 1]`; requires `n % r == 0`.
    Repetition(usize),
    /// Explicit parity-check rows (one `0/1` string per line).
    Matrix(Vec<Vec<bool>>),
}

impl EcCodeSpec {
    /// Parses the config-file value: `none`, `hamming74`, `repetition<r>`, or
    /// `matrix:<path>`.
    pub fn parse(value: &str, base_dir: Option<&Path>) -> Result<Self> {
        let v = value.trim();
        if v.eq_ignore_ascii_case("none") {
            return Ok(EcCodeSpec::None);
        }
        if v.eq_ignore_ascii_case("hamming74") {
            return Ok(EcCodeSpec::Hamming74);
        }
        if let Some(r) = v.strip_prefix("repetition") {
            let r: usize = r
                .parse()
                .map_err(|_| Error::Config(format!("bad repetition block length in '{v}'")))?;
            if r < 2 {
                return Err(Error::Config("repetition block length must be >= 2".into()));
            }
            return Ok(EcCodeSpec::Repetition(r));
        }
        if let Some(path) = v.strip_prefix("matrix:") {
            let full = match base_dir {
                Some(d) => d.join(path),
                None => path.into(),
            };
            let text = std::fs::read_to_string(&full)
                .map_err(|e| Error::Config(format!("cannot read {}: {e}", full.display())))?;
            let mut rows = Vec::new();
            for line in text.lines() {
                let line = line.trim();
                if line.is_empty() || line.starts_with('#') {
                    continue;
                }
                let row: Vec<bool> = line
                    .chars()
                    .filter(|c| !c.is_whitespace())
                    .map(|c| match c {
                        '0' => Ok(false),
                        '1' => Ok(true),
                        _ => Err(Error::Config(format!("bad matrix character '{c}'"))),
                    })
                    .collect::<Result<_>>()?;
                rows.push(row);
            }
            if rows.is_empty() {
                return Err(Error::Config("empty parity-check matrix file".into()));
            }
            let cols = rows[0].len();
            if rows.iter().any(|r| r.len() != cols) {
                return Err(Error::Config("ragged parity-check matrix".into()));
            }
            return Ok(EcCodeSpec::Matrix(rows));
        }
        Err(Error::Config(format!("unknown ec_code '{v}'")))
    }

    pub fn as_config_value(&self) -> String {
        match self {
            EcCodeSpec::None => "none".into(),
            EcCodeSpec::Hamming74 => "hamming74".into(),
            EcCodeSpec::Repetition(r) => format!("repetition{r}"),
            EcCodeSpec::Matrix(rows) => format!("matrix({}x{})", rows.len(), rows[0].len()),
        }
    }

    pub fn to_matrix(&self) -> Option<Gf2Matrix> {
        match self {
            EcCodeSpec::Matrix(rows) => {
                let bit_rows: Vec<Bits> = rows.iter().map(|r| Bits::from_bools(r)).collect();
                Some(Gf2Matrix::from_rows(&bit_rows))
            }
            _ => None,
        }
    }
}

/// Full configuration of a protocol run.
#[derive(Clone, Debug, PartialEq)]
pub struct ProtocolConfig {
    /// Candidate key length in bits (`n <= 20`).
    pub n: usize,
    /// Bernoulli parameter of the binary symmetric correlation between the
    /// candidate keys (`0 <= flip_prob <= 1/2`).
    pub flip_prob: f64,
    /// Per-bit wiretap leak probability (`0 <= q_leak <= 1`).
    pub q_leak: f64,
    /// Secrecy threshold in `(0, 1)`.
    pub eps_s: f64,
    /// Tag length `D <= n`.
    pub tag_bits: usize,
    /// Authentication entropy budget `k` for the corollary checks.
    pub auth_entropy_bits: usize,
    /// Optional override of the extracted key length.
    pub pa_bits: Option<usize>,
    /// Authenticated message length in bits.
    pub message_bits: usize,
    pub trials: u64,
    pub master_seed: u64,
    pub ec_code: EcCodeSpec,
    /// Whether the public privacy-amplification seed counts toward transcript
    /// leakage (the conservative reading).
    pub pa_seed_counts_as_leakage: bool,
}

impl Default for ProtocolConfig {
    fn default() -> Self {
        ProtocolConfig {
            n: 16,
            flip_prob: 0.0,
            q_leak: 0.0,
            eps_s: 0.0625,
            tag_bits: 16,
            auth_entropy_bits: 6,
            pa_bits: None,
            message_bits: 8,
            trials: 10_000,
            master_seed: 42,
            ec_code: EcCodeSpec::None,
            pa_seed_counts_as_leakage: true,
        }
    }
}

impl ProtocolConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n == 0 || self.n > 20 {
            return Err(Error::Config(format!("n must be in 1..=20, got {}", self.n)));
        }
        if !(0.0..=0.5).contains(&self.flip_prob) {
            return Err(Error::Config(format!("flip_prob must be in [0, 1/2], got {}", self.flip_prob)));
        }
        if !(0.0..=1.0).contains(&self.q_leak) {
            return Err(Error::Config(format!("q_leak must be in [0, 1], got {}", self.q_leak)));
        }
        if !(self.eps_s > 0.0 && self.eps_s < 1.0) {
            return Err(Error::Config(format!("eps_S must be in (0, 1), got {}", self.eps_s)));
        }
        if self.tag_bits == 0 || self.tag_bits > self.n {
            return Err(Error::Config(format!(
                "tag_bits must be in 1..=n, got {} with n = {}",
                self.tag_bits, self.n
            )));
        }
        if self.message_bits == 0 || self.message_bits > 62 {
            return Err(Error::Config(format!(
                "message_bits must be in 1..=62, got {}",
                self.message_bits
            )));
        }
        if let Some(l) = self.pa_bits {
            if l == 0 || l > self.n {
                return Err(Error::Config(format!("pa_bits must be in 1..=n, got {l}")));
            }
        }
        if self.trials == 0 {
            return Err(Error::Config("trials must be >= 1".into()));
        }
        match &self.ec_code {
            EcCodeSpec::None => {}
            EcCodeSpec::Hamming74 => {
                if !self.n.is_multiple_of(7) {
                    return Err(Error::Config(format!("hamming74 needs 7 | n, got n = {}", self.n)));
                }
            }
            EcCodeSpec::Repetition(r) => {
                if !self.n.is_multiple_of(*r) {
                    return Err(Error::Config(format!("repetition{r} needs {r} | n, got n = {}", self.n)));
                }
            }
            EcCodeSpec::Matrix(rows) => {
                if rows[0].len() != self.n {
                    return Err(Error::Config(format!(
                        "parity-check matrix has {} columns but n = {}",
                        rows[0].len(),
                        self.n
                    )));
                }
            }
        }
        Ok(())
    }

    /// Parses the flat `key = value` config format (`#` comments allowed).
    pub fn parse(text: &str, base_dir: Option<&Path>) -> Result<Self> {
        let mut cfg = ProtocolConfig::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(Error::Config(format!("line {}: expected key = value", lineno + 1)));
            };
            let key = key.trim();
            let value = value.trim();
            let bad = |what: &str| Error::Config(format!("line {}: bad {what} value '{value}'", lineno + 1));
            match key {
                "n" => cfg.n = value.parse().map_err(|_| bad("n"))?,
                "flip_prob" => cfg.flip_prob = value.parse().map_err(|_| bad("flip_prob"))?,
                "q_leak" => cfg.q_leak = value.parse().map_err(|_| bad("q_leak"))?,
                "eps_S" | "eps_s" => cfg.eps_s = value.parse().map_err(|_| bad("eps_S"))?,
                "tag_bits" => cfg.tag_bits = value.parse().map_err(|_| bad("tag_bits"))?,
                "auth_entropy_bits" => {
                    cfg.auth_entropy_bits = value.parse().map_err(|_| bad("auth_entropy_bits"))?
                }
                "pa_bits" => {
                    cfg.pa_bits = if value.eq_ignore_ascii_case("auto") {
                        None
                    } else {
                        Some(value.parse().map_err(|_| bad("pa_bits"))?)
                    }
                }
                "message_bits" => cfg.message_bits = value.parse().map_err(|_| bad("message_bits"))?,
                "trials" => cfg.trials = value.parse().map_err(|_| bad("trials"))?,
                "master_seed" => cfg.master_seed = value.parse().map_err(|_| bad("master_seed"))?,
                "ec_code" => cfg.ec_code = EcCodeSpec::parse(value, base_dir)?,
                "pa_seed_counts_as_leakage" => {
                    cfg.pa_seed_counts_as_leakage =
                        value.parse().map_err(|_| bad("pa_seed_counts_as_leakage"))?
                }
                _ => return Err(Error::Config(format!("line {}: unknown key '{key}'", lineno + 1))),
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text, path.parent())
    }
}
