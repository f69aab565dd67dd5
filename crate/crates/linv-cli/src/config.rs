//! Run configuration: JSON schema and validation.

use anyhow::{bail, Context, Result};
use linv_core::coeff::WeightData;
use serde::{Deserialize, Serialize};
use std::path::Path;

/// 2x2 matrix with entries as canonical p-adic strings (plain integers and
/// a/b rationals are accepted by the parser).
pub type MatrixText = [[String; 2]; 2];

pub const DEFAULT_GUARD: i64 = 2;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WeightConfig {
    pub k: Vec<u32>,
    pub w: i64,
}

/// Group source: inline generators, or a fixture file with quotient data.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GroupSource {
    Generators { generators: Vec<MatrixText> },
    Fixture { fixture: String },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// Residue characteristic.
    pub p: u64,
    /// Degree of the base field over Q_p (the tree is over this field).
    pub d: u32,
    /// Working precision N (p-adic digits).
    pub precision: u32,
    pub weight: WeightConfig,
    pub group: GroupSource,
    /// Covering depth D for Riemann sums.
    pub depth: u32,
    /// Embedding index; only single-factor weights are integrated, so this
    /// must select the unique factor.
    #[serde(default)]
    pub tau: usize,
    /// Combination of the harmonic basis defining the eigencocycle; default
    /// is the first basis vector.
    #[serde(default)]
    pub cocycle: Option<Vec<i64>>,
    /// Optional override for the U_p double-coset representatives.
    #[serde(default)]
    pub up_reps: Option<Vec<MatrixText>>,
    /// Declared eigencocycle normalization nu: the fixture asserts
    /// nu * U_p c = q^{w/2} c.  Absent means no declaration, no check.
    #[serde(default)]
    pub cmp_normalization: Option<String>,
    /// Branch of the logarithm: value of log(p) as a p-adic string; absent
    /// means the Iwasawa branch log(p) = 0.
    #[serde(default)]
    pub branch_log_p: Option<String>,
    /// Guard digits subtracted from the error exponent to form the pass
    /// budget.
    #[serde(default)]
    pub guard: Option<i64>,
    /// Optional report output path (stdout is always written).
    #[serde(default)]
    pub output: Option<String>,
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut k = 2u64;
    while k * k <= n {
        if n % k == 0 {
            return false;
        }
        k += 1;
    }
    true
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<RunConfig> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("cli::load_config: cannot read {}", path.display()))?;
        let cfg: RunConfig = serde_json::from_str(&text)
            .with_context(|| format!("cli::load_config: invalid JSON in {}", path.display()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn guard(&self) -> i64 {
        self.guard.unwrap_or(DEFAULT_GUARD)
    }

    pub fn validate(&self) -> Result<()> {
        if !is_prime(self.p) {
            bail!("cli::validate_config: p = {} is not prime", self.p);
        }
        if self.d < 1 {
            bail!("cli::validate_config: base degree d must be >= 1");
        }
        if self.depth < 1 {
            bail!("cli::validate_config: covering depth D must be >= 1");
        }
        let guard = self.guard();
        if guard < 0 {
            bail!("cli::validate_config: guard must be >= 0");
        }
        if (self.precision as i64) < self.depth as i64 + guard {
            bail!(
                "cli::validate_config: precision N = {} below depth D + guard = {}; raise N",
                self.precision,
                self.depth as i64 + guard
            );
        }
        // Parity and positivity checks are delegated to the weight
        // constructor.
        WeightData::from_kw(&self.weight.k, self.weight.w)
            .map_err(|e| anyhow::anyhow!("cli::validate_config: bad weight: {e}"))?;
        if self.tau >= self.weight.k.len() {
            bail!(
                "cli::validate_config: tau = {} out of range for {} weight factor(s)",
                self.tau,
                self.weight.k.len()
            );
        }
        if let Some(c) = &self.cocycle {
            if c.is_empty() {
                bail!("cli::validate_config: cocycle combination must be non-empty");
            }
        }
        if self.cmp_normalization.is_some() && self.weight.w % 2 != 0 {
            bail!("cli::validate_config: CMP normalization check needs even central weight w");
        }
        match &self.group {
            GroupSource::Generators { generators } => {
                if generators.is_empty() {
                    bail!("cli::validate_config: at least one generator required");
                }
            }
            GroupSource::Fixture { fixture } => {
                if fixture.is_empty() {
                    bail!("cli::validate_config: empty fixture path");
                }
            }
        }
        Ok(())
    }
}
