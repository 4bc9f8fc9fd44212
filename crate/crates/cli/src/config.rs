//! Resolved run configuration and input loading.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::Serialize;
use stabspan::circuit::{parse_circuit, DopedCircuit};
use stabspan::dense::{StateFile, RANK_TOL};
use stabspan::group::{parse_group, PauliSubgroup};
use stabspan::povm::{computational_basis, AncillaSpec, SURVIVAL_TOL};

use crate::{Common, Format};

/// Version of the CLI output shape (JSON keys and CSV columns).
pub const OUTPUT_VERSION: u32 = 1;

/// Everything needed to reproduce a run, echoed into every output.
#[derive(Clone, Debug, Serialize)]
pub struct RunConfig {
    pub version: u32,
    pub command: String,
    pub inputs: Vec<PathBuf>,
    pub format: Format,
    pub out: Option<PathBuf>,
    pub dense_cap: usize,
    pub rank_tol: f64,
    pub survival_tol: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub split: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ancilla: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub oracle: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub filter: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub shard: Option<String>,
}

impl RunConfig {
    pub fn new(command: &str, common: &Common) -> Self {
        RunConfig {
            version: OUTPUT_VERSION,
            command: command.into(),
            inputs: Vec::new(),
            format: common.format,
            out: common.out.clone(),
            dense_cap: common.dense_cap,
            rank_tol: RANK_TOL,
            survival_tol: SURVIVAL_TOL,
            split: None,
            ancilla: None,
            oracle: None,
            filter: None,
            seed: None,
            shard: None,
        }
    }
}

pub fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

pub fn load_circuit(path: &Path) -> Result<DopedCircuit> {
    parse_circuit(&read(path)?).with_context(|| format!("in circuit file {}", path.display()))
}

pub fn load_group(path: &Path, signed: bool) -> Result<PauliSubgroup> {
    parse_group(&read(path)?, signed).with_context(|| format!("in group file {}", path.display()))
}

/// Parses the ancilla mini-language: `stab:<file>`, `T^<k>`, `dense:<file>`, `generic`,
/// plus `zero` (computational `|0...0>`) and `mixed` (`I / 2^m`).
pub fn parse_ancilla(text: &str, m: usize) -> Result<AncillaSpec> {
    let spec = if let Some(path) = text.strip_prefix("stab:") {
        AncillaSpec::Stabilizer(load_group(Path::new(path), true)?)
    } else if let Some(path) = text.strip_prefix("dense:") {
        let file: StateFile =
            serde_json::from_str(&read(Path::new(path))?).with_context(|| format!("in state file {path}"))?;
        AncillaSpec::Dense(file.to_state()?)
    } else if let Some(k) = text.strip_prefix("T^") {
        AncillaSpec::MagicT(k.parse().with_context(|| format!("bad T power in {text:?}"))?)
    } else {
        match text {
            "generic" => AncillaSpec::Generic(m),
            "zero" => AncillaSpec::Stabilizer(computational_basis(m)),
            "mixed" => AncillaSpec::MaximallyMixed(m),
            _ => bail!("unknown ancilla spec {text:?}; expected stab:<file>, T^<k>, dense:<file>, generic, zero or mixed"),
        }
    };
    if spec.num_qubits() != m {
        bail!("ancilla {text:?} has {} qubits but the input leaves {m} ancilla qubits", spec.num_qubits());
    }
    Ok(spec)
}
