use std::fmt::Write as _;
use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::Args;
use serde_json::json;
use stabspan::circuit::DopedCircuit;
use stabspan::dense::{self, DenseOperator, MatrixDump};
use stabspan::fixtures::run_fixtures;
use stabspan::group::PauliSubgroup;
use stabspan::povm::{
    analyze_doped, bound_t_gt_n, bound_t_le_n, computational_basis, necessary_t, oracle_doped_rank, signed_lift,
    span_dimension, AncillaSpec, EffectivePovmReport,
};
use stabspan::search::{run_task, SearchTask, Shard};

use crate::config::{load_circuit, load_group, parse_ancilla, read, RunConfig};
use crate::{Cli, Command, Common, Format};

#[derive(Args, Debug)]
pub struct AnalyzeArgs {
    /// Circuit file (`qubits n m` header, one gate per line).
    #[arg(long, conflicts_with = "group", required_unless_present = "group")]
    pub circuit: Option<PathBuf>,
    /// Stabilizer group file (one Pauli per line); the measurement is its eigenbasis.
    #[arg(long)]
    pub group: Option<PathBuf>,
    /// Number of data qubits of a group input; the rest form the ancilla register.
    #[arg(long)]
    pub split: Option<usize>,
    /// Measurement group for a circuit input. Defaults to the computational basis.
    #[arg(long, requires = "circuit")]
    pub measurement: Option<PathBuf>,
    /// Ancilla state: stab:<file>, T^<k>, dense:<file>, generic, zero or mixed.
    #[arg(long, default_value = "zero")]
    pub ancilla: String,
    /// Cross-check s_mu against the dense oracle.
    #[arg(long)]
    pub oracle: bool,
}

#[derive(Args, Debug)]
pub struct ExamplesArgs {
    /// Only run fixtures whose name or category contains this text.
    pub filter: Option<String>,
}

#[derive(Args, Debug)]
pub struct SearchArgs {
    /// Search task file (JSON).
    pub task: PathBuf,
    /// Run only shard k of K, written `k/K`.
    #[arg(long)]
    pub shard: Option<String>,
    /// Override the task seed.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Also write the s_mu histogram as CSV here.
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct BoundsArgs {
    /// Number of data qubits.
    pub n: u32,
    /// T count; all t in 0..=2n when omitted.
    pub t: Option<u32>,
}

pub fn dispatch(cli: &Cli) -> Result<u8> {
    let c = &cli.common;
    match &cli.command {
        Command::Analyze(a) => analyze(a, c),
        Command::Examples(a) => examples(a, c),
        Command::Search(a) => search(a, c),
        Command::Bounds(a) => bounds(a, c),
        Command::OracleDump(a) => oracle_dump(a, c),
    }
}

fn emit(common: &Common, text: &str) -> Result<()> {
    match &common.out {
        Some(path) => std::fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn to_json(v: &serde_json::Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json value serializes");
    s.push('\n');
    s
}

fn csv_text(header: &[&str], rows: Vec<Vec<String>>) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for r in rows {
        w.write_record(&r)?;
    }
    Ok(String::from_utf8(w.into_inner()?)?)
}

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map_or(String::new(), |x| x.to_string())
}

/// Input of `analyze` and `oracle-dump` after loading.
enum Input {
    Group { s: PauliSubgroup, n: usize },
    Circuit { c: DopedCircuit, measurement: PauliSubgroup },
}

impl Input {
    fn load(a: &AnalyzeArgs, cfg: &mut RunConfig) -> Result<(Input, AncillaSpec)> {
        cfg.ancilla = Some(a.ancilla.clone());
        cfg.oracle = Some(a.oracle);
        let input = if let Some(path) = &a.group {
            cfg.inputs.push(path.clone());
            let s = load_group(path, true)?;
            let n = a.split.context("--split is required with --group")?;
            if n > s.num_qubits() {
                bail!("--split {n} exceeds the {} qubits of the group", s.num_qubits());
            }
            cfg.split = Some(n);
            Input::Group { s, n }
        } else {
            let path = a.circuit.as_ref().expect("clap enforces one input");
            cfg.inputs.push(path.clone());
            let c = load_circuit(path)?;
            let total = c.n_data + c.n_ancilla;
            let measurement = match &a.measurement {
                Some(p) => {
                    cfg.inputs.push(p.clone());
                    load_group(p, true)?
                }
                None => computational_basis(total),
            };
            if measurement.num_qubits() != total {
                bail!("measurement acts on {} qubits but the circuit has {total}", measurement.num_qubits());
            }
            cfg.split = Some(c.n_data);
            Input::Circuit { c, measurement }
        };
        let m = input.qubits() - input.n();
        let anc = parse_ancilla(&a.ancilla, m)?;
        Ok((input, anc))
    }

    fn n(&self) -> usize {
        match self {
            Input::Group { n, .. } => *n,
            Input::Circuit { c, .. } => c.n_data,
        }
    }

    /// Qubits the dense oracle must simulate.
    fn qubits(&self) -> usize {
        match self {
            Input::Group { s, .. } => s.num_qubits(),
            Input::Circuit { c, .. } => c.n_data + c.n_ancilla,
        }
    }

    fn circuit_and_measurement(&self) -> Result<(DopedCircuit, PauliSubgroup)> {
        Ok(match self {
            Input::Group { s, n } => (DopedCircuit::new(*n, s.num_qubits() - n, Vec::new())?, s.clone()),
            Input::Circuit { c, measurement } => (c.clone(), measurement.clone()),
        })
    }

    fn check_cap(&self, cap: usize) -> Result<()> {
        if self.qubits() > cap {
            bail!(
                "refusing the dense oracle: {} qubits exceed --dense-cap {cap}; raise the cap or drop --oracle",
                self.qubits()
            );
        }
        Ok(())
    }
}

fn analyze(a: &AnalyzeArgs, common: &Common) -> Result<u8> {
    let mut cfg = RunConfig::new("analyze", common);
    let (input, anc) = Input::load(a, &mut cfg)?;
    if a.oracle {
        input.check_cap(common.dense_cap)?;
    }
    let mut report = match &input {
        Input::Group { s, n } => span_dimension(s, *n, &anc)?,
        Input::Circuit { c, measurement } => analyze_doped(c, measurement, &anc)?,
    };
    if a.oracle {
        let (c, meas) = input.circuit_and_measurement()?;
        report.attach_oracle(oracle_doped_rank(&c, &meas, &anc, common.dense_cap)?);
    }
    let text = match common.format {
        Format::Json => to_json(&json!({ "config": cfg, "report": report })),
        Format::Csv => csv_text(
            &["version", "n", "m", "t", "p", "s_mu", "k", "ic", "oracle_checked"],
            vec![vec![
                report.version.to_string(),
                report.n.to_string(),
                report.m.to_string(),
                report.t.to_string(),
                opt(report.p),
                report.s_mu.to_string(),
                opt(report.k),
                report.ic.to_string(),
                opt(report.oracle_checked),
            ]],
        )?,
        Format::Text => report_text(&report),
    };
    emit(common, &text)?;
    Ok(if report.oracle_checked == Some(false) { 1 } else { 0 })
}

fn report_text(r: &EffectivePovmReport) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "source      {}", r.source);
    let _ = writeln!(s, "n m t       {} {} {}", r.n, r.m, r.t);
    let _ = writeln!(s, "ancilla     {}", r.ancilla);
    let _ = writeln!(s, "s_mu        {}", r.s_mu);
    let _ = writeln!(s, "p           {}", opt(r.p));
    let _ = writeln!(s, "k           {}", opt(r.k));
    let _ = writeln!(s, "ic          {}", r.ic);
    if let Some(ok) = r.oracle_checked {
        let _ = writeln!(s, "oracle      rank {} ({})", opt(r.oracle_rank), if ok { "agrees" } else { "MISMATCH" });
    }
    for w in &r.warnings {
        let _ = writeln!(s, "warning     {w}");
    }
    s
}

fn examples(a: &ExamplesArgs, common: &Common) -> Result<u8> {
    let mut cfg = RunConfig::new("examples", common);
    cfg.filter = a.filter.clone();
    let outcomes = run_fixtures(a.filter.as_deref(), common.dense_cap);
    if outcomes.is_empty() {
        bail!("no fixture matches {:?}", a.filter.as_deref().unwrap_or(""));
    }
    let failed = outcomes.iter().filter(|o| !o.pass).count();
    let text = match common.format {
        Format::Json => to_json(&json!({
            "config": cfg,
            "passed": outcomes.len() - failed,
            "failed": failed,
            "fixtures": outcomes,
        })),
        Format::Csv => csv_text(
            &["name", "category", "pass", "oracle", "expected", "computed"],
            outcomes
                .iter()
                .map(|o| {
                    vec![
                        o.name.clone(),
                        o.category.clone(),
                        o.pass.to_string(),
                        opt(o.oracle),
                        o.expected.clone(),
                        o.computed.clone(),
                    ]
                })
                .collect(),
        )?,
        Format::Text => {
            let mut s = String::new();
            for o in &outcomes {
                let oracle = match o.oracle {
                    Some(true) => "oracle ok",
                    Some(false) => "oracle MISMATCH",
                    None => "",
                };
                let _ = writeln!(s, "{} {:<22} [{}] {oracle}", if o.pass { "PASS" } else { "FAIL" }, o.name, o.category);
                let _ = writeln!(s, "     expected {}", o.expected);
                let _ = writeln!(s, "     computed {}", o.computed);
            }
            let _ = writeln!(s, "{} passed, {failed} failed", outcomes.len() - failed);
            s
        }
    };
    emit(common, &text)?;
    Ok(if failed == 0 { 0 } else { 1 })
}

fn search(a: &SearchArgs, common: &Common) -> Result<u8> {
    let mut cfg = RunConfig::new("search", common);
    cfg.inputs.push(a.task.clone());
    let mut task: SearchTask =
        serde_json::from_str(&read(&a.task)?).with_context(|| format!("in task file {}", a.task.display()))?;
    if let Some(sh) = &a.shard {
        task.shard = Shard::parse(sh)?;
        cfg.shard = Some(sh.clone());
    }
    if let Some(seed) = a.seed {
        task.seed = seed;
    }
    cfg.seed = Some(task.seed);
    let report = run_task(&task)?;
    if let Some(path) = &a.csv {
        std::fs::write(path, report.histogram_csv()).with_context(|| format!("writing {}", path.display()))?;
    }
    let text = match common.format {
        Format::Json => to_json(&json!({ "config": cfg, "report": report })),
        Format::Csv => report.histogram_csv(),
        Format::Text => {
            let mut s = String::new();
            for sec in &report.sections {
                let _ = writeln!(
                    s,
                    "{:<12} n={} m={} t={} candidates={} max_s_mu={} ic={} violations={}{}",
                    sec.label,
                    sec.n,
                    sec.m,
                    sec.t,
                    sec.candidates,
                    opt(sec.max_s_mu),
                    sec.ic_count,
                    sec.violations,
                    if sec.complete { "" } else { " (incomplete)" }
                );
            }
            for w in &report.witnesses {
                let _ = writeln!(s, "witness     {} s_mu={} verified={}", w.description, w.report.s_mu, w.verified);
            }
            for n in &report.notes {
                let _ = writeln!(s, "note        {n}");
            }
            let _ = writeln!(
                s,
                "verdict     {:?}{}",
                report.verdict,
                if report.statistical { " (statistical)" } else { "" }
            );
            s
        }
    };
    emit(common, &text)?;
    Ok(report.verdict.exit_code() as u8)
}

fn ic_verdict(n: u32, t: u32) -> &'static str {
    if t < necessary_t(n) {
        "impossible"
    } else if t >= 2 * n {
        "achievable"
    } else {
        "unknown below 2n, conjectured impossible"
    }
}

fn bounds(a: &BoundsArgs, common: &Common) -> Result<u8> {
    let n = a.n;
    if n == 0 {
        bail!("n must be at least 1");
    }
    let cfg = RunConfig::new("bounds", common);
    let ts: Vec<u32> = match a.t {
        Some(t) => vec![t],
        None => (0..=2 * n).collect(),
    };
    let rows: Vec<(u32, &str, u128, &str)> = ts
        .iter()
        .map(|&t| {
            let (kind, v) = if t <= n { ("ceiling", bound_t_le_n(n, t)) } else { ("target", bound_t_gt_n(n, t)) };
            Ok((t, kind, v?, ic_verdict(n, t)))
        })
        .collect::<Result<_>>()?;
    let nt = necessary_t(n);
    let text = match common.format {
        Format::Json => to_json(&json!({
            "config": cfg,
            "n": n,
            "necessary_t": nt,
            "ic_sufficient_t": 2 * n,
            "rows": rows.iter().map(|(t, kind, v, ic)| json!({
                "t": t, "bound_kind": kind, "bound": v.to_string(), "ic": ic,
            })).collect::<Vec<_>>(),
        })),
        Format::Csv => csv_text(
            &["n", "t", "bound_kind", "bound", "ic"],
            rows.iter().map(|(t, k, v, ic)| vec![n.to_string(), t.to_string(), k.to_string(), v.to_string(), ic.to_string()]).collect(),
        )?,
        Format::Text => {
            let mut s = format!("n = {n}: necessary_t = {nt}, IC sufficient at t = {}\n", 2 * n);
            for (t, k, v, ic) in &rows {
                let _ = writeln!(s, "t = {t:<3} {k:<8} {v:<12} IC {ic}");
            }
            s
        }
    };
    emit(common, &text)?;
    Ok(0)
}

fn oracle_dump(a: &AnalyzeArgs, common: &Common) -> Result<u8> {
    if common.format != Format::Json {
        bail!("oracle-dump only writes JSON");
    }
    let mut cfg = RunConfig::new("oracle-dump", common);
    let (input, anc) = Input::load(a, &mut cfg)?;
    input.check_cap(common.dense_cap)?;
    let (c, meas) = input.circuit_and_measurement()?;
    let cap = common.dense_cap;
    let basis = dense::basis_states(&signed_lift(&meas)?, cap)?;
    let ops: Vec<DenseOperator> = match &anc {
        AncillaSpec::MaximallyMixed(m) => {
            let dim = 1usize << m;
            let mut rho = DenseOperator::zeros(dim);
            rho.add_assign(&DenseOperator::identity(dim), 1.0 / dim as f64);
            dense::effective_povm_mixed(&c, &rho, &basis, cap)?
        }
        AncillaSpec::Generic(_) => bail!("a generic ancilla has no concrete state to dump"),
        other => dense::effective_povm(&c, &other.dense_state()?.expect("pure ancilla"), &basis, cap)?,
    };
    let text = to_json(&json!({
        "config": cfg,
        "n": c.n_data,
        "m": c.n_ancilla,
        "rank": dense::span_rank(&ops, dense::RANK_TOL),
        "elements": ops.iter().map(MatrixDump::from).collect::<Vec<_>>(),
        "frame_operator": dense::frame_operator(&ops),
    }));
    emit(common, &text)?;
    Ok(0)
}
