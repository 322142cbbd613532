//! Experiment configuration and the command runner.

use std::io::Write;
use std::path::{Path, PathBuf};

use coherence_core::channel::{verify_covariance, Channel};
use coherence_core::ladder::{embed_into_ladders, LevelRange};
use coherence_core::lattice::embedding_basis;
use coherence_core::measures::{measure, MeasureKind};
use coherence_core::modes::{check_subset_q, check_subset_z, modes_of, transform_verdict_with};
use coherence_core::protocols::{
    build_correlated_catalyst, check_freshness, counterexample_report, rate_certificate,
    recombination_schedule, CounterexampleReport,
};
use coherence_core::{sample, tol, DensityMatrix, EnergyValue, SymbolContext, Valuation};
use rayon::prelude::*;

use crate::error::LabError;
use crate::format::{self, BundleFile, ChannelFile, StateFile};
use crate::output::{csv_bytes, write_atomic};
use crate::valuation::default_valuation;

/// Environment variable capping the worker threads used by sweeps.
pub const THREADS_VAR: &str = "COHERENCE_LAB_THREADS";

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tolerances {
    /// Largest commutator norm accepted as covariant.
    pub covariance: f64,
    /// Entries at or below this magnitude carry no mode.
    pub mode_threshold: f64,
    /// Largest deviation accepted by exactness contracts.
    pub exact: f64,
    /// Largest accepted gap between a computed distance and its closed form.
    pub formula: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            covariance: tol::COVARIANCE,
            mode_threshold: tol::MODE_THRESHOLD,
            exact: 1e-12,
            formula: 1e-9,
        }
    }
}

impl Tolerances {
    fn validate(&self) -> Result<(), LabError> {
        let all = [
            self.covariance,
            self.mode_threshold,
            self.exact,
            self.formula,
        ];
        if all.iter().all(|t| t.is_finite() && *t > 0.0) {
            Ok(())
        } else {
            Err(LabError::Usage("tolerances must be positive".into()))
        }
    }

    fn describe(&self) -> String {
        format!(
            "covariance_tol={:e} mode_threshold={:e} exact_tol={:e} formula_tol={:e}",
            self.covariance, self.mode_threshold, self.exact, self.formula
        )
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SpanVariant {
    Z,
    Q,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Command {
    Modes {
        state: PathBuf,
    },
    /// Is every mode of `target` in the span of the modes of `source`?
    CheckSubset {
        variant: SpanVariant,
        target: PathBuf,
        source: PathBuf,
    },
    Covariance {
        channel: PathBuf,
    },
    CatalystBuild {
        n: usize,
        state: PathBuf,
        channel: PathBuf,
        out: PathBuf,
        cap: usize,
    },
    Counterexample {
        m: usize,
        eps: f64,
        delta: f64,
        sweep: bool,
        csv: Option<PathBuf>,
    },
    Schedule {
        n: usize,
        k: usize,
        mu: Option<u64>,
        csv: Option<PathBuf>,
    },
    /// With `trials`, random states on the same Hamiltonian are scored too.
    Measures {
        state: PathBuf,
        trials: Option<usize>,
        csv: Option<PathBuf>,
    },
    Embed {
        state: PathBuf,
        range: (i64, i64),
    },
    Verdict {
        source: PathBuf,
        target: PathBuf,
    },
}

impl Command {
    fn is_randomized(&self) -> bool {
        matches!(
            self,
            Command::Measures {
                trials: Some(_),
                ..
            }
        )
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub command: Command,
    pub seed: Option<u64>,
    pub valuation: Option<PathBuf>,
    pub tolerances: Tolerances,
}

impl ExperimentConfig {
    pub fn new(command: Command) -> Self {
        Self {
            command,
            seed: None,
            valuation: None,
            tolerances: Tolerances::default(),
        }
    }

    pub fn validate(&self) -> Result<(), LabError> {
        self.tolerances.validate()?;
        if self.command.is_randomized() && self.seed.is_none() {
            return Err(LabError::Usage(
                "this command is randomized and needs --seed".into(),
            ));
        }
        Ok(())
    }

    fn csv_comment(&self) -> String {
        let seed = self
            .seed
            .map_or_else(|| "none".to_string(), |s| s.to_string());
        format!("seed={seed} {}", self.tolerances.describe())
    }

    fn valuation_for(&self, ctx: &SymbolContext) -> Result<Valuation, LabError> {
        match &self.valuation {
            Some(p) => Ok(format::valuation_from_file(&format::read_json(p)?)),
            None => Ok(default_valuation(ctx)),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Outcome {
    Pass,
    Violation,
}

impl Outcome {
    fn from_pass(ok: bool) -> Self {
        if ok {
            Outcome::Pass
        } else {
            Outcome::Violation
        }
    }

    pub fn exit_code(self) -> i32 {
        match self {
            Outcome::Pass => 0,
            Outcome::Violation => 1,
        }
    }
}

pub fn exit_code(result: &Result<Outcome, LabError>) -> i32 {
    match result {
        Ok(o) => o.exit_code(),
        Err(e) => e.exit_code(),
    }
}

/// Pool sized by [`THREADS_VAR`] when set, otherwise by rayon's default.
pub fn thread_pool() -> Result<rayon::ThreadPool, LabError> {
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Ok(v) = std::env::var(THREADS_VAR) {
        let n: usize =
            v.trim().parse().ok().filter(|&n| n > 0).ok_or_else(|| {
                LabError::Usage(format!("{THREADS_VAR} must be a positive integer"))
            })?;
        b = b.num_threads(n);
    }
    b.build().map_err(|e| LabError::Usage(e.to_string()))
}

fn emit(out: &mut dyn Write, line: impl AsRef<str>) -> Result<(), LabError> {
    writeln!(out, "{}", line.as_ref()).map_err(|e| LabError::Io("stdout".into(), e))
}

fn per_symbol(e: &EnergyValue, ctx: &SymbolContext) -> String {
    let dense = e.to_dense(ctx.len());
    ctx.names()
        .iter()
        .zip(&dense)
        .map(|(n, c)| format!("{n}={}", format::fraction(c)))
        .collect::<Vec<_>>()
        .join(" ")
}

pub fn run(config: &ExperimentConfig, out: &mut dyn Write) -> Result<Outcome, LabError> {
    config.validate()?;
    let tol = &config.tolerances;
    match &config.command {
        Command::Modes { state } => {
            let rho = format::read_state(state)?;
            let modes = modes_of(&rho, tol.mode_threshold);
            let ctx = rho.hamiltonian().context();
            let gens = modes.generators();
            emit(out, format!("modes: {} generators", gens.len()))?;
            for g in &gens {
                emit(
                    out,
                    format!("  {}  [{}]", g.display(ctx), per_symbol(g, ctx)),
                )?;
            }
            Ok(Outcome::Pass)
        }
        Command::CheckSubset {
            variant,
            target,
            source,
        } => {
            let t = modes_of(&format::read_state(target)?, tol.mode_threshold);
            let s = modes_of(&format::read_state(source)?, tol.mode_threshold);
            let ok = match variant {
                SpanVariant::Z => check_subset_z(&t, &s),
                SpanVariant::Q => check_subset_q(&t, &s),
            };
            let span = if *variant == SpanVariant::Z {
                "integer"
            } else {
                "rational"
            };
            emit(
                out,
                format!(
                    "{span} span: {}",
                    if ok { "contained" } else { "not contained" }
                ),
            )?;
            Ok(Outcome::from_pass(ok))
        }
        Command::Covariance { channel } => {
            let ch = format::read_channel(channel)?;
            let val = config.valuation_for(ch.input().context())?;
            let norm = verify_covariance(&ch, &val)?;
            emit(out, format!("commutator norm: {norm:e}"))?;
            Ok(Outcome::from_pass(norm <= tol.covariance))
        }
        Command::CatalystBuild {
            n,
            state,
            channel,
            out: path,
            cap,
        } => {
            let rho = format::read_state(state)?;
            let lambda = format::read_channel(channel)?;
            let (bundle, composite) = build_correlated_catalyst(&rho, &lambda, *n, *cap)?;
            let contract = bundle.verify(&rho, &composite)?;
            let val = config.valuation_for(rho.hamiltonian().context())?;
            let norm = verify_covariance(&composite, &val)?;
            let file = BundleFile {
                n: *n,
                register_dim: bundle.register_dim,
                catalyst: StateFile::from_state(&bundle.state),
                channel: ChannelFile::from_channel(&composite),
                system_target: StateFile::from_state(&bundle.system_target),
                catalyst_deviation: contract.catalyst_deviation,
                system_deviation: contract.system_deviation,
                covariance_norm: norm,
            };
            format::write_json(path, &file)?;
            emit(out, format!("catalyst dim: {}", bundle.state.dim()))?;
            emit(
                out,
                format!("catalyst deviation: {:e}", contract.catalyst_deviation),
            )?;
            emit(
                out,
                format!("system deviation: {:e}", contract.system_deviation),
            )?;
            emit(out, format!("commutator norm: {norm:e}"))?;
            Ok(Outcome::from_pass(
                contract.holds(tol.exact) && norm <= tol.covariance,
            ))
        }
        Command::Counterexample {
            m,
            eps,
            delta,
            sweep,
            csv,
        } => {
            let ms: Vec<usize> = if *sweep { (1..=*m).collect() } else { vec![*m] };
            let reports: Vec<CounterexampleReport> = thread_pool()?.install(|| {
                ms.par_iter()
                    .map(|&mm| counterexample_report(mm, *eps, *delta))
                    .collect::<Result<_, _>>()
            })?;
            let header = [
                "m",
                "eps",
                "delta",
                "marginal_dist",
                "correlation",
                "global_dist",
                "f_formula",
            ];
            let rows: Vec<Vec<String>> = reports
                .iter()
                .map(|r| {
                    let cells = [
                        r.eps,
                        r.delta,
                        r.marginal_dist,
                        r.correlation,
                        r.global_dist,
                        r.f_formula,
                    ];
                    std::iter::once(r.m.to_string())
                        .chain(cells.iter().map(f64::to_string))
                        .collect()
                })
                .collect();
            emit(out, header.join(","))?;
            for r in &rows {
                emit(out, r.join(","))?;
            }
            if let Some(p) = csv {
                write_atomic(p, &csv_bytes(&config.csv_comment(), &header, &rows)?)?;
            }
            let ok = reports
                .iter()
                .all(|r| (r.global_dist - r.f_formula).abs() <= tol.formula);
            Ok(Outcome::from_pass(ok))
        }
        Command::Schedule { n, k, mu, csv } => {
            let rounds = recombination_schedule(*n, *k)?;
            let mut rows = Vec::new();
            for round in &rounds {
                for (g, group) in round.groups.iter().enumerate() {
                    let members: Vec<String> = group.iter().map(|l| label(l)).collect();
                    emit(
                        out,
                        format!(
                            "round {} group {}: {}",
                            round.index,
                            g + 1,
                            members.join(" ")
                        ),
                    )?;
                    for (j, l) in group.iter().enumerate() {
                        rows.push(vec![
                            round.index.to_string(),
                            (g + 1).to_string(),
                            (j + 1).to_string(),
                            label(l),
                        ]);
                    }
                }
            }
            let fresh = check_freshness(&rounds, *n);
            emit(out, format!("conversions: {}", fresh.conversions))?;
            emit(out, format!("fresh: {}", fresh.passed()))?;
            if let Some(mu) = mu {
                let cert = rate_certificate(*mu, *n, *k)?;
                emit(
                    out,
                    format!(
                        "rate: {} / {} = {} ({})",
                        cert.copies_out,
                        cert.copies_in,
                        format::fraction(&cert.ratio),
                        cert.ratio_f64()
                    ),
                )?;
            }
            if let Some(p) = csv {
                write_atomic(
                    p,
                    &csv_bytes(
                        &config.csv_comment(),
                        &["round", "group", "role", "label"],
                        &rows,
                    )?,
                )?;
            }
            Ok(Outcome::from_pass(fresh.passed()))
        }
        Command::Measures { state, trials, csv } => {
            let rho = format::read_state(state)?;
            let val = config.valuation_for(rho.hamiltonian().context())?;
            for kind in MeasureKind::ALL {
                emit(out, format!("{kind}: {}", measure(kind, &rho, &val)?))?;
            }
            if let Some(trials) = trials {
                let seed = config.seed.expect("validated");
                let h = rho.hamiltonian().clone();
                let rows: Vec<Vec<String>> = thread_pool()?.install(|| {
                    (0..*trials)
                        .into_par_iter()
                        .map(|t| {
                            let mut r = sample::rng(trial_seed(seed, t));
                            let s = sample::mixed_state(&h, 1 + t % h.dim(), &mut r)?;
                            let mut row = vec![t.to_string()];
                            for kind in MeasureKind::ALL {
                                row.push(measure(kind, &s, &val)?.to_string());
                            }
                            Ok(row)
                        })
                        .collect::<Result<_, coherence_core::Error>>()
                })?;
                let header: Vec<&str> = std::iter::once("trial")
                    .chain(MeasureKind::ALL.iter().map(|k| k.as_str()))
                    .collect();
                let bytes = csv_bytes(&config.csv_comment(), &header, &rows)?;
                match csv {
                    Some(p) => write_atomic(p, &bytes)?,
                    None => out
                        .write_all(&bytes)
                        .map_err(|e| LabError::Io("stdout".into(), e))?,
                }
            }
            Ok(Outcome::Pass)
        }
        Command::Embed { state, range } => {
            let rho = format::read_state(state)?;
            let h = rho.hamiltonian();
            let ctx = h.context();
            let basis = embedding_basis(h.energies());
            emit(out, format!("basis: {} intervals", basis.len()))?;
            for b in &basis {
                emit(
                    out,
                    format!("  {}  [{}]", b.display(ctx), per_symbol(b, ctx)),
                )?;
            }
            if basis.is_empty() {
                emit(out, "all levels have zero energy")?;
                return Ok(Outcome::Pass);
            }
            let emb = embed_into_ladders(h, &basis, LevelRange::new(range.0, range.1)?)?;
            for (i, (c, a)) in emb
                .coordinates
                .iter()
                .zip(&emb.degeneracy_labels)
                .enumerate()
            {
                let coords: Vec<String> = c.iter().map(i64::to_string).collect();
                emit(
                    out,
                    format!(
                        "level {i}: {} -> ({}) label {a}",
                        h.energy(i).display(ctx),
                        coords.join(", ")
                    ),
                )?;
            }
            Ok(Outcome::Pass)
        }
        Command::Verdict { source, target } => {
            let s = format::read_state(source)?;
            let t = format::read_state(target)?;
            let v = transform_verdict_with(&s, &t, tol.mode_threshold);
            emit(out, format!("{v}: {}", v.explanation()))?;
            Ok(Outcome::Pass)
        }
    }
}

fn label(l: &[usize]) -> String {
    let parts: Vec<String> = l.iter().map(usize::to_string).collect();
    format!("({})", parts.join(","))
}

/// Independent per-trial seed, so results do not depend on thread count.
fn trial_seed(seed: u64, trial: usize) -> u64 {
    let mut z = seed ^ (trial as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Convenience for writing a state file.
pub fn save_state(path: &Path, rho: &DensityMatrix) -> Result<(), LabError> {
    format::write_json(path, &StateFile::from_state(rho))
}
