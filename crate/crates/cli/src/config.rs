//! Run configuration: a JSON document mirrored by the command-line flags.
//! Flags override config fields; validation rejects parameters that do not
//! apply to the selected scenario kind.

use std::path::PathBuf;

use anyhow::{anyhow, bail, Context, Result};
use serde::{Deserialize, Serialize};

use fringe_core::{BombKind, CollapsePolicy, IdlerBasis, MeasureOrder, Scenario};

/// Hit time: a single value or a `start:stop:step` grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum TauParam {
    Point(f64),
    Range(String),
}

impl TauParam {
    pub fn parse(text: &str) -> Result<TauParam> {
        if text.contains(':') {
            Ok(TauParam::Range(text.to_string()))
        } else {
            Ok(TauParam::Point(text.parse::<f64>().with_context(|| {
                format!("tau must be a number or start:stop:step, got {text}")
            })?))
        }
    }

    /// Expands to a strictly increasing grid. A point becomes a one-element
    /// grid.
    pub fn grid(&self) -> Result<Vec<f64>> {
        match self {
            TauParam::Point(t) => Ok(vec![*t]),
            TauParam::Range(spec) => {
                let parts: Vec<&str> = spec.split(':').collect();
                if parts.len() != 3 {
                    bail!("tau range must be start:stop:step, got {spec}");
                }
                let nums: Vec<f64> = parts
                    .iter()
                    .map(|p| {
                        p.parse::<f64>()
                            .with_context(|| format!("bad number {p} in tau range {spec}"))
                    })
                    .collect::<Result<_>>()?;
                let (start, stop, step) = (nums[0], nums[1], nums[2]);
                if !(step > 0.0) {
                    bail!("tau range step must be > 0, got {step}");
                }
                if stop < start {
                    bail!("tau range stop {stop} is below start {start}");
                }
                let mut grid = Vec::new();
                let mut k = 0u64;
                loop {
                    let t = start + step * k as f64;
                    if t > stop + step * 1e-9 {
                        break;
                    }
                    grid.push(t);
                    k += 1;
                }
                Ok(grid)
            }
        }
    }
}

/// Declarative scenario block. Every field is optional here; which ones are
/// required or allowed depends on `kind`.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kind: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub policy: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tau_star: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bomb: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub idler_basis: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub order: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub omega: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tau: Option<TauParam>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub env_dim: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub env_seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_rounds: Option<u32>,
}

impl ScenarioConfig {
    /// Overlays `flags` on top of `self`: any field set on `flags` wins.
    pub fn overlay(&self, flags: &ScenarioConfig) -> ScenarioConfig {
        macro_rules! pick {
            ($field:ident) => {
                flags.$field.clone().or_else(|| self.$field.clone())
            };
        }
        ScenarioConfig {
            kind: pick!(kind),
            policy: pick!(policy),
            tau_star: pick!(tau_star),
            epsilon: pick!(epsilon),
            bomb: pick!(bomb),
            idler_basis: pick!(idler_basis),
            order: pick!(order),
            lambda: pick!(lambda),
            omega: pick!(omega),
            tau: pick!(tau),
            env_dim: pick!(env_dim),
            env_seed: pick!(env_seed),
            max_rounds: pick!(max_rounds),
        }
    }
}

/// Output form: `csv` has a fixed header row, `table` is bare label,value
/// lines plus marginals.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Table,
}

impl OutputFormat {
    pub fn parse(text: &str) -> Result<OutputFormat> {
        match text {
            "csv" => Ok(OutputFormat::Csv),
            "table" => Ok(OutputFormat::Table),
            other => bail!("format must be csv or table, got {other}"),
        }
    }
}

/// The complete run configuration; round-trips losslessly through JSON.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub scenario: ScenarioConfig,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trials: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output: Option<OutputFormat>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out_path: Option<PathBuf>,
}

impl RunConfig {
    pub fn load(path: &std::path::Path) -> Result<RunConfig> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("cannot read config {}", path.display()))?;
        serde_json::from_str(&text)
            .with_context(|| format!("cannot parse config {}", path.display()))
    }
}

/// A scenario with its hit-time grid resolved, ready to evaluate.
#[derive(Debug, Clone)]
pub struct ResolvedScenario {
    /// The scenario at the first grid point (or the single point).
    pub scenario: Scenario,
    /// Present only when `tau` was given as a range.
    pub grid: Option<Vec<f64>>,
}

fn parse_policy(text: &str, tau_star: Option<f64>) -> Result<CollapsePolicy> {
    match text {
        "unitary" => Ok(CollapsePolicy::Unitary),
        "collapse" => Ok(CollapsePolicy::CollapseAtDetector),
        "threshold" => {
            let tau_star =
                tau_star.ok_or_else(|| anyhow!("threshold policy requires --tau-star"))?;
            Ok(CollapsePolicy::Threshold { tau_star })
        }
        other => bail!("policy must be unitary, collapse, or threshold, got {other}"),
    }
}

fn parse_bomb(text: &str) -> Result<BombKind> {
    match text {
        "real" => Ok(BombKind::Real),
        "dud" => Ok(BombKind::Dud),
        other => bail!("bomb must be real or dud, got {other}"),
    }
}

fn parse_idler_basis(text: &str) -> Result<IdlerBasis> {
    match text {
        "which-path" => Ok(IdlerBasis::WhichPath),
        "plus-minus" => Ok(IdlerBasis::PlusMinus),
        other => bail!("idler basis must be which-path or plus-minus, got {other}"),
    }
}

fn parse_order(text: &str) -> Result<MeasureOrder> {
    match text {
        "screen-first" => Ok(MeasureOrder::ScreenFirst),
        "idler-first" => Ok(MeasureOrder::IdlerFirst),
        other => bail!("order must be screen-first or idler-first, got {other}"),
    }
}

/// Field names, for extraneous-parameter diagnostics.
const FIELDS: &[&str] = &[
    "policy",
    "tau_star",
    "epsilon",
    "bomb",
    "idler_basis",
    "order",
    "lambda",
    "omega",
    "tau",
    "env_dim",
    "env_seed",
    "max_rounds",
];

fn set_fields(sc: &ScenarioConfig) -> Vec<&'static str> {
    let mut set = Vec::new();
    let flags = [
        sc.policy.is_some(),
        sc.tau_star.is_some(),
        sc.epsilon.is_some(),
        sc.bomb.is_some(),
        sc.idler_basis.is_some(),
        sc.order.is_some(),
        sc.lambda.is_some(),
        sc.omega.is_some(),
        sc.tau.is_some(),
        sc.env_dim.is_some(),
        sc.env_seed.is_some(),
        sc.max_rounds.is_some(),
    ];
    for (name, on) in FIELDS.iter().zip(flags) {
        if on {
            set.push(*name);
        }
    }
    set
}

fn reject_extraneous(kind: &str, sc: &ScenarioConfig, allowed: &[&str]) -> Result<()> {
    for field in set_fields(sc) {
        if !allowed.contains(&field) {
            bail!("parameter {field} does not apply to scenario {kind}");
        }
    }
    Ok(())
}

fn required_tau(kind: &str, sc: &ScenarioConfig) -> Result<TauParam> {
    sc.tau
        .clone()
        .ok_or_else(|| anyhow!("scenario {kind} requires --tau (value or start:stop:step)"))
}

/// Builds the core scenario from a config block, rejecting parameters the
/// kind does not use.
pub fn resolve_scenario(sc: &ScenarioConfig) -> Result<ResolvedScenario> {
    let kind = sc
        .kind
        .clone()
        .ok_or_else(|| anyhow!("no scenario given (use --scenario or a config file)"))?;
    let mut grid = None;
    let scenario = match kind.as_str() {
        "single-slit-left" => {
            reject_extraneous(&kind, sc, &[])?;
            Scenario::SingleSlitLeft
        }
        "single-slit-right" => {
            reject_extraneous(&kind, sc, &[])?;
            Scenario::SingleSlitRight
        }
        "double-slit" => {
            reject_extraneous(&kind, sc, &[])?;
            Scenario::DoubleSlit
        }
        "which-path" => {
            reject_extraneous(&kind, sc, &["policy", "epsilon"])?;
            let policy = match sc.policy.as_deref() {
                None => CollapsePolicy::Unitary,
                Some(text) => parse_policy(text, None)?,
            };
            Scenario::WhichPathDetector {
                policy,
                epsilon: sc.epsilon.unwrap_or(0.0),
            }
        }
        "bomb" => {
            reject_extraneous(&kind, sc, &["bomb"])?;
            let bomb = sc
                .bomb
                .as_deref()
                .ok_or_else(|| anyhow!("scenario bomb requires --bomb real|dud"))?;
            Scenario::Bomb {
                kind: parse_bomb(bomb)?,
            }
        }
        "bomb-protocol" => {
            reject_extraneous(&kind, sc, &["bomb", "max_rounds"])?;
            let bomb = sc
                .bomb
                .as_deref()
                .ok_or_else(|| anyhow!("scenario bomb-protocol requires --bomb real|dud"))?;
            Scenario::BombSavingProtocol {
                kind: parse_bomb(bomb)?,
                max_rounds: sc.max_rounds.unwrap_or(50),
            }
        }
        "idler" | "idler-delayed-choice" => {
            reject_extraneous(&kind, sc, &["idler_basis", "order"])?;
            Scenario::IdlerDelayedChoice {
                basis: match sc.idler_basis.as_deref() {
                    None => IdlerBasis::WhichPath,
                    Some(text) => parse_idler_basis(text)?,
                },
                order: match sc.order.as_deref() {
                    None => MeasureOrder::ScreenFirst,
                    Some(text) => parse_order(text)?,
                },
            }
        }
        "decoherence" => {
            reject_extraneous(&kind, sc, &["lambda", "policy", "tau_star", "tau"])?;
            let policy = match sc.policy.as_deref() {
                None => CollapsePolicy::Unitary,
                Some(text) => parse_policy(text, sc.tau_star)?,
            };
            let tau_grid = required_tau(&kind, sc)?.grid()?;
            let first = *tau_grid.first().ok_or_else(|| anyhow!("empty tau grid"))?;
            if tau_grid.len() > 1 {
                grid = Some(tau_grid);
            }
            Scenario::DecoherenceSweep {
                lambda_rate: sc.lambda.unwrap_or(1.0),
                policy,
                tau: first,
            }
        }
        "rotating-idler" => {
            reject_extraneous(&kind, sc, &["omega", "tau"])?;
            let tau_grid = required_tau(&kind, sc)?.grid()?;
            let first = *tau_grid.first().ok_or_else(|| anyhow!("empty tau grid"))?;
            if tau_grid.len() > 1 {
                grid = Some(tau_grid);
            }
            Scenario::RotatingIdler {
                omega: sc.omega.unwrap_or(1.0),
                tau: first,
            }
        }
        "finite-env" => {
            reject_extraneous(&kind, sc, &["env_dim", "env_seed", "tau"])?;
            let tau_grid = required_tau(&kind, sc)?.grid()?;
            let first = *tau_grid.first().ok_or_else(|| anyhow!("empty tau grid"))?;
            if tau_grid.len() > 1 {
                grid = Some(tau_grid);
            }
            Scenario::FiniteEnvironment {
                dim_env: sc.env_dim.unwrap_or(4),
                env_seed: sc.env_seed.unwrap_or(0),
                tau: first,
            }
        }
        other => bail!(
            "unknown scenario {other}; expected one of single-slit-left, single-slit-right, \
             double-slit, which-path, bomb, bomb-protocol, idler, decoherence, rotating-idler, \
             finite-env"
        ),
    };
    scenario.validate()?;
    Ok(ResolvedScenario { scenario, grid })
}

/// Seed precedence: explicit value, then the `SIM_SEED` environment
/// variable, then zero.
pub fn resolve_seed(explicit: Option<u64>) -> Result<u64> {
    if let Some(seed) = explicit {
        return Ok(seed);
    }
    match std::env::var("SIM_SEED") {
        Ok(text) => text
            .parse::<u64>()
            .with_context(|| format!("SIM_SEED must be a 64-bit unsigned integer, got {text}")),
        Err(_) => Ok(0),
    }
}
