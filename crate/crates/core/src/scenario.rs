//! Declarative experiment definitions, exact outcome distributions, and
//! sampled trials.
//!
//! [`exact_distribution`] computes the full joint distribution over a
//! scenario's observable events directly from the state vector; it is the
//! oracle every Monte Carlo run is checked against. [`run_trial`] samples
//! one trajectory through the same event sequence under the scenario's
//! collapse policy.

use crate::channels::{
    bomb_channel, emit_idler, entangle_which_path, finite_env_state, monitor_environment,
    rotate_idler, BlockHamiltonian, DecoherenceLaw, RotatingIdlerLaw,
};
use crate::error::{Error, Result};
use crate::ket::Ket;
use crate::measure::{
    born_probabilities, project_collapse, sample, CollapsePolicy, MeasurementBasis,
    OutcomeRecord, PolicyRun,
};
use crate::rng::TrialRng;
use crate::states::{
    bomb_ready, detector_layout, particle_frame, particle_state, BombKind, IdlerBasis,
    PointerModel, SlitChoice,
};
use crate::{MIN_OUTCOME_PROB, TOL_STORAGE};

/// Which of the two correlated measurements happens first.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MeasureOrder {
    ScreenFirst,
    IdlerFirst,
}

/// One experiment, with exactly the parameters its kind uses.
#[derive(Debug, Clone, PartialEq)]
pub enum Scenario {
    SingleSlitLeft,
    SingleSlitRight,
    DoubleSlit,
    WhichPathDetector {
        policy: CollapsePolicy,
        epsilon: f64,
    },
    Bomb {
        kind: BombKind,
    },
    BombSavingProtocol {
        kind: BombKind,
        max_rounds: u32,
    },
    IdlerDelayedChoice {
        basis: IdlerBasis,
        order: MeasureOrder,
    },
    DecoherenceSweep {
        lambda_rate: f64,
        policy: CollapsePolicy,
        tau: f64,
    },
    RotatingIdler {
        omega: f64,
        tau: f64,
    },
    FiniteEnvironment {
        dim_env: usize,
        env_seed: u64,
        tau: f64,
    },
}

impl Scenario {
    pub fn validate(&self) -> Result<()> {
        match self {
            Scenario::SingleSlitLeft
            | Scenario::SingleSlitRight
            | Scenario::DoubleSlit
            | Scenario::Bomb { .. } => Ok(()),
            Scenario::WhichPathDetector { policy, epsilon } => {
                PointerModel::new(*epsilon)?;
                match policy {
                    CollapsePolicy::Unitary | CollapsePolicy::CollapseAtDetector => Ok(()),
                    CollapsePolicy::Threshold { .. } => Err(Error::InvalidScenario(
                        "which-path detector takes the unitary or collapse policy, not threshold"
                            .into(),
                    )),
                }
            }
            Scenario::BombSavingProtocol { max_rounds, .. } => {
                if *max_rounds == 0 {
                    return Err(Error::InvalidScenario(
                        "bomb protocol needs max_rounds >= 1".into(),
                    ));
                }
                Ok(())
            }
            Scenario::IdlerDelayedChoice { .. } => Ok(()),
            Scenario::DecoherenceSweep {
                lambda_rate,
                policy,
                tau,
            } => {
                DecoherenceLaw::new(*lambda_rate)?;
                if !(*tau >= 0.0) {
                    return Err(Error::InvalidScenario(format!(
                        "hit time tau must be >= 0, got {tau}"
                    )));
                }
                policy.validate()?;
                match policy {
                    CollapsePolicy::Unitary | CollapsePolicy::Threshold { .. } => Ok(()),
                    CollapsePolicy::CollapseAtDetector => Err(Error::InvalidScenario(
                        "environment monitoring has no detector to collapse at".into(),
                    )),
                }
            }
            Scenario::RotatingIdler { omega, tau } => {
                RotatingIdlerLaw::new(*omega)?;
                if !(*tau >= 0.0) {
                    return Err(Error::InvalidScenario(format!(
                        "hit time tau must be >= 0, got {tau}"
                    )));
                }
                Ok(())
            }
            Scenario::FiniteEnvironment { dim_env, tau, .. } => {
                if *dim_env == 0 {
                    return Err(Error::InvalidScenario(
                        "environment dimension must be >= 1".into(),
                    ));
                }
                if !(*tau >= 0.0) {
                    return Err(Error::InvalidScenario(format!(
                        "hit time tau must be >= 0, got {tau}"
                    )));
                }
                Ok(())
            }
        }
    }

    /// Copy of the scenario with the hit time replaced; errors for kinds
    /// without a time parameter.
    pub fn with_tau(&self, tau: f64) -> Result<Scenario> {
        let mut s = self.clone();
        match &mut s {
            Scenario::DecoherenceSweep { tau: t, .. }
            | Scenario::RotatingIdler { tau: t, .. }
            | Scenario::FiniteEnvironment { tau: t, .. } => {
                *t = tau;
            }
            _ => {
                return Err(Error::InvalidScenario(
                    "this scenario kind has no time parameter to sweep".into(),
                ))
            }
        }
        s.validate()?;
        Ok(s)
    }

    /// Names of the observable events a trial of this scenario records, in
    /// chronological order. Internal events (for instance a threshold
    /// collapse) are not part of the observable record.
    pub fn observed_events(&self) -> Vec<&'static str> {
        match self {
            Scenario::SingleSlitLeft
            | Scenario::SingleSlitRight
            | Scenario::DoubleSlit
            | Scenario::DecoherenceSweep { .. }
            | Scenario::RotatingIdler { .. }
            | Scenario::FiniteEnvironment { .. } => vec!["screen"],
            Scenario::WhichPathDetector { .. } => vec!["detector", "screen"],
            Scenario::Bomb { .. } => vec!["bomb", "screen"],
            Scenario::BombSavingProtocol { .. } => vec!["verdict"],
            Scenario::IdlerDelayedChoice { order, .. } => match order {
                MeasureOrder::ScreenFirst => vec!["screen", "idler"],
                MeasureOrder::IdlerFirst => vec!["idler", "screen"],
            },
        }
    }
}

/// Joint probabilities over a scenario's observable events. Cells enumerate
/// the full outcome space in event order, including structurally impossible
/// (probability-zero) combinations.
#[derive(Debug, Clone, PartialEq)]
pub struct Distribution {
    events: Vec<String>,
    cells: Vec<(Vec<String>, f64)>,
}

/// Canonical rendering of a joint outcome: the bare label for single-event
/// distributions, `event=label` pairs joined by `;` otherwise.
pub fn composite_key(events: &[String], labels: &[String]) -> String {
    if events.len() == 1 {
        labels[0].clone()
    } else {
        events
            .iter()
            .zip(labels)
            .map(|(e, l)| format!("{e}={l}"))
            .collect::<Vec<_>>()
            .join(";")
    }
}

impl Distribution {
    fn new(events: Vec<String>, cells: Vec<(Vec<String>, f64)>) -> Result<Self> {
        let mut total = 0.0;
        for (labels, p) in &cells {
            if labels.len() != events.len() {
                return Err(Error::DimensionMismatch {
                    expected: events.len(),
                    got: labels.len(),
                });
            }
            if !(*p >= 0.0) {
                return Err(Error::InvalidParameter(format!(
                    "negative probability {p} in cell {labels:?}"
                )));
            }
            total += p;
        }
        if (total - 1.0).abs() > TOL_STORAGE {
            return Err(Error::NotNormalized(total));
        }
        Ok(Distribution { events, cells })
    }

    pub fn events(&self) -> &[String] {
        &self.events
    }

    pub fn cells(&self) -> &[(Vec<String>, f64)] {
        &self.cells
    }

    pub fn key_of(&self, labels: &[String]) -> String {
        composite_key(&self.events, labels)
    }

    /// Cells keyed by their canonical composite rendering, in cell order.
    pub fn keyed_cells(&self) -> Vec<(String, f64)> {
        self.cells
            .iter()
            .map(|(labels, p)| (self.key_of(labels), *p))
            .collect()
    }

    /// Probability of a joint assignment given as unordered `(event, label)`
    /// pairs; `None` if the assignment addresses no cell.
    pub fn probability(&self, assignment: &[(&str, &str)]) -> Option<f64> {
        if assignment.len() != self.events.len() {
            return None;
        }
        let mut wanted = Vec::with_capacity(self.events.len());
        for event in &self.events {
            let (_, label) = assignment.iter().find(|(e, _)| e == event)?;
            wanted.push(label.to_string());
        }
        self.cells
            .iter()
            .find(|(labels, _)| *labels == wanted)
            .map(|(_, p)| *p)
    }

    /// Marginal distribution of one event, labels in first-appearance order.
    pub fn marginal(&self, event: &str) -> Result<Vec<(String, f64)>> {
        let pos = self
            .events
            .iter()
            .position(|e| e == event)
            .ok_or_else(|| Error::LabelMismatch(format!("no event named {event}")))?;
        let mut out: Vec<(String, f64)> = Vec::new();
        for (labels, p) in &self.cells {
            let label = &labels[pos];
            match out.iter_mut().find(|(l, _)| l == label) {
                Some((_, acc)) => *acc += p,
                None => out.push((label.clone(), *p)),
            }
        }
        Ok(out)
    }
}

/// Rescales mixture cells to unit total. A classical mixture of normalized
/// conditional distributions is normalized; this removes the one-ulp drift
/// from separately rounded branch weights.
fn normalize_cells(cells: &mut [(Vec<String>, f64)]) {
    let total: f64 = cells.iter().map(|(_, p)| p).sum();
    if total > 0.0 {
        for (_, p) in cells.iter_mut() {
            *p /= total;
        }
    }
}

/// Expands the joint distribution of successive projective measurements on
/// different subsystems. Probability-zero branches are enumerated (their
/// sub-cells all get zero); branches below the projection floor spread their
/// residual mass uniformly, which at the floor of 1e-15 is invisible at
/// every stated tolerance.
fn joint_distribution(psi: &Ket, stages: &[(&str, MeasurementBasis)]) -> Result<Distribution> {
    fn zero_cells(
        stages: &[(&str, MeasurementBasis)],
        idx: usize,
        prefix: Vec<String>,
        mass: f64,
        out: &mut Vec<(Vec<String>, f64)>,
    ) {
        if idx == stages.len() {
            out.push((prefix, mass));
            return;
        }
        let labels = stages[idx].1.labels();
        let share = mass / labels.len() as f64;
        for label in labels {
            let mut next = prefix.clone();
            next.push(label.to_string());
            zero_cells(stages, idx + 1, next, share, out);
        }
    }

    fn expand(
        psi: &Ket,
        stages: &[(&str, MeasurementBasis)],
        idx: usize,
        acc_p: f64,
        prefix: Vec<String>,
        out: &mut Vec<(Vec<String>, f64)>,
    ) -> Result<()> {
        if idx == stages.len() {
            out.push((prefix, acc_p));
            return Ok(());
        }
        let basis = &stages[idx].1;
        for (label, p) in born_probabilities(psi, basis)? {
            let mut next = prefix.clone();
            next.push(label.clone());
            if p > MIN_OUTCOME_PROB {
                let collapsed = project_collapse(psi, basis, &label)?;
                expand(&collapsed, stages, idx + 1, acc_p * p, next, out)?;
            } else {
                zero_cells(stages, idx + 1, next, acc_p * p, out);
            }
        }
        Ok(())
    }

    let mut cells = Vec::new();
    expand(psi, stages, 0, 1.0, Vec::new(), &mut cells)?;
    Distribution::new(
        stages.iter().map(|(e, _)| e.to_string()).collect(),
        cells,
    )
}

fn screen_basis_for(psi: &Ket) -> Result<MeasurementBasis> {
    Ok(MeasurementBasis::screen(particle_frame(psi)?))
}

fn ready_detector_state() -> Result<Ket> {
    let d0 = Ket::basis_state(detector_layout(), &["D_0"])?;
    particle_state(SlitChoice::BothSlits).tensor(&d0)
}

fn entangled_detector_state(epsilon: f64) -> Result<Ket> {
    entangle_which_path(&ready_detector_state()?, &PointerModel::new(epsilon)?)
}

fn bomb_state(kind: BombKind) -> Result<Ket> {
    bomb_channel(&particle_state(SlitChoice::BothSlits).tensor(&bomb_ready())?, kind)
}

/// Per-round transition probabilities of the bomb-saving loop, taken from
/// the exact single-round distribution.
struct BombRound {
    p_explode: f64,
    p_certify: f64,
    p_repeat: f64,
}

fn bomb_round(kind: BombKind) -> Result<BombRound> {
    let dist = exact_distribution(&Scenario::Bomb { kind })?;
    let marg = dist.marginal("bomb")?;
    let p_explode = marg
        .iter()
        .find(|(l, _)| l == "Exploded")
        .map(|(_, p)| *p)
        .unwrap_or(0.0);
    let p_certify = dist
        .probability(&[("bomb", "NoExplosion"), ("screen", "B")])
        .unwrap_or(0.0);
    let p_repeat = dist
        .probability(&[("bomb", "NoExplosion"), ("screen", "A")])
        .unwrap_or(0.0);
    Ok(BombRound {
        p_explode,
        p_certify,
        p_repeat,
    })
}

/// Exact joint distribution over the scenario's observable events, computed
/// from the state vector. This is the oracle for all Monte Carlo checks.
pub fn exact_distribution(s: &Scenario) -> Result<Distribution> {
    s.validate()?;
    match s {
        Scenario::SingleSlitLeft => {
            let psi = particle_state(SlitChoice::OnlyLeft);
            joint_distribution(&psi, &[("screen", screen_basis_for(&psi)?)])
        }
        Scenario::SingleSlitRight => {
            let psi = particle_state(SlitChoice::OnlyRight);
            joint_distribution(&psi, &[("screen", screen_basis_for(&psi)?)])
        }
        Scenario::DoubleSlit => {
            let psi = particle_state(SlitChoice::BothSlits);
            joint_distribution(&psi, &[("screen", screen_basis_for(&psi)?)])
        }
        Scenario::WhichPathDetector { policy, epsilon } => match policy {
            CollapsePolicy::Unitary => {
                let psi = entangled_detector_state(*epsilon)?;
                let joint = joint_distribution(
                    &psi,
                    &[
                        ("detector", MeasurementBasis::detector_readout()),
                        ("screen", screen_basis_for(&psi)?),
                    ],
                )?;
                // The ready outcome D_0 is structurally impossible once the
                // detector has fired; drop its zero cells from the outcome
                // space.
                let cells: Vec<(Vec<String>, f64)> = joint
                    .cells
                    .iter()
                    .filter(|(labels, _)| labels[0] != "D_0")
                    .cloned()
                    .collect();
                Distribution::new(joint.events, cells)
            }
            CollapsePolicy::CollapseAtDetector => {
                let psi = entangled_detector_state(*epsilon)?;
                let path_basis = MeasurementBasis::which_path(particle_frame(&psi)?);
                let mut cells = Vec::new();
                for (path, p_path) in born_probabilities(&psi, &path_basis)? {
                    let pointer = if path == "L" { "D_L" } else { "D_R" };
                    let collapsed = project_collapse(&psi, &path_basis, &path)?;
                    let screen = screen_basis_for(&collapsed)?;
                    for (hit, p_hit) in born_probabilities(&collapsed, &screen)? {
                        cells.push((vec![pointer.to_string(), hit], p_path * p_hit));
                    }
                }
                normalize_cells(&mut cells);
                Distribution::new(vec!["detector".into(), "screen".into()], cells)
            }
            CollapsePolicy::Threshold { .. } => unreachable!("rejected by validate"),
        },
        Scenario::Bomb { kind } => {
            let psi = bomb_state(*kind)?;
            joint_distribution(
                &psi,
                &[
                    ("bomb", MeasurementBasis::bomb_readout()),
                    ("screen", screen_basis_for(&psi)?),
                ],
            )
        }
        Scenario::BombSavingProtocol { kind, max_rounds } => {
            let round = bomb_round(*kind)?;
            let rounds = *max_rounds;
            // Verdict probabilities after at most `rounds` repetitions: the
            // loop survives a round with probability p_repeat, so terminal
            // verdicts pick up the geometric factor sum_{k<rounds} p_repeat^k.
            let (survive_sum, p_inconclusive) = if round.p_repeat >= 1.0 {
                (0.0, 1.0)
            } else {
                let p_all = round.p_repeat.powi(rounds as i32);
                ((1.0 - p_all) / (1.0 - round.p_repeat), p_all)
            };
            Distribution::new(
                vec!["verdict".into()],
                vec![
                    (
                        vec!["CertifiedGood".into()],
                        round.p_certify * survive_sum,
                    ),
                    (vec!["Exploded".into()], round.p_explode * survive_sum),
                    (vec!["Inconclusive".into()], p_inconclusive),
                ],
            )
        }
        Scenario::IdlerDelayedChoice { basis, order } => {
            let psi = emit_idler(&particle_state(SlitChoice::BothSlits))?;
            let screen = ("screen", screen_basis_for(&psi)?);
            let idler = ("idler", MeasurementBasis::idler(*basis));
            match order {
                MeasureOrder::ScreenFirst => joint_distribution(&psi, &[screen, idler]),
                MeasureOrder::IdlerFirst => joint_distribution(&psi, &[idler, screen]),
            }
        }
        Scenario::DecoherenceSweep {
            lambda_rate,
            policy,
            tau,
        } => {
            let law = DecoherenceLaw::new(*lambda_rate)?;
            let psi = monitor_environment(*tau, &law)?;
            match policy {
                CollapsePolicy::Threshold { tau_star } if *tau >= *tau_star => {
                    // Post-collapse classical mixture over the two paths.
                    let path_basis = MeasurementBasis::which_path(particle_frame(&psi)?);
                    let mut acc: Vec<(Vec<String>, f64)> = Vec::new();
                    for (path, p_path) in born_probabilities(&psi, &path_basis)? {
                        let collapsed = project_collapse(&psi, &path_basis, &path)?;
                        let screen = screen_basis_for(&collapsed)?;
                        for (hit, p_hit) in born_probabilities(&collapsed, &screen)? {
                            match acc.iter_mut().find(|(l, _)| l[0] == hit) {
                                Some((_, p)) => *p += p_path * p_hit,
                                None => acc.push((vec![hit], p_path * p_hit)),
                            }
                        }
                    }
                    normalize_cells(&mut acc);
                    Distribution::new(vec!["screen".into()], acc)
                }
                _ => joint_distribution(&psi, &[("screen", screen_basis_for(&psi)?)]),
            }
        }
        Scenario::RotatingIdler { omega, tau } => {
            let psi = rotate_idler(*tau, &RotatingIdlerLaw::new(*omega)?)?;
            joint_distribution(&psi, &[("screen", screen_basis_for(&psi)?)])
        }
        Scenario::FiniteEnvironment {
            dim_env,
            env_seed,
            tau,
        } => {
            let bh = BlockHamiltonian::random(*dim_env, *env_seed)?;
            let psi = finite_env_state(&bh, *tau)?;
            joint_distribution(&psi, &[("screen", screen_basis_for(&psi)?)])
        }
    }
}

/// One sampled trajectory through the scenario's event sequence under its
/// collapse policy.
pub fn run_trial(s: &Scenario, rng: &mut TrialRng) -> Result<OutcomeRecord> {
    s.validate()?;
    let mut record = OutcomeRecord::new();
    match s {
        Scenario::SingleSlitLeft | Scenario::SingleSlitRight | Scenario::DoubleSlit => {
            let which = match s {
                Scenario::SingleSlitLeft => SlitChoice::OnlyLeft,
                Scenario::SingleSlitRight => SlitChoice::OnlyRight,
                _ => SlitChoice::BothSlits,
            };
            let psi = particle_state(which);
            let (hit, _) = sample(&psi, &screen_basis_for(&psi)?, rng)?;
            record.push("screen", hit, 0.0);
        }
        Scenario::WhichPathDetector { policy, epsilon } => {
            let psi = entangled_detector_state(*epsilon)?;
            let mut policy_run = PolicyRun::new(*policy);
            let (psi, collapse) = policy_run.after_detector(&psi, 0.0, rng)?;
            let (psi, pointer) = match collapse {
                // The detector's own record is the collapsed path.
                Some(event) => {
                    let pointer = if event.path == "L" { "D_L" } else { "D_R" };
                    (psi, pointer.to_string())
                }
                None => {
                    let (label, collapsed) =
                        sample(&psi, &MeasurementBasis::detector_readout(), rng)?;
                    (collapsed, label)
                }
            };
            record.push("detector", pointer, 0.0);
            let (hit, _) = sample(&psi, &screen_basis_for(&psi)?, rng)?;
            record.push("screen", hit, 1.0);
        }
        Scenario::Bomb { kind } => {
            let psi = bomb_state(*kind)?;
            let (explosion, psi) = sample(&psi, &MeasurementBasis::bomb_readout(), rng)?;
            record.push("bomb", explosion, 0.0);
            let (hit, _) = sample(&psi, &screen_basis_for(&psi)?, rng)?;
            record.push("screen", hit, 1.0);
        }
        Scenario::BombSavingProtocol { kind, max_rounds } => {
            let verdict = bomb_saving_protocol(*kind, *max_rounds, rng)?;
            record.push(
                "verdict",
                verdict.verdict.label(),
                verdict.rounds_used as f64,
            );
        }
        Scenario::IdlerDelayedChoice { basis, order } => {
            let psi = emit_idler(&particle_state(SlitChoice::BothSlits))?;
            let idler_basis = MeasurementBasis::idler(*basis);
            match order {
                MeasureOrder::ScreenFirst => {
                    let (hit, psi) = sample(&psi, &screen_basis_for(&psi)?, rng)?;
                    record.push("screen", hit, 0.0);
                    let (idler, _) = sample(&psi, &idler_basis, rng)?;
                    record.push("idler", idler, 1.0);
                }
                MeasureOrder::IdlerFirst => {
                    let (idler, psi) = sample(&psi, &idler_basis, rng)?;
                    record.push("idler", idler, 0.0);
                    let (hit, _) = sample(&psi, &screen_basis_for(&psi)?, rng)?;
                    record.push("screen", hit, 1.0);
                }
            }
        }
        Scenario::DecoherenceSweep {
            lambda_rate,
            policy,
            tau,
        } => {
            let law = DecoherenceLaw::new(*lambda_rate)?;
            let psi = monitor_environment(*tau, &law)?;
            let mut policy_run = PolicyRun::new(*policy);
            let (psi, collapse) = policy_run.at_time(&psi, *tau, rng)?;
            if let Some(event) = collapse {
                record.push("collapse", event.path, event.time);
            }
            let (hit, _) = sample(&psi, &screen_basis_for(&psi)?, rng)?;
            record.push("screen", hit, *tau);
        }
        Scenario::RotatingIdler { omega, tau } => {
            let psi = rotate_idler(*tau, &RotatingIdlerLaw::new(*omega)?)?;
            let (hit, _) = sample(&psi, &screen_basis_for(&psi)?, rng)?;
            record.push("screen", hit, *tau);
        }
        Scenario::FiniteEnvironment {
            dim_env,
            env_seed,
            tau,
        } => {
            let bh = BlockHamiltonian::random(*dim_env, *env_seed)?;
            let psi = finite_env_state(&bh, *tau)?;
            let (hit, _) = sample(&psi, &screen_basis_for(&psi)?, rng)?;
            record.push("screen", hit, *tau);
        }
    }
    Ok(record)
}

/// Outcome of one run of the bomb-saving loop.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Exploded,
    CertifiedGood,
    Inconclusive,
}

impl Verdict {
    pub fn label(self) -> &'static str {
        match self {
            Verdict::Exploded => "Exploded",
            Verdict::CertifiedGood => "CertifiedGood",
            Verdict::Inconclusive => "Inconclusive",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BombVerdict {
    pub verdict: Verdict,
    pub rounds_used: u32,
}

/// Repeats single-bomb trials on one bomb until it explodes, is certified by
/// a no-explosion hit at B, or the round budget runs out. A dud can never be
/// certified: its B amplitude is a structural zero, so the B outcome is
/// never sampled.
pub fn bomb_saving_protocol(
    kind: BombKind,
    max_rounds: u32,
    rng: &mut TrialRng,
) -> Result<BombVerdict> {
    if max_rounds == 0 {
        return Err(Error::InvalidParameter(
            "bomb protocol needs max_rounds >= 1".into(),
        ));
    }
    for round in 1..=max_rounds {
        let psi = bomb_state(kind)?;
        let (explosion, psi) = sample(&psi, &MeasurementBasis::bomb_readout(), rng)?;
        if explosion == "Exploded" {
            return Ok(BombVerdict {
                verdict: Verdict::Exploded,
                rounds_used: round,
            });
        }
        let (hit, _) = sample(&psi, &screen_basis_for(&psi)?, rng)?;
        if hit == "B" {
            return Ok(BombVerdict {
                verdict: Verdict::CertifiedGood,
                rounds_used: round,
            });
        }
    }
    Ok(BombVerdict {
        verdict: Verdict::Inconclusive,
        rounds_used: max_rounds,
    })
}

/// Exact distributions across a grid of hit times. The grid must be finite,
/// nonempty, and strictly increasing.
pub fn sweep(s: &Scenario, grid: &[f64]) -> Result<Vec<(f64, Distribution)>> {
    if grid.is_empty() {
        return Err(Error::EmptyGrid);
    }
    for (i, w) in grid.windows(2).enumerate() {
        if !(w[1] > w[0]) {
            return Err(Error::GridNotIncreasing(i + 1));
        }
    }
    if grid.iter().any(|t| !t.is_finite()) {
        return Err(Error::InvalidParameter("grid contains non-finite times".into()));
    }
    grid.iter()
        .map(|&tau| Ok((tau, exact_distribution(&s.with_tau(tau)?)?)))
        .collect()
}
