//! Born-rule probabilities, projective collapse, seeded sampling, and the
//! three collapse policies.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::ket::Ket;
use crate::rng::TrialRng;
use crate::states::{
    detector_layout, idler_states, IdlerBasis, ParticleFrame, BOMB, DETECTOR, IDLER, PARTICLE,
};
use crate::{MIN_OUTCOME_PROB, TOL_STORAGE};

const INV_SQRT2: f64 = std::f64::consts::FRAC_1_SQRT_2;

fn re(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

/// Named orthonormal, complete family of projectors on one subsystem.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementBasis {
    subsystem: String,
    outcomes: Vec<(String, Vec<Complex64>)>,
}

impl MeasurementBasis {
    /// Outcome vectors are kets over the single target subsystem; they must
    /// be orthonormal within [`TOL_STORAGE`] and complete (one per basis
    /// dimension).
    pub fn new(subsystem: impl Into<String>, outcomes: Vec<(String, Ket)>) -> Result<Self> {
        let subsystem = subsystem.into();
        if outcomes.is_empty() {
            return Err(Error::InvalidBasis("no outcomes given".into()));
        }
        let dim = outcomes[0].1.dim();
        for (label, ket) in &outcomes {
            let subs = ket.layout().subsystems();
            if subs.len() != 1 || subs[0].name() != subsystem {
                return Err(Error::InvalidBasis(format!(
                    "outcome {label} is not a ket over subsystem {subsystem}"
                )));
            }
            if ket.dim() != dim {
                return Err(Error::InvalidBasis(format!(
                    "outcome {label} has dimension {} instead of {dim}",
                    ket.dim()
                )));
            }
        }
        if outcomes.len() != dim {
            return Err(Error::InvalidBasis(format!(
                "basis over {subsystem} has {} outcomes for dimension {dim}",
                outcomes.len()
            )));
        }
        for (i, (la, a)) in outcomes.iter().enumerate() {
            for (lb, b) in outcomes.iter().skip(i) {
                let ip = a.inner(b)?;
                let target = if la == lb { Complex64::ONE } else { Complex64::ZERO };
                if (ip - target).norm() > TOL_STORAGE {
                    return Err(Error::InvalidBasis(format!(
                        "outcomes {la} and {lb} are not orthonormal: <{la}|{lb}> = {ip}"
                    )));
                }
            }
        }
        Ok(MeasurementBasis {
            subsystem,
            outcomes: outcomes
                .into_iter()
                .map(|(label, ket)| (label, ket.amps().to_vec()))
                .collect(),
        })
    }

    pub fn subsystem(&self) -> &str {
        &self.subsystem
    }

    pub fn labels(&self) -> Vec<&str> {
        self.outcomes.iter().map(|(l, _)| l.as_str()).collect()
    }

    /// Screen measurement `{A, B}` expressed over the particle's current
    /// frame labels.
    pub fn screen(frame: ParticleFrame) -> Self {
        let layout = frame.layout();
        let outcomes = match frame {
            ParticleFrame::ScreenAB => vec![
                ("A".to_string(), Ket::basis_state(layout.clone(), &["A"]).unwrap()),
                ("B".to_string(), Ket::basis_state(layout, &["B"]).unwrap()),
            ],
            ParticleFrame::PathLR => vec![
                (
                    "A".to_string(),
                    // |A> = (|L> + |R>)/sqrt(2)
                    Ket::new(layout.clone(), vec![re(INV_SQRT2), re(INV_SQRT2)]).unwrap(),
                ),
                (
                    "B".to_string(),
                    // |B> = (|R> - |L>)/sqrt(2)
                    Ket::new(layout, vec![re(-INV_SQRT2), re(INV_SQRT2)]).unwrap(),
                ),
            ],
        };
        MeasurementBasis::new(PARTICLE, outcomes).expect("static screen basis")
    }

    /// Which-path measurement `{L, R}` expressed over the particle's current
    /// frame labels.
    pub fn which_path(frame: ParticleFrame) -> Self {
        let layout = frame.layout();
        let outcomes = match frame {
            ParticleFrame::PathLR => vec![
                ("L".to_string(), Ket::basis_state(layout.clone(), &["L"]).unwrap()),
                ("R".to_string(), Ket::basis_state(layout, &["R"]).unwrap()),
            ],
            ParticleFrame::ScreenAB => vec![
                (
                    "L".to_string(),
                    // |L> = (|A> - |B>)/sqrt(2)
                    Ket::new(layout.clone(), vec![re(INV_SQRT2), re(-INV_SQRT2)]).unwrap(),
                ),
                (
                    "R".to_string(),
                    Ket::new(layout, vec![re(INV_SQRT2), re(INV_SQRT2)]).unwrap(),
                ),
            ],
        };
        MeasurementBasis::new(PARTICLE, outcomes).expect("static which-path basis")
    }

    /// Pointer readout along the detector axes. `D_L` is the left pointer
    /// state itself; `D_R` is the axis orthogonal to it (the pointer states
    /// exactly, when their overlap is zero). `D_0` carries no weight after
    /// the detector has fired.
    pub fn detector_readout() -> Self {
        let layout = detector_layout();
        let outcomes = vec![
            ("D_L".to_string(), Ket::basis_state(layout.clone(), &["D_L"]).unwrap()),
            ("D_R".to_string(), Ket::basis_state(layout.clone(), &["D_R"]).unwrap()),
            ("D_0".to_string(), Ket::basis_state(layout, &["D_0"]).unwrap()),
        ];
        MeasurementBasis::new(DETECTOR, outcomes).expect("static detector readout")
    }

    /// Did the bomb explode: `{BE -> Exploded, B0 -> NoExplosion}`.
    pub fn bomb_readout() -> Self {
        let layout = crate::states::bomb_layout();
        let outcomes = vec![
            (
                "Exploded".to_string(),
                Ket::basis_state(layout.clone(), &["BE"]).unwrap(),
            ),
            (
                "NoExplosion".to_string(),
                Ket::basis_state(layout, &["B0"]).unwrap(),
            ),
        ];
        MeasurementBasis::new(BOMB, outcomes).expect("static bomb readout")
    }

    /// Idler measurement in either family of [`idler_states`].
    pub fn idler(basis: IdlerBasis) -> Self {
        MeasurementBasis::new(IDLER, idler_states(basis)).expect("static idler basis")
    }
}

fn subsystem_geometry(psi: &Ket, basis: &MeasurementBasis) -> Result<(usize, usize, usize)> {
    let axis = psi.layout().axis_of(&basis.subsystem)?;
    let sub_dim = psi.layout().subsystems()[axis].dim();
    if sub_dim != basis.outcomes.len() {
        return Err(Error::InvalidBasis(format!(
            "basis over {} has {} outcomes for subsystem dimension {sub_dim}",
            basis.subsystem,
            basis.outcomes.len()
        )));
    }
    let stride = psi.layout().strides()[axis];
    Ok((axis, sub_dim, stride))
}

/// Enumerates flat base offsets with the measured subsystem index fixed to 0;
/// entry `base + k * stride` then walks that subsystem.
fn rest_offsets(dim: usize, sub_dim: usize, stride: usize) -> impl Iterator<Item = usize> {
    (0..dim).filter(move |flat| (flat / stride) % sub_dim == 0)
}

/// Projected amplitudes `<v (x) rest | psi>` for one outcome vector.
fn projected_component(
    psi: &Ket,
    vector: &[Complex64],
    sub_dim: usize,
    stride: usize,
) -> Vec<(usize, Complex64)> {
    rest_offsets(psi.dim(), sub_dim, stride)
        .map(|base| {
            let mut s = Complex64::ZERO;
            for (k, v) in vector.iter().enumerate() {
                s += v.conj() * psi.amp(base + k * stride);
            }
            (base, s)
        })
        .collect()
}

/// Born probabilities of `psi` in `basis`, in declared outcome order. Each
/// probability is the squared norm of the projected component, normalized by
/// the state's squared norm so the family sums to one exactly.
pub fn born_probabilities(psi: &Ket, basis: &MeasurementBasis) -> Result<Vec<(String, f64)>> {
    let (_, sub_dim, stride) = subsystem_geometry(psi, basis)?;
    let mut raw = Vec::with_capacity(basis.outcomes.len());
    let mut total = 0.0;
    for (label, vector) in &basis.outcomes {
        let w: f64 = projected_component(psi, vector, sub_dim, stride)
            .iter()
            .map(|(_, a)| a.norm_sqr())
            .sum();
        total += w;
        raw.push((label.clone(), w));
    }
    if total <= 0.0 {
        return Err(Error::NotNormalized(0.0));
    }
    Ok(raw.into_iter().map(|(l, w)| (l, w / total)).collect())
}

/// Projects `psi` onto the named outcome and renormalizes. Fails when the
/// outcome probability is below [`MIN_OUTCOME_PROB`].
pub fn project_collapse(psi: &Ket, basis: &MeasurementBasis, outcome_label: &str) -> Result<Ket> {
    let (_, sub_dim, stride) = subsystem_geometry(psi, basis)?;
    let vector = basis
        .outcomes
        .iter()
        .find(|(l, _)| l == outcome_label)
        .map(|(_, v)| v)
        .ok_or_else(|| {
            Error::InvalidParameter(format!(
                "no outcome {outcome_label} in basis over {}",
                basis.subsystem
            ))
        })?;
    let comps = projected_component(psi, vector, sub_dim, stride);
    let weight: f64 = comps.iter().map(|(_, a)| a.norm_sqr()).sum();
    let prob = weight / psi.norm_sq();
    if prob <= MIN_OUTCOME_PROB {
        return Err(Error::ZeroProbability {
            label: outcome_label.to_string(),
            prob,
        });
    }
    let scale = 1.0 / weight.sqrt();
    let mut amps = vec![Complex64::ZERO; psi.dim()];
    for (base, a) in comps {
        for (k, v) in vector.iter().enumerate() {
            amps[base + k * stride] = v * a * scale;
        }
    }
    Ket::new(psi.layout().clone(), amps)
}

/// Inverse-CDF selection over the declared outcome order with acceptance test
/// `u < cumulative`. A zero-probability outcome can never be selected; if `u`
/// lands beyond the final cumulative (possible only through rounding dust),
/// the last positive-probability outcome is chosen.
pub(crate) fn select_outcome(probs: &[(String, f64)], u: f64) -> usize {
    let mut cum = 0.0;
    for (i, (_, p)) in probs.iter().enumerate() {
        cum += p;
        if u < cum {
            return i;
        }
    }
    probs
        .iter()
        .rposition(|(_, p)| *p > 0.0)
        .unwrap_or(probs.len() - 1)
}

/// Samples one outcome with exact Born weights using a single uniform draw,
/// then collapses. Deterministic given the stream state.
pub fn sample(
    psi: &Ket,
    basis: &MeasurementBasis,
    rng: &mut TrialRng,
) -> Result<(String, Ket)> {
    let probs = born_probabilities(psi, basis)?;
    let idx = select_outcome(&probs, rng.next_f64());
    let label = probs[idx].0.clone();
    let collapsed = project_collapse(psi, basis, &label)?;
    Ok((label, collapsed))
}

/// When, if ever, the wave function is replaced by a single branch.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CollapsePolicy {
    /// Pure Schroedinger evolution; the Born rule enters only at the screen.
    Unitary,
    /// The detector projects the particle onto `{L, R}` as soon as it fires.
    CollapseAtDetector,
    /// Environment monitoring triggers a single `{L, R}` collapse once the
    /// elapsed time reaches `tau_star`.
    Threshold { tau_star: f64 },
}

impl CollapsePolicy {
    pub fn validate(&self) -> Result<()> {
        if let CollapsePolicy::Threshold { tau_star } = self {
            if !(tau_star.is_finite() && *tau_star >= 0.0) {
                return Err(Error::InvalidParameter(format!(
                    "tau_star must be finite and >= 0, got {tau_star}"
                )));
            }
        }
        Ok(())
    }
}

/// A which-path collapse that a policy performed during a trial.
#[derive(Debug, Clone, PartialEq)]
pub struct CollapseEvent {
    /// `L` or `R`.
    pub path: String,
    pub time: f64,
}

/// Per-trial policy state: a threshold collapse fires at most once.
#[derive(Debug, Clone)]
pub struct PolicyRun {
    policy: CollapsePolicy,
    threshold_fired: bool,
}

impl PolicyRun {
    pub fn new(policy: CollapsePolicy) -> Self {
        PolicyRun {
            policy,
            threshold_fired: false,
        }
    }

    pub fn policy(&self) -> CollapsePolicy {
        self.policy
    }

    pub fn threshold_fired(&self) -> bool {
        self.threshold_fired
    }

    fn collapse_which_path(
        psi: &Ket,
        now: f64,
        rng: &mut TrialRng,
    ) -> Result<(Ket, CollapseEvent)> {
        let frame = crate::states::particle_frame(psi)?;
        let basis = MeasurementBasis::which_path(frame);
        let (path, collapsed) = sample(psi, &basis, rng)?;
        Ok((collapsed, CollapseEvent { path, time: now }))
    }

    /// Hook invoked immediately after a detector-type channel.
    /// `CollapseAtDetector` fires here; the other policies are the identity.
    pub fn after_detector(
        &mut self,
        psi: &Ket,
        now: f64,
        rng: &mut TrialRng,
    ) -> Result<(Ket, Option<CollapseEvent>)> {
        match self.policy {
            CollapsePolicy::CollapseAtDetector => {
                let (collapsed, event) = Self::collapse_which_path(psi, now, rng)?;
                Ok((collapsed, Some(event)))
            }
            _ => Ok((psi.clone(), None)),
        }
    }

    /// Hook invoked when the trial clock reaches `now`. `Threshold` fires
    /// here once `now >= tau_star`, at most once per trial; the other
    /// policies are the identity.
    pub fn at_time(
        &mut self,
        psi: &Ket,
        now: f64,
        rng: &mut TrialRng,
    ) -> Result<(Ket, Option<CollapseEvent>)> {
        match self.policy {
            CollapsePolicy::Threshold { tau_star } if !self.threshold_fired && now >= tau_star => {
                self.threshold_fired = true;
                let (collapsed, event) = Self::collapse_which_path(psi, tau_star, rng)?;
                Ok((collapsed, Some(event)))
            }
            _ => Ok((psi.clone(), None)),
        }
    }
}

/// One measurement outcome within a trial.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialEvent {
    pub event: String,
    pub label: String,
    pub time: f64,
}

/// Ordered log of a trial's events; times are non-decreasing.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct OutcomeRecord {
    events: Vec<TrialEvent>,
}

impl OutcomeRecord {
    pub fn new() -> Self {
        OutcomeRecord::default()
    }

    pub fn push(&mut self, event: impl Into<String>, label: impl Into<String>, time: f64) {
        if let Some(last) = self.events.last() {
            debug_assert!(time >= last.time, "event times must be non-decreasing");
        }
        self.events.push(TrialEvent {
            event: event.into(),
            label: label.into(),
            time,
        });
    }

    pub fn events(&self) -> &[TrialEvent] {
        &self.events
    }

    pub fn label_of(&self, event: &str) -> Option<&str> {
        self.events
            .iter()
            .find(|e| e.event == event)
            .map(|e| e.label.as_str())
    }
}
