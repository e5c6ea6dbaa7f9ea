//! Named states and bases of the two-outcome interference experiments.
//!
//! The particle lives in a 2-dim space viewed in one of two frames: the path
//! frame `{L, R}` or the screen frame `{A, B}`, related by
//! `|L> = (|A> - |B>)/sqrt(2)` and `|R> = (|A> + |B>)/sqrt(2)`. Macroscopic
//! subsystems (detector pointer, bomb, environment) are modeled in minimal
//! effective spaces carrying only the inner products the observables depend
//! on; the many-atom product structure enters solely through
//! [`OverlapEstimate`], which works in the log domain.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::ket::Ket;
use crate::layout::{Subsystem, SubsystemLayout};

pub const PARTICLE: &str = "particle";
pub const DETECTOR: &str = "detector";
pub const BOMB: &str = "bomb";
pub const IDLER: &str = "idler";
pub const ENVIRONMENT: &str = "env";

const SQRT2: f64 = std::f64::consts::SQRT_2;
const INV_SQRT2: f64 = std::f64::consts::FRAC_1_SQRT_2;

fn re(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

/// The two bases the particle is expressed in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParticleFrame {
    /// Path basis `{L, R}` (which slit).
    PathLR,
    /// Screen basis `{A, B}` (which endpoint).
    ScreenAB,
}

impl ParticleFrame {
    pub fn labels(self) -> [&'static str; 2] {
        match self {
            ParticleFrame::PathLR => ["L", "R"],
            ParticleFrame::ScreenAB => ["A", "B"],
        }
    }

    pub fn layout(self) -> SubsystemLayout {
        SubsystemLayout::single(PARTICLE, &self.labels())
            .expect("static particle layout")
    }
}

/// Frame the particle subsystem of `psi` is currently expressed in.
pub fn particle_frame(psi: &Ket) -> Result<ParticleFrame> {
    let sub = psi.layout().subsystem(PARTICLE)?;
    let labels: Vec<&str> = sub.labels().iter().map(String::as_str).collect();
    if labels == ParticleFrame::PathLR.labels() {
        Ok(ParticleFrame::PathLR)
    } else if labels == ParticleFrame::ScreenAB.labels() {
        Ok(ParticleFrame::ScreenAB)
    } else {
        Err(Error::InvalidParameter(format!(
            "particle subsystem has unrecognized labels {labels:?}"
        )))
    }
}

/// Which slits are open.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SlitChoice {
    OnlyLeft,
    OnlyRight,
    BothSlits,
}

/// Particle state just past the barrier, in the path frame.
/// `BothSlits` is the coherent sum `(|L> + |R>)/sqrt(2)`, which equals `|A>`
/// in the screen frame.
pub fn particle_state(which: SlitChoice) -> Ket {
    let layout = ParticleFrame::PathLR.layout();
    let amps = match which {
        SlitChoice::OnlyLeft => vec![re(1.0), re(0.0)],
        SlitChoice::OnlyRight => vec![re(0.0), re(1.0)],
        SlitChoice::BothSlits => vec![re(INV_SQRT2), re(INV_SQRT2)],
    };
    Ket::new(layout, amps).expect("static particle state")
}

/// Re-expresses the particle subsystem of `psi` in the target frame. Changing
/// frame twice returns the input within 1e-15. Uses `(x +/- y)/sqrt(2)`
/// directly so that cancellations are exact: destructive-interference
/// amplitudes come out as floating-point zero, not dust.
pub fn change_frame(psi: &Ket, to: ParticleFrame) -> Result<Ket> {
    let from = particle_frame(psi)?;
    if from == to {
        return Ok(psi.clone());
    }
    let axis = psi.layout().axis_of(PARTICLE)?;
    let stride = psi.layout().strides()[axis];
    let mut amps = psi.amps().to_vec();
    let dim = psi.dim();
    let mut base = 0;
    while base < dim {
        // Skip blocks where the particle index is already 1.
        if (base / stride) % 2 == 1 {
            base += stride;
            continue;
        }
        for off in 0..stride {
            let i0 = base + off;
            let i1 = i0 + stride;
            let (x, y) = (amps[i0], amps[i1]);
            let (n0, n1) = match to {
                // a|L> + b|R>  ->  ((a+b)|A> + (b-a)|B>)/sqrt(2)
                ParticleFrame::ScreenAB => ((x + y) / SQRT2, (y - x) / SQRT2),
                // a|A> + b|B>  ->  ((a-b)|L> + (a+b)|R>)/sqrt(2)
                ParticleFrame::PathLR => ((x - y) / SQRT2, (x + y) / SQRT2),
            };
            amps[i0] = n0;
            amps[i1] = n1;
        }
        base += 2 * stride;
    }
    let subsystems: Vec<Subsystem> = psi
        .layout()
        .subsystems()
        .iter()
        .map(|s| {
            if s.name() == PARTICLE {
                Subsystem::new(PARTICLE, &to.labels()).expect("static labels")
            } else {
                s.clone()
            }
        })
        .collect();
    Ket::new(SubsystemLayout::new(subsystems)?, amps)
}

/// Effective overlap of the two macroscopic pointer configurations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointerModel {
    epsilon: f64,
}

impl PointerModel {
    /// `epsilon` is `<D_L|D_R>`, in `[0, 1)`.
    pub fn new(epsilon: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&epsilon) {
            return Err(Error::InvalidParameter(format!(
                "pointer overlap epsilon must be in [0, 1), got {epsilon}"
            )));
        }
        Ok(PointerModel { epsilon })
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }
}

impl Default for PointerModel {
    /// The de facto orthogonal pointer (`epsilon = 0`).
    fn default() -> Self {
        PointerModel { epsilon: 0.0 }
    }
}

/// 3-dim pointer space. The axes double as the orthonormal readout basis:
/// axis `D_L` is the left pointer state itself, axis `D_R` is the component
/// of the right pointer state orthogonal to `D_L` (they coincide with the
/// pointer states exactly when `epsilon = 0`).
pub fn detector_layout() -> SubsystemLayout {
    SubsystemLayout::single(DETECTOR, &["D_0", "D_L", "D_R"])
        .expect("static detector layout")
}

/// Ready state and the two outcome pointer states, with
/// `<D_L|D_R> = epsilon` exactly and `<D_0|D_L> = <D_0|D_R> = 0`.
pub fn pointer_states(model: &PointerModel) -> (Ket, Ket, Ket) {
    let layout = detector_layout();
    let eps = model.epsilon();
    let d0 = Ket::new(layout.clone(), vec![re(1.0), re(0.0), re(0.0)]).unwrap();
    let dl = Ket::new(layout.clone(), vec![re(0.0), re(1.0), re(0.0)]).unwrap();
    let dr = Ket::new(
        layout,
        vec![re(0.0), re(eps), re((1.0 - eps * eps).sqrt())],
    )
    .unwrap();
    (d0, dl, dr)
}

/// Log-domain estimate of the N-atom pointer overlap `lambda^N`. Never
/// exponentiated, so it cannot underflow.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OverlapEstimate {
    pub lambda_atom: f64,
    pub n_atoms: f64,
    pub log10_overlap: f64,
}

pub fn overlap_estimate(lambda_atom: f64, n_atoms: f64) -> Result<OverlapEstimate> {
    if !(lambda_atom > 0.0 && lambda_atom <= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "per-atom overlap must be in (0, 1], got {lambda_atom}"
        )));
    }
    if !(n_atoms >= 1.0 && n_atoms.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "atom count must be >= 1, got {n_atoms}"
        )));
    }
    Ok(OverlapEstimate {
        lambda_atom,
        n_atoms,
        log10_overlap: n_atoms * lambda_atom.log10(),
    })
}

/// Measurement bases available for the idler particle.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IdlerBasis {
    /// `{I_L, I_R}`: retains which-path information.
    WhichPath,
    /// `{(I_R + I_L)/sqrt(2), (I_R - I_L)/sqrt(2)}`: erases it.
    PlusMinus,
}

pub fn idler_layout() -> SubsystemLayout {
    SubsystemLayout::single(IDLER, &["I_L", "I_R"]).expect("static idler layout")
}

/// The labeled orthonormal family for an idler basis, as kets over the
/// `{I_L, I_R}` axes.
pub fn idler_states(basis: IdlerBasis) -> Vec<(String, Ket)> {
    let layout = idler_layout();
    match basis {
        IdlerBasis::WhichPath => vec![
            (
                "I_L".to_string(),
                Ket::new(layout.clone(), vec![re(1.0), re(0.0)]).unwrap(),
            ),
            (
                "I_R".to_string(),
                Ket::new(layout, vec![re(0.0), re(1.0)]).unwrap(),
            ),
        ],
        IdlerBasis::PlusMinus => vec![
            (
                "I+".to_string(),
                Ket::new(layout.clone(), vec![re(INV_SQRT2), re(INV_SQRT2)]).unwrap(),
            ),
            (
                "I-".to_string(),
                Ket::new(layout, vec![re(-INV_SQRT2), re(INV_SQRT2)]).unwrap(),
            ),
        ],
    }
}

/// A real bomb couples to the left path only; a dud does not interact at all.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BombKind {
    Real,
    Dud,
}

pub fn bomb_layout() -> SubsystemLayout {
    SubsystemLayout::single(BOMB, &["B0", "BE"]).expect("static bomb layout")
}

/// The unexploded ready state `|B0>` (the dud's ready state is represented on
/// the same axes; only the channel differs).
pub fn bomb_ready() -> Ket {
    Ket::basis_state(bomb_layout(), &["B0"]).unwrap()
}
