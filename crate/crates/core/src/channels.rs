//! Entangling and decohering channels.
//!
//! Every channel here is an isometry on its declared input sector: it takes
//! a state with the ancilla in its ready configuration and produces the
//! entangled state the interaction generates. Time-dependent monitoring is
//! available in two forms: a phenomenological overlap law (exponential decay
//! or rotation), and exact evolution of a finite-dimensional environment
//! under block Hamiltonians that do not mix the two paths.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::ket::Ket;
use crate::layout::SubsystemLayout;
use crate::operator::{evolve_hermitian, Operator};
use crate::rng::TrialRng;
use crate::states::{
    bomb_layout, detector_layout, idler_layout, pointer_states, BombKind, ParticleFrame,
    PointerModel, ENVIRONMENT,
};
use crate::{TOL_STORAGE, TOL_UNITARY};

const INV_SQRT2: f64 = std::f64::consts::FRAC_1_SQRT_2;

fn re(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

/// Weight of `psi` outside the `ready` index of the named subsystem.
fn stray_weight(psi: &Ket, subsystem: &str, ready_index: usize) -> Result<f64> {
    let axis = psi.layout().axis_of(subsystem)?;
    let stride = psi.layout().strides()[axis];
    let dim_sub = psi.layout().subsystems()[axis].dim();
    let mut stray = 0.0;
    for flat in 0..psi.dim() {
        if (flat / stride) % dim_sub != ready_index {
            stray += psi.amp(flat).norm_sqr();
        }
    }
    Ok(stray)
}

fn require_ready(psi: &Ket, subsystem: &str, ready_index: usize) -> Result<()> {
    let stray = stray_weight(psi, subsystem, ready_index)?;
    if stray > TOL_STORAGE {
        return Err(Error::NotReadySector {
            subsystem: subsystem.to_string(),
            weight: stray,
        });
    }
    Ok(())
}

fn require_path_frame(psi: &Ket) -> Result<()> {
    match crate::states::particle_frame(psi)? {
        ParticleFrame::PathLR => Ok(()),
        ParticleFrame::ScreenAB => Err(Error::LayoutMismatch(
            "channel requires the particle in the path frame {L, R}".into(),
        )),
    }
}

/// Couples the which-path detector: `alpha|L>|D_0> + beta|R>|D_0>` becomes
/// `alpha|L>|D_L> + beta|R>|D_R>` with pointer overlap taken from `model`.
pub fn entangle_which_path(psi: &Ket, model: &PointerModel) -> Result<Ket> {
    require_path_frame(psi)?;
    let expected = ParticleFrame::PathLR.layout().concat(&detector_layout())?;
    if *psi.layout() != expected {
        return Err(Error::LayoutMismatch(
            "expected layout particle (L, R) then detector (D_0, D_L, D_R)".into(),
        ));
    }
    require_ready(psi, crate::states::DETECTOR, 0)?;
    let (_, dl, dr) = pointer_states(model);
    let alpha = psi.amp(expected.flat_of_labels(&["L", "D_0"])?);
    let beta = psi.amp(expected.flat_of_labels(&["R", "D_0"])?);
    let mut amps = vec![Complex64::ZERO; 6];
    for k in 0..3 {
        amps[k] = alpha * dl.amp(k);
        amps[3 + k] = beta * dr.amp(k);
    }
    Ket::new(expected, amps)
}

/// Couples the bomb: a real bomb is triggered by the left path
/// (`|L>|B0> -> |L>|BE>`, `|R>|B0> -> |R>|B0>`); a dud does not interact.
pub fn bomb_channel(psi: &Ket, kind: BombKind) -> Result<Ket> {
    require_path_frame(psi)?;
    let expected = ParticleFrame::PathLR.layout().concat(&bomb_layout())?;
    if *psi.layout() != expected {
        return Err(Error::LayoutMismatch(
            "expected layout particle (L, R) then bomb (B0, BE)".into(),
        ));
    }
    require_ready(psi, crate::states::BOMB, 0)?;
    if kind == BombKind::Dud {
        return Ok(psi.clone());
    }
    let mut amps = psi.amps().to_vec();
    let l_b0 = expected.flat_of_labels(&["L", "B0"])?;
    let l_be = expected.flat_of_labels(&["L", "BE"])?;
    amps[l_be] = amps[l_b0];
    amps[l_b0] = Complex64::ZERO;
    Ket::new(expected, amps)
}

/// Emits an idler correlated with the path:
/// `alpha|L> + beta|R>  ->  alpha|L>|I_L> + beta|R>|I_R>`.
pub fn emit_idler(particle: &Ket) -> Result<Ket> {
    require_path_frame(particle)?;
    if *particle.layout() != ParticleFrame::PathLR.layout() {
        return Err(Error::LayoutMismatch(
            "expected a particle-only state in the path frame".into(),
        ));
    }
    let layout = ParticleFrame::PathLR.layout().concat(&idler_layout())?;
    let mut amps = vec![Complex64::ZERO; 4];
    amps[layout.flat_of_labels(&["L", "I_L"])?] = particle.amp(0);
    amps[layout.flat_of_labels(&["R", "I_R"])?] = particle.amp(1);
    Ket::new(layout, amps)
}

/// Exponential decay of the environment-branch overlap:
/// `c(t) = <E_L(t)|E_R(t)> = exp(-lambda t)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecoherenceLaw {
    lambda_rate: f64,
}

impl DecoherenceLaw {
    pub fn new(lambda_rate: f64) -> Result<Self> {
        if !(lambda_rate >= 0.0 && lambda_rate.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "decoherence rate must be >= 0, got {lambda_rate}"
            )));
        }
        Ok(DecoherenceLaw { lambda_rate })
    }

    pub fn lambda_rate(&self) -> f64 {
        self.lambda_rate
    }

    pub fn overlap(&self, t: f64) -> f64 {
        (-self.lambda_rate * t).exp()
    }
}

fn env2_layout() -> SubsystemLayout {
    SubsystemLayout::single(ENVIRONMENT, &["e0", "e1"]).expect("static env layout")
}

/// State of particle plus monitored environment at time `t`, with both slits
/// open. The environment branches live in a 2-dim effective space:
/// `E_L(t) = (1, 0)` and `E_R(t) = (c, sqrt(1 - c^2))`, which reproduces the
/// declared overlap and collapses the orthogonal-complement sum to a single
/// direction of weight `sqrt(1 - c^2)`.
pub fn monitor_environment(t: f64, law: &DecoherenceLaw) -> Result<Ket> {
    if !(t >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "monitoring time must be >= 0, got {t}"
        )));
    }
    let c = law.overlap(t);
    let layout = ParticleFrame::PathLR.layout().concat(&env2_layout())?;
    let amps = vec![
        re(INV_SQRT2),                              // (L, e0)
        re(0.0),                                    // (L, e1)
        re(INV_SQRT2 * c),                          // (R, e0)
        re(INV_SQRT2 * (1.0 - c * c).sqrt()),       // (R, e1)
    ];
    Ket::new(layout, amps)
}

/// Rotating idler overlap law: `<E_L(t)|E_R(t)> = cos(omega t)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RotatingIdlerLaw {
    omega: f64,
}

impl RotatingIdlerLaw {
    pub fn new(omega: f64) -> Result<Self> {
        if !(omega >= 0.0 && omega.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "angular frequency must be >= 0, got {omega}"
            )));
        }
        Ok(RotatingIdlerLaw { omega })
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn overlap(&self, t: f64) -> f64 {
        (self.omega * t).cos()
    }
}

/// State of particle plus rotating idler at time `t`, with both slits open:
/// the left branch stays on `|I1>` while the right branch rotates in the
/// `{I1, I2}` plane.
pub fn rotate_idler(t: f64, law: &RotatingIdlerLaw) -> Result<Ket> {
    if !(t >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "time must be >= 0, got {t}"
        )));
    }
    let (c, s) = ((law.omega * t).cos(), (law.omega * t).sin());
    let layout = ParticleFrame::PathLR
        .layout()
        .concat(&SubsystemLayout::single(crate::states::IDLER, &["I1", "I2"])?)?;
    let amps = vec![
        re(INV_SQRT2),     // (L, I1)
        re(0.0),           // (L, I2)
        re(INV_SQRT2 * c), // (R, I1)
        re(INV_SQRT2 * s), // (R, I2)
    ];
    Ket::new(layout, amps)
}

/// Environment Hamiltonian blocks for the two paths. The full Hamiltonian is
/// block diagonal (it never mixes `|L>` and `|R>`), so path-conditioned
/// evolution is exact: `E_L(t) = exp(-i H_L t) E0` and likewise for the
/// right block.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockHamiltonian {
    dim_env: usize,
    h_left: Vec<Complex64>,
    h_right: Vec<Complex64>,
    e0: Vec<Complex64>,
}

fn env_layout(dim: usize) -> SubsystemLayout {
    let labels: Vec<String> = (0..dim).map(|i| format!("e{i}")).collect();
    let refs: Vec<&str> = labels.iter().map(String::as_str).collect();
    SubsystemLayout::single(ENVIRONMENT, &refs).expect("environment layout")
}

impl BlockHamiltonian {
    pub fn new(
        dim_env: usize,
        h_left: Vec<Complex64>,
        h_right: Vec<Complex64>,
        e0: Vec<Complex64>,
    ) -> Result<Self> {
        if dim_env == 0 {
            return Err(Error::InvalidParameter(
                "environment dimension must be >= 1".into(),
            ));
        }
        let layout = env_layout(dim_env);
        for block in [&h_left, &h_right] {
            let op = Operator::new(layout.clone(), block.clone())?;
            let dev = op.hermitian_deviation();
            if dev > TOL_UNITARY {
                return Err(Error::NotHermitian {
                    dev,
                    tol: TOL_UNITARY,
                });
            }
        }
        let e0_ket = Ket::normalized(layout, e0.clone())?;
        drop(e0_ket);
        Ok(BlockHamiltonian {
            dim_env,
            h_left,
            h_right,
            e0,
        })
    }

    /// Random Hermitian blocks with entries of order one, acting on the
    /// ground state `e0 = (1, 0, ..., 0)`. Pure function of `(dim, seed)`.
    pub fn random(dim_env: usize, seed: u64) -> Result<Self> {
        let mut rng = TrialRng::new(seed);
        let mut block = || {
            let mut m = vec![Complex64::ZERO; dim_env * dim_env];
            for i in 0..dim_env {
                m[i * dim_env + i] = re(rng.next_symmetric());
                for j in (i + 1)..dim_env {
                    let z = Complex64::new(rng.next_symmetric(), rng.next_symmetric());
                    m[i * dim_env + j] = z;
                    m[j * dim_env + i] = z.conj();
                }
            }
            m
        };
        let h_left = block();
        let h_right = block();
        let mut e0 = vec![Complex64::ZERO; dim_env];
        e0[0] = Complex64::ONE;
        BlockHamiltonian::new(dim_env, h_left, h_right, e0)
    }

    pub fn dim_env(&self) -> usize {
        self.dim_env
    }

    pub fn initial_state(&self) -> Ket {
        Ket::new(env_layout(self.dim_env), self.e0.clone()).expect("validated at construction")
    }

    fn block_operator(&self, matrix: &[Complex64]) -> Operator {
        Operator::new(env_layout(self.dim_env), matrix.to_vec())
            .expect("validated at construction")
    }

    /// `E_L(t) = exp(-i H_L t) |E0>`.
    pub fn left_branch(&self, t: f64) -> Result<Ket> {
        evolve_hermitian(&self.block_operator(&self.h_left), t, &self.initial_state())
    }

    /// `E_R(t) = exp(-i H_R t) |E0>`.
    pub fn right_branch(&self, t: f64) -> Result<Ket> {
        evolve_hermitian(&self.block_operator(&self.h_right), t, &self.initial_state())
    }

    /// Difference block `H_R - H_L`.
    fn difference_block(&self) -> Vec<Complex64> {
        self.h_right
            .iter()
            .zip(&self.h_left)
            .map(|(r, l)| r - l)
            .collect()
    }
}

/// Exact overlap `c(t) = <E_L(t)|E_R(t)> = <E0|exp(+i H_L t) exp(-i H_R t)|E0>`,
/// computed by evolving each branch separately.
pub fn finite_env_overlap(bh: &BlockHamiltonian, t: f64) -> Result<Complex64> {
    bh.left_branch(t)?.inner(&bh.right_branch(t)?)
}

/// The single-exponential expression `<E0|exp(-i (H_R - H_L) t)|E0>`, which
/// agrees with [`finite_env_overlap`] exactly when the blocks commute and in
/// general does not. Exposed for comparison.
pub fn finite_env_overlap_difference_form(bh: &BlockHamiltonian, t: f64) -> Result<Complex64> {
    let diff = Operator::new(env_layout(bh.dim_env), bh.difference_block())?;
    let e0 = bh.initial_state();
    let evolved = evolve_hermitian(&diff, t, &e0)?;
    e0.inner(&evolved)
}

/// State of particle plus finite environment at time `t`, with both slits
/// open: `(|L>E_L(t) + |R>E_R(t))/sqrt(2)`.
pub fn finite_env_state(bh: &BlockHamiltonian, t: f64) -> Result<Ket> {
    if !(t >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "time must be >= 0, got {t}"
        )));
    }
    let left = bh.left_branch(t)?;
    let right = bh.right_branch(t)?;
    let d = bh.dim_env;
    let layout = ParticleFrame::PathLR.layout().concat(&env_layout(d))?;
    let mut amps = vec![Complex64::ZERO; 2 * d];
    for k in 0..d {
        amps[k] = left.amp(k) * INV_SQRT2;
        amps[d + k] = right.amp(k) * INV_SQRT2;
    }
    Ket::new(layout, amps)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::DensityOperator;
    use crate::states::{particle_state, SlitChoice, PARTICLE};

    fn ready_detector_state(which: SlitChoice) -> Ket {
        let d0 = Ket::basis_state(detector_layout(), &["D_0"]).unwrap();
        particle_state(which).tensor(&d0).unwrap()
    }

    #[test]
    fn entangle_produces_path_pointer_pairs() {
        let model = PointerModel::default();
        let out =
            entangle_which_path(&ready_detector_state(SlitChoice::BothSlits), &model).unwrap();
        let layout = out.layout().clone();
        let ldl = layout.flat_of_labels(&["L", "D_L"]).unwrap();
        let rdr = layout.flat_of_labels(&["R", "D_R"]).unwrap();
        assert!((out.amp(ldl).re - INV_SQRT2).abs() < 1e-15);
        assert!((out.amp(rdr).re - INV_SQRT2).abs() < 1e-15);
        assert!((out.norm() - 1.0).abs() < 1e-12);

        let single = entangle_which_path(&ready_detector_state(SlitChoice::OnlyLeft), &model)
            .unwrap();
        assert!((single.amp(ldl).re - 1.0).abs() < 1e-15);
    }

    #[test]
    fn entangle_then_trace_kills_interference() {
        let model = PointerModel::default();
        let out =
            entangle_which_path(&ready_detector_state(SlitChoice::BothSlits), &model).unwrap();
        let screen = crate::states::change_frame(&out, ParticleFrame::ScreenAB).unwrap();
        let red = DensityOperator::from_pure(&screen)
            .partial_trace(&[PARTICLE])
            .unwrap();
        assert!((red.entry(0, 0).re - 0.5).abs() < 1e-12);
        assert!((red.entry(1, 1).re - 0.5).abs() < 1e-12);
        assert!(red.entry(0, 1).norm() < 1e-12);
    }

    #[test]
    fn entangle_rejects_non_ready_input() {
        let model = PointerModel::default();
        let dl = Ket::basis_state(detector_layout(), &["D_L"]).unwrap();
        let bad = particle_state(SlitChoice::BothSlits).tensor(&dl).unwrap();
        assert!(matches!(
            entangle_which_path(&bad, &model),
            Err(Error::NotReadySector { .. })
        ));
    }

    #[test]
    fn entangle_norm_preserved_for_nonzero_overlap() {
        let model = PointerModel::new(0.73).unwrap();
        let out =
            entangle_which_path(&ready_detector_state(SlitChoice::BothSlits), &model).unwrap();
        assert!((out.norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn real_bomb_marks_left_branch_only() {
        let joint = particle_state(SlitChoice::BothSlits)
            .tensor(&crate::states::bomb_ready())
            .unwrap();
        let out = bomb_channel(&joint, BombKind::Real).unwrap();
        let layout = out.layout().clone();
        let l_be = layout.flat_of_labels(&["L", "BE"]).unwrap();
        let r_b0 = layout.flat_of_labels(&["R", "B0"]).unwrap();
        assert!((out.amp(l_be).re - INV_SQRT2).abs() < 1e-15);
        assert!((out.amp(r_b0).re - INV_SQRT2).abs() < 1e-15);
        // Screen frame view: (1/2)[ |A>(B0 + BE) + |B>(B0 - BE) ].
        let screen = crate::states::change_frame(&out, ParticleFrame::ScreenAB).unwrap();
        for labels in [["A", "B0"], ["A", "BE"], ["B", "B0"]] {
            let i = screen.layout().flat_of_labels(&labels).unwrap();
            assert!((screen.amp(i).re - 0.5).abs() < 1e-15, "{labels:?}");
        }
        let b_be = screen.layout().flat_of_labels(&["B", "BE"]).unwrap();
        assert!((screen.amp(b_be).re + 0.5).abs() < 1e-15);
    }

    #[test]
    fn right_path_never_triggers() {
        let joint = particle_state(SlitChoice::OnlyRight)
            .tensor(&crate::states::bomb_ready())
            .unwrap();
        let out = bomb_channel(&joint, BombKind::Real).unwrap();
        let r_b0 = out.layout().flat_of_labels(&["R", "B0"]).unwrap();
        assert_eq!(out.amp(r_b0), Complex64::ONE);
    }

    #[test]
    fn dud_bomb_is_transparent() {
        let joint = particle_state(SlitChoice::BothSlits)
            .tensor(&crate::states::bomb_ready())
            .unwrap();
        let out = bomb_channel(&joint, BombKind::Dud).unwrap();
        assert_eq!(out, joint);
        // In the screen frame everything sits exactly on (A, B0).
        let screen = crate::states::change_frame(&out, ParticleFrame::ScreenAB).unwrap();
        let a_b0 = screen.layout().flat_of_labels(&["A", "B0"]).unwrap();
        let b_b0 = screen.layout().flat_of_labels(&["B", "B0"]).unwrap();
        assert_eq!(screen.amp(a_b0), re(1.0));
        assert_eq!(screen.amp(b_b0), Complex64::ZERO);
    }

    #[test]
    fn bomb_channel_rejects_triggered_input() {
        let be = Ket::basis_state(bomb_layout(), &["BE"]).unwrap();
        let bad = particle_state(SlitChoice::BothSlits).tensor(&be).unwrap();
        assert!(bomb_channel(&bad, BombKind::Real).is_err());
    }

    #[test]
    fn emit_idler_correlates_paths() {
        let out = emit_idler(&particle_state(SlitChoice::BothSlits)).unwrap();
        let layout = out.layout().clone();
        let lil = layout.flat_of_labels(&["L", "I_L"]).unwrap();
        let rir = layout.flat_of_labels(&["R", "I_R"]).unwrap();
        assert!((out.amp(lil).re - INV_SQRT2).abs() < 1e-15);
        assert!((out.amp(rir).re - INV_SQRT2).abs() < 1e-15);
        // Screen frame: (1/2)[ |A>(I_R + I_L) + |B>(I_R - I_L) ].
        let screen = crate::states::change_frame(&out, ParticleFrame::ScreenAB).unwrap();
        for (labels, want) in [
            (["A", "I_L"], 0.5),
            (["A", "I_R"], 0.5),
            (["B", "I_L"], -0.5),
            (["B", "I_R"], 0.5),
        ] {
            let i = screen.layout().flat_of_labels(&labels).unwrap();
            assert!((screen.amp(i).re - want).abs() < 1e-15, "{labels:?}");
        }

        let single = emit_idler(&particle_state(SlitChoice::OnlyLeft)).unwrap();
        assert_eq!(single.amp(lil), re(1.0));
    }

    #[test]
    fn idler_destroys_screen_interference() {
        let out = emit_idler(&particle_state(SlitChoice::BothSlits)).unwrap();
        let screen = crate::states::change_frame(&out, ParticleFrame::ScreenAB).unwrap();
        let red = DensityOperator::from_pure(&screen)
            .partial_trace(&[PARTICLE])
            .unwrap();
        assert!((red.entry(0, 0).re - 0.5).abs() < 1e-12);
        assert!((red.entry(1, 1).re - 0.5).abs() < 1e-12);
    }

    #[test]
    fn monitoring_starts_in_the_shared_ready_state() {
        let law = DecoherenceLaw::new(1.0).unwrap();
        let psi = monitor_environment(0.0, &law).unwrap();
        let l_e0 = psi.layout().flat_of_labels(&["L", "e0"]).unwrap();
        let r_e0 = psi.layout().flat_of_labels(&["R", "e0"]).unwrap();
        assert_eq!(psi.amp(l_e0), re(INV_SQRT2));
        assert_eq!(psi.amp(r_e0), re(INV_SQRT2));
        // Everything on e0: exactly |A> tensor E0 in the screen frame.
        let screen = crate::states::change_frame(&psi, ParticleFrame::ScreenAB).unwrap();
        let a_e0 = screen.layout().flat_of_labels(&["A", "e0"]).unwrap();
        assert_eq!(screen.amp(a_e0), re(1.0));
    }

    #[test]
    fn monitoring_overlap_follows_the_law() {
        let law = DecoherenceLaw::new(1.0).unwrap();
        let t = std::f64::consts::LN_2;
        let psi = monitor_environment(t, &law).unwrap();
        // <E_L|E_R> read off the right-branch e0 amplitude times sqrt(2).
        let r_e0 = psi.layout().flat_of_labels(&["R", "e0"]).unwrap();
        let c = psi.amp(r_e0).re * SQRT2_CONST;
        assert!((c - 0.5).abs() < 1e-12);
        assert!((psi.norm() - 1.0).abs() < 1e-12);
    }

    const SQRT2_CONST: f64 = std::f64::consts::SQRT_2;

    #[test]
    fn monitoring_reduced_operator_off_diagonal_is_half_overlap() {
        let law = DecoherenceLaw::new(0.7).unwrap();
        for t in [0.0, 0.4, 2.0, 11.0] {
            let psi = monitor_environment(t, &law).unwrap();
            let red = DensityOperator::from_pure(&psi)
                .partial_trace(&[PARTICLE])
                .unwrap();
            let c = law.overlap(t);
            // Path frame: [[1/2, c/2], [c/2, 1/2]] for real c.
            assert!((red.entry(0, 0).re - 0.5).abs() < 1e-12);
            assert!((red.entry(1, 1).re - 0.5).abs() < 1e-12);
            assert!((red.entry(0, 1) - re(c / 2.0)).norm() < 1e-12, "t={t}");
            assert!((red.entry(1, 0) - re(c / 2.0)).norm() < 1e-12, "t={t}");
            // In the screen frame the off-diagonal vanishes for real c.
            let screen =
                crate::states::change_frame(&psi, ParticleFrame::ScreenAB).unwrap();
            let red_ab = DensityOperator::from_pure(&screen)
                .partial_trace(&[PARTICLE])
                .unwrap();
            assert!(red_ab.entry(0, 1).norm() < 1e-12);
            assert!((red_ab.entry(0, 0).re - (1.0 + c) / 2.0).abs() < 1e-12);
        }
    }

    #[test]
    fn monitoring_rejects_negative_time() {
        let law = DecoherenceLaw::new(1.0).unwrap();
        assert!(monitor_environment(-0.1, &law).is_err());
    }

    #[test]
    fn monitoring_screen_probabilities_over_rate_time_grid() {
        for lambda in [0.25, 1.0, 3.0] {
            let law = DecoherenceLaw::new(lambda).unwrap();
            for t in [0.0, 0.3, 1.0, 2.5, 8.0] {
                let psi = monitor_environment(t, &law).unwrap();
                let screen =
                    crate::states::change_frame(&psi, ParticleFrame::ScreenAB).unwrap();
                let c = law.overlap(t);
                let p_a: f64 = (0..2)
                    .map(|k| screen.amp(k).norm_sqr())
                    .sum::<f64>()
                    / screen.norm_sq();
                assert!((p_a - (1.0 + c) / 2.0).abs() < 1e-12, "lambda={lambda} t={t}");
            }
        }
    }

    #[test]
    fn rotating_idler_tracks_cosine_overlap() {
        let law = RotatingIdlerLaw::new(1.0).unwrap();
        for t in [0.0, 0.3, std::f64::consts::FRAC_PI_2, std::f64::consts::PI] {
            let psi = rotate_idler(t, &law).unwrap();
            assert!((psi.norm() - 1.0).abs() < 1e-12);
            let screen =
                crate::states::change_frame(&psi, ParticleFrame::ScreenAB).unwrap();
            // p[A] = (1 + cos(omega t))/2 via the two A-branch amplitudes.
            let a_i1 = screen.layout().flat_of_labels(&["A", "I1"]).unwrap();
            let a_i2 = screen.layout().flat_of_labels(&["A", "I2"]).unwrap();
            let p_a = screen.amp(a_i1).norm_sqr() + screen.amp(a_i2).norm_sqr();
            assert!((p_a - (1.0 + t.cos()) / 2.0).abs() < 1e-12, "t={t}");
        }
    }

    #[test]
    fn finite_env_overlap_is_one_at_time_zero() {
        let bh = BlockHamiltonian::random(4, 11).unwrap();
        let c = finite_env_overlap(&bh, 0.0).unwrap();
        assert!((c - Complex64::ONE).norm() < 1e-12);
    }

    #[test]
    fn scalar_environment_gives_pure_phase() {
        let bh = BlockHamiltonian::new(
            1,
            vec![re(0.0)],
            vec![re(0.9)],
            vec![Complex64::ONE],
        )
        .unwrap();
        for t in [0.0, 0.5, 2.0, 7.3] {
            let c = finite_env_overlap(&bh, t).unwrap();
            let expect = Complex64::new(0.0, -0.9 * t).exp();
            assert!((c - expect).norm() < 1e-12);
            assert!((c.norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn commuting_blocks_match_difference_form() {
        // Diagonal blocks commute: the product form must equal the
        // single-exponential difference form.
        let h_l = vec![re(0.3), re(0.0), re(0.0), re(-1.1)];
        let h_r = vec![re(0.9), re(0.0), re(0.0), re(0.4)];
        let bh = BlockHamiltonian::new(2, h_l, h_r, vec![re(INV_SQRT2), re(INV_SQRT2)])
            .unwrap();
        for t in [0.2, 1.0, 3.7] {
            let product = finite_env_overlap(&bh, t).unwrap();
            let difference = finite_env_overlap_difference_form(&bh, t).unwrap();
            assert!((product - difference).norm() < 1e-10, "t={t}");
        }
    }

    #[test]
    fn non_commuting_blocks_expose_the_forms_disagreement() {
        // H_L = sigma_x, H_R = sigma_z, E0 = (1, 0), t = 1. Closed forms:
        //   product:    cos(1) e^{-i}           = 0.2919265817264289 - 0.4546487134128409 i
        //   difference: cos(s2) - i sin(s2)/s2  = 0.1559436947653744 - 0.6984559986366083 i
        // with s2 = sqrt(2).
        let h_l = vec![re(0.0), re(1.0), re(1.0), re(0.0)];
        let h_r = vec![re(1.0), re(0.0), re(0.0), re(-1.0)];
        let bh =
            BlockHamiltonian::new(2, h_l, h_r, vec![Complex64::ONE, Complex64::ZERO]).unwrap();
        let product = finite_env_overlap(&bh, 1.0).unwrap();
        let difference = finite_env_overlap_difference_form(&bh, 1.0).unwrap();
        let product_expect = Complex64::new(0.2919265817264289, -0.4546487134128409);
        let difference_expect = Complex64::new(0.15594369476537437, -0.6984559986366083);
        assert!((product - product_expect).norm() < 1e-10);
        assert!((difference - difference_expect).norm() < 1e-10);
        assert!((product - difference).norm() > 1e-3);
    }

    #[test]
    fn finite_env_state_is_normalized_with_bounded_overlap() {
        let bh = BlockHamiltonian::random(3, 5).unwrap();
        for t in [0.0, 0.7, 4.0, 19.5] {
            let psi = finite_env_state(&bh, t).unwrap();
            assert!((psi.norm() - 1.0).abs() < 1e-10);
            let c = finite_env_overlap(&bh, t).unwrap();
            assert!(c.norm() <= 1.0 + 1e-12);
        }
    }

    #[test]
    fn random_block_hamiltonian_is_reproducible() {
        let a = BlockHamiltonian::random(4, 123).unwrap();
        let b = BlockHamiltonian::random(4, 123).unwrap();
        assert_eq!(a, b);
        let c = BlockHamiltonian::random(4, 124).unwrap();
        assert_ne!(a, c);
    }
}
