//! Oracle agreement across the whole scenario matrix: for every scenario
//! kind and at least three parameter settings, empirical frequencies over
//! 10^5 seeded trials match the exact distribution per cell at five sigma.

use fringe_core::{
    compare_to_oracle, exact_distribution, run_many, BombKind, CollapsePolicy, IdlerBasis,
    MeasureOrder, Scenario,
};

const TRIALS: u64 = 100_000;

fn check(s: Scenario, seed: u64) {
    let summary = run_many(&s, TRIALS, seed).unwrap();
    let exact = exact_distribution(&s).unwrap();
    let report = compare_to_oracle(&summary, &exact).unwrap();
    assert!(
        report.all_pass(),
        "{s:?} seed {seed}: max |z| = {}, cells: {:#?}",
        report.max_abs_z(),
        report.cells
    );
}

#[test]
fn single_slit_left_matches_oracle() {
    for seed in [1, 2, 3] {
        check(Scenario::SingleSlitLeft, seed);
    }
}

#[test]
fn single_slit_right_matches_oracle() {
    for seed in [4, 5, 6] {
        check(Scenario::SingleSlitRight, seed);
    }
}

#[test]
fn double_slit_matches_oracle() {
    for seed in [7, 8, 9] {
        check(Scenario::DoubleSlit, seed);
    }
}

#[test]
fn which_path_matches_oracle() {
    for (policy, epsilon, seed) in [
        (CollapsePolicy::Unitary, 0.0, 10),
        (CollapsePolicy::Unitary, 0.2, 11),
        (CollapsePolicy::CollapseAtDetector, 0.0, 12),
        (CollapsePolicy::CollapseAtDetector, 0.35, 13),
    ] {
        check(Scenario::WhichPathDetector { policy, epsilon }, seed);
    }
}

#[test]
fn bomb_matches_oracle() {
    check(Scenario::Bomb { kind: BombKind::Real }, 14);
    check(Scenario::Bomb { kind: BombKind::Real }, 15);
    check(Scenario::Bomb { kind: BombKind::Dud }, 16);
}

#[test]
fn bomb_protocol_matches_oracle() {
    for (kind, max_rounds, seed) in [
        (BombKind::Real, 50, 17),
        (BombKind::Real, 1, 18),
        (BombKind::Dud, 10, 19),
    ] {
        check(Scenario::BombSavingProtocol { kind, max_rounds }, seed);
    }
}

#[test]
fn idler_delayed_choice_matches_oracle() {
    for (basis, order, seed) in [
        (IdlerBasis::WhichPath, MeasureOrder::ScreenFirst, 20),
        (IdlerBasis::WhichPath, MeasureOrder::IdlerFirst, 21),
        (IdlerBasis::PlusMinus, MeasureOrder::ScreenFirst, 22),
        (IdlerBasis::PlusMinus, MeasureOrder::IdlerFirst, 23),
    ] {
        check(Scenario::IdlerDelayedChoice { basis, order }, seed);
    }
}

#[test]
fn decoherence_matches_oracle() {
    for (lambda_rate, policy, tau, seed) in [
        (1.0, CollapsePolicy::Unitary, 0.7, 24),
        (0.5, CollapsePolicy::Unitary, 2.0, 25),
        (1.0, CollapsePolicy::Threshold { tau_star: 2.0 }, 3.0, 26),
        (2.0, CollapsePolicy::Threshold { tau_star: 1.0 }, 0.5, 27),
    ] {
        check(
            Scenario::DecoherenceSweep {
                lambda_rate,
                policy,
                tau,
            },
            seed,
        );
    }
}

#[test]
fn rotating_idler_matches_oracle() {
    for (omega, tau, seed) in [
        (1.0, 0.8, 28),
        (2.0, 2.2, 29),
        (1.0, std::f64::consts::FRAC_PI_2, 30),
    ] {
        check(Scenario::RotatingIdler { omega, tau }, seed);
    }
}

#[test]
fn finite_environment_matches_oracle() {
    for (dim_env, env_seed, tau, seed) in [
        (2, 5, 1.1, 31),
        (4, 11, 2.3, 32),
        (3, 2, 0.6, 33),
    ] {
        check(
            Scenario::FiniteEnvironment {
                dim_env,
                env_seed,
                tau,
            },
            seed,
        );
    }
}
