//! Shared fixtures for the criterion benchmarks.

use num_complex::Complex64;

use fringe_core::{Ket, Operator, Subsystem, SubsystemLayout, TrialRng};

/// Layout with `n` two-level subsystems (total dimension `2^n`).
pub fn qubit_layout(n: usize) -> SubsystemLayout {
    let subsystems = (0..n)
        .map(|k| Subsystem::new(format!("q{k}"), &["0", "1"]).unwrap())
        .collect();
    SubsystemLayout::new(subsystems).unwrap()
}

/// Seeded random normalized state over the layout.
pub fn random_state(layout: SubsystemLayout, seed: u64) -> Ket {
    let mut rng = TrialRng::new(seed);
    let amps: Vec<Complex64> = (0..layout.total_dim())
        .map(|_| Complex64::new(rng.next_symmetric(), rng.next_symmetric()))
        .collect();
    let norm: f64 = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    Ket::new(layout, amps.into_iter().map(|a| a / norm).collect()).unwrap()
}

/// Seeded random Hermitian operator over the layout.
pub fn random_hermitian(layout: SubsystemLayout, seed: u64) -> Operator {
    let mut rng = TrialRng::new(seed);
    let d = layout.total_dim();
    let mut m = vec![Complex64::ZERO; d * d];
    for i in 0..d {
        m[i * d + i] = Complex64::new(rng.next_symmetric(), 0.0);
        for j in (i + 1)..d {
            let z = Complex64::new(rng.next_symmetric(), rng.next_symmetric());
            m[i * d + j] = z;
            m[j * d + i] = z.conj();
        }
    }
    Operator::new(layout, m).unwrap()
}
