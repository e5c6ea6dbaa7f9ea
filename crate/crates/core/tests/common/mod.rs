//! Helpers shared by the integration test suites.

// Each test binary compiles this module separately and uses a subset.
#![allow(dead_code)]

use num_complex::Complex64;

use fringe_core::{Ket, Operator, Subsystem, SubsystemLayout, TrialRng};

/// Gram-Schmidt over packed column vectors; `None` when the input is too
/// close to singular to orthonormalize reliably.
pub fn gram_schmidt(mut cols: Vec<Vec<Complex64>>) -> Option<Vec<Vec<Complex64>>> {
    let n = cols.len();
    for j in 0..n {
        for k in 0..j {
            let proj: Complex64 = cols[k]
                .iter()
                .zip(&cols[j])
                .map(|(a, b)| a.conj() * b)
                .sum();
            for i in 0..cols[j].len() {
                let sub = proj * cols[k][i];
                cols[j][i] -= sub;
            }
        }
        let norm: f64 = cols[j].iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm < 1e-6 {
            return None;
        }
        for a in &mut cols[j] {
            *a /= norm;
        }
    }
    Some(cols)
}

/// Operator whose j-th column is `cols[j]`, verified unitary.
pub fn unitary_from_cols(layout: SubsystemLayout, cols: &[Vec<Complex64>]) -> Operator {
    let d = cols.len();
    let mut matrix = vec![Complex64::ZERO; d * d];
    for (j, col) in cols.iter().enumerate() {
        for (i, a) in col.iter().enumerate() {
            matrix[i * d + j] = *a;
        }
    }
    Operator::unitary(layout, matrix).expect("Gram-Schmidt output is unitary")
}

/// Layout with subsystems `s0, s1, ...` of the given dimensions and machine
/// labels `k0, k1, ...`.
pub fn layout_of(dims: &[usize]) -> SubsystemLayout {
    let subsystems = dims
        .iter()
        .enumerate()
        .map(|(k, &d)| {
            let labels: Vec<String> = (0..d).map(|i| format!("k{i}")).collect();
            let refs: Vec<&str> = labels.iter().map(String::as_str).collect();
            Subsystem::new(format!("s{k}"), &refs).unwrap()
        })
        .collect();
    SubsystemLayout::new(subsystems).unwrap()
}

/// Random normalized ket over the layout, driven by the stream.
pub fn random_ket(rng: &mut TrialRng, layout: SubsystemLayout) -> Ket {
    loop {
        let amps: Vec<Complex64> = (0..layout.total_dim())
            .map(|_| Complex64::new(rng.next_symmetric(), rng.next_symmetric()))
            .collect();
        let norm: f64 = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm > 1e-3 {
            return Ket::new(layout, amps.into_iter().map(|a| a / norm).collect()).unwrap();
        }
    }
}

/// Random unitary over the layout via Gram-Schmidt of a random matrix.
pub fn random_unitary(rng: &mut TrialRng, layout: SubsystemLayout) -> Operator {
    let d = layout.total_dim();
    loop {
        let cols: Vec<Vec<Complex64>> = (0..d)
            .map(|_| {
                (0..d)
                    .map(|_| Complex64::new(rng.next_symmetric(), rng.next_symmetric()))
                    .collect()
            })
            .collect();
        if let Some(cols) = gram_schmidt(cols) {
            return unitary_from_cols(layout, &cols);
        }
    }
}

/// Five-sigma binomial deviation bound on a frequency estimate.
pub fn five_sigma(p: f64, n: u64) -> f64 {
    5.0 * (p * (1.0 - p) / n as f64).sqrt()
}
