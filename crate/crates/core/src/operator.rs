//! Dense operators, Hermitian evolution, and reduced density operators.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::ket::Ket;
use crate::layout::SubsystemLayout;
use crate::{TOL_DRIFT, TOL_EIGEN_FLOOR, TOL_STORAGE, TOL_UNITARY};

fn max_entry_dev(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

/// Dense square operator on a labeled tensor-product space. Matrix entries
/// are row-major: `matrix[row * dim + col]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Operator {
    layout: SubsystemLayout,
    matrix: Vec<Complex64>,
    unitary: bool,
}

impl Operator {
    pub fn new(layout: SubsystemLayout, matrix: Vec<Complex64>) -> Result<Self> {
        let d = layout.total_dim();
        if matrix.len() != d * d {
            return Err(Error::DimensionMismatch {
                expected: d * d,
                got: matrix.len(),
            });
        }
        for (i, a) in matrix.iter().enumerate() {
            if !a.re.is_finite() || !a.im.is_finite() {
                return Err(Error::NonFinite(i));
            }
        }
        Ok(Operator {
            layout,
            matrix,
            unitary: false,
        })
    }

    /// As [`Operator::new`] but flags the operator unitary after verifying
    /// `U†U = I` within [`TOL_UNITARY`] entrywise.
    pub fn unitary(layout: SubsystemLayout, matrix: Vec<Complex64>) -> Result<Self> {
        let op = Self::new(layout, matrix)?;
        let d = op.dim();
        let mut dev = 0.0f64;
        for i in 0..d {
            for j in 0..d {
                let mut s = Complex64::ZERO;
                for k in 0..d {
                    s += op.matrix[k * d + i].conj() * op.matrix[k * d + j];
                }
                let target = if i == j { Complex64::ONE } else { Complex64::ZERO };
                dev = dev.max((s - target).norm());
            }
        }
        if dev > TOL_UNITARY {
            return Err(Error::NotUnitary { dev });
        }
        Ok(Operator {
            unitary: true,
            ..op
        })
    }

    pub fn identity(layout: SubsystemLayout) -> Self {
        let d = layout.total_dim();
        let mut matrix = vec![Complex64::ZERO; d * d];
        for i in 0..d {
            matrix[i * d + i] = Complex64::ONE;
        }
        Operator {
            layout,
            matrix,
            unitary: true,
        }
    }

    pub fn layout(&self) -> &SubsystemLayout {
        &self.layout
    }

    pub fn dim(&self) -> usize {
        self.layout.total_dim()
    }

    pub fn matrix(&self) -> &[Complex64] {
        &self.matrix
    }

    pub fn is_unitary_flagged(&self) -> bool {
        self.unitary
    }

    pub fn entry(&self, row: usize, col: usize) -> Complex64 {
        self.matrix[row * self.dim() + col]
    }

    /// Max entrywise deviation from `H = H†`.
    pub fn hermitian_deviation(&self) -> f64 {
        let d = self.dim();
        let mut dev = 0.0f64;
        for i in 0..d {
            for j in 0..=i {
                dev = dev.max((self.entry(i, j) - self.entry(j, i).conj()).norm());
            }
        }
        dev
    }

    /// Matrix-vector product. A unitary-flagged operator fails instead of
    /// silently renormalizing when the output norm drifts by more than
    /// [`TOL_DRIFT`].
    pub fn apply(&self, psi: &Ket) -> Result<Ket> {
        if self.layout != *psi.layout() {
            return Err(Error::LayoutMismatch(
                "operator and state layouts differ".into(),
            ));
        }
        let d = self.dim();
        let mut amps = vec![Complex64::ZERO; d];
        for (row, out) in amps.iter_mut().enumerate() {
            let mut s = Complex64::ZERO;
            for col in 0..d {
                s += self.matrix[row * d + col] * psi.amp(col);
            }
            *out = s;
        }
        let out = Ket::new(self.layout.clone(), amps)?;
        if self.unitary {
            let dev = (out.norm() - psi.norm()).abs();
            if dev > TOL_DRIFT {
                return Err(Error::UnitarityDrift {
                    dev,
                    tol: TOL_DRIFT,
                });
            }
        }
        Ok(out)
    }
}

fn to_nalgebra(matrix: &[Complex64], d: usize) -> DMatrix<Complex64> {
    DMatrix::from_fn(d, d, |i, j| matrix[i * d + j])
}

/// Spectral decomposition of a Hermitian matrix: real eigenvalues and a
/// unitary eigenvector matrix (columns are eigenvectors).
pub(crate) fn hermitian_eigen(
    matrix: &[Complex64],
    d: usize,
) -> (Vec<f64>, DMatrix<Complex64>) {
    let eig = to_nalgebra(matrix, d).symmetric_eigen();
    (eig.eigenvalues.as_slice().to_vec(), eig.eigenvectors)
}

/// Evolves `psi` by `exp(-i H t)` using the spectral decomposition of the
/// Hermitian operator `H`. Preserves norm up to roundoff.
pub fn evolve_hermitian(h: &Operator, t: f64, psi: &Ket) -> Result<Ket> {
    if h.layout() != psi.layout() {
        return Err(Error::LayoutMismatch(
            "Hamiltonian and state layouts differ".into(),
        ));
    }
    let dev = h.hermitian_deviation();
    if dev > TOL_UNITARY {
        return Err(Error::NotHermitian {
            dev,
            tol: TOL_UNITARY,
        });
    }
    let d = h.dim();
    let (eigenvalues, vectors) = hermitian_eigen(h.matrix(), d);
    let psi_vec = DVector::from_fn(d, |i, _| psi.amp(i));
    // exp(-iHt) psi = V diag(exp(-i e_k t)) V^dagger psi
    let mut coeffs = vectors.adjoint() * psi_vec;
    for (c, e) in coeffs.iter_mut().zip(&eigenvalues) {
        *c *= Complex64::new(0.0, -e * t).exp();
    }
    let evolved = vectors * coeffs;
    let out = Ket::new(h.layout().clone(), evolved.as_slice().to_vec())?;
    let drift = (out.norm() - psi.norm()).abs();
    if drift > TOL_DRIFT {
        return Err(Error::UnitarityDrift {
            dev: drift,
            tol: TOL_DRIFT,
        });
    }
    Ok(out)
}

/// Hermitian, unit-trace operator over a labeled basis, e.g. the output of
/// [`DensityOperator::partial_trace`].
#[derive(Debug, Clone, PartialEq)]
pub struct DensityOperator {
    layout: SubsystemLayout,
    matrix: Vec<Complex64>,
}

impl DensityOperator {
    /// Validating constructor: Hermitian and unit trace within
    /// [`TOL_STORAGE`], eigenvalues above [`TOL_EIGEN_FLOOR`].
    pub fn new(layout: SubsystemLayout, matrix: Vec<Complex64>) -> Result<Self> {
        let d = layout.total_dim();
        if matrix.len() != d * d {
            return Err(Error::DimensionMismatch {
                expected: d * d,
                got: matrix.len(),
            });
        }
        let rho = DensityOperator { layout, matrix };
        rho.validate()?;
        Ok(rho)
    }

    /// Pure-state projector `|psi><psi|`.
    pub fn from_pure(psi: &Ket) -> DensityOperator {
        let d = psi.dim();
        let mut matrix = vec![Complex64::ZERO; d * d];
        for i in 0..d {
            for j in 0..d {
                matrix[i * d + j] = psi.amp(i) * psi.amp(j).conj();
            }
        }
        DensityOperator {
            layout: psi.layout().clone(),
            matrix,
        }
    }

    pub fn layout(&self) -> &SubsystemLayout {
        &self.layout
    }

    pub fn dim(&self) -> usize {
        self.layout.total_dim()
    }

    pub fn matrix(&self) -> &[Complex64] {
        &self.matrix
    }

    pub fn entry(&self, row: usize, col: usize) -> Complex64 {
        self.matrix[row * self.dim() + col]
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim()).map(|i| self.entry(i, i)).sum()
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        hermitian_eigen(&self.matrix, self.dim()).0
    }

    pub fn validate(&self) -> Result<()> {
        let d = self.dim();
        let mut herm_dev = 0.0f64;
        for i in 0..d {
            for j in 0..=i {
                herm_dev =
                    herm_dev.max((self.entry(i, j) - self.entry(j, i).conj()).norm());
            }
        }
        if herm_dev > TOL_STORAGE {
            return Err(Error::NotHermitian {
                dev: herm_dev,
                tol: TOL_STORAGE,
            });
        }
        let tr = self.trace();
        if (tr.re - 1.0).abs() > TOL_STORAGE || tr.im.abs() > TOL_STORAGE {
            return Err(Error::NotNormalized(tr.re));
        }
        if let Some(min) = self
            .eigenvalues()
            .iter()
            .cloned()
            .min_by(|a, b| a.total_cmp(b))
        {
            if min < TOL_EIGEN_FLOOR {
                return Err(Error::InvalidParameter(format!(
                    "density operator has eigenvalue {min} below {TOL_EIGEN_FLOOR}"
                )));
            }
        }
        Ok(())
    }

    /// Traces out every subsystem not named in `keep`. Kept subsystems retain
    /// their relative order from the original layout.
    pub fn partial_trace(&self, keep: &[&str]) -> Result<DensityOperator> {
        let reduced_layout = self.layout.restricted_to(keep)?;
        let kept_axes: Vec<usize> = self
            .layout
            .subsystems()
            .iter()
            .enumerate()
            .filter(|(_, s)| keep.contains(&s.name()))
            .map(|(k, _)| k)
            .collect();
        let traced_axes: Vec<usize> = (0..self.layout.subsystems().len())
            .filter(|k| !kept_axes.contains(k))
            .collect();
        let strides = self.layout.strides();
        let kept_dims: Vec<usize> = kept_axes
            .iter()
            .map(|&k| self.layout.subsystems()[k].dim())
            .collect();
        let traced_dims: Vec<usize> = traced_axes
            .iter()
            .map(|&k| self.layout.subsystems()[k].dim())
            .collect();
        let dk: usize = kept_dims.iter().product();
        let dt: usize = traced_dims.iter().product();

        // Flat offset contributed by a row-major multi-index over the listed axes.
        let offset = |axes: &[usize], dims: &[usize], mut flat: usize| -> usize {
            let mut off = 0;
            for (&axis, &d) in axes.iter().zip(dims).rev() {
                off += (flat % d) * strides[axis];
                flat /= d;
            }
            off
        };

        let mut matrix = vec![Complex64::ZERO; dk * dk];
        for row_k in 0..dk {
            let row_base = offset(&kept_axes, &kept_dims, row_k);
            for col_k in 0..dk {
                let col_base = offset(&kept_axes, &kept_dims, col_k);
                let mut s = Complex64::ZERO;
                for e in 0..dt {
                    let env = offset(&traced_axes, &traced_dims, e);
                    s += self.matrix[(row_base + env) * self.dim() + (col_base + env)];
                }
                matrix[row_k * dk + col_k] = s;
            }
        }
        Ok(DensityOperator {
            layout: reduced_layout,
            matrix,
        })
    }

    /// Max entrywise deviation from another density operator.
    pub fn max_deviation(&self, other: &DensityOperator) -> f64 {
        max_entry_dev(&self.matrix, &other.matrix)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::layout::{Subsystem, SubsystemLayout};

    const INV_SQRT2: f64 = std::f64::consts::FRAC_1_SQRT_2;

    fn re(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    fn path_layout() -> SubsystemLayout {
        SubsystemLayout::single("particle", &["L", "R"]).unwrap()
    }

    #[test]
    fn identity_preserves_state() {
        let psi = Ket::new(path_layout(), vec![re(0.6), re(0.8)]).unwrap();
        let id = Operator::identity(path_layout());
        assert_eq!(id.apply(&psi).unwrap(), psi);
    }

    #[test]
    fn frame_change_unitary_on_left_path() {
        // Rows are <A| and <B| of |L> = (|A> - |B>)/sqrt(2), |R> = (|A> + |B>)/sqrt(2).
        let u = Operator::unitary(
            path_layout(),
            vec![
                re(INV_SQRT2),
                re(INV_SQRT2),
                re(-INV_SQRT2),
                re(INV_SQRT2),
            ],
        )
        .unwrap();
        let l = Ket::basis_state(path_layout(), &["L"]).unwrap();
        let out = u.apply(&l).unwrap();
        assert!((out.amp(0).re - INV_SQRT2).abs() < 1e-15);
        assert!((out.amp(1).re + INV_SQRT2).abs() < 1e-15);
    }

    #[test]
    fn swap_permutation() {
        let u = Operator::unitary(
            path_layout(),
            vec![re(0.0), re(1.0), re(1.0), re(0.0)],
        )
        .unwrap();
        let psi = Ket::new(path_layout(), vec![re(0.6), re(0.8)]).unwrap();
        let out = u.apply(&psi).unwrap();
        assert_eq!(out.amp(0), re(0.8));
        assert_eq!(out.amp(1), re(0.6));
    }

    #[test]
    fn unitary_flag_rejects_scaled_identity() {
        let m = vec![re(1.1), re(0.0), re(0.0), re(1.1)];
        assert!(matches!(
            Operator::unitary(path_layout(), m),
            Err(Error::NotUnitary { .. })
        ));
    }

    #[test]
    fn evolve_sigma_x_quarter_period() {
        // exp(-i sigma_x pi/2) (1,0) = (cos(pi/2), -i sin(pi/2)) = (0, -i)
        let h = Operator::new(
            path_layout(),
            vec![re(0.0), re(1.0), re(1.0), re(0.0)],
        )
        .unwrap();
        let psi = Ket::basis_state(path_layout(), &["L"]).unwrap();
        let out = evolve_hermitian(&h, std::f64::consts::FRAC_PI_2, &psi).unwrap();
        assert!((out.amp(0) - re(6.123233995736766e-17)).norm() < 1e-10);
        assert!((out.amp(1) - Complex64::new(0.0, -1.0)).norm() < 1e-10);
    }

    #[test]
    fn evolve_at_zero_time_is_identity() {
        let h = Operator::new(
            path_layout(),
            vec![re(0.3), re(0.1), re(0.1), re(-0.2)],
        )
        .unwrap();
        let psi = Ket::new(path_layout(), vec![re(0.6), re(0.8)]).unwrap();
        let out = evolve_hermitian(&h, 0.0, &psi).unwrap();
        assert!((out.amp(0) - psi.amp(0)).norm() < 1e-12);
        assert!((out.amp(1) - psi.amp(1)).norm() < 1e-12);
    }

    #[test]
    fn evolve_diagonal_puts_phase_on_eigenstate() {
        let (w1, w2) = (0.7, -1.3);
        let h = Operator::new(
            path_layout(),
            vec![re(w1), re(0.0), re(0.0), re(w2)],
        )
        .unwrap();
        let psi = Ket::basis_state(path_layout(), &["L"]).unwrap();
        let t = 2.1;
        let out = evolve_hermitian(&h, t, &psi).unwrap();
        let expect = Complex64::new(0.0, -w1 * t).exp();
        assert!((out.amp(0) - expect).norm() < 1e-12);
        assert!(out.amp(1).norm() < 1e-12);
    }

    #[test]
    fn evolve_rejects_non_hermitian() {
        let h = Operator::new(
            path_layout(),
            vec![re(0.0), re(1.0), re(0.5), re(0.0)],
        )
        .unwrap();
        let psi = Ket::basis_state(path_layout(), &["L"]).unwrap();
        assert!(matches!(
            evolve_hermitian(&h, 1.0, &psi),
            Err(Error::NotHermitian { .. })
        ));
    }

    #[test]
    fn partial_trace_of_orthogonal_pointer_branches() {
        // (|L>|d1> + |R>|d2>)/sqrt(2) with orthonormal pointer axes: reduced
        // particle operator is diag(1/2, 1/2) in the path basis.
        let layout = SubsystemLayout::new(vec![
            Subsystem::new("particle", &["L", "R"]).unwrap(),
            Subsystem::new("detector", &["d0", "d1", "d2"]).unwrap(),
        ])
        .unwrap();
        let mut amps = vec![Complex64::ZERO; 6];
        amps[layout.flat_of_labels(&["L", "d1"]).unwrap()] = re(INV_SQRT2);
        amps[layout.flat_of_labels(&["R", "d2"]).unwrap()] = re(INV_SQRT2);
        let psi = Ket::new(layout, amps).unwrap();
        let rho = DensityOperator::from_pure(&psi);
        let red = rho.partial_trace(&["particle"]).unwrap();
        assert!((red.entry(0, 0).re - 0.5).abs() < 1e-15);
        assert!((red.entry(1, 1).re - 0.5).abs() < 1e-15);
        assert!(red.entry(0, 1).norm() < 1e-15);
        red.validate().unwrap();
    }

    #[test]
    fn partial_trace_of_product_state_is_pure_projector() {
        let a = Ket::new(
            SubsystemLayout::single("particle", &["A", "B"]).unwrap(),
            vec![re(0.6), re(0.8)],
        )
        .unwrap();
        let i1 = Ket::basis_state(
            SubsystemLayout::single("idler", &["I1", "I2"]).unwrap(),
            &["I1"],
        )
        .unwrap();
        let joint = a.tensor(&i1).unwrap();
        let red = DensityOperator::from_pure(&joint)
            .partial_trace(&["particle"])
            .unwrap();
        let pure = DensityOperator::from_pure(&a);
        assert!(red.max_deviation(&pure) < 1e-15);
    }

    #[test]
    fn partial_trace_rejects_unknown_name() {
        let psi = Ket::basis_state(path_layout(), &["L"]).unwrap();
        let rho = DensityOperator::from_pure(&psi);
        assert!(rho.partial_trace(&["nope"]).is_err());
    }

    #[test]
    fn density_constructor_validates() {
        let bad = vec![re(0.7), re(0.0), re(0.0), re(0.7)];
        assert!(DensityOperator::new(path_layout(), bad).is_err());
        let negative = vec![re(1.5), re(0.0), re(0.0), re(-0.5)];
        assert!(DensityOperator::new(path_layout(), negative).is_err());
        let ok = vec![re(0.5), re(0.25), re(0.25), re(0.5)];
        assert!(DensityOperator::new(path_layout(), ok).is_ok());
    }
}
