//! State vectors over labeled tensor-product bases.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::layout::SubsystemLayout;
use crate::TOL_STORAGE;

/// Dense complex state vector tied to a [`SubsystemLayout`].
///
/// Amplitudes are stored in row-major flat order over the layout's
/// subsystems. Public operations keep states normalized to within
/// [`TOL_STORAGE`].
#[derive(Debug, Clone, PartialEq)]
pub struct Ket {
    layout: SubsystemLayout,
    amps: Vec<Complex64>,
}

impl Ket {
    /// Wraps raw amplitudes. Rejects wrong lengths and non-finite entries;
    /// does not renormalize.
    pub fn new(layout: SubsystemLayout, amps: Vec<Complex64>) -> Result<Self> {
        if amps.len() != layout.total_dim() {
            return Err(Error::DimensionMismatch {
                expected: layout.total_dim(),
                got: amps.len(),
            });
        }
        for (i, a) in amps.iter().enumerate() {
            if !a.re.is_finite() || !a.im.is_finite() {
                return Err(Error::NonFinite(i));
            }
        }
        Ok(Ket { layout, amps })
    }

    /// As [`Ket::new`] but additionally requires norm 1 within [`TOL_STORAGE`].
    pub fn normalized(layout: SubsystemLayout, amps: Vec<Complex64>) -> Result<Self> {
        let ket = Self::new(layout, amps)?;
        let n = ket.norm();
        if (n - 1.0).abs() > TOL_STORAGE {
            return Err(Error::NotNormalized(n));
        }
        Ok(ket)
    }

    /// Unit basis vector addressed by one label per subsystem.
    pub fn basis_state(layout: SubsystemLayout, labels: &[&str]) -> Result<Self> {
        let flat = layout.flat_of_labels(labels)?;
        let mut amps = vec![Complex64::ZERO; layout.total_dim()];
        amps[flat] = Complex64::ONE;
        Ok(Ket { layout, amps })
    }

    pub fn layout(&self) -> &SubsystemLayout {
        &self.layout
    }

    pub fn amps(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn amp(&self, flat: usize) -> Complex64 {
        self.amps[flat]
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn norm_sq(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    /// Tensor product with a state over disjoint subsystem names. The result
    /// layout is the concatenation; amplitude of `(i, j)` is `a_i * b_j`.
    pub fn tensor(&self, other: &Ket) -> Result<Ket> {
        let layout = self.layout.concat(other.layout())?;
        let m = other.dim();
        let mut amps = Vec::with_capacity(self.dim() * m);
        for a in &self.amps {
            for b in &other.amps {
                amps.push(a * b);
            }
        }
        Ok(Ket { layout, amps })
    }

    /// Inner product `<self|other>`: conjugate-linear in `self`.
    pub fn inner(&self, other: &Ket) -> Result<Complex64> {
        if self.layout != other.layout {
            return Err(Error::LayoutMismatch(
                "inner product requires identical layouts".into(),
            ));
        }
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

}
