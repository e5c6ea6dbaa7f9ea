//! Labeled tensor-product index spaces.
//!
//! A [`SubsystemLayout`] is an ordered list of named subsystems, each with a
//! list of basis labels. Flat indices are row-major over subsystems in layout
//! order, so the mapping between a flat index and a tuple of per-subsystem
//! basis labels is fixed by the declaration and reproducible bit-for-bit.

use crate::error::{Error, Result};

/// One named factor of a tensor-product space.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Subsystem {
    name: String,
    labels: Vec<String>,
}

impl Subsystem {
    pub fn new(name: impl Into<String>, labels: &[&str]) -> Result<Self> {
        let name = name.into();
        let labels: Vec<String> = labels.iter().map(|s| s.to_string()).collect();
        if labels.is_empty() {
            return Err(Error::InvalidParameter(format!(
                "subsystem {name} must have dimension >= 1"
            )));
        }
        for (i, a) in labels.iter().enumerate() {
            if labels[..i].contains(a) {
                return Err(Error::InvalidParameter(format!(
                    "duplicate basis label {a} in subsystem {name}"
                )));
            }
        }
        Ok(Subsystem { name, labels })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label_index(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }
}

/// Ordered list of subsystems defining a tensor-product basis.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubsystemLayout {
    subsystems: Vec<Subsystem>,
}

impl SubsystemLayout {
    pub fn new(subsystems: Vec<Subsystem>) -> Result<Self> {
        if subsystems.is_empty() {
            return Err(Error::InvalidParameter(
                "layout must contain at least one subsystem".into(),
            ));
        }
        for (i, s) in subsystems.iter().enumerate() {
            if subsystems[..i].iter().any(|t| t.name() == s.name()) {
                return Err(Error::NameCollision(s.name().to_string()));
            }
        }
        Ok(SubsystemLayout { subsystems })
    }

    /// Layout holding a single subsystem.
    pub fn single(name: impl Into<String>, labels: &[&str]) -> Result<Self> {
        Self::new(vec![Subsystem::new(name, labels)?])
    }

    pub fn subsystems(&self) -> &[Subsystem] {
        &self.subsystems
    }

    pub fn total_dim(&self) -> usize {
        self.subsystems.iter().map(Subsystem::dim).product()
    }

    pub fn axis_of(&self, name: &str) -> Result<usize> {
        self.subsystems
            .iter()
            .position(|s| s.name() == name)
            .ok_or_else(|| Error::UnknownSubsystem(name.to_string()))
    }

    pub fn subsystem(&self, name: &str) -> Result<&Subsystem> {
        Ok(&self.subsystems[self.axis_of(name)?])
    }

    /// Row-major stride of each axis: flat = sum_k idx[k] * stride[k].
    pub fn strides(&self) -> Vec<usize> {
        let mut strides = vec![1usize; self.subsystems.len()];
        for k in (0..self.subsystems.len().saturating_sub(1)).rev() {
            strides[k] = strides[k + 1] * self.subsystems[k + 1].dim();
        }
        strides
    }

    /// Flat index of a tuple of per-subsystem basis indices.
    pub fn flat_index(&self, indices: &[usize]) -> usize {
        debug_assert_eq!(indices.len(), self.subsystems.len());
        let mut flat = 0;
        for (i, s) in indices.iter().zip(&self.subsystems) {
            debug_assert!(*i < s.dim());
            flat = flat * s.dim() + i;
        }
        flat
    }

    /// Per-subsystem basis indices of a flat index.
    pub fn unflatten(&self, mut flat: usize) -> Vec<usize> {
        let mut idx = vec![0usize; self.subsystems.len()];
        for k in (0..self.subsystems.len()).rev() {
            let d = self.subsystems[k].dim();
            idx[k] = flat % d;
            flat /= d;
        }
        idx
    }

    /// Basis labels addressed by a flat index, in subsystem order.
    pub fn labels_at(&self, flat: usize) -> Vec<&str> {
        self.unflatten(flat)
            .iter()
            .zip(&self.subsystems)
            .map(|(&i, s)| s.labels()[i].as_str())
            .collect()
    }

    /// Flat index of a tuple of per-subsystem basis labels.
    pub fn flat_of_labels(&self, labels: &[&str]) -> Result<usize> {
        if labels.len() != self.subsystems.len() {
            return Err(Error::DimensionMismatch {
                expected: self.subsystems.len(),
                got: labels.len(),
            });
        }
        let mut idx = Vec::with_capacity(labels.len());
        for (label, s) in labels.iter().zip(&self.subsystems) {
            let i = s.label_index(label).ok_or_else(|| {
                Error::InvalidParameter(format!(
                    "no basis label {label} in subsystem {}",
                    s.name()
                ))
            })?;
            idx.push(i);
        }
        Ok(self.flat_index(&idx))
    }

    /// Concatenation of two layouts with disjoint subsystem names.
    pub fn concat(&self, other: &SubsystemLayout) -> Result<SubsystemLayout> {
        let mut subsystems = self.subsystems.clone();
        for s in &other.subsystems {
            if subsystems.iter().any(|t| t.name() == s.name()) {
                return Err(Error::NameCollision(s.name().to_string()));
            }
            subsystems.push(s.clone());
        }
        SubsystemLayout::new(subsystems)
    }

    /// Sub-layout containing `keep`, preserving this layout's subsystem order.
    pub fn restricted_to(&self, keep: &[&str]) -> Result<SubsystemLayout> {
        if keep.is_empty() {
            return Err(Error::InvalidParameter(
                "keep list must be nonempty".into(),
            ));
        }
        for name in keep {
            self.axis_of(name)?;
        }
        let subsystems: Vec<Subsystem> = self
            .subsystems
            .iter()
            .filter(|s| keep.contains(&s.name()))
            .cloned()
            .collect();
        SubsystemLayout::new(subsystems)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn layout_2x3() -> SubsystemLayout {
        SubsystemLayout::new(vec![
            Subsystem::new("particle", &["L", "R"]).unwrap(),
            Subsystem::new("detector", &["D_0", "D_L", "D_R"]).unwrap(),
        ])
        .unwrap()
    }

    #[test]
    fn flat_index_is_row_major() {
        let l = layout_2x3();
        assert_eq!(l.total_dim(), 6);
        assert_eq!(l.flat_index(&[0, 0]), 0);
        assert_eq!(l.flat_index(&[0, 2]), 2);
        assert_eq!(l.flat_index(&[1, 0]), 3);
        assert_eq!(l.flat_index(&[1, 2]), 5);
        assert_eq!(l.strides(), vec![3, 1]);
    }

    #[test]
    fn unflatten_round_trips() {
        let l = layout_2x3();
        for flat in 0..l.total_dim() {
            assert_eq!(l.flat_index(&l.unflatten(flat)), flat);
        }
    }

    #[test]
    fn labels_address_entries() {
        let l = layout_2x3();
        assert_eq!(l.flat_of_labels(&["R", "D_L"]).unwrap(), 4);
        assert_eq!(l.labels_at(4), vec!["R", "D_L"]);
    }

    #[test]
    fn rejects_duplicate_names_and_labels() {
        assert!(Subsystem::new("p", &["a", "a"]).is_err());
        let s = Subsystem::new("p", &["a", "b"]).unwrap();
        assert!(matches!(
            SubsystemLayout::new(vec![s.clone(), s]),
            Err(Error::NameCollision(_))
        ));
    }

    #[test]
    fn concat_rejects_collisions() {
        let a = SubsystemLayout::single("p", &["x"]).unwrap();
        let b = SubsystemLayout::single("p", &["y"]).unwrap();
        assert!(matches!(a.concat(&b), Err(Error::NameCollision(_))));
    }

    #[test]
    fn restriction_preserves_declaration_order() {
        let l = layout_2x3();
        let r = l.restricted_to(&["detector"]).unwrap();
        assert_eq!(r.subsystems().len(), 1);
        assert_eq!(r.subsystems()[0].name(), "detector");
        assert!(l.restricted_to(&["nope"]).is_err());
        assert!(l.restricted_to(&[]).is_err());
    }
}
