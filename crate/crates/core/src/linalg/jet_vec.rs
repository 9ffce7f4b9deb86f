use crate::jet::{Jet, JetError};

/// An ambient vector whose entries are jets of one common shape: a vector
/// field along the immersion, known to some order around the base point.
#[derive(Debug, Clone, PartialEq)]
pub struct JetVec {
    entries: Vec<Jet>,
}

impl JetVec {
    pub fn new(entries: Vec<Jet>) -> Result<Self, JetError> {
        if let Some(first) = entries.first() {
            for e in &entries[1..] {
                if e.num_vars() != first.num_vars() || e.order() != first.order() {
                    return Err(JetError::ShapeMismatch(
                        first.num_vars(),
                        first.order(),
                        e.num_vars(),
                        e.order(),
                    ));
                }
            }
        }
        Ok(Self { entries })
    }

    pub fn entries(&self) -> &[Jet] {
        &self.entries
    }

    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    /// Jet order shared by all entries; 0 for an empty vector.
    pub fn order(&self) -> usize {
        self.entries.first().map_or(0, Jet::order)
    }

    pub fn num_vars(&self) -> usize {
        self.entries.first().map_or(0, Jet::num_vars)
    }

    /// The vector at the base point.
    pub fn value(&self) -> Vec<f64> {
        self.entries.iter().map(Jet::value).collect()
    }

    /// `d/du_var` of the field at the base point.
    pub fn first_order(&self, var: usize) -> Vec<f64> {
        self.entries.iter().map(|e| e.first_order(var)).collect()
    }

    pub fn truncate(&self, order: usize) -> Result<Self, JetError> {
        Ok(Self {
            entries: self
                .entries
                .iter()
                .map(|e| e.truncate(order))
                .collect::<Result<_, _>>()?,
        })
    }

    pub fn dot(&self, other: &Self) -> Result<Jet, JetError> {
        let mut terms = self.entries.iter().zip(&other.entries);
        let Some((a, b)) = terms.next() else {
            return Ok(Jet::zeros(0, 0));
        };
        let mut acc = a.mul(b)?;
        for (a, b) in terms {
            acc = acc.add(&a.mul(b)?)?;
        }
        Ok(acc)
    }

    /// `self - c * other` with a jet-valued coefficient.
    pub fn sub_scaled(&self, c: &Jet, other: &Self) -> Result<Self, JetError> {
        Ok(Self {
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a.sub(&c.mul(b)?))
                .collect::<Result<_, _>>()?,
        })
    }

    pub fn div_scalar(&self, d: &Jet) -> Result<Self, JetError> {
        Ok(Self {
            entries: self
                .entries
                .iter()
                .map(|a| a.div(d))
                .collect::<Result<_, _>>()?,
        })
    }
}
