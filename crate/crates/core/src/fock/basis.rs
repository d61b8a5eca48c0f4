use std::collections::HashMap;
use std::sync::Arc;

use super::layout::{FockState, ModeLayout};
use crate::{Error, Result};

/// Upper bound on the number of states in a single basis.
pub const MAX_BASIS_DIM: usize = 1 << 24;

/// Ordered list of Fock states over a layout, with reverse lookup.
#[derive(Debug, Clone)]
pub struct BasisIndex {
    layout: ModeLayout,
    states: Vec<FockState>,
    lookup: HashMap<FockState, usize>,
}

/// Bases are shared between states and operators.
pub type Basis = Arc<BasisIndex>;

impl BasisIndex {
    pub fn new(layout: ModeLayout, states: Vec<FockState>) -> Result<Self> {
        if states.len() > MAX_BASIS_DIM {
            return Err(Error::CapacityOverflow(format!("{} states", states.len())));
        }
        let mut lookup = HashMap::with_capacity(states.len());
        for (i, s) in states.iter().enumerate() {
            if s.0.len() != layout.len() {
                return Err(Error::InvalidLayout(format!(
                    "state {s} has {} modes, layout has {}",
                    s.0.len(),
                    layout.len()
                )));
            }
            if let Some((k, (&n, &cap))) =
                s.0.iter().zip(layout.caps()).enumerate().find(|(_, (n, cap))| n > cap)
            {
                return Err(Error::InvalidLayout(format!(
                    "state {s}: occupation {n} of mode {k} exceeds cap {cap}"
                )));
            }
            if lookup.insert(s.clone(), i).is_some() {
                return Err(Error::InvalidLayout(format!("duplicate basis state {s}")));
            }
        }
        Ok(Self { layout, states, lookup })
    }

    pub fn shared(self) -> Basis {
        Arc::new(self)
    }

    pub fn layout(&self) -> &ModeLayout {
        &self.layout
    }

    pub fn states(&self) -> &[FockState] {
        &self.states
    }

    pub fn dim(&self) -> usize {
        self.states.len()
    }

    pub fn state(&self, i: usize) -> &FockState {
        &self.states[i]
    }

    pub fn index_of(&self, s: &FockState) -> Option<usize> {
        self.lookup.get(s).copied()
    }

    pub fn contains(&self, s: &FockState) -> bool {
        self.lookup.contains_key(s)
    }

    /// Lexicographic tensor product: `self` is the outer (slow) factor.
    pub fn tensor(&self, other: &Self) -> Result<Self> {
        let dim = self
            .dim()
            .checked_mul(other.dim())
            .filter(|&d| d <= MAX_BASIS_DIM)
            .ok_or_else(|| Error::CapacityOverflow("tensor product basis".into()))?;
        let mut states = Vec::with_capacity(dim);
        for a in &self.states {
            for b in &other.states {
                states.push(a.concat(b));
            }
        }
        Self::new(self.layout.concat(&other.layout), states)
    }
}

impl PartialEq for BasisIndex {
    fn eq(&self, other: &Self) -> bool {
        self.layout.same_modes(&other.layout) && self.states == other.states
    }
}

/// Whether two shared bases describe the same ordered state list.
pub fn same_basis(a: &Basis, b: &Basis) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}
