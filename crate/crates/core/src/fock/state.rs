use std::sync::Arc;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use super::basis::{same_basis, Basis};
use super::layout::FockState;
use crate::{Error, Result};

/// Dense complex amplitudes over an ordered basis.
#[derive(Debug, Clone)]
pub struct StateVector {
    basis: Basis,
    amps: Vec<C64>,
}

/// Serialized ket: basis-state text form with real and imaginary parts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KetTerm {
    pub state: String,
    pub re: f64,
    pub im: f64,
}

impl StateVector {
    pub fn new(basis: Basis, amps: Vec<C64>) -> Result<Self> {
        if amps.len() != basis.dim() {
            return Err(Error::DimensionMismatch(format!(
                "{} amplitudes for a {}-dimensional basis",
                amps.len(),
                basis.dim()
            )));
        }
        Ok(Self { basis, amps })
    }

    pub fn zeros(basis: Basis) -> Self {
        let n = basis.dim();
        Self { basis, amps: vec![C64::new(0.0, 0.0); n] }
    }

    /// Single basis state.
    pub fn basis_state(basis: Basis, s: &FockState) -> Result<Self> {
        Self::from_terms(basis, &[(s.clone(), C64::new(1.0, 0.0))])
    }

    /// Superposition of listed basis states; repeated states accumulate.
    pub fn from_terms(basis: Basis, terms: &[(FockState, C64)]) -> Result<Self> {
        let mut v = Self::zeros(basis);
        for (s, a) in terms {
            let i = v
                .basis
                .index_of(s)
                .ok_or_else(|| Error::MissingBasisState(s.to_string()))?;
            v.amps[i] += *a;
        }
        Ok(v)
    }

    /// Like [`from_terms`](Self::from_terms) with real amplitudes given as
    /// occupation arrays; used for literal codeword construction.
    pub fn from_real(basis: Basis, terms: &[(&[u32], f64)]) -> Result<Self> {
        let t: Vec<(FockState, C64)> =
            terms.iter().map(|(s, a)| (FockState::from(*s), C64::new(*a, 0.0))).collect();
        Self::from_terms(basis, &t)
    }

    pub fn basis(&self) -> &Basis {
        &self.basis
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub fn amplitudes_mut(&mut self) -> &mut [C64] {
        &mut self.amps
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitude(&self, s: &FockState) -> C64 {
        self.basis.index_of(s).map(|i| self.amps[i]).unwrap_or_default()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// Copy scaled to unit norm; the zero vector is returned unchanged.
    pub fn normalized(&self) -> Self {
        let n = self.norm();
        if n == 0.0 {
            return self.clone();
        }
        self.scale(C64::new(1.0 / n, 0.0))
    }

    pub fn is_normalized(&self, tol: f64) -> bool {
        (self.norm_sqr() - 1.0).abs() <= tol
    }

    pub fn scale(&self, c: C64) -> Self {
        Self { basis: Arc::clone(&self.basis), amps: self.amps.iter().map(|a| a * c).collect() }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        let amps = self.amps.iter().zip(&other.amps).map(|(a, b)| a + b).collect();
        Ok(Self { basis: Arc::clone(&self.basis), amps })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(C64::new(-1.0, 0.0)))
    }

    /// ⟨self|other⟩, antilinear in `self`.
    pub fn inner(&self, other: &Self) -> Result<C64> {
        self.check_same(other)?;
        Ok(self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum())
    }

    /// Basis states with nonzero amplitude, in basis order.
    pub fn support(&self) -> impl Iterator<Item = (&FockState, C64)> + '_ {
        self.amps
            .iter()
            .enumerate()
            .filter(|(_, a)| a.norm_sqr() > 0.0)
            .map(move |(i, a)| (self.basis.state(i), *a))
    }

    /// Support restricted to amplitudes above `tol` in magnitude.
    pub fn support_above(&self, tol: f64) -> Vec<(FockState, C64)> {
        self.support().filter(|(_, a)| a.norm() > tol).map(|(s, a)| (s.clone(), a)).collect()
    }

    /// Re-expresses the state in a larger basis over the same modes;
    /// amplitudes are copied exactly.
    pub fn embed(&self, into: &Basis) -> Result<Self> {
        if !self.basis.layout().same_modes(into.layout()) {
            return Err(Error::DimensionMismatch("embed across different mode layouts".into()));
        }
        let mut out = Self::zeros(Arc::clone(into));
        for (i, a) in self.amps.iter().enumerate() {
            if a.norm_sqr() == 0.0 {
                continue;
            }
            let s = self.basis.state(i);
            let j = into.index_of(s).ok_or_else(|| Error::MissingBasisState(s.to_string()))?;
            out.amps[j] = *a;
        }
        Ok(out)
    }

    /// Orthogonal projection onto the span of `onto`'s basis states
    /// (components outside it are dropped).
    pub fn project(&self, onto: &Basis) -> Result<Self> {
        if !self.basis.layout().same_modes(onto.layout()) {
            return Err(Error::DimensionMismatch("project across different mode layouts".into()));
        }
        let mut out = Self::zeros(Arc::clone(onto));
        for (i, a) in self.amps.iter().enumerate() {
            if let Some(j) = onto.index_of(self.basis.state(i)) {
                out.amps[j] = *a;
            }
        }
        Ok(out)
    }

    /// Tensor product with `self` as the outer factor.
    pub fn tensor(&self, other: &Self) -> Result<Self> {
        let basis = self.basis.tensor(&other.basis)?.shared();
        let mut amps = Vec::with_capacity(basis.dim());
        for a in &self.amps {
            for b in &other.amps {
                amps.push(a * b);
            }
        }
        Self::new(basis, amps)
    }

    /// Largest amplitude difference after aligning bases.
    pub fn distance(&self, other: &Self) -> Result<f64> {
        self.check_same(other)?;
        Ok(self.amps.iter().zip(&other.amps).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max))
    }

    /// Nonzero terms in basis order, as serializable triples.
    pub fn to_terms(&self) -> Vec<KetTerm> {
        self.support()
            .map(|(s, a)| KetTerm { state: s.to_string(), re: a.re, im: a.im })
            .collect()
    }

    fn check_same(&self, other: &Self) -> Result<()> {
        if same_basis(&self.basis, &other.basis) {
            Ok(())
        } else {
            Err(Error::DimensionMismatch("states live on different bases".into()))
        }
    }
}

/// ⟨x|y⟩.
pub fn inner_product(x: &StateVector, y: &StateVector) -> Result<C64> {
    x.inner(y)
}
