use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

use super::basis::{same_basis, Basis};
use super::layout::FockState;
use super::state::StateVector;
use crate::{Error, Result};

/// Sparse complex matrix between two explicit bases, stored as CSR.
///
/// `overflow` lists domain indices whose image under the defining map left
/// the codomain (for example a raising operator hitting a photon cap).
/// Applying the operator to a state with support on such an index fails with
/// [`Error::TruncationOverflow`] instead of silently truncating.
#[derive(Debug, Clone)]
pub struct LinearOperator {
    domain: Basis,
    codomain: Basis,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    vals: Vec<C64>,
    overflow: Vec<usize>,
}

impl LinearOperator {
    /// Builds from `(row, col, value)` triplets; duplicates are summed and
    /// exact zeros dropped.
    pub fn from_triplets(
        domain: Basis,
        codomain: Basis,
        mut triplets: Vec<(usize, usize, C64)>,
        mut overflow: Vec<usize>,
    ) -> Result<Self> {
        let (nr, nc) = (codomain.dim(), domain.dim());
        if let Some(&(r, c, _)) = triplets.iter().find(|(r, c, _)| *r >= nr || *c >= nc) {
            return Err(Error::DimensionMismatch(format!(
                "entry ({r},{c}) outside a {nr}x{nc} operator"
            )));
        }
        if overflow.iter().any(|&j| j >= nc) {
            return Err(Error::DimensionMismatch("overflow index outside domain".into()));
        }
        triplets.sort_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));
        let mut merged: Vec<(usize, usize, C64)> = Vec::with_capacity(triplets.len());
        for (r, c, v) in triplets {
            match merged.last_mut() {
                Some(last) if last.0 == r && last.1 == c => last.2 += v,
                _ => merged.push((r, c, v)),
            }
        }
        merged.retain(|t| t.2.norm_sqr() != 0.0);
        let mut row_ptr = vec![0usize; nr + 1];
        for &(r, _, _) in &merged {
            row_ptr[r + 1] += 1;
        }
        for i in 0..nr {
            row_ptr[i + 1] += row_ptr[i];
        }
        let col_idx = merged.iter().map(|t| t.1).collect();
        let vals = merged.iter().map(|t| t.2).collect();
        overflow.sort_unstable();
        overflow.dedup();
        Ok(Self { domain, codomain, row_ptr, col_idx, vals, overflow })
    }

    /// Operator defined by its action on each domain basis state. Targets
    /// missing from the codomain mark the source index as overflowing.
    pub fn from_basis_map<F>(domain: &Basis, codomain: &Basis, f: F) -> Self
    where
        F: Fn(&FockState) -> Vec<(FockState, C64)>,
    {
        let mut trip = Vec::new();
        let mut overflow = Vec::new();
        for (j, s) in domain.states().iter().enumerate() {
            for (t, c) in f(s) {
                if c.norm_sqr() == 0.0 {
                    continue;
                }
                match codomain.index_of(&t) {
                    Some(i) => trip.push((i, j, c)),
                    None => overflow.push(j),
                }
            }
        }
        Self::from_triplets(Arc::clone(domain), Arc::clone(codomain), trip, overflow)
            .expect("indices come from the bases")
    }

    /// Diagonal operator with entries `f(state)`.
    pub fn diagonal<F>(basis: &Basis, f: F) -> Self
    where
        F: Fn(&FockState) -> C64,
    {
        Self::from_basis_map(basis, basis, |s| vec![(s.clone(), f(s))])
    }

    pub fn identity(basis: &Basis) -> Self {
        Self::diagonal(basis, |_| C64::new(1.0, 0.0))
    }

    pub fn zero(domain: &Basis, codomain: &Basis) -> Self {
        Self::from_triplets(Arc::clone(domain), Arc::clone(codomain), Vec::new(), Vec::new())
            .expect("empty operator")
    }

    /// Converts a dense matrix (rows indexed by the codomain).
    pub fn from_dense(domain: &Basis, codomain: &Basis, m: &DMatrix<C64>) -> Result<Self> {
        if m.nrows() != codomain.dim() || m.ncols() != domain.dim() {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} matrix for a {}x{} operator",
                m.nrows(),
                m.ncols(),
                codomain.dim(),
                domain.dim()
            )));
        }
        let mut trip = Vec::new();
        for j in 0..m.ncols() {
            for i in 0..m.nrows() {
                let v = m[(i, j)];
                if v.norm_sqr() != 0.0 {
                    trip.push((i, j, v));
                }
            }
        }
        Self::from_triplets(Arc::clone(domain), Arc::clone(codomain), trip, Vec::new())
    }

    /// Operator `Σ_k |out_k⟩⟨in_k|` built from paired state vectors.
    pub fn from_outer_products(pairs: &[(&StateVector, &StateVector)]) -> Result<Self> {
        let (out0, in0) = pairs
            .first()
            .ok_or_else(|| Error::InvalidParameter("no outer products".into()))?;
        let (domain, codomain) = (Arc::clone(in0.basis()), Arc::clone(out0.basis()));
        let mut trip = Vec::new();
        for (out, inp) in pairs {
            if !same_basis(out.basis(), &codomain) || !same_basis(inp.basis(), &domain) {
                return Err(Error::DimensionMismatch("outer products on mixed bases".into()));
            }
            for (i, a) in out.amplitudes().iter().enumerate().filter(|(_, a)| a.norm_sqr() > 0.0) {
                for (j, b) in inp.amplitudes().iter().enumerate().filter(|(_, b)| b.norm_sqr() > 0.0)
                {
                    trip.push((i, j, a * b.conj()));
                }
            }
        }
        Self::from_triplets(domain, codomain, trip, Vec::new())
    }

    pub fn domain(&self) -> &Basis {
        &self.domain
    }

    pub fn codomain(&self) -> &Basis {
        &self.codomain
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    pub fn overflow(&self) -> &[usize] {
        &self.overflow
    }

    pub fn has_overflow(&self) -> bool {
        !self.overflow.is_empty()
    }

    pub fn is_square(&self) -> bool {
        same_basis(&self.domain, &self.codomain)
    }

    /// Iterates `(row, col, value)` in row-major order.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, C64)> + '_ {
        (0..self.codomain.dim()).flat_map(move |r| {
            (self.row_ptr[r]..self.row_ptr[r + 1]).map(move |k| (r, self.col_idx[k], self.vals[k]))
        })
    }

    /// Matrix element `(row, col)`.
    pub fn get(&self, row: usize, col: usize) -> C64 {
        let (lo, hi) = (self.row_ptr[row], self.row_ptr[row + 1]);
        match self.col_idx[lo..hi].binary_search(&col) {
            Ok(k) => self.vals[lo + k],
            Err(_) => C64::new(0.0, 0.0),
        }
    }

    /// ⟨out|A|inp⟩ for basis states given by occupation.
    pub fn element(&self, out: &FockState, inp: &FockState) -> C64 {
        match (self.codomain.index_of(out), self.domain.index_of(inp)) {
            (Some(i), Some(j)) => self.get(i, j),
            _ => C64::new(0.0, 0.0),
        }
    }

    pub fn to_dense(&self) -> DMatrix<C64> {
        let mut m = DMatrix::zeros(self.codomain.dim(), self.domain.dim());
        for (r, c, v) in self.entries() {
            m[(r, c)] = v;
        }
        m
    }

    /// Applies the operator; fails if the state has weight on an
    /// overflowing domain index.
    pub fn apply(&self, state: &StateVector) -> Result<StateVector> {
        if !same_basis(state.basis(), &self.domain) {
            return Err(Error::DimensionMismatch("state basis differs from operator domain".into()));
        }
        let amps = state.amplitudes();
        if let Some(&j) = self.overflow.iter().find(|&&j| amps[j].norm_sqr() > 0.0) {
            return Err(Error::TruncationOverflow(self.domain.state(j).to_string()));
        }
        let mut out = vec![C64::new(0.0, 0.0); self.codomain.dim()];
        for (r, o) in out.iter_mut().enumerate() {
            let mut acc = C64::new(0.0, 0.0);
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                acc += self.vals[k] * amps[self.col_idx[k]];
            }
            *o = acc;
        }
        StateVector::new(Arc::clone(&self.codomain), out)
    }

    /// Sparse-times-dense product `A·M` with `M` indexed by the domain.
    /// Overflow flags are ignored; callers use this on subspaces they
    /// have already checked.
    pub fn mul_dense(&self, m: &DMatrix<C64>) -> Result<DMatrix<C64>> {
        if m.nrows() != self.domain.dim() {
            return Err(Error::DimensionMismatch(format!(
                "{} rows for a {}-dimensional domain",
                m.nrows(),
                self.domain.dim()
            )));
        }
        let mut out = DMatrix::zeros(self.codomain.dim(), m.ncols());
        for (r, c, v) in self.entries() {
            for k in 0..m.ncols() {
                out[(r, k)] += v * m[(c, k)];
            }
        }
        Ok(out)
    }

    /// `self ∘ rhs`, i.e. `rhs` acts first.
    pub fn compose(&self, rhs: &Self) -> Result<Self> {
        if !same_basis(&rhs.codomain, &self.domain) {
            return Err(Error::DimensionMismatch("compose: inner bases differ".into()));
        }
        let inner = self.domain.dim();
        // rhs rows are indexed by the inner basis; gather them per inner index.
        let mut trip = Vec::new();
        let mut acc = vec![C64::new(0.0, 0.0); rhs.domain.dim()];
        let mut touched = Vec::new();
        let mut mark = vec![false; rhs.domain.dim()];
        for r in 0..self.codomain.dim() {
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                let (mid, a) = (self.col_idx[k], self.vals[k]);
                debug_assert!(mid < inner);
                for q in rhs.row_ptr[mid]..rhs.row_ptr[mid + 1] {
                    let c = rhs.col_idx[q];
                    if !mark[c] {
                        mark[c] = true;
                        touched.push(c);
                    }
                    acc[c] += a * rhs.vals[q];
                }
            }
            touched.sort_unstable();
            for &c in &touched {
                trip.push((r, c, acc[c]));
                acc[c] = C64::new(0.0, 0.0);
                mark[c] = false;
            }
            touched.clear();
        }
        let mut overflow = rhs.overflow.clone();
        if !self.overflow.is_empty() {
            let mut bad = vec![false; inner];
            for &k in &self.overflow {
                bad[k] = true;
            }
            overflow.extend(rhs.entries().filter(|(r, _, _)| bad[*r]).map(|(_, c, _)| c));
        }
        Self::from_triplets(Arc::clone(&rhs.domain), Arc::clone(&self.codomain), trip, overflow)
    }

    /// Conjugate transpose. Overflow flags do not transfer: the adjoint is
    /// defined on the original codomain, where no truncation occurred.
    pub fn adjoint(&self) -> Self {
        let trip = self.entries().map(|(r, c, v)| (c, r, v.conj())).collect();
        Self::from_triplets(Arc::clone(&self.codomain), Arc::clone(&self.domain), trip, Vec::new())
            .expect("transposed indices are in range")
    }

    /// Kronecker product with `self` as the outer factor.
    pub fn tensor(&self, other: &Self) -> Result<Self> {
        let domain = self.domain.tensor(&other.domain)?.shared();
        let codomain = self.codomain.tensor(&other.codomain)?.shared();
        let (nbr, nbc) = (other.codomain.dim(), other.domain.dim());
        let mut trip = Vec::with_capacity(self.nnz() * other.nnz());
        for (ra, ca, va) in self.entries() {
            for (rb, cb, vb) in other.entries() {
                trip.push((ra * nbr + rb, ca * nbc + cb, va * vb));
            }
        }
        let mut overflow = Vec::new();
        for &ja in &self.overflow {
            overflow.extend((0..nbc).map(|jb| ja * nbc + jb));
        }
        for &jb in &other.overflow {
            overflow.extend((0..self.domain.dim()).map(|ja| ja * nbc + jb));
        }
        Self::from_triplets(domain, codomain, trip, overflow)
    }

    pub fn scale(&self, c: C64) -> Self {
        let mut out = self.clone();
        for v in &mut out.vals {
            *v *= c;
        }
        out
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if !same_basis(&self.domain, &other.domain) || !same_basis(&self.codomain, &other.codomain) {
            return Err(Error::DimensionMismatch("add: bases differ".into()));
        }
        let mut trip: Vec<_> = self.entries().collect();
        trip.extend(other.entries());
        let mut overflow = self.overflow.clone();
        overflow.extend_from_slice(&other.overflow);
        Self::from_triplets(Arc::clone(&self.domain), Arc::clone(&self.codomain), trip, overflow)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(C64::new(-1.0, 0.0)))
    }

    /// `[self, other] = self·other − other·self`.
    pub fn commutator(&self, other: &Self) -> Result<Self> {
        self.compose(other)?.sub(&other.compose(self)?)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.vals.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.vals.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Largest entry-wise deviation from `other` (bases must agree).
    pub fn max_deviation(&self, other: &Self) -> Result<f64> {
        Ok(self.sub(other)?.max_abs())
    }

    /// Entry-wise equality within `tol`.
    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.max_deviation(other).map(|d| d <= tol).unwrap_or(false)
    }

    /// Largest entry of `|A†A − I|`.
    pub fn unitarity_defect(&self) -> Result<f64> {
        let g = self.adjoint().compose(self)?;
        g.max_deviation(&Self::identity(&self.domain))
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        self.is_square() && self.unitarity_defect().map(|d| d <= tol).unwrap_or(false)
    }

    /// Whether the operator has no off-diagonal entries.
    pub fn is_diagonal(&self) -> bool {
        self.is_square() && self.entries().all(|(r, c, _)| r == c)
    }

    /// Diagonal entries (square operators).
    pub fn diagonal_entries(&self) -> Vec<C64> {
        (0..self.domain.dim().min(self.codomain.dim())).map(|i| self.get(i, i)).collect()
    }
}

/// `a ∘ b`.
pub fn compose(a: &LinearOperator, b: &LinearOperator) -> Result<LinearOperator> {
    a.compose(b)
}

/// `a ⊗ b`.
pub fn tensor(a: &LinearOperator, b: &LinearOperator) -> Result<LinearOperator> {
    a.tensor(b)
}

/// `A†`.
pub fn adjoint(a: &LinearOperator) -> LinearOperator {
    a.adjoint()
}

/// `op |state⟩`.
pub fn apply(op: &LinearOperator, state: &StateVector) -> Result<StateVector> {
    op.apply(state)
}

/// ⟨ψ|A|ψ⟩ for a square operator.
pub fn expectation(op: &LinearOperator, state: &StateVector) -> Result<C64> {
    if !op.is_square() {
        return Err(Error::DimensionMismatch("expectation needs a square operator".into()));
    }
    state.inner(&op.apply(state)?)
}
