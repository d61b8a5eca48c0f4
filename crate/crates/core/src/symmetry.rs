//! Symmetry operators and code synthesis as joint unity-eigenvalue
//! eigenspaces.
//!
//! Index convention: a `Ẑ` pair with modulus `M` fixes the states with
//! `n_a + n_b + 1 ≡ 0 (mod M)`, so on a space capped at `M − 1` photons per
//! mode the pair `(s,p), (i,p)` selects `H_{M−1}`. `V̂^{(M)}` inverts each
//! mode of a group as `n → M − n`.

use std::f64::consts::PI;
use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use serde::Serialize;

use crate::codes;
use crate::fock::{Basis, FockState, LinearOperator, ModeLabel, StateVector};
use crate::linalg;
use crate::{Error, Result};

/// A named unitary whose `eigenvalue`-eigenspace is imposed on a code.
#[derive(Debug, Clone)]
pub struct SymmetryOperator {
    pub name: String,
    pub operator: LinearOperator,
    pub eigenvalue: C64,
}

impl SymmetryOperator {
    pub fn new(name: impl Into<String>, operator: LinearOperator) -> Self {
        Self { name: name.into(), operator, eigenvalue: C64::new(1.0, 0.0) }
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        self.operator.is_unitary(tol)
    }

    /// `‖S v − λ v‖`.
    pub fn residual(&self, v: &StateVector) -> Result<f64> {
        let sv = self.operator.apply(v)?;
        Ok(sv.sub(&v.scale(self.eigenvalue))?.norm())
    }
}

/// Mode pair of a `Ẑ` symmetry.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ZPair {
    SignalPump,
    IdlerPump,
}

fn mode_of(basis: &Basis, label: ModeLabel, group: usize) -> Result<usize> {
    basis.layout().find(label, group).ok_or_else(|| {
        Error::DimensionMismatch(format!("layout has no {} mode in group {group}", label.tag()))
    })
}

/// `e^{i2π/M} Ẑ_a^{(M)} ⊗ Ẑ_b^{(M)}` on one group.
pub fn z_pair_operator(m: u32, pair: ZPair, group: usize, basis: &Basis) -> Result<SymmetryOperator> {
    if m == 0 {
        return Err(Error::InvalidParameter("Z modulus must be positive".into()));
    }
    let first = match pair {
        ZPair::SignalPump => ModeLabel::Signal,
        ZPair::IdlerPump => ModeLabel::Idler,
    };
    let a = mode_of(basis, first, group)?;
    let b = mode_of(basis, ModeLabel::Pump, group)?;
    let op = LinearOperator::diagonal(basis, |s| {
        let r = (1 + s.0[a] as u64 + s.0[b] as u64) % m as u64;
        if r == 0 {
            C64::new(1.0, 0.0)
        } else {
            C64::from_polar(1.0, 2.0 * PI * r as f64 / m as f64)
        }
    });
    let name = format!("Z^({m})_{}{},p{}", first.tag(), group, group);
    Ok(SymmetryOperator::new(name, op))
}

/// Photon-number inversion `n → m − n` on every mode of the listed groups.
pub fn inversion_operator(m: u32, groups: &[usize], basis: &Basis) -> Result<SymmetryOperator> {
    let layout = basis.layout();
    let mut modes = Vec::new();
    for &g in groups {
        if g == 0 || g > layout.groups() {
            return Err(Error::InvalidParameter(format!("no group {g}")));
        }
        modes.extend((0..layout.len()).filter(|&k| layout.modes()[k].group == g));
    }
    let mut trip = Vec::with_capacity(basis.dim());
    for (j, s) in basis.states().iter().enumerate() {
        let mut t = s.0.clone();
        for &k in &modes {
            if t[k] > m {
                return Err(Error::OutOfDomain(format!("state {s} outside the V^({m}) domain")));
            }
            t[k] = m - t[k];
        }
        let t = FockState(t);
        let i = basis.index_of(&t).ok_or_else(|| Error::MissingBasisState(t.to_string()))?;
        trip.push((i, j, C64::new(1.0, 0.0)));
    }
    let op = LinearOperator::from_triplets(Arc::clone(basis), Arc::clone(basis), trip, Vec::new())?;
    let tags: Vec<String> = groups.iter().map(|g| g.to_string()).collect();
    Ok(SymmetryOperator::new(format!("V^({m})_{}", tags.join("")), op))
}

/// Exchanges the occupations of groups 1 and 2.
pub fn swap_operator(basis: &Basis) -> Result<SymmetryOperator> {
    let layout = basis.layout();
    if layout.groups() != 2 || layout.len() % 2 != 0 {
        return Err(Error::InvalidLayout("swap needs exactly two groups".into()));
    }
    let half = layout.len() / 2;
    let (m, c) = (layout.modes(), layout.caps());
    for k in 0..half {
        if m[k].label != m[k + half].label || c[k] != c[k + half] {
            return Err(Error::InvalidLayout("swap needs identical group layouts".into()));
        }
    }
    let mut trip = Vec::with_capacity(basis.dim());
    for (j, s) in basis.states().iter().enumerate() {
        let t = FockState([&s.0[half..], &s.0[..half]].concat());
        let i = basis.index_of(&t).ok_or_else(|| Error::MissingBasisState(t.to_string()))?;
        trip.push((i, j, C64::new(1.0, 0.0)));
    }
    let op = LinearOperator::from_triplets(Arc::clone(basis), Arc::clone(basis), trip, Vec::new())?;
    Ok(SymmetryOperator::new("X_12", op))
}

/// `Π̂_s = (−1)^{n_s}` on the signal mode of `group`.
pub fn signal_parity_operator(group: usize, basis: &Basis) -> Result<SymmetryOperator> {
    let s = mode_of(basis, ModeLabel::Signal, group)?;
    let op = LinearOperator::diagonal(basis, |st| C64::new(if st.0[s] % 2 == 0 { 1.0 } else { -1.0 }, 0.0));
    Ok(SymmetryOperator::new("Pi_s", op))
}

/// Pseudo-beam-splitter on `H_{2N−1}` (identity on the rest of `basis`).
///
/// Maps `|+⟩ → |0̃⟩`, `|−⟩ → |1̃⟩` with `|±⟩ = (|0,0,2N−1⟩ ± |2N−1,2N−1,0⟩)/√2`
/// and the binomial codewords. The remaining kets `|j,j,2N−1−j⟩`,
/// `1 ≤ j ≤ 2N−2`, go to the Gram–Schmidt completion of `{|0̃⟩, |1̃⟩}` taken in
/// canonical basis order.
pub fn pseudo_beamsplitter(n: u32, basis: &Basis) -> Result<SymmetryOperator> {
    if n < 1 {
        return Err(Error::InvalidParameter("pseudo-beam-splitter needs N >= 1".into()));
    }
    if basis.layout().groups() != 1 {
        return Err(Error::InvalidLayout("pseudo-beam-splitter acts on one group".into()));
    }
    let top = 2 * n - 1;
    let h: Vec<FockState> = (0..=top).map(|j| FockState(vec![j, j, top - j])).collect();
    let idx: Vec<usize> = h
        .iter()
        .map(|s| basis.index_of(s).ok_or_else(|| Error::MissingBasisState(s.to_string())))
        .collect::<Result<_>>()?;
    let dim = h.len();
    // Work in H_{2N−1} coordinates (index j ↔ |j,j,2N−1−j⟩).
    let [zero, one] = codes::bc_terms(n);
    let to_local = |terms: &[(FockState, f64)]| {
        let mut v = vec![0.0; dim];
        for (s, a) in terms {
            v[s.0[0] as usize] = *a;
        }
        v
    };
    let mut outputs = vec![to_local(&zero), to_local(&one)];
    for j in 0..dim {
        if outputs.len() == dim {
            break;
        }
        let mut v = vec![0.0; dim];
        v[j] = 1.0;
        for _ in 0..2 {
            for u in &outputs {
                let ov: f64 = u.iter().zip(&v).map(|(a, b)| a * b).sum();
                v.iter_mut().zip(u).for_each(|(x, y)| *x -= ov * y);
            }
        }
        let nv = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if nv > 1e-6 {
            v.iter_mut().for_each(|x| *x /= nv);
            outputs.push(v);
        }
    }
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let mut inputs = vec![vec![0.0; dim], vec![0.0; dim]];
    inputs[0][0] = r;
    inputs[0][dim - 1] = r;
    inputs[1][0] = r;
    inputs[1][dim - 1] = -r;
    for j in 1..dim - 1 {
        let mut e = vec![0.0; dim];
        e[j] = 1.0;
        inputs.push(e);
    }
    let mut local = DMatrix::<f64>::zeros(dim, dim);
    for (o, i) in outputs.iter().zip(&inputs) {
        for a in 0..dim {
            for b in 0..dim {
                local[(a, b)] += o[a] * i[b];
            }
        }
    }
    let mut trip = Vec::new();
    for a in 0..dim {
        for b in 0..dim {
            if local[(a, b)].abs() > 1e-15 {
                trip.push((idx[a], idx[b], C64::new(local[(a, b)], 0.0)));
            }
        }
    }
    for (j, s) in basis.states().iter().enumerate() {
        if !h.contains(s) {
            trip.push((j, j, C64::new(1.0, 0.0)));
        }
    }
    let op = LinearOperator::from_triplets(Arc::clone(basis), Arc::clone(basis), trip, Vec::new())?;
    Ok(SymmetryOperator::new("U_BS", op))
}

/// `Π̂_s Û_BS V̂^{(2N−1)} Û_BS†`, the binomial-code symmetry.
pub fn binomial_symmetry(n: u32, basis: &Basis) -> Result<SymmetryOperator> {
    let u = pseudo_beamsplitter(n, basis)?.operator;
    let v = inversion_operator(2 * n - 1, &[1], basis)?.operator;
    let p = signal_parity_operator(1, basis)?.operator;
    let op = p.compose(&u.compose(&v)?.compose(&u.adjoint())?)?;
    Ok(SymmetryOperator::new("Pi_s U_BS V U_BS^dag", op))
}

/// Dimension of the surviving space after imposing one more operator.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Stage {
    pub operator: String,
    pub dim: usize,
}

/// Result of a joint-eigenspace synthesis.
#[derive(Debug, Clone)]
pub struct Eigenspace {
    pub vectors: Vec<StateVector>,
    /// Starting dimension followed by the dimension after each operator,
    /// diagonal operators first.
    pub stages: Vec<Stage>,
    /// Largest commutator norm among the restricted non-diagonal operators.
    pub max_commutator: f64,
}

impl Eigenspace {
    pub fn dim(&self) -> usize {
        self.vectors.len()
    }

    pub fn isometry(&self) -> Result<DMatrix<C64>> {
        linalg::columns(&self.vectors)
    }

    pub fn stage_dims(&self) -> Vec<usize> {
        self.stages.iter().map(|s| s.dim).collect()
    }
}

/// Orthonormal basis of `∩_j ker(S_j − λ_j)` over the operators' shared basis.
///
/// Diagonal operators are resolved exactly by basis selection. The remaining
/// operators must leave the selected subspace invariant; they are restricted
/// to it, checked for mutual commutation within `tol`, and the nullspace of
/// the stacked `(R_j − λ_j)` blocks is extracted by SVD with threshold `tol`.
pub fn joint_unity_eigenspace(ops: &[SymmetryOperator], tol: f64) -> Result<Eigenspace> {
    let first = ops.first().ok_or_else(|| Error::InvalidParameter("no symmetry operators".into()))?;
    let basis = Arc::clone(first.operator.domain());
    for op in ops {
        if !op.operator.is_square() || !crate::fock::same_basis(op.operator.domain(), &basis) {
            return Err(Error::DimensionMismatch(format!("{} is not on the shared basis", op.name)));
        }
    }
    let mut stages = vec![Stage { operator: "start".into(), dim: basis.dim() }];
    let mut keep: Vec<bool> = vec![true; basis.dim()];
    let (diag, rest): (Vec<&SymmetryOperator>, Vec<&SymmetryOperator>) =
        ops.iter().partition(|op| op.operator.is_diagonal());
    for op in &diag {
        let d = op.operator.diagonal_entries();
        for (k, x) in d.iter().enumerate() {
            if (x - op.eigenvalue).norm() > tol {
                keep[k] = false;
            }
        }
        stages.push(Stage { operator: op.name.clone(), dim: keep.iter().filter(|&&b| b).count() });
    }
    let selected: Vec<usize> = (0..basis.dim()).filter(|&k| keep[k]).collect();
    let mut w = DMatrix::<C64>::zeros(basis.dim(), selected.len());
    for (c, &k) in selected.iter().enumerate() {
        w[(k, c)] = C64::new(1.0, 0.0);
    }
    eigenspace_within(&basis, w, &rest, tol, stages)
}

/// Like [`joint_unity_eigenspace`] but starting from the span of `start`
/// instead of the full basis.
pub fn joint_unity_eigenspace_within(
    start: &[StateVector],
    ops: &[SymmetryOperator],
    tol: f64,
) -> Result<Eigenspace> {
    let w = linalg::columns(start)?;
    let basis = Arc::clone(start[0].basis());
    let stages = vec![Stage { operator: "start".into(), dim: w.ncols() }];
    let refs: Vec<&SymmetryOperator> = ops.iter().collect();
    eigenspace_within(&basis, w, &refs, tol, stages)
}

fn eigenspace_within(
    basis: &Basis,
    w: DMatrix<C64>,
    ops: &[&SymmetryOperator],
    tol: f64,
    mut stages: Vec<Stage>,
) -> Result<Eigenspace> {
    if w.ncols() == 0 {
        return Err(Error::EmptyEigenspace);
    }
    let r = w.ncols();
    let mut restricted = Vec::with_capacity(ops.len());
    for op in ops {
        if !crate::fock::same_basis(op.operator.domain(), basis) {
            return Err(Error::DimensionMismatch(format!("{} is not on the shared basis", op.name)));
        }
        let sw = op.operator.mul_dense(&w)?;
        let rj = w.adjoint() * &sw;
        let residual = linalg::max_abs_diff(&sw, &(&w * &rj));
        if residual > tol {
            return Err(Error::NotInvariant { name: op.name.clone(), residual });
        }
        restricted.push(rj - DMatrix::<C64>::identity(r, r) * op.eigenvalue);
    }
    let mut max_commutator: f64 = 0.0;
    for a in 0..restricted.len() {
        for b in a + 1..restricted.len() {
            let (x, y) = (&restricted[a], &restricted[b]);
            let c = x * y - y * x;
            max_commutator = max_commutator.max(c.norm());
        }
    }
    if max_commutator > tol {
        return Err(Error::NonCommutingOperators { max_norm: max_commutator });
    }
    // Sequential pass for the dimension narrative.
    let mut cur = DMatrix::<C64>::identity(r, r);
    for (op, rj) in ops.iter().zip(&restricted) {
        let k = linalg::nullspace(&(rj * &cur), tol);
        cur = &cur * k;
        stages.push(Stage { operator: op.name.clone(), dim: cur.ncols() });
    }
    let coeffs = if restricted.is_empty() {
        DMatrix::<C64>::identity(r, r)
    } else {
        let mut stacked = DMatrix::<C64>::zeros(r * restricted.len(), r);
        for (j, rj) in restricted.iter().enumerate() {
            stacked.view_mut((j * r, 0), (r, r)).copy_from(rj);
        }
        linalg::nullspace(&stacked, tol)
    };
    if coeffs.ncols() == 0 {
        return Err(Error::EmptyEigenspace);
    }
    let q = linalg::canonicalize(&(&w * coeffs));
    let vectors = linalg::to_states(basis, &q)?;
    Ok(Eigenspace { vectors, stages, max_commutator })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{enumerate_irreducible_subspace, enumerate_truncated_space, ModeLayout};

    fn s(v: &[u32]) -> FockState {
        FockState(v.to_vec())
    }

    #[test]
    fn z_pair_fixes_irreducible_states_only() {
        let b = enumerate_truncated_space(&ModeLayout::three_mode(1, 2)).unwrap();
        let zs = z_pair_operator(3, ZPair::SignalPump, 1, &b).unwrap();
        let zi = z_pair_operator(3, ZPair::IdlerPump, 1, &b).unwrap();
        for n in 0..=2 {
            let k = b.index_of(&s(&[n, n, 2 - n])).unwrap();
            assert!((zs.operator.get(k, k) - C64::new(1.0, 0.0)).norm() < 1e-15);
            assert!((zi.operator.get(k, k) - C64::new(1.0, 0.0)).norm() < 1e-15);
        }
        let k = b.index_of(&s(&[1, 0, 1])).unwrap();
        assert!((zi.operator.get(k, k) - C64::new(1.0, 0.0)).norm() > 0.5);
    }

    #[test]
    fn inversion_and_swap_are_involutions() {
        let h2 = enumerate_irreducible_subspace(2, 1).unwrap();
        let v = inversion_operator(2, &[1], &h2).unwrap();
        assert_eq!(v.operator.element(&s(&[2, 2, 0]), &s(&[0, 0, 2])), C64::new(1.0, 0.0));
        assert_eq!(v.operator.element(&s(&[1, 1, 1]), &s(&[1, 1, 1])), C64::new(1.0, 0.0));
        let vv = v.operator.compose(&v.operator).unwrap();
        assert!(vv.approx_eq(&LinearOperator::identity(&h2), 0.0));

        let h22 = enumerate_irreducible_subspace(2, 2).unwrap();
        let x = swap_operator(&h22).unwrap();
        assert_eq!(x.operator.element(&s(&[0, 0, 2, 2, 2, 0]), &s(&[2, 2, 0, 0, 0, 2])), C64::new(1.0, 0.0));
        let xx = x.operator.compose(&x.operator).unwrap();
        assert!(xx.approx_eq(&LinearOperator::identity(&h22), 0.0));
    }

    #[test]
    fn pseudo_beamsplitter_is_unitary_and_maps_plus() {
        let h3 = enumerate_irreducible_subspace(3, 1).unwrap();
        let u = pseudo_beamsplitter(2, &h3).unwrap();
        assert!(u.is_unitary(1e-10));
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let plus = StateVector::from_real(Arc::clone(&h3), &[(&[0, 0, 3], r), (&[3, 3, 0], r)]).unwrap();
        let out = u.operator.apply(&plus).unwrap();
        let zero = StateVector::from_real(Arc::clone(&h3), &[(&[0, 0, 3], 0.5), (&[2, 2, 1], 3f64.sqrt() / 2.0)])
            .unwrap();
        assert!(out.distance(&zero).unwrap() < 1e-12);
    }

    #[test]
    fn identity_set_returns_full_space() {
        let h2 = enumerate_irreducible_subspace(2, 1).unwrap();
        let id = SymmetryOperator::new("I", LinearOperator::identity(&h2));
        let e = joint_unity_eigenspace(&[id], 1e-9).unwrap();
        assert_eq!(e.dim(), 3);
    }

    #[test]
    fn non_commuting_set_is_rejected() {
        let h2 = enumerate_irreducible_subspace(2, 1).unwrap();
        let v = inversion_operator(2, &[1], &h2).unwrap();
        // cyclic shift on H_2 does not commute with the inversion
        let trip = vec![(1, 0, C64::new(1.0, 0.0)), (2, 1, C64::new(1.0, 0.0)), (0, 2, C64::new(1.0, 0.0))];
        let c = LinearOperator::from_triplets(Arc::clone(&h2), Arc::clone(&h2), trip, Vec::new()).unwrap();
        let err = joint_unity_eigenspace(&[v, SymmetryOperator::new("C", c)], 1e-9).unwrap_err();
        assert!(matches!(err, Error::NonCommutingOperators { .. }));
    }

    #[test]
    fn empty_eigenspace_is_reported() {
        let h2 = enumerate_irreducible_subspace(2, 1).unwrap();
        let mut neg = SymmetryOperator::new("I at -1", LinearOperator::identity(&h2));
        neg.eigenvalue = C64::new(-1.0, 0.0);
        let id = SymmetryOperator::new("I", LinearOperator::identity(&h2));
        assert_eq!(joint_unity_eigenspace(&[id, neg], 1e-9).unwrap_err(), Error::EmptyEigenspace);
    }
}
