//! Closed-form constructors for the parity-check (PCC), embedded
//! error-correcting (EECC) and binomial (BC) codes, plus the two-mode
//! binomial variant.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_bigint::BigUint;
use num_complex::Complex64 as C64;
use num_rational::Ratio;
use num_traits::{ToPrimitive, Zero};
use rand::Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::fock::{
    enumerate_irreducible_subspace, enumerate_truncated_space, expectation, number_operator, total_number_operator, Basis, BasisIndex,
    FockState, KetTerm, ModeLayout, StateVector,
};
use crate::linalg;
use crate::symmetry::{self, SymmetryOperator, ZPair};
use crate::{Error, Result};

/// Code family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CodeKind {
    Pcc,
    Eecc,
    Bc,
    Bc2Mode,
}

impl CodeKind {
    pub const ALL: [CodeKind; 4] = [CodeKind::Pcc, CodeKind::Eecc, CodeKind::Bc, CodeKind::Bc2Mode];

    pub fn tag(self) -> &'static str {
        match self {
            CodeKind::Pcc => "pcc",
            CodeKind::Eecc => "eecc",
            CodeKind::Bc => "bc",
            CodeKind::Bc2Mode => "bc2mode",
        }
    }

    /// Smallest admissible size parameter.
    pub fn min_size(self) -> u32 {
        match self {
            CodeKind::Pcc | CodeKind::Eecc => 2,
            CodeKind::Bc | CodeKind::Bc2Mode => 1,
        }
    }
}

impl fmt::Display for CodeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for CodeKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "pcc" => Ok(CodeKind::Pcc),
            "eecc" => Ok(CodeKind::Eecc),
            "bc" => Ok(CodeKind::Bc),
            "bc2mode" | "bc2" | "bc-2mode" => Ok(CodeKind::Bc2Mode),
            _ => Err(Error::UnknownName(format!("code {s}"))),
        }
    }
}

/// `(N, n, q, b, k)`: size parameter, physical qudits, physical dimension,
/// logical dimension, logical qudits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct CodeParams {
    #[serde(rename = "N")]
    pub size: u32,
    pub n: u32,
    pub q: u32,
    pub b: u32,
    pub k: u32,
}

/// A constructed code and its metadata.
#[derive(Debug, Clone)]
pub struct CodeSpec {
    pub kind: CodeKind,
    pub params: CodeParams,
    /// Physical code space the logical states are expressed in.
    pub basis: Basis,
    pub logical: Vec<StateVector>,
    /// Mean total photon number per logical state, from the closed form.
    pub total_photons: Ratio<u64>,
}

type Terms = Vec<(FockState, f64)>;

fn binomial(n: u32, k: u32) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::from(1u32);
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

/// `√C(2N−1, k) / 2^{N−1}` from the exact binomial.
fn bc_amplitude(n: u32, k: u32) -> f64 {
    let c = binomial(2 * n - 1, k).to_f64().expect("finite binomial");
    c.sqrt() / 2f64.powi(n as i32 - 1)
}

/// Binomial-code codewords as `(ket, amplitude)` lists.
pub fn bc_terms(n: u32) -> [Terms; 2] {
    let top = 2 * n - 1;
    let zero = (0..n).map(|j| (FockState(vec![2 * j, 2 * j, top - 2 * j]), bc_amplitude(n, 2 * j))).collect();
    let one = (0..n)
        .map(|j| (FockState(vec![2 * j + 1, 2 * j + 1, 2 * (n - 1 - j)]), bc_amplitude(n, 2 * j + 1)))
        .collect();
    [zero, one]
}

fn pair_terms(a: &[u32], b: &[u32], c: &[u32], d: &[u32]) -> Terms {
    let r = std::f64::consts::FRAC_1_SQRT_2;
    vec![(FockState([a, b].concat()), r), (FockState([c, d].concat()), r)]
}

/// PCC codewords on `H_{N−1}^{⊗2}`.
pub fn pcc_terms(n: u32) -> Vec<Terms> {
    if n == 2 {
        let (h, l) = ([1, 1, 0], [0, 0, 1]);
        return vec![pair_terms(&h, &h, &l, &l), pair_terms(&h, &l, &l, &h)];
    }
    let mut out = Vec::with_capacity(n as usize);
    if n % 2 == 0 {
        let m = n / 2;
        for t in 0..m {
            let h = [m + t, m + t, m - 1 - t];
            let l = [m - 1 - t, m - 1 - t, m + t];
            out.push(pair_terms(&h, &l, &l, &h));
            out.push(pair_terms(&h, &h, &l, &l));
        }
    } else {
        let m = n / 2;
        out.push(vec![(FockState(vec![m, m, m, m, m, m]), 1.0)]);
        for t in 1..=m {
            let h = [m + t, m + t, m - t];
            let l = [m - t, m - t, m + t];
            out.push(pair_terms(&h, &h, &l, &l));
            out.push(pair_terms(&h, &l, &l, &h));
        }
    }
    out
}

/// EECC codewords on `H_{2N−2}`.
pub fn eecc_terms(n: u32) -> Vec<Terms> {
    let top = 2 * n - 2;
    (0..n)
        .map(|j| {
            if j == n - 1 {
                vec![(FockState(vec![j, j, j]), 1.0)]
            } else {
                let r = std::f64::consts::FRAC_1_SQRT_2;
                vec![(FockState(vec![top - j, top - j, j]), r), (FockState(vec![j, j, top - j]), r)]
            }
        })
        .collect()
}

/// Two-mode binomial codewords on `{|n_s, n_p⟩ : n_s + n_p = 2N−1}`.
pub fn bc2_terms(n: u32) -> [Terms; 2] {
    let top = 2 * n - 1;
    let zero = (0..n).map(|j| (FockState(vec![2 * j, top - 2 * j]), bc_amplitude(n, 2 * j))).collect();
    let one = (0..n).map(|j| (FockState(vec![top - 2 * j, 2 * j]), bc_amplitude(n, 2 * j))).collect();
    [zero, one]
}

fn check_size(kind: CodeKind, n: u32) -> Result<()> {
    if n < kind.min_size() {
        return Err(Error::InvalidParameter(format!("{kind} needs N >= {}, got {n}", kind.min_size())));
    }
    if n > 64 {
        return Err(Error::InvalidParameter(format!("{kind} size {n} above the supported 64")));
    }
    Ok(())
}

fn states_from(basis: &Basis, terms: &[Terms]) -> Result<Vec<StateVector>> {
    terms
        .iter()
        .map(|t| {
            let t: Vec<_> = t.iter().map(|(s, a)| (s.clone(), C64::new(*a, 0.0))).collect();
            StateVector::from_terms(Arc::clone(basis), &t)
        })
        .collect()
}

/// Physical basis `{|n_s, n_p⟩ : n_s + n_p = total}`, ascending `n_s`.
pub fn constant_sum_basis(total: u32) -> Result<Basis> {
    let states = (0..=total).map(|s| FockState(vec![s, total - s])).collect();
    Ok(BasisIndex::new(ModeLayout::signal_pump(total), states)?.shared())
}

pub fn build_pcc(n: u32) -> Result<CodeSpec> {
    check_size(CodeKind::Pcc, n)?;
    let basis = enumerate_irreducible_subspace(n - 1, 2)?;
    let logical = states_from(&basis, &pcc_terms(n))?;
    Ok(CodeSpec {
        kind: CodeKind::Pcc,
        params: CodeParams { size: n, n: 2, q: n, b: n, k: 1 },
        basis,
        logical,
        total_photons: Ratio::from_integer(3 * (n as u64 - 1)),
    })
}

pub fn build_eecc(n: u32) -> Result<CodeSpec> {
    check_size(CodeKind::Eecc, n)?;
    let basis = enumerate_irreducible_subspace(2 * n - 2, 1)?;
    let logical = states_from(&basis, &eecc_terms(n))?;
    Ok(CodeSpec {
        kind: CodeKind::Eecc,
        params: CodeParams { size: n, n: 1, q: 2 * n - 1, b: n, k: 1 },
        basis,
        logical,
        total_photons: Ratio::from_integer(3 * (n as u64 - 1)),
    })
}

pub fn build_bc(n: u32) -> Result<CodeSpec> {
    check_size(CodeKind::Bc, n)?;
    let basis = enumerate_irreducible_subspace(2 * n - 1, 1)?;
    let logical = states_from(&basis, &bc_terms(n))?;
    Ok(CodeSpec {
        kind: CodeKind::Bc,
        params: CodeParams { size: n, n: 1, q: 2 * n, b: 2, k: 1 },
        basis,
        logical,
        total_photons: Ratio::new(6 * n as u64 - 3, 2),
    })
}

pub fn build_two_mode_bc(n: u32) -> Result<CodeSpec> {
    check_size(CodeKind::Bc2Mode, n)?;
    let basis = constant_sum_basis(2 * n - 1)?;
    let logical = states_from(&basis, &bc2_terms(n))?;
    Ok(CodeSpec {
        kind: CodeKind::Bc2Mode,
        params: CodeParams { size: n, n: 1, q: 2 * n, b: 2, k: 1 },
        basis,
        logical,
        total_photons: Ratio::from_integer(2 * n as u64 - 1),
    })
}

pub fn build(kind: CodeKind, n: u32) -> Result<CodeSpec> {
    match kind {
        CodeKind::Pcc => build_pcc(n),
        CodeKind::Eecc => build_eecc(n),
        CodeKind::Bc => build_bc(n),
        CodeKind::Bc2Mode => build_two_mode_bc(n),
    }
}

/// Symmetry operators defining `kind` at size `n`, built on `basis`.
pub fn symmetry_set(kind: CodeKind, n: u32, basis: &Basis) -> Result<Vec<SymmetryOperator>> {
    check_size(kind, n)?;
    let (m, groups) = match kind {
        CodeKind::Pcc => (n, 2),
        CodeKind::Eecc => (2 * n - 1, 1),
        CodeKind::Bc => (2 * n, 1),
        CodeKind::Bc2Mode => {
            return Err(Error::InvalidParameter("no three-mode symmetry set for the two-mode code".into()))
        }
    };
    let mut ops = Vec::new();
    for g in 1..=groups {
        ops.push(symmetry::z_pair_operator(m, ZPair::SignalPump, g, basis)?);
        ops.push(symmetry::z_pair_operator(m, ZPair::IdlerPump, g, basis)?);
    }
    match kind {
        CodeKind::Pcc => {
            ops.push(symmetry::inversion_operator(n - 1, &[1, 2], basis)?);
            ops.push(symmetry::swap_operator(basis)?);
        }
        CodeKind::Eecc => ops.push(symmetry::inversion_operator(2 * n - 2, &[1], basis)?),
        CodeKind::Bc => ops.push(symmetry::binomial_symmetry(n, basis)?),
        CodeKind::Bc2Mode => unreachable!(),
    }
    Ok(ops)
}

/// Synthesized joint unity eigenspace compared with the closed-form code.
#[derive(Debug, Clone, Serialize)]
pub struct SynthesisReport {
    pub code: String,
    pub stages: Vec<symmetry::Stage>,
    pub dim: usize,
    pub projector_distance: f64,
    /// Norm of the closed-form code space outside the synthesized space.
    pub containment_residual: f64,
    pub max_commutator: f64,
}

impl SynthesisReport {
    pub fn stage_dims(&self) -> Vec<usize> {
        self.stages.iter().map(|s| s.dim).collect()
    }
}

/// Builds the symmetry set of `kind` on the truncated product space with
/// the code's pump cap, extracts the joint unity eigenspace and compares it
/// with the closed-form codewords.
pub fn synthesize(kind: CodeKind, n: u32, tol: f64) -> Result<(SynthesisReport, symmetry::Eigenspace)> {
    let code = build(kind, n)?;
    let pump = code.layout().caps()[0];
    let space = enumerate_truncated_space(&ModeLayout::three_mode(code.layout().groups(), pump))?;
    let ops = symmetry_set(kind, n, &space)?;
    let e = symmetry::joint_unity_eigenspace(&ops, tol)?;
    let target = linalg::columns(&code.logical_in(&space)?)?;
    let w = e.isometry()?;
    let outside = (&target - &w * (w.adjoint() * &target)).norm();
    let report = SynthesisReport {
        code: code.name(),
        stages: e.stages.clone(),
        dim: e.dim(),
        projector_distance: linalg::projector_distance(&w, &target),
        containment_residual: outside,
        max_commutator: e.max_commutator,
    };
    Ok((report, e))
}

/// `Σ_a c_a |ã⟩` with `c_a` drawn uniformly from the unit square and then
/// normalized. Deterministic for a seeded `rng`.
pub fn random_superposition<R: Rng + ?Sized>(logical: &[StateVector], rng: &mut R) -> Result<StateVector> {
    let first = logical.first().ok_or_else(|| Error::InvalidParameter("no logical states".into()))?;
    let mut acc = StateVector::zeros(Arc::clone(first.basis()));
    for v in logical {
        let c = C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        acc = acc.add(&v.scale(c))?;
    }
    if acc.norm() < 1e-12 {
        return Ok(first.clone());
    }
    Ok(acc.normalized())
}

/// `k·log2(b) / (n·log2(q))`.
pub fn code_rate(p: &CodeParams) -> f64 {
    p.k as f64 * (p.b as f64).log2() / (p.n as f64 * (p.q as f64).log2())
}

impl CodeSpec {
    pub fn layout(&self) -> &ModeLayout {
        self.basis.layout()
    }

    pub fn logical_states(&self) -> &[StateVector] {
        &self.logical
    }

    pub fn logical_dim(&self) -> usize {
        self.logical.len()
    }

    pub fn code_rate(&self) -> f64 {
        code_rate(&self.params)
    }

    /// `⟨n̂_mode⟩` for each logical state (outer index) and mode.
    pub fn mean_photons_per_mode(&self) -> Result<Vec<Vec<f64>>> {
        let ops: Vec<_> =
            (0..self.layout().len()).map(|k| number_operator(k, &self.basis)).collect::<Result<_>>()?;
        self.logical
            .iter()
            .map(|v| ops.iter().map(|op| Ok(expectation(op, v)?.re)).collect())
            .collect()
    }

    /// `⟨Σ_k n̂_k⟩` for each logical state.
    pub fn mean_total_photons(&self) -> Result<Vec<f64>> {
        let op = total_number_operator(&self.basis);
        self.logical.iter().map(|v| Ok(expectation(&op, v)?.re)).collect()
    }

    /// Largest `|⟨ã|b̃⟩ − δ_ab|`.
    pub fn orthonormality_defect(&self) -> Result<f64> {
        let mut worst: f64 = 0.0;
        for (a, x) in self.logical.iter().enumerate() {
            for (b, y) in self.logical.iter().enumerate() {
                let target = if a == b { 1.0 } else { 0.0 };
                worst = worst.max((x.inner(y)? - C64::new(target, 0.0)).norm());
            }
        }
        Ok(worst)
    }

    /// Logical states re-expressed in a larger basis over the same modes.
    pub fn logical_in(&self, basis: &Basis) -> Result<Vec<StateVector>> {
        self.logical.iter().map(|v| v.embed(basis)).collect()
    }

    /// Largest occupation of each mode across all codeword supports.
    pub fn max_occupations(&self) -> Vec<u32> {
        let mut caps = vec![0u32; self.layout().len()];
        for v in &self.logical {
            for (s, _) in v.support() {
                for (c, &n) in caps.iter_mut().zip(&s.0) {
                    *c = (*c).max(n);
                }
            }
        }
        caps
    }

    pub fn name(&self) -> String {
        format!("{}(N={})", self.kind, self.params.size)
    }

    pub fn to_json(&self) -> Value {
        let layout = self.layout();
        let modes: Vec<String> = (0..layout.len()).map(|k| layout.mode_name(k)).collect();
        let codewords: Vec<Vec<KetTerm>> = self.logical.iter().map(|v| v.to_terms()).collect();
        json!({
            "name": self.kind.tag(),
            "parameters": self.params,
            "layout": { "modes": modes, "caps": layout.caps() },
            "codewords": codewords,
            "total_photons": self.total_photons.to_string(),
            "code_rate": self.code_rate(),
        })
    }
}
