//! Error-operator families, Knill–Laflamme checks, canonical recovery and
//! the binomial-code moment identities.

use std::fmt;
use std::sync::Arc;

use nalgebra::DMatrix;
use num_bigint::BigUint;
use num_complex::Complex64 as C64;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::codes::CodeSpec;
use crate::fock::{
    enumerate_truncated_space, gain_monomial, loss_monomial, number_monomial, number_operator, Basis,
    FockState, LinearOperator, StateVector,
};
use crate::linalg;
use crate::{Error, Result};

/// Physical origin of an error operator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ErrorKind {
    Identity,
    Loss,
    Gain,
    Dephasing,
    Kraus,
}

/// An error operator, stored as a power series in `√γ`:
/// `E = Σ_p (√γ)^p O_p`. Combinatorial errors have the single term `p = 0`.
#[derive(Debug, Clone)]
pub struct ErrorOperator {
    pub label: String,
    pub kind: ErrorKind,
    pub order: u32,
    sqrt_gamma: f64,
    terms: Vec<(u32, LinearOperator)>,
}

impl ErrorOperator {
    pub fn new(label: impl Into<String>, kind: ErrorKind, order: u32, op: LinearOperator) -> Self {
        Self { label: label.into(), kind, order, sqrt_gamma: 1.0, terms: vec![(0, op)] }
    }

    /// Operator given by a `√γ` series.
    pub fn series(
        label: impl Into<String>,
        kind: ErrorKind,
        order: u32,
        gamma: f64,
        terms: Vec<(u32, LinearOperator)>,
    ) -> Result<Self> {
        if terms.is_empty() {
            return Err(Error::InvalidParameter("empty error series".into()));
        }
        let d = terms[0].1.domain().clone();
        let c = terms[0].1.codomain().clone();
        for (_, t) in &terms {
            if !crate::fock::same_basis(t.domain(), &d) || !crate::fock::same_basis(t.codomain(), &c) {
                return Err(Error::DimensionMismatch("series terms on different bases".into()));
            }
        }
        Ok(Self { label: label.into(), kind, order, sqrt_gamma: gamma.sqrt(), terms })
    }

    pub fn domain(&self) -> &Basis {
        self.terms[0].1.domain()
    }

    pub fn codomain(&self) -> &Basis {
        self.terms[0].1.codomain()
    }

    /// The summed operator.
    pub fn operator(&self) -> Result<LinearOperator> {
        let mut acc = LinearOperator::zero(self.domain(), self.codomain());
        for (p, t) in &self.terms {
            acc = acc.add(&t.scale(C64::new(self.sqrt_gamma.powi(*p as i32), 0.0)))?;
        }
        Ok(acc)
    }

    pub fn apply(&self, v: &StateVector) -> Result<StateVector> {
        let mut acc = StateVector::zeros(Arc::clone(self.codomain()));
        for (p, img) in self.apply_series(v)? {
            acc = acc.add(&img.scale(C64::new(self.sqrt_gamma.powi(p as i32), 0.0)))?;
        }
        Ok(acc)
    }

    /// Images `O_p v` tagged with their `√γ` power.
    pub fn apply_series(&self, v: &StateVector) -> Result<Vec<(u32, StateVector)>> {
        self.terms.iter().map(|(p, t)| Ok((*p, t.apply(v)?))).collect()
    }

    pub fn sqrt_gamma(&self) -> f64 {
        self.sqrt_gamma
    }
}

impl fmt::Display for ErrorOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label)
    }
}

/// All exponent vectors of length `len` with the given total degree, the
/// first mode's exponent descending.
pub fn compositions(len: usize, degree: u32) -> Vec<Vec<u32>> {
    if len == 0 {
        return if degree == 0 { vec![Vec::new()] } else { Vec::new() };
    }
    let mut out = Vec::new();
    for first in (0..=degree).rev() {
        for rest in compositions(len - 1, degree - first) {
            let mut v = vec![first];
            v.extend(rest);
            out.push(v);
        }
    }
    out
}

fn monomial_label(prefix: &str, names: &[String], powers: &[u32]) -> String {
    let parts: Vec<String> = names
        .iter()
        .zip(powers)
        .filter(|(_, &p)| p > 0)
        .map(|(n, &p)| if p == 1 { format!("{prefix}_{n}") } else { format!("{prefix}_{n}^{p}") })
        .collect();
    if parts.is_empty() {
        "I".into()
    } else {
        parts.join(" ")
    }
}

fn mode_names(basis: &Basis) -> Vec<String> {
    (0..basis.layout().len()).map(|k| basis.layout().mode_name(k)).collect()
}

/// Loss monomial `Π a_k^{p_k}` within `basis`, labelled.
pub fn loss_error(basis: &Basis, powers: &[u32]) -> ErrorOperator {
    let names = mode_names(basis);
    let op = loss_monomial(basis, basis, powers);
    ErrorOperator::new(monomial_label("a", &names, powers), ErrorKind::Loss, powers.iter().sum(), op)
}

/// Gain monomial `Π a_k†^{p_k}` within `basis`, labelled.
pub fn gain_error(basis: &Basis, powers: &[u32]) -> ErrorOperator {
    let names = mode_names(basis);
    let op = gain_monomial(basis, basis, powers);
    ErrorOperator::new(monomial_label("adag", &names, powers), ErrorKind::Gain, powers.iter().sum(), op)
}

/// Dephasing monomial `Π n_k^{p_k}` within `basis`, labelled.
pub fn dephasing_error(basis: &Basis, powers: &[u32]) -> ErrorOperator {
    let names = mode_names(basis);
    let op = number_monomial(basis, powers);
    let degree: u32 = powers.iter().sum();
    ErrorOperator::new(monomial_label("n", &names, powers), ErrorKind::Dephasing, degree + 1, op)
}

pub fn identity_error(basis: &Basis) -> ErrorOperator {
    ErrorOperator::new("I", ErrorKind::Identity, 0, LinearOperator::identity(basis))
}

/// `ξ_m`: the identity, every `m`-photon loss and gain monomial, and every
/// dephasing monomial of degree `m − 1` (degree 0 is the identity and is not
/// repeated).
pub fn xi_set(m: u32, basis: &Basis) -> Vec<ErrorOperator> {
    let len = basis.layout().len();
    let mut out = vec![identity_error(basis)];
    if m == 0 {
        return out;
    }
    let comps = compositions(len, m);
    out.extend(comps.iter().map(|p| loss_error(basis, p)));
    out.extend(comps.iter().map(|p| gain_error(basis, p)));
    if m >= 2 {
        out.extend(compositions(len, m - 1).iter().map(|p| dephasing_error(basis, p)));
    }
    out
}

/// `ξ_m` restricted to the identity plus one error kind.
pub fn xi_homogeneous(m: u32, kind: ErrorKind, basis: &Basis) -> Vec<ErrorOperator> {
    xi_set(m, basis).into_iter().filter(|e| e.kind == ErrorKind::Identity || e.kind == kind).collect()
}

fn check_gamma(gamma: f64) -> Result<()> {
    if !(0.0..1.0).contains(&gamma) || gamma.is_nan() {
        return Err(Error::InvalidParameter(format!("gamma {gamma} outside [0, 1)")));
    }
    Ok(())
}

/// Lowest-order single-photon loss Kraus set `E_0 = I − γ Σ n̂/2`,
/// `E_ℓ = √γ a_ℓ`, one `E_ℓ` per mode. At `γ = 0` only `E_0` is returned.
pub fn lowest_order_loss_kraus(gamma: f64, basis: &Basis) -> Result<Vec<ErrorOperator>> {
    check_gamma(gamma)?;
    let names = mode_names(basis);
    let mut total = LinearOperator::zero(basis, basis);
    for k in 0..names.len() {
        total = total.add(&number_operator(k, basis)?)?;
    }
    let e0 = ErrorOperator::series(
        "E_0",
        ErrorKind::Kraus,
        0,
        gamma,
        vec![(0, LinearOperator::identity(basis)), (2, total.scale(C64::new(-0.5, 0.0)))],
    )?;
    let mut out = vec![e0];
    if gamma == 0.0 {
        return Ok(out);
    }
    for (k, name) in names.iter().enumerate() {
        let mut powers = vec![0; names.len()];
        powers[k] = 1;
        let op = loss_monomial(basis, basis, &powers);
        out.push(ErrorOperator::series(format!("E_{name}"), ErrorKind::Kraus, 1, gamma, vec![(1, op)])?);
    }
    Ok(out)
}

/// `Σ_k E_k†E_k − I` for a Kraus set, as a max-entry residual.
pub fn completeness_residual(kraus: &[ErrorOperator]) -> Result<f64> {
    let first = kraus.first().ok_or_else(|| Error::InvalidParameter("empty Kraus set".into()))?;
    let mut acc = LinearOperator::identity(first.domain()).scale(C64::new(-1.0, 0.0));
    for e in kraus {
        let op = e.operator()?;
        acc = acc.add(&op.adjoint().compose(&op)?)?;
    }
    Ok(acc.max_abs())
}

/// Amplitude-damping Kraus operator `Â(m)` for losing exactly `m` photons
/// from `mode`: `Σ_{n≥m} √C(n,m) √γ^m √(1−γ)^{n−m} |n−m⟩⟨n|` on `basis`.
pub fn amplitude_damping_kraus(gamma: f64, m: u32, mode: usize, basis: &Basis) -> Result<ErrorOperator> {
    check_gamma(gamma)?;
    if mode >= basis.layout().len() {
        return Err(Error::InvalidParameter(format!("mode {mode} outside layout")));
    }
    let op = LinearOperator::from_basis_map(basis, basis, |s| {
        let n = s.0[mode];
        if n < m {
            return Vec::new();
        }
        let c = binomial_u(n, m).to_f64().expect("finite");
        let amp = c.sqrt() * gamma.powf(m as f64 / 2.0) * (1.0 - gamma).powf((n - m) as f64 / 2.0);
        let mut t = s.0.clone();
        t[mode] -= m;
        vec![(FockState(t), C64::new(amp, 0.0))]
    });
    let label = format!("A_{}({m})", basis.layout().mode_name(mode));
    Ok(ErrorOperator::new(label, ErrorKind::Kraus, m, op))
}

/// `Â_a(h) Â_b(m−h)`, a joint amplitude-damping event on two modes.
pub fn amplitude_damping_pair(
    gamma: f64,
    h: u32,
    m: u32,
    modes: (usize, usize),
    basis: &Basis,
) -> Result<ErrorOperator> {
    if h > m {
        return Err(Error::InvalidParameter(format!("h = {h} exceeds m = {m}")));
    }
    let a = amplitude_damping_kraus(gamma, h, modes.0, basis)?;
    let b = amplitude_damping_kraus(gamma, m - h, modes.1, basis)?;
    let op = a.operator()?.compose(&b.operator()?)?;
    Ok(ErrorOperator::new(format!("{} {}", a.label, b.label), ErrorKind::Kraus, m, op))
}

/// Truncated product space over the code's layout with each cap raised to
/// the code's largest occupation plus `extra`.
pub fn enclosing_space(code: &CodeSpec, extra: u32) -> Result<Basis> {
    let caps: Vec<u32> = code.max_occupations().iter().map(|c| c + extra).collect();
    enumerate_truncated_space(&code.layout().with_caps(caps)?)
}

/// How far the `√γ` series is kept when forming `E_u†E_v`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum KlPolicy {
    /// Full products.
    Exact,
    /// Only terms of total order `γ^1` or lower.
    LowestOrder,
}

/// Knill–Laflamme report for a code and an error set.
#[derive(Debug, Clone, Serialize)]
pub struct KlReport {
    pub labels: Vec<String>,
    pub kinds: Vec<ErrorKind>,
    /// `α_uv`, averaged over the logical basis.
    pub alpha: Vec<Vec<C64>>,
    /// `max |⟨ã|E_u†E_v|b̃⟩|` over `a ≠ b`.
    pub max_offdiag_residual: f64,
    /// `max |⟨ã|E_u†E_v|ã⟩ − α_uv|`.
    pub max_distortion_residual: f64,
    /// Whether `α` is diagonal apart from dephasing–dephasing pairs.
    pub nondegenerate: bool,
    pub verdict: bool,
    pub tolerance: f64,
    pub policy: KlPolicy,
    /// `(u, v, a, b, residual)` of the worst element.
    pub worst: Option<(usize, usize, usize, usize, f64)>,
}

impl KlReport {
    pub fn alpha_matrix(&self) -> DMatrix<C64> {
        let n = self.alpha.len();
        DMatrix::from_fn(n, n, |i, j| self.alpha[i][j])
    }

    pub fn alpha_of(&self, u: &str, v: &str) -> Option<C64> {
        let i = self.labels.iter().position(|l| l == u)?;
        let j = self.labels.iter().position(|l| l == v)?;
        Some(self.alpha[i][j])
    }

    /// Largest deviation of `α` from Hermiticity.
    pub fn hermiticity_defect(&self) -> f64 {
        let a = self.alpha_matrix();
        linalg::max_abs_diff(&a, &a.adjoint())
    }

    /// Smallest eigenvalue of the Hermitian part of `α`.
    pub fn min_alpha_eigenvalue(&self) -> f64 {
        let a = self.alpha_matrix();
        let h = (&a + a.adjoint()) * C64::new(0.5, 0.0);
        linalg::hermitian_eigen(&h).0.into_iter().fold(f64::INFINITY, f64::min)
    }

    pub fn to_json(&self) -> Value {
        let alpha: Vec<Vec<[f64; 2]>> =
            self.alpha.iter().map(|r| r.iter().map(|z| [z.re, z.im]).collect()).collect();
        json!({
            "labels": self.labels,
            "alpha": alpha,
            "max_offdiag_residual": self.max_offdiag_residual,
            "max_distortion_residual": self.max_distortion_residual,
            "nondegenerate": self.nondegenerate,
            "verdict": self.verdict,
            "tolerance": self.tolerance,
            "policy": self.policy,
            "worst": self.worst.map(|(u, v, a, b, r)| json!({
                "u": self.labels[u], "v": self.labels[v], "a": a, "b": b, "residual": r
            })),
        })
    }
}

/// Evaluates `⟨ã|E_u†E_v|b̃⟩` for every error pair and logical pair.
///
/// `logical` must live on the errors' domain. The verdict is the standard
/// condition `⟨ã|E_u†E_v|b̃⟩ = α_uv δ_ab` within `tol`.
pub fn kl_check(logical: &[StateVector], errors: &[ErrorOperator], policy: KlPolicy, tol: f64) -> Result<KlReport> {
    if logical.is_empty() || errors.is_empty() {
        return Err(Error::InvalidParameter("kl_check needs codewords and errors".into()));
    }
    // images[u][a] = series of E_u |ã⟩
    let images: Vec<Vec<Vec<(u32, StateVector)>>> = errors
        .par_iter()
        .map(|e| logical.iter().map(|v| e.apply_series(v)).collect::<Result<Vec<_>>>())
        .collect::<Result<_>>()?;
    let ne = errors.len();
    let d = logical.len();
    let pairs: Vec<(usize, usize)> = (0..ne).flat_map(|u| (0..ne).map(move |v| (u, v))).collect();
    let blocks: Vec<DMatrix<C64>> = pairs
        .par_iter()
        .map(|&(u, v)| {
            let (su, sv) = (errors[u].sqrt_gamma, errors[v].sqrt_gamma);
            let mut m = DMatrix::<C64>::zeros(d, d);
            for a in 0..d {
                for b in 0..d {
                    let mut acc = C64::new(0.0, 0.0);
                    for (p, x) in &images[u][a] {
                        for (q, y) in &images[v][b] {
                            if policy == KlPolicy::LowestOrder && p + q > 2 {
                                continue;
                            }
                            let w = su.powi(*p as i32) * sv.powi(*q as i32);
                            acc += x.inner(y)? * w;
                        }
                    }
                    m[(a, b)] = acc;
                }
            }
            Ok(m)
        })
        .collect::<Result<_>>()?;
    let mut alpha = vec![vec![C64::new(0.0, 0.0); ne]; ne];
    let (mut off, mut dist) = (0.0f64, 0.0f64);
    let mut worst: Option<(usize, usize, usize, usize, f64)> = None;
    let mut nondegenerate = true;
    for (&(u, v), m) in pairs.iter().zip(&blocks) {
        let mean = (0..d).map(|a| m[(a, a)]).sum::<C64>() / d as f64;
        alpha[u][v] = mean;
        for a in 0..d {
            for b in 0..d {
                let r = if a == b { (m[(a, a)] - mean).norm() } else { m[(a, b)].norm() };
                if a == b {
                    dist = dist.max(r);
                } else {
                    off = off.max(r);
                }
                if worst.map_or(true, |w| r > w.4) {
                    worst = Some((u, v, a, b, r));
                }
            }
        }
        let both_dephasing =
            errors[u].kind == ErrorKind::Dephasing && errors[v].kind == ErrorKind::Dephasing;
        if u != v && !both_dephasing && mean.norm() > tol {
            nondegenerate = false;
        }
    }
    Ok(KlReport {
        labels: errors.iter().map(|e| e.label.clone()).collect(),
        kinds: errors.iter().map(|e| e.kind).collect(),
        alpha,
        max_offdiag_residual: off,
        max_distortion_residual: dist,
        nondegenerate,
        verdict: off <= tol && dist <= tol,
        tolerance: tol,
        policy,
        worst,
    })
}

/// [`kl_check`] for a code, embedding its codewords into the errors' domain.
pub fn kl_check_code(code: &CodeSpec, errors: &[ErrorOperator], policy: KlPolicy, tol: f64) -> Result<KlReport> {
    let first = errors.first().ok_or_else(|| Error::InvalidParameter("no errors".into()))?;
    let logical = code.logical_in(first.domain())?;
    kl_check(&logical, errors, policy, tol)
}

/// Side of the binomial-code moment identity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum MomentSide {
    Zero,
    One,
}

/// Error family of the binomial-code moment identity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum MomentKind {
    Loss,
    Gain,
    Dephasing,
}

fn binomial_u(n: u32, k: u32) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

/// `n!/(n−k)!`, zero when `k > n`.
fn falling(n: u32, k: u32) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    ((n - k + 1)..=n).fold(BigUint::one(), |acc, x| acc * x)
}

/// `(n+k)!/n!`.
fn rising(n: u32, k: u32) -> BigUint {
    ((n + 1)..=(n + k)).fold(BigUint::one(), |acc, x| acc * x)
}

fn power(n: u32, k: u32) -> BigUint {
    BigUint::from(n).pow(k)
}

/// Numerator of the binomial-code moment `⟨k̃|E†E|k̃⟩ · 4^{N−1}` in exact
/// integers.
///
/// For loss and gain the error is `a_s^h a_i^g a_p^ℓ` (or its adjoint) with
/// `ℓ = m − h − g`; for dephasing it is `n_s^h n_i^g n_p^ℓ` with
/// `ℓ = m − 1 − h − g`. The zero side sums over `|2j,2j,2N−1−2j⟩` with weight
/// `C(2N−1,2j)`; the one side over `|2N−1−2j′,2N−1−2j′,2j′⟩` with weight
/// `C(2N−1,2j′)`, which is `|1̃⟩` re-indexed.
pub fn bc_moment_exact(n: u32, h: u32, g: u32, m: u32, side: MomentSide, kind: MomentKind) -> Result<BigUint> {
    if n < 1 {
        return Err(Error::InvalidParameter("N must be at least 1".into()));
    }
    if h + g > m || m > n {
        return Err(Error::InvalidParameter(format!("need h + g <= m <= N, got h={h} g={g} m={m} N={n}")));
    }
    if kind == MomentKind::Dephasing && (m == 0 || h + g > m - 1) {
        return Err(Error::InvalidParameter(format!("dephasing needs h + g <= m - 1, got h={h} g={g} m={m}")));
    }
    let top = 2 * n - 1;
    let mut acc = BigUint::zero();
    for j in 0..n {
        let w = binomial_u(top, 2 * j);
        let (sig, pump) = match side {
            MomentSide::Zero => (2 * j, top - 2 * j),
            MomentSide::One => (top - 2 * j, 2 * j),
        };
        let term = match kind {
            MomentKind::Loss => falling(sig, h) * falling(sig, g) * falling(pump, m - h - g),
            MomentKind::Gain => rising(sig, h) * rising(sig, g) * rising(pump, m - h - g),
            MomentKind::Dephasing => power(sig, 2 * (h + g)) * power(pump, 2 * (m - 1 - h - g)),
        };
        acc += w * term;
    }
    Ok(acc)
}

/// [`bc_moment_exact`] divided by `4^{N−1}`.
pub fn bc_moment_sum(n: u32, h: u32, g: u32, m: u32, side: MomentSide, kind: MomentKind) -> Result<f64> {
    let num = bc_moment_exact(n, h, g, m, side, kind)?;
    let den = BigUint::from(4u32).pow(n - 1);
    let q = num.to_f64().unwrap_or(f64::INFINITY) / den.to_f64().unwrap_or(f64::INFINITY);
    Ok(q)
}

/// Knill–Laflamme recovery channel built from a correctable error set.
#[derive(Debug, Clone)]
pub struct Recovery {
    pub kraus: Vec<LinearOperator>,
    /// Eigenvalues of `α` that were kept.
    pub weights: Vec<f64>,
    /// Logical states on the recovery's codomain.
    pub logical: Vec<StateVector>,
}

impl Recovery {
    /// Unnormalized branches `R_k φ`.
    pub fn branches(&self, corrupted: &StateVector) -> Result<Vec<StateVector>> {
        self.kraus.iter().map(|r| r.apply(corrupted)).collect()
    }

    /// `Σ_k |⟨ψ|R_k φ⟩|² / Σ_k ‖R_k φ‖²`.
    pub fn fidelity(&self, input: &StateVector, corrupted: &StateVector) -> Result<f64> {
        let mut num = 0.0;
        let mut den = 0.0;
        for b in self.branches(corrupted)? {
            num += input.inner(&b)?.norm_sqr();
            den += b.norm_sqr();
        }
        if den == 0.0 {
            return Ok(0.0);
        }
        Ok(num / (den * input.norm_sqr()))
    }
}

/// Canonical recovery: diagonalize `α = U D U†`, form `F_k = Σ_u U_uk E_u`,
/// and map each `F_k|ã⟩/√d_k` back to `|ã⟩`. Eigenvalues at or below `tol`
/// are dropped.
pub fn canonical_recovery(logical: &[StateVector], errors: &[ErrorOperator], tol: f64) -> Result<Recovery> {
    let report = kl_check(logical, errors, KlPolicy::Exact, tol)?;
    if !report.verdict {
        let r = report.max_offdiag_residual.max(report.max_distortion_residual);
        return Err(Error::KlViolation { residual: r });
    }
    let alpha = report.alpha_matrix();
    let h = (&alpha + alpha.adjoint()) * C64::new(0.5, 0.0);
    let (vals, vecs) = linalg::hermitian_eigen(&h);
    let ops: Vec<LinearOperator> = errors.iter().map(|e| e.operator()).collect::<Result<_>>()?;
    let codomain = Arc::clone(errors[0].codomain());
    let logical_out: Vec<StateVector> = logical.iter().map(|v| v.embed(&codomain)).collect::<Result<_>>()?;
    let mut kraus = Vec::new();
    let mut weights = Vec::new();
    for (k, &dk) in vals.iter().enumerate() {
        if dk <= tol {
            continue;
        }
        let mut f = LinearOperator::zero(errors[0].domain(), &codomain);
        for (u, op) in ops.iter().enumerate() {
            let c = vecs[(u, k)];
            if c.norm() > 0.0 {
                f = f.add(&op.scale(c))?;
            }
        }
        let norm = C64::new(1.0 / dk.sqrt(), 0.0);
        let mut pairs = Vec::with_capacity(logical.len());
        let images: Vec<StateVector> =
            logical.iter().map(|v| Ok(f.apply(v)?.scale(norm))).collect::<Result<_>>()?;
        for (img, out) in images.iter().zip(&logical_out) {
            pairs.push((out, img));
        }
        kraus.push(LinearOperator::from_outer_products(&pairs)?);
        weights.push(dk);
    }
    Ok(Recovery { kraus, weights, logical: logical_out })
}
