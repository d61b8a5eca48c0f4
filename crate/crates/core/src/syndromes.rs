//! Photon-number parity schemes, syndrome tables, decoding, and recovery
//! pipelines built from restoration isometries and logical gates.
//!
//! A syndrome is the change an error induces in each parity component:
//! for every transition `|in⟩ → |out⟩` carrying amplitude, the reading of
//! `|out⟩` minus the reading of `|in⟩`. It must be the same for every
//! transition, otherwise [`Error::IndefiniteParity`] is raised.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::codes::{self, CodeKind, CodeSpec};
use crate::errors::{self, compositions, ErrorKind, ErrorOperator, Recovery};
use crate::fock::{Basis, BasisIndex, FockState, LinearOperator, ModeLabel, ModeLayout, StateVector};
use crate::gates::{self, v_coordinates, v_index_multi};
use crate::{Error, Result, C64};

/// Amplitudes at or below this magnitude are not part of a state's support.
const SUPPORT_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum SchemeName {
    #[serde(rename = "p3")]
    P3,
    #[serde(rename = "p12")]
    P12,
    #[serde(rename = "q12")]
    Q12,
    #[serde(rename = "qEECC")]
    QEecc,
    #[serde(rename = "pBC")]
    PBc,
    #[serde(rename = "qBC")]
    QBc,
}

impl fmt::Display for SchemeName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SchemeName::P3 => "p3",
            SchemeName::P12 => "p12",
            SchemeName::Q12 => "q12",
            SchemeName::QEecc => "qEECC",
            SchemeName::PBc => "pBC",
            SchemeName::QBc => "qBC",
        })
    }
}

/// `(Σ c_k n_k) mod modulus`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ParityComponent {
    pub terms: Vec<(usize, i64)>,
    pub modulus: u32,
}

impl ParityComponent {
    fn reading(&self, s: &FockState) -> u32 {
        let total: i64 = self.terms.iter().map(|&(k, c)| c * s.0[k] as i64).sum();
        total.rem_euclid(self.modulus as i64) as u32
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ParityScheme {
    pub name: SchemeName,
    pub components: Vec<ParityComponent>,
    modes: usize,
}

fn mode(layout: &ModeLayout, label: ModeLabel, group: usize) -> Result<usize> {
    layout
        .find(label, group)
        .ok_or_else(|| Error::InvalidLayout(format!("no {} mode in group {group}", label.tag())))
}

/// `[n_s + n_i, n_s + n_p, n_i + n_p] mod 2` for one group.
fn pair_sums(layout: &ModeLayout, group: usize, modulus: u32) -> Result<Vec<ParityComponent>> {
    let s = mode(layout, ModeLabel::Signal, group)?;
    let i = mode(layout, ModeLabel::Idler, group)?;
    let p = mode(layout, ModeLabel::Pump, group)?;
    Ok([(s, i), (s, p), (i, p)]
        .into_iter()
        .map(|(a, b)| ParityComponent { terms: vec![(a, 1), (b, 1)], modulus })
        .collect())
}

fn group_total(layout: &ModeLayout, group: usize, modulus: u32) -> Result<ParityComponent> {
    let terms = [ModeLabel::Signal, ModeLabel::Idler, ModeLabel::Pump]
        .into_iter()
        .map(|l| Ok((mode(layout, l, group)?, 1)))
        .collect::<Result<_>>()?;
    Ok(ParityComponent { terms, modulus })
}

impl ParityScheme {
    /// Validates moduli (at least 2) and mode indices against `layout`.
    pub fn new(name: SchemeName, components: Vec<ParityComponent>, layout: &ModeLayout) -> Result<Self> {
        for c in &components {
            if c.modulus < 2 {
                return Err(Error::InvalidParameter(format!("{name}: modulus {} below 2", c.modulus)));
            }
            if let Some(&(k, _)) = c.terms.iter().find(|(k, _)| *k >= layout.len()) {
                return Err(Error::InvalidLayout(format!("{name}: mode {k} outside layout")));
            }
        }
        Ok(Self { name, components, modes: layout.len() })
    }

    pub fn p3(layout: &ModeLayout) -> Result<Self> {
        Self::new(SchemeName::P3, pair_sums(layout, 1, 2)?, layout)
    }

    pub fn p12(layout: &ModeLayout) -> Result<Self> {
        let mut c = pair_sums(layout, 1, 2)?;
        c.extend(pair_sums(layout, 2, 2)?);
        Self::new(SchemeName::P12, c, layout)
    }

    pub fn q12(layout: &ModeLayout) -> Result<Self> {
        let c = vec![group_total(layout, 1, 3)?, group_total(layout, 2, 3)?];
        Self::new(SchemeName::Q12, c, layout)
    }

    pub fn q_eecc(layout: &ModeLayout) -> Result<Self> {
        Self::new(SchemeName::QEecc, vec![group_total(layout, 1, 3)?], layout)
    }

    /// `[n_s − n_i, n_s + n_p, n_i + n_p] mod (2N − 1)`.
    pub fn p_bc(layout: &ModeLayout, n: u32) -> Result<Self> {
        let modulus = bc_modulus(n)?;
        let s = mode(layout, ModeLabel::Signal, 1)?;
        let i = mode(layout, ModeLabel::Idler, 1)?;
        let p = mode(layout, ModeLabel::Pump, 1)?;
        let c = vec![
            ParityComponent { terms: vec![(s, 1), (i, -1)], modulus },
            ParityComponent { terms: vec![(s, 1), (p, 1)], modulus },
            ParityComponent { terms: vec![(i, 1), (p, 1)], modulus },
        ];
        Self::new(SchemeName::PBc, c, layout)
    }

    /// `(n_s + n_i + n_p) mod (6N − 3)`.
    pub fn q_bc(layout: &ModeLayout, n: u32) -> Result<Self> {
        let modulus = 3 * bc_modulus(n)?;
        Self::new(SchemeName::QBc, vec![group_total(layout, 1, modulus)?], layout)
    }

    /// Component readings of a single Fock state.
    pub fn reading(&self, s: &FockState) -> Result<Vec<u32>> {
        if s.0.len() != self.modes {
            return Err(Error::DimensionMismatch(format!("{} modes for scheme {}", s.0.len(), self.name)));
        }
        Ok(self.components.iter().map(|c| c.reading(s)).collect())
    }

    /// Reading of `to` minus reading of `from`, per component.
    pub fn shift(&self, from: &FockState, to: &FockState) -> Result<Vec<u32>> {
        let a = self.reading(from)?;
        let b = self.reading(to)?;
        Ok(self
            .components
            .iter()
            .zip(a.iter().zip(&b))
            .map(|(c, (x, y))| (*y as i64 - *x as i64).rem_euclid(c.modulus as i64) as u32)
            .collect())
    }
}

fn bc_modulus(n: u32) -> Result<u32> {
    if n == 0 {
        return Err(Error::InvalidParameter("binomial code needs N >= 1".into()));
    }
    Ok(2 * n - 1)
}

fn fmt_vec(v: &[u32]) -> String {
    let s: Vec<String> = v.iter().map(u32::to_string).collect();
    format!("({})", s.join(","))
}

/// Common reading over the state's support.
pub fn measure_parity(state: &StateVector, scheme: &ParityScheme) -> Result<Vec<u32>> {
    let tol = SUPPORT_TOL * state.norm().max(1.0);
    let mut value: Option<(FockState, Vec<u32>)> = None;
    for (s, a) in state.support() {
        if a.norm() <= tol {
            continue;
        }
        let r = scheme.reading(s)?;
        match &value {
            None => value = Some((s.clone(), r)),
            Some((s0, r0)) if *r0 != r => {
                return Err(Error::IndefiniteParity {
                    scheme: scheme.name.to_string(),
                    detail: format!("{s0} reads {} but {s} reads {}", fmt_vec(r0), fmt_vec(&r)),
                })
            }
            _ => {}
        }
    }
    match value {
        Some((_, r)) => Ok(r),
        None => Err(Error::InvalidParameter("zero state has no parity".into())),
    }
}

/// Shift syndrome of `op` acting on `state`; `None` if `op` annihilates it.
pub fn error_syndrome(op: &LinearOperator, state: &StateVector, scheme: &ParityScheme) -> Result<Option<Vec<u32>>> {
    let tol = SUPPORT_TOL * state.norm().max(1.0);
    let amps = state.amplitudes();
    let mut value: Option<(String, Vec<u32>)> = None;
    for (row, col, v) in op.entries() {
        if amps[col].norm() <= tol || v.norm() <= SUPPORT_TOL {
            continue;
        }
        let from = op.domain().state(col);
        let to = op.codomain().state(row);
        let r = scheme.shift(from, to)?;
        match &value {
            None => value = Some((format!("{from}->{to}"), r)),
            Some((t0, r0)) if *r0 != r => {
                return Err(Error::IndefiniteParity {
                    scheme: scheme.name.to_string(),
                    detail: format!("{t0} shifts by {} but {from}->{to} by {}", fmt_vec(r0), fmt_vec(&r)),
                })
            }
            _ => {}
        }
    }
    Ok(value.map(|(_, r)| r))
}

/// The `(p, q)` schemes a code is monitored with.
pub fn code_schemes(code: &CodeSpec) -> Result<(ParityScheme, ParityScheme)> {
    let layout = code.layout();
    match code.kind {
        CodeKind::Pcc => Ok((ParityScheme::p12(layout)?, ParityScheme::q12(layout)?)),
        CodeKind::Eecc => Ok((ParityScheme::p3(layout)?, ParityScheme::q_eecc(layout)?)),
        CodeKind::Bc => {
            let n = code.params.size;
            Ok((ParityScheme::p_bc(layout, n)?, ParityScheme::q_bc(layout, n)?))
        }
        CodeKind::Bc2Mode => Err(Error::InvalidParameter("no parity scheme for the two-mode binomial code".into())),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SyndromeRecord {
    pub label: String,
    pub kind: ErrorKind,
    pub order: u32,
    pub p: Vec<u32>,
    pub q: Vec<u32>,
    /// Photons removed (loss) or added (gain) per mode.
    pub powers: Vec<u32>,
    #[serde(skip)]
    mode_names: Vec<String>,
}

impl SyndromeRecord {
    /// `"loss on s1"`, `"gain on s^2 p"`.
    pub fn describe(&self) -> String {
        let kind = match self.kind {
            ErrorKind::Loss => "loss",
            ErrorKind::Gain => "gain",
            _ => "error",
        };
        let modes: Vec<String> = self
            .mode_names
            .iter()
            .zip(&self.powers)
            .filter(|(_, &k)| k > 0)
            .map(|(n, &k)| if k == 1 { n.clone() } else { format!("{n}^{k}") })
            .collect();
        format!("{kind} on {}", modes.join(" "))
    }

    pub fn csv_row(&self) -> String {
        format!("{},\"{}\",\"{}\"", self.label, fmt_vec(&self.p), fmt_vec(&self.q))
    }
}

/// Syndromes of every `order`-photon loss and gain monomial, loss rows
/// first, each in composition order.
pub fn syndrome_table_order(code: &CodeSpec, order: u32) -> Result<Vec<SyndromeRecord>> {
    if order == 0 {
        return Err(Error::InvalidParameter("syndrome order must be at least 1".into()));
    }
    let (ps, qs) = code_schemes(code)?;
    let space = errors::enclosing_space(code, order)?;
    let logical = code.logical_in(&space)?;
    let layout = code.layout();
    let names: Vec<String> = (0..layout.len()).map(|k| layout.mode_name(k)).collect();
    let comps = compositions(layout.len(), order);
    let jobs: Vec<(ErrorKind, Vec<u32>)> = [ErrorKind::Loss, ErrorKind::Gain]
        .into_iter()
        .flat_map(|k| comps.iter().map(move |c| (k, c.clone())))
        .collect();
    let rows: Vec<Option<SyndromeRecord>> = jobs
        .par_iter()
        .map(|(kind, powers)| {
            let e = match kind {
                ErrorKind::Loss => errors::loss_error(&space, powers),
                _ => errors::gain_error(&space, powers),
            };
            let op = e.operator()?;
            let mut found: Option<(Vec<u32>, Vec<u32>)> = None;
            for v in &logical {
                let (Some(p), Some(q)) = (error_syndrome(&op, v, &ps)?, error_syndrome(&op, v, &qs)?) else {
                    continue;
                };
                match &found {
                    None => found = Some((p, q)),
                    Some(pq) if *pq != (p.clone(), q.clone()) => {
                        return Err(Error::IndefiniteParity {
                            scheme: format!("{}/{}", ps.name, qs.name),
                            detail: format!("{} has different syndromes on different codewords", e.label),
                        })
                    }
                    _ => {}
                }
            }
            Ok(found.map(|(p, q)| SyndromeRecord {
                label: e.label.clone(),
                kind: *kind,
                order,
                p,
                q,
                powers: powers.clone(),
                mode_names: names.clone(),
            }))
        })
        .collect::<Result<_>>()?;
    Ok(rows.into_iter().flatten().collect())
}

/// Single-photon table for PCC and EECC; orders `1..=N` for the binomial code.
pub fn syndrome_table(code: &CodeSpec) -> Result<Vec<SyndromeRecord>> {
    match code.kind {
        CodeKind::Bc => {
            let mut out = Vec::new();
            for m in 1..=code.params.size {
                out.extend(syndrome_table_order(code, m)?);
            }
            Ok(out)
        }
        _ => syndrome_table_order(code, 1),
    }
}

/// Label pairs whose `(order, p, q)` coincide.
pub fn duplicate_syndromes(table: &[SyndromeRecord]) -> Vec<(String, String)> {
    let mut seen: HashMap<(u32, &[u32], &[u32]), &str> = HashMap::new();
    let mut dups = Vec::new();
    for r in table {
        if let Some(prev) = seen.insert((r.order, &r.p, &r.q), &r.label) {
            dups.push((prev.to_string(), r.label.clone()));
        }
    }
    dups
}

pub fn table_to_csv(table: &[SyndromeRecord]) -> String {
    let mut s = String::from("error_label,p,q\n");
    for r in table {
        s.push_str(&r.csv_row());
        s.push('\n');
    }
    s
}

/// Number of ways to spread `m` lost photons over three modes.
pub fn bc_configurations(m: u32) -> u64 {
    (m as u64 + 2) * (m as u64 + 1) / 2
}

/// Number of distinct `p_BC` values, `(2N − 1)^3`.
pub fn bc_parity_values(n: u32) -> u64 {
    (2 * n as u64 - 1).pow(3)
}

/// Whether `p_BC` has room for every order-`m` loss configuration.
pub fn bc_configuration_bound(n: u32, m: u32) -> bool {
    n >= 1 && bc_configurations(m) <= bc_parity_values(n)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Hypothesis {
    NoError,
    Error(SyndromeRecord),
}

impl Hypothesis {
    pub fn label(&self) -> &str {
        match self {
            Hypothesis::NoError => "I",
            Hypothesis::Error(r) => &r.label,
        }
    }
}

impl fmt::Display for Hypothesis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Hypothesis::NoError => f.write_str("no error"),
            Hypothesis::Error(r) => f.write_str(&r.describe()),
        }
    }
}

/// Looks `(p, q)` up in the code's table. For the binomial code
/// `monitored_order` restricts the search to one order; without it the match
/// must be unique across orders `1..=N`.
pub fn decode_syndrome(code: &CodeSpec, p: &[u32], q: &[u32], monitored_order: Option<u32>) -> Result<Hypothesis> {
    let unknown = || Error::UnknownSyndrome(format!("p={} q={}", fmt_vec(p), fmt_vec(q)));
    if p.iter().chain(q).all(|&x| x == 0) {
        return Ok(Hypothesis::NoError);
    }
    let table = match (code.kind, monitored_order) {
        (CodeKind::Bc, Some(m)) => {
            let n = code.params.size;
            if m == 0 || m > n {
                return Err(Error::InvalidParameter(format!("monitored order {m} outside 1..={n}")));
            }
            if !bc_configuration_bound(n, m) {
                return Err(Error::InvalidParameter(format!(
                    "{} loss configurations exceed {} parity values",
                    bc_configurations(m),
                    bc_parity_values(n)
                )));
            }
            syndrome_table_order(code, m)?
        }
        (_, Some(m)) if m != 1 => return Err(unknown()),
        _ => syndrome_table(code)?,
    };
    let mut hits = table.into_iter().filter(|r| r.p == p && r.q == q);
    match (hits.next(), hits.next()) {
        (Some(r), None) => Ok(Hypothesis::Error(r)),
        _ => Err(unknown()),
    }
}

/// Corrupted sectors that the optical restoration circuits return to `H_2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RestorationCase {
    PccSignalLoss,
    PccIdlerLoss,
    PccPumpLoss,
    EeccSignalLoss,
    EeccIdlerLoss,
    EeccPumpLoss,
}

impl RestorationCase {
    pub fn lost_mode(self) -> ModeLabel {
        match self {
            RestorationCase::PccSignalLoss | RestorationCase::EeccSignalLoss => ModeLabel::Signal,
            RestorationCase::PccIdlerLoss | RestorationCase::EeccIdlerLoss => ModeLabel::Idler,
            RestorationCase::PccPumpLoss | RestorationCase::EeccPumpLoss => ModeLabel::Pump,
        }
    }

    pub fn is_pcc(self) -> bool {
        matches!(
            self,
            RestorationCase::PccSignalLoss | RestorationCase::PccIdlerLoss | RestorationCase::PccPumpLoss
        )
    }

    /// Corrupted first-qutrit kets and the `H_2` kets they are sent to.
    pub fn sector_map(self) -> [([u32; 3], [u32; 3]); 2] {
        match self.lost_mode() {
            ModeLabel::Signal => [([1, 2, 0], [0, 0, 2]), ([0, 1, 1], [2, 2, 0])],
            ModeLabel::Idler => [([2, 1, 0], [0, 0, 2]), ([1, 0, 1], [2, 2, 0])],
            ModeLabel::Pump => [([0, 0, 1], [0, 0, 2]), ([1, 1, 0], [2, 2, 0])],
        }
    }
}

/// Net partial isometry of the restoration circuit. Its domain is the
/// corrupted sector (tensored with `H_2` for the second PCC qutrit) and its
/// codomain `H_2` or `H_2^{⊗2}`.
pub fn restoration_isometry(case: RestorationCase) -> Result<LinearOperator> {
    let map = case.sector_map();
    let sector = BasisIndex::new(
        ModeLayout::three_mode(1, 2),
        map.iter().map(|(from, _)| FockState(from.to_vec())).collect(),
    )?;
    let (domain, codomain) = if case.is_pcc() {
        let h2 = gates::qutrit_basis(1)?;
        (sector.tensor(&h2)?.shared(), gates::qutrit_basis(2)?)
    } else {
        (sector.shared(), gates::qutrit_basis(1)?)
    };
    Ok(LinearOperator::from_basis_map(&domain, &codomain, |s| {
        let head = &s.0[..3];
        map.iter()
            .filter(|(from, _)| from[..] == *head)
            .map(|(_, to)| {
                let mut out = to.to_vec();
                out.extend_from_slice(&s.0[3..]);
                (FockState(out), C64::new(1.0, 0.0))
            })
            .collect()
    }))
}

/// Applies the restoration to `state`, which must lie in its domain.
pub fn restore(iso: &LinearOperator, state: &StateVector) -> Result<StateVector> {
    let inside = state.project(iso.domain())?;
    let outside = state.norm_sqr() - inside.norm_sqr();
    if outside > SUPPORT_TOL * state.norm_sqr().max(1.0) {
        return Err(Error::OutOfDomain(format!("state has weight {outside:e} outside the corrupted sector")));
    }
    iso.apply(&inside)
}

/// Exchanges the two physical qutrits of every ket.
fn swap_groups(basis: &Basis) -> LinearOperator {
    LinearOperator::from_basis_map(basis, basis, |s| {
        let mut v = s.0[3..].to_vec();
        v.extend_from_slice(&s.0[..3]);
        vec![(FockState(v), C64::new(1.0, 0.0))]
    })
}

fn from_v_coordinates(basis: &Basis, v: &DVector<C64>) -> Result<StateVector> {
    let amps = basis
        .states()
        .iter()
        .map(|s| v_index_multi(s).filter(|&k| k < v.len()).map(|k| v[k]))
        .collect::<Option<Vec<_>>>()
        .ok_or_else(|| Error::OutOfDomain("basis state outside H_2".into()))?;
    StateVector::new(Arc::clone(basis), amps)
}

/// How a given error is undone.
#[derive(Debug, Clone)]
pub enum Stage {
    Identity,
    Circuit {
        case: RestorationCase,
        /// Conjugate by the qutrit swap (errors on the second PCC qutrit).
        swapped: bool,
        gates: Vec<(String, DMatrix<C64>)>,
    },
    Canonical(Box<Recovery>),
}

/// Error, its undoing stage, and the spaces they act on.
#[derive(Debug, Clone)]
pub struct RecoveryPipeline {
    pub code: CodeSpec,
    pub error: ErrorOperator,
    pub stage: Stage,
    space: Basis,
}

/// Errors the canonical recovery of `code` is built for: `ξ_1` for PCC and
/// EECC, `ξ_m` for the binomial code.
pub fn correctable_set(code: &CodeSpec, order: u32) -> Result<(Basis, Vec<ErrorOperator>)> {
    let m = match code.kind {
        CodeKind::Pcc | CodeKind::Eecc => 1,
        CodeKind::Bc => order.max(1),
        CodeKind::Bc2Mode => {
            return Err(Error::InvalidParameter("no correctable set for the two-mode binomial code".into()))
        }
    };
    if code.kind == CodeKind::Bc && m > code.params.size {
        return Err(Error::InvalidParameter(format!("order {m} exceeds N = {}", code.params.size)));
    }
    let space = errors::enclosing_space(code, m)?;
    let set = errors::xi_set(m, &space);
    Ok((space, set))
}

fn find_error(code: &CodeSpec, label: &str) -> Result<(Basis, Vec<ErrorOperator>, ErrorOperator)> {
    let label = if label == "none" { "I" } else { label };
    let max = if code.kind == CodeKind::Bc { code.params.size } else { 1 };
    for m in 1..=max {
        let (space, set) = correctable_set(code, m)?;
        if let Some(e) = set.iter().find(|e| e.label == label).cloned() {
            return Ok((space, set, e));
        }
    }
    Err(Error::UnknownName(format!("error {label} for {}", code.name())))
}

fn circuit_case(code: &CodeSpec, e: &ErrorOperator) -> Option<(RestorationCase, bool)> {
    if e.kind != ErrorKind::Loss || e.order != 1 {
        return None;
    }
    let layout = code.layout();
    let k = e.operator().ok()?.entries().next().map(|(r, c, _)| {
        let (from, to) = (e.domain().state(c), e.codomain().state(r));
        (0..layout.len()).find(|&k| from.0[k] != to.0[k]).expect("loss changes one mode")
    })?;
    let m = layout.modes()[k];
    use RestorationCase::*;
    match (code.kind, code.params.size, m.label) {
        (CodeKind::Pcc, 3, ModeLabel::Signal) => Some((PccSignalLoss, m.group == 2)),
        (CodeKind::Pcc, 3, ModeLabel::Idler) => Some((PccIdlerLoss, m.group == 2)),
        (CodeKind::Pcc, 3, ModeLabel::Pump) => Some((PccPumpLoss, m.group == 2)),
        (CodeKind::Eecc, 2, ModeLabel::Signal) => Some((EeccSignalLoss, false)),
        (CodeKind::Eecc, 2, ModeLabel::Idler) => Some((EeccIdlerLoss, false)),
        (CodeKind::Eecc, 2, ModeLabel::Pump) => Some((EeccPumpLoss, false)),
        _ => None,
    }
}

fn named(name: &str) -> Result<(String, DMatrix<C64>)> {
    Ok((name.to_string(), gates::logical_gate(name)?.matrix))
}

/// Gate sequence applied after restoration.
pub fn circuit_gates(case: RestorationCase) -> Result<Vec<(String, DMatrix<C64>)>> {
    match case {
        RestorationCase::PccSignalLoss | RestorationCase::PccIdlerLoss => {
            ["CNOT2_21", "Lambda21H", "NotLambda21H", "CNOT2p_12"].into_iter().map(named).collect()
        }
        RestorationCase::PccPumpLoss => {
            ["Lambda21H", "NotLambda21H", "CNOT2_21", "CNOT2pp_12"].into_iter().map(named).collect()
        }
        _ => {
            let (k, theta, u1) = gates::eecc_first_gate()?;
            let t = theta / std::f64::consts::PI;
            Ok(vec![(format!("exp(i {t:.4} pi G{k})"), u1), ("exp(i pi G7/3)".into(), gates::eecc_second_gate()?)])
        }
    }
}

impl RecoveryPipeline {
    /// Explicit circuits for single-photon losses on the qutrit PCC and the
    /// qubit EECC, the canonical recovery for everything else.
    pub fn new(code: &CodeSpec, error_label: &str, tol: f64) -> Result<Self> {
        let (space, set, error) = find_error(code, error_label)?;
        let stage = if error.kind == ErrorKind::Identity {
            Stage::Identity
        } else if let Some((case, swapped)) = circuit_case(code, &error) {
            Stage::Circuit { case, swapped, gates: circuit_gates(case)? }
        } else {
            let logical = code.logical_in(&space)?;
            Stage::Canonical(Box::new(errors::canonical_recovery(&logical, &set, tol)?))
        };
        Ok(Self { code: code.clone(), error, stage, space })
    }

    pub fn describe(&self) -> String {
        match &self.stage {
            Stage::Identity => "identity".into(),
            Stage::Circuit { case, swapped, gates } => {
                let names: Vec<&str> = gates.iter().map(|g| g.0.as_str()).collect();
                let sw = if *swapped { "swap, " } else { "" };
                format!("{sw}{case:?}, {}", names.join(", "))
            }
            Stage::Canonical(r) => format!("canonical recovery ({} Kraus operators)", r.kraus.len()),
        }
    }

    /// Corrupts `input` with the error, normalizes, and undoes it. Returns
    /// the recovered state on the code basis and `|⟨input|output⟩|`.
    pub fn run(&self, input: &StateVector) -> Result<(StateVector, f64)> {
        let input = input.normalized();
        let inp = input.embed(&self.space)?;
        let corrupted = self.error.apply(&inp)?;
        if corrupted.norm() <= SUPPORT_TOL {
            return Err(Error::InvalidParameter(format!("{} annihilates the input", self.error.label)));
        }
        let corrupted = corrupted.normalized();
        let output = match &self.stage {
            Stage::Identity => corrupted.project(&self.code.basis)?,
            Stage::Circuit { case, swapped, gates } => {
                let state = if *swapped { swap_groups(&self.space).apply(&corrupted)? } else { corrupted.clone() };
                let iso = restoration_isometry(*case)?;
                let mut v = v_coordinates(&restore(&iso, &state)?)?;
                for (_, g) in gates {
                    v = g * v;
                }
                if *swapped {
                    v = gates::swap_qutrits() * v;
                }
                from_v_coordinates(&self.code.basis, &v)?
            }
            Stage::Canonical(r) => {
                let branches = r.branches(&corrupted)?;
                let best = branches
                    .into_iter()
                    .max_by(|a, b| a.norm_sqr().total_cmp(&b.norm_sqr()))
                    .ok_or_else(|| Error::InvalidParameter("empty recovery".into()))?;
                best.normalized().project(&self.code.basis)?
            }
        };
        let fidelity = match &self.stage {
            Stage::Canonical(r) => r.fidelity(&inp, &corrupted)?.sqrt(),
            _ => input.inner(&output)?.norm() / output.norm().max(f64::MIN_POSITIVE),
        };
        Ok((output, fidelity))
    }
}

/// One-shot recovery of a single input.
pub fn full_recovery(code: &CodeSpec, error_label: &str, input: &StateVector) -> Result<(StateVector, f64)> {
    RecoveryPipeline::new(code, error_label, crate::DEFAULT_TOL)?.run(input)
}

#[derive(Debug, Clone, Serialize)]
pub struct RecoverySummary {
    pub code: String,
    pub error: String,
    pub pipeline: String,
    pub trials: usize,
    pub seed: u64,
    pub min_fidelity: f64,
    pub mean_fidelity: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl RecoverySummary {
    pub fn to_json(&self) -> Value {
        json!(self)
    }
}

/// `trials` seeded random logical superpositions through one pipeline; trial
/// `t` draws from `ChaCha8Rng::seed_from_u64(seed + t)`.
pub fn recovery_trials(code: &CodeSpec, error_label: &str, trials: usize, seed: u64, tol: f64) -> Result<RecoverySummary> {
    let pipe = RecoveryPipeline::new(code, error_label, tol)?;
    let fids: Vec<f64> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(t as u64));
            let input = codes::random_superposition(&code.logical, &mut rng)?;
            Ok(pipe.run(&input)?.1)
        })
        .collect::<Result<_>>()?;
    let min = fids.iter().copied().fold(f64::INFINITY, f64::min);
    let mean = if fids.is_empty() { f64::NAN } else { fids.iter().sum::<f64>() / fids.len() as f64 };
    Ok(RecoverySummary {
        code: code.name(),
        error: pipe.error.label.clone(),
        pipeline: pipe.describe(),
        trials,
        seed,
        min_fidelity: min,
        mean_fidelity: mean,
        tolerance: tol,
        passed: trials > 0 && (1.0 - min).abs() <= tol,
    })
}

/// Recovery trials for every error in the code's table plus the identity.
pub fn recovery_sweep(code: &CodeSpec, trials: usize, seed: u64, tol: f64) -> Result<Vec<RecoverySummary>> {
    let mut labels = vec!["I".to_string()];
    labels.extend(syndrome_table(code)?.into_iter().map(|r| r.label));
    labels.iter().map(|l| recovery_trials(code, l, trials, seed, tol)).collect()
}
