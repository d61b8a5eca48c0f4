//! Subcommand handlers. Each returns an [`Outcome`] holding the verdict,
//! the JSON results and the text and CSV renderings.

use std::fmt::Write as _;

use serde_json::{json, Value};

use crate::bounds::{self, BoundQuery};
use crate::codes::{self, CodeKind};
use crate::errors::{self, ErrorKind, ErrorOperator, KlPolicy, KlReport};
use crate::fock::{enumerate_truncated_space, KetTerm, ModeLayout, StateVector};
use crate::gates;
use crate::syndromes::{self, Hypothesis};
use crate::{Error, Result};

use super::config::RunConfig;
use super::criteria;

#[derive(Debug, Clone)]
pub struct Outcome {
    pub passed: bool,
    pub results: Value,
    pub text: String,
    /// `None` when the command has no tabular form.
    pub csv: Option<String>,
}

fn ket_string(terms: &[KetTerm]) -> String {
    let parts: Vec<String> = terms
        .iter()
        .map(|t| {
            if t.im.abs() < 1e-12 {
                format!("{:+.6}|{}>", t.re, t.state)
            } else {
                format!("({:+.6}{:+.6}i)|{}>", t.re, t.im, t.state)
            }
        })
        .collect();
    parts.join(" ")
}

fn verdict(passed: bool) -> &'static str {
    if passed {
        "pass"
    } else {
        "fail"
    }
}

pub fn synth(kind: CodeKind, n: u32, config: &RunConfig) -> Result<Outcome> {
    let (report, space) = codes::synthesize(kind, n, config.tolerance.max(1e-9))?;
    let code = codes::build(kind, n)?;
    let passed = report.projector_distance < 1e-8;
    let codewords: Vec<Vec<KetTerm>> = code.logical.iter().map(StateVector::to_terms).collect();
    let synthesized: Vec<Vec<KetTerm>> = space.vectors.iter().map(StateVector::to_terms).collect();
    let mut text = String::new();
    let dims: Vec<String> = report.stage_dims().iter().map(|d| d.to_string()).collect();
    writeln!(text, "{}: symmetry stages {}", report.code, dims.join(" -> ")).ok();
    for (a, c) in codewords.iter().enumerate() {
        writeln!(text, "|{a}~> = {}", ket_string(c)).ok();
    }
    writeln!(
        text,
        "synthesized dim {}, projector distance {:.3e}, code space outside {:.3e}: {}",
        report.dim,
        report.projector_distance,
        report.containment_residual,
        verdict(passed)
    )
    .ok();
    let results = json!({
        "synthesis": report,
        "codewords": codewords,
        "synthesized": synthesized,
    });
    Ok(Outcome { passed, results, text, csv: None })
}

/// Error set named on the command line.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ErrorSpec {
    LowestOrder,
    Xi { order: u32, kind: Option<ErrorKind> },
    AmplitudeDamping { max_order: Option<u32> },
}

impl std::str::FromStr for ErrorSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("error set {s}: expected lowest-order, xi<m>[:loss|gain|dephasing] or ad[<m>]"));
        if s == "lowest-order" {
            return Ok(ErrorSpec::LowestOrder);
        }
        if let Some(rest) = s.strip_prefix("ad") {
            let max_order = if rest.is_empty() { None } else { Some(rest.parse().map_err(|_| bad())?) };
            return Ok(ErrorSpec::AmplitudeDamping { max_order });
        }
        let rest = s.strip_prefix("xi").or_else(|| s.strip_prefix("ξ")).ok_or_else(bad)?;
        let (m, kind) = match rest.split_once(':') {
            Some((m, k)) => {
                let kind = match k {
                    "loss" => ErrorKind::Loss,
                    "gain" => ErrorKind::Gain,
                    "dephasing" => ErrorKind::Dephasing,
                    _ => return Err(bad()),
                };
                (m, Some(kind))
            }
            None => (rest, None),
        };
        Ok(ErrorSpec::Xi { order: m.parse().map_err(|_| bad())?, kind })
    }
}

impl std::fmt::Display for ErrorSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ErrorSpec::LowestOrder => f.write_str("lowest-order"),
            ErrorSpec::Xi { order, kind: None } => write!(f, "xi{order}"),
            ErrorSpec::Xi { order, kind: Some(k) } => write!(f, "xi{order}:{}", format!("{k:?}").to_lowercase()),
            ErrorSpec::AmplitudeDamping { max_order: None } => f.write_str("ad"),
            ErrorSpec::AmplitudeDamping { max_order: Some(m) } => write!(f, "ad{m}"),
        }
    }
}

fn kl_text(title: &str, r: &KlReport) -> String {
    let mut t = format!("{title}: {}\n", verdict(r.verdict));
    for (u, l) in r.labels.iter().enumerate() {
        let a = r.alpha[u][u];
        writeln!(t, "  alpha[{l}][{l}] = {:.12}", a.re).ok();
    }
    writeln!(
        t,
        "  max off-diagonal residual {:.3e}, max distortion residual {:.3e}",
        r.max_offdiag_residual, r.max_distortion_residual
    )
    .ok();
    if let Some((u, v, a, b, res)) = r.worst {
        if !r.verdict {
            writeln!(t, "  worst element <{a}|{}^dag {}|{b}> residual {res:.6e}", r.labels[u], r.labels[v]).ok();
        }
    }
    t
}

fn kl_csv(sets: &[(String, KlReport)]) -> String {
    let mut s = String::from("set,u,v,alpha_re,alpha_im\n");
    for (name, r) in sets {
        for (u, row) in r.alpha.iter().enumerate() {
            for (v, a) in row.iter().enumerate() {
                writeln!(s, "{name},{},{},{:e},{:e}", r.labels[u], r.labels[v], a.re, a.im).ok();
            }
        }
    }
    s
}

pub fn kl_check(
    kind: CodeKind,
    n: u32,
    spec: &ErrorSpec,
    gamma: f64,
    policy: Option<KlPolicy>,
    config: &RunConfig,
) -> Result<Outcome> {
    if !(0.0..=1.0).contains(&gamma) {
        return Err(Error::InvalidParameter(format!("gamma must lie in [0, 1], got {gamma}")));
    }
    let code = codes::build(kind, n)?;
    let tol = config.tolerance;
    let mut sets: Vec<(String, Vec<ErrorOperator>, KlPolicy)> = Vec::new();
    match *spec {
        ErrorSpec::LowestOrder => {
            if kind == CodeKind::Bc2Mode {
                return Err(Error::InvalidParameter("lowest-order Kraus operators are defined for three-mode codes".into()));
            }
            let space = errors::enclosing_space(&code, 1)?;
            let kraus = errors::lowest_order_loss_kraus(gamma, &space)?;
            sets.push(("lowest-order".into(), kraus, policy.unwrap_or(KlPolicy::LowestOrder)));
        }
        ErrorSpec::Xi { order, kind: k } => {
            if kind == CodeKind::Bc2Mode {
                return Err(Error::InvalidParameter("xi sets are defined for three-mode codes".into()));
            }
            let space = errors::enclosing_space(&code, order)?;
            let set = match k {
                Some(k) => errors::xi_homogeneous(order, k, &space),
                None => errors::xi_set(order, &space),
            };
            sets.push((spec.to_string(), set, policy.unwrap_or(KlPolicy::Exact)));
        }
        ErrorSpec::AmplitudeDamping { max_order } => {
            if kind != CodeKind::Bc2Mode {
                return Err(Error::InvalidParameter("amplitude-damping products are defined for bc2mode".into()));
            }
            let top = max_order.unwrap_or(n);
            let b = enumerate_truncated_space(&ModeLayout::signal_pump(2 * n - 1))?;
            for m in 0..=top {
                let set = (0..=m).map(|h| errors::amplitude_damping_pair(gamma, h, m, (0, 1), &b)).collect::<Result<_>>()?;
                sets.push((format!("ad m={m}"), set, policy.unwrap_or(KlPolicy::Exact)));
            }
        }
    }
    let mut reports = Vec::new();
    for (name, set, pol) in sets {
        let r = errors::kl_check_code(&code, &set, pol, tol)?;
        reports.push((name, r));
    }
    let passed = reports.iter().all(|(_, r)| r.verdict);
    let mut text = String::new();
    for (name, r) in &reports {
        text.push_str(&kl_text(&format!("{} {name} gamma={gamma}", code.name()), r));
    }
    let results = json!({
        "code": code.name(),
        "gamma": gamma,
        "sets": reports.iter().map(|(name, r)| json!({ "name": name, "report": r.to_json() })).collect::<Vec<_>>(),
    });
    Ok(Outcome { passed, results, text, csv: Some(kl_csv(&reports)) })
}

pub fn syndromes(kind: CodeKind, n: u32, order: Option<u32>, decode: Option<(Vec<u32>, Vec<u32>)>) -> Result<Outcome> {
    let code = codes::build(kind, n)?;
    let table = match order {
        Some(m) => syndromes::syndrome_table_order(&code, m)?,
        None => syndromes::syndrome_table(&code)?,
    };
    let dups = syndromes::duplicate_syndromes(&table);
    let mut passed = dups.is_empty();
    let mut text = String::new();
    writeln!(text, "{} syndromes ({} rows)", code.name(), table.len()).ok();
    for r in &table {
        writeln!(text, "  {:<14} p = {:?}  q = {:?}  {}", r.label, r.p, r.q, r.describe()).ok();
    }
    writeln!(text, "distinct: {}", verdict(dups.is_empty())).ok();
    for (a, b) in &dups {
        writeln!(text, "  collision {a} / {b}").ok();
    }
    let mut decoded = Value::Null;
    if let Some((p, q)) = decode {
        match syndromes::decode_syndrome(&code, &p, &q, order) {
            Ok(h) => {
                writeln!(text, "decode p = {p:?} q = {q:?}: {h}").ok();
                let detail = match &h {
                    Hypothesis::NoError => Value::Null,
                    Hypothesis::Error(r) => json!(r),
                };
                decoded = json!({ "p": p, "q": q, "hypothesis": h.label(), "record": detail });
            }
            Err(Error::UnknownSyndrome(s)) => {
                passed = false;
                writeln!(text, "decode p = {p:?} q = {q:?}: unknown syndrome {s}").ok();
                decoded = json!({ "p": p, "q": q, "hypothesis": Value::Null, "error": s });
            }
            Err(e) => return Err(e),
        }
    }
    let results = json!({
        "code": code.name(),
        "order": order,
        "table": table,
        "duplicates": dups,
        "decoded": decoded,
    });
    Ok(Outcome { passed, results, text, csv: Some(syndromes::table_to_csv(&table)) })
}

pub fn recover(kind: CodeKind, n: u32, error: &str, config: &RunConfig) -> Result<Outcome> {
    let code = codes::build(kind, n)?;
    let summaries = if error == "all" {
        syndromes::recovery_sweep(&code, config.trials, config.seed, config.tolerance)?
    } else {
        vec![syndromes::recovery_trials(&code, error, config.trials, config.seed, config.tolerance)?]
    };
    let passed = summaries.iter().all(|s| s.passed);
    let mut text = String::new();
    let mut csv = String::from("code,error,pipeline,trials,seed,min_fidelity,mean_fidelity,passed\n");
    for s in &summaries {
        writeln!(
            text,
            "{} {:<10} min fidelity {:.15} over {} trials [{}]: {}",
            s.code,
            s.error,
            s.min_fidelity,
            s.trials,
            s.pipeline,
            verdict(s.passed)
        )
        .ok();
        writeln!(
            csv,
            "{},{},\"{}\",{},{},{:.15},{:.15},{}",
            s.code, s.error, s.pipeline, s.trials, s.seed, s.min_fidelity, s.mean_fidelity, s.passed
        )
        .ok();
    }
    let results = json!({ "code": code.name(), "summaries": summaries });
    Ok(Outcome { passed, results, text, csv: Some(csv) })
}

pub fn gates_verify() -> Result<Outcome> {
    let checks = gates::verify_gates()?;
    let passed = checks.iter().all(|c| c.passed);
    let mut text = String::new();
    let mut csv = String::from("name,max_deviation,global_phase,passed\n");
    for c in &checks {
        writeln!(text, "{:<48} deviation {:.3e}: {}", c.name, c.max_deviation, verdict(c.passed)).ok();
        let phase = c.global_phase.map(|p| format!("{p:.12}")).unwrap_or_default();
        writeln!(csv, "\"{}\",{:e},{phase},{}", c.name, c.max_deviation, c.passed).ok();
    }
    let results = json!({ "checks": checks.iter().map(|c| c.to_json()).collect::<Vec<_>>() });
    Ok(Outcome { passed, results, text, csv: Some(csv) })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum BoundKind {
    Rotation,
    Loss,
    Theorems,
}

/// Parameters of a single bound evaluation; a missing `n` means "search for
/// the smallest admissible n".
#[derive(Debug, Clone, Copy)]
pub struct BoundArgs {
    pub n: Option<u32>,
    pub q: u32,
    pub b: u32,
    pub k: u32,
    pub t: u32,
}

pub fn bounds_cmd(kind: BoundKind, sweep: bool, a: BoundArgs, config: &RunConfig) -> Result<Outcome> {
    let caps = &config.caps;
    match (kind, sweep) {
        (BoundKind::Theorems, _) => {
            let checks = bounds::theorem_checks(caps)?;
            let passed = checks.iter().all(|c| c.passed);
            let mut text = String::new();
            let mut csv = String::from("name,passed,detail\n");
            for c in &checks {
                writeln!(text, "{}: {}\n  {}", c.name, verdict(c.passed), c.detail).ok();
                writeln!(csv, "\"{}\",{},\"{}\"", c.name, c.passed, c.detail.replace('"', "'")).ok();
            }
            Ok(Outcome { passed, results: json!({ "caps": caps, "checks": checks }), text, csv: Some(csv) })
        }
        (_, true) => {
            let rows = if kind == BoundKind::Rotation { bounds::rotation_sweep(caps) } else { bounds::loss_sweep(caps) };
            let mut text = String::new();
            for r in &rows {
                let n = r.min_n.map(|n| n.to_string()).unwrap_or_else(|| "-".into());
                writeln!(text, "q={:<3} b={:<3} k={} t={} min n = {n}", r.q, r.b, r.k, r.t).ok();
            }
            let results = json!({ "bound": kind_name(kind), "caps": caps, "rows": rows });
            Ok(Outcome { passed: true, results, text, csv: Some(bounds::sweep_to_csv(&rows)) })
        }
        (BoundKind::Rotation, false) => {
            let n = match a.n {
                Some(n) => n,
                None => bounds::min_n(a.q, a.b, a.k, a.t, caps.max_n)?,
            };
            let query = BoundQuery::new(n, a.q, a.b, a.k, a.t)?;
            let (l, r) = (bounds::rotation_lhs(&query), bounds::rotation_rhs(&query));
            let holds = l <= r;
            single_bound(kind, n, a, l.to_string(), r.to_string(), holds)
        }
        (BoundKind::Loss, false) => {
            let n = match a.n {
                Some(n) => n,
                None => bounds::loss_min_n(a.q, a.b, a.k, caps.max_n)?,
            };
            let (l, r) = bounds::loss_sides(n, a.q, a.b, a.k)?;
            let holds = l <= r;
            single_bound(kind, n, a, l.to_string(), r.to_string(), holds)
        }
    }
}

fn kind_name(kind: BoundKind) -> &'static str {
    match kind {
        BoundKind::Rotation => "rotation",
        BoundKind::Loss => "loss",
        BoundKind::Theorems => "theorems",
    }
}

fn single_bound(kind: BoundKind, n: u32, a: BoundArgs, lhs: String, rhs: String, holds: bool) -> Result<Outcome> {
    let rate = if n > 0 { bounds::code_rate(n, a.q, a.b, a.k).ok() } else { None };
    let text = format!(
        "{} bound n={n} q={} b={} k={} t={}: {lhs} <= {rhs}: {}\n",
        kind_name(kind),
        a.q,
        a.b,
        a.k,
        a.t,
        verdict(holds)
    );
    let csv = format!(
        "bound,n,q,b,k,t,lhs,rhs,holds,rate\n{},{n},{},{},{},{},{lhs},{rhs},{holds},{}\n",
        kind_name(kind),
        a.q,
        a.b,
        a.k,
        a.t,
        rate.map(|r| format!("{r:.6}")).unwrap_or_default()
    );
    let results = json!({
        "bound": kind_name(kind), "n": n, "q": a.q, "b": a.b, "k": a.k, "t": a.t,
        "lhs": lhs, "rhs": rhs, "holds": holds, "rate": rate,
    });
    Ok(Outcome { passed: holds, results, text, csv: Some(csv) })
}

pub fn report_all(only: Option<u32>, config: &RunConfig) -> Result<Outcome> {
    let list = match only {
        Some(id) if (1..=9).contains(&id) => vec![criteria::evaluate(id, config)],
        Some(id) => return Err(Error::InvalidParameter(format!("criterion must be 1..=9, got {id}"))),
        None => criteria::evaluate_all(config),
    };
    let passed = list.iter().all(|c| c.passed);
    let mut text = String::new();
    let mut csv = String::from("criterion,check,passed,value,detail\n");
    for c in &list {
        writeln!(text, "{}", c.summary_line()).ok();
        for k in &c.checks {
            let mark = if k.passed { "ok  " } else { "FAIL" };
            let value = k.value.map(|v| format!(" [{v:.3e}]")).unwrap_or_default();
            writeln!(text, "    {mark} {}{value}: {}", k.name, k.detail).ok();
            let v = k.value.map(|v| format!("{v:e}")).unwrap_or_default();
            writeln!(csv, "{},\"{}\",{},{v},\"{}\"", c.id, k.name, k.passed, k.detail.replace('"', "'")).ok();
        }
    }
    let n_pass = list.iter().filter(|c| c.passed).count();
    writeln!(text, "{n_pass}/{} criteria pass", list.len()).ok();
    let results = json!({ "criteria": list.iter().map(|c| c.to_json()).collect::<Vec<_>>() });
    Ok(Outcome { passed, results, text, csv: Some(csv) })
}
