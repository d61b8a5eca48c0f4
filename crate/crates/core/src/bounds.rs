//! Generalized quantum Hamming bounds for qudit-rotation and single-photon
//! loss errors, code rates, and the photon-loss channel capacity.
//!
//! Every bound is an exact big-integer comparison. Statements quantified over
//! all `n`, `q`, `b` or `k` are checked on the finite ranges in
//! [`SearchCaps`].

use std::collections::BTreeSet;

use num_bigint::BigUint;
use num_traits::One;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::codes::{CodeKind, CodeSpec};
use crate::fock::{irreducible_states, FockState};
use crate::{Error, Result};

/// `[[n log2 q, k log2 b, 2t+1]]` parameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct BoundQuery {
    pub n: u32,
    pub q: u32,
    pub b: u32,
    pub k: u32,
    pub t: u32,
}

impl BoundQuery {
    pub fn new(n: u32, q: u32, b: u32, k: u32, t: u32) -> Result<Self> {
        if q < 2 || b < 2 || n < 1 || k < 1 {
            return Err(Error::InvalidParameter(format!(
                "need q, b >= 2 and n, k >= 1 (got n={n} q={q} b={b} k={k})"
            )));
        }
        Ok(Self { n, q, b, k, t })
    }
}

/// Finite ranges used by searches and theorem checks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SearchCaps {
    pub max_n: u32,
    pub max_q: u32,
    pub max_b: u32,
    pub max_k: u32,
    /// Largest `q` for the explicit corrupted-subspace enumeration.
    pub max_q_enumeration: u32,
}

impl Default for SearchCaps {
    fn default() -> Self {
        Self { max_n: 64, max_q: 16, max_b: 16, max_k: 6, max_q_enumeration: 10 }
    }
}

fn big(x: u64) -> BigUint {
    BigUint::from(x)
}

fn binomial(n: u32, k: u32) -> BigUint {
    if k > n {
        return BigUint::default();
    }
    let mut acc = BigUint::one();
    for i in 0..k.min(n - k) {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

/// `Σ_{j ≤ t} C(n, j)(q² − 1)^j b^k`.
pub fn rotation_lhs(q: &BoundQuery) -> BigUint {
    let base = big(q.q as u64 * q.q as u64 - 1);
    let sum: BigUint = (0..=q.t).map(|j| binomial(q.n, j) * base.pow(j)).sum();
    sum * big(q.b as u64).pow(q.k)
}

pub fn rotation_rhs(q: &BoundQuery) -> BigUint {
    big(q.q as u64).pow(q.n)
}

/// Rotation-error bound `Σ_{j ≤ t} C(n, j)(q² − 1)^j b^k ≤ q^n`.
pub fn rotation_bound_holds(q: &BoundQuery) -> bool {
    rotation_lhs(q) <= rotation_rhs(q)
}

fn check_dims(q: u32, b: u32, k: u32) -> Result<()> {
    if q < 2 || b < 2 || k < 1 {
        return Err(Error::InvalidParameter(format!("need q, b >= 2 and k >= 1 (got q={q} b={b} k={k})")));
    }
    Ok(())
}

/// `(1 + 3n) b^k` and `(4q − 3)^n`. `n = 0` is allowed so that saturation
/// can be tested one qudit below a code's size.
pub fn loss_sides(n: u32, q: u32, b: u32, k: u32) -> Result<(BigUint, BigUint)> {
    check_dims(q, b, k)?;
    let lhs = big(1 + 3 * n as u64) * big(b as u64).pow(k);
    let rhs = big(4 * q as u64 - 3).pow(n);
    Ok((lhs, rhs))
}

/// Single-photon-loss bound `(1 + 3n) b^k ≤ (4q − 3)^n`.
pub fn loss_bound_holds(n: u32, q: u32, b: u32, k: u32) -> Result<bool> {
    let (l, r) = loss_sides(n, q, b, k)?;
    Ok(l <= r)
}

/// Qutrit-qubit special case `2(1 + 3n) ≤ 9^n`.
pub fn qutrit_qubit_loss_bound(n: u32) -> bool {
    big(2 * (1 + 3 * n as u64)) <= big(9).pow(n)
}

/// Smallest `n ≤ max_n` satisfying the rotation bound.
pub fn min_n(q: u32, b: u32, k: u32, t: u32, max_n: u32) -> Result<u32> {
    check_dims(q, b, k)?;
    (1..=max_n)
        .find(|&n| rotation_bound_holds(&BoundQuery { n, q, b, k, t }))
        .ok_or_else(|| Error::SearchCapExceeded(format!("no n <= {max_n} for q={q} b={b} k={k} t={t}")))
}

/// Smallest `n ≤ max_n` satisfying the loss bound.
pub fn loss_min_n(q: u32, b: u32, k: u32, max_n: u32) -> Result<u32> {
    for n in 1..=max_n {
        if loss_bound_holds(n, q, b, k)? {
            return Ok(n);
        }
    }
    Err(Error::SearchCapExceeded(format!("no n <= {max_n} for q={q} b={b} k={k}")))
}

/// `k log2 b / (n log2 q)`.
pub fn code_rate(n: u32, q: u32, b: u32, k: u32) -> Result<f64> {
    check_dims(q, b, k)?;
    if n == 0 {
        return Err(Error::InvalidParameter("n must be positive".into()));
    }
    Ok(k as f64 * (b as f64).log2() / (n as f64 * (q as f64).log2()))
}

/// `g(x) = (1 + x) log2(1 + x) − x log2 x`, with `g(0) = 0`.
pub fn capacity_g(x: f64) -> f64 {
    if x == 0.0 {
        return 0.0;
    }
    (1.0 + x) * (1.0 + x).log2() - x * x.log2()
}

/// `max(g((1 − γ)N) − g(γN), 0)`.
pub fn capacity_upper(gamma: f64, mean_n: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&gamma) {
        return Err(Error::InvalidParameter(format!("gamma {gamma} outside [0, 1)")));
    }
    if !(mean_n > 0.0 && mean_n.is_finite()) {
        return Err(Error::InvalidParameter(format!("mean photon number {mean_n} must be positive")));
    }
    Ok((capacity_g((1.0 - gamma) * mean_n) - capacity_g(gamma * mean_n)).max(0.0))
}

/// Kets reached from `H_{q−1}` by losing at most one photon.
pub fn corrupted_kets(q: u32) -> Result<BTreeSet<FockState>> {
    if q < 2 {
        return Err(Error::InvalidParameter(format!("q = {q} below 2")));
    }
    let mut out = BTreeSet::new();
    for s in irreducible_states(q - 1) {
        for k in 0..3 {
            if let Some(t) = s.shifted(k, -1) {
                out.insert(t);
            }
        }
        out.insert(s);
    }
    Ok(out)
}

/// Dimension of the single-loss corrupted space of one `q`-level qudit.
pub fn corrupted_dimension(q: u32) -> Result<usize> {
    Ok(corrupted_kets(q)?.len())
}

/// One finite-range verification.
#[derive(Debug, Clone, Serialize)]
pub struct BoundCheck {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl BoundCheck {
    fn new(name: &str, passed: bool, detail: String) -> Self {
        Self { name: name.into(), passed, detail }
    }
}

fn rotation_examples() -> Vec<BoundCheck> {
    let q = BoundQuery { n: 5, q: 2, b: 2, k: 1, t: 1 };
    let five = rotation_lhs(&q) == rotation_rhs(&q);
    let qt: Vec<bool> = (1..=5).map(|n| rotation_bound_holds(&BoundQuery { n, q: 3, b: 2, k: 1, t: 1 })).collect();
    let first_qt = qt.iter().position(|&h| h).map(|i| i + 1);
    vec![
        BoundCheck::new("rotation bound: five-qubit code saturates", five, format!("{} = {}", rotation_lhs(&q), rotation_rhs(&q))),
        BoundCheck::new(
            "rotation bound: qutrit-qubit 2(1+8n) <= 3^n first at n = 4",
            first_qt == Some(4),
            match first_qt {
                Some(n) => format!("first n = {n}"),
                None => "no n in 1..=5".to_string(),
            },
        ),
    ]
}

fn theorem2(caps: &SearchCaps) -> Result<BoundCheck> {
    let rows: Vec<(u32, u32)> =
        (2..=caps.max_q).map(|q| Ok((q, min_n(q, q, 1, 1, caps.max_n)?))).collect::<Result<_>>()?;
    let best = rows.iter().map(|r| r.1).min().unwrap_or(0);
    let first = rows.iter().find(|r| r.1 == best).map(|r| r.0);
    let all4 = rows.iter().filter(|r| r.0 >= 4).all(|r| r.1 == 4);
    let small = rows.iter().filter(|r| r.0 < 4).all(|r| r.1 > 4);
    let passed = best == 4 && first == Some(4) && all4 && small;
    let detail = format!(
        "min n over q in 2..={}: {best}, first at q = {}; q=2 needs {}, q=3 needs {}",
        caps.max_q,
        first.map_or("none".to_string(), |q| q.to_string()),
        rows[0].1,
        rows[1].1
    );
    Ok(BoundCheck::new("Theorem 2: b = q, max 1/n = 1/4 from q = 4", passed, detail))
}

fn theorem3(caps: &SearchCaps) -> Result<BoundCheck> {
    let mut best = (u32::MAX, 0, 0);
    let mut two_never = true;
    for b in 2..=caps.max_b {
        for q in 2..=caps.max_q {
            let n = min_n(q, b, 1, 1, caps.max_n)?;
            two_never &= n > 2;
            if n < best.0 || (n == best.0 && (b, q) < (best.1, best.2)) {
                best = (n, b, q);
            }
        }
    }
    let b2_from6 = (2..=caps.max_q).all(|q| {
        let n3 = rotation_bound_holds(&BoundQuery { n: 3, q, b: 2, k: 1, t: 1 });
        n3 == (q >= 6)
    });
    let passed = best == (3, 2, 6) && two_never && b2_from6;
    let detail = format!(
        "min n = {} first at b = {}, q = {}; n = 2 never holds: {two_never}; b = 2, n = 3 holds exactly for q >= 6: {b2_from6}",
        best.0, best.1, best.2
    );
    Ok(BoundCheck::new("Theorem 3: max 1/n = 1/3 at b = 2, q >= 6", passed, detail))
}

/// `(b^k / q^n)` as an exact fraction.
#[derive(Debug, Clone, PartialEq, Eq)]
struct Ratio {
    num: BigUint,
    den: BigUint,
}

impl Ratio {
    fn gt(&self, o: &Ratio) -> bool {
        &self.num * &o.den > &o.num * &self.den
    }
}

fn theorem4(caps: &SearchCaps) -> Result<BoundCheck> {
    let mut volume_ok = true;
    let mut argmax_ok = true;
    let mut details = Vec::new();
    for k in 1..=caps.max_k {
        let grid: Vec<(u32, u32)> =
            (2..=caps.max_q).flat_map(|q| (2..=caps.max_b).map(move |b| (q, b))).collect();
        let results: Vec<(u32, u32, Option<Ratio>, bool)> = grid
            .par_iter()
            .map(|&(q, b)| {
                let mut ok = true;
                let mut best: Option<Ratio> = None;
                for n in 1..=caps.max_n {
                    let query = BoundQuery { n, q, b, k, t: 1 };
                    if !rotation_bound_holds(&query) {
                        continue;
                    }
                    // r (1 + n(q² − 1)) ≤ 1
                    let r = Ratio { num: big(b as u64).pow(k), den: big(q as u64).pow(n) };
                    let vol = big(1 + n as u64 * (q as u64 * q as u64 - 1));
                    ok &= &r.num * vol <= r.den;
                    if best.as_ref().is_none_or(|x| r.gt(x)) {
                        best = Some(r);
                    }
                }
                (q, b, best, ok)
            })
            .collect();
        volume_ok &= results.iter().all(|r| r.3);
        let qubit = results.iter().find(|r| r.0 == 2 && r.1 == 2).and_then(|r| r.2.clone());
        let beaten: Vec<(u32, u32)> = results
            .iter()
            .filter(|r| match (&r.2, &qubit) {
                (Some(x), Some(y)) => x.gt(y),
                (Some(_), None) => true,
                _ => false,
            })
            .map(|r| (r.0, r.1))
            .collect();
        argmax_ok &= qubit.is_some() && beaten.is_empty();
        if let Some(y) = qubit {
            details.push(format!("k={k}: r(2,2) = {}/{}", y.num, y.den));
        }
        if !beaten.is_empty() {
            details.push(format!("k={k}: exceeded by {beaten:?}"));
        }
    }
    Ok(BoundCheck::new(
        "Theorem 4: volume ratio maximized at b = q = 2",
        volume_ok && argmax_ok,
        format!("r <= 1/(1+n(q^2-1)) everywhere: {volume_ok}; {}", details.join("; ")),
    ))
}

fn theorem5(caps: &SearchCaps) -> Result<Vec<BoundCheck>> {
    let dims: Vec<(u32, usize)> =
        (2..=caps.max_q_enumeration).map(|q| Ok((q, corrupted_dimension(q)?))).collect::<Result<_>>()?;
    let dims_ok = dims.iter().all(|&(q, d)| d == 4 * q as usize - 3);
    let h2 = corrupted_dimension(3)? == 9;
    let qq = (1..=caps.max_n).all(qutrit_qubit_loss_bound) && !qutrit_qubit_loss_bound(0);
    let mut pcc = true;
    for n in 2..=caps.max_q {
        pcc &= loss_bound_holds(2, n, n, 1)? && !loss_bound_holds(1, n, n, 1)?;
    }
    let mut eecc = true;
    for b in 2..=caps.max_b {
        eecc &= loss_bound_holds(1, 2 * b - 1, b, 1)? && !loss_bound_holds(0, 2 * b - 1, b, 1)?;
    }
    Ok(vec![
        BoundCheck::new(
            "Theorem 5: corrupted dimension 4q - 3",
            dims_ok && h2,
            format!("enumerated q = 2..={}: {dims:?}", caps.max_q_enumeration),
        ),
        BoundCheck::new("loss bound: qutrit-qubit 2(1+3n) <= 9^n for n >= 1", qq, format!("n = 1..={}", caps.max_n)),
        BoundCheck::new(
            "loss bound: PCC (n=2, q=b=N) saturates",
            pcc,
            format!("holds at n = 2, fails at n = 1, N = 2..={}", caps.max_q),
        ),
        BoundCheck::new(
            "loss bound: EECC (n=1, q=2b-1) saturates",
            eecc,
            format!("holds at n = 1, fails at n = 0, b = 2..={}", caps.max_b),
        ),
    ])
}

/// Finite-range verification of every theorem and worked example.
pub fn theorem_checks(caps: &SearchCaps) -> Result<Vec<BoundCheck>> {
    let mut out = rotation_examples();
    out.push(theorem2(caps)?);
    out.push(theorem3(caps)?);
    out.push(theorem4(caps)?);
    out.extend(theorem5(caps)?);
    Ok(out)
}

#[derive(Debug, Clone, Serialize)]
pub struct SaturationReport {
    pub code: String,
    pub bound: String,
    pub n: u32,
    pub q: u32,
    pub b: u32,
    pub k: u32,
    pub holds: bool,
    /// `(4q − 3)^n − (1 + 3n) b^k` as a decimal string.
    pub margin: String,
    pub holds_one_smaller: Option<bool>,
    pub saturated: Option<bool>,
    pub note: String,
}

impl SaturationReport {
    pub fn to_json(&self) -> Value {
        json!(self)
    }
}

/// Loss-bound status at the code's parameters and one qudit fewer.
pub fn saturation_report(code: &CodeSpec) -> Result<SaturationReport> {
    let p = code.params;
    let (l, r) = loss_sides(p.n, p.q, p.b, p.k)?;
    let holds = l <= r;
    let margin = if holds { (&r - &l).to_string() } else { format!("-{}", &l - &r) };
    let (smaller, note) = match code.kind {
        CodeKind::Pcc | CodeKind::Eecc => {
            let s = loss_bound_holds(p.n - 1, p.q, p.b, p.k)?;
            (Some(s), format!("bound at n = {} {}", p.n - 1, if s { "holds" } else { "fails" }))
        }
        _ => (None, "no saturation claim for this code".to_string()),
    };
    Ok(SaturationReport {
        code: code.name(),
        bound: "(1+3n) b^k <= (4q-3)^n".into(),
        n: p.n,
        q: p.q,
        b: p.b,
        k: p.k,
        holds,
        margin,
        holds_one_smaller: smaller,
        saturated: smaller.map(|s| holds && !s),
        note,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub q: u32,
    pub b: u32,
    pub k: u32,
    pub t: u32,
    pub min_n: Option<u32>,
    pub rate: Option<f64>,
}

/// Rotation-bound `min_n` and rate over `q, b ≤ caps`, `k ≤ max_k`, `t = 1`.
pub fn rotation_sweep(caps: &SearchCaps) -> Vec<SweepRow> {
    sweep(caps, |q, b, k| min_n(q, b, k, 1, caps.max_n).ok(), 1)
}

/// Loss-bound `min_n` and rate over the same grid.
pub fn loss_sweep(caps: &SearchCaps) -> Vec<SweepRow> {
    sweep(caps, |q, b, k| loss_min_n(q, b, k, caps.max_n).ok(), 1)
}

fn sweep<F>(caps: &SearchCaps, f: F, t: u32) -> Vec<SweepRow>
where
    F: Fn(u32, u32, u32) -> Option<u32> + Sync,
{
    let grid: Vec<(u32, u32, u32)> = (2..=caps.max_q)
        .flat_map(|q| (2..=caps.max_b).flat_map(move |b| (1..=caps.max_k).map(move |k| (q, b, k))))
        .collect();
    grid.par_iter()
        .map(|&(q, b, k)| {
            let n = f(q, b, k);
            SweepRow { q, b, k, t, min_n: n, rate: n.and_then(|n| code_rate(n, q, b, k).ok()) }
        })
        .collect()
}

pub fn sweep_to_csv(rows: &[SweepRow]) -> String {
    let mut s = String::from("q,b,k,t,min_n,rate\n");
    for r in rows {
        let n = r.min_n.map(|n| n.to_string()).unwrap_or_default();
        let rate = r.rate.map(|x| format!("{x:.6}")).unwrap_or_default();
        s.push_str(&format!("{},{},{},{},{n},{rate}\n", r.q, r.b, r.k, r.t));
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binomials() {
        assert_eq!(binomial(5, 2), big(10));
        assert_eq!(binomial(3, 4), big(0));
        assert_eq!(binomial(64, 32).to_string(), "1832624140942590534");
    }

    #[test]
    fn query_validation() {
        assert!(BoundQuery::new(1, 1, 2, 1, 1).is_err());
        assert!(BoundQuery::new(0, 2, 2, 1, 1).is_err());
        assert!(BoundQuery::new(1, 2, 2, 1, 0).is_ok());
    }

    #[test]
    fn search_cap() {
        assert!(matches!(min_n(2, 2, 40, 1, 8), Err(Error::SearchCapExceeded(_))));
    }
}
