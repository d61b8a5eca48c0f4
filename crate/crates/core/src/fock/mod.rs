//! Multi-mode Fock-space foundation: basis enumeration, ladder and number
//! operators, and the state/operator algebra everything else builds on.
//!
//! Basis order is canonical and part of the public contract: irreducible
//! subspaces list `|n,n,N−n⟩` by ascending `n` per group, products are
//! lexicographic with the first factor slowest.

mod basis;
mod layout;
mod operator;
mod state;

pub use basis::{same_basis, Basis, BasisIndex, MAX_BASIS_DIM};
pub use layout::{FockState, Mode, ModeLabel, ModeLayout};
pub use operator::{adjoint, apply, compose, expectation, tensor, LinearOperator};
pub use state::{inner_product, KetTerm, StateVector};

use num_complex::Complex64 as C64;

use crate::{Error, Result};

/// Direction of a ladder operator.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LadderKind {
    Lower,
    Raise,
}

/// Per-group basis `{|n,n,N−n⟩ : 0 ≤ n ≤ N}` of `H_N`.
pub fn irreducible_states(n_pump: u32) -> Vec<FockState> {
    (0..=n_pump).map(|n| FockState(vec![n, n, n_pump - n])).collect()
}

/// Ordered basis of `H_N^{⊗groups}`.
pub fn enumerate_irreducible_subspace(n_pump: u32, groups: usize) -> Result<Basis> {
    if groups == 0 {
        return Err(Error::InvalidParameter("groups must be at least 1".into()));
    }
    let single = irreducible_states(n_pump);
    let mut states = vec![FockState(Vec::new())];
    for _ in 0..groups {
        let count = states.len().checked_mul(single.len()).filter(|&d| d <= MAX_BASIS_DIM);
        if count.is_none() {
            return Err(Error::CapacityOverflow(format!("H_{n_pump}^{groups}")));
        }
        states = states
            .iter()
            .flat_map(|a| single.iter().map(move |b| a.concat(b)))
            .collect();
    }
    Ok(BasisIndex::new(ModeLayout::three_mode(groups, n_pump), states)?.shared())
}

/// Full product basis up to the layout's caps, in lexicographic order.
pub fn enumerate_truncated_space(layout: &ModeLayout) -> Result<Basis> {
    let mut dim: usize = 1;
    for &c in layout.caps() {
        dim = (c as usize)
            .checked_add(1)
            .and_then(|k| dim.checked_mul(k))
            .filter(|&d| d <= MAX_BASIS_DIM)
            .ok_or_else(|| Error::CapacityOverflow(format!("caps {:?}", layout.caps())))?;
    }
    let mut states = Vec::with_capacity(dim);
    let mut cur = vec![0u32; layout.len()];
    loop {
        states.push(FockState(cur.clone()));
        // odometer increment, last mode fastest
        let mut k = layout.len();
        loop {
            if k == 0 {
                return Ok(BasisIndex::new(layout.clone(), states)?.shared());
            }
            k -= 1;
            if cur[k] < layout.caps()[k] {
                cur[k] += 1;
                break;
            }
            cur[k] = 0;
        }
    }
}

fn check_mode(basis: &Basis, mode: usize) -> Result<()> {
    if mode >= basis.layout().len() {
        return Err(Error::InvalidParameter(format!(
            "mode {mode} outside a {}-mode layout",
            basis.layout().len()
        )));
    }
    Ok(())
}

/// `√(n!/(n−k)!)`, the amplitude of `a^k` on `|n⟩`.
pub fn lowering_amplitude(n: u32, k: u32) -> f64 {
    if k > n {
        return 0.0;
    }
    ((n - k + 1)..=n).map(|x| x as f64).product::<f64>().sqrt()
}

/// `√((n+k)!/n!)`, the amplitude of `a†^k` on `|n⟩`.
pub fn raising_amplitude(n: u32, k: u32) -> f64 {
    ((n + 1)..=(n + k)).map(|x| x as f64).product::<f64>().sqrt()
}

/// Ladder operator on `mode` between explicit bases. Images missing from
/// the codomain are flagged as truncation overflow.
pub fn ladder_between(
    mode: usize,
    kind: LadderKind,
    domain: &Basis,
    codomain: &Basis,
) -> Result<LinearOperator> {
    check_mode(domain, mode)?;
    let mut powers = vec![0u32; domain.layout().len()];
    powers[mode] = 1;
    Ok(match kind {
        LadderKind::Lower => loss_monomial(domain, codomain, &powers),
        LadderKind::Raise => gain_monomial(domain, codomain, &powers),
    })
}

/// Ladder operator on `mode` acting within `basis`.
pub fn ladder(mode: usize, kind: LadderKind, basis: &Basis) -> Result<LinearOperator> {
    ladder_between(mode, kind, basis, basis)
}

/// `n̂_mode`, diagonal.
pub fn number_operator(mode: usize, basis: &Basis) -> Result<LinearOperator> {
    check_mode(basis, mode)?;
    Ok(LinearOperator::diagonal(basis, |s| C64::new(s.0[mode] as f64, 0.0)))
}

/// `Π_k a_k^{powers[k]}`.
pub fn loss_monomial(domain: &Basis, codomain: &Basis, powers: &[u32]) -> LinearOperator {
    LinearOperator::from_basis_map(domain, codomain, |s| {
        let mut amp = 1.0;
        let mut t = s.0.clone();
        for (k, &p) in powers.iter().enumerate() {
            if p > t[k] {
                return Vec::new();
            }
            amp *= lowering_amplitude(t[k], p);
            t[k] -= p;
        }
        vec![(FockState(t), C64::new(amp, 0.0))]
    })
}

/// `Π_k a_k†^{powers[k]}`.
pub fn gain_monomial(domain: &Basis, codomain: &Basis, powers: &[u32]) -> LinearOperator {
    LinearOperator::from_basis_map(domain, codomain, |s| {
        let mut amp = 1.0;
        let mut t = s.0.clone();
        for (k, &p) in powers.iter().enumerate() {
            amp *= raising_amplitude(t[k], p);
            t[k] += p;
        }
        vec![(FockState(t), C64::new(amp, 0.0))]
    })
}

/// `Π_k n̂_k^{powers[k]}`, diagonal.
pub fn number_monomial(basis: &Basis, powers: &[u32]) -> LinearOperator {
    LinearOperator::diagonal(basis, |s| {
        let v: f64 = s.0.iter().zip(powers).map(|(&n, &p)| (n as f64).powi(p as i32)).product();
        C64::new(v, 0.0)
    })
}

/// Total photon number operator `Σ_k n̂_k`.
pub fn total_number_operator(basis: &Basis) -> LinearOperator {
    LinearOperator::diagonal(basis, |s| C64::new(s.total() as f64, 0.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    #[test]
    fn irreducible_h2_order() {
        let b = enumerate_irreducible_subspace(2, 1).unwrap();
        let got: Vec<String> = b.states().iter().map(|s| s.to_string()).collect();
        assert_eq!(got, ["0,0,2", "1,1,1", "2,2,0"]);
        let vac = enumerate_irreducible_subspace(0, 1).unwrap();
        assert_eq!(vac.dim(), 1);
        assert_eq!(vac.state(0).to_string(), "0,0,0");
        assert!(enumerate_irreducible_subspace(2, 0).is_err());
    }

    #[test]
    fn two_group_basis_is_tensor_of_singles() {
        let one = enumerate_irreducible_subspace(2, 1).unwrap();
        let two = enumerate_irreducible_subspace(2, 2).unwrap();
        assert_eq!(two.dim(), 9);
        assert_eq!(*two, one.tensor(&one).unwrap());
        assert_eq!(two.state(1).to_string(), "0,0,2,1,1,1");
    }

    #[test]
    fn truncated_space_counts() {
        let b = enumerate_truncated_space(&ModeLayout::three_mode(1, 2)).unwrap();
        assert_eq!(b.dim(), 27);
        assert_eq!(b.state(1).to_string(), "0,0,1");
        let z = enumerate_truncated_space(&ModeLayout::three_mode(1, 0)).unwrap();
        assert_eq!(z.dim(), 1);
        let huge = ModeLayout::three_mode(4, u32::MAX);
        assert!(matches!(enumerate_truncated_space(&huge), Err(Error::CapacityOverflow(_))));
    }

    #[test]
    fn cap3_space_encloses_single_errors_on_h2() {
        let h2 = enumerate_irreducible_subspace(2, 1).unwrap();
        let big = enumerate_truncated_space(&ModeLayout::three_mode(1, 3)).unwrap();
        for s in h2.states() {
            for m in 0..3 {
                for d in [-1i64, 1] {
                    if let Some(t) = s.shifted(m, d) {
                        assert!(big.contains(&t), "{t} missing");
                    }
                }
            }
        }
    }

    #[test]
    fn ladder_examples() {
        let big = enumerate_truncated_space(&ModeLayout::three_mode(1, 2)).unwrap();
        let a_s = ladder(0, LadderKind::Lower, &big).unwrap();
        let out = a_s.apply(&StateVector::from_real(big.clone(), &[(&[1, 1, 1], 1.0)]).unwrap()).unwrap();
        assert_eq!(out.amplitude(&FockState::from([0, 1, 1])), c(1.0));
        let ad_p = ladder(2, LadderKind::Raise, &big).unwrap();
        let out = ad_p.apply(&StateVector::from_real(big.clone(), &[(&[2, 2, 0], 1.0)]).unwrap()).unwrap();
        assert_eq!(out.amplitude(&FockState::from([2, 2, 1])), c(1.0));
    }

    #[test]
    fn raising_past_cap_is_flagged() {
        let big = enumerate_truncated_space(&ModeLayout::three_mode(1, 2)).unwrap();
        let ad_s = ladder(0, LadderKind::Raise, &big).unwrap();
        assert!(ad_s.has_overflow());
        let v = StateVector::from_real(big.clone(), &[(&[2, 2, 0], 1.0)]).unwrap();
        assert!(matches!(ad_s.apply(&v), Err(Error::TruncationOverflow(_))));
        let ok = StateVector::from_real(big, &[(&[1, 1, 0], 1.0)]).unwrap();
        assert!(ad_s.apply(&ok).is_ok());
    }

    #[test]
    fn lowering_eecc_zero_on_signal() {
        let big = enumerate_truncated_space(&ModeLayout::three_mode(1, 2)).unwrap();
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let zero = StateVector::from_real(big.clone(), &[(&[2, 2, 0], r), (&[0, 0, 2], r)]).unwrap();
        let out = ladder(0, LadderKind::Lower, &big).unwrap().apply(&zero).unwrap();
        // hand expansion: a_s (|220⟩+|002⟩)/√2 = √2|120⟩/√2
        assert!((out.amplitude(&FockState::from([1, 2, 0])) - c(1.0)).norm() < 1e-15);
        assert!((out.norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn number_operator_matches_raise_lower() {
        let big = enumerate_truncated_space(&ModeLayout::three_mode(1, 3)).unwrap();
        for m in 0..3 {
            let n = number_operator(m, &big).unwrap();
            let rl = ladder(m, LadderKind::Raise, &big)
                .unwrap()
                .compose(&ladder(m, LadderKind::Lower, &big).unwrap())
                .unwrap();
            assert!(n.approx_eq(&rl, 1e-12));
        }
    }

    #[test]
    fn symmetry_relations_on_h_n() {
        for npump in 0..6u32 {
            let b = enumerate_irreducible_subspace(npump, 1).unwrap();
            for s in b.states() {
                let (ns, ni, np) = (s.0[0], s.0[1], s.0[2]);
                assert_eq!(ns + np, npump);
                assert_eq!(ni + np, npump);
                assert_eq!(ns, ni);
            }
            let v = StateVector::new(
                b.clone(),
                (0..b.dim()).map(|k| C64::new(1.0 + k as f64, -(k as f64))).collect(),
            )
            .unwrap()
            .normalized();
            let ns = number_operator(0, &b).unwrap();
            let ni = number_operator(1, &b).unwrap();
            let np = number_operator(2, &b).unwrap();
            let sp = expectation(&ns.add(&np).unwrap(), &v).unwrap();
            assert!((sp - c(npump as f64)).norm() < 1e-12);
            let d = expectation(&ns.sub(&ni).unwrap(), &v).unwrap();
            assert!(d.norm() < 1e-12);
        }
    }

    #[test]
    fn eecc_mean_photons_are_one_per_mode() {
        let b = enumerate_irreducible_subspace(2, 1).unwrap();
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let zero = StateVector::from_real(b.clone(), &[(&[2, 2, 0], r), (&[0, 0, 2], r)]).unwrap();
        let one = StateVector::from_real(b.clone(), &[(&[1, 1, 1], 1.0)]).unwrap();
        for m in 0..3 {
            let n = number_operator(m, &b).unwrap();
            assert!((expectation(&n, &zero).unwrap() - c(1.0)).norm() < 1e-15);
            assert!((expectation(&n, &one).unwrap() - c(1.0)).norm() < 1e-15);
        }
        assert!(zero.inner(&one).unwrap().norm() == 0.0);
    }

    #[test]
    fn embed_and_project_round_trip() {
        let h2 = enumerate_irreducible_subspace(2, 1).unwrap();
        let big = enumerate_truncated_space(&ModeLayout::three_mode(1, 2)).unwrap();
        let v = StateVector::new(h2.clone(), vec![c(0.6), C64::new(0.0, 0.8), c(0.0)]).unwrap();
        let e = v.embed(&big).unwrap();
        assert_eq!(e.amplitude(&FockState::from([1, 1, 1])), C64::new(0.0, 0.8));
        let back = e.project(&h2).unwrap();
        assert_eq!(back.amplitudes(), v.amplitudes());
        let w = StateVector::from_real(big, &[(&[1, 0, 0], 1.0)]).unwrap();
        assert!(matches!(w.embed(&h2), Err(Error::MissingBasisState(_))));
    }

    #[test]
    fn operator_tensor_matches_basis_tensor() {
        let h2 = enumerate_irreducible_subspace(2, 1).unwrap();
        let n = number_operator(0, &h2).unwrap();
        let id = LinearOperator::identity(&h2);
        let t = n.tensor(&id).unwrap();
        let two = enumerate_irreducible_subspace(2, 2).unwrap();
        assert_eq!(**t.domain(), *two);
        let direct = number_operator(0, &two).unwrap();
        let t_on_two = LinearOperator::from_dense(&two, &two, &t.to_dense()).unwrap();
        assert!(t_on_two.approx_eq(&direct, 0.0));
    }

    #[test]
    fn dimension_errors() {
        let h2 = enumerate_irreducible_subspace(2, 1).unwrap();
        let h3 = enumerate_irreducible_subspace(3, 1).unwrap();
        let v = StateVector::basis_state(h3.clone(), &FockState::from([0, 0, 3])).unwrap();
        let n = number_operator(0, &h2).unwrap();
        assert!(matches!(n.apply(&v), Err(Error::DimensionMismatch(_))));
        assert!(ladder(5, LadderKind::Lower, &h2).is_err());
        assert_eq!("1,2,3".parse::<FockState>().unwrap(), FockState::from([1, 2, 3]));
        assert!("1,x".parse::<FockState>().is_err());
    }

    #[test]
    fn layout_validation() {
        use ModeLabel::*;
        let dup = ModeLayout::new(
            vec![Mode { label: Signal, group: 1 }, Mode { label: Signal, group: 1 }],
            vec![1, 1],
        );
        assert!(dup.is_err());
        let gap = ModeLayout::new(vec![Mode { label: Signal, group: 2 }], vec![1]);
        assert!(gap.is_err());
        assert!(ModeLayout::new(vec![Mode { label: Pump, group: 1 }], vec![]).is_err());
    }
}
