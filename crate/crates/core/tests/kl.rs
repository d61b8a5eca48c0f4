use std::collections::BTreeSet;

use chi2qec::codes::{self, random_superposition, CodeKind};
use chi2qec::errors::*;
use chi2qec::fock::{enumerate_truncated_space, loss_monomial, gain_monomial, number_monomial, ModeLayout};
use chi2qec::linalg::max_abs_diff;
use num_bigint::BigUint;
use num_complex::Complex64 as C64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn labels_without_identity(set: &[ErrorOperator]) -> BTreeSet<String> {
    set.iter().filter(|e| e.label != "I").map(|e| e.label.clone()).collect()
}

fn set_of(xs: &[&str]) -> BTreeSet<String> {
    xs.iter().map(|s| s.to_string()).collect()
}

#[test]
fn xi_sets_match_listings() {
    let b = enumerate_truncated_space(&ModeLayout::three_mode(1, 3)).unwrap();
    assert_eq!(xi_set(0, &b).len(), 1);
    let xi1 = set_of(&["a_s", "a_i", "a_p", "adag_s", "adag_i", "adag_p"]);
    assert_eq!(labels_without_identity(&xi_set(1, &b)), xi1);
    let xi2 = set_of(&[
        "a_s a_i", "a_s a_p", "a_i a_p", "adag_s adag_i", "adag_s adag_p", "adag_i adag_p", "a_s^2", "a_i^2",
        "a_p^2", "adag_s^2", "adag_i^2", "adag_p^2", "n_s", "n_i", "n_p",
    ]);
    assert_eq!(labels_without_identity(&xi_set(2, &b)), xi2);
    let xi3 = set_of(&[
        "a_s a_i a_p", "adag_s adag_i adag_p", "a_s^2 a_i", "a_s^2 a_p", "a_s a_i^2", "a_s a_p^2", "a_i^2 a_p",
        "a_i a_p^2", "adag_s^2 adag_i", "adag_s^2 adag_p", "adag_s adag_i^2", "adag_s adag_p^2",
        "adag_i^2 adag_p", "adag_i adag_p^2", "a_s^3", "a_i^3", "a_p^3", "adag_s^3", "adag_i^3", "adag_p^3",
        "n_s n_i", "n_s n_p", "n_i n_p", "n_s^2", "n_i^2", "n_p^2",
    ]);
    let got = xi_set(3, &b);
    assert_eq!(got.len(), 27);
    assert_eq!(labels_without_identity(&got), xi3);
    for e in &got {
        let expect = match e.kind {
            ErrorKind::Identity => 0,
            _ => 3,
        };
        assert_eq!(e.order, expect, "{}", e.label);
    }
}

fn lowest_order_alpha(kind: CodeKind, n: u32, gamma: f64) -> KlReport {
    let code = codes::build(kind, n).unwrap();
    let b = enclosing_space(&code, 1).unwrap();
    let kraus = lowest_order_loss_kraus(gamma, &b).unwrap();
    kl_check_code(&code, &kraus, KlPolicy::LowestOrder, 1e-12).unwrap()
}

fn assert_alpha(r: &KlReport, a00: f64, ahh: f64) {
    assert!(r.verdict, "{:?}", r.worst);
    let n = r.alpha.len();
    for u in 0..n {
        for v in 0..n {
            let expect = match (u, v) {
                (0, 0) => a00,
                _ if u == v => ahh,
                _ => 0.0,
            };
            assert!((r.alpha[u][v] - C64::new(expect, 0.0)).norm() < 1e-12, "alpha[{u}][{v}] = {}", r.alpha[u][v]);
        }
    }
}

#[test]
fn pcc_lowest_order_alpha() {
    for gamma in [0.01, 0.1] {
        let r = lowest_order_alpha(CodeKind::Pcc, 2, gamma);
        assert_eq!(r.labels.len(), 7);
        assert_alpha(&r, 1.0 - 3.0 * gamma, gamma / 2.0);
        let r = lowest_order_alpha(CodeKind::Pcc, 3, gamma);
        assert_alpha(&r, 1.0 - 6.0 * gamma, gamma);
    }
}

#[test]
fn eecc_lowest_order_alpha_and_gain() {
    for gamma in [0.01, 0.1] {
        let r = lowest_order_alpha(CodeKind::Eecc, 2, gamma);
        assert_eq!(r.labels.len(), 4);
        assert_alpha(&r, 1.0 - 3.0 * gamma, gamma);
    }
    let code = codes::build_eecc(2).unwrap();
    let b = enclosing_space(&code, 1).unwrap();
    let gains: Vec<_> = xi_homogeneous(1, ErrorKind::Gain, &b).into_iter().filter(|e| e.label != "I").collect();
    let r = kl_check_code(&code, &gains, KlPolicy::Exact, 1e-12).unwrap();
    assert!(r.verdict);
    for u in 0..3 {
        for v in 0..3 {
            let expect = if u == v { 2.0 } else { 0.0 };
            assert!((r.alpha[u][v] - C64::new(expect, 0.0)).norm() < 1e-12);
        }
    }
}

#[test]
fn loss_alpha_uniform_across_modes() {
    for (kind, n) in [(CodeKind::Pcc, 2), (CodeKind::Pcc, 3), (CodeKind::Pcc, 4), (CodeKind::Eecc, 2), (CodeKind::Eecc, 3)] {
        let r = lowest_order_alpha(kind, n, 0.05);
        let first = r.alpha[1][1];
        for h in 2..r.alpha.len() {
            assert!((r.alpha[h][h] - first).norm() < 1e-12, "{kind} N={n}");
        }
    }
}

#[test]
fn lowest_order_completeness_is_second_order() {
    let code = codes::build_pcc(2).unwrap();
    let b = enclosing_space(&code, 1).unwrap();
    let gamma = 0.01;
    let kraus = lowest_order_loss_kraus(gamma, &b).unwrap();
    assert_eq!(kraus.len(), 7);
    // Σ E†E − I = γ² (Σ n̂)² / 4 exactly
    let max_total = b.states().iter().map(|s| s.total()).max().unwrap() as f64;
    let res = completeness_residual(&kraus).unwrap();
    assert!((res - gamma * gamma * max_total * max_total / 4.0).abs() < 1e-14);
}

#[test]
fn bc_homogeneous_and_mixed_xi() {
    for (n, top) in [(2u32, 2u32), (3, 3)] {
        let code = codes::build_bc(n).unwrap();
        let b = enclosing_space(&code, top).unwrap();
        for m in 0..=top {
            for kind in [ErrorKind::Loss, ErrorKind::Gain, ErrorKind::Dephasing] {
                let r = kl_check_code(&code, &xi_homogeneous(m, kind, &b), KlPolicy::Exact, 1e-9).unwrap();
                assert!(r.verdict, "N={n} m={m} {kind:?}: {:?}", r.worst);
                assert!(r.hermiticity_defect() < 1e-12);
                assert!(r.min_alpha_eigenvalue() > -1e-9);
            }
            // mixed sets are reported, not asserted
            let mixed = kl_check_code(&code, &xi_set(m, &b), KlPolicy::Exact, 1e-9).unwrap();
            eprintln!("BC N={n} xi_{m} mixed verdict {}", mixed.verdict);
        }
    }
}

#[test]
fn bc_moment_identities_exact() {
    // Even- and odd-weighted sums agree for polynomial degree below 2N − 1,
    // which covers every m ≤ N once N ≥ 2.
    for n in 2..=6u32 {
        for m in 0..=n {
            for h in 0..=m {
                for g in 0..=(m - h) {
                    for kind in [MomentKind::Loss, MomentKind::Gain, MomentKind::Dephasing] {
                        if kind == MomentKind::Dephasing && (m == 0 || h + g > m - 1) {
                            continue;
                        }
                        let z = bc_moment_exact(n, h, g, m, MomentSide::Zero, kind).unwrap();
                        let o = bc_moment_exact(n, h, g, m, MomentSide::One, kind).unwrap();
                        assert_eq!(z, o, "N={n} h={h} g={g} m={m} {kind:?}");
                    }
                }
            }
        }
    }
    let z = bc_moment_exact(1, 0, 0, 1, MomentSide::Zero, MomentKind::Loss).unwrap();
    let o = bc_moment_exact(1, 0, 0, 1, MomentSide::One, MomentKind::Loss).unwrap();
    assert_ne!(z, o, "N = 1 has degree 1 = 2N − 1");
}

#[test]
fn bc_moment_closed_form_values() {
    // N = 2, one signal photon lost: (3·0 + 3·2)/4 weighted by C(3,k)
    assert_eq!(bc_moment_exact(2, 1, 0, 1, MomentSide::Zero, MomentKind::Loss).unwrap(), BigUint::from(6u32));
    assert_eq!(bc_moment_sum(2, 1, 0, 1, MomentSide::Zero, MomentKind::Loss).unwrap(), 1.5);
    // n_p² on N = 2: (9 + 3·1)/4
    assert_eq!(bc_moment_sum(2, 0, 0, 2, MomentSide::Zero, MomentKind::Dephasing).unwrap(), 3.0);
}

#[test]
fn bc_moments_match_operator_expectations() {
    for n in 1..=6u32 {
        let code = codes::build_bc(n).unwrap();
        let b = enclosing_space(&code, n).unwrap();
        let logical = code.logical_in(&b).unwrap();
        for m in 0..=n {
            for h in 0..=m {
                for g in 0..=(m - h) {
                    let loss = loss_monomial(&b, &b, &[h, g, m - h - g]);
                    let gain = gain_monomial(&b, &b, &[h, g, m - h - g]);
                    for (side, v) in [(MomentSide::Zero, &logical[0]), (MomentSide::One, &logical[1])] {
                        let l = loss.apply(v).unwrap().norm_sqr();
                        let closed = bc_moment_sum(n, h, g, m, side, MomentKind::Loss).unwrap();
                        assert!((l - closed).abs() < 1e-9 * closed.max(1.0), "loss N={n} {h} {g} {m}");
                        let a = gain.apply(v).unwrap().norm_sqr();
                        let closed = bc_moment_sum(n, h, g, m, side, MomentKind::Gain).unwrap();
                        assert!((a - closed).abs() < 1e-9 * closed.max(1.0), "gain N={n} {h} {g} {m}");
                        if m >= 1 && h + g < m {
                            let d = number_monomial(&b, &[h, g, m - 1 - h - g]).apply(v).unwrap().norm_sqr();
                            let closed = bc_moment_sum(n, h, g, m, side, MomentKind::Dephasing).unwrap();
                            assert!((d - closed).abs() < 1e-9 * closed.max(1.0), "dephasing N={n} {h} {g} {m}");
                        }
                    }
                }
            }
        }
    }
}

#[test]
fn two_mode_bc_single_products_pass() {
    for n in [2u32, 3] {
        let code = codes::build_two_mode_bc(n).unwrap();
        let b = enumerate_truncated_space(&ModeLayout::signal_pump(2 * n - 1)).unwrap();
        for gamma in [0.01, 0.05] {
            for m in 0..=n {
                for h in 0..=m {
                    let e = amplitude_damping_pair(gamma, h, m, (0, 1), &b).unwrap();
                    let r = kl_check_code(&code, &[e], KlPolicy::Exact, 1e-9).unwrap();
                    assert!(r.verdict, "N={n} gamma={gamma} h={h} m={m}");
                }
            }
        }
    }
}

#[test]
fn two_mode_bc_joint_sets_mix_logical_states() {
    // A signal loss from |1̃′⟩ and a pump loss from |0̃′⟩ reach the same Fock
    // state, so the joint condition fails for h − g odd.
    let code = codes::build_two_mode_bc(2).unwrap();
    let b = enumerate_truncated_space(&ModeLayout::signal_pump(3)).unwrap();
    let gamma = 0.01;
    let set: Vec<_> = (0..=1).map(|h| amplitude_damping_pair(gamma, h, 1, (0, 1), &b).unwrap()).collect();
    let r = kl_check_code(&code, &set, KlPolicy::Exact, 1e-9).unwrap();
    assert!(!r.verdict);
    assert!((r.max_offdiag_residual - 1.5 * gamma * (1.0 - gamma).powi(2)).abs() < 1e-12);
}

fn recovery_fidelities(kind: CodeKind, n: u32, errors: &[ErrorOperator], trials: usize, seed: u64) -> f64 {
    let code = codes::build(kind, n).unwrap();
    let logical = code.logical_in(errors[0].domain()).unwrap();
    let rec = canonical_recovery(&logical, errors, 1e-9).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 1.0;
    for _ in 0..trials {
        let psi = random_superposition(&logical, &mut rng).unwrap();
        for e in errors {
            let hit = e.apply(&psi).unwrap();
            if hit.norm() < 1e-12 {
                continue;
            }
            worst = worst.min(rec.fidelity(&psi, &hit).unwrap());
        }
    }
    worst
}

#[test]
fn canonical_recovery_eecc_losses() {
    let code = codes::build_eecc(2).unwrap();
    let b = enclosing_space(&code, 1).unwrap();
    let errors = xi_homogeneous(1, ErrorKind::Loss, &b);
    let f = recovery_fidelities(CodeKind::Eecc, 2, &errors, 100, 7);
    assert!((1.0 - f).abs() < 1e-10, "fidelity {f}");
}

#[test]
fn canonical_recovery_bc_xi2() {
    let code = codes::build_bc(2).unwrap();
    let b = enclosing_space(&code, 2).unwrap();
    let errors = xi_set(2, &b);
    let f = recovery_fidelities(CodeKind::Bc, 2, &errors, 100, 11);
    assert!((1.0 - f).abs() < 1e-9, "fidelity {f}");
}

#[test]
fn identity_recovery_is_code_projector() {
    let code = codes::build_pcc(2).unwrap();
    let b = enclosing_space(&code, 0).unwrap();
    let logical = code.logical_in(&b).unwrap();
    let rec = canonical_recovery(&logical, &[identity_error(&b)], 1e-9).unwrap();
    assert_eq!(rec.kraus.len(), 1);
    let r = rec.kraus[0].to_dense();
    let cols = chi2qec::linalg::columns(&logical).unwrap();
    let p = &cols * cols.adjoint();
    let (ok, _, dev) = chi2qec::linalg::equal_up_to_global_phase(&r, &p, 1e-12);
    assert!(ok, "deviation {dev}");
    assert!(max_abs_diff(&(r.adjoint() * &r), &p) < 1e-12);
}

#[test]
fn canonical_recovery_rejects_uncorrectable_sets() {
    let code = codes::build_two_mode_bc(2).unwrap();
    let b = enumerate_truncated_space(&ModeLayout::signal_pump(3)).unwrap();
    let set: Vec<_> = (0..=1).map(|h| amplitude_damping_pair(0.05, h, 1, (0, 1), &b).unwrap()).collect();
    let logical = code.logical_in(&b).unwrap();
    assert!(matches!(canonical_recovery(&logical, &set, 1e-9), Err(chi2qec::Error::KlViolation { .. })));
}

#[test]
fn kl_report_json_shape() {
    let r = lowest_order_alpha(CodeKind::Pcc, 2, 0.01);
    let j = r.to_json();
    assert_eq!(j["alpha"].as_array().unwrap().len(), 7);
    assert_eq!(j["alpha"][0][0].as_array().unwrap().len(), 2);
    assert_eq!(j["verdict"], true);
    assert!((j["alpha"][0][0][0].as_f64().unwrap() - 0.97).abs() < 1e-12);
}

#[test]
fn gain_overflow_is_reported() {
    let code = codes::build_eecc(2).unwrap();
    let b = enclosing_space(&code, 0).unwrap();
    let gains = xi_homogeneous(1, ErrorKind::Gain, &b);
    assert!(matches!(
        kl_check_code(&code, &gains, KlPolicy::Exact, 1e-9),
        Err(chi2qec::Error::TruncationOverflow(_))
    ));
}
