use std::sync::Arc;

use chi2qec::codes::{self, CodeKind};
use chi2qec::fock::{enumerate_irreducible_subspace, enumerate_truncated_space, ModeLayout, StateVector};
use chi2qec::linalg::{columns, projector_distance};
use chi2qec::symmetry::{self, joint_unity_eigenspace};

/// Projector distance between synthesized space and code space, the residual
/// of the code space outside the synthesized one, and the stage dimensions.
fn synth(kind: CodeKind, n: u32) -> (f64, f64, Vec<usize>) {
    let code = codes::build(kind, n).unwrap();
    let pump = code.basis.layout().caps()[0];
    let groups = code.basis.layout().groups();
    let space = enumerate_truncated_space(&ModeLayout::three_mode(groups, pump)).unwrap();
    let ops = codes::symmetry_set(kind, n, &space).unwrap();
    let e = joint_unity_eigenspace(&ops, 1e-9).unwrap();
    let target = columns(&code.logical_in(&space).unwrap()).unwrap();
    let w = e.isometry().unwrap();
    let outside = (&target - &w * (w.adjoint() * &target)).norm();
    (projector_distance(&w, &target), outside, e.stage_dims())
}

fn synth_distance(kind: CodeKind, n: u32) -> (f64, Vec<usize>) {
    let (d, _, dims) = synth(kind, n);
    (d, dims)
}

#[test]
fn qutrit_pcc_symmetry_space_contains_code() {
    // The swap-symmetric combination of |±⟩|111⟩ and |111⟩|±⟩ survives every
    // operator, so the joint space is one dimension larger than the code.
    let (d, outside, dims) = synth(CodeKind::Pcc, 3);
    assert!(outside < 1e-10);
    assert!((d - 1.0).abs() < 1e-10);
    assert_eq!(dims.first(), Some(&729));
    assert_eq!(&dims[dims.len() - 3..], &[9, 5, 4]);
}

#[test]
fn qubit_pcc_and_eecc_subspaces() {
    let (d, dims) = synth_distance(CodeKind::Pcc, 2);
    assert!(d < 1e-8);
    assert_eq!(*dims.last().unwrap(), 2);
    let (d, dims) = synth_distance(CodeKind::Eecc, 2);
    assert!(d < 1e-8);
    assert_eq!(&dims[dims.len() - 2..], &[3, 2]);
}

#[test]
fn higher_pcc_and_eecc_synthesis() {
    for n in [4, 5] {
        let (_, outside, dims) = synth(CodeKind::Pcc, n);
        assert!(outside < 1e-10, "pcc {n}");
        // swap-symmetric part of the V⊗V-even space
        let (p, m) = ((n as usize + 1) / 2, n as usize / 2);
        assert_eq!(*dims.last().unwrap(), p * (p + 1) / 2 + m * (m + 1) / 2);
    }
    for n in [3, 4] {
        assert!(synth_distance(CodeKind::Eecc, n).0 < 1e-8, "eecc {n}");
    }
}

#[test]
fn eecc_inversion_alone_on_h2() {
    let h2 = enumerate_irreducible_subspace(2, 1).unwrap();
    let v = symmetry::inversion_operator(2, &[1], &h2).unwrap();
    let e = joint_unity_eigenspace(&[v], 1e-9).unwrap();
    let code = codes::build_eecc(2).unwrap();
    let d = projector_distance(&e.isometry().unwrap(), &columns(&code.logical).unwrap());
    assert!(d < 1e-10);
}

#[test]
fn binomial_codewords_are_symmetry_eigenstates() {
    for n in 1..=4 {
        let code = codes::build_bc(n).unwrap();
        let space = enumerate_truncated_space(&ModeLayout::three_mode(1, 2 * n - 1)).unwrap();
        let ops = codes::symmetry_set(CodeKind::Bc, n, &space).unwrap();
        for v in code.logical_in(&space).unwrap() {
            for op in &ops {
                assert!(op.residual(&v).unwrap() < 1e-10, "{} N={n}", op.name);
            }
        }
        let e = joint_unity_eigenspace(&ops, 1e-9).unwrap();
        let target = columns(&code.logical_in(&space).unwrap()).unwrap();
        let overlap = (e.isometry().unwrap().adjoint() * &target).norm_squared();
        assert!((overlap - 2.0).abs() < 1e-9, "codewords inside synthesized space");
    }
}

#[test]
fn synthesized_vectors_satisfy_every_operator() {
    let space = enumerate_truncated_space(&ModeLayout::three_mode(2, 2)).unwrap();
    let ops = codes::symmetry_set(CodeKind::Pcc, 3, &space).unwrap();
    let e = joint_unity_eigenspace(&ops, 1e-9).unwrap();
    for v in &e.vectors {
        for op in &ops {
            assert!(op.residual(v).unwrap() <= 1e-8);
        }
    }
    for op in &ops {
        assert!(op.is_unitary(1e-10));
    }
}

#[test]
fn synthesis_ignores_operator_order() {
    let space = enumerate_truncated_space(&ModeLayout::three_mode(2, 2)).unwrap();
    let ops = codes::symmetry_set(CodeKind::Pcc, 3, &space).unwrap();
    let a = joint_unity_eigenspace(&ops, 1e-9).unwrap();
    let mut rev = ops.clone();
    rev.reverse();
    let b = joint_unity_eigenspace(&rev, 1e-9).unwrap();
    assert!(projector_distance(&a.isometry().unwrap(), &b.isometry().unwrap()) < 1e-10);
    for (x, y) in a.vectors.iter().zip(&b.vectors) {
        assert!(x.distance(y).unwrap() < 1e-9, "canonical gauge is reproducible");
    }
}

#[test]
fn bc_plus_state_maps_to_zero_codeword() {
    let h = enumerate_irreducible_subspace(5, 1).unwrap();
    let u = symmetry::pseudo_beamsplitter(3, &h).unwrap();
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let minus = StateVector::from_real(Arc::clone(&h), &[(&[0, 0, 5], r), (&[5, 5, 0], -r)]).unwrap();
    let code = codes::build_bc(3).unwrap();
    let out = u.operator.apply(&minus).unwrap();
    assert!(out.distance(&code.logical[1]).unwrap() < 1e-12);
}
