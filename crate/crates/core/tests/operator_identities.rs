use twolocal::hamiltonian::{bare_encoded_hamiltonian, penalty_hamiltonian, physical_encoded_hamiltonian, ProblemSpec};
use twolocal::linalg::{commutator, op_norm};
use twolocal::matrix_code::FamilyCode;
use twolocal::pauli::{Axis, PauliOp};
use twolocal::spectral::{calibrate, diagonalize, CalibrationOptions, DEFAULT_DEGENERACY_TOL};

fn xs(n: usize, qubits: &[usize]) -> PauliOp {
    PauliOp::x_on(n, qubits.iter().copied())
}

#[test]
fn logical_product_matches_dense_product() {
    let pc = FamilyCode::new(1).unwrap();
    let p = pc.x_bar(1);
    let q = pc.z_bar(1);
    let pq = p.mul(&q).unwrap();
    assert_eq!(pq.to_dense(), p.to_dense() * q.to_dense());
    assert_eq!(pq.weight(), 3);
    assert_eq!(pq, pc.y_bar(1).mul(&PauliOp::identity(6).with_phase(3)).unwrap());
}

#[test]
fn generator_commutation_matches_dense_commutators() {
    let pc = FamilyCode::new(1).unwrap();
    let gens = pc.code.gauge_generators();
    for a in gens {
        for b in gens {
            let dense = op_norm(&commutator(&a.to_dense(), &b.to_dense()));
            assert_eq!(dense < 1e-12, a.commutes(b).unwrap(), "{a} {b}");
        }
    }
}

/// Bare coset of `X-bar_1 X-bar_2` listed by hand: the product itself and its
/// products with the two stabilizers and their product.
#[test]
fn bare_weight_of_logical_pair_by_hand() {
    let pc = FamilyCode::new(1).unwrap();
    let st = pc.code.derive_structure().unwrap();
    let target = pc.x_bar(1).mul(&pc.x_bar(2)).unwrap();
    let (sx, sz) = pc.stabilizers();
    let coset = [
        target.clone(),
        target.mul(&sx).unwrap(),
        target.mul(&sz).unwrap(),
        target.mul(&sx).unwrap().mul(&sz).unwrap(),
    ];
    let weights: Vec<usize> = coset.iter().map(PauliOp::weight).collect();
    assert_eq!(weights, [4, 2, 6, 6]);
    assert_eq!(coset[1], xs(6, &[pc.r(1), pc.r(2)]));
    assert!(st.is_bare_logical(&coset[1]));
    assert_eq!(st.min_weight_bare_representative(&target, 6).unwrap().weight(), 2);
    let dressed = xs(6, &[pc.b(1), pc.b(2)]);
    assert!(st.is_dressed_logical(&dressed));
    assert!(!st.is_bare(&dressed));
}

#[test]
fn bare_weight_gap_appears_from_k2() {
    let pc = FamilyCode::new(2).unwrap();
    let st = pc.code.derive_structure().unwrap();
    for (i, j) in [(1, 2), (1, 3), (2, 4)] {
        let target = pc.x_bar(i).mul(&pc.x_bar(j)).unwrap();
        assert_eq!(st.min_weight_bare_representative(&target, 12).unwrap().weight(), 4);
        assert_eq!(st.min_weight_dressed_representative(&target, 4).unwrap().weight(), 2);
    }
}

#[test]
fn k2_ground_space_properties() {
    let pc = FamilyCode::new(2).unwrap();
    let st = pc.code.derive_structure().unwrap();
    let hp = penalty_hamiltonian(&pc.code).unwrap();
    let res = diagonalize(&hp, DEFAULT_DEGENERACY_TOL).unwrap();
    assert_eq!(res.ground_degeneracy, 16);
    for (x, z) in pc.logicals() {
        assert!(res.commutator_norm(&x) < 1e-10);
        assert!(res.commutator_norm(&z) < 1e-10);
    }
    let g13 = pc.gauge_residue(Axis::X, 1, 3);
    assert_eq!(g13, xs(12, &[pc.l(1), pc.l(3)]));
    let cal = calibrate(
        &st,
        &res,
        std::slice::from_ref(&g13),
        "k2",
        CalibrationOptions::default(),
    )
    .unwrap();
    let alpha = cal.alpha(&g13).unwrap();
    assert!(alpha.abs() <= 1.0 && alpha.abs() > 1e-6);
    let (_, residual) = res.proportionality(&g13);
    assert!(residual < 1e-10);
}

#[test]
fn commutation_ledger() {
    let pc = FamilyCode::new(1).unwrap();
    let hp = penalty_hamiltonian(&pc.code).unwrap().to_matrix().unwrap();
    let mut p = ProblemSpec::zero(2);
    p.a = vec![0.2, -0.4];
    p.set_coupling(Axis::X, 1, 2, 0.7);
    p.set_coupling(Axis::Z, 1, 2, -0.3);
    let bare = bare_encoded_hamiltonian(&p, &pc).unwrap().to_matrix().unwrap();
    let phys = physical_encoded_hamiltonian(&p, &pc, None)
        .unwrap()
        .to_matrix()
        .unwrap();
    assert_eq!(op_norm(&commutator(&bare, &hp)), 0.0);
    assert!(op_norm(&commutator(&phys, &hp)) > 0.1);
}
