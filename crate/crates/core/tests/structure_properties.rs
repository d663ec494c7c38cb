mod oracle;

use krein_lab::clifford::{fundamental_symmetry, gamma_matrices, symmetry_residuals, Frame, SignatureSplit};
use krein_lab::lattice::{build_dirac, build_dirac_in_frame, FrameField, TorusLattice, TorusModel};
use krein_lab::linops::{gen_eig_max, CMatrix};
use krein_lab::random;
use krein_lab::weakpair::{bracket, condition1_constant, condition1_witness, double, BracketKind, OperatorPair};
use krein_lab::wick::{check_pair, roundtrip_residual, wick_rotate};
use num_complex::Complex64;
use proptest::prelude::*;

use oracle::rel_gap;

fn special_orthogonal(n: usize, seed: u64) -> Vec<f64> {
    let mut q = random::orthogonal(n, &mut random::rng(seed));
    let det = determinant(&q, n);
    if det < 0.0 {
        for i in 0..n {
            q[i * n] = -q[i * n];
        }
    }
    q
}

fn determinant(m: &[f64], n: usize) -> f64 {
    let mut a = m.to_vec();
    let mut det = 1.0;
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| a[i * n + col].abs().total_cmp(&a[j * n + col].abs()))
            .unwrap();
        if pivot != col {
            for k in 0..n {
                a.swap(col * n + k, pivot * n + k);
            }
            det = -det;
        }
        let p = a[col * n + col];
        det *= p;
        for i in col + 1..n {
            let f = a[i * n + col] / p;
            for k in col..n {
                a[i * n + k] -= f * a[col * n + k];
            }
        }
    }
    det
}

fn pair(dim: usize, seed: u64, kind: BracketKind) -> OperatorPair {
    let mut rng = random::rng(seed);
    let s = random::hermitian(dim, &mut rng);
    let t = random::hermitian(dim, &mut rng);
    OperatorPair::new(s, t, kind).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn gamma1_is_a_symmetry_for_random_frames(seed in any::<u64>(), n in 1usize..=8, n1_pick in 0usize..9) {
        let n1 = n1_pick % (n + 1);
        let rep = gamma_matrices(n).unwrap();
        let frame = Frame::from_row_major(n, random::orthogonal(n, &mut random::rng(seed)));
        let g1 = fundamental_symmetry(&rep, SignatureSplit::new(n1, n - n1), &frame).unwrap();
        let (h, u) = symmetry_residuals(&g1);
        prop_assert!(h < 1e-12 && u < 1e-12, "hermitian {h:e}, unitary {u:e}");
    }

    #[test]
    fn gamma1_ignores_special_rotations_inside_e1(seed in any::<u64>(), n in 2usize..=6, n1_pick in 1usize..7) {
        let n1 = 1 + n1_pick % n;
        let rep = gamma_matrices(n).unwrap();
        let split = SignatureSplit::new(n1, n - n1);
        let frame = Frame::from_row_major(n, random::orthogonal(n, &mut random::rng(seed)));
        let q = special_orthogonal(n1, seed ^ 0x5eed);
        let mut block = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                block[i * n + j] = if i < n1 && j < n1 { q[i * n1 + j] } else if i == j { 1.0 } else { 0.0 };
            }
        }
        let rotated = frame.compose(&Frame::from_row_major(n, block));
        let a = fundamental_symmetry(&rep, split, &frame).unwrap();
        let b = fundamental_symmetry(&rep, split, &rotated).unwrap();
        prop_assert!((&a - &b).max_abs() < 1e-12);
    }

    #[test]
    fn dirac_operator_is_frame_independent(alpha in -2.0f64..2.0, half in 2usize..4) {
        let points = 2 * half;
        let lat = TorusLattice::new(3, points).unwrap();
        let rep = gamma_matrices(3).unwrap();
        let frame = FrameField::rotating(SignatureSplit::new(1, 2), (0, 2), 1, alpha).unwrap();
        let a = build_dirac(&lat, &rep).unwrap();
        let b = build_dirac_in_frame(&lat, &rep, &frame).unwrap();
        prop_assert!((&a - &b).max_abs() < 1e-12);
    }

    #[test]
    fn decomposition_sums_exactly(alpha in -3.0f64..3.0, half in 2usize..6) {
        let points = 2 * half;
        let split = SignatureSplit::new(1, 1);
        let frame = FrameField::rotating(split, (0, 1), 1, alpha).unwrap();
        let model = TorusModel::build(TorusLattice::new(2, points).unwrap(), frame).unwrap();
        let r = model.residuals();
        prop_assert_eq!(r.sum_max_abs, 0.0);
        prop_assert!(r.max_hermitian_or_identity() <= 1e-12);
    }

    #[test]
    fn condition1_constant_is_optimal(seed in any::<u64>(), dim in 1usize..10, anti in any::<bool>()) {
        let kind = if anti { BracketKind::Anticommutator } else { BracketKind::Commutator };
        let p = pair(dim, seed, kind);
        let c = condition1_constant(&p).unwrap();
        let x = bracket(&p);
        let mut rng = random::rng(seed.wrapping_add(1));
        for _ in 0..1000 {
            let v = random::unit_vector(dim, &mut rng);
            let xv = x.matvec(&v);
            let lhs: f64 = xv.iter().map(|z| z.norm_sqr()).sum();
            let rhs = c * p.graph_inner(&v, &v).re;
            prop_assert!(lhs <= rhs * (1.0 + 1e-9), "{lhs} > {rhs}");
        }
        let w = condition1_witness(&p).unwrap();
        let xw = x.matvec(&w.vector);
        let lhs: f64 = xw.iter().map(|z| z.norm_sqr()).sum();
        let rhs = c * p.graph_inner(&w.vector, &w.vector).re;
        prop_assert!(rel_gap(lhs, rhs) <= 1e-8 || (lhs < 1e-20 && rhs < 1e-20));
    }

    #[test]
    fn doubling_preserves_the_constant(seed in any::<u64>(), dim in 1usize..10) {
        let p = pair(dim, seed, BracketKind::Anticommutator);
        let d = double(&p).unwrap();
        let (c0, c1) = (condition1_constant(&p).unwrap(), condition1_constant(&d).unwrap());
        prop_assert!((c1 - c0).abs() <= 1e-9 * (1.0 + c0));
    }

    #[test]
    fn scaled_pair_matches_direct_recomputation(seed in any::<u64>(), dim in 1usize..8, s in 0.05f64..20.0) {
        let p = pair(dim, seed, BracketKind::Anticommutator);
        let scaled = OperatorPair::new(p.s().scale_real(s), p.t().scale_real(s), BracketKind::Anticommutator).unwrap();
        // X(sS, sT) = s⁴ X(S, T) and G(sS, sT) = I + s²(S² + T²), assembled by hand
        let x = bracket(&p);
        let xx = x.adjoint().matmul(&x).hermitian_part().scale_real(s.powi(4));
        let sq = (&p.s().matmul(p.s()) + &p.t().matmul(p.t())).hermitian_part();
        let g = sq.scale_real(s * s).shift_diag(Complex64::new(1.0, 0.0));
        let direct = gen_eig_max(&xx, &g).unwrap().max(0.0);
        let c = condition1_constant(&scaled).unwrap();
        prop_assert!((c - direct).abs() <= 1e-9 * (1.0 + c));
    }

    #[test]
    fn wick_roundtrip_and_unitary_covariance(seed in any::<u64>(), dim in 1usize..24) {
        let mut rng = random::rng(seed);
        let d = random::gaussian_matrix(dim, dim, &mut rng);
        let r = roundtrip_residual(&d).unwrap();
        prop_assert!(r <= 1e-13 * (1.0 + d.fro_norm()));
        let u = random::unitary(dim, &mut rng);
        let conj = |m: &CMatrix| u.matmul(m).matmul(&u.adjoint());
        let q = wick_rotate(&d).unwrap();
        let qu = wick_rotate(&conj(&d)).unwrap();
        let scale = 1.0 + d.fro_norm();
        for (a, b) in [(&q.re_d, &qu.re_d), (&q.im_d, &qu.im_d), (&q.d_plus, &qu.d_plus), (&q.d_minus, &qu.d_minus)] {
            prop_assert!((&conj(a) - b).fro_norm() <= 1e-12 * scale);
        }
        prop_assert!((roundtrip_residual(&conj(&d)).unwrap() - r).abs() <= 1e-12 * scale);
    }

    #[test]
    fn imaginary_part_vanishes_exactly_for_hermitian_input(seed in any::<u64>(), dim in 1usize..24) {
        let mut rng = random::rng(seed);
        let h = random::hermitian(dim, &mut rng);
        prop_assert_eq!(wick_rotate(&h).unwrap().im_d.max_abs(), 0.0);
        let mut bumped = h.clone();
        bumped[(0, 0)] += Complex64::new(0.0, 1e-6);
        prop_assert!(wick_rotate(&bumped).unwrap().im_d.max_abs() > 0.0);
    }

    #[test]
    fn pair_check_matches_weakpair_on_sum_and_difference(seed in any::<u64>(), dim in 1usize..10) {
        let mut rng = random::rng(seed);
        let d1 = random::hermitian(dim, &mut rng);
        let d2 = random::hermitian(dim, &mut rng);
        let via_wick = check_pair(&d1, &d2).unwrap().c;
        let direct = condition1_constant(
            &OperatorPair::new(&d1 + &d2, &d1 - &d2, BracketKind::Anticommutator).unwrap(),
        )
        .unwrap();
        prop_assert!((via_wick - direct).abs() <= 1e-9 * (1.0 + direct));
    }
}
