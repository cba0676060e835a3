//! Property-based invariants over randomized inputs, plus deterministic
//! whole-catalog checks that would be too slow to repeat per proptest case.

use kdlab::bases::{
    catalog, dft, haar_unitary, is_mub, permute, spin1, stats, tao, Permutation,
    TransitionMatrix,
};
use kdlab::coinc::{is_coinc, sample_state, subspace_dim, uncertainty_diagram};
use kdlab::kd::{
    entropies, is_kd_classical, kd_distribution, support_profile, witness, StateVector,
    WitnessOutcome,
};
use kdlab::linalg::{det, kernel_basis, rank, ComplexMatrix, IndexSet, Tolerance};
use kdlab::oracle::diagram_by_sampling;
use kdlab::perturb::unsticking_rotation;
use kdlab::C64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn gauss(rng: &mut ChaCha8Rng) -> C64 {
    let r = (-(1.0 - rng.gen::<f64>()).ln()).sqrt();
    let phi = 2.0 * std::f64::consts::PI * rng.gen::<f64>();
    C64::new(r * phi.cos(), r * phi.sin())
}

fn random_matrix(rows: usize, cols: usize, seed: u64) -> ComplexMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    ComplexMatrix::new(rows, cols, (0..rows * cols).map(|_| gauss(&mut rng)).collect()).unwrap()
}

fn random_state(d: usize, seed: u64) -> StateVector {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    StateVector::normalized((0..d).map(|_| gauss(&mut rng)).collect()).unwrap()
}

/// Random k-subset of {1..d} as an IndexSet, drawn without replacement.
fn random_subset(d: usize, k: usize, rng: &mut ChaCha8Rng) -> IndexSet {
    let mut pool: Vec<usize> = (1..=d).collect();
    for i in (1..pool.len()).rev() {
        let j = rng.gen_range(0..=i);
        pool.swap(i, j);
    }
    pool.truncate(k);
    IndexSet::new(pool, d).unwrap()
}

fn random_permutation(d: usize, rng: &mut ChaCha8Rng) -> Permutation {
    let mut image: Vec<usize> = (1..=d).collect();
    for i in (1..d).rev() {
        let j = rng.gen_range(0..=i);
        image.swap(i, j);
    }
    Permutation::new(image).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn det_of_dagger_is_conjugate(d in 1usize..=6, seed in any::<u64>()) {
        let m = random_matrix(d, d, seed);
        let a = det(&m.dagger()).unwrap();
        let b = det(&m).unwrap().conj();
        prop_assert!((a - b).norm() <= 1e-9 * (1.0 + b.norm()), "{a} vs {b}");
    }

    #[test]
    fn haar_determinant_is_unimodular(d in 2usize..=8, seed in any::<u64>()) {
        let t = haar_unitary(d, seed).unwrap();
        let mag = det(t.matrix()).unwrap().norm();
        prop_assert!((mag - 1.0).abs() <= 1e-8, "|det| = {mag}");
    }

    #[test]
    fn rank_plus_nullity_is_cols(
        rows in 1usize..=6,
        cols in 1usize..=6,
        inner in 1usize..=6,
        seed in any::<u64>(),
        deficient in any::<bool>(),
    ) {
        let tol = Tolerance::default();
        let m = if deficient && rows.min(cols) >= 2 {
            let r = inner % rows.min(cols) + 1;
            random_matrix(rows, r, seed).mul(&random_matrix(r, cols, seed ^ 0x9e37)).unwrap()
        } else {
            random_matrix(rows, cols, seed)
        };
        let rk = rank(&m, tol);
        let kernel = kernel_basis(&m, tol);
        prop_assert_eq!(rk + kernel.len(), cols);
        // Kernel vectors are genuinely annihilated and unit-norm.
        for v in &kernel {
            let img = m.mul_vec(v).unwrap();
            let residual = img.iter().map(|z| z.norm()).fold(0.0, f64::max);
            prop_assert!(residual <= 10.0 * tol.zero_abs * (1.0 + m.max_abs()),
                "kernel residual {residual}");
            let norm: f64 = v.iter().map(|z| z.norm_sqr()).sum();
            prop_assert!((norm - 1.0).abs() <= 1e-9);
        }
    }

    #[test]
    fn kd_distribution_is_phase_invariant(d in 2usize..=6, seed in any::<u64>()) {
        let t = haar_unitary(d, seed).unwrap();
        let psi = random_state(d, seed ^ 0x5151);
        let q0 = kd_distribution(&t, &psi).unwrap().q;

        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xfeed);
        // Global phase on the state.
        let phi = 2.0 * std::f64::consts::PI * rng.gen::<f64>();
        let rot = C64::new(phi.cos(), phi.sin());
        let spun = StateVector::new(
            psi.components().iter().map(|&z| rot * z).collect(),
            1e-9,
        ).unwrap();
        let q1 = kd_distribution(&t, &spun).unwrap().q;
        prop_assert!(q0.max_abs_diff(&q1).unwrap() <= 1e-12);

        // Per-vector phases on both bases, with the state following basis A.
        let alpha: Vec<C64> = (0..d).map(|_| {
            let a = 2.0 * std::f64::consts::PI * rng.gen::<f64>();
            C64::new(a.cos(), a.sin())
        }).collect();
        let beta: Vec<C64> = (0..d).map(|_| {
            let b = 2.0 * std::f64::consts::PI * rng.gen::<f64>();
            C64::new(b.cos(), b.sin())
        }).collect();
        let scaled = ComplexMatrix::from_fn(d, d, |i, j| alpha[i] * t.at(i, j) * beta[j]);
        let t2 = TransitionMatrix::new(scaled, t.tol()).unwrap();
        let psi2 = StateVector::new(
            psi.components().iter().enumerate().map(|(i, &z)| alpha[i] * z).collect(),
            1e-9,
        ).unwrap();
        let q2 = kd_distribution(&t2, &psi2).unwrap().q;
        prop_assert!(q0.max_abs_diff(&q2).unwrap() <= 1e-12);
    }

    #[test]
    fn entropy_bounded_by_support_size(d in 2usize..=7, seed in any::<u64>()) {
        let t = haar_unitary(d, seed).unwrap();
        let psi = random_state(d, seed ^ 0xe27).crisped(1e-9);
        let profile = support_profile(&t, &psi).unwrap();
        let (ha, hb) = entropies(&t, &psi).unwrap();
        prop_assert!(ha <= (profile.n_a as f64).ln() + 1e-9);
        prop_assert!(hb <= (profile.n_b as f64).ln() + 1e-9);
    }

    #[test]
    fn permutation_preserves_structure(seed in any::<u64>()) {
        // Permuting rows and columns relabels basis vectors: entry statistics,
        // unbiasedness, and complete incompatibility are all unchanged.
        let base = [dft(4).unwrap(), spin1(), tao()];
        for t in &base {
            let d = t.d();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let sigma = random_permutation(d, &mut rng);
            let tau = random_permutation(d, &mut rng);
            let p = permute(t, &sigma, &tau).unwrap();
            let s0 = stats(t);
            let s1 = stats(&p);
            prop_assert!((s0.min_mag - s1.min_mag).abs() <= 1e-12);
            prop_assert!((s0.max_mag - s1.max_mag).abs() <= 1e-12);
            prop_assert_eq!(s0.zeros, s1.zeros);
            prop_assert_eq!(s0.zeros_two_rows, s1.zeros_two_rows);
            prop_assert_eq!(s0.zeros_two_cols, s1.zeros_two_cols);
            prop_assert_eq!(is_mub(t), is_mub(&p));
            prop_assert_eq!(is_coinc(t).unwrap(), is_coinc(&p).unwrap());
        }
    }

    #[test]
    fn minimal_intersections_have_full_support(seed in any::<u64>(), pick in 0usize..=2) {
        // dft(7) has no vanishing minor, so the line H(S,T) at |S|+|T| = d+1
        // is spanned by a state supported on all of S and all of T.
        let d = 7;
        let t = dft(d).unwrap();
        let a = [2, 3, 4][pick];
        let b = d + 1 - a;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let s = random_subset(d, a, &mut rng);
        let tset = random_subset(d, b, &mut rng);
        let psi = sample_state(&t, &s, &tset, seed ^ 0xab).unwrap();
        let profile = support_profile(&t, &psi).unwrap();
        prop_assert_eq!(profile.n_a, a);
        prop_assert_eq!(profile.n_b, b);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn witness_never_contradicts_direct_classicality(seed in any::<u64>()) {
        let t = haar_unitary(4, seed).unwrap();
        for i in 0..10u64 {
            let psi = random_state(4, seed.wrapping_add(i)).crisped(1e-9);
            let w = witness(&t, &psi).unwrap();
            if w.outcome == WitnessOutcome::Nonclassical {
                prop_assert!(!is_kd_classical(&t, &psi).unwrap());
            }
        }
    }

    #[test]
    fn rotation_block_is_unitary_and_unsticks_the_minor(
        theta in 1e-3f64..0.3,
        seed in any::<u64>(),
    ) {
        // The worked 3x3 family with random unit phases: top-left 2x2 block
        // singular, whole matrix not.
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let phase = |rng: &mut ChaCha8Rng| {
            let a = 2.0 * std::f64::consts::PI * rng.gen::<f64>();
            C64::new(a.cos(), a.sin())
        };
        let (pa, pb, pc) = (phase(&mut rng), phase(&mut rng), phase(&mut rng));
        let entries = vec![
            pa * C64::new(1.0, 0.0), pa * C64::new(2.0, 0.0), pb * C64::new(1.0, 0.0),
            pa * C64::new(1.0, 0.0), pa * C64::new(2.0, 0.0), pb * C64::new(2.0, 0.0),
            pc * C64::new(3.0, 0.0), pc * C64::new(-1.0, 0.0), pb * C64::new(3.0, 0.0),
        ];
        let mplus = ComplexMatrix::new(3, 3, entries).unwrap();
        let tol = Tolerance::default();
        let v = unsticking_rotation(&mplus, theta, tol).unwrap();
        let gram = v.dagger().mul(&v).unwrap();
        prop_assert!(gram.max_abs_diff(&ComplexMatrix::identity(3)).unwrap() <= 1e-12);
        let v0 = unsticking_rotation(&mplus, 0.0, tol).unwrap();
        prop_assert!(v0.max_abs_diff(&ComplexMatrix::identity(3)).unwrap() <= 1e-12);
        let rotated = v.mul(&mplus).unwrap();
        let top = ComplexMatrix::from_fn(2, 2, |i, j| rotated.at(i, j));
        prop_assert!(det(&top).unwrap().norm() > 1e-6,
            "rotated minor still vanishing at theta = {theta}");
    }
}

// ------------------------------------------------------- deterministic

#[test]
fn magnitude_bounds_hold_on_catalog() {
    // For any transition matrix: 1 >= M^2 + m^2 (d-1) and 1 <= m^2 + M^2 (d-1).
    for (name, t) in catalog() {
        let d = t.d() as f64;
        let s = stats(&t);
        let (m, mm) = (s.min_mag, s.max_mag);
        assert!(
            1.0 >= mm * mm + m * m * (d - 1.0) - 1e-12,
            "{name}: upper magnitude bound violated"
        );
        assert!(
            1.0 <= m * m + mm * mm * (d - 1.0) + 1e-12,
            "{name}: lower magnitude bound violated"
        );
    }
}

#[test]
fn unbiased_three_dim_pairs_have_at_most_one_zero() {
    // d = 3: unless some |U_ij| = 1, a transition matrix has at most one
    // zero entry. Haar matrices essentially never have max magnitude 1,
    // so the zero count must be 0 or 1 throughout.
    let mut checked = 0;
    for seed in 0..1000u64 {
        let t = haar_unitary(3, seed).unwrap();
        let s = stats(&t);
        if s.max_mag < 1.0 - 1e-3 {
            checked += 1;
            assert!(s.zeros <= 1, "seed {seed}: {} zeros with M = {}", s.zeros, s.max_mag);
        }
    }
    assert!(checked >= 990, "conditioning rejected too many draws: {checked}");
}

/// Every nonempty (S, T) pair of a d-dimensional matrix, as index sets.
fn all_pairs(d: usize) -> Vec<(IndexSet, IndexSet)> {
    let sets: Vec<IndexSet> = (1u64..(1 << d))
        .map(|mask| {
            let members: Vec<usize> = (0..d).filter(|b| mask >> b & 1 == 1).map(|b| b + 1).collect();
            IndexSet::new(members, d).unwrap()
        })
        .collect();
    let mut pairs = Vec::new();
    for s in &sets {
        for t in &sets {
            pairs.push((s.clone(), t.clone()));
        }
    }
    pairs
}

#[test]
fn intersection_dimension_bound_is_tight_exactly_for_coinc() {
    // dim H(S,T) >= |S| + |T| - d always; equality for every pair holds
    // exactly when the pair of bases is completely incompatible.
    for (name, t) in catalog() {
        let d = t.d();
        let mut all_tight = true;
        for (s, tset) in all_pairs(d) {
            let dim = subspace_dim(&t, &s, &tset).unwrap();
            let floor = (s.len() + tset.len()).saturating_sub(d);
            assert!(dim >= floor, "{name}: dim {dim} below floor {floor}");
            if dim != floor {
                all_tight = false;
            }
        }
        assert_eq!(
            all_tight,
            is_coinc(&t).unwrap(),
            "{name}: tightness and complete incompatibility disagree"
        );
    }
}

#[test]
fn sampled_diagram_matches_exact_diagram() {
    // Random sampling at pinned budgets rediscovers the exact diagram.
    for (t, samples, seed) in [(dft(7).unwrap(), 20, 7u64), (tao(), 50, 7u64)] {
        let exact = uncertainty_diagram(&t).unwrap();
        let sampled = diagram_by_sampling(&t, samples, seed).unwrap();
        assert_eq!(exact.members(), sampled.members());
        assert_eq!(exact.lower_edge, sampled.lower_edge);
        assert_eq!(exact.n_min, sampled.n_min);
    }
}
