//! The acceptance suite: eleven numbered end-to-end checks with pinned
//! expected values, seeds, and tolerances. `verify` on the CLI runs these;
//! the `acceptance` integration test prints one line per criterion.
//!
//! Each criterion returns `Ok(detail)` on success and an error describing
//! the first failed assertion otherwise. All randomness is seeded, so a
//! pass/fail is reproducible bit for bit.

use std::collections::BTreeSet;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::bases::{
    catalog, complex_gaussian, dft, haar_unitary, mub4, spin1, stats, tao, TransitionMatrix,
};
use crate::coinc::{
    coinc_diagram_equivalence, hierarchy, is_coinc, sample_state, subspace_basis,
    uncertainty_diagram,
};
use crate::error::{Error, Result};
use crate::kd::{
    entropies, is_kd_classical, kd_distribution, support_profile, witness, StateVector,
    WitnessOutcome, WitnessRule,
};
use crate::linalg::{
    enumerate_minors, kernel_basis, rank, Combinations, ComplexMatrix, IndexSet, Tolerance, C64,
};
use crate::oracle::{classicality_scan, mix_seed, obtuse_bound_check, random_state};
use crate::perturb::{coincify, near_mub_coinc};

/// Outcome of one numbered criterion.
#[derive(Debug, Clone)]
pub struct CriterionResult {
    pub id: usize,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl CriterionResult {
    /// The one-line form the test harness and CLI print.
    pub fn line(&self) -> String {
        format!(
            "criterion {:2} [{}] {} — {}",
            self.id,
            if self.passed { "pass" } else { "FAIL" },
            self.name,
            self.detail
        )
    }
}

macro_rules! ensure {
    ($cond:expr, $($arg:tt)+) => {
        if !($cond) {
            return Err(Error::Validation(format!($($arg)+)));
        }
    };
}

/// Run every criterion. `quick` shrinks the sampled-state counts (never the
/// exact combinatorial checks) for a fast smoke run.
pub fn run_all(quick: bool) -> Vec<CriterionResult> {
    vec![
        finish(1, "tao uncertainty diagram", tao_diagram()),
        finish(2, "dft coinc iff prime dimension", dft_primality(quick)),
        finish(3, "halfspace diagram equivalence", halfspace_equivalence()),
        finish(4, "spin-1 intersection census", spin1_census(quick)),
        finish(5, "incompatibility hierarchy strictness", hierarchy_table()),
        finish(6, "tao minor census", tao_minors()),
        finish(7, "witness soundness sweep", witness_soundness(quick)),
        finish(8, "mub classical states are basis vectors", mub_classical_states(quick)),
        finish(9, "perturbation to complete incompatibility", perturbation()),
        finish(10, "property suites", property_suites(quick)),
        finish(11, "coinc density smoke test", coinc_density()),
    ]
}

fn finish(id: usize, name: &'static str, outcome: Result<String>) -> CriterionResult {
    match outcome {
        Ok(detail) => CriterionResult { id, name, passed: true, detail },
        Err(e) => CriterionResult { id, name, passed: false, detail: e.to_string() },
    }
}

// ------------------------------------------------------------ criterion 1

/// The 6x6 diagram of the tao matrix: members are the half-space
/// n_a + n_b >= 7 with (2,5) and (5,2) removed and (2,4) and (4,2) added;
/// lower edge (6,4,4,2,3,1). Exact set equality.
fn tao_diagram() -> Result<String> {
    let diag = uncertainty_diagram(&tao())?;
    let mut expected: BTreeSet<(usize, usize)> = BTreeSet::new();
    for na in 1..=6 {
        for nb in 1..=6 {
            if na + nb >= 7 {
                expected.insert((na, nb));
            }
        }
    }
    expected.remove(&(2, 5));
    expected.remove(&(5, 2));
    expected.insert((2, 4));
    expected.insert((4, 2));
    let got: BTreeSet<(usize, usize)> = diag.members().into_iter().collect();
    ensure!(
        got == expected,
        "member set mismatch: unexpected {:?}, missing {:?}",
        got.difference(&expected).collect::<Vec<_>>(),
        expected.difference(&got).collect::<Vec<_>>()
    );
    let edge = [6, 4, 4, 2, 3, 1];
    ensure!(diag.lower_edge == edge, "lower edge {:?}, expected {edge:?}", diag.lower_edge);
    Ok(format!("{} members, lower edge {edge:?}", got.len()))
}

// ------------------------------------------------------------ criterion 2

fn is_prime(n: usize) -> bool {
    n >= 2 && (2..).take_while(|k| k * k <= n).all(|k| n % k != 0)
}

/// dft(d) is completely incompatible exactly when d is prime, d = 2..12.
fn dft_primality(quick: bool) -> Result<String> {
    let dmax = if quick { 10 } else { 12 };
    for d in 2..=dmax {
        let coinc = is_coinc(&dft(d)?)?;
        let prime = is_prime(d);
        ensure!(coinc == prime, "dft({d}): coinc = {coinc} but prime = {prime}");
    }
    Ok(format!("coinc(dft(d)) = primality for every d in 2..={dmax}"))
}

// ------------------------------------------------------------ criterion 3

/// dft(7) has exactly the half-space diagram n_a + n_b >= 8, and the
/// coinc <=> half-space equivalence holds across the whole catalog.
fn halfspace_equivalence() -> Result<String> {
    let diag = uncertainty_diagram(&dft(7)?)?;
    for na in 1..=7 {
        for nb in 1..=7 {
            ensure!(
                diag.is_member(na, nb) == (na + nb >= 8),
                "dft(7) cell ({na},{nb}): member = {}",
                diag.is_member(na, nb)
            );
        }
    }
    let names: Vec<&str> = catalog().iter().map(|(n, _)| *n).collect();
    for (name, t) in catalog() {
        ensure!(coinc_diagram_equivalence(&t)?, "equivalence fails for {name}");
    }
    Ok(format!("dft(7) is the exact half-space; equivalence holds for {:?}", names))
}

// ------------------------------------------------------------ criterion 4

/// Index of the spin-1 eigenvalue eps in {+1, 0, -1} ordering.
fn spin_index(eps: i32) -> usize {
    match eps {
        1 => 1,
        0 => 2,
        _ => 3,
    }
}

/// The one-dimensional intersection fixed by removing |z,eps'> from the
/// z side and |x,eps> from the x side.
fn spin1_intersection(t: &TransitionMatrix, eps: i32, eps_p: i32) -> Result<StateVector> {
    let d = 3;
    let s = IndexSet::new(
        (1..=d).filter(|&i| i != spin_index(eps_p)).collect::<Vec<_>>(),
        d,
    )?;
    let tset = IndexSet::new(
        (1..=d).filter(|&j| j != spin_index(eps)).collect::<Vec<_>>(),
        d,
    )?;
    let basis = subspace_basis(t, &s, &tset)?;
    ensure!(
        basis.len() == 1,
        "H(S,T) for eps = {eps}, eps' = {eps_p} has dimension {}",
        basis.len()
    );
    Ok(StateVector::new(basis[0].clone(), t.tol().zero_abs)?.crisped(t.tol().zero_abs))
}

fn overlap(a: &StateVector, b: &[C64]) -> f64 {
    a.components()
        .iter()
        .zip(b)
        .map(|(x, y)| x.conj() * y)
        .sum::<C64>()
        .norm()
}

/// The spin-1 table: the psi_{eps,eps'} with eps, eps' in {+1,-1} (and the
/// central psi_{0,0}) are KD classical at the edge n_ab = 4; the four mixed
/// cells collapse to |x,0> or |z,0> with n_ab = 3; and sampled states above
/// the edge are all nonclassical, each certified by the sparse-zeros witness.
fn spin1_census(quick: bool) -> Result<String> {
    let t = spin1();

    // Corner states + center: classical with support profile (2, 2).
    let mut corners = vec![(1, 1), (1, -1), (-1, 1), (-1, -1)];
    corners.push((0, 0));
    for &(eps, eps_p) in &corners {
        let psi = spin1_intersection(&t, eps, eps_p)?;
        let profile = support_profile(&t, &psi)?;
        ensure!(
            profile.n_a == 2 && profile.n_b == 2,
            "psi_({eps},{eps_p}): profile ({}, {})",
            profile.n_a,
            profile.n_b
        );
        ensure!(
            is_kd_classical(&t, &psi)?,
            "psi_({eps},{eps_p}) should be KD classical"
        );
    }

    // Mixed cells: equal to |x,0> (eps' = 0) or |z,0> (eps = 0), n_ab = 3.
    let x0: Vec<C64> = (0..3).map(|i| t.at(i, 1)).collect();
    let z0 = vec![C64::new(0.0, 0.0), C64::new(1.0, 0.0), C64::new(0.0, 0.0)];
    for &(eps, eps_p) in &[(1, 0), (-1, 0), (0, 1), (0, -1)] {
        let psi = spin1_intersection(&t, eps, eps_p)?;
        let target = if eps_p == 0 { &x0 } else { &z0 };
        let which = if eps_p == 0 { "|x,0>" } else { "|z,0>" };
        ensure!(
            (overlap(&psi, target) - 1.0).abs() <= 1e-9,
            "psi_({eps},{eps_p}) is not {which} (overlap {})",
            overlap(&psi, target)
        );
        let profile = support_profile(&t, &psi)?;
        ensure!(
            profile.n_ab == 3,
            "psi_({eps},{eps_p}): n_ab = {}, expected 3",
            profile.n_ab
        );
        ensure!(is_kd_classical(&t, &psi)?, "psi_({eps},{eps_p}) should be KD classical");
    }

    // Above the edge: every sampled state with n_ab > 4 is nonclassical and
    // the sparse-zeros rule certifies it.
    let full = IndexSet::full(3);
    let two_sets: Vec<IndexSet> = vec![
        IndexSet::new(vec![1, 2], 3)?,
        IndexSet::new(vec![1, 3], 3)?,
        IndexSet::new(vec![2, 3], 3)?,
    ];
    let mut cells: Vec<(IndexSet, IndexSet)> = Vec::new();
    for s in &two_sets {
        cells.push((s.clone(), full.clone()));
    }
    for tset in &two_sets {
        cells.push((full.clone(), tset.clone()));
    }
    cells.push((full.clone(), full.clone()));
    let n = if quick { 100 } else { 500 };
    for draw in 0..n {
        let (s, tset) = &cells[draw % cells.len()];
        let psi = sample_state(&t, s, tset, mix_seed(0x5104, draw as u64))?;
        let profile = support_profile(&t, &psi)?;
        ensure!(profile.n_ab > 4, "draw {draw}: n_ab = {} <= 4", profile.n_ab);
        ensure!(
            !is_kd_classical(&t, &psi)?,
            "draw {draw}: state with n_ab = {} is KD classical",
            profile.n_ab
        );
        let w = witness(&t, &psi)?;
        ensure!(
            w.outcome == WitnessOutcome::Nonclassical && w.rule == Some(WitnessRule::SparseZeros),
            "draw {draw}: witness returned {:?} via {:?}",
            w.outcome,
            w.rule
        );
    }
    Ok(format!(
        "5 edge states classical at n_ab = 4, 4 cells equal |x,0>/|z,0> at n_ab = 3, {n} states above the edge all witnessed nonclassical"
    ))
}

// ------------------------------------------------------------ criterion 5

/// Strictness of the four-level hierarchy on the pinned examples, plus the
/// commuting-projector witness pair for the mub4 family.
fn hierarchy_table() -> Result<String> {
    let cases: Vec<(&str, TransitionMatrix, [bool; 4])> = vec![
        ("tao", tao(), [false, true, true, true]),
        ("mub4(1)", mub4(C64::new(1.0, 0.0))?, [false, false, true, true]),
        ("mub4(i)", mub4(C64::new(0.0, 1.0))?, [false, false, true, true]),
        ("spin1", spin1(), [false, false, false, true]),
        ("dft5", dft(5)?, [true, true, true, true]),
    ];
    for (name, t, expect) in &cases {
        let h = hierarchy(t)?;
        let got = [h.coinc, h.all_projectors_noncommute, h.m_positive, h.max_below_one];
        ensure!(got == *expect, "{name}: hierarchy {got:?}, expected {expect:?}");
        if *name == "mub4(1)" || *name == "mub4(i)" {
            let (s, tset) = h
                .first_commuting_pair
                .ok_or_else(|| Error::Validation(format!("{name}: no commuting pair found")))?;
            ensure!(
                s.members() == [1, 2] && tset.members() == [1, 2],
                "{name}: commuting pair S = {:?}, T = {:?}",
                s.members(),
                tset.members()
            );
        }
    }
    Ok("tao / mub4(1) / mub4(i) / spin1 / dft5 match, mub4 pair S = T = {1,2}".into())
}

// ------------------------------------------------------------ criterion 6

/// The tao matrix has no vanishing 3x3 minor (0 of 400) yet does have
/// vanishing 2x2 minors.
fn tao_minors() -> Result<String> {
    let rep = enumerate_minors(tao().matrix(), Tolerance::default())?;
    let c3 = &rep.per_size[2];
    ensure!(c3.size == 3, "per_size misordered");
    ensure!(
        c3.total == 400 && c3.vanishing == 0,
        "3x3 census: {} of {} vanish",
        c3.vanishing,
        c3.total
    );
    let c2 = &rep.per_size[1];
    ensure!(c2.vanishing > 0, "expected vanishing 2x2 minors, found none");
    Ok(format!(
        "0/400 vanishing 3x3 minors, {} vanishing 2x2 minors",
        c2.vanishing
    ))
}

// ------------------------------------------------------------ criterion 7

/// Witness soundness: across the catalog, no state is flagged nonclassical
/// by a witness while its KD distribution is actually classical.
fn witness_soundness(quick: bool) -> Result<String> {
    let n = if quick { 200 } else { 1000 };
    let mut states = 0;
    let mut flagged = 0;
    for (name, t) in catalog() {
        let rep = classicality_scan(&t, n, 0x0C7)?;
        ensure!(
            rep.violations == 0,
            "{name}: {} witness/classicality violations",
            rep.violations
        );
        states += rep.states_checked;
        flagged += rep.witness_nonclassical;
    }
    Ok(format!(
        "{states} states over {} matrices, {flagged} witnessed nonclassical, 0 violations",
        catalog().len()
    ))
}

// ------------------------------------------------------------ criterion 8

/// For dft(7) — mutually unbiased and completely incompatible — every
/// KD-classical state found is a basis vector. Checks all 3003 generators
/// of the minimal-support intersections |S| + |T| = 8 (each H(S,T) is a
/// line) plus Haar-random states.
fn mub_classical_states(quick: bool) -> Result<String> {
    let t = dft(7)?;
    let tol = t.tol().zero_abs;
    let mut checked = 0usize;
    let mut classical = 0usize;
    for sa in 1..=7usize {
        let sb = 8 - sa;
        if !(1..=7).contains(&sb) {
            continue;
        }
        for srows in Combinations::new(7, sa) {
            let s = IndexSet::from_zero_based(&srows);
            for tcols in Combinations::new(7, sb) {
                let tset = IndexSet::from_zero_based(&tcols);
                let basis = subspace_basis(&t, &s, &tset)?;
                ensure!(
                    basis.len() == 1,
                    "H(S,T) with S = {:?}, T = {:?}: dimension {}",
                    s.members(),
                    tset.members(),
                    basis.len()
                );
                let psi = StateVector::new(basis[0].clone(), tol)?.crisped(tol);
                checked += 1;
                if is_kd_classical(&t, &psi)? {
                    classical += 1;
                    let profile = support_profile(&t, &psi)?;
                    ensure!(
                        profile.n_a == 1 || profile.n_b == 1,
                        "classical generator at S = {:?}, T = {:?} is not a basis vector (profile ({}, {}))",
                        s.members(),
                        tset.members(),
                        profile.n_a,
                        profile.n_b
                    );
                }
            }
        }
    }
    ensure!(checked == 3003, "expected 3003 generators, checked {checked}");
    let extra = if quick { 0 } else { 500 };
    let mut rng = ChaCha8Rng::seed_from_u64(0x0C8);
    for i in 0..extra {
        let psi = random_state(7, &mut rng).crisped(tol);
        checked += 1;
        if is_kd_classical(&t, &psi)? {
            classical += 1;
            let profile = support_profile(&t, &psi)?;
            ensure!(
                profile.n_a == 1 || profile.n_b == 1,
                "classical sampled state {i} is not a basis vector"
            );
        }
    }
    ensure!(checked >= 2000, "only {checked} states checked");
    ensure!(
        classical == 14,
        "expected exactly the 14 basis vectors classical, found {classical}"
    );
    Ok(format!(
        "{checked} states checked, {classical} classical, all of them basis vectors"
    ))
}

// ------------------------------------------------------------ criterion 9

/// coincify on dft(4) stays unitary, lands on a completely incompatible
/// matrix within entrywise distance 0.2; near_mub_coinc(4, 0.05) keeps the
/// smallest transition magnitude within 0.05 of the unbiased value 1/2.
fn perturbation() -> Result<String> {
    let base = dft(4)?;
    let (fixed, trace) = coincify(&base, 0.05)?;
    let d = fixed.d();
    let gram = fixed.matrix().dagger().mul(fixed.matrix())?;
    let unit_err = gram.max_abs_diff(&ComplexMatrix::identity(d))?;
    ensure!(unit_err <= 1e-8, "output unitarity error {unit_err:.3e}");
    ensure!(is_coinc(&fixed)?, "coincify(dft(4)) is not completely incompatible");
    let dev = fixed.matrix().max_abs_diff(base.matrix())?;
    ensure!(dev < 0.2, "entrywise deviation {dev:.4} >= 0.2");

    let near = near_mub_coinc(4, 0.05)?;
    ensure!(is_coinc(&near)?, "near_mub_coinc(4, 0.05) is not completely incompatible");
    let min_mag = stats(&near).min_mag;
    ensure!(min_mag >= 0.45, "smallest magnitude {min_mag:.4} < 0.45");
    Ok(format!(
        "dft(4) repaired in {} rounds (deviation {dev:.4}, unitarity {unit_err:.1e}); near-mub min magnitude {min_mag:.4}",
        trace.rounds.len()
    ))
}

// ----------------------------------------------------------- criterion 10

/// Unit vectors of a regular simplex in R^n: n+1 of them, pairwise inner
/// product exactly -1/n.
fn simplex_vectors(n: usize) -> Vec<Vec<C64>> {
    let a = ((n as f64 + 1.0) / n as f64).sqrt();
    let b = (1.0 / (n as f64).sqrt() - a) / n as f64;
    let mut out: Vec<Vec<C64>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| C64::new(b + if i == j { a } else { 0.0 }, 0.0))
                .collect()
        })
        .collect();
    out.push(vec![C64::new(-1.0 / (n as f64).sqrt(), 0.0); n]);
    out
}

/// Seeded property suites: the support uncertainty relation, the
/// Maassen-Uffink entropic bound, KD marginals, rank-nullity, and the
/// obtuse-vector counting bounds on their three example families.
fn property_suites(quick: bool) -> Result<String> {
    let trials = if quick { 200 } else { 1000 };
    let dims = [2usize, 3, 4, 5, 6];

    // Support uncertainty n_a * n_b >= 1/M^2 and Maassen-Uffink entropy sum.
    for i in 0..trials {
        let d = dims[i % dims.len()];
        let t = haar_unitary(d, mix_seed(0x0A1, i as u64))?;
        let mut rng = ChaCha8Rng::seed_from_u64(mix_seed(0x0A2, i as u64));
        let psi = random_state(d, &mut rng).crisped(t.tol().zero_abs);
        let m_max = stats(&t).max_mag;
        let profile = support_profile(&t, &psi)?;
        let bound = 1.0 / (m_max * m_max);
        ensure!(
            (profile.n_a * profile.n_b) as f64 >= bound - 1e-9,
            "trial {i}: n_a n_b = {} < {bound:.6}",
            profile.n_a * profile.n_b
        );
        let (ha, hb) = entropies(&t, &psi)?;
        let ent_bound = -2.0 * m_max.ln();
        ensure!(
            ha + hb >= ent_bound - 1e-9,
            "trial {i}: H_a + H_b = {:.12} < {ent_bound:.12}",
            ha + hb
        );
    }

    // KD marginals: row sums |u_i|^2, column sums |v_j|^2, total 1.
    for i in 0..trials {
        let d = dims[i % dims.len()];
        let t = haar_unitary(d, mix_seed(0x0A3, i as u64))?;
        let mut rng = ChaCha8Rng::seed_from_u64(mix_seed(0x0A4, i as u64));
        let psi = random_state(d, &mut rng);
        let kd = kd_distribution(&t, &psi)?;
        ensure!(
            (kd.total - C64::new(1.0, 0.0)).norm() <= 1e-8,
            "trial {i}: total {} off 1",
            kd.total
        );
        let v = crate::kd::b_representation(&t, &psi)?;
        for r in 0..d {
            let row: C64 = (0..d).map(|c| kd.q.at(r, c)).sum();
            let expect = psi.components()[r].norm_sqr();
            ensure!(
                (row - C64::new(expect, 0.0)).norm() <= 1e-8,
                "trial {i}: row {r} marginal off by {:.2e}",
                (row - C64::new(expect, 0.0)).norm()
            );
        }
        for c in 0..d {
            let col: C64 = (0..d).map(|r| kd.q.at(r, c)).sum();
            let expect = v[c].norm_sqr();
            ensure!(
                (col - C64::new(expect, 0.0)).norm() <= 1e-8,
                "trial {i}: column {c} marginal off by {:.2e}",
                (col - C64::new(expect, 0.0)).norm()
            );
        }
    }

    // Rank-nullity on random (possibly rank-deficient) complex matrices.
    let tol = Tolerance::default();
    for i in 0..trials {
        let mut rng = ChaCha8Rng::seed_from_u64(mix_seed(0x0A5, i as u64));
        let rows = 1 + i % 6;
        let cols = 1 + (i / 6) % 6;
        let m = if i % 2 == 0 || rows.min(cols) < 2 {
            ComplexMatrix::new(
                rows,
                cols,
                (0..rows * cols).map(|_| complex_gaussian(&mut rng)).collect(),
            )?
        } else {
            let r = 1 + i % (rows.min(cols) - 1).max(1);
            let left = ComplexMatrix::new(
                rows,
                r,
                (0..rows * r).map(|_| complex_gaussian(&mut rng)).collect(),
            )?;
            let right = ComplexMatrix::new(
                r,
                cols,
                (0..r * cols).map(|_| complex_gaussian(&mut rng)).collect(),
            )?;
            left.mul(&right)?
        };
        let rk = rank(&m, tol);
        let nullity = kernel_basis(&m, tol).len();
        ensure!(
            rk + nullity == cols,
            "trial {i}: rank {rk} + nullity {nullity} != {cols} ({rows}x{cols})"
        );
    }

    // Obtuse counting bounds on the three example families.
    for n in 2..=5usize {
        // +-e_i: 2n vectors, pairwise products <= 0, saturating k <= 2n.
        let mut pm: Vec<Vec<C64>> = Vec::new();
        for i in 0..n {
            for sign in [1.0, -1.0] {
                let mut v = vec![C64::new(0.0, 0.0); n];
                v[i] = C64::new(sign, 0.0);
                pm.push(v);
            }
        }
        ensure!(
            obtuse_bound_check(&pm, false, 1e-12)?,
            "plus-minus basis family fails at n = {n}"
        );
        // Regular simplex: n+1 strictly obtuse vectors, saturating k <= n+1.
        ensure!(
            obtuse_bound_check(&simplex_vectors(n), true, 1e-12)?,
            "simplex family fails at n = {n}"
        );
    }
    // Vacuity: n + 2 strictly obtuse vectors in R^n cannot exist; no random
    // draw in R^3 ever satisfies the hypothesis, and none may slip through
    // as a bound violation.
    let attempts = if quick { 20_000 } else { 100_000 };
    let mut rng = ChaCha8Rng::seed_from_u64(0x0A6);
    for i in 0..attempts {
        let vectors: Vec<Vec<C64>> = (0..5)
            .map(|_| (0..3).map(|_| C64::new(complex_gaussian(&mut rng).re, 0.0)).collect())
            .collect();
        match obtuse_bound_check(&vectors, true, 1e-12) {
            Err(Error::Inapplicable(_)) => {}
            Ok(ok) => {
                ensure!(
                    false,
                    "attempt {i}: 5 strictly obtuse vectors in R^3 accepted (bound check {ok})"
                );
            }
            Err(e) => return Err(e),
        }
    }

    Ok(format!(
        "support relation, entropic bound, KD marginals, rank-nullity over {trials} trials each; obtuse families pass, {attempts} vacuity draws all rejected"
    ))
}

// ----------------------------------------------------------- criterion 11

/// Statistical proxy for density: at least 95 of 100 seeded Haar-random
/// 4x4 unitaries are completely incompatible with no perturbation at all.
fn coinc_density() -> Result<String> {
    let mut hits = 0;
    for i in 0..100u64 {
        if is_coinc(&haar_unitary(4, mix_seed(0x0D4, i))?)? {
            hits += 1;
        }
    }
    ensure!(hits >= 95, "only {hits}/100 haar unitaries are completely incompatible");
    Ok(format!("{hits}/100 haar-random d = 4 unitaries coinc"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quick_suite_passes() {
        for r in run_all(true) {
            assert!(r.passed, "{}", r.line());
        }
    }

    #[test]
    fn primes_below_13() {
        let primes: Vec<usize> = (2..13).filter(|&n| is_prime(n)).collect();
        assert_eq!(primes, vec![2, 3, 5, 7, 11]);
    }

    #[test]
    fn simplex_vectors_are_unit_and_obtuse() {
        for n in 2..=6 {
            let v = simplex_vectors(n);
            assert_eq!(v.len(), n + 1);
            for i in 0..v.len() {
                let norm: f64 = v[i].iter().map(|z| z.norm_sqr()).sum();
                assert!((norm - 1.0).abs() < 1e-12, "n = {n}, |v_{i}| = {norm}");
                for j in 0..i {
                    let dot: C64 = v[i].iter().zip(&v[j]).map(|(a, b)| a.conj() * b).sum();
                    assert!((dot.re + 1.0 / n as f64).abs() < 1e-12);
                    assert!(dot.im.abs() < 1e-15);
                }
            }
        }
    }
}
