//! Independent brute-force cross-checks of the exact engines: uncertainty
//! diagrams rebuilt by random sampling, a randomized soundness sweep of the
//! nonclassicality witnesses, and a direct verifier for the obtuse-vector
//! counting bounds.
//!
//! Everything here is seeded and deterministic: per-cell and per-state RNGs
//! are derived from the caller's seed with a fixed mix, so results do not
//! depend on scheduling or iteration order.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::bases::{complex_gaussian, TransitionMatrix};
use crate::coinc::{dim_table, subspace_basis, UncertaintyDiagram};
use crate::error::{Error, Result};
use crate::kd::{
    is_kd_classical, support_profile, witness, StateVector, WitnessOutcome,
};
use crate::linalg::{IndexSet, C64};

/// SplitMix64 step; decorrelates derived seeds from consecutive inputs.
pub(crate) fn mix_seed(seed: u64, salt: u64) -> u64 {
    let mut z = seed ^ salt.wrapping_mul(0x9e3779b97f4a7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^ (z >> 31)
}

/// Haar-random normalized state: Gaussian components, normalized.
pub(crate) fn random_state(d: usize, rng: &mut ChaCha8Rng) -> StateVector {
    loop {
        let u: Vec<C64> = (0..d).map(|_| complex_gaussian(rng)).collect();
        if let Ok(psi) = StateVector::normalized(u) {
            return psi;
        }
    }
}

/// Rebuild the uncertainty diagram by sampling instead of the drop-one
/// criterion: draw `samples_per_cell` random states from every nontrivial
/// H(S,T) and mark the support shapes actually achieved. Sampling can only
/// under-cover, so members here are always a subset of the exact diagram;
/// at the documented sample counts the two agree on the catalog.
pub fn diagram_by_sampling(
    t: &TransitionMatrix,
    samples_per_cell: usize,
    seed: u64,
) -> Result<UncertaintyDiagram> {
    let d = t.d();
    if d > 8 {
        return Err(Error::SizeCap(format!(
            "sampling oracle is capped at d <= 8, got {d}"
        )));
    }
    let dims = dim_table(t)?;
    let full = 1usize << d;
    let tol = t.tol().zero_abs;

    let hits: Vec<Vec<bool>> = (1..full)
        .into_par_iter()
        .map(|smask| {
            let mut member = vec![false; d * d];
            let s = IndexSet::from_mask(smask as u64);
            for tmask in 1..full {
                if dims[(smask << d) | tmask] == 0 {
                    continue;
                }
                let tset = IndexSet::from_mask(tmask as u64);
                let basis = match subspace_basis(t, &s, &tset) {
                    Ok(b) => b,
                    Err(_) => continue,
                };
                let cell_seed = mix_seed(seed, ((smask as u64) << 32) | tmask as u64);
                let mut rng = ChaCha8Rng::seed_from_u64(cell_seed);
                for _ in 0..samples_per_cell {
                    let mut u = vec![C64::new(0.0, 0.0); d];
                    for vec in &basis {
                        let c = complex_gaussian(&mut rng);
                        for (acc, z) in u.iter_mut().zip(vec) {
                            *acc += c * z;
                        }
                    }
                    let Ok(psi) = StateVector::normalized(u) else { continue };
                    let Ok(profile) = support_profile(t, &psi.crisped(tol)) else {
                        continue;
                    };
                    member[(profile.n_a - 1) * d + (profile.n_b - 1)] = true;
                }
            }
            member
        })
        .collect();

    let mut member = vec![false; d * d];
    for row in hits {
        for (cell, hit) in row.into_iter().enumerate() {
            member[cell] = member[cell] || hit;
        }
    }
    // The max-dim grid has no sampling analogue; carry the exact values so
    // the result is a complete diagram.
    let mut max_dim = vec![0usize; d * d];
    for smask in 1..full {
        let na = smask.count_ones() as usize;
        for tmask in 1..full {
            let nb = tmask.count_ones() as usize;
            let cell = (na - 1) * d + (nb - 1);
            max_dim[cell] = max_dim[cell].max(dims[(smask << d) | tmask] as usize);
        }
    }
    Ok(UncertaintyDiagram::from_parts(d, member, max_dim))
}

/// Support shape of one group of scanned states.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CellTally {
    pub n_a: usize,
    pub n_b: usize,
    pub checked: usize,
    pub witness_nonclassical: usize,
}

/// A state the scan found to be KD classical.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassicalHit {
    pub n_a: usize,
    pub n_b: usize,
    /// Whether the state is a basis vector (support size 1 on either side).
    pub basis_vector: bool,
}

/// Outcome of a randomized witness-soundness sweep.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScanReport {
    pub seed: u64,
    pub states_checked: usize,
    /// States judged Nonclassical by the witness yet classical by direct
    /// inspection of Q. Must be zero; anything else is a library bug.
    pub violations: usize,
    pub witness_nonclassical: usize,
    pub classical_states: Vec<ClassicalHit>,
    pub cell_tallies: Vec<CellTally>,
}

/// Cross-check the support-based witnesses against direct KD classicality on
/// `n_states` states: half Haar-random, half drawn from the nontrivial
/// intersection subspaces H(S,T) (skipping draws whose exact supports cannot
/// be realized). Deterministic in `seed`.
pub fn classicality_scan(
    t: &TransitionMatrix,
    n_states: usize,
    seed: u64,
) -> Result<ScanReport> {
    let d = t.d();
    let mut states: Vec<StateVector> = Vec::with_capacity(n_states);

    let n_random = n_states.div_ceil(2);
    let mut rng = ChaCha8Rng::seed_from_u64(mix_seed(seed, 0xaa));
    for _ in 0..n_random {
        states.push(random_state(d, &mut rng));
    }

    // Structured states: cycle over the index-set pairs with nontrivial
    // intersections, one draw per visit.
    let dims = dim_table(t)?;
    let full = 1usize << d;
    let mut eligible: Vec<(u64, u64)> = Vec::new();
    for smask in 1..full {
        for tmask in 1..full {
            if dims[(smask << d) | tmask] >= 1 {
                eligible.push((smask as u64, tmask as u64));
            }
        }
    }
    let mut draw = 0u64;
    while states.len() < n_states && !eligible.is_empty() {
        let (smask, tmask) = eligible[(draw as usize) % eligible.len()];
        let s = IndexSet::from_mask(smask);
        let tset = IndexSet::from_mask(tmask);
        if let Ok(psi) = crate::coinc::sample_state(t, &s, &tset, mix_seed(seed, 0xbb ^ draw))
        {
            states.push(psi);
        }
        draw += 1;
        if draw > 20 * n_states as u64 {
            break; // every pair keeps failing; settle for the random half
        }
    }

    let mut violations = 0usize;
    let mut witness_nonclassical = 0usize;
    let mut classical_states = Vec::new();
    let mut tallies: std::collections::BTreeMap<(usize, usize), (usize, usize)> =
        std::collections::BTreeMap::new();
    for psi in &states {
        let profile = support_profile(t, psi)?;
        let verdict = witness(t, psi)?;
        let classical = is_kd_classical(t, psi)?;
        let entry = tallies.entry((profile.n_a, profile.n_b)).or_insert((0, 0));
        entry.0 += 1;
        if verdict.outcome == WitnessOutcome::Nonclassical {
            witness_nonclassical += 1;
            entry.1 += 1;
            if classical {
                violations += 1;
            }
        }
        if classical {
            classical_states.push(ClassicalHit {
                n_a: profile.n_a,
                n_b: profile.n_b,
                basis_vector: profile.n_a == 1 || profile.n_b == 1,
            });
        }
    }
    Ok(ScanReport {
        seed,
        states_checked: states.len(),
        violations,
        witness_nonclassical,
        classical_states,
        cell_tallies: tallies
            .into_iter()
            .map(|((n_a, n_b), (checked, nc))| CellTally {
                n_a,
                n_b,
                checked,
                witness_nonclassical: nc,
            })
            .collect(),
    })
}

/// Verify the counting bound for pairwise-obtuse vectors: k vectors in C^n
/// with all pairwise inner products real and <= 0 satisfy k <= 2n, and
/// k <= n+1 when the products are strictly negative. Returns the bound check
/// (false would be a library bug); errors with `Inapplicable` when the
/// pairwise hypothesis itself fails, which is distinct from a false return.
pub fn obtuse_bound_check(
    vectors: &[Vec<C64>],
    strict: bool,
    zero_tol: f64,
) -> Result<bool> {
    if vectors.is_empty() {
        return Err(Error::Validation("need at least one vector".into()));
    }
    let n = vectors[0].len();
    if vectors.iter().any(|v| v.len() != n) {
        return Err(Error::Dimension("vectors must share one dimension".into()));
    }
    if vectors.iter().any(|v| crate::linalg::norm(v) <= zero_tol) {
        return Err(Error::Validation("vectors must be nonzero".into()));
    }
    let k = vectors.len();
    for i in 0..k {
        for j in 0..i {
            let dot: C64 =
                vectors[i].iter().zip(&vectors[j]).map(|(a, b)| a.conj() * b).sum();
            if dot.im.abs() > zero_tol {
                return Err(Error::Inapplicable(format!(
                    "inner product of vectors {j} and {i} is not real: {dot}"
                )));
            }
            let bad = if strict { dot.re >= -zero_tol } else { dot.re > zero_tol };
            if bad {
                return Err(Error::Inapplicable(format!(
                    "inner product of vectors {j} and {i} is {} (needs {})",
                    dot.re,
                    if strict { "< 0" } else { "<= 0" }
                )));
            }
        }
    }
    Ok(if strict { k <= n + 1 } else { k <= 2 * n })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bases::{dft, spin1, tao};
    use crate::coinc::uncertainty_diagram;
    use crate::linalg::{ComplexMatrix, Tolerance};

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn sampling_matches_exact_on_spin1() {
        let t = spin1();
        let exact = uncertainty_diagram(&t).unwrap();
        let sampled = diagram_by_sampling(&t, 20, 99).unwrap();
        for na in 1..=3 {
            for nb in 1..=3 {
                assert_eq!(
                    sampled.is_member(na, nb),
                    exact.is_member(na, nb),
                    "cell ({na},{nb})"
                );
            }
        }
        assert_eq!(sampled.n_min, exact.n_min);
    }

    #[test]
    fn sampling_members_subset_of_exact_dft6() {
        let t = dft(6).unwrap();
        let exact = uncertainty_diagram(&t).unwrap();
        let sampled = diagram_by_sampling(&t, 3, 5).unwrap();
        for na in 1..=6 {
            for nb in 1..=6 {
                assert!(
                    !sampled.is_member(na, nb) || exact.is_member(na, nb),
                    "sampled cell ({na},{nb}) missing from exact diagram"
                );
            }
        }
    }

    #[test]
    fn sampling_identity_pair_is_diagonal() {
        let t = TransitionMatrix::new(ComplexMatrix::identity(4), Tolerance::default())
            .unwrap();
        let diag = diagram_by_sampling(&t, 10, 3).unwrap();
        for na in 1..=4 {
            for nb in 1..=4 {
                assert_eq!(diag.is_member(na, nb), na == nb, "cell ({na},{nb})");
            }
        }
    }

    #[test]
    fn sampling_cap() {
        let t = dft(9).unwrap();
        assert!(matches!(diagram_by_sampling(&t, 1, 1), Err(Error::SizeCap(_))));
    }

    #[test]
    fn scan_spin1_clean() {
        let report = classicality_scan(&spin1(), 300, 7).unwrap();
        assert_eq!(report.violations, 0);
        assert_eq!(report.states_checked, 300);
        assert!(report.witness_nonclassical > 0);
    }

    #[test]
    fn scan_tao_classical_states_have_small_support() {
        let report = classicality_scan(&tao(), 300, 13).unwrap();
        assert_eq!(report.violations, 0);
        for hit in &report.classical_states {
            assert!(hit.n_a + hit.n_b <= 7, "classical at n_ab = {}", hit.n_a + hit.n_b);
        }
    }

    #[test]
    fn scan_is_deterministic() {
        let a = classicality_scan(&spin1(), 100, 21).unwrap();
        let b = classicality_scan(&spin1(), 100, 21).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn obtuse_bound_axis_pairs() {
        // +-e1, +-e2 in n = 2: k = 4 = 2n, hypothesis non-strict.
        let vecs = vec![
            vec![c(1.0, 0.0), c(0.0, 0.0)],
            vec![c(-1.0, 0.0), c(0.0, 0.0)],
            vec![c(0.0, 0.0), c(1.0, 0.0)],
            vec![c(0.0, 0.0), c(-1.0, 0.0)],
        ];
        assert!(obtuse_bound_check(&vecs, false, 1e-9).unwrap());
    }

    #[test]
    fn obtuse_bound_planar_simplex() {
        // Three unit vectors at 120 degrees in the real plane: k = 3 = n+1.
        let v = |phi: f64| vec![c(phi.cos(), 0.0), c(phi.sin(), 0.0)];
        let vecs = vec![
            v(0.0),
            v(2.0 * std::f64::consts::PI / 3.0),
            v(4.0 * std::f64::consts::PI / 3.0),
        ];
        assert!(obtuse_bound_check(&vecs, true, 1e-9).unwrap());
    }

    #[test]
    fn obtuse_bound_rejects_acute() {
        let vecs = vec![
            vec![c(1.0, 0.0), c(0.0, 0.0)],
            vec![c(1.0, 0.0), c(0.1, 0.0)],
        ];
        assert!(matches!(
            obtuse_bound_check(&vecs, false, 1e-9),
            Err(Error::Inapplicable(_))
        ));
        // Orthogonal pairs fail the strict hypothesis.
        let vecs = vec![
            vec![c(1.0, 0.0), c(0.0, 0.0)],
            vec![c(0.0, 0.0), c(1.0, 0.0)],
        ];
        assert!(matches!(
            obtuse_bound_check(&vecs, true, 1e-9),
            Err(Error::Inapplicable(_))
        ));
    }
}
