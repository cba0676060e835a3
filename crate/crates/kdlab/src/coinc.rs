//! Complete incompatibility of a basis pair and everything computed from the
//! subspace intersections H(S,T) = span{a_i : i in S} /\ span{b_j : j in T}:
//! intersection dimensions, the incompatibility hierarchy, exact
//! support-uncertainty diagrams, and sampling of states with prescribed
//! supports.
//!
//! The workhorse identity is dim H(S,T) = |T| - rank U(S^c, T); a basis pair
//! is completely incompatible (every H(S,T) with |S| + |T| <= d trivial)
//! exactly when no minor of U of any size vanishes.

use rayon::prelude::*;

use crate::bases::{stats, TransitionMatrix};
use crate::error::{Error, Result};
use crate::kd::{support_profile, StateVector};
use crate::linalg::{
    first_vanishing_minor, rank, submatrix, ComplexMatrix, IndexSet, C64, DIM_CAP,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// dim(span{a_i : i in S} /\ span{b_j : j in T}) = |T| - rank U(S^c, T).
pub fn subspace_dim(t: &TransitionMatrix, s: &IndexSet, tset: &IndexSet) -> Result<usize> {
    if s.is_empty() || tset.is_empty() {
        return Err(Error::Validation("subspace_dim needs nonempty index sets".into()));
    }
    let d = t.d();
    if s.members().last().is_some_and(|&i| i > d)
        || tset.members().last().is_some_and(|&j| j > d)
    {
        return Err(Error::Bounds(format!("index sets must lie within [1, {d}]")));
    }
    let block = submatrix(t.matrix(), &s.complement(d), tset)?;
    Ok(tset.len() - rank(&block, t.tol()))
}

/// True iff no minor of U of any size vanishes; decided by a short-circuiting
/// scan, smallest sizes first.
pub fn is_coinc(t: &TransitionMatrix) -> Result<bool> {
    Ok(first_vanishing_minor(t.matrix(), t.tol(), DIM_CAP)?.is_none())
}

/// The four-level incompatibility hierarchy of a basis pair. Each level is
/// strictly weaker than the one before it:
/// complete incompatibility => no pair of subspace projectors commutes =>
/// no zero entries => no unit-magnitude entry.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HierarchyReport {
    pub coinc: bool,
    pub all_projectors_noncommute: bool,
    pub m_positive: bool,
    pub max_below_one: bool,
    /// First (S, T) whose projectors commute, in scan order, if any.
    pub first_commuting_pair: Option<(IndexSet, IndexSet)>,
}

/// Nonempty subsets of {1..d} of size < d as bitmasks, in lexicographic order
/// of their sorted member lists ({1} < {1,2} < {1,2,3} < {1,3} < {2} < ...).
/// With `must_contain_first`, only subsets containing index 1.
fn proper_subsets_lex(d: usize, must_contain_first: bool) -> Vec<u64> {
    fn extend(d: usize, prefix_mask: u64, last: usize, size: usize, out: &mut Vec<u64>) {
        if size > 0 && size < d {
            out.push(prefix_mask);
        }
        for next in last + 1..=d {
            extend(d, prefix_mask | 1 << (next - 1), next, size + 1, out);
        }
    }
    let mut out = Vec::new();
    if must_contain_first {
        extend(d, 1, 1, 1, &mut out);
    } else {
        extend(d, 0, 0, 0, &mut out);
    }
    out
}

/// Whether the projectors onto span{a_i : i in S} and span{b_j : j in T}
/// commute: equivalent to U(S^c, T) U(S, T)^dagger = 0.
fn projectors_commute(t: &TransitionMatrix, s: &IndexSet, tset: &IndexSet) -> Result<bool> {
    let d = t.d();
    let a = submatrix(t.matrix(), &s.complement(d), tset)?;
    let b = submatrix(t.matrix(), s, tset)?;
    let prod = a.mul(&b.dagger())?;
    Ok(prod.max_abs() <= t.tol().zero_abs)
}

/// Evaluate all four hierarchy levels. The commutator scan covers S with
/// 1 <= |S| < d and T with 1 <= |T| < d; since swapping S for its complement
/// flips the commutator's sign only, S is canonicalized to contain index 1.
/// Pairs are scanned in lexicographic order (S major) and the first commuting
/// pair short-circuits the sweep.
pub fn hierarchy(t: &TransitionMatrix) -> Result<HierarchyReport> {
    let d = t.d();
    if d > DIM_CAP {
        return Err(Error::SizeCap(format!(
            "dimension {d} exceeds the subset-scan cap {DIM_CAP}"
        )));
    }
    let coinc = is_coinc(t)?;
    let st = stats(t);
    let tol = t.tol().zero_abs;

    let s_masks = proper_subsets_lex(d, true);
    let t_masks = proper_subsets_lex(d, false);
    let first_commuting_pair: Option<(IndexSet, IndexSet)> =
        s_masks.par_iter().find_map_first(|&smask| {
            let s = IndexSet::from_mask(smask);
            for &tmask in &t_masks {
                let tset = IndexSet::from_mask(tmask);
                match projectors_commute(t, &s, &tset) {
                    Ok(true) => return Some((s, tset)),
                    Ok(false) => {}
                    Err(_) => unreachable!("masks are in range by construction"),
                }
            }
            None
        });

    Ok(HierarchyReport {
        coinc,
        all_projectors_noncommute: first_commuting_pair.is_none(),
        m_positive: st.min_mag > tol,
        max_below_one: st.max_mag < 1.0 - tol,
        first_commuting_pair,
    })
}

/// The exact set of achievable support pairs (n_a, n_b) over all pure states,
/// with the largest intersection dimension seen at each shape, the minimal
/// n_b per n_a (lower edge), and the minimal achievable n_a + n_b.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UncertaintyDiagram {
    pub d: usize,
    member: Vec<bool>,
    max_dim: Vec<usize>,
    /// lower_edge[n_a - 1] = min { n_b : (n_a, n_b) achievable }.
    pub lower_edge: Vec<usize>,
    pub n_min: usize,
}

impl UncertaintyDiagram {
    pub(crate) fn from_parts(d: usize, member: Vec<bool>, max_dim: Vec<usize>) -> Self {
        let mut lower_edge = vec![0usize; d];
        let mut n_min = usize::MAX;
        for na in 1..=d {
            for nb in 1..=d {
                if member[(na - 1) * d + (nb - 1)] {
                    if lower_edge[na - 1] == 0 {
                        lower_edge[na - 1] = nb;
                    }
                    n_min = n_min.min(na + nb);
                }
            }
        }
        if n_min == usize::MAX {
            n_min = 0;
        }
        UncertaintyDiagram { d, member, max_dim, lower_edge, n_min }
    }

    pub fn is_member(&self, n_a: usize, n_b: usize) -> bool {
        self.member[(n_a - 1) * self.d + (n_b - 1)]
    }

    pub fn max_dim_at(&self, n_a: usize, n_b: usize) -> usize {
        self.max_dim[(n_a - 1) * self.d + (n_b - 1)]
    }

    /// Member cells in row-major order.
    pub fn members(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for na in 1..=self.d {
            for nb in 1..=self.d {
                if self.is_member(na, nb) {
                    out.push((na, nb));
                }
            }
        }
        out
    }
}

/// dim H(S,T) for every pair of subsets, indexed by (smask << d) | tmask.
/// Values fit in u8 since d <= DIM_CAP. Empty S or T gives 0.
pub(crate) fn dim_table(t: &TransitionMatrix) -> Result<Vec<u8>> {
    let d = t.d();
    if d > DIM_CAP {
        return Err(Error::SizeCap(format!(
            "dimension {d} exceeds the subset-scan cap {DIM_CAP}"
        )));
    }
    let full = 1usize << d;
    let tol = t.tol();
    let m = t.matrix();
    let table: Vec<Vec<u8>> = (0..full)
        .into_par_iter()
        .map(|smask| {
            let mut row = vec![0u8; full];
            if smask == 0 {
                return row;
            }
            let comp_rows: Vec<usize> =
                (0..d).filter(|b| smask >> b & 1 == 0).collect();
            for tmask in 1..full {
                let cols: Vec<usize> = (0..d).filter(|b| tmask >> b & 1 == 1).collect();
                let block = ComplexMatrix::from_fn(comp_rows.len(), cols.len(), |i, j| {
                    m.at(comp_rows[i], cols[j])
                });
                row[tmask] = (cols.len() - rank(&block, tol)) as u8;
            }
            row
        })
        .collect();
    Ok(table.into_iter().flatten().collect())
}

/// Exact uncertainty diagram. A shape (n_a, n_b) is achievable iff some pair
/// (S, T) of those sizes has L = dim H(S,T) >= 1 while every drop-one subset
/// of S or T loses a dimension — then a generic state of H(S,T) has exactly
/// the supports (S, T).
pub fn uncertainty_diagram(t: &TransitionMatrix) -> Result<UncertaintyDiagram> {
    let d = t.d();
    let dims = dim_table(t)?;
    let full = 1usize << d;
    let mut member = vec![false; d * d];
    let mut max_dim = vec![0usize; d * d];
    for smask in 1..full {
        let na = smask.count_ones() as usize;
        for tmask in 1..full {
            let nb = tmask.count_ones() as usize;
            let l = dims[(smask << d) | tmask];
            let cell = (na - 1) * d + (nb - 1);
            max_dim[cell] = max_dim[cell].max(l as usize);
            if l == 0 || member[cell] {
                continue;
            }
            let tight = (0..d)
                .filter(|b| smask >> b & 1 == 1)
                .all(|b| dims[((smask & !(1 << b)) << d) | tmask] < l)
                && (0..d)
                    .filter(|b| tmask >> b & 1 == 1)
                    .all(|b| dims[(smask << d) | (tmask & !(1 << b))] < l);
            if tight {
                member[cell] = true;
            }
        }
    }
    Ok(UncertaintyDiagram::from_parts(d, member, max_dim))
}

/// Regression tripwire: complete incompatibility holds iff the diagram is
/// exactly { n_a + n_b >= d+1 } (equivalently n_min = d+1). Returns whether
/// the two computations agree; false would indicate a library bug.
pub fn coinc_diagram_equivalence(t: &TransitionMatrix) -> Result<bool> {
    let d = t.d();
    let coinc = is_coinc(t)?;
    let diag = uncertainty_diagram(t)?;
    let mut halfspace = diag.n_min == d + 1;
    if halfspace {
        for na in 1..=d {
            for nb in 1..=d {
                if diag.is_member(na, nb) != (na + nb >= d + 1) {
                    halfspace = false;
                }
            }
        }
    }
    Ok(coinc == halfspace)
}

/// Orthonormal spanning states of H(S,T), expressed in the A basis.
pub(crate) fn subspace_basis(
    t: &TransitionMatrix,
    s: &IndexSet,
    tset: &IndexSet,
) -> Result<Vec<Vec<C64>>> {
    let d = t.d();
    let block = submatrix(t.matrix(), &s.complement(d), tset)?;
    let kernel = crate::linalg::kernel_basis(&block, t.tol());
    // Kernel vectors are B-coefficients over T; embed and rotate to A.
    kernel
        .into_iter()
        .map(|beta| {
            let mut v = vec![C64::new(0.0, 0.0); d];
            for (pos, j) in tset.iter0().enumerate() {
                v[j] = beta[pos];
            }
            t.matrix().mul_vec(&v)
        })
        .collect()
}

/// Draw a normalized state of H(S,T) whose supports are exactly (S, T):
/// Gaussian coefficients over a kernel basis, retried (<= 100 draws) until
/// the profile matches. Errors with `NoState` when the subspace is trivial
/// and `DegenerateSupport` when no draw achieves the exact supports — the
/// signal that (|S|, |T|) is not witnessed by this particular pair.
pub fn sample_state(
    t: &TransitionMatrix,
    s: &IndexSet,
    tset: &IndexSet,
    seed: u64,
) -> Result<StateVector> {
    if s.is_empty() || tset.is_empty() {
        return Err(Error::Validation("sample_state needs nonempty index sets".into()));
    }
    let basis = subspace_basis(t, s, tset)?;
    if basis.is_empty() {
        return Err(Error::NoState(format!(
            "H(S,T) is trivial for S = {:?}, T = {:?}",
            s.members(),
            tset.members()
        )));
    }
    let d = t.d();
    let tol = t.tol().zero_abs;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..100 {
        let mut u = vec![C64::new(0.0, 0.0); d];
        for vec in &basis {
            let c = crate::bases::complex_gaussian(&mut rng);
            for (acc, z) in u.iter_mut().zip(vec) {
                *acc += c * z;
            }
        }
        let psi = match StateVector::normalized(u) {
            Ok(p) => p.crisped(tol),
            Err(_) => continue,
        };
        let profile = match support_profile(t, &psi) {
            Ok(p) => p,
            Err(_) => continue,
        };
        if profile.s == *s && profile.t == *tset {
            return Ok(psi);
        }
    }
    Err(Error::DegenerateSupport(format!(
        "no state of H(S,T) with supports exactly (S, T) found in 100 draws; S = {:?}, T = {:?}",
        s.members(),
        tset.members()
    )))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bases::{catalog, dft, mub4, spin1, tao, u6, U6Variant};
    use crate::linalg::Tolerance;

    fn iset(members: &[usize], d: usize) -> IndexSet {
        IndexSet::new(members.to_vec(), d).unwrap()
    }

    fn identity_pair(d: usize) -> TransitionMatrix {
        TransitionMatrix::new(ComplexMatrix::identity(d), Tolerance::default()).unwrap()
    }

    #[test]
    fn subspace_dim_tao_overlap_formula() {
        let t = tao();
        // For this matrix every intersection with |S| + |T| >= 7 has
        // dimension |S| + |T| - 6.
        let cases = [
            (vec![1, 2, 3, 4], vec![3, 4, 5], 1),
            (vec![1, 2, 3, 4, 5], vec![2, 3, 4, 6], 3),
            (vec![2, 3, 5, 6], vec![1, 2, 3], 1),
        ];
        for (s, ts, want) in cases {
            let dim = subspace_dim(&t, &iset(&s, 6), &iset(&ts, 6)).unwrap();
            assert_eq!(dim, want, "S = {s:?}, T = {ts:?}");
        }
    }

    #[test]
    fn subspace_dim_dft7_excess() {
        let t = dft(7).unwrap();
        let dim = subspace_dim(&t, &iset(&[1, 3, 5, 7], 7), &iset(&[2, 4, 6, 1], 7)).unwrap();
        assert_eq!(dim, 1);
        let dim = subspace_dim(&t, &iset(&[1, 2, 3, 4, 5], 7), &iset(&[1, 2, 3, 4], 7)).unwrap();
        assert_eq!(dim, 2);
    }

    #[test]
    fn subspace_dim_orthogonal_lines() {
        let t = identity_pair(3);
        let dim = subspace_dim(&t, &iset(&[1], 3), &iset(&[2], 3)).unwrap();
        assert_eq!(dim, 0);
        assert!(matches!(
            subspace_dim(&t, &IndexSet::empty(), &iset(&[1], 3)),
            Err(Error::Validation(_))
        ));
    }

    #[test]
    fn coinc_verdicts() {
        assert!(is_coinc(&dft(5).unwrap()).unwrap());
        assert!(!is_coinc(&dft(4).unwrap()).unwrap());
        assert!(!is_coinc(&tao()).unwrap());
        assert!(!is_coinc(&identity_pair(2)).unwrap());
    }

    #[test]
    fn hierarchy_tao() {
        let h = hierarchy(&tao()).unwrap();
        assert!(!h.coinc);
        assert!(h.all_projectors_noncommute);
        assert!(h.m_positive);
        assert!(h.max_below_one);
        assert!(h.first_commuting_pair.is_none());
    }

    #[test]
    fn hierarchy_mub4_both_parameters() {
        for s in [C64::new(1.0, 0.0), C64::new(0.0, 1.0)] {
            let h = hierarchy(&mub4(s).unwrap()).unwrap();
            assert!(!h.coinc);
            assert!(!h.all_projectors_noncommute);
            assert!(h.m_positive);
            assert!(h.max_below_one);
            let (ps, pt) = h.first_commuting_pair.unwrap();
            assert_eq!(ps.members(), &[1, 2]);
            assert_eq!(pt.members(), &[1, 2]);
        }
    }

    #[test]
    fn hierarchy_spin1() {
        let h = hierarchy(&spin1()).unwrap();
        assert!(!h.coinc);
        assert!(!h.all_projectors_noncommute);
        assert!(!h.m_positive);
        assert!(h.max_below_one);
        let (ps, pt) = h.first_commuting_pair.unwrap();
        assert_eq!(ps.members(), &[1, 3]);
        assert_eq!(pt.members(), &[1, 3]);
    }

    #[test]
    fn hierarchy_dft5_all_levels() {
        let h = hierarchy(&dft(5).unwrap()).unwrap();
        assert!(h.coinc && h.all_projectors_noncommute && h.m_positive && h.max_below_one);
    }

    #[test]
    fn hierarchy_u6_first_pair() {
        let h = hierarchy(&u6(U6Variant::Plain)).unwrap();
        assert!(!h.m_positive);
        assert!(h.max_below_one);
        let (ps, pt) = h.first_commuting_pair.unwrap();
        assert_eq!(ps.members(), &[1]);
        assert_eq!(pt.members(), &[1]);
    }

    #[test]
    fn hierarchy_chain_over_catalog() {
        for (name, t) in catalog() {
            let h = hierarchy(&t).unwrap();
            assert!(!h.coinc || h.all_projectors_noncommute, "{name}: (i) => (ii)");
            assert!(!h.all_projectors_noncommute || h.m_positive, "{name}: (ii) => (iii)");
            assert!(!h.m_positive || h.max_below_one, "{name}: (iii) => (iv)");
        }
    }

    #[test]
    fn diagram_spin1() {
        let diag = uncertainty_diagram(&spin1()).unwrap();
        for na in 1..=3 {
            for nb in 1..=3 {
                assert_eq!(diag.is_member(na, nb), (na, nb) != (1, 1), "({na},{nb})");
            }
        }
        assert_eq!(diag.lower_edge, vec![2, 1, 1]);
        assert_eq!(diag.n_min, 3);
        assert_eq!(diag.max_dim_at(3, 3), 3);
        assert_eq!(diag.max_dim_at(1, 2), 1);
    }

    #[test]
    fn diagram_dft5_is_halfspace() {
        let diag = uncertainty_diagram(&dft(5).unwrap()).unwrap();
        for na in 1..=5 {
            for nb in 1..=5 {
                assert_eq!(diag.is_member(na, nb), na + nb >= 6, "({na},{nb})");
            }
        }
        assert_eq!(diag.n_min, 6);
        assert_eq!(diag.lower_edge, vec![5, 4, 3, 2, 1]);
    }

    #[test]
    fn diagram_dft4_members() {
        let diag = uncertainty_diagram(&dft(4).unwrap()).unwrap();
        let expect = [
            (1, 4),
            (2, 2),
            (2, 3),
            (2, 4),
            (3, 2),
            (3, 3),
            (3, 4),
            (4, 1),
            (4, 2),
            (4, 3),
            (4, 4),
        ];
        assert_eq!(diag.members(), expect.to_vec());
        assert_eq!(diag.lower_edge, vec![4, 2, 2, 1]);
        assert_eq!(diag.n_min, 4);
    }

    #[test]
    fn diagram_mub4_holes() {
        let diag = uncertainty_diagram(&mub4(C64::new(1.0, 0.0)).unwrap()).unwrap();
        let expect =
            [(1, 4), (2, 2), (2, 4), (3, 3), (3, 4), (4, 1), (4, 2), (4, 3), (4, 4)];
        assert_eq!(diag.members(), expect.to_vec());
        assert!(!diag.is_member(2, 3));
        assert!(!diag.is_member(3, 2));
    }

    #[test]
    fn equivalence_on_small_catalog() {
        assert!(coinc_diagram_equivalence(&dft(5).unwrap()).unwrap());
        assert!(coinc_diagram_equivalence(&tao()).unwrap());
        assert!(coinc_diagram_equivalence(&spin1()).unwrap());
    }

    #[test]
    fn sample_state_spin1_intersection() {
        let t = spin1();
        let s = iset(&[1, 2], 3);
        let tset = iset(&[1, 2], 3);
        let psi = sample_state(&t, &s, &tset, 11).unwrap();
        let profile = support_profile(&t, &psi).unwrap();
        assert_eq!(profile.s, s);
        assert_eq!(profile.t, tset);
        // One-dimensional intersection: the state is fixed up to phase, with
        // component magnitudes (sqrt(2/3), sqrt(1/3), 0).
        let mags: Vec<f64> = psi.components().iter().map(|z| z.norm()).collect();
        assert!((mags[0] - (2.0f64 / 3.0).sqrt()).abs() < 1e-9);
        assert!((mags[1] - (1.0f64 / 3.0).sqrt()).abs() < 1e-9);
        assert!(mags[2] < 1e-12);
    }

    #[test]
    fn sample_state_trivial_subspace() {
        let t = identity_pair(3);
        let err = sample_state(&t, &iset(&[1], 3), &iset(&[2], 3), 1);
        assert!(matches!(err, Err(Error::NoState(_))));
    }

    #[test]
    fn sample_state_dft7_shape() {
        let t = dft(7).unwrap();
        let s = iset(&[1, 2, 3, 4], 7);
        let tset = iset(&[2, 3, 5, 7], 7);
        let psi = sample_state(&t, &s, &tset, 5).unwrap();
        let profile = support_profile(&t, &psi).unwrap();
        assert_eq!((profile.n_a, profile.n_b), (4, 4));
    }
}
