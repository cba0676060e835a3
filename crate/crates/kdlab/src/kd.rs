//! Pure states over a basis pair: A/B representations, support profiles,
//! Shannon entropies, the Kirkwood-Dirac quasiprobability distribution, and
//! (non)classicality verdicts.
//!
//! The KD distribution of a state psi over bases A and B is the complex table
//! Q_ij = <a_i|psi><psi|b_j><b_j|a_i>. It always sums to 1 with marginals
//! |<a_i|psi>|^2 and |<b_j|psi>|^2, but individual entries may be negative or
//! non-real; a state is KD classical when every entry is (numerically) real
//! and nonnegative.

use crate::bases::{stats, TransitionMatrix};
use crate::error::{Error, Result};
use crate::linalg::{norm, ComplexMatrix, IndexSet, C64};

/// Normalized pure state, stored as its A-basis components u_i = <a_i|psi>.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    d: usize,
    u: Vec<C64>,
}

impl StateVector {
    /// Accepts a vector with | ||u||^2 - 1 | <= 10 * zero_tol; all entries
    /// must be finite.
    pub fn new(u: Vec<C64>, zero_tol: f64) -> Result<Self> {
        if u.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::Validation("state components must be finite".into()));
        }
        let n2: f64 = u.iter().map(|z| z.norm_sqr()).sum();
        if (n2 - 1.0).abs() > 10.0 * zero_tol {
            return Err(Error::Validation(format!(
                "state is not normalized: ||u||^2 = {n2}"
            )));
        }
        Ok(StateVector { d: u.len(), u })
    }

    /// Rescale a nonzero vector to unit norm.
    pub fn normalized(u: Vec<C64>) -> Result<Self> {
        if u.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::Validation("state components must be finite".into()));
        }
        let n = norm(&u);
        if n == 0.0 {
            return Err(Error::Validation("cannot normalize the zero vector".into()));
        }
        let u: Vec<C64> = u.into_iter().map(|z| z / n).collect();
        let d = u.len();
        Ok(StateVector { d, u })
    }

    /// The i-th A-basis vector |a_i> (1-based) as a state.
    pub fn basis_vector(d: usize, i: usize) -> Result<Self> {
        if i < 1 || i > d {
            return Err(Error::Bounds(format!("basis index {i} outside [1, {d}]")));
        }
        let mut u = vec![C64::new(0.0, 0.0); d];
        u[i - 1] = C64::new(1.0, 0.0);
        Ok(StateVector { d, u })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    /// A-basis components.
    pub fn components(&self) -> &[C64] {
        &self.u
    }

    /// Copy with every component of magnitude <= threshold replaced by an
    /// exact zero; keeps support decisions crisp for states assembled from
    /// numerical kernels.
    pub fn crisped(&self, threshold: f64) -> Self {
        let u = self
            .u
            .iter()
            .map(|&z| if z.norm() <= threshold { C64::new(0.0, 0.0) } else { z })
            .collect();
        StateVector { d: self.d, u }
    }
}

/// Supports of a state in both bases and their sizes; n_ab = n_a + n_b is the
/// support uncertainty.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SupportProfile {
    pub s: IndexSet,
    pub t: IndexSet,
    pub n_a: usize,
    pub n_b: usize,
    pub n_ab: usize,
}

fn check_dims(t: &TransitionMatrix, psi: &StateVector) -> Result<()> {
    if t.d() != psi.d() {
        return Err(Error::Dimension(format!(
            "matrix dimension {} and state dimension {} differ",
            t.d(),
            psi.d()
        )));
    }
    Ok(())
}

/// B-basis components v = U^dagger u; norm is preserved.
pub fn b_representation(t: &TransitionMatrix, psi: &StateVector) -> Result<Vec<C64>> {
    check_dims(t, psi)?;
    t.matrix().dagger_mul_vec(psi.components())
}

/// Index supports of psi in both bases: i is in S iff |u_i| > tol.zero_abs,
/// j is in T iff |v_j| > tol.zero_abs.
pub fn support_profile(t: &TransitionMatrix, psi: &StateVector) -> Result<SupportProfile> {
    check_dims(t, psi)?;
    let tol = t.tol().zero_abs;
    let v = b_representation(t, psi)?;
    let s: Vec<usize> = psi
        .components()
        .iter()
        .enumerate()
        .filter(|(_, z)| z.norm() > tol)
        .map(|(i, _)| i + 1)
        .collect();
    let tset: Vec<usize> =
        v.iter().enumerate().filter(|(_, z)| z.norm() > tol).map(|(j, _)| j + 1).collect();
    if s.is_empty() || tset.is_empty() {
        return Err(Error::Validation(
            "state has empty support; not a normalized state at this tolerance".into(),
        ));
    }
    let (n_a, n_b) = (s.len(), tset.len());
    Ok(SupportProfile {
        s: IndexSet::new(s, t.d())?,
        t: IndexSet::new(tset, t.d())?,
        n_a,
        n_b,
        n_ab: n_a + n_b,
    })
}

/// The KD quasiprobability table with its summary diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct KDDistribution {
    pub q: ComplexMatrix,
    /// Smallest real part over all entries.
    pub min_real: f64,
    /// Largest |imaginary part| over all entries.
    pub max_abs_imag: f64,
    /// Sum of all entries; always 1 up to rounding.
    pub total: C64,
}

/// Q_ij = u_i conj(v_j) conj(U_ij).
pub fn kd_distribution(t: &TransitionMatrix, psi: &StateVector) -> Result<KDDistribution> {
    check_dims(t, psi)?;
    let u = psi.components();
    let v = b_representation(t, psi)?;
    let d = t.d();
    let q = ComplexMatrix::from_fn(d, d, |i, j| u[i] * v[j].conj() * t.at(i, j).conj());
    let mut min_real = f64::INFINITY;
    let mut max_abs_imag: f64 = 0.0;
    let mut total = C64::new(0.0, 0.0);
    for z in q.entries() {
        min_real = min_real.min(z.re);
        max_abs_imag = max_abs_imag.max(z.im.abs());
        total += z;
    }
    Ok(KDDistribution { q, min_real, max_abs_imag, total })
}

/// True iff the KD distribution is a genuine probability distribution:
/// every entry real and nonnegative within tol.zero_abs.
pub fn is_kd_classical(t: &TransitionMatrix, psi: &StateVector) -> Result<bool> {
    let kd = kd_distribution(t, psi)?;
    let tol = t.tol().zero_abs;
    Ok(kd.min_real >= -tol && kd.max_abs_imag <= tol)
}

/// Shannon entropies (natural log) of the A- and B-outcome distributions
/// |u_i|^2 and |v_j|^2, with 0 ln 0 = 0.
pub fn entropies(t: &TransitionMatrix, psi: &StateVector) -> Result<(f64, f64)> {
    check_dims(t, psi)?;
    let v = b_representation(t, psi)?;
    let h = |comps: &[C64]| -> f64 {
        -comps
            .iter()
            .map(|z| z.norm_sqr())
            .filter(|&p| p > 0.0)
            .map(|p| p * p.ln())
            .sum::<f64>()
    };
    Ok((h(psi.components()), h(&v)))
}

/// Which sufficient condition certified nonclassicality.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WitnessRule {
    /// Zero pattern sparse (max two-line zero count <= (d+1)/2) and support
    /// uncertainty beyond d+1.
    SparseZeros,
    /// One support alone exceeds the two-line zero count, and support
    /// uncertainty beyond d+1.
    SupportOverZeros,
    /// Bases not maximally aligned (M_ab < 1) and support uncertainty beyond
    /// floor(3d/2).
    ThreeHalvesSupport,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WitnessOutcome {
    Nonclassical,
    Inconclusive,
}

/// Result of the support-based nonclassicality witness. The rules are
/// one-directional: `Inconclusive` never means classical.
#[derive(Debug, Clone, PartialEq)]
pub struct WitnessVerdict {
    pub outcome: WitnessOutcome,
    pub rule: Option<WitnessRule>,
    pub details: String,
}

/// Certify KD nonclassicality from the support profile and the zero pattern
/// of U alone, without inspecting Q. Rules are tried in order of strength;
/// the verdict is Inconclusive when none applies.
pub fn witness(t: &TransitionMatrix, psi: &StateVector) -> Result<WitnessVerdict> {
    let d = t.d();
    let profile = support_profile(t, psi)?;
    let st = stats(t);
    let zmax = st.zeros_two_rows.max(st.zeros_two_cols);
    let n_ab = profile.n_ab;
    let tol = t.tol().zero_abs;

    // All-integer comparisons; (d+1)/2 is compared as 2*zmax <= d+1.
    if 2 * zmax <= d + 1 && n_ab > d + 1 {
        return Ok(WitnessVerdict {
            outcome: WitnessOutcome::Nonclassical,
            rule: Some(WitnessRule::SparseZeros),
            details: format!(
                "n_ab = {n_ab} > d+1 = {} with sparse zeros (max two-line zeros {zmax}, 2*{zmax} <= {})",
                d + 1,
                d + 1
            ),
        });
    }
    let nmax = profile.n_a.max(profile.n_b);
    if nmax > zmax && n_ab > d + 1 {
        return Ok(WitnessVerdict {
            outcome: WitnessOutcome::Nonclassical,
            rule: Some(WitnessRule::SupportOverZeros),
            details: format!(
                "n_ab = {n_ab} > d+1 = {} and max support {nmax} exceeds max two-line zeros {zmax}",
                d + 1
            ),
        });
    }
    if st.max_mag < 1.0 - tol && n_ab > 3 * d / 2 {
        return Ok(WitnessVerdict {
            outcome: WitnessOutcome::Nonclassical,
            rule: Some(WitnessRule::ThreeHalvesSupport),
            details: format!(
                "n_ab = {n_ab} > floor(3d/2) = {} and M_ab = {} < 1",
                3 * d / 2,
                st.max_mag
            ),
        });
    }
    Ok(WitnessVerdict {
        outcome: WitnessOutcome::Inconclusive,
        rule: None,
        details: format!(
            "no rule applies: n_ab = {n_ab}, d = {d}, max two-line zeros {zmax}, M_ab = {}",
            st.max_mag
        ),
    })
}

/// Check the necessary condition every KD-classical state satisfies when the
/// basis pair is balanced enough ((d-1)/(d+1) < (m/M)^2, d >= 3): the state
/// is a basis vector, or its support uncertainty is at most d. Errors with
/// `Inapplicable` when the hypothesis on the basis pair fails.
pub fn classify_classical_constraint(
    t: &TransitionMatrix,
    psi: &StateVector,
) -> Result<bool> {
    let d = t.d();
    let st = stats(t);
    let ratio2 = if st.max_mag > 0.0 { (st.min_mag / st.max_mag).powi(2) } else { 0.0 };
    let threshold = (d as f64 - 1.0) / (d as f64 + 1.0);
    if d < 3 || ratio2 <= threshold {
        return Err(Error::Inapplicable(format!(
            "requires d >= 3 and (d-1)/(d+1) < (m/M)^2; got d = {d}, (m/M)^2 = {ratio2}, (d-1)/(d+1) = {threshold}"
        )));
    }
    let profile = support_profile(t, psi)?;
    Ok(profile.n_a == 1 || profile.n_b == 1 || profile.n_ab <= d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bases::{dft, spin1, tao};

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn state(components: Vec<C64>) -> StateVector {
        StateVector::normalized(components).unwrap()
    }

    #[test]
    fn b_rep_identity_like() {
        // dft(2): u = (1, 0) maps to v = (1, 1)/sqrt(2).
        let t = dft(2).unwrap();
        let psi = StateVector::basis_vector(2, 1).unwrap();
        let v = b_representation(&t, &psi).unwrap();
        let s = 1.0 / 2.0_f64.sqrt();
        assert!((v[0] - c(s, 0.0)).norm() < 1e-12);
        assert!((v[1] - c(s, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn b_rep_spin1_middle_row() {
        let t = spin1();
        let psi = StateVector::basis_vector(3, 2).unwrap();
        let v = b_representation(&t, &psi).unwrap();
        let r = 2.0_f64.sqrt() / 2.0;
        assert!((v[0] - c(r, 0.0)).norm() < 1e-12);
        assert!(v[1].norm() < 1e-12);
        assert!((v[2] + c(r, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn support_spin1_z0() {
        let t = spin1();
        let psi = StateVector::basis_vector(3, 2).unwrap(); // |z,0>
        let p = support_profile(&t, &psi).unwrap();
        assert_eq!((p.n_a, p.n_b), (1, 2));
        assert_eq!(p.t.members(), &[1, 3]);
    }

    #[test]
    fn support_dft7_basis_vector() {
        let t = dft(7).unwrap();
        let psi = StateVector::basis_vector(7, 1).unwrap();
        let p = support_profile(&t, &psi).unwrap();
        assert_eq!((p.n_a, p.n_b), (1, 7));
    }

    #[test]
    fn support_tao_three_term_b_combination() {
        // psi = omega b_1 - (1+omega) b_2 + b_3, normalized: supports (4, 3).
        let t = tao();
        let omega = C64::from_polar(1.0, 2.0 * std::f64::consts::PI / 3.0);
        let one = c(1.0, 0.0);
        let coeffs = [omega, -(one + omega), one];
        let mut u = vec![c(0.0, 0.0); 6];
        for (j, &w) in coeffs.iter().enumerate() {
            for i in 0..6 {
                u[i] += t.at(i, j) * w;
            }
        }
        let psi = state(u);
        let p = support_profile(&t, &psi).unwrap();
        assert_eq!((p.n_a, p.n_b), (4, 3));
        assert_eq!(p.t.members(), &[1, 2, 3]);
    }

    #[test]
    fn kd_identity_basis_state() {
        // With U = dft(2) and psi = |b_1>, Q concentrates on column 1.
        let t = dft(2).unwrap();
        let psi = StateVector::basis_vector(2, 1).unwrap();
        let kd = kd_distribution(&t, &psi).unwrap();
        assert!((kd.total - c(1.0, 0.0)).norm() < 1e-12);
        assert!((kd.q.at(0, 0) - c(0.5, 0.0)).norm() < 1e-12);
        assert!((kd.q.at(0, 1) - c(0.5, 0.0)).norm() < 1e-12);
        assert!(kd.q.at(1, 0).norm() < 1e-12);
        assert!(kd.q.at(1, 1).norm() < 1e-12);
    }

    #[test]
    fn kd_marginals() {
        let t = tao();
        let psi = state(vec![
            c(0.3, 0.1),
            c(-0.2, 0.4),
            c(0.5, 0.0),
            c(0.0, -0.3),
            c(0.1, 0.2),
            c(0.4, -0.1),
        ]);
        let kd = kd_distribution(&t, &psi).unwrap();
        let v = b_representation(&t, &psi).unwrap();
        assert!((kd.total - c(1.0, 0.0)).norm() < 1e-10);
        for i in 0..6 {
            let row: C64 = (0..6).map(|j| kd.q.at(i, j)).sum();
            assert!((row - c(psi.components()[i].norm_sqr(), 0.0)).norm() < 1e-10);
        }
        for j in 0..6 {
            let col: C64 = (0..6).map(|i| kd.q.at(i, j)).sum();
            assert!((col - c(v[j].norm_sqr(), 0.0)).norm() < 1e-10);
        }
    }

    #[test]
    fn basis_vectors_are_classical() {
        let t = tao();
        for i in 1..=6 {
            let psi = StateVector::basis_vector(6, i).unwrap();
            assert!(is_kd_classical(&t, &psi).unwrap());
        }
    }

    #[test]
    fn spin1_uniform_state_is_nonclassical() {
        let t = spin1();
        let s = 1.0 / 3.0_f64.sqrt();
        let psi = state(vec![c(s, 0.0), c(s, 0.0), c(s, 0.0)]);
        let kd = kd_distribution(&t, &psi).unwrap();
        assert!(kd.min_real < -0.06);
        assert!(!is_kd_classical(&t, &psi).unwrap());
    }

    #[test]
    fn entropy_basics() {
        let t = dft(5).unwrap();
        let psi = StateVector::basis_vector(5, 1).unwrap();
        let (ha, hb) = entropies(&t, &psi).unwrap();
        assert!(ha.abs() < 1e-12);
        assert!((hb - 5.0_f64.ln()).abs() < 1e-10);

        let t = spin1();
        let psi = StateVector::basis_vector(3, 2).unwrap();
        let (ha, hb) = entropies(&t, &psi).unwrap();
        assert!(ha.abs() < 1e-12);
        assert!((hb - 2.0_f64.ln()).abs() < 1e-10);
    }

    #[test]
    fn witness_spin1_full_support() {
        let t = spin1();
        let psi = state(vec![c(0.7, 0.1), c(0.4, -0.3), c(0.3, 0.2)]);
        let p = support_profile(&t, &psi).unwrap();
        assert_eq!(p.n_ab, 6);
        let w = witness(&t, &psi).unwrap();
        assert_eq!(w.outcome, WitnessOutcome::Nonclassical);
        assert_eq!(w.rule, Some(WitnessRule::SparseZeros));
    }

    #[test]
    fn witness_inconclusive_on_basis_vector() {
        let t = tao();
        let psi = StateVector::basis_vector(6, 3).unwrap();
        let w = witness(&t, &psi).unwrap();
        assert_eq!(w.outcome, WitnessOutcome::Inconclusive);
        assert!(w.rule.is_none());
    }

    #[test]
    fn classical_constraint_applicability() {
        // dft(5) is unbiased: m = M, ratio 1 > 4/6.
        let t = dft(5).unwrap();
        let psi = StateVector::basis_vector(5, 3).unwrap();
        assert!(classify_classical_constraint(&t, &psi).unwrap());

        // spin1 has m = 0: hypothesis fails.
        let t = spin1();
        let psi = StateVector::basis_vector(3, 1).unwrap();
        assert!(matches!(
            classify_classical_constraint(&t, &psi),
            Err(Error::Inapplicable(_))
        ));
    }

    #[test]
    fn state_validation() {
        assert!(StateVector::new(vec![c(1.0, 0.0), c(0.1, 0.0)], 1e-9).is_err());
        assert!(StateVector::new(vec![c(1.0, 0.0), c(0.0, 0.0)], 1e-9).is_ok());
        assert!(StateVector::normalized(vec![c(0.0, 0.0)]).is_err());
    }

    #[test]
    fn crisped_zeroes_dust() {
        let psi = StateVector::new(vec![c(1.0, 0.0), c(1e-13, -1e-14)], 1e-9).unwrap();
        let crisp = psi.crisped(1e-9);
        assert_eq!(crisp.components()[1], c(0.0, 0.0));
    }
}
