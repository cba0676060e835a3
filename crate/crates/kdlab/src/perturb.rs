//! Deforming a unitary into a nearby one with no vanishing minors.
//!
//! Each round targets the largest vanishing minor: permute it to the top-left
//! corner, embed it as the top-left l x l block M of the (l+1) x (l+1) block
//! M+ (invertible, because l is maximal), and rotate by a small angle in the
//! plane spanned by e_{l+1} and the direction orthogonal to the column space
//! of M. The rotated M becomes invertible while every previously nonvanishing
//! minor survives for a small enough angle, so the vanishing count strictly
//! decreases and the loop ends after at most (initial count) rounds. Running
//! the loop on a mutually unbiased start with a small angle budget produces
//! matrices that are completely incompatible yet arbitrarily close to
//! unbiased.

use crate::bases::{dft, mub4, stats, Permutation, TransitionMatrix};
use crate::coinc::is_coinc;
use crate::error::{Error, Result};
use crate::linalg::{enumerate_minors, kernel_basis, ComplexMatrix, MinorKey, Tolerance, C64};

/// One accepted rotation round.
#[derive(Debug, Clone, PartialEq)]
pub struct PerturbationRound {
    /// Row permutation that brought the target minor to the top-left corner.
    pub sigma: Permutation,
    /// Accepted rotation angle (radians).
    pub theta: f64,
    pub vanishing_before: u64,
    pub vanishing_after: u64,
}

/// Full record of a perturbation run.
#[derive(Debug, Clone, PartialEq)]
pub struct PerturbationTrace {
    pub rounds: Vec<PerturbationRound>,
    /// Spectral-norm estimate of (accumulated transform - identity).
    pub total_deviation: f64,
}

/// Rotation family that unsticks a singular leading block: for a k x k
/// matrix M+ with det(M+) != 0 whose top-left (k-1) x (k-1) block M is
/// singular, V(theta) rotates in the plane spanned by e_k and b+ = (b, 0),
/// where b is a unit vector orthogonal to the column space of M. V(0) = I,
/// V(theta) is unitary, and the top-left block of V(theta) M+ is invertible
/// for small theta != 0.
pub fn unsticking_rotation(mplus: &ComplexMatrix, theta: f64, tol: Tolerance) -> Result<ComplexMatrix> {
    if !mplus.is_square() || mplus.rows() < 2 {
        return Err(Error::Dimension(format!(
            "rotation block must be square with k >= 2, got {}x{}",
            mplus.rows(),
            mplus.cols()
        )));
    }
    let k = mplus.rows();
    let det_plus = crate::linalg::det(mplus)?;
    if det_plus.norm() <= tol.zero_abs {
        return Err(Error::Validation(format!(
            "the full block must be invertible, |det| = {}",
            det_plus.norm()
        )));
    }
    let m = ComplexMatrix::from_fn(k - 1, k - 1, |i, j| mplus.at(i, j));
    let det_m = crate::linalg::det(&m)?;
    if det_m.norm() > tol.zero_abs {
        return Err(Error::Validation(format!(
            "the top-left block must be singular, |det| = {}",
            det_m.norm()
        )));
    }
    // b spans [Im M]^perp, i.e. the kernel of M^dagger. Deleting one row and
    // one column of an invertible matrix drops rank by at most two, so the
    // singular block has rank exactly k-2 and that kernel is one-dimensional.
    let left_kernel = kernel_basis(&m.dagger(), tol);
    let Some(b) = left_kernel.first() else {
        return Err(Error::Validation(
            "singular block has numerically full-rank column space; minor is borderline".into(),
        ));
    };
    let mut bplus = vec![C64::new(0.0, 0.0); k];
    bplus[..k - 1].copy_from_slice(b);
    let (cos, sin) = (theta.cos(), theta.sin());
    let v = ComplexMatrix::from_fn(k, k, |i, j| {
        let delta = if i == j { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) };
        let ek_i = if i == k - 1 { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) };
        let ek_j = if j == k - 1 { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) };
        let pi_ij = bplus[i] * bplus[j].conj() + ek_i * ek_j;
        // V = cos(theta) Pi + sin(theta) (e_k b+^dag - b+ e_k^dag) + (I - Pi)
        delta + (cos - 1.0) * pi_ij + sin * (ek_i * bplus[j].conj() - bplus[i] * ek_j)
    });
    Ok(v)
}

/// True iff every key of `sub` appears in `sup`; both sorted ascending.
fn is_sorted_subset(sub: &[MinorKey], sup: &[MinorKey]) -> bool {
    let mut it = sup.iter();
    'outer: for key in sub {
        for cand in it.by_ref() {
            match cand.cmp(key) {
                std::cmp::Ordering::Less => continue,
                std::cmp::Ordering::Equal => continue 'outer,
                std::cmp::Ordering::Greater => return false,
            }
        }
        return false;
    }
    true
}

/// Rotate U into a unitary with no vanishing minors. Each round targets the
/// lexicographically-first vanishing minor of the largest vanishing size and
/// line-searches the angle over {eps, eps/2, ...} (floor eps/1000) until the
/// vanishing count strictly drops with no previously nonvanishing minor newly
/// vanishing. Already-clean inputs come back unchanged with an empty trace.
pub fn coincify(t: &TransitionMatrix, eps: f64) -> Result<(TransitionMatrix, PerturbationTrace)> {
    if !(eps > 0.0) {
        return Err(Error::Validation(format!("eps must be positive, got {eps}")));
    }
    let d = t.d();
    let tol = t.tol();
    let mut u = t.matrix().clone();
    let mut census = enumerate_minors(&u, tol)?;
    let mut rounds: Vec<PerturbationRound> = Vec::new();
    let mut t_total = ComplexMatrix::identity(d);

    while census.total_vanishing > 0 {
        let ell = census.largest_vanishing_size.expect("count > 0");
        let (rset, cset) = census.first_vanishing.clone().expect("count > 0");
        // The full determinant of a unitary has modulus 1, so ell < d and the
        // (ell+1)-block below is invertible because ell is maximal.
        let k = ell + 1;
        let sigma_order: Vec<usize> = rset
            .members()
            .iter()
            .chain(rset.complement(d).members())
            .copied()
            .collect();
        let tau_order: Vec<usize> = cset
            .members()
            .iter()
            .chain(cset.complement(d).members())
            .copied()
            .collect();
        let mplus =
            ComplexMatrix::from_fn(k, k, |i, j| u.at(sigma_order[i] - 1, tau_order[j] - 1));

        let floor = 1e-3 * eps;
        let mut theta = eps;
        let mut accepted = None;
        while theta >= floor {
            let v = unsticking_rotation(&mplus, theta, tol)?;
            // Conjugate diag(V, I) back through the row permutation; the
            // column permutation cancels against its inverse.
            let mut t_round = ComplexMatrix::identity(d);
            for i in 0..k {
                for j in 0..k {
                    t_round.set(sigma_order[i] - 1, sigma_order[j] - 1, v.at(i, j));
                }
            }
            let u_new = t_round.mul(&u)?;
            let census_new = enumerate_minors(&u_new, tol)?;
            if census_new.total_vanishing < census.total_vanishing
                && is_sorted_subset(&census_new.vanishing, &census.vanishing)
            {
                accepted = Some((theta, t_round, u_new, census_new));
                break;
            }
            theta /= 2.0;
        }
        let Some((theta, t_round, u_new, census_new)) = accepted else {
            return Err(Error::Numerical(format!(
                "angle search stalled on the size-{ell} minor with rows {:?}, cols {:?}",
                rset.members(),
                cset.members()
            )));
        };
        rounds.push(PerturbationRound {
            sigma: Permutation::new(sigma_order)?,
            theta,
            vanishing_before: census.total_vanishing,
            vanishing_after: census_new.total_vanishing,
        });
        t_total = t_round.mul(&t_total)?;
        u = u_new;
        census = census_new;
    }

    let eye = ComplexMatrix::identity(d);
    let diff = ComplexMatrix::from_fn(d, d, |i, j| t_total.at(i, j) - eye.at(i, j));
    let trace = PerturbationTrace { rounds, total_deviation: diff.op_norm_est() };
    Ok((TransitionMatrix::new(u, tol)?, trace))
}

/// A completely incompatible basis pair within `delta` of mutually unbiased:
/// starts from an unbiased pair and runs [`coincify`] with a shrinking angle
/// budget (eps = delta/4, halved up to 50 times) until the result is clean
/// and min |U_ij| >= d^{-1/2} - delta. Also returns the successful trace and
/// angle budget.
pub fn near_mub_coinc_traced(
    d: usize,
    delta: f64,
) -> Result<(TransitionMatrix, PerturbationTrace, f64)> {
    let target = 1.0 / (d as f64).sqrt();
    if !(delta > 0.0 && delta < target) {
        return Err(Error::Validation(format!(
            "delta must satisfy 0 < delta < d^(-1/2) = {target}, got {delta}"
        )));
    }
    let start = if d == 4 { mub4(C64::new(1.0, 0.0))? } else { dft(d)? };
    let mut eps = delta / 4.0;
    for _ in 0..50 {
        match coincify(&start, eps) {
            Ok((out, trace)) => {
                if is_coinc(&out)? && stats(&out).min_mag >= target - delta {
                    return Ok((out, trace, eps));
                }
            }
            // A stalled angle search at this budget is retried smaller.
            Err(Error::Numerical(_)) => {}
            Err(e) => return Err(e),
        }
        eps /= 2.0;
    }
    Err(Error::Convergence(format!(
        "no completely incompatible pair within {delta} of unbiased after 50 angle budgets"
    )))
}

/// See [`near_mub_coinc_traced`]; this drops the trace.
pub fn near_mub_coinc(d: usize, delta: f64) -> Result<TransitionMatrix> {
    near_mub_coinc_traced(d, delta).map(|(t, _, _)| t)
}
