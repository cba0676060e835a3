//! Transition matrices between pairs of orthonormal bases: validation, the
//! worked-example catalog, Kronecker products, permutations, Haar-random
//! sampling, and entry statistics (min/max magnitudes and zero patterns).

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg::{is_unitary, ComplexMatrix, Tolerance, C64, DIM_CAP};

/// Validated d x d unitary U_ij = <a_i|b_j> linking two orthonormal bases;
/// the central object of the crate.
#[derive(Debug, Clone, PartialEq)]
pub struct TransitionMatrix {
    d: usize,
    u: ComplexMatrix,
    tol: Tolerance,
}

impl TransitionMatrix {
    /// Wrap a matrix after checking d >= 2 and unitarity at `tol`.
    pub fn new(u: ComplexMatrix, tol: Tolerance) -> Result<Self> {
        if !u.is_square() || u.rows() < 2 {
            return Err(Error::Dimension(format!(
                "transition matrix must be square with d >= 2, got {}x{}",
                u.rows(),
                u.cols()
            )));
        }
        if !is_unitary(&u, tol)? {
            return Err(Error::Validation(
                "matrix is not unitary within tolerance".into(),
            ));
        }
        let d = u.rows();
        Ok(TransitionMatrix { d, u, tol })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.u
    }

    pub fn tol(&self) -> Tolerance {
        self.tol
    }

    /// Same matrix, re-validated under a different tolerance.
    pub fn with_tol(&self, tol: Tolerance) -> Result<Self> {
        TransitionMatrix::new(self.u.clone(), tol)
    }

    /// Entry U_ij, zero-based.
    pub fn at(&self, i: usize, j: usize) -> C64 {
        self.u.at(i, j)
    }
}

/// Entry statistics of a basis pair: extreme overlap magnitudes and the zero
/// pattern that drives the sparse-zero nonclassicality witness.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BasisStats {
    /// min_ij |U_ij| (raw minimum; zero when the matrix has zeros).
    pub min_mag: f64,
    /// max_ij |U_ij|.
    pub max_mag: f64,
    /// Number of entries with |U_ij| <= tol.zero_abs.
    pub zeros: usize,
    /// Max total zeros over any two distinct rows.
    pub zeros_two_rows: usize,
    /// Max total zeros over any two distinct columns.
    pub zeros_two_cols: usize,
}

/// Magnitude extremes and zero counts of the transition matrix. An entry
/// counts as zero iff |U_ij| <= tol.zero_abs.
pub fn stats(t: &TransitionMatrix) -> BasisStats {
    let d = t.d();
    let tol = t.tol();
    let mut min_mag = f64::INFINITY;
    let mut max_mag: f64 = 0.0;
    let mut row_zeros = vec![0usize; d];
    let mut col_zeros = vec![0usize; d];
    let mut zeros = 0usize;
    for i in 0..d {
        for j in 0..d {
            let mag = t.at(i, j).norm();
            min_mag = min_mag.min(mag);
            max_mag = max_mag.max(mag);
            if mag <= tol.zero_abs {
                zeros += 1;
                row_zeros[i] += 1;
                col_zeros[j] += 1;
            }
        }
    }
    BasisStats {
        min_mag,
        max_mag,
        zeros,
        zeros_two_rows: max_pair_sum(&row_zeros),
        zeros_two_cols: max_pair_sum(&col_zeros),
    }
}

/// Largest sum over two distinct entries (d >= 2 is guaranteed upstream).
fn max_pair_sum(counts: &[usize]) -> usize {
    let mut top = [0usize; 2];
    for &c in counts {
        if c >= top[0] {
            top[1] = top[0];
            top[0] = c;
        } else if c > top[1] {
            top[1] = c;
        }
    }
    top[0] + top[1]
}

/// True iff every |U_ij| equals d^{-1/2} within tol.zero_abs: the defining
/// property of mutually unbiased bases.
pub fn is_mub(t: &TransitionMatrix) -> bool {
    let target = 1.0 / (t.d() as f64).sqrt();
    let tol = t.tol().zero_abs;
    (0..t.d())
        .all(|i| (0..t.d()).all(|j| (t.at(i, j).norm() - target).abs() <= tol))
}

/// Discrete Fourier transform: U_jk = exp(2 pi i (j-1)(k-1)/d) / sqrt(d).
pub fn dft(d: usize) -> Result<TransitionMatrix> {
    if d < 2 {
        return Err(Error::Dimension(format!("dft needs d >= 2, got {d}")));
    }
    let scale = 1.0 / (d as f64).sqrt();
    let u = ComplexMatrix::from_fn(d, d, |j, k| {
        // Reduce the exponent mod d before multiplying by 2 pi / d so large
        // products do not lose precision.
        let e = (j * k) % d;
        C64::from_polar(scale, 2.0 * std::f64::consts::PI * e as f64 / d as f64)
    });
    TransitionMatrix::new(u, Tolerance::default())
}

/// The 6x6 mutually unbiased pair built from powers of omega = exp(2 pi i/3);
/// the standard d=6 example with vanishing 2x2 minors.
pub fn tao() -> TransitionMatrix {
    const POW: [[usize; 6]; 6] = [
        [0, 0, 0, 0, 0, 0],
        [0, 0, 1, 1, 2, 2],
        [0, 1, 0, 2, 2, 1],
        [0, 1, 2, 0, 1, 2],
        [0, 2, 2, 1, 0, 1],
        [0, 2, 1, 2, 1, 0],
    ];
    let scale = 1.0 / 6.0_f64.sqrt();
    let u = ComplexMatrix::from_fn(6, 6, |i, j| {
        C64::from_polar(scale, 2.0 * std::f64::consts::PI * POW[i][j] as f64 / 3.0)
    });
    TransitionMatrix::new(u, Tolerance::default()).expect("fixed catalog matrix is unitary")
}

/// Spin-1 transition matrix between the J_z and J_x eigenbases:
/// (1/2) [[1, sqrt2, 1], [sqrt2, 0, -sqrt2], [1, -sqrt2, 1]].
pub fn spin1() -> TransitionMatrix {
    let r = std::f64::consts::SQRT_2;
    let rows: [[f64; 3]; 3] = [[1.0, r, 1.0], [r, 0.0, -r], [1.0, -r, 1.0]];
    let u = ComplexMatrix::from_fn(3, 3, |i, j| C64::new(rows[i][j] / 2.0, 0.0));
    TransitionMatrix::new(u, Tolerance::default()).expect("fixed catalog matrix is unitary")
}

/// The one-parameter family of 4x4 MUB transition matrices
/// U(s) = (1/2) [[1,1,1,1],[1,1,-1,-1],[1,-1,s,-s],[1,-1,-s,s]], |s| = 1.
pub fn mub4(s: C64) -> Result<TransitionMatrix> {
    let tol = Tolerance::default();
    if (s.norm() - 1.0).abs() > tol.zero_abs {
        return Err(Error::Validation(format!(
            "mub4 parameter must be unimodular, got |s| = {}",
            s.norm()
        )));
    }
    let one = C64::new(1.0, 0.0);
    let rows = [
        [one, one, one, one],
        [one, one, -one, -one],
        [one, -one, s, -s],
        [one, -one, -s, s],
    ];
    let u = ComplexMatrix::from_fn(4, 4, |i, j| rows[i][j] / 2.0);
    TransitionMatrix::new(u, tol)
}

/// Which of the two 6x6 zero-diagonal examples to build.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum U6Variant {
    Plain,
    Primed,
}

/// The 6x6 sign matrices with zero diagonal and all off-diagonal magnitudes
/// 1/sqrt(5): six zeros total, at most two in any two rows or columns.
pub fn u6(variant: U6Variant) -> TransitionMatrix {
    const PLAIN: [[i8; 6]; 6] = [
        [0, 1, 1, 1, 1, 1],
        [1, 0, 1, -1, 1, -1],
        [1, 1, 0, -1, -1, 1],
        [1, -1, -1, 0, 1, 1],
        [1, 1, -1, 1, 0, -1],
        [1, -1, 1, 1, -1, 0],
    ];
    const PRIMED: [[i8; 6]; 6] = [
        [0, 1, 1, 1, 1, 1],
        [1, 0, 1, -1, 1, -1],
        [1, 1, 0, 1, -1, -1],
        [1, -1, 1, 0, -1, 1],
        [1, 1, -1, -1, 0, 1],
        [1, -1, -1, 1, 1, 0],
    ];
    let signs = match variant {
        U6Variant::Plain => &PLAIN,
        U6Variant::Primed => &PRIMED,
    };
    let scale = 1.0 / 5.0_f64.sqrt();
    let u = ComplexMatrix::from_fn(6, 6, |i, j| C64::new(signs[i][j] as f64 * scale, 0.0));
    TransitionMatrix::new(u, Tolerance::default()).expect("fixed catalog matrix is unitary")
}

/// Kronecker product of two transition matrices; the result links the tensor
/// bases |a_i, a'_k> and |b_j, b'_l>.
pub fn tensor(t1: &TransitionMatrix, t2: &TransitionMatrix) -> Result<TransitionMatrix> {
    let d = t1.d() * t2.d();
    if d > DIM_CAP {
        return Err(Error::SizeCap(format!(
            "tensor dimension {d} exceeds the analysis cap {DIM_CAP}"
        )));
    }
    let (d2, dd) = (t2.d(), d);
    let u = ComplexMatrix::from_fn(dd, dd, |i, j| {
        t1.at(i / d2, j / d2) * t2.at(i % d2, j % d2)
    });
    let tol = Tolerance {
        zero_abs: t1.tol().zero_abs.max(t2.tol().zero_abs),
        rank_rel: t1.tol().rank_rel.max(t2.tol().rank_rel),
    };
    TransitionMatrix::new(u, tol)
}

/// A permutation of [1, d], stored as the image list: position i maps to
/// image()[i-1].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Permutation {
    image: Vec<usize>,
}

impl Permutation {
    /// Validates that `image` is a bijection of [1, d] with d = image.len().
    pub fn new(image: Vec<usize>) -> Result<Self> {
        let d = image.len();
        let mut seen = vec![false; d];
        for &v in &image {
            if v < 1 || v > d || seen[v - 1] {
                return Err(Error::Validation(format!(
                    "not a permutation of [1, {d}]: {image:?}"
                )));
            }
            seen[v - 1] = true;
        }
        Ok(Permutation { image })
    }

    pub fn identity(d: usize) -> Self {
        Permutation { image: (1..=d).collect() }
    }

    pub fn len(&self) -> usize {
        self.image.len()
    }

    pub fn is_empty(&self) -> bool {
        self.image.is_empty()
    }

    /// Image of the 1-based index i.
    pub fn apply(&self, i: usize) -> usize {
        self.image[i - 1]
    }

    pub fn image(&self) -> &[usize] {
        &self.image
    }
}

/// Rows permuted by sigma, columns by tau: U'_ij = U_{sigma(i), tau(j)}.
/// Vanishing-minor structure (hence complete incompatibility) is invariant.
pub fn permute(
    t: &TransitionMatrix,
    sigma: &Permutation,
    tau: &Permutation,
) -> Result<TransitionMatrix> {
    let d = t.d();
    if sigma.len() != d || tau.len() != d {
        return Err(Error::Dimension(format!(
            "permutation lengths {} and {} do not match dimension {d}",
            sigma.len(),
            tau.len()
        )));
    }
    let u = ComplexMatrix::from_fn(d, d, |i, j| {
        t.at(sigma.apply(i + 1) - 1, tau.apply(j + 1) - 1)
    });
    TransitionMatrix::new(u, t.tol())
}

/// One standard complex Gaussian via Box-Muller on uniform draws.
pub(crate) fn complex_gaussian(rng: &mut impl Rng) -> C64 {
    // Map [0,1) to (0,1] so the logarithm is finite.
    let u1: f64 = 1.0 - rng.gen::<f64>();
    let u2: f64 = rng.gen();
    let r = (-u1.ln()).sqrt(); // radius for variance 1/2 per component
    let phi = 2.0 * std::f64::consts::PI * u2;
    C64::from_polar(r, phi)
}

/// Haar-distributed random unitary: a matrix of independent standard complex
/// Gaussians, orthonormalized column by column. Gram-Schmidt leaves positive
/// diagonal factors, which is exactly the normalization that makes the result
/// Haar rather than merely unitary. Deterministic in the seed.
pub fn haar_unitary(d: usize, seed: u64) -> Result<TransitionMatrix> {
    if d < 2 {
        return Err(Error::Dimension(format!("haar_unitary needs d >= 2, got {d}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut cols: Vec<Vec<C64>> = (0..d)
        .map(|_| (0..d).map(|_| complex_gaussian(&mut rng)).collect())
        .collect();
    for j in 0..d {
        for _ in 0..2 {
            for k in 0..j {
                let proj: C64 =
                    cols[k].iter().zip(&cols[j]).map(|(a, b)| a.conj() * b).sum();
                let prev = cols[k].clone();
                for (z, p) in cols[j].iter_mut().zip(prev) {
                    *z -= proj * p;
                }
            }
        }
        crate::linalg::normalize(&mut cols[j]);
    }
    let u = ComplexMatrix::from_fn(d, d, |i, j| cols[j][i]);
    TransitionMatrix::new(u, Tolerance::default())
}

/// Every worked example at its native dimension, with stable names; the
/// regression and soundness sweeps iterate over this list.
pub fn catalog() -> Vec<(&'static str, TransitionMatrix)> {
    let i = C64::new(0.0, 1.0);
    let one = C64::new(1.0, 0.0);
    vec![
        ("dft2", dft(2).expect("d >= 2")),
        ("dft3", dft(3).expect("d >= 2")),
        ("dft4", dft(4).expect("d >= 2")),
        ("dft5", dft(5).expect("d >= 2")),
        ("dft6", dft(6).expect("d >= 2")),
        ("dft7", dft(7).expect("d >= 2")),
        ("tao", tao()),
        ("spin1", spin1()),
        ("mub4_1", mub4(one).expect("|1| = 1")),
        ("mub4_i", mub4(i).expect("|i| = 1")),
        ("u6", u6(U6Variant::Plain)),
        ("u6p", u6(U6Variant::Primed)),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::enumerate_minors;

    fn close(a: C64, b: C64) -> bool {
        (a - b).norm() < 1e-12
    }

    #[test]
    fn catalog_is_unitary_and_named() {
        // TransitionMatrix::new already checks unitarity; surviving
        // construction is the assertion.
        let cat = catalog();
        assert_eq!(cat.len(), 12);
    }

    #[test]
    fn dft2_is_hadamard() {
        let t = dft(2).unwrap();
        let s = 1.0 / 2.0_f64.sqrt();
        assert!(close(t.at(0, 0), C64::new(s, 0.0)));
        assert!(close(t.at(1, 1), C64::new(-s, 0.0)));
    }

    #[test]
    fn dft4_second_row_is_powers_of_i() {
        let t = dft(4).unwrap();
        let expect = [
            C64::new(0.5, 0.0),
            C64::new(0.0, 0.5),
            C64::new(-0.5, 0.0),
            C64::new(0.0, -0.5),
        ];
        for (j, e) in expect.iter().enumerate() {
            assert!(close(t.at(1, j), *e), "entry (2,{})", j + 1);
        }
    }

    #[test]
    fn dft_rejects_d1() {
        assert!(matches!(dft(1), Err(Error::Dimension(_))));
    }

    #[test]
    fn tao_entry_2_3_is_omega() {
        let t = tao();
        let omega = C64::from_polar(1.0, 2.0 * std::f64::consts::PI / 3.0);
        assert!(close(t.at(1, 2), omega / 6.0_f64.sqrt()));
    }

    #[test]
    fn tao_and_dft_are_mub_spin1_is_not() {
        assert!(is_mub(&tao()));
        assert!(is_mub(&dft(5).unwrap()));
        assert!(is_mub(&mub4(C64::new(0.0, 1.0)).unwrap()));
        assert!(!is_mub(&spin1()));
        assert!(!is_mub(&u6(U6Variant::Plain)));
    }

    #[test]
    fn spin1_stats() {
        let s = stats(&spin1());
        assert_eq!(s.min_mag, 0.0);
        assert!((s.max_mag - 1.0 / 2.0_f64.sqrt()).abs() < 1e-12);
        assert_eq!(s.zeros, 1);
        assert_eq!(s.zeros_two_rows, 1);
        assert_eq!(s.zeros_two_cols, 1);
    }

    #[test]
    fn u6_zero_pattern() {
        for variant in [U6Variant::Plain, U6Variant::Primed] {
            let s = stats(&u6(variant));
            assert_eq!(s.zeros, 6);
            assert_eq!(s.zeros_two_rows, 2);
            assert_eq!(s.zeros_two_cols, 2);
            assert_eq!(s.min_mag, 0.0);
            assert!((s.max_mag - 1.0 / 5.0_f64.sqrt()).abs() < 1e-12);
        }
    }

    #[test]
    fn mub4_rejects_non_unimodular() {
        assert!(matches!(mub4(C64::new(0.5, 0.0)), Err(Error::Validation(_))));
    }

    #[test]
    fn tensor_of_identilike_dfts_is_mub() {
        let t = tensor(&dft(2).unwrap(), &dft(2).unwrap()).unwrap();
        assert_eq!(t.d(), 4);
        assert!(is_mub(&t));
    }

    #[test]
    fn tensor_u6_dft2_zero_pattern() {
        let t = tensor(&u6(U6Variant::Plain), &dft(2).unwrap()).unwrap();
        let s = stats(&t);
        assert_eq!(s.zeros, 24);
        assert_eq!(s.zeros_two_rows, 4);
        assert_eq!(s.zeros_two_cols, 4);
        assert!((s.max_mag - 1.0 / 10.0_f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn tensor_cap() {
        let six = u6(U6Variant::Plain);
        let err = tensor(&six, &six);
        assert!(matches!(err, Err(Error::SizeCap(_))));
    }

    #[test]
    fn permutation_validation() {
        assert!(Permutation::new(vec![2, 1, 3]).is_ok());
        assert!(Permutation::new(vec![1, 1, 3]).is_err());
        assert!(Permutation::new(vec![0, 1]).is_err());
    }

    #[test]
    fn permute_swaps_rows() {
        let t = dft(2).unwrap();
        let swap = Permutation::new(vec![2, 1]).unwrap();
        let id = Permutation::identity(2);
        let p = permute(&t, &swap, &id).unwrap();
        assert!(close(p.at(0, 0), t.at(1, 0)));
        assert!(close(p.at(0, 1), t.at(1, 1)));
        let same = permute(&t, &id, &id).unwrap();
        assert_eq!(same.matrix(), t.matrix());
    }

    #[test]
    fn permute_preserves_minor_census_and_stats() {
        let t = tao();
        let sigma = Permutation::new(vec![3, 1, 6, 2, 5, 4]).unwrap();
        let tau = Permutation::new(vec![2, 4, 6, 1, 3, 5]).unwrap();
        let p = permute(&t, &sigma, &tau).unwrap();
        let a = enumerate_minors(t.matrix(), t.tol()).unwrap();
        let b = enumerate_minors(p.matrix(), p.tol()).unwrap();
        assert_eq!(a.total_vanishing, b.total_vanishing);
        for (ca, cb) in a.per_size.iter().zip(&b.per_size) {
            assert_eq!(ca.vanishing, cb.vanishing);
        }
        assert_eq!(stats(&t), stats(&p));
    }

    #[test]
    fn haar_unitary_is_deterministic_in_seed() {
        let a = haar_unitary(4, 7).unwrap();
        let b = haar_unitary(4, 7).unwrap();
        let c = haar_unitary(4, 8).unwrap();
        assert_eq!(a.matrix(), b.matrix());
        assert!(a.matrix().max_abs_diff(c.matrix()).unwrap() > 1e-6);
    }
}
