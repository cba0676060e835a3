//! Dense complex linear algebra: unitarity checks, tolerance-aware rank and
//! kernel of rectangular matrices, and exhaustive subdeterminant (minor)
//! enumeration.
//!
//! Everything here is plain `Vec<Complex64>` row-major storage with explicit
//! tolerances; matrices at the intended scale are tiny (d <= 12) and the cost
//! is dominated by combinatorics, not by any single factorization. All
//! functions are pure; [`enumerate_minors`] fans out over row subsets with
//! rayon and merges deterministically, so results never depend on the
//! schedule.

use rayon::prelude::*;

use crate::error::{Error, Result};

pub type C64 = num_complex::Complex64;

/// Absolute / relative thresholds used by every tolerance-aware decision.
///
/// `zero_abs` decides when a magnitude counts as zero (matrix entries, state
/// components, minors); `rank_rel` is the relative pivot cutoff of the
/// rank-revealing factorization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub zero_abs: f64,
    pub rank_rel: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance { zero_abs: 1e-9, rank_rel: 1e-10 }
    }
}

impl Tolerance {
    pub fn new(zero_abs: f64, rank_rel: f64) -> Result<Self> {
        if !(zero_abs > 0.0) || !(rank_rel > 0.0) {
            return Err(Error::Validation(format!(
                "tolerances must be strictly positive, got zero_abs={zero_abs}, rank_rel={rank_rel}"
            )));
        }
        Ok(Tolerance { zero_abs, rank_rel })
    }
}

/// Largest dimension accepted by the combinatorial scans (minor enumeration,
/// hierarchy and diagram subset sweeps, tensor construction). The minor count
/// alone grows like C(2d, d); 12 keeps every full sweep in the seconds range.
pub const DIM_CAP: usize = 12;

/// Dense rectangular complex matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<C64>,
}

impl ComplexMatrix {
    /// Build from row-major entries; every entry must be finite.
    pub fn new(rows: usize, cols: usize, entries: Vec<C64>) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::Dimension(format!(
                "{rows}x{cols} matrix needs {} entries, got {}",
                rows * cols,
                entries.len()
            )));
        }
        if entries.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::Validation("matrix entries must be finite".into()));
        }
        Ok(ComplexMatrix { rows, cols, entries })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        ComplexMatrix { rows, cols, entries: vec![C64::new(0.0, 0.0); rows * cols] }
    }

    pub fn identity(d: usize) -> Self {
        let mut m = Self::zeros(d, d);
        for i in 0..d {
            m.set(i, i, C64::new(1.0, 0.0));
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut entries = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                entries.push(f(i, j));
            }
        }
        ComplexMatrix { rows, cols, entries }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    /// Entry (i, j), zero-based.
    #[inline]
    pub fn at(&self, i: usize, j: usize) -> C64 {
        self.entries[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: C64) {
        self.entries[i * self.cols + j] = v;
    }

    pub fn entries(&self) -> &[C64] {
        &self.entries
    }

    /// Conjugate transpose.
    pub fn dagger(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.at(j, i).conj())
    }

    pub fn mul(&self, other: &ComplexMatrix) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::Dimension(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.at(i, k);
                if a.norm_sqr() == 0.0 {
                    continue;
                }
                for j in 0..other.cols {
                    let v = out.at(i, j) + a * other.at(k, j);
                    out.set(i, j, v);
                }
            }
        }
        Ok(out)
    }

    /// y = M x.
    pub fn mul_vec(&self, x: &[C64]) -> Result<Vec<C64>> {
        if x.len() != self.cols {
            return Err(Error::Dimension(format!(
                "matrix has {} columns, vector has length {}",
                self.cols,
                x.len()
            )));
        }
        Ok((0..self.rows)
            .map(|i| (0..self.cols).map(|j| self.at(i, j) * x[j]).sum())
            .collect())
    }

    /// y = M^dagger x.
    pub fn dagger_mul_vec(&self, x: &[C64]) -> Result<Vec<C64>> {
        if x.len() != self.rows {
            return Err(Error::Dimension(format!(
                "matrix has {} rows, vector has length {}",
                self.rows,
                x.len()
            )));
        }
        Ok((0..self.cols)
            .map(|j| (0..self.rows).map(|i| self.at(i, j).conj() * x[i]).sum())
            .collect())
    }

    /// Largest entry magnitude.
    pub fn max_abs(&self) -> f64 {
        self.entries.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Largest entrywise |self - other|; the matrices must be the same shape.
    pub fn max_abs_diff(&self, other: &ComplexMatrix) -> Result<f64> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::Dimension("shape mismatch in max_abs_diff".into()));
        }
        Ok(self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }

    /// Deterministic power-iteration estimate of the spectral norm.
    pub fn op_norm_est(&self) -> f64 {
        if self.rows == 0 || self.cols == 0 {
            return 0.0;
        }
        // Iterate on M^dagger M with a fixed, slightly tilted start so the
        // estimate is reproducible and does not start orthogonal to the top
        // singular vector.
        let mut v: Vec<C64> =
            (0..self.cols).map(|j| C64::new(1.0 + 1e-3 * j as f64, 0.0)).collect();
        normalize(&mut v);
        let mut sigma2 = 0.0;
        for _ in 0..100 {
            let mv = self.mul_vec(&v).expect("shape checked");
            let mut w = self.dagger_mul_vec(&mv).expect("shape checked");
            sigma2 = w.iter().zip(&v).map(|(a, b)| (a.conj() * b).re).sum::<f64>().abs();
            let n = norm(&w);
            if n == 0.0 {
                return 0.0;
            }
            w.iter_mut().for_each(|z| *z /= n);
            v = w;
        }
        sigma2.sqrt()
    }

    pub(crate) fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.entries.swap(i * self.cols + a, i * self.cols + b);
        }
    }
}

pub(crate) fn norm(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub(crate) fn normalize(v: &mut [C64]) {
    let n = norm(v);
    if n > 0.0 {
        v.iter_mut().for_each(|z| *z /= n);
    }
}

/// Strictly increasing 1-based indices into [1, d]; the S and T of every
/// subset scan.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct IndexSet {
    members: Vec<usize>,
}

impl IndexSet {
    /// Sorts the members; duplicates or indices outside [1, d] are rejected.
    pub fn new(mut members: Vec<usize>, d: usize) -> Result<Self> {
        members.sort_unstable();
        if members.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::Validation("index set has duplicate members".into()));
        }
        if members.iter().any(|&i| i < 1 || i > d) {
            return Err(Error::Bounds(format!("index set members must lie in [1, {d}]")));
        }
        Ok(IndexSet { members })
    }

    pub fn empty() -> Self {
        IndexSet { members: Vec::new() }
    }

    pub fn full(d: usize) -> Self {
        IndexSet { members: (1..=d).collect() }
    }

    /// Build from zero-based indices (internal enumeration order).
    pub(crate) fn from_zero_based(idx: &[usize]) -> Self {
        IndexSet { members: idx.iter().map(|&i| i + 1).collect() }
    }

    pub(crate) fn from_mask(mask: u64) -> Self {
        IndexSet {
            members: (0..64).filter(|b| mask >> b & 1 == 1).map(|b| b + 1).collect(),
        }
    }

    pub fn members(&self) -> &[usize] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, i: usize) -> bool {
        self.members.binary_search(&i).is_ok()
    }

    /// Complement within [1, d].
    pub fn complement(&self, d: usize) -> Self {
        IndexSet { members: (1..=d).filter(|i| !self.contains(*i)).collect() }
    }

    /// Zero-based members, ascending.
    pub fn iter0(&self) -> impl Iterator<Item = usize> + '_ {
        self.members.iter().map(|&i| i - 1)
    }
}

/// Lexicographic k-subsets of {0, .., n-1}.
pub(crate) struct Combinations {
    n: usize,
    k: usize,
    cur: Vec<usize>,
    started: bool,
    done: bool,
}

impl Combinations {
    pub(crate) fn new(n: usize, k: usize) -> Self {
        Combinations { n, k, cur: (0..k).collect(), started: false, done: k > n }
    }
}

impl Iterator for Combinations {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        if self.done {
            return None;
        }
        if !self.started {
            self.started = true;
            return Some(self.cur.clone());
        }
        // Advance the rightmost index that still has room.
        let mut i = self.k;
        loop {
            if i == 0 {
                self.done = true;
                return None;
            }
            i -= 1;
            if self.cur[i] + 1 <= self.n - (self.k - i) {
                self.cur[i] += 1;
                for j in i + 1..self.k {
                    self.cur[j] = self.cur[j - 1] + 1;
                }
                return Some(self.cur.clone());
            }
        }
    }
}

/// C(n, k) in u64 (exact for the sizes the cap admits).
pub(crate) fn binomial(n: usize, k: usize) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc as u64
}

/// True iff max |M^dagger M - I| <= zero_abs * d.
pub fn is_unitary(m: &ComplexMatrix, tol: Tolerance) -> Result<bool> {
    if !m.is_square() {
        return Err(Error::Dimension(format!(
            "unitarity is defined for square matrices, got {}x{}",
            m.rows(),
            m.cols()
        )));
    }
    let d = m.rows();
    let gram = m.dagger().mul(m)?;
    let dev = gram.max_abs_diff(&ComplexMatrix::identity(d))?;
    Ok(dev <= tol.zero_abs * d as f64)
}

/// The |rowset| x |colset| submatrix in sorted index order.
pub fn submatrix(m: &ComplexMatrix, rowset: &IndexSet, colset: &IndexSet) -> Result<ComplexMatrix> {
    if rowset.members().last().is_some_and(|&i| i > m.rows()) {
        return Err(Error::Bounds(format!("row index beyond {} rows", m.rows())));
    }
    if colset.members().last().is_some_and(|&j| j > m.cols()) {
        return Err(Error::Bounds(format!("column index beyond {} columns", m.cols())));
    }
    let ri: Vec<usize> = rowset.iter0().collect();
    let ci: Vec<usize> = colset.iter0().collect();
    Ok(ComplexMatrix::from_fn(ri.len(), ci.len(), |i, j| m.at(ri[i], ci[j])))
}

/// Determinant via partially pivoted LU; det of the 0x0 matrix is 1.
pub fn det(m: &ComplexMatrix) -> Result<C64> {
    if !m.is_square() {
        return Err(Error::Dimension(format!(
            "determinant of non-square {}x{} matrix",
            m.rows(),
            m.cols()
        )));
    }
    let n = m.rows();
    let mut a = m.entries.clone();
    Ok(det_in_place(&mut a, n))
}

/// LU elimination on row-major scratch; used by the minor scan to avoid
/// rebuilding matrices.
fn det_in_place(a: &mut [C64], n: usize) -> C64 {
    let mut acc = C64::new(1.0, 0.0);
    for k in 0..n {
        let mut p = k;
        let mut best = a[k * n + k].norm_sqr();
        for i in k + 1..n {
            let v = a[i * n + k].norm_sqr();
            if v > best {
                best = v;
                p = i;
            }
        }
        if best == 0.0 {
            return C64::new(0.0, 0.0);
        }
        if p != k {
            for j in 0..n {
                a.swap(k * n + j, p * n + j);
            }
            acc = -acc;
        }
        let pivot = a[k * n + k];
        acc *= pivot;
        for i in k + 1..n {
            let f = a[i * n + k] / pivot;
            if f.norm_sqr() == 0.0 {
                continue;
            }
            for j in k + 1..n {
                let v = a[k * n + j];
                a[i * n + j] -= f * v;
            }
        }
    }
    acc
}

/// Householder QR with column pivoting; the basis of [`rank`] and
/// [`kernel_basis`].
struct PivotedQr {
    /// Upper-trapezoidal factor left in place.
    r: ComplexMatrix,
    /// R column j came from original column perm[j].
    perm: Vec<usize>,
    /// |R_kk| for k < min(rows, cols), in elimination order.
    pivots: Vec<f64>,
}

fn pivoted_qr(m: &ComplexMatrix) -> PivotedQr {
    let (rows, cols) = (m.rows(), m.cols());
    let mut a = m.clone();
    let mut perm: Vec<usize> = (0..cols).collect();
    let steps = rows.min(cols);
    for k in 0..steps {
        // Exact trailing column norms each step; cheap at this scale and
        // immune to downdating drift.
        let col_norm2 = |a: &ComplexMatrix, j: usize| -> f64 {
            (k..rows).map(|i| a.at(i, j).norm_sqr()).sum()
        };
        let mut best = k;
        let mut best_n = col_norm2(&a, k);
        for j in k + 1..cols {
            let nj = col_norm2(&a, j);
            if nj > best_n {
                best_n = nj;
                best = j;
            }
        }
        if best != k {
            a.swap_cols(k, best);
            perm.swap(k, best);
        }
        let xnorm = best_n.sqrt();
        if xnorm == 0.0 {
            continue; // trailing block is exactly zero
        }
        // Householder vector v = x + sign(x_1) ||x|| e_1, reflecting the
        // pivot column onto -sign(x_1) ||x|| e_1.
        let akk = a.at(k, k);
        let sign = if akk.norm() == 0.0 { C64::new(1.0, 0.0) } else { akk / akk.norm() };
        let mut v: Vec<C64> = (k..rows).map(|i| a.at(i, k)).collect();
        v[0] += sign * xnorm;
        let vnorm2: f64 = v.iter().map(|z| z.norm_sqr()).sum();
        if vnorm2 == 0.0 {
            continue;
        }
        for j in k..cols {
            // a[:, j] -= 2 v (v . a[:, j]) / ||v||^2
            let dot: C64 = (k..rows).map(|i| v[i - k].conj() * a.at(i, j)).sum();
            let f = dot * 2.0 / vnorm2;
            for i in k..rows {
                let val = a.at(i, j) - f * v[i - k];
                a.set(i, j, val);
            }
        }
    }
    let pivots = (0..steps).map(|k| a.at(k, k).norm()).collect();
    PivotedQr { r: a, perm, pivots }
}

/// Numerical rank: leading pivots with magnitude > rank_rel * |largest pivot|.
/// Empty matrices have rank 0.
pub fn rank(m: &ComplexMatrix, tol: Tolerance) -> usize {
    if m.rows() == 0 || m.cols() == 0 {
        return 0;
    }
    let qr = pivoted_qr(m);
    rank_from_pivots(&qr.pivots, tol)
}

fn rank_from_pivots(pivots: &[f64], tol: Tolerance) -> usize {
    let largest = pivots.first().copied().unwrap_or(0.0);
    if largest == 0.0 {
        return 0;
    }
    pivots.iter().take_while(|&&p| p > tol.rank_rel * largest).count()
}

/// Orthonormal basis of the numerical null space; always returns exactly
/// cols - rank(M) vectors.
pub fn kernel_basis(m: &ComplexMatrix, tol: Tolerance) -> Vec<Vec<C64>> {
    let cols = m.cols();
    if cols == 0 {
        return Vec::new();
    }
    if m.rows() == 0 {
        // Everything is in the kernel.
        return (0..cols)
            .map(|j| {
                let mut e = vec![C64::new(0.0, 0.0); cols];
                e[j] = C64::new(1.0, 0.0);
                e
            })
            .collect();
    }
    let qr = pivoted_qr(m);
    let r = rank_from_pivots(&qr.pivots, tol);
    let mut basis: Vec<Vec<C64>> = Vec::with_capacity(cols - r);
    for f in r..cols {
        // Solve R[0..r, 0..r] x = R[0..r, f] by back substitution, then embed
        // -x on the pivot columns and 1 on the free column.
        let mut x = vec![C64::new(0.0, 0.0); r];
        for i in (0..r).rev() {
            let mut s = qr.r.at(i, f);
            for j in i + 1..r {
                s -= qr.r.at(i, j) * x[j];
            }
            x[i] = s / qr.r.at(i, i);
        }
        let mut z = vec![C64::new(0.0, 0.0); cols];
        for (j, xj) in x.iter().enumerate() {
            z[qr.perm[j]] = -xj;
        }
        z[qr.perm[f]] = C64::new(1.0, 0.0);
        basis.push(z);
    }
    orthonormalize(&mut basis);
    basis
}

/// Modified Gram-Schmidt, two passes per vector.
fn orthonormalize(vs: &mut [Vec<C64>]) {
    for i in 0..vs.len() {
        for _ in 0..2 {
            for j in 0..i {
                let proj: C64 = vs[j].iter().zip(vs[i].iter()).map(|(a, b)| a.conj() * b).sum();
                let prev = vs[j].clone();
                for (z, p) in vs[i].iter_mut().zip(prev) {
                    *z -= proj * p;
                }
            }
        }
        normalize(&mut vs[i]);
    }
}

/// One size class of the minor census.
#[derive(Debug, Clone, PartialEq)]
pub struct MinorSizeCount {
    pub size: usize,
    pub vanishing: u64,
    pub total: u64,
    /// Smallest |det| seen at this size; callers use it to spot borderline
    /// minors sitting near the vanishing threshold.
    pub min_abs: f64,
}

/// Row/column bitmask key of one vanishing minor (bit b = index b+1).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MinorKey {
    pub size: usize,
    pub rows: u64,
    pub cols: u64,
}

impl MinorKey {
    pub fn row_set(&self) -> IndexSet {
        IndexSet::from_mask(self.rows)
    }

    pub fn col_set(&self) -> IndexSet {
        IndexSet::from_mask(self.cols)
    }
}

/// Full census of the k x k minors of a square matrix, k = 1..=d.
#[derive(Debug, Clone, PartialEq)]
pub struct MinorReport {
    pub d: usize,
    pub per_size: Vec<MinorSizeCount>,
    pub total_vanishing: u64,
    /// Largest k with a vanishing k x k minor.
    pub largest_vanishing_size: Option<usize>,
    /// Lexicographically first vanishing minor at that largest size
    /// (row set major, column set minor).
    pub first_vanishing: Option<(IndexSet, IndexSet)>,
    /// Smallest |det| over all minors of all sizes.
    pub min_abs_minor: f64,
    /// Every vanishing minor, sorted by (size, row mask, column mask);
    /// the perturbation loop diffs these across rounds.
    pub vanishing: Vec<MinorKey>,
}

impl MinorReport {
    pub fn vanishing_at(&self, size: usize) -> u64 {
        self.per_size.iter().find(|c| c.size == size).map_or(0, |c| c.vanishing)
    }
}

/// Minor census with the default size cap [`DIM_CAP`].
pub fn enumerate_minors(m: &ComplexMatrix, tol: Tolerance) -> Result<MinorReport> {
    enumerate_minors_with_cap(m, tol, DIM_CAP)
}

/// A minor is vanishing iff |det| <= tol.zero_abs; the threshold is absolute
/// because unitary rows and columns are unit-norm, so minors arrive
/// pre-normalized. Deterministic regardless of thread count.
pub fn enumerate_minors_with_cap(
    m: &ComplexMatrix,
    tol: Tolerance,
    cap: usize,
) -> Result<MinorReport> {
    if !m.is_square() {
        return Err(Error::Dimension(format!(
            "minor census of non-square {}x{} matrix",
            m.rows(),
            m.cols()
        )));
    }
    let d = m.rows();
    if d > cap {
        return Err(Error::SizeCap(format!(
            "dimension {d} exceeds the minor-enumeration cap {cap}"
        )));
    }
    let mut per_size = Vec::with_capacity(d);
    let mut vanishing_keys: Vec<MinorKey> = Vec::new();
    let mut min_abs_global = f64::INFINITY;
    let mut largest: Option<usize> = None;
    let mut first: Option<(IndexSet, IndexSet)> = None;

    for k in 1..=d {
        let rowsets: Vec<Vec<usize>> = Combinations::new(d, k).collect();
        // One partial census per row subset, in lexicographic order; the
        // sequential fold below keeps the merge order-independent of the
        // rayon schedule.
        let partials: Vec<(Vec<u64>, f64)> = rowsets
            .par_iter()
            .map(|rset| {
                let mut local_vanishing: Vec<u64> = Vec::new();
                let mut local_min = f64::INFINITY;
                let mut scratch = vec![C64::new(0.0, 0.0); k * k];
                for cset in Combinations::new(d, k) {
                    for (i, &ri) in rset.iter().enumerate() {
                        for (j, &cj) in cset.iter().enumerate() {
                            scratch[i * k + j] = m.at(ri, cj);
                        }
                    }
                    let a = det_in_place(&mut scratch, k).norm();
                    local_min = local_min.min(a);
                    if a <= tol.zero_abs {
                        local_vanishing.push(mask_of(&cset));
                    }
                }
                (local_vanishing, local_min)
            })
            .collect();

        let mut vanish_count = 0u64;
        let mut min_abs = f64::INFINITY;
        let mut first_at_k: Option<(IndexSet, IndexSet)> = None;
        for (rset, (cols, local_min)) in rowsets.iter().zip(&partials) {
            min_abs = min_abs.min(*local_min);
            vanish_count += cols.len() as u64;
            let rmask = mask_of(rset);
            if first_at_k.is_none() {
                if let Some(&cmask) = cols.first() {
                    first_at_k =
                        Some((IndexSet::from_mask(rmask), IndexSet::from_mask(cmask)));
                }
            }
            for &cmask in cols {
                vanishing_keys.push(MinorKey { size: k, rows: rmask, cols: cmask });
            }
        }
        if vanish_count > 0 {
            largest = Some(k);
            first = first_at_k;
        }
        min_abs_global = min_abs_global.min(min_abs);
        let total = binomial(d, k) * binomial(d, k);
        per_size.push(MinorSizeCount { size: k, vanishing: vanish_count, total, min_abs });
    }

    vanishing_keys.sort_unstable();
    Ok(MinorReport {
        d,
        total_vanishing: vanishing_keys.len() as u64,
        per_size,
        largest_vanishing_size: largest,
        first_vanishing: first,
        min_abs_minor: min_abs_global,
        vanishing: vanishing_keys,
    })
}

fn mask_of(idx: &[usize]) -> u64 {
    idx.iter().fold(0u64, |m, &i| m | 1 << i)
}

/// Short-circuiting scan for the lexicographically first vanishing minor
/// (smallest size first). Same decision as [`enumerate_minors`] with far less
/// work on matrices that do have one.
pub fn first_vanishing_minor(
    m: &ComplexMatrix,
    tol: Tolerance,
    cap: usize,
) -> Result<Option<(IndexSet, IndexSet)>> {
    if !m.is_square() {
        return Err(Error::Dimension("minor scan of non-square matrix".into()));
    }
    let d = m.rows();
    if d > cap {
        return Err(Error::SizeCap(format!(
            "dimension {d} exceeds the minor-enumeration cap {cap}"
        )));
    }
    for k in 1..=d {
        let rowsets: Vec<Vec<usize>> = Combinations::new(d, k).collect();
        // find_first preserves lexicographic priority while letting rayon
        // abandon later row subsets once a hit exists.
        let hit = rowsets.par_iter().find_map_first(|rset| {
            let mut scratch = vec![C64::new(0.0, 0.0); k * k];
            for cset in Combinations::new(d, k) {
                for (i, &ri) in rset.iter().enumerate() {
                    for (j, &cj) in cset.iter().enumerate() {
                        scratch[i * k + j] = m.at(ri, cj);
                    }
                }
                if det_in_place(&mut scratch, k).norm() <= tol.zero_abs {
                    return Some((
                        IndexSet::from_zero_based(rset),
                        IndexSet::from_zero_based(&cset),
                    ));
                }
            }
            None
        });
        if hit.is_some() {
            return Ok(hit);
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    #[test]
    fn identity_is_unitary() {
        assert!(is_unitary(&ComplexMatrix::identity(3), tol()).unwrap());
    }

    #[test]
    fn perturbed_identity_is_not_unitary() {
        let mut m = ComplexMatrix::identity(3);
        m.set(0, 0, c(1.01, 0.0));
        assert!(!is_unitary(&m, tol()).unwrap());
    }

    #[test]
    fn unitarity_rejects_rectangular() {
        let m = ComplexMatrix::zeros(2, 3);
        assert!(matches!(is_unitary(&m, tol()), Err(Error::Dimension(_))));
    }

    #[test]
    fn submatrix_of_identity() {
        let m = ComplexMatrix::identity(3);
        let s = IndexSet::new(vec![1, 2], 3).unwrap();
        let sub = submatrix(&m, &s, &s).unwrap();
        assert_eq!(sub, ComplexMatrix::identity(2));
    }

    #[test]
    fn submatrix_empty_selection() {
        let m = ComplexMatrix::identity(3);
        let t = IndexSet::new(vec![1, 3], 3).unwrap();
        let sub = submatrix(&m, &IndexSet::empty(), &t).unwrap();
        assert_eq!(sub.rows(), 0);
        assert_eq!(sub.cols(), 2);
    }

    #[test]
    fn submatrix_bounds() {
        let m = ComplexMatrix::identity(3);
        let s = IndexSet::new(vec![4], 4).unwrap();
        assert!(matches!(submatrix(&m, &s, &s), Err(Error::Bounds(_))));
    }

    #[test]
    fn det_identity_and_swap() {
        assert_eq!(det(&ComplexMatrix::identity(4)).unwrap(), c(1.0, 0.0));
        let swap =
            ComplexMatrix::new(2, 2, vec![c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)])
                .unwrap();
        assert!((det(&swap).unwrap() - c(-1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn det_empty_matrix_is_one() {
        assert_eq!(det(&ComplexMatrix::zeros(0, 0)).unwrap(), c(1.0, 0.0));
    }

    #[test]
    fn det_rank_one_block() {
        let sixth = 1.0 / 6.0;
        let m = ComplexMatrix::new(
            2,
            2,
            vec![c(sixth, 0.0), c(sixth, 0.0), c(sixth, 0.0), c(sixth, 0.0)],
        )
        .unwrap();
        assert!(det(&m).unwrap().norm() <= 1e-12);
    }

    #[test]
    fn rank_basics() {
        assert_eq!(rank(&ComplexMatrix::identity(3), tol()), 3);
        assert_eq!(rank(&ComplexMatrix::zeros(0, 5), tol()), 0);
        assert_eq!(rank(&ComplexMatrix::zeros(4, 4), tol()), 0);
    }

    #[test]
    fn kernel_of_identity_is_empty() {
        assert!(kernel_basis(&ComplexMatrix::identity(3), tol()).is_empty());
    }

    #[test]
    fn kernel_of_row_sum() {
        // [1 1] has kernel spanned by (1, -1)/sqrt(2).
        let m = ComplexMatrix::new(1, 2, vec![c(1.0, 0.0), c(1.0, 0.0)]).unwrap();
        let basis = kernel_basis(&m, tol());
        assert_eq!(basis.len(), 1);
        let v = &basis[0];
        assert!((norm(v) - 1.0).abs() < 1e-12);
        assert!((v[0] + v[1]).norm() < 1e-12);
    }

    #[test]
    fn kernel_rank_nullity_random() {
        // Fixed low-rank construction: outer product has rank 1.
        let u = [c(1.0, 0.5), c(-2.0, 1.0), c(0.25, 0.0)];
        let v = [c(2.0, -1.0), c(0.0, 3.0), c(1.0, 1.0), c(-1.0, 0.0)];
        let m = ComplexMatrix::from_fn(3, 4, |i, j| u[i] * v[j]);
        assert_eq!(rank(&m, tol()), 1);
        let basis = kernel_basis(&m, tol());
        assert_eq!(basis.len(), 3);
        for z in &basis {
            let mz = m.mul_vec(z).unwrap();
            assert!(norm(&mz) <= 10.0 * tol().zero_abs * m.max_abs());
        }
        // Pairwise orthonormal.
        for i in 0..basis.len() {
            for j in 0..i {
                let dot: C64 =
                    basis[j].iter().zip(&basis[i]).map(|(a, b)| a.conj() * b).sum();
                assert!(dot.norm() < 1e-10);
            }
        }
    }

    #[test]
    fn minors_of_identity_2() {
        let rep = enumerate_minors(&ComplexMatrix::identity(2), tol()).unwrap();
        // The two off-diagonal zeros are the vanishing 1x1 minors.
        assert_eq!(rep.vanishing_at(1), 2);
        assert_eq!(rep.vanishing_at(2), 0);
        assert_eq!(rep.total_vanishing, 2);
        assert_eq!(rep.largest_vanishing_size, Some(1));
        let (r, c) = rep.first_vanishing.unwrap();
        assert_eq!((r.members(), c.members()), (&[1][..], &[2][..]));
    }

    #[test]
    fn minor_totals_are_binomial_squares() {
        let rep = enumerate_minors(&ComplexMatrix::identity(5), tol()).unwrap();
        for k in 1..=5usize {
            let t = rep.per_size[k - 1].total;
            assert_eq!(t, binomial(5, k) * binomial(5, k));
        }
    }

    #[test]
    fn minor_cap_enforced() {
        let m = ComplexMatrix::identity(13);
        assert!(matches!(enumerate_minors(&m, tol()), Err(Error::SizeCap(_))));
    }

    #[test]
    fn first_vanishing_matches_census() {
        let m = ComplexMatrix::identity(4);
        let hit = first_vanishing_minor(&m, tol(), DIM_CAP).unwrap().unwrap();
        assert_eq!((hit.0.members(), hit.1.members()), (&[1][..], &[2][..]));
    }

    #[test]
    fn combinations_order_and_count() {
        let all: Vec<Vec<usize>> = Combinations::new(4, 2).collect();
        assert_eq!(
            all,
            vec![vec![0, 1], vec![0, 2], vec![0, 3], vec![1, 2], vec![1, 3], vec![2, 3]]
        );
        assert_eq!(Combinations::new(5, 0).count(), 1);
        assert_eq!(Combinations::new(3, 4).count(), 0);
    }

    #[test]
    fn index_set_validation() {
        assert!(IndexSet::new(vec![1, 1], 3).is_err());
        assert!(IndexSet::new(vec![0], 3).is_err());
        assert!(IndexSet::new(vec![4], 3).is_err());
        let s = IndexSet::new(vec![3, 1], 3).unwrap();
        assert_eq!(s.members(), &[1, 3]);
        assert_eq!(s.complement(3).members(), &[2]);
    }

    #[test]
    fn op_norm_of_identity() {
        let n = ComplexMatrix::identity(4).op_norm_est();
        assert!((n - 1.0).abs() < 1e-9);
    }
}
