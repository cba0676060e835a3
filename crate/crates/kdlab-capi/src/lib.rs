//! C ABI over the kdlab core: opaque handles for matrices and states,
//! integer status codes, JSON/CSV strings for structured data, and a
//! thread-local last-error message.
//!
//! Ownership rules: every `*mut KdlabMatrix` / `*mut KdlabState` returned
//! through an out-parameter is owned by the caller and released with the
//! matching `_free`; every `char*` out-parameter is released with
//! `kdlab_string_free`. Pointers returned by `kdlab_last_error_message` and
//! `kdlab_status_name` are borrowed and must not be freed.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use kdlab::bases::{self, TransitionMatrix, U6Variant};
use kdlab::coinc::{hierarchy, is_coinc, uncertainty_diagram};
use kdlab::kd::{
    is_kd_classical, kd_distribution, support_profile, witness, StateVector, WitnessOutcome,
    WitnessRule,
};
use kdlab::perturb::{coincify, near_mub_coinc_traced};
use kdlab::wire;
use kdlab::{C64, Error, Tolerance};

/// Result of every fallible call. Zero is success; anything else is a
/// failure whose detail text is available from kdlab_last_error_message().
#[repr(C)]
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum KdlabStatus {
    Ok = 0,
    /// A required pointer argument was null.
    NullArgument = 1,
    /// A string argument was not valid UTF-8.
    InvalidUtf8 = 2,
    /// Malformed JSON or an unknown generator name.
    ParseError = 3,
    /// Dimensions of the arguments do not line up.
    DimensionError = 4,
    /// An index was out of range.
    BoundsError = 5,
    /// Input violated a documented precondition (non-unitary matrix,
    /// non-normalized state, bad tolerance, ...).
    ValidationError = 6,
    /// A combinatorial size cap was exceeded.
    SizeCapError = 7,
    /// A check was invoked on input that does not satisfy its hypotheses.
    Inapplicable = 8,
    /// Requested a state from a zero-dimensional subspace.
    NoState = 9,
    /// A support profile could not be realized exactly.
    DegenerateSupport = 10,
    /// A numerical procedure failed.
    NumericalError = 11,
    /// An iterative schedule ran out of budget.
    ConvergenceError = 12,
    /// Filesystem failure.
    IoError = 13,
    /// An internal invariant was violated (library bug).
    InternalPanic = 14,
}

/// Opaque handle to a validated transition matrix between two bases.
pub struct KdlabMatrix {
    inner: TransitionMatrix,
}

/// Opaque handle to a normalized pure state.
pub struct KdlabState {
    inner: StateVector,
}

/// Entry-magnitude statistics of a transition matrix.
#[repr(C)]
pub struct KdlabBasisStats {
    /// Smallest entry magnitude.
    pub min_mag: f64,
    /// Largest entry magnitude.
    pub max_mag: f64,
    /// Number of entries treated as zero.
    pub zeros: usize,
    /// Largest total zero count over any two distinct rows.
    pub zeros_two_rows: usize,
    /// Largest total zero count over any two distinct columns.
    pub zeros_two_cols: usize,
}

/// The four-level incompatibility hierarchy of a basis pair. Index masks
/// use bit i-1 for basis vector i.
#[repr(C)]
pub struct KdlabHierarchy {
    /// No minor of the transition matrix vanishes.
    pub coinc: bool,
    /// No pair of subset projectors commutes.
    pub all_projectors_noncommute: bool,
    /// Every transition magnitude is positive.
    pub m_positive: bool,
    /// Every transition magnitude is below one.
    pub max_below_one: bool,
    /// Whether a commuting projector pair was found (sets the masks).
    pub has_commuting_pair: bool,
    /// Row subset S of the first commuting pair, as a bit mask.
    pub commuting_s_mask: u64,
    /// Column subset T of the first commuting pair, as a bit mask.
    pub commuting_t_mask: u64,
}

/// Support profile of a state with respect to the two bases.
#[repr(C)]
pub struct KdlabSupport {
    /// Number of nonvanishing components in basis A.
    pub n_a: usize,
    /// Number of nonvanishing components in basis B.
    pub n_b: usize,
    /// Support of the state in basis A, as a bit mask.
    pub s_mask: u64,
    /// Support of the state in basis B, as a bit mask.
    pub t_mask: u64,
}

/// Witness outcome: 1 when nonclassicality is certified, 0 when the rules
/// are inconclusive.
pub const KDLAB_WITNESS_INCONCLUSIVE: i32 = 0;
pub const KDLAB_WITNESS_NONCLASSICAL: i32 = 1;

/// Witness rules, for the `rule` out-parameter of kdlab_witness.
pub const KDLAB_RULE_NONE: i32 = 0;
pub const KDLAB_RULE_SPARSE_ZEROS: i32 = 1;
pub const KDLAB_RULE_SUPPORT_OVER_ZEROS: i32 = 2;
pub const KDLAB_RULE_THREE_HALVES_SUPPORT: i32 = 3;

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(message: &str) {
    let sanitized = message.replace('\0', " ");
    LAST_ERROR.with(|slot| {
        *slot.borrow_mut() = CString::new(sanitized).unwrap_or_default();
    });
}

fn failure(status: KdlabStatus, message: &str) -> KdlabStatus {
    set_error(message);
    status
}

fn status_of(e: &Error) -> KdlabStatus {
    match e {
        Error::Dimension(_) => KdlabStatus::DimensionError,
        Error::Bounds(_) => KdlabStatus::BoundsError,
        Error::Validation(_) => KdlabStatus::ValidationError,
        Error::SizeCap(_) => KdlabStatus::SizeCapError,
        Error::Inapplicable(_) => KdlabStatus::Inapplicable,
        Error::NoState(_) => KdlabStatus::NoState,
        Error::DegenerateSupport(_) => KdlabStatus::DegenerateSupport,
        Error::Numerical(_) => KdlabStatus::NumericalError,
        Error::Convergence(_) => KdlabStatus::ConvergenceError,
        Error::Parse(_) => KdlabStatus::ParseError,
        Error::Io(_) => KdlabStatus::IoError,
    }
}

fn lib_error(e: Error) -> KdlabStatus {
    failure(status_of(&e), &e.to_string())
}

/// Run `f` with panics converted to `InternalPanic` and success clearing
/// the error slot.
fn guarded(f: impl FnOnce() -> KdlabStatus) -> KdlabStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(status) => {
            if status == KdlabStatus::Ok {
                set_error("");
            }
            status
        }
        Err(_) => failure(KdlabStatus::InternalPanic, "internal panic"),
    }
}

unsafe fn utf8_arg<'a>(ptr: *const c_char) -> Result<&'a str, KdlabStatus> {
    if ptr.is_null() {
        return Err(failure(KdlabStatus::NullArgument, "null string argument"));
    }
    CStr::from_ptr(ptr)
        .to_str()
        .map_err(|_| failure(KdlabStatus::InvalidUtf8, "string argument is not UTF-8"))
}

fn tolerance(zero_tol: f64, rank_tol: f64) -> Result<Tolerance, KdlabStatus> {
    let zero = if zero_tol > 0.0 { zero_tol } else { 1e-9 };
    let rank = if rank_tol > 0.0 { rank_tol } else { 1e-10 };
    Tolerance::new(zero, rank).map_err(lib_error)
}

fn mask_of(members: &[usize]) -> u64 {
    members.iter().fold(0u64, |acc, &i| acc | 1 << (i - 1))
}

unsafe fn out_string(out: *mut *mut c_char, text: String) -> KdlabStatus {
    match CString::new(text) {
        Ok(c) => {
            *out = c.into_raw();
            KdlabStatus::Ok
        }
        Err(_) => failure(KdlabStatus::InternalPanic, "interior NUL in output"),
    }
}

// ------------------------------------------------------------- lifecycle

/// Parse a matrix from JSON of the form {"d": n, "entries": [[re, im], ...]}
/// (row-major). Tolerances at or below zero select the defaults (1e-9
/// absolute zero threshold, 1e-10 relative rank threshold). On success
/// *out_matrix is owned by the caller.
#[no_mangle]
pub unsafe extern "C" fn kdlab_matrix_parse_json(
    json: *const c_char,
    zero_tol: f64,
    rank_tol: f64,
    out_matrix: *mut *mut KdlabMatrix,
) -> KdlabStatus {
    guarded(|| {
        if out_matrix.is_null() {
            return failure(KdlabStatus::NullArgument, "null out_matrix");
        }
        let text = match utf8_arg(json) {
            Ok(t) => t,
            Err(s) => return s,
        };
        let tol = match tolerance(zero_tol, rank_tol) {
            Ok(t) => t,
            Err(s) => return s,
        };
        let raw = match wire::parse_matrix(text) {
            Ok(m) => m,
            Err(e) => return lib_error(e),
        };
        match TransitionMatrix::new(raw, tol) {
            Ok(t) => {
                *out_matrix = Box::into_raw(Box::new(KdlabMatrix { inner: t }));
                KdlabStatus::Ok
            }
            Err(e) => lib_error(e),
        }
    })
}

/// Construct a catalog matrix: "dft" (uses `d`), "tao", "spin1",
/// "mub4" (uses the unimodular parameter s_re + i s_im; pass 1, 0 for the
/// real member), "u6", "u6p". Other parameters are ignored per name.
#[no_mangle]
pub unsafe extern "C" fn kdlab_matrix_gen(
    name: *const c_char,
    d: usize,
    s_re: f64,
    s_im: f64,
    out_matrix: *mut *mut KdlabMatrix,
) -> KdlabStatus {
    guarded(|| {
        if out_matrix.is_null() {
            return failure(KdlabStatus::NullArgument, "null out_matrix");
        }
        let name = match utf8_arg(name) {
            Ok(n) => n,
            Err(s) => return s,
        };
        let built = match name {
            "dft" => bases::dft(d),
            "tao" => Ok(bases::tao()),
            "spin1" => Ok(bases::spin1()),
            "mub4" => bases::mub4(C64::new(s_re, s_im)),
            "u6" => Ok(bases::u6(U6Variant::Plain)),
            "u6p" => Ok(bases::u6(U6Variant::Primed)),
            other => Err(Error::Parse(format!(
                "unknown matrix name {other:?} (expected dft, tao, spin1, mub4, u6, u6p)"
            ))),
        };
        match built {
            Ok(t) => {
                *out_matrix = Box::into_raw(Box::new(KdlabMatrix { inner: t }));
                KdlabStatus::Ok
            }
            Err(e) => lib_error(e),
        }
    })
}

/// Release a matrix handle. Null is a no-op.
#[no_mangle]
pub unsafe extern "C" fn kdlab_matrix_free(matrix: *mut KdlabMatrix) {
    if !matrix.is_null() {
        drop(Box::from_raw(matrix));
    }
}

/// Dimension of the matrix; 0 when the handle is null.
#[no_mangle]
pub unsafe extern "C" fn kdlab_matrix_dim(matrix: *const KdlabMatrix) -> usize {
    if matrix.is_null() {
        0
    } else {
        (*matrix).inner.d()
    }
}

/// Read one entry (0-based indices).
#[no_mangle]
pub unsafe extern "C" fn kdlab_matrix_entry(
    matrix: *const KdlabMatrix,
    row: usize,
    col: usize,
    out_re: *mut f64,
    out_im: *mut f64,
) -> KdlabStatus {
    guarded(|| {
        if matrix.is_null() || out_re.is_null() || out_im.is_null() {
            return failure(KdlabStatus::NullArgument, "null argument");
        }
        let t = &(*matrix).inner;
        if row >= t.d() || col >= t.d() {
            return failure(
                KdlabStatus::BoundsError,
                &format!("entry ({row}, {col}) outside a {0} x {0} matrix", t.d()),
            );
        }
        let z = t.at(row, col);
        *out_re = z.re;
        *out_im = z.im;
        KdlabStatus::Ok
    })
}

/// Serialize the matrix to JSON. The string is owned by the caller
/// (release with kdlab_string_free).
#[no_mangle]
pub unsafe extern "C" fn kdlab_matrix_to_json(
    matrix: *const KdlabMatrix,
    out_json: *mut *mut c_char,
) -> KdlabStatus {
    guarded(|| {
        if matrix.is_null() || out_json.is_null() {
            return failure(KdlabStatus::NullArgument, "null argument");
        }
        out_string(out_json, wire::matrix_json((*matrix).inner.matrix()))
    })
}

/// Entry-magnitude statistics.
#[no_mangle]
pub unsafe extern "C" fn kdlab_matrix_stats(
    matrix: *const KdlabMatrix,
    out_stats: *mut KdlabBasisStats,
) -> KdlabStatus {
    guarded(|| {
        if matrix.is_null() || out_stats.is_null() {
            return failure(KdlabStatus::NullArgument, "null argument");
        }
        let s = bases::stats(&(*matrix).inner);
        *out_stats = KdlabBasisStats {
            min_mag: s.min_mag,
            max_mag: s.max_mag,
            zeros: s.zeros,
            zeros_two_rows: s.zeros_two_rows,
            zeros_two_cols: s.zeros_two_cols,
        };
        KdlabStatus::Ok
    })
}

/// Parse a state from JSON of the form {"d": n, "u": [[re, im], ...]}
/// (components in basis A; must be normalized). zero_tol at or below zero
/// selects the default 1e-9.
#[no_mangle]
pub unsafe extern "C" fn kdlab_state_parse_json(
    json: *const c_char,
    zero_tol: f64,
    out_state: *mut *mut KdlabState,
) -> KdlabStatus {
    guarded(|| {
        if out_state.is_null() {
            return failure(KdlabStatus::NullArgument, "null out_state");
        }
        let text = match utf8_arg(json) {
            Ok(t) => t,
            Err(s) => return s,
        };
        let tol = if zero_tol > 0.0 { zero_tol } else { 1e-9 };
        match wire::parse_state(text, tol) {
            Ok(psi) => {
                *out_state = Box::into_raw(Box::new(KdlabState { inner: psi }));
                KdlabStatus::Ok
            }
            Err(e) => lib_error(e),
        }
    })
}

/// Release a state handle. Null is a no-op.
#[no_mangle]
pub unsafe extern "C" fn kdlab_state_free(state: *mut KdlabState) {
    if !state.is_null() {
        drop(Box::from_raw(state));
    }
}

/// Dimension of the state; 0 when the handle is null.
#[no_mangle]
pub unsafe extern "C" fn kdlab_state_dim(state: *const KdlabState) -> usize {
    if state.is_null() {
        0
    } else {
        (*state).inner.d()
    }
}

/// Release a string returned through a char** out-parameter. Null is a
/// no-op.
#[no_mangle]
pub unsafe extern "C" fn kdlab_string_free(text: *mut c_char) {
    if !text.is_null() {
        drop(CString::from_raw(text));
    }
}

// -------------------------------------------------------------- analysis

/// Decide complete incompatibility: true exactly when no minor of the
/// transition matrix vanishes.
#[no_mangle]
pub unsafe extern "C" fn kdlab_matrix_is_coinc(
    matrix: *const KdlabMatrix,
    out_coinc: *mut bool,
) -> KdlabStatus {
    guarded(|| {
        if matrix.is_null() || out_coinc.is_null() {
            return failure(KdlabStatus::NullArgument, "null argument");
        }
        match is_coinc(&(*matrix).inner) {
            Ok(v) => {
                *out_coinc = v;
                KdlabStatus::Ok
            }
            Err(e) => lib_error(e),
        }
    })
}

/// Evaluate the incompatibility hierarchy.
#[no_mangle]
pub unsafe extern "C" fn kdlab_matrix_hierarchy(
    matrix: *const KdlabMatrix,
    out_hierarchy: *mut KdlabHierarchy,
) -> KdlabStatus {
    guarded(|| {
        if matrix.is_null() || out_hierarchy.is_null() {
            return failure(KdlabStatus::NullArgument, "null argument");
        }
        match hierarchy(&(*matrix).inner) {
            Ok(h) => {
                let (has_pair, s_mask, t_mask) = match &h.first_commuting_pair {
                    Some((s, t)) => (true, mask_of(s.members()), mask_of(t.members())),
                    None => (false, 0, 0),
                };
                *out_hierarchy = KdlabHierarchy {
                    coinc: h.coinc,
                    all_projectors_noncommute: h.all_projectors_noncommute,
                    m_positive: h.m_positive,
                    max_below_one: h.max_below_one,
                    has_commuting_pair: has_pair,
                    commuting_s_mask: s_mask,
                    commuting_t_mask: t_mask,
                };
                KdlabStatus::Ok
            }
            Err(e) => lib_error(e),
        }
    })
}

/// Compute the exact support-uncertainty diagram and return it as CSV with
/// header n_a,n_b,member,max_dim (release with kdlab_string_free).
#[no_mangle]
pub unsafe extern "C" fn kdlab_matrix_diagram_csv(
    matrix: *const KdlabMatrix,
    out_csv: *mut *mut c_char,
) -> KdlabStatus {
    guarded(|| {
        if matrix.is_null() || out_csv.is_null() {
            return failure(KdlabStatus::NullArgument, "null argument");
        }
        match uncertainty_diagram(&(*matrix).inner) {
            Ok(diag) => out_string(out_csv, wire::diagram_csv(&diag)),
            Err(e) => lib_error(e),
        }
    })
}

/// Decide whether the state's Kirkwood-Dirac distribution is classical
/// (real and nonnegative everywhere).
#[no_mangle]
pub unsafe extern "C" fn kdlab_kd_classical(
    matrix: *const KdlabMatrix,
    state: *const KdlabState,
    out_classical: *mut bool,
) -> KdlabStatus {
    guarded(|| {
        if matrix.is_null() || state.is_null() || out_classical.is_null() {
            return failure(KdlabStatus::NullArgument, "null argument");
        }
        match is_kd_classical(&(*matrix).inner, &(*state).inner) {
            Ok(v) => {
                *out_classical = v;
                KdlabStatus::Ok
            }
            Err(e) => lib_error(e),
        }
    })
}

/// Extreme values of the Kirkwood-Dirac distribution: the smallest real
/// part and the largest |imaginary part| over all entries.
#[no_mangle]
pub unsafe extern "C" fn kdlab_kd_extremes(
    matrix: *const KdlabMatrix,
    state: *const KdlabState,
    out_min_real: *mut f64,
    out_max_abs_imag: *mut f64,
) -> KdlabStatus {
    guarded(|| {
        if matrix.is_null() || state.is_null() || out_min_real.is_null() || out_max_abs_imag.is_null()
        {
            return failure(KdlabStatus::NullArgument, "null argument");
        }
        match kd_distribution(&(*matrix).inner, &(*state).inner) {
            Ok(kd) => {
                *out_min_real = kd.min_real;
                *out_max_abs_imag = kd.max_abs_imag;
                KdlabStatus::Ok
            }
            Err(e) => lib_error(e),
        }
    })
}

/// Support profile of the state in the two bases.
#[no_mangle]
pub unsafe extern "C" fn kdlab_support_profile(
    matrix: *const KdlabMatrix,
    state: *const KdlabState,
    out_support: *mut KdlabSupport,
) -> KdlabStatus {
    guarded(|| {
        if matrix.is_null() || state.is_null() || out_support.is_null() {
            return failure(KdlabStatus::NullArgument, "null argument");
        }
        match support_profile(&(*matrix).inner, &(*state).inner) {
            Ok(p) => {
                *out_support = KdlabSupport {
                    n_a: p.n_a,
                    n_b: p.n_b,
                    s_mask: mask_of(p.s.members()),
                    t_mask: mask_of(p.t.members()),
                };
                KdlabStatus::Ok
            }
            Err(e) => lib_error(e),
        }
    })
}

/// Run the nonclassicality witnesses. out_outcome receives
/// KDLAB_WITNESS_NONCLASSICAL or KDLAB_WITNESS_INCONCLUSIVE; out_rule
/// receives the KDLAB_RULE_* constant of the rule that fired.
#[no_mangle]
pub unsafe extern "C" fn kdlab_witness(
    matrix: *const KdlabMatrix,
    state: *const KdlabState,
    out_outcome: *mut i32,
    out_rule: *mut i32,
) -> KdlabStatus {
    guarded(|| {
        if matrix.is_null() || state.is_null() || out_outcome.is_null() || out_rule.is_null() {
            return failure(KdlabStatus::NullArgument, "null argument");
        }
        match witness(&(*matrix).inner, &(*state).inner) {
            Ok(w) => {
                *out_outcome = match w.outcome {
                    WitnessOutcome::Nonclassical => KDLAB_WITNESS_NONCLASSICAL,
                    WitnessOutcome::Inconclusive => KDLAB_WITNESS_INCONCLUSIVE,
                };
                *out_rule = match w.rule {
                    Some(WitnessRule::SparseZeros) => KDLAB_RULE_SPARSE_ZEROS,
                    Some(WitnessRule::SupportOverZeros) => KDLAB_RULE_SUPPORT_OVER_ZEROS,
                    Some(WitnessRule::ThreeHalvesSupport) => KDLAB_RULE_THREE_HALVES_SUPPORT,
                    None => KDLAB_RULE_NONE,
                };
                KdlabStatus::Ok
            }
            Err(e) => lib_error(e),
        }
    })
}

// ---------------------------------------------------------- perturbation

/// Perturb a basis pair into a completely incompatible one with per-round
/// angle budget eps. On success *out_matrix is the repaired matrix and
/// *out_deviation the operator-norm distance of the applied rotation from
/// the identity.
#[no_mangle]
pub unsafe extern "C" fn kdlab_coincify(
    matrix: *const KdlabMatrix,
    eps: f64,
    out_matrix: *mut *mut KdlabMatrix,
    out_deviation: *mut f64,
) -> KdlabStatus {
    guarded(|| {
        if matrix.is_null() || out_matrix.is_null() || out_deviation.is_null() {
            return failure(KdlabStatus::NullArgument, "null argument");
        }
        match coincify(&(*matrix).inner, eps) {
            Ok((fixed, trace)) => {
                *out_matrix = Box::into_raw(Box::new(KdlabMatrix { inner: fixed }));
                *out_deviation = trace.total_deviation;
                KdlabStatus::Ok
            }
            Err(e) => lib_error(e),
        }
    })
}

/// Build a completely incompatible basis pair within delta of mutual
/// unbiasedness in dimension d.
#[no_mangle]
pub unsafe extern "C" fn kdlab_near_mub_coinc(
    d: usize,
    delta: f64,
    out_matrix: *mut *mut KdlabMatrix,
) -> KdlabStatus {
    guarded(|| {
        if out_matrix.is_null() {
            return failure(KdlabStatus::NullArgument, "null out_matrix");
        }
        match near_mub_coinc_traced(d, delta) {
            Ok((t, _, _)) => {
                *out_matrix = Box::into_raw(Box::new(KdlabMatrix { inner: t }));
                KdlabStatus::Ok
            }
            Err(e) => lib_error(e),
        }
    })
}

// ------------------------------------------------------------ diagnostics

/// Detail text of the most recent failure on this thread. Borrowed; valid
/// until the next kdlab call on the same thread. Empty after a success.
#[no_mangle]
pub unsafe extern "C" fn kdlab_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ptr())
}

/// Static name of a status code.
#[no_mangle]
pub extern "C" fn kdlab_status_name(status: KdlabStatus) -> *const c_char {
    let name: &'static [u8] = match status {
        KdlabStatus::Ok => b"ok\0",
        KdlabStatus::NullArgument => b"null argument\0",
        KdlabStatus::InvalidUtf8 => b"invalid utf-8\0",
        KdlabStatus::ParseError => b"parse error\0",
        KdlabStatus::DimensionError => b"dimension error\0",
        KdlabStatus::BoundsError => b"bounds error\0",
        KdlabStatus::ValidationError => b"validation error\0",
        KdlabStatus::SizeCapError => b"size cap exceeded\0",
        KdlabStatus::Inapplicable => b"inapplicable\0",
        KdlabStatus::NoState => b"no state\0",
        KdlabStatus::DegenerateSupport => b"degenerate support\0",
        KdlabStatus::NumericalError => b"numerical failure\0",
        KdlabStatus::ConvergenceError => b"convergence failure\0",
        KdlabStatus::IoError => b"io error\0",
        KdlabStatus::InternalPanic => b"internal panic\0",
    };
    name.as_ptr() as *const c_char
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn kdlab_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}
