//! C ABI for the `abinv` invariant calculators.
//!
//! The interface follows a handle-and-JSON pattern: callers parse a manifold
//! description once into an opaque [`AbinvManifold`] handle, query it with
//! the evaluation functions, and receive results as heap-allocated JSON
//! strings with the same envelopes the command-line tool prints.  Every
//! string returned through an out-parameter must be released with
//! [`abinv_string_free`], and every handle with [`abinv_manifold_free`].
//!
//! Status codes mirror the command-line exit taxonomy; when a call fails,
//! the structured error object is retrievable with [`abinv_last_error_json`]
//! until the next failing call on the same thread.  All entry points catch
//! panics and convert them to [`AbinvStatus::InternalError`]; none of them
//! unwind across the boundary.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use abinv::cli::{
    api_homology, api_invariant, api_parse_manifold, api_verify, InvariantKind, Suite,
};
use abinv::manifolds::ManifoldPresentation;
use abinv::rt::Normalization;

/// Result of every fallible call, mirroring the command-line exit codes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AbinvStatus {
    /// The call succeeded; out-parameters are populated.
    Ok = 0,
    /// A verification suite ran to completion and some check failed; the
    /// JSON report is still written to the out-parameter.
    VerificationFailed = 1,
    /// The manifold description or a parameter could not be parsed.
    ParseError = 2,
    /// The input violates a documented invariant (including brute-force
    /// enumeration caps).
    InputError = 3,
    /// The presentation does not carry the data this computation needs.
    UnsupportedPresentation = 4,
    /// No invariant of the requested kind exists at the requested level.
    NoInvariantAtLevel = 5,
    /// A required pointer argument was null, or a string was not UTF-8.
    NullArgument = 6,
    /// An internal panic was caught; this is a bug in the library.
    InternalError = 7,
}

/// Invariant families accepted by [`abinv_invariant`].
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AbinvInvariant {
    /// Chiral partition function; `parameter` is the coupling `k >= 1`.
    ChiralPartition = 0,
    /// Doubled partition function; `parameter` is the coupling `k >= 1`.
    DoubledPartition = 1,
    /// Surgery invariant; `parameter` is the level `N >= 1`.
    SurgeryInvariant = 2,
    /// State sum; `parameter` is the level `n >= 1`.
    StateSum = 3,
}

/// Prefactor convention for the surgery invariant.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AbinvNormalization {
    /// Reduced normalization: unit on the standard sphere, blow-up stable.
    Reduced = 0,
    /// Literal surgery formula with the full Gauss-sum prefactor.
    Raw = 1,
}

/// Verification suites accepted by [`abinv_verify`].
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AbinvSuite {
    /// Partition-function identities over a lens-space grid.
    PartitionIdentities = 0,
    /// Surgery invariant vs the rescaled chiral partition function.
    SurgeryVsPartition = 1,
    /// State sum vs cohomology count vs doubled partition function.
    StateSumVsCohomology = 2,
    /// Braiding/twist/duality axioms of the cyclic label categories.
    RibbonAxioms = 3,
    /// Blow-up stability of the surgery invariant.
    BlowupStability = 4,
}

/// Opaque manifold handle; create with [`abinv_manifold_parse`], release
/// with [`abinv_manifold_free`].
pub struct AbinvManifold {
    inner: ManifoldPresentation,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn remember_error(json: String) {
    let stored = CString::new(json).unwrap_or_default();
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(stored));
}

fn status_from_exit(exit: i32) -> AbinvStatus {
    match exit {
        0 => AbinvStatus::Ok,
        1 => AbinvStatus::VerificationFailed,
        2 => AbinvStatus::ParseError,
        3 => AbinvStatus::InputError,
        4 => AbinvStatus::UnsupportedPresentation,
        5 => AbinvStatus::NoInvariantAtLevel,
        _ => AbinvStatus::InternalError,
    }
}

/// Runs `body` with panics converted to `InternalError`.
fn guarded(body: impl FnOnce() -> AbinvStatus) -> AbinvStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(status) => status,
        Err(_) => {
            remember_error(
                "{\"error\":{\"exit\":7,\"kind\":\"panic\",\"message\":\"internal panic\"}}"
                    .to_string(),
            );
            AbinvStatus::InternalError
        }
    }
}

/// Writes `json` to `*out` as a heap-allocated C string.
///
/// # Safety
/// `out` must be a valid pointer to writable storage for one pointer.
unsafe fn write_out(out: *mut *mut c_char, json: String) {
    let c = CString::new(json).unwrap_or_default();
    unsafe { *out = c.into_raw() };
}

/// Parses a manifold description — a well-known name (`s3`, `s1xs2`, `rp3`,
/// `rp3-heegaard`, `lens(p,q)`), inline JSON, or a path to a JSON file —
/// into a fresh handle written to `*out_manifold`.
///
/// # Safety
/// `spec` must point to a NUL-terminated string and `out_manifold` to
/// writable storage for one pointer; both must stay valid for the call.
#[no_mangle]
pub unsafe extern "C" fn abinv_manifold_parse(
    spec: *const c_char,
    out_manifold: *mut *mut AbinvManifold,
) -> AbinvStatus {
    if spec.is_null() || out_manifold.is_null() {
        return AbinvStatus::NullArgument;
    }
    let text = match unsafe { CStr::from_ptr(spec) }.to_str() {
        Ok(text) => text,
        Err(_) => return AbinvStatus::NullArgument,
    };
    guarded(|| match api_parse_manifold(text) {
        Ok(manifold) => {
            let handle = Box::new(AbinvManifold { inner: manifold });
            unsafe { *out_manifold = Box::into_raw(handle) };
            AbinvStatus::Ok
        }
        Err((exit, error_json)) => {
            remember_error(error_json);
            status_from_exit(exit)
        }
    })
}

/// Releases a handle returned by [`abinv_manifold_parse`]; a null pointer
/// is ignored.
///
/// # Safety
/// `manifold` must be null or a pointer previously returned by
/// [`abinv_manifold_parse`] that has not been freed already.
#[no_mangle]
pub unsafe extern "C" fn abinv_manifold_free(manifold: *mut AbinvManifold) {
    if !manifold.is_null() {
        drop(unsafe { Box::from_raw(manifold) });
    }
}

/// Writes the homology summary of the manifold (first Betti number, torsion
/// chain, linking pairing when available) to `*out_json`.
///
/// # Safety
/// `manifold` must be a live handle from [`abinv_manifold_parse`] and
/// `out_json` writable storage for one pointer.
#[no_mangle]
pub unsafe extern "C" fn abinv_homology(
    manifold: *const AbinvManifold,
    out_json: *mut *mut c_char,
) -> AbinvStatus {
    if manifold.is_null() || out_json.is_null() {
        return AbinvStatus::NullArgument;
    }
    let presentation = unsafe { &(*manifold).inner };
    guarded(|| {
        let (exit, json) = api_homology(presentation);
        deliver(exit, json, out_json)
    })
}

/// Evaluates one invariant of the manifold and writes the JSON envelope
/// (value, closed forms, cross-checks) to `*out_json`.  `parameter` is the
/// coupling for the partition functions and the level otherwise;
/// `normalization` only affects the surgery invariant.
///
/// # Safety
/// `manifold` must be a live handle from [`abinv_manifold_parse`] and
/// `out_json` writable storage for one pointer.
#[no_mangle]
pub unsafe extern "C" fn abinv_invariant(
    manifold: *const AbinvManifold,
    which: AbinvInvariant,
    parameter: u64,
    normalization: AbinvNormalization,
    out_json: *mut *mut c_char,
) -> AbinvStatus {
    if manifold.is_null() || out_json.is_null() {
        return AbinvStatus::NullArgument;
    }
    let presentation = unsafe { &(*manifold).inner };
    let kind = match which {
        AbinvInvariant::ChiralPartition => InvariantKind::Cs,
        AbinvInvariant::DoubledPartition => InvariantKind::Bf,
        AbinvInvariant::SurgeryInvariant => InvariantKind::Rt,
        AbinvInvariant::StateSum => InvariantKind::Tv,
    };
    guarded(|| {
        let (exit, json) = api_invariant(presentation, kind, parameter, convert(normalization));
        deliver(exit, json, out_json)
    })
}

/// Runs a verification suite and writes its JSON report to `*out_json`.
/// `manifold` may be null to use the suite's default fixtures; `pmax`,
/// `kmax`, and `nmax` bound the generated parameter grids (values at or
/// below zero select the defaults 6 / 6 / 12).  Returns `Ok` when every
/// check passed and `VerificationFailed` — with the report still written —
/// when the suite ran and some check failed.
///
/// # Safety
/// `manifold` must be null or a live handle from [`abinv_manifold_parse`],
/// and `out_json` writable storage for one pointer.
#[no_mangle]
pub unsafe extern "C" fn abinv_verify(
    suite: AbinvSuite,
    manifold: *const AbinvManifold,
    pmax: i64,
    kmax: i64,
    nmax: i64,
    normalization: AbinvNormalization,
    out_json: *mut *mut c_char,
) -> AbinvStatus {
    if out_json.is_null() {
        return AbinvStatus::NullArgument;
    }
    let presentation = if manifold.is_null() {
        None
    } else {
        Some(unsafe { &(*manifold).inner })
    };
    let suite = match suite {
        AbinvSuite::PartitionIdentities => Suite::Lemma2,
        AbinvSuite::SurgeryVsPartition => Suite::Lemma3Rt,
        AbinvSuite::StateSumVsCohomology => Suite::Lemma3Tv,
        AbinvSuite::RibbonAxioms => Suite::Ribbon,
        AbinvSuite::BlowupStability => Suite::Kirby,
    };
    let pmax = if pmax > 0 { pmax } else { 6 };
    let kmax = if kmax > 0 { kmax as u64 } else { 6 };
    let nmax = if nmax > 0 { nmax as u64 } else { 12 };
    guarded(|| {
        let (exit, json) = api_verify(
            suite,
            presentation,
            pmax,
            kmax,
            nmax,
            convert(normalization),
        );
        deliver(exit, json, out_json)
    })
}

fn convert(normalization: AbinvNormalization) -> Normalization {
    match normalization {
        AbinvNormalization::Reduced => Normalization::Moo,
        AbinvNormalization::Raw => Normalization::Raw,
    }
}

/// Routes a `(status, json)` pair: results go to the out-parameter, error
/// objects to the thread-local error slot.
fn deliver(exit: i32, json: String, out_json: *mut *mut c_char) -> AbinvStatus {
    let status = status_from_exit(exit);
    match status {
        AbinvStatus::Ok | AbinvStatus::VerificationFailed => {
            unsafe { write_out(out_json, json) };
        }
        _ => remember_error(json),
    }
    status
}

/// The structured error object of the most recent failing call on this
/// thread, or null if no call has failed yet.  The pointer stays valid
/// until the next failing call on the same thread; do not free it.
#[no_mangle]
pub extern "C" fn abinv_last_error_json() -> *const c_char {
    LAST_ERROR.with(|slot| {
        slot.borrow()
            .as_ref()
            .map_or(std::ptr::null(), |text| text.as_ptr())
    })
}

/// Releases a string written to an out-parameter by this library; a null
/// pointer is ignored.
///
/// # Safety
/// `text` must be null or a pointer received through an out-parameter of
/// this library that has not been freed already.
#[no_mangle]
pub unsafe extern "C" fn abinv_string_free(text: *mut c_char) {
    if !text.is_null() {
        drop(unsafe { CString::from_raw(text) });
    }
}
