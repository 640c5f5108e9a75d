//! C ABI for the fcatax concept-lattice library.
//!
//! Every object crossing the boundary is an opaque handle created and
//! released by an `fca_*` pair, every fallible call returns an
//! [`FcaStatus`], and panics are caught at the boundary. On failure a
//! human-readable message is stashed per thread and can be fetched
//! with [`fca_last_error_message`]. Strings returned through `char **`
//! out-parameters are owned by the caller and must be released with
//! [`fca_string_free`].
//!
//! The matching header, `include/fcatax.h`, is regenerated by the
//! build script.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use fcatax::error::Error;
use fcatax::export::{lattice_to_json, selection_to_dot, selection_to_json, stability_to_json};
use fcatax::lattice::{ConceptLattice, LatticeOptions};
use fcatax::selection::{
    iceberg_filter, stability_threshold_filter, top_k_extent, top_k_stability, SelectionResult,
};
use fcatax::stability::{stability_all, StabilityReport};
use fcatax::FormalContext;

/// Result of every fallible call in this ABI.
#[repr(C)]
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum FcaStatus {
    /// The call succeeded.
    FcaOk = 0,
    /// A pointer was null, an index out of range, or text not UTF-8.
    FcaInvalidArgument = 1,
    /// The input could not be parsed.
    FcaParseError = 2,
    /// The operation produced an empty result.
    FcaEmptyResult = 3,
    /// The concept limit was exceeded.
    FcaCapacityExceeded = 4,
    /// An internal consistency check failed.
    FcaInconsistent = 5,
    /// An underlying I/O operation failed.
    FcaIoError = 6,
    /// The library panicked; the handle states are unspecified.
    FcaPanic = 7,
}

/// A formal context (objects, attributes, incidence).
pub struct FcaContext(FormalContext);

/// A fully enumerated concept lattice with its cover graph.
pub struct FcaLattice(ConceptLattice);

/// Stability indices for every concept of a lattice.
pub struct FcaStability(StabilityReport);

/// A selected sub-family of concepts with its induced order.
pub struct FcaSelection(SelectionResult);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(message: &str) {
    let sanitized = message.replace('\0', " ");
    LAST_ERROR.with(|slot| {
        *slot.borrow_mut() = CString::new(sanitized).expect("NUL bytes stripped");
    });
}

fn status_of(e: &Error) -> FcaStatus {
    match e {
        Error::EmptyContext => FcaStatus::FcaEmptyResult,
        Error::CapacityExceeded { .. } => FcaStatus::FcaCapacityExceeded,
        Error::InconsistentConceptSet(_) | Error::MismatchedLattice { .. } => {
            FcaStatus::FcaInconsistent
        }
        Error::Io(_) => FcaStatus::FcaIoError,
        Error::UnknownConceptId(_) | Error::IndexOutOfRange { .. } => {
            FcaStatus::FcaInvalidArgument
        }
        _ => FcaStatus::FcaParseError,
    }
}

fn fail(e: &Error) -> FcaStatus {
    set_error(&e.to_string());
    status_of(e)
}

/// Runs `f` with panics converted to `FcaPanic`.
fn guarded(f: impl FnOnce() -> FcaStatus) -> FcaStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(status) => status,
        Err(_) => {
            set_error("panic inside fcatax");
            FcaStatus::FcaPanic
        }
    }
}

/// Checks an out-pointer and resets it; null yields the given status.
macro_rules! out_param {
    ($ptr:expr, $null:expr) => {{
        let p = $ptr;
        if p.is_null() {
            set_error("out-parameter is null");
            return FcaStatus::FcaInvalidArgument;
        }
        unsafe { p.write($null) };
        p
    }};
}

macro_rules! non_null {
    ($ptr:expr) => {{
        let p = $ptr;
        if p.is_null() {
            set_error(concat!(stringify!($ptr), " is null"));
            return FcaStatus::FcaInvalidArgument;
        }
        unsafe { &*p }
    }};
}

fn utf8_arg<'a>(ptr: *const c_char, what: &str) -> Result<&'a str, FcaStatus> {
    if ptr.is_null() {
        set_error(&format!("{what} is null"));
        return Err(FcaStatus::FcaInvalidArgument);
    }
    unsafe { CStr::from_ptr(ptr) }.to_str().map_err(|_| {
        set_error(&format!("{what} is not valid UTF-8"));
        FcaStatus::FcaInvalidArgument
    })
}

fn give_string(text: String, out: *mut *mut c_char) -> FcaStatus {
    match CString::new(text) {
        Ok(c) => {
            unsafe { out.write(c.into_raw()) };
            FcaStatus::FcaOk
        }
        Err(_) => {
            set_error("output contains a NUL byte");
            FcaStatus::FcaInvalidArgument
        }
    }
}

/// Returns the message of the most recent failure on this thread, or
/// an empty string. The pointer stays valid until the next failing
/// call on the same thread.
#[no_mangle]
pub extern "C" fn fca_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ptr())
}

/// Releases a string returned by this library. Null is a no-op.
///
/// # Safety
/// `s` must have been returned by an fcatax call and not yet freed.
#[no_mangle]
pub unsafe extern "C" fn fca_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(unsafe { CString::from_raw(s) });
    }
}

/// Parses a context from CXT-format text.
///
/// # Safety
/// `text` must be a NUL-terminated string; `out` must be a valid
/// pointer.
#[no_mangle]
pub unsafe extern "C" fn fca_context_parse_cxt(
    text: *const c_char,
    out: *mut *mut FcaContext,
) -> FcaStatus {
    guarded(|| {
        let out = out_param!(out, ptr::null_mut());
        let text = match utf8_arg(text, "text") {
            Ok(t) => t,
            Err(status) => return status,
        };
        match fcatax::io::read_cxt(&mut text.as_bytes()) {
            Ok(ctx) => {
                unsafe { out.write(Box::into_raw(Box::new(FcaContext(ctx)))) };
                FcaStatus::FcaOk
            }
            Err(e) => fail(&e),
        }
    })
}

/// Reads a context from a CXT file on disk.
///
/// # Safety
/// `path` must be a NUL-terminated string; `out` must be a valid
/// pointer.
#[no_mangle]
pub unsafe extern "C" fn fca_context_read_cxt_file(
    path: *const c_char,
    out: *mut *mut FcaContext,
) -> FcaStatus {
    guarded(|| {
        let out = out_param!(out, ptr::null_mut());
        let path = match utf8_arg(path, "path") {
            Ok(p) => p,
            Err(status) => return status,
        };
        match fcatax::io::read_cxt_file(path) {
            Ok(ctx) => {
                unsafe { out.write(Box::into_raw(Box::new(FcaContext(ctx)))) };
                FcaStatus::FcaOk
            }
            Err(e) => fail(&e),
        }
    })
}

/// Number of objects in the context; 0 if `ctx` is null.
///
/// # Safety
/// `ctx` must be a live context handle or null.
#[no_mangle]
pub unsafe extern "C" fn fca_context_object_count(ctx: *const FcaContext) -> usize {
    if ctx.is_null() {
        return 0;
    }
    unsafe { &*ctx }.0.object_count()
}

/// Number of attributes in the context; 0 if `ctx` is null.
///
/// # Safety
/// `ctx` must be a live context handle or null.
#[no_mangle]
pub unsafe extern "C" fn fca_context_attribute_count(ctx: *const FcaContext) -> usize {
    if ctx.is_null() {
        return 0;
    }
    unsafe { &*ctx }.0.attribute_count()
}

/// Releases a context handle. Null is a no-op.
///
/// # Safety
/// `ctx` must be a live context handle or null; it must not be used
/// afterwards.
#[no_mangle]
pub unsafe extern "C" fn fca_context_free(ctx: *mut FcaContext) {
    if !ctx.is_null() {
        drop(unsafe { Box::from_raw(ctx) });
    }
}

/// Enumerates all concepts and the cover graph. `max_concepts` of 0
/// means the default limit.
///
/// # Safety
/// `ctx` must be a live context handle; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn fca_lattice_build(
    ctx: *const FcaContext,
    max_concepts: usize,
    out: *mut *mut FcaLattice,
) -> FcaStatus {
    guarded(|| {
        let out = out_param!(out, ptr::null_mut());
        let ctx = non_null!(ctx);
        let options = LatticeOptions {
            max_concepts: if max_concepts == 0 {
                LatticeOptions::default().max_concepts
            } else {
                max_concepts
            },
        };
        match ConceptLattice::from_context_with(&ctx.0, &options) {
            Ok(lat) => {
                unsafe { out.write(Box::into_raw(Box::new(FcaLattice(lat)))) };
                FcaStatus::FcaOk
            }
            Err(e) => fail(&e),
        }
    })
}

/// Number of concepts in the lattice; 0 if `lat` is null.
///
/// # Safety
/// `lat` must be a live lattice handle or null.
#[no_mangle]
pub unsafe extern "C" fn fca_lattice_concept_count(lat: *const FcaLattice) -> usize {
    if lat.is_null() {
        return 0;
    }
    unsafe { &*lat }.0.len()
}

/// Number of cover edges in the lattice; 0 if `lat` is null.
///
/// # Safety
/// `lat` must be a live lattice handle or null.
#[no_mangle]
pub unsafe extern "C" fn fca_lattice_edge_count(lat: *const FcaLattice) -> usize {
    if lat.is_null() {
        return 0;
    }
    unsafe { &*lat }.0.edge_count()
}

/// Serializes the lattice as JSON with named extents and intents.
///
/// # Safety
/// `ctx` and `lat` must be live handles built from each other; `out`
/// must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn fca_lattice_to_json(
    ctx: *const FcaContext,
    lat: *const FcaLattice,
    out: *mut *mut c_char,
) -> FcaStatus {
    guarded(|| {
        let out = out_param!(out, ptr::null_mut());
        let ctx = non_null!(ctx);
        let lat = non_null!(lat);
        give_string(lattice_to_json(&ctx.0, &lat.0), out)
    })
}

/// Releases a lattice handle. Null is a no-op.
///
/// # Safety
/// `lat` must be a live lattice handle or null; it must not be used
/// afterwards.
#[no_mangle]
pub unsafe extern "C" fn fca_lattice_free(lat: *mut FcaLattice) {
    if !lat.is_null() {
        drop(unsafe { Box::from_raw(lat) });
    }
}

/// Computes the stability index of every concept.
///
/// # Safety
/// `ctx` and `lat` must be live handles built from each other; `out`
/// must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn fca_stability_compute(
    ctx: *const FcaContext,
    lat: *const FcaLattice,
    out: *mut *mut FcaStability,
) -> FcaStatus {
    guarded(|| {
        let out = out_param!(out, ptr::null_mut());
        let ctx = non_null!(ctx);
        let lat = non_null!(lat);
        let report = stability_all(&ctx.0, &lat.0);
        unsafe { out.write(Box::into_raw(Box::new(FcaStability(report)))) };
        FcaStatus::FcaOk
    })
}

/// Fetches the stability index of one concept.
///
/// # Safety
/// `stab` must be a live stability handle; `sigma` must be a valid
/// pointer.
#[no_mangle]
pub unsafe extern "C" fn fca_stability_sigma(
    stab: *const FcaStability,
    concept_id: usize,
    sigma: *mut f64,
) -> FcaStatus {
    guarded(|| {
        let sigma = out_param!(sigma, f64::NAN);
        let stab = non_null!(stab);
        match stab.0.get(concept_id) {
            Ok(entry) => {
                unsafe { sigma.write(entry.sigma) };
                FcaStatus::FcaOk
            }
            Err(e) => fail(&e),
        }
    })
}

/// Fetches one concept's exact generator count as a decimal string.
///
/// # Safety
/// `stab` must be a live stability handle; `out` must be a valid
/// pointer.
#[no_mangle]
pub unsafe extern "C" fn fca_stability_generator_count(
    stab: *const FcaStability,
    concept_id: usize,
    out: *mut *mut c_char,
) -> FcaStatus {
    guarded(|| {
        let out = out_param!(out, ptr::null_mut());
        let stab = non_null!(stab);
        match stab.0.get(concept_id) {
            Ok(entry) => give_string(entry.generator_count.to_string(), out),
            Err(e) => fail(&e),
        }
    })
}

/// Serializes the whole stability report as JSON.
///
/// # Safety
/// `stab` must be a live stability handle; `out` must be a valid
/// pointer.
#[no_mangle]
pub unsafe extern "C" fn fca_stability_to_json(
    stab: *const FcaStability,
    out: *mut *mut c_char,
) -> FcaStatus {
    guarded(|| {
        let out = out_param!(out, ptr::null_mut());
        let stab = non_null!(stab);
        give_string(stability_to_json(&stab.0), out)
    })
}

/// Releases a stability handle. Null is a no-op.
///
/// # Safety
/// `stab` must be a live stability handle or null; it must not be
/// used afterwards.
#[no_mangle]
pub unsafe extern "C" fn fca_stability_free(stab: *mut FcaStability) {
    if !stab.is_null() {
        drop(unsafe { Box::from_raw(stab) });
    }
}

/// Selects every concept whose extent has at least `min_extent`
/// objects.
///
/// # Safety
/// `lat` must be a live lattice handle; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn fca_select_iceberg(
    lat: *const FcaLattice,
    min_extent: usize,
    out: *mut *mut FcaSelection,
) -> FcaStatus {
    guarded(|| {
        let out = out_param!(out, ptr::null_mut());
        let lat = non_null!(lat);
        let sel = iceberg_filter(&lat.0, min_extent);
        unsafe { out.write(Box::into_raw(Box::new(FcaSelection(sel)))) };
        FcaStatus::FcaOk
    })
}

/// Selects the `k` concepts of largest extent.
///
/// # Safety
/// `lat` must be a live lattice handle; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn fca_select_top_extent(
    lat: *const FcaLattice,
    k: usize,
    out: *mut *mut FcaSelection,
) -> FcaStatus {
    guarded(|| {
        let out = out_param!(out, ptr::null_mut());
        let lat = non_null!(lat);
        let sel = top_k_extent(&lat.0, k);
        unsafe { out.write(Box::into_raw(Box::new(FcaSelection(sel)))) };
        FcaStatus::FcaOk
    })
}

/// Selects the `k` most stable concepts, optionally dropping the
/// degenerate extremes first.
///
/// # Safety
/// `lat` and `stab` must be live handles built from the same context;
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn fca_select_top_stability(
    lat: *const FcaLattice,
    stab: *const FcaStability,
    k: usize,
    exclude_extremes: bool,
    out: *mut *mut FcaSelection,
) -> FcaStatus {
    guarded(|| {
        let out = out_param!(out, ptr::null_mut());
        let lat = non_null!(lat);
        let stab = non_null!(stab);
        let sel = top_k_stability(&lat.0, &stab.0, k, exclude_extremes);
        unsafe { out.write(Box::into_raw(Box::new(FcaSelection(sel)))) };
        FcaStatus::FcaOk
    })
}

/// Selects every concept with stability strictly above `theta`.
///
/// # Safety
/// `lat` and `stab` must be live handles built from the same context;
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn fca_select_stability_gt(
    lat: *const FcaLattice,
    stab: *const FcaStability,
    theta: f64,
    out: *mut *mut FcaSelection,
) -> FcaStatus {
    guarded(|| {
        let out = out_param!(out, ptr::null_mut());
        let lat = non_null!(lat);
        let stab = non_null!(stab);
        let sel = stability_threshold_filter(&lat.0, &stab.0, theta);
        unsafe { out.write(Box::into_raw(Box::new(FcaSelection(sel)))) };
        FcaStatus::FcaOk
    })
}

/// Number of selected concepts; 0 if `sel` is null.
///
/// # Safety
/// `sel` must be a live selection handle or null.
#[no_mangle]
pub unsafe extern "C" fn fca_selection_len(sel: *const FcaSelection) -> usize {
    if sel.is_null() {
        return 0;
    }
    unsafe { &*sel }.0.len()
}

/// Fetches the concept id at `index` in selection order.
///
/// # Safety
/// `sel` must be a live selection handle; `concept_id` must be a
/// valid pointer.
#[no_mangle]
pub unsafe extern "C" fn fca_selection_id_at(
    sel: *const FcaSelection,
    index: usize,
    concept_id: *mut usize,
) -> FcaStatus {
    guarded(|| {
        let concept_id = out_param!(concept_id, usize::MAX);
        let sel = non_null!(sel);
        match sel.0.selected_ids.get(index) {
            Some(&id) => {
                unsafe { concept_id.write(id) };
                FcaStatus::FcaOk
            }
            None => {
                set_error(&format!(
                    "selection index {index} out of range ({} selected)",
                    sel.0.len()
                ));
                FcaStatus::FcaInvalidArgument
            }
        }
    })
}

/// Serializes a selection as JSON.
///
/// # Safety
/// `ctx`, `lat`, and `sel` must be live handles derived from each
/// other; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn fca_selection_to_json(
    ctx: *const FcaContext,
    lat: *const FcaLattice,
    sel: *const FcaSelection,
    out: *mut *mut c_char,
) -> FcaStatus {
    guarded(|| {
        let out = out_param!(out, ptr::null_mut());
        let ctx = non_null!(ctx);
        let lat = non_null!(lat);
        let sel = non_null!(sel);
        give_string(selection_to_json(&ctx.0, &lat.0, &sel.0), out)
    })
}

/// Renders a selection as a Graphviz DOT diagram with stability
/// labels.
///
/// # Safety
/// `ctx`, `lat`, `sel`, and `stab` must be live handles derived from
/// each other; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn fca_selection_to_dot(
    ctx: *const FcaContext,
    lat: *const FcaLattice,
    sel: *const FcaSelection,
    stab: *const FcaStability,
    out: *mut *mut c_char,
) -> FcaStatus {
    guarded(|| {
        let out = out_param!(out, ptr::null_mut());
        let ctx = non_null!(ctx);
        let lat = non_null!(lat);
        let sel = non_null!(sel);
        let stab = non_null!(stab);
        give_string(selection_to_dot(&ctx.0, &lat.0, &sel.0, &stab.0), out)
    })
}

/// Releases a selection handle. Null is a no-op.
///
/// # Safety
/// `sel` must be a live selection handle or null; it must not be used
/// afterwards.
#[no_mangle]
pub unsafe extern "C" fn fca_selection_free(sel: *mut FcaSelection) {
    if !sel.is_null() {
        drop(unsafe { Box::from_raw(sel) });
    }
}
