//! C interface to the formality kernel.
//!
//! Documents are opaque handles created by [`formality_document_parse`] and
//! released with [`formality_document_free`]. Every fallible call returns a
//! [`FormalityStatus`]; on failure the message is available from
//! [`formality_last_error`] on the same thread. Strings returned by the
//! library are owned by the caller and go back through
//! [`formality_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::ptr;

use formality_core::cli::{self, document::Document, Status};
use formality_core::scalar::{fmt_q, parse_q};
use formality_core::sullivan::{intrinsic_coformality, Coformality};
use formality_core::Error;

/// Result codes shared by every entry point.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FormalityStatus {
    Ok = 0,
    /// A required pointer argument was null.
    NullArgument = 1,
    /// A string argument was not valid UTF-8.
    InvalidUtf8 = 2,
    /// The document or a numeric argument did not parse.
    Parse = 3,
    /// The input parsed but the computation rejected it.
    Kernel = 4,
    /// The computation could not decide the question.
    Undecided = 5,
    /// A consistency check ran and failed.
    CheckFailed = 6,
    /// A Rust panic was caught at the boundary.
    Panic = 7,
}

/// Kind of a parsed document.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FormalityKind {
    Dgl = 0,
    Linf = 1,
    Cdga = 2,
}

/// Parsed presentation document.
pub struct FormalityDocument {
    inner: Document,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

fn fail(status: FormalityStatus, msg: impl Into<String>) -> FormalityStatus {
    set_error(msg);
    status
}

fn kernel_status(e: &Error) -> FormalityStatus {
    match e {
        Error::Parse { .. } => FormalityStatus::Parse,
        Error::Undecided(_) => FormalityStatus::Undecided,
        _ => FormalityStatus::Kernel,
    }
}

fn from_kernel(e: Error) -> FormalityStatus {
    fail(kernel_status(&e), e.to_string())
}

fn guard(f: impl FnOnce() -> FormalityStatus) -> FormalityStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    std::panic::catch_unwind(std::panic::AssertUnwindSafe(f))
        .unwrap_or_else(|_| fail(FormalityStatus::Panic, "internal panic"))
}

unsafe fn read_str<'a>(s: *const c_char) -> Result<&'a str, FormalityStatus> {
    if s.is_null() {
        return Err(fail(FormalityStatus::NullArgument, "null string argument"));
    }
    CStr::from_ptr(s)
        .to_str()
        .map_err(|_| fail(FormalityStatus::InvalidUtf8, "string argument is not UTF-8"))
}

unsafe fn document<'a>(doc: *const FormalityDocument) -> Result<&'a Document, FormalityStatus> {
    doc.as_ref()
        .map(|d| &d.inner)
        .ok_or_else(|| fail(FormalityStatus::NullArgument, "null document handle"))
}

unsafe fn write_string(out: *mut *mut c_char, s: String) -> FormalityStatus {
    match CString::new(s) {
        Ok(c) => {
            *out = c.into_raw();
            FormalityStatus::Ok
        }
        Err(_) => fail(FormalityStatus::Kernel, "output contains a NUL byte"),
    }
}

macro_rules! try_ffi {
    ($e:expr) => {
        match $e {
            Ok(v) => v,
            Err(s) => return s,
        }
    };
}

/// Message of the last failure on this thread, or null. The pointer stays
/// valid until the next call into the library from the same thread.
#[no_mangle]
pub extern "C" fn formality_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Releases a string returned by the library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn formality_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses a document from NUL-terminated text.
///
/// # Safety
/// `text` must be a valid C string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn formality_document_parse(
    text: *const c_char,
    out: *mut *mut FormalityDocument,
) -> FormalityStatus {
    guard(|| {
        if out.is_null() {
            return fail(FormalityStatus::NullArgument, "null output pointer");
        }
        *out = ptr::null_mut();
        let text = try_ffi!(read_str(text));
        match Document::parse(text) {
            Ok(inner) => {
                *out = Box::into_raw(Box::new(FormalityDocument { inner }));
                FormalityStatus::Ok
            }
            Err(e) => from_kernel(e),
        }
    })
}

/// Releases a document. Null is ignored.
///
/// # Safety
/// `doc` must come from [`formality_document_parse`] and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn formality_document_free(doc: *mut FormalityDocument) {
    if !doc.is_null() {
        drop(Box::from_raw(doc));
    }
}

/// # Safety
/// `doc` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn formality_document_kind(
    doc: *const FormalityDocument,
    out: *mut FormalityKind,
) -> FormalityStatus {
    guard(|| {
        let d = try_ffi!(document(doc));
        if out.is_null() {
            return fail(FormalityStatus::NullArgument, "null output pointer");
        }
        *out = match d.kind() {
            cli::document::Kind::Dgl => FormalityKind::Dgl,
            cli::document::Kind::Linf => FormalityKind::Linf,
            cli::document::Kind::Cdga => FormalityKind::Cdga,
        };
        FormalityStatus::Ok
    })
}

/// Canonical text of a document.
///
/// # Safety
/// `doc` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn formality_document_to_text(
    doc: *const FormalityDocument,
    out: *mut *mut c_char,
) -> FormalityStatus {
    guard(|| {
        let d = try_ffi!(document(doc));
        if out.is_null() {
            return fail(FormalityStatus::NullArgument, "null output pointer");
        }
        write_string(out, d.to_text())
    })
}

/// Runs the consistency checks. Returns `CheckFailed` with the failing
/// lines as the error message when a check fails.
///
/// # Safety
/// `doc` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn formality_document_check(doc: *const FormalityDocument) -> FormalityStatus {
    guard(|| {
        let d = try_ffi!(document(doc));
        let r = cli::check(d);
        match r.status {
            Status::Ok => FormalityStatus::Ok,
            Status::Undecided => fail(FormalityStatus::Undecided, r.text()),
            Status::Failed => fail(FormalityStatus::CheckFailed, r.text()),
        }
    })
}

/// Dimension of homology in one degree.
///
/// # Safety
/// `doc` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn formality_homology_dimension(
    doc: *const FormalityDocument,
    degree: i32,
    out: *mut usize,
) -> FormalityStatus {
    guard(|| {
        let d = try_ffi!(document(doc));
        if out.is_null() {
            return fail(FormalityStatus::NullArgument, "null output pointer");
        }
        match cli::homology(d, degree) {
            Ok(r) => match r.data["dimension"].as_u64() {
                Some(n) => {
                    *out = n as usize;
                    FormalityStatus::Ok
                }
                None => fail(FormalityStatus::Kernel, "homology report has no dimension"),
            },
            Err(e) => from_kernel(e),
        }
    })
}

/// Formality verdict for a comma-separated list of classes, written as a
/// JSON report. The status reflects the verdict: `Undecided` when
/// inconclusive, `Ok` otherwise.
///
/// # Safety
/// `doc` must be a live handle, `classes` a valid C string and `out` a
/// valid pointer.
#[no_mangle]
pub unsafe extern "C" fn formality_formality_report(
    doc: *const FormalityDocument,
    classes: *const c_char,
    out: *mut *mut c_char,
) -> FormalityStatus {
    guard(|| {
        let d = try_ffi!(document(doc));
        let classes = try_ffi!(read_str(classes));
        if out.is_null() {
            return fail(FormalityStatus::NullArgument, "null output pointer");
        }
        *out = ptr::null_mut();
        match cli::formality(d, classes) {
            Ok(r) => {
                let s = write_string(out, r.to_json().to_string());
                match (s, r.status) {
                    (FormalityStatus::Ok, Status::Undecided) => fail(FormalityStatus::Undecided, r.text()),
                    (s, _) => s,
                }
            }
            Err(e) => from_kernel(e),
        }
    })
}

/// Graded determinant of a row-major `size × size` matrix of rational
/// entries written as C strings (`"3"`, `"-1/2"`). The result is written as
/// a string of the same form.
///
/// # Safety
/// `entries` must hold `size * size` valid C strings, `degrees` must hold
/// `size` integers and `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn formality_graded_det(
    entries: *const *const c_char,
    degrees: *const i32,
    size: usize,
    out: *mut *mut c_char,
) -> FormalityStatus {
    guard(|| {
        if out.is_null() || (size > 0 && (entries.is_null() || degrees.is_null())) {
            return fail(FormalityStatus::NullArgument, "null argument");
        }
        let mut rows = Vec::with_capacity(size);
        for i in 0..size {
            let mut row = Vec::with_capacity(size);
            for j in 0..size {
                let s = try_ffi!(read_str(*entries.add(i * size + j)));
                match parse_q(s) {
                    Some(x) => row.push(x),
                    None => {
                        return fail(
                            FormalityStatus::Parse,
                            format!("entry ({i},{j}) `{s}` is not a rational number"),
                        )
                    }
                }
            }
            rows.push(row);
        }
        let degrees = if size == 0 {
            &[][..]
        } else {
            std::slice::from_raw_parts(degrees, size)
        };
        match formality_core::sullivan::graded_det(&rows, degrees) {
            Ok(v) => write_string(out, fmt_q(&v)),
            Err(e) => from_kernel(e),
        }
    })
}

/// Intrinsic coformality of a product of odd spheres. `out` receives 1 for
/// yes and 0 for no; on no, `witness` (if non-null) receives the 0-based
/// index of the sphere whose dimension is the sum of others minus one.
///
/// # Safety
/// `dims` must hold `len` integers; `out` must be valid; `witness` may be
/// null.
#[no_mangle]
pub unsafe extern "C" fn formality_intrinsic_coformal(
    dims: *const i64,
    len: usize,
    out: *mut i32,
    witness: *mut usize,
) -> FormalityStatus {
    guard(|| {
        if out.is_null() || (len > 0 && dims.is_null()) {
            return fail(FormalityStatus::NullArgument, "null argument");
        }
        let dims = if len == 0 {
            &[][..]
        } else {
            std::slice::from_raw_parts(dims, len)
        };
        match intrinsic_coformality(dims) {
            Ok(Coformality::Yes) => {
                *out = 1;
                FormalityStatus::Ok
            }
            Ok(Coformality::No { index, .. }) => {
                *out = 0;
                if !witness.is_null() {
                    *witness = index;
                }
                FormalityStatus::Ok
            }
            Err(e) => from_kernel(e),
        }
    })
}
