use std::ffi::{c_char, CStr, CString};
use std::ptr;

use formality_ffi::*;

fn parse(text: &str) -> (FormalityStatus, *mut FormalityDocument) {
    let c = CString::new(text).unwrap();
    let mut doc = ptr::null_mut();
    let s = unsafe { formality_document_parse(c.as_ptr(), &mut doc) };
    (s, doc)
}

fn last_error() -> String {
    let p = formality_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

unsafe fn take(s: *mut c_char) -> String {
    let out = CStr::from_ptr(s).to_string_lossy().into_owned();
    formality_string_free(s);
    out
}

const PLANE: &str = "kind = dgl\ntruncation = 7\ngenerators = a:1, b:3\nd b = [a,a]\n";

#[test]
fn document_lifecycle() {
    let (s, doc) = parse("kind=dgl # comment\ngenerators = a:1,b:3\ntruncation = 7\nd b = [a, a]\n");
    assert_eq!(s, FormalityStatus::Ok);
    unsafe {
        let mut kind = FormalityKind::Cdga;
        assert_eq!(formality_document_kind(doc, &mut kind), FormalityStatus::Ok);
        assert_eq!(kind, FormalityKind::Dgl);
        let mut text = ptr::null_mut();
        assert_eq!(formality_document_to_text(doc, &mut text), FormalityStatus::Ok);
        assert_eq!(take(text), PLANE);
        assert_eq!(formality_document_check(doc), FormalityStatus::Ok);
        let mut dim = 99;
        assert_eq!(formality_homology_dimension(doc, 3, &mut dim), FormalityStatus::Ok);
        assert_eq!(dim, 0);
        assert_eq!(formality_homology_dimension(doc, 1, &mut dim), FormalityStatus::Ok);
        assert_eq!(dim, 1);
        formality_document_free(doc);
    }
}

#[test]
fn parse_errors_report_location() {
    let (s, doc) = parse("kind = dgl\ngenerators = a:1\nd a = [a,\n");
    assert_eq!(s, FormalityStatus::Parse);
    assert!(doc.is_null());
    assert!(last_error().contains("3:"), "{}", last_error());
}

#[test]
fn failed_check_and_null_handles() {
    let (_, doc) = parse("kind = dgl\ngenerators = a:1, b:3, c:4\nd b = [a,a]\nd c = b\n");
    unsafe {
        assert_eq!(formality_document_check(doc), FormalityStatus::CheckFailed);
        assert!(last_error().starts_with("FAIL"));
        formality_document_free(doc);
        assert_eq!(formality_document_check(ptr::null()), FormalityStatus::NullArgument);
        assert_eq!(
            formality_document_parse(ptr::null(), ptr::null_mut()),
            FormalityStatus::NullArgument
        );
        formality_document_free(ptr::null_mut());
        formality_string_free(ptr::null_mut());
    }
}

#[test]
fn error_is_cleared_by_a_successful_call() {
    let _ = parse("kind = nonsense\n");
    assert!(!formality_last_error().is_null());
    let (s, doc) = parse(PLANE);
    assert_eq!(s, FormalityStatus::Ok);
    assert!(formality_last_error().is_null());
    unsafe { formality_document_free(doc) };
}

#[test]
fn formality_verdicts() {
    let text = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/../../data/nine_cell.pres")).unwrap();
    let (_, doc) = parse(&text);
    let classes = CString::new("v1,v2,v3,v4").unwrap();
    unsafe {
        let mut out = ptr::null_mut();
        assert_eq!(
            formality_formality_report(doc, classes.as_ptr(), &mut out),
            FormalityStatus::Ok
        );
        let json = take(out);
        assert!(json.contains("\"schema\":\"formality-report/1\""), "{json}");
        assert!(json.contains("NOT_FORMAL(2)"), "{json}");
        formality_document_free(doc);
    }
    let (_, doc) = parse("kind = dgl\ntruncation = 9\ngenerators = x:2, y:3\n");
    let classes = CString::new("x,x,x").unwrap();
    unsafe {
        let mut out = ptr::null_mut();
        assert_eq!(
            formality_formality_report(doc, classes.as_ptr(), &mut out),
            FormalityStatus::Undecided
        );
        assert!(!out.is_null());
        formality_string_free(out);
        formality_document_free(doc);
    }
}

#[test]
fn graded_determinant_entries() {
    let entries: Vec<CString> = ["1", "2", "3", "4"].iter().map(|s| CString::new(*s).unwrap()).collect();
    let ptrs: Vec<*const c_char> = entries.iter().map(|c| c.as_ptr()).collect();
    unsafe {
        let mut out = ptr::null_mut();
        assert_eq!(
            formality_graded_det(ptrs.as_ptr(), [3, 3].as_ptr(), 2, &mut out),
            FormalityStatus::Ok
        );
        assert_eq!(take(out), "-2");
        assert_eq!(
            formality_graded_det(ptrs.as_ptr(), [2, 2].as_ptr(), 2, &mut out),
            FormalityStatus::Ok
        );
        assert_eq!(take(out), "10");
        let bad = CString::new("0.5").unwrap();
        let ptrs = [ptrs[0], ptrs[1], ptrs[2], bad.as_ptr()];
        assert_eq!(
            formality_graded_det(ptrs.as_ptr(), [2, 2].as_ptr(), 2, &mut out),
            FormalityStatus::Parse
        );
        assert!(last_error().contains("(1,1)"));
    }
}

#[test]
fn sphere_products() {
    unsafe {
        let (mut yes, mut witness) = (-1, usize::MAX);
        let dims = [3i64, 3, 3, 3, 11];
        assert_eq!(
            formality_intrinsic_coformal(dims.as_ptr(), 5, &mut yes, &mut witness),
            FormalityStatus::Ok
        );
        assert_eq!((yes, witness), (0, 4));
        let dims = [3i64, 5, 7, 9, 13];
        assert_eq!(
            formality_intrinsic_coformal(dims.as_ptr(), 5, &mut yes, ptr::null_mut()),
            FormalityStatus::Ok
        );
        assert_eq!(yes, 1);
        let dims = [3i64, 4];
        assert_eq!(
            formality_intrinsic_coformal(dims.as_ptr(), 2, &mut yes, ptr::null_mut()),
            FormalityStatus::Kernel
        );
    }
}

#[test]
fn header_compiles_as_c() {
    let header = concat!(env!("CARGO_MANIFEST_DIR"), "/include");
    let dir = tempfile_dir();
    let src = dir.join("use_header.c");
    std::fs::write(
        &src,
        "#include \"formality.h\"\nint main(void) {\n  FormalityDocument *doc = 0;\n  FormalityStatus s = formality_document_parse(\"kind = dgl\\n\", &doc);\n  formality_document_free(doc);\n  return s == FORMALITY_STATUS_OK ? 0 : 1;\n}\n",
    )
    .unwrap();
    let Ok(out) = std::process::Command::new("cc")
        .args(["-std=c99", "-Wall", "-Werror", "-fsyntax-only", "-I", header])
        .arg(&src)
        .output()
    else {
        eprintln!("no C compiler, skipping");
        return;
    };
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
}

fn tempfile_dir() -> std::path::PathBuf {
    let dir = std::path::PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("capi");
    std::fs::create_dir_all(&dir).unwrap();
    dir
}
