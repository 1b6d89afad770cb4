use std::ffi::{c_char, CStr, CString};
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use girylab_ffi::*;
use serde_json::{json, Value};

fn c(s: &str) -> CString {
    CString::new(s).unwrap()
}

/// Takes ownership of a library string.
unsafe fn take(s: *mut c_char) -> String {
    assert!(!s.is_null());
    let out = CStr::from_ptr(s).to_str().unwrap().to_string();
    girylab_string_free(s);
    out
}

fn last_error() -> String {
    let p = girylab_last_error();
    assert!(!p.is_null(), "no error recorded");
    unsafe { CStr::from_ptr(p) }.to_str().unwrap().to_string()
}

#[test]
fn dist_round_trip_and_queries() {
    unsafe {
        let src = r#"{"weights":[[2,"1/2"],[5,"1/4"],[9,"1/4"]]}"#;
        let mut d: *mut GiryDist = ptr::null_mut();
        assert_eq!(girylab_dist_from_json(c(src).as_ptr(), &mut d), GiryStatus::Ok);
        assert!(girylab_last_error().is_null());

        let mut s = ptr::null_mut();
        assert_eq!(girylab_dist_to_json(d, &mut s), GiryStatus::Ok);
        assert_eq!(take(s), src);

        let mut m = 0u64;
        assert_eq!(girylab_dist_min_support(d, 1000, &mut m), GiryStatus::Ok);
        assert_eq!(m, 2);

        assert_eq!(girylab_dist_ev(d, c(r#"{"below": 6}"#).as_ptr(), &mut s), GiryStatus::Ok);
        assert_eq!(take(s), "3/4");

        let table: Vec<u64> = (0..10).map(|i| i % 3).collect();
        let mut img: *mut GiryDist = ptr::null_mut();
        assert_eq!(girylab_dist_pushforward(d, table.as_ptr(), table.len(), &mut img), GiryStatus::Ok);
        assert_eq!(girylab_dist_to_json(img, &mut s), GiryStatus::Ok);
        assert_eq!(take(s), r#"{"weights":[[0,"1/4"],[2,"3/4"]]}"#);

        let short = [0u64, 1, 2];
        let mut bad: *mut GiryDist = ptr::null_mut();
        assert_eq!(girylab_dist_pushforward(d, short.as_ptr(), short.len(), &mut bad), GiryStatus::PartialMap);
        assert!(bad.is_null());

        let mut eq = true;
        assert_eq!(girylab_dist_equal(d, img, &mut eq), GiryStatus::Ok);
        assert!(!eq);

        girylab_dist_free(img);
        girylab_dist_free(d);
    }
}

#[test]
fn tails_and_caps() {
    unsafe {
        let src = r#"{"weights":[],"tail":{"kind":"geometric","start":40,"ratio":"1/2"}}"#;
        let mut d: *mut GiryDist = ptr::null_mut();
        assert_eq!(girylab_dist_from_json(c(src).as_ptr(), &mut d), GiryStatus::Ok);
        let mut m = 0u64;
        assert_eq!(girylab_dist_min_support(d, 10, &mut m), GiryStatus::EnumerationCapExceeded);
        assert!(last_error().contains("10"));
        assert_eq!(girylab_dist_min_support(d, 1000, &mut m), GiryStatus::Ok);
        assert_eq!(m, 40);
        girylab_dist_free(d);
    }
}

#[test]
fn validation_errors_map_to_codes() {
    unsafe {
        let mut d: *mut GiryDist = ptr::null_mut();
        let cases = [
            (r#"{"weights":[[0,"1/3"]]}"#, GiryStatus::MassNotOne),
            (r#"{"weights":[[0,"1/2"],[0,"1/2"]]}"#, GiryStatus::DuplicateIndex),
            (r#"{"weights":[[0,"3/2"],[1,"-1/2"]]}"#, GiryStatus::NegativeWeight),
            ("{", GiryStatus::Parse),
        ];
        for (src, want) in cases {
            assert_eq!(girylab_dist_from_json(c(src).as_ptr(), &mut d), want, "{src}");
            assert!(!last_error().is_empty());
        }
        assert_eq!(girylab_dist_from_json(ptr::null(), &mut d), GiryStatus::NullPointer);
        let bad_utf8 = [0xffu8, 0xfe, 0];
        assert_eq!(girylab_dist_from_json(bad_utf8.as_ptr().cast(), &mut d), GiryStatus::InvalidUtf8);
        assert_eq!(girylab_dist_min_support(ptr::null(), 10, ptr::null_mut()), GiryStatus::NullPointer);
        // Null handles are accepted by the free functions.
        girylab_dist_free(ptr::null_mut());
        girylab_string_free(ptr::null_mut());
    }
}

#[test]
fn eval_matches_cli_format() {
    unsafe {
        let mut s = ptr::null_mut();
        let expr = r#"{"op":"join","q":{"outer":[[{"weights":[[0,"1"]]},"1/2"],[{"weights":[[1,"1/2"],[2,"1/2"]]},"1/2"]]}}"#;
        assert_eq!(girylab_eval(c(expr).as_ptr(), &mut s), GiryStatus::Ok);
        let v: Value = serde_json::from_str(&take(s)).unwrap();
        assert_eq!(v, json!({"weights": [[0, "1/2"], [1, "1/4"], [2, "1/4"]]}));

        assert_eq!(girylab_eval(c(r#"{"op":"algebra","algebra":"nope","dist":[]}"#).as_ptr(), &mut s), GiryStatus::UnknownAlgebra);
        assert_eq!(girylab_eval(c(r#"{"op":"phi_formula","i":4,"n":2}"#).as_ptr(), &mut s), GiryStatus::IndexOutOfRange);
    }
}

#[test]
fn amplitudes() {
    unsafe {
        let mut a: *mut GiryAmp = ptr::null_mut();
        let src = r#"{"amplitudes":[[0,"3/5","0/1"],[1,"0/1","4/5"]]}"#;
        assert_eq!(girylab_amp_from_json(c(src).as_ptr(), &mut a), GiryStatus::Ok);
        let mut s = ptr::null_mut();
        assert_eq!(girylab_amp_to_json(a, &mut s), GiryStatus::Ok);
        assert_eq!(take(s), src);
        let mut d: *mut GiryDist = ptr::null_mut();
        assert_eq!(girylab_amp_to_dist(a, &mut d), GiryStatus::Ok);
        assert_eq!(girylab_dist_to_json(d, &mut s), GiryStatus::Ok);
        assert_eq!(take(s), r#"{"weights":[[0,"9/25"],[1,"16/25"]]}"#);
        girylab_dist_free(d);
        girylab_amp_free(a);

        let unnormalized = r#"{"amplitudes":[[0,"1/2","0/1"]]}"#;
        assert_eq!(girylab_amp_from_json(c(unnormalized).as_ptr(), &mut a), GiryStatus::NormNotOne);
    }
}

#[test]
fn trees() {
    unsafe {
        let mut t: *mut GiryTree = ptr::null_mut();
        assert_eq!(girylab_tree_from_json(c(r#"{"points":["a","b","c"]}"#).as_ptr(), &mut t), GiryStatus::Ok);
        let mut t2: *mut GiryTree = ptr::null_mut();
        let split = r#"{"atom":0,"left":["a"],"right":["b","c"]}"#;
        assert_eq!(girylab_tree_refine(t, c(split).as_ptr(), &mut t2), GiryStatus::Ok);

        let (mut d1, mut d2) = (0usize, 0usize);
        assert_eq!(girylab_tree_depth(t, &mut d1), GiryStatus::Ok);
        assert_eq!(girylab_tree_depth(t2, &mut d2), GiryStatus::Ok);
        assert_eq!((d1, d2), (1, 2));

        let mut atom = 9u64;
        assert_eq!(girylab_tree_atom_of(t2, 2, c("c").as_ptr(), &mut atom), GiryStatus::Ok);
        assert_eq!(atom, 1);
        assert_eq!(girylab_tree_atom_of(t2, 2, c("z").as_ptr(), &mut atom), GiryStatus::UnknownPoint);
        assert_eq!(girylab_tree_atom_of(t2, 5, c("a").as_ptr(), &mut atom), GiryStatus::IndexOutOfRange);

        let mut passed = false;
        let mut s = ptr::null_mut();
        assert_eq!(girylab_tree_check(t2, &mut s, &mut passed), GiryStatus::Ok);
        assert!(passed);
        let laws: Value = serde_json::from_str(&take(s)).unwrap();
        assert_eq!(laws.as_array().unwrap().len(), 4);
        assert_eq!(girylab_tree_check(t2, ptr::null_mut(), &mut passed), GiryStatus::Ok);

        assert_eq!(girylab_tree_to_json(t2, &mut s), GiryStatus::Ok);
        assert_eq!(take(s), format!(r#"{{"points":["a","b","c"],"splits":[{split}]}}"#));

        let mut t3: *mut GiryTree = ptr::null_mut();
        let empty = r#"{"atom":0,"left":[],"right":["a","b","c"]}"#;
        assert_eq!(girylab_tree_refine(t, c(empty).as_ptr(), &mut t3), GiryStatus::EmptyPart);
        let overlap = r#"{"atom":1,"left":["b"],"right":["b","c"]}"#;
        assert_eq!(girylab_tree_refine(t2, c(overlap).as_ptr(), &mut t3), GiryStatus::NotAPartition);
        assert!(t3.is_null());

        girylab_tree_free(t2);
        girylab_tree_free(t);
    }
}

#[test]
fn check_runs_suites() {
    unsafe {
        let mut s = ptr::null_mut();
        let mut passed = false;
        let cfg = c(r#"{"suites":["permutation-min"]}"#);
        assert_eq!(girylab_check(cfg.as_ptr(), &mut s, &mut passed), GiryStatus::Ok);
        assert!(passed);
        let doc: Value = serde_json::from_str(&take(s)).unwrap();
        assert_eq!(doc["suites"][0]["suite"], json!("permutation-min"));
        assert_eq!(girylab_check(c(r#"{"suites":["nosuch"]}"#).as_ptr(), &mut s, &mut passed), GiryStatus::UnknownSuite);
        assert_eq!(girylab_check(c(r#"{"n":9,"suites":["ns-equivalence"]}"#).as_ptr(), &mut s, &mut passed), GiryStatus::BoundExceeded);
        assert_eq!(girylab_check(c(r#"{"sweets":[]}"#).as_ptr(), &mut s, &mut passed), GiryStatus::BadConfig);
    }
}

#[test]
fn version_string() {
    let v = unsafe { CStr::from_ptr(girylab_version()) }.to_str().unwrap();
    assert_eq!(v, env!("CARGO_PKG_VERSION"));
}

fn header() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("include/girylab.h")
}

#[test]
fn header_declares_the_abi() {
    let h = std::fs::read_to_string(header()).unwrap();
    for name in [
        "girylab_last_error",
        "girylab_string_free",
        "girylab_eval",
        "girylab_check",
        "girylab_dist_from_json",
        "girylab_dist_free",
        "girylab_amp_to_dist",
        "girylab_tree_refine",
        "typedef struct GiryDist GiryDist",
        "GIRY_STATUS_MASS_NOT_ONE = 13",
    ] {
        assert!(h.contains(name), "{name} missing from header");
    }
}

/// Compiles and runs a small C program against the header and the static
/// library from this build.
#[test]
fn c_program_links_and_runs() {
    let Ok(exe) = std::env::current_exe() else { return };
    let lib_dir = exe.parent().and_then(|deps| deps.parent()).unwrap().to_path_buf();
    let staticlib = lib_dir.join("libgirylab_ffi.a");
    if !staticlib.exists() || Command::new("cc").arg("--version").output().is_err() {
        eprintln!("skipping: no static library or C compiler");
        return;
    }
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("demo.c");
    std::fs::write(
        &src,
        r#"
#include <stdio.h>
#include <string.h>
#include "girylab.h"

int main(void) {
    GiryDist *d = NULL;
    if (girylab_dist_from_json("{\"weights\":[[3,\"1/3\"],[7,\"2/3\"]]}", &d) != GIRY_STATUS_OK) return 10;
    uint64_t m = 0;
    if (girylab_dist_min_support(d, 100, &m) != GIRY_STATUS_OK || m != 3) return 11;
    char *s = NULL;
    if (girylab_dist_to_json(d, &s) != GIRY_STATUS_OK) return 12;
    printf("%s\n", s);
    girylab_string_free(s);
    girylab_dist_free(d);
    GiryDist *bad = NULL;
    if (girylab_dist_from_json("{\"weights\":[[0,\"1/3\"]]}", &bad) != GIRY_STATUS_MASS_NOT_ONE) return 13;
    if (girylab_last_error() == NULL) return 14;
    return 0;
}
"#,
    )
    .unwrap();
    let bin = dir.path().join("demo");
    let status = Command::new("cc")
        .arg(&src)
        .arg("-I")
        .arg(header().parent().unwrap())
        .arg(&staticlib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&bin)
        .status()
        .unwrap();
    assert!(status.success(), "C compile failed");
    let out = Command::new(&bin).output().unwrap();
    assert!(out.status.success(), "demo exited with {:?}", out.status);
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), r#"{"weights":[[3,"1/3"],[7,"2/3"]]}"#);
}
