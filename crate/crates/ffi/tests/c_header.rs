//! Compiles and runs a C program against the generated header and the static library.

use std::path::PathBuf;
use std::process::Command;

const PROGRAM: &str = r#"
#include <stdio.h>
#include <string.h>
#include "heat_entropy.h"

int main(void) {
    HeH3 *h = NULL;
    if (he_h3_new(1.0, 0.0, 0.0, &h) != HE_STATUS_OK) return 10;
    HeH3Record rec;
    if (he_h3_record(h, 1.0, &rec) != HE_STATUS_OK) return 11;
    printf("I1 %.17g\n", rec.i1);
    printf("envelopes %d\n", rec.envelopes_hold);
    double v = 0.0;
    if (he_h3_entropy(h, 0.0, &v) != HE_STATUS_INVALID_ARGUMENT) return 12;
    if (strlen(he_last_error()) == 0) return 13;
    he_h3_free(h);

    if (he_h3_new(-1.0, 0.0, 0.0, &h) != HE_STATUS_INVALID_ARGUMENT || h != NULL) return 14;

    HeTrace *tr = NULL;
    if (he_trace_new("sphere", NULL, 0, &tr) != HE_STATUS_OK) return 15;
    printf("points %zu\n", he_trace_len(tr));
    int ok = 0;
    if (he_trace_bounds_hold(tr, &ok) != HE_STATUS_OK) return 16;
    printf("bounds %d\n", ok);
    he_trace_free(tr);
    return 0;
}
"#;

fn profile_dir() -> PathBuf {
    // target/<profile>/deps/<test binary>
    let exe = std::env::current_exe().unwrap();
    exe.parent().unwrap().parent().unwrap().to_path_buf()
}

#[test]
fn c_program_links_and_runs() {
    if Command::new("cc").arg("--version").output().is_err() {
        eprintln!("no C compiler on PATH; skipping");
        return;
    }
    let lib = profile_dir().join("libheat_entropy_ffi.a");
    assert!(lib.exists(), "missing {}", lib.display());
    let include = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("include");
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("smoke.c");
    let bin = dir.path().join("smoke");
    std::fs::write(&src, PROGRAM).unwrap();
    let status = Command::new("cc")
        .args(["-std=c99", "-Wall", "-Werror", "-I"])
        .arg(&include)
        .arg(&src)
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&bin)
        .status()
        .unwrap();
    assert!(status.success());
    let out = Command::new(&bin).output().unwrap();
    assert!(out.status.success(), "exit {:?}", out.status.code());
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert_eq!(stdout, "I1 2\nenvelopes 1\npoints 40\nbounds 1\n");
}
