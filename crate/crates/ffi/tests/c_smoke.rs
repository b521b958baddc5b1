//! Compiles and runs a small C program against the generated header and the
//! static archive, proving the ABI end to end.

use std::path::PathBuf;
use std::process::Command;

const SMOKE_C: &str = r#"
#include "rwogg.h"
#include <assert.h>
#include <math.h>
#include <stdio.h>

int main(void) {
    rwogg_family *fam = NULL;
    assert(rwogg_family_parse("hypercube", &fam) == RWOGG_STATUS_OK);
    rwogg_schedule *sched = NULL;
    assert(rwogg_schedule_parse("explicit:4,4,4", &sched) == RWOGG_STATUS_OK);
    rwogg_series *series = NULL;
    assert(rwogg_run_exact(fam, sched, 12, false, &series) == RWOGG_STATUS_OK);
    assert(rwogg_series_len(series) == 13);
    assert(rwogg_series_return_prob(series, 0) == 1.0);
    assert(rwogg_series_return_prob(series, 1) == 0.0);
    assert(rwogg_series_phase(series, 5) == 2);

    rwogg_schedule *sym = NULL;
    assert(rwogg_schedule_parse("symbolic:base=2,a=1,b=0,d1=2", &sym) == RWOGG_STATUS_OK);
    rwogg_verdict v;
    assert(rwogg_classify(fam, sym, &v) == RWOGG_STATUS_OK);
    assert(v == RWOGG_VERDICT_RECURRENT);

    double p = 0.0;
    assert(rwogg_stationary_origin_mass(fam, 5, &p) == RWOGG_STATUS_OK);
    assert(fabs(p - 0.0625) < 1e-15);

    rwogg_family *bad = NULL;
    assert(rwogg_family_parse("torus:d=2", &bad) == RWOGG_STATUS_INVALID_DESCRIPTOR);

    rwogg_series_free(series);
    rwogg_schedule_free(sched);
    rwogg_schedule_free(sym);
    rwogg_family_free(fam);
    puts("c-abi smoke: ok");
    return 0;
}
"#;

#[test]
fn c_program_links_against_the_header_and_staticlib() {
    let manifest = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    let include = manifest.join("include");
    assert!(include.join("rwogg.h").exists(), "header must be generated by the build script");

    // target/<profile>/ is two levels up from the test executable in deps/.
    let profile_dir = std::env::current_exe()
        .unwrap()
        .parent()
        .unwrap()
        .parent()
        .unwrap()
        .to_path_buf();
    let archive = profile_dir.join("librwogg_ffi.a");
    assert!(archive.exists(), "static archive missing at {}", archive.display());

    let work = std::env::temp_dir().join(format!("rwogg-csmoke-{}", std::process::id()));
    let _ = std::fs::remove_dir_all(&work);
    std::fs::create_dir_all(&work).unwrap();
    let source = work.join("smoke.c");
    std::fs::write(&source, SMOKE_C).unwrap();
    let binary = work.join("smoke");

    let compile = Command::new("cc")
        .arg(&source)
        .arg("-I")
        .arg(&include)
        .arg("-o")
        .arg(&binary)
        .arg(&archive)
        .args(["-lpthread", "-lm", "-ldl"])
        .output()
        .expect("a C compiler must be available");
    assert!(compile.status.success(), "cc failed: {}", String::from_utf8_lossy(&compile.stderr));

    let run = Command::new(&binary).output().unwrap();
    assert!(run.status.success(), "smoke binary failed: {}", String::from_utf8_lossy(&run.stderr));
    assert!(String::from_utf8_lossy(&run.stdout).contains("c-abi smoke: ok"));
}
