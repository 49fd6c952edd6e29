//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any fails.
//!
//! `cargo test -p irsec --test acceptance -- 3 7` runs a subset.

fn main() {
    let ids: Vec<usize> = std::env::args()
        .skip(1)
        .filter_map(|a| a.parse().ok())
        .collect();
    let ids = if ids.is_empty() {
        (1..=10).collect()
    } else {
        ids
    };
    let work = tempfile::tempdir().expect("temporary directory");
    let mut failed = 0;
    for id in ids {
        let check = &irsec::validate::run(&[id], work.path())[0];
        println!("{}", check.line());
        failed += usize::from(!check.passed);
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
