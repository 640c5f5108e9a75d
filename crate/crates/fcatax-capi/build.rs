//! Regenerates include/fcatax.h from the extern "C" surface whenever
//! the crate builds, so the committed header never drifts.

use std::path::PathBuf;

fn main() {
    let crate_dir = PathBuf::from(std::env::var("CARGO_MANIFEST_DIR").unwrap());
    println!("cargo:rerun-if-changed=src/lib.rs");
    println!("cargo:rerun-if-changed=cbindgen.toml");

    let header = crate_dir.join("include/fcatax.h");
    std::fs::create_dir_all(header.parent().unwrap()).unwrap();
    cbindgen::generate(&crate_dir)
        .expect("cbindgen generates the header")
        .write_to_file(header);
}
