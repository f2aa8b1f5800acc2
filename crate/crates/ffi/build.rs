fn main() {
    let crate_dir = std::env::var("CARGO_MANIFEST_DIR").expect("cargo sets the manifest dir");
    let header = std::path::Path::new(&crate_dir).join("include").join("spinbath.h");

    cbindgen::Builder::new()
        .with_crate(&crate_dir)
        .with_language(cbindgen::Language::C)
        .with_cpp_compat(true)
        .with_include_guard("SPINBATH_H")
        .with_header(
            "/* C interface to the spinbath central-spin dephasing library.\n\
             * Generated by the build; do not edit by hand. */",
        )
        .generate()
        .expect("cbindgen parses the crate")
        .write_to_file(header);

    println!("cargo:rerun-if-changed=src/lib.rs");
    println!("cargo:rerun-if-changed=build.rs");
}
