//! Regenerates the committed fixture files used by the CLI tests:
//! `cargo run -p fcl-core --example gen_fixtures -- <dir>`

fn main() {
    let dir = std::env::args()
        .nth(1)
        .unwrap_or_else(|| "crates/cli/tests/data".to_string());
    fcl_core::fixtures::write_fixture_files(&dir).expect("writing fixture files");
    println!("fixture files written to {dir}");
}
