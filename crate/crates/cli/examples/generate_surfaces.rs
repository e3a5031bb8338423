//! Regenerates the sample documents in `surfaces/` from the library's
//! built-in surfaces. Run from the workspace root:
//!
//!     cargo run -p rauzy-cli --example generate_surfaces

use rauzy_cli::SurfaceDocument;
use rauzy_core::samples;

fn main() {
    let dir = std::env::args().nth(1).unwrap_or_else(|| "surfaces".into());
    std::fs::create_dir_all(&dir).expect("create output directory");
    for name in samples::NAMED {
        let s = samples::by_name(name).expect("listed sample");
        let doc = SurfaceDocument::from_surface(&s);
        let path = format!("{dir}/{name}.json");
        std::fs::write(&path, doc.print()).expect("write sample document");
        println!("wrote {path}");
    }
}
