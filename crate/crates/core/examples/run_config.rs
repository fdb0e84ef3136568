//! Runs a scene file through the batch front end.
//!
//! `cargo run --release --example run_config -- examples/configs/layered.toml out/`

use std::path::PathBuf;

use tevie::cli::{run, Mode, RunManifest};

fn main() {
    let mut args = std::env::args().skip(1);
    let config = PathBuf::from(
        args.next()
            .unwrap_or_else(|| "examples/configs/layered.toml".into()),
    );
    let out = PathBuf::from(args.next().unwrap_or_else(|| "out/layered".into()));
    let outcome = run(&RunManifest::new(Mode::Forward, Some(config), &out));
    print!("{}", outcome.summary.render());
    if let Some(d) = outcome.diagnostic {
        eprintln!("{d}");
    }
    println!("artifacts in {}", out.display());
    std::process::exit(outcome.status.code());
}
