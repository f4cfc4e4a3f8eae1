//! Load a problem file, run its jobs on two threads and print both report
//! renderings. Defaults to the shipped Klein-four fixture.

use std::path::PathBuf;

use pseudosplit::problem::{parse_problem_file, run, Config};

fn main() {
    let path = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures/klein4.json"));
    let config = Config::default();
    let problem = match parse_problem_file(&path, &config) {
        Ok(p) => p,
        Err(e) => {
            eprintln!("{e}");
            std::process::exit(2);
        }
    };
    let report = run(&problem, &config, 2);
    print!("{}", report.render_text());
    println!();
    print!("{}", report.to_json());
}
