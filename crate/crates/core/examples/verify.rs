//! Runs two suites and prints the summary.
use nearcyc::config::RunConfig;
use nearcyc::verify::run;

fn main() {
    let cfg = RunConfig::from_toml("suites = [\"collapse\", \"gamma\"]\n[ranges]\nexpand_n = 5\ngamma_n = 6\n").unwrap();
    let report = run(&cfg);
    for (suite, s) in &report.summary.suites {
        println!("{suite}: {} passed, {} failed", s.passed, s.failed);
    }
}
