use ewunfold::exper::suite::{property_suite, SuiteConfig};

fn main() {
    let cfg = SuiteConfig {
        trials: 200,
        ..SuiteConfig::default()
    };
    let report = property_suite(&cfg);
    for e in &report.entries {
        let mark = if e.passed { "ok  " } else { "FAIL" };
        println!("{mark} {:<8} {:<32} worst slack {:+.3e}", e.module, e.name, e.worst_slack);
    }
}
