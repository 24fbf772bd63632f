use mlechar::suite::{emit_report, run_suite, ReportFormat, SuiteConfig};

fn main() -> mlechar::error::Result<()> {
    let cfg = SuiteConfig { trials: 50, ..SuiteConfig::default() };
    let report = run_suite(&cfg)?;
    print!("{}", String::from_utf8_lossy(&emit_report(&report, ReportFormat::Text)?));
    for (section, ok) in report.verdicts() {
        println!("{section}: {}", if ok { "pass" } else { "fail" });
    }
    Ok(())
}
