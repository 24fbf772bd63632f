use mlechar::catalog::all_entries;
use mlechar::coverage::mnss;
use mlechar::score::ProbeConfig;

fn main() -> mlechar::error::Result<()> {
    let probe = ProbeConfig::default();
    println!("{:<38} {:<9} {:<42} {:>5} {:>5}", "family", "kind", "score", "mnss", "num");
    for entry in all_entries() {
        for kind in entry.characterizable_kinds() {
            let formula = entry.kind(kind).map_or("", |k| k.formula);
            let analytic = entry.computed_mnss(kind, &probe)?.value;
            let numeric = mnss(&entry.analyze_numeric(kind, &probe)?)?.value;
            let label = if entry.params.is_empty() {
                entry.name.clone()
            } else {
                let ps: Vec<String> = entry.params.iter().map(|(k, v)| format!("{k}={v}")).collect();
                format!("{}({})", entry.name, ps.join(","))
            };
            println!("{label:<38} {kind:<9} {formula:<42} {analytic:>5} {numeric:>5}");
        }
    }
    Ok(())
}
