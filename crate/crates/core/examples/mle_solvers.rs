//! Numeric location, scale and group estimates next to the closed forms.

use std::collections::BTreeMap;

use mlechar::catalog::lookup;
use mlechar::density::sample_from;
use mlechar::estimator::{closed_form_mle, Estimator, SolverOptions};
use mlechar::score::KindTag;

fn main() -> mlechar::error::Result<()> {
    let cases: [(&str, &[(&str, f64)], KindTag); 5] = [
        ("gaussian", &[], KindTag::Location),
        ("gaussian", &[], KindTag::Scale),
        ("gamma", &[("alpha", 2.0)], KindTag::Scale),
        ("logistic", &[], KindTag::Location),
        ("sinh_arcsinh_skew_normal", &[], KindTag::Group),
    ];
    for (seed, (name, params, kind)) in cases.into_iter().enumerate() {
        let params: BTreeMap<String, f64> = params.iter().map(|(k, v)| (k.to_string(), *v)).collect();
        let entry = lookup(name, &params)?;
        let sample = sample_from(&entry.model, 7, seed as u64)?;
        let solver = Estimator::new(entry.score_model(kind), &entry.parameter_kind(kind)?, SolverOptions::default())?;
        let numeric = solver.solve(&sample)?;
        print!("{name} {kind}: theta_hat = {:.12} residual = {:.1e}", numeric.theta_hat, numeric.residual);
        if let Some(cf) = entry.closed_form(kind) {
            let closed = closed_form_mle(&entry, kind, &sample)?;
            print!(" closed form {} = {:.12}", cf.id(), closed.theta_hat);
        }
        println!();
    }
    Ok(())
}
