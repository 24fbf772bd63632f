//! Characterizing a user-supplied density with a skewed, bounded score.

use mlechar::coverage::mnss;
use mlechar::density::{normalize, sample_from, DensityModel, SupportSet};
use mlechar::estimator::mle_location;
use mlechar::score::{score_profiles, ParameterKind, ProbeConfig};

fn main() -> mlechar::error::Result<()> {
    // score 2 tanh(x) + 1 with image (-1, 3)
    let raw = DensityModel::new("skew_sech", SupportSet::FullLine, |x: f64| -(2.0 * x.cosh().ln() + x))
        .with_derivative(|x: f64| -(2.0 * x.tanh() + 1.0));
    let (c, model) = normalize(&raw, 1e-10)?;
    println!("normalizer {c:.10}");

    let profiles = score_profiles(&model, &ParameterKind::Location, &ProbeConfig::default())?;
    for p in &profiles {
        println!("image (-{}, {}) via {:?}", p.p_minus, p.p_plus, p.provenance);
    }
    println!("mnss {}", mnss(&profiles)?.value);

    let sample = sample_from(&model, 4, 3)?;
    println!("sample {:?} theta_hat {:.10}", sample.values(), mle_location(&model, &sample, 1e-12)?.theta_hat);
    Ok(())
}
