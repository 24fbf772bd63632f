//! A density outside the Gaussian class that still returns the midpoint for
//! every two-point sample, and a three-point sample that tells them apart.

use mlechar::catalog::lookup;
use mlechar::density::Sample;
use mlechar::estimator::{LocationSolver, SolverOptions};
use mlechar::forge::{compare_on_sample, forge_odd_h, subcritical_split, verify_counterexample, HSpec};
use mlechar::extended::ExtendedReal;

fn main() -> mlechar::error::Result<()> {
    let gaussian = lookup("gaussian", &Default::default())?.model;
    let quartic = forge_odd_h(&gaussian, &HSpec::odd_power(1.0, 3)?)?;
    for n in [2, 3] {
        let r = verify_counterexample(&gaussian, &quartic, n, 200, 42, 1e-7)?;
        println!("n={n}: agreement {}/{} max gap {:.4}", r.agreed, r.trials, r.max_gap);
    }

    let f = LocationSolver::new(&gaussian, SolverOptions::default())?;
    let g = LocationSolver::new(&quartic, SolverOptions::default())?;
    let w = compare_on_sample(&f, &g, &Sample::new(vec![0.0, 0.0, 3.0])?)?;
    println!("witness {:?}: {:.10} vs {:.10}", w.sample, w.theta_f, w.theta_g);

    let wavy = forge_odd_h(&gaussian, &"cosine:a=0.1,b=1".parse()?)?;
    let r = verify_counterexample(&gaussian, &wavy, 2, 100, 1, 1e-7)?;
    println!("cosine h at n=2: agreement {}", r.fraction);
    match forge_odd_h(&gaussian, &"cosine:a=0.3,b=2".parse()?) {
        Err(e) => println!("cosine a=0.3 b=2 rejected: {e}"),
        Ok(_) => println!("cosine a=0.3 b=2 accepted"),
    }

    let split = subcritical_split(ExtendedReal::Finite(1.0), ExtendedReal::Finite(3.0), 3)?;
    println!("image (-1, 3) at n=3: identified {} unidentified {:?}", split.identified, split.unidentified);
    Ok(())
}
