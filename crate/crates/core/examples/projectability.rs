//! Projectability of a score image onto the zero-sum hyperplane, and the
//! minimal covering sample size that follows from it.

use mlechar::coverage::{brute_force_projectable, is_projectable, mcss, projection_interval};
use mlechar::extended::ExtendedReal;

fn main() -> mlechar::error::Result<()> {
    let images = [(1.0, 1.0), (1.0, 3.0), (0.5, 3.0), (2.0, 1.5)];
    for (pm, pp) in images {
        let (lo, hi) = (ExtendedReal::Finite(pm), ExtendedReal::Finite(pp));
        println!("image (-{pm}, {pp}): mcss = {}", mcss(lo, hi)?.value);
        for n in 2..=6 {
            println!(
                "  n={n} projection {} projectable {} (grid search agrees: {})",
                projection_interval(lo, hi, n),
                is_projectable(lo, hi, n)?,
                brute_force_projectable(pm, pp, n, 41)? == is_projectable(lo, hi, n)?,
            );
        }
    }

    let half_open = mcss(ExtendedReal::Finite(1.0), ExtendedReal::PlusInfinity)?;
    println!("image (-1, inf): mcss = {}", half_open.value);
    Ok(())
}
