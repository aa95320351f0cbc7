//! Mass, positivity and the h-coefficients of the equilibrium measure on the arc.

use qhex::equilibrium::{self, Arc};

fn main() -> qhex::Result<()> {
    for c in [0.5, 1.0, 3.0] {
        let arc = Arc::new(c)?;
        let rep = equilibrium::equilibrium_measure_check(&arc, 64, 1e-8)?;
        let (h1, h2) = arc.h_coefficients_integral();
        println!(
            "c = {c}: mass {:.12}, min density {:.6e}, h1 = {h1:.10}, h2 = {h2:.10}",
            rep.mass, rep.min_density
        );
    }
    Ok(())
}
