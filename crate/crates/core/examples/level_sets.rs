//! Level lines of Re Φ_c through a saddle on the positive axis.

use qhex::arctic;
use qhex::equilibrium::Arc;

fn main() -> qhex::Result<()> {
    let arc = Arc::new(1.0)?;
    let s = arc.rho / 2.0;
    for line in arctic::level_set_trace(&arc, s, 1e-2 * arc.rho, 50.0 * arc.rho)? {
        println!(
            "start angle {:+.4}, {} points, returns to the axis at {:?}",
            line.start_angle,
            line.points.len(),
            line.hit
        );
    }
    Ok(())
}
