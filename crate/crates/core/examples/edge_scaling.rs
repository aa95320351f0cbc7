//! Rescaled kernel near the frozen boundary next to the extended Airy kernel.

use qhex::kernel::{self, EdgeScalingJob};

fn main() -> qhex::Result<()> {
    let table = kernel::edge_scaling_diagnostic(&EdgeScalingJob::new(1.0))?;
    println!("{:>4} {:>5} {:>5} {:>12} {:>12} {:>12}", "N", "x", "y", "scaled", "target", "deviation");
    for r in &table.rows {
        println!(
            "{:>4} {:>5} {:>5} {:>12.6} {:>12.6} {:>12.6}",
            r.n, r.x, r.y, r.scaled, r.target, r.deviation
        );
    }
    println!("improves: {}", table.improves);
    Ok(())
}
