//! The frozen boundary for a few values of c, and c*.

use qhex::arctic;
use qhex::equilibrium::Arc;

fn main() -> qhex::Result<()> {
    for c in [0.01, 1.0, 5.0] {
        let arc = Arc::new(c)?;
        let seg = arctic::boundary_segment(&arc, 8)?;
        println!("c = {c}");
        for (s, p) in seg {
            println!("  s = {s:10.5}  (xi, eta) = ({:+.6}, {:+.6})", p.xi, p.eta);
        }
        println!("  inflection points: {}", arctic::inflection_points(&arc, 400)?.len());
    }
    println!("c* = {:.8}", arctic::find_c_star()?);
    Ok(())
}
