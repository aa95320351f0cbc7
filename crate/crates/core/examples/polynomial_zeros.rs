//! Zeros of P_N(z; e^{c/2N}, N) approach the arc as N grows.

use qhex::asymptotics;

fn main() -> qhex::Result<()> {
    let c = 1.0;
    for set in asymptotics::zeros_many(&[10, 20, 40, 80], c)? {
        println!("N = {:3}: max distance to arc {:.3e}", set.n, set.max_distance());
    }
    Ok(())
}
