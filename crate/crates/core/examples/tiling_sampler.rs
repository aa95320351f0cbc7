//! Glauber dynamics for q^{-Volume} plane partitions against exact marginals.

use qhex::sampler;

fn main() -> qhex::Result<()> {
    let (n, q) = (3, 1.2);
    let st = sampler::stats(n, q, 1000, 100_000, 7, 1)?;
    let exact = sampler::exact_tile_marginals(&sampler::ensemble(n, &q)?);
    println!("max per-site TV: {:.4}", sampler::max_site_tv(&st.frequencies, &exact));

    let run = sampler::sample(10, 1.05, 500, 2000, 7)?;
    println!("N = 10 sample, volume {}", run.state.volume());
    for row in &run.state.pi {
        println!("  {row:?}");
    }
    Ok(())
}
