//! Exact correlation functions from the kernel, checked against enumeration.

use qhex::kernel::{self, ContourSpec, FiniteKernel, KernelQuery};
use qhex::sampler;
use qhex::scalar::parse_rational;

fn main() -> qhex::Result<()> {
    let q = parse_rational("13/10")?;
    let kern = FiniteKernel::new(2, &q)?;
    let ens = sampler::ensemble(2, &q)?;
    let pts = [(1, 1), (2, 2), (3, 2)];
    let from_kernel = kern.correlation(&pts)?;
    let direct = ens.occupation(&pts.map(|(x, y)| (x as usize, y)));
    println!("rho_3 = {from_kernel} (enumeration {direct})");

    let kf = FiniteKernel::new(2, &1.3)?;
    let qr = KernelQuery::new(2, 2, 1, 1);
    let v = kernel::correlation_kernel(&qr, &kf, &ContourSpec::for_model(2, 1.3))?;
    println!("K(2,2;1,1): exact {}, quadrature {} ({} nodes)", kf.value(&qr)?, v.value, v.nodes);
    Ok(())
}
