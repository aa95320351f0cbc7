//! Build P_n(z; q, N) for q = 6/5, N = 3 and check orthogonality exactly.

use num_rational::BigRational;
use num_traits::Zero;
use qhex::qcore;
use qhex::scalar::parse_rational;

fn main() -> qhex::Result<()> {
    let n_half = 3;
    let q = parse_rational("6/5")?;
    let m = qcore::moments(n_half, &q)?;
    for n in 0..2 * n_half {
        let p = qcore::op_closed_form(n, n_half, &q)?;
        let hankel = qcore::op_via_hankel(n, n_half, &q)?;
        assert_eq!(p, hankel);
        let worst = (0..n)
            .filter(|&k| {
                let mut zk = vec![BigRational::zero(); k + 1];
                zk[k] = BigRational::from_integer(1.into());
                !m.pairing(&zk, &p).is_zero()
            })
            .count();
        let coeffs: Vec<String> = p.iter().map(|c| c.to_string()).collect();
        println!("P_{n}: [{}]  nonzero pairings: {worst}", coeffs.join(", "));
    }
    Ok(())
}
