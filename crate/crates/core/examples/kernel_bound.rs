//! Pointwise bound on the forced radial wave from a bump source, compared
//! against its three-term majorant.

use radscatter::lemma::{check_kernel_bound, Derivative, SourceBump};

fn main() -> radscatter::Result<()> {
    let g = SourceBump::standard();
    let mut samples = Vec::new();
    for &(r, t) in &[(0.5, 1.0), (1.0, 2.0), (2.0, 1.0), (3.0, 4.0), (6.0, 5.0)] {
        for d in [Derivative::Value, Derivative::Radial, Derivative::Time] {
            samples.push((r, t, d));
        }
    }
    for n in [4, 5] {
        println!("n = {n}");
        for s in check_kernel_bound(n, &g, &samples, 1.0 / 32.0)? {
            println!(
                "  r = {:<6.3} t = {:<6.3} {:<7} |D L G| = {:.3e}  bound = {:.3e}  ratio {:.3}",
                s.r,
                s.t,
                format!("{:?}", s.derivative),
                s.lhs,
                s.rhs,
                s.ratio
            );
        }
    }
    Ok(())
}
