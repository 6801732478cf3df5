//! Forced radial wave: a source acting for a finite time, then free
//! propagation with conserved discrete energy.

use radscatter::radial_wave::{RadialWaveSolver, SolverConfig};

fn main() -> radscatter::Result<()> {
    let n = 5;
    let solver = RadialWaveSolver::new(n, &SolverConfig { cfl: SolverConfig::default_cfl(n), dr: 1.0 / 32.0, r_max: 40.0 })?;
    let window = solver.window(-1.0, 12.0)?;
    let radii = solver.grid.radii();
    // Smooth pulse centred at r = 3, switched off for t > 2.
    let u = solver.duhamel(
        |i, out| {
            let t = window.t(i);
            for (o, &r) in out.iter_mut().zip(&radii) {
                *o = if t.abs() < 2.0 { (-(r - 3.0).powi(2) * 4.0).exp() * (1.0 - (t / 2.0).powi(2)).powi(3) } else { 0.0 };
            }
        },
        window,
        20.0,
    );

    let energy = |i: usize| solver.discrete_energy(u.u.row(i).as_slice().unwrap(), u.u.row(i + 1).as_slice().unwrap());
    let after = (0..u.nt()).find(|&i| u.t(i) > 2.5).unwrap();
    let last = u.nt() - 2;
    println!("energy at t = {:.2}: {:.10e}", u.t(after), energy(after));
    println!("energy at t = {:.2}: {:.10e}", u.t(last), energy(last));
    println!("relative change {:.2e}", (energy(last) / energy(after) - 1.0).abs());

    let i = u.nt() - 1;
    let (j, peak) = (0..u.grid.len).map(|j| (j, u.u[[i, j]].abs())).fold((0, 0.0), |b, x| if x.1 > b.1 { x } else { b });
    println!("at t = {:.2} the pulse peaks at r = {:.3} with |u| = {peak:.4e}", u.t(i), u.grid.r(j));
    Ok(())
}
