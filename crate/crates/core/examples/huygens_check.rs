//! Compactly supported data: nothing is left behind the wave in odd
//! dimensions, a tail remains in even ones.

use radscatter::fields::{make_initial_data, Profile};
use radscatter::radial_wave::{RadialWaveSolver, SolverConfig};

fn main() -> radscatter::Result<()> {
    let data = make_initial_data(Profile::Bump, 1.0, 2.3)?;
    for n in [4, 5, 6, 7] {
        let solver = RadialWaveSolver::new(n, &SolverConfig { cfl: SolverConfig::default_cfl(n), dr: 1.0 / 64.0, r_max: 32.0 })?;
        let window = solver.window(-16.0, 16.0)?;
        let u = solver.solve_homogeneous(&data, window, 32.0);
        let mut inside = 0.0f64;
        for i in 0..u.nt() {
            let t = u.t(i).abs();
            for j in 0..u.grid.len {
                // Data live in r < 1; keep two cells of stencil margin.
                if u.grid.r(j) < t - 1.0 - 2.0 * u.grid.dr {
                    inside = inside.max(u.u[[i, j]].abs());
                }
            }
        }
        println!("n = {n}: peak {:.3e}, largest value behind the wave {inside:.3e}", u.max_abs());
    }
    Ok(())
}
