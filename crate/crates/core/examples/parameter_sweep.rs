//! Sweep p through a config and print the resulting table.

use radscatter::cli::{cmd_sweep, RunConfig};

fn main() -> radscatter::Result<()> {
    let out = std::env::temp_dir().join("radscatter-sweep-example");
    let cfg = RunConfig::from_toml_str(&format!(
        r#"
output = "{}"

[scenario]
n = 5
p = 1.9
k = 2.3
kappa = 2.5
eps = 1e-3
v0 = 1e-3

[solver]
dr = 0.25
t_min = -60.0
t_max = 60.0

[fit]
t_lo = 2.0
t_hi = 30.0

[sweep]
p = [1.85, 1.9, 1.95, 1.5]
"#,
        out.display()
    ))?;
    let outcome = cmd_sweep(&cfg)?;
    println!("manifest: {}", outcome.manifest_path.display());
    print!("{}", std::fs::read_to_string(out.join("sweep.csv"))?);
    Ok(())
}
