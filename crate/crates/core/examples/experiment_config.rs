//! Running an experiment described in TOML, as the `collective` binary does.
//!
//! Configs name a realization, a Hamiltonian, initial data, an integrator and
//! an output kind. Output rendering is deterministic, so the CSV is identical
//! across runs and thread counts.
//!
//! ```bash
//! cargo run --release --example experiment_config
//! ```

use collective::experiment::{builtin, list_experiments, render_csv, run, ExperimentConfig};
use collective::Result;

const SOURCE: &str = r#"
name = "affine_small"
description = "two affine orbits, one on each side of p = 0"
t_span = [0.0, 2.0]

[realization]
kind = "affine_a1"

[hamiltonian]
kind = "custom_polynomial"
terms = [
    { coefficient = 1.0, powers = [1, 0] },
    { coefficient = 0.5, powers = [0, 2] },
]

[initial]
x = [[0.5, 1.5], [0.5, -1.5]]

[integrator]
method = { gauss = 2 }
dt = 0.5

[output]
kind = "orbit"
"#;

fn main() -> Result<()> {
    for (name, description) in list_experiments() {
        println!("{name:<20} {description}");
    }

    let cfg = ExperimentConfig::from_toml_str(SOURCE)?;
    cfg.validate()?;
    let out = run(&cfg)?;
    print!("\n{}", render_csv(&out));

    // builtins round-trip through the same format
    let fig2 = builtin("fig2_rigid_body").expect("builtin exists");
    assert_eq!(ExperimentConfig::from_toml_str(&fig2.to_toml_string())?, fig2);
    Ok(())
}
