//! Driving the harness from a JSON config, as the `ocrs` binary does.

use ocrs::harness::{run, ExperimentConfig};
use ocrs::Result;

fn main() -> Result<()> {
    let config = ExperimentConfig::from_json(
        r#"{
            "schema_version": 1,
            "mode": "ocrs",
            "matroid": {"family": "uniform", "n": 2, "rank": 1},
            "marginals": {"kind": "custom", "values": [0.25, 0.25]},
            "lambda": 0.5,
            "eps": 0.05,
            "trials": 1000,
            "seed": 11
        }"#,
    )?;
    let report = run(&config)?;
    print!("{}", report.to_csv());
    for v in &report.verdicts {
        println!(
            "{} pass={} exit code {}",
            v.check,
            v.pass,
            report.exit_code()
        );
    }
    Ok(())
}
