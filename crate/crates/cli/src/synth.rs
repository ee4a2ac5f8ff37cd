use std::fmt::Write as _;
use std::path::Path;

use catchscope::eval::{generate_scenario, ScenarioSpec};
use catchscope::report::snapshots_to_csv;

use crate::store::write_atomic;
use crate::InputError;

pub fn run(scenario: &Path, out: &Path, seed: u64) -> anyhow::Result<()> {
    let text = std::fs::read_to_string(scenario)
        .map_err(|e| InputError(format!("cannot read scenario {}: {e}", scenario.display())))?;
    let spec = ScenarioSpec::from_toml(&text)?;
    let (snapshots, events) = generate_scenario(&spec, seed)?;
    write_atomic(
        &out.join("snapshots.csv"),
        snapshots_to_csv(&snapshots).as_bytes(),
    )?;
    let mut log = String::from("time,operator,visibility\n");
    for e in &events {
        writeln!(log, "{},{},{}", e.time, e.operator, e.visibility).unwrap();
    }
    write_atomic(&out.join("ground_truth.csv"), log.as_bytes())?;
    println!(
        "generated {} snapshots of {} networks with {} events (seed {seed}) in {}",
        snapshots.len(),
        spec.networks,
        events.len(),
        out.display()
    );
    Ok(())
}
