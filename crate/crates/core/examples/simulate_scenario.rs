// Load a scenario file, simulate it, and write the panel as event CSV.
//
// ```text
// cargo run --example simulate_scenario -- scenarios/regime_switch.toml
// ```

use std::path::PathBuf;

use rating_markov::simulator::ScenarioConfig;
use rating_markov::{simulate, write_panel};

fn main() -> rating_markov::Result<()> {
    let path = std::env::args_os()
        .skip(1)
        .map(PathBuf::from)
        .find(|p| p.extension().is_some_and(|e| e == "toml"))
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("scenarios/excited.toml"));
    let scenario = ScenarioConfig::from_path(&path)?.to_scenario()?;
    let panel = simulate(&scenario)?;
    println!(
        "{:?}: {} banks, {} transitions between {} and {}",
        scenario.kind,
        panel.len(),
        panel.n_transitions(),
        panel.start(),
        panel.end()
    );

    let mut csv = Vec::new();
    write_panel(&panel, &mut csv)?;
    let text = String::from_utf8(csv).expect("csv is utf-8");
    for line in text.lines().take(12) {
        println!("{line}");
    }
    println!("... {} rows", text.lines().count() - 1);
    Ok(())
}
