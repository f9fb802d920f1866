// Parse an event CSV into a panel and print the daily rated-bank count and
// the moving transitions-per-bank ratio.

use rating_markov::{daily_counts, parse_panel, transitions_per_bank};

const EVENTS: &str = "\
bank_id,date,rating
alpha,2006-11-20,B
alpha,2007-04-02,B-
alpha,2007-09-17,C+
beta,2007-01-01,A-
beta,2007-06-30,WR
gamma,2007-03-01,D
gamma,2007-03-01,D
gamma,2007-08-01,D+
delta,2007-05-15,C
delta,2007-07-01,C
";

fn main() -> rating_markov::Result<()> {
    let start = "2007-01-01".parse().unwrap();
    let end = "2007-12-31".parse().unwrap();
    let panel = parse_panel(EVENTS.as_bytes(), start, end)?;

    for h in panel.histories() {
        let path: Vec<String> = h.events().iter().map(|e| format!("{} {}", e.date, e.state)).collect();
        println!("{:<6} until {}: {}", h.bank_id(), h.coverage_end(), path.join(" -> "));
    }

    let counts = daily_counts(&panel);
    let ratios = transitions_per_bank(&panel, 90)?;
    println!("\ndate        rated  transitions/bank (90d)");
    for (date, n) in counts.iter().step_by(30) {
        let ratio = ratios.iter().find(|(d, _)| d == date).map(|(_, r)| format!("{r:.3}"));
        println!("{date}  {n:>5}  {}", ratio.unwrap_or_default());
    }
    println!("\n{} transitions in total", panel.n_transitions());
    Ok(())
}
