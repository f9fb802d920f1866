// Cross-sectional rating and increment histograms, then the monthly moment
// series, on a simulated panel.

use rating_markov::{
    increment_histogram, moment_series, random_generator, rating_histogram, simulate, Sampling, Scenario, LABELS,
};

fn main() -> rating_markov::Result<()> {
    let q = random_generator(5, 0.6)?;
    let start = "2007-01-01".parse().unwrap();
    let end = "2010-01-01".parse().unwrap();
    let panel = simulate(&Scenario::homogeneous(q, 800, start, end, 5))?;

    let t = "2009-06-01".parse().unwrap();
    let ratings = rating_histogram(&panel, t)?;
    println!("ratings on {t} ({} banks)", ratings.total);
    for (k, n) in ratings.bins() {
        println!("  {:>2} {:<3} {}", k, LABELS[k as usize], "#".repeat(n as usize / 4));
    }
    let increments = increment_histogram(&panel, t, 365)?;
    println!("one-year increments");
    for (k, n) in increments.bins().filter(|(_, n)| *n > 0) {
        println!("  {k:>+3} {n}");
    }

    println!("\ndate        mean_R  var_R  mean_T  var_T  kurt_T");
    for row in moment_series(&panel, 365, Sampling::MonthStarts)?.iter().step_by(6) {
        let r = row.rating.expect("panel is never empty");
        match row.increment {
            Some(m) => println!(
                "{}  {:6.3} {:6.3} {:+7.3} {:6.3} {:7.3}",
                row.date,
                r.mean,
                r.variance,
                m.mean,
                m.variance,
                m.kurtosis.unwrap_or(f64::NAN)
            ),
            None => println!("{}  {:6.3} {:6.3}", row.date, r.mean, r.variance),
        }
    }
    Ok(())
}
