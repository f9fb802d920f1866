// Chapman-Kolmogorov deviation on a homogeneous panel and on one where
// each downgrade raises the bank's downgrade rates for 90 days.

use rating_markov::{random_generator, rolling_series, simulate, Excitation, Scenario, Statistic, WindowLength};

fn main() -> rating_markov::Result<()> {
    let start = "2007-01-01".parse().unwrap();
    let end = "2010-01-01".parse().unwrap();
    let q = random_generator(6, 4.0)?;
    let plain = simulate(&Scenario::homogeneous(q.clone(), 2000, start, end, 6))?;
    let excitation = Excitation { factor: 5.0, days: 90 };
    let excited = simulate(&Scenario::excited(q, excitation, 2000, start, end, 6))?;

    let a = rolling_series(&plain, Statistic::ChapmanKolmogorov, WindowLength::Year)?;
    let b = rolling_series(&excited, Statistic::ChapmanKolmogorov, WindowLength::Year)?;
    println!("window start  homogeneous  excited");
    for (x, y) in a.points.iter().zip(&b.points).step_by(3) {
        println!("{}  {:11.4}  {:7.4}", x.window.start, x.value, y.value);
    }
    let mean = |s: &rating_markov::TestSeries| s.values().sum::<f64>() / s.points.len() as f64;
    println!("\nmean deviation: {:.4} vs {:.4}", mean(&a), mean(&b));
    Ok(())
}
