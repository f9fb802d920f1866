// Transition matrices from a generator: the two-state closed form, the
// semigroup property and row sums.

use nalgebra::DMatrix;
use rating_markov::{matrix_exponential, random_generator, GeneratorMatrix, N_STATES};

fn main() -> rating_markov::Result<()> {
    // C <-> C+ at one move per year, every other state absorbing
    let mut rates = DMatrix::zeros(N_STATES, N_STATES);
    rates[(7, 8)] = 1.0;
    rates[(8, 7)] = 1.0;
    let q = GeneratorMatrix::from_rates(rates)?;
    let m = matrix_exponential(&q, 1.0)?;
    println!("P(C -> C, 1y)  = {:.9}", m.get(7, 7));
    println!("0.5 (1 + e^-2) = {:.9}", 0.5 * (1.0 + (-2.0f64).exp()));

    let q = random_generator(3, 1.2)?;
    let half = matrix_exponential(&q, 0.5)?;
    let full = matrix_exponential(&q, 1.0)?;
    let gap = (half.then(&half) - full.matrix()).abs().max();
    println!("\nmax |M(0.5) M(0.5) - M(1)| = {gap:.2e}");

    for t in [0.25, 1.0, 5.0, 25.0] {
        let m = matrix_exponential(&q, t)?;
        let worst = m
            .matrix()
            .row_iter()
            .map(|r| (r.sum() - 1.0).abs())
            .fold(0.0, f64::max);
        println!("t = {t:>5}: P(stay in C) = {:.4}, worst row-sum error {worst:.1e}", m.get(7, 7));
    }
    Ok(())
}
