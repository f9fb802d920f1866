// Estimate a generator from simulated histories with the duration
// estimator and compare it with the true generator and with the cohort
// matrix over the same window.

use rating_markov::estimation::write_matrix;
use rating_markov::{
    count_transitions, empirical_transition_matrix, estimate_generator, exposures, matrix_exponential,
    random_generator, simulate, Scenario, Window,
};

fn main() -> rating_markov::Result<()> {
    let q = random_generator(11, 0.5)?;
    let window = Window::new("2007-01-01".parse().unwrap(), "2010-01-01".parse().unwrap())?;
    let panel = simulate(&Scenario::homogeneous(q.clone(), 3000, window.start, window.end, 11))?;

    let counts = count_transitions(&panel, window)?;
    let exposure = exposures(&panel, window)?;
    let q_hat = estimate_generator(&counts, &exposure)?;
    println!("{} transitions over {:.1} bank-years", counts.total(), exposure.total());

    let diff = q_hat.matrix() - q.matrix();
    println!("relative Frobenius error {:.4}", diff.norm() / q.matrix().norm());
    println!("\nstate  exit rate (true)  exit rate (estimated)");
    for i in (0..q.dim()).step_by(2) {
        println!("{:>5}  {:16.4}  {:21.4}", i, q.exit_rate(i), q_hat.exit_rate(i));
    }

    // one-year window: exp(Q_hat) against the cohort frequencies
    let year = Window::new(window.start, "2008-01-01".parse().unwrap())?;
    let implied = matrix_exponential(&q_hat, 1.0)?;
    let cohort = empirical_transition_matrix(&panel, year)?;
    let gap = (implied.matrix() - cohort.matrix()).abs().max();
    println!("\nlargest |exp(Q_hat) - cohort| entry over one year: {gap:.4}");

    println!("\nestimated generator:");
    write_matrix(std::io::stdout().lock(), q_hat.matrix())
}
