use gdro::data::{simulate, SimulationConfig};
use gdro::rwpi::select_lambda;
use gdro::solvers::*;
use gdro::Task;

fn main() {
    for n in [50usize, 500] {
        let config = SimulationConfig::new(n, 3, Task::Linear);
        let (data, _) = simulate(&config).unwrap();
        let sel = select_lambda(&data, 0.05, 20_000, 1).unwrap();
        let fit = fit_gsrl_linear(&data, sel.lambda, &SolverOptions::default()).unwrap();
        let w = sqrt_size_weights(&data.part);
        let sigma = fit.sigma_hat.unwrap();
        let kkt = kkt_residual(&data, &fit.beta, 2.0 * sigma * sel.lambda, &w);
        eprintln!(
            "n={n} lambda={:.4} conv={} iters={} kkt(effective)={:.3e} sigma={:.4}",
            sel.lambda, fit.converged, fit.iterations, kkt, sigma
        );
    }
}
