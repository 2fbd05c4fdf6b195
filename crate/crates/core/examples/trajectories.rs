//! Measurement records from the direct simulator and the branch engine,
//! compared with the exact moments of the branch engine.

use fluctmon::measurement::{BranchEngine, MeasurementSchedule, TrajectoryRunner};
use fluctmon::spin::{ground_state, magnetization_observable, GroundStateOptions, IsingChain, Propagator};

fn main() -> fluctmon::error::Result<()> {
    let sites = 8;
    let chain = IsingChain::periodic(sites, -2.0 / 3.0)?;
    let psi = ground_state(&chain, &GroundStateOptions::default())?.state;
    let obs = magnetization_observable(sites, 0.5, &psi)?;
    let prop = Propagator::new(&chain, 1e-10)?;
    let schedule = MeasurementSchedule::uniform(&[0.0, 1.0, 2.0], 1.0)?;

    let direct = TrajectoryRunner::new(&psi, &prop, &obs, &schedule)?;
    let branch = BranchEngine::new(&psi, &prop, &obs, &schedule)?;
    println!("offsets: {:.6?}", direct.offsets());
    println!("branches at the last event: {:?}", BranchEngine::branch_count(sites, 3));
    println!("total probability: {:.12}", branch.total_probability());

    let shots = 5_000u64;
    let mut second = [[0.0; 3]; 2];
    for i in 0..shots {
        let a = direct.run(11, i)?.outcomes;
        let b = branch.run(11, i).outcomes;
        for k in 0..3 {
            second[0][k] += a[k] * a[k] / shots as f64;
            second[1][k] += b[k] * b[k] / shots as f64;
        }
    }
    let exact = branch.exact_moments();
    for k in 0..3 {
        println!(
            "<m_{k}^2>: direct {:.4}, branch {:.4}, exact {:.4}",
            second[0][k],
            second[1][k],
            exact.second[(k, k)]
        );
    }
    Ok(())
}
