//! Open-loop pitch step response against its closed-form solution.
//!
//! Run with: cargo run --example open_loop_step

use torpedo_smc::plant::TorpedoPlant;
use torpedo_smc::sim::rk4_step;

fn main() {
    let plant = TorpedoPlant::torpedo();
    let phi = vec![0.0; plant.state_dim()];
    let dt = 1e-3;
    let mut x = plant.state();

    println!("t      theta(simulated)  theta(analytic)   |error|");
    let mut worst = 0.0f64;
    for i in 0..1000 {
        x = rk4_step(
            |_, state| {
                let mut dx = vec![0.0; state.len()];
                plant.derivative_at(state, 1.0, &phi, &mut dx);
                dx
            },
            &x,
            i as f64 * dt,
            dt,
        )
        .expect("open-loop integration stays finite");

        let t = (i + 1) as f64 * dt;
        let mut probe = plant.clone();
        probe.set_state(&x);
        let (_, theta) = probe.outputs();
        // partial fractions of 7660 / (p^2 (p + 40)) driven by a unit step
        let analytic = 7660.0 * (t / 40.0 - (1.0 - (-40.0 * t).exp()) / 1600.0);
        worst = worst.max((theta - analytic).abs());
        if (i + 1) % 200 == 0 {
            println!("{t:<6.3} {theta:<17.9} {analytic:<17.9} {:.3e}", (theta - analytic).abs());
        }
    }
    println!("\nworst absolute error over 1 s: {worst:.3e} rad");
}
