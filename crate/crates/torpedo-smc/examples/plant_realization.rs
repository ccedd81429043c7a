//! From factored models to simulation-ready state space.
//!
//! Expands the two torpedo channels from zero/pole/gain form into transfer
//! functions, realizes them in controllable companion form, and shows the
//! two representations agreeing across the frequency band.
//!
//! Run with: cargo run --example plant_realization

use torpedo_smc::plant::{immersion_model, inclination_model};

fn main() {
    for (name, model) in [
        ("immersion (depth)", immersion_model()),
        ("inclination (pitch)", inclination_model()),
    ] {
        println!("=== {name} ===");
        println!(
            "zeros {:?}  poles {:?}  gain {}",
            model.zeros, model.poles, model.gain
        );

        let tf = model.to_tf().expect("stock models are strictly proper");
        println!("num {:?}", tf.num());
        println!("den {:?}", tf.den());

        let ss = tf.to_state_space();
        let n = ss.order();
        println!("companion A ({n}x{n}):");
        for i in 0..n {
            let row: Vec<f64> = (0..n).map(|j| ss.a(i, j)).collect();
            println!("  {row:?}");
        }
        println!("B {:?}", (0..n).map(|i| ss.b(i)).collect::<Vec<_>>());
        println!("C {:?}", (0..n).map(|j| ss.c(j)).collect::<Vec<_>>());
        println!("D {}", ss.d());

        let mut worst = 0.0f64;
        for i in 0..20 {
            let omega = 10f64.powf(-2.0 + 5.0 * i as f64 / 19.0);
            let h_tf = tf.freq_response(omega);
            let h_ss = ss.freq_response(omega).unwrap();
            worst = worst.max((h_tf - h_ss).norm() / h_tf.norm());
        }
        println!("worst tf-vs-ss relative error over 20 log-spaced frequencies: {worst:.3e}\n");
    }
}
