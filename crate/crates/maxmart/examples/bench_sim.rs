use maxmart::embeddings::StoppingRule;
use maxmart::paths::{run_stopped, SimConfig};

fn main() {
    // exit [-1,1] at dt=1e-4: E T = 1 => ~1e4 steps/path
    let cfg = SimConfig::new(1e-4, 50.0, 20_000, 7, 0.05).unwrap();
    let t0 = std::time::Instant::now();
    let outs = run_stopped(&cfg, &StoppingRule::first_exit(-1.0, 1.0)).unwrap();
    let el = t0.elapsed().as_secs_f64();
    let stopped = outs.iter().filter(|o| o.stopped).count();
    let mean_t: f64 = outs.iter().map(|o| o.t).sum::<f64>() / outs.len() as f64;
    let mean_ell: f64 = outs.iter().map(|o| o.ell).sum::<f64>() / outs.len() as f64;
    let p_pos = outs.iter().filter(|o| o.value > 0.0).count() as f64 / outs.len() as f64;
    let total_steps: u64 = outs.iter().map(|o| o.step).sum();
    println!("elapsed {:.2}s, {} stopped, mean T {:.4}, mean ell {:.4}, P(B>0) {:.4}", el, stopped, mean_t, mean_ell, p_pos);
    println!("{:.1} Msteps/s total ({} steps)", total_steps as f64 / el / 1e6, total_steps);
}
