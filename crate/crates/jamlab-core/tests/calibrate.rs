use jamlab_core::constellation::ConstellationSpec;
use jamlab_core::demod::{generate_dataset, train, Activation, Optimizer, TrainConfig};
use jamlab_core::IqSample;

fn eval(order: usize, cfg: TrainConfig, snr: f64, tag: &str) {
    let spec = ConstellationSpec::qam(order).unwrap();
    let ds = generate_dataset(&spec, 1000, snr, cfg.seed).unwrap();
    let t0 = std::time::Instant::now();
    let model = match train(&ds, &cfg) {
        Ok(m) => m,
        Err(e) => {
            println!("{tag}: TRAIN ERR {e}");
            return;
        }
    };
    let dt = t0.elapsed().as_secs_f64();

    let held = generate_dataset(&spec, 1000, snr, cfg.seed.wrapping_add(1)).unwrap();
    let correct = held
        .inputs
        .iter()
        .zip(&held.targets)
        .filter(|(x, &t)| model.predict(**x) == t)
        .count();
    let held_acc = correct as f64 / held.inputs.len() as f64;

    let n = 200;
    let mut agree = 0usize;
    let mut disagree_inner = 0usize;
    let mut disagree_outer = 0usize;
    for a in 0..n {
        for b in 0..n {
            let x = IqSample::new(
                -1.5 + 3.0 * (a as f64 + 0.5) / n as f64,
                -1.5 + 3.0 * (b as f64 + 0.5) / n as f64,
            );
            if model.predict(x) == spec.nearest_point(x) {
                agree += 1;
            } else if x.i.abs() < 1.1 && x.q.abs() < 1.1 {
                disagree_inner += 1;
            } else {
                disagree_outer += 1;
            }
        }
    }
    let agree_frac = agree as f64 / (n * n) as f64;
    print!("inner/outer miss {disagree_inner}/{disagree_outer}  ");

    // distance from each clean point to the nearest learned boundary along
    // a dense circle scan: bisect radius where prediction first flips
    let mut worst_ratio_lo = f64::INFINITY;
    let mut worst_ratio_hi = 0.0f64;
    let half = spec.min_distance() / 2.0;
    for s in 0..order {
        let p = spec.point(s);
        let mut best_r = f64::INFINITY;
        for k in 0..720 {
            let th = k as f64 * std::f64::consts::TAU / 720.0;
            let dir = IqSample::new(th.cos(), th.sin());
            let mut lo = 0.0;
            let mut hi = 2.0 * spec.min_distance();
            if model.predict(p + dir * hi) == s {
                continue;
            }
            for _ in 0..40 {
                let mid = 0.5 * (lo + hi);
                if model.predict(p + dir * mid) == s {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            best_r = best_r.min(hi);
        }
        let ratio = best_r / half;
        worst_ratio_lo = worst_ratio_lo.min(ratio);
        worst_ratio_hi = worst_ratio_hi.max(ratio);
    }

    println!(
        "{tag}: train {dt:.2}s held {held_acc:.4} grid {agree_frac:.4} boundary-dist ratio [{worst_ratio_lo:.3}, {worst_ratio_hi:.3}]"
    );
}

#[test]
fn calibrate() {
    let adam = |epochs: usize, lr: f64, wd: f64| TrainConfig {
        hidden: 32,
        epochs,
        learning_rate: lr,
        activation: Activation::Tanh,
        optimizer: Optimizer::Adam { beta1: 0.9, beta2: 0.999, eps: 1e-8 },
        weight_decay: wd,
        seed: 42,
    };
    let mom = |epochs: usize, lr: f64| TrainConfig {
        optimizer: Optimizer::Momentum { beta: 0.9 },
        ..adam(epochs, lr, 0.0)
    };
    let _ = mom;
    eval(16, adam(500, 0.05, 3e-3), 15.0, "adam e500 lr.05 wd3e-3");
    eval(16, adam(500, 0.05, 1e-2), 15.0, "adam e500 lr.05 wd1e-2");
    eval(16, adam(1000, 0.05, 3e-3), 15.0, "adam e1000 lr.05 wd3e-3");
    eval(16, adam(500, 0.05, 3e-2), 15.0, "adam e500 lr.05 wd3e-2");
    eval(
        16,
        TrainConfig { hidden: 64, ..adam(500, 0.05, 3e-3) },
        15.0,
        "adam e500 h64 wd3e-3",
    );
}
