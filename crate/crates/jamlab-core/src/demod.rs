//! Demodulators: the minimum-distance decision rule and a small trained
//! feed-forward classifier with input gradients for the attack engine.
//!
//! The learned model is 2 → hidden → M with a smooth saturating hidden
//! activation and softmax cross-entropy on top. Training is plain
//! full-batch gradient descent in f64, which makes it bit-reproducible
//! from the seed. Gradients with respect to the *input* are exposed for
//! the attack engine and are checked against central finite differences.

use std::fmt;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use rand::Rng;
use rand::seq::SliceRandom;

use crate::channel::NoiseSpec;
use crate::constellation::ConstellationSpec;
use crate::error::{Error, Result};
use crate::iq::IqSample;
use crate::rng::seeded_rng;

/// Hidden-layer activation. Both choices are smooth and saturating, which
/// keeps input gradients informative for gradient attacks.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Activation {
    Tanh,
    Sigmoid,
}

impl Activation {
    fn apply(self, x: f64) -> f64 {
        match self {
            Activation::Tanh => x.tanh(),
            Activation::Sigmoid => 1.0 / (1.0 + (-x).exp()),
        }
    }

    /// Derivative expressed through the activation output.
    fn derivative_from_output(self, y: f64) -> f64 {
        match self {
            Activation::Tanh => 1.0 - y * y,
            Activation::Sigmoid => y * (1.0 - y),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Activation::Tanh => "tanh",
            Activation::Sigmoid => "sigmoid",
        }
    }

    pub fn parse(name: &str) -> Option<Activation> {
        match name {
            "tanh" => Some(Activation::Tanh),
            "sigmoid" => Some(Activation::Sigmoid),
            _ => None,
        }
    }
}

impl fmt::Display for Activation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Labeled I/Q samples for supervised demodulator training.
#[derive(Clone, Debug)]
pub struct Dataset {
    pub inputs: Vec<IqSample>,
    pub targets: Vec<usize>,
    pub snr_db: f64,
    pub seed: u64,
    pub order: usize,
}

/// `per_class` noisy copies of every constellation point at the given SNR,
/// shuffled deterministically by the seed. `snr_db = f64::INFINITY` means
/// no noise at all.
pub fn generate_dataset(
    spec: &ConstellationSpec,
    per_class: usize,
    snr_db: f64,
    seed: u64,
) -> Result<Dataset> {
    if per_class == 0 {
        return Err(Error::EmptyDataset);
    }
    let noise = NoiseSpec::from_snr_db(snr_db, 1.0, seed)?;
    let mut rng = seeded_rng(seed);
    let mut inputs = Vec::with_capacity(per_class * spec.order());
    let mut targets = Vec::with_capacity(per_class * spec.order());
    for symbol in 0..spec.order() {
        for _ in 0..per_class {
            inputs.push(spec.point(symbol) + noise.sample_into(&mut rng));
            targets.push(symbol);
        }
    }
    let mut perm: Vec<usize> = (0..inputs.len()).collect();
    perm.shuffle(&mut rng);
    Ok(Dataset {
        inputs: perm.iter().map(|&k| inputs[k]).collect(),
        targets: perm.iter().map(|&k| targets[k]).collect(),
        snr_db,
        seed,
        order: spec.order(),
    })
}

/// Full-batch weight update rule.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Optimizer {
    /// Plain gradient descent.
    Gd,
    /// Heavy-ball momentum.
    Momentum { beta: f64 },
    /// Adam with the usual moment estimates.
    Adam { beta1: f64, beta2: f64, eps: f64 },
}

/// Training hyperparameters. The defaults train a 16QAM demodulator to
/// clean-point perfection in a couple of seconds.
#[derive(Clone, Copy, Debug)]
pub struct TrainConfig {
    pub hidden: usize,
    pub epochs: usize,
    pub learning_rate: f64,
    pub activation: Activation,
    pub optimizer: Optimizer,
    pub weight_decay: f64,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> TrainConfig {
        TrainConfig {
            hidden: 32,
            epochs: 200,
            learning_rate: 0.05,
            activation: Activation::Tanh,
            optimizer: Optimizer::Adam { beta1: 0.9, beta2: 0.999, eps: 1e-8 },
            weight_decay: 0.0,
            seed: 0,
        }
    }
}

/// Metadata recorded alongside the weights.
#[derive(Clone, Copy, Debug)]
pub struct TrainMeta {
    pub epochs: usize,
    pub learning_rate: f64,
    pub seed: u64,
    pub train_snr_db: f64,
}

/// The trained demodulation classifier.
#[derive(Clone, Debug)]
pub struct DemodModel {
    order: usize,
    hidden: usize,
    activation: Activation,
    /// hidden × 2, row-major.
    w1: Vec<f64>,
    b1: Vec<f64>,
    /// order × hidden, row-major.
    w2: Vec<f64>,
    b2: Vec<f64>,
    meta: TrainMeta,
}

impl DemodModel {
    pub fn order(&self) -> usize {
        self.order
    }

    pub fn hidden(&self) -> usize {
        self.hidden
    }

    pub fn activation(&self) -> Activation {
        self.activation
    }

    pub fn meta(&self) -> &TrainMeta {
        &self.meta
    }

    fn forward_into(&self, x: IqSample, hidden: &mut [f64], scores: &mut [f64]) {
        for h in 0..self.hidden {
            let z = self.w1[2 * h] * x.i + self.w1[2 * h + 1] * x.q + self.b1[h];
            hidden[h] = self.activation.apply(z);
        }
        for m in 0..self.order {
            let row = &self.w2[m * self.hidden..(m + 1) * self.hidden];
            let mut z = self.b2[m];
            for h in 0..self.hidden {
                z += row[h] * hidden[h];
            }
            scores[m] = z;
        }
    }

    /// Raw output scores (pre-softmax) for one sample.
    pub fn scores(&self, x: IqSample) -> Vec<f64> {
        let mut hidden = vec![0.0; self.hidden];
        let mut scores = vec![0.0; self.order];
        self.forward_into(x, &mut hidden, &mut scores);
        scores
    }

    /// Predicted symbol: argmax of the scores, ties toward the lowest index.
    pub fn predict(&self, x: IqSample) -> usize {
        argmax(&self.scores(x))
    }

    /// Predictions for a whole waveform, reusing scratch buffers.
    pub fn predict_batch(&self, xs: &[IqSample]) -> Vec<usize> {
        let mut hidden = vec![0.0; self.hidden];
        let mut scores = vec![0.0; self.order];
        xs.iter()
            .map(|&x| {
                self.forward_into(x, &mut hidden, &mut scores);
                argmax(&scores)
            })
            .collect()
    }

    /// Softmax cross-entropy loss of one sample at the given label.
    pub fn loss(&self, x: IqSample, target: usize) -> f64 {
        let scores = self.scores(x);
        log_sum_exp(&scores) - scores[target]
    }

    /// Gradient of the cross-entropy loss at `target` with respect to the
    /// input coordinates.
    pub fn input_gradient(&self, x: IqSample, target: usize) -> IqSample {
        let mut hidden = vec![0.0; self.hidden];
        let mut scores = vec![0.0; self.order];
        self.forward_into(x, &mut hidden, &mut scores);
        let probs = softmax(&scores);

        // dL/dz2 = p - onehot(target); pull back through W2, the hidden
        // nonlinearity and W1.
        let mut gi = 0.0;
        let mut gq = 0.0;
        for h in 0..self.hidden {
            let mut dh = 0.0;
            for m in 0..self.order {
                let dz2 = probs[m] - if m == target { 1.0 } else { 0.0 };
                dh += self.w2[m * self.hidden + h] * dz2;
            }
            let dz1 = dh * self.activation.derivative_from_output(hidden[h]);
            gi += self.w1[2 * h] * dz1;
            gq += self.w1[2 * h + 1] * dz1;
        }
        IqSample::new(gi, gq)
    }

    /// Write the model in the documented `jamlab-demod v1` text layout.
    pub fn save(&self, path: &Path) -> Result<()> {
        let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
        let mut w = BufWriter::new(file);
        self.write_to(&mut w).map_err(|e| Error::io(path, e))
    }

    /// Serialize to any writer. Floats use Rust's shortest round-trip
    /// formatting, so a load returns bit-identical weights.
    pub fn write_to<W: Write>(&self, w: &mut W) -> std::io::Result<()> {
        writeln!(w, "jamlab-demod v1")?;
        writeln!(w, "order {}", self.order)?;
        writeln!(w, "hidden {}", self.hidden)?;
        writeln!(w, "activation {}", self.activation)?;
        writeln!(w, "epochs {}", self.meta.epochs)?;
        writeln!(w, "learning_rate {}", self.meta.learning_rate)?;
        writeln!(w, "seed {}", self.meta.seed)?;
        writeln!(w, "train_snr_db {}", self.meta.train_snr_db)?;
        write_matrix(w, "w1", &self.w1, self.hidden, 2)?;
        write_matrix(w, "b1", &self.b1, 1, self.hidden)?;
        write_matrix(w, "w2", &self.w2, self.order, self.hidden)?;
        write_matrix(w, "b2", &self.b2, 1, self.order)?;
        writeln!(w, "end")
    }

    pub fn load(path: &Path) -> Result<DemodModel> {
        let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
        DemodModel::read_from(BufReader::new(file))
    }

    pub fn read_from<R: Read>(r: R) -> Result<DemodModel> {
        let mut lines = BufReader::new(r).lines();
        let mut next = || -> Result<String> {
            lines
                .next()
                .ok_or_else(|| Error::ModelFormat("unexpected end of file".into()))?
                .map_err(|e| Error::ModelFormat(e.to_string()))
        };
        let magic = next()?;
        if magic != "jamlab-demod v1" {
            return Err(Error::ModelFormat(format!("bad magic line {magic:?}")));
        }
        let order = parse_field(&next()?, "order")?.parse::<usize>().map_err(bad)?;
        let hidden = parse_field(&next()?, "hidden")?.parse::<usize>().map_err(bad)?;
        let activation = Activation::parse(&parse_field(&next()?, "activation")?)
            .ok_or_else(|| Error::ModelFormat("unknown activation".into()))?;
        let epochs = parse_field(&next()?, "epochs")?.parse::<usize>().map_err(bad)?;
        let learning_rate =
            parse_field(&next()?, "learning_rate")?.parse::<f64>().map_err(bad)?;
        let seed = parse_field(&next()?, "seed")?.parse::<u64>().map_err(bad)?;
        let train_snr_db =
            parse_field(&next()?, "train_snr_db")?.parse::<f64>().map_err(bad)?;
        let w1 = read_matrix(&mut next, "w1", hidden, 2)?;
        let b1 = read_matrix(&mut next, "b1", 1, hidden)?;
        let w2 = read_matrix(&mut next, "w2", order, hidden)?;
        let b2 = read_matrix(&mut next, "b2", 1, order)?;
        if next()? != "end" {
            return Err(Error::ModelFormat("missing end marker".into()));
        }
        Ok(DemodModel {
            order,
            hidden,
            activation,
            w1,
            b1,
            w2,
            b2,
            meta: TrainMeta { epochs, learning_rate, seed, train_snr_db },
        })
    }
}

fn bad<E: std::fmt::Display>(e: E) -> Error {
    Error::ModelFormat(e.to_string())
}

fn parse_field(line: &str, key: &str) -> Result<String> {
    line.strip_prefix(key)
        .and_then(|rest| rest.strip_prefix(' '))
        .map(str::to_string)
        .ok_or_else(|| Error::ModelFormat(format!("expected {key:?} line, got {line:?}")))
}

fn write_matrix<W: Write>(
    w: &mut W,
    name: &str,
    data: &[f64],
    rows: usize,
    cols: usize,
) -> std::io::Result<()> {
    writeln!(w, "{name} {rows} {cols}")?;
    for r in 0..rows {
        let row: Vec<String> = data[r * cols..(r + 1) * cols]
            .iter()
            .map(|v| format!("{v}"))
            .collect();
        writeln!(w, "{}", row.join(" "))?;
    }
    Ok(())
}

fn read_matrix(
    next: &mut dyn FnMut() -> Result<String>,
    name: &str,
    rows: usize,
    cols: usize,
) -> Result<Vec<f64>> {
    let header = next()?;
    let expected = format!("{name} {rows} {cols}");
    if header != expected {
        return Err(Error::ModelFormat(format!(
            "expected {expected:?}, got {header:?}"
        )));
    }
    let mut data = Vec::with_capacity(rows * cols);
    for _ in 0..rows {
        let line = next()?;
        for tok in line.split_ascii_whitespace() {
            data.push(tok.parse::<f64>().map_err(bad)?);
        }
    }
    if data.len() != rows * cols {
        return Err(Error::ModelFormat(format!(
            "{name}: expected {} values, got {}",
            rows * cols,
            data.len()
        )));
    }
    Ok(data)
}

fn flat_params(model: &DemodModel) -> Vec<f64> {
    let mut p = Vec::with_capacity(
        model.w1.len() + model.b1.len() + model.w2.len() + model.b2.len(),
    );
    p.extend_from_slice(&model.w1);
    p.extend_from_slice(&model.b1);
    p.extend_from_slice(&model.w2);
    p.extend_from_slice(&model.b2);
    p
}

/// Add `delta(k)` to every parameter, `k` running over the flat layout
/// w1, b1, w2, b2.
fn apply_step(model: &mut DemodModel, delta: impl Fn(usize) -> f64) {
    let mut k = 0;
    for w in model
        .w1
        .iter_mut()
        .chain(model.b1.iter_mut())
        .chain(model.w2.iter_mut())
        .chain(model.b2.iter_mut())
    {
        *w += delta(k);
        k += 1;
    }
}

fn argmax(scores: &[f64]) -> usize {
    let mut best = 0;
    for (idx, &s) in scores.iter().enumerate().skip(1) {
        if s > scores[best] {
            best = idx;
        }
    }
    best
}

fn log_sum_exp(scores: &[f64]) -> f64 {
    let max = scores.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    max + scores.iter().map(|s| (s - max).exp()).sum::<f64>().ln()
}

fn softmax(scores: &[f64]) -> Vec<f64> {
    let max = scores.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = scores.iter().map(|s| (s - max).exp()).collect();
    let sum: f64 = exps.iter().sum();
    exps.into_iter().map(|e| e / sum).collect()
}

/// Train the classifier with full-batch gradient descent.
///
/// Deterministic given the seed. Fails if the loss goes non-finite or the
/// finished model misclassifies any clean constellation point.
pub fn train(dataset: &Dataset, config: &TrainConfig) -> Result<DemodModel> {
    if dataset.inputs.is_empty() {
        return Err(Error::EmptyDataset);
    }
    if dataset.inputs.len() != dataset.targets.len() {
        return Err(Error::LengthMismatch {
            left: dataset.inputs.len(),
            right: dataset.targets.len(),
        });
    }
    let order = dataset.order;
    let mut counts = vec![0usize; order];
    for &t in &dataset.targets {
        counts[t] += 1;
    }
    if counts.iter().any(|&c| c != counts[0]) {
        return Err(Error::UnbalancedDataset);
    }

    let hidden = config.hidden;
    let mut rng = seeded_rng(config.seed);
    // uniform in [-0.5, 0.5] scaled by 1/sqrt(fan-in); biases start at zero
    let mut init = |n: usize, fan_in: usize| -> Vec<f64> {
        let s = 1.0 / (fan_in as f64).sqrt();
        (0..n).map(|_| rng.gen_range(-0.5..0.5) * s).collect()
    };
    let mut model = DemodModel {
        order,
        hidden,
        activation: config.activation,
        w1: init(hidden * 2, 2),
        b1: vec![0.0; hidden],
        w2: init(order * hidden, hidden),
        b2: vec![0.0; order],
        meta: TrainMeta {
            epochs: config.epochs,
            learning_rate: config.learning_rate,
            seed: config.seed,
            train_snr_db: dataset.snr_db,
        },
    };

    let n = dataset.inputs.len() as f64;
    let n_params = hidden * 2 + hidden + order * hidden + order;
    let mut grad = vec![0.0; n_params];
    let mut vel = vec![0.0; n_params];
    let mut adam_m = vec![0.0; n_params];
    let mut adam_v = vec![0.0; n_params];
    let mut hid = vec![0.0; hidden];
    let mut scores = vec![0.0; order];
    let mut dz1 = vec![0.0; hidden];
    // parameter layout inside the flat gradient buffer
    let (o_w1, o_b1, o_w2, o_b2) =
        (0, hidden * 2, hidden * 2 + hidden, hidden * 2 + hidden + order * hidden);

    for epoch in 0..config.epochs {
        grad.iter_mut().for_each(|g| *g = 0.0);
        let mut loss_sum = 0.0;

        for (&x, &target) in dataset.inputs.iter().zip(&dataset.targets) {
            model.forward_into(x, &mut hid, &mut scores);
            let lse = log_sum_exp(&scores);
            loss_sum += lse - scores[target];

            // dz2 = softmax(scores) - onehot(target)
            for h in 0..hidden {
                dz1[h] = 0.0;
            }
            for m in 0..order {
                let p = (scores[m] - lse).exp();
                let dz2 = p - if m == target { 1.0 } else { 0.0 };
                grad[o_b2 + m] += dz2;
                let row = m * hidden;
                for h in 0..hidden {
                    grad[o_w2 + row + h] += dz2 * hid[h];
                    dz1[h] += model.w2[row + h] * dz2;
                }
            }
            for h in 0..hidden {
                let d = dz1[h] * config.activation.derivative_from_output(hid[h]);
                grad[o_w1 + 2 * h] += d * x.i;
                grad[o_w1 + 2 * h + 1] += d * x.q;
                grad[o_b1 + h] += d;
            }
        }

        if !loss_sum.is_finite() {
            return Err(Error::TrainingDiverged { epoch });
        }

        {
            // mean gradient plus optional L2 on the weight matrices
            let params = flat_params(&model);
            for (k, g) in grad.iter_mut().enumerate() {
                *g /= n;
                if config.weight_decay > 0.0 && (k < o_b1 || (o_w2..o_b2).contains(&k)) {
                    *g += config.weight_decay * params[k];
                }
            }
        }

        match config.optimizer {
            Optimizer::Gd => {
                apply_step(&mut model, |k| -config.learning_rate * grad[k]);
            }
            Optimizer::Momentum { beta } => {
                for (v, &g) in vel.iter_mut().zip(&grad) {
                    *v = beta * *v - config.learning_rate * g;
                }
                apply_step(&mut model, |k| vel[k]);
            }
            Optimizer::Adam { beta1, beta2, eps } => {
                let t = (epoch + 1) as i32;
                let bc1 = 1.0 - beta1.powi(t);
                let bc2 = 1.0 - beta2.powi(t);
                for k in 0..n_params {
                    adam_m[k] = beta1 * adam_m[k] + (1.0 - beta1) * grad[k];
                    adam_v[k] = beta2 * adam_v[k] + (1.0 - beta2) * grad[k] * grad[k];
                }
                apply_step(&mut model, |k| {
                    -config.learning_rate * (adam_m[k] / bc1) / ((adam_v[k] / bc2).sqrt() + eps)
                });
            }
        }
    }

    let spec = ConstellationSpec::qam(order)?;
    let clean_errors = (0..order)
        .filter(|&s| model.predict(spec.point(s)) != s)
        .count();
    if clean_errors > 0 {
        return Err(Error::TrainingFailed { clean_errors, order });
    }
    Ok(model)
}

/// Classical baseline: minimum-distance decision, identical to
/// [`ConstellationSpec::nearest_point`].
pub fn min_distance_demod(x: IqSample, spec: &ConstellationSpec) -> usize {
    spec.nearest_point(x)
}
