//! A small convolutional Q-network with scalar-deterministic forward,
//! backward, and Adam updates.
//!
//! The network is shaped at runtime from a [`NetConfig`], so tests can run
//! tiny instances (including in `f64` for finite-difference gradient
//! checks) while training uses the full `f32` observation-sized net. All
//! arithmetic is plain scalar loops in a fixed order: given identical inputs
//! and parameters, every result is bit-identical run to run.

use std::fmt::Debug;
use std::fs;
use std::path::{Path, PathBuf};

use num_traits::Float;
use rand::Rng;
use thiserror::Error;

use super::replay::Transition;

/// One convolution layer: `out_channels` filters of size `kernel`², applied
/// with `stride` and no padding.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ConvSpec {
    pub out_channels: usize,
    pub kernel: usize,
    pub stride: usize,
}

/// Runtime shape of a Q-network: convolution stack, then fully connected
/// hidden layers, then a linear output per action.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NetConfig {
    pub input_channels: usize,
    /// Side length of the square input.
    pub input_size: usize,
    pub conv: Vec<ConvSpec>,
    pub hidden: Vec<usize>,
    pub outputs: usize,
}

impl NetConfig {
    /// The observation-sized architecture used for training: two strided
    /// convolutions collapsing 64×64 to 6×6, one hidden layer, `outputs`
    /// action values.
    pub fn q_default(outputs: usize) -> Self {
        Self {
            input_channels: 3,
            input_size: 64,
            conv: vec![
                ConvSpec {
                    out_channels: 8,
                    kernel: 8,
                    stride: 4,
                },
                ConvSpec {
                    out_channels: 16,
                    kernel: 4,
                    stride: 2,
                },
            ],
            hidden: vec![64],
            outputs,
        }
    }

    /// Spatial side length after each convolution (valid padding).
    fn conv_sizes(&self) -> Vec<usize> {
        let mut sizes = Vec::with_capacity(self.conv.len());
        let mut side = self.input_size;
        for spec in &self.conv {
            assert!(
                spec.kernel <= side && spec.stride > 0,
                "convolution does not fit its input"
            );
            side = (side - spec.kernel) / spec.stride + 1;
            sizes.push(side);
        }
        sizes
    }

    /// Flattened feature count after the convolution stack.
    pub fn flat_features(&self) -> usize {
        let channels = self.conv.last().map_or(self.input_channels, |c| c.out_channels);
        let side = self.conv_sizes().last().copied().unwrap_or(self.input_size);
        channels * side * side
    }

    pub fn input_len(&self) -> usize {
        self.input_channels * self.input_size * self.input_size
    }

    /// Parameter blocks in storage order: for each conv layer a weight block
    /// `[out][in][k][k]` then a bias block `[out]`, then for each fully
    /// connected layer (hidden layers and the output layer) a weight block
    /// `[out][in]` then a bias block `[out]`. Returns `(len, fan_in)` pairs.
    fn block_shapes(&self) -> Vec<(usize, usize)> {
        let mut blocks = Vec::new();
        let mut in_ch = self.input_channels;
        for spec in &self.conv {
            let fan_in = in_ch * spec.kernel * spec.kernel;
            blocks.push((spec.out_channels * fan_in, fan_in));
            blocks.push((spec.out_channels, fan_in));
            in_ch = spec.out_channels;
        }
        let mut in_features = self.flat_features();
        for &width in self.hidden.iter().chain(std::iter::once(&self.outputs)) {
            blocks.push((width * in_features, in_features));
            blocks.push((width, in_features));
            in_features = width;
        }
        blocks
    }

    pub fn parameter_count(&self) -> usize {
        self.block_shapes().iter().map(|(len, _)| len).sum()
    }
}

/// Q-network with runtime shape. `T` is the scalar type: `f32` in training,
/// `f64` where gradient checks need the headroom.
#[derive(Debug, Clone, PartialEq)]
pub struct QNetwork<T> {
    config: NetConfig,
    /// Parameter blocks, see [`NetConfig::block_shapes`].
    params: Vec<Vec<T>>,
}

impl<T: Float + Debug> QNetwork<T> {
    /// He-uniform initialization: weights drawn from
    /// `U[-sqrt(6/fan_in), sqrt(6/fan_in))`, biases zero. Draw order is
    /// block by block, so the same seed always builds the same net.
    pub fn init<R: Rng>(config: NetConfig, rng: &mut R) -> Self {
        let mut params = Vec::new();
        for (i, (len, fan_in)) in config.block_shapes().iter().enumerate() {
            let mut block = Vec::with_capacity(*len);
            if i % 2 == 0 {
                let limit = (6.0 / *fan_in as f64).sqrt();
                for _ in 0..*len {
                    let draw: f64 = rng.gen_range(-limit..limit);
                    block.push(T::from(draw).expect("weight fits the scalar type"));
                }
            } else {
                block.resize(*len, T::zero());
            }
            params.push(block);
        }
        Self { config, params }
    }

    pub fn config(&self) -> &NetConfig {
        &self.config
    }

    pub fn params(&self) -> &[Vec<T>] {
        &self.params
    }

    /// Zeroed buffers shaped like the parameter blocks (gradient storage).
    pub fn zeroed_like(&self) -> Vec<Vec<T>> {
        self.params.iter().map(|b| vec![T::zero(); b.len()]).collect()
    }

    /// Action values for one flattened channel-major input.
    pub fn forward(&self, input: &[T]) -> Vec<T> {
        self.forward_trace(input).1
    }

    /// Forward pass keeping every post-activation layer output (the trace
    /// [`backward`](Self::backward) consumes). Returns `(trace, q_values)`.
    pub fn forward_trace(&self, input: &[T]) -> (Vec<Vec<T>>, Vec<T>) {
        assert_eq!(input.len(), self.config.input_len(), "input length mismatch");
        let mut trace = vec![input.to_vec()];
        let mut block = 0;

        let mut channels = self.config.input_channels;
        let mut side = self.config.input_size;
        for spec in &self.config.conv {
            let out_side = (side - spec.kernel) / spec.stride + 1;
            let activated = conv_forward(
                trace.last().unwrap(),
                &self.params[block],
                &self.params[block + 1],
                channels,
                side,
                spec,
                out_side,
            );
            trace.push(activated);
            block += 2;
            channels = spec.out_channels;
            side = out_side;
        }

        for (i, &width) in self
            .config
            .hidden
            .iter()
            .chain(std::iter::once(&self.config.outputs))
            .enumerate()
        {
            let last_layer = i == self.config.hidden.len();
            let input = trace.last().unwrap();
            let weights = &self.params[block];
            let biases = &self.params[block + 1];
            let mut out = Vec::with_capacity(width);
            for o in 0..width {
                let row = &weights[o * input.len()..(o + 1) * input.len()];
                let acc = biases[o] + dot4(row, input);
                out.push(if last_layer || acc > T::zero() {
                    acc
                } else {
                    T::zero()
                });
            }
            block += 2;
            if last_layer {
                return (trace, out);
            }
            trace.push(out);
        }
        unreachable!("the output layer returns above");
    }

    /// Backpropagate `grad_out` (∂loss/∂q) through the trace produced by
    /// [`forward_trace`](Self::forward_trace), adding parameter gradients
    /// into `grads`.
    pub fn backward(&self, trace: &[Vec<T>], grad_out: &[T], grads: &mut [Vec<T>]) {
        assert_eq!(grad_out.len(), self.config.outputs);
        assert_eq!(grads.len(), self.params.len());

        // Walk the fully connected layers backwards. ReLU applies to every
        // fc layer except the output, and to every conv layer.
        let mut grad = grad_out.to_vec();
        let fc_widths: Vec<usize> = self
            .config
            .hidden
            .iter()
            .chain(std::iter::once(&self.config.outputs))
            .copied()
            .collect();
        for (i, _) in fc_widths.iter().enumerate().rev() {
            let block = 2 * (self.config.conv.len() + i);
            let input = &trace[self.config.conv.len() + i];
            let weights = &self.params[block];
            let mut grad_in = vec![T::zero(); input.len()];
            for (o, &g) in grad.iter().enumerate() {
                grads[block + 1][o] = grads[block + 1][o] + g;
                let row = o * input.len();
                let w_row = &weights[row..row + input.len()];
                let gw_row = &mut grads[block][row..row + input.len()];
                for (gw, &x) in gw_row.iter_mut().zip(input) {
                    *gw = *gw + g * x;
                }
                for (gi, &w) in grad_in.iter_mut().zip(w_row) {
                    *gi = *gi + g * w;
                }
            }
            // The layer below is either a hidden fc layer or the last conv
            // layer; both end in ReLU, whose input gradient masks on the
            // stored post-activation output.
            for (g, &x) in grad_in.iter_mut().zip(input) {
                if x <= T::zero() {
                    *g = T::zero();
                }
            }
            grad = grad_in;
        }

        // Convolution stack backwards.
        let mut sides = vec![self.config.input_size];
        sides.extend(self.config.conv_sizes());
        let mut channels = vec![self.config.input_channels];
        channels.extend(self.config.conv.iter().map(|c| c.out_channels));
        for (i, spec) in self.config.conv.iter().enumerate().rev() {
            let block = 2 * i;
            let input = &trace[i];
            let (in_ch, in_side) = (channels[i], sides[i]);
            let out_side = sides[i + 1];
            let mut grad_in = vec![T::zero(); input.len()];
            let (grad_w, grad_b) = {
                let (head, tail) = grads.split_at_mut(block + 1);
                (&mut head[block], &mut tail[0])
            };
            conv_backward(
                input,
                &self.params[block],
                &grad,
                in_ch,
                in_side,
                spec,
                out_side,
                grad_w,
                grad_b,
                &mut grad_in,
            );
            if i > 0 {
                // Mask through the previous layer's ReLU.
                for (g, &x) in grad_in.iter_mut().zip(input) {
                    if x <= T::zero() {
                        *g = T::zero();
                    }
                }
            }
            grad = grad_in;
        }
    }
}

/// Dot product accumulated in four independent lanes that are combined in a
/// fixed order at the end. The lane split breaks the serial add-latency chain
/// (and lets the compiler vectorize) while keeping the summation order a pure
/// function of the slice length, so results stay bit-reproducible run to run.
fn dot4<T: Float>(a: &[T], b: &[T]) -> T {
    debug_assert_eq!(a.len(), b.len());
    let mut lane = [T::zero(); 4];
    let mut a4 = a.chunks_exact(4);
    let mut b4 = b.chunks_exact(4);
    for (x, y) in (&mut a4).zip(&mut b4) {
        lane[0] = lane[0] + x[0] * y[0];
        lane[1] = lane[1] + x[1] * y[1];
        lane[2] = lane[2] + x[2] * y[2];
        lane[3] = lane[3] + x[3] * y[3];
    }
    let mut tail = T::zero();
    for (x, y) in a4.remainder().iter().zip(b4.remainder()) {
        tail = tail + *x * *y;
    }
    ((lane[0] + lane[2]) + (lane[1] + lane[3])) + tail
}

/// Gather every receptive field of the layer into one row of a dense patch
/// matrix (`out_side² × in_ch·kernel²`). Column order matches the weight
/// layout, so each output value is a single contiguous dot product — far
/// friendlier to the vector units than the 8-wide strips of the raw image.
fn gather_patches<T: Float>(
    input: &[T],
    in_ch: usize,
    in_side: usize,
    spec: &ConvSpec,
    out_side: usize,
) -> Vec<T> {
    let cols = in_ch * spec.kernel * spec.kernel;
    let mut patches = vec![T::zero(); out_side * out_side * cols];
    for oy in 0..out_side {
        for ox in 0..out_side {
            let base = (oy * out_side + ox) * cols;
            for ic in 0..in_ch {
                for ky in 0..spec.kernel {
                    let in_row =
                        (ic * in_side + oy * spec.stride + ky) * in_side + ox * spec.stride;
                    let dst = base + (ic * spec.kernel + ky) * spec.kernel;
                    patches[dst..dst + spec.kernel]
                        .copy_from_slice(&input[in_row..in_row + spec.kernel]);
                }
            }
        }
    }
    patches
}

/// Convolution + ReLU for one layer: one contiguous patch-row dot product
/// per output value, accumulated in a fixed order.
#[allow(clippy::too_many_arguments)]
fn conv_forward<T: Float>(
    input: &[T],
    weights: &[T],
    biases: &[T],
    in_ch: usize,
    in_side: usize,
    spec: &ConvSpec,
    out_side: usize,
) -> Vec<T> {
    let cols = in_ch * spec.kernel * spec.kernel;
    let pixels = out_side * out_side;
    let patches = gather_patches(input, in_ch, in_side, spec, out_side);
    let mut out = vec![T::zero(); spec.out_channels * pixels];
    for oc in 0..spec.out_channels {
        let w_row = &weights[oc * cols..(oc + 1) * cols];
        for pix in 0..pixels {
            let acc = biases[oc] + dot4(w_row, &patches[pix * cols..(pix + 1) * cols]);
            if acc > T::zero() {
                out[oc * pixels + pix] = acc;
            }
        }
    }
    out
}

/// `dst += a · src`, element-wise over equal-length slices.
fn axpy<T: Float>(dst: &mut [T], a: T, src: &[T]) {
    debug_assert_eq!(dst.len(), src.len());
    for (d, &s) in dst.iter_mut().zip(src) {
        *d = *d + a * s;
    }
}

/// Gradients of one convolution layer. The incoming `grad_out` was already
/// masked against this layer's (post-ReLU) activations by the caller, so
/// clamped units arrive with a zero gradient and are skipped.
#[allow(clippy::too_many_arguments)]
fn conv_backward<T: Float>(
    input: &[T],
    weights: &[T],
    grad_out: &[T],
    in_ch: usize,
    in_side: usize,
    spec: &ConvSpec,
    out_side: usize,
    grad_w: &mut [T],
    grad_b: &mut [T],
    grad_in: &mut [T],
) {
    let cols = in_ch * spec.kernel * spec.kernel;
    let pixels = out_side * out_side;
    let patches = gather_patches(input, in_ch, in_side, spec, out_side);
    // Input gradients are first accumulated per patch row, then scattered
    // back onto the (overlapping) receptive fields below.
    let mut grad_patches = vec![T::zero(); pixels * cols];
    for oc in 0..spec.out_channels {
        let w_row = &weights[oc * cols..(oc + 1) * cols];
        let gw_row = &mut grad_w[oc * cols..(oc + 1) * cols];
        for pix in 0..pixels {
            let g = grad_out[oc * pixels + pix];
            if g == T::zero() {
                continue;
            }
            grad_b[oc] = grad_b[oc] + g;
            axpy(gw_row, g, &patches[pix * cols..(pix + 1) * cols]);
            axpy(&mut grad_patches[pix * cols..(pix + 1) * cols], g, w_row);
        }
    }
    for oy in 0..out_side {
        for ox in 0..out_side {
            let base = (oy * out_side + ox) * cols;
            for ic in 0..in_ch {
                for ky in 0..spec.kernel {
                    let in_row =
                        (ic * in_side + oy * spec.stride + ky) * in_side + ox * spec.stride;
                    let src = base + (ic * spec.kernel + ky) * spec.kernel;
                    let run = &grad_patches[src..src + spec.kernel];
                    for (gi, &gp) in grad_in[in_row..in_row + spec.kernel]
                        .iter_mut()
                        .zip(run)
                    {
                        *gi = *gi + gp;
                    }
                }
            }
        }
    }
}

/// Greedy action: the index of the largest Q value, lowest index on ties.
pub fn greedy_action<T: Float + Debug>(net: &QNetwork<T>, input: &[T]) -> usize {
    let q = net.forward(input);
    let mut best = 0;
    for (i, v) in q.iter().enumerate().skip(1) {
        if *v > q[best] {
            best = i;
        }
    }
    best
}

/// ε-greedy action. The exploration coin is flipped on every call (even for
/// ε = 0 or 1), so the random stream stays aligned across configurations;
/// the uniform action draw happens only when exploring.
pub fn act<T: Float + Debug, R: Rng>(
    net: &QNetwork<T>,
    input: &[T],
    epsilon: f64,
    rng: &mut R,
) -> usize {
    let explore = rng.gen_bool(epsilon);
    if explore {
        rng.gen_range(0..net.config().outputs)
    } else {
        greedy_action(net, input)
    }
}

/// Adam with bias correction (β₁ = 0.9, β₂ = 0.999, ε = 1e-8).
#[derive(Debug, Clone)]
pub struct AdamState<T> {
    lr: T,
    step: u64,
    m: Vec<Vec<T>>,
    v: Vec<Vec<T>>,
}

impl<T: Float + Debug> AdamState<T> {
    pub fn new(net: &QNetwork<T>, lr: T) -> Self {
        Self {
            lr,
            step: 0,
            m: net.zeroed_like(),
            v: net.zeroed_like(),
        }
    }

    /// Apply one step for the given gradients.
    pub fn apply(&mut self, net: &mut QNetwork<T>, grads: &[Vec<T>]) {
        let (beta1, beta2): (T, T) = (t(0.9), t(0.999));
        let eps: T = t(1e-8);
        let lr = self.lr;
        self.step += 1;
        let correction1 = T::one() - beta1.powi(self.step as i32);
        let correction2 = T::one() - beta2.powi(self.step as i32);
        for (b, block) in net.params.iter_mut().enumerate() {
            let moments = self.m[b].iter_mut().zip(self.v[b].iter_mut());
            for ((p, (m, v)), &g) in block.iter_mut().zip(moments).zip(&grads[b]) {
                *m = beta1 * *m + (T::one() - beta1) * g;
                *v = beta2 * *v + (T::one() - beta2) * g * g;
                let m_hat = *m / correction1;
                let v_hat = *v / correction2;
                *p = *p - lr * m_hat / (v_hat.sqrt() + eps);
            }
        }
    }
}

fn t<T: Float>(x: f64) -> T {
    T::from(x).expect("constant fits the scalar type")
}

#[derive(Debug, Error)]
pub enum AgentError {
    #[error("training loss became non-finite ({0}); aborting to preserve the run log")]
    NonFiniteLoss(f64),
    #[error("checkpoint I/O at {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("bad checkpoint {path}: {reason}")]
    BadCheckpoint { path: PathBuf, reason: String },
}

/// Huber (smooth-L1) loss with δ = 1 and its derivative, the error clamp.
fn huber<T: Float>(error: T) -> (T, T) {
    let one = T::one();
    if error.abs() <= one {
        (t::<T>(0.5) * error * error, error)
    } else {
        (error.abs() - t(0.5), one.min(error.max(-one)))
    }
}

/// Mean Huber TD loss and its parameter gradients for one batch, without
/// touching the network. `target` supplies the bootstrap values
/// (`max_a' Q_target(s', a')`, zero on terminal transitions).
pub fn loss_and_grads<T: Float + Debug>(
    online: &QNetwork<T>,
    target: &QNetwork<T>,
    batch: &[Transition<T>],
    gamma: T,
) -> (T, Vec<Vec<T>>) {
    assert!(!batch.is_empty(), "empty update batch");
    let scale = T::one() / t(batch.len() as f64);
    let mut grads = online.zeroed_like();
    let mut loss = T::zero();
    for transition in batch {
        let (trace, q) = online.forward_trace(&transition.obs);
        let bootstrap = if transition.terminal {
            T::zero()
        } else {
            let next_q = target.forward(&transition.next_obs);
            next_q
                .iter()
                .copied()
                .fold(T::neg_infinity(), |a, b| if b > a { b } else { a })
        };
        let y = transition.reward + gamma * bootstrap;
        let error = q[transition.action] - y;
        let (sample_loss, dq) = huber(error);
        loss = loss + sample_loss * scale;
        let mut grad_out = vec![T::zero(); q.len()];
        grad_out[transition.action] = dq * scale;
        online.backward(&trace, &grad_out, &mut grads);
    }
    (loss, grads)
}

/// One DQN update step: TD targets from `target`, Huber loss, Adam step on
/// `online`. Returns the batch loss; a non-finite loss aborts untouched.
pub fn dqn_update<T: Float + Debug>(
    online: &mut QNetwork<T>,
    target: &QNetwork<T>,
    batch: &[Transition<T>],
    gamma: T,
    optimizer: &mut AdamState<T>,
) -> Result<T, AgentError> {
    let (loss, grads) = loss_and_grads(online, target, batch, gamma);
    let loss_f64 = loss.to_f64().unwrap_or(f64::NAN);
    if !loss_f64.is_finite() {
        return Err(AgentError::NonFiniteLoss(loss_f64));
    }
    optimizer.apply(online, &grads);
    Ok(loss)
}

/// Copy the online parameters into the target network.
pub fn sync_target<T: Float + Debug + Clone>(target: &mut QNetwork<T>, online: &QNetwork<T>) {
    assert_eq!(target.config, online.config, "target must share the shape");
    target.params = online.params.clone();
}

// ---------------------------------------------------------------------------
// Checkpoints
// ---------------------------------------------------------------------------

const CHECKPOINT_MAGIC: &[u8; 8] = b"LWQNET01";

/// Serialize an `f32` network (the training dtype) plus the number of
/// trained steps. Layout: magic, shape header (u32 LE fields), trained
/// steps (u64 LE), then the parameter blocks as f32 LE in storage order.
pub fn save_checkpoint(
    path: &Path,
    net: &QNetwork<f32>,
    trained_steps: u64,
) -> Result<(), AgentError> {
    let mut bytes = Vec::new();
    bytes.extend_from_slice(CHECKPOINT_MAGIC);
    let c = &net.config;
    let push_u32 = |bytes: &mut Vec<u8>, v: usize| {
        bytes.extend_from_slice(&u32::try_from(v).expect("shape fits u32").to_le_bytes())
    };
    push_u32(&mut bytes, c.input_channels);
    push_u32(&mut bytes, c.input_size);
    push_u32(&mut bytes, c.conv.len());
    for spec in &c.conv {
        push_u32(&mut bytes, spec.out_channels);
        push_u32(&mut bytes, spec.kernel);
        push_u32(&mut bytes, spec.stride);
    }
    push_u32(&mut bytes, c.hidden.len());
    for &h in &c.hidden {
        push_u32(&mut bytes, h);
    }
    push_u32(&mut bytes, c.outputs);
    bytes.extend_from_slice(&trained_steps.to_le_bytes());
    for block in &net.params {
        for &p in block {
            bytes.extend_from_slice(&p.to_le_bytes());
        }
    }
    fs::write(path, &bytes).map_err(|source| AgentError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Load a checkpoint saved by [`save_checkpoint`]; returns the network and
/// its trained-step counter.
pub fn load_checkpoint(path: &Path) -> Result<(QNetwork<f32>, u64), AgentError> {
    let bad = |reason: &str| AgentError::BadCheckpoint {
        path: path.to_path_buf(),
        reason: reason.to_string(),
    };
    let bytes = fs::read(path).map_err(|source| AgentError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let u32_at = |bytes: &[u8], at: usize| -> usize {
        u32::from_le_bytes(bytes[at..at + 4].try_into().unwrap()) as usize
    };
    let need = |at: usize, n: usize| -> Result<(), AgentError> {
        if at.checked_add(n).is_some_and(|end| end <= bytes.len()) {
            Ok(())
        } else {
            Err(bad("truncated file"))
        }
    };
    need(0, 8)?;
    if &bytes[..8] != CHECKPOINT_MAGIC {
        return Err(bad("wrong magic (not a network checkpoint, or a newer format)"));
    }
    let mut at = 8;
    need(at, 12)?;
    let input_channels = u32_at(&bytes, at);
    let input_size = u32_at(&bytes, at + 4);
    let n_conv = u32_at(&bytes, at + 8);
    at += 12;
    if n_conv > 64 {
        return Err(bad("implausible convolution count"));
    }
    need(at, n_conv * 12)?;
    let mut conv = Vec::with_capacity(n_conv);
    for _ in 0..n_conv {
        conv.push(ConvSpec {
            out_channels: u32_at(&bytes, at),
            kernel: u32_at(&bytes, at + 4),
            stride: u32_at(&bytes, at + 8),
        });
        at += 12;
    }
    need(at, 4)?;
    let n_hidden = u32_at(&bytes, at);
    at += 4;
    if n_hidden > 64 {
        return Err(bad("implausible hidden-layer count"));
    }
    need(at, n_hidden * 4 + 4)?;
    let mut hidden = Vec::with_capacity(n_hidden);
    for _ in 0..n_hidden {
        hidden.push(u32_at(&bytes, at));
        at += 4;
    }
    let outputs = u32_at(&bytes, at);
    at += 4;
    let config = NetConfig {
        input_channels,
        input_size,
        conv,
        hidden,
        outputs,
    };
    if config.outputs == 0 || config.input_size == 0 || config.input_channels == 0 {
        return Err(bad("degenerate network shape"));
    }
    need(at, 8)?;
    let trained_steps = u64::from_le_bytes(bytes[at..at + 8].try_into().unwrap());
    at += 8;
    let mut params = Vec::new();
    for (len, _) in config.block_shapes() {
        need(at, len * 4)?;
        let mut block = Vec::with_capacity(len);
        for j in 0..len {
            block.push(f32::from_le_bytes(
                bytes[at + 4 * j..at + 4 * j + 4].try_into().unwrap(),
            ));
        }
        at += len * 4;
        params.push(block);
    }
    if at != bytes.len() {
        return Err(bad("trailing bytes after the parameter blocks"));
    }
    Ok((QNetwork { config, params }, trained_steps))
}
