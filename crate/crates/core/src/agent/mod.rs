//! The learning agent: a runtime-shaped convolutional Q-network trained with
//! experience replay and a periodically synced target network.
//!
//! Everything here is scalar and single-threaded on purpose — training must
//! reproduce bit-identical results from a master seed, which rules out
//! nondeterministic reductions. The network is generic over the float type
//! so gradient tests can run in `f64` while training stays in `f32`.

pub mod net;
pub mod replay;

pub use net::{
    act, dqn_update, greedy_action, load_checkpoint, loss_and_grads, save_checkpoint,
    sync_target, AdamState, AgentError, ConvSpec, NetConfig, QNetwork,
};
pub use replay::{unpack_bits, PackedTransition, ReplayBuffer, Transition};
