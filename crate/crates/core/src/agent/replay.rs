//! Experience replay over bit-packed observations.
//!
//! Observations are strictly binary grids, so each one is stored as a packed
//! bitmap (1536 bytes for the full 3×64×64 view instead of 48 KiB of f32),
//! which keeps a 50 000-transition buffer around 150 MiB. Transitions are
//! unpacked to floats only when sampled into an update batch.

use num_traits::Float;
use rand::Rng;

/// One unpacked transition, ready for a network update.
#[derive(Debug, Clone, PartialEq)]
pub struct Transition<T> {
    pub obs: Vec<T>,
    pub action: usize,
    pub reward: T,
    pub next_obs: Vec<T>,
    pub terminal: bool,
}

/// Stored form: observations packed one bit per cell, LSB first.
#[derive(Debug, Clone, PartialEq)]
pub struct PackedTransition {
    pub obs: Box<[u8]>,
    pub action: u8,
    pub reward: f32,
    pub next_obs: Box<[u8]>,
    pub terminal: bool,
}

/// Expand a packed bitmap into `len` floats (1.0 / 0.0).
pub fn unpack_bits<T: Float>(bytes: &[u8], len: usize) -> Vec<T> {
    assert!(len <= bytes.len() * 8, "bitmap shorter than requested length");
    (0..len)
        .map(|i| {
            if bytes[i / 8] & (1 << (i % 8)) != 0 {
                T::one()
            } else {
                T::zero()
            }
        })
        .collect()
}

/// Fixed-capacity ring buffer of packed transitions.
#[derive(Debug, Clone)]
pub struct ReplayBuffer {
    capacity: usize,
    items: Vec<PackedTransition>,
    /// Slot the next push overwrites once the buffer is full.
    next: usize,
}

impl ReplayBuffer {
    pub fn new(capacity: usize) -> Self {
        assert!(capacity > 0, "replay capacity must be positive");
        Self {
            capacity,
            items: Vec::with_capacity(capacity.min(4096)),
            next: 0,
        }
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    /// Append, overwriting the oldest transition once full.
    pub fn push(&mut self, transition: PackedTransition) {
        if self.items.len() < self.capacity {
            self.items.push(transition);
        } else {
            self.items[self.next] = transition;
            self.next = (self.next + 1) % self.capacity;
        }
    }

    /// Sample `batch` transitions uniformly with replacement, unpacking the
    /// observations to `obs_len` floats each.
    pub fn sample<T: Float, R: Rng>(
        &self,
        rng: &mut R,
        batch: usize,
        obs_len: usize,
    ) -> Vec<Transition<T>> {
        assert!(!self.items.is_empty(), "sampling from an empty buffer");
        (0..batch)
            .map(|_| {
                let item = &self.items[rng.gen_range(0..self.items.len())];
                Transition {
                    obs: unpack_bits(&item.obs, obs_len),
                    action: item.action as usize,
                    reward: T::from(item.reward).expect("reward fits the scalar type"),
                    next_obs: unpack_bits(&item.next_obs, obs_len),
                    terminal: item.terminal,
                }
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn transition(tag: u8) -> PackedTransition {
        PackedTransition {
            obs: vec![tag; 4].into_boxed_slice(),
            action: tag % 3,
            reward: tag as f32,
            next_obs: vec![tag.wrapping_add(1); 4].into_boxed_slice(),
            terminal: tag % 5 == 0,
        }
    }

    #[test]
    fn ring_keeps_the_most_recent_capacity_items() {
        let mut buffer = ReplayBuffer::new(8);
        for tag in 0..20u8 {
            buffer.push(transition(tag));
        }
        assert_eq!(buffer.len(), 8);
        let mut rewards: Vec<f32> = buffer.items.iter().map(|t| t.reward).collect();
        rewards.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert_eq!(rewards, (12..20).map(|t| t as f32).collect::<Vec<_>>());
    }

    #[test]
    fn sampling_unpacks_bits_to_unit_floats() {
        let mut buffer = ReplayBuffer::new(4);
        buffer.push(PackedTransition {
            obs: vec![0b0000_0101u8].into_boxed_slice(),
            action: 2,
            reward: -1.5,
            next_obs: vec![0b1000_0000u8].into_boxed_slice(),
            terminal: true,
        });
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let batch: Vec<Transition<f64>> = buffer.sample(&mut rng, 2, 8);
        for t in &batch {
            assert_eq!(t.obs, vec![1.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
            assert_eq!(t.next_obs, vec![0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0]);
            assert_eq!(t.action, 2);
            assert_eq!(t.reward, -1.5);
            assert!(t.terminal);
        }
    }

    #[test]
    fn sampling_is_seed_deterministic() {
        let mut buffer = ReplayBuffer::new(16);
        for tag in 0..16u8 {
            buffer.push(transition(tag));
        }
        let a: Vec<Transition<f32>> =
            buffer.sample(&mut ChaCha8Rng::seed_from_u64(9), 8, 32);
        let b: Vec<Transition<f32>> =
            buffer.sample(&mut ChaCha8Rng::seed_from_u64(9), 8, 32);
        assert_eq!(a, b);
    }
}
