//! Seed derivation for reproducible random streams.
//!
//! Every stochastic step draws from its own ChaCha stream whose seed is a
//! stable hash of the root seed and a path of labels. Streams never depend on
//! scheduling order, so parallel and sequential runs are bit-identical.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type StreamRng = ChaCha8Rng;

/// One component of a stream path.
#[derive(Debug, Clone, Copy)]
pub enum Label<'a> {
    Str(&'a str),
    Num(u64),
}

impl<'a> From<&'a str> for Label<'a> {
    fn from(s: &'a str) -> Self {
        Label::Str(s)
    }
}

impl From<u64> for Label<'_> {
    fn from(n: u64) -> Self {
        Label::Num(n)
    }
}

impl From<usize> for Label<'_> {
    fn from(n: usize) -> Self {
        Label::Num(n as u64)
    }
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

fn absorb(state: u64, word: u64) -> u64 {
    splitmix64(state ^ splitmix64(word))
}

/// Stable 64-bit hash of `root` followed by `path`.
pub fn derive_seed(root: u64, path: &[Label<'_>]) -> u64 {
    let mut h = splitmix64(root);
    for label in path {
        match *label {
            Label::Num(n) => {
                h = absorb(h, 0x01);
                h = absorb(h, n);
            }
            Label::Str(s) => {
                h = absorb(h, 0x02);
                h = absorb(h, s.len() as u64);
                for chunk in s.as_bytes().chunks(8) {
                    let mut buf = [0u8; 8];
                    buf[..chunk.len()].copy_from_slice(chunk);
                    h = absorb(h, u64::from_le_bytes(buf));
                }
            }
        }
    }
    h
}

pub fn stream(root: u64, path: &[Label<'_>]) -> StreamRng {
    StreamRng::seed_from_u64(derive_seed(root, path))
}
