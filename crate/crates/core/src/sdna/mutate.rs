use rand::Rng;

use super::{sample_sign, sample_walk_weight, Sdna, SimConfig};
use crate::error::{Error, Result};
use crate::rng::StreamRng;

/// Preference drift with intensity `z`.
///
/// Each `w` entry is redrawn from `U[0,1]` with probability `z`; when
/// `mutate_preference` is set each `l` entry is redrawn from `{-1, +1}` with
/// probability `z`; `d` likewise. Each `k` entry is redrawn with probability
/// `z` from its own stratum, so descent is preserved whichever entries change.
pub fn mutate(sdnas: &mut [Sdna], cfg: &SimConfig, rng: &mut StreamRng) -> Result<()> {
    if !(0.0..=1.0).contains(&cfg.z) {
        return Err(Error::invalid(format!("z = {} outside [0,1]", cfg.z)));
    }
    let z = cfg.z;
    for sdna in sdnas.iter_mut() {
        for m in 0..sdna.w.len() {
            if rng.gen::<f64>() < z {
                sdna.w[m] = rng.gen::<f64>();
            }
            if cfg.mutate_preference && rng.gen::<f64>() < z {
                sdna.l[m] = sample_sign(rng);
            }
        }
        if rng.gen::<f64>() < z {
            sdna.d = rng.gen::<f64>();
        }
        let q = sdna.k.len() + 1;
        for (pos, k) in sdna.k.iter_mut().enumerate() {
            if rng.gen::<f64>() < z {
                *k = sample_walk_weight(pos + 2, q, rng);
            }
        }
    }
    Ok(())
}
