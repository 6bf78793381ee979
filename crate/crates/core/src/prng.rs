//! Counter-based pseudo-random stream used for network initialization.
//!
//! Algorithm `splitmix64-boxmuller`: the `i`-th 64-bit word of stream `seed`
//! is the SplitMix64 finalizer applied to `seed + (i + 1) * 0x9E3779B97F4A7C15`
//! (wrapping). Uniforms in `(0, 1)` use the top 53 bits, `(w >> 11) + 0.5`
//! divided by `2^53`. The `j`-th standard normal uses words `2j` and `2j + 1`
//! through the cosine branch of Box–Muller:
//! `sqrt(-2 ln u1) cos(2π u2)`.
//!
//! Because every draw is a pure function of `(seed, index)`, the stream is
//! reproducible in any language given these constants.

pub const ALGORITHM: &str = "splitmix64-boxmuller";

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

#[inline]
pub fn splitmix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CounterRng {
    seed: u64,
}

impl CounterRng {
    pub fn new(seed: u64) -> Self {
        CounterRng { seed }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn word(&self, index: u64) -> u64 {
        splitmix64(self.seed.wrapping_add(index.wrapping_add(1).wrapping_mul(GOLDEN)))
    }

    /// Uniform in the open interval `(0, 1)`.
    pub fn uniform(&self, index: u64) -> f64 {
        ((self.word(index) >> 11) as f64 + 0.5) / (1u64 << 53) as f64
    }

    /// Standard normal draw number `index`.
    pub fn normal(&self, index: u64) -> f64 {
        let u1 = self.uniform(2 * index);
        let u2 = self.uniform(2 * index + 1);
        (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
    }

    /// A sequential view over the normal draws, starting at `start`.
    pub fn normals(&self, start: u64) -> impl Iterator<Item = f64> + '_ {
        (start..).map(move |i| self.normal(i))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matches_sequential_splitmix() {
        // reference SplitMix64 with state += GOLDEN before each output
        let mut state: u64 = 42;
        let rng = CounterRng::new(42);
        for i in 0..16 {
            state = state.wrapping_add(GOLDEN);
            assert_eq!(rng.word(i), splitmix64(state));
        }
    }

    #[test]
    fn normal_moments() {
        let rng = CounterRng::new(7);
        let n = 200_000;
        let xs: Vec<f64> = rng.normals(0).take(n).collect();
        let mean = xs.iter().sum::<f64>() / n as f64;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n as f64;
        assert!(mean.abs() < 0.01);
        assert!((var - 1.0).abs() < 0.01);
    }

    #[test]
    fn uniform_in_open_interval() {
        let rng = CounterRng::new(0);
        for i in 0..10_000 {
            let u = rng.uniform(i);
            assert!(u > 0.0 && u < 1.0);
        }
    }
}
