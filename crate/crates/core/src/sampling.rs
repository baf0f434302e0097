//! Seeded random instances for property checks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::credal::{hull_reduce, CredalSet};
use crate::prior::{Act, Prior};
use crate::space::Event;

pub type SeededRng = ChaCha8Rng;

pub fn rng(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A uniformly random point of the simplex, pulled toward the centre so
/// every entry is at least `floor`.
pub fn random_prior<R: Rng>(rng: &mut R, n: usize, floor: f64) -> Prior {
    let e: Vec<f64> = (0..n).map(|_| -rng.gen_range(f64::EPSILON..1.0f64).ln()).collect();
    let total: f64 = e.iter().sum();
    let scale = 1.0 - n as f64 * floor;
    Prior::from_raw(e.iter().map(|x| floor + scale * x / total).collect())
}

/// Hull of between 1 and `max_vertices` random priors.
pub fn random_credal<R: Rng>(rng: &mut R, n: usize, max_vertices: usize, floor: f64) -> CredalSet {
    let k = rng.gen_range(1..=max_vertices.max(1));
    random_credal_k(rng, n, k, floor)
}

/// Hull of exactly `k` random priors (fewer vertices only if some are redundant).
pub fn random_credal_k<R: Rng>(rng: &mut R, n: usize, k: usize, floor: f64) -> CredalSet {
    let pts = (0..k).map(|_| random_prior(rng, n, floor)).collect();
    hull_reduce(pts).expect("k >= 1")
}

pub fn random_act<R: Rng>(rng: &mut R, n: usize, lo: f64, hi: f64) -> Act {
    Act::from_raw((0..n).map(|_| rng.gen_range(lo..=hi)).collect())
}

/// The `2^n` acts taking only the values `lo` and `hi`, in descending binary
/// order starting from the constant `hi` act.
pub fn corner_acts(n: usize, lo: f64, hi: f64) -> Vec<Act> {
    (0u64..1 << n)
        .rev()
        .map(|mask| Act::from_raw((0..n).map(|i| if mask & (1 << (n - 1 - i)) != 0 { hi } else { lo }).collect()))
        .collect()
}

/// A random event with between `min_len` and `max_len` members.
pub fn random_event<R: Rng>(rng: &mut R, n: usize, min_len: usize, max_len: usize) -> Event {
    let len = rng.gen_range(min_len..=max_len.min(n));
    let mut idx: Vec<usize> = (0..n).collect();
    for i in 0..len {
        let j = rng.gen_range(i..n);
        idx.swap(i, j);
    }
    Event::new(n, &idx[..len]).expect("indices in range")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn priors_respect_floor_and_normalize() {
        let mut r = rng(7);
        for _ in 0..100 {
            let p = random_prior(&mut r, 4, 0.02);
            assert!(p.probs().iter().all(|&x| x >= 0.02 - 1e-15));
            assert!((p.probs().iter().sum::<f64>() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn corners_in_descending_binary_order() {
        let c = corner_acts(3, 0.0, 1.0);
        assert_eq!(c.len(), 8);
        assert_eq!(c[0].utils(), &[1.0, 1.0, 1.0]);
        assert_eq!(c[3].utils(), &[1.0, 0.0, 0.0]);
        assert_eq!(c[7].utils(), &[0.0, 0.0, 0.0]);
    }

    #[test]
    fn events_have_requested_size() {
        let mut r = rng(1);
        for _ in 0..50 {
            let e = random_event(&mut r, 5, 2, 4);
            assert!((2..=4).contains(&e.len()));
        }
    }

    #[test]
    fn deterministic_for_seed() {
        let a = random_credal(&mut rng(3), 4, 5, 0.01);
        let b = random_credal(&mut rng(3), 4, 5, 0.01);
        assert_eq!(a, b);
    }
}
