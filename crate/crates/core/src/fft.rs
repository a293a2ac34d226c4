//! Three-dimensional complex FFT on x-fastest cubes, built from rustfft
//! line transforms. Plans are cached per size.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

pub struct Fft3 {
    n: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Forward,
    Inverse,
}

static PLANS: OnceLock<Mutex<HashMap<usize, Arc<Fft3>>>> = OnceLock::new();

/// Shared plan for cubes of side `n`.
pub fn plan(n: usize) -> Arc<Fft3> {
    let cache = PLANS.get_or_init(|| Mutex::new(HashMap::new()));
    let mut map = cache.lock().expect("fft plan cache poisoned");
    map.entry(n)
        .or_insert_with(|| {
            let mut planner = FftPlanner::new();
            Arc::new(Fft3 {
                n,
                forward: planner.plan_fft_forward(n),
                inverse: planner.plan_fft_inverse(n),
            })
        })
        .clone()
}

impl Fft3 {
    /// Unnormalized in-place transform of an `n³` cube.
    pub fn process(&self, data: &mut [Complex64], dir: Direction) {
        let n = self.n;
        assert_eq!(data.len(), n * n * n, "cube size mismatch");
        let fft = match dir {
            Direction::Forward => &self.forward,
            Direction::Inverse => &self.inverse,
        };
        let mut scratch = vec![Complex64::default(); fft.get_inplace_scratch_len()];
        // x lines are contiguous
        fft.process_with_scratch(data, &mut scratch);

        let mut block = vec![Complex64::default(); n * n];
        // y lines: transpose each z-plane
        for k in 0..n {
            let plane = &mut data[k * n * n..(k + 1) * n * n];
            for j in 0..n {
                for i in 0..n {
                    block[i * n + j] = plane[i + n * j];
                }
            }
            fft.process_with_scratch(&mut block, &mut scratch);
            for j in 0..n {
                for i in 0..n {
                    plane[i + n * j] = block[i * n + j];
                }
            }
        }
        // z lines: gather one y-slab at a time
        for j in 0..n {
            for k in 0..n {
                let base = n * (j + n * k);
                for i in 0..n {
                    block[i * n + k] = data[base + i];
                }
            }
            fft.process_with_scratch(&mut block, &mut scratch);
            for k in 0..n {
                let base = n * (j + n * k);
                for i in 0..n {
                    data[base + i] = block[i * n + k];
                }
            }
        }
    }
}
