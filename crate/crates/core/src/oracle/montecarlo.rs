//! Monte Carlo over the torus. Samples are grouped in fixed chunks, each chunk
//! drawn from its own ChaCha stream, and chunk statistics are merged in chunk
//! order, so the result does not depend on how chunks are scheduled.

use alloc::vec::Vec;

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use super::{walk_radii, Method, OracleParams, OracleResult};
use crate::linform::LinearForm;
use crate::Error;

pub const MC_CHUNK: usize = 4096;
const MIN_SAMPLES: usize = 10_000;

/// Count, mean and sum of squared deviations of one block of samples.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct McPartial {
    pub count: u64,
    pub mean: f64,
    pub m2: f64,
}

impl McPartial {
    fn push(&mut self, x: f64) {
        self.count += 1;
        let d = x - self.mean;
        self.mean += d / self.count as f64;
        self.m2 += d * (x - self.mean);
    }

    fn merge(self, o: McPartial) -> McPartial {
        if self.count == 0 {
            return o;
        }
        if o.count == 0 {
            return self;
        }
        let n = (self.count + o.count) as f64;
        let d = o.mean - self.mean;
        McPartial {
            count: self.count + o.count,
            mean: self.mean + d * o.count as f64 / n,
            m2: self.m2 + o.m2 + d * d * self.count as f64 * o.count as f64 / n,
        }
    }
}

fn uniform_angle(rng: &mut ChaCha8Rng) -> (f64, f64) {
    let u = (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64);
    let (s, c) = libm::sincos(2.0 * core::f64::consts::PI * u);
    (c, s)
}

fn chunk_len(samples: usize, chunk: usize) -> usize {
    MC_CHUNK.min(samples - chunk * MC_CHUNK)
}

fn chunk_count(samples: usize) -> usize {
    samples.div_ceil(MC_CHUNK)
}

/// One chunk of samples; the largest modulus is integrated in closed form and
/// the second is fixed at angle 0 by rotation.
pub fn montecarlo_chunk(form: &LinearForm, seed: u64, chunk: u64, count: usize) -> McPartial {
    let r = walk_radii(form);
    let mut part = McPartial::default();
    if r.len() <= 2 {
        let v = libm::log(r[0]);
        for _ in 0..count {
            part.push(v);
        }
        return part;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(chunk);
    let piv2 = r[0] * r[0];
    for _ in 0..count {
        let (mut re, mut im) = (r[1], 0.0);
        for &rk in &r[2..] {
            let (c, s) = uniform_angle(&mut rng);
            re += rk * c;
            im += rk * s;
        }
        part.push(0.5 * libm::log((re * re + im * im).max(piv2)));
    }
    part
}

/// Merge chunk statistics in order into an oracle result.
pub fn montecarlo_reduce(parts: &[McPartial], seed: u64) -> OracleResult {
    let total = parts.iter().fold(McPartial::default(), |acc, &p| acc.merge(p));
    let n = total.count as f64;
    let sd = if total.count > 1 {
        libm::sqrt(total.m2 / (n - 1.0))
    } else {
        0.0
    };
    OracleResult {
        value: total.mean,
        method: Method::MonteCarlo,
        error_estimate: 3.0 * sd / libm::sqrt(n),
        params: OracleParams {
            samples: Some(total.count as usize),
            seed: Some(seed),
            ..Default::default()
        },
    }
}

fn check_samples(samples: usize) -> Result<(), Error> {
    if samples < MIN_SAMPLES {
        return Err(Error::InvalidArgument(alloc::format!(
            "at least {MIN_SAMPLES} samples required, got {samples}"
        )));
    }
    Ok(())
}

pub fn mahler_montecarlo(form: &LinearForm, samples: usize, seed: u64) -> Result<OracleResult, Error> {
    check_samples(samples)?;
    let parts: Vec<McPartial> = (0..chunk_count(samples))
        .map(|i| montecarlo_chunk(form, seed, i as u64, chunk_len(samples, i)))
        .collect();
    Ok(montecarlo_reduce(&parts, seed))
}

/// Same result as [`mahler_montecarlo`], with chunks spread over threads.
#[cfg(feature = "std")]
pub fn mahler_montecarlo_threaded(
    form: &LinearForm,
    samples: usize,
    seed: u64,
    threads: usize,
) -> Result<OracleResult, Error> {
    check_samples(samples)?;
    let chunks = chunk_count(samples);
    let threads = threads.clamp(1, chunks);
    let mut parts = alloc::vec![McPartial::default(); chunks];
    std::thread::scope(|scope| {
        let handles: Vec<_> = (0..threads)
            .map(|t| {
                scope.spawn(move || {
                    (t..chunks)
                        .step_by(threads)
                        .map(|i| (i, montecarlo_chunk(form, seed, i as u64, chunk_len(samples, i))))
                        .collect::<Vec<_>>()
                })
            })
            .collect();
        for h in handles {
            for (i, p) in h.join().expect("sampling thread panicked") {
                parts[i] = p;
            }
        }
    });
    Ok(montecarlo_reduce(&parts, seed))
}
