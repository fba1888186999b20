//! Spectral quantities on loops: transforms, fractional Sobolev norms,
//! multipliers, derivatives and the `H^{-1/2} × H^{1/2}` pairing.
//!
//! The norm of order `s` weights mode `n` by `(1 + |n|)^{2s}`:
//!
//! ```text
//! ‖f‖_s² = Σ_n (1 + |n|)^{2s} ‖f_n‖²
//! ```

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rustfft::FftPlanner;

use crate::ambient::{Ambient, C64};
use crate::error::{Error, Result};
use crate::loops::{FourierLoop, SampledLoop};

/// A Sobolev exponent `s`; any finite real is allowed.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct SobolevOrder(pub f64);

impl SobolevOrder {
    pub const L2: SobolevOrder = SobolevOrder(0.0);

    /// `(1 + |n|)^{2s}`
    pub fn weight(&self, n: i64) -> f64 {
        (1.0 + n.unsigned_abs() as f64).powf(2.0 * self.0)
    }
}

impl From<f64> for SobolevOrder {
    fn from(s: f64) -> Self {
        SobolevOrder(s)
    }
}

/// Largest cutoff a grid of `sample_count` points resolves without aliasing.
pub fn max_cutoff(sample_count: usize) -> usize {
    (sample_count - 1) / 2
}

pub fn dft_analyze(sampled: &SampledLoop, cutoff: usize) -> Result<FourierLoop> {
    let m = sampled.len();
    if cutoff > max_cutoff(m) {
        return Err(Error::Precondition(format!(
            "cutoff {cutoff} exceeds {} for {m} samples",
            max_cutoff(m)
        )));
    }
    let ambient = sampled.ambient();
    let d = ambient.dim();
    let fft = FftPlanner::new().plan_fft_forward(m);
    let mut out = FourierLoop::zero(ambient, cutoff);
    let mut buf = vec![C64::new(0.0, 0.0); m];
    let scale = 1.0 / m as f64;
    for k in 0..d {
        for (j, slot) in buf.iter_mut().enumerate() {
            *slot = sampled.get(j)[k];
        }
        fft.process(&mut buf);
        for n in out.modes() {
            let idx = n.rem_euclid(m as i64) as usize;
            out.coeff_mut(n)[k] = buf[idx] * scale;
        }
    }
    Ok(out)
}

/// Analysis at the largest cutoff the grid supports.
pub fn dft_analyze_full(sampled: &SampledLoop) -> FourierLoop {
    dft_analyze(sampled, max_cutoff(sampled.len())).expect("maximal cutoff is admissible")
}

/// Evaluates `Σ_n f_n e^{2πinj/M}`. Real ambients keep the real part.
pub fn dft_synthesize(loop_: &FourierLoop, sample_count: usize) -> Result<SampledLoop> {
    let cutoff = loop_.cutoff();
    if sample_count < 2 * cutoff + 1 {
        return Err(Error::Precondition(format!(
            "{sample_count} samples undersample cutoff {cutoff} (need {})",
            2 * cutoff + 1
        )));
    }
    let ambient = loop_.ambient();
    let d = ambient.dim();
    let m = sample_count;
    let fft = FftPlanner::new().plan_fft_inverse(m);
    let mut samples = vec![C64::new(0.0, 0.0); m * d];
    let mut buf = vec![C64::new(0.0, 0.0); m];
    for k in 0..d {
        buf.iter_mut().for_each(|z| *z = C64::new(0.0, 0.0));
        for n in loop_.modes() {
            buf[n.rem_euclid(m as i64) as usize] = loop_.coeff(n)[k];
        }
        fft.process(&mut buf);
        for (j, z) in buf.iter().enumerate() {
            samples[j * d + k] = if ambient.is_real() {
                C64::new(z.re, 0.0)
            } else {
                *z
            };
        }
    }
    SampledLoop::new(ambient, samples)
}

pub fn sobolev_norm(loop_: &FourierLoop, order: SobolevOrder) -> f64 {
    let amb = loop_.ambient();
    loop_
        .modes()
        .map(|n| order.weight(n) * amb.norm_sqr(loop_.coeff(n)))
        .sum::<f64>()
        .sqrt()
}

/// Norm of the analysed samples at the grid's maximal cutoff.
pub fn sampled_sobolev_norm(sampled: &SampledLoop, order: SobolevOrder) -> f64 {
    sobolev_norm(&dft_analyze_full(sampled), order)
}

pub fn sobolev_inner(u: &FourierLoop, v: &FourierLoop, order: SobolevOrder) -> Result<C64> {
    u.ensure_compatible(v)?;
    let amb = u.ambient();
    Ok(u.modes()
        .map(|n| amb.inner(u.coeff(n), v.coeff(n)) * order.weight(n))
        .sum())
}

/// The operator `(1 + Δ^{1/2})^{2s}`, acting as `f_n ↦ (1 + |n|)^{2s} f_n`.
pub fn fractional_multiplier(loop_: &FourierLoop, order: SobolevOrder) -> FourierLoop {
    loop_.map_modes(|n, c| c * order.weight(n))
}

/// `f_n ↦ 2πin f_n`
pub fn loop_derivative(loop_: &FourierLoop) -> FourierLoop {
    loop_.map_modes(|n, c| c * C64::new(0.0, 2.0 * PI * n as f64))
}

/// Spectral derivative of samples, at the maximal cutoff of the grid.
pub fn sampled_derivative(sampled: &SampledLoop) -> SampledLoop {
    let f = dft_analyze_full(sampled);
    dft_synthesize(&loop_derivative(&f), sampled.len()).expect("same grid")
}

/// Value of the mode-wise pairing together with the two weighted norms that
/// bound it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DualPairing {
    pub value: C64,
    /// `‖u‖_{-1/2}`
    pub u_norm: f64,
    /// `‖v‖_{1/2}`
    pub v_norm: f64,
}

impl DualPairing {
    /// `|⟨u, v⟩| / (‖u‖_{-1/2} ‖v‖_{1/2})`, or 0 when either norm vanishes.
    pub fn ratio(&self) -> f64 {
        let denom = self.u_norm * self.v_norm;
        if denom == 0.0 {
            0.0
        } else {
            self.value.norm() / denom
        }
    }
}

/// `Σ_n (u_n, v_n)`, the L² pairing extended to `H^{-1/2} × H^{1/2}`.
pub fn dual_pairing(u: &FourierLoop, v: &FourierLoop) -> Result<DualPairing> {
    let value = sobolev_inner(u, v, SobolevOrder::L2)?;
    Ok(DualPairing {
        value,
        u_norm: sobolev_norm(u, SobolevOrder(-0.5)),
        v_norm: sobolev_norm(v, SobolevOrder(0.5)),
    })
}

pub fn pointwise_product(f: &SampledLoop, g: &SampledLoop) -> Result<SampledLoop> {
    f.ensure_compatible(g)?;
    let amb = f.ambient();
    if !amb.supports_product() {
        return Err(Error::NotAnAlgebra(amb.to_string()));
    }
    let d = amb.dim();
    let mut samples = vec![C64::new(0.0, 0.0); f.len() * d];
    for (j, out) in samples.chunks_mut(d).enumerate() {
        amb.multiply_into(f.get(j), g.get(j), out)?;
    }
    SampledLoop::new(amb, samples)
}

/// Product of two band-limited loops, computed without aliasing: the result
/// has cutoff `f.cutoff() + g.cutoff()`.
pub fn spectral_product(f: &FourierLoop, g: &FourierLoop) -> Result<FourierLoop> {
    f.ambient().ensure_same(&g.ambient())?;
    let cutoff = f.cutoff() + g.cutoff();
    let m = (2 * cutoff + 1).next_power_of_two();
    let fs = dft_synthesize(f, m)?;
    let gs = dft_synthesize(g, m)?;
    dft_analyze(&pointwise_product(&fs, &gs)?, cutoff)
}

/// Random loop with `|f_n| = (1 + |n|)^{-(order_target + 1/2)}` per
/// coordinate and uniform random phases, so `‖·‖_s` stays bounded in the
/// cutoff exactly for `s < order_target`.
///
/// Modes are drawn in the order `0, 1, -1, 2, -2, ...`, so a smaller cutoff
/// with the same seed yields a truncation of the larger loop. Real ambients
/// get conjugate-symmetric coefficients.
pub fn random_rough_loop(
    ambient: Ambient,
    order_target: SobolevOrder,
    cutoff: usize,
    seed: u64,
) -> Result<FourierLoop> {
    ambient.check()?;
    if cutoff < 1 {
        return Err(Error::Precondition("cutoff must be at least 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let d = ambient.dim();
    let mut out = FourierLoop::zero(ambient, cutoff);
    let phase = |rng: &mut ChaCha8Rng| C64::from_polar(1.0, rng.gen_range(0.0..2.0 * PI));
    for k in 0..d {
        let z = phase(&mut rng);
        out.coeff_mut(0)[k] = if ambient.is_real() {
            C64::new(z.re.signum(), 0.0)
        } else {
            z
        };
    }
    for n in 1..=cutoff as i64 {
        let amp = (1.0 + n as f64).powf(-(order_target.0 + 0.5));
        for k in 0..d {
            let z = phase(&mut rng) * amp;
            out.coeff_mut(n)[k] = z;
            out.coeff_mut(-n)[k] = if ambient.is_real() {
                z.conj()
            } else {
                phase(&mut rng) * amp
            };
        }
    }
    Ok(out)
}

/// Random smooth loop: only modes `|n| ≤ cutoff`, with i.i.d. Gaussian-ish
/// coefficients of size `scale / (1 + |n|)^2`.
pub fn random_smooth_loop(ambient: Ambient, cutoff: usize, scale: f64, seed: u64) -> FourierLoop {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = FourierLoop::zero(ambient, cutoff);
    for n in 0..=cutoff as i64 {
        let amp = scale / (1.0 + n as f64).powi(2);
        for k in 0..ambient.dim() {
            let z = C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)) * amp;
            if ambient.is_real() {
                if n == 0 {
                    out.coeff_mut(0)[k] = C64::new(z.re, 0.0);
                } else {
                    out.coeff_mut(n)[k] = z;
                    out.coeff_mut(-n)[k] = z.conj();
                }
            } else {
                out.coeff_mut(n)[k] = z;
                if n != 0 {
                    out.coeff_mut(-n)[k] =
                        C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)) * amp;
                }
            }
        }
    }
    out
}

/// Exact Fourier coefficients of the indicator of `[a, b] ⊂ [0, 1)`.
pub fn interval_indicator(a: f64, b: f64, cutoff: usize) -> FourierLoop {
    FourierLoop::from_fn(Ambient::Real(1), cutoff, |n| {
        let c = if n == 0 {
            C64::new(b - a, 0.0)
        } else {
            let w = 2.0 * PI * n as f64;
            // ∫_a^b e^{-iwt} dt = (e^{-iwa} - e^{-iwb}) / (iw)
            (C64::from_polar(1.0, -w * a) - C64::from_polar(1.0, -w * b)) / C64::new(0.0, w)
        };
        vec![c]
    })
}

/// Partial sums `Σ_{|n| ≤ N} (1+|n|)^{2s} |f_n|²` at each requested cutoff.
pub fn partial_norm_sums(loop_: &FourierLoop, order: SobolevOrder, cutoffs: &[usize]) -> Vec<f64> {
    cutoffs
        .iter()
        .map(|&c| sobolev_norm(&loop_.with_cutoff(c.min(loop_.cutoff())), order).powi(2))
        .collect()
}
