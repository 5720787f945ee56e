//! Short-time Fourier transform with perfect reconstruction, and
//! spectrogram-domain denoising.
//!
//! Frames use a square-root periodic Hann window `w[n] = sin(πn/N)` for both
//! analysis and synthesis. At 50% overlap the squared windows sum to one, so
//! overlap-add inverts the analysis exactly. Each frame is zero-padded to
//! `nfft` points and the DFT is scaled by `1/√nfft`, which makes the full
//! (two-sided) transform a Parseval frame.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::linalg::{ComplexMatrix, DenseMatrix, Matrix};
use crate::solver::{solve, SolverConfig};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StftParams {
    pub window_len: usize,
    pub hop: usize,
    pub nfft: usize,
}

impl Default for StftParams {
    fn default() -> Self {
        Self {
            window_len: 64,
            hop: 32,
            nfft: 512,
        }
    }
}

impl StftParams {
    pub fn validate(&self) -> Result<()> {
        if self.window_len < 2 || !self.window_len.is_multiple_of(2) {
            return Err(Error::BadParams(format!(
                "window length must be even and at least 2, got {}",
                self.window_len
            )));
        }
        if self.hop * 2 != self.window_len {
            return Err(Error::BadParams(format!(
                "hop must be half the window ({}), got {}",
                self.window_len / 2,
                self.hop
            )));
        }
        if self.nfft < self.window_len || !self.nfft.is_multiple_of(2) {
            return Err(Error::BadParams(format!(
                "nfft must be even and at least the window length, got {}",
                self.nfft
            )));
        }
        Ok(())
    }

    pub fn bins(&self) -> usize {
        self.nfft / 2 + 1
    }

    /// Frames needed so every sample is covered by two windows.
    pub fn frames_for(&self, signal_len: usize) -> usize {
        (self.hop + signal_len - 1) / self.hop + 1
    }

    pub fn window(&self) -> Vec<f64> {
        let n = self.window_len as f64;
        (0..self.window_len).map(|i| (PI * i as f64 / n).sin()).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Spectrogram {
    /// Bins `0..=nfft/2` by frames.
    pub data: ComplexMatrix,
    pub params: StftParams,
    pub signal_len: usize,
}

impl Spectrogram {
    pub fn with_data(&self, data: ComplexMatrix) -> Result<Self> {
        self.data.ensure_same_shape(&data)?;
        Ok(Self {
            data,
            params: self.params,
            signal_len: self.signal_len,
        })
    }
}

struct Plans {
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

fn plans(nfft: usize) -> Plans {
    let mut planner = FftPlanner::new();
    Plans {
        forward: planner.plan_fft_forward(nfft),
        inverse: planner.plan_fft_inverse(nfft),
    }
}

/// Analysis transform. The signal is preceded by `hop` zeros and padded at
/// the end so every sample lies under two frames.
pub fn stft(signal: &[f64], params: StftParams) -> Result<Spectrogram> {
    params.validate()?;
    if signal.is_empty() {
        return Err(Error::BadParams("signal is empty".into()));
    }
    let StftParams { hop, nfft, .. } = params;
    let frames = params.frames_for(signal.len());
    let bins = params.bins();
    let window = params.window();
    let fft = plans(nfft).forward;
    let scale = 1.0 / (nfft as f64).sqrt();

    let mut data = ComplexMatrix::zeros(bins, frames);
    let mut buf = vec![Complex64::new(0.0, 0.0); nfft];
    for f in 0..frames {
        buf.fill(Complex64::new(0.0, 0.0));
        for (n, w) in window.iter().enumerate() {
            // padded index f·hop + n maps to signal index f·hop + n − hop
            if let Some(&x) = (f * hop + n).checked_sub(hop).and_then(|i| signal.get(i)) {
                buf[n] = Complex64::new(w * x, 0.0);
            }
        }
        fft.process(&mut buf);
        for k in 0..bins {
            data[(k, f)] = buf[k] * scale;
        }
    }
    Ok(Spectrogram {
        data,
        params,
        signal_len: signal.len(),
    })
}

/// Synthesis transform: Hermitian extension, inverse DFT, real part,
/// synthesis window, overlap-add, crop to the original length.
pub fn istft(spec: &Spectrogram) -> Result<Vec<f64>> {
    let params = spec.params;
    params.validate()?;
    let StftParams { hop, nfft, .. } = params;
    let bins = params.bins();
    if spec.signal_len == 0 {
        return Err(Error::BadParams("signal length is zero".into()));
    }
    let frames = params.frames_for(spec.signal_len);
    if spec.data.shape() != (bins, frames) {
        return Err(Error::BadParams(format!(
            "expected {bins}×{frames} spectrogram for {} samples, got {:?}",
            spec.signal_len,
            spec.data.shape()
        )));
    }
    let window = params.window();
    let ifft = plans(nfft).inverse;
    let scale = 1.0 / (nfft as f64).sqrt();

    let mut out = vec![0.0; (frames + 1) * hop];
    let mut buf = vec![Complex64::new(0.0, 0.0); nfft];
    for f in 0..frames {
        for (k, b) in buf.iter_mut().enumerate() {
            *b = if k < bins { spec.data[(k, f)] } else { spec.data[(nfft - k, f)].conj() };
        }
        ifft.process(&mut buf);
        for (n, w) in window.iter().enumerate() {
            out[f * hop + n] += w * buf[n].re * scale;
        }
    }
    Ok(out[hop..hop + spec.signal_len].to_vec())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DenoiseMode {
    /// Solve on the complex spectrogram.
    #[default]
    Complex,
    /// Solve on the magnitudes and reattach the noisy phase.
    Magnitude,
}

impl std::str::FromStr for DenoiseMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "complex" => Ok(DenoiseMode::Complex),
            "magnitude" | "mag" => Ok(DenoiseMode::Magnitude),
            other => Err(Error::InvalidArgument(format!("unknown denoise mode `{other}`"))),
        }
    }
}

/// Denoises the spectrogram matrix and returns the modified spectrogram.
pub fn denoise_spectrogram(spec: &Spectrogram, cfg: &SolverConfig, mode: DenoiseMode) -> Result<Spectrogram> {
    let data = match mode {
        DenoiseMode::Complex => solve(&spec.data, cfg, None)?.x,
        DenoiseMode::Magnitude => {
            let mag: DenseMatrix = spec.data.moduli();
            let est = solve(&mag, cfg, None)?.x;
            let phases = spec.data.map(|c| if c.norm() > 0.0 { c / c.norm() } else { Complex64::new(1.0, 0.0) });
            Matrix::from_fn(mag.rows(), mag.cols(), |i, j| phases[(i, j)] * est[(i, j)])
        }
    };
    spec.with_data(data)
}

/// `S†(solve(S(y)))` with the default transform.
pub fn denoise_speech(signal: &[f64], cfg: &SolverConfig, mode: DenoiseMode) -> Result<Vec<f64>> {
    let spec = stft(signal, StftParams::default())?;
    istft(&denoise_spectrogram(&spec, cfg, mode)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::snr_db;

    fn wobble(len: usize, seed: u64) -> Vec<f64> {
        let mut state = seed.wrapping_mul(0x9E37_79B9_7F4A_7C15) | 1;
        (0..len)
            .map(|_| {
                state ^= state << 13;
                state ^= state >> 7;
                state ^= state << 17;
                (state >> 11) as f64 / (1u64 << 53) as f64 * 2.0 - 1.0
            })
            .collect()
    }

    fn max_err(a: &[f64], b: &[f64]) -> f64 {
        a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
    }

    #[test]
    fn params_are_checked() {
        let p = StftParams::default();
        assert!(p.validate().is_ok());
        assert!(StftParams { hop: 16, ..p }.validate().is_err());
        assert!(StftParams { nfft: 32, ..p }.validate().is_err());
        assert!(StftParams { window_len: 63, hop: 31, ..p }.validate().is_err());
        assert!(stft(&[], p).is_err());
    }

    #[test]
    fn window_squares_sum_to_one() {
        let p = StftParams::default();
        let w = p.window();
        for n in 0..p.hop {
            assert!((w[n] * w[n] + w[n + p.hop] * w[n + p.hop] - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn zero_and_dc() {
        let p = StftParams::default();
        let z = stft(&[0.0; 100], p).unwrap();
        assert_eq!(z.data.count_nonzero(), 0);
        assert_eq!(istft(&z).unwrap(), vec![0.0; 100]);

        let dc = stft(&[1.0; 256], p).unwrap();
        for f in 0..dc.data.cols() {
            let col: Vec<f64> = (0..dc.data.rows()).map(|k| dc.data[(k, f)].norm()).collect();
            let peak = col.iter().cloned().fold(0.0, f64::max);
            assert_eq!(col[0], peak);
        }
    }

    #[test]
    fn round_trip() {
        for (len, seed) in [(1, 1), (31, 2), (32, 3), (100, 4), (1000, 5)] {
            let x = wobble(len, seed);
            let spec = stft(&x, StftParams::default()).unwrap();
            assert_eq!(spec.data.cols(), StftParams::default().frames_for(len));
            assert!(max_err(&istft(&spec).unwrap(), &x) < 1e-10);
        }
        let p = StftParams { window_len: 16, hop: 8, nfft: 16 };
        let x = wobble(77, 9);
        assert!(max_err(&istft(&stft(&x, p).unwrap()).unwrap(), &x) < 1e-10);
    }

    #[test]
    fn synthesis_is_linear() {
        let p = StftParams::default();
        let s1 = stft(&wobble(300, 1), p).unwrap();
        let s2 = stft(&wobble(300, 2), p).unwrap();
        let s2 = s2.with_data(s2.data.map(|c| c * Complex64::new(0.3, -1.2))).unwrap();
        let alpha = -0.7;
        let combo = s1.with_data(&s1.data.scaled(alpha) + &s2.data).unwrap();
        let lhs = istft(&combo).unwrap();
        let a = istft(&s1).unwrap();
        let b = istft(&s2).unwrap();
        let rhs: Vec<f64> = a.iter().zip(&b).map(|(x, y)| alpha * x + y).collect();
        assert!(max_err(&lhs, &rhs) < 1e-10);
    }

    #[test]
    fn parseval_on_full_spectrum() {
        let x = wobble(640, 3);
        let spec = stft(&x, StftParams::default()).unwrap();
        let nfft = 512;
        let mut energy = 0.0;
        for f in 0..spec.data.cols() {
            for k in 0..spec.data.rows() {
                let e = spec.data[(k, f)].norm_sqr();
                energy += if k == 0 || k == nfft / 2 { e } else { 2.0 * e };
            }
        }
        let signal: f64 = x.iter().map(|v| v * v).sum();
        assert!((energy - signal).abs() < 1e-9 * signal);
    }

    #[test]
    fn passthrough_and_zero() {
        let x = wobble(500, 7);
        let cfg = SolverConfig::slr(0.0, 0.0);
        for mode in [DenoiseMode::Complex, DenoiseMode::Magnitude] {
            assert!(max_err(&denoise_speech(&x, &cfg, mode).unwrap(), &x) < 1e-10);
            let z = denoise_speech(&[0.0; 200], &SolverConfig::slr(0.1, 0.1), mode).unwrap();
            assert!(z.iter().all(|&v| v == 0.0));
        }
    }

    #[test]
    fn magnitude_mode_does_not_add_energy() {
        let x = wobble(400, 11);
        let spec = stft(&x, StftParams::default()).unwrap();
        let cfg = SolverConfig::with_kind(crate::PenaltyKind::Arctangent, 0.05, 0.02, 5.0, 20.0).unwrap();
        let out = denoise_spectrogram(&spec, &cfg, DenoiseMode::Magnitude).unwrap();
        assert!(out.data.frobenius_norm() <= spec.data.frobenius_norm());
    }

    #[test]
    fn tonal_signal_gains_snr() {
        let len = 2000;
        let clean: Vec<f64> = (0..len)
            .map(|t| {
                let t = t as f64;
                let env = (PI * t / len as f64).sin().powi(2);
                env * (0.5 * (2.0 * PI * t * 0.031).sin() + 0.3 * (2.0 * PI * t * 0.062).sin())
            })
            .collect();
        let sigma = 0.03;
        let row = DenseMatrix::from_row_major(1, len, clean.clone()).unwrap();
        let noisy = crate::datagen::add_awgn(&row, sigma, 21).unwrap().into_vec();
        let before = snr_db(&clean, &noisy).unwrap();
        let mut best = f64::NEG_INFINITY;
        for beta in [0.5, 1.0, 2.0] {
            let (l0, l1) = (beta * sigma, beta * sigma);
            let (a0, a1) = crate::tuning::penalties_from_c(0.5, l0, l1).unwrap();
            let cfg = SolverConfig::with_kind(crate::PenaltyKind::Arctangent, l0, l1, a0, a1).unwrap();
            let out = denoise_speech(&noisy, &cfg, DenoiseMode::Complex).unwrap();
            best = best.max(snr_db(&clean, &out).unwrap());
        }
        assert!(best > before, "denoised {best} dB vs noisy {before} dB");
    }
}
