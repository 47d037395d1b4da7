//! Depolarizing noise, GHZ states and projection-noise sampling.

use std::f64::consts::SQRT_2;

use num_complex::Complex64;
use rand::distr::{Bernoulli, Distribution};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::analysis::{GhzSummary, MeasurementRecord, Target};
use crate::bell::{mk_beta, mk_closed_form, operator_expectation};
use crate::error::{Error, Result};
use crate::pauli::{Letter, PauliString};
use crate::state::{check_qubits, DensityMatrix, StateVector, MAX_STATEVECTOR_QUBITS};

/// Largest register for dense channel simulation.
pub const MAX_NOISE_QUBITS: usize = 8;

/// Per-qubit retention probability `p` of the depolarizing channel.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct NoiseSpec {
    p: f64,
}

impl NoiseSpec {
    pub fn new(p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::Invalid(format!("noise retention p = {p} outside [0, 1]")));
        }
        Ok(NoiseSpec { p })
    }

    pub fn ideal() -> Self {
        NoiseSpec { p: 1.0 }
    }

    pub fn p(&self) -> f64 {
        self.p
    }
}

/// `ℰ_j(p)ρ = pρ + (1−p)/4 Σ_{k=0}^{3} σ_k ρ σ_k` on qubit `j`.
pub fn depolarize_qubit(rho: &DensityMatrix, qubit: usize, spec: NoiseSpec) -> Result<DensityMatrix> {
    let n = rho.n();
    check_qubits(n, MAX_NOISE_QUBITS)?;
    if qubit >= n {
        return Err(Error::Contract(format!("qubit {qubit} out of range for {n} qubits")));
    }
    let e = rho.entries();
    let dim = e.nrows();
    let mut out = e * Complex64::new(spec.p, 0.0);
    let w = (1.0 - spec.p) / 4.0;
    for l in [Letter::I, Letter::X, Letter::Y, Letter::Z] {
        let s = PauliString::single(n, qubit, l)?;
        let (ix, iz, base) = s.index_form();
        // (σρσ)[r, c] = σ[r, r⊕x] ρ[r⊕x, c⊕x] σ[c⊕x, c]
        let col_value = |b: usize| s.action(ix, iz, base, b).1;
        for c in 0..dim {
            let vc = col_value(c);
            for r in 0..dim {
                out[(r, c)] += col_value(r ^ ix) * e[(r ^ ix, c ^ ix)] * vc * w;
            }
        }
    }
    Ok(DensityMatrix::from_raw(n, out))
}

/// Applies the channel to every qubit.
pub fn depolarize_all(rho: &DensityMatrix, spec: NoiseSpec) -> Result<DensityMatrix> {
    (0..rho.n()).try_fold(rho.clone(), |r, q| depolarize_qubit(&r, q, spec))
}

/// `(|0…0⟩ + e^{iβ}|1…1⟩)/√2`.
pub fn ghz_state(n: usize, beta: f64) -> Result<StateVector> {
    check_qubits(n, MAX_STATEVECTOR_QUBITS)?;
    let dim = 1usize << n;
    let mut a = vec![Complex64::new(0.0, 0.0); dim];
    a[0] = Complex64::new(1.0 / SQRT_2, 0.0);
    a[dim - 1] += Complex64::from_polar(1.0 / SQRT_2, beta);
    StateVector::new(n, a)
}

/// Analytic MK prediction for a depolarized GHZ state.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct NoisyMk {
    /// `tr(B_n ρ) = pⁿ`.
    pub mk_value: f64,
    /// `R = (√2 p)ⁿ/√2`.
    pub relative_violation: f64,
}

pub fn noisy_ghz_mk(n: usize, spec: NoiseSpec) -> Result<NoisyMk> {
    if n == 0 {
        return Err(Error::Invalid("n must be at least 1".into()));
    }
    let n = i32::try_from(n).map_err(|_| Error::Invalid("n too large".into()))?;
    Ok(NoisyMk {
        mk_value: spec.p.powi(n),
        relative_violation: (SQRT_2 * spec.p).powi(n) / SQRT_2,
    })
}

/// Dense-channel MK value of the depolarized `|ψ_n⟩`.
pub fn noisy_ghz_mk_numeric(n: usize, spec: NoiseSpec) -> Result<f64> {
    let rho = depolarize_all(&ghz_state(n, mk_beta(n))?.to_density()?, spec)?;
    operator_expectation(&mk_closed_form(n)?, &rho)
}

/// Populations and extreme coherence of the depolarized GHZ state.
pub fn noisy_ghz_summary(n: usize, spec: NoiseSpec) -> Result<GhzSummary> {
    if n == 0 {
        return Err(Error::Invalid("n must be at least 1".into()));
    }
    let n32 = n as i32;
    let p = spec.p;
    let pop = 0.5 * (((1.0 + p) / 2.0).powi(n32) + ((1.0 - p) / 2.0).powi(n32));
    GhzSummary::new(n, pop, pop, p.powi(n32) / 2.0, Some(mk_beta(n)), [0.0; 3])
}

/// Smallest `n ≤ max_n` with `R > 1`, if any.
pub fn violation_onset(spec: NoiseSpec, max_n: usize) -> Result<Option<usize>> {
    for n in 1..=max_n {
        if noisy_ghz_mk(n, spec)?.relative_violation > 1.0 {
            return Ok(Some(n));
        }
    }
    Ok(None)
}

/// Mean of `shots` ±1 outcomes with its plug-in standard error.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ShotEstimate {
    pub value: f64,
    pub stderr: f64,
    pub shots: u64,
}

fn sample_with(rng: &mut ChaCha8Rng, true_value: f64, shots: u64) -> Result<ShotEstimate> {
    if shots < 2 {
        return Err(Error::Invalid(format!("at least 2 shots required, got {shots}")));
    }
    if !(-1.0..=1.0).contains(&true_value) {
        return Err(Error::Invalid(format!("expectation {true_value} outside [-1, 1]")));
    }
    let plus = Bernoulli::new((1.0 + true_value) / 2.0)
        .map_err(|e| Error::Numerical(e.to_string()))?;
    let up = (0..shots).filter(|_| plus.sample(rng)).count() as f64;
    let value = (2.0 * up - shots as f64) / shots as f64;
    Ok(ShotEstimate {
        value,
        stderr: ((1.0 - value * value).max(0.0) / shots as f64).sqrt(),
        shots,
    })
}

/// Draws `shots` outcomes with `P(+1) = (1+e)/2` from a ChaCha8 stream seeded by `seed`.
pub fn sample_expectation(true_value: f64, shots: u64, seed: u64) -> Result<ShotEstimate> {
    sample_with(&mut ChaCha8Rng::seed_from_u64(seed), true_value, shots)
}

/// Simulated measurement of all `2ⁿ` stabilizer observables of a target
/// under uniform depolarizing noise.
///
/// Each observable uses its own ChaCha8 stream (stream index = position in
/// the group), so records are independent of evaluation order. The identity
/// row carries no projection noise.
pub fn simulate_records(target: &Target, spec: NoiseSpec, shots: u64, seed: u64) -> Result<Vec<MeasurementRecord>> {
    let words = target.stabilizer_words()?;
    words
        .into_iter()
        .enumerate()
        .map(|(k, word)| {
            if word.is_identity() {
                return Ok(MeasurementRecord {
                    word,
                    value: 1.0,
                    stderr: 0.0,
                    shots: Some(shots),
                });
            }
            let truth = spec.p.powi(word.weight() as i32);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(k as u64);
            let est = sample_with(&mut rng, truth, shots)?;
            Ok(MeasurementRecord {
                word,
                value: est.value,
                stderr: est.stderr,
                shots: Some(shots),
            })
        })
        .collect()
}

/// Dense noisy density matrix of a target's state, for cross-checks.
pub fn noisy_target_state(target: &Target, spec: NoiseSpec) -> Result<DensityMatrix> {
    depolarize_all(&target.state_vector()?.to_density()?, spec)
}

/// `⟨0…0|ρ|1…1⟩`-type element for a dense state.
pub fn extreme_coherence(rho: &DensityMatrix) -> Complex64 {
    let dim = rho.entries().nrows();
    rho.entries()[(dim - 1, 0)]
}
