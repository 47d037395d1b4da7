//! Pure and mixed states on small qubit registers.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::pauli::{PauliString, MAX_DENSE_QUBITS};

/// Largest register handled by matrix-free statevector routines.
pub const MAX_STATEVECTOR_QUBITS: usize = 20;

/// Equality tolerance for exact-valued quantities.
pub const EQ_TOL: f64 = 1e-10;
/// Tolerance on residues that must vanish (imaginary parts, eigenvalues).
pub const RESIDUE_TOL: f64 = 1e-8;

#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    n: usize,
    amplitudes: Vec<Complex64>,
}

impl StateVector {
    /// Wraps amplitudes, checking length `2ⁿ` and unit norm.
    pub fn new(n: usize, amplitudes: Vec<Complex64>) -> Result<Self> {
        check_qubits(n, MAX_STATEVECTOR_QUBITS)?;
        if amplitudes.len() != 1usize << n {
            return Err(Error::dimension(1usize << n, amplitudes.len()));
        }
        let norm: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        if (norm - 1.0).abs() > EQ_TOL {
            return Err(Error::Contract(format!("state norm² = {norm}, expected 1")));
        }
        Ok(StateVector { n, amplitudes })
    }

    /// Normalizes arbitrary nonzero amplitudes.
    pub fn normalized(n: usize, mut amplitudes: Vec<Complex64>) -> Result<Self> {
        let norm: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::Contract("cannot normalize a zero vector".into()));
        }
        amplitudes.iter_mut().for_each(|a| *a /= norm);
        Self::new(n, amplitudes)
    }

    pub(crate) fn from_raw(n: usize, amplitudes: Vec<Complex64>) -> Self {
        debug_assert_eq!(amplitudes.len(), 1usize << n);
        StateVector { n, amplitudes }
    }

    /// Computational basis state `|index⟩`.
    pub fn basis(n: usize, index: usize) -> Result<Self> {
        check_qubits(n, MAX_STATEVECTOR_QUBITS)?;
        let dim = 1usize << n;
        if index >= dim {
            return Err(Error::Contract(format!("basis index {index} out of range")));
        }
        let mut a = vec![Complex64::new(0.0, 0.0); dim];
        a[index] = Complex64::new(1.0, 0.0);
        Ok(StateVector { n, amplitudes: a })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &StateVector) -> Result<Complex64> {
        if self.n != other.n {
            return Err(Error::dimension(self.n, other.n));
        }
        Ok(self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// `|⟨self|other⟩|²`; equality modulo global phase means fidelity 1.
    pub fn fidelity(&self, other: &StateVector) -> Result<f64> {
        Ok(self.inner(other)?.norm_sqr())
    }

    /// Applies a Pauli word without forming a matrix.
    pub fn apply_pauli(&self, p: &PauliString) -> Result<StateVector> {
        if p.n() != self.n {
            return Err(Error::dimension(self.n, p.n()));
        }
        let (ix, iz, base) = p.index_form();
        let mut out = vec![Complex64::new(0.0, 0.0); self.amplitudes.len()];
        for (b, a) in self.amplitudes.iter().enumerate() {
            let (t, c) = p.action(ix, iz, base, b);
            out[t] = c * a;
        }
        Ok(StateVector::from_raw(self.n, out))
    }

    pub fn to_density(&self) -> Result<DensityMatrix> {
        check_qubits(self.n, MAX_DENSE_QUBITS)?;
        let v = nalgebra::DVector::from_column_slice(&self.amplitudes);
        Ok(DensityMatrix {
            n: self.n,
            entries: &v * v.adjoint(),
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    n: usize,
    entries: DMatrix<Complex64>,
}

impl DensityMatrix {
    /// Validates Hermiticity, unit trace and positivity.
    pub fn new(n: usize, entries: DMatrix<Complex64>) -> Result<Self> {
        check_qubits(n, MAX_DENSE_QUBITS)?;
        let dim = 1usize << n;
        if entries.nrows() != dim || entries.ncols() != dim {
            return Err(Error::dimension(dim, entries.nrows()));
        }
        let herm_err = (&entries - entries.adjoint())
            .iter()
            .fold(0.0f64, |m, v| m.max(v.norm()));
        if herm_err > EQ_TOL {
            return Err(Error::Contract(format!("matrix not Hermitian (max |ρ-ρ†| = {herm_err:e})")));
        }
        let tr = entries.trace();
        if (tr.re - 1.0).abs() > EQ_TOL || tr.im.abs() > EQ_TOL {
            return Err(Error::Contract(format!("trace = {tr}, expected 1")));
        }
        let min_eig = SymmetricEigen::new(entries.clone())
            .eigenvalues
            .iter()
            .fold(f64::INFINITY, |m, &v| m.min(v));
        if min_eig < -RESIDUE_TOL {
            return Err(Error::Contract(format!("negative eigenvalue {min_eig:e}")));
        }
        Ok(DensityMatrix { n, entries })
    }

    pub(crate) fn from_raw(n: usize, entries: DMatrix<Complex64>) -> Self {
        DensityMatrix { n, entries }
    }

    pub fn maximally_mixed(n: usize) -> Result<Self> {
        check_qubits(n, MAX_DENSE_QUBITS)?;
        let dim = 1usize << n;
        Ok(DensityMatrix {
            n,
            entries: DMatrix::identity(dim, dim) / Complex64::new(dim as f64, 0.0),
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn entries(&self) -> &DMatrix<Complex64> {
        &self.entries
    }

    pub fn trace(&self) -> Complex64 {
        self.entries.trace()
    }

    /// `⟨ψ|ρ|ψ⟩`.
    pub fn fidelity_with(&self, psi: &StateVector) -> Result<f64> {
        if psi.n() != self.n {
            return Err(Error::dimension(self.n, psi.n()));
        }
        let v = nalgebra::DVector::from_column_slice(psi.amplitudes());
        let r = (v.adjoint() * &self.entries * &v)[(0, 0)];
        real_part(r)
    }
}

/// Borrowed pure or mixed state.
#[derive(Clone, Copy, Debug)]
pub enum StateRef<'a> {
    Pure(&'a StateVector),
    Mixed(&'a DensityMatrix),
}

impl StateRef<'_> {
    pub fn n(&self) -> usize {
        match self {
            StateRef::Pure(s) => s.n(),
            StateRef::Mixed(r) => r.n(),
        }
    }
}

impl<'a> From<&'a StateVector> for StateRef<'a> {
    fn from(s: &'a StateVector) -> Self {
        StateRef::Pure(s)
    }
}

impl<'a> From<&'a DensityMatrix> for StateRef<'a> {
    fn from(r: &'a DensityMatrix) -> Self {
        StateRef::Mixed(r)
    }
}

pub(crate) fn check_qubits(n: usize, max: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::Contract("qubit count must be at least 1".into()));
    }
    if n > max {
        return Err(Error::Capacity(format!("{n} qubits exceeds the limit of {max}")));
    }
    Ok(())
}

/// Discards an imaginary residue after checking it is negligible.
pub(crate) fn real_part(z: Complex64) -> Result<f64> {
    if z.im.abs() > RESIDUE_TOL {
        return Err(Error::Numerical(format!("imaginary residue {:e}", z.im)));
    }
    Ok(z.re)
}

/// Unchecked complex expectation `Tr(P ρ)` or `⟨ψ|P|ψ⟩`.
pub(crate) fn pauli_expectation_complex(p: &PauliString, state: StateRef<'_>) -> Result<Complex64> {
    if p.n() != state.n() {
        return Err(Error::dimension(state.n(), p.n()));
    }
    let (ix, iz, base) = p.index_form();
    let mut acc = Complex64::new(0.0, 0.0);
    match state {
        StateRef::Pure(s) => {
            let a = s.amplitudes();
            for (b, amp) in a.iter().enumerate() {
                let (t, c) = p.action(ix, iz, base, b);
                acc += a[t].conj() * c * amp;
            }
        }
        StateRef::Mixed(r) => {
            // Tr(Pρ) = Σ_c P[c⊕x, c] ρ[c, c⊕x]
            let e = r.entries();
            for col in 0..e.nrows() {
                let (row, c) = p.action(ix, iz, base, col);
                acc += c * e[(col, row)];
            }
        }
    }
    Ok(acc)
}

/// Real expectation of a Hermitian Pauli word.
pub fn pauli_expectation<'a>(p: &PauliString, state: impl Into<StateRef<'a>>) -> Result<f64> {
    if !p.is_hermitian() {
        return Err(Error::Contract(format!("{p} is not Hermitian")));
    }
    real_part(pauli_expectation_complex(p, state.into())?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ghz(n: usize) -> StateVector {
        let mut a = vec![Complex64::new(0.0, 0.0); 1 << n];
        a[0] = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        a[(1 << n) - 1] = a[0];
        StateVector::new(n, a).unwrap()
    }

    fn dense_trace(p: &PauliString, rho: &DensityMatrix) -> f64 {
        (p.to_matrix().unwrap() * rho.entries()).trace().re
    }

    #[test]
    fn plus_state_x_expectation() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let plus = StateVector::new(1, vec![Complex64::new(h, 0.0); 2]).unwrap();
        let x: PauliString = "X".parse().unwrap();
        assert!((pauli_expectation(&x, &plus).unwrap() - 1.0).abs() < EQ_TOL);
    }

    #[test]
    fn ghz_expectations() {
        let g4 = ghz(4);
        let xxxx: PauliString = "XXXX".parse().unwrap();
        assert!((pauli_expectation(&xxxx, &g4).unwrap() - 1.0).abs() < EQ_TOL);

        let g3 = ghz(3);
        let rho = g3.to_density().unwrap();
        for (w, want) in [("ZZI", 1.0), ("ZII", 0.0), ("-ZIZ", -1.0), ("YYX", -1.0)] {
            let p: PauliString = w.parse().unwrap();
            let v = pauli_expectation(&p, &g3).unwrap();
            let m = pauli_expectation(&p, &rho).unwrap();
            assert!((v - want).abs() < EQ_TOL, "{w}: {v}");
            assert!((m - want).abs() < EQ_TOL, "{w}: {m}");
            assert!((dense_trace(&p, &rho) - want).abs() < EQ_TOL, "{w}");
        }
    }

    #[test]
    fn non_hermitian_rejected() {
        let p: PauliString = "iX".parse().unwrap();
        assert!(matches!(pauli_expectation(&p, &ghz(1)), Err(Error::Contract(_))));
    }

    #[test]
    fn dimension_checked() {
        let p: PauliString = "XX".parse().unwrap();
        assert!(matches!(pauli_expectation(&p, &ghz(3)), Err(Error::Dimension { .. })));
    }

    #[test]
    fn density_validation() {
        assert!(DensityMatrix::maximally_mixed(2).is_ok());
        let bad = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
            Complex64::new(1.5, 0.0),
            Complex64::new(-0.5, 0.0),
        ]));
        assert!(matches!(DensityMatrix::new(1, bad), Err(Error::Contract(_))));
        let not_herm = DMatrix::from_row_slice(
            2,
            2,
            &[
                Complex64::new(0.5, 0.0),
                Complex64::new(0.1, 0.0),
                Complex64::new(0.0, 0.0),
                Complex64::new(0.5, 0.0),
            ],
        );
        assert!(DensityMatrix::new(1, not_herm).is_err());
    }

    #[test]
    fn statevector_norm_checked() {
        let a = vec![Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0)];
        assert!(StateVector::new(1, a.clone()).is_err());
        assert!(StateVector::normalized(1, a).is_ok());
    }

    #[test]
    fn matrix_free_agrees_with_dense() {
        let n = 3;
        let amps: Vec<Complex64> = (0..8)
            .map(|k| Complex64::new((k as f64 * 0.7).sin(), (k as f64 * 1.3).cos()))
            .collect();
        let s = StateVector::normalized(n, amps).unwrap();
        let rho = s.to_density().unwrap();
        for w in ["XYZ", "-ZZY", "IYI", "XXX"] {
            let p: PauliString = w.parse().unwrap();
            let a = pauli_expectation(&p, &s).unwrap();
            assert!((a - dense_trace(&p, &rho)).abs() < 1e-12);
            assert!((a - pauli_expectation(&p, &rho).unwrap()).abs() < 1e-12);
            let applied = s.apply_pauli(&p).unwrap();
            assert!((s.inner(&applied).unwrap().re - a).abs() < 1e-12);
        }
    }
}
