//! Graph Bell operators and Mermin-Klyshko operators.

use std::collections::BTreeMap;
use std::f64::consts::{FRAC_PI_4, SQRT_2};
use std::fmt;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::pauli::{index_mask, Letter, PauliString, Phase, MAX_DENSE_QUBITS, MAX_PAULI_QUBITS};
use crate::stabilizer::{conjugate_by_inverse, stabilizer_group, LocalWord};
use crate::state::{pauli_expectation_complex, real_part, StateRef};

/// Largest graph for which the full Bell operator is expanded.
pub const MAX_BELL_QUBITS: usize = 16;

/// Largest register for symbolic Mermin-Klyshko expansion.
pub const MAX_MK_PAULI_QUBITS: usize = 20;

/// A real combination of Hermitian Pauli words.
///
/// Canonical form: one term per distinct letter pattern, coefficients
/// strictly positive with the sign carried by the word, sorted by
/// `(x_bits, z_bits)`.
#[derive(Clone, Debug, PartialEq)]
pub struct SignedPauliSum {
    n: usize,
    terms: Vec<(f64, PauliString)>,
}

impl SignedPauliSum {
    /// Builds a canonical sum; words must be Hermitian and sized `n`.
    pub fn new(n: usize, terms: impl IntoIterator<Item = (f64, PauliString)>) -> Result<Self> {
        let mut merged: BTreeMap<(u64, u64), f64> = BTreeMap::new();
        for (c, w) in terms {
            if w.n() != n {
                return Err(Error::dimension(n, w.n()));
            }
            let sign = w
                .sign()
                .ok_or_else(|| Error::Contract(format!("{w} is not Hermitian")))?;
            *merged.entry((w.x_bits(), w.z_bits())).or_insert(0.0) += c * sign as f64;
        }
        let terms = merged
            .into_iter()
            .filter(|(_, c)| *c != 0.0)
            .map(|((x, z), c)| {
                let phase = if c < 0.0 { Phase::MINUS_ONE } else { Phase::ONE };
                (c.abs(), PauliString::new(n, x, z, phase).expect("masks come from valid words"))
            })
            .collect();
        Ok(SignedPauliSum { n, terms })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn terms(&self) -> &[(f64, PauliString)] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Coefficient of the word's letter pattern, sign included.
    pub fn coefficient(&self, word: &PauliString) -> f64 {
        self.terms
            .iter()
            .find(|(_, w)| w.x_bits() == word.x_bits() && w.z_bits() == word.z_bits())
            .map(|(c, w)| c * w.sign().unwrap_or(1) as f64 * word.sign().unwrap_or(1) as f64)
            .unwrap_or(0.0)
    }

    pub fn to_dense(&self) -> Result<DMatrix<Complex64>> {
        if self.n > MAX_DENSE_QUBITS {
            return Err(Error::Capacity(format!("dense operator on {} qubits", self.n)));
        }
        let dim = 1usize << self.n;
        let mut m = DMatrix::zeros(dim, dim);
        for (c, w) in &self.terms {
            let (ix, iz, base) = w.index_form();
            for col in 0..dim {
                let (row, v) = w.action(ix, iz, base, col);
                m[(row, col)] += v * *c;
            }
        }
        Ok(m)
    }

    pub fn to_json(&self) -> serde_json::Value {
        #[derive(Serialize)]
        struct Term {
            coeff: f64,
            word: String,
        }
        #[derive(Serialize)]
        struct Sum {
            n: usize,
            terms: Vec<Term>,
        }
        serde_json::to_value(Sum {
            n: self.n,
            terms: self
                .terms
                .iter()
                .map(|(c, w)| Term {
                    coeff: *c,
                    word: w.to_string(),
                })
                .collect(),
        })
        .expect("sum serialization")
    }
}

impl fmt::Display for SignedPauliSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (c, w) in &self.terms {
            writeln!(f, "{c:.12} {w}")?;
        }
        Ok(())
    }
}

/// Anything with a real expectation value on pure or mixed states.
pub trait Observable {
    fn n(&self) -> usize;

    fn expectation(&self, state: StateRef<'_>) -> Result<f64>;
}

/// `⟨op⟩` on a state vector or density matrix.
pub fn operator_expectation<'a, O: Observable + ?Sized>(
    op: &O,
    state: impl Into<StateRef<'a>>,
) -> Result<f64> {
    op.expectation(state.into())
}

impl Observable for SignedPauliSum {
    fn n(&self) -> usize {
        self.n
    }

    fn expectation(&self, state: StateRef<'_>) -> Result<f64> {
        if state.n() != self.n {
            return Err(Error::dimension(self.n, state.n()));
        }
        let values = self
            .terms
            .iter()
            .map(|(c, w)| Ok(c * real_part(pauli_expectation_complex(w, state)?)?))
            .collect::<Result<Vec<f64>>>()?;
        Ok(pairwise_sum(&values))
    }
}

/// Order-fixed pairwise summation.
pub(crate) fn pairwise_sum(v: &[f64]) -> f64 {
    match v.len() {
        0 => 0.0,
        1 => v[0],
        len => {
            let (a, b) = v.split_at(len / 2);
            pairwise_sum(a) + pairwise_sum(b)
        }
    }
}

/// Dense Hermitian operator.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseOperator {
    n: usize,
    matrix: DMatrix<Complex64>,
}

impl DenseOperator {
    pub fn new(n: usize, matrix: DMatrix<Complex64>) -> Result<Self> {
        if n > MAX_DENSE_QUBITS {
            return Err(Error::Capacity(format!("dense operator on {n} qubits")));
        }
        let dim = 1usize << n;
        if matrix.nrows() != dim || matrix.ncols() != dim {
            return Err(Error::dimension(dim, matrix.nrows()));
        }
        Ok(DenseOperator { n, matrix })
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    /// Pauli decomposition `Σ_P Tr(P M)/2ⁿ · P`, dropping terms below `tol`.
    pub fn pauli_decomposition(&self, tol: f64) -> Result<SignedPauliSum> {
        let n = self.n;
        let dim = 1usize << n;
        let mut terms = Vec::new();
        for x in 0..(1u64 << n) {
            for z in 0..(1u64 << n) {
                let w = PauliString::new(n, x, z, Phase::ONE)?;
                let (ix, iz, base) = w.index_form();
                let mut tr = Complex64::new(0.0, 0.0);
                for col in 0..dim {
                    let (row, v) = w.action(ix, iz, base, col);
                    tr += v * self.matrix[(col, row)];
                }
                let c = real_part(tr / dim as f64)?;
                if c.abs() > tol {
                    terms.push((c, w));
                }
            }
        }
        SignedPauliSum::new(n, terms)
    }
}

impl Observable for DenseOperator {
    fn n(&self) -> usize {
        self.n
    }

    fn expectation(&self, state: StateRef<'_>) -> Result<f64> {
        if state.n() != self.n {
            return Err(Error::dimension(self.n, state.n()));
        }
        let v = match state {
            StateRef::Pure(s) => {
                let psi = nalgebra::DVector::from_column_slice(s.amplitudes());
                (psi.adjoint() * &self.matrix * &psi)[(0, 0)]
            }
            StateRef::Mixed(r) => (&self.matrix * r.entries()).trace(),
        };
        real_part(v)
    }
}

/// Operator given by its nonzero entries `(row, col, value)`.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseOperator {
    n: usize,
    entries: Vec<(usize, usize, Complex64)>,
}

impl SparseOperator {
    pub fn new(n: usize, entries: Vec<(usize, usize, Complex64)>) -> Result<Self> {
        if n == 0 || n >= 64 {
            return Err(Error::Capacity(format!("sparse operator on {n} qubits")));
        }
        let dim = 1u64 << n;
        if entries.iter().any(|&(r, c, _)| r as u64 >= dim || c as u64 >= dim) {
            return Err(Error::Contract("sparse entry out of range".into()));
        }
        Ok(SparseOperator { n, entries })
    }

    pub fn entries(&self) -> &[(usize, usize, Complex64)] {
        &self.entries
    }

    pub fn to_dense(&self) -> Result<DMatrix<Complex64>> {
        if self.n > MAX_DENSE_QUBITS {
            return Err(Error::Capacity(format!("dense operator on {} qubits", self.n)));
        }
        let dim = 1usize << self.n;
        let mut m = DMatrix::zeros(dim, dim);
        for &(r, c, v) in &self.entries {
            m[(r, c)] += v;
        }
        Ok(m)
    }

    pub fn is_hermitian(&self) -> bool {
        self.entries.iter().all(|&(r, c, v)| {
            self.entries
                .iter()
                .any(|&(r2, c2, v2)| r2 == c && c2 == r && (v2.conj() - v).norm() < 1e-12)
        })
    }
}

impl Observable for SparseOperator {
    fn n(&self) -> usize {
        self.n
    }

    fn expectation(&self, state: StateRef<'_>) -> Result<f64> {
        if state.n() != self.n {
            return Err(Error::dimension(self.n, state.n()));
        }
        let mut acc = Complex64::new(0.0, 0.0);
        match state {
            StateRef::Pure(s) => {
                let a = s.amplitudes();
                for &(r, c, v) in &self.entries {
                    acc += a[r].conj() * v * a[c];
                }
            }
            StateRef::Mixed(rho) => {
                let e = rho.entries();
                for &(r, c, v) in &self.entries {
                    acc += v * e[(c, r)];
                }
            }
        }
        real_part(acc)
    }
}

/// `(1/2ⁿ) Σ_{s∈S(G)} s`, the projector onto `|G⟩`.
pub fn graph_bell_operator(g: &Graph) -> Result<SignedPauliSum> {
    if g.n() > MAX_BELL_QUBITS {
        return Err(Error::Capacity(format!(
            "graph Bell operator limited to {MAX_BELL_QUBITS} qubits"
        )));
    }
    bell_operator_from_words(g.n(), stabilizer_group(g)?.into_iter().map(|e| e.word))
}

/// Bell operator of the locally rotated state `U†|G⟩`, `U = ⊗ corrections`.
pub fn rotated_graph_bell_operator(g: &Graph, corrections: &[LocalWord]) -> Result<SignedPauliSum> {
    if g.n() > MAX_BELL_QUBITS {
        return Err(Error::Capacity(format!(
            "graph Bell operator limited to {MAX_BELL_QUBITS} qubits"
        )));
    }
    let words = stabilizer_group(g)?
        .into_iter()
        .map(|e| conjugate_by_inverse(&e.word, corrections))
        .collect::<Result<Vec<_>>>()?;
    bell_operator_from_words(g.n(), words)
}

fn bell_operator_from_words(n: usize, words: impl IntoIterator<Item = PauliString>) -> Result<SignedPauliSum> {
    let c = 1.0 / (1u64 << n) as f64;
    SignedPauliSum::new(n, words.into_iter().map(|w| (c, w)))
}

/// Two unit measurement directions `(a_k, a'_k)` per qubit.
#[derive(Clone, Debug, PartialEq)]
pub struct MeasurementSetting {
    pairs: Vec<([f64; 3], [f64; 3])>,
}

impl MeasurementSetting {
    pub fn new(pairs: Vec<([f64; 3], [f64; 3])>) -> Result<Self> {
        if pairs.is_empty() {
            return Err(Error::Contract("at least one qubit required".into()));
        }
        for (k, (a, b)) in pairs.iter().enumerate() {
            for v in [a, b] {
                let norm = v.iter().map(|c| c * c).sum::<f64>().sqrt();
                if (norm - 1.0).abs() > 1e-12 {
                    return Err(Error::Contract(format!(
                        "setting vector for qubit {k} has norm {norm}, expected 1"
                    )));
                }
            }
        }
        Ok(MeasurementSetting { pairs })
    }

    /// `a_k = x̂`, `a'_k = ŷ` on every qubit.
    pub fn xy(n: usize) -> Result<Self> {
        Self::new(vec![([1.0, 0.0, 0.0], [0.0, 1.0, 0.0]); n])
    }

    pub fn n(&self) -> usize {
        self.pairs.len()
    }

    pub fn pairs(&self) -> &[([f64; 3], [f64; 3])] {
        &self.pairs
    }
}

/// `±X`, `±Y` or `±Z` when `v` is a signed coordinate axis.
fn axis_letter(v: &[f64; 3]) -> Option<(Letter, i64)> {
    let letters = [Letter::X, Letter::Y, Letter::Z];
    let mut found = None;
    for (i, &c) in v.iter().enumerate() {
        if (c.abs() - 1.0).abs() < 1e-12 {
            found = Some((letters[i], if c > 0.0 { 1 } else { -1 }));
        } else if c.abs() > 1e-12 {
            return None;
        }
    }
    found
}

fn sigma(v: &[f64; 3]) -> DMatrix<Complex64> {
    let mut m = DMatrix::zeros(2, 2);
    for (c, l) in v.iter().zip([Letter::X, Letter::Y, Letter::Z]) {
        let a = l.matrix();
        for r in 0..2 {
            for k in 0..2 {
                m[(r, k)] += a[r][k] * *c;
            }
        }
    }
    m
}

/// Result of the Mermin-Klyshko recursion.
#[derive(Clone, Debug)]
pub struct MkOperator {
    /// Dense form, present for `n ≤ 10`.
    pub dense: Option<DenseOperator>,
    /// Pauli expansion, present when every direction is a coordinate axis.
    pub pauli: Option<SignedPauliSum>,
}

/// Mermin-Klyshko operator from the recursion
/// `B_k = [B_{k−1}⊗(σ_a+σ_a') + B'_{k−1}⊗(σ_a−σ_a')] / (2√2)`, `B_1 = σ_{a_1}`,
/// where `B'` swaps every `a_k` with `a'_k`. Quantum maximum 1, LHV maximum
/// `2^{−(n−1)/2}`.
pub fn mk_recursive(settings: &MeasurementSetting) -> Result<MkOperator> {
    let n = settings.n();
    let axis: Option<Vec<_>> = settings
        .pairs()
        .iter()
        .map(|(a, b)| Some((axis_letter(a)?, axis_letter(b)?)))
        .collect();
    let pauli = match &axis {
        Some(ax) if n <= MAX_MK_PAULI_QUBITS => Some(mk_pauli_expansion(ax)?),
        _ => None,
    };
    let dense = if n <= MAX_DENSE_QUBITS {
        Some(mk_dense(settings)?)
    } else {
        None
    };
    if dense.is_none() && pauli.is_none() {
        return Err(Error::Capacity(format!(
            "MK operator on {n} qubits needs coordinate-axis settings (dense limit {MAX_DENSE_QUBITS})"
        )));
    }
    Ok(MkOperator { dense, pauli })
}

fn mk_dense(settings: &MeasurementSetting) -> Result<DenseOperator> {
    let c = Complex64::new(1.0 / (2.0 * SQRT_2), 0.0);
    let (a1, b1) = &settings.pairs()[0];
    let mut b = sigma(a1);
    let mut bp = sigma(b1);
    for (a, ap) in &settings.pairs()[1..] {
        let (sa, sap) = (sigma(a), sigma(ap));
        let next = (b.kronecker(&(&sa + &sap)) + bp.kronecker(&(&sa - &sap))) * c;
        let next_p = (bp.kronecker(&(&sap + &sa)) + b.kronecker(&(&sap - &sa))) * c;
        b = next;
        bp = next_p;
    }
    DenseOperator::new(settings.n(), b)
}

type IntSum = BTreeMap<(u64, u64), i64>;

/// Exact expansion: integer coefficients scaled by `(2√2)^{−(n−1)}`.
fn mk_pauli_expansion(axes: &[((Letter, i64), (Letter, i64))]) -> Result<SignedPauliSum> {
    let n = axes.len();
    let single = |q: usize, (l, s): (Letter, i64)| -> ((u64, u64), i64) {
        let (x, z) = l.bits();
        (((x as u64) << q, (z as u64) << q), s)
    };
    let mut b: IntSum = BTreeMap::new();
    let mut bp: IntSum = BTreeMap::new();
    let (k, v) = single(0, axes[0].0);
    b.insert(k, v);
    let (k, v) = single(0, axes[0].1);
    bp.insert(k, v);

    for (q, &(a, ap)) in axes.iter().enumerate().skip(1) {
        let sa = single(q, a);
        let sap = single(q, ap);
        // B_k = B⊗(a + a') + B'⊗(a − a'),  B'_k = B'⊗(a' + a) + B⊗(a' − a)
        let mut next = IntSum::new();
        let mut next_p = IntSum::new();
        accumulate(&mut next, &b, &[(sa, 1), (sap, 1)]);
        accumulate(&mut next, &bp, &[(sa, 1), (sap, -1)]);
        accumulate(&mut next_p, &bp, &[(sap, 1), (sa, 1)]);
        accumulate(&mut next_p, &b, &[(sap, 1), (sa, -1)]);
        next.retain(|_, c| *c != 0);
        next_p.retain(|_, c| *c != 0);
        b = next;
        bp = next_p;
    }

    let scale = (2.0 * SQRT_2).powi(-(n as i32 - 1));
    let terms = b
        .into_iter()
        .map(|((x, z), c)| Ok((c as f64 * scale, PauliString::new(n, x, z, Phase::ONE)?)))
        .collect::<Result<Vec<_>>>()?;
    SignedPauliSum::new(n, terms)
}

fn accumulate(out: &mut IntSum, src: &IntSum, factors: &[(((u64, u64), i64), i64)]) {
    for (&(x, z), &c) in src {
        for &(((fx, fz), s), m) in factors {
            *out.entry((x | fx, z | fz)).or_insert(0) += c * s * m;
        }
    }
}

/// `β_n = (n−1)π/4`.
pub fn mk_beta(n: usize) -> f64 {
    (n as f64 - 1.0) * FRAC_PI_4
}

/// Closed form `e^{iβ_n}|1…1⟩⟨0…0| + e^{−iβ_n}|0…0⟩⟨1…1|`.
pub fn mk_closed_form(n: usize) -> Result<SparseOperator> {
    mk_closed_form_with_phase(n, mk_beta(n))
}

/// Closed form with an arbitrary phase `β`.
pub fn mk_closed_form_with_phase(n: usize, beta: f64) -> Result<SparseOperator> {
    if n == 0 || n >= 64 {
        return Err(Error::Capacity(format!("closed-form MK operator on {n} qubits")));
    }
    let all = index_mask(crate::pauli::low_mask(n), n);
    let e = Complex64::from_polar(1.0, beta);
    SparseOperator::new(n, vec![(all, 0, e), (0, all, e.conj())])
}

/// Pauli expansion of the closed form:
/// `|1⟩⟨0|^{⊗n} = ((X − iY)/2)^{⊗n}`, so a word with `k` Y letters (rest X)
/// has coefficient `2^{1−n} cos(β − kπ/2)`.
pub fn mk_closed_form_pauli(n: usize, beta: f64) -> Result<SignedPauliSum> {
    if n > MAX_MK_PAULI_QUBITS || n > MAX_PAULI_QUBITS {
        return Err(Error::Capacity(format!("closed-form expansion on {n} qubits")));
    }
    let mask = crate::pauli::low_mask(n);
    let scale = 2f64.powi(1 - n as i32);
    let mut terms = Vec::new();
    for ys in 0..(1u64 << n) {
        let k = ys.count_ones() as f64;
        let c = scale * (beta - k * std::f64::consts::FRAC_PI_2).cos();
        if c.abs() > 1e-14 {
            terms.push((c, PauliString::new(n, mask, ys, Phase::ONE)?));
        }
    }
    SignedPauliSum::new(n, terms)
}
