//! Graph-state stabilizers, CZ-circuit state preparation and local gates.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::pauli::{index_mask, Letter, PauliString};
use crate::state::{StateVector, MAX_STATEVECTOR_QUBITS};

/// Largest graph whose full stabilizer group is materialized.
pub const MAX_GROUP_QUBITS: usize = 20;

/// One element `s = ∏_{i∈subset} K_i` of a graph-state stabilizer group.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct StabilizerElement {
    /// Bit `i` set when generator `K_i` is a factor.
    pub subset: u64,
    pub word: PauliString,
}

/// Generators `K_j = X_j ∏_{i∈N(j)} Z_i`, one per vertex.
pub fn graph_generators(g: &Graph) -> Vec<PauliString> {
    (0..g.n())
        .map(|j| {
            PauliString::new(g.n(), 1 << j, g.neighbors(j), crate::pauli::Phase::ONE)
                .expect("graph sizes fit Pauli words")
        })
        .collect()
}

/// All `2ⁿ` stabilizer elements, indexed by generator subset.
pub fn stabilizer_group(g: &Graph) -> Result<Vec<StabilizerElement>> {
    let n = g.n();
    if n > MAX_GROUP_QUBITS {
        return Err(Error::Capacity(format!(
            "stabilizer group of {n} qubits has 2^{n} elements (limit {MAX_GROUP_QUBITS} qubits)"
        )));
    }
    let gens = graph_generators(g);
    let size = 1usize << n;
    let mut words = Vec::with_capacity(size);
    words.push(PauliString::identity(n)?);
    for subset in 1..size {
        let low = subset.trailing_zeros() as usize;
        let w = words[subset & (subset - 1)].multiply(&gens[low])?;
        words.push(w);
    }
    Ok(words
        .into_iter()
        .enumerate()
        .map(|(subset, word)| StabilizerElement {
            subset: subset as u64,
            word,
        })
        .collect())
}

/// `|G⟩ = ∏_{(k,l)∈E} CZ_{kl} |+⟩^{⊗n}`.
pub fn graph_state_vector(g: &Graph) -> Result<StateVector> {
    let n = g.n();
    if n > MAX_STATEVECTOR_QUBITS {
        return Err(Error::Capacity(format!("graph state on {n} qubits")));
    }
    let edges: Vec<(usize, usize)> = g
        .edges()
        .into_iter()
        .map(|(u, v)| (index_mask(1 << u, n), index_mask(1 << v, n)))
        .collect();
    let amp = (1.0 / (1u64 << n) as f64).sqrt();
    let amplitudes = (0..1usize << n)
        .map(|b| {
            let odd = edges
                .iter()
                .filter(|&&(u, v)| b & u != 0 && b & v != 0)
                .count()
                % 2
                == 1;
            Complex64::new(if odd { -amp } else { amp }, 0.0)
        })
        .collect();
    Ok(StateVector::from_raw(n, amplitudes))
}

/// Single-qubit gates used for local basis corrections.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Gate {
    H,
    X,
    Y,
    Z,
    S,
}

impl Gate {
    fn matrix(self) -> [[Complex64; 2]; 2] {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let c = |re: f64, im: f64| Complex64::new(re, im);
        match self {
            Gate::H => [[c(h, 0.0), c(h, 0.0)], [c(h, 0.0), c(-h, 0.0)]],
            Gate::X => Letter::X.matrix(),
            Gate::Y => Letter::Y.matrix(),
            Gate::Z => Letter::Z.matrix(),
            Gate::S => [[c(1.0, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(0.0, 1.0)]],
        }
    }

    fn as_char(self) -> char {
        match self {
            Gate::H => 'H',
            Gate::X => 'X',
            Gate::Y => 'Y',
            Gate::Z => 'Z',
            Gate::S => 'S',
        }
    }
}

/// A word of single-qubit gates read as an operator product: `HXZ` is the
/// matrix `H·X·Z`, so the right-most gate acts on the state first.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LocalWord(pub Vec<Gate>);

impl LocalWord {
    pub fn identity() -> Self {
        LocalWord(Vec::new())
    }

    pub fn matrix(&self) -> [[Complex64; 2]; 2] {
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        self.0.iter().fold([[one, zero], [zero, one]], |acc, g| mul2(&acc, &g.matrix()))
    }

    /// `U† P U` for a single-qubit letter, as a signed letter.
    fn conjugate_letter(&self, l: Letter) -> (Letter, bool) {
        let u = self.matrix();
        let m = mul2(&mul2(&adjoint2(&u), &l.matrix()), &u);
        for cand in [Letter::I, Letter::X, Letter::Y, Letter::Z] {
            let c = cand.matrix();
            let same = (0..2).all(|r| (0..2).all(|k| (m[r][k] - c[r][k]).norm() < 1e-9));
            let neg = (0..2).all(|r| (0..2).all(|k| (m[r][k] + c[r][k]).norm() < 1e-9));
            if same {
                return (cand, false);
            }
            if neg {
                return (cand, true);
            }
        }
        unreachable!("gates H, X, Y, Z, S generate Cliffords")
    }
}

impl FromStr for LocalWord {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut gates = Vec::new();
        for (pos, c) in s.char_indices() {
            let g = match c.to_ascii_uppercase() {
                'H' => Gate::H,
                'X' => Gate::X,
                'Y' => Gate::Y,
                'Z' => Gate::Z,
                'S' => Gate::S,
                '-' | 'I' if s.len() == 1 => continue,
                other => {
                    return Err(Error::Parse {
                        position: pos,
                        message: format!("unknown gate letter `{other}`"),
                    })
                }
            };
            gates.push(g);
        }
        Ok(LocalWord(gates))
    }
}

impl fmt::Display for LocalWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("I");
        }
        self.0.iter().try_for_each(|g| write!(f, "{}", g.as_char()))
    }
}

fn mul2(a: &[[Complex64; 2]; 2], b: &[[Complex64; 2]; 2]) -> [[Complex64; 2]; 2] {
    let mut out = [[Complex64::new(0.0, 0.0); 2]; 2];
    for r in 0..2 {
        for c in 0..2 {
            out[r][c] = a[r][0] * b[0][c] + a[r][1] * b[1][c];
        }
    }
    out
}

fn adjoint2(a: &[[Complex64; 2]; 2]) -> [[Complex64; 2]; 2] {
    [[a[0][0].conj(), a[1][0].conj()], [a[0][1].conj(), a[1][1].conj()]]
}

/// Applies `ops[q]` to qubit `q`.
pub fn apply_local_unitaries(s: &StateVector, ops: &[LocalWord]) -> Result<StateVector> {
    if ops.len() != s.n() {
        return Err(Error::dimension(s.n(), ops.len()));
    }
    let n = s.n();
    let mut amps = s.amplitudes().to_vec();
    for (q, word) in ops.iter().enumerate() {
        if word.0.is_empty() {
            continue;
        }
        apply_single_qubit(&mut amps, n, q, &word.matrix());
    }
    Ok(StateVector::from_raw(n, amps))
}

/// Same as [`apply_local_unitaries`] with each word replaced by its inverse.
pub fn apply_inverse_local_unitaries(s: &StateVector, ops: &[LocalWord]) -> Result<StateVector> {
    if ops.len() != s.n() {
        return Err(Error::dimension(s.n(), ops.len()));
    }
    let n = s.n();
    let mut amps = s.amplitudes().to_vec();
    for (q, word) in ops.iter().enumerate() {
        apply_single_qubit(&mut amps, n, q, &adjoint2(&word.matrix()));
    }
    Ok(StateVector::from_raw(n, amps))
}

fn apply_single_qubit(amps: &mut [Complex64], n: usize, qubit: usize, m: &[[Complex64; 2]; 2]) {
    let bit = 1usize << (n - 1 - qubit);
    for b in 0..amps.len() {
        if b & bit == 0 {
            let (a0, a1) = (amps[b], amps[b | bit]);
            amps[b] = m[0][0] * a0 + m[0][1] * a1;
            amps[b | bit] = m[1][0] * a0 + m[1][1] * a1;
        }
    }
}

/// `U† P U` with `U = ⊗_q ops[q]`: the stabilizer of `U†|ψ⟩` corresponding
/// to a stabilizer `P` of `|ψ⟩`.
pub fn conjugate_by_inverse(p: &PauliString, ops: &[LocalWord]) -> Result<PauliString> {
    if ops.len() != p.n() {
        return Err(Error::dimension(p.n(), ops.len()));
    }
    let mut letters = Vec::with_capacity(p.n());
    let mut phase = p.phase();
    for (q, word) in ops.iter().enumerate() {
        let (l, neg) = word.conjugate_letter(p.letter(q));
        if neg {
            phase = phase.negate();
        }
        letters.push(l);
    }
    PauliString::from_letters(&letters, phase)
}

/// Parses a comma- or space-separated list of per-qubit gate words.
pub fn parse_local_words(text: &str) -> Result<Vec<LocalWord>> {
    text.split(|c: char| c == ',' || c.is_whitespace())
        .filter(|t| !t.is_empty())
        .map(str::parse)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Preset;
    use crate::state::pauli_expectation;

    fn words(g: &Graph) -> Vec<String> {
        graph_generators(g).iter().map(|p| p.to_string()).collect()
    }

    #[test]
    fn single_vertex_generator() {
        let g = Preset::SingleVertex.graph().unwrap();
        assert_eq!(words(&g), vec!["+X"]);
    }

    #[test]
    fn complete_graph_generators() {
        let g = Preset::GhzComplete(4).graph().unwrap();
        assert_eq!(words(&g), vec!["+XZZZ", "+ZXZZ", "+ZZXZ", "+ZZZX"]);
    }

    #[test]
    fn linear_generators() {
        let g = Preset::Linear(4).graph().unwrap();
        assert_eq!(words(&g), vec!["+XZII", "+ZXZI", "+IZXZ", "+IIZX"]);
        let gens = graph_generators(&g);
        for a in &gens {
            for b in &gens {
                assert!(a.commutes_with(b).unwrap());
            }
        }
    }

    #[test]
    fn empty_graph_group() {
        let g = Graph::empty(2).unwrap();
        let group: Vec<String> = stabilizer_group(&g)
            .unwrap()
            .iter()
            .map(|e| e.word.to_string())
            .collect();
        assert_eq!(group, vec!["+II", "+XI", "+IX", "+XX"]);
    }

    #[test]
    fn group_is_closed_and_real() {
        let g = Preset::Ec(3).graph().unwrap();
        let group = stabilizer_group(&g).unwrap();
        assert_eq!(group.len(), 32);
        let mut distinct: Vec<(u64, u64)> = group.iter().map(|e| (e.word.x_bits(), e.word.z_bits())).collect();
        distinct.sort();
        distinct.dedup();
        assert_eq!(distinct.len(), 32);
        for a in &group {
            assert!(a.word.is_hermitian());
            for b in &group {
                let prod = a.word.multiply(&b.word).unwrap();
                assert_eq!(prod, group[(a.subset ^ b.subset) as usize].word);
            }
        }
    }

    #[test]
    fn capacity_guard() {
        let g = Graph::empty(21).unwrap();
        assert!(matches!(stabilizer_group(&g), Err(Error::Capacity(_))));
    }

    #[test]
    fn single_vertex_state_is_plus() {
        let s = graph_state_vector(&Preset::SingleVertex.graph().unwrap()).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!((s.amplitudes()[0].re - h).abs() < 1e-15);
        assert!((s.amplitudes()[1].re - h).abs() < 1e-15);
    }

    #[test]
    fn star_state_is_stabilized() {
        for n in 2..=8 {
            let g = Preset::GhzStar(n).graph().unwrap();
            let s = graph_state_vector(&g).unwrap();
            for k in graph_generators(&g) {
                assert!((pauli_expectation(&k, &s).unwrap() - 1.0).abs() < 1e-10);
            }
            // Hadamards on the leaves give the textbook GHZ state.
            let mut ops = vec![LocalWord::identity(); n];
            for op in ops.iter_mut().skip(1) {
                *op = "H".parse().unwrap();
            }
            let t = apply_local_unitaries(&s, &ops).unwrap();
            let h = std::f64::consts::FRAC_1_SQRT_2;
            assert!((t.amplitudes()[0].norm() - h).abs() < 1e-10);
            assert!((t.amplitudes()[(1 << n) - 1].norm() - h).abs() < 1e-10);
        }
    }

    #[test]
    fn cz_matches_exponentiated_hamiltonian() {
        // exp(-i π/4 (I-Z)⊗(I-Z)) has eigenphases 0,0,0,exp(-iπ) on |00>,|01>,|10>,|11>
        for (b, want) in [(0usize, 1.0), (1, 1.0), (2, 1.0), (3, -1.0)] {
            let z0 = if b & 2 != 0 { -1.0 } else { 1.0 };
            let z1 = if b & 1 != 0 { -1.0 } else { 1.0 };
            let h = (1.0 - z0) * (1.0 - z1);
            let phase = Complex64::new(0.0, -h * std::f64::consts::FRAC_PI_4).exp();
            assert!((phase - Complex64::new(want, 0.0)).norm() < 1e-12);
        }
        let s = graph_state_vector(&Preset::Linear(2).graph().unwrap()).unwrap();
        assert!((s.amplitudes()[3].re + 0.5).abs() < 1e-15);
    }

    #[test]
    fn hadamard_on_zero() {
        let zero = StateVector::basis(1, 0).unwrap();
        let plus = apply_local_unitaries(&zero, &["H".parse().unwrap()]).unwrap();
        assert!((plus.amplitudes()[1].re - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);
        let same = apply_local_unitaries(&zero, &[LocalWord::identity()]).unwrap();
        assert_eq!(same, zero);
    }

    #[test]
    fn gate_parsing() {
        assert!(matches!("HQ".parse::<LocalWord>(), Err(Error::Parse { position: 1, .. })));
        let ws = parse_local_words("HXZ, HX HX,HXZ").unwrap();
        assert_eq!(ws.len(), 4);
        assert_eq!(ws[0].to_string(), "HXZ");
    }

    #[test]
    fn conjugation_matches_dense() {
        let ops = parse_local_words("HXZ HX S Y").unwrap();
        let p: PauliString = "XYZX".parse().unwrap();
        let c = conjugate_by_inverse(&p, &ops).unwrap();
        let g = Preset::Linear(4).graph().unwrap();
        let s = graph_state_vector(&g).unwrap();
        let t = apply_inverse_local_unitaries(&s, &ops).unwrap();
        // <t|U†PU|t> = <s|P|s>
        let a = pauli_expectation(&c, &t).unwrap();
        let b = pauli_expectation(&p, &s).unwrap();
        assert!((a - b).abs() < 1e-12);
    }

    #[test]
    fn norm_preserved() {
        let g = Preset::Ec(3).graph().unwrap();
        let s = graph_state_vector(&g).unwrap();
        let ops = parse_local_words("HXZ S Y HS Z").unwrap();
        let t = apply_local_unitaries(&s, &ops).unwrap();
        assert!((t.norm_sqr() - 1.0).abs() < 1e-12);
    }
}
