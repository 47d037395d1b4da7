//! Signed n-qubit Pauli words in symplectic bit-pair form.
//!
//! A word is stored as `phase · ⊗_j P_j` where each letter `P_j` is one of
//! `I, X, Y, Z` and the phase is a power of `i`. Qubit `j` carries an X
//! component when bit `j` of `x_bits` is set and a Z component when bit `j`
//! of `z_bits` is set; `(1, 1)` is the letter `Y` itself (not `X·Z`), so the
//! factor `i^{|x∧z|}` never leaks into the stored phase and two words are
//! equal exactly when their bits and phases are equal.
//!
//! Qubit 0 is the leftmost letter of the text form and the leftmost tensor
//! factor, i.e. the most significant bit of a computational-basis index.

use std::fmt;
use std::ops::Mul;
use std::str::FromStr;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Largest qubit count representable by a [`PauliString`].
pub const MAX_PAULI_QUBITS: usize = 64;

/// Largest qubit count for which dense `2ⁿ×2ⁿ` matrices are built.
pub const MAX_DENSE_QUBITS: usize = 10;

/// A power of `i`: `+1`, `+i`, `-1` or `-i`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Phase(u8);

impl Phase {
    pub const ONE: Phase = Phase(0);
    pub const I: Phase = Phase(1);
    pub const MINUS_ONE: Phase = Phase(2);
    pub const MINUS_I: Phase = Phase(3);

    pub fn from_exponent(e: u32) -> Phase {
        Phase((e % 4) as u8)
    }

    /// Exponent `k` with `phase = i^k`, in `0..4`.
    pub fn exponent(self) -> u8 {
        self.0
    }

    pub fn is_real(self) -> bool {
        self.0 % 2 == 0
    }

    /// `+1` or `-1` for real phases.
    pub fn sign(self) -> Option<i8> {
        match self.0 {
            0 => Some(1),
            2 => Some(-1),
            _ => None,
        }
    }

    pub fn to_complex(self) -> Complex64 {
        match self.0 {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        }
    }

    pub fn negate(self) -> Phase {
        Phase((self.0 + 2) % 4)
    }
}

impl Mul for Phase {
    type Output = Phase;

    fn mul(self, rhs: Phase) -> Phase {
        Phase((self.0 + rhs.0) % 4)
    }
}

/// Single-qubit Pauli letter.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Letter {
    I,
    X,
    Y,
    Z,
}

impl Letter {
    pub fn from_bits(x: bool, z: bool) -> Letter {
        match (x, z) {
            (false, false) => Letter::I,
            (true, false) => Letter::X,
            (true, true) => Letter::Y,
            (false, true) => Letter::Z,
        }
    }

    pub fn bits(self) -> (bool, bool) {
        match self {
            Letter::I => (false, false),
            Letter::X => (true, false),
            Letter::Y => (true, true),
            Letter::Z => (false, true),
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Letter::I => 'I',
            Letter::X => 'X',
            Letter::Y => 'Y',
            Letter::Z => 'Z',
        }
    }

    pub fn from_char(c: char) -> Option<Letter> {
        match c {
            'I' => Some(Letter::I),
            'X' => Some(Letter::X),
            'Y' => Some(Letter::Y),
            'Z' => Some(Letter::Z),
            _ => None,
        }
    }

    /// 2×2 matrix of the letter.
    pub fn matrix(self) -> [[Complex64; 2]; 2] {
        let o = Complex64::new(0.0, 0.0);
        let l = Complex64::new(1.0, 0.0);
        let i = Complex64::new(0.0, 1.0);
        match self {
            Letter::I => [[l, o], [o, l]],
            Letter::X => [[o, l], [l, o]],
            Letter::Y => [[o, -i], [i, o]],
            Letter::Z => [[l, o], [o, -l]],
        }
    }
}

/// Mask with the low `n` bits set.
pub(crate) fn low_mask(n: usize) -> u64 {
    if n >= 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

/// Converts a qubit mask (bit `j` = qubit `j`) into a basis-index mask
/// (qubit `j` = index bit `n-1-j`).
pub(crate) fn index_mask(mask: u64, n: usize) -> usize {
    if n == 0 {
        return 0;
    }
    (mask.reverse_bits() >> (64 - n)) as usize
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PauliString {
    n: usize,
    x_bits: u64,
    z_bits: u64,
    phase: Phase,
}

impl PauliString {
    pub fn new(n: usize, x_bits: u64, z_bits: u64, phase: Phase) -> Result<Self> {
        if n == 0 || n > MAX_PAULI_QUBITS {
            return Err(Error::Capacity(format!(
                "Pauli words support 1..={MAX_PAULI_QUBITS} qubits, got {n}"
            )));
        }
        let mask = low_mask(n);
        if x_bits & !mask != 0 || z_bits & !mask != 0 {
            return Err(Error::Contract(format!(
                "bit masks use qubits beyond n = {n}"
            )));
        }
        Ok(PauliString {
            n,
            x_bits,
            z_bits,
            phase,
        })
    }

    pub fn identity(n: usize) -> Result<Self> {
        Self::new(n, 0, 0, Phase::ONE)
    }

    /// Word with `letter` on `qubit` and identity elsewhere.
    pub fn single(n: usize, qubit: usize, letter: Letter) -> Result<Self> {
        if qubit >= n {
            return Err(Error::Contract(format!("qubit {qubit} out of range for n = {n}")));
        }
        let (x, z) = letter.bits();
        Self::new(n, (x as u64) << qubit, (z as u64) << qubit, Phase::ONE)
    }

    pub fn from_letters(letters: &[Letter], phase: Phase) -> Result<Self> {
        let (mut x_bits, mut z_bits) = (0u64, 0u64);
        for (q, l) in letters.iter().enumerate().take(MAX_PAULI_QUBITS) {
            let (x, z) = l.bits();
            x_bits |= (x as u64) << q;
            z_bits |= (z as u64) << q;
        }
        Self::new(letters.len(), x_bits, z_bits, phase)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn x_bits(&self) -> u64 {
        self.x_bits
    }

    pub fn z_bits(&self) -> u64 {
        self.z_bits
    }

    pub fn phase(&self) -> Phase {
        self.phase
    }

    pub fn with_phase(mut self, phase: Phase) -> Self {
        self.phase = phase;
        self
    }

    pub fn negate(mut self) -> Self {
        self.phase = self.phase.negate();
        self
    }

    /// The same letters with phase `+1`.
    pub fn unsigned(self) -> Self {
        self.with_phase(Phase::ONE)
    }

    pub fn letter(&self, qubit: usize) -> Letter {
        Letter::from_bits(
            (self.x_bits >> qubit) & 1 == 1,
            (self.z_bits >> qubit) & 1 == 1,
        )
    }

    pub fn letters(&self) -> impl Iterator<Item = Letter> + '_ {
        (0..self.n).map(move |q| self.letter(q))
    }

    pub fn is_identity(&self) -> bool {
        self.x_bits == 0 && self.z_bits == 0
    }

    pub fn is_hermitian(&self) -> bool {
        self.phase.is_real()
    }

    /// `+1`/`-1` for Hermitian words.
    pub fn sign(&self) -> Option<i8> {
        self.phase.sign()
    }

    /// Number of non-identity letters.
    pub fn weight(&self) -> u32 {
        (self.x_bits | self.z_bits).count_ones()
    }

    /// Bits of qubits carrying X only / Y / Z only.
    pub(crate) fn letter_masks(&self) -> (u64, u64, u64) {
        (
            self.x_bits & !self.z_bits,
            self.x_bits & self.z_bits,
            self.z_bits & !self.x_bits,
        )
    }

    fn check_same_size(&self, other: &PauliString) -> Result<()> {
        if self.n != other.n {
            return Err(Error::dimension(self.n, other.n));
        }
        Ok(())
    }

    /// Operator product `self · other` with exact phase tracking.
    pub fn multiply(&self, other: &PauliString) -> Result<PauliString> {
        self.check_same_size(other)?;
        // Letters are i^{x·z} X^x Z^z; moving Z^{z_p} past X^{x_q} costs (-1)^{z_p·x_q}.
        let x = self.x_bits ^ other.x_bits;
        let z = self.z_bits ^ other.z_bits;
        let e = self.phase.exponent() as u32
            + other.phase.exponent() as u32
            + (self.x_bits & self.z_bits).count_ones()
            + (other.x_bits & other.z_bits).count_ones()
            + 2 * (self.z_bits & other.x_bits).count_ones()
            + 4 * 64
            - (x & z).count_ones();
        Ok(PauliString {
            n: self.n,
            x_bits: x,
            z_bits: z,
            phase: Phase::from_exponent(e),
        })
    }

    /// True iff the symplectic form `⟨p.x, q.z⟩ + ⟨p.z, q.x⟩` is even.
    pub fn commutes_with(&self, other: &PauliString) -> Result<bool> {
        self.check_same_size(other)?;
        let s = (self.x_bits & other.z_bits).count_ones() + (self.z_bits & other.x_bits).count_ones();
        Ok(s % 2 == 0)
    }

    /// Tensor product `self ⊗ other`; `other` occupies the higher qubit indices.
    pub fn tensor(&self, other: &PauliString) -> Result<PauliString> {
        let n = self.n + other.n;
        if n > MAX_PAULI_QUBITS {
            return Err(Error::Capacity(format!("tensor product on {n} qubits")));
        }
        PauliString::new(
            n,
            self.x_bits | (other.x_bits << self.n),
            self.z_bits | (other.z_bits << self.n),
            self.phase * other.phase,
        )
    }

    /// Coefficient `c` and target index such that `P|b⟩ = c|b ⊕ x⟩`.
    ///
    /// `b` and the returned index are computational-basis indices.
    #[inline]
    pub(crate) fn action(&self, index_x: usize, index_z: usize, base: Complex64, b: usize) -> (usize, Complex64) {
        let sign = if (index_z & b).count_ones() % 2 == 1 { -base } else { base };
        (b ^ index_x, sign)
    }

    /// Index-space masks and the constant factor `phase · i^{|x∧z|}`.
    pub(crate) fn index_form(&self) -> (usize, usize, Complex64) {
        let ix = index_mask(self.x_bits, self.n);
        let iz = index_mask(self.z_bits, self.n);
        let e = self.phase.exponent() as u32 + (self.x_bits & self.z_bits).count_ones();
        (ix, iz, Phase::from_exponent(e).to_complex())
    }

    /// Dense `2ⁿ×2ⁿ` matrix, qubit 0 as the leftmost tensor factor.
    pub fn to_matrix(&self) -> Result<DMatrix<Complex64>> {
        if self.n > MAX_DENSE_QUBITS {
            return Err(Error::Capacity(format!(
                "dense Pauli matrix limited to {MAX_DENSE_QUBITS} qubits, got {}",
                self.n
            )));
        }
        let dim = 1usize << self.n;
        let (ix, iz, base) = self.index_form();
        let mut m = DMatrix::zeros(dim, dim);
        for col in 0..dim {
            let (row, v) = self.action(ix, iz, base, col);
            m[(row, col)] = v;
        }
        Ok(m)
    }

    /// Parses a word with exactly `n` letters.
    pub fn parse(text: &str, n: usize) -> Result<Self> {
        let p: PauliString = text.parse()?;
        if p.n != n {
            return Err(Error::Parse {
                position: text.len(),
                message: format!("expected {n} letters, found {}", p.n),
            });
        }
        Ok(p)
    }
}

impl FromStr for PauliString {
    type Err = Error;

    /// Accepts an optional sign prefix (`+`, `-`, `+i`, `-i`, `i`) followed by
    /// letters from `IXYZ`; whitespace is ignored anywhere.
    fn from_str(text: &str) -> Result<Self> {
        let mut phase = Phase::ONE;
        let mut letters = Vec::new();
        let mut seen_letter = false;
        let mut seen_sign = false;
        let mut seen_i = false;
        for (pos, c) in text.char_indices() {
            if c.is_whitespace() {
                continue;
            }
            if !seen_letter {
                match c {
                    '+' | '-' if !seen_sign && !seen_i => {
                        seen_sign = true;
                        if c == '-' {
                            phase = phase.negate();
                        }
                        continue;
                    }
                    'i' if !seen_i => {
                        seen_i = true;
                        phase = phase * Phase::I;
                        continue;
                    }
                    _ => {}
                }
            }
            match Letter::from_char(c) {
                Some(l) => {
                    seen_letter = true;
                    letters.push(l);
                }
                None => {
                    return Err(Error::Parse {
                        position: pos,
                        message: format!("unexpected character `{c}`"),
                    })
                }
            }
        }
        if letters.is_empty() {
            return Err(Error::Parse {
                position: text.len(),
                message: "no Pauli letters".into(),
            });
        }
        if letters.len() > MAX_PAULI_QUBITS {
            return Err(Error::Parse {
                position: text.len(),
                message: format!("more than {MAX_PAULI_QUBITS} letters"),
            });
        }
        PauliString::from_letters(&letters, phase)
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let prefix = match self.phase.exponent() {
            0 => "+",
            1 => "+i",
            2 => "-",
            _ => "-i",
        };
        f.write_str(prefix)?;
        for l in self.letters() {
            write!(f, "{}", l.as_char())?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p(s: &str) -> PauliString {
        s.parse().unwrap()
    }

    fn close(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>, tol: f64) -> bool {
        (a - b).iter().all(|d| d.norm() < tol)
    }

    fn kron_letters(s: &PauliString) -> DMatrix<Complex64> {
        // independent tensor-product oracle
        let mut m = DMatrix::from_element(1, 1, s.phase().to_complex());
        for l in s.letters() {
            let a = l.matrix();
            let lm = DMatrix::from_fn(2, 2, |r, c| a[r][c]);
            m = m.kronecker(&lm);
        }
        m
    }

    #[test]
    fn x_times_z_is_minus_i_y() {
        let r = p("X").multiply(&p("Z")).unwrap();
        assert_eq!(r, p("-iY"));
        assert_eq!(r.letter(0), Letter::Y);
        assert_eq!(r.phase(), Phase::MINUS_I);
    }

    #[test]
    fn xz_times_zx_is_yy() {
        let a = p("XZ");
        let b = p("ZX");
        let r = a.multiply(&b).unwrap();
        assert_eq!(r, p("+YY"));
        let dense = kron_letters(&a) * kron_letters(&b);
        assert!(close(&dense, &kron_letters(&r), 1e-12));
    }

    #[test]
    fn hermitian_squares_to_identity() {
        for s in ["X", "-Y", "XYZI", "-ZYXY", "YYYY"] {
            let w = p(s);
            assert_eq!(w.multiply(&w).unwrap(), PauliString::identity(w.n()).unwrap());
        }
    }

    #[test]
    fn size_mismatch_is_dimension_error() {
        assert!(matches!(p("XX").multiply(&p("X")), Err(Error::Dimension { .. })));
        assert!(matches!(p("XX").commutes_with(&p("X")), Err(Error::Dimension { .. })));
    }

    #[test]
    fn commutation_examples() {
        assert!(!p("X").commutes_with(&p("Z")).unwrap());
        assert!(p("XZ").commutes_with(&p("ZX")).unwrap());
        let id = PauliString::identity(3).unwrap();
        for s in ["XYZ", "ZZZ", "IYI"] {
            assert!(p(s).commutes_with(&id).unwrap());
        }
    }

    #[test]
    fn y_matrix() {
        let m = p("Y").to_matrix().unwrap();
        assert_eq!(m[(0, 1)], Complex64::new(0.0, -1.0));
        assert_eq!(m[(1, 0)], Complex64::new(0.0, 1.0));
        assert_eq!(m[(0, 0)], Complex64::new(0.0, 0.0));
    }

    #[test]
    fn identity_matrix_n3() {
        let m = PauliString::identity(3).unwrap().to_matrix().unwrap();
        assert!(close(&m, &DMatrix::identity(8, 8), 0.0 + 1e-15));
    }

    #[test]
    fn lc4_term_matrix_is_traceless_involution() {
        let w = p("-ZYXY");
        let m = w.to_matrix().unwrap();
        assert!(close(&m, &kron_letters(&w), 1e-12));
        assert!(close(&(&m * &m), &DMatrix::identity(16, 16), 1e-12));
        assert!(m.trace().norm() < 1e-12);
    }

    #[test]
    fn dense_guard() {
        let w = PauliString::identity(11).unwrap();
        assert!(matches!(w.to_matrix(), Err(Error::Capacity(_))));
    }

    #[test]
    fn parse_examples() {
        let w = PauliString::parse("- Z X X I", 4).unwrap();
        assert_eq!(w.phase(), Phase::MINUS_ONE);
        assert_eq!(
            w.letters().collect::<Vec<_>>(),
            vec![Letter::Z, Letter::X, Letter::X, Letter::I]
        );
        assert_eq!(w.to_string(), "-ZXXI");

        let id = PauliString::parse("IIII", 4).unwrap();
        assert!(id.is_identity());
        assert_eq!(id.phase(), Phase::ONE);

        match PauliString::parse("XZQI", 4) {
            Err(Error::Parse { position, .. }) => assert_eq!(position, 2),
            other => panic!("expected parse error, got {other:?}"),
        }
        assert!(matches!(PauliString::parse("XZ", 4), Err(Error::Parse { .. })));
        assert!(matches!("".parse::<PauliString>(), Err(Error::Parse { .. })));
        assert!(matches!("--X".parse::<PauliString>(), Err(Error::Parse { .. })));
    }

    #[test]
    fn constructor_rejects_stray_bits() {
        assert!(PauliString::new(2, 0b100, 0, Phase::ONE).is_err());
        assert!(PauliString::new(0, 0, 0, Phase::ONE).is_err());
    }

    #[test]
    fn qubit_zero_is_most_significant() {
        // Z on qubit 0 flips the sign of the upper half of the basis.
        let m = p("ZI").to_matrix().unwrap();
        assert_eq!(m[(0, 0)].re, 1.0);
        assert_eq!(m[(1, 1)].re, 1.0);
        assert_eq!(m[(2, 2)].re, -1.0);
        assert_eq!(m[(3, 3)].re, -1.0);
    }

    fn arb_pauli(n: usize) -> impl Strategy<Value = PauliString> {
        let mask = low_mask(n);
        (any::<u64>(), any::<u64>(), 0u32..4).prop_map(move |(x, z, e)| {
            PauliString::new(n, x & mask, z & mask, Phase::from_exponent(e)).unwrap()
        })
    }

    fn arb_pair() -> impl Strategy<Value = (PauliString, PauliString)> {
        (1usize..=5).prop_flat_map(|n| (arb_pauli(n), arb_pauli(n)))
    }

    proptest! {
        #[test]
        fn matrix_homomorphism((a, b) in arb_pair()) {
            let prod = a.multiply(&b).unwrap().to_matrix().unwrap();
            let dense = a.to_matrix().unwrap() * b.to_matrix().unwrap();
            prop_assert!(close(&prod, &dense, 1e-12));
        }

        #[test]
        fn commutation_matches_matrix_commutator((a, b) in arb_pair()) {
            let ma = a.to_matrix().unwrap();
            let mb = b.to_matrix().unwrap();
            let comm = &ma * &mb - &mb * &ma;
            let vanishes = comm.iter().all(|v| v.norm() < 1e-12);
            prop_assert_eq!(a.commutes_with(&b).unwrap(), vanishes);
        }

        #[test]
        fn matrix_matches_tensor_oracle(a in (1usize..=5).prop_flat_map(arb_pauli)) {
            prop_assert!(close(&a.to_matrix().unwrap(), &kron_letters(&a), 1e-12));
        }

        #[test]
        fn format_parse_round_trip(a in (1usize..=8).prop_flat_map(arb_pauli)) {
            let back: PauliString = a.to_string().parse().unwrap();
            prop_assert_eq!(back, a);
        }

        #[test]
        fn hermitian_products_stay_in_phase_group((a, b) in arb_pair()) {
            let a = a.with_phase(Phase::ONE);
            let b = b.with_phase(Phase::MINUS_ONE);
            let r = a.multiply(&b).unwrap();
            prop_assert_eq!(r.x_bits(), a.x_bits() ^ b.x_bits());
            prop_assert_eq!(r.z_bits(), a.z_bits() ^ b.z_bits());
            prop_assert_eq!(b.multiply(&b).unwrap(), PauliString::identity(b.n()).unwrap());
        }

        #[test]
        fn multiplication_is_associative(
            (a, b, c) in (1usize..=6).prop_flat_map(|n| (arb_pauli(n), arb_pauli(n), arb_pauli(n)))
        ) {
            let l = a.multiply(&b).unwrap().multiply(&c).unwrap();
            let r = a.multiply(&b.multiply(&c).unwrap()).unwrap();
            prop_assert_eq!(l, r);
        }
    }
}
