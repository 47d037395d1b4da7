//! Local hidden variable bounds.

use std::collections::BTreeMap;
use std::fmt;
use std::thread;

use num_rational::Ratio;
use serde::Serialize;

use crate::bell::SignedPauliSum;
use crate::error::{Error, Result};
use crate::pauli::{Letter, PauliString};

/// Largest number of free ±1 variables searched exhaustively.
pub const MAX_FREE_VARIABLES: usize = 24;

/// Largest register for the MK brute-force cross-check.
pub const MAX_MK_BRUTEFORCE_QUBITS: usize = 12;

const INNER_BITS: usize = 18;

const LETTERS: [Letter; 3] = [Letter::X, Letter::Y, Letter::Z];

fn slot(l: Letter) -> usize {
    match l {
        Letter::X => 0,
        Letter::Y => 1,
        Letter::Z => 2,
        Letter::I => unreachable!("identity carries no hidden variable"),
    }
}

/// Deterministic ±1 outcome for every local X, Y and Z measurement.
///
/// Stored as three masks of qubits whose value is −1.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct LhvAssignment {
    n: usize,
    negative: [u64; 3],
}

impl LhvAssignment {
    pub fn all_plus(n: usize) -> Self {
        LhvAssignment { n, negative: [0; 3] }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn value(&self, qubit: usize, letter: Letter) -> i8 {
        if letter == Letter::I || self.negative[slot(letter)] >> qubit & 1 == 0 {
            1
        } else {
            -1
        }
    }

    pub fn set(&mut self, qubit: usize, letter: Letter, value: i8) {
        let bit = 1u64 << qubit;
        let mask = &mut self.negative[slot(letter)];
        if value < 0 {
            *mask |= bit;
        } else {
            *mask &= !bit;
        }
    }

    /// `sign · ∏` of the assigned values over the word's letters.
    pub fn evaluate(&self, word: &PauliString) -> Result<i8> {
        if word.n() != self.n {
            return Err(Error::dimension(self.n, word.n()));
        }
        let sign = word
            .sign()
            .ok_or_else(|| Error::Contract(format!("{word} is not Hermitian")))?;
        let (x, y, z) = word.letter_masks();
        let flips = (x & self.negative[0]).count_ones()
            + (y & self.negative[1]).count_ones()
            + (z & self.negative[2]).count_ones();
        Ok(if flips % 2 == 0 { sign } else { -sign })
    }
}

impl fmt::Display for LhvAssignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, l) in LETTERS.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{}:", l.as_char())?;
            for q in 0..self.n {
                f.write_str(if self.negative[i] >> q & 1 == 1 { "-" } else { "+" })?;
            }
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundKind {
    Exact,
    UpperBound,
    Analytic,
}

impl fmt::Display for BoundKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BoundKind::Exact => "exact",
            BoundKind::UpperBound => "upper_bound",
            BoundKind::Analytic => "analytic",
        })
    }
}

/// Maximum LHV value `D` of a normalized Bell operator.
#[derive(Clone, Debug, PartialEq)]
pub struct LhvBound {
    pub value: f64,
    /// Exact value when rational.
    pub fraction: Option<Ratio<i128>>,
    pub kind: BoundKind,
    pub witness: Option<LhvAssignment>,
    pub method: String,
}

impl LhvBound {
    fn rational(r: Ratio<i128>, kind: BoundKind, method: impl Into<String>) -> Self {
        LhvBound {
            value: *r.numer() as f64 / *r.denom() as f64,
            fraction: Some(r),
            kind,
            witness: None,
            method: method.into(),
        }
    }

    pub fn fraction_string(&self) -> Option<String> {
        self.fraction.map(|r| {
            if *r.denom() == 1 {
                r.numer().to_string()
            } else {
                format!("{}/{}", r.numer(), r.denom())
            }
        })
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "value": self.value,
            "fraction": self.fraction_string(),
            "kind": self.kind,
            "method": self.method,
            "witness": self.witness.map(|w| w.to_string()),
        })
    }
}

impl fmt::Display for LhvBound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.fraction_string() {
            Some(s) => write!(f, "{s} ({:.6})", self.value)?,
            None => write!(f, "{:.6}", self.value)?,
        }
        write!(f, " [{}, {}]", self.kind, self.method)
    }
}

/// `Σ coeff · sign · ∏ assigned values`.
pub fn lhv_value(op: &SignedPauliSum, a: &LhvAssignment) -> Result<f64> {
    if op.n() != a.n() {
        return Err(Error::dimension(op.n(), a.n()));
    }
    let mut total = 0.0;
    for (c, w) in op.terms() {
        total += c * a.evaluate(w)? as f64;
    }
    Ok(total)
}

/// Coefficients as integer multiples of a common unit.
struct Units {
    unit: f64,
    /// Denominator when the unit is `1/denominator`.
    denominator: Option<i128>,
    weights: Vec<i64>,
}

fn integer_units(op: &SignedPauliSum) -> Result<Units> {
    let signed: Vec<f64> = op
        .terms()
        .iter()
        .map(|(c, w)| c * w.sign().unwrap_or(1) as f64)
        .collect();
    let as_multiples = |unit: f64| -> Option<Vec<i64>> {
        signed
            .iter()
            .map(|c| {
                let k = c / unit;
                ((k - k.round()).abs() < 1e-9 && k.abs() < 1e15).then_some(k.round() as i64)
            })
            .collect()
    };
    if op.n() < 62 {
        let denom = 1i128 << op.n();
        if let Some(weights) = as_multiples(1.0 / denom as f64) {
            return Ok(Units {
                unit: 1.0 / denom as f64,
                denominator: Some(denom),
                weights,
            });
        }
    }
    let unit = op.terms().iter().map(|(c, _)| *c).fold(f64::INFINITY, f64::min);
    match as_multiples(unit) {
        Some(weights) if unit.is_finite() => Ok(Units {
            unit,
            denominator: None,
            weights,
        }),
        _ => Err(Error::Contract(
            "coefficients are not commensurate; exact search unavailable".into(),
        )),
    }
}

/// Exact `max |lhv_value|` over all assignments.
///
/// Free variables are the letters occurring in `op` on each qubit (Z letters
/// are pinned to +1 under `restrict_z`). Ties resolve to the lexicographically
/// least witness: qubit-major, X < Y < Z, +1 < −1.
pub fn lhv_max(op: &SignedPauliSum, restrict_z: bool) -> Result<LhvBound> {
    let n = op.n();
    let mut present = [0u64; 3];
    for (_, w) in op.terms() {
        let (x, y, z) = w.letter_masks();
        present[0] |= x;
        present[1] |= y;
        present[2] |= z;
    }
    if restrict_z {
        present[2] = 0;
    }
    let free: Vec<(usize, Letter)> = (0..n)
        .flat_map(|q| LETTERS.iter().map(move |&l| (q, l)))
        .filter(|&(q, l)| present[slot(l)] >> q & 1 == 1)
        .collect();
    let f = free.len();
    if f > MAX_FREE_VARIABLES {
        let hint = if restrict_z {
            "use an analytic or product bound"
        } else {
            "restrict Z outcomes to +1 (--restrict-z) or use an analytic or product bound"
        };
        return Err(Error::Capacity(format!(
            "LHV search over {f} free variables exceeds {MAX_FREE_VARIABLES}; {hint}"
        )));
    }

    // Variable i sits at bit f-1-i so that integer order is lexicographic order.
    let mut var_bit = [[0u32; 3]; 64];
    for (i, &(q, l)) in free.iter().enumerate() {
        var_bit[q][slot(l)] = 1 << (f - 1 - i);
    }
    let units = integer_units(op)?;
    let mut reduced: BTreeMap<u32, i64> = BTreeMap::new();
    for ((_, w), &weight) in op.terms().iter().zip(&units.weights) {
        let (x, y, z) = w.letter_masks();
        let mut m = 0u32;
        for (mask, s) in [(x, 0), (y, 1), (z, 2)] {
            let mut bits = mask;
            while bits != 0 {
                let q = bits.trailing_zeros() as usize;
                m |= var_bit[q][s];
                bits &= bits - 1;
            }
        }
        *reduced.entry(m).or_insert(0) += weight;
    }
    reduced.retain(|_, w| *w != 0);
    let terms: Vec<(u32, i64)> = reduced.into_iter().collect();

    let (best, index) = search(&terms, f);

    let mut witness = LhvAssignment::all_plus(n);
    for (i, &(q, l)) in free.iter().enumerate() {
        if index >> (f - 1 - i) & 1 == 1 {
            witness.set(q, l, -1);
        }
    }
    let fraction = units
        .denominator
        .map(|d| Ratio::new(best as i128, d));
    Ok(LhvBound {
        value: best as f64 * units.unit,
        fraction,
        kind: BoundKind::Exact,
        witness: Some(witness),
        method: if restrict_z { "brute(z=+1)".into() } else { "brute".into() },
    })
}

/// Returns the largest `|Σ_m w_m (−1)^{|m∧a|}|` and the least `a` attaining it.
fn search(terms: &[(u32, i64)], f: usize) -> (i64, u64) {
    let inner = f.min(INNER_BITS);
    let outer = f - inner;
    let blocks = 1u64 << outer;
    let workers = thread::available_parallelism()
        .map(|p| p.get())
        .unwrap_or(1)
        .min(blocks as usize)
        .max(1);
    let per = blocks.div_ceil(workers as u64);
    let results: Vec<(i64, u64)> = thread::scope(|s| {
        let handles: Vec<_> = (0..workers as u64)
            .map(|k| {
                let range = (k * per)..((k + 1) * per).min(blocks);
                s.spawn(move || search_blocks(terms, inner, range))
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("search worker panicked"))
            .collect()
    });
    let mut best = (-1i64, 0u64);
    for r in results {
        if r.0 > best.0 {
            best = r;
        }
    }
    best
}

fn search_blocks(terms: &[(u32, i64)], inner: usize, blocks: std::ops::Range<u64>) -> (i64, u64) {
    let size = 1usize << inner;
    let low = (size - 1) as u32;
    let mut buf = vec![0i64; size];
    let mut best = (-1i64, 0u64);
    for h in blocks {
        buf.iter_mut().for_each(|v| *v = 0);
        for &(m, w) in terms {
            let hi = (m >> inner) as u64;
            let s = if (hi & h).count_ones() % 2 == 0 { w } else { -w };
            buf[(m & low) as usize] += s;
        }
        walsh_hadamard(&mut buf);
        for (lo, v) in buf.iter().enumerate() {
            if v.abs() > best.0 {
                best = (v.abs(), (h << inner) | lo as u64);
            }
        }
    }
    best
}

/// In-place transform `v[a] ← Σ_m v[m] (−1)^{|m∧a|}`.
fn walsh_hadamard(v: &mut [i64]) {
    let n = v.len();
    let mut len = 1;
    while len < n {
        for chunk in v.chunks_mut(2 * len) {
            let (a, b) = chunk.split_at_mut(len);
            for (x, y) in a.iter_mut().zip(b.iter_mut()) {
                let (p, q) = (*x, *y);
                *x = p + q;
                *y = p - q;
            }
        }
        len <<= 1;
    }
}

fn binomials(n: usize) -> Vec<Vec<i128>> {
    let mut c = vec![vec![0i128; n + 1]; n + 1];
    for i in 0..=n {
        c[i][0] = 1;
        for j in 1..=i {
            c[i][j] = c[i - 1][j - 1] + c[i - 1][j];
        }
    }
    c
}

/// `D` for the complete-graph (GHZ) Bell operator via the odd/even split.
///
/// With Z outcomes pinned to +1 and all Y outcomes +1, the even part
/// contributes exactly 1/2 and the odd part depends only on the number `m` of
/// qubits with `v_X = −1`:
/// `f(m) = 2^{−n} Σ_{odd j} (−1)^{(j−1)/2} Σ_t (−1)^t C(m,t) C(n−m, j−t)`.
pub fn ghz_graph_bound(n: usize) -> Result<LhvBound> {
    if !(2..=64).contains(&n) {
        return Err(Error::Invalid(format!("ghz bound needs 2 ≤ n ≤ 64, got {n}")));
    }
    let c = binomials(n);
    let odd = |m: usize| -> i128 {
        let mut total = 0i128;
        for j in (1..=n).step_by(2) {
            let mut inner = 0i128;
            for t in 0..=j.min(m) {
                if j - t > n - m {
                    continue;
                }
                let term = c[m][t] * c[n - m][j - t];
                inner += if t % 2 == 0 { term } else { -term };
            }
            total += if (j - 1) / 2 % 2 == 0 { inner } else { -inner };
        }
        total
    };
    // f(n−m) = −f(m), so the largest signed value is also the largest magnitude
    // and its witness adds to the even half rather than cancelling it.
    let (m, best) = (0..=n)
        .map(|m| (m, odd(m)))
        .fold((0, i128::MIN), |acc, x| if x.1 > acc.1 { x } else { acc });
    let denom = 1i128 << n;
    let mut bound = LhvBound::rational(
        Ratio::new(denom / 2 + best, denom),
        BoundKind::Exact,
        "ghz",
    );
    let mut witness = LhvAssignment::all_plus(n);
    for q in (n - m)..n {
        witness.set(q, Letter::X, -1);
    }
    bound.witness = Some(witness);
    Ok(bound)
}

/// `1/2 + 2^{−n/2}`, valid for even `n ≤ 14`.
pub fn ghz_formula_bound(n: usize) -> Result<LhvBound> {
    if n < 2 || n % 2 == 1 || n > 64 {
        return Err(Error::Invalid(format!(
            "the closed-form GHZ bound is stated for even n only, got {n}; use the ghz method"
        )));
    }
    let denom = 1i128 << (n / 2);
    Ok(LhvBound::rational(
        Ratio::new(denom / 2 + 1, denom),
        BoundKind::Analytic,
        "formula",
    ))
}

/// `2^{−(n−1)/2}`.
pub fn mk_bound(n: usize) -> Result<LhvBound> {
    if n == 0 {
        return Err(Error::Invalid("MK bound needs n ≥ 1".into()));
    }
    let value = 2f64.powf(-(n as f64 - 1.0) / 2.0);
    let fraction = (n % 2 == 1 && n <= 125).then(|| Ratio::new(1, 1i128 << ((n - 1) / 2)));
    Ok(LhvBound {
        value,
        fraction,
        kind: BoundKind::Analytic,
        witness: None,
        method: "mk".into(),
    })
}

/// Outcome of the MK brute-force search.
#[derive(Clone, Debug, PartialEq)]
pub struct MkBruteForce {
    pub bound: LhvBound,
    /// `max |B_n|` in units of `(2√2)^{−(n−1)}`.
    pub max_units: i64,
    /// Qubits whose `a` (resp. `a'`) outcome is −1 in the least witness.
    pub a_negative: u64,
    pub a_prime_negative: u64,
}

/// Enumerates all `4ⁿ` outcome pairs through the recursion in integers.
pub fn mk_bound_bruteforce(n: usize) -> Result<MkBruteForce> {
    if n == 0 {
        return Err(Error::Invalid("MK bound needs n ≥ 1".into()));
    }
    if n > MAX_MK_BRUTEFORCE_QUBITS {
        return Err(Error::Capacity(format!(
            "MK brute force limited to {MAX_MK_BRUTEFORCE_QUBITS} qubits"
        )));
    }
    struct Walk {
        n: usize,
        best: (i64, u64, u64),
    }
    impl Walk {
        fn go(&mut self, k: usize, b: i64, bp: i64, neg_a: u64, neg_ap: u64) {
            if k == self.n {
                if b.abs() > self.best.0 {
                    self.best = (b.abs(), neg_a, neg_ap);
                }
                return;
            }
            for (a, ap) in [(1i64, 1i64), (1, -1), (-1, 1), (-1, -1)] {
                let na = if a < 0 { neg_a | 1 << k } else { neg_a };
                let nap = if ap < 0 { neg_ap | 1 << k } else { neg_ap };
                self.go(k + 1, b * (a + ap) + bp * (a - ap), bp * (ap + a) + b * (ap - a), na, nap);
            }
        }
    }
    let mut walk = Walk {
        n,
        best: (-1, 0, 0),
    };
    for (a, ap) in [(1i64, 1i64), (1, -1), (-1, 1), (-1, -1)] {
        walk.go(1, a, ap, (a < 0) as u64, (ap < 0) as u64);
    }
    let (max_units, a_negative, a_prime_negative) = walk.best;
    let value = max_units as f64 * (2.0 * std::f64::consts::SQRT_2).powi(-(n as i32 - 1));
    let exact = max_units == 1 << (n - 1);
    let mut bound = mk_bound(n)?;
    if !exact {
        bound.value = value;
        bound.fraction = None;
    }
    bound.kind = BoundKind::Exact;
    bound.method = "brute-mk".into();
    Ok(MkBruteForce {
        bound,
        max_units,
        a_negative,
        a_prime_negative,
    })
}

/// Product of factor bounds; always an upper bound.
pub fn product_bound(parts: &[LhvBound]) -> Result<LhvBound> {
    if parts.is_empty() {
        return Err(Error::Invalid("product bound needs at least one factor".into()));
    }
    let value = parts.iter().map(|p| p.value).product();
    let fraction = parts
        .iter()
        .map(|p| p.fraction)
        .try_fold(Ratio::from_integer(1i128), |acc, f| f.map(|f| acc * f));
    let method = format!(
        "product[{}]",
        parts
            .iter()
            .map(|p| p.method.as_str())
            .collect::<Vec<_>>()
            .join(" x ")
    );
    Ok(LhvBound {
        value,
        fraction,
        kind: BoundKind::UpperBound,
        witness: None,
        method,
    })
}
