//! Pauli strings with a global phase, and the symbolic Pauli-group algebra.
//!
//! Qubit `q` of an `n`-qubit string is the `q`-th tensor factor from the left,
//! which is bit `n - 1 - q` of a computational-basis index.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use super::matrix::{ComplexMatrix, I, ONE, ZERO};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub const ALL: [Pauli; 4] = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];

    pub fn matrix(self) -> ComplexMatrix {
        let m = match self {
            Pauli::I => [ONE, ZERO, ZERO, ONE],
            Pauli::X => [ZERO, ONE, ONE, ZERO],
            Pauli::Y => [ZERO, -I, I, ZERO],
            Pauli::Z => [ONE, ZERO, ZERO, -ONE],
        };
        ComplexMatrix::from_vec(2, 2, m.to_vec()).expect("2x2")
    }

    pub fn from_char(c: char) -> Option<Pauli> {
        match c {
            'I' => Some(Pauli::I),
            'X' => Some(Pauli::X),
            'Y' => Some(Pauli::Y),
            'Z' => Some(Pauli::Z),
            _ => None,
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }

    /// Single-qubit product `self · other` as `(phase, letter)`.
    pub fn mul(self, other: Pauli) -> (Complex64, Pauli) {
        use Pauli::*;
        match (self, other) {
            (I, p) | (p, I) => (ONE, p),
            (a, b) if a == b => (ONE, I),
            (X, Y) => (I_PHASE, Z),
            (Y, Z) => (I_PHASE, X),
            (Z, X) => (I_PHASE, Y),
            (Y, X) => (-I_PHASE, Z),
            (Z, Y) => (-I_PHASE, X),
            (X, Z) => (-I_PHASE, Y),
            _ => unreachable!(),
        }
    }
}

const I_PHASE: Complex64 = I;

/// `phase · σ_0 ⊗ σ_1 ⊗ … ⊗ σ_{n-1}`.
#[derive(Clone, Debug, PartialEq)]
pub struct PauliString {
    letters: Vec<Pauli>,
    phase: Complex64,
}

impl PauliString {
    pub fn new(letters: Vec<Pauli>, phase: Complex64) -> Result<Self> {
        if letters.is_empty() {
            return Err(Error::InvalidPauli("empty Pauli string".into()));
        }
        if (phase.norm() - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidPauli(format!("phase {phase} is not a unit scalar")));
        }
        Ok(Self { letters, phase })
    }

    pub fn identity(n: usize) -> Self {
        Self { letters: vec![Pauli::I; n.max(1)], phase: ONE }
    }

    /// `letter` on qubit `qubit`, identity elsewhere.
    pub fn single(n: usize, qubit: usize, letter: Pauli) -> Result<Self> {
        if qubit >= n {
            return Err(Error::InvalidPauli(format!("qubit {qubit} out of range for {n} qubits")));
        }
        let mut letters = vec![Pauli::I; n];
        letters[qubit] = letter;
        Self::new(letters, ONE)
    }

    pub fn with_phase(mut self, phase: Complex64) -> Result<Self> {
        if (phase.norm() - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidPauli(format!("phase {phase} is not a unit scalar")));
        }
        self.phase = phase;
        Ok(self)
    }

    /// All `4^n` strings with unit phase, in lexicographic `I < X < Y < Z` order.
    pub fn all(n: usize) -> impl Iterator<Item = PauliString> {
        (0..4usize.pow(n as u32)).map(move |mut code| {
            let mut letters = vec![Pauli::I; n];
            for q in (0..n).rev() {
                letters[q] = Pauli::ALL[code % 4];
                code /= 4;
            }
            PauliString { letters, phase: ONE }
        })
    }

    #[inline]
    pub fn n_qubits(&self) -> usize {
        self.letters.len()
    }

    pub fn letters(&self) -> &[Pauli] {
        &self.letters
    }

    pub fn phase(&self) -> Complex64 {
        self.phase
    }

    pub fn is_identity(&self) -> bool {
        self.letters.iter().all(|&p| p == Pauli::I)
    }

    /// Hermitian iff the phase is real (every Pauli string is Hermitian).
    pub fn is_hermitian(&self) -> bool {
        self.phase.im.abs() < 1e-12
    }

    pub fn weight(&self) -> usize {
        self.letters.iter().filter(|&&p| p != Pauli::I).count()
    }

    fn masks(&self) -> (usize, usize, u32) {
        let n = self.n_qubits();
        let (mut x, mut sign, mut ny) = (0usize, 0usize, 0u32);
        for (q, &p) in self.letters.iter().enumerate() {
            let bit = 1 << (n - 1 - q);
            match p {
                Pauli::I => {}
                Pauli::X => x |= bit,
                Pauli::Y => {
                    x |= bit;
                    sign |= bit;
                    ny += 1;
                }
                Pauli::Z => sign |= bit,
            }
        }
        (x, sign, ny)
    }

    fn global_factor(&self, ny: u32) -> Complex64 {
        self.phase * I.powu(ny)
    }

    /// Dense matrix realization.
    pub fn to_matrix(&self) -> ComplexMatrix {
        let dim = 1usize << self.n_qubits();
        let (x, sign, ny) = self.masks();
        let c = self.global_factor(ny);
        let mut m = ComplexMatrix::zeros(dim, dim);
        for b in 0..dim {
            let s = if (b & sign).count_ones() % 2 == 0 { c } else { -c };
            m[(b ^ x, b)] = s;
        }
        m
    }

    /// Applies the string to a state vector in place.
    pub fn apply_to_state(&self, amps: &mut [Complex64]) {
        let (x, sign, ny) = self.masks();
        let c = self.global_factor(ny);
        let signed = |b: usize| if (b & sign).count_ones().is_multiple_of(2) { c } else { -c };
        if x == 0 {
            for (b, a) in amps.iter_mut().enumerate() {
                *a *= signed(b);
            }
            return;
        }
        for b in 0..amps.len() {
            let partner = b ^ x;
            if b < partner {
                let (ab, ap) = (amps[b], amps[partner]);
                amps[partner] = signed(b) * ab;
                amps[b] = signed(partner) * ap;
            }
        }
    }

    /// `P ρ P†` computed by index permutation.
    pub fn conjugate(&self, rho: &ComplexMatrix) -> ComplexMatrix {
        let dim = rho.rows();
        let (x, sign, _) = self.masks();
        let norm2 = self.phase.norm_sqr();
        let s = |b: usize| if (b & sign).count_ones().is_multiple_of(2) { 1.0 } else { -1.0 };
        ComplexMatrix::from_fn(dim, dim, |i, j| {
            let (ii, jj) = (i ^ x, j ^ x);
            rho[(ii, jj)] * (norm2 * s(ii) * s(jj))
        })
    }

    /// Symbolic product `self · other` (apply `other` first).
    pub fn compose(&self, other: &PauliString) -> Result<PauliString> {
        if self.n_qubits() != other.n_qubits() {
            return Err(Error::DimensionMismatch { expected: self.n_qubits(), found: other.n_qubits() });
        }
        let mut phase = self.phase * other.phase;
        let letters = self
            .letters
            .iter()
            .zip(&other.letters)
            .map(|(&a, &b)| {
                let (p, l) = a.mul(b);
                phase *= p;
                l
            })
            .collect();
        Ok(PauliString { letters, phase })
    }

    pub fn adjoint(&self) -> PauliString {
        PauliString { letters: self.letters.clone(), phase: self.phase.conj() }
    }

    pub fn commutes_with(&self, other: &PauliString) -> bool {
        let clashes = self
            .letters
            .iter()
            .zip(&other.letters)
            .filter(|(&a, &b)| a != Pauli::I && b != Pauli::I && a != b)
            .count();
        clashes % 2 == 0
    }

    /// `tr(self† · m)`, in `O(2^n)` operations.
    pub fn overlap(&self, m: &ComplexMatrix) -> Complex64 {
        // tr(P† M) = Σ_k conj(P[k^x, k]) M[k^x, k]
        let (x, sign, ny) = self.masks();
        let c = self.global_factor(ny).conj();
        (0..m.rows())
            .map(|k| {
                let s = if (k & sign).count_ones() % 2 == 0 { c } else { -c };
                s * m[(k ^ x, k)]
            })
            .sum()
    }

    pub fn letters_string(&self) -> String {
        self.letters.iter().map(|p| p.as_char()).collect()
    }
}

/// Expands a `2^n × 2^n` matrix in the unit-phase Pauli basis, dropping terms
/// whose coefficient modulus is below `tol`.
pub fn pauli_decompose(m: &ComplexMatrix, tol: f64) -> Result<Vec<(Complex64, PauliString)>> {
    let dim = m.dim()?;
    if !dim.is_power_of_two() || dim < 2 {
        return Err(Error::InvalidArgument(format!("dimension {dim} is not a qubit register")));
    }
    let n = dim.trailing_zeros() as usize;
    Ok(PauliString::all(n)
        .filter_map(|p| {
            let c = p.overlap(m) / dim as f64;
            (c.norm() > tol).then_some((c, p))
        })
        .collect())
}

impl FromStr for PauliString {
    type Err = Error;

    /// Accepts bare letters (`"XZI"`) or the display form with a leading
    /// phase (`"(-i)XZI"`).
    fn from_str(s: &str) -> Result<Self> {
        let (phase, body) = match s.strip_prefix('(').and_then(|rest| rest.split_once(')')) {
            Some((ph, body)) => (parse_phase(ph)?, body),
            None => (ONE, s),
        };
        let letters = body
            .chars()
            .enumerate()
            .map(|(i, c)| {
                Pauli::from_char(c)
                    .ok_or_else(|| Error::InvalidPauli(format!("bad letter {c:?} at position {i} in {s:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        PauliString::new(letters, phase)
    }
}

/// Parses the textual phases `+1`, `-1`, `+i`, `-i`.
pub fn parse_phase(s: &str) -> Result<Complex64> {
    match s.trim() {
        "+1" | "1" => Ok(ONE),
        "-1" => Ok(-ONE),
        "+i" | "i" => Ok(I),
        "-i" => Ok(-I),
        other => Err(Error::InvalidPauli(format!("unknown phase {other:?}"))),
    }
}

pub fn format_phase(phase: Complex64) -> Option<&'static str> {
    let close = |z: Complex64| (phase - z).norm() < 1e-12;
    if close(ONE) {
        Some("+1")
    } else if close(-ONE) {
        Some("-1")
    } else if close(I) {
        Some("+i")
    } else if close(-I) {
        Some("-i")
    } else {
        None
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match format_phase(self.phase) {
            Some("+1") => write!(f, "{}", self.letters_string()),
            Some(p) => write!(f, "({p}){}", self.letters_string()),
            None => write!(f, "({}){}", self.phase, self.letters_string()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_z_is_diagonal() {
        let z: PauliString = "Z".parse().unwrap();
        let m = z.to_matrix();
        assert_eq!(m, ComplexMatrix::diagonal(&[ONE, -ONE]));
    }

    #[test]
    fn identity_string_realizes_identity() {
        let p: PauliString = "II".parse().unwrap();
        assert_eq!(p.to_matrix(), ComplexMatrix::identity(4));
    }

    #[test]
    fn xz_matches_nested_loop_kronecker() {
        let x = Pauli::X.matrix();
        let z = Pauli::Z.matrix();
        let mut table = ComplexMatrix::zeros(4, 4);
        for a in 0..2 {
            for b in 0..2 {
                for c in 0..2 {
                    for d in 0..2 {
                        table[(2 * a + c, 2 * b + d)] = x[(a, b)] * z[(c, d)];
                    }
                }
            }
        }
        let p: PauliString = "XZ".parse().unwrap();
        assert_eq!(p.to_matrix(), table);
    }

    #[test]
    fn bad_letter_is_rejected() {
        let err = "XQ".parse::<PauliString>().unwrap_err();
        assert!(err.to_string().contains("position 1"));
    }

    #[test]
    fn single_letter_products() {
        for a in Pauli::ALL {
            for b in Pauli::ALL {
                let (phase, c) = a.mul(b);
                let lhs = a.matrix().matmul(&b.matrix());
                assert!(lhs.max_abs_diff(&c.matrix().scale(phase)) < 1e-15, "{a:?}{b:?}");
            }
        }
    }

    #[test]
    fn state_application_matches_matrix() {
        let p = PauliString::new(vec![Pauli::Y, Pauli::X, Pauli::Z], -I).unwrap();
        let amps: Vec<Complex64> = (0..8).map(|k| Complex64::new(k as f64, 1.0 - k as f64)).collect();
        let mut applied = amps.clone();
        p.apply_to_state(&mut applied);
        let expected = p.to_matrix().matvec(&amps);
        for (a, e) in applied.iter().zip(&expected) {
            assert!((a - e).norm() < 1e-14);
        }
    }

    #[test]
    fn conjugation_matches_matrix() {
        let p: PauliString = "YZ".parse().unwrap();
        let rho = ComplexMatrix::from_fn(4, 4, |i, j| Complex64::new((i + j) as f64, i as f64 - j as f64));
        let expected = p.to_matrix().conjugate(&rho);
        assert!(p.conjugate(&rho).max_abs_diff(&expected) < 1e-14);
    }

    #[test]
    fn decomposition_reconstructs() {
        let m = ComplexMatrix::from_fn(4, 4, |i, j| Complex64::new((i * 3 + j) as f64 * 0.1, (j as f64 - i as f64) * 0.2));
        let terms = pauli_decompose(&m, 0.0).unwrap();
        let mut rebuilt = ComplexMatrix::zeros(4, 4);
        for (c, p) in &terms {
            rebuilt.add_scaled(*c, &p.to_matrix());
        }
        assert!(rebuilt.max_abs_diff(&m) < 1e-13);
    }

    #[test]
    fn commutation_rule() {
        let xx: PauliString = "XX".parse().unwrap();
        let zz: PauliString = "ZZ".parse().unwrap();
        let zi: PauliString = "ZI".parse().unwrap();
        assert!(xx.commutes_with(&zz));
        assert!(!xx.commutes_with(&zi));
    }

    #[test]
    fn display_form_parses_back() {
        for text in ["XZ", "(-1)YI", "(+i)Z", "(-i)IXYZ"] {
            let p: PauliString = text.parse().unwrap();
            assert_eq!(p.to_string(), text);
        }
        assert!("(+2)X".parse::<PauliString>().is_err());
    }

    #[test]
    fn phase_text_roundtrip() {
        for s in ["+1", "-1", "+i", "-i"] {
            assert_eq!(format_phase(parse_phase(s).unwrap()), Some(s));
        }
        assert!(parse_phase("2").is_err());
    }
}
