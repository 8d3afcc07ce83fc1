use std::fmt;
use std::ops::Mul;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::bits::{BitVector, EVEN_BITS};
use crate::error::{Error, Result};

/// Single-site Pauli letter, ignoring phase.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub fn from_bits(x: bool, z: bool) -> Self {
        match (x, z) {
            (false, false) => Pauli::I,
            (true, false) => Pauli::X,
            (true, true) => Pauli::Y,
            (false, true) => Pauli::Z,
        }
    }

    pub fn bits(self) -> (bool, bool) {
        match self {
            Pauli::I => (false, false),
            Pauli::X => (true, false),
            Pauli::Y => (true, true),
            Pauli::Z => (false, true),
        }
    }

    pub fn letter(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }
}

/// An `n`-qubit Pauli operator `i^phase_exp · ∏ X^x Z^z`.
///
/// Bits are interleaved per site: index `2i` holds `x_i`, `2i + 1` holds `z_i`.
/// With this convention a Hermitian `Y` on one site carries `phase_exp = 1`,
/// since `Y = i·XZ`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PauliString {
    n: usize,
    bits: BitVector,
    phase_exp: u8,
}

impl PauliString {
    pub fn identity(n: usize) -> Self {
        Self {
            n,
            bits: BitVector::zeros(2 * n),
            phase_exp: 0,
        }
    }

    pub fn from_bits(n: usize, bits: BitVector, phase_exp: u8) -> Result<Self> {
        if bits.len() != 2 * n {
            return Err(Error::DimensionMismatch {
                expected: 2 * n,
                found: bits.len(),
            });
        }
        Ok(Self {
            n,
            bits,
            phase_exp: phase_exp & 3,
        })
    }

    /// Hermitian Pauli with the given support bits and sign `(-1)^negative`.
    pub fn hermitian(bits: BitVector, negative: bool) -> Self {
        assert!(bits.len() % 2 == 0, "Pauli bit vectors have even length");
        let n = bits.len() / 2;
        let ys = count_y(&bits);
        let phase_exp = ((ys + if negative { 2 } else { 0 }) & 3) as u8;
        Self { n, bits, phase_exp }
    }

    /// `+P` acting as `letter` on `site` and identity elsewhere.
    pub fn single(n: usize, site: usize, letter: Pauli) -> Self {
        assert!(site < n, "site out of range");
        let mut bits = BitVector::zeros(2 * n);
        let (x, z) = letter.bits();
        bits.set(2 * site, x);
        bits.set(2 * site + 1, z);
        Self::hermitian(bits, false)
    }

    #[inline]
    pub fn num_qubits(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn bits(&self) -> &BitVector {
        &self.bits
    }

    pub fn into_bits(self) -> BitVector {
        self.bits
    }

    #[inline]
    pub fn phase_exp(&self) -> u8 {
        self.phase_exp
    }

    pub fn set_phase_exp(&mut self, phase_exp: u8) {
        self.phase_exp = phase_exp & 3;
    }

    #[inline]
    pub fn add_phase(&mut self, delta: u8) {
        self.phase_exp = (self.phase_exp + delta) & 3;
    }

    #[inline]
    pub fn site(&self, i: usize) -> Pauli {
        Pauli::from_bits(self.bits.get(2 * i), self.bits.get(2 * i + 1))
    }

    /// The two bits `(x_i, z_i)` packed as `x | z << 1`.
    #[inline]
    pub fn site_code(&self, i: usize) -> u8 {
        u8::from(self.bits.get(2 * i)) | (u8::from(self.bits.get(2 * i + 1)) << 1)
    }

    #[inline]
    pub fn set_site_code(&mut self, i: usize, code: u8) {
        self.bits.set(2 * i, code & 1 == 1);
        self.bits.set(2 * i + 1, code & 2 == 2);
    }

    pub fn is_identity(&self) -> bool {
        self.bits.is_zero() && self.phase_exp == 0
    }

    /// Hermitian iff the phase, after absorbing one `i` per `Y`, is real.
    pub fn is_hermitian(&self) -> bool {
        (self.phase_exp as usize + 4 - count_y(&self.bits) % 4) % 2 == 0
    }

    /// Coefficient exponent `c` in `i^c · (letter string)`.
    pub fn letter_phase(&self) -> u8 {
        ((self.phase_exp as usize + 4 - count_y(&self.bits) % 4) % 4) as u8
    }

    /// `true` for `-P` when the operator is Hermitian.
    pub fn is_negative(&self) -> bool {
        self.letter_phase() == 2
    }

    pub fn weight(&self) -> usize {
        (0..self.n).filter(|&i| self.site_code(i) != 0).count()
    }

    pub fn support(&self) -> Vec<usize> {
        (0..self.n).filter(|&i| self.site_code(i) != 0).collect()
    }

    pub fn commutes_with(&self, other: &PauliString) -> bool {
        !self.bits.symplectic_product(&other.bits)
    }

    /// Equal up to a global phase.
    pub fn same_support_bits(&self, other: &PauliString) -> bool {
        self.bits == other.bits
    }

    /// Operator product `self · other`, phases included.
    pub fn multiply(&self, other: &PauliString) -> PauliString {
        assert_eq!(self.n, other.n, "qubit count mismatch");
        // Z^z1 X^x2 = (-1)^{z1·x2} X^x2 Z^z1 on every site.
        let swaps: u32 = self
            .bits
            .words()
            .iter()
            .zip(other.bits.words())
            .map(|(a, b)| ((a >> 1) & b & EVEN_BITS).count_ones())
            .sum();
        let phase = self.phase_exp as u32 + other.phase_exp as u32 + 2 * swaps;
        PauliString {
            n: self.n,
            bits: self.bits.xor(&other.bits),
            phase_exp: (phase & 3) as u8,
        }
    }

    /// Restriction to sites `[start, start + len)`, keeping the phase.
    pub fn restrict(&self, start: usize, len: usize) -> PauliString {
        let bits = self.bits.slice(2 * start, 2 * len);
        PauliString {
            n: len,
            bits,
            phase_exp: self.phase_exp,
        }
    }

    /// Place `self` on `total` qubits starting at `offset`.
    pub fn embed(&self, total: usize, offset: usize) -> PauliString {
        PauliString {
            n: total,
            bits: self.bits.embed(2 * total, 2 * offset),
            phase_exp: self.phase_exp,
        }
    }
}

pub(crate) fn count_y(bits: &BitVector) -> usize {
    bits.words()
        .iter()
        .map(|w| (w & (w >> 1) & EVEN_BITS).count_ones() as usize)
        .sum()
}

impl Mul for &PauliString {
    type Output = PauliString;

    fn mul(self, rhs: &PauliString) -> PauliString {
        self.multiply(rhs)
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let prefix = match self.letter_phase() {
            0 => "+",
            1 => "+i",
            2 => "-",
            _ => "-i",
        };
        write!(f, "{prefix}")?;
        for i in 0..self.n {
            write!(f, "{}", self.site(i).letter())?;
        }
        Ok(())
    }
}

impl fmt::Debug for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PauliString({self})")
    }
}

impl FromStr for PauliString {
    type Err = Error;

    /// Parses strings such as `"+XIZ"`, `"-iYY"` or `"ZZ"`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (coeff, rest) = if let Some(r) = s.strip_prefix("+i") {
            (1u8, r)
        } else if let Some(r) = s.strip_prefix("-i") {
            (3, r)
        } else if let Some(r) = s.strip_prefix('+') {
            (0, r)
        } else if let Some(r) = s.strip_prefix('-') {
            (2, r)
        } else if let Some(r) = s.strip_prefix('i') {
            (1, r)
        } else {
            (0, s)
        };
        let n = rest.chars().count();
        let mut bits = BitVector::zeros(2 * n);
        for (i, c) in rest.chars().enumerate() {
            let letter = match c {
                'I' | '_' => Pauli::I,
                'X' => Pauli::X,
                'Y' => Pauli::Y,
                'Z' => Pauli::Z,
                other => return Err(Error::Parse(format!("unexpected Pauli letter {other:?}"))),
            };
            let (x, z) = letter.bits();
            bits.set(2 * i, x);
            bits.set(2 * i + 1, z);
        }
        let phase = (coeff as usize + count_y(&bits)) & 3;
        Ok(PauliString {
            n,
            bits,
            phase_exp: phase as u8,
        })
    }
}

impl Serialize for PauliString {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for PauliString {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
