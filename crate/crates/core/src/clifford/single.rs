use std::collections::VecDeque;
use std::fmt;
use std::sync::OnceLock;

use nalgebra::Matrix2;
use num_complex::Complex64;
use rand::Rng;

use crate::error::{Error, Result};
use crate::gf2::{BitVector, Pauli, PauliString, SymplecticMatrix};

/// The six elements of Sp(2, GF(2)) as `(image of x, image of z)` site codes,
/// where a code packs `x | z << 1` (1 = X, 2 = Z, 3 = Y).
pub(crate) const SP2: [(u8, u8); 6] = [(1, 2), (2, 1), (3, 2), (1, 3), (2, 3), (3, 1)];

/// One of the 24 single-qubit Cliffords modulo global phase.
///
/// Index layout is `symp * 4 + signs`, where `symp` indexes [`SP2`] and bit 0 / bit 1
/// of `signs` negate the images of `X` / `Z`. Index 0 is the identity.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SingleQubitClifford(u8);

pub(crate) struct C1Entry {
    /// Conjugation image of the local code `c` as `(code, phase_exp)`.
    pub table: [(u8, u8); 4],
    pub dense: Matrix2<Complex64>,
}

struct C1Tables {
    entries: Vec<C1Entry>,
    compose: [[u8; 24]; 24],
    inverse: [u8; 24],
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn image_string(code: u8, negative: bool) -> PauliString {
    PauliString::hermitian(BitVector::from_u64(2, code as u64), negative)
}

fn table_from_images(img_x: &PauliString, img_z: &PauliString) -> [(u8, u8); 4] {
    let mut table = [(0u8, 0u8); 4];
    for (code, slot) in table.iter_mut().enumerate() {
        let mut prod = PauliString::identity(1);
        if code & 1 == 1 {
            prod = prod.multiply(img_x);
        }
        if code & 2 == 2 {
            prod = prod.multiply(img_z);
        }
        *slot = (prod.bits().to_u64() as u8, prod.phase_exp());
    }
    table
}

fn index_of(img_x: &PauliString, img_z: &PauliString) -> u8 {
    let xc = img_x.bits().to_u64() as u8;
    let zc = img_z.bits().to_u64() as u8;
    let symp = SP2
        .iter()
        .position(|&p| p == (xc, zc))
        .expect("images of a Clifford form a symplectic pair");
    let signs = u8::from(img_x.is_negative()) | (u8::from(img_z.is_negative()) << 1);
    (symp as u8) * 4 + signs
}

fn tables() -> &'static C1Tables {
    static TABLES: OnceLock<C1Tables> = OnceLock::new();
    TABLES.get_or_init(build_tables)
}

/// Generates the group from `H` and `S`, carrying the dense matrix of one word
/// per element so the unitary representative is exact.
fn build_tables() -> C1Tables {
    let s2 = std::f64::consts::FRAC_1_SQRT_2;
    let h = Matrix2::new(c(s2, 0.0), c(s2, 0.0), c(s2, 0.0), c(-s2, 0.0));
    let s = Matrix2::new(c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 1.0));
    // H: X -> Z, Z -> X; S: X -> Y, Z -> Z
    let gens = [
        (h, table_from_images(&image_string(2, false), &image_string(1, false))),
        (s, table_from_images(&image_string(3, false), &image_string(2, false))),
    ];

    let mut found: Vec<Option<([(u8, u8); 4], Matrix2<Complex64>)>> = vec![None; 24];
    let id_table = table_from_images(&image_string(1, false), &image_string(2, false));
    found[0] = Some((id_table, Matrix2::identity()));
    let mut queue = VecDeque::from([0usize]);
    while let Some(idx) = queue.pop_front() {
        let (table, dense) = found[idx].expect("queued entries are filled");
        for (gd, gt) in &gens {
            // new = g ∘ current: conjugate the current images through g.
            let img = |code: u8| {
                let (bits, ph) = table[code as usize];
                let (b2, p2) = gt[bits as usize];
                PauliString::from_bits(1, BitVector::from_u64(2, b2 as u64), ph + p2)
                    .expect("single-qubit string")
            };
            let (ix, iz) = (img(1), img(2));
            let j = index_of(&ix, &iz) as usize;
            if found[j].is_none() {
                found[j] = Some((table_from_images(&ix, &iz), gd * dense));
                queue.push_back(j);
            }
        }
    }
    let entries: Vec<C1Entry> = found
        .into_iter()
        .map(|e| {
            let (table, dense) = e.expect("H and S generate all 24 elements");
            C1Entry { table, dense }
        })
        .collect();

    let mut compose = [[0u8; 24]; 24];
    let mut inverse = [0u8; 24];
    for a in 0..24 {
        for b in 0..24 {
            let img = |code: u8| {
                let (bits, ph) = entries[b].table[code as usize];
                let (b2, p2) = entries[a].table[bits as usize];
                PauliString::from_bits(1, BitVector::from_u64(2, b2 as u64), ph + p2)
                    .expect("single-qubit string")
            };
            compose[a][b] = index_of(&img(1), &img(2));
            if compose[a][b] == 0 {
                inverse[a] = b as u8;
            }
        }
    }
    C1Tables {
        entries,
        compose,
        inverse,
    }
}

impl SingleQubitClifford {
    pub const COUNT: usize = 24;

    pub fn identity() -> Self {
        Self(0)
    }

    pub fn from_index(index: usize) -> Result<Self> {
        if index >= Self::COUNT {
            return Err(Error::InvalidParameter(format!(
                "single-qubit Clifford index {index} >= 24"
            )));
        }
        Ok(Self(index as u8))
    }

    /// Element with symplectic part `SP2[symp]` and the given sign bits.
    pub fn from_parts(symp: usize, signs: u8) -> Self {
        assert!(symp < 6 && signs < 4);
        Self((symp as u8) * 4 + signs)
    }

    /// The Pauli `X^x Z^z` viewed as a Clifford; it flips the sign of every
    /// generator it anticommutes with.
    pub fn pauli(x: bool, z: bool) -> Self {
        Self(u8::from(z) | (u8::from(x) << 1))
    }

    pub fn all() -> impl Iterator<Item = Self> {
        (0..24u8).map(Self)
    }

    pub fn hadamard() -> Self {
        Self::from_parts(1, 0)
    }

    pub fn phase() -> Self {
        Self::from_parts(2, 0)
    }

    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }

    #[inline]
    pub fn symp_index(self) -> usize {
        (self.0 / 4) as usize
    }

    #[inline]
    pub fn signs(self) -> u8 {
        self.0 & 3
    }

    pub fn symp(self) -> SymplecticMatrix {
        let (xc, zc) = SP2[self.symp_index()];
        SymplecticMatrix::from_column_words(2, &[xc as u64, zc as u64])
            .expect("SP2 entries are symplectic")
    }

    /// `(code, phase_exp)` image of a local site code.
    #[inline]
    pub(crate) fn local_image(self, code: u8) -> (u8, u8) {
        tables().entries[self.index()].table[code as usize]
    }

    /// Image of a Hermitian single-site Pauli, with sign.
    pub fn image(self, p: Pauli) -> PauliString {
        let (x, z) = p.bits();
        let mut s = PauliString::hermitian(
            BitVector::from_bools(&[x, z]),
            false,
        );
        self.conjugate_at(&mut s, 0);
        s
    }

    /// Conjugates a one-qubit Pauli string.
    pub fn conjugate(self, p: &PauliString) -> Result<PauliString> {
        if p.num_qubits() != 1 {
            return Err(Error::SupportMismatch);
        }
        let mut out = p.clone();
        self.conjugate_at(&mut out, 0);
        Ok(out)
    }

    /// Conjugates the factor of `p` on `site` in place.
    #[inline]
    pub fn conjugate_at(self, p: &mut PauliString, site: usize) {
        let (code, ph) = self.local_image(p.site_code(site));
        p.set_site_code(site, code);
        p.add_phase(ph);
    }

    /// `true` iff conjugation maps the single-site Pauli `p` to `±p`.
    pub fn preserves(self, p: Pauli) -> bool {
        let img = self.image(p);
        img.site(0) == p
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(self, other: Self) -> Self {
        Self(tables().compose[self.index()][other.index()])
    }

    pub fn inverse(self) -> Self {
        Self(tables().inverse[self.index()])
    }

    pub fn dense(self) -> Matrix2<Complex64> {
        tables().entries[self.index()].dense
    }

    pub fn sample<R: Rng + ?Sized>(rng: &mut R) -> Self {
        Self(rng.random_range(0..24u8))
    }
}

impl fmt::Debug for SingleQubitClifford {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (xc, zc) = SP2[self.symp_index()];
        let letter = |code: u8| Pauli::from_bits(code & 1 == 1, code & 2 == 2).letter();
        let sign = |neg: bool| if neg { '-' } else { '+' };
        write!(
            f,
            "C1[{}: X->{}{}, Z->{}{}]",
            self.0,
            sign(self.signs() & 1 == 1),
            letter(xc),
            sign(self.signs() & 2 == 2),
            letter(zc)
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pauli_matrix(p: Pauli) -> Matrix2<Complex64> {
        let o = c(0.0, 0.0);
        let l = c(1.0, 0.0);
        match p {
            Pauli::I => Matrix2::identity(),
            Pauli::X => Matrix2::new(o, l, l, o),
            Pauli::Y => Matrix2::new(o, c(0.0, -1.0), c(0.0, 1.0), o),
            Pauli::Z => Matrix2::new(l, o, o, -l),
        }
    }

    #[test]
    fn dense_matrices_realise_the_tableau() {
        for g in SingleQubitClifford::all() {
            let u = g.dense();
            for p in [Pauli::X, Pauli::Y, Pauli::Z] {
                let img = g.image(p);
                let sign = if img.is_negative() { -1.0 } else { 1.0 };
                let expected = pauli_matrix(img.site(0)) * c(sign, 0.0);
                let got = u * pauli_matrix(p) * u.adjoint();
                assert!((got - expected).norm() < 1e-12, "{g:?} on {p:?}");
            }
        }
    }

    #[test]
    fn group_structure() {
        let id = SingleQubitClifford::identity();
        for a in SingleQubitClifford::all() {
            assert_eq!(a.compose(a.inverse()), id);
            assert_eq!(a.compose(id), a);
            for b in SingleQubitClifford::all() {
                let ab = a.compose(b);
                for p in [Pauli::X, Pauli::Z] {
                    let direct = a.conjugate(&b.image(p)).unwrap();
                    assert_eq!(ab.image(p), direct);
                }
            }
        }
    }

    #[test]
    fn z_preserving_fraction_is_one_third() {
        let hits = SingleQubitClifford::all()
            .filter(|g| g.preserves(Pauli::Z))
            .count();
        assert_eq!(hits * 3, 24);
        assert!(!SingleQubitClifford::hadamard().preserves(Pauli::Z));
        let id = SingleQubitClifford::identity();
        assert!([Pauli::X, Pauli::Y, Pauli::Z].iter().all(|&p| id.preserves(p)));
    }

    #[test]
    fn pauli_elements_flip_anticommuting_generators() {
        let x = SingleQubitClifford::pauli(true, false);
        assert_eq!(x.image(Pauli::Z).to_string(), "-Z");
        assert_eq!(x.image(Pauli::X).to_string(), "+X");
    }
}
