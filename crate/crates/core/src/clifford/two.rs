use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use nalgebra::{Matrix2, Matrix4};
use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::single::SingleQubitClifford;
use crate::error::{Error, Result};
use crate::gf2::{symplectic_check, BitVector, PauliString, SymplecticMatrix};

/// Equivalence classes of two-qubit Cliffords under single-qubit dressing.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum CliffordClass {
    Identity,
    Cz,
    Swap,
    Fswap,
}

impl CliffordClass {
    pub const ALL: [CliffordClass; 4] = [
        CliffordClass::Identity,
        CliffordClass::Cz,
        CliffordClass::Swap,
        CliffordClass::Fswap,
    ];

    pub fn tag(self) -> &'static str {
        match self {
            CliffordClass::Identity => "I",
            CliffordClass::Cz => "CZ",
            CliffordClass::Swap => "SWAP",
            CliffordClass::Fswap => "FSWAP",
        }
    }

    pub fn from_tag(tag: &str) -> Result<Self> {
        match tag {
            "I" | "ID" => Ok(CliffordClass::Identity),
            "CZ" => Ok(CliffordClass::Cz),
            "SWAP" => Ok(CliffordClass::Swap),
            "FSWAP" => Ok(CliffordClass::Fswap),
            other => Err(Error::Parse(format!("unknown gate class {other:?}"))),
        }
    }

    /// Conjugation table of the class representative (all images carry `+`).
    fn rep_table(self) -> Table {
        static REPS: OnceLock<[Table; 4]> = OnceLock::new();
        REPS.get_or_init(|| CliffordClass::ALL.map(|c| c.build_rep_table()))[self as usize]
    }

    fn build_rep_table(self) -> Table {
        match self {
            CliffordClass::Identity => table_from_generator_images([1, 2, 4, 8], 0),
            CliffordClass::Cz => table_from_generator_images([9, 2, 6, 8], 0),
            CliffordClass::Swap => table_from_generator_images([4, 8, 1, 2], 0),
            CliffordClass::Fswap => {
                compose(&CliffordClass::Cz.build_rep_table(), &CliffordClass::Swap.build_rep_table())
            }
        }
    }

    fn rep_dense(self) -> Matrix4<Complex64> {
        let one = Complex64::new(1.0, 0.0);
        let cz = Matrix4::from_diagonal(&nalgebra::Vector4::new(one, one, one, -one));
        let mut swap = Matrix4::zeros();
        for (i, j) in [(0, 0), (1, 2), (2, 1), (3, 3)] {
            swap[(i, j)] = one;
        }
        match self {
            CliffordClass::Identity => Matrix4::identity(),
            CliffordClass::Cz => cz,
            CliffordClass::Swap => swap,
            CliffordClass::Fswap => cz * swap,
        }
    }
}

/// Conjugation image of every 4-bit local code `(x_a, z_a, x_b, z_b)` as
/// `(code, phase_exp)`, so that `X^x_a Z^z_a X^x_b Z^z_b ↦ i^phase · P_code`.
pub(crate) type Table = [(u8, u8); 16];

fn table_from_generator_images(cols: [u8; 4], signs: u8) -> Table {
    let images: Vec<PauliString> = (0..4)
        .map(|j| PauliString::hermitian(BitVector::from_u64(4, cols[j] as u64), signs >> j & 1 == 1))
        .collect();
    let mut table = [(0u8, 0u8); 16];
    for (code, slot) in table.iter_mut().enumerate() {
        let mut prod = PauliString::identity(2);
        for (j, img) in images.iter().enumerate() {
            if code >> j & 1 == 1 {
                prod = prod.multiply(img);
            }
        }
        *slot = (prod.bits().to_u64() as u8, prod.phase_exp());
    }
    table
}

/// Table of `g ∘ h` (apply `h` first).
fn compose(g: &Table, h: &Table) -> Table {
    let mut out = [(0u8, 0u8); 16];
    for (code, slot) in out.iter_mut().enumerate() {
        let (b1, p1) = h[code];
        let (b2, p2) = g[b1 as usize];
        *slot = (b2, (p1 + p2) & 3);
    }
    out
}

fn tensor(a: SingleQubitClifford, b: SingleQubitClifford) -> Table {
    let mut out = [(0u8, 0u8); 16];
    for (code, slot) in out.iter_mut().enumerate() {
        let (ba, pa) = a.local_image(code as u8 & 3);
        let (bb, pb) = b.local_image(code as u8 >> 2);
        *slot = (ba | bb << 2, (pa + pb) & 3);
    }
    out
}

fn kron(a: &Matrix2<Complex64>, b: &Matrix2<Complex64>) -> Matrix4<Complex64> {
    Matrix4::from_fn(|r, c| a[(r >> 1, c >> 1)] * b[(r & 1, c & 1)])
}

fn count_y4(code: u8) -> u8 {
    ((code & (code >> 1)) & 0b0101).count_ones() as u8
}

/// Sign bit of the Hermitian image `i^phase P_code`.
fn image_negative((code, phase): (u8, u8)) -> bool {
    (phase + 4 - count_y4(code)) & 3 == 2
}

fn cols_of(table: &Table) -> [u8; 4] {
    [table[1].0, table[2].0, table[4].0, table[8].0]
}

fn signs_of(table: &Table) -> u8 {
    [1, 2, 4, 8]
        .iter()
        .enumerate()
        .map(|(j, &g)| u8::from(image_negative(table[g])) << j)
        .sum()
}

fn key_of(cols: [u8; 4]) -> u16 {
    cols.iter()
        .enumerate()
        .map(|(j, &c)| (c as u16) << (4 * j))
        .sum()
}

#[inline]
fn local_sp(a: u8, b: u8) -> bool {
    let swapped = ((b >> 1) & 0b0101) | ((b & 0b0101) << 1);
    (a & swapped).count_ones() & 1 == 1
}

/// A gate written as `(legs[0] ⊗ legs[1]) · Rep(class) · (legs[2] ⊗ legs[3])`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Dressing {
    pub class: CliffordClass,
    pub legs: [SingleQubitClifford; 4],
}

impl Dressing {
    pub fn bare(class: CliffordClass) -> Self {
        Self {
            class,
            legs: [SingleQubitClifford::identity(); 4],
        }
    }

    fn table(&self) -> Table {
        let [l0, l1, l2, l3] = self.legs;
        compose(&compose(&tensor(l0, l1), &self.class.rep_table()), &tensor(l2, l3))
    }
}

/// A two-qubit Clifford acting on an ordered pair of sites `(a, b)`.
///
/// Local bit order is `(x_a, z_a, x_b, z_b)`; sign bit `j` of [`signs`](Self::signs)
/// negates the image of the `j`-th generator in that order.
#[derive(Clone, Copy)]
pub struct TwoQubitClifford {
    table: Table,
    class: CliffordClass,
    dressing: Dressing,
}

impl PartialEq for TwoQubitClifford {
    fn eq(&self, other: &Self) -> bool {
        self.table == other.table
    }
}

impl Eq for TwoQubitClifford {}

impl std::hash::Hash for TwoQubitClifford {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.table.hash(state);
    }
}

struct Sp4Tables {
    dressing_of: HashMap<u16, Dressing>,
}

fn sp4_tables() -> &'static Sp4Tables {
    static TABLES: OnceLock<Sp4Tables> = OnceLock::new();
    TABLES.get_or_init(|| {
        let mut dressing_of = HashMap::with_capacity(720);
        for class in CliffordClass::ALL {
            for idx in 0..6usize.pow(4) {
                let legs = [idx % 6, idx / 6 % 6, idx / 36 % 6, idx / 216]
                    .map(|s| SingleQubitClifford::from_parts(s, 0));
                let d = Dressing { class, legs };
                dressing_of.entry(key_of(cols_of(&d.table()))).or_insert(d);
            }
        }
        Sp4Tables { dressing_of }
    })
}

impl TwoQubitClifford {
    pub fn identity() -> Self {
        Self::from_dressing(Dressing::bare(CliffordClass::Identity))
    }

    pub fn cz() -> Self {
        Self::from_dressing(Dressing::bare(CliffordClass::Cz))
    }

    pub fn swap() -> Self {
        Self::from_dressing(Dressing::bare(CliffordClass::Swap))
    }

    pub fn fswap() -> Self {
        Self::from_dressing(Dressing::bare(CliffordClass::Fswap))
    }

    pub fn from_dressing(dressing: Dressing) -> Self {
        Self {
            table: dressing.table(),
            class: dressing.class,
            dressing,
        }
    }

    pub fn product(a: SingleQubitClifford, b: SingleQubitClifford) -> Self {
        Self::from_dressing(Dressing {
            class: CliffordClass::Identity,
            legs: [a, b, SingleQubitClifford::identity(), SingleQubitClifford::identity()],
        })
    }

    /// Builds the gate with the given symplectic part and generator signs.
    pub fn from_tableau(symp: &SymplecticMatrix, signs: u8) -> Result<Self> {
        if symp.dim() != 4 {
            return Err(Error::Shape(format!("expected 4x4, got {0}x{0}", symp.dim())));
        }
        if !symplectic_check(symp.rows())? {
            return Err(Error::NotSymplectic);
        }
        let cols = [0, 1, 2, 3].map(|j| symp.column(j).to_u64() as u8);
        Ok(Self::from_cols_signs(cols, signs & 0xF))
    }

    fn from_cols_signs(cols: [u8; 4], signs: u8) -> Self {
        let mut d = *sp4_tables()
            .dressing_of
            .get(&key_of(cols))
            .expect("every Sp(4) element has a dressing");
        // A right Pauli flips the signs of the generators it anticommutes with.
        let flips = signs ^ signs_of(&d.table());
        let pauli = |zflip: u8, xflip: u8| {
            SingleQubitClifford::pauli(flips >> xflip & 1 == 1, flips >> zflip & 1 == 1)
        };
        d.legs[2] = d.legs[2].compose(pauli(0, 1));
        d.legs[3] = d.legs[3].compose(pauli(2, 3));
        let g = Self::from_dressing(d);
        debug_assert_eq!(g.cols(), cols);
        debug_assert_eq!(g.signs(), signs);
        g
    }

    #[inline]
    pub fn class(&self) -> CliffordClass {
        self.class
    }

    #[inline]
    pub fn dressing(&self) -> Dressing {
        self.dressing
    }

    /// Images of `x_a, z_a, x_b, z_b` as 4-bit codes.
    #[inline]
    pub fn cols(&self) -> [u8; 4] {
        cols_of(&self.table)
    }

    #[inline]
    pub fn signs(&self) -> u8 {
        signs_of(&self.table)
    }

    pub fn symp(&self) -> SymplecticMatrix {
        let cols = self.cols().map(|c| c as u64);
        SymplecticMatrix::from_column_words(4, &cols).expect("gate tables are symplectic")
    }

    /// 16-bit key of the symplectic part.
    #[inline]
    pub fn symp_key(&self) -> u16 {
        key_of(self.cols())
    }

    /// Image of the local 4-bit support `code`, ignoring phases.
    #[inline]
    pub fn apply_code(&self, code: u8) -> u8 {
        self.table[code as usize].0
    }

    /// Conjugates a two-qubit Pauli string.
    pub fn conjugate(&self, p: &PauliString) -> Result<PauliString> {
        if p.num_qubits() != 2 {
            return Err(Error::SupportMismatch);
        }
        let mut out = p.clone();
        self.conjugate_at(&mut out, 0, 1);
        Ok(out)
    }

    /// Conjugates the factor of `p` on sites `(a, b)` in place.
    #[inline]
    pub fn conjugate_at(&self, p: &mut PauliString, a: usize, b: usize) {
        let code = p.site_code(a) | (p.site_code(b) << 2);
        let (img, ph) = self.table[code as usize];
        p.set_site_code(a, img & 3);
        p.set_site_code(b, img >> 2);
        p.add_phase(ph);
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &TwoQubitClifford) -> TwoQubitClifford {
        let t = compose(&self.table, &other.table);
        Self::from_cols_signs(cols_of(&t), signs_of(&t))
    }

    /// The same gate with its two sites exchanged.
    pub fn mirrored(&self) -> TwoQubitClifford {
        let s = CliffordClass::Swap.rep_table();
        let t = compose(&compose(&s, &self.table), &s);
        Self::from_cols_signs(cols_of(&t), signs_of(&t))
    }

    /// Dense 4×4 unitary in the basis `|b_a b_b⟩`, index `2·b_a + b_b`.
    pub fn dense(&self) -> Matrix4<Complex64> {
        let [l0, l1, l2, l3] = self.dressing.legs;
        kron(&l0.dense(), &l1.dense()) * self.dressing.class.rep_dense() * kron(&l2.dense(), &l3.dense())
    }

    /// Uniform over the non-product gates: class by its multiplicity, then uniform
    /// dressings on all four legs.
    pub fn sample_nonproduct<R: Rng + ?Sized>(rng: &mut R) -> Self {
        let class = match rng.random_range(0..19u8) {
            0..=8 => CliffordClass::Cz,
            9 => CliffordClass::Swap,
            _ => CliffordClass::Fswap,
        };
        let legs = [(); 4].map(|_| SingleQubitClifford::sample(rng));
        Self::from_dressing(Dressing { class, legs })
    }

    /// Reference sampler: rejection from the full group with uniform signs.
    pub fn sample_nonproduct_rejection<R: Rng + ?Sized>(rng: &mut R) -> Self {
        let all = enumerate_sp4_cached();
        loop {
            let m = &all[rng.random_range(0..all.len())];
            if classify(m).expect("enumerated elements are symplectic") != CliffordClass::Identity {
                return Self::from_tableau(m, rng.random_range(0..16u8))
                    .expect("enumerated elements are symplectic");
            }
        }
    }

    pub fn sample_any<R: Rng + ?Sized>(rng: &mut R) -> Self {
        let all = enumerate_sp4_cached();
        let m = &all[rng.random_range(0..all.len())];
        Self::from_tableau(m, rng.random_range(0..16u8)).expect("enumerated elements are symplectic")
    }
}

/// Classifies a 4×4 symplectic matrix by the ranks of its site blocks.
///
/// With `B_ba` the block taking site-`a` inputs to site-`b` outputs, dressing
/// preserves `rank B_21` and `rank B_11`: rank 0 is a product gate, rank 1 is
/// CZ-like, and rank 2 is SWAP-like or FSWAP-like depending on whether the
/// first site keeps any of its own content.
pub fn classify(symp: &SymplecticMatrix) -> Result<CliffordClass> {
    classify_rows(symp.rows())
}

/// [`classify`] on an unchecked candidate given by rows.
pub fn classify_rows(rows: &[BitVector]) -> Result<CliffordClass> {
    if rows.len() != 4 {
        return Err(Error::Shape(format!("expected 4 rows, got {}", rows.len())));
    }
    if !symplectic_check(rows)? {
        return Err(Error::NotSymplectic);
    }
    let col = |j: usize| (0..4).fold(0u8, |acc, i| acc | u8::from(rows[i].get(j)) << i);
    let cols = [col(0), col(1)];
    let rank = |a: u8, b: u8| match (a, b) {
        (0, 0) => 0,
        (0, _) | (_, 0) => 1,
        _ if a == b => 1,
        _ => 2,
    };
    let spread = rank(cols[0] >> 2, cols[1] >> 2);
    let kept = rank(cols[0] & 3, cols[1] & 3);
    match (spread, kept) {
        (0, _) => Ok(CliffordClass::Identity),
        (1, _) => Ok(CliffordClass::Cz),
        (2, 0) => Ok(CliffordClass::Swap),
        (2, 1) => Ok(CliffordClass::Fswap),
        _ => Err(Error::Consistency(format!(
            "unclassifiable block ranks ({spread}, {kept})"
        ))),
    }
}

/// Every element of Sp(4, GF(2)), found by brute force over all 4×4 matrices.
pub fn enumerate_sp4() -> Vec<SymplecticMatrix> {
    let mut out = Vec::with_capacity(720);
    for word in 0u32..1 << 16 {
        let cols = [0, 1, 2, 3].map(|j| (word >> (4 * j) & 0xF) as u8);
        let ok = (0..4).all(|i| (i..4).all(|j| local_sp(cols[i], cols[j]) == (i ^ 1 == j)));
        if ok {
            let m = SymplecticMatrix::from_column_words(4, &cols.map(|c| c as u64))
                .expect("columns satisfy the symplectic relations");
            out.push(m);
        }
    }
    out
}

fn enumerate_sp4_cached() -> &'static [SymplecticMatrix] {
    static ALL: OnceLock<Vec<SymplecticMatrix>> = OnceLock::new();
    ALL.get_or_init(enumerate_sp4)
}

impl fmt::Debug for TwoQubitClifford {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "TwoQubitClifford({self})")
    }
}

impl fmt::Display for TwoQubitClifford {
    /// Text form `"TAG l0 l1 l2 l3"` with single-qubit Clifford indices.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let l = self.dressing.legs;
        write!(
            f,
            "{} {} {} {} {}",
            self.class.tag(),
            l[0].index(),
            l[1].index(),
            l[2].index(),
            l[3].index()
        )
    }
}

impl FromStr for TwoQubitClifford {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut parts = s.split_whitespace();
        let class = CliffordClass::from_tag(parts.next().unwrap_or(""))?;
        let mut legs = [SingleQubitClifford::identity(); 4];
        for leg in legs.iter_mut() {
            let tok = parts
                .next()
                .ok_or_else(|| Error::Parse(format!("gate {s:?} needs four dressing indices")))?;
            let idx: usize = tok
                .parse()
                .map_err(|_| Error::Parse(format!("bad dressing index {tok:?}")))?;
            *leg = SingleQubitClifford::from_index(idx)
                .map_err(|_| Error::Parse(format!("dressing index {idx} out of range")))?;
        }
        if parts.next().is_some() {
            return Err(Error::Parse(format!("trailing tokens in gate {s:?}")));
        }
        Ok(Self::from_dressing(Dressing { class, legs }))
    }
}

impl Serialize for TwoQubitClifford {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for TwoQubitClifford {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf2::Pauli;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn p(s: &str) -> PauliString {
        s.parse().unwrap()
    }

    fn pauli_dense(s: &PauliString) -> Matrix4<Complex64> {
        let m = |q: Pauli| {
            let o = Complex64::new(0.0, 0.0);
            let l = Complex64::new(1.0, 0.0);
            let i = Complex64::new(0.0, 1.0);
            match q {
                Pauli::I => Matrix2::identity(),
                Pauli::X => Matrix2::new(o, l, l, o),
                Pauli::Y => Matrix2::new(o, -i, i, o),
                Pauli::Z => Matrix2::new(l, o, o, -l),
            }
        };
        let phase = Complex64::new(0.0, 1.0).powu(s.letter_phase() as u32);
        kron(&m(s.site(0)), &m(s.site(1))) * phase
    }

    #[test]
    fn table_one_images() {
        let cz = TwoQubitClifford::cz();
        assert_eq!(cz.conjugate(&p("+ZI")).unwrap(), p("+ZI"));
        assert_eq!(cz.conjugate(&p("+XI")).unwrap(), p("+XZ"));
        let fs = TwoQubitClifford::fswap();
        assert_eq!(fs.conjugate(&p("+XI")).unwrap(), p("+ZX"));
        assert_eq!(fs.conjugate(&p("+ZI")).unwrap(), p("+IZ"));
        let sw = TwoQubitClifford::swap();
        assert_eq!(sw.conjugate(&p("+XI")).unwrap(), p("+IX"));
        let id = TwoQubitClifford::identity();
        assert_eq!(id.conjugate(&p("-YX")).unwrap(), p("-YX"));
        assert!(cz.conjugate(&p("+X")).is_err());
    }

    #[test]
    fn dense_matches_tableau() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..200 {
            let g = TwoQubitClifford::sample_any(&mut rng);
            let u = g.dense();
            assert!((u * u.adjoint() - Matrix4::identity()).norm() < 1e-12);
            for code in 1..16u64 {
                let q = PauliString::hermitian(BitVector::from_u64(4, code), false);
                let img = g.conjugate(&q).unwrap();
                let lhs = u * pauli_dense(&q) * u.adjoint();
                assert!((lhs - pauli_dense(&img)).norm() < 1e-10, "{g} on {q}");
            }
        }
    }

    #[test]
    fn census_and_classify() {
        let all = enumerate_sp4();
        assert_eq!(all.len(), 720);
        let mut census = HashMap::new();
        for m in &all {
            assert!(symplectic_check(m.rows()).unwrap());
            *census.entry(classify(m).unwrap()).or_insert(0) += 1;
        }
        assert_eq!(census[&CliffordClass::Identity], 36);
        assert_eq!(census[&CliffordClass::Cz], 324);
        assert_eq!(census[&CliffordClass::Swap], 36);
        assert_eq!(census[&CliffordClass::Fswap], 324);
        assert_eq!(sp4_tables().dressing_of.len(), 720);
    }

    #[test]
    fn classify_is_dressing_invariant() {
        for class in CliffordClass::ALL {
            for idx in 0..6usize.pow(4) {
                let legs = [idx % 6, idx / 6 % 6, idx / 36 % 6, idx / 216]
                    .map(|s| SingleQubitClifford::from_parts(s, 0));
                let g = TwoQubitClifford::from_dressing(Dressing { class, legs });
                assert_eq!(classify(&g.symp()).unwrap(), class);
            }
        }
    }

    #[test]
    fn from_tableau_round_trips_signs() {
        for m in enumerate_sp4().iter().step_by(7) {
            for signs in 0..16 {
                let g = TwoQubitClifford::from_tableau(m, signs).unwrap();
                assert_eq!(&g.symp(), m);
                assert_eq!(g.signs(), signs);
            }
        }
    }

    #[test]
    fn text_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let g = TwoQubitClifford::sample_nonproduct(&mut rng);
            let back: TwoQubitClifford = g.to_string().parse().unwrap();
            assert_eq!(back, g);
        }
        assert!("CZ 1 2 3".parse::<TwoQubitClifford>().is_err());
        assert!("XX 0 0 0 0".parse::<TwoQubitClifford>().is_err());
        assert!("CZ 0 0 0 24".parse::<TwoQubitClifford>().is_err());
    }

    #[test]
    fn mirrored_swaps_roles() {
        let cz = TwoQubitClifford::cz();
        assert_eq!(cz.mirrored(), cz);
        let fs = TwoQubitClifford::fswap().mirrored();
        assert_eq!(fs.conjugate(&p("+IX")).unwrap(), p("+XZ"));
    }

    #[test]
    fn classify_rejects_non_symplectic() {
        let rows = vec![BitVector::zeros(4); 4];
        assert_eq!(classify_rows(&rows), Err(Error::NotSymplectic));
        assert!(matches!(classify_rows(&rows[..2]), Err(Error::Shape(_))));
    }
}
