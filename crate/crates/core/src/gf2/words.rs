/// Span of vectors packed in a single word, for registers of at most 32 qubits.
///
/// Rows are kept in echelon form indexed by their lowest set bit; `support` is the
/// union of everything inserted, which equals the support of the span.
#[derive(Clone, Debug)]
pub(crate) struct WordSpan {
    rows: [u64; 64],
    pivots: u64,
    support: u64,
    dim: usize,
}

impl WordSpan {
    pub fn new() -> Self {
        Self {
            rows: [0; 64],
            pivots: 0,
            support: 0,
            dim: 0,
        }
    }

    pub fn insert(&mut self, v: u64) -> bool {
        let original = v;
        let mut v = v;
        while v != 0 {
            let p = v.trailing_zeros();
            if self.pivots >> p & 1 == 1 {
                v ^= self.rows[p as usize];
            } else {
                self.rows[p as usize] = v;
                self.pivots |= 1 << p;
                self.support |= original;
                self.dim += 1;
                return true;
            }
        }
        false
    }

    #[cfg(test)]
    pub fn contains(&self, v: u64) -> bool {
        let mut v = v;
        while v != 0 {
            let p = v.trailing_zeros();
            if self.pivots >> p & 1 == 0 {
                return false;
            }
            v ^= self.rows[p as usize];
        }
        true
    }

    #[inline]
    pub fn support(&self) -> u64 {
        self.support
    }

    #[cfg(test)]
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn basis(&self) -> impl Iterator<Item = u64> + '_ {
        (0..64).filter(|&p| self.pivots >> p & 1 == 1).map(|p| self.rows[p])
    }

    /// Smallest span containing `seeds` and closed under `f`.
    pub fn closure(seeds: &[u64], f: impl Fn(u64) -> u64) -> Self {
        let mut span = Self::new();
        let mut stack: Vec<u64> = Vec::with_capacity(64);
        for &s in seeds {
            if span.insert(s) {
                stack.push(s);
            }
        }
        while let Some(w) = stack.pop() {
            let image = f(w);
            if span.insert(image) {
                stack.push(image);
            }
        }
        span
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn insert_and_membership() {
        let mut s = WordSpan::new();
        assert!(s.insert(0b0110));
        assert!(s.insert(0b0011));
        assert!(!s.insert(0b0101));
        assert!(s.contains(0b0101));
        assert!(!s.contains(0b1000));
        assert_eq!(s.dim(), 2);
        assert_eq!(s.support(), 0b0111);
        assert!(!s.insert(0));
    }

    #[test]
    fn closure_of_cyclic_shift() {
        let shift = |v: u64| ((v << 1) | (v >> 3)) & 0xF;
        let s = WordSpan::closure(&[1], shift);
        assert_eq!(s.dim(), 4);
        let s = WordSpan::closure(&[0b0101], shift);
        assert_eq!(s.dim(), 2);
    }
}
