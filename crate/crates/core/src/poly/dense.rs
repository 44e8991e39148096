//! Row-major boxes of exponent vectors (Kronecker layout). The last variable
//! varies fastest, so increasing linear index is lexicographic order with the
//! first variable most significant.

use super::monomial::Exponents;

#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct Layout {
    dims: Vec<usize>,
    strides: Vec<usize>,
    size: usize,
}

impl Layout {
    /// Returns `None` when the box would overflow `limit` entries.
    pub(crate) fn new(dims: Vec<usize>, limit: usize) -> Option<Self> {
        let mut strides = vec![0; dims.len()];
        let mut size: usize = 1;
        for j in (0..dims.len()).rev() {
            strides[j] = size;
            size = size.checked_mul(dims[j])?;
            if size > limit {
                return None;
            }
        }
        Some(Layout {
            dims,
            strides,
            size,
        })
    }

    #[inline]
    pub(crate) fn size(&self) -> usize {
        self.size
    }

    #[inline]
    pub(crate) fn index(&self, exps: &[u32]) -> usize {
        exps.iter()
            .zip(self.strides.iter())
            .map(|(&e, &s)| e as usize * s)
            .sum()
    }

    pub(crate) fn unravel(&self, mut idx: usize) -> Exponents {
        let mut out = Exponents::from_elem(0, self.dims.len());
        for (j, &s) in self.strides.iter().enumerate() {
            out[j] = (idx / s) as u32;
            idx %= s;
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ravel_round_trip() {
        let l = Layout::new(vec![3, 4, 5], 1000).unwrap();
        assert_eq!(l.size(), 60);
        for idx in 0..60 {
            assert_eq!(l.index(&l.unravel(idx)), idx);
        }
        assert!(Layout::new(vec![1000, 1000, 1000], 1_000_000).is_none());
    }
}
