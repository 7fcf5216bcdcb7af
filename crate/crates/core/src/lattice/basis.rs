/// Mixed-radix tensor-product basis; the first factor is the slowest index.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GlobalBasis {
    pub dims: Vec<usize>,
    pub strides: Vec<usize>,
    pub dim: usize,
}

impl GlobalBasis {
    pub fn new(dims: Vec<usize>) -> Self {
        let mut strides = vec![1; dims.len()];
        for f in (0..dims.len().saturating_sub(1)).rev() {
            strides[f] = strides[f + 1] * dims[f + 1];
        }
        let dim = dims.iter().product();
        Self { dims, strides, dim }
    }

    pub fn num_factors(&self) -> usize {
        self.dims.len()
    }

    #[inline]
    pub fn digit(&self, index: usize, factor: usize) -> usize {
        (index / self.strides[factor]) % self.dims[factor]
    }

    pub fn decode(&self, index: usize) -> Vec<usize> {
        (0..self.dims.len()).map(|f| self.digit(index, f)).collect()
    }

    pub fn encode(&self, digits: &[usize]) -> usize {
        digits.iter().zip(&self.strides).map(|(d, s)| d * s).sum()
    }
}
