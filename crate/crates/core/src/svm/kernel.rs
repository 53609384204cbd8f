use super::SvmError;

/// Radial basis function kernel `exp(-gamma * |x - z|^2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelParams {
    pub gamma: f64,
}

impl KernelParams {
    pub fn new(gamma: f64) -> Result<Self, SvmError> {
        if gamma > 0.0 && gamma.is_finite() {
            Ok(Self { gamma })
        } else {
            Err(SvmError::InvalidConfig(format!("gamma must be > 0, got {gamma}")))
        }
    }

    /// `1 / dims`, the usual default for features scaled to `[-1, 1]`.
    pub fn for_dims(dims: usize) -> Self {
        Self {
            gamma: 1.0 / dims.max(1) as f64,
        }
    }

    #[inline]
    pub(crate) fn eval(&self, x: &[f64], z: &[f64]) -> f64 {
        let d2: f64 = x.iter().zip(z).map(|(a, b)| (a - b) * (a - b)).sum();
        (-self.gamma * d2).exp()
    }
}

pub fn rbf_kernel(x: &[f64], z: &[f64], kernel: KernelParams) -> Result<f64, SvmError> {
    if x.len() != z.len() {
        return Err(SvmError::DimensionMismatch {
            expected: x.len(),
            found: z.len(),
        });
    }
    Ok(kernel.eval(x, z))
}

/// Dense Gram matrix `K[i][j] = k(x_i, x_j)`, filled symmetrically.
pub fn gram_matrix(xs: &[Vec<f64>], kernel: KernelParams) -> Vec<Vec<f64>> {
    let n = xs.len();
    let mut k = vec![vec![0.0; n]; n];
    for i in 0..n {
        k[i][i] = 1.0;
        for j in 0..i {
            let v = kernel.eval(&xs[i], &xs[j]);
            k[i][j] = v;
            k[j][i] = v;
        }
    }
    k
}
