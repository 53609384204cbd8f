//! Binary C-SVM trained by sequential minimal optimization.
//!
//! Solves the dual
//!
//! ```text
//! min  1/2 a^T Q a - e^T a    s.t.  y^T a = 0,  0 <= a_i <= C,
//! Q_ij = y_i y_j K(x_i, x_j)
//! ```
//!
//! by analytic two-variable updates. The working pair is the maximal
//! violating pair over the gradient `G = Q a - e`; when that pair cannot
//! move (degenerate curvature), the second index is drawn at random from
//! the remaining violators with a generator seeded from the config.
//! Training stops once `max_{I_up} -y G - min_{I_low} -y G < tol`, which
//! bounds every KKT residual of `y_i f(x_i)` by `tol`.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::kernel::{gram_matrix, KernelParams};
use super::SvmError;

/// Curvature floor for degenerate pairs (duplicate points).
const TAU: f64 = 1e-12;
const STEP_EPS: f64 = 1e-15;

#[derive(Debug, Clone, PartialEq)]
pub struct TrainConfig {
    /// Box constraint.
    pub c: f64,
    /// KKT tolerance.
    pub tol: f64,
    /// Budget of consecutive stalled sweeps (of `n` updates each).
    pub max_passes: usize,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            c: 10.0,
            tol: 1e-3,
            max_passes: 100,
            seed: 0,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<(), SvmError> {
        if !(self.c > 0.0 && self.c.is_finite()) {
            return Err(SvmError::InvalidConfig(format!("C must be > 0, got {}", self.c)));
        }
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return Err(SvmError::InvalidConfig(format!("tol must be > 0, got {}", self.tol)));
        }
        if self.max_passes == 0 {
            return Err(SvmError::InvalidConfig("max_passes must be >= 1".into()));
        }
        Ok(())
    }
}

/// Full dual solution, kept for diagnostics and oracle checks.
#[derive(Debug, Clone, PartialEq)]
pub struct DualSolution {
    pub alpha: Vec<f64>,
    pub bias: f64,
    /// Dual objective in maximization form `sum a - 1/2 a^T Q a`.
    pub objective: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// Trained binary classifier; only vectors with `alpha > 0` are kept.
#[derive(Debug, Clone, PartialEq)]
pub struct BinaryModel {
    pub support_vectors: Vec<Vec<f64>>,
    /// `alpha_i * y_i` for each support vector.
    pub dual_coeffs: Vec<f64>,
    pub bias: f64,
    pub kernel: KernelParams,
    /// Positive class first.
    pub class_pair: (String, String),
}

impl BinaryModel {
    pub fn dims(&self) -> usize {
        self.support_vectors.first().map_or(0, Vec::len)
    }

    /// `f(x) = sum coeff_i K(sv_i, x) + b`.
    pub fn decision_value(&self, x: &[f64]) -> Result<f64, SvmError> {
        if x.len() != self.dims() {
            return Err(SvmError::DimensionMismatch {
                expected: self.dims(),
                found: x.len(),
            });
        }
        Ok(self.decision_unchecked(x))
    }

    pub(crate) fn decision_unchecked(&self, x: &[f64]) -> f64 {
        self.support_vectors
            .iter()
            .zip(&self.dual_coeffs)
            .map(|(sv, c)| c * self.kernel.eval(sv, x))
            .sum::<f64>()
            + self.bias
    }
}

fn validate_problem(x: &[Vec<f64>], y: &[f64]) -> Result<(), SvmError> {
    if x.is_empty() {
        return Err(SvmError::EmptyInput);
    }
    if x.len() != y.len() {
        return Err(SvmError::DimensionMismatch {
            expected: x.len(),
            found: y.len(),
        });
    }
    let dims = x[0].len();
    if let Some(bad) = x.iter().find(|v| v.len() != dims) {
        return Err(SvmError::DimensionMismatch {
            expected: dims,
            found: bad.len(),
        });
    }
    if let Some(&bad) = y.iter().find(|&&l| l != 1.0 && l != -1.0) {
        return Err(SvmError::InvalidLabel(bad));
    }
    if !(y.contains(&1.0) && y.contains(&-1.0)) {
        return Err(SvmError::SingleClassInput);
    }
    Ok(())
}

struct Solver<'a> {
    k: Vec<Vec<f64>>,
    y: &'a [f64],
    c: f64,
    alpha: Vec<f64>,
    grad: Vec<f64>,
}

impl Solver<'_> {
    fn in_up(&self, t: usize) -> bool {
        (self.y[t] > 0.0 && self.alpha[t] < self.c) || (self.y[t] < 0.0 && self.alpha[t] > 0.0)
    }

    fn in_low(&self, t: usize) -> bool {
        (self.y[t] < 0.0 && self.alpha[t] < self.c) || (self.y[t] > 0.0 && self.alpha[t] > 0.0)
    }

    fn score(&self, t: usize) -> f64 {
        -self.y[t] * self.grad[t]
    }

    /// `(i, m, j, M)`: arg/value of max score over `I_up`, min over `I_low`.
    fn max_violating_pair(&self) -> Option<(usize, f64, usize, f64)> {
        let n = self.alpha.len();
        let mut up: Option<(usize, f64)> = None;
        let mut low: Option<(usize, f64)> = None;
        for t in 0..n {
            let s = self.score(t);
            if self.in_up(t) && up.is_none_or(|(_, m)| s > m) {
                up = Some((t, s));
            }
            if self.in_low(t) && low.is_none_or(|(_, m)| s < m) {
                low = Some((t, s));
            }
        }
        Some((up?.0, up?.1, low?.0, low?.1))
    }

    /// Analytic update of `(alpha_i, alpha_j)`; returns the step sizes.
    fn update_pair(&mut self, i: usize, j: usize) -> (f64, f64) {
        let (yi, yj, c) = (self.y[i], self.y[j], self.c);
        let (old_i, old_j) = (self.alpha[i], self.alpha[j]);
        let mut quad = self.k[i][i] + self.k[j][j] - 2.0 * self.k[i][j];
        if quad <= 0.0 {
            quad = TAU;
        }
        let (mut ai, mut aj) = (old_i, old_j);
        if yi != yj {
            let delta = (-self.grad[i] - self.grad[j]) / quad;
            let diff = ai - aj;
            ai += delta;
            aj += delta;
            if diff > 0.0 {
                if aj < 0.0 {
                    aj = 0.0;
                    ai = diff;
                }
            } else if ai < 0.0 {
                ai = 0.0;
                aj = -diff;
            }
            if diff > 0.0 {
                if ai > c {
                    ai = c;
                    aj = c - diff;
                }
            } else if aj > c {
                aj = c;
                ai = c + diff;
            }
        } else {
            let delta = (self.grad[i] - self.grad[j]) / quad;
            let sum = ai + aj;
            ai -= delta;
            aj += delta;
            if sum > c {
                if ai > c {
                    ai = c;
                    aj = sum - c;
                }
            } else if aj < 0.0 {
                aj = 0.0;
                ai = sum;
            }
            if sum > c {
                if aj > c {
                    aj = c;
                    ai = sum - c;
                }
            } else if ai < 0.0 {
                ai = 0.0;
                aj = sum;
            }
        }
        self.alpha[i] = ai;
        self.alpha[j] = aj;
        let (di, dj) = (ai - old_i, aj - old_j);
        if di != 0.0 || dj != 0.0 {
            for t in 0..self.alpha.len() {
                self.grad[t] += self.y[t] * (yi * self.k[i][t] * di + yj * self.k[j][t] * dj);
            }
        }
        (di, dj)
    }

    fn bias(&self) -> f64 {
        let free: Vec<f64> = (0..self.alpha.len())
            .filter(|&t| self.alpha[t] > 0.0 && self.alpha[t] < self.c)
            .map(|t| self.score(t))
            .collect();
        if free.is_empty() {
            match self.max_violating_pair() {
                Some((_, m, _, lo)) => 0.5 * (m + lo),
                None => 0.0,
            }
        } else {
            free.iter().sum::<f64>() / free.len() as f64
        }
    }

    fn objective(&self) -> f64 {
        // 1/2 a^T Q a - e^T a  ==  1/2 sum a_i (G_i - 1)
        let primal_form: f64 = self
            .alpha
            .iter()
            .zip(&self.grad)
            .map(|(a, g)| a * (g - 1.0))
            .sum::<f64>()
            * 0.5;
        -primal_form
    }
}

/// Solves the binary dual problem and returns every multiplier.
///
/// On budget exhaustion the returned solution has `converged == false`.
pub fn solve_dual(
    x: &[Vec<f64>],
    y: &[f64],
    kernel: KernelParams,
    config: &TrainConfig,
) -> Result<DualSolution, SvmError> {
    config.validate()?;
    validate_problem(x, y)?;
    let n = x.len();
    let mut solver = Solver {
        k: gram_matrix(x, kernel),
        y,
        c: config.c,
        alpha: vec![0.0; n],
        grad: vec![-1.0; n],
    };
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);

    let stall_budget = config.max_passes.saturating_mul(n);
    let hard_cap = stall_budget.saturating_mul(1000);
    let mut stalled = 0usize;
    let mut iterations = 0usize;
    let mut converged = false;

    while iterations < hard_cap {
        let Some((i, m, j, lo)) = solver.max_violating_pair() else {
            converged = true;
            break;
        };
        if m - lo < config.tol {
            converged = true;
            break;
        }
        iterations += 1;
        let (di, dj) = solver.update_pair(i, j);
        let mut moved = di.abs() + dj.abs() > STEP_EPS;
        if !moved {
            let candidates: Vec<usize> = (0..n)
                .filter(|&t| t != i && solver.in_low(t) && solver.score(t) < m - config.tol)
                .collect();
            if !candidates.is_empty() {
                let j2 = candidates[rng.random_range(0..candidates.len())];
                let (di, dj) = solver.update_pair(i, j2);
                moved = di.abs() + dj.abs() > STEP_EPS;
            }
        }
        if moved {
            stalled = 0;
        } else {
            stalled += 1;
            if stalled > stall_budget {
                break;
            }
        }
    }

    Ok(DualSolution {
        bias: solver.bias(),
        objective: solver.objective(),
        alpha: solver.alpha,
        iterations,
        converged,
    })
}

/// Trains a binary model; `y[i] = +1` marks `class_pair.0`.
pub fn smo_train_binary(
    x: &[Vec<f64>],
    y: &[f64],
    kernel: KernelParams,
    config: &TrainConfig,
    class_pair: (String, String),
) -> Result<BinaryModel, SvmError> {
    let sol = solve_dual(x, y, kernel, config)?;
    let (support_vectors, dual_coeffs) = x
        .iter()
        .zip(y)
        .zip(&sol.alpha)
        .filter(|(_, &a)| a > 0.0)
        .map(|((xi, yi), a)| (xi.clone(), a * yi))
        .unzip();
    let model = BinaryModel {
        support_vectors,
        dual_coeffs,
        bias: sol.bias,
        kernel,
        class_pair,
    };
    if sol.converged {
        Ok(model)
    } else {
        Err(SvmError::NoConvergence {
            iterations: sol.iterations,
            model: Box::new(model),
        })
    }
}

/// Largest KKT residual of `y_i f(x_i)` given decision values `f`.
pub fn max_kkt_violation(alpha: &[f64], y: &[f64], f: &[f64], c: f64) -> f64 {
    alpha
        .iter()
        .zip(y)
        .zip(f)
        .map(|((&a, &yi), &fi)| {
            let margin = yi * fi;
            if a <= 0.0 {
                (1.0 - margin).max(0.0)
            } else if a >= c {
                (margin - 1.0).max(0.0)
            } else {
                (margin - 1.0).abs()
            }
        })
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_point() -> (Vec<Vec<f64>>, Vec<f64>) {
        (vec![vec![-1.0], vec![1.0]], vec![-1.0, 1.0])
    }

    #[test]
    fn symmetric_two_point_problem() {
        let (x, y) = two_point();
        let cfg = TrainConfig::default();
        let sol = solve_dual(&x, &y, KernelParams::new(1.0).unwrap(), &cfg).unwrap();
        let expected = 1.0 / (1.0 - (-4.0f64).exp());
        assert!(sol.converged);
        assert!(sol.bias.abs() <= 1e-12);
        for a in &sol.alpha {
            assert!((a - expected).abs() <= 1e-12, "{a}");
        }
        let model = smo_train_binary(
            &x,
            &y,
            KernelParams::new(1.0).unwrap(),
            &cfg,
            ("pos".into(), "neg".into()),
        )
        .unwrap();
        assert!(model.decision_value(&[0.0]).unwrap().abs() <= 1e-12);
    }

    #[test]
    fn input_errors() {
        let k = KernelParams::new(1.0).unwrap();
        let cfg = TrainConfig::default();
        assert!(matches!(
            solve_dual(&[vec![0.0], vec![1.0]], &[1.0, 1.0], k, &cfg),
            Err(SvmError::SingleClassInput)
        ));
        assert!(matches!(
            solve_dual(&[vec![0.0], vec![1.0]], &[1.0, 0.0], k, &cfg),
            Err(SvmError::InvalidLabel(_))
        ));
        assert!(matches!(
            solve_dual(&[vec![0.0], vec![1.0, 2.0]], &[1.0, -1.0], k, &cfg),
            Err(SvmError::DimensionMismatch { .. })
        ));
        let bad = TrainConfig { c: 0.0, ..cfg };
        assert!(solve_dual(&[vec![0.0], vec![1.0]], &[1.0, -1.0], k, &bad).is_err());
    }

    #[test]
    fn duplicate_points_with_opposite_labels_stay_bounded() {
        let x = vec![vec![0.0], vec![0.0], vec![1.0], vec![-1.0]];
        let y = vec![1.0, -1.0, 1.0, -1.0];
        let cfg = TrainConfig::default();
        let sol = solve_dual(&x, &y, KernelParams::new(1.0).unwrap(), &cfg).unwrap();
        assert!(sol.alpha.iter().all(|&a| (0.0..=cfg.c).contains(&a)));
        let balance: f64 = sol.alpha.iter().zip(&y).map(|(a, y)| a * y).sum();
        assert!(balance.abs() <= 1e-6);
    }

    #[test]
    fn budget_exhaustion_is_flagged() {
        let x: Vec<Vec<f64>> = (0..40).map(|i| vec![(i as f64 * 0.37).sin()]).collect();
        let y: Vec<f64> = (0..40).map(|i| if i % 3 == 0 { 1.0 } else { -1.0 }).collect();
        let cfg = TrainConfig {
            c: 1000.0,
            tol: 1e-14,
            max_passes: 1,
            seed: 0,
        };
        let k = KernelParams::new(50.0).unwrap();
        match smo_train_binary(&x, &y, k, &cfg, ("a".into(), "b".into())) {
            Err(SvmError::NoConvergence { model, .. }) => {
                assert!(!model.support_vectors.is_empty())
            }
            other => panic!("expected NoConvergence, got {other:?}"),
        }
    }
}
