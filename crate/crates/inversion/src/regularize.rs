/// Model-space regularizer `R(m)`.
///
/// `Tv` is the smoothed isotropic total variation
/// `sum_ij sqrt(gx^2 + gz^2 + epsilon^2)` over forward cell differences
/// (zero past the last row/column), an edge-preserving stand-in for the
/// split-scheme modified-TV solvers used in production codes. `L2` is the
/// plain squared norm of the model vector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Regularizer {
    L2,
    Tv { epsilon: f64 },
}

impl Regularizer {
    pub fn value(&self, m: &[f64], nz: usize, nx: usize) -> f64 {
        debug_assert_eq!(m.len(), nz * nx);
        match *self {
            Regularizer::L2 => m.iter().map(|x| x * x).sum(),
            Regularizer::Tv { epsilon } => {
                let mut acc = 0.0;
                for i in 0..nz {
                    for j in 0..nx {
                        let u = i * nx + j;
                        let gx = if j + 1 < nx { m[u + 1] - m[u] } else { 0.0 };
                        let gz = if i + 1 < nz { m[u + nx] - m[u] } else { 0.0 };
                        acc += (gx * gx + gz * gz + epsilon * epsilon).sqrt();
                    }
                }
                acc
            }
        }
    }

    /// Analytic gradient of `value` with respect to every cell.
    pub fn gradient(&self, m: &[f64], nz: usize, nx: usize) -> Vec<f64> {
        debug_assert_eq!(m.len(), nz * nx);
        match *self {
            Regularizer::L2 => m.iter().map(|x| 2.0 * x).collect(),
            Regularizer::Tv { epsilon } => {
                // Normalized difference fields gx/phi, gz/phi, then the
                // transpose of the forward-difference stencils.
                let mut nx_field = vec![0.0; nz * nx];
                let mut nz_field = vec![0.0; nz * nx];
                for i in 0..nz {
                    for j in 0..nx {
                        let u = i * nx + j;
                        let gx = if j + 1 < nx { m[u + 1] - m[u] } else { 0.0 };
                        let gz = if i + 1 < nz { m[u + nx] - m[u] } else { 0.0 };
                        let phi = (gx * gx + gz * gz + epsilon * epsilon).sqrt();
                        nx_field[u] = gx / phi;
                        nz_field[u] = gz / phi;
                    }
                }
                let mut grad = vec![0.0; nz * nx];
                for i in 0..nz {
                    for j in 0..nx {
                        let u = i * nx + j;
                        grad[u] -= nx_field[u] + nz_field[u];
                        if j > 0 {
                            grad[u] += nx_field[u - 1];
                        }
                        if i > 0 {
                            grad[u] += nz_field[u - nx];
                        }
                    }
                }
                grad
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tv_of_constant_model_is_cell_count_times_epsilon() {
        let (nz, nx) = (7, 5);
        let m = vec![2500.0; nz * nx];
        let eps = 1.5;
        let r = Regularizer::Tv { epsilon: eps };
        assert!((r.value(&m, nz, nx) - (nz * nx) as f64 * eps).abs() < 1e-9);
        // epsilon = 0 convention: exactly zero for constant models
        let r0 = Regularizer::Tv { epsilon: 0.0 };
        assert_eq!(r0.value(&m, nz, nx), 0.0);
    }

    #[test]
    fn l2_value_and_gradient() {
        let m = vec![1.0, -2.0, 3.0];
        let r = Regularizer::L2;
        assert_eq!(r.value(&m, 1, 3), 14.0);
        assert_eq!(r.gradient(&m, 1, 3), vec![2.0, -4.0, 6.0]);
    }

    #[test]
    fn tv_gradient_matches_finite_differences() {
        let (nz, nx) = (6, 5);
        // deterministic ragged field
        let m: Vec<f64> = (0..nz * nx)
            .map(|u| 2000.0 + 300.0 * ((u * 7919 % 23) as f64 - 11.0))
            .collect();
        let r = Regularizer::Tv { epsilon: 2.0 };
        let grad = r.gradient(&m, nz, nx);
        let h = 1e-5;
        for u in 0..m.len() {
            let mut mp = m.clone();
            let mut mm = m.clone();
            mp[u] += h;
            mm[u] -= h;
            let fd = (r.value(&mp, nz, nx) - r.value(&mm, nz, nx)) / (2.0 * h);
            assert!(
                (fd - grad[u]).abs() < 1e-6 * (1.0 + fd.abs()),
                "cell {u}: fd {fd} vs analytic {}",
                grad[u]
            );
        }
    }
}
