use faer::{c64, Mat, Side};

use super::SELF_ADJOINT_TOLERANCE;
use crate::error::{Error, Result};

/// Lowest eigenpairs of a self-adjoint matrix, energies ascending, one
/// eigenvector per column.
#[derive(Debug, Clone)]
pub struct EigenSystem {
    pub energies: Vec<f64>,
    pub states: Mat<c64>,
}

impl EigenSystem {
    pub fn len(&self) -> usize {
        self.energies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.energies.is_empty()
    }

    pub fn dimension(&self) -> usize {
        self.states.nrows()
    }

    pub fn state(&self, k: usize) -> Vec<c64> {
        (0..self.states.nrows()).map(|r| self.states[(r, k)]).collect()
    }

    /// Transition energies E_i − E_0.
    pub fn transitions(&self) -> Vec<f64> {
        let e0 = self.energies[0];
        self.energies.iter().map(|e| e - e0).collect()
    }
}

pub fn norm_inf(h: &Mat<c64>) -> f64 {
    (0..h.nrows())
        .map(|r| (0..h.ncols()).map(|c| h[(r, c)].norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// max |H_ij − conj(H_ji)| relative to ‖H‖∞.
pub fn self_adjoint_defect(h: &Mat<c64>) -> f64 {
    let n = h.nrows();
    let mut worst = 0.0f64;
    for c in 0..n {
        for r in c..n {
            worst = worst.max((h[(r, c)] - h[(c, r)].conj()).norm());
        }
    }
    let scale = norm_inf(h);
    if scale == 0.0 {
        0.0
    } else {
        worst / scale
    }
}

fn check_input(h: &Mat<c64>, k: usize) -> Result<()> {
    if h.nrows() != h.ncols() {
        return Err(Error::InvalidParameter(format!(
            "matrix must be square, got {}x{}",
            h.nrows(),
            h.ncols()
        )));
    }
    if k == 0 || k > h.nrows() {
        return Err(Error::InvalidParameter(format!(
            "requested {k} levels from a matrix of dimension {}",
            h.nrows()
        )));
    }
    for c in 0..h.ncols() {
        for r in 0..h.nrows() {
            let z = h[(r, c)];
            if !(z.re.is_finite() && z.im.is_finite()) {
                return Err(Error::InvalidParameter("matrix has non-finite entries".into()));
            }
        }
    }
    let asymmetry = self_adjoint_defect(h);
    if asymmetry > SELF_ADJOINT_TOLERANCE {
        return Err(Error::NotSelfAdjoint { asymmetry });
    }
    Ok(())
}

/// Lowest `k` eigenpairs. Each eigenvector is rotated so that its largest
/// component (lowest index on ties) is real and positive.
pub fn eigensolve(h: &Mat<c64>, k: usize) -> Result<EigenSystem> {
    check_input(h, k)?;
    let n = h.nrows();
    let evd = h
        .self_adjoint_eigen(Side::Lower)
        .map_err(|e| Error::EigenNoConvergence {
            dimension: n,
            detail: format!("{e:?}"),
        })?;
    let values = evd.S().column_vector();
    let u = evd.U();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| values[a].re.total_cmp(&values[b].re).then(a.cmp(&b)));
    let order = &order[..k];
    let energies = order.iter().map(|&i| values[i].re).collect();
    let mut states = Mat::<c64>::zeros(n, k);
    for (col, &src) in order.iter().enumerate() {
        let mut pivot = 0;
        let mut best = -1.0;
        for r in 0..n {
            let m = u[(r, src)].norm();
            if m > best * (1.0 + 1e-12) {
                best = m;
                pivot = r;
            }
        }
        let p = u[(pivot, src)];
        let phase = if best > 0.0 {
            p.conj() / best
        } else {
            c64::new(1.0, 0.0)
        };
        for r in 0..n {
            states[(r, col)] = u[(r, src)] * phase;
        }
    }
    Ok(EigenSystem { energies, states })
}

/// Lowest `k` eigenvalues, ascending.
pub fn eigenvalues(h: &Mat<c64>, k: usize) -> Result<Vec<f64>> {
    check_input(h, k)?;
    let mut values = h
        .self_adjoint_eigenvalues(Side::Lower)
        .map_err(|e| Error::EigenNoConvergence {
            dimension: h.nrows(),
            detail: format!("{e:?}"),
        })?;
    values.sort_by(f64::total_cmp);
    values.truncate(k);
    Ok(values)
}

/// max over pairs of ‖H v − λ v‖∞.
pub fn residual(h: &Mat<c64>, system: &EigenSystem) -> f64 {
    let n = h.nrows();
    let mut worst = 0.0f64;
    for (k, &lambda) in system.energies.iter().enumerate() {
        for r in 0..n {
            let mut acc = c64::new(0.0, 0.0);
            for c in 0..n {
                acc += h[(r, c)] * system.states[(c, k)];
            }
            acc -= system.states[(r, k)] * lambda;
            worst = worst.max(acc.norm());
        }
    }
    worst
}

/// max |Vᴴ V − I|.
pub fn orthonormality_defect(states: &Mat<c64>) -> f64 {
    let (n, k) = (states.nrows(), states.ncols());
    let mut worst = 0.0f64;
    for a in 0..k {
        for b in a..k {
            let mut acc = c64::new(0.0, 0.0);
            for r in 0..n {
                acc += states[(r, a)].conj() * states[(r, b)];
            }
            if a == b {
                acc -= c64::new(1.0, 0.0);
            }
            worst = worst.max(acc.norm());
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diagonal_matrix() {
        let d = [3.0, -1.0, 2.0, 0.5];
        let h = Mat::<c64>::from_fn(4, 4, |r, c| {
            if r == c {
                c64::new(d[r], 0.0)
            } else {
                c64::new(0.0, 0.0)
            }
        });
        let sys = eigensolve(&h, 4).unwrap();
        assert_eq!(sys.energies, vec![-1.0, 0.5, 2.0, 3.0]);
        let expected_rows = [1, 3, 2, 0];
        for (k, &row) in expected_rows.iter().enumerate() {
            assert!((sys.states[(row, k)] - c64::new(1.0, 0.0)).norm() < 1e-14);
        }
    }

    #[test]
    fn pauli_x() {
        let h = Mat::<c64>::from_fn(
            2,
            2,
            |r, c| if r != c { c64::new(1.0, 0.0) } else { c64::new(0.0, 0.0) },
        );
        let values = eigenvalues(&h, 2).unwrap();
        assert!((values[0] + 1.0).abs() < 1e-15 && (values[1] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn rejects_non_hermitian() {
        let h = Mat::<c64>::from_fn(2, 2, |r, c| c64::new((r + 2 * c) as f64, 0.0));
        assert!(matches!(eigensolve(&h, 1), Err(Error::NotSelfAdjoint { .. })));
    }

    #[test]
    fn rejects_bad_level_count() {
        let h = Mat::<c64>::identity(3, 3);
        assert!(eigensolve(&h, 0).is_err());
        assert!(eigensolve(&h, 4).is_err());
    }

    #[test]
    fn complex_hermitian_invariants() {
        let n = 30;
        let h = Mat::<c64>::from_fn(n, n, |r, c| {
            let (a, b) = (r.min(c) as f64, r.max(c) as f64);
            let im = if r < c {
                1.0
            } else if r > c {
                -1.0
            } else {
                0.0
            };
            c64::new((a * 0.7 + b * 0.3).sin(), im * (a - b).cos() * 0.4)
        });
        let sys = eigensolve(&h, 10).unwrap();
        assert!(sys.energies.windows(2).all(|w| w[0] <= w[1]));
        assert!(orthonormality_defect(&sys.states) < 1e-10);
        assert!(residual(&h, &sys) <= 1e-8 * norm_inf(&h));
        let again = eigensolve(&h, 10).unwrap();
        assert_eq!(sys.energies, again.energies);
    }
}
