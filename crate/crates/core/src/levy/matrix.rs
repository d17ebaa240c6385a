use crate::Real;

use super::LevyError;

pub fn check_symmetric<T: Real>(q: &[Vec<T>], d: usize) -> Result<(), LevyError> {
    if q.len() != d || q.iter().any(|row| row.len() != d) {
        return Err(LevyError::DimensionMismatch {
            expected: d,
            got: q.len(),
        });
    }
    for i in 0..d {
        for j in 0..i {
            if q[i][j] != q[j][i] {
                return Err(LevyError::InvalidParameter(format!(
                    "Q is not symmetric at ({i}, {j})"
                )));
            }
        }
    }
    Ok(())
}

/// Eigenvalues of a small symmetric matrix by cyclic Jacobi rotations.
pub fn symmetric_eigenvalues(q: &[Vec<f64>]) -> Vec<f64> {
    let n = q.len();
    let mut a: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| 0.5 * (q[i][j] + q[j][i])).collect())
        .collect();
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i][j] * a[i][j])
            .sum();
        if off < 1e-30 {
            break;
        }
        for p in 0..n {
            for r in (p + 1)..n {
                if a[p][r].abs() < 1e-300 {
                    continue;
                }
                let theta = (a[r][r] - a[p][p]) / (2.0 * a[p][r]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[k][p];
                    let akr = a[k][r];
                    a[k][p] = c * akp - s * akr;
                    a[k][r] = s * akp + c * akr;
                }
                for k in 0..n {
                    let apk = a[p][k];
                    let ark = a[r][k];
                    a[p][k] = c * apk - s * ark;
                    a[r][k] = s * apk + c * ark;
                }
            }
        }
    }
    (0..n).map(|i| a[i][i]).collect()
}

/// Rejects matrices with an eigenvalue below `-1e-12`.
pub fn check_psd<T: Real>(q: &[Vec<T>]) -> Result<(), LevyError> {
    let qf: Vec<Vec<f64>> = q
        .iter()
        .map(|row| row.iter().map(|v| v.as_f64()).collect())
        .collect();
    let min = symmetric_eigenvalues(&qf)
        .into_iter()
        .fold(f64::INFINITY, f64::min);
    if min < -1e-12 {
        return Err(LevyError::InvalidParameter(format!(
            "Q is not positive semidefinite (eigenvalue {min})"
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn jacobi_eigenvalues() {
        let mut ev = symmetric_eigenvalues(&[vec![2.0, 1.0], vec![1.0, 2.0]]);
        ev.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert!((ev[0] - 1.0).abs() < 1e-12 && (ev[1] - 3.0).abs() < 1e-12);
    }

    #[test]
    fn psd_rejection() {
        assert!(check_psd(&[vec![1.0, 2.0], vec![2.0, 1.0]]).is_err());
        assert!(check_psd(&[vec![1.0, 1.0], vec![1.0, 1.0]]).is_ok());
        assert!(check_symmetric(&[vec![1.0, 0.5], vec![0.4, 1.0]], 2).is_err());
    }
}
