//! Small dense linear-system helpers.

/// Solves `M z = rhs` for square row-major `M` (size `k×k`) by Gaussian
/// elimination with partial pivoting. Returns `None` when a pivot falls
/// below `pivot_tol` in magnitude.
pub fn solve_square(mut m: Vec<f64>, mut rhs: Vec<f64>, k: usize, pivot_tol: f64) -> Option<Vec<f64>> {
    debug_assert_eq!(m.len(), k * k);
    debug_assert_eq!(rhs.len(), k);
    for col in 0..k {
        let (piv, best) = (col..k)
            .map(|r| (r, m[r * k + col].abs()))
            .fold((col, -1.0), |acc, (r, v)| if v > acc.1 { (r, v) } else { acc });
        if best < pivot_tol {
            return None;
        }
        if piv != col {
            for j in 0..k {
                m.swap(piv * k + j, col * k + j);
            }
            rhs.swap(piv, col);
        }
        let p = m[col * k + col];
        for r in col + 1..k {
            let f = m[r * k + col] / p;
            if f == 0.0 {
                continue;
            }
            for j in col..k {
                m[r * k + j] -= f * m[col * k + j];
            }
            rhs[r] -= f * rhs[col];
        }
    }
    let mut z = vec![0.0; k];
    for r in (0..k).rev() {
        let s: f64 = (r + 1..k).map(|j| m[r * k + j] * z[j]).sum();
        z[r] = (rhs[r] - s) / m[r * k + r];
    }
    Some(z)
}
