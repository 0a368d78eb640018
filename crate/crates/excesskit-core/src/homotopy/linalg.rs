//! Small dense complex linear solves for Newton steps.

use num_complex::Complex64;

/// Solve `a x = b` in place by LU with partial pivoting. Returns None when
/// the matrix is numerically singular relative to its largest entry.
#[allow(clippy::needless_range_loop)]
pub(crate) fn solve(mut a: Vec<Vec<Complex64>>, mut b: Vec<Complex64>) -> Option<Vec<Complex64>> {
    let n = b.len();
    let scale = a
        .iter()
        .flat_map(|row| row.iter().map(|v| v.norm()))
        .fold(0.0f64, f64::max);
    if scale == 0.0 {
        return None;
    }
    let threshold = scale * 1e-14;
    for col in 0..n {
        let (pivot_row, pivot_norm) = (col..n)
            .map(|r| (r, a[r][col].norm()))
            .max_by(|x, y| x.1.partial_cmp(&y.1).unwrap())
            .unwrap();
        if pivot_norm <= threshold {
            return None;
        }
        a.swap(col, pivot_row);
        b.swap(col, pivot_row);
        let pivot = a[col][col];
        for r in col + 1..n {
            let factor = a[r][col] / pivot;
            if factor == Complex64::new(0.0, 0.0) {
                continue;
            }
            for c in col + 1..n {
                let v = a[col][c];
                a[r][c] -= factor * v;
            }
            a[r][col] = Complex64::new(0.0, 0.0);
            let v = b[col];
            b[r] -= factor * v;
        }
    }
    let mut x = vec![Complex64::new(0.0, 0.0); n];
    for i in (0..n).rev() {
        let mut acc = b[i];
        for j in i + 1..n {
            acc -= a[i][j] * x[j];
        }
        x[i] = acc / a[i][i];
    }
    Some(x)
}
