//! Small dense helpers.

/// Gaussian elimination with partial pivoting on an augmented `n x (n+1)`
/// system. Returns `None` when the matrix is (numerically) singular.
pub(crate) fn solve_augmented(mut m: Vec<Vec<f64>>) -> Option<Vec<f64>> {
    let n = m.len();
    for col in 0..n {
        let (piv, best) = (col..n)
            .map(|r| (r, m[r][col].abs()))
            .max_by(|a, b| a.1.total_cmp(&b.1))?;
        if best < 1e-12 {
            return None;
        }
        m.swap(col, piv);
        let p = m[col][col];
        for r in 0..n {
            if r == col {
                continue;
            }
            let f = m[r][col] / p;
            if f == 0.0 {
                continue;
            }
            for c in col..=n {
                m[r][c] -= f * m[col][c];
            }
        }
    }
    Some((0..n).map(|i| m[i][n] / m[i][i]).collect())
}
