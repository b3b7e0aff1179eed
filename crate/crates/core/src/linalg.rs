//! Small dense integer and rational matrix routines.

use crate::rational::Rat;

pub type IntMatrix = Vec<Vec<i64>>;

pub fn identity(n: usize) -> IntMatrix {
    (0..n)
        .map(|i| (0..n).map(|j| i64::from(i == j)).collect())
        .collect()
}

pub fn transpose(m: &IntMatrix) -> IntMatrix {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    (0..cols)
        .map(|j| (0..rows).map(|i| m[i][j]).collect())
        .collect()
}

pub fn mat_mul(a: &IntMatrix, b: &IntMatrix) -> IntMatrix {
    let inner = b.len();
    let cols = b.first().map_or(0, Vec::len);
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| (0..inner).map(|k| row[k] * b[k][j]).sum())
                .collect()
        })
        .collect()
}

pub fn mat_vec(a: &IntMatrix, x: &[i64]) -> Vec<i64> {
    a.iter()
        .map(|row| row.iter().zip(x).map(|(p, q)| p * q).sum())
        .collect()
}

pub fn rat_mat_vec(a: &IntMatrix, x: &[Rat]) -> Vec<Rat> {
    a.iter()
        .map(|row| row.iter().zip(x).map(|(p, q)| q * *p).sum())
        .collect()
}

/// `x^T g y`.
pub fn bilinear(g: &IntMatrix, x: &[i64], y: &[i64]) -> i64 {
    x.iter().zip(mat_vec(g, y)).map(|(a, b)| a * b).sum()
}

/// Determinant by fraction-free Bareiss elimination.
pub fn det(m: &IntMatrix) -> i128 {
    let n = m.len();
    if n == 0 {
        return 1;
    }
    let mut a: Vec<Vec<i128>> = m
        .iter()
        .map(|r| r.iter().map(|&x| x as i128).collect())
        .collect();
    let mut sign = 1i128;
    let mut prev = 1i128;
    for k in 0..n - 1 {
        if a[k][k] == 0 {
            let Some(swap) = (k + 1..n).find(|&i| a[i][k] != 0) else {
                return 0;
            };
            a.swap(k, swap);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) / prev;
            }
        }
        prev = a[k][k];
    }
    sign * a[n - 1][n - 1]
}

/// Solves `a x = b` over the rationals; `None` if `a` is singular.
pub fn solve(a: &[Vec<Rat>], b: &[Rat]) -> Option<Vec<Rat>> {
    let n = a.len();
    let mut m: Vec<Vec<Rat>> = a
        .iter()
        .zip(b)
        .map(|(row, bi)| {
            let mut r = row.clone();
            r.push(bi.clone());
            r
        })
        .collect();
    for col in 0..n {
        let pivot = (col..n).find(|&r| !m[r][col].is_zero())?;
        m.swap(col, pivot);
        let inv = m[col][col].recip();
        for j in col..=n {
            m[col][j] = &m[col][j] * &inv;
        }
        for r in 0..n {
            if r != col && !m[r][col].is_zero() {
                let f = m[r][col].clone();
                for j in col..=n {
                    let t = &m[col][j] * &f;
                    m[r][j] -= &t;
                }
            }
        }
    }
    Some(
        m.into_iter()
            .map(|mut r| r.pop().expect("augmented"))
            .collect(),
    )
}

/// Solves `a x = b` and requires an integral answer.
pub fn solve_integral(a: &IntMatrix, b: &[i64]) -> Option<Vec<i64>> {
    let ar: Vec<Vec<Rat>> = a
        .iter()
        .map(|r| r.iter().map(|&x| Rat::int(x)).collect())
        .collect();
    let br: Vec<Rat> = b.iter().map(|&x| Rat::int(x)).collect();
    solve(&ar, &br)?.iter().map(Rat::to_i64).collect()
}

pub fn to_rat(m: &IntMatrix) -> Vec<Vec<Rat>> {
    m.iter()
        .map(|r| r.iter().map(|&x| Rat::int(x)).collect())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bareiss_matches_cofactor_expansion() {
        let m = vec![vec![2, -1, 0], vec![-1, 2, -1], vec![0, -1, 2]];
        assert_eq!(det(&m), 4);
        let swap = vec![vec![0, 1], vec![1, 0]];
        assert_eq!(det(&swap), -1);
        assert_eq!(det(&vec![vec![1, 2], vec![2, 4]]), 0);
    }

    #[test]
    fn solves_small_systems() {
        let a = vec![vec![1, 1], vec![1, -1]];
        assert_eq!(solve_integral(&a, &[3, 1]), Some(vec![2, 1]));
        assert_eq!(solve_integral(&a, &[1, 0]), None);
    }
}
