use num_traits::Zero;

use super::rat::Rat;

/// Outcome of an exact linear solve `A x = b`.
#[derive(Debug, Clone, PartialEq)]
pub enum LinearSolution {
    Unique(Vec<Rat>),
    /// A particular solution together with a null-space basis.
    Family(Vec<Rat>, Vec<Vec<Rat>>),
    Inconsistent,
}

/// Gauss-Jordan elimination over the rationals.
pub fn solve(rows: &[Vec<Rat>], rhs: &[Rat], nvars: usize) -> LinearSolution {
    let mut m: Vec<Vec<Rat>> = rows
        .iter()
        .zip(rhs)
        .map(|(r, b)| {
            let mut v = r.clone();
            v.push(b.clone());
            v
        })
        .collect();
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..nvars {
        let Some(p) = (row..m.len()).find(|&i| !m[i][col].is_zero()) else { continue };
        m.swap(row, p);
        let inv = m[row][col].recip();
        for x in m[row].iter_mut() {
            *x *= &inv;
        }
        for i in 0..m.len() {
            if i != row && !m[i][col].is_zero() {
                let f = m[i][col].clone();
                for j in 0..=nvars {
                    let d = &m[row][j] * &f;
                    m[i][j] -= d;
                }
            }
        }
        pivots.push(col);
        row += 1;
        if row == m.len() {
            break;
        }
    }
    if m[row..].iter().any(|r| !r[nvars].is_zero()) {
        return LinearSolution::Inconsistent;
    }
    let mut x = vec![Rat::zero(); nvars];
    for (i, &c) in pivots.iter().enumerate() {
        x[c] = m[i][nvars].clone();
    }
    if pivots.len() == nvars {
        return LinearSolution::Unique(x);
    }
    let free: Vec<usize> = (0..nvars).filter(|c| !pivots.contains(c)).collect();
    let mut basis = Vec::new();
    for &f in &free {
        let mut v = vec![Rat::zero(); nvars];
        v[f] = Rat::from_integer(1.into());
        for (i, &c) in pivots.iter().enumerate() {
            v[c] = -m[i][f].clone();
        }
        basis.push(v);
    }
    LinearSolution::Family(x, basis)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rat::int;

    #[test]
    fn unique_and_inconsistent() {
        let a = vec![vec![int(1), int(1)], vec![int(1), int(-1)]];
        assert_eq!(solve(&a, &[int(3), int(1)], 2), LinearSolution::Unique(vec![int(2), int(1)]));
        let b = vec![vec![int(1), int(1)], vec![int(2), int(2)]];
        assert_eq!(solve(&b, &[int(1), int(3)], 2), LinearSolution::Inconsistent);
        assert!(matches!(solve(&b, &[int(1), int(2)], 2), LinearSolution::Family(_, _)));
    }
}
