//! Dense linear algebra over F_p for small matrices.

pub(crate) fn inv_mod(a: u32, p: u32) -> u32 {
    let mut result = 1u64;
    let mut base = a as u64 % p as u64;
    let mut e = p - 2;
    while e > 0 {
        if e & 1 == 1 {
            result = result * base % p as u64;
        }
        base = base * base % p as u64;
        e >>= 1;
    }
    result as u32
}

/// Row-reduces in place; returns pivot columns.
fn row_reduce(m: &mut [Vec<u32>], p: u32) -> Vec<usize> {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(pr) = (r..rows).find(|&i| m[i][c] % p != 0) else {
            continue;
        };
        m.swap(r, pr);
        let inv = inv_mod(m[r][c], p);
        for x in m[r].iter_mut() {
            *x = (*x as u64 * inv as u64 % p as u64) as u32;
        }
        for i in 0..rows {
            if i != r && m[i][c] != 0 {
                let f = m[i][c] as u64;
                for k in 0..cols {
                    let sub = f * m[r][k] as u64 % p as u64;
                    m[i][k] = ((m[i][k] as u64 + p as u64 - sub) % p as u64) as u32;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

pub fn rank(m: &[Vec<u32>], p: u32) -> usize {
    let mut m = m.to_vec();
    row_reduce(&mut m, p).len()
}

/// Basis of `{x : m x = 0}` for an `r x c` matrix.
pub fn nullspace(m: &[Vec<u32>], cols: usize, p: u32) -> Vec<Vec<u32>> {
    let mut m = m.to_vec();
    let pivots = row_reduce(&mut m, p);
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut x = vec![0u32; cols];
            x[f] = 1;
            for (r, &pc) in pivots.iter().enumerate() {
                x[pc] = (p - m[r][f] % p) % p;
            }
            x
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nullspace_annihilates() {
        let m = vec![vec![1, 2, 3, 4], vec![2, 4, 1, 0]];
        let ns = nullspace(&m, 4, 5);
        assert_eq!(ns.len(), 2);
        for x in ns {
            for row in &m {
                let s: u32 = row.iter().zip(&x).map(|(a, b)| a * b).sum();
                assert_eq!(s % 5, 0);
            }
        }
    }

    #[test]
    fn rank_of_alternating() {
        // e1^e2 + e3^e4 in F_5^4
        let m = vec![
            vec![0, 1, 0, 0],
            vec![4, 0, 0, 0],
            vec![0, 0, 0, 1],
            vec![0, 0, 4, 0],
        ];
        assert_eq!(rank(&m, 5), 4);
        assert_eq!(inv_mod(3, 7), 5);
    }
}
