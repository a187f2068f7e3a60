use crate::gf::{Elem, FieldTable};

/// Reduced row-echelon form of `rows`, zero rows dropped. Leading entries are 1.
pub fn rref(field: &FieldTable, rows: &[Vec<Elem>]) -> Vec<Vec<Elem>> {
    let mut m: Vec<Vec<Elem>> = rows.to_vec();
    let cols = m.first().map_or(0, Vec::len);
    let mut rank = 0;
    for col in 0..cols {
        let Some(pivot) = (rank..m.len()).find(|&r| m[r][col] != 0) else {
            continue;
        };
        m.swap(rank, pivot);
        let inv = field.inv(m[rank][col]).expect("pivot is nonzero");
        for x in m[rank].iter_mut() {
            *x = field.mul(*x, inv);
        }
        for r in 0..m.len() {
            if r != rank && m[r][col] != 0 {
                let factor = m[r][col];
                for c in 0..cols {
                    let delta = field.mul(factor, m[rank][c]);
                    m[r][c] = field.sub(m[r][c], delta);
                }
            }
        }
        rank += 1;
        if rank == m.len() {
            break;
        }
    }
    m.truncate(rank);
    m
}

pub fn rank(field: &FieldTable, rows: &[Vec<Elem>]) -> usize {
    rref(field, rows).len()
}

/// Column index of the leading 1 in each row of an RREF matrix.
pub fn pivots(rows: &[Vec<Elem>]) -> Vec<usize> {
    rows.iter().map(|r| r.iter().position(|&x| x != 0).expect("RREF rows are nonzero")).collect()
}

pub fn dot(field: &FieldTable, a: &[Elem], b: &[Elem]) -> Elem {
    a.iter().zip(b).fold(0, |acc, (&x, &y)| field.add(acc, field.mul(x, y)))
}

/// Row vector times matrix.
pub fn vec_mat(field: &FieldTable, v: &[Elem], m: &[Vec<Elem>]) -> Vec<Elem> {
    let cols = m.first().map_or(0, Vec::len);
    (0..cols)
        .map(|c| v.iter().zip(m).fold(0, |acc, (&x, row)| field.add(acc, field.mul(x, row[c]))))
        .collect()
}

/// Scales `v` so that its first nonzero entry is 1. Returns `None` for the zero vector.
pub fn normalize(field: &FieldTable, v: &[Elem]) -> Option<Vec<Elem>> {
    let lead = *v.iter().find(|&&x| x != 0)?;
    let inv = field.inv(lead)?;
    Some(v.iter().map(|&x| field.mul(x, inv)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf::field_new;

    #[test]
    fn rref_is_canonical() {
        let f = field_new(3, 1).unwrap();
        let a = rref(&f, &[vec![1, 2, 0, 1], vec![2, 1, 1, 0]]);
        let b = rref(&f, &[vec![0, 0, 1, 1], vec![1, 2, 0, 1]]);
        assert_eq!(a, b);
        assert_eq!(pivots(&a), vec![0, 2]);
        assert_eq!(rank(&f, &[vec![1, 1], vec![2, 2]]), 1);
    }
}
