//! Dense Gaussian elimination over GF(p) (raw residues) and over a `FieldCtx`.

use crate::error::{Error, Result};
use crate::ff::{inv_mod_p, mul_mod_p, FFElement, FieldCtx};

/// Rank of a matrix with entries in Z/pZ.
pub fn rank_mod_p(mut rows: Vec<Vec<u64>>, p: u64) -> usize {
    for v in rows.iter_mut().flatten() {
        *v %= p;
    }
    let ncols = rows.first().map_or(0, Vec::len);
    let mut rank = 0;
    for col in 0..ncols {
        let Some(piv) = (rank..rows.len()).find(|&r| rows[r][col] != 0) else {
            continue;
        };
        rows.swap(rank, piv);
        let inv = inv_mod_p(rows[rank][col], p);
        for v in rows[rank].iter_mut() {
            *v = mul_mod_p(*v, inv, p);
        }
        let pivot_row = rows[rank].clone();
        for (r, row) in rows.iter_mut().enumerate() {
            if r == rank || row[col] == 0 {
                continue;
            }
            let c = row[col];
            for (v, &pv) in row.iter_mut().zip(&pivot_row) {
                *v = (*v + p - mul_mod_p(c, pv, p)) % p;
            }
        }
        rank += 1;
        if rank == rows.len() {
            break;
        }
    }
    rank
}

/// For an `r x k` matrix `m` of full column rank over Z/pZ, returns a `k x r`
/// matrix `P` with `P m = I_k`.
pub(crate) fn left_inverse_mod_p(m: &[Vec<u64>], p: u64) -> Result<Vec<Vec<u64>>> {
    let r = m.len();
    let k = m.first().map_or(0, Vec::len);
    let mut aug: Vec<Vec<u64>> = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut v = row.clone();
            v.extend((0..r).map(|j| u64::from(i == j)));
            v
        })
        .collect();
    for col in 0..k {
        let piv = (col..r).find(|&i| aug[i][col] != 0).ok_or(Error::SingularMatrix)?;
        aug.swap(col, piv);
        let inv = inv_mod_p(aug[col][col], p);
        for v in aug[col].iter_mut() {
            *v = mul_mod_p(*v, inv, p);
        }
        let pivot_row = aug[col].clone();
        for (i, row) in aug.iter_mut().enumerate() {
            if i == col || row[col] == 0 {
                continue;
            }
            let c = row[col];
            for (v, &pv) in row.iter_mut().zip(&pivot_row) {
                *v = (*v + p - mul_mod_p(c, pv, p)) % p;
            }
        }
    }
    Ok(aug.into_iter().take(k).map(|row| row[k..].to_vec()).collect())
}

/// Solves the square system `a x = b` over GF(q).
pub fn solve(ctx: &FieldCtx, a: &[Vec<FFElement>], b: &[FFElement]) -> Result<Vec<FFElement>> {
    let n = a.len();
    if b.len() != n || a.iter().any(|row| row.len() != n) {
        return Err(Error::InvalidParameter("solve needs a square system".into()));
    }
    let mut aug: Vec<Vec<FFElement>> = a
        .iter()
        .zip(b)
        .map(|(row, bi)| {
            let mut v = row.clone();
            v.push(bi.clone());
            v
        })
        .collect();
    for col in 0..n {
        let piv = (col..n).find(|&i| !aug[i][col].is_zero()).ok_or(Error::SingularMatrix)?;
        aug.swap(col, piv);
        let inv = ctx.inv(&aug[col][col])?;
        for v in aug[col].iter_mut() {
            *v = ctx.mul(v, &inv);
        }
        let pivot_row = aug[col].clone();
        for (i, row) in aug.iter_mut().enumerate() {
            if i == col || row[col].is_zero() {
                continue;
            }
            let c = row[col].clone();
            for (v, pv) in row.iter_mut().zip(&pivot_row) {
                *v = ctx.sub(v, &ctx.mul(&c, pv));
            }
        }
    }
    Ok(aug.into_iter().map(|mut row| row.pop().expect("augmented column")).collect())
}

/// Rank over GF(q).
pub fn rank(ctx: &FieldCtx, mut rows: Vec<Vec<FFElement>>) -> usize {
    let ncols = rows.first().map_or(0, Vec::len);
    let mut rank = 0;
    for col in 0..ncols {
        let Some(piv) = (rank..rows.len()).find(|&r| !rows[r][col].is_zero()) else {
            continue;
        };
        rows.swap(rank, piv);
        let inv = ctx.inv(&rows[rank][col]).expect("pivot is nonzero");
        let pivot_row: Vec<FFElement> = rows[rank].iter().map(|v| ctx.mul(v, &inv)).collect();
        for row in rows.iter_mut().skip(rank + 1) {
            if row[col].is_zero() {
                continue;
            }
            let c = row[col].clone();
            for (v, pv) in row.iter_mut().zip(&pivot_row) {
                *v = ctx.sub(v, &ctx.mul(&c, pv));
            }
        }
        rank += 1;
    }
    rank
}
