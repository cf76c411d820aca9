//! Naive reference computations used as oracles. Nothing here calls the
//! library's linear algebra; algebras are read only through `get`.
#![allow(dead_code)]

use leibniz_core::Algebra;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

pub type Q = BigRational;

pub fn q(n: i64) -> Q {
    BigRational::from_integer(BigInt::from(n))
}

pub fn frac(n: i64, d: i64) -> Q {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// Row echelon form by plain Gaussian elimination; returns the nonzero rows.
pub fn echelon(rows: &[Vec<Q>]) -> Vec<Vec<Q>> {
    let mut m: Vec<Vec<Q>> = rows.to_vec();
    let cols = m.first().map_or(0, Vec::len);
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..m.len()).find(|&i| !m[i][c].is_zero()) else { continue };
        m.swap(r, p);
        let inv = Q::one() / m[r][c].clone();
        for x in m[r].iter_mut() {
            *x = &*x * &inv;
        }
        for i in 0..m.len() {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for j in 0..cols {
                    let t = &m[r][j] * &f;
                    m[i][j] -= t;
                }
            }
        }
        r += 1;
    }
    m.truncate(r);
    m
}

pub fn rank(rows: &[Vec<Q>]) -> usize {
    echelon(rows).len()
}

/// Kernel of the map `v -> rows . v`.
pub fn kernel(rows: &[Vec<Q>], ncols: usize) -> Vec<Vec<Q>> {
    let e = echelon(rows);
    let pivots: Vec<usize> = e.iter().map(|row| row.iter().position(|x| !x.is_zero()).unwrap()).collect();
    let mut out = Vec::new();
    for f in (0..ncols).filter(|c| !pivots.contains(c)) {
        let mut v = vec![Q::zero(); ncols];
        v[f] = Q::one();
        for (row, &p) in e.iter().zip(&pivots) {
            v[p] = -row[f].clone();
        }
        out.push(v);
    }
    out
}

pub fn same_span(a: &[Vec<Q>], b: &[Vec<Q>]) -> bool {
    let ra = rank(a);
    let rb = rank(b);
    let both: Vec<Vec<Q>> = a.iter().chain(b).cloned().collect();
    ra == rb && rank(&both) == ra
}

pub fn c(a: &Algebra, i: usize, j: usize, k: usize) -> Q {
    a.get(i, j, k).clone()
}

pub fn bracket(a: &Algebra, u: &[Q], v: &[Q]) -> Vec<Q> {
    let d = a.dim();
    let mut out = vec![Q::zero(); d];
    for i in 0..d {
        if u[i].is_zero() {
            continue;
        }
        for j in 0..d {
            if v[j].is_zero() {
                continue;
            }
            for (k, o) in out.iter_mut().enumerate() {
                *o += &u[i] * &v[j] * c(a, i, j, k);
            }
        }
    }
    out
}

pub fn unit(d: usize, i: usize) -> Vec<Q> {
    let mut v = vec![Q::zero(); d];
    v[i] = Q::one();
    v
}

/// Number of basis triples violating `[[x,y],z] = [[x,z],y] + [x,[y,z]]`.
pub fn leibniz_defects(a: &Algebra) -> usize {
    let d = a.dim();
    let e: Vec<Vec<Q>> = (0..d).map(|i| unit(d, i)).collect();
    let mut bad = 0;
    for x in &e {
        for y in &e {
            for z in &e {
                let lhs = bracket(a, &bracket(a, x, y), z);
                let r1 = bracket(a, &bracket(a, x, z), y);
                let r2 = bracket(a, x, &bracket(a, y, z));
                if lhs.iter().zip(r1.iter().zip(&r2)).any(|(l, (p, q))| *l != p + q) {
                    bad += 1;
                }
            }
        }
    }
    bad
}

pub fn antisymmetric(a: &Algebra) -> bool {
    let d = a.dim();
    (0..d).all(|i| (0..d).all(|j| (0..d).all(|k| c(a, i, j, k) == -c(a, j, i, k))))
}

/// Dimensions of `L^1 = L, L^{k+1} = [L^k, L]` (or the derived series),
/// until zero or stable.
pub fn series_dims(a: &Algebra, derived: bool) -> Vec<usize> {
    series_spaces(a, derived).iter().map(Vec::len).collect()
}

pub fn series_spaces(a: &Algebra, derived: bool) -> Vec<Vec<Vec<Q>>> {
    let d = a.dim();
    let mut cur: Vec<Vec<Q>> = (0..d).map(|i| unit(d, i)).collect();
    let mut out = vec![cur.clone()];
    loop {
        if cur.is_empty() {
            break;
        }
        let mut gens = Vec::new();
        for u in &cur {
            if derived {
                for v in &cur {
                    gens.push(bracket(a, u, v));
                }
            } else {
                for j in 0..d {
                    gens.push(bracket(a, u, &unit(d, j)));
                }
            }
        }
        let next = echelon(&gens);
        if next.len() == cur.len() {
            break;
        }
        out.push(next.clone());
        cur = next;
    }
    out
}

/// Derivations as flattened `d x d` matrices (row `i` is `D(e_i)`), from the
/// full linear system in all `d^2` entries.
pub fn derivations(a: &Algebra) -> Vec<Vec<Q>> {
    let d = a.dim();
    let var = |i: usize, j: usize| i * d + j;
    let mut rows = Vec::new();
    for x in 0..d {
        for y in 0..d {
            for k in 0..d {
                // D([e_x,e_y])_k - [D e_x, e_y]_k - [e_x, D e_y]_k = 0
                let mut row = vec![Q::zero(); d * d];
                for m in 0..d {
                    row[var(m, k)] += c(a, x, y, m);
                    row[var(x, m)] -= c(a, m, y, k);
                    row[var(y, m)] -= c(a, x, m, k);
                }
                rows.push(row);
            }
        }
    }
    kernel(&rows, d * d)
}

/// `{v : [e_i, v] = 0 for all i}`.
pub fn right_annihilator(a: &Algebra) -> Vec<Vec<Q>> {
    let d = a.dim();
    let mut rows = Vec::new();
    for i in 0..d {
        for k in 0..d {
            rows.push((0..d).map(|j| c(a, i, j, k)).collect());
        }
    }
    kernel(&rows, d)
}

/// Coordinates of `v` in the basis given by the rows of `t`.
pub fn coordinates(t: &[Vec<Q>], v: &[Q]) -> Option<Vec<Q>> {
    let d = t.len();
    // augmented system sum_i c_i t_i = v, one equation per component
    let rows: Vec<Vec<Q>> = (0..d)
        .map(|k| {
            let mut row: Vec<Q> = (0..d).map(|i| t[i][k].clone()).collect();
            row.push(v[k].clone());
            row
        })
        .collect();
    let e = echelon(&rows);
    if e.len() != d || e.iter().any(|r| r[..d].iter().all(Zero::is_zero)) {
        return None;
    }
    Some(e.iter().map(|r| r[d].clone()).collect())
}
