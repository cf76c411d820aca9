//! Derivation algebras of structure-constant algebras.

use std::collections::BTreeMap;

use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::algebra::{unit, Algebra};
use crate::arith::matrix::Matrix;
use crate::arith::poly::{MultiPoly, Var};
use crate::arith::rational::{frac, int, Rational};
use crate::arith::ArithError;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DerivationError {
    #[error("matrix is {rows}x{cols}, algebra has dimension {dim}")]
    SizeMismatch { dim: usize, rows: usize, cols: usize },
    #[error("diagonal rank {diagonal} disagrees with sampled rank {sampled}; triangularity assumption failed")]
    Disagreement { diagonal: usize, sampled: usize },
    #[error(transparent)]
    Arith(#[from] ArithError),
}

/// Number of random combinations tried by the sampled nil-independence rank.
pub const NIL_TRIALS: usize = 32;
/// Bound on numerators and denominators of the sampled coefficients.
pub const NIL_HEIGHT: i64 = 100;
const NIL_SEED: u64 = 0x0D1A_6014;

/// A basis of a space of derivations together with a parametrized
/// template `sum_p name_p * basis_p`.
#[derive(Clone, Debug)]
pub struct DerivationSpace {
    dim: usize,
    basis: Vec<Matrix>,
    names: Vec<String>,
    template: Matrix<MultiPoly>,
}

impl DerivationSpace {
    fn from_basis(dim: usize, basis: Vec<Matrix>, names: Vec<String>) -> Self {
        let mut template: Matrix<MultiPoly> = Matrix::zeros(dim, dim);
        for (m, name) in basis.iter().zip(&names) {
            let v = MultiPoly::var(name.as_str());
            for i in 0..dim {
                for j in 0..dim {
                    let c = m.get(i, j);
                    if !c.is_zero() {
                        let cur = template.get(i, j).clone();
                        template.set(i, j, cur + v.scale(c));
                    }
                }
            }
        }
        DerivationSpace { dim, basis, names, template }
    }

    /// Size of the algebra the derivations act on.
    pub fn algebra_dim(&self) -> usize {
        self.dim
    }

    pub fn dimension(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[Matrix] {
        &self.basis
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn template(&self) -> &Matrix<MultiPoly> {
        &self.template
    }

    pub fn vars(&self) -> Vec<Var> {
        self.names.iter().map(Var::new).collect()
    }

    pub fn combination(&self, coeffs: &[Rational]) -> Matrix {
        let mut m = Matrix::zeros(self.dim, self.dim);
        for (b, c) in self.basis.iter().zip(coeffs) {
            if !c.is_zero() {
                m = m.add(&b.scale(c)).expect("same shape");
            }
        }
        m
    }

    /// Whether `m` lies in the span of the basis.
    pub fn contains(&self, m: &Matrix) -> bool {
        let mut rows: Vec<Vec<Rational>> = self.basis.iter().map(flatten).collect();
        let base = rank_of(&rows);
        rows.push(flatten(m));
        rank_of(&rows) == base
    }

    pub fn contains_space(&self, other: &DerivationSpace) -> bool {
        other.basis.iter().all(|m| self.contains(m))
    }

    pub fn is_triangular(&self) -> bool {
        self.basis.iter().all(Matrix::is_upper_triangular)
    }
}

fn flatten(m: &Matrix) -> Vec<Rational> {
    m.to_rows().into_iter().flatten().collect()
}

fn rank_of(rows: &[Vec<Rational>]) -> usize {
    if rows.is_empty() {
        return 0;
    }
    Matrix::from_rows(rows.to_vec()).expect("rectangular").rank()
}

/// Name given to the free entry `(i, j)` of a derivation matrix.
pub fn param_name(i: usize, j: usize) -> String {
    match i {
        0 => format!("a{j}"),
        1 => format!("b{j}"),
        _ => format!("d{i}_{j}"),
    }
}

/// Checks `d([e_x,e_y]) = [d(e_x), e_y] + [e_x, d(e_y)]`, where row `i` of
/// `d` holds the coordinates of `d(e_i)`.
pub fn is_derivation(a: &Algebra, d: &Matrix) -> Result<bool, DerivationError> {
    let n = a.dim();
    if d.rows() != n || d.cols() != n {
        return Err(DerivationError::SizeMismatch { dim: n, rows: d.rows(), cols: d.cols() });
    }
    for x in 0..n {
        for y in 0..n {
            let lhs = d.apply_row(a.product(x, y));
            let r1 = a.bracket_raw(d.row(x), &unit(n, y));
            let r2 = a.bracket_raw(&unit(n, x), d.row(y));
            if lhs.iter().zip(&r1).zip(&r2).any(|((l, p), q)| !(l - p - q).is_zero()) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Residuals of the derivation equation for a symbolic matrix; empty when
/// the template is a derivation identically in its parameters.
pub fn derivation_residuals(a: &Algebra, d: &Matrix<MultiPoly>) -> Result<Vec<MultiPoly>, DerivationError> {
    let n = a.dim();
    if d.rows() != n || d.cols() != n {
        return Err(DerivationError::SizeMismatch { dim: n, rows: d.rows(), cols: d.cols() });
    }
    let mut out = Vec::new();
    for x in 0..n {
        for y in 0..n {
            for k in 0..n {
                let mut p = MultiPoly::zero();
                for (m, c) in a.product(x, y).iter().enumerate() {
                    if !c.is_zero() {
                        p.add_scaled(d.get(m, k), c);
                    }
                }
                for m in 0..n {
                    let c = a.get(m, y, k);
                    if !c.is_zero() {
                        p.add_scaled(d.get(x, m), &-c);
                    }
                    let c = a.get(x, m, k);
                    if !c.is_zero() {
                        p.add_scaled(d.get(y, m), &-c);
                    }
                }
                if !p.is_zero() {
                    out.push(p);
                }
            }
        }
    }
    Ok(out)
}

/// Solves the derivation equations in the `dim^2` matrix entries. Unknowns
/// are ordered by row descending, then column descending, so that the free
/// parameters are the low-index entries; each basis element is named after
/// its free entry.
pub fn derivation_space(a: &Algebra) -> DerivationSpace {
    let n = a.dim();
    let nn = n * n;
    let col = |i: usize, j: usize| (n - 1 - i) * n + (n - 1 - j);
    let entry = |c: usize| (n - 1 - c / n, n - 1 - c % n);
    let mut rows: Vec<Vec<Rational>> = Vec::new();
    for x in 0..n {
        for y in 0..n {
            for k in 0..n {
                let mut row = vec![Rational::zero(); nn];
                for (m, c) in a.product(x, y).iter().enumerate() {
                    if !c.is_zero() {
                        row[col(m, k)] += c;
                    }
                }
                for m in 0..n {
                    let c = a.get(m, y, k);
                    if !c.is_zero() {
                        row[col(x, m)] -= c;
                    }
                    let c = a.get(x, m, k);
                    if !c.is_zero() {
                        row[col(y, m)] -= c;
                    }
                }
                if row.iter().any(|c| !c.is_zero()) {
                    rows.push(row);
                }
            }
        }
    }
    let system = if rows.is_empty() { Matrix::zeros(0, nn) } else { Matrix::from_rows(rows).expect("rectangular") };
    let (_, pivots) = system.rref();
    let free: Vec<usize> = (0..nn).filter(|c| !pivots.contains(c)).collect();
    let null = system.nullspace();
    let mut basis = Vec::new();
    let mut names = Vec::new();
    for (v, &f) in null.iter().zip(&free) {
        let mut m = Matrix::zeros(n, n);
        for (c, val) in v.iter().enumerate() {
            if !val.is_zero() {
                let (i, j) = entry(c);
                m.set(i, j, val.clone());
            }
        }
        let (i, j) = entry(f);
        names.push(param_name(i, j));
        basis.push(m);
    }
    DerivationSpace::from_basis(n, basis, names)
}

/// Span of the right multiplications `R_{e_i}`.
pub fn inner_derivations(a: &Algebra) -> DerivationSpace {
    let n = a.dim();
    let mats: Vec<Matrix> =
        (0..n).map(|i| a.right_multiplication(&unit(n, i)).expect("unit vector has the right length")).collect();
    let flat: Vec<Vec<Rational>> = mats.iter().map(flatten).collect();
    let mut basis = Vec::new();
    if flat.iter().any(|v| v.iter().any(|c| !c.is_zero())) {
        let (r, pivots) = Matrix::from_rows(flat).expect("rectangular").rref();
        for row in 0..pivots.len() {
            let mut m = Matrix::zeros(n, n);
            for (c, val) in r.row(row).iter().enumerate() {
                m.set(c / n, c % n, val.clone());
            }
            basis.push(m);
        }
    }
    let names = (0..basis.len()).map(|k| format!("r{k}")).collect();
    DerivationSpace::from_basis(n, basis, names)
}

/// Nil-independence data of a derivation space.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NilIndependence {
    /// The reported maximal number of nil-independent derivations.
    pub rank: usize,
    /// Rank of `d -> diag(d)`, when every basis matrix is upper triangular.
    pub diagonal_rank: Option<usize>,
    /// Largest Jacobian rank of the trace map over the sampled points.
    pub sampled_rank: usize,
}

impl NilIndependence {
    pub fn method(&self) -> &'static str {
        if self.diagonal_rank.is_some() {
            "diagonal rank (sampled rank agrees)"
        } else {
            "sampled trace rank (heuristic)"
        }
    }
}

/// Rank of the diagonal map on a triangular space, cross-checked by random
/// combinations: at a random point `c`, the Jacobian of
/// `c -> (tr D(c)^k)_{k=1..dim}` has rank equal to the number of independent
/// eigenvalue directions, and a combination is nilpotent exactly when all
/// these traces vanish.
pub fn max_nil_independent(space: &DerivationSpace) -> Result<NilIndependence, DerivationError> {
    let diagonal_rank = space.is_triangular().then(|| {
        let rows: Vec<Vec<Rational>> = space.basis().iter().map(Matrix::diagonal).collect();
        rank_of(&rows)
    });
    let sampled_rank = sampled_trace_rank(space, NIL_TRIALS, NIL_SEED)?;
    if let Some(d) = diagonal_rank {
        if d != sampled_rank {
            return Err(DerivationError::Disagreement { diagonal: d, sampled: sampled_rank });
        }
    }
    Ok(NilIndependence { rank: diagonal_rank.unwrap_or(sampled_rank), diagonal_rank, sampled_rank })
}

pub fn sample_rational(rng: &mut impl Rng, height: i64) -> Rational {
    frac(rng.gen_range(-height..=height), rng.gen_range(1..=height))
}

fn sampled_trace_rank(space: &DerivationSpace, trials: usize, seed: u64) -> Result<usize, DerivationError> {
    let n = space.algebra_dim();
    let basis = space.basis();
    if basis.is_empty() {
        return Ok(0);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best = 0;
    for _ in 0..trials {
        let coeffs: Vec<Rational> = basis.iter().map(|_| sample_rational(&mut rng, NIL_HEIGHT)).collect();
        let d = space.combination(&coeffs);
        let mut jac = Matrix::zeros(n, basis.len());
        let mut power = Matrix::identity(n);
        for k in 1..=n {
            for (j, b) in basis.iter().enumerate() {
                let mut tr = Rational::zero();
                for p in 0..n {
                    for q in 0..n {
                        let x = power.get(p, q);
                        let y = b.get(q, p);
                        if !x.is_zero() && !y.is_zero() {
                            tr += x * y;
                        }
                    }
                }
                jac.set(k - 1, j, tr * int(k as i64));
            }
            power = power.mul(&d)?;
        }
        best = best.max(jac.rank());
        if best == basis.len().min(n) {
            break;
        }
    }
    Ok(best)
}

/// One named condition of a derivation-pattern check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ShapeCheck {
    pub name: String,
    pub ok: bool,
    pub detail: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ShapeReport {
    pub checks: Vec<ShapeCheck>,
}

impl ShapeReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.ok)
    }

    pub fn failures(&self) -> Vec<&ShapeCheck> {
        self.checks.iter().filter(|c| !c.ok).collect()
    }

    fn push(&mut self, name: impl Into<String>, ok: bool, detail: impl Into<String>) {
        self.checks.push(ShapeCheck { name: name.into(), ok, detail: detail.into() });
    }

    fn vanishes(&mut self, name: impl Into<String>, p: &MultiPoly) {
        let ok = p.is_zero();
        let detail = if ok { String::new() } else { format!("residual {p}") };
        self.push(name, ok, detail);
    }
}

/// Conditions shared by every pattern: zero below the diagonal and the
/// expected diagonal entries.
fn triangular_with_diagonal(t: &Matrix<MultiPoly>, diag: &[MultiPoly]) -> ShapeReport {
    let mut rep = ShapeReport::default();
    let n = t.rows();
    let below: Vec<String> = (0..n)
        .flat_map(|i| (0..i).map(move |j| (i, j)))
        .filter(|&(i, j)| !t.get(i, j).is_zero())
        .map(|(i, j)| format!("({i},{j})"))
        .collect();
    rep.push("triangular", below.is_empty(), below.join(" "));
    for (i, want) in diag.iter().enumerate() {
        rep.vanishes(format!("diagonal {i}"), &(t.get(i, i) - want));
    }
    rep
}

fn coef(map: &BTreeMap<usize, Rational>, k: usize) -> Rational {
    map.get(&k).cloned().unwrap_or_else(Rational::zero)
}

/// Pattern for the first non-Lie family: diagonal `(a0, a0+a1, 2a0+a1, ..., n a0 + a1)`
/// and the parameter relations tying `a0, a1, a_{n-1}, b_{n-1}` to `alpha, theta`.
pub fn shape_first_family(space: &DerivationSpace, n: usize, alpha: &BTreeMap<usize, Rational>, theta: &Rational) -> ShapeReport {
    let t = space.template();
    let a0 = t.get(0, 0).clone();
    let a1 = t.get(0, 1).clone();
    let mut diag = vec![a0.clone()];
    for i in 1..=n {
        diag.push(&a0.scale(&int(i as i64)) + &a1);
    }
    let mut rep = triangular_with_diagonal(t, &diag);
    let an = coef(alpha, n);
    rep.vanishes("a0(theta - alpha_n) = 0", &a0.scale(&(theta - &an)));
    let lhs = a1.scale(&(&an - theta));
    rep.vanishes("a1(alpha_n - theta) = a_{n-1} - b_{n-1}", &(&lhs - &(t.get(0, n - 1) - t.get(1, n - 1))));
    rep.vanishes("alpha_3(a1 - a0) = 0", &(&a1 - &a0).scale(&coef(alpha, 3)));
    for k in 4..=n {
        let lhs = (&a1 - &a0.scale(&int(k as i64 - 2))).scale(&coef(alpha, k));
        let sum: Rational = (4..=k).map(|j| coef(alpha, j - 1) * coef(alpha, k - j + 3)).sum();
        let rhs = a1.scale(&(frac(k as i64, 2) * sum));
        rep.vanishes(format!("alpha_{k} recursion"), &(&lhs - &rhs));
    }
    rep
}

/// Pattern for the second non-Lie family: diagonal `(a0, b1, 2a0, ..., n a0)`,
/// the sparse second row, and the relations in `beta, gamma`.
pub fn shape_second_family(space: &DerivationSpace, n: usize, beta: &BTreeMap<usize, Rational>, gamma: &Rational) -> ShapeReport {
    let t = space.template();
    let a0 = t.get(0, 0).clone();
    let a1 = t.get(0, 1).clone();
    let b1 = t.get(1, 1).clone();
    let mut diag = vec![a0.clone(), b1.clone()];
    for i in 2..=n {
        diag.push(a0.scale(&int(i as i64)));
    }
    let mut rep = triangular_with_diagonal(t, &diag);
    for j in 2..n - 1 {
        rep.vanishes(format!("second row entry {j}"), t.get(1, j));
    }
    rep.vanishes("second row entry n-1 = -a1 gamma", &(t.get(1, n - 1) + &a1.scale(gamma)));
    rep.vanishes("gamma(2b1 - n a0) = 0", &(&b1.scale(&int(2)) - &a0.scale(&int(n as i64))).scale(gamma));
    rep.vanishes("beta_3(b1 - 2a0) = 0", &(&b1 - &a0.scale(&int(2))).scale(&coef(beta, 3)));
    for k in 4..=n {
        let lhs = (&b1 - &a0.scale(&int(k as i64 - 1))).scale(&coef(beta, k));
        let sum: Rational = (4..=k).map(|j| coef(beta, j - 1) * coef(beta, k - j + 3)).sum();
        let mut rhs = a1.scale(&(frac(k as i64, 2) * sum));
        if k == n {
            rhs = &rhs - &a1.scale(gamma);
        }
        rep.vanishes(format!("beta_{k} recursion"), &(&lhs - &rhs));
    }
    rep
}

/// Pattern for the third non-Lie family with `alpha` the coefficient of the
/// `[e_i, e_{n-i}]` terms.
pub fn shape_third_family(space: &DerivationSpace, n: usize, thetas: [&Rational; 3], alpha: &Rational) -> ShapeReport {
    let t = space.template();
    let a0 = t.get(0, 0).clone();
    let a1 = t.get(0, 1).clone();
    let b1 = t.get(1, 1).clone();
    let mut diag = vec![a0.clone(), b1.clone()];
    for i in 2..n {
        diag.push(&a0.scale(&int(i as i64 - 1)) + &b1);
    }
    diag.push(&(&a0.scale(&int(n as i64 - 1)) + &b1) + &a1.scale(alpha));
    let mut rep = triangular_with_diagonal(t, &diag);
    let [t1, t2, t3] = thetas;
    rep.vanishes(
        "theta1((n-3)a0 + b1) = a1 theta2",
        &(&(&a0.scale(&int(n as i64 - 3)) + &b1).scale(t1) - &a1.scale(t2)),
    );
    rep.vanishes("2 a1 theta3 = (n-2) a0 theta2", &(&a1.scale(&(int(2) * t3)) - &a0.scale(&(int(n as i64 - 2) * t2))));
    rep.vanishes("theta3((n-1)a0 - b1) = 0", &(&a0.scale(&int(n as i64 - 1)) - &b1).scale(t3));
    rep
}

/// Pattern for the Lie family with `n-2` model products: diagonal
/// `(a0, (1+r)a0, ..., (n+r)a0)`.
pub fn shape_lie_family_a(space: &DerivationSpace, n: usize, r: usize) -> ShapeReport {
    let t = space.template();
    let a0 = t.get(0, 0).clone();
    let mut diag = vec![a0.clone()];
    for i in 1..=n {
        diag.push(a0.scale(&int((i + r) as i64)));
    }
    triangular_with_diagonal(t, &diag)
}

/// Pattern for the odd-dimensional Lie family: no `e_1` term in `d(e_0)` and
/// diagonal `(a0, (1+r)a0, ..., (n-1+r)a0, (n+2r)a0)`.
pub fn shape_lie_family_b(space: &DerivationSpace, n: usize, r: usize) -> ShapeReport {
    let t = space.template();
    let a0 = t.get(0, 0).clone();
    let mut diag = vec![a0.clone()];
    for i in 1..n {
        diag.push(a0.scale(&int((i + r) as i64)));
    }
    diag.push(a0.scale(&int((n + 2 * r) as i64)));
    let mut rep = triangular_with_diagonal(t, &diag);
    rep.vanishes("no e_1 term in d(e_0)", t.get(0, 1));
    rep
}
