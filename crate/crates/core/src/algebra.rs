//! Finite-dimensional algebras given by structure constants `c_{ij}^k`,
//! with `[e_i, e_j] = sum_k c_{ij}^k e_k`.

use std::fmt;

use num_traits::{One, Zero};
use thiserror::Error;

use crate::arith::matrix::Matrix;
use crate::arith::rational::{format_rational, Rational};
use crate::arith::ArithError;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AlgebraError {
    #[error("vector length {got} does not match algebra dimension {dim}")]
    LengthMismatch { dim: usize, got: usize },
    #[error("basis index {index} out of range for dimension {dim}")]
    IndexOutOfRange { dim: usize, index: usize },
    #[error("dimension must be at least 1")]
    EmptyBasis,
    #[error("label count {got} does not match dimension {dim}")]
    LabelCount { dim: usize, got: usize },
    #[error("basis subset is not closed under the product (e.g. [{0},{1}] leaves it)")]
    NotClosed(String, String),
    #[error(transparent)]
    Arith(#[from] ArithError),
}

/// Provenance of an algebra built by a named constructor.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FamilyMeta {
    pub family: String,
    pub params: Vec<(String, Rational)>,
}

/// Linear subspace stored by a reduced row echelon basis, so equal subspaces
/// have identical representations.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Subspace {
    ambient: usize,
    basis: Vec<Vec<Rational>>,
}

impl Subspace {
    pub fn span<I: IntoIterator<Item = Vec<Rational>>>(ambient: usize, vectors: I) -> Self {
        let rows: Vec<Vec<Rational>> = vectors.into_iter().filter(|v| v.iter().any(|x| !x.is_zero())).collect();
        if rows.is_empty() {
            return Subspace::zero(ambient);
        }
        let (r, pivots) = Matrix::from_rows(rows).expect("vectors share the ambient dimension").rref();
        Subspace { ambient, basis: (0..pivots.len()).map(|i| r.row(i).to_vec()).collect() }
    }

    pub fn zero(ambient: usize) -> Self {
        Subspace { ambient, basis: Vec::new() }
    }

    pub fn whole(ambient: usize) -> Self {
        Subspace::coordinate(ambient, 0..ambient)
    }

    /// Span of the selected standard basis vectors.
    pub fn coordinate<I: IntoIterator<Item = usize>>(ambient: usize, indices: I) -> Self {
        Subspace::span(ambient, indices.into_iter().map(|i| unit(ambient, i)))
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn basis(&self) -> &[Vec<Rational>] {
        &self.basis
    }

    pub fn is_zero(&self) -> bool {
        self.basis.is_empty()
    }

    pub fn contains(&self, v: &[Rational]) -> bool {
        if v.len() != self.ambient {
            return false;
        }
        let mut rest = v.to_vec();
        for row in &self.basis {
            let p = row.iter().position(|x| !x.is_zero()).expect("basis rows are nonzero");
            if rest[p].is_zero() {
                continue;
            }
            let f = rest[p].clone();
            for (a, b) in rest.iter_mut().zip(row) {
                if !b.is_zero() {
                    *a -= &f * b;
                }
            }
        }
        rest.iter().all(Zero::is_zero)
    }

    pub fn contains_subspace(&self, other: &Subspace) -> bool {
        other.basis.iter().all(|v| self.contains(v))
    }
}

pub(crate) fn unit(d: usize, i: usize) -> Vec<Rational> {
    let mut v = vec![Rational::zero(); d];
    v[i] = Rational::one();
    v
}

/// Outcome of [`Algebra::nilradical_equals`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum NilradicalVerdict {
    Nilradical,
    NotCodimensionOne { codim: usize },
    NotAnIdeal,
    IdealNotNilpotent,
    AmbientNilpotent,
}

impl NilradicalVerdict {
    pub fn holds(&self) -> bool {
        matches!(self, NilradicalVerdict::Nilradical)
    }
}

/// One basis triple where the Leibniz identity fails.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LeibnizFailure {
    pub triple: (usize, usize, usize),
    pub defect: Vec<Rational>,
}

#[derive(Clone, PartialEq, Eq)]
pub struct Algebra {
    dim: usize,
    labels: Vec<String>,
    tensor: Vec<Rational>,
    meta: Option<FamilyMeta>,
}

impl Algebra {
    /// The zero product on `dim` basis vectors labelled `e_0, e_1, ...`.
    pub fn abelian(dim: usize) -> Result<Self, AlgebraError> {
        if dim == 0 {
            return Err(AlgebraError::EmptyBasis);
        }
        Ok(Algebra {
            dim,
            labels: (0..dim).map(|i| format!("e_{i}")).collect(),
            tensor: vec![Rational::zero(); dim * dim * dim],
            meta: None,
        })
    }

    /// `n + 1` basis vectors `e_0..e_n` followed by `x`.
    pub fn extended(nil_dim: usize) -> Result<Self, AlgebraError> {
        let mut a = Algebra::abelian(nil_dim + 1)?;
        a.labels[nil_dim] = "x".into();
        Ok(a)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn set_labels(&mut self, labels: Vec<String>) -> Result<(), AlgebraError> {
        if labels.len() != self.dim {
            return Err(AlgebraError::LabelCount { dim: self.dim, got: labels.len() });
        }
        self.labels = labels;
        Ok(())
    }

    pub fn meta(&self) -> Option<&FamilyMeta> {
        self.meta.as_ref()
    }

    pub fn set_meta(&mut self, meta: Option<FamilyMeta>) {
        self.meta = meta;
    }

    fn idx(&self, i: usize, j: usize, k: usize) -> usize {
        (i * self.dim + j) * self.dim + k
    }

    pub fn get(&self, i: usize, j: usize, k: usize) -> &Rational {
        &self.tensor[self.idx(i, j, k)]
    }

    pub fn set(&mut self, i: usize, j: usize, k: usize, c: Rational) {
        let at = self.idx(i, j, k);
        self.tensor[at] = c;
    }

    pub fn add(&mut self, i: usize, j: usize, k: usize, c: &Rational) {
        let at = self.idx(i, j, k);
        self.tensor[at] += c;
    }

    /// Coordinates of `[e_i, e_j]`.
    pub fn product(&self, i: usize, j: usize) -> &[Rational] {
        let s = self.idx(i, j, 0);
        &self.tensor[s..s + self.dim]
    }

    /// Nonzero structure constants in lexicographic `(i, j, k)` order.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, usize, &Rational)> + '_ {
        let d = self.dim;
        self.tensor
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(move |(t, c)| (t / (d * d), (t / d) % d, t % d, c))
    }

    pub fn same_table(&self, other: &Algebra) -> bool {
        self.dim == other.dim && self.tensor == other.tensor
    }

    fn check_len(&self, v: &[Rational]) -> Result<(), AlgebraError> {
        if v.len() == self.dim {
            Ok(())
        } else {
            Err(AlgebraError::LengthMismatch { dim: self.dim, got: v.len() })
        }
    }

    pub fn bracket(&self, u: &[Rational], v: &[Rational]) -> Result<Vec<Rational>, AlgebraError> {
        self.check_len(u)?;
        self.check_len(v)?;
        Ok(self.bracket_raw(u, v))
    }

    pub(crate) fn bracket_raw(&self, u: &[Rational], v: &[Rational]) -> Vec<Rational> {
        let mut out = vec![Rational::zero(); self.dim];
        for (i, a) in u.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in v.iter().enumerate() {
                if b.is_zero() {
                    continue;
                }
                let ab = a * b;
                for (o, c) in out.iter_mut().zip(self.product(i, j)) {
                    if !c.is_zero() {
                        *o += &ab * c;
                    }
                }
            }
        }
        out
    }

    /// `[u, e_j]`.
    fn bracket_right_basis(&self, u: &[Rational], j: usize) -> Vec<Rational> {
        let mut out = vec![Rational::zero(); self.dim];
        for (i, a) in u.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (o, c) in out.iter_mut().zip(self.product(i, j)) {
                if !c.is_zero() {
                    *o += a * c;
                }
            }
        }
        out
    }

    /// `[e_i, v]`.
    fn bracket_left_basis(&self, i: usize, v: &[Rational]) -> Vec<Rational> {
        let mut out = vec![Rational::zero(); self.dim];
        for (j, b) in v.iter().enumerate() {
            if b.is_zero() {
                continue;
            }
            for (o, c) in out.iter_mut().zip(self.product(i, j)) {
                if !c.is_zero() {
                    *o += b * c;
                }
            }
        }
        out
    }

    /// Evaluates `[[x,y],z] - [[x,z],y] - [x,[y,z]]` on every basis triple
    /// in lexicographic order and returns all nonzero defects.
    pub fn leibniz_check(&self) -> Vec<LeibnizFailure> {
        let d = self.dim;
        let mut failures = Vec::new();
        for x in 0..d {
            for y in 0..d {
                let xy = self.product(x, y);
                for z in 0..d {
                    let lhs = self.bracket_right_basis(xy, z);
                    let xz = self.bracket_right_basis(self.product(x, z), y);
                    let yz = self.bracket_left_basis(x, self.product(y, z));
                    let defect: Vec<Rational> =
                        lhs.iter().zip(&xz).zip(&yz).map(|((a, b), c)| a - b - c).collect();
                    if defect.iter().any(|c| !c.is_zero()) {
                        failures.push(LeibnizFailure { triple: (x, y, z), defect });
                    }
                }
            }
        }
        failures
    }

    pub fn is_leibniz(&self) -> bool {
        self.leibniz_check().is_empty()
    }

    /// Basis triples violating `[[x,y],z] + [[y,z],x] + [[z,x],y] = 0`.
    pub fn jacobi_check(&self) -> Vec<(usize, usize, usize)> {
        let d = self.dim;
        let mut bad = Vec::new();
        for x in 0..d {
            for y in 0..d {
                for z in 0..d {
                    let a = self.bracket_right_basis(self.product(x, y), z);
                    let b = self.bracket_right_basis(self.product(y, z), x);
                    let c = self.bracket_right_basis(self.product(z, x), y);
                    if a.iter().zip(&b).zip(&c).any(|((p, q), r)| !(p + q + r).is_zero()) {
                        bad.push((x, y, z));
                    }
                }
            }
        }
        bad
    }

    /// Entry-wise antisymmetry `c_{ij}^k = -c_{ji}^k`; combined with the
    /// Leibniz identity this is exactly the Lie condition.
    pub fn is_lie(&self) -> bool {
        let d = self.dim;
        (0..d).all(|i| {
            (i..d).all(|j| (0..d).all(|k| (self.get(i, j, k) + self.get(j, i, k)).is_zero()))
        })
    }

    fn series(&self, derived: bool) -> Vec<Subspace> {
        let d = self.dim;
        let mut out = vec![Subspace::whole(d)];
        loop {
            let cur = out.last().expect("series is never empty");
            if cur.is_zero() {
                break;
            }
            let mut gens = Vec::new();
            for u in cur.basis() {
                if derived {
                    for v in cur.basis() {
                        gens.push(self.bracket_raw(u, v));
                    }
                } else {
                    for j in 0..d {
                        gens.push(self.bracket_right_basis(u, j));
                    }
                }
            }
            let next = Subspace::span(d, gens);
            if &next == cur {
                break;
            }
            out.push(next);
        }
        out
    }

    /// `L^1 = L`, `L^{k+1} = [L^k, L]`, stopping at zero or when two
    /// consecutive terms coincide.
    pub fn lower_central_series(&self) -> Vec<Subspace> {
        self.series(false)
    }

    pub fn derived_series(&self) -> Vec<Subspace> {
        self.series(true)
    }

    pub fn is_nilpotent(&self) -> bool {
        self.lower_central_series().last().is_some_and(Subspace::is_zero)
    }

    /// Smallest `k` with `L^k = 0`.
    pub fn nilpotency_index(&self) -> Option<usize> {
        let s = self.lower_central_series();
        s.last().is_some_and(Subspace::is_zero).then_some(s.len())
    }

    pub fn is_solvable(&self) -> bool {
        self.derived_series().last().is_some_and(Subspace::is_zero)
    }

    /// `dim L^i = dim - i` for `2 <= i <= dim`.
    pub fn is_filiform(&self) -> bool {
        let dims: Vec<usize> = self.lower_central_series().iter().map(Subspace::dim).collect();
        (2..=self.dim).all(|i| dims.get(i - 1) == Some(&(self.dim - i)))
    }

    /// `{v : [y, v] = 0 for all y}`.
    pub fn right_annihilator(&self) -> Subspace {
        let d = self.dim;
        let mut m = Matrix::zeros(d * d, d);
        for i in 0..d {
            for j in 0..d {
                for k in 0..d {
                    m.set(i * d + k, j, self.get(i, j, k).clone());
                }
            }
        }
        Subspace::span(d, m.nullspace())
    }

    pub fn is_ideal(&self, s: &Subspace) -> bool {
        let d = self.dim;
        s.basis().iter().all(|b| {
            (0..d).all(|i| s.contains(&self.bracket_right_basis(b, i)) && s.contains(&self.bracket_left_basis(i, b)))
        })
    }

    /// Restriction to the span of the given basis vectors.
    pub fn subalgebra(&self, indices: &[usize]) -> Result<Algebra, AlgebraError> {
        for &i in indices {
            if i >= self.dim {
                return Err(AlgebraError::IndexOutOfRange { dim: self.dim, index: i });
            }
        }
        let mut sub = Algebra::abelian(indices.len())?;
        for (a, &i) in indices.iter().enumerate() {
            for (b, &j) in indices.iter().enumerate() {
                for (k, c) in self.product(i, j).iter().enumerate() {
                    if c.is_zero() {
                        continue;
                    }
                    match indices.iter().position(|&t| t == k) {
                        Some(kk) => sub.set(a, b, kk, c.clone()),
                        None => return Err(AlgebraError::NotClosed(self.labels[i].clone(), self.labels[j].clone())),
                    }
                }
            }
        }
        sub.labels = indices.iter().map(|&i| self.labels[i].clone()).collect();
        Ok(sub)
    }

    /// Decides whether the span of `indices` is the nilradical, for a
    /// codimension-one candidate: an ideal that is nilpotent inside a
    /// non-nilpotent algebra is maximal among nilpotent ideals.
    pub fn nilradical_equals(&self, indices: &[usize]) -> Result<NilradicalVerdict, AlgebraError> {
        for &i in indices {
            if i >= self.dim {
                return Err(AlgebraError::IndexOutOfRange { dim: self.dim, index: i });
            }
        }
        let s = Subspace::coordinate(self.dim, indices.iter().copied());
        let codim = self.dim - s.dim();
        if codim != 1 {
            return Ok(NilradicalVerdict::NotCodimensionOne { codim });
        }
        if !self.is_ideal(&s) {
            return Ok(NilradicalVerdict::NotAnIdeal);
        }
        if !self.subalgebra(indices)?.is_nilpotent() {
            return Ok(NilradicalVerdict::IdealNotNilpotent);
        }
        if self.is_nilpotent() {
            return Ok(NilradicalVerdict::AmbientNilpotent);
        }
        Ok(NilradicalVerdict::Nilradical)
    }

    /// Matrix of `v -> [v, x]`, one row per basis image.
    pub fn right_multiplication(&self, x: &[Rational]) -> Result<Matrix, AlgebraError> {
        self.check_len(x)?;
        let rows = (0..self.dim).map(|i| self.bracket_left_basis(i, x)).collect();
        Ok(Matrix::from_rows(rows)?)
    }

    /// Re-expresses the product in the basis given by the rows of `t`:
    /// `c'_{ab}^l = sum t_{ai} t_{bj} c_{ij}^k (t^{-1})_{kl}`.
    pub fn apply_basis_change(&self, t: &Matrix) -> Result<Algebra, AlgebraError> {
        let d = self.dim;
        if t.rows() != d || t.cols() != d {
            return Err(ArithError::DimensionMismatch(format!("basis change is {}x{}, algebra has dimension {d}", t.rows(), t.cols())).into());
        }
        let inv = t.inverse()?;
        // first index
        let mut p = vec![Rational::zero(); d * d * d];
        for a in 0..d {
            for i in 0..d {
                let tai = t.get(a, i);
                if tai.is_zero() {
                    continue;
                }
                for j in 0..d {
                    for k in 0..d {
                        let c = self.get(i, j, k);
                        if !c.is_zero() {
                            p[(a * d + j) * d + k] += tai * c;
                        }
                    }
                }
            }
        }
        // second index
        let mut q = vec![Rational::zero(); d * d * d];
        for b in 0..d {
            for j in 0..d {
                let tbj = t.get(b, j);
                if tbj.is_zero() {
                    continue;
                }
                for a in 0..d {
                    for k in 0..d {
                        let c = &p[(a * d + j) * d + k];
                        if !c.is_zero() {
                            q[(a * d + b) * d + k] += tbj * c;
                        }
                    }
                }
            }
        }
        let mut out = Algebra { dim: d, labels: self.labels.clone(), tensor: vec![Rational::zero(); d * d * d], meta: None };
        for ab in 0..d * d {
            for k in 0..d {
                let c = &q[ab * d + k];
                if c.is_zero() {
                    continue;
                }
                for l in 0..d {
                    let w = inv.get(k, l);
                    if !w.is_zero() {
                        out.tensor[ab * d + l] += c * w;
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn format_vector(&self, v: &[Rational]) -> String {
        format_combination(&self.labels, v)
    }
}

pub fn format_combination(labels: &[String], v: &[Rational]) -> String {
    let mut s = String::new();
    for (c, l) in v.iter().zip(labels) {
        if c.is_zero() {
            continue;
        }
        let neg = c < &Rational::zero();
        let abs = if neg { -c.clone() } else { c.clone() };
        if s.is_empty() {
            if neg {
                s.push('-');
            }
        } else {
            s.push_str(if neg { " - " } else { " + " });
        }
        if !abs.is_one() {
            s.push_str(&format_rational(&abs));
            s.push('*');
        }
        s.push_str(l);
    }
    if s.is_empty() {
        s.push('0');
    }
    s
}

impl fmt::Display for Algebra {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.dim {
            for j in 0..self.dim {
                let p = self.product(i, j);
                if p.iter().any(|c| !c.is_zero()) {
                    writeln!(f, "[{},{}] = {}", self.labels[i], self.labels[j], self.format_vector(p))?;
                }
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Algebra {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Algebra(dim={}", self.dim)?;
        if let Some(m) = &self.meta {
            write!(f, ", family={}", m.family)?;
        }
        writeln!(f, ")")?;
        fmt::Display::fmt(self, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rational::int;

    /// `[e_0, e_i] = e_{i+1}` with antisymmetric completion.
    fn model(n: usize) -> Algebra {
        let mut a = Algebra::abelian(n + 1).unwrap();
        for i in 1..n {
            a.set(0, i, i + 1, int(1));
            a.set(i, 0, i + 1, int(-1));
        }
        a
    }

    #[test]
    fn bracket_basics() {
        let a = model(4);
        assert_eq!(a.bracket(&unit(5, 0), &unit(5, 3)).unwrap(), unit(5, 4));
        assert_eq!(a.bracket(&vec![int(0); 5], &unit(5, 3)).unwrap(), vec![int(0); 5]);
        assert!(a.bracket(&unit(4, 0), &unit(5, 3)).is_err());
    }

    #[test]
    fn model_series() {
        let a = model(4);
        let dims: Vec<usize> = a.lower_central_series().iter().map(Subspace::dim).collect();
        assert_eq!(dims, vec![5, 3, 2, 1, 0]);
        assert!(a.is_filiform());
        assert_eq!(a.nilpotency_index(), Some(5));
        assert!(a.is_lie() && a.is_leibniz() && a.jacobi_check().is_empty());
    }

    #[test]
    fn abelian_facts() {
        let a = Algebra::abelian(3).unwrap();
        let dims: Vec<usize> = a.lower_central_series().iter().map(Subspace::dim).collect();
        assert_eq!(dims, vec![3, 0]);
        assert_eq!(a.nilpotency_index(), Some(2));
        assert_eq!(a.right_annihilator().dim(), 3);
        assert!(a.is_leibniz());
        assert_eq!(a.nilradical_equals(&[0, 1]).unwrap(), NilradicalVerdict::AmbientNilpotent);
    }

    #[test]
    fn non_nilpotent_series_stabilizes() {
        // [e_0, x] = e_0, [x, e_0] = -e_0
        let mut a = Algebra::extended(1).unwrap();
        a.set(0, 1, 0, int(1));
        a.set(1, 0, 0, int(-1));
        let dims: Vec<usize> = a.lower_central_series().iter().map(Subspace::dim).collect();
        assert_eq!(dims, vec![2, 1]);
        assert!(!a.is_nilpotent() && a.is_solvable());
        assert_eq!(a.nilradical_equals(&[0]).unwrap(), NilradicalVerdict::Nilradical);
    }

    #[test]
    fn basis_change_roundtrip() {
        let a = model(4);
        assert!(a.apply_basis_change(&Matrix::identity(5)).unwrap().same_table(&a));
        let mut t = Matrix::identity(5);
        t.set(4, 4, int(2));
        let b = a.apply_basis_change(&t).unwrap();
        assert_eq!(b.get(0, 3, 4), &crate::arith::rational::frac(1, 2));
        assert!(b.is_leibniz());
        let mut s = Matrix::identity(5);
        s.set(2, 2, int(0));
        assert!(a.apply_basis_change(&s).is_err());
    }

    #[test]
    fn leibniz_failures_are_listed() {
        let mut a = Algebra::abelian(3).unwrap();
        a.set(0, 0, 1, int(1));
        a.set(1, 0, 2, int(1));
        a.set(0, 1, 2, int(1));
        let f = a.leibniz_check();
        assert!(!f.is_empty());
        assert!(f.windows(2).all(|w| w[0].triple < w[1].triple));
    }

    #[test]
    fn subspace_canonical() {
        let s1 = Subspace::span(3, vec![vec![int(1), int(1), int(0)], vec![int(0), int(1), int(0)]]);
        let s2 = Subspace::coordinate(3, [1, 0]);
        assert_eq!(s1, s2);
        assert!(s1.contains(&[int(3), int(-2), int(0)]));
        assert!(!s1.contains(&unit(3, 2)));
    }
}
