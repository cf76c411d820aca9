//! Structure constants with polynomial entries.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::Zero;

use crate::algebra::Algebra;
use crate::arith::poly::{MultiPoly, Var};
use crate::arith::rational::Rational;
use crate::arith::ArithError;

/// Where a scalar Leibniz equation came from.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Origin {
    /// Component `k` of the identity on the basis triple.
    Triple { x: usize, y: usize, z: usize, k: usize },
    /// Component `k` of `[e_u, w]` where `w` is a square or symmetrized product.
    Annihilator { u: usize, left: usize, right: usize, k: usize },
    /// A normalization supplied by the caller.
    Hypothesis(String),
    /// An extra equation added after a first elimination.
    Extra(String),
}

impl Origin {
    /// Human-readable description using basis labels.
    pub fn describe(&self, labels: &[String]) -> String {
        let l = |i: &usize| labels.get(*i).cloned().unwrap_or_else(|| format!("#{i}"));
        match self {
            Origin::Triple { x, y, z, k } => format!("Leibniz identity on ({},{},{}) at {}", l(x), l(y), l(z), l(k)),
            Origin::Annihilator { u, left, right, k } if left == right => {
                format!("[{},[{},{}]] = 0 at {}", l(u), l(left), l(left), l(k))
            }
            Origin::Annihilator { u, left, right, k } => {
                format!("[{u},[{a},{b}]+[{b},{a}]] = 0 at {k}", u = l(u), a = l(left), b = l(right), k = l(k))
            }
            Origin::Hypothesis(h) => format!("hypothesis {h}"),
            Origin::Extra(e) => format!("assumption {e}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymAlgebra {
    dim: usize,
    labels: Vec<String>,
    tensor: Vec<MultiPoly>,
}

impl SymAlgebra {
    pub fn zero(dim: usize, labels: Vec<String>) -> Self {
        assert_eq!(labels.len(), dim);
        SymAlgebra { dim, labels, tensor: vec![MultiPoly::zero(); dim * dim * dim] }
    }

    pub fn from_algebra(a: &Algebra) -> Self {
        let mut s = SymAlgebra::zero(a.dim(), a.labels().to_vec());
        for (i, j, k, c) in a.entries() {
            s.set(i, j, k, MultiPoly::constant(c.clone()));
        }
        s
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    fn idx(&self, i: usize, j: usize, k: usize) -> usize {
        (i * self.dim + j) * self.dim + k
    }

    pub fn get(&self, i: usize, j: usize, k: usize) -> &MultiPoly {
        &self.tensor[self.idx(i, j, k)]
    }

    pub fn set(&mut self, i: usize, j: usize, k: usize, p: MultiPoly) {
        let at = self.idx(i, j, k);
        self.tensor[at] = p;
    }

    pub fn add(&mut self, i: usize, j: usize, k: usize, p: &MultiPoly) {
        let at = self.idx(i, j, k);
        self.tensor[at] = &self.tensor[at] + p;
    }

    pub fn product(&self, i: usize, j: usize) -> &[MultiPoly] {
        let s = self.idx(i, j, 0);
        &self.tensor[s..s + self.dim]
    }

    pub fn vars(&self) -> BTreeSet<Var> {
        self.tensor.iter().flat_map(MultiPoly::vars).collect()
    }

    /// `[u, e_j]` for a polynomial vector `u`.
    pub fn right_basis(&self, u: &[MultiPoly], j: usize) -> Vec<MultiPoly> {
        let mut out = vec![MultiPoly::zero(); self.dim];
        for (i, a) in u.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (o, c) in out.iter_mut().zip(self.product(i, j)) {
                if !c.is_zero() {
                    *o = &*o + &(a * c);
                }
            }
        }
        out
    }

    /// `[e_i, v]` for a polynomial vector `v`.
    pub fn left_basis(&self, i: usize, v: &[MultiPoly]) -> Vec<MultiPoly> {
        let mut out = vec![MultiPoly::zero(); self.dim];
        for (j, b) in v.iter().enumerate() {
            if b.is_zero() {
                continue;
            }
            for (o, c) in out.iter_mut().zip(self.product(i, j)) {
                if !c.is_zero() {
                    *o = &*o + &(b * c);
                }
            }
        }
        out
    }

    /// Scalar components of the Leibniz identity on every basis triple, in
    /// lexicographic `(x, y, z, k)` order, zero components omitted.
    pub fn leibniz_equations(&self) -> Vec<(Origin, MultiPoly)> {
        let d = self.dim;
        let mut out = Vec::new();
        for x in 0..d {
            for y in 0..d {
                for z in 0..d {
                    let lhs = self.right_basis(self.product(x, y), z);
                    let a = self.right_basis(self.product(x, z), y);
                    let b = self.left_basis(x, self.product(y, z));
                    for k in 0..d {
                        let p = &(&lhs[k] - &a[k]) - &b[k];
                        if !p.is_zero() {
                            out.push((Origin::Triple { x, y, z, k }, p));
                        }
                    }
                }
            }
        }
        out
    }

    /// Components of `[e_u, [e_i,e_i]]` and `[e_u, [e_i,e_j] + [e_j,e_i]]`.
    pub fn annihilator_equations(&self) -> Vec<(Origin, MultiPoly)> {
        let d = self.dim;
        let mut out = Vec::new();
        for i in 0..d {
            for j in i..d {
                let w: Vec<MultiPoly> = if i == j {
                    self.product(i, i).to_vec()
                } else {
                    self.product(i, j).iter().zip(self.product(j, i)).map(|(a, b)| a + b).collect()
                };
                if w.iter().all(Zero::is_zero) {
                    continue;
                }
                for u in 0..d {
                    for (k, p) in self.left_basis(u, &w).into_iter().enumerate() {
                        if !p.is_zero() {
                            out.push((Origin::Annihilator { u, left: i, right: j, k }, p));
                        }
                    }
                }
            }
        }
        out
    }

    pub fn substitute(&self, v: &Var, value: &MultiPoly) -> SymAlgebra {
        SymAlgebra {
            dim: self.dim,
            labels: self.labels.clone(),
            tensor: self.tensor.iter().map(|p| p.substitute(v, value)).collect(),
        }
    }

    pub fn substitute_values(&self, env: &BTreeMap<Var, Rational>) -> SymAlgebra {
        SymAlgebra {
            dim: self.dim,
            labels: self.labels.clone(),
            tensor: self.tensor.iter().map(|p| p.substitute_values(env)).collect(),
        }
    }

    /// Evaluates every entry; fails if a variable is left unbound.
    pub fn instantiate(&self, env: &BTreeMap<Var, Rational>) -> Result<Algebra, ArithError> {
        let mut a = Algebra::abelian(self.dim).expect("dimension is positive");
        a.set_labels(self.labels.clone()).expect("label count matches");
        for i in 0..self.dim {
            for j in 0..self.dim {
                for k in 0..self.dim {
                    let p = self.get(i, j, k);
                    if !p.is_zero() {
                        a.set(i, j, k, p.eval(env)?);
                    }
                }
            }
        }
        Ok(a)
    }
}
