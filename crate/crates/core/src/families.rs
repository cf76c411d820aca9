//! Constructors for the named filiform and solvable algebras.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_traits::{One, Signed, Zero};
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::{Algebra, FamilyMeta};
use crate::arith::matrix::Matrix;
use crate::arith::poly::{MultiPoly, Var};
use crate::arith::rational::{binomial, format_rational, frac, int, parse_rational, Rational};
use crate::symbolic::SymAlgebra;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum FamilyId {
    F1,
    F2,
    F3,
    F1s,
    F2j,
    F2j1,
    Ln,
    Qn,
    A,
    B,
    L1,
    L2,
    L3,
    SolvA,
    SolvB,
}

impl FamilyId {
    pub const ALL: [FamilyId; 15] = [
        FamilyId::F1,
        FamilyId::F2,
        FamilyId::F3,
        FamilyId::F1s,
        FamilyId::F2j,
        FamilyId::F2j1,
        FamilyId::Ln,
        FamilyId::Qn,
        FamilyId::A,
        FamilyId::B,
        FamilyId::L1,
        FamilyId::L2,
        FamilyId::L3,
        FamilyId::SolvA,
        FamilyId::SolvB,
    ];

    pub fn name(self) -> &'static str {
        match self {
            FamilyId::F1 => "F1",
            FamilyId::F2 => "F2",
            FamilyId::F3 => "F3",
            FamilyId::F1s => "F1s",
            FamilyId::F2j => "F2j",
            FamilyId::F2j1 => "F2j1",
            FamilyId::Ln => "Ln",
            FamilyId::Qn => "Qn",
            FamilyId::A => "A",
            FamilyId::B => "B",
            FamilyId::L1 => "L1",
            FamilyId::L2 => "L2",
            FamilyId::L3 => "L3",
            FamilyId::SolvA => "SolvA",
            FamilyId::SolvB => "SolvB",
        }
    }

    /// Families whose members are Lie algebras.
    pub fn is_lie(self) -> bool {
        matches!(self, FamilyId::Ln | FamilyId::Qn | FamilyId::A | FamilyId::B | FamilyId::SolvA | FamilyId::SolvB)
    }

    /// Solvable non-nilpotent extensions of dimension `n + 2`.
    pub fn is_solvable_extension(self) -> bool {
        matches!(self, FamilyId::L1 | FamilyId::L2 | FamilyId::L3 | FamilyId::SolvA | FamilyId::SolvB)
    }
}

impl fmt::Display for FamilyId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FamilyId {
    type Err = FamilyError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        FamilyId::ALL
            .into_iter()
            .find(|id| id.name().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| FamilyError::UnknownFamily(s.to_string()))
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FamilyError {
    #[error("unknown family `{0}`")]
    UnknownFamily(String),
    #[error("family {family} has no parameter `{name}`")]
    UnknownParam { family: FamilyId, name: String },
    #[error("family {family}: parameter `{name}` is required")]
    MissingParam { family: FamilyId, name: String },
    #[error("family {family}: {rule}")]
    Constraint { family: FamilyId, rule: String },
    #[error("family {family} at n={n} fails the Leibniz identity on ({x},{y},{z}): defect {defect}")]
    NotLeibniz { family: FamilyId, n: usize, x: String, y: String, z: String, defect: String },
    #[error("malformed parameter list: {0}")]
    Syntax(String),
}

/// A family id, the nilradical index `n` (dimension `n + 1`), and named parameters.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FamilySpec {
    pub id: FamilyId,
    pub n: usize,
    pub params: BTreeMap<String, Rational>,
}

impl FamilySpec {
    pub fn new(id: FamilyId, n: usize) -> Self {
        FamilySpec { id, n, params: BTreeMap::new() }
    }

    pub fn with(mut self, name: &str, value: Rational) -> Self {
        self.params.insert(name.to_string(), value);
        self
    }

    pub fn with_int(self, name: &str, value: i64) -> Self {
        self.with(name, int(value))
    }

    /// Parses `k=v,k=v` with exact rational values.
    pub fn parse_params(mut self, text: &str) -> Result<Self, FamilyError> {
        for part in text.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let (k, v) = part.split_once('=').ok_or_else(|| FamilyError::Syntax(part.to_string()))?;
            let v = parse_rational(v).map_err(|_| FamilyError::Syntax(part.to_string()))?;
            self.params.insert(k.trim().to_string(), v);
        }
        Ok(self)
    }

    fn get(&self, name: &str) -> Rational {
        self.params.get(name).cloned().unwrap_or_else(Rational::zero)
    }

    fn required_int(&self, name: &str) -> Result<i64, FamilyError> {
        let v = self
            .params
            .get(name)
            .ok_or_else(|| FamilyError::MissingParam { family: self.id, name: name.to_string() })?;
        self.int_value(name, v)
    }

    fn int_value(&self, name: &str, v: &Rational) -> Result<i64, FamilyError> {
        if !v.is_integer() {
            return self.fail(format!("`{name}` must be an integer"));
        }
        i64::try_from(v.to_integer()).map_err(|_| FamilyError::Constraint { family: self.id, rule: format!("`{name}` out of range") })
    }

    fn fail<T>(&self, rule: impl Into<String>) -> Result<T, FamilyError> {
        Err(FamilyError::Constraint { family: self.id, rule: rule.into() })
    }

    /// Indexed parameters `prefix{k}` for `k` in `lo..=hi`.
    fn indexed(&self, prefix: &str, lo: usize, hi: usize) -> BTreeMap<usize, Rational> {
        (lo..=hi).map(|k| (k, self.get(&format!("{prefix}{k}")))).filter(|(_, v)| !v.is_zero()).collect()
    }
}

/// Parameter names a family accepts at a given `n` (with `r` already known
/// for the Lie families).
fn accepted_params(spec: &FamilySpec) -> Vec<String> {
    let n = spec.n;
    let seq = |p: &str, lo: usize, hi: usize| (lo..=hi).map(move |k| format!("{p}{k}")).collect::<Vec<_>>();
    let r = spec.params.get("r").and_then(|v| usize::try_from(v.to_integer()).ok()).unwrap_or(1);
    match spec.id {
        FamilyId::F1 => [seq("alpha", 3, n), vec!["theta".into()]].concat(),
        FamilyId::F2 => [seq("beta", 3, n), vec!["gamma".into()]].concat(),
        FamilyId::F3 => vec!["theta1".into(), "theta2".into(), "theta3".into(), "alpha".into()],
        FamilyId::F1s => vec!["s".into()],
        FamilyId::F2j => vec!["j".into()],
        FamilyId::F2j1 | FamilyId::L2 => vec!["beta".into()],
        FamilyId::Ln | FamilyId::Qn | FamilyId::L1 => vec![],
        FamilyId::A => [vec!["r".into()], seq("alpha", 1, lie_t(FamilyId::A, n, r))].concat(),
        FamilyId::B => [vec!["r".into()], seq("alpha", 1, lie_t(FamilyId::B, n, r))].concat(),
        FamilyId::L3 => vec!["j0".into()],
        FamilyId::SolvA => [vec!["r".into(), "a1".into()], seq("alpha", 1, lie_t(FamilyId::A, n, r)), seq("b", 2, n)].concat(),
        FamilyId::SolvB => [vec!["r".into()], seq("alpha", 1, lie_t(FamilyId::B, n, r)), seq("b", 2, n - 1)].concat(),
    }
}

/// Number of `alpha` parameters of the Lie families.
pub fn lie_t(id: FamilyId, n: usize, r: usize) -> usize {
    match id {
        FamilyId::A | FamilyId::SolvA => n.saturating_sub(r + 1) / 2,
        _ => n.saturating_sub(r + 2) / 2,
    }
}

/// Catalog entry describing one family.
#[derive(Clone, Debug, Serialize)]
pub struct FamilyTemplate {
    pub id: FamilyId,
    pub summary: &'static str,
    pub params: Vec<&'static str>,
    pub constraints: Vec<&'static str>,
    pub lie: bool,
    pub solvable_extension: bool,
}

pub fn family_catalog() -> Vec<FamilyTemplate> {
    FamilyId::ALL.into_iter().map(template).collect()
}

fn template(id: FamilyId) -> FamilyTemplate {
    let (summary, params, constraints): (&str, Vec<&str>, Vec<&str>) = match id {
        FamilyId::F1 => ("filiform non-Lie Leibniz, first family", vec!["alpha3..alphan", "theta"], vec!["n >= 4"]),
        FamilyId::F2 => ("filiform non-Lie Leibniz, second family", vec!["beta3..betan", "gamma"], vec!["n >= 4"]),
        FamilyId::F3 => (
            "filiform Leibniz, third family (products [e_i,e_j] for i,j >= 1 only through alpha)",
            vec!["theta1", "theta2", "theta3", "alpha"],
            vec!["n >= 4", "alpha in {0,1}", "alpha = 0 for even n"],
        ),
        FamilyId::F1s => ("first family with coefficients forced by a non-nilpotent derivation", vec!["s"], vec!["n >= 4", "3 <= s <= n"]),
        FamilyId::F2j => ("second family with a single unit beta_j", vec!["j"], vec!["n >= 4", "3 <= j <= n"]),
        FamilyId::F2j1 => ("second family with beta_{(n+2)/2} = beta and gamma = 1", vec!["beta"], vec!["n >= 4", "n even"]),
        FamilyId::Ln => ("model filiform Lie algebra", vec![], vec!["n >= 4"]),
        FamilyId::Qn => ("filiform Lie algebra with [e_i,e_{n-i}] = (-1)^i e_n", vec![], vec!["n >= 5", "n odd"]),
        FamilyId::A => (
            "filiform Lie family with graded extra products",
            vec!["r", "alpha1..alphat"],
            vec!["n >= 4", "1 <= r <= n-3", "t = floor((n-r-1)/2)", "some alpha_k != 0", "alpha satisfies the Jacobi identity"],
        ),
        FamilyId::B => (
            "odd-dimensional filiform Lie family",
            vec!["r", "alpha1..alphat"],
            vec!["n >= 5", "n odd", "1 <= r <= n-3", "t = floor((n-r-2)/2)", "some alpha_k != 0", "alpha satisfies the Jacobi identity"],
        ),
        FamilyId::L1 => ("solvable extension of F2 with gamma = 1", vec![], vec!["n >= 5", "n odd"]),
        FamilyId::L2 => ("solvable extension of F2j1", vec!["beta"], vec!["n >= 4", "n even"]),
        FamilyId::L3 => ("solvable extension of F2j with j = j0", vec!["j0"], vec!["n >= 4", "3 <= j0 <= n"]),
        FamilyId::SolvA => (
            "solvable Lie extension of family A",
            vec!["r", "alpha1..alphat", "a1", "b2..bn"],
            vec!["n >= 4", "1 <= r <= n-3", "(a1, b) satisfy the Jacobi identity"],
        ),
        FamilyId::SolvB => (
            "solvable Lie extension of family B",
            vec!["r", "alpha1..alphat", "b2..b(n-1)"],
            vec!["n >= 5", "n odd", "1 <= r <= n-3", "b satisfies the Jacobi identity"],
        ),
    };
    FamilyTemplate { id, summary, params, constraints, lie: id.is_lie(), solvable_extension: id.is_solvable_extension() }
}

/// Builds and validates an algebra. Nilpotent families have basis
/// `e_0..e_n`; extensions append `x`.
pub fn make_family(spec: &FamilySpec) -> Result<Algebra, FamilyError> {
    let n = spec.n;
    let need_n = |min: usize, odd: Option<bool>| -> Result<(), FamilyError> {
        if n < min {
            return spec.fail(format!("n >= {min} required, got {n}"));
        }
        match odd {
            Some(true) if n % 2 == 0 => spec.fail(format!("n must be odd, got {n}")),
            Some(false) if n % 2 == 1 => spec.fail(format!("n must be even, got {n}")),
            _ => Ok(()),
        }
    };
    let mut alg = match spec.id {
        FamilyId::F1 => {
            need_n(4, None)?;
            first_family(n, &spec.indexed("alpha", 3, n), &spec.get("theta"))
        }
        FamilyId::F2 => {
            need_n(4, None)?;
            second_family(n, &spec.indexed("beta", 3, n), &spec.get("gamma"))
        }
        FamilyId::F3 => {
            need_n(4, None)?;
            let alpha = spec.get("alpha");
            if !(alpha.is_zero() || alpha.is_one()) {
                return spec.fail("alpha must be 0 or 1");
            }
            if n % 2 == 0 && !alpha.is_zero() {
                return spec.fail("alpha = 0 for even n");
            }
            third_family(n, [&spec.get("theta1"), &spec.get("theta2"), &spec.get("theta3")], &alpha)
        }
        FamilyId::F1s => {
            need_n(4, None)?;
            let s = spec.required_int("s")?;
            if s < 3 || s > n as i64 {
                return spec.fail(format!("3 <= s <= n required, got s={s}"));
            }
            let alpha = f1s_coefficients(n, s as usize)?;
            let theta = alpha.get(&n).cloned().unwrap_or_else(Rational::zero);
            first_family(n, &alpha, &theta)
        }
        FamilyId::F2j => {
            need_n(4, None)?;
            let j = spec.required_int("j")?;
            if j < 3 || j > n as i64 {
                return spec.fail(format!("3 <= j <= n required, got j={j}"));
            }
            second_family(n, &BTreeMap::from([(j as usize, Rational::one())]), &Rational::zero())
        }
        FamilyId::F2j1 => {
            need_n(4, Some(false))?;
            let mut beta = BTreeMap::new();
            beta.insert((n + 2) / 2, spec.get("beta"));
            second_family(n, &beta, &Rational::one())
        }
        FamilyId::Ln => {
            need_n(4, None)?;
            model_lie(n)
        }
        FamilyId::Qn => {
            need_n(5, Some(true))?;
            q_lie(n)
        }
        FamilyId::A | FamilyId::B => {
            let odd = (spec.id == FamilyId::B).then_some(true);
            need_n(if odd.is_some() { 5 } else { 4 }, odd)?;
            let (r, alpha) = lie_params(spec)?;
            if spec.id == FamilyId::A {
                lie_family_a(n, r, &alpha)
            } else {
                lie_family_b(n, r, &alpha)
            }
        }
        FamilyId::L1 => {
            need_n(5, Some(true))?;
            ext_l1(n)
        }
        FamilyId::L2 => {
            need_n(4, Some(false))?;
            ext_l2(n, &spec.get("beta"))
        }
        FamilyId::L3 => {
            need_n(4, None)?;
            let j0 = spec.required_int("j0")?;
            if j0 < 3 || j0 > n as i64 {
                return spec.fail(format!("3 <= j0 <= n required, got j0={j0}"));
            }
            ext_l3(n, j0 as usize)
        }
        FamilyId::SolvA | FamilyId::SolvB => {
            let odd = (spec.id == FamilyId::SolvB).then_some(true);
            need_n(if odd.is_some() { 5 } else { 4 }, odd)?;
            let (r, alpha) = lie_params(spec)?;
            let variant = if spec.id == FamilyId::SolvA { LieVariant::A } else { LieVariant::B };
            let sym = solvable_lie_table(variant, n, r, &alpha);
            let env: BTreeMap<Var, Rational> =
                sym.vars().into_iter().map(|v| { let val = spec.get(v.name()); (v, val) }).collect();
            sym.instantiate(&env).expect("every parameter is bound")
        }
    };
    let accepted = accepted_params(spec);
    for name in spec.params.keys() {
        if !accepted.contains(name) {
            return Err(FamilyError::UnknownParam { family: spec.id, name: name.clone() });
        }
    }
    if let Some(f) = alg.leibniz_check().into_iter().next() {
        let l = alg.labels();
        return Err(FamilyError::NotLeibniz {
            family: spec.id,
            n,
            x: l[f.triple.0].clone(),
            y: l[f.triple.1].clone(),
            z: l[f.triple.2].clone(),
            defect: alg.format_vector(&f.defect),
        });
    }
    let mut params: Vec<(String, Rational)> = vec![("n".into(), int(n as i64))];
    params.extend(spec.params.iter().map(|(k, v)| (k.clone(), v.clone())));
    alg.set_meta(Some(FamilyMeta { family: spec.id.name().to_string(), params }));
    Ok(alg)
}

fn lie_params(spec: &FamilySpec) -> Result<(usize, Vec<Rational>), FamilyError> {
    let n = spec.n;
    let r = spec.required_int("r")?;
    if r < 1 || r > n as i64 - 3 {
        return spec.fail(format!("1 <= r <= n-3 required, got r={r}"));
    }
    let r = r as usize;
    let t = lie_t(spec.id, n, r);
    let alpha: Vec<Rational> = (1..=t).map(|k| spec.get(&format!("alpha{k}"))).collect();
    if alpha.iter().all(Zero::is_zero) {
        return spec.fail(format!("some alpha_k (1 <= k <= {t}) must be nonzero"));
    }
    Ok((r, alpha))
}

fn nil(n: usize) -> Algebra {
    Algebra::abelian(n + 1).expect("n + 1 > 0")
}

fn ext(n: usize) -> Algebra {
    Algebra::extended(n + 1).expect("n + 2 > 0")
}

fn coef(map: &BTreeMap<usize, Rational>, k: usize) -> Rational {
    map.get(&k).cloned().unwrap_or_else(Rational::zero)
}

fn sign(i: usize) -> Rational {
    if i % 2 == 0 {
        int(1)
    } else {
        int(-1)
    }
}

/// `[e_0,e_0] = e_2`, `[e_i,e_0] = e_{i+1}`, `[e_0,e_1] = sum alpha_k e_k + theta e_n`,
/// `[e_i,e_1] = sum_{k >= i+2} alpha_{k+1-i} e_k`.
pub fn first_family(n: usize, alpha: &BTreeMap<usize, Rational>, theta: &Rational) -> Algebra {
    let mut a = nil(n);
    a.set(0, 0, 2, int(1));
    for i in 1..n {
        a.set(i, 0, i + 1, int(1));
    }
    for k in 3..n {
        a.set(0, 1, k, coef(alpha, k));
    }
    a.add(0, 1, n, theta);
    for i in 1..n - 1 {
        for k in i + 2..=n {
            a.add(i, 1, k, &coef(alpha, k + 1 - i));
        }
    }
    a
}

/// As the first family but `[e_1, e_0] = 0`, and `[e_1, e_1] = gamma e_n`.
pub fn second_family(n: usize, beta: &BTreeMap<usize, Rational>, gamma: &Rational) -> Algebra {
    let mut a = nil(n);
    a.set(0, 0, 2, int(1));
    for i in 2..n {
        a.set(i, 0, i + 1, int(1));
    }
    for k in 3..=n {
        a.set(0, 1, k, coef(beta, k));
    }
    for i in 2..n - 1 {
        for k in i + 2..=n {
            a.add(i, 1, k, &coef(beta, k + 1 - i));
        }
    }
    a.add(1, 1, n, gamma);
    a
}

pub fn third_family(n: usize, thetas: [&Rational; 3], alpha: &Rational) -> Algebra {
    let mut a = nil(n);
    for i in 1..n {
        a.set(i, 0, i + 1, int(1));
    }
    for i in 2..n {
        a.set(0, i, i + 1, int(-1));
    }
    a.add(0, 0, n, thetas[0]);
    a.add(0, 1, 2, &int(-1));
    a.add(0, 1, n, thetas[1]);
    a.add(1, 1, n, thetas[2]);
    for i in 1..n {
        a.add(i, n - i, n, &(alpha * sign(i)));
    }
    a
}

pub fn model_lie(n: usize) -> Algebra {
    let mut a = nil(n);
    for i in 1..n {
        a.set(0, i, i + 1, int(1));
        a.set(i, 0, i + 1, int(-1));
    }
    a
}

pub fn q_lie(n: usize) -> Algebra {
    let mut a = nil(n);
    for i in 1..n - 1 {
        a.set(0, i, i + 1, int(1));
        a.set(i, 0, i + 1, int(-1));
    }
    for i in 1..n {
        a.add(i, n - i, n, &sign(i));
    }
    a
}

/// `sum_{k=i}^{t} (-1)^{k-i} alpha_k C(j-k-1, k-i)`, with `alpha` 1-indexed.
pub fn graded_coefficient(i: usize, j: usize, alpha: &[Rational]) -> Rational {
    let mut c = Rational::zero();
    for k in i..=alpha.len() {
        let a = &alpha[k - 1];
        if a.is_zero() {
            continue;
        }
        c += sign(k - i) * a * binomial(j as i64 - k as i64 - 1, (k - i) as i64);
    }
    c
}

pub fn lie_family_a(n: usize, r: usize, alpha: &[Rational]) -> Algebra {
    let mut a = model_lie(n);
    for i in 1..n - 1 {
        for j in i + 1..n - 1 {
            if i + j + r <= n {
                let c = graded_coefficient(i, j, alpha);
                a.add(i, j, i + j + r, &c);
                a.add(j, i, i + j + r, &-c);
            }
        }
    }
    a
}

pub fn lie_family_b(n: usize, r: usize, alpha: &[Rational]) -> Algebra {
    let mut a = q_lie(n);
    for i in 1..n {
        for j in i + 1..n {
            if i + j + r < n {
                let c = graded_coefficient(i, j, alpha);
                a.add(i, j, i + j + r, &c);
                a.add(j, i, i + j + r, &-c);
            }
        }
    }
    a
}

/// Sets `[e_i, x] = v` and `[x, e_i] = -v`.
fn set_antisym_x(a: &mut Algebra, i: usize, k: usize, v: Rational) {
    let x = a.dim() - 1;
    a.set(x, i, k, -v.clone());
    a.set(i, x, k, v);
}

pub fn ext_l1(n: usize) -> Algebra {
    let mut a = ext(n);
    a.set(0, 0, 2, int(1));
    for i in 2..n {
        a.set(i, 0, i + 1, int(1));
    }
    a.set(1, 1, n, int(1));
    set_antisym_x(&mut a, 0, 0, int(1));
    set_antisym_x(&mut a, 1, 1, frac(n as i64, 2));
    for i in 2..=n {
        a.set(i, n + 1, i, int(i as i64));
    }
    a
}

pub fn ext_l2(n: usize, beta: &Rational) -> Algebra {
    let mut a = ext_l1(n);
    let x = n + 1;
    a.set(0, 1, (n + 2) / 2, beta.clone());
    for i in 2..=n / 2 {
        a.set(i, 1, (n + 2 * i) / 2, beta.clone());
    }
    a.set(x, 1, n / 2, -beta.clone());
    a
}

pub fn ext_l3(n: usize, j0: usize) -> Algebra {
    let mut a = ext(n);
    let x = n + 1;
    a.set(0, 0, 2, int(1));
    a.set(0, 1, j0, int(1));
    for i in 2..n {
        a.set(i, 0, i + 1, int(1));
    }
    for i in 2..=n + 1 - j0 {
        a.set(i, 1, j0 + i - 1, int(1));
    }
    set_antisym_x(&mut a, 0, 0, int(1));
    set_antisym_x(&mut a, 1, 1, int(j0 as i64 - 1));
    a.add(x, 1, j0 - 1, &int(-1));
    for i in 2..=n {
        a.set(i, x, i, int(i as i64));
    }
    a
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum LieVariant {
    A,
    B,
}

impl LieVariant {
    pub fn nilradical_id(self) -> FamilyId {
        match self {
            LieVariant::A => FamilyId::A,
            LieVariant::B => FamilyId::B,
        }
    }

    pub fn extension_id(self) -> FamilyId {
        match self {
            LieVariant::A => FamilyId::SolvA,
            LieVariant::B => FamilyId::SolvB,
        }
    }

    /// Largest index `i` of the `b_i` parameters.
    pub fn last_b(self, n: usize) -> usize {
        match self {
            LieVariant::A => n,
            LieVariant::B => n - 1,
        }
    }

    pub fn nilradical(self, n: usize, r: usize, alpha: &[Rational]) -> Algebra {
        match self {
            LieVariant::A => lie_family_a(n, r, alpha),
            LieVariant::B => lie_family_b(n, r, alpha),
        }
    }

    /// Admissible `r` range accepted by the constructors.
    pub fn r_range(self, n: usize) -> std::ops::RangeInclusive<usize> {
        1..=n.saturating_sub(3)
    }
}

impl FromStr for LieVariant {
    type Err = FamilyError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "A" | "a" | "i" => Ok(LieVariant::A),
            "B" | "b" | "ii" => Ok(LieVariant::B),
            other => Err(FamilyError::Syntax(format!("variant `{other}` (expected A or B)"))),
        }
    }
}

fn b_var(i: usize) -> MultiPoly {
    MultiPoly::var(format!("b{i}").as_str())
}

/// Solvable Lie extension of family A or B with the free parameters
/// (`a1` and `b2..`) kept as indeterminates.
pub fn solvable_lie_table(variant: LieVariant, n: usize, r: usize, alpha: &[Rational]) -> SymAlgebra {
    let base = variant.nilradical(n, r, alpha);
    let mut labels = base.labels().to_vec();
    labels.push("x".into());
    let d = n + 2;
    let x = n + 1;
    let mut s = SymAlgebra::zero(d, labels);
    for (i, j, k, c) in base.entries() {
        s.set(i, j, k, MultiPoly::constant(c.clone()));
    }
    let konst = |k: usize| MultiPoly::constant(int(k as i64));
    let mut rows: Vec<BTreeMap<usize, MultiPoly>> = vec![BTreeMap::new(); n + 1];
    rows[0].insert(0, konst(1));
    match variant {
        LieVariant::A => {
            let a1 = MultiPoly::var("a1");
            rows[0].insert(1, a1.clone());
            rows[1].insert(1, konst(1 + r));
            for i in 2..=n {
                rows[1].insert(i, b_var(i));
            }
            rows[2].insert(2, konst(2 + r));
            for i in 3..=n {
                rows[2].insert(i, b_var(i - 1));
            }
            let t = alpha.len();
            for i in 3..=n {
                rows[i].insert(i, konst(i + r));
                for j in i + 1..=n {
                    rows[i].insert(j, b_var(j - i + 1));
                }
                if i + r <= n {
                    let mut inner = Rational::zero();
                    for k in 2..i {
                        for s_ in 1..=t {
                            inner += sign(s_ - 1) * &alpha[s_ - 1] * binomial(k as i64 - s_ as i64 - 1, s_ as i64 - 1);
                        }
                    }
                    let e = rows[i].entry(i + r).or_default();
                    *e = &*e + &a1.scale(&inner);
                }
            }
        }
        LieVariant::B => {
            rows[1].insert(1, konst(1 + r));
            for i in 2..n {
                rows[1].insert(i, b_var(i));
            }
            for i in 2..n {
                rows[i].insert(i, konst(i + r));
                for j in i + 1..n {
                    rows[i].insert(j, b_var(j - i + 1));
                }
            }
            rows[n].insert(n, konst(n + 2 * r));
        }
    }
    for (i, row) in rows.into_iter().enumerate() {
        for (k, p) in row {
            s.set(x, i, k, -p.clone());
            s.set(i, x, k, p);
        }
    }
    s
}

/// Coefficients of `F1^s` from the compatibility recursion
/// `alpha_k (s - k) = (k/2)(s-2) sum_{j=4}^{k} alpha_{j-1} alpha_{k-j+3}`
/// with `alpha_s = 1` and `alpha_k = 0` below `s`.
pub fn f1s_coefficients(n: usize, s: usize) -> Result<BTreeMap<usize, Rational>, FamilyError> {
    let mut al: BTreeMap<usize, Rational> = BTreeMap::new();
    for k in 3..=n {
        let v = if k < s {
            Rational::zero()
        } else if k == s {
            Rational::one()
        } else {
            let sum: Rational = (4..=k).map(|j| coef(&al, j - 1) * coef(&al, k - j + 3)).sum();
            frac(k as i64, 2) * int(s as i64 - 2) * sum / int(s as i64 - k as i64)
        };
        al.insert(k, v);
    }
    for (&k, v) in &al {
        if !v.is_zero() && (k < s || (k - s) % (s - 2) != 0) {
            return Err(FamilyError::Constraint {
                family: FamilyId::F1s,
                rule: format!("recursion gives alpha_{k} = {} off the residue class of s={s}", format_rational(v)),
            });
        }
    }
    al.retain(|_, v| !v.is_zero());
    Ok(al)
}

/// The closed form read as a Fuss-Catalan number:
/// `alpha_k = (-1)^t C(p m, m) / ((p-1) m + 1)` with `p = s-1`, `m = t+1`,
/// `t = (k-s)/(s-2)`.
pub fn f1s_closed_form(n: usize, s: usize) -> BTreeMap<usize, Rational> {
    let mut out = BTreeMap::new();
    for k in s..=n {
        if (k - s) % (s - 2) != 0 {
            continue;
        }
        let t = (k - s) / (s - 2);
        let p = (s - 1) as i64;
        let m = (t + 1) as i64;
        let v = sign(t) * binomial(p * m, m) / int((p - 1) * m + 1);
        out.insert(k, v);
    }
    out
}

/// Nonzero integer `alpha` vectors in `[-bound, bound]^t` for which family
/// A or B satisfies the Jacobi identity, in lexicographic order.
pub fn lie_alpha_candidates(variant: LieVariant, n: usize, r: usize, bound: i64) -> Vec<Vec<Rational>> {
    let t = lie_t(variant.nilradical_id(), n, r);
    if t == 0 {
        return Vec::new();
    }
    let vars: Vec<Var> = (1..=t).map(|k| Var::new(format!("alpha{k}"))).collect();
    let sym_alpha: Vec<MultiPoly> = vars.iter().map(|v| MultiPoly::var(v.clone())).collect();
    let eqs = symbolic_lie_equations(variant, n, r, &sym_alpha);
    let mut out = Vec::new();
    let width = (2 * bound + 1) as usize;
    let total = width.pow(t as u32);
    for code in 0..total {
        let mut c = code;
        let mut v = vec![0i64; t];
        for slot in v.iter_mut().rev() {
            *slot = (c % width) as i64 - bound;
            c /= width;
        }
        if v.iter().all(|&x| x == 0) {
            continue;
        }
        let env: BTreeMap<Var, Rational> = vars.iter().cloned().zip(v.iter().map(|&x| int(x))).collect();
        if eqs.iter().all(|p| p.eval(&env).map(|x| x.is_zero()).unwrap_or(false)) {
            out.push(v.into_iter().map(int).collect());
        }
    }
    out
}

fn symbolic_lie_equations(variant: LieVariant, n: usize, r: usize, alpha: &[MultiPoly]) -> Vec<MultiPoly> {
    let mut s = SymAlgebra::zero(n + 1, (0..=n).map(|i| format!("e_{i}")).collect());
    let one = MultiPoly::constant(int(1));
    let top = match variant {
        LieVariant::A => n - 1,
        LieVariant::B => n - 2,
    };
    for i in 1..=top {
        s.set(0, i, i + 1, one.clone());
        s.set(i, 0, i + 1, -one.clone());
    }
    if variant == LieVariant::B {
        for i in 1..n {
            s.add(i, n - i, n, &MultiPoly::constant(sign(i)));
        }
    }
    let (jmax, kmax) = match variant {
        LieVariant::A => (n - 2, n),
        LieVariant::B => (n - 1, n - 1),
    };
    for i in 1..=jmax {
        for j in i + 1..=jmax {
            if i + j + r > kmax {
                continue;
            }
            let mut c = MultiPoly::zero();
            for k in i..=alpha.len() {
                c.add_scaled(&alpha[k - 1], &(sign(k - i) * binomial(j as i64 - k as i64 - 1, (k - i) as i64)));
            }
            s.add(i, j, i + j + r, &c);
            s.add(j, i, i + j + r, &-c.clone());
        }
    }
    let mut eqs: Vec<MultiPoly> = Vec::new();
    for (_, p) in s.leibniz_equations() {
        if !eqs.contains(&p) {
            eqs.push(p);
        }
    }
    eqs
}

/// Chooses a random admissible `alpha` for family A or B, scaled by a random
/// rational when the scaled vector still satisfies the Jacobi identity.
pub fn sample_lie_alpha(variant: LieVariant, n: usize, r: usize, rng: &mut impl Rng) -> Option<Vec<Rational>> {
    let cands = lie_alpha_candidates(variant, n, r, 2);
    if cands.is_empty() {
        return None;
    }
    let base = cands[rng.gen_range(0..cands.len())].clone();
    let mut scale = frac(rng.gen_range(1..=9), rng.gen_range(1..=4));
    if rng.gen_bool(0.5) {
        scale = -scale;
    }
    let scaled: Vec<Rational> = base.iter().map(|a| a * &scale).collect();
    if variant.nilradical(n, r, &scaled).is_leibniz() {
        Some(scaled)
    } else {
        Some(base)
    }
}

/// Linear conditions on `(a1, b_i)` for the solvable Lie extension to be a
/// Leibniz algebra.
pub fn solvable_lie_constraints(variant: LieVariant, n: usize, r: usize, alpha: &[Rational]) -> Vec<MultiPoly> {
    let mut eqs: Vec<MultiPoly> = Vec::new();
    for (_, p) in solvable_lie_table(variant, n, r, alpha).leibniz_equations() {
        if !eqs.contains(&p) {
            eqs.push(p);
        }
    }
    eqs
}

/// Random `(a1, b_i)` satisfying [`solvable_lie_constraints`]; free values
/// have height at most `height`. With `a1_zero`, `a1` is fixed to zero.
pub fn sample_solvable_parameters(
    variant: LieVariant,
    n: usize,
    r: usize,
    alpha: &[Rational],
    a1_zero: bool,
    height: i64,
    rng: &mut impl Rng,
) -> Option<BTreeMap<Var, Rational>> {
    let mut vars: Vec<Var> = Vec::new();
    if variant == LieVariant::A {
        vars.push(Var::new("a1"));
    }
    vars.extend((2..=variant.last_b(n)).map(|i| Var::new(format!("b{i}"))));
    let mut eqs = solvable_lie_constraints(variant, n, r, alpha);
    if a1_zero && variant == LieVariant::A {
        eqs.push(MultiPoly::var("a1"));
    }
    solve_affine(&eqs, &vars, height, rng)
}

/// Random point of an affine-linear system in `vars`; `None` if it is
/// inconsistent or not linear.
fn solve_affine(eqs: &[MultiPoly], vars: &[Var], height: i64, rng: &mut impl Rng) -> Option<BTreeMap<Var, Rational>> {
    let m = vars.len();
    let mut rows = Vec::new();
    for p in eqs {
        if p.total_degree() > 1 || p.vars().iter().any(|v| !vars.contains(v)) {
            return None;
        }
        let mut row = vec![Rational::zero(); m + 1];
        for (k, v) in vars.iter().enumerate() {
            if let Some(c) = p.linear_coefficient(v) {
                row[k] = c;
            }
        }
        row[m] = -p.constant_term();
        rows.push(row);
    }
    let mut env = BTreeMap::new();
    if rows.is_empty() {
        for v in vars {
            env.insert(v.clone(), crate::derivations::sample_rational(rng, height));
        }
        return Some(env);
    }
    let (red, pivots) = Matrix::from_rows(rows).ok()?.rref();
    if pivots.last() == Some(&m) {
        return None;
    }
    let free: Vec<usize> = (0..m).filter(|c| !pivots.contains(c)).collect();
    let mut vals = vec![Rational::zero(); m];
    for &f in &free {
        vals[f] = frac(rng.gen_range(-height..=height), rng.gen_range(1..=height));
    }
    for (row, &pc) in pivots.iter().enumerate() {
        let mut v = red.get(row, m).clone();
        for &f in &free {
            v -= red.get(row, f) * &vals[f];
        }
        vals[pc] = v;
    }
    for (v, x) in vars.iter().zip(vals) {
        env.insert(v.clone(), x);
    }
    Some(env)
}

/// Spec for the solvable Lie extension at the given parameters.
pub fn solvable_lie_spec(variant: LieVariant, n: usize, r: usize, alpha: &[Rational], params: &BTreeMap<Var, Rational>) -> FamilySpec {
    let mut spec = FamilySpec::new(variant.extension_id(), n).with_int("r", r as i64);
    for (k, a) in alpha.iter().enumerate() {
        if !a.is_zero() {
            spec = spec.with(&format!("alpha{}", k + 1), a.clone());
        }
    }
    for (v, x) in params {
        if !x.is_zero() {
            spec = spec.with(v.name(), x.clone());
        }
    }
    spec
}

/// Spec for the nilradical family at the given `alpha`.
pub fn lie_nilradical_spec(variant: LieVariant, n: usize, r: usize, alpha: &[Rational]) -> FamilySpec {
    let mut spec = FamilySpec::new(variant.nilradical_id(), n).with_int("r", r as i64);
    for (k, a) in alpha.iter().enumerate() {
        if !a.is_zero() {
            spec = spec.with(&format!("alpha{}", k + 1), a.clone());
        }
    }
    spec
}

/// True when `x` is a nonzero rational of absolute value at most `h`.
pub fn is_small(x: &Rational, h: i64) -> bool {
    !x.is_zero() && x.abs() <= int(h)
}
