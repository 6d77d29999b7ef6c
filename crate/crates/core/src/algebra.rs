//! Poincaré duality algebras: graded basis, structure constants, counit on
//! the top degree, the inverse pairing ("diagonal class") and the builtin
//! cohomology rings used throughout the crate.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::path::Path;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::{format_q, parse_q, Rational};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BasisElement {
    pub id: String,
    pub degree: i32,
}

/// Structure constants are stored for products of two non-unit elements;
/// products with the unit are implicit.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PDAlgebra {
    pub name: String,
    pub dim: i32,
    pub basis: Vec<BasisElement>,
    pub unit: usize,
    pub volume: usize,
    /// Value of the counit on the volume element.
    pub counit: Rational,
    products: BTreeMap<(usize, usize), Vec<(usize, Rational)>>,
}

/// `Δ = Σ g^{αβ} e_α ⊗ e_β`, indices into the full basis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiagonalClass {
    pub terms: Vec<(usize, usize, Rational)>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    UnitDegree(String),
    NotConnected { degree_zero: usize },
    Volume(String),
    DegreeRange(String),
    Degree { left: String, right: String, out: String },
    GradedCommutativity { left: String, right: String },
    Associativity { a: String, b: String, c: String },
    Nondegenerate { degree: i32 },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::UnitDegree(u) => write!(f, "unit {u} is not in degree 0"),
            Violation::NotConnected { degree_zero } => {
                write!(f, "degree 0 has dimension {degree_zero}, expected 1")
            }
            Violation::Volume(s) => write!(f, "volume: {s}"),
            Violation::DegreeRange(s) => write!(f, "basis element {s} outside degrees 0..=D"),
            Violation::Degree { left, right, out } => {
                write!(f, "product {left}*{right} has a term {out} of the wrong degree")
            }
            Violation::GradedCommutativity { left, right } => {
                write!(f, "graded commutativity fails for ({left}, {right})")
            }
            Violation::Associativity { a, b, c } => write!(f, "associativity fails for ({a}, {b}, {c})"),
            Violation::Nondegenerate { degree } => {
                write!(f, "pairing between degrees {degree} and D-{degree} is degenerate")
            }
        }
    }
}

type Vector = BTreeMap<usize, Rational>;

fn add_to(v: &mut Vector, k: usize, c: Rational) {
    if c.is_zero() {
        return;
    }
    let e = v.entry(k).or_insert_with(Rational::zero);
    *e += c;
    if e.is_zero() {
        v.remove(&k);
    }
}

/// Dense Gauss–Jordan inverse; `None` if singular.
pub(crate) fn invert(m: &[Vec<Rational>]) -> Option<Vec<Vec<Rational>>> {
    let n = m.len();
    let mut a: Vec<Vec<Rational>> = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { Rational::one() } else { Rational::zero() }));
            r
        })
        .collect();
    for c in 0..n {
        let p = (c..n).find(|&i| !a[i][c].is_zero())?;
        a.swap(c, p);
        let inv = Rational::one() / &a[c][c];
        for x in a[c].iter_mut() {
            *x *= &inv;
        }
        for i in 0..n {
            if i != c && !a[i][c].is_zero() {
                let f = a[i][c].clone();
                for j in 0..2 * n {
                    let t = &f * &a[c][j];
                    a[i][j] -= t;
                }
            }
        }
    }
    Some(a.into_iter().map(|r| r[n..].to_vec()).collect())
}

impl PDAlgebra {
    /// Build from explicit data without validating; see [`PDAlgebra::validate`].
    pub fn new(
        name: &str,
        dim: i32,
        basis: Vec<BasisElement>,
        unit: usize,
        volume: usize,
        products: Vec<(usize, usize, Vec<(usize, Rational)>)>,
    ) -> Self {
        let mut table = BTreeMap::new();
        for (l, r, out) in products {
            if l == unit || r == unit {
                continue;
            }
            let out: Vec<(usize, Rational)> = out.into_iter().filter(|(_, c)| !c.is_zero()).collect();
            if !out.is_empty() {
                table.insert((l, r), out);
            }
        }
        PDAlgebra {
            name: name.to_string(),
            dim,
            basis,
            unit,
            volume,
            counit: Rational::one(),
            products: table,
        }
    }

    pub fn len(&self) -> usize {
        self.basis.len()
    }

    pub fn is_empty(&self) -> bool {
        self.basis.is_empty()
    }

    pub fn degree(&self, i: usize) -> i32 {
        self.basis[i].degree
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.basis.iter().position(|b| b.id == id)
    }

    /// Basis indices of the non-unit elements, in basis order. Decorations
    /// of graphs refer to positions in this list ("classes").
    pub fn reduced(&self) -> Vec<usize> {
        (0..self.basis.len()).filter(|&i| i != self.unit).collect()
    }

    pub fn class_of(&self, i: usize) -> Option<u8> {
        if i == self.unit {
            None
        } else if i < self.unit {
            Some(i as u8)
        } else {
            Some((i - 1) as u8)
        }
    }

    pub fn basis_of_class(&self, c: u8) -> usize {
        let c = c as usize;
        if c < self.unit {
            c
        } else {
            c + 1
        }
    }

    pub fn class_degrees(&self) -> Vec<u8> {
        self.reduced().iter().map(|&i| self.degree(i) as u8).collect()
    }

    pub fn class_id(&self, c: u8) -> &str {
        &self.basis[self.basis_of_class(c)].id
    }

    pub fn class_by_id(&self, id: &str) -> Option<u8> {
        self.index_of(id).and_then(|i| self.class_of(i))
    }

    /// Product of two basis elements as a sparse vector.
    pub fn mul(&self, i: usize, j: usize) -> Vec<(usize, Rational)> {
        if i == self.unit {
            return vec![(j, Rational::one())];
        }
        if j == self.unit {
            return vec![(i, Rational::one())];
        }
        self.products.get(&(i, j)).cloned().unwrap_or_default()
    }

    fn mul_vec(&self, x: &Vector, y: &Vector) -> Vector {
        let mut out = Vector::new();
        for (i, a) in x {
            for (j, b) in y {
                for (k, c) in self.mul(*i, *j) {
                    add_to(&mut out, k, a * b * c);
                }
            }
        }
        out
    }

    /// Product of a list of basis elements, left to right.
    pub fn product(&self, factors: &[usize]) -> Vec<(usize, Rational)> {
        let mut acc: Vector = [(self.unit, Rational::one())].into_iter().collect();
        for &f in factors {
            acc = self.mul_vec(&acc, &[(f, Rational::one())].into_iter().collect());
        }
        acc.into_iter().collect()
    }

    pub fn epsilon(&self, i: usize) -> Rational {
        if i == self.volume {
            self.counit.clone()
        } else {
            Rational::zero()
        }
    }

    /// `ε(e_i e_j)`.
    pub fn pairing(&self, i: usize, j: usize) -> Rational {
        self.mul(i, j)
            .into_iter()
            .map(|(k, c)| c * self.epsilon(k))
            .fold(Rational::zero(), |a, b| a + b)
    }

    pub fn pairing_matrix(&self) -> Vec<Vec<Rational>> {
        let n = self.len();
        (0..n).map(|i| (0..n).map(|j| self.pairing(i, j)).collect()).collect()
    }

    /// Dimensions of `A^0, ..., A^D`.
    pub fn poincare_polynomial(&self) -> Vec<usize> {
        let mut p = vec![0; (self.dim.max(0) + 1) as usize];
        for b in &self.basis {
            if b.degree >= 0 && b.degree <= self.dim {
                p[b.degree as usize] += 1;
            }
        }
        p
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.basis
            .iter()
            .map(|b| if b.degree % 2 == 0 { 1 } else { -1 })
            .sum()
    }

    /// `Δ = Σ_i (-1)^{|e_i|} e_i ⊗ e_i^*` with `ε(e_i e_j^*) = δ_ij`; in
    /// matrix terms `g^{αβ} = (-1)^{|α|} C_{αβ}`, `C = (G^T)^{-1}`.
    pub fn diagonal(&self) -> Result<DiagonalClass, Error> {
        let g = self.pairing_matrix();
        let n = g.len();
        let gt: Vec<Vec<Rational>> = (0..n).map(|i| (0..n).map(|j| g[j][i].clone()).collect()).collect();
        let c = invert(&gt).ok_or(Error::SingularPairing)?;
        let mut terms = Vec::new();
        for (a, row) in c.iter().enumerate() {
            for (b, v) in row.iter().enumerate() {
                if !v.is_zero() {
                    let s = if self.degree(a) % 2 == 0 { v.clone() } else { -v.clone() };
                    terms.push((a, b, s));
                }
            }
        }
        Ok(DiagonalClass { terms })
    }

    /// Check every axiom, reporting each failure with a witness.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        let id = |i: usize| self.basis[i].id.clone();
        let n = self.len();
        if self.unit >= n || self.volume >= n {
            out.push(Violation::Volume("unit or volume index out of range".into()));
            return out;
        }
        if self.degree(self.unit) != 0 {
            out.push(Violation::UnitDegree(id(self.unit)));
        }
        for b in &self.basis {
            if b.degree < 0 || b.degree > self.dim {
                out.push(Violation::DegreeRange(b.id.clone()));
            }
        }
        let deg0 = self.basis.iter().filter(|b| b.degree == 0).count();
        if deg0 != 1 {
            out.push(Violation::NotConnected { degree_zero: deg0 });
        }
        if self.degree(self.volume) != self.dim {
            out.push(Violation::Volume(format!("{} is not in degree D", id(self.volume))));
        }
        let top = self.basis.iter().filter(|b| b.degree == self.dim).count();
        if top != 1 {
            out.push(Violation::Volume(format!("degree D has dimension {top}, expected 1")));
        }
        for (&(l, r), terms) in &self.products {
            for (k, _) in terms {
                if self.degree(*k) != self.degree(l) + self.degree(r) {
                    out.push(Violation::Degree {
                        left: id(l),
                        right: id(r),
                        out: id(*k),
                    });
                }
            }
        }
        for i in 0..n {
            for j in i..n {
                let ij: Vector = self.mul(i, j).into_iter().collect();
                let sign = if (self.degree(i) * self.degree(j)) % 2 == 0 { 1 } else { -1 };
                let ji: Vector = self
                    .mul(j, i)
                    .into_iter()
                    .map(|(k, c)| (k, c * Rational::from_integer(sign.into())))
                    .collect();
                if ij != ji {
                    out.push(Violation::GradedCommutativity { left: id(i), right: id(j) });
                }
            }
        }
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    let ea: Vector = [(a, Rational::one())].into_iter().collect();
                    let eb: Vector = [(b, Rational::one())].into_iter().collect();
                    let ec: Vector = [(c, Rational::one())].into_iter().collect();
                    let l = self.mul_vec(&self.mul_vec(&ea, &eb), &ec);
                    let r = self.mul_vec(&ea, &self.mul_vec(&eb, &ec));
                    if l != r {
                        out.push(Violation::Associativity { a: id(a), b: id(b), c: id(c) });
                    }
                }
            }
        }
        let degrees: BTreeSet<i32> = self.basis.iter().map(|b| b.degree).collect();
        for &p in &degrees {
            let lo: Vec<usize> = (0..n).filter(|&i| self.degree(i) == p).collect();
            let hi: Vec<usize> = (0..n).filter(|&i| self.degree(i) == self.dim - p).collect();
            let square: Vec<Vec<Rational>> = lo
                .iter()
                .map(|&i| hi.iter().map(|&j| self.pairing(i, j)).collect())
                .collect();
            if lo.len() != hi.len() || invert(&square).is_none() {
                out.push(Violation::Nondegenerate { degree: p });
            }
        }
        out
    }

    pub fn builtin(name: &str) -> Result<PDAlgebra, Error> {
        let unknown = || Error::UnknownBuiltin(name.to_string());
        let compact: String = name.chars().filter(|c| !c.is_whitespace()).collect();
        if let Some((l, r)) = compact.split_once('×').or_else(|| compact.split_once('x')) {
            let a = sphere_dim(l).ok_or_else(unknown)?;
            let b = sphere_dim(r).ok_or_else(unknown)?;
            return Ok(sphere_product(&compact, a, b));
        }
        if compact == "T^2" {
            let mut t = surface(1);
            t.name = compact;
            return Ok(t);
        }
        if compact == "CP^2" {
            return Ok(cp2());
        }
        if let Some(g) = compact.strip_prefix("Sigma_") {
            let g: usize = g.parse().map_err(|_| unknown())?;
            if g == 0 {
                return Ok(sphere(2));
            }
            return Ok(surface(g));
        }
        if let Some(d) = sphere_dim(&compact) {
            return Ok(sphere(d));
        }
        Err(unknown())
    }

    pub fn to_json(&self) -> String {
        let file = AlgebraFile {
            name: Some(self.name.clone()),
            dimension: self.dim,
            basis: self
                .basis
                .iter()
                .map(|b| BasisEntry {
                    id: b.id.clone(),
                    degree: b.degree,
                })
                .collect(),
            unit: self.basis[self.unit].id.clone(),
            volume: self.basis[self.volume].id.clone(),
            counit: if self.counit.is_one() { None } else { Some(format_q(&self.counit)) },
            products: self
                .products
                .iter()
                .map(|((l, r), out)| ProductEntry {
                    left: self.basis[*l].id.clone(),
                    right: self.basis[*r].id.clone(),
                    out: out
                        .iter()
                        .map(|(k, c)| CoeffEntry {
                            id: self.basis[*k].id.clone(),
                            coeff: format_q(c),
                        })
                        .collect(),
                })
                .collect(),
        };
        serde_json::to_string_pretty(&file).expect("algebra serializes") + "\n"
    }

    /// Parse and validate the JSON file format.
    pub fn from_json(text: &str) -> Result<PDAlgebra, Error> {
        let file: AlgebraFile = serde_json::from_str(text).map_err(|e| Error::Parse {
            line: e.line(),
            reason: e.to_string(),
        })?;
        let line_of = |needle: &str, nth: usize| {
            text.lines()
                .enumerate()
                .filter(|(_, l)| l.contains(needle))
                .nth(nth)
                .map_or(0, |(i, _)| i + 1)
        };
        let mut basis = Vec::new();
        let mut seen = BTreeSet::new();
        for b in &file.basis {
            if !seen.insert(b.id.clone()) {
                return Err(Error::Parse {
                    line: line_of(&format!("\"{}\"", b.id), 1),
                    reason: format!("duplicate basis id {:?}", b.id),
                });
            }
            basis.push(BasisElement {
                id: b.id.clone(),
                degree: b.degree,
            });
        }
        let lookup = |id: &str| {
            basis.iter().position(|b| b.id == id).ok_or_else(|| Error::Parse {
                line: line_of(&format!("\"{id}\""), 0),
                reason: format!("unknown basis id {id:?}"),
            })
        };
        let unit = lookup(&file.unit)?;
        let volume = lookup(&file.volume)?;
        let mut products = Vec::new();
        for p in &file.products {
            let mut out = Vec::new();
            for o in &p.out {
                let c = parse_q(&o.coeff).map_err(|reason| Error::Parse {
                    line: line_of(&o.coeff, 0),
                    reason,
                })?;
                out.push((lookup(&o.id)?, c));
            }
            products.push((lookup(&p.left)?, lookup(&p.right)?, out));
        }
        let name = file.name.clone().unwrap_or_else(|| "custom".into());
        let mut a = PDAlgebra::new(&name, file.dimension, basis, unit, volume, products);
        if let Some(c) = &file.counit {
            a.counit = parse_q(c).map_err(|reason| Error::Parse {
                line: line_of("counit", 0),
                reason,
            })?;
        }
        let v = a.validate();
        if !v.is_empty() {
            return Err(Error::Validation(v.iter().map(ToString::to_string).collect()));
        }
        Ok(a)
    }

    pub fn load(path: &Path) -> Result<PDAlgebra, Error> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io(e.to_string()))?;
        Self::from_json(&text)
    }

    pub fn save(&self, path: &Path) -> Result<(), Error> {
        std::fs::write(path, self.to_json()).map_err(|e| Error::Io(e.to_string()))
    }
}

impl DiagonalClass {
    /// Product of the two legs, `Σ g^{αβ} e_α e_β`, as an element of A.
    pub fn leg_product(&self, a: &PDAlgebra) -> Vec<(usize, Rational)> {
        let mut out = Vector::new();
        for (x, y, g) in &self.terms {
            for (k, c) in a.mul(*x, *y) {
                add_to(&mut out, k, g * c);
            }
        }
        out.into_iter().collect()
    }

    /// `Σ g^{αβ} ε(x e_α) e_β`; the defining property of the inverse
    /// pairing is that this returns `x`.
    pub fn contract_left(&self, a: &PDAlgebra, x: usize) -> Vec<(usize, Rational)> {
        let mut out = Vector::new();
        for (al, be, g) in &self.terms {
            let p = a.pairing(x, *al);
            if !p.is_zero() {
                add_to(&mut out, *be, g * p);
            }
        }
        out.into_iter().collect()
    }

    pub fn display(&self, a: &PDAlgebra) -> String {
        let mut s = String::new();
        for (i, (x, y, g)) in self.terms.iter().enumerate() {
            if i > 0 || g.is_negative() {
                s.push_str(if g.is_negative() { " - " } else { " + " });
            }
            let m = g.abs();
            if !m.is_one() {
                s.push_str(&format!("{m}·"));
            }
            s.push_str(&format!("{}⊗{}", a.basis[*x].id, a.basis[*y].id));
        }
        s.trim_start().to_string()
    }
}

fn sphere_dim(s: &str) -> Option<i32> {
    s.strip_prefix("S^")?.parse().ok().filter(|&d| d >= 1)
}

fn q(x: i64) -> Rational {
    Rational::from_integer(x.into())
}

fn el(id: &str, degree: i32) -> BasisElement {
    BasisElement {
        id: id.to_string(),
        degree,
    }
}

fn sphere(d: i32) -> PDAlgebra {
    PDAlgebra::new(&format!("S^{d}"), d, vec![el("1", 0), el("w", d)], 0, 1, vec![])
}

fn surface(g: usize) -> PDAlgebra {
    let mut basis = vec![el("1", 0)];
    for k in 1..=g {
        basis.push(el(&format!("a{k}"), 1));
        basis.push(el(&format!("b{k}"), 1));
    }
    if g == 1 {
        basis[1].id = "a".into();
        basis[2].id = "b".into();
    }
    basis.push(el("w", 2));
    let w = basis.len() - 1;
    let mut products = Vec::new();
    for k in 0..g {
        let (a, b) = (1 + 2 * k, 2 + 2 * k);
        products.push((a, b, vec![(w, q(1))]));
        products.push((b, a, vec![(w, q(-1))]));
    }
    PDAlgebra::new(&format!("Sigma_{g}"), 2, basis, 0, w, products)
}

fn cp2() -> PDAlgebra {
    PDAlgebra::new(
        "CP^2",
        4,
        vec![el("1", 0), el("h", 2), el("h2", 4)],
        0,
        2,
        vec![(1, 1, vec![(2, q(1))])],
    )
}

fn sphere_product(name: &str, a: i32, b: i32) -> PDAlgebra {
    let sign = if (a * b) % 2 == 0 { 1 } else { -1 };
    PDAlgebra::new(
        name,
        a + b,
        vec![el("1", 0), el("x", a), el("y", b), el("xy", a + b)],
        0,
        3,
        vec![(1, 2, vec![(3, q(1))]), (2, 1, vec![(3, q(sign))])],
    )
}

#[derive(Serialize, Deserialize)]
struct BasisEntry {
    id: String,
    degree: i32,
}

#[derive(Serialize, Deserialize)]
struct CoeffEntry {
    id: String,
    coeff: String,
}

#[derive(Serialize, Deserialize)]
struct ProductEntry {
    left: String,
    right: String,
    out: Vec<CoeffEntry>,
}

#[derive(Serialize, Deserialize)]
struct AlgebraFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    name: Option<String>,
    dimension: i32,
    basis: Vec<BasisEntry>,
    unit: String,
    volume: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    counit: Option<String>,
    products: Vec<ProductEntry>,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtins_validate() {
        for name in ["S^2", "S^3", "T^2", "Sigma_2", "Sigma_3", "CP^2", "S^2×S^3", "S^2xS^2"] {
            let a = PDAlgebra::builtin(name).unwrap();
            assert!(a.validate().is_empty(), "{name}: {:?}", a.validate());
        }
        assert!(matches!(PDAlgebra::builtin("K3"), Err(Error::UnknownBuiltin(_))));
    }

    #[test]
    fn torus_diagonal() {
        let t = PDAlgebra::builtin("T^2").unwrap();
        let d = t.diagonal().unwrap();
        assert_eq!(d.display(&t), "1⊗w - a⊗b + b⊗a + w⊗1");
        assert!(d.leg_product(&t).is_empty());
    }

    #[test]
    fn class_indexing_skips_unit() {
        let s = PDAlgebra::builtin("Sigma_2").unwrap();
        assert_eq!(s.reduced(), vec![1, 2, 3, 4, 5]);
        assert_eq!(s.class_of(0), None);
        assert_eq!(s.class_of(5), Some(4));
        assert_eq!(s.basis_of_class(4), 5);
        assert_eq!(s.class_id(0), "a1");
    }
}
