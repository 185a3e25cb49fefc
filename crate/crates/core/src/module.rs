//! Finite modules `N = D/p^{c_1} + ... + D/p^{c_r}` over `D = GR(p, c, lambda)`,
//! their linear maps and automorphism groups.
//!
//! Additive coordinates are component-major: component `i` contributes the
//! `lambda` coefficients of an element of `D/p^{c_i}`, each cyclic of order
//! `p^{c_i}`. The group index is the mixed-radix index of that vector.

use serde::{Deserialize, Serialize};

use crate::abelian::{indicator, AbelianGroup, Decomposition, Elem, OrderStats};
use crate::arith::ipow;
use crate::error::{Error, Result};
use crate::galois_ring::{GaloisRingSpec, RingElement};

pub use crate::abelian::order_statistics;

/// Default bound on `|N|` for exhaustive module scans.
pub const DEFAULT_MODULE_BOUND: usize = 1 << 12;
/// Bound on the number of matrices scanned by automorphism enumeration.
pub const MATRIX_SCAN_BOUND: u64 = 1 << 24;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Linearity {
    Z,
    D,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "ShapeDoc", into = "ShapeDoc")]
pub struct ModuleShape {
    ring: GaloisRingSpec,
    exponents: Vec<u32>,
    /// `permutation[k]` is the input position of the `k`-th sorted exponent.
    permutation: Vec<usize>,
    group: AbelianGroup,
}

#[derive(Serialize, Deserialize)]
struct ShapeDoc {
    ring: GaloisRingSpec,
    exponents: Vec<u32>,
}

impl TryFrom<ShapeDoc> for ModuleShape {
    type Error = Error;
    fn try_from(doc: ShapeDoc) -> Result<Self> {
        doc.ring.validate()?;
        ModuleShape::new(&doc.ring, &doc.exponents)
    }
}

impl From<ModuleShape> for ShapeDoc {
    fn from(s: ModuleShape) -> Self {
        ShapeDoc { ring: s.ring, exponents: s.exponents }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ModuleElement {
    pub components: Vec<RingElement>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ModuleMap {
    /// `entries[i][j]`: coefficient of component `j` in output component `i`.
    pub entries: Vec<Vec<RingElement>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct RankReport {
    pub rank_d: usize,
    pub rank_z: usize,
    /// `log_p |Omega_1|`, the number of cyclic factors of `(N, +)`.
    pub rank_z_observed: usize,
}

impl ModuleShape {
    /// Sorts `exponents` non-increasingly and normalises the ring precision to
    /// the largest exponent.
    pub fn new(ring: &GaloisRingSpec, exponents: &[u32]) -> Result<Self> {
        if exponents.contains(&0) {
            return Err(Error::InvalidParameter("cyclic exponents must be positive".into()));
        }
        let mut permutation: Vec<usize> = (0..exponents.len()).collect();
        permutation.sort_by(|&a, &b| exponents[b].cmp(&exponents[a]));
        let sorted: Vec<u32> = permutation.iter().map(|&k| exponents[k]).collect();
        let c1 = sorted.first().copied().unwrap_or(ring.c);
        let ring = ring.with_precision(c1);
        let orders = sorted
            .iter()
            .flat_map(|&c| std::iter::repeat_n(ipow(ring.p, c), ring.lambda as usize))
            .collect();
        let group = AbelianGroup::new(orders)?;
        Ok(ModuleShape { ring, exponents: sorted, permutation, group })
    }

    pub fn from_params(p: u64, lambda: u32, exponents: &[u32]) -> Result<Self> {
        let c = exponents.iter().copied().max().unwrap_or(1);
        Self::new(&GaloisRingSpec::construct(p, lambda, c)?, exponents)
    }

    /// `Z/p^{c_1} + ... ` viewed over `GR(p, c_1, 1)`.
    pub fn cyclic(p: u64, exponents: &[u32]) -> Result<Self> {
        Self::from_params(p, 1, exponents)
    }

    pub fn ring(&self) -> &GaloisRingSpec {
        &self.ring
    }

    pub fn exponents(&self) -> &[u32] {
        &self.exponents
    }

    pub fn permutation(&self) -> &[usize] {
        &self.permutation
    }

    pub fn p(&self) -> u64 {
        self.ring.p
    }

    pub fn lambda(&self) -> u32 {
        self.ring.lambda
    }

    pub fn rank(&self) -> usize {
        self.exponents.len()
    }

    pub fn group(&self) -> &AbelianGroup {
        &self.group
    }

    pub fn size(&self) -> usize {
        self.group.size()
    }

    /// The same additive group as a module over `GR(p, c_1, 1)`; element
    /// indices coincide with those of `self`.
    pub fn z_shape(&self) -> ModuleShape {
        let exps: Vec<u32> = self
            .exponents
            .iter()
            .flat_map(|&c| std::iter::repeat_n(c, self.ring.lambda as usize))
            .collect();
        let ring = GaloisRingSpec::construct(self.ring.p, 1, self.ring.c).expect("prime already validated");
        ModuleShape::new(&ring, &exps).expect("valid exponents")
    }

    fn comp_ring(&self, i: usize) -> GaloisRingSpec {
        self.ring.with_precision(self.exponents[i])
    }

    pub fn element(&self, idx: Elem) -> ModuleElement {
        let coords = self.group.decode(idx);
        let l = self.ring.lambda as usize;
        ModuleElement { components: coords.chunks(l).map(|c| RingElement::new(c.to_vec())).collect() }
    }

    pub fn index(&self, x: &ModuleElement) -> Elem {
        let coords: Vec<u64> = x.components.iter().flat_map(|c| c.coeffs.iter().copied()).collect();
        self.group.encode(&coords)
    }

    fn check_elem(&self, x: &ModuleElement) -> Result<()> {
        let l = self.ring.lambda as usize;
        if x.components.len() != self.rank() || x.components.iter().any(|c| c.coeffs.len() != l) {
            return Err(Error::ShapeMismatch("element does not match module shape".into()));
        }
        for (c, &e) in x.components.iter().zip(&self.exponents) {
            if c.coeffs.iter().any(|&v| v >= ipow(self.ring.p, e)) {
                return Err(Error::ShapeMismatch("component not reduced".into()));
            }
        }
        Ok(())
    }

    pub fn add(&self, x: &ModuleElement, y: &ModuleElement) -> Result<ModuleElement> {
        self.check_elem(x)?;
        self.check_elem(y)?;
        Ok(self.element(self.group.add(self.index(x), self.index(y))))
    }

    pub fn neg(&self, x: &ModuleElement) -> Result<ModuleElement> {
        self.check_elem(x)?;
        Ok(self.element(self.group.neg(self.index(x))))
    }

    pub fn scalar_mul(&self, d: &RingElement, x: &ModuleElement) -> Result<ModuleElement> {
        self.check_elem(x)?;
        if d.coeffs.len() != self.ring.lambda as usize {
            return Err(Error::ShapeMismatch("scalar has the wrong degree".into()));
        }
        let components = x
            .components
            .iter()
            .enumerate()
            .map(|(i, c)| {
                let r = self.comp_ring(i);
                r.mul(&r.truncate(d, self.exponents[i]), c)
            })
            .collect();
        Ok(ModuleElement { components })
    }

    /// `x -> d x` as a table on element indices.
    pub fn scalar_table(&self, d: &RingElement) -> Vec<Elem> {
        ModuleMap::scalar(self, d).to_table(self)
    }

    /// Multiplication by the generator `xi` of the ring.
    pub fn xi_table(&self) -> Vec<Elem> {
        self.scalar_table(&self.ring.xi())
    }

    /// `[g, xi g, ..., xi^(lambda-1) g]`.
    pub fn scalar_family(&self, xi: &[Elem], g: Elem) -> Vec<Elem> {
        let mut fam = vec![g];
        for _ in 1..self.ring.lambda {
            fam.push(xi[*fam.last().unwrap() as usize]);
        }
        fam
    }

    /// `Omega_i = {x : p^i x = 0}`.
    pub fn omega_subgroup(&self, i: u32) -> Vec<Elem> {
        let k = ipow(self.ring.p, i.min(self.ring.c));
        self.group.torsion(k)
    }

    /// `pN`.
    pub fn times_p_image(&self) -> Vec<Elem> {
        self.group.multiples(self.ring.p)
    }

    /// Checks that `set` is closed under addition and the scalar `xi`.
    pub fn is_submodule(&self, set: &[Elem]) -> bool {
        let flags = indicator(self.size(), set);
        let xi = self.xi_table();
        set.iter().all(|&a| flags[xi[a as usize] as usize] && set.iter().all(|&b| flags[self.group.add(a, b) as usize]))
    }

    pub fn rank_accounting(&self) -> RankReport {
        let omega1 = self.omega_subgroup(1).len() as u64;
        let observed = crate::arith::exact_log(omega1, self.ring.p).expect("p-group") as usize;
        RankReport {
            rank_d: self.rank(),
            rank_z: self.ring.lambda as usize * self.rank(),
            rank_z_observed: observed,
        }
    }

    /// `D` acting on `N` as a structure-constant action.
    pub fn ring_action(&self) -> crate::finite_ring::RingAction {
        let ring = self.ring.to_finite_ring();
        let tables: Vec<Vec<Elem>> = (0..self.ring.lambda as usize)
            .map(|i| {
                let mut e = self.ring.zero();
                e.coeffs[i] = 1;
                self.scalar_table(&e)
            })
            .collect();
        let rg = ring.group().clone();
        crate::finite_ring::RingAction::from_fn(ring, self.group.clone(), |r, x| {
            let i = (0..rg.num_generators()).find(|&i| rg.generator(i) == r).expect("generator");
            tables[i][x as usize]
        })
        .expect("module action tables are well formed")
    }

    pub fn additive_stats(&self) -> OrderStats {
        self.group.order_stats()
    }
}

impl ModuleMap {
    pub fn identity(shape: &ModuleShape) -> Self {
        Self::scalar(shape, &shape.ring.one())
    }

    pub fn scalar(shape: &ModuleShape, d: &RingElement) -> Self {
        let r = shape.rank();
        let entries = (0..r)
            .map(|i| {
                (0..r)
                    .map(|j| if i == j { shape.ring.truncate(d, shape.exponents[i]) } else { shape.ring.zero() })
                    .collect()
            })
            .collect();
        ModuleMap { entries }
    }

    /// Entry `(i, j)` must be reduced mod `p^{c_i}` and divisible by
    /// `p^{max(c_i - c_j, 0)}`.
    pub fn check_hom(&self, shape: &ModuleShape) -> Result<()> {
        let r = shape.rank();
        let l = shape.lambda() as usize;
        if self.entries.len() != r || self.entries.iter().any(|row| row.len() != r) {
            return Err(Error::ShapeMismatch(format!("matrix must be {r}x{r}")));
        }
        let e = &shape.exponents;
        for (i, row) in self.entries.iter().enumerate() {
            for (j, m) in row.iter().enumerate() {
                if m.coeffs.len() != l || m.coeffs.iter().any(|&v| v >= ipow(shape.p(), e[i])) {
                    return Err(Error::ShapeMismatch(format!("entry ({i}, {j}) not reduced")));
                }
                let need = e[i].saturating_sub(e[j]);
                if shape.ring.valuation(m) < need {
                    return Err(Error::HomCondition { row: i, col: j });
                }
            }
        }
        Ok(())
    }

    pub fn apply(&self, shape: &ModuleShape, x: &ModuleElement) -> Result<ModuleElement> {
        self.check_hom(shape)?;
        shape.check_elem(x)?;
        Ok(self.apply_unchecked(shape, x))
    }

    fn apply_unchecked(&self, shape: &ModuleShape, x: &ModuleElement) -> ModuleElement {
        let ring = &shape.ring;
        let components = self
            .entries
            .iter()
            .enumerate()
            .map(|(i, row)| {
                let acc = row
                    .iter()
                    .zip(&x.components)
                    .fold(ring.zero(), |acc, (m, xj)| ring.add(&acc, &ring.mul(m, xj)));
                ring.truncate(&acc, shape.exponents[i])
            })
            .collect();
        ModuleElement { components }
    }

    /// `self . other` (apply `other` first).
    pub fn compose(&self, shape: &ModuleShape, other: &ModuleMap) -> Result<ModuleMap> {
        self.check_hom(shape)?;
        other.check_hom(shape)?;
        let ring = &shape.ring;
        let r = shape.rank();
        let entries = (0..r)
            .map(|i| {
                (0..r)
                    .map(|j| {
                        let acc = (0..r).fold(ring.zero(), |acc, k| {
                            ring.add(&acc, &ring.mul(&self.entries[i][k], &other.entries[k][j]))
                        });
                        ring.truncate(&acc, shape.exponents[i])
                    })
                    .collect()
            })
            .collect();
        Ok(ModuleMap { entries })
    }

    /// Action on element indices. The hom condition is assumed.
    pub fn to_table(&self, shape: &ModuleShape) -> Vec<Elem> {
        let l = shape.lambda() as usize;
        let ring = &shape.ring;
        let mut images = Vec::with_capacity(shape.rank() * l);
        for j in 0..shape.rank() {
            let mut basis = ring.one();
            for _ in 0..l {
                let mut x = ModuleElement { components: vec![ring.zero(); shape.rank()] };
                x.components[j] = ring.truncate(&basis, shape.exponents[j]);
                images.push(shape.index(&self.apply_unchecked(shape, &x)));
                basis = ring.mul(&basis, &ring.xi());
            }
        }
        let dec = Decomposition { family: images, orders: shape.group.orders().to_vec(), exponents: vec![] };
        dec.table(0, &|a, b| shape.group.add(a, b))
    }

    /// Reductions of the diagonal blocks of equal exponent are invertible
    /// over the residue field. Off-diagonal blocks below an exponent drop are
    /// divisible by `p`, so this decides invertibility.
    pub fn invertible_mod_p(&self, shape: &ModuleShape) -> bool {
        let field = shape.ring.with_precision(1);
        let e = &shape.exponents;
        let mut start = 0;
        while start < e.len() {
            let mut end = start;
            while end < e.len() && e[end] == e[start] {
                end += 1;
            }
            let block: Vec<Vec<RingElement>> = (start..end)
                .map(|i| (start..end).map(|j| field.truncate(&self.entries[i][j], 1)).collect())
                .collect();
            if !field_matrix_invertible(&field, block) {
                return false;
            }
            start = end;
        }
        true
    }

    pub fn is_bijective(&self, shape: &ModuleShape) -> Result<bool> {
        self.check_hom(shape)?;
        if !self.invertible_mod_p(shape) {
            return Ok(false);
        }
        Ok(is_permutation(&self.to_table(shape)))
    }
}

fn field_matrix_invertible(field: &GaloisRingSpec, mut m: Vec<Vec<RingElement>>) -> bool {
    let n = m.len();
    for col in 0..n {
        let Some(piv) = (col..n).find(|&r| !m[r][col].is_zero()) else {
            return false;
        };
        m.swap(col, piv);
        let inv = field.inverse(&m[col][col]).expect("nonzero in a field");
        for r in col + 1..n {
            if m[r][col].is_zero() {
                continue;
            }
            let factor = field.mul(&m[r][col], &inv);
            for c in col..n {
                let t = field.mul(&factor, &m[col][c]);
                m[r][c] = field.sub(&m[r][c], &t);
            }
        }
    }
    true
}

pub fn is_permutation(table: &[Elem]) -> bool {
    let mut seen = vec![false; table.len()];
    for &y in table {
        match seen.get_mut(y as usize) {
            Some(s) if !*s => *s = true,
            _ => return false,
        }
    }
    true
}

/// An additive automorphism, optionally with a matrix realising it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Automorphism {
    pub table: Vec<Elem>,
    pub matrix: Option<(Linearity, ModuleMap)>,
}

impl Automorphism {
    pub fn from_table(table: Vec<Elem>) -> Self {
        Automorphism { table, matrix: None }
    }

    /// Recovers a matrix from the action: D-linear first, then Z-linear.
    pub fn infer(shape: &ModuleShape, table: Vec<Elem>) -> Self {
        for (lin, s) in [(Linearity::D, shape.clone()), (Linearity::Z, shape.z_shape())] {
            if let Some(m) = matrix_of_table(&s, &table) {
                return Automorphism { table, matrix: Some((lin, m)) };
            }
        }
        Automorphism { table, matrix: None }
    }

    pub fn is_identity(&self) -> bool {
        self.table.iter().enumerate().all(|(i, &y)| i as Elem == y)
    }
}

/// Reads a matrix off the images of the component generators and checks
/// that it reproduces `table`.
pub fn matrix_of_table(shape: &ModuleShape, table: &[Elem]) -> Option<ModuleMap> {
    let r = shape.rank();
    let mut entries = vec![vec![shape.ring.zero(); r]; r];
    for j in 0..r {
        let mut x = ModuleElement { components: vec![shape.ring.zero(); r] };
        x.components[j] = shape.ring.truncate(&shape.ring.one(), shape.exponents[j]);
        let img = shape.element(table[shape.index(&x) as usize]);
        for i in 0..r {
            entries[i][j] = img.components[i].clone();
        }
    }
    let m = ModuleMap { entries };
    (m.check_hom(shape).is_ok() && m.to_table(shape) == table).then_some(m)
}

/// All automorphisms of `shape` that are `Z`- or `D`-linear, sorted by table
/// (so the identity comes first).
pub fn enumerate_automorphisms(shape: &ModuleShape, linearity: Linearity, bound: usize) -> Result<Vec<Automorphism>> {
    if shape.size() > bound {
        return Err(Error::TooLarge { size: shape.size(), bound });
    }
    let work = match linearity {
        Linearity::Z => shape.z_shape(),
        Linearity::D => shape.clone(),
    };
    let r = work.rank();
    let ring = work.ring().clone();
    let e = work.exponents().to_vec();
    // per entry: allowed values are p^shift * (anything mod p^{c_i - shift})
    let mut slots = Vec::new();
    let mut total: u64 = 1;
    for i in 0..r {
        for j in 0..r {
            let shift = e[i].saturating_sub(e[j]);
            let count = ipow(ipow(ring.p, e[i] - shift), ring.lambda);
            total = total.saturating_mul(count);
            slots.push((i, j, shift, count));
        }
    }
    if total > MATRIX_SCAN_BOUND {
        return Err(Error::TooLarge { size: total as usize, bound: MATRIX_SCAN_BOUND as usize });
    }
    let mut out: Vec<Automorphism> = Vec::new();
    let mut digits = vec![0u64; slots.len()];
    let scale = |k: u64, shift: u32, ci: u32| {
        let sub = ring.with_precision(ci - shift);
        let unit = sub.element(k as Elem);
        let coeffs = unit.coeffs.iter().map(|&v| v * ipow(ring.p, shift)).collect();
        RingElement::new(coeffs)
    };
    for _ in 0..total {
        let mut entries = vec![vec![ring.zero(); r]; r];
        for (&(i, j, shift, _), &d) in slots.iter().zip(&digits) {
            entries[i][j] = scale(d, shift, e[i]);
        }
        let m = ModuleMap { entries };
        if m.invertible_mod_p(&work) {
            let table = m.to_table(&work);
            debug_assert!(is_permutation(&table));
            if is_permutation(&table) {
                out.push(Automorphism { table, matrix: Some((linearity, m)) });
            }
        }
        for (d, &(_, _, _, count)) in digits.iter_mut().zip(&slots).rev() {
            *d += 1;
            if *d < count {
                break;
            }
            *d = 0;
        }
    }
    out.sort_by(|a, b| a.table.cmp(&b.table));
    out.dedup_by(|a, b| a.table == b.table);
    Ok(out)
}

/// Automorphisms of an arbitrary finite abelian group, by choosing images of
/// the cyclic generators. Sorted by table.
pub fn group_automorphisms(group: &AbelianGroup, bound: usize) -> Result<Vec<Vec<Elem>>> {
    if group.size() > bound {
        return Err(Error::TooLarge { size: group.size(), bound });
    }
    let k = group.num_generators();
    let orders = group.orders().to_vec();
    let cands: Vec<Vec<Elem>> = orders.iter().map(|&d| group.torsion(d)).collect();
    let add = |a, b| group.add(a, b);
    let mut out = Vec::new();
    let mut images = Vec::with_capacity(k);
    fn rec(
        level: usize,
        orders: &[u64],
        cands: &[Vec<Elem>],
        images: &mut Vec<Elem>,
        add: &dyn Fn(Elem, Elem) -> Elem,
        size: usize,
        out: &mut Vec<Vec<Elem>>,
    ) {
        if level == orders.len() {
            let dec = Decomposition { family: images.clone(), orders: orders.to_vec(), exponents: vec![] };
            out.push(dec.table(0, add));
            return;
        }
        let want: u64 = orders[..=level].iter().product();
        for &y in &cands[level] {
            images.push(y);
            if crate::abelian::span_of(size, 0, add, images).len() as u64 == want {
                rec(level + 1, orders, cands, images, add, size, out);
            }
            images.pop();
        }
    }
    rec(0, &orders, &cands, &mut images, &add, group.size(), &mut out);
    out.sort();
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gr(p: u64, l: u32, c: u32) -> GaloisRingSpec {
        GaloisRingSpec::construct(p, l, c).unwrap()
    }

    #[test]
    fn shape_normalisation() {
        let s = ModuleShape::new(&gr(2, 1, 3), &[1, 3, 2]).unwrap();
        assert_eq!(s.exponents(), &[3, 2, 1]);
        assert_eq!(s.permutation(), &[1, 2, 0]);
        assert_eq!(s.ring().c, 3);
        assert_eq!(s.size(), 64);
        for k in 0..64 {
            assert_eq!(s.index(&s.element(k)), k);
        }
    }

    #[test]
    fn element_arithmetic() {
        let s = ModuleShape::cyclic(3, &[2, 1]).unwrap();
        let x = ModuleElement { components: vec![RingElement::new(vec![1]), RingElement::new(vec![1])] };
        let three = s.scalar_mul(&s.ring().from_int(3), &x).unwrap();
        assert_eq!(three.components, vec![RingElement::new(vec![3]), RingElement::new(vec![0])]);
        assert_eq!(s.add(&x, &s.neg(&x).unwrap()).unwrap(), s.element(0));
        assert_eq!(s.scalar_mul(&s.ring().one(), &x).unwrap(), x);
    }

    #[test]
    fn hom_condition() {
        let s = ModuleShape::cyclic(2, &[2, 1]).unwrap();
        let one = RingElement::new(vec![1]);
        let zero = RingElement::new(vec![0]);
        let bad = ModuleMap { entries: vec![vec![one.clone(), one.clone()], vec![zero.clone(), one.clone()]] };
        assert_eq!(bad.check_hom(&s), Err(Error::HomCondition { row: 0, col: 1 }));
        let three = ModuleMap::scalar(&s, &s.ring().from_int(3));
        assert!(three.is_bijective(&s).unwrap());
        assert!(ModuleMap::identity(&s).is_bijective(&s).unwrap());
        let two = ModuleMap::scalar(&s, &s.ring().from_int(2));
        assert!(!two.is_bijective(&s).unwrap());
    }

    #[test]
    fn automorphism_counts() {
        let z4 = ModuleShape::cyclic(2, &[2]).unwrap();
        let auts = enumerate_automorphisms(&z4, Linearity::Z, 1 << 12).unwrap();
        let tables: Vec<Vec<Elem>> = auts.iter().map(|a| a.table.clone()).collect();
        assert_eq!(tables, vec![vec![0, 1, 2, 3], vec![0, 3, 2, 1]]);
        let v4 = ModuleShape::cyclic(2, &[1, 1]).unwrap();
        assert_eq!(enumerate_automorphisms(&v4, Linearity::Z, 1 << 12).unwrap().len(), 6);
        let d9 = ModuleShape::new(&gr(3, 2, 2), &[2]).unwrap();
        let units = gr(3, 2, 2).elements().filter(|a| gr(3, 2, 2).is_unit(a)).count();
        assert_eq!(units, 72);
        assert_eq!(enumerate_automorphisms(&d9, Linearity::D, 1 << 12).unwrap().len(), 72);
        let z4z4 = ModuleShape::cyclic(2, &[2, 2]).unwrap();
        assert_eq!(enumerate_automorphisms(&z4z4, Linearity::Z, 1 << 12).unwrap().len(), 96);
    }

    #[test]
    fn matrix_scan_agrees_with_generator_search() {
        for (p, l, exps) in [(2, 1, vec![2, 1]), (2, 1, vec![1, 1, 1]), (3, 1, vec![2]), (3, 1, vec![1, 1]), (2, 2, vec![1, 1])] {
            let s = ModuleShape::from_params(p, l, &exps).unwrap();
            let matrix: Vec<Vec<Elem>> =
                enumerate_automorphisms(&s, Linearity::Z, 1 << 12).unwrap().into_iter().map(|a| a.table).collect();
            let search = group_automorphisms(s.group(), 1 << 12).unwrap();
            assert_eq!(matrix, search, "shape {exps:?} over ({p},{l})");
        }
    }

    #[test]
    fn d_linear_subset_of_z_linear() {
        let s = ModuleShape::new(&gr(2, 2, 1), &[1, 1]).unwrap();
        let z: Vec<Vec<Elem>> = enumerate_automorphisms(&s, Linearity::Z, 1 << 12).unwrap().into_iter().map(|a| a.table).collect();
        let d = enumerate_automorphisms(&s, Linearity::D, 1 << 12).unwrap();
        // |GL_2(F_4)| = 180, |GL_4(F_2)| = 20160
        assert_eq!(d.len(), 180);
        assert_eq!(z.len(), 20160);
        for a in &d {
            assert!(z.binary_search(&a.table).is_ok());
        }
    }

    #[test]
    fn omega_and_pn() {
        let s = ModuleShape::cyclic(2, &[2, 1]).unwrap();
        assert_eq!(s.omega_subgroup(0), vec![0]);
        let om1: Vec<Vec<u64>> = s.omega_subgroup(1).iter().map(|&x| s.group().decode(x)).collect();
        assert_eq!(om1, vec![vec![0, 0], vec![0, 1], vec![2, 0], vec![2, 1]]);
        assert_eq!(s.omega_subgroup(2).len(), 8);
        assert_eq!(s.omega_subgroup(5).len(), 8);
        let d = ModuleShape::new(&gr(3, 2, 2), &[2, 1]).unwrap();
        for i in 0..3 {
            assert!(d.is_submodule(&d.omega_subgroup(i)));
        }
        assert!(d.is_submodule(&d.times_p_image()));
    }

    #[test]
    fn ranks() {
        let d = ModuleShape::new(&gr(3, 2, 2), &[2]).unwrap();
        let r = d.rank_accounting();
        assert_eq!((r.rank_d, r.rank_z, r.rank_z_observed), (1, 2, 2));
        let e = ModuleShape::new(&gr(2, 3, 1), &[1, 1]).unwrap();
        let r = e.rank_accounting();
        assert_eq!((r.rank_d, r.rank_z, r.rank_z_observed), (2, 6, 6));
        let z = ModuleShape::cyclic(5, &[3, 1]).unwrap().rank_accounting();
        assert_eq!(z.rank_d, z.rank_z);
    }

    #[test]
    fn inferred_matrices() {
        let d = ModuleShape::new(&gr(3, 2, 2), &[2]).unwrap();
        let xi = d.xi_table();
        let a = Automorphism::infer(&d, xi);
        assert!(matches!(a.matrix, Some((Linearity::D, _))));
        // the conjugation-like map swapping coefficients is only Z-linear
        let swap: Vec<Elem> = (0..81).map(|x| (x % 9) * 9 + x / 9).collect();
        let a = Automorphism::infer(&d, swap);
        assert!(matches!(a.matrix, Some((Linearity::Z, _))));
    }

    #[test]
    fn additive_stats_examples() {
        assert_eq!(
            ModuleShape::cyclic(2, &[2]).unwrap().additive_stats(),
            OrderStats::from([(1, 1), (2, 1), (4, 2)])
        );
    }
}
