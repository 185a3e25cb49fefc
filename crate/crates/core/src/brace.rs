//! Gamma functions and braces with abelian additive group.
//!
//! A brace on `(N, +)` is stored as its gamma function `x -> gamma_x`, with the
//! automorphisms kept in a deduplicated registry of permutation tables. The
//! circle product is `x o y = x + gamma_x(y)`.

use std::collections::HashMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::abelian::{
    decompose_abelian, decompose_p_module, indicator, order_statistics, AbelianGroup, Cosets, Decomposition, Elem,
    OrderStats,
};
use crate::error::{Error, Result};
use crate::finite_ring::RingAction;
use crate::galois_ring::RingEmbedding;
use crate::module::{enumerate_automorphisms, group_automorphisms, is_permutation, Linearity, ModuleShape};

/// Default bound on `|N|` for isomorphism search.
pub const DEFAULT_ISO_BOUND: usize = 1 << 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum BraceClass {
    NotGamma,
    ZBrace,
    DBrace,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum GammaFailure {
    /// Table sizes or registry references are inconsistent.
    Malformed(String),
    /// `gamma_x(a + b) != gamma_x(a) + gamma_x(b)`.
    NotAdditive { x: Elem, pair: (Elem, Elem) },
    NotBijective { x: Elem },
    /// `gamma(x + gamma_x(y)) != gamma_x gamma_y`.
    Equation { x: Elem, y: Elem },
    /// `gamma_x` does not commute with the scalar `xi` at `y`.
    NotLinear { x: Elem, y: Elem },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GammaVerdict {
    pub class: BraceClass,
    pub failure: Option<GammaFailure>,
}

/// `x -> gamma_x` as registry indices.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GammaFunction {
    pub registry: Vec<Vec<Elem>>,
    pub table: Vec<u32>,
}

impl GammaFunction {
    /// Builds a compact registry from one table per element; entries are
    /// numbered by first occurrence.
    pub fn from_tables(tables: Vec<Vec<Elem>>) -> Self {
        let mut registry: Vec<Vec<Elem>> = Vec::new();
        let mut index: HashMap<Vec<Elem>, u32> = HashMap::new();
        let mut table = Vec::with_capacity(tables.len());
        for t in tables {
            let id = *index.entry(t.clone()).or_insert_with(|| {
                registry.push(t);
                registry.len() as u32 - 1
            });
            table.push(id);
        }
        GammaFunction { registry, table }
    }

    pub fn trivial(n: usize) -> Self {
        GammaFunction { registry: vec![(0..n as Elem).collect()], table: vec![0; n] }
    }

    pub fn map(&self, x: Elem) -> &[Elem] {
        &self.registry[self.table[x as usize] as usize]
    }

    /// Removes unused and duplicate registry entries, renumbering by first use.
    pub fn compact(&self) -> Self {
        Self::from_tables(self.table.iter().map(|&i| self.registry[i as usize].clone()).collect())
    }
}

fn compose(a: &[Elem], b: &[Elem]) -> Vec<Elem> {
    b.iter().map(|&y| a[y as usize]).collect()
}

fn invert(a: &[Elem]) -> Vec<Elem> {
    let mut inv = vec![0; a.len()];
    for (i, &y) in a.iter().enumerate() {
        inv[y as usize] = i as Elem;
    }
    inv
}

/// Checks additivity and bijectivity of every registry entry, the gamma
/// functional equation on all pairs, and finally commutation with `xi` when
/// `xi` (the action of the ring generator) is supplied.
pub fn verify_gamma(group: &AbelianGroup, xi: Option<&[Elem]>, gamma: &GammaFunction) -> GammaVerdict {
    let fail = |f| GammaVerdict { class: BraceClass::NotGamma, failure: Some(f) };
    let n = group.size();
    if gamma.table.len() != n {
        return fail(GammaFailure::Malformed(format!("gamma has {} entries for {} elements", gamma.table.len(), n)));
    }
    if let Some(bad) = gamma.table.iter().find(|&&i| i as usize >= gamma.registry.len()) {
        return fail(GammaFailure::Malformed(format!("registry index {bad} out of range")));
    }
    if gamma.registry.iter().any(|t| t.len() != n || t.iter().any(|&y| y as usize >= n)) {
        return fail(GammaFailure::Malformed("registry tables must be maps on N".into()));
    }
    let mut first_use = vec![None; gamma.registry.len()];
    for (x, &i) in gamma.table.iter().enumerate() {
        first_use[i as usize].get_or_insert(x as Elem);
    }
    for (i, t) in gamma.registry.iter().enumerate() {
        let Some(x) = first_use[i] else { continue };
        if let Some(pair) = group.additivity_witness(t) {
            return fail(GammaFailure::NotAdditive { x, pair });
        }
        if !is_permutation(t) {
            return fail(GammaFailure::NotBijective { x });
        }
    }
    // canonical id per distinct table
    let mut canon_of_table: HashMap<&[Elem], u32> = HashMap::new();
    let canon: Vec<u32> = gamma
        .registry
        .iter()
        .map(|t| {
            let next = canon_of_table.len() as u32;
            *canon_of_table.entry(t.as_slice()).or_insert(next)
        })
        .collect();
    let mut products: HashMap<(u32, u32), Option<u32>> = HashMap::new();
    for x in 0..n as Elem {
        let gx = gamma.map(x);
        let cx = canon[gamma.table[x as usize] as usize];
        for y in 0..n as Elem {
            let cy = canon[gamma.table[y as usize] as usize];
            let want = *products.entry((cx, cy)).or_insert_with(|| {
                let c = compose(gx, gamma.map(y));
                canon_of_table.get(c.as_slice()).copied()
            });
            let z = group.add(x, gx[y as usize]);
            if want != Some(canon[gamma.table[z as usize] as usize]) {
                return fail(GammaFailure::Equation { x, y });
            }
        }
    }
    if let Some(xi) = xi {
        for (i, t) in gamma.registry.iter().enumerate() {
            let Some(x) = first_use[i] else { continue };
            if let Some(y) = (0..n).find(|&y| t[xi[y] as usize] != xi[t[y] as usize]) {
                return GammaVerdict {
                    class: BraceClass::ZBrace,
                    failure: Some(GammaFailure::NotLinear { x, y: y as Elem }),
                };
            }
        }
        return GammaVerdict { class: BraceClass::DBrace, failure: None };
    }
    GammaVerdict { class: BraceClass::ZBrace, failure: None }
}

/// Tables of `x -> r . x` for the generators of an acting ring.
fn generator_actions(act: &RingAction) -> Vec<Vec<Elem>> {
    let rg = act.ring().group();
    (0..rg.num_generators()).map(|i| act.scalar_table(rg.generator(i))).collect()
}

#[derive(Debug, Clone)]
pub struct Brace {
    group: AbelianGroup,
    shape: Option<ModuleShape>,
    gamma: GammaFunction,
    class: BraceClass,
    add_table: Option<Arc<Vec<Elem>>>,
}

impl PartialEq for Brace {
    fn eq(&self, other: &Self) -> bool {
        self.group == other.group && self.shape == other.shape && self.gamma_tables() == other.gamma_tables()
    }
}

const ADD_TABLE_LIMIT: usize = 1024;

impl Brace {
    /// Validates `gamma` and packages the brace. `shape`, when given, must
    /// describe the same additive group.
    pub fn new(group: AbelianGroup, shape: Option<ModuleShape>, gamma: GammaFunction) -> Result<Self> {
        if let Some(s) = &shape {
            if s.group() != &group {
                return Err(Error::ShapeMismatch("shape and group disagree".into()));
            }
        }
        let xi = shape.as_ref().map(|s| s.xi_table());
        let verdict = verify_gamma(&group, xi.as_deref(), &gamma);
        if verdict.class == BraceClass::NotGamma {
            return Err(Error::NotGamma(format!("{:?}", verdict.failure.unwrap())));
        }
        Ok(Self::assemble(group, shape, gamma, verdict.class))
    }

    fn assemble(group: AbelianGroup, shape: Option<ModuleShape>, gamma: GammaFunction, class: BraceClass) -> Self {
        let n = group.size();
        let add_table = (n <= ADD_TABLE_LIMIT).then(|| {
            let mut t = Vec::with_capacity(n * n);
            for x in 0..n as Elem {
                for y in 0..n as Elem {
                    t.push(group.add(x, y));
                }
            }
            Arc::new(t)
        });
        Brace { group, shape, gamma: gamma.compact(), class, add_table }
    }

    pub fn on_shape(shape: &ModuleShape, gamma: GammaFunction) -> Result<Self> {
        Self::new(shape.group().clone(), Some(shape.clone()), gamma)
    }

    pub fn from_tables(group: AbelianGroup, shape: Option<ModuleShape>, tables: Vec<Vec<Elem>>) -> Result<Self> {
        Self::new(group, shape, GammaFunction::from_tables(tables))
    }

    pub fn trivial(group: AbelianGroup, shape: Option<ModuleShape>) -> Self {
        let n = group.size();
        let class = if shape.is_some() { BraceClass::DBrace } else { BraceClass::ZBrace };
        Self::assemble(group, shape, GammaFunction::trivial(n), class)
    }

    pub fn group(&self) -> &AbelianGroup {
        &self.group
    }

    pub fn shape(&self) -> Option<&ModuleShape> {
        self.shape.as_ref()
    }

    pub fn gamma(&self) -> &GammaFunction {
        &self.gamma
    }

    pub fn class(&self) -> BraceClass {
        self.class
    }

    pub fn size(&self) -> usize {
        self.group.size()
    }

    pub fn elements(&self) -> impl Iterator<Item = Elem> {
        self.group.elements()
    }

    pub fn gamma_of(&self, x: Elem) -> &[Elem] {
        self.gamma.map(x)
    }

    pub fn gamma_tables(&self) -> Vec<&[Elem]> {
        (0..self.size() as Elem).map(|x| self.gamma.map(x)).collect()
    }

    #[inline]
    pub fn add(&self, x: Elem, y: Elem) -> Elem {
        match &self.add_table {
            Some(t) => t[x as usize * self.size() + y as usize],
            None => self.group.add(x, y),
        }
    }

    pub fn neg(&self, x: Elem) -> Elem {
        self.group.neg(x)
    }

    pub fn sub(&self, x: Elem, y: Elem) -> Elem {
        self.add(x, self.group.neg(y))
    }

    pub fn circle(&self, x: Elem, y: Elem) -> Elem {
        self.add(x, self.gamma.map(x)[y as usize])
    }

    /// The inverse of `x` in `(N, o)`: `gamma_x^{-1}(-x)`.
    pub fn circle_inverse(&self, x: Elem) -> Elem {
        let target = self.group.neg(x);
        let g = self.gamma.map(x);
        g.iter().position(|&v| v == target).expect("gamma_x is bijective") as Elem
    }

    /// `x * y = gamma_x(y) - y`.
    pub fn star(&self, x: Elem, y: Elem) -> Elem {
        self.sub(self.gamma.map(x)[y as usize], y)
    }

    /// The scalar `xi` on `N`, when a module shape is attached.
    pub fn xi_table(&self) -> Option<Vec<Elem>> {
        self.shape.as_ref().map(|s| s.xi_table())
    }

    pub fn is_trivial(&self) -> bool {
        self.gamma.registry.len() == 1 && self.gamma.registry[0].iter().enumerate().all(|(i, &y)| i as Elem == y)
    }

    pub fn additive_stats(&self) -> OrderStats {
        self.group.order_stats()
    }

    pub fn circle_stats(&self) -> OrderStats {
        let all: Vec<Elem> = self.elements().collect();
        order_statistics(&all, 0, &|a, b| self.circle(a, b)).expect("circle operation of a brace is a group")
    }

    /// The brace with the same gamma but a different module shape (or none).
    pub fn with_shape(&self, shape: Option<ModuleShape>) -> Result<Brace> {
        Brace::new(self.group.clone(), shape, self.gamma.clone())
    }

    /// Transports the brace along an additive isomorphism `f: N -> M`,
    /// giving `gamma'_{f(x)} = f gamma_x f^{-1}`.
    pub fn transport(&self, f: &[Elem], target: AbelianGroup, shape: Option<ModuleShape>) -> Result<Brace> {
        let finv = invert(f);
        let mut tables = vec![Vec::new(); self.size()];
        for x in self.elements() {
            tables[f[x as usize] as usize] = compose(f, &compose(self.gamma.map(x), &finv));
        }
        Brace::from_tables(target, shape, tables)
    }

    /// First `(x, g)` with `gamma_x` not commuting with the generator `g` of
    /// the acting ring.
    pub fn linearity_witness(&self, act: &RingAction) -> Option<(Elem, usize)> {
        let gens = generator_actions(act);
        for x in self.elements() {
            let t = self.gamma.map(x);
            for (gi, r) in gens.iter().enumerate() {
                if (0..self.size()).any(|y| t[r[y] as usize] != r[t[y] as usize]) {
                    return Some((x, gi));
                }
            }
        }
        None
    }
}

/// Derives `gamma_x(y) = -x + x o y` from a circle table (row-major).
pub fn brace_from_circle(group: AbelianGroup, shape: Option<ModuleShape>, circle: &[Elem]) -> Result<Brace> {
    let n = group.size();
    if circle.len() != n * n {
        return Err(Error::Malformed(format!("circle table must have {} entries", n * n)));
    }
    for x in 0..n {
        if circle[x] != x as Elem || circle[x * n] != x as Elem {
            return Err(Error::NotAGroup("0 is not the identity of the circle operation".into()));
        }
    }
    let tables = (0..n)
        .map(|x| (0..n).map(|y| group.sub(circle[x * n + y], x as Elem)).collect())
        .collect();
    Brace::from_tables(group, shape, tables)
}

/// The product brace on `N1 x N2`, indexed as `i1 * |N2| + i2`.
pub fn direct_product(b1: &Brace, b2: &Brace) -> Result<Brace> {
    let shape = match (b1.shape(), b2.shape()) {
        (Some(s1), Some(s2)) => {
            if s1.p() != s2.p() || s1.lambda() != s2.lambda() {
                return Err(Error::ShapeMismatch("factors are modules over different rings".into()));
            }
            let exps: Vec<u32> = s1.exponents().iter().chain(s2.exponents()).copied().collect();
            if exps.windows(2).all(|w| w[0] >= w[1]) {
                let ring = if s1.rank() > 0 { s1.ring() } else { s2.ring() };
                Some(ModuleShape::new(ring, &exps)?)
            } else {
                None
            }
        }
        _ => None,
    };
    let orders: Vec<u64> = b1.group.orders().iter().chain(b2.group.orders()).copied().collect();
    let group = AbelianGroup::new(orders)?;
    let n2 = b2.size() as Elem;
    let mut tables = Vec::with_capacity(group.size());
    for x1 in b1.elements() {
        for x2 in b2.elements() {
            let (g1, g2) = (b1.gamma_of(x1), b2.gamma_of(x2));
            let t = (0..group.size() as Elem).map(|y| g1[(y / n2) as usize] * n2 + g2[(y % n2) as usize]).collect();
            tables.push(t);
        }
    }
    Brace::from_tables(group, shape, tables)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SubsetClassification {
    pub subset: Vec<Elem>,
    pub additive_subgroup: bool,
    pub subbrace: bool,
    pub left_ideal: bool,
    pub ideal: bool,
    /// Closure under the scalar `xi`; `None` without a module shape.
    pub submodule: Option<bool>,
}

pub fn classify_subset(b: &Brace, subset: &[Elem]) -> SubsetClassification {
    let mut s: Vec<Elem> = subset.to_vec();
    s.sort_unstable();
    s.dedup();
    let flags = indicator(b.size(), &s);
    let inside = |x: Elem| flags[x as usize];
    let additive_subgroup = inside(0) && s.iter().all(|&x| s.iter().all(|&y| inside(b.add(x, y))));
    let subbrace = additive_subgroup && s.iter().all(|&x| s.iter().all(|&y| inside(b.circle(x, y))));
    let left_ideal = additive_subgroup && b.elements().all(|x| s.iter().all(|&y| inside(b.gamma_of(x)[y as usize])));
    let ideal = left_ideal
        && b.elements().all(|x| {
            let xinv = b.circle_inverse(x);
            s.iter().all(|&y| inside(b.circle(b.circle(x, y), xinv)))
        });
    let submodule = b.xi_table().map(|xi| s.iter().all(|&x| inside(xi[x as usize])));
    SubsetClassification { subset: s, additive_subgroup, subbrace, left_ideal, ideal, submodule }
}

/// Presents a subgroup of `N` as its own group, module-aware when `xi`
/// preserves it. Returns the presentation and the inclusion table.
fn present_subgroup(b: &Brace, set: &[Elem]) -> Result<(AbelianGroup, Option<ModuleShape>, Vec<Elem>)> {
    let add = |x, y| b.add(x, y);
    if let (Some(shape), Some(xi)) = (b.shape(), b.xi_table()) {
        let flags = indicator(b.size(), set);
        if set.iter().all(|&x| flags[xi[x as usize] as usize]) {
            let fam = |g: Elem| shape.scalar_family(&xi, g);
            let dec = decompose_p_module(b.size(), set, 0, shape.p(), shape.lambda(), &add, &fam)?;
            let sub = ModuleShape::new(shape.ring(), &dec.exponents)?;
            let incl = dec.table(0, &add);
            return Ok((sub.group().clone(), Some(sub), incl));
        }
    }
    let dec = decompose_abelian(b.size(), set, 0, &add)?;
    let group = AbelianGroup::new(dec.orders.clone())?;
    Ok((group, None, dec.table(0, &add)))
}

/// The brace induced on a subbrace, with its inclusion into `N`.
pub fn sub_brace(b: &Brace, subset: &[Elem]) -> Result<(Brace, Vec<Elem>)> {
    let cls = classify_subset(b, subset);
    if !cls.subbrace {
        return Err(Error::Precondition("subset is not a subbrace".into()));
    }
    let (group, shape, incl) = present_subgroup(b, &cls.subset)?;
    let back = invert_partial(&incl, b.size());
    let tables = incl
        .iter()
        .map(|&x| incl.iter().map(|&y| back[b.gamma_of(x)[y as usize] as usize]).collect())
        .collect();
    Ok((Brace::from_tables(group, shape, tables)?, incl))
}

fn invert_partial(incl: &[Elem], universe: usize) -> Vec<Elem> {
    let mut back = vec![Elem::MAX; universe];
    for (i, &x) in incl.iter().enumerate() {
        back[x as usize] = i as Elem;
    }
    back
}

/// `N / I` on least-index coset representatives, presented as a group (or
/// module, when `I` is a submodule) with the induced gamma function.
pub fn quotient_brace(b: &Brace, ideal: &[Elem]) -> Result<(Brace, Vec<Elem>)> {
    let cls = classify_subset(b, ideal);
    if !cls.ideal {
        return Err(Error::NotAnIdeal);
    }
    let add = |x, y| b.add(x, y);
    let cosets = Cosets::new(b.size(), &add, &cls.subset);
    let class_add = |x, y| cosets.add(&add, x, y);
    let classes: Vec<Elem> = (0..cosets.len() as Elem).collect();
    let (dec, shape): (Decomposition, Option<ModuleShape>) = match (b.shape(), b.xi_table(), cls.submodule) {
        (Some(s), Some(xi), Some(true)) => {
            let fam = |c: Elem| {
                let mut out = vec![c];
                for _ in 1..s.lambda() {
                    let prev = cosets.reps[*out.last().unwrap() as usize];
                    out.push(cosets.class_of[xi[prev as usize] as usize]);
                }
                out
            };
            let dec = decompose_p_module(cosets.len(), &classes, 0, s.p(), s.lambda(), &class_add, &fam)?;
            let shape = ModuleShape::new(s.ring(), &dec.exponents)?;
            (dec, Some(shape))
        }
        _ => (decompose_abelian(cosets.len(), &classes, 0, &class_add)?, None),
    };
    let (group, to_class, to_index) = cosets.presentation(&dec, &add)?;
    let tables = to_class
        .iter()
        .map(|&cx| {
            let g = b.gamma_of(cosets.reps[cx as usize]);
            to_class
                .iter()
                .map(|&cy| to_index[cosets.class_of[g[cosets.reps[cy as usize] as usize] as usize] as usize])
                .collect()
        })
        .collect();
    let projection = (0..b.size()).map(|x| to_index[cosets.class_of[x] as usize]).collect();
    Ok((Brace::from_tables(group, shape, tables)?, projection))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum IsoMode {
    Brace,
    RBrace,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Fingerprint {
    pub additive: OrderStats,
    pub circle: OrderStats,
    pub rank: usize,
}

pub fn fingerprint(b: &Brace) -> Fingerprint {
    Fingerprint { additive: b.additive_stats(), circle: b.circle_stats(), rank: b.group.torsion_rank() }
}

/// Canonical presentation used by isomorphism search: a decomposition of
/// `(N, +)` (module-aware in `RBrace` mode) and the resulting table.
fn canonical_frame(b: &Brace, mode: IsoMode) -> Result<(Vec<u64>, Vec<u32>, Vec<Elem>)> {
    let all: Vec<Elem> = b.elements().collect();
    let add = |x, y| b.add(x, y);
    let dec = match mode {
        IsoMode::Brace => decompose_abelian(b.size(), &all, 0, &add)?,
        IsoMode::RBrace => {
            let shape = b.shape().ok_or_else(|| Error::Precondition("R-brace mode needs module shapes".into()))?;
            let xi = shape.xi_table();
            let fam = |g: Elem| shape.scalar_family(&xi, g);
            decompose_p_module(b.size(), &all, 0, shape.p(), shape.lambda(), &add, &fam)?
        }
    };
    let table = dec.table(0, &add);
    Ok((dec.orders, dec.exponents, table))
}

/// First additive (or `D`-linear) isomorphism `f: N1 -> N2` with
/// `f gamma_x f^{-1} = gamma'_{f(x)}` for all `x`, in the canonical order of
/// candidate automorphisms.
pub fn find_isomorphism(b1: &Brace, b2: &Brace, mode: IsoMode) -> Result<Option<Vec<Elem>>> {
    let bound = crate::size_bound(DEFAULT_ISO_BOUND);
    if b1.size() > bound {
        return Err(Error::TooLarge { size: b1.size(), bound });
    }
    if b1.size() != b2.size() || fingerprint(b1) != fingerprint(b2) {
        return Ok(None);
    }
    if mode == IsoMode::RBrace {
        match (b1.shape(), b2.shape()) {
            (Some(s1), Some(s2)) if s1.p() == s2.p() && s1.lambda() == s2.lambda() => {}
            _ => return Ok(None),
        }
    }
    let (o1, e1, t1) = canonical_frame(b1, mode)?;
    let (o2, e2, t2) = canonical_frame(b2, mode)?;
    if o1 != o2 || e1 != e2 {
        return Ok(None);
    }
    let candidates: Vec<Vec<Elem>> = match mode {
        IsoMode::Brace => group_automorphisms(&AbelianGroup::new(o1)?, bound)?,
        IsoMode::RBrace => {
            let canon = ModuleShape::new(b1.shape().unwrap().ring(), &e1)?;
            enumerate_automorphisms(&canon, Linearity::D, bound)?.into_iter().map(|a| a.table).collect()
        }
    };
    let t1_inv = invert(&t1);
    for alpha in candidates {
        let f: Vec<Elem> = (0..b1.size()).map(|x| t2[alpha[t1_inv[x] as usize] as usize]).collect();
        if is_brace_morphism(b1, b2, &f) {
            return Ok(Some(f));
        }
    }
    Ok(None)
}

/// `f(gamma_x(y)) = gamma'_{f(x)}(f(y))` for all `x, y`.
pub fn is_brace_morphism(b1: &Brace, b2: &Brace, f: &[Elem]) -> bool {
    b1.elements().all(|x| {
        let g = b1.gamma_of(x);
        let h = b2.gamma_of(f[x as usize]);
        (0..b1.size()).all(|y| f[g[y] as usize] == h[f[y] as usize])
    })
}

/// First triple violating `(x + y) o z = x o z - z + y o z`.
pub fn two_sided_check(b: &Brace) -> Option<(Elem, Elem, Elem)> {
    for x in b.elements() {
        for y in b.elements() {
            let xy = b.add(x, y);
            for z in b.elements() {
                let rhs = b.add(b.sub(b.circle(x, z), z), b.circle(y, z));
                if b.circle(xy, z) != rhs {
                    return Some((x, y, z));
                }
            }
        }
    }
    None
}

/// The radical ring `(N, +, *)` of a two-sided brace.
pub fn brace_to_radical_ring(b: &Brace) -> Result<crate::radical_ring::NilpotentRing> {
    if two_sided_check(b).is_some() {
        return Err(Error::NotTwoSided);
    }
    let g = &b.group;
    let k = g.num_generators();
    let mul = (0..k)
        .map(|i| (0..k).map(|j| g.decode(b.star(g.generator(i), g.generator(j)))).collect())
        .collect();
    let ring = crate::radical_ring::NilpotentRing::new(g.orders().to_vec(), mul, b.shape().cloned())?;
    for x in b.elements() {
        for y in b.elements() {
            if ring.mul(x, y) != b.star(x, y) {
                return Err(Error::Precondition("star product is not bilinear".into()));
            }
        }
    }
    if !ring.validate().valid {
        return Err(Error::Precondition("star product does not give a nilpotent ring".into()));
    }
    Ok(ring)
}

/// Views an `S`-brace as a `D`-brace through `phi: D -> S`, presenting `N`
/// as a `D`-module. Returns the new brace and the table from its element
/// indices to `N`.
pub fn restrict_scalars(b: &Brace, act: &RingAction, phi: &RingEmbedding) -> Result<(Brace, Vec<Elem>)> {
    if act.module() != b.group() {
        return Err(Error::ShapeMismatch("action is on a different group".into()));
    }
    if act.ring() != &phi.target {
        return Err(Error::ShapeMismatch("embedding targets a different ring".into()));
    }
    phi.verify_exhaustive()?;
    if let Some((x, _)) = b.linearity_witness(act) {
        return Err(Error::NotGamma(format!("gamma_{x} is not linear over the acting ring")));
    }
    let spec = &phi.source;
    let xi = act.scalar_table(phi.xi_image);
    let all: Vec<Elem> = b.elements().collect();
    let add = |x, y| b.add(x, y);
    let fam = |g: Elem| {
        let mut out = vec![g];
        for _ in 1..spec.lambda {
            out.push(xi[*out.last().unwrap() as usize]);
        }
        out
    };
    let dec = decompose_p_module(b.size(), &all, 0, spec.p, spec.lambda, &add, &fam)?;
    let shape = ModuleShape::new(spec, &dec.exponents)?;
    let t = dec.table(0, &add);
    let restricted = b.transport(&invert(&t), shape.group().clone(), Some(shape))?;
    if restricted.class() != BraceClass::DBrace {
        return Err(Error::Precondition("restricted brace is not linear over the Galois ring".into()));
    }
    Ok((restricted, t))
}

#[derive(Debug, Clone, Serialize)]
pub struct PeirceBraceSummand {
    pub idempotent: Elem,
    pub elements: Vec<Elem>,
    pub left_ideal: bool,
    pub ideal: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct PeirceBraceReport {
    /// Every gamma_x commutes with the ring action.
    pub linear: bool,
    pub summands: Vec<PeirceBraceSummand>,
    pub all_ideals: bool,
    /// The splitting map to the product of summands is a brace isomorphism.
    pub product_isomorphism: bool,
    /// `gamma_x(y) = sum_j gamma_{x_j}(y_j)`.
    pub gamma_splits: bool,
    /// `x * y = sum_j x_j * y_j`.
    pub star_splits: bool,
    /// The four conditions agree.
    pub conditions_agree: bool,
    /// Order statistics of `(N, o)` equal those of the product of summands.
    pub product_circle_stats_match: Option<bool>,
}

/// Splits a module brace along the primitive idempotents of the acting ring.
pub fn peirce_split_brace(b: &Brace, act: &RingAction) -> Result<PeirceBraceReport> {
    if act.module() != b.group() {
        return Err(Error::ShapeMismatch("action is on a different group".into()));
    }
    let linear = b.linearity_witness(act).is_none();
    let idem = act.ring().primitive_idempotents()?;
    let proj: Vec<Vec<Elem>> = idem.iter().map(|&e| act.scalar_table(e)).collect();
    let mut summands = Vec::new();
    let mut parts = Vec::new();
    for (&e, pr) in idem.iter().zip(&proj) {
        let mut elems = pr.clone();
        elems.sort_unstable();
        elems.dedup();
        if elems.len() == 1 {
            continue;
        }
        let cls = classify_subset(b, &elems);
        summands.push(PeirceBraceSummand { idempotent: e, elements: elems, left_ideal: cls.left_ideal, ideal: cls.ideal });
        parts.push(pr);
    }
    let all_ideals = summands.iter().all(|s| s.ideal);
    let sum_over = |f: &dyn Fn(&[Elem]) -> Elem| parts.iter().fold(0, |acc, pr| b.add(acc, f(pr)));
    let mut product_isomorphism = true;
    let mut gamma_splits = true;
    let mut star_splits = true;
    for x in b.elements() {
        for y in b.elements() {
            let xy = b.circle(x, y);
            if parts.iter().any(|pr| pr[xy as usize] != b.circle(pr[x as usize], pr[y as usize])) {
                product_isomorphism = false;
            }
            if b.gamma_of(x)[y as usize] != sum_over(&|pr| b.gamma_of(pr[x as usize])[pr[y as usize] as usize]) {
                gamma_splits = false;
            }
            if b.star(x, y) != sum_over(&|pr| b.star(pr[x as usize], pr[y as usize])) {
                star_splits = false;
            }
        }
    }
    let conditions_agree = [product_isomorphism, gamma_splits, star_splits].iter().all(|&c| c == all_ideals);
    let product_circle_stats_match = if all_ideals && !summands.is_empty() {
        let mut product: Option<Brace> = None;
        for s in &summands {
            let (sb, _) = sub_brace(b, &s.elements)?;
            product = Some(match product {
                None => sb,
                Some(p) => direct_product(&p, &sb)?,
            });
        }
        Some(product.unwrap().circle_stats() == b.circle_stats())
    } else {
        None
    };
    Ok(PeirceBraceReport {
        linear,
        summands,
        all_ideals,
        product_isomorphism,
        gamma_splits,
        star_splits,
        conditions_agree,
        product_circle_stats_match,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::radical_ring::NilpotentRing;

    fn two_z8() -> Brace {
        NilpotentRing::multiples(2, 8).unwrap().brace().unwrap()
    }

    #[test]
    fn trivial_brace_is_d_brace() {
        let s = ModuleShape::from_params(3, 2, &[1]).unwrap();
        let b = Brace::on_shape(&s, GammaFunction::trivial(9)).unwrap();
        assert_eq!(b.class(), BraceClass::DBrace);
        for x in b.elements() {
            for y in b.elements() {
                assert_eq!(b.circle(x, y), b.add(x, y));
                assert_eq!(b.star(x, y), 0);
            }
        }
    }

    #[test]
    fn adjoint_brace_of_2z8() {
        let b = two_z8();
        assert_eq!(b.class(), BraceClass::DBrace);
        // element k stands for 2k in 2Z/8Z
        assert_eq!(b.circle(1, 1), 0);
        assert_eq!(b.star(1, 1), 2);
        assert_eq!(b.circle_stats(), OrderStats::from([(1, 1), (2, 3)]));
        for x in b.elements() {
            assert_eq!(b.circle(x, b.circle_inverse(x)), 0);
            assert_eq!(b.star(x, 0), 0);
            assert_eq!(b.star(0, x), 0);
        }
    }

    #[test]
    fn circle_round_trip() {
        let b = two_z8();
        let n = b.size();
        let table: Vec<Elem> = (0..n * n).map(|k| b.circle((k / n) as Elem, (k % n) as Elem)).collect();
        let back = brace_from_circle(b.group().clone(), b.shape().cloned(), &table).unwrap();
        assert_eq!(back, b);
        let z4 = AbelianGroup::new(vec![4]).unwrap();
        let plus: Vec<Elem> = (0..16).map(|k| z4.add(k / 4, k % 4)).collect();
        assert!(brace_from_circle(z4.clone(), None, &plus).unwrap().is_trivial());
        // relabel Z/4 swapping 1 and 2: sigma(a) o sigma(b) = sigma(a + b)
        let sigma = [0, 2, 1, 3];
        let mut relabeled = vec![0; 16];
        for a in 0..4 {
            for b in 0..4 {
                relabeled[sigma[a] * 4 + sigma[b]] = sigma[(a + b) % 4] as Elem;
            }
        }
        assert!(matches!(brace_from_circle(z4, None, &relabeled), Err(Error::NotGamma(_))));
    }

    #[test]
    fn products() {
        let b = two_z8();
        let z2 = Brace::trivial(AbelianGroup::new(vec![2]).unwrap(), Some(ModuleShape::cyclic(2, &[1]).unwrap()));
        let p = direct_product(&b, &z2).unwrap();
        assert_eq!(p.size(), 8);
        assert_eq!(p.circle_stats(), OrderStats::from([(1, 1), (2, 7)]));
        assert_eq!(p.shape().unwrap().exponents(), &[2, 1]);
        let zero = Brace::trivial(AbelianGroup::trivial(), None);
        let q = direct_product(&b, &zero).unwrap();
        assert_eq!(q.gamma_tables(), b.gamma_tables());
        let t = direct_product(&z2, &z2).unwrap();
        assert!(t.is_trivial());
    }

    #[test]
    fn subsets_and_quotients() {
        let b = two_z8();
        assert!(classify_subset(&b, &[0]).ideal);
        let half = classify_subset(&b, &[0, 2]);
        assert!(half.ideal && half.left_ideal && half.subbrace);
        let (q, _) = quotient_brace(&b, &[0, 2]).unwrap();
        assert_eq!(q.size(), 2);
        assert!(q.is_trivial());
        let (whole, _) = quotient_brace(&b, &[0, 1, 2, 3]).unwrap();
        assert_eq!(whole.size(), 1);
        let (same, proj) = quotient_brace(&b, &[0]).unwrap();
        assert_eq!(proj, vec![0, 1, 2, 3]);
        assert_eq!(same.gamma_tables(), b.gamma_tables());
        assert!(matches!(quotient_brace(&b, &[0, 1]), Err(Error::NotAnIdeal)));
        let triv = Brace::trivial(AbelianGroup::new(vec![2, 2]).unwrap(), None);
        for sub in [vec![0, 1], vec![0, 2], vec![0, 3]] {
            assert!(classify_subset(&triv, &sub).ideal);
        }
    }

    #[test]
    fn isomorphisms() {
        let b = two_z8();
        let f = find_isomorphism(&b, &b, IsoMode::Brace).unwrap().unwrap();
        assert_eq!(f, vec![0, 1, 2, 3]);
        let z4 = Brace::trivial(AbelianGroup::new(vec![4]).unwrap(), None);
        let v4 = Brace::trivial(AbelianGroup::new(vec![2, 2]).unwrap(), None);
        assert_eq!(find_isomorphism(&z4, &v4, IsoMode::Brace).unwrap(), None);
        assert_eq!(find_isomorphism(&b, &z4, IsoMode::Brace).unwrap(), None);
        // transported copy is found again
        let moved = b.transport(&[0, 3, 2, 1], b.group().clone(), b.shape().cloned()).unwrap();
        let f = find_isomorphism(&b, &moved, IsoMode::RBrace).unwrap().unwrap();
        assert!(is_brace_morphism(&b, &moved, &f));
    }

    #[test]
    fn two_sided_round_trip() {
        let b = two_z8();
        assert_eq!(two_sided_check(&b), None);
        let ring = brace_to_radical_ring(&b).unwrap();
        assert_eq!(ring, NilpotentRing::multiples(2, 8).unwrap());
        let triv = Brace::trivial(AbelianGroup::new(vec![3]).unwrap(), None);
        let zero = brace_to_radical_ring(&triv).unwrap();
        assert!(zero.elements().all(|x| zero.elements().all(|y| zero.mul(x, y) == 0)));
    }

    #[test]
    fn identity_restriction() {
        let b = two_z8();
        let shape = b.shape().unwrap().clone();
        let act = shape.ring_action();
        let emb = crate::galois_ring::embed_into_local_ring(shape.ring(), act.ring()).unwrap();
        let (r, t) = restrict_scalars(&b, &act, &emb).unwrap();
        assert_eq!(r.class(), BraceClass::DBrace);
        assert!(is_brace_morphism(&r, &b, &t));
    }
}
