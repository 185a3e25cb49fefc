//! Finite commutative unital rings given by structure constants on a cyclic
//! decomposition of the additive group, and their actions on finite abelian
//! groups.

use serde::{Deserialize, Serialize};

use crate::abelian::{decompose_abelian, decompose_p_module, indicator, span_of, AbelianGroup, Cosets, Elem};
use crate::arith::{exact_log, gcd, prime_power};
use crate::error::{Error, Result};
use crate::galois_ring::{embed_into_local_ring, GaloisRingSpec, RingEmbedding};

/// Default bound on ring size for the brute-force scans.
pub const DEFAULT_RING_BOUND: usize = 1 << 16;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RingDoc", into = "RingDoc")]
pub struct FiniteCommRing {
    group: AbelianGroup,
    mul: Vec<Vec<Vec<u64>>>,
    one: Vec<u64>,
    gen_prod: Vec<Vec<Elem>>,
    one_idx: Elem,
}

#[derive(Serialize, Deserialize)]
struct RingDoc {
    orders: Vec<u64>,
    mul: Vec<Vec<Vec<u64>>>,
    one: Vec<u64>,
}

impl TryFrom<RingDoc> for FiniteCommRing {
    type Error = Error;
    fn try_from(doc: RingDoc) -> Result<Self> {
        FiniteCommRing::new(doc.orders, doc.mul, doc.one)
    }
}

impl From<FiniteCommRing> for RingDoc {
    fn from(r: FiniteCommRing) -> Self {
        RingDoc { orders: r.group.orders().to_vec(), mul: r.mul, one: r.one }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub valid: bool,
    pub violations: Vec<String>,
}

impl ValidationReport {
    fn from(violations: Vec<String>) -> Self {
        ValidationReport { valid: violations.is_empty(), violations }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LocalInfo {
    pub is_local: bool,
    /// Elements of the maximal ideal (empty when not local).
    pub maximal_ideal: Vec<Elem>,
    /// A small generating set of the maximal ideal as an ideal.
    pub generators: Vec<Elem>,
    /// Residue characteristic and degree `(p, lambda)`; `(0, 0)` if not local.
    pub residue: (u64, u32),
}

fn check_table(group: &AbelianGroup, rows: usize, cols: usize, table: &[Vec<Vec<u64>>], what: &str) -> Result<()> {
    if table.len() != rows || table.iter().any(|r| r.len() != cols) {
        return Err(Error::Malformed(format!("{what} table must be {rows}x{cols}")));
    }
    if table.iter().flatten().any(|v| v.len() != group.num_generators()) {
        return Err(Error::Malformed(format!("{what} entries must have {} coordinates", group.num_generators())));
    }
    Ok(())
}

impl FiniteCommRing {
    pub fn new(orders: Vec<u64>, mul: Vec<Vec<Vec<u64>>>, one: Vec<u64>) -> Result<Self> {
        let group = AbelianGroup::new(orders)?;
        let k = group.num_generators();
        check_table(&group, k, k, &mul, "multiplication")?;
        if one.len() != k {
            return Err(Error::Malformed("unity has the wrong number of coordinates".into()));
        }
        let gen_prod = mul.iter().map(|row| row.iter().map(|v| group.encode(v)).collect()).collect();
        let one_idx = group.encode(&one);
        Ok(FiniteCommRing { group, mul, one, gen_prod, one_idx })
    }

    pub fn integers_mod(m: u64) -> Result<Self> {
        if m < 2 {
            return Err(Error::InvalidParameter("modulus must be at least 2".into()));
        }
        Self::new(vec![m], vec![vec![vec![1]]], vec![1])
    }

    pub fn galois(spec: &GaloisRingSpec) -> Self {
        spec.to_finite_ring()
    }

    /// `(Z/m)[t]/(f)` for monic `f`, coefficients low to high.
    pub fn polynomial_quotient(m: u64, f: &[u64]) -> Result<Self> {
        let d = f.len().checked_sub(1).filter(|&d| d >= 1).ok_or_else(|| {
            Error::InvalidParameter("modulus polynomial must have positive degree".into())
        })?;
        if f[d] % m != 1 % m {
            return Err(Error::InvalidParameter("modulus polynomial must be monic".into()));
        }
        let reduce = |mut v: Vec<u64>| -> Vec<u64> {
            while v.len() > d {
                let lead = v.pop().unwrap() % m;
                let off = v.len() - d;
                for i in 0..d {
                    v[off + i] = (v[off + i] + (m - lead) * (f[i] % m)) % m;
                }
            }
            v.resize(d, 0);
            v
        };
        let mul = (0..d)
            .map(|i| {
                (0..d)
                    .map(|j| {
                        let mut v = vec![0; i + j + 1];
                        v[i + j] = 1;
                        reduce(v)
                    })
                    .collect()
            })
            .collect();
        let mut one = vec![0; d];
        one[0] = 1;
        Self::new(vec![m; d], mul, one)
    }

    /// Direct product with componentwise operations.
    pub fn product(rings: &[FiniteCommRing]) -> Result<Self> {
        let orders: Vec<u64> = rings.iter().flat_map(|r| r.group.orders().iter().copied()).collect();
        let k = orders.len();
        let mut mul = vec![vec![vec![0; k]; k]; k];
        let mut one = Vec::with_capacity(k);
        let mut off = 0;
        for r in rings {
            let kr = r.group.num_generators();
            for i in 0..kr {
                for j in 0..kr {
                    for (t, &v) in r.mul[i][j].iter().enumerate() {
                        mul[off + i][off + j][off + t] = v;
                    }
                }
            }
            one.extend(&r.one);
            off += kr;
        }
        Self::new(orders, mul, one)
    }

    pub fn group(&self) -> &AbelianGroup {
        &self.group
    }

    pub fn size(&self) -> usize {
        self.group.size()
    }

    pub fn structure_constants(&self) -> &[Vec<Vec<u64>>] {
        &self.mul
    }

    pub fn elements(&self) -> impl Iterator<Item = Elem> {
        self.group.elements()
    }

    pub fn encode(&self, coords: &[u64]) -> Elem {
        self.group.encode(coords)
    }

    pub fn decode(&self, x: Elem) -> Vec<u64> {
        self.group.decode(x)
    }

    pub fn one(&self) -> Elem {
        self.one_idx
    }

    pub fn add(&self, a: Elem, b: Elem) -> Elem {
        self.group.add(a, b)
    }

    pub fn sub(&self, a: Elem, b: Elem) -> Elem {
        self.group.sub(a, b)
    }

    pub fn neg(&self, a: Elem) -> Elem {
        self.group.neg(a)
    }

    pub fn mul_int(&self, k: i128, a: Elem) -> Elem {
        self.group.mul_int(k, a)
    }

    pub fn from_int(&self, k: i128) -> Elem {
        self.group.mul_int(k, self.one_idx)
    }

    pub fn mul(&self, a: Elem, b: Elem) -> Elem {
        let ca = self.group.decode(a);
        let cb = self.group.decode(b);
        let mut acc = 0;
        for (i, &x) in ca.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in cb.iter().enumerate() {
                if y == 0 {
                    continue;
                }
                acc = self.group.add(acc, self.group.mul_int((x * y) as i128, self.gen_prod[i][j]));
            }
        }
        acc
    }

    pub fn pow(&self, a: Elem, mut e: u64) -> Elem {
        let mut base = a;
        let mut acc = self.one_idx;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    /// Additive order of 1.
    pub fn characteristic(&self) -> u64 {
        self.group.order(self.one_idx)
    }

    pub fn validate(&self) -> ValidationReport {
        let g = &self.group;
        let k = g.num_generators();
        let d = g.orders();
        let mut v = Vec::new();
        for i in 0..k {
            for j in 0..k {
                let prod = self.gen_prod[i][j];
                if g.mul_int(d[i] as i128, prod) != 0 {
                    v.push(format!("bilinearity: d_{i} * (g_{i} g_{j}) != 0"));
                }
                if prod != self.gen_prod[j][i] {
                    v.push(format!("commutativity fails for generators {i}, {j}"));
                }
                for l in 0..k {
                    let left = self.mul(prod, g.generator(l));
                    let right = self.mul(g.generator(i), self.gen_prod[j][l]);
                    if left != right {
                        v.push(format!("associativity fails for generators {i}, {j}, {l}"));
                    }
                }
            }
            if self.mul(self.one_idx, g.generator(i)) != g.generator(i) {
                v.push(format!("unity does not fix generator {i}"));
            }
        }
        ValidationReport::from(v)
    }

    fn bound_check(&self) -> Result<()> {
        let bound = crate::size_bound(DEFAULT_RING_BOUND);
        if self.size() > bound {
            return Err(Error::TooLarge { size: self.size(), bound });
        }
        Ok(())
    }

    pub fn is_unit(&self, a: Elem) -> bool {
        self.elements().any(|y| self.mul(a, y) == self.one_idx)
    }

    pub fn inverse(&self, a: Elem) -> Result<Elem> {
        self.elements()
            .find(|&y| self.mul(a, y) == self.one_idx)
            .ok_or_else(|| Error::NotUnit(format!("{:?}", self.decode(a))))
    }

    pub fn idempotents(&self) -> Result<Vec<Elem>> {
        self.bound_check()?;
        Ok(self.elements().filter(|&e| self.mul(e, e) == e).collect())
    }

    /// The complete set of primitive orthogonal idempotents, by index.
    pub fn primitive_idempotents(&self) -> Result<Vec<Elem>> {
        let all = self.idempotents()?;
        let prim: Vec<Elem> = all
            .iter()
            .copied()
            .filter(|&e| e != 0 && all.iter().all(|&f| self.mul(e, f) != f || f == 0 || f == e))
            .collect();
        let sum = prim.iter().fold(0, |acc, &e| self.add(acc, e));
        let orthogonal = prim
            .iter()
            .enumerate()
            .all(|(i, &a)| prim[i + 1..].iter().all(|&b| self.mul(a, b) == 0));
        if sum != self.one_idx || !orthogonal {
            return Err(Error::Precondition("primitive idempotents are not complete".into()));
        }
        Ok(prim)
    }

    /// Ideal generated by `gens`: the additive span of all multiples.
    pub fn ideal(&self, gens: &[Elem]) -> Vec<Elem> {
        let add = |a, b| self.group.add(a, b);
        let k = self.group.num_generators();
        let mut spanning = Vec::new();
        for &x in gens {
            spanning.push(x);
            for i in 0..k {
                spanning.push(self.mul(x, self.group.generator(i)));
            }
        }
        // closure under multiplication by ring generators
        let mut ideal = span_of(self.size(), 0, &add, &spanning);
        loop {
            let member = indicator(self.size(), &ideal);
            let extra: Vec<Elem> = ideal
                .iter()
                .flat_map(|&x| (0..k).map(move |i| (x, i)))
                .map(|(x, i)| self.mul(x, self.group.generator(i)))
                .filter(|&y| !member[y as usize])
                .collect();
            if extra.is_empty() {
                return ideal;
            }
            spanning.extend(extra);
            ideal = span_of(self.size(), 0, &add, &spanning);
        }
    }

    pub fn local_info(&self) -> Result<LocalInfo> {
        self.bound_check()?;
        let nonunits: Vec<Elem> = self.elements().filter(|&x| !self.is_unit(x)).collect();
        let flags = indicator(self.size(), &nonunits);
        let closed = nonunits
            .iter()
            .all(|&a| nonunits.iter().all(|&b| flags[self.add(a, b) as usize]));
        if !closed {
            return Ok(LocalInfo { is_local: false, maximal_ideal: vec![], generators: vec![], residue: (0, 0) });
        }
        let residue_size = (self.size() / nonunits.len()) as u64;
        let (p, lambda) = prime_power(residue_size).ok_or_else(|| Error::Precondition("residue field size".into()))?;
        // greedy generators, preferring elements supported on early coordinates
        let mut cands: Vec<Elem> = nonunits.iter().copied().filter(|&x| x != 0).collect();
        cands.sort_by_key(|&x| self.decode(x).into_iter().rev().collect::<Vec<_>>());
        let mut generators = Vec::new();
        let mut current = vec![0];
        for x in cands {
            if current.binary_search(&x).is_err() {
                generators.push(x);
                current = self.ideal(&generators);
            }
            if current.len() == nonunits.len() {
                break;
            }
        }
        Ok(LocalInfo { is_local: true, maximal_ideal: nonunits, generators, residue: (p, lambda) })
    }

    /// `A / I` for an ideal `I`, with the projection `A -> A/I` by index.
    pub fn quotient(&self, ideal: &[Elem]) -> Result<(FiniteCommRing, Vec<Elem>)> {
        let member = indicator(self.size(), ideal);
        for &x in ideal {
            for i in 0..self.group.num_generators() {
                if !member[self.mul(x, self.group.generator(i)) as usize] {
                    return Err(Error::NotAnIdeal);
                }
            }
        }
        let add = |a, b| self.group.add(a, b);
        let cosets = Cosets::new(self.size(), &add, ideal);
        let class_add = |a, b| cosets.add(&add, a, b);
        let classes: Vec<Elem> = (0..cosets.len() as Elem).collect();
        let dec = decompose_abelian(cosets.len(), &classes, 0, &class_add)?;
        let (qgroup, _, to_index) = cosets.presentation(&dec, &add)?;
        let proj: Vec<Elem> = (0..self.size()).map(|x| to_index[cosets.class_of[x] as usize]).collect();
        let gens: Vec<Elem> = dec.family.iter().map(|&c| cosets.reps[c as usize]).collect();
        let mul = gens
            .iter()
            .map(|&a| gens.iter().map(|&b| qgroup.decode(proj[self.mul(a, b) as usize])).collect())
            .collect();
        let one = qgroup.decode(proj[self.one_idx as usize]);
        let ring = FiniteCommRing::new(qgroup.orders().to_vec(), mul, one)?;
        Ok((ring, proj))
    }
}

/// A ring acting on a finite abelian group by structure constants.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "ActionDoc", into = "ActionDoc")]
pub struct RingAction {
    ring: FiniteCommRing,
    module: AbelianGroup,
    table: Vec<Vec<Vec<u64>>>,
    gen_act: Vec<Vec<Elem>>,
}

#[derive(Serialize, Deserialize)]
struct ActionDoc {
    ring: FiniteCommRing,
    module: AbelianGroup,
    table: Vec<Vec<Vec<u64>>>,
}

impl TryFrom<ActionDoc> for RingAction {
    type Error = Error;
    fn try_from(doc: ActionDoc) -> Result<Self> {
        RingAction::new(doc.ring, doc.module, doc.table)
    }
}

impl From<RingAction> for ActionDoc {
    fn from(a: RingAction) -> Self {
        ActionDoc { ring: a.ring, module: a.module, table: a.table }
    }
}

/// One summand `N_i = e_i N` of a Peirce splitting.
#[derive(Debug, Clone)]
pub struct PeirceSummand {
    pub idempotent: Elem,
    /// Elements of `N_i` inside `N`, increasing.
    pub elements: Vec<Elem>,
    /// `A_i = A / (1 - e_i) A`.
    pub local_ring: FiniteCommRing,
    /// Projection `A -> A_i` by index.
    pub ring_projection: Vec<Elem>,
    /// Action of `A_i` on `N_i`, the latter presented as its own group.
    pub action: RingAction,
    /// Index in the presented `N_i` -> element of `N`.
    pub inclusion: Vec<Elem>,
}

#[derive(Debug, Clone)]
pub struct PadicSummand {
    pub p: u64,
    pub lambda: u32,
    pub c: u32,
    pub embedding: RingEmbedding,
    /// Cyclic exponents of `N_i` as a `GR(p, c, lambda)`-module.
    pub exponents: Vec<u32>,
    pub elements: Vec<Elem>,
}

#[derive(Debug, Clone)]
pub struct CommonStructure {
    pub spec: GaloisRingSpec,
    pub exponents: Vec<u32>,
    /// Action of the generator of the common Galois ring on `N`.
    pub xi_action: Vec<Elem>,
}

#[derive(Debug, Clone)]
pub struct PadicStructure {
    pub faithful_ring: FiniteCommRing,
    pub summands: Vec<PadicSummand>,
    /// gcd of the residue degrees.
    pub lambda: u32,
    pub common: Option<CommonStructure>,
}

impl RingAction {
    pub fn new(ring: FiniteCommRing, module: AbelianGroup, table: Vec<Vec<Vec<u64>>>) -> Result<Self> {
        let k = ring.group().num_generators();
        let m = module.num_generators();
        check_table(&module, k, m, &table, "action")?;
        let gen_act = table.iter().map(|row| row.iter().map(|v| module.encode(v)).collect()).collect();
        Ok(RingAction { ring, module, table, gen_act })
    }

    /// Builds an action from a closure giving `r . m` on generators.
    pub fn from_fn(ring: FiniteCommRing, module: AbelianGroup, f: impl Fn(Elem, Elem) -> Elem) -> Result<Self> {
        let rg = ring.group().clone();
        let table = (0..rg.num_generators())
            .map(|i| {
                (0..module.num_generators())
                    .map(|j| module.decode(f(rg.generator(i), module.generator(j))))
                    .collect()
            })
            .collect();
        Self::new(ring, module, table)
    }

    /// A ring acting on itself by multiplication.
    pub fn regular(ring: FiniteCommRing) -> Self {
        let module = ring.group().clone();
        let r = ring.clone();
        Self::from_fn(ring, module, move |a, b| r.mul(a, b)).expect("regular action")
    }

    pub fn ring(&self) -> &FiniteCommRing {
        &self.ring
    }

    pub fn module(&self) -> &AbelianGroup {
        &self.module
    }

    pub fn act(&self, r: Elem, x: Elem) -> Elem {
        let cr = self.ring.decode(r);
        let cx = self.module.decode(x);
        let mut acc = 0;
        for (i, &a) in cr.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in cx.iter().enumerate() {
                if b == 0 {
                    continue;
                }
                acc = self.module.add(acc, self.module.mul_int((a * b) as i128, self.gen_act[i][j]));
            }
        }
        acc
    }

    /// Table of `x -> r . x`.
    pub fn scalar_table(&self, r: Elem) -> Vec<Elem> {
        self.module.elements().map(|x| self.act(r, x)).collect()
    }

    pub fn validate(&self) -> ValidationReport {
        let mut v = self.ring.validate().violations;
        let (rg, mg) = (self.ring.group(), &self.module);
        for i in 0..rg.num_generators() {
            for j in 0..mg.num_generators() {
                let img = self.gen_act[i][j];
                if mg.mul_int(rg.orders()[i] as i128, img) != 0 || mg.mul_int(mg.orders()[j] as i128, img) != 0 {
                    v.push(format!("bilinearity fails for ring generator {i}, module generator {j}"));
                }
                for l in 0..rg.num_generators() {
                    let prod = self.ring.mul(rg.generator(l), rg.generator(i));
                    if self.act(prod, mg.generator(j)) != self.act(rg.generator(l), img) {
                        v.push(format!("associativity fails for ring generators {l}, {i} on {j}"));
                    }
                }
            }
        }
        for j in 0..mg.num_generators() {
            if self.act(self.ring.one(), mg.generator(j)) != mg.generator(j) {
                v.push(format!("unity does not fix module generator {j}"));
            }
        }
        ValidationReport::from(v)
    }

    pub fn annihilator(&self) -> Vec<Elem> {
        let gens: Vec<Elem> = (0..self.module.num_generators()).map(|j| self.module.generator(j)).collect();
        self.ring.elements().filter(|&r| gens.iter().all(|&g| self.act(r, g) == 0)).collect()
    }

    /// `A = R / Ann_R(N)` with the induced faithful action, plus `R -> A`.
    pub fn quotient_by_annihilator(&self) -> Result<(FiniteCommRing, RingAction, Vec<Elem>)> {
        let ann = self.annihilator();
        let (a, proj) = self.ring.quotient(&ann)?;
        // lift of each element of A
        let mut lift = vec![Elem::MAX; a.size()];
        for r in self.ring.elements() {
            let q = proj[r as usize] as usize;
            if lift[q] == Elem::MAX {
                lift[q] = r;
            }
        }
        let act = RingAction::from_fn(a.clone(), self.module.clone(), |r, x| self.act(lift[r as usize], x))?;
        let gens: Vec<Elem> = (0..self.module.num_generators()).map(|j| self.module.generator(j)).collect();
        let faithful = a.elements().all(|r| r == 0 || gens.iter().any(|&g| act.act(r, g) != 0));
        if !faithful {
            return Err(Error::Precondition("induced action is not faithful".into()));
        }
        Ok((a, act, proj))
    }

    /// Splits `N = sum e_i N` along the primitive idempotents of the ring.
    /// Zero summands (from idempotents acting trivially) are omitted.
    pub fn peirce_module_split(&self) -> Result<Vec<PeirceSummand>> {
        let idem = self.ring.primitive_idempotents()?;
        let add = |a, b| self.module.add(a, b);
        let mut out = Vec::new();
        for &e in &idem {
            let mut elems: Vec<Elem> = self.module.elements().map(|x| self.act(e, x)).collect();
            elems.sort_unstable();
            elems.dedup();
            if elems.len() == 1 {
                continue;
            }
            let one_minus_e = self.ring.sub(self.ring.one(), e);
            let ideal = self.ring.ideal(&[one_minus_e]);
            let (local_ring, ring_projection) = self.ring.quotient(&ideal)?;
            let dec = decompose_abelian(self.module.size(), &elems, 0, &add)?;
            let group = AbelianGroup::new(dec.orders.clone())?;
            let inclusion = dec.table(0, &add);
            let mut back = vec![Elem::MAX; self.module.size()];
            for (i, &x) in inclusion.iter().enumerate() {
                back[x as usize] = i as Elem;
            }
            let mut lift = vec![Elem::MAX; local_ring.size()];
            for r in self.ring.elements() {
                let q = ring_projection[r as usize] as usize;
                if lift[q] == Elem::MAX {
                    lift[q] = r;
                }
            }
            let action = RingAction::from_fn(local_ring.clone(), group, |r, i| {
                back[self.act(lift[r as usize], inclusion[i as usize]) as usize]
            })?;
            out.push(PeirceSummand { idempotent: e, elements: elems, local_ring, ring_projection, action, inclusion });
        }
        self.check_split(&idem, &out)?;
        Ok(out)
    }

    fn check_split(&self, idem: &[Elem], parts: &[PeirceSummand]) -> Result<()> {
        let total: usize = parts.iter().map(|s| s.elements.len()).product();
        if total != self.module.size() {
            return Err(Error::Precondition("summand orders do not multiply to |N|".into()));
        }
        for x in self.module.elements() {
            let sum = parts.iter().fold(0, |acc, s| self.module.add(acc, self.act(s.idempotent, x)));
            if sum != x {
                return Err(Error::Precondition("x != sum e_i x".into()));
            }
        }
        for s in parts {
            for &e in idem.iter().filter(|&&e| e != s.idempotent) {
                let ideal_j: Vec<Elem> = self.ring.elements().map(|r| self.ring.mul(e, r)).collect();
                if ideal_j.iter().any(|&r| s.elements.iter().any(|&x| self.act(r, x) != 0)) {
                    return Err(Error::Precondition("summand not annihilated by the other factors".into()));
                }
            }
        }
        Ok(())
    }

    /// Galois-ring structure of each local summand of the faithful quotient,
    /// and a common structure when all residue characteristics agree.
    pub fn padic_structure(&self) -> Result<PadicStructure> {
        let (faithful_ring, act, _) = self.quotient_by_annihilator()?;
        let parts = act.peirce_module_split()?;
        let mut summands = Vec::new();
        let mut common_parts = Vec::new();
        for part in &parts {
            let info = part.local_ring.local_info()?;
            let (p, lambda) = info.residue;
            let c = exact_log(part.local_ring.characteristic(), p)
                .ok_or(Error::CharacteristicMismatch { p, expected: 0, found: 0 })?;
            let spec = GaloisRingSpec::construct(p, lambda, c)?;
            let embedding = embed_into_local_ring(&spec, &part.local_ring)?;
            let exponents = module_exponents(&part.action, p, lambda, embedding.xi_image)?;
            common_parts.push((p, c, lambda, part));
            summands.push(PadicSummand { p, lambda, c, embedding, exponents, elements: part.elements.clone() });
        }
        let lambda = summands.iter().fold(0, |acc, s| gcd(acc, s.lambda));
        let common = match summands.first() {
            Some(first) if summands.iter().all(|s| s.p == first.p) => {
                let p = first.p;
                let c = summands.iter().map(|s| s.c).max().unwrap();
                let mut xi_action: Vec<Elem> = vec![0; self.module.size()];
                for &(_, ci, _, part) in &common_parts {
                    let spec_i = GaloisRingSpec::construct(p, lambda, ci)?;
                    let emb = embed_into_local_ring(&spec_i, &part.local_ring)?;
                    let local = part.action.scalar_table(emb.xi_image);
                    // xi acts on N through the projections x -> e_i x
                    let mut back = vec![Elem::MAX; self.module.size()];
                    for (i, &x) in part.inclusion.iter().enumerate() {
                        back[x as usize] = i as Elem;
                    }
                    for x in self.module.elements() {
                        let xe = act.act(part.idempotent, x);
                        let img = part.inclusion[local[back[xe as usize] as usize] as usize];
                        xi_action[x as usize] = self.module.add(xi_action[x as usize], img);
                    }
                }
                let spec = GaloisRingSpec::construct(p, lambda, c)?;
                let add = |a, b| self.module.add(a, b);
                let all: Vec<Elem> = self.module.elements().collect();
                let xa = &xi_action;
                let family = |g: Elem| {
                    let mut fam = vec![g];
                    for _ in 1..lambda {
                        fam.push(xa[*fam.last().unwrap() as usize]);
                    }
                    fam
                };
                let dec = decompose_p_module(self.module.size(), &all, 0, p, lambda, &add, &family)?;
                Some(CommonStructure { spec, exponents: dec.exponents, xi_action })
            }
            _ => None,
        };
        Ok(PadicStructure { faithful_ring, summands, lambda, common })
    }
}

/// Exponents of a module over `GR(p, c, lambda)` where `xi` acts as `xi_ring`.
fn module_exponents(act: &RingAction, p: u64, lambda: u32, xi_ring: Elem) -> Result<Vec<u32>> {
    let m = act.module();
    let add = |a, b| m.add(a, b);
    let xi = act.scalar_table(xi_ring);
    let family = |g: Elem| {
        let mut fam = vec![g];
        for _ in 1..lambda {
            fam.push(xi[*fam.last().unwrap() as usize]);
        }
        fam
    };
    let all: Vec<Elem> = m.elements().collect();
    Ok(decompose_p_module(m.size(), &all, 0, p, lambda, &add, &family)?.exponents)
}
