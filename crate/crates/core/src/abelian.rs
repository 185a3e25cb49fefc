//! Finite abelian groups given by a cyclic decomposition, plus the generic
//! subgroup and basis machinery used throughout the crate.
//!
//! Elements are addressed by their mixed-radix index: the coordinate vector
//! `(x_1, ..., x_k)` with `0 <= x_i < d_i` maps to `sum x_i * stride_i`, the
//! first coordinate being the most significant.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::arith::{exact_log, lcm, prime_factors, prime_power};
use crate::error::{Error, Result};

/// Index of an element inside a finite structure.
pub type Elem = u32;

/// Histogram `order -> number of elements of that order`.
pub type OrderStats = BTreeMap<u64, u64>;

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "GroupDoc", into = "GroupDoc")]
pub struct AbelianGroup {
    orders: Vec<u64>,
    size: usize,
}

#[derive(Serialize, Deserialize)]
struct GroupDoc {
    orders: Vec<u64>,
}

impl TryFrom<GroupDoc> for AbelianGroup {
    type Error = Error;
    fn try_from(doc: GroupDoc) -> Result<Self> {
        AbelianGroup::new(doc.orders)
    }
}

impl From<AbelianGroup> for GroupDoc {
    fn from(g: AbelianGroup) -> Self {
        GroupDoc { orders: g.orders }
    }
}

/// Upper bound on the number of elements we are willing to index.
pub const MAX_INDEXED: usize = 1 << 24;

impl AbelianGroup {
    pub fn new(orders: Vec<u64>) -> Result<Self> {
        let mut size: usize = 1;
        for &d in &orders {
            if d == 0 {
                return Err(Error::InvalidParameter("cyclic factor of order 0".into()));
            }
            size = size
                .checked_mul(d as usize)
                .filter(|&s| s <= MAX_INDEXED)
                .ok_or(Error::TooLarge { size: usize::MAX, bound: MAX_INDEXED })?;
        }
        Ok(AbelianGroup { orders, size })
    }

    pub fn trivial() -> Self {
        AbelianGroup { orders: Vec::new(), size: 1 }
    }

    pub fn orders(&self) -> &[u64] {
        &self.orders
    }

    pub fn size(&self) -> usize {
        self.size
    }

    /// Number of cyclic factors in the presentation.
    pub fn num_generators(&self) -> usize {
        self.orders.len()
    }

    pub fn elements(&self) -> impl Iterator<Item = Elem> {
        0..self.size as Elem
    }

    pub fn zero(&self) -> Elem {
        0
    }

    pub fn exponent(&self) -> u64 {
        self.orders.iter().fold(1, |acc, &d| lcm(acc, d))
    }

    pub fn encode(&self, coords: &[u64]) -> Elem {
        debug_assert_eq!(coords.len(), self.orders.len());
        let mut idx = 0u64;
        for (&x, &d) in coords.iter().zip(&self.orders) {
            idx = idx * d + x % d;
        }
        idx as Elem
    }

    /// Encodes signed coordinates, reducing each modulo its factor.
    pub fn encode_signed(&self, coords: &[i64]) -> Elem {
        let mut idx = 0u64;
        for (&x, &d) in coords.iter().zip(&self.orders) {
            idx = idx * d + x.rem_euclid(d as i64) as u64;
        }
        idx as Elem
    }

    pub fn decode(&self, x: Elem) -> Vec<u64> {
        let mut out = vec![0; self.orders.len()];
        self.decode_into(x, &mut out);
        out
    }

    pub fn decode_into(&self, x: Elem, out: &mut [u64]) {
        let mut x = x as u64;
        for (slot, &d) in out.iter_mut().zip(&self.orders).rev() {
            *slot = x % d;
            x /= d;
        }
    }

    pub fn generator(&self, i: usize) -> Elem {
        let mut coords = vec![0; self.orders.len()];
        coords[i] = 1;
        self.encode(&coords)
    }

    pub fn add(&self, a: Elem, b: Elem) -> Elem {
        let (mut a, mut b) = (a as u64, b as u64);
        let mut res = 0u64;
        let mut mult = 1u64;
        for &d in self.orders.iter().rev() {
            let (da, db) = (a % d, b % d);
            a /= d;
            b /= d;
            res += ((da + db) % d) * mult;
            mult *= d;
        }
        res as Elem
    }

    pub fn neg(&self, a: Elem) -> Elem {
        let mut a = a as u64;
        let mut res = 0u64;
        let mut mult = 1u64;
        for &d in self.orders.iter().rev() {
            let da = a % d;
            a /= d;
            res += ((d - da) % d) * mult;
            mult *= d;
        }
        res as Elem
    }

    pub fn sub(&self, a: Elem, b: Elem) -> Elem {
        self.add(a, self.neg(b))
    }

    /// `k * a` for an arbitrary integer `k`.
    pub fn mul_int(&self, k: i128, a: Elem) -> Elem {
        let mut a = a as u64;
        let mut res = 0u64;
        let mut mult = 1u64;
        for &d in self.orders.iter().rev() {
            let da = (a % d) as i128;
            a /= d;
            res += ((k * da).rem_euclid(d as i128) as u64) * mult;
            mult *= d;
        }
        res as Elem
    }

    /// Additive order of `a`.
    pub fn order(&self, a: Elem) -> u64 {
        let coords = self.decode(a);
        coords
            .iter()
            .zip(&self.orders)
            .fold(1, |acc, (&x, &d)| lcm(acc, d / num_integer::gcd(d, x)))
    }

    /// Elements `x` with `k * x = 0`.
    pub fn torsion(&self, k: u64) -> Vec<Elem> {
        self.elements().filter(|&x| k % self.order(x) == 0).collect()
    }

    /// The subgroup `k * G`.
    pub fn multiples(&self, k: u64) -> Vec<Elem> {
        let mut seen = vec![false; self.size];
        for x in self.elements() {
            seen[self.mul_int(k as i128, x) as usize] = true;
        }
        members(&seen)
    }

    /// Number of cyclic factors in the primary decomposition.
    pub fn torsion_rank(&self) -> usize {
        prime_factors(self.size as u64)
            .into_iter()
            .map(|p| exact_log(self.torsion(p).len() as u64, p).expect("p-torsion has p-power order") as usize)
            .sum()
    }

    /// Additive order statistics of the whole group.
    pub fn order_stats(&self) -> OrderStats {
        let mut stats = OrderStats::new();
        for x in self.elements() {
            *stats.entry(self.order(x)).or_insert(0) += 1;
        }
        stats
    }

    /// Checks whether `table` is an additive endomorphism; returns a witness
    /// pair `(x, y)` with `f(x + y) != f(x) + f(y)` otherwise.
    pub fn additivity_witness(&self, table: &[Elem]) -> Option<(Elem, Elem)> {
        let k = self.orders.len();
        let images: Vec<Elem> = (0..k).map(|i| table[self.generator(i) as usize]).collect();
        for (i, &img) in images.iter().enumerate() {
            if self.mul_int(self.orders[i] as i128, img) != 0 {
                let g = self.generator(i);
                return Some((self.mul_int(self.orders[i] as i128 - 1, g), g));
            }
        }
        if table[0] != 0 {
            return Some((0, 0));
        }
        let mut coords = vec![0u64; k];
        for x in self.elements() {
            self.decode_into(x, &mut coords);
            let mut expect = 0;
            for (i, &c) in coords.iter().enumerate() {
                if c != 0 {
                    expect = self.add(expect, self.mul_int(c as i128, images[i]));
                }
            }
            if table[x as usize] != expect {
                // locate a concrete failing pair along the coordinate path
                let mut acc = 0;
                for (i, &c) in coords.iter().enumerate() {
                    for _ in 0..c {
                        let g = self.generator(i);
                        if table[self.add(acc, g) as usize]
                            != self.add(table[acc as usize], table[g as usize])
                        {
                            return Some((acc, g));
                        }
                        acc = self.add(acc, g);
                    }
                }
                return Some((x, 0));
            }
        }
        None
    }
}

/// Indices set to `true`, in increasing order.
pub fn members(flags: &[bool]) -> Vec<Elem> {
    flags
        .iter()
        .enumerate()
        .filter_map(|(i, &b)| b.then_some(i as Elem))
        .collect()
}

pub fn indicator(universe: usize, set: &[Elem]) -> Vec<bool> {
    let mut flags = vec![false; universe];
    for &x in set {
        flags[x as usize] = true;
    }
    flags
}

/// A subgroup under construction, grown one generator at a time.
///
/// `add` must be an abelian group law on `0..universe`; the span of a set of
/// generators is the union of the cosets `H + k g`.
pub struct Span<'a> {
    add: &'a dyn Fn(Elem, Elem) -> Elem,
    member: Vec<bool>,
    list: Vec<Elem>,
}

impl<'a> Span<'a> {
    pub fn new(universe: usize, zero: Elem, add: &'a dyn Fn(Elem, Elem) -> Elem) -> Self {
        let mut member = vec![false; universe];
        member[zero as usize] = true;
        Span { add, member, list: vec![zero] }
    }

    pub fn contains(&self, x: Elem) -> bool {
        self.member[x as usize]
    }

    pub fn len(&self) -> usize {
        self.list.len()
    }

    pub fn is_empty(&self) -> bool {
        self.list.is_empty()
    }

    pub fn extend(&mut self, g: Elem) {
        let base = self.list.clone();
        let mut shift = g;
        while !self.member[shift as usize] {
            for &h in &base {
                let y = (self.add)(h, shift);
                if !self.member[y as usize] {
                    self.member[y as usize] = true;
                    self.list.push(y);
                }
            }
            shift = (self.add)(shift, g);
        }
    }

    pub fn into_sorted(mut self) -> Vec<Elem> {
        self.list.sort_unstable();
        self.list
    }
}

/// Additive span of `gens` under the abelian law `add`.
pub fn span_of(universe: usize, zero: Elem, add: &dyn Fn(Elem, Elem) -> Elem, gens: &[Elem]) -> Vec<Elem> {
    let mut span = Span::new(universe, zero, add);
    for &g in gens {
        span.extend(g);
    }
    span.into_sorted()
}

/// Order of every element of `elements` under `op` with identity `identity`.
/// Fails when some element never returns to the identity or leaves the set.
pub fn element_orders(
    elements: &[Elem],
    identity: Elem,
    op: &dyn Fn(Elem, Elem) -> Elem,
) -> Result<Vec<u64>> {
    let universe = elements.iter().copied().max().map_or(0, |m| m as usize + 1);
    let inside = indicator(universe.max(identity as usize + 1), elements);
    let n = elements.len() as u64;
    let mut out = Vec::with_capacity(elements.len());
    for &x in elements {
        let mut y = x;
        let mut k = 1u64;
        while y != identity {
            y = op(y, x);
            k += 1;
            if (y as usize) >= inside.len() || !inside[y as usize] {
                return Err(Error::NotAGroup(format!("powers of {x} leave the set")));
            }
            if k > n {
                return Err(Error::NotAGroup(format!("element {x} has no finite order")));
            }
        }
        out.push(k);
    }
    Ok(out)
}

/// Exact histogram of element orders of a finite group given by a closure.
pub fn order_statistics(
    elements: &[Elem],
    identity: Elem,
    op: &dyn Fn(Elem, Elem) -> Elem,
) -> Result<OrderStats> {
    let orders = element_orders(elements, identity, op)?;
    let mut stats = OrderStats::new();
    for o in orders {
        *stats.entry(o).or_insert(0) += 1;
    }
    if stats.get(&1) != Some(&1) {
        return Err(Error::NotAGroup("identity is not the unique element of order 1".into()));
    }
    Ok(stats)
}

/// A generating family of a finite abelian group (or module) together with
/// the orders realising it as `Z/orders[0] + ... + Z/orders[k-1]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Decomposition {
    pub family: Vec<Elem>,
    pub orders: Vec<u64>,
    /// Per module summand exponent `c_i` (only for prime-power decompositions).
    pub exponents: Vec<u32>,
}

impl Decomposition {
    /// Table from mixed-radix index over `orders` to the represented element.
    pub fn table(&self, zero: Elem, add: &dyn Fn(Elem, Elem) -> Elem) -> Vec<Elem> {
        let mut tbl = vec![zero];
        for (&g, &d) in self.family.iter().zip(&self.orders) {
            let mut next = Vec::with_capacity(tbl.len() * d as usize);
            for &base in &tbl {
                let mut cur = base;
                for _ in 0..d {
                    next.push(cur);
                    cur = add(cur, g);
                }
            }
            tbl = next;
        }
        tbl
    }
}

/// Decomposes a finite abelian p-group (or a module over a Galois ring with
/// residue field of `p^lambda` elements) into cyclic summands.
///
/// `family_of(g)` lists the additive generators contributed by a module
/// generator `g` (for plain groups this is just `[g]`; for modules over
/// `GR(p, c, lambda)` it is `[g, xi g, ..., xi^(lambda-1) g]`). The returned
/// exponents are non-increasing and the family is grouped accordingly.
pub fn decompose_p_module(
    universe: usize,
    elements: &[Elem],
    zero: Elem,
    p: u64,
    lambda: u32,
    add: &dyn Fn(Elem, Elem) -> Elem,
    family_of: &dyn Fn(Elem) -> Vec<Elem>,
) -> Result<Decomposition> {
    let orders = element_orders(elements, zero, add)?;
    let unit = crate::arith::ipow(p, lambda);
    let mut exps_of = Vec::with_capacity(elements.len());
    for &o in &orders {
        match (o, prime_power(o)) {
            (1, _) => exps_of.push(0u32),
            (_, Some((q, e))) if q == p => exps_of.push(e),
            _ => return Err(Error::InvalidParameter(format!("not a {p}-group"))),
        }
    }
    let max_e = exps_of.iter().copied().max().unwrap_or(0);
    // |Omega_k| / |Omega_{k-1}| = unit^(number of summands with exponent >= k)
    let mut at_least = Vec::new();
    let mut prev = 1usize;
    for k in 1..=max_e {
        let cnt = exps_of.iter().filter(|&&e| e <= k).count();
        let ratio = cnt / prev;
        if ratio * prev != cnt {
            return Err(Error::InvalidParameter("inconsistent torsion counts".into()));
        }
        let m = exact_log(ratio as u64, unit)
            .ok_or_else(|| Error::InvalidParameter("not a free module over the residue field layers".into()))?;
        at_least.push(m as usize);
        prev = cnt;
    }
    let mut exponents = Vec::new();
    for k in (1..=max_e).rev() {
        let with_k = at_least[k as usize - 1] - at_least.get(k as usize).copied().unwrap_or(0);
        exponents.extend(std::iter::repeat_n(k, with_k));
    }
    let mut by_exp: BTreeMap<u32, Vec<Elem>> = BTreeMap::new();
    for (&x, &e) in elements.iter().zip(&exps_of) {
        by_exp.entry(e).or_default().push(x);
    }
    let mut chosen = Vec::new();
    let span = Span::new(universe, zero, add);
    if !basis_search(&exponents, 0, span, &by_exp, unit, p, family_of, &mut chosen) {
        return Err(Error::InvalidParameter("no basis found".into()));
    }
    let mut family = Vec::new();
    let mut fam_orders = Vec::new();
    for (&g, &e) in chosen.iter().zip(&exponents) {
        for h in family_of(g) {
            family.push(h);
            fam_orders.push(crate::arith::ipow(p, e));
        }
    }
    Ok(Decomposition { family, orders: fam_orders, exponents })
}

#[allow(clippy::too_many_arguments)]
fn basis_search(
    exponents: &[u32],
    level: usize,
    span: Span<'_>,
    by_exp: &BTreeMap<u32, Vec<Elem>>,
    unit: u64,
    p: u64,
    family_of: &dyn Fn(Elem) -> Vec<Elem>,
    chosen: &mut Vec<Elem>,
) -> bool {
    if level == exponents.len() {
        return true;
    }
    let e = exponents[level];
    let want = span.len() * crate::arith::ipow(unit, e) as usize;
    let Some(cands) = by_exp.get(&e) else { return false };
    for &g in cands {
        if span.contains(g) {
            continue;
        }
        let mut next = Span { add: span.add, member: span.member.clone(), list: span.list.clone() };
        for h in family_of(g) {
            next.extend(h);
        }
        if next.len() != want {
            continue;
        }
        chosen.push(g);
        if basis_search(exponents, level + 1, next, by_exp, unit, p, family_of, chosen) {
            return true;
        }
        chosen.pop();
    }
    false
}

/// Decomposes an arbitrary finite abelian group (given as a subset closed
/// under `add`) into primary cyclic factors, grouped by prime.
pub fn decompose_abelian(
    universe: usize,
    elements: &[Elem],
    zero: Elem,
    add: &dyn Fn(Elem, Elem) -> Elem,
) -> Result<Decomposition> {
    let orders = element_orders(elements, zero, add)?;
    let n = elements.len() as u64;
    let mut family = Vec::new();
    let mut fam_orders = Vec::new();
    let mut exponents = Vec::new();
    for p in prime_factors(n) {
        let part: Vec<Elem> = elements
            .iter()
            .zip(&orders)
            .filter(|(_, &o)| o == 1 || prime_power(o).is_some_and(|(q, _)| q == p))
            .map(|(&x, _)| x)
            .collect();
        let dec = decompose_p_module(universe, &part, zero, p, 1, add, &|g| vec![g])?;
        family.extend(dec.family);
        fam_orders.extend(dec.orders);
        exponents.extend(dec.exponents);
    }
    Ok(Decomposition { family, orders: fam_orders, exponents })
}

/// Cosets of a subgroup, each labelled by its least-index representative.
#[derive(Debug, Clone)]
pub struct Cosets {
    /// Class id of every element; ids follow the order of representatives.
    pub class_of: Vec<u32>,
    /// Least element of every class, increasing.
    pub reps: Vec<Elem>,
}

impl Cosets {
    pub fn new(universe: usize, add: &dyn Fn(Elem, Elem) -> Elem, sub: &[Elem]) -> Self {
        let mut class_of = vec![u32::MAX; universe];
        let mut reps = Vec::new();
        for x in 0..universe as Elem {
            if class_of[x as usize] != u32::MAX {
                continue;
            }
            let id = reps.len() as u32;
            reps.push(x);
            for &h in sub {
                class_of[add(x, h) as usize] = id;
            }
        }
        Cosets { class_of, reps }
    }

    pub fn len(&self) -> usize {
        self.reps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.reps.is_empty()
    }

    /// Addition on class ids.
    pub fn add(&self, add: &dyn Fn(Elem, Elem) -> Elem, a: Elem, b: Elem) -> Elem {
        self.class_of[add(self.reps[a as usize], self.reps[b as usize]) as usize]
    }

    /// Presents the quotient as an `AbelianGroup` along `dec` (a decomposition
    /// over class ids). Returns the group, the map from group index to class
    /// id, and its inverse.
    pub fn presentation(
        &self,
        dec: &Decomposition,
        add: &dyn Fn(Elem, Elem) -> Elem,
    ) -> Result<(AbelianGroup, Vec<Elem>, Vec<Elem>)> {
        let group = AbelianGroup::new(dec.orders.clone())?;
        let class_add = |a, b| self.add(add, a, b);
        let to_class = dec.table(0, &class_add);
        let mut to_index = vec![0; self.len()];
        for (i, &c) in to_class.iter().enumerate() {
            to_index[c as usize] = i as Elem;
        }
        Ok((group, to_class, to_index))
    }
}

/// An explicit isomorphism from `(0..n, op1)` to `(0..n, op2)` when both
/// are abelian groups with identity 0 (`None` if they are not isomorphic or
/// `op2` is not commutative).
pub fn abelian_isomorphism(
    n: usize,
    op1: &dyn Fn(Elem, Elem) -> Elem,
    op2: &dyn Fn(Elem, Elem) -> Elem,
) -> Result<Option<Vec<Elem>>> {
    let all: Vec<Elem> = (0..n as Elem).collect();
    for op in [op1, op2] {
        if !all.iter().all(|&a| all.iter().all(|&b| op(a, b) == op(b, a))) {
            return Ok(None);
        }
    }
    let d1 = decompose_abelian(n, &all, 0, op1)?;
    let d2 = decompose_abelian(n, &all, 0, op2)?;
    if d1.orders != d2.orders {
        return Ok(None);
    }
    let t1 = d1.table(0, op1);
    let t2 = d2.table(0, op2);
    let mut f = vec![0; n];
    for (&a, &b) in t1.iter().zip(&t2) {
        f[a as usize] = b;
    }
    Ok(Some(f))
}
