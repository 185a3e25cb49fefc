//! Finite nilpotent rings by structure constants and their adjoint braces.

use serde::{Deserialize, Serialize};

use crate::abelian::{abelian_isomorphism, span_of, AbelianGroup, Elem, OrderStats};
use crate::arith::{ipow, prime_power};
use crate::brace::{Brace, GammaFunction};
use crate::error::{Error, Result};
use crate::galois_ring::GaloisRingSpec;
use crate::module::ModuleShape;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "NilDoc", into = "NilDoc")]
pub struct NilpotentRing {
    group: AbelianGroup,
    mul: Vec<Vec<Vec<u64>>>,
    shape: Option<ModuleShape>,
    gen_prod: Vec<Vec<Elem>>,
}

#[derive(Serialize, Deserialize)]
struct NilDoc {
    orders: Vec<u64>,
    mul: Vec<Vec<Vec<u64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    shape: Option<ModuleShape>,
}

impl TryFrom<NilDoc> for NilpotentRing {
    type Error = Error;
    fn try_from(doc: NilDoc) -> Result<Self> {
        NilpotentRing::new(doc.orders, doc.mul, doc.shape)
    }
}

impl From<NilpotentRing> for NilDoc {
    fn from(r: NilpotentRing) -> Self {
        NilDoc { orders: r.group.orders().to_vec(), mul: r.mul, shape: r.shape }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NilpotentReport {
    pub valid: bool,
    pub violations: Vec<String>,
    /// Least `k` with `N^k = 0`, if any.
    pub nilpotency_index: Option<u32>,
    pub commutative: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RadringReport {
    pub commutative: bool,
    pub p: Option<u64>,
    pub rank_d: Option<usize>,
    /// `rank_D < p - 1`.
    pub hypothesis_holds: bool,
    pub additive_stats: OrderStats,
    pub circle_stats: OrderStats,
    pub stats_equal: bool,
    /// Explicit isomorphism `(N, +) -> (N, o)` when both are abelian.
    pub isomorphism: Option<Vec<Elem>>,
}

impl NilpotentRing {
    pub fn new(orders: Vec<u64>, mul: Vec<Vec<Vec<u64>>>, shape: Option<ModuleShape>) -> Result<Self> {
        let group = AbelianGroup::new(orders)?;
        let k = group.num_generators();
        if mul.len() != k || mul.iter().any(|r| r.len() != k || r.iter().any(|v| v.len() != k)) {
            return Err(Error::Malformed(format!("multiplication table must be {k}x{k}x{k}")));
        }
        if let Some(s) = &shape {
            if s.group() != &group {
                return Err(Error::ShapeMismatch("shape and additive group disagree".into()));
            }
        }
        let gen_prod = mul.iter().map(|row| row.iter().map(|v| group.encode(v)).collect()).collect();
        Ok(NilpotentRing { group, mul, shape, gen_prod })
    }

    /// `kZ/mZ`, presented as `Z/(m/k)` with element `j` standing for `kj`.
    pub fn multiples(k: u64, m: u64) -> Result<Self> {
        if k == 0 || m % k != 0 || m / k < 2 {
            return Err(Error::InvalidParameter(format!("{k} must properly divide {m}")));
        }
        let n = m / k;
        let shape = match prime_power(n) {
            Some((p, e)) => Some(ModuleShape::cyclic(p, &[e])?),
            None => None,
        };
        Self::new(vec![n], vec![vec![vec![k % n]]], shape)
    }

    /// The ideal `p^k GR(p, c, lambda)` as a ring without unity, presented as
    /// a module over `GR(p, c - k, lambda)`: `u` stands for `p^k u`.
    pub fn galois_ideal_ring(p: u64, c: u32, lambda: u32, k: u32) -> Result<Self> {
        if k == 0 || k >= c {
            return Err(Error::InvalidParameter("need 0 < k < c".into()));
        }
        let spec = GaloisRingSpec::construct(p, lambda, c - k)?;
        let shape = ModuleShape::new(&spec, &[c - k])?;
        let l = lambda as usize;
        let pk = ipow(p, k) as i128;
        let basis: Vec<_> = (0..l)
            .map(|i| {
                let mut e = spec.zero();
                e.coeffs[i] = 1;
                e
            })
            .collect();
        let mul = basis
            .iter()
            .map(|a| basis.iter().map(|b| spec.scale_int(pk, &spec.mul(a, b)).coeffs).collect())
            .collect();
        Self::new(shape.group().orders().to_vec(), mul, Some(shape))
    }

    /// Componentwise product ring.
    pub fn product(rings: &[NilpotentRing]) -> Result<Self> {
        let orders: Vec<u64> = rings.iter().flat_map(|r| r.group.orders().iter().copied()).collect();
        let k = orders.len();
        let mut mul = vec![vec![vec![0; k]; k]; k];
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
            off += kr;
        }
        Self::new(orders, mul, None)
    }

    pub fn group(&self) -> &AbelianGroup {
        &self.group
    }

    pub fn shape(&self) -> Option<&ModuleShape> {
        self.shape.as_ref()
    }

    pub fn structure_constants(&self) -> &[Vec<Vec<u64>>] {
        &self.mul
    }

    pub fn size(&self) -> usize {
        self.group.size()
    }

    pub fn elements(&self) -> impl Iterator<Item = Elem> {
        self.group.elements()
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
                if y != 0 {
                    acc = self.group.add(acc, self.group.mul_int((x * y) as i128, self.gen_prod[i][j]));
                }
            }
        }
        acc
    }

    /// `x o y = x + y + xy`.
    pub fn adjoint(&self, x: Elem, y: Elem) -> Elem {
        self.group.add(self.group.add(x, y), self.mul(x, y))
    }

    /// The powers `N = N^1 ⊇ N^2 ⊇ ...` down to the first repeated term.
    pub fn power_chain(&self) -> Vec<Vec<Elem>> {
        let add = |a, b| self.group.add(a, b);
        let gens: Vec<Elem> = (0..self.group.num_generators()).map(|i| self.group.generator(i)).collect();
        let mut chain = vec![self.elements().collect::<Vec<_>>()];
        loop {
            let last = chain.last().unwrap();
            let prods: Vec<Elem> = last.iter().flat_map(|&x| gens.iter().map(move |&g| (x, g))).map(|(x, g)| self.mul(x, g)).collect();
            let next = span_of(self.size(), 0, &add, &prods);
            if &next == last {
                return chain;
            }
            chain.push(next);
        }
    }

    pub fn validate(&self) -> NilpotentReport {
        let g = &self.group;
        let k = g.num_generators();
        let mut violations = Vec::new();
        for i in 0..k {
            for j in 0..k {
                let prod = self.gen_prod[i][j];
                if g.mul_int(g.orders()[i] as i128, prod) != 0 || g.mul_int(g.orders()[j] as i128, prod) != 0 {
                    violations.push(format!("bilinearity fails for generators {i}, {j}"));
                }
                for l in 0..k {
                    if self.mul(prod, g.generator(l)) != self.mul(g.generator(i), self.gen_prod[j][l]) {
                        violations.push(format!("associativity fails for generators {i}, {j}, {l}"));
                    }
                }
            }
        }
        let commutative = (0..k).all(|i| (0..k).all(|j| self.gen_prod[i][j] == self.gen_prod[j][i]));
        let chain = self.power_chain();
        let nilpotency_index = (chain.last().unwrap().len() == 1).then_some(chain.len() as u32);
        if nilpotency_index.is_none() {
            violations.push("ring is not nilpotent".into());
        }
        NilpotentReport { valid: violations.is_empty(), violations, nilpotency_index, commutative }
    }

    /// `x'` with `x o x' = 0`, by the finite series `-x + x^2 - x^3 + ...`.
    pub fn quasi_inverse(&self, x: Elem) -> Elem {
        let mut acc = 0;
        let mut term = self.group.neg(x);
        let mut steps = 0;
        while term != 0 {
            acc = self.group.add(acc, term);
            term = self.group.neg(self.mul(term, x));
            steps += 1;
            assert!(steps <= self.size(), "quasi-inverse series does not terminate");
        }
        acc
    }

    /// The adjoint brace, `gamma_x(y) = y + xy`.
    pub fn brace(&self) -> Result<Brace> {
        let rep = self.validate();
        if !rep.valid {
            return Err(Error::NotAGroup(format!("adjoint operation: {}", rep.violations.join("; "))));
        }
        let tables = self
            .elements()
            .map(|x| self.elements().map(|y| self.group.add(y, self.mul(x, y))).collect())
            .collect();
        Brace::new(self.group.clone(), self.shape.clone(), GammaFunction::from_tables(tables))
    }
}

/// Compares `(N, +)` with the adjoint group for a commutative nilpotent ring
/// of prime-power order, recording whether `rank_D N < p - 1`.
pub fn corollary_radring_check(n: &NilpotentRing, shape: Option<&ModuleShape>) -> Result<RadringReport> {
    let rep = n.validate();
    if !rep.valid {
        return Err(Error::Precondition("not a nilpotent ring".into()));
    }
    let b = n.brace()?;
    let additive_stats = b.additive_stats();
    let circle_stats = b.circle_stats();
    let stats_equal = additive_stats == circle_stats;
    let pp = prime_power(n.size() as u64);
    let p = pp.map(|(p, _)| p);
    let rank_d = match (shape, pp) {
        (Some(s), Some((p, _))) if s.p() == p && s.size() == n.size() => Some(s.rank()),
        (None, Some((p, _))) => Some(n.group.torsion(p).len().ilog(p as usize) as usize),
        _ => None,
    };
    let hypothesis_holds = rep.commutative && matches!((p, rank_d), (Some(p), Some(r)) if (r as u64) + 1 < p);
    let add = |a, b| n.group.add(a, b);
    let circ = |a, c| n.adjoint(a, c);
    let isomorphism = if n.size() == 1 {
        Some(vec![0])
    } else {
        abelian_isomorphism(n.size(), &add, &circ)?
    };
    Ok(RadringReport {
        commutative: rep.commutative,
        p,
        rank_d,
        hypothesis_holds,
        additive_stats,
        circle_stats,
        stats_equal,
        isomorphism,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::brace::{brace_to_radical_ring, two_sided_check, BraceClass};

    #[test]
    fn nilpotency_indices() {
        let zero = NilpotentRing::new(vec![4, 2], vec![vec![vec![0, 0]; 2]; 2], None).unwrap();
        assert_eq!(zero.validate().nilpotency_index, Some(2));
        let r = NilpotentRing::multiples(2, 8).unwrap();
        let rep = r.validate();
        assert!(rep.valid && rep.commutative);
        assert_eq!(rep.nilpotency_index, Some(3));
        let chain = r.power_chain();
        assert_eq!(chain, vec![vec![0, 1, 2, 3], vec![0, 2], vec![0]]);
        let g = NilpotentRing::galois_ideal_ring(3, 3, 2, 1).unwrap();
        let rep = g.validate();
        assert!(rep.valid && rep.commutative);
        assert_eq!(rep.nilpotency_index, Some(3));
        // Z/4 with x*y = xy is not nilpotent
        let bad = NilpotentRing::new(vec![4], vec![vec![vec![1]]], None).unwrap();
        assert!(!bad.validate().valid);
        assert!(bad.brace().is_err());
    }

    #[test]
    fn adjoint_braces() {
        let zero = NilpotentRing::new(vec![3], vec![vec![vec![0]]], None).unwrap();
        assert!(zero.brace().unwrap().is_trivial());
        let b = NilpotentRing::multiples(2, 8).unwrap().brace().unwrap();
        assert_eq!(b.circle_stats(), OrderStats::from([(1, 1), (2, 3)]));
        let g = NilpotentRing::galois_ideal_ring(3, 3, 2, 1).unwrap().brace().unwrap();
        assert_eq!(g.class(), BraceClass::DBrace);
        assert_eq!(g.additive_stats(), OrderStats::from([(1, 1), (3, 8), (9, 72)]));
    }

    #[test]
    fn round_trip_and_star() {
        for r in [NilpotentRing::multiples(2, 8).unwrap(), NilpotentRing::galois_ideal_ring(3, 3, 2, 1).unwrap()] {
            let b = r.brace().unwrap();
            assert_eq!(two_sided_check(&b), None);
            assert_eq!(brace_to_radical_ring(&b).unwrap().structure_constants(), r.structure_constants());
            for x in r.elements() {
                assert_eq!(r.adjoint(x, r.quasi_inverse(x)), 0);
                for y in r.elements().step_by(7) {
                    assert_eq!(b.star(x, y), r.mul(x, y));
                }
            }
        }
    }

    #[test]
    fn corollary_reports() {
        let r = NilpotentRing::multiples(2, 8).unwrap();
        let rep = corollary_radring_check(&r, r.shape()).unwrap();
        assert!(!rep.hypothesis_holds);
        assert!(!rep.stats_equal);
        assert_eq!(rep.additive_stats, OrderStats::from([(1, 1), (2, 1), (4, 2)]));
        assert_eq!(rep.isomorphism, None);
        let g = NilpotentRing::galois_ideal_ring(3, 3, 2, 1).unwrap();
        let rep = corollary_radring_check(&g, g.shape()).unwrap();
        assert_eq!(rep.rank_d, Some(1));
        assert!(rep.hypothesis_holds && rep.stats_equal);
        let f = rep.isomorphism.unwrap();
        for x in g.elements() {
            for y in g.elements().step_by(5) {
                assert_eq!(f[g.group().add(x, y) as usize], g.adjoint(f[x as usize], f[y as usize]));
            }
        }
        let zero = NilpotentRing::new(vec![5], vec![vec![vec![0]]], None).unwrap();
        let rep = corollary_radring_check(&zero, None).unwrap();
        assert!(rep.stats_equal && rep.isomorphism.is_some());
    }
}
