//! Order comparisons between `(N, +)` and `(N, o)`: circle powers, the
//! Omega filtrations, unipotent automorphisms and the rank criterion.

use serde::Serialize;

use crate::abelian::{abelian_isomorphism, indicator, span_of, Elem, OrderStats};
use crate::arith::{binomial, ipow, prime_power};
use crate::brace::{sub_brace, Brace, BraceClass};
use crate::error::{Error, Result};
use crate::finite_ring::RingAction;
use crate::module::{is_permutation, ModuleShape};

/// `m_o a = a o a o ... o a` (`m` factors); `0_o a = 0`.
pub fn circle_power(b: &Brace, m: u64, a: Elem) -> Elem {
    let mut acc = 0;
    for _ in 0..m {
        acc = b.circle(acc, a);
    }
    acc
}

fn prime_of(b: &Brace) -> Result<u64> {
    if let Some(s) = b.shape() {
        return Ok(s.p());
    }
    prime_power(b.size() as u64)
        .map(|(p, _)| p)
        .ok_or_else(|| Error::Precondition(format!("order {} is not a prime power", b.size())))
}

/// `D`-structure used for the rank criterion: `(lambda, rank_D)`. Falls back
/// to `D = Z` when the brace has no module shape or is only a `Z`-brace.
fn base_rank(b: &Brace, p: u64) -> (u32, usize) {
    match b.shape() {
        Some(s) if b.class() == BraceClass::DBrace => (s.lambda(), s.rank()),
        _ => (1, z_rank(b, p)),
    }
}

fn z_rank(b: &Brace, p: u64) -> usize {
    let n = b.group().torsion(p).len() as u64;
    n.ilog(p) as usize
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PPowerCheck {
    pub element: Elem,
    pub iterated: Elem,
    /// `(gamma_a^(p-1) + ... + gamma_a + 1)(a)`.
    pub geometric: Elem,
    /// `(p + C(p,2) d + ... + C(p,p-1) d^(p-2))(a) + d^(p-1)(a)`, `d = gamma_a - 1`.
    pub binomial: Elem,
    pub agree: bool,
}

/// Evaluates `p_o a` three ways.
pub fn p_power_formula_check(b: &Brace, a: Elem) -> Result<PPowerCheck> {
    let p = prime_of(b)?;
    let g = b.gamma_of(a);
    let iterated = circle_power(b, p, a);
    let mut geometric = 0;
    let mut term = a;
    for _ in 0..p {
        geometric = b.add(geometric, term);
        term = g[term as usize];
    }
    let delta = |v: Elem| b.sub(g[v as usize], v);
    let mut binom = 0;
    let mut d = a;
    for k in 0..p {
        let coeff = binomial(p, k + 1) % b.group().exponent() as u128;
        binom = b.add(binom, b.group().mul_int(coeff as i128, d));
        d = delta(d);
    }
    Ok(PPowerCheck {
        element: a,
        iterated,
        geometric,
        binomial: binom,
        agree: iterated == geometric && geometric == binom,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct UnipotencyReport {
    pub order: u64,
    pub rank: usize,
    /// `(f - id)^r (N)`, sorted and deduplicated.
    pub image: Vec<Elem>,
    /// `(f - id)^r (N)` lies in `pN`.
    pub holds: bool,
}

/// For `f` a `D`-automorphism of `p`-power order, checks
/// `(f - id)^r (N) <= pN` with `r = rank_D N`.
pub fn aut_unipotency_check(shape: &ModuleShape, f: &[Elem]) -> Result<UnipotencyReport> {
    let g = shape.group();
    let n = g.size();
    if f.len() != n || !is_permutation(f) || g.additivity_witness(f).is_some() {
        return Err(Error::Precondition("not an additive automorphism".into()));
    }
    let xi = shape.xi_table();
    if (0..n).any(|x| f[xi[x] as usize] != xi[f[x] as usize]) {
        return Err(Error::Precondition("not D-linear".into()));
    }
    let mut order = 1u64;
    let mut power = f.to_vec();
    while power.iter().enumerate().any(|(i, &v)| v as usize != i) {
        power = power.iter().map(|&v| f[v as usize]).collect();
        order += 1;
    }
    let p = shape.p();
    if prime_power(order).map_or(order != 1, |(q, _)| q != p) {
        return Err(Error::Precondition(format!("automorphism order {order} is not a power of {p}")));
    }
    let r = shape.rank();
    let mut image: Vec<Elem> = g.elements().collect();
    for _ in 0..r {
        image = image.iter().map(|&x| g.sub(f[x as usize], x)).collect();
    }
    image.sort_unstable();
    image.dedup();
    let pn = indicator(n, &shape.times_p_image());
    let holds = image.iter().all(|&x| pn[x as usize]);
    Ok(UnipotencyReport { order, rank: r, image, holds })
}

/// Orders of every element in `(N, o)`.
pub fn circle_orders(b: &Brace) -> Vec<u64> {
    b.elements()
        .map(|a| {
            let mut y = a;
            let mut k = 1;
            while y != 0 {
                y = b.circle(y, a);
                k += 1;
            }
            k
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OmegaLevel {
    pub i: u32,
    pub additive_size: usize,
    pub circle_size: usize,
    /// `Omega_(i+1)(+) \ Omega_i(+)` inside `Omega_(i+1)(o) \ Omega_i(o)`.
    pub inclusion: bool,
    /// `Omega_(i+1)(+)` inside `Omega_(i+1)(o)`.
    pub nested: bool,
    pub witness: Option<Elem>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OmegaReport {
    pub p: u64,
    pub rank_d: usize,
    pub hypothesis_holds: bool,
    pub levels: Vec<OmegaLevel>,
    pub all_hold: bool,
}

fn omega_set(orders: &[u64], pi: u64) -> Vec<bool> {
    orders.iter().map(|&o| pi % o == 0).collect()
}

/// Compares the filtrations `Omega_i(N, +)` and `Omega_i(N, o)` as raw sets.
pub fn omega_chain_check(b: &Brace) -> Result<OmegaReport> {
    let p = prime_of(b)?;
    let (_, rank_d) = base_rank(b, p);
    let add_orders: Vec<u64> = b.elements().map(|x| b.group().order(x)).collect();
    let circ_orders = circle_orders(b);
    let top = add_orders.iter().chain(&circ_orders).copied().max().unwrap_or(1);
    let e = top.ilog(p);
    let mut levels = Vec::new();
    for i in 0..e.max(1) {
        let (lo, hi) = (ipow(p, i), ipow(p, i + 1));
        let (a_lo, a_hi) = (omega_set(&add_orders, lo), omega_set(&add_orders, hi));
        let (c_lo, c_hi) = (omega_set(&circ_orders, lo), omega_set(&circ_orders, hi));
        let witness = (0..b.size()).find(|&x| a_hi[x] && !a_lo[x] && !(c_hi[x] && !c_lo[x]));
        let nested = (0..b.size()).all(|x| !a_hi[x] || c_hi[x]);
        levels.push(OmegaLevel {
            i,
            additive_size: a_hi.iter().filter(|&&f| f).count(),
            circle_size: c_hi.iter().filter(|&&f| f).count(),
            inclusion: witness.is_none(),
            nested,
            witness: witness.map(|x| x as Elem),
        });
    }
    let all_hold = levels.iter().all(|l| l.inclusion);
    Ok(OmegaReport { p, rank_d, hypothesis_holds: (rank_d as u64) + 1 < p, levels, all_hold })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SChainReport {
    pub element: Elem,
    pub i: u32,
    /// `|Omega_(i+1)(+) / Omega_(i-1)(+)|`.
    pub quotient_size: usize,
    /// Order of the class of `a` in that quotient.
    pub class_order: u64,
    /// `delta_a^j(a)` for `j = 0, 1, ...` until the orbit reaches zero.
    pub orbit: Vec<Elem>,
    /// `|S_j|` in the quotient, `j = 1, 2, ...`, ending at `1`.
    pub profile: Vec<usize>,
    pub strictly_decreasing: bool,
    /// `k` with `p a` in `S_k \ S_(k+1)`, when `p a` is nonzero in the quotient.
    pub k: Option<usize>,
    /// `|S / S_k| = |D/pD|^(k-1)`, when `k` is defined.
    pub dimension_matches: Option<bool>,
    /// `p_o a` is not in `Omega_(i-1)(+)`.
    pub circle_power_escapes: bool,
}

/// Exposes the `delta_a`-orbit filtration of `Omega_(i+1)/Omega_(i-1)` for
/// `a` of additive order exactly `p^(i+1)`, `i >= 1`.
pub fn s_chain_diagnostic(b: &Brace, a: Elem, i: u32) -> Result<SChainReport> {
    let p = prime_of(b)?;
    let g = b.group();
    if i == 0 || g.order(a) != ipow(p, i + 1) {
        return Err(Error::Precondition(format!("element {a} does not have additive order p^{}", i + 1)));
    }
    let (lambda, _) = base_rank(b, p);
    let xi = if lambda > 1 { b.xi_table() } else { None };
    let low = g.torsion(ipow(p, i - 1));
    let high = g.torsion(ipow(p, i + 1));
    let gamma = b.gamma_of(a);
    let mut orbit = vec![a];
    while *orbit.last().unwrap() != 0 && orbit.len() <= b.size() {
        let v = *orbit.last().unwrap();
        orbit.push(g.sub(gamma[v as usize], v));
    }
    let add = |x, y| g.add(x, y);
    // S_j lifted to N: span of Omega_(i-1) and the D-multiples of delta^m(a), m >= j-1
    let lift = |j: usize| {
        let mut gens = low.clone();
        for &v in orbit.iter().skip(j - 1) {
            let mut w = v;
            gens.push(w);
            if let Some(xi) = &xi {
                for _ in 1..lambda {
                    w = xi[w as usize];
                    gens.push(w);
                }
            }
        }
        span_of(b.size(), 0, &add, &gens)
    };
    let mut spans = vec![lift(1)];
    while spans.last().unwrap().len() > low.len() {
        spans.push(lift(spans.len() + 1));
        let n = spans.len();
        if spans[n - 1] == spans[n - 2] {
            break;
        }
    }
    let profile: Vec<usize> = spans.iter().map(|s| s.len() / low.len()).collect();
    let strictly_decreasing = profile.last() == Some(&1) && profile.windows(2).all(|w| w[1] < w[0]);
    let pa = g.mul_int(p as i128, a);
    let contains = |s: &Vec<Elem>, x: Elem| s.binary_search(&x).is_ok();
    let k = (!contains(&low, pa))
        .then(|| (0..spans.len()).find(|&j| contains(&spans[j], pa) && !spans.get(j + 1).is_some_and(|s| contains(s, pa))))
        .flatten()
        .map(|j| j + 1);
    let residue = ipow(p, lambda) as usize;
    let dimension_matches = k.map(|k| profile[0] == profile[k - 1] * residue.pow(k as u32 - 1));
    let mut class_order = 1u64;
    let mut m = a;
    while !contains(&low, m) {
        m = g.add(m, a);
        class_order += 1;
    }
    let pc = circle_power(b, p, a);
    Ok(SChainReport {
        element: a,
        i,
        quotient_size: high.len() / low.len(),
        class_order,
        orbit,
        profile,
        strictly_decreasing,
        k,
        dimension_matches,
        circle_power_escapes: !contains(&low, pc),
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Prop4Report {
    pub p: u64,
    pub dimension: usize,
    pub hypothesis_holds: bool,
    /// Every nonzero element has circle order `p`.
    pub exponent_p: bool,
    pub circle_stats: OrderStats,
}

/// For a brace over a finite field, checks that `(N, o)` has exponent `p`
/// when the dimension is below `p - 1`.
pub fn prop4_check(b: &Brace) -> Result<Prop4Report> {
    let shape = b.shape().ok_or(Error::BaseNotField)?;
    if shape.ring().c != 1 {
        return Err(Error::BaseNotField);
    }
    let p = shape.p();
    let r = shape.rank();
    let exponent_p = b.elements().all(|a| circle_power(b, p, a) == 0);
    Ok(Prop4Report {
        p,
        dimension: r,
        hypothesis_holds: (r as u64) + 1 < p && b.class() == BraceClass::DBrace,
        exponent_p,
        circle_stats: b.circle_stats(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Confirmed,
    HypothesisFails,
    Defect,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TheoremReport {
    pub p: u64,
    pub lambda: u32,
    pub rank_d: usize,
    pub rank_z: usize,
    /// `rank_D < p - 1`.
    pub hypothesis_holds: bool,
    /// `rank_Z < p - 1`, the criterion without the Galois structure.
    pub z_hypothesis_holds: bool,
    pub additive_stats: OrderStats,
    pub circle_stats: OrderStats,
    pub stats_equal: bool,
    pub omega_inclusions: Vec<bool>,
    pub circle_abelian: bool,
    pub verdict: Verdict,
    /// `(N, +) -> (N, o)` when both are abelian and isomorphic.
    pub isomorphism: Option<Vec<Elem>>,
}

fn is_circle_abelian(b: &Brace) -> bool {
    b.elements().all(|x| b.elements().all(|y| b.circle(x, y) == b.circle(y, x)))
}

/// Rank criterion for a brace of prime-power order, over its own module
/// ring when it is a `D`-brace and over `Z` otherwise.
pub fn theorem_check(b: &Brace) -> Result<TheoremReport> {
    let p = prime_of(b)?;
    let (lambda, rank_d) = base_rank(b, p);
    let rank_z = z_rank(b, p);
    let additive_stats = b.additive_stats();
    let circle_stats = b.circle_stats();
    let stats_equal = additive_stats == circle_stats;
    let omega = omega_chain_check(b)?;
    let omega_inclusions: Vec<bool> = omega.levels.iter().map(|l| l.inclusion).collect();
    let circle_abelian = is_circle_abelian(b);
    let hypothesis_holds = (rank_d as u64) + 1 < p;
    let verdict = match (hypothesis_holds, stats_equal && omega.all_hold) {
        (false, _) => Verdict::HypothesisFails,
        (true, true) => Verdict::Confirmed,
        (true, false) => Verdict::Defect,
    };
    let isomorphism = if circle_abelian && stats_equal {
        let add = |x, y| b.add(x, y);
        let circ = |x, y| b.circle(x, y);
        abelian_isomorphism(b.size(), &add, &circ)?
    } else {
        None
    };
    Ok(TheoremReport {
        p,
        lambda,
        rank_d,
        rank_z,
        hypothesis_holds,
        z_hypothesis_holds: (rank_z as u64) + 1 < p,
        additive_stats,
        circle_stats,
        stats_equal,
        omega_inclusions,
        circle_abelian,
        verdict,
        isomorphism,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SummandTheorem {
    pub p: u64,
    pub lambda: u32,
    pub c: u32,
    pub elements: Vec<Elem>,
    pub is_ideal: bool,
    pub rank_d: usize,
    pub rank_z: usize,
    /// `rank_Z N_i < lambda_i (p_i - 1)`.
    pub hypothesis_holds: bool,
    pub additive_stats: OrderStats,
    pub circle_stats: OrderStats,
    pub stats_equal: bool,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ActionTheoremReport {
    pub summands: Vec<SummandTheorem>,
    pub all_ideals: bool,
    pub all_hypotheses: bool,
    pub stats_equal: bool,
    pub circle_abelian: bool,
    pub verdict: Verdict,
    pub isomorphism: Option<Vec<Elem>>,
}

/// The rank criterion for a brace whose gamma maps commute with a finite
/// commutative ring action, applied summand by summand after splitting the
/// faithful quotient of the ring into Galois rings.
pub fn theorem_check_over_action(b: &Brace, act: &RingAction) -> Result<ActionTheoremReport> {
    if act.module() != b.group() {
        return Err(Error::ShapeMismatch("action and brace disagree".into()));
    }
    if let Some((x, g)) = b.linearity_witness(act) {
        return Err(Error::NotGamma(format!("gamma_{x} does not commute with ring generator {g}")));
    }
    let pad = act.padic_structure()?;
    let mut summands = Vec::new();
    for s in &pad.summands {
        let cls = crate::brace::classify_subset(b, &s.elements);
        let (sub, _) = sub_brace(b, &s.elements)?;
        let rank_d = s.exponents.len();
        let rank_z = z_rank(&sub, s.p);
        let hypothesis_holds = (rank_z as u64) < s.lambda as u64 * (s.p - 1);
        let additive_stats = sub.additive_stats();
        let circle_stats = sub.circle_stats();
        let stats_equal = additive_stats == circle_stats;
        let verdict = match (hypothesis_holds, stats_equal) {
            (false, _) => Verdict::HypothesisFails,
            (true, true) => Verdict::Confirmed,
            (true, false) => Verdict::Defect,
        };
        summands.push(SummandTheorem {
            p: s.p,
            lambda: s.lambda,
            c: s.c,
            elements: s.elements.clone(),
            is_ideal: cls.ideal,
            rank_d,
            rank_z,
            hypothesis_holds,
            additive_stats,
            circle_stats,
            stats_equal,
            verdict,
        });
    }
    let all_ideals = summands.iter().all(|s| s.is_ideal);
    let all_hypotheses = summands.iter().all(|s| s.hypothesis_holds);
    let stats_equal = b.additive_stats() == b.circle_stats();
    let circle_abelian = is_circle_abelian(b);
    let defect = summands.iter().any(|s| s.verdict == Verdict::Defect) || (all_ideals && all_hypotheses && !stats_equal);
    let verdict = if defect {
        Verdict::Defect
    } else if all_ideals && all_hypotheses {
        Verdict::Confirmed
    } else {
        Verdict::HypothesisFails
    };
    let isomorphism = if circle_abelian && stats_equal {
        let add = |x, y| b.add(x, y);
        let circ = |x, y| b.circle(x, y);
        abelian_isomorphism(b.size(), &add, &circ)?
    } else {
        None
    };
    Ok(ActionTheoremReport { summands, all_ideals, all_hypotheses, stats_equal, circle_abelian, verdict, isomorphism })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::abelian::AbelianGroup;
    use crate::module::{enumerate_automorphisms, Linearity};
    use crate::radical_ring::NilpotentRing;

    fn two_z8() -> Brace {
        NilpotentRing::multiples(2, 8).unwrap().brace().unwrap()
    }

    #[test]
    fn circle_powers() {
        let t = Brace::trivial(AbelianGroup::new(vec![9]).unwrap(), None);
        for a in t.elements() {
            assert_eq!(circle_power(&t, 5, a), t.group().mul_int(5, a));
            assert_eq!(circle_power(&t, 0, a), 0);
        }
        let b = two_z8();
        // index 1 is the element 2 of 2Z/8Z, and 2 o 2 = 8 = 0
        assert_eq!(circle_power(&b, 2, 1), 0);
        assert_eq!(circle_power(&b, 1, 3), 3);
    }

    #[test]
    fn p_power_three_ways() {
        let b = two_z8();
        let c = p_power_formula_check(&b, 1).unwrap();
        assert_eq!((c.iterated, c.geometric, c.binomial), (0, 0, 0));
        for a in b.elements() {
            assert!(p_power_formula_check(&b, a).unwrap().agree);
        }
        let g = NilpotentRing::galois_ideal_ring(3, 3, 2, 1).unwrap().brace().unwrap();
        for a in g.elements() {
            assert!(p_power_formula_check(&g, a).unwrap().agree);
        }
    }

    #[test]
    fn unipotency() {
        let s = ModuleShape::cyclic(2, &[2]).unwrap();
        let id: Vec<Elem> = s.group().elements().collect();
        assert!(aut_unipotency_check(&s, &id).unwrap().holds);
        let neg: Vec<Elem> = s.group().elements().map(|x| s.group().mul_int(3, x)).collect();
        let rep = aut_unipotency_check(&s, &neg).unwrap();
        assert_eq!(rep.image, vec![0, 2]);
        assert!(rep.holds);
        let s = ModuleShape::cyclic(2, &[2, 2]).unwrap();
        let auts = enumerate_automorphisms(&s, Linearity::Z, 1 << 12).unwrap();
        assert_eq!(auts.len(), 96);
        let mut passed = 0;
        for f in &auts {
            match aut_unipotency_check(&s, &f.table) {
                Ok(rep) => {
                    assert!(rep.holds);
                    passed += 1;
                }
                Err(Error::Precondition(_)) => {}
                Err(e) => panic!("{e}"),
            }
        }
        // preimages of the four 2-elements of GL_2(F_2) under a kernel of order 16
        assert_eq!(passed, 64);
    }

    #[test]
    fn omega_on_sharpness_witness() {
        let b = two_z8();
        let rep = omega_chain_check(&b).unwrap();
        assert!(!rep.hypothesis_holds);
        assert!(rep.levels[0].inclusion);
        assert!(!rep.levels[1].inclusion);
        assert_eq!(rep.levels[1].witness, Some(1));
        let t = Brace::trivial(AbelianGroup::new(vec![9, 3]).unwrap(), None);
        assert!(omega_chain_check(&t).unwrap().all_hold);
    }

    #[test]
    fn theorem_examples() {
        let rep = theorem_check(&two_z8()).unwrap();
        assert_eq!(rep.verdict, Verdict::HypothesisFails);
        assert_eq!(rep.additive_stats, OrderStats::from([(1, 1), (2, 1), (4, 2)]));
        assert_eq!(rep.circle_stats, OrderStats::from([(1, 1), (2, 3)]));
        let g = NilpotentRing::galois_ideal_ring(3, 3, 2, 1).unwrap().brace().unwrap();
        let rep = theorem_check(&g).unwrap();
        assert_eq!((rep.rank_d, rep.rank_z, rep.lambda), (1, 2, 2));
        assert!(rep.hypothesis_holds && !rep.z_hypothesis_holds);
        assert_eq!(rep.verdict, Verdict::Confirmed);
        assert!(rep.isomorphism.is_some());
    }

    #[test]
    fn s_chain_on_trivial() {
        let t = Brace::trivial(AbelianGroup::new(vec![9]).unwrap(), None);
        let rep = s_chain_diagnostic(&t, 1, 1).unwrap();
        assert_eq!(rep.class_order, 9);
        assert_eq!(rep.profile, vec![9, 1]);
        assert_eq!(rep.k, Some(1));
        assert!(rep.strictly_decreasing && rep.circle_power_escapes);
        assert!(s_chain_diagnostic(&t, 3, 1).is_err());
    }

    #[test]
    fn prop4_gate() {
        let s = ModuleShape::from_params(2, 1, &[1, 1]).unwrap();
        let t = Brace::trivial(s.group().clone(), Some(s));
        let rep = prop4_check(&t).unwrap();
        assert!(!rep.hypothesis_holds && rep.exponent_p);
        let s = ModuleShape::from_params(3, 1, &[1]).unwrap();
        let t = Brace::trivial(s.group().clone(), Some(s));
        assert!(prop4_check(&t).unwrap().hypothesis_holds);
    }
}
