//! Worked examples, generated from scratch.

use serde::Serialize;
use serde_json::{json, Value};

use crate::abelian::{AbelianGroup, Elem};
use crate::analysis::{theorem_check, theorem_check_over_action, Verdict};
use crate::brace::{peirce_split_brace, two_sided_check, Brace, BraceClass};
use crate::document::BraceDocument;
use crate::error::{Error, Result};
use crate::finite_ring::{FiniteCommRing, RingAction};
use crate::radical_ring::{corollary_radring_check, NilpotentRing};

pub const DEMO_NAMES: [&str; 4] = ["gaussian", "galois-gain", "sylow-split", "brace-dec"];

#[derive(Debug, Clone, Serialize)]
pub struct Demo {
    pub name: String,
    /// Generated brace documents, by file stem.
    pub documents: Vec<(String, BraceDocument)>,
    pub narrative: Vec<String>,
    pub report: Value,
    /// Every expectation of the demo was met.
    pub ok: bool,
}

pub fn run_demo(name: &str) -> Result<Demo> {
    match name {
        "gaussian" => gaussian(),
        "galois-gain" => galois_gain(),
        "sylow-split" => sylow_split(),
        "brace-dec" => brace_dec(),
        other => Err(Error::InvalidParameter(format!("unknown demo '{other}'; expected one of {}", DEMO_NAMES.join(", ")))),
    }
}

/// `Z[i]/m`, as `(Z/m)[t]/(t^2 + 1)`.
pub fn gaussian_ring(m: u64) -> Result<FiniteCommRing> {
    FiniteCommRing::polynomial_quotient(m, &[1, 0, 1])
}

/// The brace on `(Z[i]/m)^2` with `gamma_(a, b) = (-1)^(Re a) id`, together
/// with the `Z[i]/m` action on it. `m` must be even.
pub fn gaussian_brace(m: u64) -> Result<(Brace, RingAction)> {
    if m % 2 != 0 {
        return Err(Error::InvalidParameter("the parity of Re a needs an even modulus".into()));
    }
    let ring = gaussian_ring(m)?;
    let module = AbelianGroup::new(vec![m; 4])?;
    let m = module.clone();
    // coordinates (Re a, Im a, Re b, Im b); (u + vt)(x + yt) = (ux - vy) + (uy + vx)t
    let act = RingAction::from_fn(ring.clone(), module.clone(), move |r, x| {
        let s = ring.group().decode(r);
        let c = m.decode(x);
        let (u, v) = (s[0] as i64, s[1] as i64);
        let mut out = [0i64; 4];
        for k in 0..2 {
            let (re, im) = (c[2 * k] as i64, c[2 * k + 1] as i64);
            out[2 * k] = u * re - v * im;
            out[2 * k + 1] = u * im + v * re;
        }
        m.encode_signed(&out)
    })?;
    let ident: Vec<Elem> = module.elements().collect();
    let minus: Vec<Elem> = module.elements().map(|x| module.neg(x)).collect();
    let tables = module
        .elements()
        .map(|x| if module.decode(x)[0] % 2 == 0 { ident.clone() } else { minus.clone() })
        .collect();
    Ok((Brace::from_tables(module, None, tables)?, act))
}

fn gaussian() -> Result<Demo> {
    let (b, act) = gaussian_brace(4)?;
    let doc = BraceDocument::from_brace(&b, Some(&act));
    let verdict = doc.verify()?;
    let linear = b.linearity_witness(&act).is_none();
    let one_zero = b.group().encode(&[1, 0, 0, 0]);
    let minus_id = b.gamma_of(one_zero).iter().enumerate().all(|(y, &g)| g == b.group().neg(y as Elem));
    let two_sided = two_sided_check(&b);
    let thm = theorem_check_over_action(&b, &act)?;
    let narrative = vec![
        format!("N = (Z[i]/4)^2, |N| = {}, additive orders {:?}", b.size(), b.group().orders()),
        format!("gamma verification: {:?}; Z[i]/4-linear: {linear}", verdict.class),
        format!("gamma_(1,0) = -id: {minus_id}"),
        match two_sided {
            None => "right brace axiom holds on all triples (4z = 0 makes the quotient two-sided)".into(),
            Some((x, y, z)) => format!("right brace axiom fails at ({x}, {y}, {z})"),
        },
        format!(
            "rank criterion over Z[i]/4 (residue field F_{}): {:?}",
            thm.summands.first().map_or(0, |s| s.p),
            thm.verdict
        ),
    ];
    let ok = verdict.class == BraceClass::ZBrace && verdict.failure.is_none() && linear && minus_id && thm.verdict != Verdict::Defect;
    Ok(Demo {
        name: "gaussian".into(),
        documents: vec![("gaussian".into(), doc)],
        narrative,
        report: json!({
            "verdict": verdict,
            "linear": linear,
            "gamma_1_0_is_minus_id": minus_id,
            "two_sided_witness": two_sided,
            "theorem": thm,
        }),
        ok,
    })
}

fn galois_gain() -> Result<Demo> {
    let ring = NilpotentRing::galois_ideal_ring(3, 3, 2, 1)?;
    let b = ring.brace()?;
    let over_d = theorem_check(&b)?;
    let over_z = theorem_check(&b.with_shape(None)?)?;
    let radring = corollary_radring_check(&ring, b.shape())?;
    let narrative = vec![
        format!("N = 3 GR(3,3,2) as a GR(3,2,2)-module, |N| = {}", b.size()),
        format!("rank_D = {}, rank_Z = {} = lambda * rank_D", over_d.rank_d, over_d.rank_z),
        format!("over Z: rank {} < p - 1 = 2 is {}: inconclusive", over_z.rank_d, over_z.hypothesis_holds),
        format!("over D: rank {} < p - 1 = 2 is {}: {:?}", over_d.rank_d, over_d.hypothesis_holds, over_d.verdict),
        format!("additive {:?}, circle {:?}", over_d.additive_stats, over_d.circle_stats),
    ];
    let ok = over_d.rank_d == 1
        && over_d.rank_z == 2
        && over_d.verdict == Verdict::Confirmed
        && over_z.verdict == Verdict::HypothesisFails
        && over_d.stats_equal
        && radring.stats_equal;
    Ok(Demo {
        name: "galois-gain".into(),
        documents: vec![("galois-gain".into(), BraceDocument::from_brace(&b, None))],
        narrative,
        report: json!({ "over_d": over_d, "over_z": over_z, "radical_ring": radring }),
        ok,
    })
}

fn sylow_split() -> Result<Demo> {
    let act = RingAction::regular(FiniteCommRing::integers_mod(12)?);
    let b = Brace::trivial(act.module().clone(), None);
    let split = peirce_split_brace(&b, &act)?;
    let mut orders: Vec<usize> = split.summands.iter().map(|s| s.elements.len()).collect();
    orders.sort_unstable();
    let narrative = vec![
        format!(
            "primitive idempotents {:?}",
            split.summands.iter().map(|s| s.idempotent).collect::<Vec<_>>()
        ),
        format!("summand orders {orders:?}; all ideals: {}", split.all_ideals),
        format!(
            "componentwise circle {}, gamma {}, star {}; conditions agree: {}",
            split.product_isomorphism, split.gamma_splits, split.star_splits, split.conditions_agree
        ),
    ];
    let ok = orders == [3, 4] && split.all_ideals && split.conditions_agree;
    Ok(Demo {
        name: "sylow-split".into(),
        documents: vec![("sylow-split".into(), BraceDocument::from_brace(&b, Some(&act)))],
        narrative,
        report: serde_json::to_value(&split).expect("report serializes"),
        ok,
    })
}

/// `2Z/8Z x 3Z/9Z` as a commutative nilpotent ring with its `Z/12` action.
pub fn brace_dec_ring() -> Result<(NilpotentRing, RingAction)> {
    let n = NilpotentRing::product(&[NilpotentRing::multiples(2, 8)?, NilpotentRing::multiples(3, 9)?])?;
    let g = n.group().clone();
    let act = RingAction::from_fn(FiniteCommRing::integers_mod(12)?, g.clone(), move |r, x| g.mul_int(r as i128, x))?;
    Ok((n, act))
}

fn brace_dec() -> Result<Demo> {
    let (n, act) = brace_dec_ring()?;
    let b = n.brace()?;
    let split = peirce_split_brace(&b, &act)?;
    let narrative = vec![
        format!("N = 2Z/8Z x 3Z/9Z, |N| = {}", b.size()),
        format!(
            "summands {:?}; all ideals: {}",
            split.summands.iter().map(|s| s.elements.len()).collect::<Vec<_>>(),
            split.all_ideals
        ),
        format!(
            "adjoint group is the product of the summand adjoint groups: {} (order statistics match: {:?})",
            split.product_isomorphism, split.product_circle_stats_match
        ),
    ];
    let ok = split.all_ideals && split.conditions_agree && split.product_circle_stats_match == Some(true);
    Ok(Demo {
        name: "brace-dec".into(),
        documents: vec![("brace-dec".into(), BraceDocument::from_brace(&b, Some(&act)))],
        narrative,
        report: serde_json::to_value(&split).expect("report serializes"),
        ok,
    })
}
