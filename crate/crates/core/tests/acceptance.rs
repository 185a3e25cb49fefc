//! End-to-end acceptance run. Each criterion prints one PASS/FAIL line and
//! checks the library against an oracle written here, independently.

use std::collections::{BTreeMap, BTreeSet};
use std::io::Write;
use std::time::{Duration, Instant};

use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};

use modbrace::abelian::{AbelianGroup, Elem, OrderStats};
use modbrace::analysis::{aut_unipotency_check, p_power_formula_check, theorem_check, Verdict};
use modbrace::brace::{peirce_split_brace, verify_gamma, Brace, BraceClass, GammaFunction};
use modbrace::demos::{brace_dec_ring, run_demo};
use modbrace::enumeration::{
    enumerate_braces_backtracking, enumerate_braces_holomorph, Enumeration, EnumerationMode, EnumerationTask,
};
use modbrace::finite_ring::{FiniteCommRing, RingAction};
use modbrace::galois_ring::{embed_into_local_ring, GaloisRingSpec};
use modbrace::module::{enumerate_automorphisms, Linearity, ModuleShape};
use modbrace::radical_ring::{corollary_radring_check, NilpotentRing};
use modbrace::series::{csv_minimality_check, left_series, right_series};

type Check = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if !$cond {
            return Err(format!($($fmt)+));
        }
    };
}

fn ok<T, E: std::fmt::Debug>(r: Result<T, E>) -> Result<T, String> {
    r.map_err(|e| format!("{e:?}"))
}

// ---------------------------------------------------------------- oracles

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 { a } else { gcd(b, a % b) }
}

fn lcm(a: u64, b: u64) -> u64 {
    a / gcd(a, b) * b
}

/// Additive order from coordinates.
fn additive_order(g: &AbelianGroup, x: Elem) -> u64 {
    g.decode(x)
        .iter()
        .zip(g.orders())
        .fold(1, |acc, (&c, &m)| lcm(acc, m / gcd(c, m)))
}

fn circle_order(b: &Brace, x: Elem) -> u64 {
    let (mut y, mut k) = (x, 1);
    while y != 0 {
        y = b.circle(y, x);
        k += 1;
    }
    k
}

fn histogram(orders: impl Iterator<Item = u64>) -> OrderStats {
    let mut h = BTreeMap::new();
    for o in orders {
        *h.entry(o).or_insert(0) += 1;
    }
    h
}

/// All additive automorphisms, by images of the standard generators.
fn automorphisms(g: &AbelianGroup) -> Vec<Vec<Elem>> {
    let n = g.size();
    let k = g.num_generators();
    let choices: Vec<Vec<Elem>> = g
        .orders()
        .iter()
        .map(|&m| g.elements().filter(|&x| m % additive_order(g, x) == 0).collect())
        .collect();
    let mut out = Vec::new();
    let mut idx = vec![0usize; k];
    loop {
        let imgs: Vec<Elem> = (0..k).map(|i| choices[i][idx[i]]).collect();
        let table: Vec<Elem> = g
            .elements()
            .map(|x| {
                g.decode(x)
                    .iter()
                    .zip(&imgs)
                    .fold(g.zero(), |acc, (&c, &im)| g.add(acc, g.mul_int(c as i128, im)))
            })
            .collect();
        let distinct: BTreeSet<Elem> = table.iter().copied().collect();
        if distinct.len() == n {
            out.push(table);
        }
        let mut i = 0;
        loop {
            if i == k {
                out.sort();
                return out;
            }
            idx[i] += 1;
            if idx[i] < choices[i].len() {
                break;
            }
            idx[i] = 0;
            i += 1;
        }
    }
}

/// Plain depth-first search for gamma functions, checking
/// `gamma(u + gamma_u(v)) = gamma_u gamma_v` as soon as all three are set.
fn naive_gamma_functions(g: &AbelianGroup, auts: &[Vec<Elem>]) -> BTreeSet<Vec<Vec<Elem>>> {
    let n = g.size();
    let index: BTreeMap<&[Elem], usize> = auts.iter().enumerate().map(|(i, a)| (a.as_slice(), i)).collect();
    let comp: Vec<Vec<usize>> = auts
        .iter()
        .map(|f| {
            auts.iter()
                .map(|h| index[h.iter().map(|&y| f[y as usize]).collect::<Vec<_>>().as_slice()])
                .collect()
        })
        .collect();
    fn go(
        x: usize,
        assign: &mut Vec<usize>,
        g: &AbelianGroup,
        auts: &[Vec<Elem>],
        comp: &[Vec<usize>],
        out: &mut BTreeSet<Vec<Vec<Elem>>>,
    ) {
        let n = g.size();
        if x == n {
            out.insert(assign.iter().map(|&i| auts[i].clone()).collect());
            return;
        }
        'cand: for a in 0..auts.len() {
            assign.push(a);
            for u in 0..=x {
                for v in 0..=x {
                    let w = g.add(u as Elem, auts[assign[u]][v]) as usize;
                    if w <= x && (u == x || v == x || w == x) && assign[w] != comp[assign[u]][assign[v]] {
                        assign.pop();
                        continue 'cand;
                    }
                }
            }
            go(x + 1, assign, g, auts, comp, out);
            assign.pop();
        }
    }
    let mut out = BTreeSet::new();
    go(0, &mut Vec::with_capacity(n), g, auts, &comp, &mut out);
    out
}

fn gamma_tables(b: &Brace) -> Vec<Vec<Elem>> {
    b.elements().map(|x| b.gamma_of(x).to_vec()).collect()
}

/// `x o y = x + t_x(y)` is a group satisfying the left brace axiom.
fn is_brace_by_axioms(g: &AbelianGroup, tables: &[Vec<Elem>]) -> bool {
    let n = g.size() as Elem;
    let circ = |x: Elem, y: Elem| g.add(x, tables[x as usize][y as usize]);
    let Some(e) = (0..n).find(|&e| (0..n).all(|y| circ(e, y) == y && circ(y, e) == y)) else {
        return false;
    };
    for x in 0..n {
        if !(0..n).any(|y| circ(x, y) == e) {
            return false;
        }
        for y in 0..n {
            let xy = circ(x, y);
            for z in 0..n {
                if circ(xy, z) != circ(x, circ(y, z)) {
                    return false;
                }
                if circ(x, g.add(y, z)) != g.add(g.sub(circ(x, y), x), circ(x, z)) {
                    return false;
                }
            }
        }
    }
    true
}

// ---------------------------------------------------------------- corpus

struct Shape {
    name: &'static str,
    p: u64,
    exps: &'static [u32],
}

const DUAL_SHAPES: [Shape; 7] = [
    Shape { name: "Z/4", p: 2, exps: &[2] },
    Shape { name: "(Z/2)^2", p: 2, exps: &[1, 1] },
    Shape { name: "Z/8", p: 2, exps: &[3] },
    Shape { name: "Z/4+Z/2", p: 2, exps: &[2, 1] },
    Shape { name: "(Z/2)^3", p: 2, exps: &[1, 1, 1] },
    Shape { name: "Z/9", p: 3, exps: &[2] },
    Shape { name: "(Z/3)^2", p: 3, exps: &[1, 1] },
];

fn z_enumeration(p: u64, exps: &[u32]) -> Enumeration {
    let shape = ModuleShape::cyclic(p, exps).expect("shape");
    enumerate_braces_backtracking(&EnumerationTask::on_shape(&shape, EnumerationMode::Z)).expect("enumeration")
}

/// Every brace used by the corpus-wide criteria.
fn corpus() -> Vec<(String, Brace)> {
    let mut out = Vec::new();
    for s in &DUAL_SHAPES {
        for (i, b) in z_enumeration(s.p, s.exps).braces.into_iter().enumerate() {
            out.push((format!("{}#{i}", s.name), b));
        }
    }
    for (name, exps) in [("Z/27", &[3u32][..]), ("Z/81", &[4][..])] {
        for (i, b) in z_enumeration(3, exps).braces.into_iter().enumerate() {
            out.push((format!("{name}#{i}"), b));
        }
    }
    for exps in [&[1u32][..], &[2][..]] {
        let shape = ModuleShape::from_params(3, 2, exps).expect("shape");
        let e = enumerate_braces_backtracking(&EnumerationTask::on_shape(&shape, EnumerationMode::D)).expect("enumeration");
        for (i, b) in e.braces.into_iter().enumerate() {
            out.push((format!("GR(9)^{exps:?}#{i}"), b));
        }
    }
    for (name, ring) in [
        ("2Z/8Z", NilpotentRing::multiples(2, 8)),
        ("3Z/27Z", NilpotentRing::multiples(3, 27)),
        ("3GR(27,2)", NilpotentRing::galois_ideal_ring(3, 3, 2, 1)),
    ] {
        out.push((name.into(), ring.and_then(|r| r.brace()).expect("radical ring")));
    }
    out
}

// ---------------------------------------------------------------- criteria

fn criterion_1() -> Check {
    let start = Instant::now();
    let mut counts = Vec::new();
    for s in &DUAL_SHAPES {
        let shape = ok(ModuleShape::cyclic(s.p, s.exps))?;
        let task = EnumerationTask::on_shape(&shape, EnumerationMode::Z);
        let bt = ok(enumerate_braces_backtracking(&task))?;
        let hol = ok(enumerate_braces_holomorph(&task))?;
        ensure!(bt.keys == hol.keys, "{}: backtracking {} vs holomorph {}", s.name, bt.len(), hol.len());
        ensure!(bt.braces == hol.braces, "{}: same keys, different braces", s.name);

        let auts = automorphisms(shape.group());
        ensure!(auts == bt.automorphisms, "{}: automorphism lists differ", s.name);
        let naive = naive_gamma_functions(shape.group(), &auts);
        let found: BTreeSet<Vec<Vec<Elem>>> = bt.braces.iter().map(gamma_tables).collect();
        ensure!(naive == found, "{}: naive search finds {} braces, enumerators {}", s.name, naive.len(), found.len());
        counts.push(format!("{} {}", s.name, bt.len()));
        if s.name == "Z/4" {
            ensure!(bt.len() == 2, "Z/4 has {} braces, expected 2", bt.len());
        }
    }
    let t = start.elapsed();
    ensure!(t <= Duration::from_secs(300), "took {t:?}");
    Ok(format!("{} in {:.1}s", counts.join(", "), t.as_secs_f64()))
}

fn criterion_2() -> Check {
    let start = Instant::now();
    let mut total = 0;
    for exps in [&[2u32][..], &[3][..]] {
        let e = z_enumeration(3, exps);
        for b in &e.braces {
            let r = ok(theorem_check(b))?;
            ensure!(r.hypothesis_holds && r.rank_d == 1, "rank criterion should apply");
            ensure!(r.verdict == Verdict::Confirmed, "defect: {r:?}");
            ensure!(r.stats_equal && r.omega_inclusions.iter().all(|&x| x), "report inconsistent: {r:?}");
            // equal layers for every i means every element keeps its order
            for x in b.elements() {
                let (a, c) = (additive_order(b.group(), x), circle_order(b, x));
                ensure!(a == c, "element {x}: additive order {a}, circle order {c}");
            }
            let add = histogram(b.elements().map(|x| additive_order(b.group(), x)));
            ensure!(add == r.additive_stats && add == r.circle_stats, "stats differ from the oracle");
        }
        total += e.len();
    }
    let t = start.elapsed();
    ensure!(t <= Duration::from_secs(600), "took {t:?}");
    Ok(format!("{total} braces on Z/9 and Z/27, zero defects, {:.1}s", t.as_secs_f64()))
}

fn criterion_3() -> Check {
    // 2Z/8Z = {0, 2, 4, 6}, x o y = x + y + xy mod 8
    let elems = [0u64, 2, 4, 6];
    let add_order = |x: u64| (1..).find(|k| k * x % 8 == 0).unwrap();
    let circ_order = |x: u64| {
        let (mut y, mut k) = (x, 1);
        while y != 0 {
            y = (y + x + y * x) % 8;
            k += 1;
        }
        k
    };
    let add = histogram(elems.iter().map(|&x| add_order(x)));
    let circ = histogram(elems.iter().map(|&x| circ_order(x)));
    let expected_add: OrderStats = [(1, 1), (2, 1), (4, 2)].into();
    let expected_circ: OrderStats = [(1, 1), (2, 3)].into();
    ensure!(add == expected_add && circ == expected_circ, "oracle: {add:?} {circ:?}");

    let ring = ok(NilpotentRing::multiples(2, 8))?;
    let r = ok(corollary_radring_check(&ring, ring.shape()))?;
    ensure!(r.additive_stats == add && r.circle_stats == circ, "library: {:?} vs {:?}", r.additive_stats, r.circle_stats);
    ensure!(!r.hypothesis_holds && r.rank_d == Some(1) && r.p == Some(2), "hypothesis 1 < 1 must fail");
    let t = ok(theorem_check(&ok(ring.brace())?))?;
    ensure!(t.verdict == Verdict::HypothesisFails && !t.stats_equal, "{t:?}");
    Ok(format!("additive {add:?}, circle {circ:?}, hypothesis false"))
}

fn criterion_4() -> Check {
    let start = Instant::now();
    let ring = ok(NilpotentRing::galois_ideal_ring(3, 3, 2, 1))?;
    let b = ok(ring.brace())?;
    let g = b.group();
    ensure!(b.size() == 81, "|N| = {}", b.size());
    // rank over Z from the 3-torsion, over GR(3,2,2) from N / 3N and |F_9| = 9
    let torsion = g.elements().filter(|&x| g.mul_int(3, x) == 0).count();
    let triple: BTreeSet<Elem> = g.elements().map(|x| g.mul_int(3, x)).collect();
    let rank_z = (torsion as f64).log(3.0).round() as usize;
    let rank_d = ((b.size() / triple.len()) as f64).log(9.0).round() as usize;
    ensure!((rank_z, rank_d) == (2, 1), "oracle ranks {rank_z}, {rank_d}");

    let r = ok(theorem_check(&b))?;
    ensure!(r.rank_d == 1 && r.rank_z == 2 && r.lambda == 2, "library ranks: {} {} {}", r.rank_d, r.rank_z, r.lambda);
    ensure!(r.hypothesis_holds && !r.z_hypothesis_holds, "hypotheses: D {} Z {}", r.hypothesis_holds, r.z_hypothesis_holds);
    let add = histogram(b.elements().map(|x| additive_order(g, x)));
    let circ = histogram(b.elements().map(|x| circle_order(&b, x)));
    ensure!(add == circ && r.stats_equal && r.verdict == Verdict::Confirmed, "stats {add:?} vs {circ:?}");
    Ok(format!("rank_D 1, rank_Z 2, stats {add:?}, {:.2}s", start.elapsed().as_secs_f64()))
}

fn criterion_5(corpus: &[(String, Brace)]) -> Check {
    let (mut braces, mut elements) = (0, 0);
    for (name, b) in corpus.iter().filter(|(_, b)| b.size() <= 81) {
        let p = modbrace::arith::smallest_prime_factor(b.size() as u64);
        let g = b.group();
        for a in b.elements() {
            let r = ok(p_power_formula_check(b, a))?;
            ensure!(r.agree, "{name}, a = {a}: {r:?}");
            let gam = b.gamma_of(a);
            let iterated = (1..p).fold(a, |acc, _| b.circle(acc, a));
            let (mut geometric, mut power) = (g.zero(), a);
            for _ in 0..p {
                geometric = g.add(geometric, power);
                power = gam[power as usize];
            }
            let (mut binomial, mut delta) = (g.zero(), a);
            for k in 0..p {
                let c = modbrace::arith::binomial(p, k + 1) as i128;
                binomial = g.add(binomial, g.mul_int(c, delta));
                delta = g.sub(gam[delta as usize], delta);
            }
            ensure!(
                [r.iterated, r.geometric, r.binomial] == [iterated; 3] && geometric == iterated && binomial == iterated,
                "{name}, a = {a}: oracle {iterated} {geometric} {binomial}, library {r:?}"
            );
            elements += 1;
        }
        braces += 1;
    }
    Ok(format!("{braces} braces, {elements} elements, zero mismatches"))
}

fn perm_order(f: &[Elem]) -> u64 {
    let mut seen = vec![false; f.len()];
    let mut order = 1;
    for s in 0..f.len() {
        let (mut x, mut len) = (s, 0);
        while !seen[x] {
            seen[x] = true;
            x = f[x] as usize;
            len += 1;
        }
        if len > 0 {
            order = lcm(order, len);
        }
    }
    order
}

fn criterion_6() -> Check {
    // |GL_2(Z/4)|: matrices with odd determinant
    let mut gl = 0;
    for m in 0..256u64 {
        let (a, b, c, d) = (m & 3, (m >> 2) & 3, (m >> 4) & 3, (m >> 6) & 3);
        if (a * d + 4 * 4 - b * c) % 2 == 1 {
            gl += 1;
        }
    }
    ensure!(gl == 96, "oracle |Aut| = {gl}");

    let mut summary = Vec::new();
    for (p, exps, rank) in [(2u64, &[2u32, 2][..], 2usize), (3, &[2][..], 1)] {
        let shape = ok(ModuleShape::cyclic(p, exps))?;
        let g = shape.group();
        let auts = ok(enumerate_automorphisms(&shape, Linearity::D, 1 << 16))?;
        if p == 2 {
            ensure!(auts.len() == 96, "library |Aut((Z/4)^2)| = {}", auts.len());
        }
        let mut checked = 0;
        for f in &auts {
            let ord = perm_order(&f.table);
            if ord & (ord - 1) != 0 && p == 2 || p == 3 && 3u64.pow(ord.ilog(3)) != ord {
                continue;
            }
            let r = ok(aut_unipotency_check(&shape, &f.table))?;
            // (f - id)^rank applied to every x lands in pN
            let holds = g.elements().all(|x| {
                let y = (0..rank).fold(x, |y, _| g.sub(f.table[y as usize], y));
                g.decode(y).iter().all(|&c| c % p == 0)
            });
            ensure!(holds && r.holds, "f = {:?}: oracle {holds}, library {}", f.table, r.holds);
            checked += 1;
        }
        summary.push(format!("{checked}/{} on {}", auts.len(), if p == 2 { "(Z/4)^2" } else { "Z/9" }));
    }
    Ok(format!("p-power automorphisms unipotent: {}", summary.join(", ")))
}

fn criterion_7() -> Check {
    // S = (Z/4)[t]/(t^2 + t + 3); (a + bt)(c + dt) = ac - 3bd + (ad + bc - bd)t
    let mul = |(a, b): (i64, i64), (c, d): (i64, i64)| ((a * c - 3 * b * d).rem_euclid(4), (a * d + b * c - b * d).rem_euclid(4));
    let spec = ok(GaloisRingSpec::construct(2, 2, 2))?;
    let root = (2, 1);
    let mut value = (0, 0);
    let mut power = (1, 0);
    for &c in &spec.modulus {
        value = ((value.0 + c as i64 * power.0).rem_euclid(4), (value.1 + c as i64 * power.1).rem_euclid(4));
        power = mul(power, root);
    }
    ensure!(value == (0, 0), "g(t + 2) = {value:?} for modulus {:?}", spec.modulus);

    let s = ok(FiniteCommRing::polynomial_quotient(4, &[3, 1, 1]))?;
    let phi = ok(embed_into_local_ring(&spec, &s))?;
    ensure!(phi.xi_image == s.encode(&[2, 1]), "xi maps to {:?}", s.decode(phi.xi_image));
    ok(phi.verify_exhaustive())?;
    let mismatch = ok(GaloisRingSpec::construct(2, 2, 3))?;
    ensure!(embed_into_local_ring(&mismatch, &s).is_err(), "GR(2,2,3) must not embed");
    Ok("xi -> t + 2, unital homomorphism on all pairs, lambda mismatch rejected".into())
}

fn criterion_8() -> Check {
    let demo = ok(run_demo("sylow-split"))?;
    ensure!(demo.ok, "sylow demo failed");
    let act = RingAction::regular(ok(FiniteCommRing::integers_mod(12))?);
    let b = Brace::trivial(act.module().clone(), None);
    let split = ok(peirce_split_brace(&b, &act))?;
    // idempotents of Z/12 besides 0 and 1 are 4 and 9
    let mut got: Vec<Vec<Elem>> = split.summands.iter().map(|s| s.elements.clone()).collect();
    got.sort();
    let want = vec![vec![0, 3, 6, 9], vec![0, 4, 8]];
    ensure!(got == want, "summands {got:?}");
    ensure!(split.all_ideals, "summands must be ideals");
    let conds = [split.product_isomorphism, split.gamma_splits, split.star_splits, split.all_ideals];
    ensure!(conds.iter().all(|&c| c) && split.conditions_agree, "conditions {conds:?}");

    let dec = ok(run_demo("brace-dec"))?;
    ensure!(dec.ok, "brace-dec demo failed");
    let (n, act) = ok(brace_dec_ring())?;
    let nb = ok(n.brace())?;
    let split = ok(peirce_split_brace(&nb, &act))?;
    ensure!(split.all_ideals && split.product_circle_stats_match == Some(true), "{split:?}");
    // circle orders of the product from the factors: lcm of the parts
    let f1 = ok(ok(NilpotentRing::multiples(2, 8))?.brace())?;
    let f2 = ok(ok(NilpotentRing::multiples(3, 9))?.brace())?;
    let o1: Vec<u64> = f1.elements().map(|x| circle_order(&f1, x)).collect();
    let o2: Vec<u64> = f2.elements().map(|x| circle_order(&f2, x)).collect();
    let product = histogram(o1.iter().flat_map(|&a| o2.iter().map(move |&b| lcm(a, b))));
    let direct = histogram(nb.elements().map(|x| circle_order(&nb, x)));
    ensure!(product == direct && direct == nb.circle_stats(), "{product:?} vs {direct:?}");
    Ok(format!("Z/12 splits as 4 + 3 with all conditions, 2Z/8Z x 3Z/9Z circle stats {direct:?}"))
}

/// Additive span of `{gamma_a(b) - b : a in N, b in B}`.
fn star_closure(b: &Brace, base: &[Elem]) -> BTreeSet<Elem> {
    let g = b.group();
    let mut span: BTreeSet<Elem> = [g.zero()].into();
    let gens: Vec<Elem> = b.elements().flat_map(|x| base.iter().map(move |&y| b.star(x, y))).collect();
    for s in gens {
        if span.contains(&s) {
            continue;
        }
        let mut frontier: Vec<Elem> = span.iter().copied().collect();
        while let Some(y) = frontier.pop() {
            let z = g.add(y, s);
            if span.insert(z) {
                frontier.push(z);
            }
        }
    }
    span
}

fn criterion_9(corpus: &[(String, Brace)]) -> Check {
    let mut count = 0;
    for (name, b) in corpus.iter().filter(|(_, b)| b.size() <= 27) {
        let p = modbrace::arith::smallest_prime_factor(b.size() as u64);
        let log = b.size().ilog(p as usize) as usize;
        let left = left_series(b);
        let right = right_series(b);
        ensure!(left.violations.is_empty() && right.violations.is_empty(), "{name}: {:?} {:?}", left.violations, right.violations);
        ensure!(right.chain.iter().all(|t| t.ideal), "{name}: right term not an ideal");
        ensure!(left.chain.iter().all(|t| t.left_ideal), "{name}: left term not a left ideal");
        ensure!(left.class.is_some_and(|c| c <= log), "{name}: left class {:?} > {log}", left.class);

        // left series from scratch
        let all: Vec<Elem> = b.elements().collect();
        let mut term = all.clone();
        let mut sizes = vec![term.len()];
        while term.len() > 1 {
            let next: Vec<Elem> = star_closure(b, &term).into_iter().collect();
            if next.len() == term.len() {
                break;
            }
            term = next;
            sizes.push(term.len());
        }
        let lib_sizes: Vec<usize> = left.chain.iter().map(|t| t.elements.len()).collect();
        ensure!(sizes == lib_sizes, "{name}: left series {sizes:?} vs {lib_sizes:?}");

        // N * N is normal in (N, o) and gamma-invariant, and absorbs every x o y - x - y
        let n2 = star_closure(b, &all);
        let csv = ok(csv_minimality_check(b))?;
        ensure!(csv.n2 == n2.iter().copied().collect::<Vec<_>>(), "{name}: N * N differs");
        let inv = |x: Elem| b.elements().find(|&y| b.circle(x, y) == 0).unwrap();
        for x in b.elements() {
            let xi = inv(x);
            for &i in &n2 {
                ensure!(n2.contains(&b.circle(b.circle(x, i), xi)), "{name}: N * N not normal");
                ensure!(n2.contains(&b.gamma_of(x)[i as usize]), "{name}: N * N not gamma-invariant");
            }
            for y in b.elements() {
                ensure!(n2.contains(&b.sub(b.sub(b.circle(x, y), x), y)), "{name}: quotient not trivial");
            }
        }
        ensure!(csv.quotient_trivial && csv.minimal != Some(false), "{name}: {csv:?}");
        count += 1;
    }
    Ok(format!("{count} braces of order <= 27"))
}

fn criterion_10() -> Check {
    let mut rng = StdRng::seed_from_u64(0x5eed);
    let shapes: [(u64, &[u32]); 6] = [(2, &[2]), (2, &[1, 1]), (2, &[3]), (2, &[2, 1]), (3, &[2]), (3, &[1, 1])];
    let mut tally = Vec::new();
    for (p, exps) in shapes {
        let e = z_enumeration(p, exps);
        let g = ModuleShape::cyclic(p, exps).unwrap().group().clone();
        let n = g.size();
        let auts = &e.automorphisms;
        let (mut valid, mut invalid) = (0, 0);
        for _ in 0..1000 {
            let base = gamma_tables(e.braces.choose(&mut rng).unwrap());
            let tables: Vec<Vec<Elem>> = match rng.gen_range(0..5) {
                0 => base,
                // conjugate by an automorphism: another valid gamma function
                1 => {
                    let f = auts.choose(&mut rng).unwrap();
                    let mut finv = vec![0; n];
                    for (x, &y) in f.iter().enumerate() {
                        finv[y as usize] = x as Elem;
                    }
                    (0..n)
                        .map(|x| {
                            let t = &base[finv[x] as usize];
                            (0..n).map(|y| f[t[finv[y] as usize] as usize]).collect()
                        })
                        .collect()
                }
                2 => {
                    let mut t = base;
                    t[rng.gen_range(0..n)] = auts.choose(&mut rng).unwrap().clone();
                    t
                }
                3 => {
                    let mut t = base;
                    let mut perm: Vec<Elem> = (0..n as Elem).collect();
                    perm.shuffle(&mut rng);
                    t[rng.gen_range(0..n)] = perm;
                    t
                }
                _ => (0..n).map(|_| auts.choose(&mut rng).unwrap().clone()).collect(),
            };
            let oracle = is_brace_by_axioms(&g, &tables);
            let verdict = verify_gamma(&g, None, &GammaFunction::from_tables(tables.clone()));
            let accepted = verdict.class != BraceClass::NotGamma;
            ensure!(oracle == accepted, "{exps:?}: oracle {oracle}, verify_gamma {verdict:?} on {tables:?}");
            if oracle { valid += 1 } else { invalid += 1 }
        }
        tally.push(format!("{p}^{exps:?} {valid}/{invalid}"));
    }
    Ok(format!("valid/corrupted: {}", tally.join(", ")))
}

#[test]
fn acceptance() {
    let corpus = corpus();
    let criteria: Vec<(&str, Box<dyn Fn() -> Check + '_>)> = vec![
        ("1 dual-oracle enumeration", Box::new(criterion_1)),
        ("2 order statistics on Z/9, Z/27", Box::new(criterion_2)),
        ("3 sharpness on 2Z/8Z", Box::new(criterion_3)),
        ("4 Galois-ring rank gain", Box::new(criterion_4)),
        ("5 p-th circle power three ways", Box::new(|| criterion_5(&corpus))),
        ("6 unipotent p-power automorphisms", Box::new(criterion_6)),
        ("7 Hensel embedding", Box::new(criterion_7)),
        ("8 idempotent splitting", Box::new(criterion_8)),
        ("9 series structure", Box::new(|| criterion_9(&corpus))),
        ("10 gamma verification vs axioms", Box::new(criterion_10)),
    ];
    let mut failed = Vec::new();
    // written past the test harness capture so the lines show in every run
    let mut out = std::io::stdout();
    for (name, run) in &criteria {
        let line = match run() {
            Ok(detail) => format!("PASS  {name}: {detail}"),
            Err(why) => {
                failed.push(*name);
                format!("FAIL  {name}: {why}")
            }
        };
        writeln!(out, "{line}").unwrap();
    }
    assert!(failed.is_empty(), "failed: {failed:?}");
}
