//! Star products of subsets and the left, right and derived series.

use std::collections::{HashSet, VecDeque};

use rayon::prelude::*;
use serde::Serialize;

use crate::abelian::{indicator, span_of, Elem, Span};
use crate::arith::{prime_power, smallest_prime_factor};
use crate::brace::{classify_subset, quotient_brace, Brace};
use crate::error::{Error, Result};

/// Largest brace for which `csv_minimality_check` enumerates ideals.
pub const IDEAL_ENUMERATION_BOUND: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SeriesKind {
    Left,
    Right,
    Derived,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SeriesTerm {
    pub elements: Vec<Elem>,
    pub subbrace: bool,
    pub left_ideal: bool,
    pub ideal: bool,
    pub submodule: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SeriesReport {
    pub kind: SeriesKind,
    /// Distinct terms, starting from `N` and ending at the stable term.
    pub chain: Vec<SeriesTerm>,
    /// Least `k` with term `k + 1` equal to `{0}`; `None` if the series
    /// stabilises above zero.
    pub class: Option<usize>,
    pub stalled_nonzero: bool,
    pub violations: Vec<String>,
}

impl SeriesReport {
    pub fn terms(&self) -> impl Iterator<Item = &[Elem]> {
        self.chain.iter().map(|t| t.elements.as_slice())
    }

    /// Term `k` (1-based), extended past the end by the stable term.
    pub fn term(&self, k: usize) -> &[Elem] {
        let i = k.saturating_sub(1).min(self.chain.len() - 1);
        &self.chain[i].elements
    }
}

/// The additive subgroup generated by `x * y` for `x` in `xs`, `y` in `ys`.
pub fn star_span(b: &Brace, xs: &[Elem], ys: &[Elem]) -> Vec<Elem> {
    let add = |x, y| b.add(x, y);
    let mut span = Span::new(b.size(), 0, &add);
    for &x in xs {
        let g = b.gamma_of(x);
        for &y in ys {
            span.extend(b.sub(g[y as usize], y));
        }
    }
    span.into_sorted()
}

fn iteration_cap(n: usize) -> usize {
    let n = n as u64;
    if n < 2 {
        return 1;
    }
    let p = smallest_prime_factor(n);
    1 + n.ilog(p) as usize
}

fn series(b: &Brace, kind: SeriesKind) -> SeriesReport {
    let all: Vec<Elem> = b.elements().collect();
    let mut terms = vec![all.clone()];
    let cap = iteration_cap(b.size());
    let mut violations = Vec::new();
    loop {
        let prev = terms.last().unwrap();
        let next = match kind {
            SeriesKind::Left => star_span(b, &all, prev),
            SeriesKind::Right => star_span(b, prev, &all),
            SeriesKind::Derived => star_span(b, prev, prev),
        };
        if &next == prev {
            break;
        }
        let flags = indicator(b.size(), prev);
        if !next.iter().all(|&x| flags[x as usize]) {
            violations.push(format!("term {} is not contained in term {}", terms.len() + 1, terms.len()));
        }
        terms.push(next);
        if kind != SeriesKind::Derived && terms.len() > cap {
            violations.push(format!("no stabilisation within {cap} steps"));
            break;
        }
    }
    let chain: Vec<SeriesTerm> = terms
        .par_iter()
        .map(|t| {
            let c = classify_subset(b, t);
            SeriesTerm {
                elements: c.subset,
                subbrace: c.subbrace,
                left_ideal: c.left_ideal,
                ideal: c.ideal,
                submodule: c.submodule,
            }
        })
        .collect();
    for (k, t) in chain.iter().enumerate() {
        let ok = match kind {
            SeriesKind::Left => t.left_ideal,
            SeriesKind::Right => t.ideal,
            SeriesKind::Derived => t.subbrace,
        };
        if !ok {
            violations.push(format!("term {} fails its ideal property", k + 1));
        }
        if b.shape().is_some() && t.submodule != Some(true) {
            violations.push(format!("term {} is not a submodule", k + 1));
        }
    }
    let last = &chain.last().unwrap().elements;
    let reaches_zero = last.len() == 1;
    let class = reaches_zero.then(|| chain.len() - 1);
    let stalled_nonzero = !reaches_zero;
    // p-power braces are left nilpotent; right nilpotency can fail
    if stalled_nonzero && kind == SeriesKind::Left && prime_power(b.size() as u64).is_some() {
        violations.push("left series stalls above zero on a brace of prime-power order".into());
    }
    SeriesReport { kind, chain, class, stalled_nonzero, violations }
}

/// `N^1 = N`, `N^k = N * N^(k-1)`.
pub fn left_series(b: &Brace) -> SeriesReport {
    series(b, SeriesKind::Left)
}

/// `N^(1) = N`, `N^(k) = N^(k-1) * N`.
pub fn right_series(b: &Brace) -> SeriesReport {
    series(b, SeriesKind::Right)
}

/// `N_(1) = N`, `N_(k) = N_(k-1) * N_(k-1)`.
pub fn derived_series(b: &Brace) -> SeriesReport {
    series(b, SeriesKind::Derived)
}

/// Every additive subgroup of `N`, sorted.
pub fn additive_subgroups(b: &Brace) -> Vec<Vec<Elem>> {
    let add = |x, y| b.add(x, y);
    let zero = vec![0];
    let mut seen: HashSet<Vec<Elem>> = HashSet::from([zero.clone()]);
    let mut queue = VecDeque::from([zero]);
    while let Some(h) = queue.pop_front() {
        let flags = indicator(b.size(), &h);
        for g in b.elements().filter(|&g| !flags[g as usize]) {
            let mut gens = h.clone();
            gens.push(g);
            let s = span_of(b.size(), 0, &add, &gens);
            if seen.insert(s.clone()) {
                queue.push_back(s);
            }
        }
    }
    let mut out: Vec<_> = seen.into_iter().collect();
    out.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CsvReport {
    /// `N^(2) = N * N`.
    pub n2: Vec<Elem>,
    pub quotient_trivial: bool,
    pub n2_equals_n: bool,
    /// `None` when `|N|` exceeds the ideal enumeration bound.
    pub minimal: Option<bool>,
    /// An ideal with trivial quotient not containing `N^(2)`.
    pub counterexample: Option<Vec<Elem>>,
    pub ideals_checked: usize,
}

/// Checks that `N / N^(2)` is trivial and, for small `N`, that every ideal
/// with trivial quotient contains `N^(2)`.
pub fn csv_minimality_check(b: &Brace) -> Result<CsvReport> {
    let all: Vec<Elem> = b.elements().collect();
    let n2 = star_span(b, &all, &all);
    let (q, _) = quotient_brace(b, &n2)?;
    let quotient_trivial = q.is_trivial();
    let n2_equals_n = n2.len() == b.size();
    if b.size() > IDEAL_ENUMERATION_BOUND {
        return Ok(CsvReport { n2, quotient_trivial, n2_equals_n, minimal: None, counterexample: None, ideals_checked: 0 });
    }
    let ideals: Vec<Vec<Elem>> = additive_subgroups(b).into_iter().filter(|s| classify_subset(b, s).ideal).collect();
    let bad = ideals
        .par_iter()
        .map(|i| -> Result<Option<Vec<Elem>>> {
            let (q, _) = quotient_brace(b, i)?;
            let flags = indicator(b.size(), i);
            let contains = n2.iter().all(|&x| flags[x as usize]);
            Ok((q.is_trivial() && !contains).then(|| i.clone()))
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .min_by_key(|i| (i.len(), i.clone()));
    Ok(CsvReport {
        n2,
        quotient_trivial,
        n2_equals_n,
        minimal: Some(bad.is_none()),
        counterexample: bad,
        ideals_checked: ideals.len(),
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FieldBoundReport {
    pub dimension: usize,
    pub left_class: Option<usize>,
    /// `M^(r+1) = 0`.
    pub holds: bool,
    pub strictly_decreasing: bool,
}

/// For a brace over a finite field of dimension `r`, checks `M^(r+1) = 0`.
pub fn field_dimension_bound_check(b: &Brace) -> Result<FieldBoundReport> {
    let shape = b.shape().ok_or(Error::BaseNotField)?;
    if shape.ring().c != 1 {
        return Err(Error::BaseNotField);
    }
    let r = shape.rank();
    let rep = left_series(b);
    let holds = rep.term(r + 1).len() == 1;
    let strictly_decreasing = !rep.stalled_nonzero && rep.chain.windows(2).all(|w| w[1].elements.len() < w[0].elements.len());
    Ok(FieldBoundReport { dimension: r, left_class: rep.class, holds, strictly_decreasing })
}
