//! Exhaustive enumeration of braces on a fixed additive group, by two
//! independent searches: backtracking over gamma tables, and regular
//! subgroups of the holomorph.

use std::collections::{BTreeMap, HashMap};
use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::abelian::{AbelianGroup, Elem};
use crate::brace::{find_isomorphism, fingerprint, Brace, IsoMode};
use crate::error::{Error, Result};
use crate::module::{enumerate_automorphisms, group_automorphisms, Linearity, ModuleShape};
use crate::series::left_series;

/// Default bound on `|N|`.
pub const DEFAULT_ENUMERATION_BOUND: usize = 128;
/// Bound on the number of candidate generator images scanned when listing
/// additive automorphisms.
pub const AUT_SCAN_BOUND: u64 = 1 << 22;
const COMPOSITION_TABLE_LIMIT: usize = 2048;
const NONE: u32 = u32::MAX;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EnumerationMode {
    /// Every gamma function into `Aut(N, +)`.
    Z,
    /// Only gamma functions into `Aut_D(N)`.
    D,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Backtracking,
    Holomorph,
}

#[derive(Debug, Clone)]
pub struct EnumerationTask {
    pub group: AbelianGroup,
    pub shape: Option<ModuleShape>,
    pub mode: EnumerationMode,
    pub node_budget: Option<u64>,
    pub time_budget: Option<Duration>,
    pub parallel: bool,
}

impl EnumerationTask {
    pub fn on_shape(shape: &ModuleShape, mode: EnumerationMode) -> Self {
        EnumerationTask {
            group: shape.group().clone(),
            shape: Some(shape.clone()),
            mode,
            node_budget: None,
            time_budget: None,
            parallel: true,
        }
    }

    /// `Z`-mode task on a bare group.
    pub fn on_group(group: &AbelianGroup) -> Self {
        EnumerationTask {
            group: group.clone(),
            shape: None,
            mode: EnumerationMode::Z,
            node_budget: None,
            time_budget: None,
            parallel: true,
        }
    }

    pub fn with_node_budget(mut self, nodes: u64) -> Self {
        self.node_budget = Some(nodes);
        self
    }

    pub fn with_time_budget(mut self, t: Duration) -> Self {
        self.time_budget = Some(t);
        self
    }

    pub fn sequential(mut self) -> Self {
        self.parallel = false;
        self
    }
}

#[derive(Debug, Clone)]
pub struct Enumeration {
    pub method: Method,
    pub mode: EnumerationMode,
    /// The automorphisms available to gamma, sorted by table.
    pub automorphisms: Vec<Vec<Elem>>,
    /// Per brace, the index of `gamma_x` in `automorphisms` for each `x`;
    /// sorted lexicographically.
    pub keys: Vec<Vec<u32>>,
    pub braces: Vec<Brace>,
    pub nodes: u64,
    pub wall_time: Duration,
}

impl Enumeration {
    pub fn len(&self) -> usize {
        self.keys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.keys.is_empty()
    }
}

/// Product bound for the generator-image scan behind `group_automorphisms`.
fn aut_scan_size(group: &AbelianGroup) -> u64 {
    group
        .orders()
        .iter()
        .fold(1u64, |acc, &d| acc.saturating_mul(group.torsion(d).len() as u64))
}

/// The automorphism list for a task, sorted by table (identity first).
pub fn task_automorphisms(task: &EnumerationTask) -> Result<Vec<Vec<Elem>>> {
    let bound = crate::size_bound(DEFAULT_ENUMERATION_BOUND);
    if task.group.size() > bound {
        return Err(Error::TooLarge { size: task.group.size(), bound });
    }
    if let Some(s) = &task.shape {
        if s.group() != &task.group {
            return Err(Error::ShapeMismatch("shape and group disagree".into()));
        }
    }
    let mut auts = match task.mode {
        EnumerationMode::Z => {
            let scan = aut_scan_size(&task.group);
            if scan > AUT_SCAN_BOUND {
                return Err(Error::TooLarge { size: scan as usize, bound: AUT_SCAN_BOUND as usize });
            }
            group_automorphisms(&task.group, bound)?
        }
        EnumerationMode::D => {
            let shape = task
                .shape
                .as_ref()
                .ok_or_else(|| Error::Precondition("D-mode enumeration needs a module shape".into()))?;
            enumerate_automorphisms(shape, Linearity::D, bound)?.into_iter().map(|a| a.table).collect()
        }
    };
    auts.sort();
    Ok(auts)
}

struct Context {
    n: usize,
    group: AbelianGroup,
    auts: Vec<Vec<Elem>>,
    index: HashMap<Vec<Elem>, u32>,
    comp: Option<Vec<u32>>,
}

impl Context {
    fn new(group: &AbelianGroup, auts: Vec<Vec<Elem>>) -> Self {
        let n = group.size();
        let index: HashMap<Vec<Elem>, u32> = auts.iter().enumerate().map(|(i, a)| (a.clone(), i as u32)).collect();
        let k = auts.len();
        let mut ctx = Context { n, group: group.clone(), auts, index, comp: None };
        if k <= COMPOSITION_TABLE_LIMIT {
            let comp: Vec<u32> = (0..k * k)
                .into_par_iter()
                .map(|ij| ctx.compose_slow((ij / k) as u32, (ij % k) as u32))
                .collect();
            ctx.comp = Some(comp);
        }
        ctx
    }

    fn compose_slow(&self, a: u32, b: u32) -> u32 {
        let (fa, fb) = (&self.auts[a as usize], &self.auts[b as usize]);
        let c: Vec<Elem> = fb.iter().map(|&y| fa[y as usize]).collect();
        self.index[&c]
    }

    /// Index of `a . b` (apply `b` first).
    fn compose(&self, a: u32, b: u32) -> u32 {
        match &self.comp {
            Some(t) => t[a as usize * self.auts.len() + b as usize],
            None => self.compose_slow(a, b),
        }
    }

    fn apply(&self, a: u32, x: Elem) -> Elem {
        self.auts[a as usize][x as usize]
    }

    fn identity(&self) -> u32 {
        0
    }
}

struct Budget {
    nodes: AtomicU64,
    limit: Option<u64>,
    deadline: Option<Instant>,
    exhausted: AtomicBool,
}

impl Budget {
    fn new(task: &EnumerationTask, start: Instant) -> Self {
        Budget {
            nodes: AtomicU64::new(0),
            limit: task.node_budget,
            deadline: task.time_budget.map(|t| start + t),
            exhausted: AtomicBool::new(false),
        }
    }

    /// Counts a node; `false` once either budget is spent.
    fn tick(&self) -> bool {
        if self.exhausted.load(Ordering::Relaxed) {
            return false;
        }
        let n = self.nodes.fetch_add(1, Ordering::Relaxed) + 1;
        let over = self.limit.is_some_and(|l| n > l)
            || (n % 256 == 0 && self.deadline.is_some_and(|d| Instant::now() > d));
        if over {
            self.exhausted.store(true, Ordering::Relaxed);
        }
        !over
    }
}

// Backtracking over gamma tables.

struct GammaState {
    assign: Vec<u32>,
    stack: Vec<Elem>,
}

impl GammaState {
    fn new(ctx: &Context) -> Option<Self> {
        let mut s = GammaState { assign: vec![NONE; ctx.n], stack: Vec::new() };
        s.assign_and_propagate(ctx, 0, ctx.identity()).then_some(s)
    }

    /// Sets `gamma_x = a` and closes under `gamma(u o v) = gamma_u gamma_v`.
    /// On failure the state may be partially extended; callers roll back.
    fn assign_and_propagate(&mut self, ctx: &Context, x: Elem, a: u32) -> bool {
        let mut qi = self.stack.len();
        self.assign[x as usize] = a;
        self.stack.push(x);
        while qi < self.stack.len() {
            let u = self.stack[qi];
            let gu = self.assign[u as usize];
            let mut j = 0;
            while j < self.stack.len() {
                let v = self.stack[j];
                let gv = self.assign[v as usize];
                for (s, gs, t, gt) in [(u, gu, v, gv), (v, gv, u, gu)] {
                    let w = ctx.group.add(s, ctx.apply(gs, t));
                    let need = ctx.compose(gs, gt);
                    let cur = self.assign[w as usize];
                    if cur == NONE {
                        self.assign[w as usize] = need;
                        self.stack.push(w);
                    } else if cur != need {
                        return false;
                    }
                }
                j += 1;
            }
            qi += 1;
        }
        true
    }

    fn rollback(&mut self, len: usize) {
        for &x in &self.stack[len..] {
            self.assign[x as usize] = NONE;
        }
        self.stack.truncate(len);
    }

    fn first_free(&self) -> Option<Elem> {
        self.assign.iter().position(|&a| a == NONE).map(|x| x as Elem)
    }
}

fn backtrack(ctx: &Context, budget: &Budget, st: &mut GammaState, out: &mut Vec<Vec<u32>>) {
    if !budget.tick() {
        return;
    }
    let Some(x) = st.first_free() else {
        out.push(st.assign.clone());
        return;
    };
    let len = st.stack.len();
    for a in 0..ctx.auts.len() as u32 {
        if st.assign_and_propagate(ctx, x, a) {
            backtrack(ctx, budget, st, out);
        }
        st.rollback(len);
        if budget.exhausted.load(Ordering::Relaxed) {
            return;
        }
    }
}

fn run_backtracking(ctx: &Context, budget: &Budget, parallel: bool) -> Vec<Vec<u32>> {
    let Some(root) = GammaState::new(ctx) else {
        return Vec::new();
    };
    let Some(x) = root.first_free() else {
        return vec![root.assign];
    };
    let branch = |a: u32| {
        let mut out = Vec::new();
        if !budget.tick() {
            return out;
        }
        let mut st = GammaState { assign: root.assign.clone(), stack: root.stack.clone() };
        if st.assign_and_propagate(ctx, x, a) {
            backtrack(ctx, budget, &mut st, &mut out);
        }
        out
    };
    let k = ctx.auts.len() as u32;
    if parallel {
        (0..k).into_par_iter().flat_map_iter(branch).collect()
    } else {
        (0..k).flat_map(branch).collect()
    }
}

// Regular subgroups of Hol(N) = N x| Aut(N, +), with (s, a)(t, b) = (s + a(t), ab).

/// Closure of `gens` keyed by translation part; `None` if two elements share
/// a translation (the subgroup cannot be regular).
fn holomorph_closure(ctx: &Context, gens: &[(Elem, u32)]) -> Option<Vec<u32>> {
    let mut table = vec![NONE; ctx.n];
    table[0] = ctx.identity();
    let mut queue = vec![0 as Elem];
    while let Some(t) = queue.pop() {
        let a = table[t as usize];
        for &(gt, ga) in gens {
            let s = ctx.group.add(t, ctx.apply(a, gt));
            let b = ctx.compose(a, ga);
            match table[s as usize] {
                NONE => {
                    table[s as usize] = b;
                    queue.push(s);
                }
                cur if cur != b => return None,
                _ => {}
            }
        }
    }
    Some(table)
}

fn holomorph_search(ctx: &Context, budget: &Budget, gens: &mut Vec<(Elem, u32)>, table: &[u32], out: &mut Vec<Vec<u32>>) {
    if !budget.tick() {
        return;
    }
    let Some(t) = table.iter().position(|&a| a == NONE) else {
        out.push(table.to_vec());
        return;
    };
    for a in 0..ctx.auts.len() as u32 {
        gens.push((t as Elem, a));
        if let Some(next) = holomorph_closure(ctx, gens) {
            holomorph_search(ctx, budget, gens, &next, out);
        }
        gens.pop();
        if budget.exhausted.load(Ordering::Relaxed) {
            return;
        }
    }
}

fn run_holomorph(ctx: &Context, budget: &Budget, parallel: bool) -> Vec<Vec<u32>> {
    let root = holomorph_closure(ctx, &[]).expect("identity closure");
    let Some(t) = root.iter().position(|&a| a == NONE) else {
        return vec![root];
    };
    let branch = |a: u32| {
        let mut out = Vec::new();
        if !budget.tick() {
            return out;
        }
        let mut gens = vec![(t as Elem, a)];
        if let Some(next) = holomorph_closure(ctx, &gens) {
            holomorph_search(ctx, budget, &mut gens, &next, &mut out);
        }
        out
    };
    let k = ctx.auts.len() as u32;
    if parallel {
        (0..k).into_par_iter().flat_map_iter(branch).collect()
    } else {
        (0..k).flat_map(branch).collect()
    }
}

fn enumerate(task: &EnumerationTask, method: Method) -> Result<Enumeration> {
    let start = Instant::now();
    let automorphisms = task_automorphisms(task)?;
    let ctx = Context::new(&task.group, automorphisms);
    let budget = Budget::new(task, start);
    let mut keys = match method {
        Method::Backtracking => run_backtracking(&ctx, &budget, task.parallel),
        Method::Holomorph => run_holomorph(&ctx, &budget, task.parallel),
    };
    let nodes = budget.nodes.load(Ordering::Relaxed);
    if budget.exhausted.load(Ordering::Relaxed) {
        return Err(Error::BudgetExhausted { nodes, found: keys.len() });
    }
    keys.sort_unstable();
    keys.dedup();
    let build = |key: &Vec<u32>| {
        let tables = key.iter().map(|&a| ctx.auts[a as usize].clone()).collect();
        Brace::from_tables(task.group.clone(), task.shape.clone(), tables)
    };
    let braces = if task.parallel {
        keys.par_iter().map(build).collect::<Result<Vec<_>>>()?
    } else {
        keys.iter().map(build).collect::<Result<Vec<_>>>()?
    };
    Ok(Enumeration {
        method,
        mode: task.mode,
        automorphisms: ctx.auts,
        keys,
        braces,
        nodes,
        wall_time: start.elapsed(),
    })
}

/// Depth-first assignment of `gamma_x` with forced values propagated through
/// `gamma(x + gamma_x(y)) = gamma_x gamma_y`.
pub fn enumerate_braces_backtracking(task: &EnumerationTask) -> Result<Enumeration> {
    enumerate(task, Method::Backtracking)
}

/// Regular subgroups of the holomorph, grown from generators and read off
/// as gamma functions.
pub fn enumerate_braces_holomorph(task: &EnumerationTask) -> Result<Enumeration> {
    enumerate(task, Method::Holomorph)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Partition {
    /// Indices into the input list; each class sorted, classes ordered by
    /// their least member (the representative).
    pub classes: Vec<Vec<usize>>,
}

impl Partition {
    pub fn representatives(&self) -> Vec<usize> {
        self.classes.iter().map(|c| c[0]).collect()
    }

    pub fn class_of(&self, i: usize) -> Option<usize> {
        self.classes.iter().position(|c| c.contains(&i))
    }
}

type BucketKey = (Vec<(u64, u64)>, Vec<(u64, u64)>, usize, Vec<usize>);

fn bucket_key(b: &Brace) -> BucketKey {
    let f = fingerprint(b);
    let series: Vec<usize> = left_series(b).terms().map(|t| t.len()).collect();
    (f.additive.into_iter().collect(), f.circle.into_iter().collect(), f.rank, series)
}

/// Partitions braces on a common additive group into isomorphism classes.
pub fn classify_up_to_isomorphism(list: &[Brace], mode: IsoMode) -> Result<Partition> {
    let keys: Vec<BucketKey> = list.par_iter().map(bucket_key).collect();
    let mut buckets: BTreeMap<BucketKey, Vec<usize>> = BTreeMap::new();
    for (i, k) in keys.into_iter().enumerate() {
        buckets.entry(k).or_default().push(i);
    }
    let per_bucket: Vec<Vec<Vec<usize>>> = buckets
        .into_values()
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|members| -> Result<Vec<Vec<usize>>> {
            let mut classes: Vec<Vec<usize>> = Vec::new();
            'next: for i in members {
                for class in classes.iter_mut() {
                    if find_isomorphism(&list[class[0]], &list[i], mode)?.is_some() {
                        class.push(i);
                        continue 'next;
                    }
                }
                classes.push(vec![i]);
            }
            Ok(classes)
        })
        .collect::<Result<_>>()?;
    let mut classes: Vec<Vec<usize>> = per_bucket.into_iter().flatten().collect();
    classes.sort();
    Ok(Partition { classes })
}
