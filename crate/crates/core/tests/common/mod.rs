//! Random dataset generation and an exhaustive reference miner.
//!
//! The reference side never calls into the library's enumeration, support or
//! utility code. It keeps its own copy of the generated data and recomputes
//! supports, pattern matrices and utility values from scratch.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use ehupm::{assemble_dataset, parse_facts, Dataset};
use nalgebra::{DMatrix, DVector};
use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const TOL: f64 = 1e-9;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn load(text: &str) -> Dataset {
    assemble_dataset(&parse_facts(text).expect("facts parse")).expect("dataset assembles")
}

pub fn running_example() -> Dataset {
    load(include_str!("../../data/running_example.lp"))
}

#[derive(Clone, Debug)]
pub struct RawTx {
    pub name: String,
    pub object: usize,
    pub facets: Vec<f64>,
    /// (item name, quantity) in position order.
    pub occurrences: Vec<(String, f64)>,
}

/// Ground truth for a generated dataset, kept apart from the library types.
#[derive(Clone, Debug)]
pub struct Raw {
    /// l, m, n, o.
    pub dims: [usize; 4],
    pub items: BTreeMap<String, Vec<f64>>,
    pub categories: BTreeMap<String, BTreeSet<String>>,
    pub containers: Vec<Vec<f64>>,
    /// (container index, facets).
    pub objects: Vec<(usize, Vec<f64>)>,
    pub transactions: Vec<RawTx>,
}

pub const CATEGORIES: [&str; 3] = ["adj", "noun", "verb"];

#[derive(Clone, Copy, Debug)]
pub struct Shape {
    pub max_items: usize,
    pub max_transactions: usize,
    pub max_facets: usize,
    /// Allow an item to occur twice in one transaction.
    pub repeats: bool,
}

impl Default for Shape {
    fn default() -> Self {
        Shape {
            max_items: 8,
            max_transactions: 12,
            max_facets: 3,
            repeats: true,
        }
    }
}

fn values(rng: &mut ChaCha8Rng, n: usize, lo: i32, hi: i32) -> Vec<f64> {
    (0..n).map(|_| rng.random_range(lo..=hi) as f64).collect()
}

impl Raw {
    pub fn random(rng: &mut ChaCha8Rng, shape: Shape) -> Raw {
        let dims = [
            rng.random_range(0..=shape.max_facets),
            rng.random_range(0..=shape.max_facets),
            rng.random_range(0..=shape.max_facets),
            rng.random_range(0..=shape.max_facets),
        ];
        let n_items = rng.random_range(1..=shape.max_items);
        let items: BTreeMap<String, Vec<f64>> = (0..n_items)
            .map(|i| (format!("i{i}"), values(rng, dims[0], -2, 4)))
            .collect();
        let mut categories = BTreeMap::new();
        for name in items.keys() {
            let cats: BTreeSet<String> = CATEGORIES
                .iter()
                .filter(|_| rng.random_bool(0.4))
                .map(|c| c.to_string())
                .collect();
            if !cats.is_empty() {
                categories.insert(name.clone(), cats);
            }
        }
        if categories.is_empty() {
            categories.insert("i0".into(), BTreeSet::from(["noun".to_string()]));
        }
        let n_containers = rng.random_range(1..=3);
        let containers = (0..n_containers).map(|_| values(rng, dims[3], -1, 2)).collect();
        let n_objects = rng.random_range(1..=4);
        let objects = (0..n_objects)
            .map(|_| (rng.random_range(0..n_containers), values(rng, dims[2], -1, 9)))
            .collect();
        let names: Vec<String> = items.keys().cloned().collect();
        let n_tx = rng.random_range(1..=shape.max_transactions);
        let transactions = (0..n_tx)
            .map(|t| {
                let len = rng.random_range(1..=5.min(if shape.repeats { 5 } else { names.len() }));
                let mut occurrences: Vec<(String, f64)> = Vec::new();
                while occurrences.len() < len {
                    let item = names.choose(rng).unwrap().clone();
                    if !shape.repeats && occurrences.iter().any(|(i, _)| *i == item) {
                        continue;
                    }
                    occurrences.push((item, rng.random_range(1..=3) as f64));
                }
                RawTx {
                    name: format!("t{t:02}"),
                    object: rng.random_range(0..n_objects),
                    facets: values(rng, dims[1], -2, 2),
                    occurrences,
                }
            })
            .collect();
        Raw {
            dims,
            items,
            categories,
            containers,
            objects,
            transactions,
        }
    }

    pub fn to_facts(&self) -> String {
        let mut s = String::new();
        let vector = |pred: &str, name: &str, v: &[f64]| -> String {
            if v.is_empty() {
                String::new()
            } else {
                let vals: Vec<String> = v.iter().map(|x| x.to_string()).collect();
                format!("{pred}({name}, {}).\n", vals.join(", "))
            }
        };
        for (c, v) in self.containers.iter().enumerate() {
            s += &format!("container(c{c}).\n");
            s += &vector("containerUtilityVector", &format!("c{c}"), v);
        }
        for (o, (c, v)) in self.objects.iter().enumerate() {
            s += &format!("object(o{o}, c{c}).\n");
            s += &vector("objectUtilityVector", &format!("o{o}"), v);
        }
        for t in &self.transactions {
            s += &format!("transaction({}, o{}).\n", t.name, t.object);
            s += &vector("transactionUtilityVector", &t.name, &t.facets);
            for (k, (item, q)) in t.occurrences.iter().enumerate() {
                s += &format!("item({item}, {}, {}, {q}).\n", t.name, k + 1);
            }
        }
        let occurring = self.item_names();
        for (name, v) in self.items.iter().filter(|(n, _)| occurring.contains(n)) {
            s += &vector("itemUtilityVector", name, v);
        }
        for (name, cats) in self.categories.iter().filter(|(n, _)| occurring.contains(n)) {
            for c in cats {
                s += &format!("itemCategory({name}, {c}).\n");
            }
        }
        s
    }

    pub fn dataset(&self) -> Dataset {
        load(&self.to_facts())
    }

    pub fn item_names(&self) -> Vec<String> {
        self.items
            .keys()
            .filter(|n| self.transactions.iter().any(|t| t.occurrences.iter().any(|(i, _)| i == *n)))
            .cloned()
            .collect()
    }

    /// Facets available at a level, as `(level index, facet index)`.
    pub fn facets(&self) -> Vec<(usize, usize)> {
        (0..4).flat_map(|l| (0..self.dims[l]).map(move |k| (l, k))).collect()
    }

    fn sequence<'t>(&self, t: &'t RawTx) -> Vec<&'t str> {
        t.occurrences.iter().map(|(i, _)| i.as_str()).collect()
    }

    pub fn supports(&self, t: &RawTx, pattern: &[String], sequence: bool, contiguous: bool) -> bool {
        let seq = self.sequence(t);
        if !sequence {
            return pattern.iter().all(|p| seq.contains(&p.as_str()));
        }
        if contiguous {
            return seq.windows(pattern.len()).any(|w| w.iter().zip(pattern).all(|(a, b)| *a == b));
        }
        // any strictly increasing choice of positions
        fn embed(seq: &[&str], pat: &[String]) -> bool {
            match pat.split_first() {
                None => true,
                Some((head, rest)) => (0..seq.len()).any(|k| seq[k] == head && embed(&seq[k + 1..], rest)),
            }
        }
        embed(&seq, pattern)
    }

    /// One occurrence utility row per supporting transaction.
    pub fn matrix(&self, pattern: &[String], tids: &[usize], intra: Intra) -> Vec<Vec<f64>> {
        let distinct: BTreeSet<&String> = pattern.iter().collect();
        tids.iter()
            .map(|&t| {
                let tx = &self.transactions[t];
                let parts: Vec<Vec<f64>> = distinct
                    .iter()
                    .map(|item| {
                        let q = tx.occurrences.iter().find(|(i, _)| i == *item).unwrap().1;
                        self.items[*item].iter().map(|e| e * q).collect()
                    })
                    .collect();
                let mut row: Vec<f64> = (0..self.dims[0])
                    .map(|k| {
                        let col: Vec<f64> = parts.iter().map(|p| p[k]).collect();
                        intra.apply(&col)
                    })
                    .collect();
                let (c, ov) = &self.objects[tx.object];
                row.extend(&tx.facets);
                row.extend(ov);
                row.extend(&self.containers[*c]);
                row
            })
            .collect()
    }

    pub fn column_offset(&self, level: usize) -> usize {
        self.dims[..level].iter().sum()
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Intra {
    Sum,
    Max,
    Min,
    Avg,
}

impl Intra {
    pub fn apply(self, v: &[f64]) -> f64 {
        match self {
            Intra::Sum => v.iter().sum(),
            Intra::Max => v.iter().cloned().fold(f64::MIN, f64::max),
            Intra::Min => v.iter().cloned().fold(f64::MAX, f64::min),
            Intra::Avg => v.iter().sum::<f64>() / v.len() as f64,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Intra::Sum => "sum",
            Intra::Max => "max",
            Intra::Min => "min",
            Intra::Avg => "avg",
        }
    }
}

pub const LEVELS: [&str; 4] = ["item", "tx", "obj", "cont"];

fn facet_text(f: (usize, usize)) -> String {
    format!("{}.{}", LEVELS[f.0], f.1)
}

/// A catalogued utility function with its textual spec and a direct evaluation.
#[derive(Clone, Debug)]
pub enum RefFn {
    FilterSum((usize, usize)),
    FilterTimes((usize, usize)),
    HfirstAvgMin(Vec<(usize, usize)>),
    Coherence(Vec<(usize, usize)>, i8),
    /// Alternatives of conjunctions of (facet, op, value); op is one of > < = !=.
    Disagreement(Vec<Vec<((usize, usize), &'static str, f64)>>),
    MaxSum(Vec<(usize, usize)>),
    StdMax(Vec<(usize, usize)>, bool),
    MixedCoherence((usize, usize), bool, (usize, usize), bool),
    Pearson((usize, usize), (usize, usize)),
    AbsPearson((usize, usize), (usize, usize)),
    MultiCorr(Vec<(usize, usize)>, (usize, usize)),
}

fn list(fs: &[(usize, usize)]) -> String {
    fs.iter().map(|f| facet_text(*f)).collect::<Vec<_>>().join(", ")
}

fn polarity(p: i8) -> &'static str {
    match p {
        1 => "pos",
        -1 => "neg",
        _ => "either",
    }
}

impl RefFn {
    pub fn spec(&self) -> String {
        match self {
            RefFn::FilterSum(f) => format!("hfirst:filter({}):sum", facet_text(*f)),
            RefFn::FilterTimes(f) => format!("hfirst:filter({}):times", facet_text(*f)),
            RefFn::HfirstAvgMin(fs) => format!("hfirst:avg({}):min", list(fs)),
            RefFn::Coherence(fs, p) => format!("hfirst:coherent({}, {})", list(fs), polarity(*p)),
            RefFn::Disagreement(alts) => {
                let alts: Vec<String> = alts
                    .iter()
                    .map(|conj| {
                        conj.iter()
                            .map(|(f, op, v)| format!("{}{op}{v}", facet_text(*f)))
                            .collect::<Vec<_>>()
                            .join(", ")
                    })
                    .collect();
                format!("hfirst:disagree({})", alts.join(" | "))
            }
            RefFn::MaxSum(fs) => format!("vfirst:max({}):sum", list(fs)),
            RefFn::StdMax(fs, sample) => {
                format!("vfirst:{}({}):max", if *sample { "sstd" } else { "std" }, list(fs))
            }
            RefFn::MixedCoherence(a, pa, b, pb) => format!(
                "vfirst:{}({})+{}({}):times",
                if *pa { "fracpos" } else { "fracneg" },
                facet_text(*a),
                if *pb { "fracpos" } else { "fracneg" },
                facet_text(*b)
            ),
            RefFn::Pearson(x, y) => format!("mixed:pearson({}, {})", facet_text(*x), facet_text(*y)),
            RefFn::AbsPearson(x, y) => format!("mixed:abspearson({}, {})", facet_text(*x), facet_text(*y)),
            RefFn::MultiCorr(xs, y) => format!("mixed:multicorr({}, {})", list(xs), facet_text(*y)),
        }
    }

    /// `None` when the function is undefined on the rows.
    pub fn eval(&self, raw: &Raw, rows: &[Vec<f64>]) -> Option<f64> {
        let col = |f: (usize, usize)| -> Vec<f64> {
            let j = raw.column_offset(f.0) + f.1;
            rows.iter().map(|r| r[j]).collect()
        };
        let cell = |r: &Vec<f64>, f: (usize, usize)| r[raw.column_offset(f.0) + f.1];
        let n = rows.len() as f64;
        let pct = |hits: usize| 100.0 * hits as f64 / n;
        let v = match self {
            RefFn::FilterSum(f) => col(*f).iter().sum(),
            RefFn::FilterTimes(f) => col(*f).iter().product(),
            RefFn::HfirstAvgMin(fs) => rows
                .iter()
                .map(|r| fs.iter().map(|f| cell(r, *f)).sum::<f64>() / fs.len() as f64)
                .fold(f64::MAX, f64::min),
            RefFn::Coherence(fs, p) => pct(
                rows.iter()
                    .filter(|r| {
                        let pos = fs.iter().all(|f| cell(r, *f) > 0.0);
                        let neg = fs.iter().all(|f| cell(r, *f) < 0.0);
                        match p {
                            1 => pos,
                            -1 => neg,
                            _ => pos || neg,
                        }
                    })
                    .count(),
            ),
            RefFn::Disagreement(alts) => pct(
                rows.iter()
                    .filter(|r| {
                        alts.iter().any(|conj| {
                            conj.iter().all(|(f, op, v)| {
                                let x = cell(r, *f);
                                match *op {
                                    ">" => x > *v,
                                    "<" => x < *v,
                                    "=" => x == *v,
                                    _ => x != *v,
                                }
                            })
                        })
                    })
                    .count(),
            ),
            RefFn::MaxSum(fs) => fs.iter().map(|f| col(*f).iter().cloned().fold(f64::MIN, f64::max)).sum(),
            RefFn::StdMax(fs, sample) => {
                if rows.len() < 2 {
                    return None;
                }
                fs.iter()
                    .map(|f| {
                        let c = col(*f);
                        let m = c.iter().sum::<f64>() / n;
                        let ss: f64 = c.iter().map(|x| (x - m) * (x - m)).sum();
                        (ss / if *sample { n - 1.0 } else { n }).sqrt()
                    })
                    .fold(f64::MIN, f64::max)
            }
            RefFn::MixedCoherence(a, pa, b, pb) => {
                let frac = |c: Vec<f64>, pos: bool| {
                    c.iter().filter(|x| if pos { **x > 0.0 } else { **x < 0.0 }).count() as f64 / n
                };
                frac(col(*a), *pa) * frac(col(*b), *pb)
            }
            RefFn::Pearson(x, y) => reference_pearson(&col(*x), &col(*y))?,
            RefFn::AbsPearson(x, y) => reference_pearson(&col(*x), &col(*y))?.abs(),
            RefFn::MultiCorr(xs, y) => {
                let cols: Vec<Vec<f64>> = xs.iter().map(|f| col(*f)).collect();
                reference_multiple_correlation(&cols, &col(*y))?
            }
        };
        v.is_finite().then_some(v)
    }

    pub fn random(rng: &mut ChaCha8Rng, raw: &Raw) -> Option<RefFn> {
        let facets = raw.facets();
        if facets.is_empty() {
            return None;
        }
        let pick = |rng: &mut ChaCha8Rng| *facets.choose(rng).unwrap();
        let some = |rng: &mut ChaCha8Rng, max: usize| -> Vec<(usize, usize)> {
            let k = rng.random_range(1..=max.min(facets.len()));
            let mut chosen: Vec<(usize, usize)> = facets.choose_multiple(rng, k).cloned().collect();
            chosen.sort();
            chosen
        };
        Some(match rng.random_range(0..11) {
            0 => RefFn::FilterSum(pick(rng)),
            1 => RefFn::FilterTimes(pick(rng)),
            2 => RefFn::HfirstAvgMin(some(rng, 3)),
            3 => RefFn::Coherence(some(rng, 3), [1, -1, 0][rng.random_range(0..3)]),
            4 => {
                let n_alt = rng.random_range(1..=2);
                RefFn::Disagreement(
                    (0..n_alt)
                        .map(|_| {
                            (0..rng.random_range(1..=2))
                                .map(|_| {
                                    let op = *[">", "<", "=", "!="].choose(rng).unwrap();
                                    (pick(rng), op, rng.random_range(-1..=1) as f64)
                                })
                                .collect()
                        })
                        .collect(),
                )
            }
            5 => RefFn::MaxSum(some(rng, 3)),
            6 => RefFn::StdMax(some(rng, 3), rng.random_bool(0.5)),
            7 => RefFn::MixedCoherence(pick(rng), rng.random_bool(0.5), pick(rng), rng.random_bool(0.5)),
            8 => RefFn::Pearson(pick(rng), pick(rng)),
            9 => RefFn::AbsPearson(pick(rng), pick(rng)),
            _ => {
                let y = pick(rng);
                RefFn::MultiCorr(some(rng, 2), y)
            }
        })
    }
}

/// Two-pass Pearson; `None` when either column is constant or too short.
pub fn reference_pearson(x: &[f64], y: &[f64]) -> Option<f64> {
    let n = x.len();
    if n < 2 || x.iter().all(|v| *v == x[0]) || y.iter().all(|v| *v == y[0]) {
        return None;
    }
    let mx = x.iter().sum::<f64>() / n as f64;
    let my = y.iter().sum::<f64>() / n as f64;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for i in 0..n {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
        syy += (y[i] - my) * (y[i] - my);
    }
    Some(sxy / (sxx * syy).sqrt())
}

/// `sqrt(R²)` from an SVD least-squares fit with an intercept; `None` when the
/// design is rank deficient, there are too few rows, or `y` is constant.
pub fn reference_multiple_correlation(xs: &[Vec<f64>], y: &[f64]) -> Option<f64> {
    let n = y.len();
    let p = xs.len();
    if n <= p || y.iter().all(|v| *v == y[0]) {
        return None;
    }
    let design = DMatrix::from_fn(n, p + 1, |i, j| if j == 0 { 1.0 } else { xs[j - 1][i] });
    let svd = design.clone().svd(true, true);
    let smax = svd.singular_values.max();
    if svd.singular_values.iter().any(|s| *s <= 1e-9 * smax) {
        return None;
    }
    let target = DVector::from_column_slice(y);
    let beta = svd.solve(&target, 1e-12).ok()?;
    let fitted = &design * beta;
    let my = y.iter().sum::<f64>() / n as f64;
    let ss_tot: f64 = y.iter().map(|v| (v - my) * (v - my)).sum();
    let ss_res: f64 = (0..n).map(|i| (y[i] - fitted[i]).powi(2)).sum();
    Some((1.0 - ss_res / ss_tot).max(0.0).sqrt())
}

/// Least-squares line `y ≈ a x + b` via nalgebra.
pub fn reference_line(x: &[f64], y: &[f64]) -> (f64, f64) {
    let a = DMatrix::from_fn(x.len(), 2, |i, j| if j == 0 { x[i] } else { 1.0 });
    let beta = a.svd(true, true).solve(&DVector::from_column_slice(y), 1e-12).unwrap();
    (beta[0], beta[1])
}

#[derive(Clone, Debug)]
pub enum RefMask {
    Size(usize, usize),
    Cover(BTreeSet<String>, usize),
}

impl RefMask {
    pub fn spec(&self) -> String {
        match self {
            RefMask::Size(a, b) => format!("size:{a}..{b}"),
            RefMask::Cover(cats, t) => {
                format!("cover:{}@{t}", cats.iter().cloned().collect::<Vec<_>>().join(","))
            }
        }
    }

    pub fn holds(&self, raw: &Raw, pattern: &[String]) -> bool {
        match self {
            RefMask::Size(a, b) => (*a..=*b).contains(&pattern.len()),
            RefMask::Cover(cats, t) => {
                pattern.len() < *t
                    || cats.iter().all(|c| {
                        pattern
                            .iter()
                            .any(|i| raw.categories.get(i).is_some_and(|s| s.contains(c)))
                    })
            }
        }
    }
}

#[derive(Clone, Debug)]
pub enum RefFilter {
    All,
    Nonzero((usize, usize)),
    /// A conjunction of `facet > 0` / `facet < 0` tests over layer facets.
    Cond(Vec<((usize, usize), bool)>),
}

impl RefFilter {
    pub fn spec(&self) -> String {
        match self {
            RefFilter::All => "all".into(),
            RefFilter::Nonzero(f) => format!("nonzero:{}", facet_text(*f)),
            RefFilter::Cond(c) => format!(
                "cond:{}",
                c.iter()
                    .map(|(f, pos)| format!("{}{}0", facet_text(*f), if *pos { ">" } else { "<" }))
                    .collect::<Vec<_>>()
                    .join(", ")
            ),
        }
    }

    fn keeps(&self, raw: &Raw, item: &str) -> bool {
        let value = |t: &RawTx, f: (usize, usize)| -> f64 {
            let (c, ov) = &raw.objects[t.object];
            match f.0 {
                0 => {
                    let q = t.occurrences.iter().find(|(i, _)| i == item).unwrap().1;
                    raw.items[item][f.1] * q
                }
                1 => t.facets[f.1],
                2 => ov[f.1],
                _ => raw.containers[*c][f.1],
            }
        };
        raw.transactions
            .iter()
            .filter(|t| t.occurrences.iter().any(|(i, _)| i == item))
            .any(|t| match self {
                RefFilter::All => true,
                RefFilter::Nonzero(f) => value(t, *f) != 0.0,
                RefFilter::Cond(c) => c.iter().all(|(f, pos)| {
                    let v = value(t, *f);
                    if *pos {
                        v > 0.0
                    } else {
                        v < 0.0
                    }
                }),
            })
    }
}

#[derive(Clone, Debug)]
pub struct RefConfig {
    pub min_support: usize,
    pub min_utility: f64,
    pub min_len: usize,
    pub max_len: usize,
    pub sequence: bool,
    pub contiguous: bool,
    pub intra: Intra,
    pub function: RefFn,
    pub masks: Vec<RefMask>,
    pub filter: RefFilter,
}

impl RefConfig {
    pub fn random(rng: &mut ChaCha8Rng, raw: &Raw) -> Option<RefConfig> {
        let function = RefFn::random(rng, raw)?;
        let sequence = rng.random_bool(0.35);
        let min_len = rng.random_range(1..=2);
        let max_len = rng.random_range(min_len..=if sequence { 3 } else { 4 });
        let mut masks = Vec::new();
        if rng.random_bool(0.3) {
            let a = rng.random_range(1..=2);
            masks.push(RefMask::Size(a, rng.random_range(a..=3)));
        }
        if rng.random_bool(0.3) {
            let k = rng.random_range(1..=2);
            let cats: BTreeSet<String> = CATEGORIES
                .choose_multiple(rng, k)
                .map(|c| c.to_string())
                .collect();
            masks.push(RefMask::Cover(cats, rng.random_range(1..=3)));
        }
        let layer: Vec<(usize, usize)> = raw.facets();
        let filter = match rng.random_range(0..4) {
            1 if !layer.is_empty() => RefFilter::Nonzero(*layer.choose(rng).unwrap()),
            2 => {
                let layer: Vec<(usize, usize)> = layer.into_iter().filter(|f| f.0 > 0).collect();
                if layer.is_empty() {
                    RefFilter::All
                } else {
                    RefFilter::Cond(
                        (0..rng.random_range(1..=2))
                            .map(|_| (*layer.choose(rng).unwrap(), rng.random_bool(0.5)))
                            .collect(),
                    )
                }
            }
            _ => RefFilter::All,
        };
        let thresholds = [f64::NEG_INFINITY, -1.0, 0.0, 0.5, 2.0, 40.0];
        Some(RefConfig {
            min_support: rng.random_range(1..=3),
            min_utility: *thresholds.choose(rng).unwrap(),
            min_len,
            max_len,
            sequence,
            contiguous: sequence && rng.random_bool(0.5),
            intra: [Intra::Sum, Intra::Max, Intra::Min, Intra::Avg][rng.random_range(0..4)],
            function,
            masks,
            filter,
        })
    }

    pub fn utility_spec(&self) -> String {
        format!("{};intra={}", self.function.spec(), self.intra.name())
    }

    /// Equivalent library configuration.
    pub fn mining_config(&self) -> ehupm::miner::MiningConfig {
        let mut cfg = ehupm::miner::MiningConfig::new(self.utility_spec().parse().unwrap());
        cfg.min_support = self.min_support;
        cfg.min_utility = self.min_utility;
        cfg.min_len = self.min_len;
        cfg.max_len = Some(self.max_len);
        cfg.mode = if self.sequence {
            ehupm::miner::Mode::Sequence
        } else {
            ehupm::miner::Mode::Itemset
        };
        cfg.contiguous = self.contiguous;
        cfg.item_filter = self.filter.spec().parse().unwrap();
        cfg.masks = self.masks.iter().map(|m| m.spec().parse().unwrap()).collect();
        cfg
    }
}

/// Reference result: pattern names → (supporting transaction names, utility).
#[derive(Debug, Default)]
pub struct RefResult {
    pub valid: BTreeMap<Vec<String>, (Vec<String>, f64)>,
    /// Candidates whose utility lies within tolerance of the threshold.
    pub borderline: BTreeSet<Vec<String>>,
    pub undefined: usize,
}

fn candidates(items: &[String], max_len: usize, sequence: bool) -> Vec<Vec<String>> {
    let mut out = Vec::new();
    let mut frontier: Vec<Vec<String>> = vec![Vec::new()];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for p in &frontier {
            for (k, item) in items.iter().enumerate() {
                // itemsets grow in name order only
                if !sequence && p.last().is_some_and(|last| items.iter().position(|i| i == last).unwrap() >= k) {
                    continue;
                }
                let mut q = p.clone();
                q.push(item.clone());
                next.push(q);
            }
        }
        out.extend(next.iter().cloned());
        frontier = next;
    }
    out
}

/// Exhaustive generate-and-test over every candidate up to `max_len`.
pub fn reference_mine(raw: &Raw, cfg: &RefConfig) -> RefResult {
    let useful: Vec<String> = raw
        .item_names()
        .into_iter()
        .filter(|i| cfg.filter.keeps(raw, i))
        .collect();
    let mut result = RefResult::default();
    for pattern in candidates(&useful, cfg.max_len, cfg.sequence) {
        if pattern.len() < cfg.min_len || !cfg.masks.iter().all(|m| m.holds(raw, &pattern)) {
            continue;
        }
        let tids: Vec<usize> = (0..raw.transactions.len())
            .filter(|&t| raw.supports(&raw.transactions[t], &pattern, cfg.sequence, cfg.contiguous))
            .collect();
        if tids.len() < cfg.min_support || tids.is_empty() {
            continue;
        }
        let rows = raw.matrix(&pattern, &tids, cfg.intra);
        match cfg.function.eval(raw, &rows) {
            None => result.undefined += 1,
            Some(u) => {
                if (u - cfg.min_utility).abs() <= TOL * u.abs().max(1.0) {
                    result.borderline.insert(pattern);
                } else if u > cfg.min_utility {
                    let names = tids.iter().map(|&t| raw.transactions[t].name.clone()).collect();
                    result.valid.insert(pattern, (names, u));
                }
            }
        }
    }
    result
}

/// Compares a library mining result with the reference; `Err` describes the
/// first disagreement.
pub fn compare(raw: &Raw, cfg: &RefConfig, dataset: &Dataset) -> Result<(), String> {
    let expected = reference_mine(raw, cfg);
    let got = ehupm::miner::mine(dataset, &cfg.mining_config()).map_err(|e| e.to_string())?;
    let mut seen = BTreeSet::new();
    for e in &got.entries {
        let names: Vec<String> = e.pattern.names(dataset).iter().map(|s| s.to_string()).collect();
        if expected.borderline.contains(&names) {
            continue;
        }
        let tids: Vec<String> = e.tids.iter().map(|&t| dataset.transaction(t).name.clone()).collect();
        match expected.valid.get(&names) {
            None => return Err(format!("unexpected pattern {names:?} (u = {})", e.utility)),
            Some((etids, eu)) => {
                if *etids != tids {
                    return Err(format!("{names:?}: support {tids:?} vs reference {etids:?}"));
                }
                if (e.utility - eu).abs() > TOL * eu.abs().max(1.0) {
                    return Err(format!("{names:?}: utility {} vs reference {eu}", e.utility));
                }
            }
        }
        seen.insert(names);
    }
    if let Some(missing) = expected.valid.keys().find(|k| !seen.contains(*k)) {
        return Err(format!("missing pattern {missing:?}"));
    }
    if got.diagnostics.undefined_utility != expected.undefined {
        return Err(format!(
            "undefined count {} vs reference {}",
            got.diagnostics.undefined_utility, expected.undefined
        ));
    }
    let order: Vec<_> = got.entries.iter().map(|e| e.pattern.clone()).collect();
    if !order.windows(2).all(|w| w[0] < w[1]) {
        return Err("entries not in canonical order".into());
    }
    Ok(())
}

/// Patients with a binary outcome, encounters with `facets` transaction
/// facets, and attribute items. When `noise` is 0 the first facet equals the
/// outcome in every encounter.
pub fn clinical(rng: &mut ChaCha8Rng, patients: usize, facets: usize, noise: f64) -> String {
    let mut s = String::from("container(all).\n");
    for p in 0..patients {
        let y = rng.random_range(0..=1) as f64;
        s += &format!("object(p{p:03}, all). objectUtilityVector(p{p:03}, {y}).\n");
        let attrs = [
            format!("sex_{}", ["f", "m"][rng.random_range(0..2)]),
            format!("age_{}", rng.random_range(0..3)),
            format!("grp_{}", rng.random_range(0..2)),
        ];
        for e in 0..rng.random_range(1..=3) {
            let name = format!("p{p:03}e{e}");
            let mut vals = Vec::new();
            for k in 0..facets {
                let base = if k == 0 { y } else { rng.random_range(0..=4) as f64 };
                let jitter = if noise > 0.0 { rng.random_range(-noise..=noise) } else { 0.0 };
                vals.push(format!("{}", base + jitter));
            }
            s += &format!("transaction({name}, p{p:03}). transactionUtilityVector({name}, {}).\n", vals.join(", "));
            for a in &attrs {
                s += &format!("item({name}, {a}).\n");
            }
        }
    }
    s
}
