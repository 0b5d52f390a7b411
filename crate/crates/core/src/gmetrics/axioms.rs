//! Exhaustive axiom checks and family classification.
//!
//! Every checker scans all required tuples in a fixed order and stops at the
//! first violation. Inequalities use the tolerances of [`crate::tol`].

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{HMetricTable, KMultiset, PointSet};
use crate::error::{Error, Result};
use crate::tol;

/// Default cap on the number of table evaluations a single check may perform.
pub const DEFAULT_CHECK_BUDGET: u128 = 100_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Axiom {
    /// Symmetry under permutation.
    Pi,
    /// Zero exactly on constant multisets.
    OD,
    /// Zero exactly when two of three arguments coincide (k = 3).
    O2,
    /// Three-term triangle inequality (k = 3).
    DeltaD,
    /// `d(v₁…v_k) ≤ d(v₁…v_{k−1},a) + d(a…a,v_k)`.
    DeltaN,
    /// Split triangle inequality for every split point `i` and witness `a`.
    DeltaH,
    /// `d(v₁…v₁,v₂) ≤ d(v₁,…,v_k)` for distinct `v₂…v_k`.
    SK,
    /// Monotonicity under strict inclusion of element sets.
    SHStar,
    /// `SHStar` plus the factor-(k−1) bound between multisets with equal element sets.
    SH,
}

impl Axiom {
    pub const ALL: [Axiom; 9] = [
        Axiom::Pi,
        Axiom::OD,
        Axiom::O2,
        Axiom::DeltaD,
        Axiom::DeltaN,
        Axiom::DeltaH,
        Axiom::SK,
        Axiom::SHStar,
        Axiom::SH,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Axiom::Pi => "Pi",
            Axiom::OD => "O_D",
            Axiom::O2 => "O_2",
            Axiom::DeltaD => "Delta_D",
            Axiom::DeltaN => "Delta_n",
            Axiom::DeltaH => "Delta_H",
            Axiom::SK => "S_K",
            Axiom::SHStar => "S_Hstar",
            Axiom::SH => "S_H",
        }
    }

    /// Arity the axiom is defined for, if restricted.
    pub fn required_k(self) -> Option<usize> {
        match self {
            Axiom::O2 | Axiom::DeltaD => Some(3),
            _ => None,
        }
    }
}

impl fmt::Display for Axiom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Axiom {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Axiom::ALL
            .into_iter()
            .find(|a| a.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::Parameter(format!("unknown axiom `{s}`")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Family {
    #[serde(rename = "two_metric")]
    TwoMetric,
    #[serde(rename = "D_metric")]
    DMetric,
    #[serde(rename = "G_metric")]
    GMetric,
    #[serde(rename = "n_metric")]
    NMetric,
    #[serde(rename = "K_metric")]
    KMetric,
    #[serde(rename = "H_metric")]
    HMetric,
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::TwoMetric => "two_metric",
            Family::DMetric => "D_metric",
            Family::GMetric => "G_metric",
            Family::NMetric => "n_metric",
            Family::KMetric => "K_metric",
            Family::HMetric => "H_metric",
        }
    }

    /// Defining axioms, or `None` when the family does not exist at arity `k`.
    pub fn axioms(self, k: usize) -> Option<&'static [Axiom]> {
        use Axiom::*;
        match self {
            Family::TwoMetric if k == 3 => Some(&[Pi, O2, DeltaD]),
            Family::DMetric if k == 3 => Some(&[Pi, OD, DeltaD]),
            Family::GMetric if k == 3 => Some(&[Pi, OD, DeltaN, SK]),
            Family::NMetric => Some(&[Pi, OD, DeltaN]),
            Family::KMetric => Some(&[Pi, OD, DeltaN, SK]),
            Family::HMetric => Some(&[Pi, OD, SH, DeltaH]),
            _ => None,
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Relation {
    /// `Σ d(lhs) ≤ factor · Σ d(rhs)`
    AtMost,
    /// `d(lhs) = 0`
    Zero,
    /// `d(lhs) > 0`
    Positive,
}

/// One concrete instance of an axiom, with both sides evaluated.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub relation: Relation,
    pub lhs: Vec<KMultiset>,
    pub rhs: Vec<KMultiset>,
    pub factor: f64,
    pub lhs_value: f64,
    pub rhs_value: f64,
    /// Which clause of a multi-clause axiom the instance belongs to.
    pub clause: Option<String>,
}

impl Witness {
    fn at_most(lhs: Vec<KMultiset>, rhs: Vec<KMultiset>, factor: f64, l: f64, r: f64) -> Self {
        Self { relation: Relation::AtMost, lhs, rhs, factor, lhs_value: l, rhs_value: r, clause: None }
    }

    fn single(relation: Relation, m: KMultiset, v: f64) -> Self {
        Self { relation, lhs: vec![m], rhs: Vec::new(), factor: 1.0, lhs_value: v, rhs_value: 0.0, clause: None }
    }

    fn with_clause(mut self, c: &str) -> Self {
        self.clause = Some(c.to_string());
        self
    }

    /// Re-evaluates both sides against `table`.
    pub fn evaluate(&self, table: &HMetricTable) -> (f64, f64) {
        let l: f64 = self.lhs.iter().map(|m| table.get(m)).sum();
        let r: f64 = self.rhs.iter().map(|m| table.get(m)).sum::<f64>() * self.factor;
        (l, r)
    }

    /// Whether the instance is violated on `table`.
    pub fn is_violated(&self, table: &HMetricTable) -> bool {
        let (l, r) = self.evaluate(table);
        match self.relation {
            Relation::AtMost => !tol::leq(l, r),
            Relation::Zero => !tol::is_zero(l),
            Relation::Positive => !tol::is_positive(l),
        }
    }

    /// `rhs − lhs` for inequalities.
    pub fn slack(&self) -> f64 {
        self.rhs_value - self.lhs_value
    }

    pub fn describe(&self, points: &PointSet) -> String {
        let side =
            |ms: &[KMultiset]| ms.iter().map(|m| format!("d{}", m.display(points))).collect::<Vec<_>>().join(" + ");
        match self.relation {
            Relation::AtMost => {
                let factor = if self.factor == 1.0 { String::new() } else { format!("{}·", self.factor) };
                format!(
                    "{} = {} ≤ {}({}) = {}",
                    side(&self.lhs),
                    self.lhs_value,
                    factor,
                    side(&self.rhs),
                    self.rhs_value
                )
            }
            Relation::Zero => format!("{} = {} must be 0", side(&self.lhs), self.lhs_value),
            Relation::Positive => format!("{} = {} must be > 0", side(&self.lhs), self.lhs_value),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AxiomReport {
    pub axiom: Axiom,
    pub holds: bool,
    /// First violating instance in scan order; present iff `holds` is false.
    pub witness: Option<Witness>,
    /// Inequality instance with the smallest slack, when the axiom holds.
    pub tightest: Option<Witness>,
    pub evaluations: u64,
}

#[derive(Clone, Copy, Debug)]
pub struct CheckOptions {
    pub budget: u128,
}

impl Default for CheckOptions {
    fn default() -> Self {
        Self { budget: DEFAULT_CHECK_BUDGET }
    }
}

pub fn check_axiom(table: &HMetricTable, axiom: Axiom) -> Result<AxiomReport> {
    check_axiom_with(table, axiom, &CheckOptions::default())
}

pub fn check_axiom_with(table: &HMetricTable, axiom: Axiom, opts: &CheckOptions) -> Result<AxiomReport> {
    if let Some(required) = axiom.required_k() {
        if table.k() != required {
            return Err(Error::AxiomArity { axiom, required, actual: table.k() });
        }
    }
    let needed = work_estimate(table, axiom);
    if needed > opts.budget {
        return Err(Error::BudgetExceeded { what: "axiom check", needed, budget: opts.budget });
    }
    let mut scan = Scan::new(table);
    match axiom {
        Axiom::Pi => {}
        Axiom::OD => scan_od(&mut scan),
        Axiom::O2 => scan_o2(&mut scan),
        Axiom::DeltaD => scan_delta_d(&mut scan),
        Axiom::DeltaN => scan_delta_n(&mut scan),
        Axiom::DeltaH => scan_delta_h(&mut scan),
        Axiom::SK => scan_sk(&mut scan),
        Axiom::SHStar => scan_sh(&mut scan, false),
        Axiom::SH => scan_sh(&mut scan, true),
    }
    Ok(scan.finish(axiom))
}

fn binom(n: usize, r: usize) -> u128 {
    if r > n {
        return 0;
    }
    let r = r.min(n - r);
    (0..r).fold(1u128, |acc, i| acc.saturating_mul((n - i) as u128) / (i as u128 + 1))
}

fn work_estimate(table: &HMetricTable, axiom: Axiom) -> u128 {
    let m = table.len() as u128;
    let n = table.n() as u128;
    let k = table.k() as u128;
    match axiom {
        Axiom::Pi => 0,
        Axiom::OD | Axiom::O2 => m,
        Axiom::DeltaD => m.saturating_mul(n),
        Axiom::DeltaN => m.saturating_mul(n).saturating_mul(k),
        Axiom::DeltaH => m.saturating_mul(n).saturating_mul(1u128 << table.k().min(100)),
        Axiom::SK => binom(table.n(), table.k() - 1).saturating_mul(n).saturating_mul(k),
        Axiom::SHStar | Axiom::SH => {
            let groups = if table.n() < 100 { m.min(1u128 << table.n()) } else { m };
            m.saturating_add(groups.saturating_mul(groups))
        }
    }
}

struct Scan<'a> {
    table: &'a HMetricTable,
    violation: Option<Witness>,
    tightest: Option<Witness>,
    tightest_slack: f64,
    evals: u64,
}

impl<'a> Scan<'a> {
    fn new(table: &'a HMetricTable) -> Self {
        Self { table, violation: None, tightest: None, tightest_slack: f64::INFINITY, evals: 0 }
    }

    fn done(&self) -> bool {
        self.violation.is_some()
    }

    fn d(&mut self, m: &KMultiset) -> f64 {
        self.evals += 1;
        self.table.get(m)
    }

    /// Records `l ≤ r`; the witness is only materialized when needed.
    fn at_most<F: FnOnce() -> Witness>(&mut self, l: f64, r: f64, witness: F) {
        if !tol::leq(l, r) {
            self.violation = Some(witness());
        } else if r - l < self.tightest_slack {
            self.tightest_slack = r - l;
            self.tightest = Some(witness());
        }
    }

    fn finish(self, axiom: Axiom) -> AxiomReport {
        let holds = self.violation.is_none();
        AxiomReport {
            axiom,
            holds,
            witness: self.violation,
            tightest: if holds { self.tightest } else { None },
            evaluations: self.evals,
        }
    }
}

fn scan_od(s: &mut Scan) {
    for m in s.table.multisets() {
        let v = s.d(&m);
        if m.is_constant() {
            if !tol::is_zero(v) {
                s.violation = Some(Witness::single(Relation::Zero, m, v));
            }
        } else if !tol::is_positive(v) {
            s.violation = Some(Witness::single(Relation::Positive, m, v));
        }
        if s.done() {
            return;
        }
    }
}

fn scan_o2(s: &mut Scan) {
    for m in s.table.multisets() {
        let v = s.d(&m);
        if m.distinct_count() < 3 {
            if !tol::is_zero(v) {
                s.violation = Some(Witness::single(Relation::Zero, m, v));
            }
        } else if !tol::is_positive(v) {
            s.violation = Some(Witness::single(Relation::Positive, m, v));
        }
        if s.done() {
            return;
        }
    }
}

fn replace_one(m: &KMultiset, pos: usize, a: usize) -> KMultiset {
    let mut v = m.entries().to_vec();
    v[pos] = a;
    KMultiset::from_indices(v)
}

fn scan_delta_d(s: &mut Scan) {
    let n = s.table.n();
    for m in s.table.multisets() {
        let lhs = s.d(&m);
        for a in 0..n {
            let terms: Vec<KMultiset> = (0..3).map(|j| replace_one(&m, j, a)).collect();
            let rhs: f64 = terms.iter().map(|t| s.d(t)).sum();
            s.at_most(lhs, rhs, || Witness::at_most(vec![m.clone()], terms.clone(), 1.0, lhs, rhs));
            if s.done() {
                return;
            }
        }
    }
}

fn scan_delta_n(s: &mut Scan) {
    let n = s.table.n();
    let k = s.table.k();
    for m in s.table.multisets() {
        let lhs = s.d(&m);
        for (x, _) in m.counts() {
            let pos = m.entries().iter().position(|&p| p == x).unwrap();
            for a in 0..n {
                let first = replace_one(&m, pos, a);
                let second = KMultiset::from_counts(&[(a, k - 1), (x, 1)]);
                let rhs = s.d(&first) + s.d(&second);
                s.at_most(lhs, rhs, || {
                    Witness::at_most(vec![m.clone()], vec![first.clone(), second.clone()], 1.0, lhs, rhs)
                });
                if s.done() {
                    return;
                }
            }
        }
    }
}

/// All sub-multisets of `counts`, as count vectors, in lexicographic order.
fn sub_multisets(counts: &[(usize, usize)]) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::with_capacity(counts.len())];
    for &(_, c) in counts {
        let mut next = Vec::with_capacity(out.len() * (c + 1));
        for prefix in &out {
            for take in 0..=c {
                let mut p = prefix.clone();
                p.push(take);
                next.push(p);
            }
        }
        out = next;
    }
    out
}

fn scan_delta_h(s: &mut Scan) {
    let n = s.table.n();
    let k = s.table.k();
    for m in s.table.multisets() {
        let lhs = s.d(&m);
        let counts = m.counts();
        let subs = sub_multisets(&counts);
        for a in 0..n {
            for sub in &subs {
                let i: usize = sub.iter().sum();
                if i == 0 {
                    continue;
                }
                let mut first: Vec<(usize, usize)> = counts.iter().zip(sub).map(|(&(p, _), &t)| (p, t)).collect();
                first.push((a, k - i));
                let mut second: Vec<(usize, usize)> = counts.iter().zip(sub).map(|(&(p, c), &t)| (p, c - t)).collect();
                second.push((a, i));
                let first = KMultiset::from_counts(&first);
                let second = KMultiset::from_counts(&second);
                let rhs = s.d(&first) + s.d(&second);
                s.at_most(lhs, rhs, || {
                    Witness::at_most(vec![m.clone()], vec![first.clone(), second.clone()], 1.0, lhs, rhs)
                        .with_clause(&format!("i = {i}"))
                });
                if s.done() {
                    return;
                }
            }
        }
    }
}

/// Lexicographic r-combinations of `0..n`.
fn combinations(n: usize, r: usize) -> impl Iterator<Item = Vec<usize>> {
    let mut cur: Option<Vec<usize>> = if r <= n { Some((0..r).collect()) } else { None };
    std::iter::from_fn(move || {
        let out = cur.clone()?;
        let mut next = out.clone();
        let mut i = r;
        cur = None;
        while i > 0 {
            i -= 1;
            if next[i] < n - r + i {
                next[i] += 1;
                for j in i + 1..r {
                    next[j] = next[j - 1] + 1;
                }
                cur = Some(next);
                break;
            }
        }
        Some(out)
    })
}

fn scan_sk(s: &mut Scan) {
    let n = s.table.n();
    let k = s.table.k();
    for distinct in combinations(n, k - 1) {
        for v1 in 0..n {
            let mut full = distinct.clone();
            full.push(v1);
            let full = KMultiset::from_indices(full);
            let rhs = s.d(&full);
            for &v2 in &distinct {
                let pair = KMultiset::from_counts(&[(v1, k - 1), (v2, 1)]);
                let lhs = s.d(&pair);
                s.at_most(lhs, rhs, || Witness::at_most(vec![pair.clone()], vec![full.clone()], 1.0, lhs, rhs));
                if s.done() {
                    return;
                }
            }
        }
    }
}

struct Group {
    max: f64,
    argmax: KMultiset,
    min: f64,
    argmin: KMultiset,
}

fn is_strict_subset(a: &[usize], b: &[usize]) -> bool {
    a.len() < b.len() && a.iter().all(|x| b.binary_search(x).is_ok())
}

fn scan_sh(s: &mut Scan, with_factor: bool) {
    let k = s.table.k() as f64;
    let mut groups: BTreeMap<Vec<usize>, Group> = BTreeMap::new();
    for m in s.table.multisets() {
        let v = s.d(&m);
        groups
            .entry(m.elements())
            .and_modify(|g| {
                if v > g.max {
                    g.max = v;
                    g.argmax = m.clone();
                }
                if v < g.min {
                    g.min = v;
                    g.argmin = m.clone();
                }
            })
            .or_insert_with(|| Group { max: v, argmax: m.clone(), min: v, argmin: m.clone() });
    }
    for (ea, ga) in &groups {
        for (eb, gb) in &groups {
            if !is_strict_subset(ea, eb) {
                continue;
            }
            s.evals += 1;
            s.at_most(ga.max, gb.min, || {
                Witness::at_most(vec![ga.argmax.clone()], vec![gb.argmin.clone()], 1.0, ga.max, gb.min)
                    .with_clause("strict subset")
            });
            if s.done() {
                return;
            }
        }
        if with_factor && ea.len() > 1 {
            s.evals += 1;
            let r = (k - 1.0) * ga.min;
            s.at_most(ga.max, r, || {
                Witness::at_most(vec![ga.argmax.clone()], vec![ga.argmin.clone()], k - 1.0, ga.max, r)
                    .with_clause("equal element sets")
            });
            if s.done() {
                return;
            }
        }
    }
}

/// Family membership together with the reports it was derived from.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Classification {
    pub families: BTreeSet<Family>,
    pub reports: Vec<AxiomReport>,
}

impl Classification {
    pub fn contains(&self, f: Family) -> bool {
        self.families.contains(&f)
    }

    pub fn report(&self, a: Axiom) -> Option<&AxiomReport> {
        self.reports.iter().find(|r| r.axiom == a)
    }
}

pub fn classify(table: &HMetricTable) -> Result<Classification> {
    classify_with(table, &CheckOptions::default())
}

/// Runs every axiom applicable at the table's arity and derives the families
/// whose defining axioms all hold.
pub fn classify_with(table: &HMetricTable, opts: &CheckOptions) -> Result<Classification> {
    let k = table.k();
    let mut reports = Vec::new();
    for axiom in Axiom::ALL {
        if axiom.required_k().is_some_and(|r| r != k) {
            continue;
        }
        reports.push(check_axiom_with(table, axiom, opts)?);
    }
    let holds = |a: Axiom| reports.iter().any(|r| r.axiom == a && r.holds);
    let families =
        [Family::TwoMetric, Family::DMetric, Family::GMetric, Family::NMetric, Family::KMetric, Family::HMetric]
            .into_iter()
            .filter(|f| f.axioms(k).is_some_and(|ax| ax.iter().all(|&a| holds(a))))
            .collect();
    Ok(Classification { families, reports })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gmetrics::{build_example_binary, build_example_platforms, PointSet};

    fn uniform(n: usize, k: usize) -> HMetricTable {
        let p = PointSet::numbered("p", n).unwrap();
        HMetricTable::from_fn(k, p, |m| if m.is_constant() { 0.0 } else { 1.0 }).unwrap()
    }

    /// Δ_H straight from the definition: every ordered tuple, every split
    /// point, every witness point.
    fn delta_h_by_tuples(t: &HMetricTable) -> bool {
        let (n, k) = (t.n(), t.k());
        let total = n.pow(k as u32);
        for code in 0..total {
            let mut tuple = Vec::with_capacity(k);
            let mut c = code;
            for _ in 0..k {
                tuple.push(c % n);
                c /= n;
            }
            let lhs = t.distance(&tuple).unwrap();
            for a in 0..n {
                for i in 1..=k {
                    let mut first = tuple[..i].to_vec();
                    first.extend(std::iter::repeat_n(a, k - i));
                    let mut second = vec![a; i];
                    second.extend_from_slice(&tuple[i..]);
                    let rhs = t.distance(&first).unwrap() + t.distance(&second).unwrap();
                    if !tol::leq(lhs, rhs) {
                        return false;
                    }
                }
            }
        }
        true
    }

    #[test]
    fn uniform_table_satisfies_delta_h() {
        for (n, k) in [(2, 3), (3, 4), (4, 3), (3, 5)] {
            let t = uniform(n, k);
            assert!(delta_h_by_tuples(&t));
            assert!(check_axiom(&t, Axiom::DeltaH).unwrap().holds);
        }
    }

    #[test]
    fn delta_h_agrees_with_tuple_enumeration_on_perturbed_tables() {
        // Deterministic pseudo-random perturbations; the multiset scan and the
        // ordered-tuple scan must agree on every one.
        let base = build_example_platforms();
        let mut state = 0x9e3779b97f4a7c15u64;
        let mut agree = 0;
        for _ in 0..40 {
            let t = base
                .map_values(|_, v| {
                    state ^= state << 13;
                    state ^= state >> 7;
                    state ^= state << 17;
                    v * (0.5 + (state % 1000) as f64 / 1000.0)
                })
                .unwrap();
            assert_eq!(check_axiom(&t, Axiom::DeltaH).unwrap().holds, delta_h_by_tuples(&t));
            agree += 1;
        }
        assert_eq!(agree, 40);
    }

    #[test]
    fn example_platforms_tight_s_h_pair() {
        let t = build_example_platforms();
        let r = check_axiom(&t, Axiom::SH).unwrap();
        assert!(r.holds);
        let tight = r.tightest.unwrap();
        assert_eq!(tight.slack(), 0.0);
        assert_eq!(tight.lhs[0].labelled(t.points()), ["b", "b", "b", "c"]);
        assert_eq!(tight.rhs[0].labelled(t.points()), ["b", "b", "c", "c"]);
        assert_eq!(tight.factor, 3.0);
    }

    #[test]
    fn od_witnesses() {
        let p = PointSet::new(["a", "b"]).unwrap();
        let t = HMetricTable::from_fn(3, p, |m| {
            if m.is_constant() || (m.distinct_count() == 2 && m.entries()[1] == 0) {
                0.0
            } else {
                1.0
            }
        })
        .unwrap();
        let r = check_axiom(&t, Axiom::OD).unwrap();
        assert!(!r.holds);
        let w = r.witness.unwrap();
        assert_eq!(w.relation, Relation::Positive);
        assert!(w.is_violated(&t));
    }

    #[test]
    fn k3_only_axioms_reject_other_arity() {
        let t = build_example_binary();
        assert!(matches!(check_axiom(&t, Axiom::O2), Err(Error::AxiomArity { .. })));
        assert!(matches!(check_axiom(&t, Axiom::DeltaD), Err(Error::AxiomArity { .. })));
    }

    #[test]
    fn budget_guard() {
        let t = uniform(6, 5);
        let opts = CheckOptions { budget: 10 };
        assert!(check_axiom_with(&t, Axiom::DeltaH, &opts).unwrap_err().is_budget());
        assert!(check_axiom_with(&t, Axiom::Pi, &opts).unwrap().holds);
    }

    #[test]
    fn axiom_names_round_trip() {
        for a in Axiom::ALL {
            assert_eq!(a.name().parse::<Axiom>().unwrap(), a);
        }
    }

    #[test]
    fn combinations_enumerate() {
        let all: Vec<_> = combinations(5, 3).collect();
        assert_eq!(all.len(), 10);
        assert_eq!(all[0], [0, 1, 2]);
        assert_eq!(all[9], [2, 3, 4]);
        assert_eq!(combinations(2, 3).count(), 0);
        assert_eq!(combinations(3, 0).count(), 1);
    }
}
