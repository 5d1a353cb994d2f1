//! Independent-subgraph scheduling.
//!
//! A user subset is *independent* for view `h` when every connected
//! component of the sub-network it induces can run at full normalized rate
//! with `h` hops of knowledge. Time-sharing over independent subgraphs
//! (MIG scheduling) gives value `d/t`, where `d` is the smallest number of
//! slots any user is active in. The best multiset is found with an exact
//! covering LP. At `h = 1` this is maximal-independent-set scheduling of the
//! conflict graph, whose value is `1/chi_f`.

use std::collections::{BTreeSet, HashMap};

use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lp::{self, LpError};
use crate::par::{map_range, Execution};
use crate::rational::{lcm_of_denominators, Rational};
use crate::topology::{
    bits, canonical_pattern, classify_mask, components_of, diameter, three_user_index, three_user_pattern, Network,
    TopologyClass,
};

/// Largest user count for which every subset is enumerated.
pub const EXHAUSTIVE_CAP: usize = 12;

// ---------------------------------------------------------------------------
// Conflict graphs

/// Undirected graph on users: `i ~ j` iff a cross link joins them in either
/// direction.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ConflictGraph {
    n: usize,
    adj: Vec<u64>,
}

impl ConflictGraph {
    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Self {
        assert!(n <= 64, "conflict graphs hold at most 64 vertices");
        let mut adj = vec![0u64; n];
        for (i, j) in edges {
            assert!(i < n && j < n && i != j, "bad conflict edge ({i}, {j})");
            adj[i] |= 1 << j;
            adj[j] |= 1 << i;
        }
        ConflictGraph { n, adj }
    }

    pub fn cycle(n: usize) -> Self {
        ConflictGraph::from_edges(n, (0..n).map(|i| (i, (i + 1) % n)).filter(|(a, b)| a != b))
    }

    pub fn complete(n: usize) -> Self {
        ConflictGraph::from_edges(n, (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))))
    }

    pub fn vertices(&self) -> usize {
        self.n
    }

    pub fn neighbors(&self, v: usize) -> u64 {
        self.adj[v]
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.adj[i] >> j & 1 == 1
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        (0..self.n).flat_map(|i| bits(self.adj[i]).filter(move |&j| j > i).map(move |j| (i, j))).collect()
    }

    pub fn is_independent(&self, set: u64) -> bool {
        bits(set).all(|v| self.adj[v] & set == 0)
    }

    pub fn is_bipartite(&self) -> bool {
        let mut side: Vec<Option<bool>> = vec![None; self.n];
        for s in 0..self.n {
            if side[s].is_some() {
                continue;
            }
            side[s] = Some(false);
            let mut stack = vec![s];
            while let Some(u) = stack.pop() {
                let su = side[u].unwrap();
                for v in bits(self.adj[u]) {
                    match side[v] {
                        None => {
                            side[v] = Some(!su);
                            stack.push(v);
                        }
                        Some(sv) if sv == su => return false,
                        _ => {}
                    }
                }
            }
        }
        true
    }

    /// All maximal independent sets as bitmasks, in ascending mask order.
    pub fn maximal_independent_sets(&self) -> Vec<u64> {
        let mut out = Vec::new();
        let all = if self.n == 64 { u64::MAX } else { (1u64 << self.n) - 1 };
        // Bron-Kerbosch with pivoting on the complement graph.
        self.bron_kerbosch(0, all, 0, &mut out);
        out.sort_unstable();
        out
    }

    fn bron_kerbosch(&self, r: u64, mut p: u64, mut x: u64, out: &mut Vec<u64>) {
        if p == 0 && x == 0 {
            out.push(r);
            return;
        }
        let pivot = bits(p | x).max_by_key(|&u| (p & !self.adj[u] & !(1 << u)).count_ones()).unwrap();
        // Vertices non-adjacent to the pivot in the complement are the pivot's
        // conflict neighbors plus the pivot itself.
        let candidates = p & (self.adj[pivot] | 1 << pivot);
        for v in bits(candidates) {
            let compatible = !self.adj[v] & !(1 << v);
            self.bron_kerbosch(r | 1 << v, p & compatible, x & compatible, out);
            p &= !(1 << v);
            x |= 1 << v;
        }
    }
}

pub fn conflict_graph(net: &Network) -> ConflictGraph {
    ConflictGraph::from_edges(net.users(), net.cross().iter().copied())
}

// ---------------------------------------------------------------------------
// Independence tests

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComponentVerdict {
    /// 0-based users of the induced component.
    pub users: Vec<usize>,
    pub class: TopologyClass,
    pub passes: bool,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Independence {
    pub independent: bool,
    /// The `h = 3` test has no converse: failing it proves nothing.
    pub sufficient_only: bool,
    pub components: Vec<ComponentVerdict>,
}

fn check_h(h: u32) -> Result<()> {
    if (1..=3).contains(&h) {
        Ok(())
    } else {
        Err(Error::InvalidNetwork(format!("hop view h must be 1, 2 or 3, got {h}")))
    }
}

/// Three-user class index that is open at h = 2 and excluded at h = 3.
fn open_three_user_class() -> usize {
    three_user_index('g').expect("letter g is tabulated")
}

fn component_verdict(net: &Network, comp: u64, h: u32) -> (bool, TopologyClass, String) {
    let class = classify_mask(net, comp);
    let n = comp.count_ones() as usize;
    let named = match (h, class) {
        (_, TopologyClass::Isolated) => Some("isolated pair"),
        (1, _) => None,
        (_, TopologyClass::FullyConnected { .. }) => Some("fully connected"),
        (_, TopologyClass::ZNetwork) => Some("one-to-many (Z)"),
        (_, TopologyClass::DToMany { d: 1, .. }) => Some("one-to-many"),
        (3, TopologyClass::DToMany { .. }) => Some("d-to-many"),
        (3, TopologyClass::ManyToD { .. }) => Some("many-to-d"),
        _ => None,
    };
    if let Some(reason) = named {
        return (true, class, reason.to_string());
    }
    if h == 3 && n == 3 {
        let members: Vec<usize> = bits(comp).collect();
        let canon = canonical_pattern(three_user_pattern(net, &members));
        let index = crate::topology::three_user_representatives().binary_search(&canon).expect("representative");
        if index != open_three_user_class() {
            return (true, class, format!("three-user class #{index}"));
        }
    }
    if h >= 2 && n >= 2 {
        let members: Vec<usize> = bits(comp).collect();
        if diameter(&net.induced(&members)) <= h {
            return (true, class, format!("component diameter within {h} hops"));
        }
    }
    let reason = match h {
        1 => "has a cross link".to_string(),
        2 => "neither one-to-many nor fully connected".to_string(),
        _ => "not in the three-hop independent families".to_string(),
    };
    (false, class, reason)
}

/// Independence test for a user mask, with a verdict per component.
pub fn independence(net: &Network, users: u64, h: u32) -> Result<Independence> {
    check_h(h)?;
    if users & !net.all_users_mask() != 0 {
        return Err(Error::InvalidNetwork("subset names a missing user".into()));
    }
    let components: Vec<ComponentVerdict> = components_of(net, users)
        .into_iter()
        .map(|c| {
            let (passes, class, reason) = component_verdict(net, c, h);
            ComponentVerdict { users: bits(c).collect(), class, passes, reason }
        })
        .collect();
    Ok(Independence { independent: components.iter().all(|c| c.passes), sufficient_only: h == 3, components })
}

/// Independence test for a list of 0-based users.
pub fn is_independent_subgraph(users: &[usize], net: &Network, h: u32) -> Result<Independence> {
    let mut mask = 0u64;
    for &u in users {
        if u >= net.users() {
            return Err(Error::InvalidNetwork(format!("user {} does not exist", u + 1)));
        }
        mask |= 1 << u;
    }
    independence(net, mask, h)
}

pub(crate) fn is_independent_mask(net: &Network, users: u64, h: u32) -> bool {
    if h == 1 {
        return bits(users).all(|u| net.out_mask(u) & users == 0);
    }
    components_of(net, users).into_iter().all(|c| component_verdict(net, c, h).0)
}

// ---------------------------------------------------------------------------
// Schedule multisets

/// `t` slots, each an independent user subset (0-based, ascending).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScheduleMultiset {
    pub users: usize,
    pub slots: Vec<Vec<usize>>,
}

impl ScheduleMultiset {
    pub fn t(&self) -> usize {
        self.slots.len()
    }

    /// Per-user activation counts.
    pub fn coverage(&self) -> Vec<usize> {
        let mut c = vec![0; self.users];
        for s in &self.slots {
            for &u in s {
                c[u] += 1;
            }
        }
        c
    }

    /// `d`: the smallest activation count.
    pub fn d(&self) -> usize {
        self.coverage().into_iter().min().unwrap_or(0)
    }

    /// Normalized sum-rate `d/t`.
    pub fn value(&self) -> Rational {
        if self.slots.is_empty() {
            return Rational::zero();
        }
        Rational::new(self.d() as i64, self.t() as i64)
    }

    pub fn to_document(&self) -> ScheduleDocument {
        ScheduleDocument {
            t: self.t(),
            slots: self.slots.iter().map(|s| s.iter().map(|u| u + 1).collect()).collect(),
            value: self.value(),
        }
    }
}

/// Schedule JSON: 1-based users per slot and the claimed value.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScheduleDocument {
    pub t: usize,
    pub slots: Vec<Vec<usize>>,
    pub value: Rational,
}

impl ScheduleDocument {
    pub fn to_multiset(&self, users: usize) -> Result<ScheduleMultiset> {
        if self.slots.len() != self.t {
            return Err(Error::InvalidSchedule(format!("t = {} but {} slots listed", self.t, self.slots.len())));
        }
        let mut slots = Vec::with_capacity(self.t);
        for s in &self.slots {
            let mut set = BTreeSet::new();
            for &u in s {
                if u == 0 || u > users || !set.insert(u - 1) {
                    return Err(Error::InvalidSchedule(format!("bad user {u} in slot {s:?}")));
                }
            }
            slots.push(set.into_iter().collect());
        }
        let m = ScheduleMultiset { users, slots };
        if m.value() != self.value {
            return Err(Error::InvalidSchedule(format!(
                "declared value {} but the slots give {}",
                self.value,
                m.value()
            )));
        }
        Ok(m)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MigResult {
    pub schedule: ScheduleMultiset,
    pub value: Rational,
    /// The candidate subgraphs fed to the LP (maximal independent ones when
    /// enumeration was exhaustive).
    pub candidates: Vec<Vec<usize>>,
    /// False when the greedy fallback replaced exhaustive enumeration.
    pub exhaustive: bool,
    pub sufficient_only: bool,
}

/// Independent masks that have no independent one-user extension. Any
/// dropped mask is contained in a kept one, so the LP value is unchanged.
fn maximal_independent_masks(net: &Network, h: u32, exec: Execution) -> Vec<u64> {
    let k = net.users();
    let n = 1usize << k;
    let independent: Vec<bool> = map_range(exec, n, |m| m != 0 && is_independent_mask(net, m as u64, h));
    (1..n)
        .filter(|&m| independent[m])
        .filter(|&m| (0..k).all(|u| m >> u & 1 == 1 || !independent[m | 1 << u]))
        .map(|m| m as u64)
        .collect()
}

/// Greedy candidates: from each seed user, add users in ascending order
/// whenever the set stays independent.
fn greedy_independent_masks(net: &Network, h: u32, exec: Execution) -> Vec<u64> {
    let k = net.users();
    let grown: Vec<u64> = map_range(exec, k, |seed| {
        let mut set = 1u64 << seed;
        for u in 0..k {
            if set >> u & 1 == 0 && is_independent_mask(net, set | 1 << u, h) {
                set |= 1 << u;
            }
        }
        set
    });
    let unique: BTreeSet<u64> = grown.into_iter().collect();
    unique.into_iter().collect()
}

fn mask_key(m: u64) -> Vec<usize> {
    bits(m).collect()
}

/// Fractional covering over `sets`: returns (packing value V, covering
/// weights y with sum V), or `None` when some user is uncovered.
fn covering(users: usize, sets: &[u64]) -> Option<(Rational, Vec<Rational>)> {
    let c = vec![Rational::one(); users];
    let a: Vec<Vec<Rational>> = sets
        .iter()
        .map(|&s| (0..users).map(|u| if s >> u & 1 == 1 { Rational::one() } else { Rational::zero() }).collect())
        .collect();
    let b = vec![Rational::one(); sets.len()];
    match lp::maximize(&c, &a, &b) {
        Ok(sol) => Some((sol.value, sol.dual)),
        Err(LpError::Unbounded) => None,
        Err(e) => panic!("covering LP malformed: {e}"),
    }
}

/// Optimal covering schedule over candidate sets, with the support thinned
/// greedily (fewer distinct subgraphs, lexicographic order).
pub(crate) fn lp_schedule(users: usize, candidates: &[u64]) -> (ScheduleMultiset, Rational) {
    let (value, y) = covering(users, candidates).expect("candidates cover every user");
    let mut support: Vec<u64> = candidates.iter().zip(&y).filter(|(_, w)| w.is_positive()).map(|(&s, _)| s).collect();
    support.sort_by_key(|&s| mask_key(s));
    let mut i = 0;
    while i < support.len() {
        let mut trial = support.clone();
        trial.remove(i);
        match covering(users, &trial) {
            Some((v, _)) if v == value => support = trial,
            _ => i += 1,
        }
    }
    let (v, y) = covering(users, &support).expect("support covers every user");
    debug_assert_eq!(v, value);
    // Normalize covering weights to slot fractions x = y / V.
    let x: Vec<Rational> = y.iter().map(|w| w / &value).collect();
    let t = lcm_of_denominators(x.iter().filter(|w| w.is_positive()));
    let t_r = Rational::from(num_rational::BigRational::from_integer(t));
    let mut slots = Vec::new();
    for (s, w) in support.iter().zip(&x) {
        let mult = (w * &t_r).numer().to_usize().expect("multiplicity fits");
        for _ in 0..mult {
            slots.push(mask_key(*s));
        }
    }
    let schedule = ScheduleMultiset { users, slots };
    let lambda = value.recip();
    assert_eq!(schedule.value(), lambda, "LP schedule must realize its value exactly");
    (schedule, lambda)
}

/// Best MIG schedule for view `h`. Exact for `K <= EXHAUSTIVE_CAP`;
/// otherwise a greedy candidate family, flagged non-exhaustive.
pub fn optimize_mig(net: &Network, h: u32, exec: Execution) -> Result<MigResult> {
    check_h(h)?;
    let exhaustive = net.users() <= EXHAUSTIVE_CAP;
    let candidates =
        if exhaustive { maximal_independent_masks(net, h, exec) } else { greedy_independent_masks(net, h, exec) };
    let (schedule, value) = lp_schedule(net.users(), &candidates);
    Ok(MigResult {
        schedule,
        value,
        candidates: candidates.iter().map(|&m| mask_key(m)).collect(),
        exhaustive,
        sufficient_only: h == 3,
    })
}

// ---------------------------------------------------------------------------
// Fractional coloring

/// Upper limit on DP states used for the k-fold chromatic table.
pub const XI_STATE_CAP: usize = 2_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Coloring {
    pub chi_f: Rational,
    /// `xi[k-1]` is the k-fold chromatic number; empty when over the cap.
    pub xi: Vec<u32>,
    pub alpha_mis: Rational,
    /// Smallest `k <= k_max` with `xi_k / k = chi_f`.
    pub k_star: Option<u32>,
    /// False when the k-fold table was skipped for size.
    pub exact_table: bool,
}

/// Least number of independent sets covering every vertex `k` times.
pub fn k_fold_chromatic(g: &ConflictGraph, k: u32) -> u32 {
    let mis = g.maximal_independent_sets();
    let mut memo = HashMap::new();
    xi_rec(&mis, vec![k as u8; g.vertices()], &mut memo)
}

fn xi_rec(mis: &[u64], demand: Vec<u8>, memo: &mut HashMap<Vec<u8>, u32>) -> u32 {
    let Some(v) = demand.iter().position(|&d| d > 0) else {
        return 0;
    };
    if let Some(&r) = memo.get(&demand) {
        return r;
    }
    let mut best = u32::MAX;
    for &s in mis.iter().filter(|&&s| s >> v & 1 == 1) {
        let mut next = demand.clone();
        for u in bits(s) {
            next[u] = next[u].saturating_sub(1);
        }
        best = best.min(1 + xi_rec(mis, next, memo));
    }
    memo.insert(demand, best);
    best
}

pub fn fractional_coloring(g: &ConflictGraph, k_max: u32) -> Coloring {
    let n = g.vertices();
    let chi_f =
        if n == 0 { Rational::zero() } else { covering(n, &g.maximal_independent_sets()).expect("singletons cover").0 };
    let states = (k_max as f64 + 1.0).powi(n as i32);
    let exact_table = k_max <= u8::MAX as u32 && states <= XI_STATE_CAP as f64;
    let xi: Vec<u32> = if exact_table { (1..=k_max).map(|k| k_fold_chromatic(g, k)).collect() } else { Vec::new() };
    let k_star = xi.iter().zip(1..).find(|(&x, k)| Rational::new(x as i64, *k as i64) == chi_f).map(|(_, k)| k);
    Coloring { alpha_mis: if n == 0 { Rational::one() } else { chi_f.recip() }, chi_f, xi, k_star, exact_table }
}

/// True iff maximal-independent-set scheduling is optimal at `h = 1`,
/// i.e. the conflict graph has `xi_k <= 2k` for some `k`, i.e. `chi_f <= 2`.
pub fn mis_optimality_predicate(g: &ConflictGraph) -> bool {
    if g.vertices() == 0 {
        return true;
    }
    let chi_f = covering(g.vertices(), &g.maximal_independent_sets()).unwrap().0;
    chi_f <= Rational::from_integer(2)
}
