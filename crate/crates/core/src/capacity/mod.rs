//! Normalized sum-capacity bounds.
//!
//! For each connected component the lower bound is the best certified
//! scheme (MIG LP, CS search, the cyclic-chain construction, or the bound
//! for a smaller view) and the upper bound comes from genie-aided outer
//! bounds on embedded sub-networks. A network's value is the minimum over its
//! components.

pub mod zchain_det;
pub mod zchain_gauss;

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::coded_sets::{cyclic_chain_schedule, search_best_cs, Field, CS_SEARCH_CAP};
use crate::error::{Error, Result};
use crate::par::Execution;
use crate::rational::Rational;
use crate::scheduler::{optimize_mig, EXHAUSTIVE_CAP};
use crate::topology::{
    bits, canonical_pattern, classify_mask, components_of, diameter, edge_hop_distances, three_user_letter,
    three_user_pattern, three_user_representatives, Link, Network, Node, Role, TopologyClass,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundKind {
    Lower,
    Upper,
}

/// One contributing bound and where it came from.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    pub kind: BoundKind,
    pub value: Rational,
    pub source: String,
    /// 1-based users of the component the bound applies to.
    pub component: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlphaResult {
    pub lower: Rational,
    pub upper: Rational,
    pub exact: bool,
    pub provenance: Vec<Provenance>,
    pub warnings: Vec<String>,
}

impl AlphaResult {
    fn point(v: Rational, source: &str, component: Vec<usize>) -> Self {
        AlphaResult {
            provenance: vec![
                Provenance {
                    kind: BoundKind::Lower,
                    value: v.clone(),
                    source: source.into(),
                    component: component.clone(),
                },
                Provenance { kind: BoundKind::Upper, value: v.clone(), source: source.into(), component },
            ],
            lower: v.clone(),
            upper: v,
            exact: true,
            warnings: Vec::new(),
        }
    }

    /// Sources of the winning lower and upper bounds, e.g. `"MIG-LP | Z-pair"`.
    pub fn provenance_summary(&self) -> String {
        let pick = |kind: BoundKind, target: &Rational| {
            let mut tags: Vec<&str> = self
                .provenance
                .iter()
                .filter(|p| p.kind == kind && p.value == *target)
                .map(|p| p.source.as_str())
                .collect();
            tags.sort_unstable();
            tags.dedup();
            tags.join("+")
        };
        format!("{} | {}", pick(BoundKind::Lower, &self.lower), pick(BoundKind::Upper, &self.upper))
    }
}

impl fmt::Display for AlphaResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.exact {
            write!(f, "{}", self.lower)
        } else {
            write!(f, "[{}, {}]", self.lower, self.upper)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AlphaOptions {
    pub exec: Execution,
    /// Run the coded-set search for components with at most this many users.
    pub cs_users: usize,
    pub cs_t_max: usize,
    pub cs_k_max: usize,
}

impl Default for AlphaOptions {
    fn default() -> Self {
        AlphaOptions { exec: Execution::Parallel, cs_users: CS_SEARCH_CAP, cs_t_max: 4, cs_k_max: 2 }
    }
}

fn check_h(h: u32) -> Result<()> {
    if h >= 1 {
        Ok(())
    } else {
        Err(Error::InvalidNetwork("hop view h must be at least 1".into()))
    }
}

// ---------------------------------------------------------------------------
// Three-user table

/// Known values for a three-user class: `alpha*(1)`, the `h = 2` outer bound
/// and whether that bound is attained.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ThreeUserValues {
    pub letter: char,
    pub alpha1: Rational,
    pub h2_upper: Rational,
    pub h2_exact: bool,
}

pub fn three_user_values(index: usize) -> ThreeUserValues {
    let letter = three_user_letter(index);
    let r = Rational::new;
    let alpha1 = match letter {
        'a' => r(1, 1),
        'h' | 'l' | 'm' | 'n' | 'o' | 'p' => r(1, 3),
        _ => r(1, 2),
    };
    let (h2_upper, h2_exact) = match letter {
        'a' | 'b' | 'c' | 'd' | 'p' => (r(1, 1), true),
        'g' | 'k' | 'l' | 'o' => (r(4, 5), false),
        _ => (r(2, 3), true),
    };
    ThreeUserValues { letter, alpha1, h2_upper, h2_exact }
}

fn three_user_index_of(net: &Network, members: &[usize]) -> usize {
    let canon = canonical_pattern(three_user_pattern(net, members));
    three_user_representatives().binary_search(&canon).expect("representative")
}

// ---------------------------------------------------------------------------
// Outer bounds

/// Largest `m` such that some `m` users can be ordered with every forward
/// cross link present. With all other gains zeroed by a genie the last
/// receiver of such a chain decodes every message, so `alpha <= 1/m`.
fn longest_decode_chain(net: &Network, comp: u64) -> (usize, Vec<usize>) {
    let members: Vec<usize> = bits(comp).collect();
    let n = members.len();
    if n <= 20 {
        // best[S] = a head of a transitive ordering of S, if S is orderable.
        let local_out: Vec<u64> = members
            .iter()
            .map(|&u| {
                members.iter().enumerate().filter(|(_, &v)| net.has_cross(u, v)).fold(0u64, |m, (b, _)| m | 1 << b)
            })
            .collect();
        let size = 1usize << n;
        let mut head = vec![u8::MAX; size];
        let mut best = (0usize, 0usize);
        for s in 1..size {
            let s64 = s as u64;
            for b in bits(s64) {
                let rest = s64 & !(1 << b);
                if local_out[b] & rest == rest && (rest == 0 || head[rest as usize] != u8::MAX) {
                    head[s] = b as u8;
                    break;
                }
            }
            if head[s] != u8::MAX && s.count_ones() as usize > best.0 {
                best = (s.count_ones() as usize, s);
            }
        }
        let mut order = Vec::new();
        let mut s = best.1;
        while s != 0 {
            let b = head[s] as usize;
            order.push(members[b]);
            s &= !(1 << b);
        }
        (best.0, order)
    } else {
        // Greedy: repeatedly take the candidate reaching most other candidates.
        let mut cand = comp;
        let mut order = Vec::new();
        while cand != 0 {
            let u = bits(cand).max_by_key(|&u| (net.out_mask(u) & cand).count_ones()).unwrap();
            order.push(u);
            cand = net.out_mask(u) & cand & !(1 << u);
        }
        (order.len(), order)
    }
}

fn h1_upper(net: &Network, comp: u64) -> (Rational, String) {
    let n = comp.count_ones() as usize;
    if n == 1 {
        return (Rational::one(), "single user".into());
    }
    let (m, order) = longest_decode_chain(net, comp);
    let tag = match classify_mask(net, comp) {
        TopologyClass::FullyConnected { .. } if m == n => "fully-connected".to_string(),
        TopologyClass::DToMany { .. } => "d-to-many genie".to_string(),
        TopologyClass::ManyToD { .. } => "many-to-d genie".to_string(),
        _ if m == 2 => "Z-pair".to_string(),
        _ => format!("decode-chain {:?}", order.iter().map(|u| u + 1).collect::<Vec<_>>()),
    };
    (Rational::new(1, m as i64), tag)
}

/// Precomputed hop distances in the full network for view-preservation
/// checks.
struct Views {
    dist: BTreeMap<Node, BTreeMap<Link, u32>>,
}

impl Views {
    fn new(net: &Network, comp: u64) -> Self {
        let mut dist = BTreeMap::new();
        for u in bits(comp) {
            for node in [Node::tx(u), Node::rx(u)] {
                dist.insert(node, edge_hop_distances(net, node).expect("valid node"));
            }
        }
        Views { dist }
    }

    /// True when no node of `users` learns more about the embedded links
    /// `(users, edges)` from the full network than it would inside the
    /// embedded network alone, so the embedded outer bound carries over.
    fn preserved(&self, k: usize, users: u64, edges: &[(usize, usize)], h: u32) -> bool {
        let sub = Network::new(k, edges.iter().copied()).expect("embedded edges are valid");
        for u in bits(users) {
            for node in [Node::tx(u), Node::rx(u)] {
                let radius = if node.role == Role::Tx { h } else { h + 1 };
                let inside = edge_hop_distances(&sub, node).expect("valid node");
                let full = &self.dist[&node];
                for (link, d_sub) in &inside {
                    if users >> link.tx & 1 == 0 {
                        continue;
                    }
                    if *d_sub > radius && full[link] <= radius {
                        return false;
                    }
                }
            }
        }
        true
    }
}

fn cross_within(net: &Network, users: u64) -> Vec<(usize, usize)> {
    net.cross().iter().copied().filter(|&(i, j)| users >> i & 1 == 1 && users >> j & 1 == 1).collect()
}

fn h2_upper(net: &Network, comp: u64) -> (Rational, String, bool) {
    let k = net.users();
    let n = comp.count_ones() as usize;
    let views = Views::new(net, comp);
    let mut best = (Rational::one(), "no embedded obstruction".to_string());
    let consider = |v: Rational, tag: String, best: &mut (Rational, String)| {
        if v < best.0 {
            *best = (v, tag);
        }
    };
    let members: Vec<usize> = bits(comp).collect();
    let exhaustive = n <= EXHAUSTIVE_CAP;
    let subsets: Vec<u64> = if exhaustive {
        (1u64..1 << n).map(|s| bits(s).fold(0u64, |m, b| m | 1 << members[b])).filter(|m| m.count_ones() >= 3).collect()
    } else {
        let mut v: Vec<u64> = Vec::new();
        for a in 0..n {
            for b in a + 1..n {
                for c in b + 1..n {
                    v.push(1 << members[a] | 1 << members[b] | 1 << members[c]);
                }
            }
        }
        v.push(comp);
        v
    };
    for s in subsets {
        let size = s.count_ones() as usize;
        let inner = cross_within(net, s);
        let label = |name: &str| format!("{name} on {:?}", bits(s).map(|u| u + 1).collect::<Vec<_>>());
        if size == 3 {
            // Every sub-pattern of the induced links, by canonical class.
            let m: Vec<usize> = bits(s).collect();
            for sub in 0u32..(1 << inner.len()) {
                let edges: Vec<(usize, usize)> =
                    inner.iter().enumerate().filter(|(b, _)| sub >> b & 1 == 1).map(|(_, &e)| e).collect();
                let emb = Network::new(k, edges.iter().copied()).unwrap();
                let vals = three_user_values(three_user_index_of(&emb, &m));
                if vals.h2_upper < best.0 && views.preserved(k, s, &edges, 2) {
                    consider(vals.h2_upper, label(&format!("three-user ({})", vals.letter)), &mut best);
                }
            }
        }
        if size >= 3 {
            // d-to-many with d = size - 1: all but one user reach everyone.
            for x in bits(s) {
                let others = s & !(1 << x);
                if bits(others).all(|y| net.out_mask(y) & s == s & !(1 << y)) {
                    let d = size as i64 - 1;
                    let v = Rational::new(d, 2 * d - 1);
                    let edges: Vec<(usize, usize)> = inner.iter().copied().filter(|&(i, _)| i != x).collect();
                    if v < best.0 && views.preserved(k, s, &edges, 2) {
                        consider(v, label("d-to-many"), &mut best);
                    }
                }
            }
            // Many-to-one: one receiver hears every other transmitter.
            for x in bits(s) {
                if net.in_mask(x) & s == s & !(1 << x) {
                    let v = Rational::new(size as i64 - 1, 2 * size as i64 - 3);
                    let edges: Vec<(usize, usize)> = inner.iter().copied().filter(|&(_, j)| j == x).collect();
                    if v < best.0 && views.preserved(k, s, &edges, 2) {
                        consider(v, label("many-to-one"), &mut best);
                    }
                }
            }
        }
    }
    (best.0, best.1, exhaustive)
}

/// Genie-aided outer bound for `h` in {1, 2} on the component `comp`
/// (bitmask of users of `net`).
fn outer_bound_component(net: &Network, comp: u64, h: u32) -> (Rational, String, bool) {
    match h {
        1 => {
            let (v, tag) = h1_upper(net, comp);
            (v, tag, comp.count_ones() <= 20)
        }
        _ => h2_upper(net, comp),
    }
}

/// Outer bound on `alpha*(h)` for `h` in {1, 2}: the minimum over
/// components of the best embedded sub-network bound.
pub fn outer_bound_recipe(net: &Network, h: u32) -> Result<(Rational, String)> {
    if !(1..=2).contains(&h) {
        return Err(Error::InvalidNetwork(format!("outer-bound recipe covers h = 1, 2, got {h}")));
    }
    let mut best = (Rational::one(), "single user".to_string());
    for comp in components_of(net, net.all_users_mask()) {
        let (v, tag, _) = outer_bound_component(net, comp, h);
        if v < best.0 {
            best = (v, tag);
        }
    }
    Ok(best)
}

// ---------------------------------------------------------------------------
// Component dispatcher

fn users_of(comp: u64) -> Vec<usize> {
    bits(comp).map(|u| u + 1).collect()
}

fn alpha_component(net: &Network, comp: u64, h: u32, opts: &AlphaOptions) -> Result<AlphaResult> {
    let members: Vec<usize> = bits(comp).collect();
    let who = users_of(comp);
    let sub = net.induced(&members);
    let diam = diameter(&sub);
    if h >= diam {
        return Ok(AlphaResult::point(Rational::one(), "global view", who));
    }
    let mut acc = Acc { lower: Rational::zero(), upper: Rational::one(), prov: Vec::new(), who: who.clone() };
    let mut warnings = Vec::new();
    if h > 3 {
        // Only the diameter rule is known beyond three hops.
        let prev = alpha_component(net, comp, 3, opts)?;
        acc.add(BoundKind::Upper, Rational::one(), "trivial".into());
        acc.add(BoundKind::Lower, prev.lower.clone(), "h=3 bound".into());
        return Ok(AlphaResult {
            exact: acc.lower == acc.upper,
            lower: acc.lower,
            upper: acc.upper,
            provenance: acc.prov,
            warnings: prev.warnings,
        });
    }

    // Upper bounds.
    match h {
        1 | 2 => {
            let (v, tag, exhaustive) = outer_bound_component(net, comp, h);
            if !exhaustive {
                warnings.push(format!("outer bound on users {who:?} searched a restricted embedding family"));
            }
            acc.add(BoundKind::Upper, v, format!("outer bound: {tag}"));
        }
        _ => acc.add(BoundKind::Upper, Rational::one(), "trivial".into()),
    }

    // Lower bounds.
    let mig = optimize_mig(&sub, h, opts.exec)?;
    if !mig.exhaustive {
        warnings.push(format!("MIG enumeration on users {who:?} used the greedy fallback"));
    }
    if h == 3 {
        warnings.push("three-hop independence test is sufficient-only".into());
    }
    acc.add(BoundKind::Lower, mig.value.clone(), if mig.exhaustive { "MIG-LP".into() } else { "MIG-greedy".into() });
    if h > 1 {
        let prev = alpha_component(net, comp, h - 1, opts)?;
        acc.add(BoundKind::Lower, prev.lower.clone(), format!("h={} bound", h - 1));
        warnings.extend(prev.warnings.into_iter().filter(|w| !w.contains("three-hop")));
    }
    if h == 1 {
        if let TopologyClass::CyclicChain { users } = classify_mask(net, comp) {
            if users % 2 == 1 {
                let s = cyclic_chain_schedule(users)?;
                let field = Field::for_model(net.model());
                crate::coded_sets::certify(&s, &sub, field)?;
                acc.add(BoundKind::Lower, s.alpha(), "CS cyclic-chain".into());
            }
        }
        if acc.lower < acc.upper && members.len() <= opts.cs_users {
            let cs = search_best_cs(&sub.connectivity(), opts.cs_t_max, opts.cs_k_max, Some(&acc.upper), opts.exec)?;
            if !cs.exhaustive {
                warnings.push(format!("CS search on users {who:?} was not exhaustive"));
            }
            acc.add(BoundKind::Lower, cs.alpha, "CS-search".into());
        }
    }

    warnings.sort();
    warnings.dedup();
    assert!(acc.lower <= acc.upper, "lower bound {} exceeds upper bound {} on users {who:?}", acc.lower, acc.upper);
    Ok(AlphaResult {
        exact: acc.lower == acc.upper,
        lower: acc.lower,
        upper: acc.upper,
        provenance: acc.prov,
        warnings,
    })
}

struct Acc {
    lower: Rational,
    upper: Rational,
    prov: Vec<Provenance>,
    who: Vec<usize>,
}

impl Acc {
    fn add(&mut self, kind: BoundKind, v: Rational, source: String) {
        match kind {
            BoundKind::Lower => self.lower = self.lower.clone().max(v.clone()),
            BoundKind::Upper => self.upper = self.upper.clone().min(v.clone()),
        }
        self.prov.push(Provenance { kind, value: v, source, component: self.who.clone() });
    }
}

/// Bounds on the normalized sum-capacity `alpha*(h)`. Views beyond three
/// hops only gain the diameter rule.
pub fn alpha(net: &Network, h: u32, opts: &AlphaOptions) -> Result<AlphaResult> {
    check_h(h)?;
    let mut lower = Rational::one();
    let mut upper = Rational::one();
    let mut provenance = Vec::new();
    let mut warnings = Vec::new();
    for comp in components_of(net, net.all_users_mask()) {
        let r = alpha_component(net, comp, h, opts)?;
        lower = lower.min(r.lower);
        upper = upper.min(r.upper);
        provenance.extend(r.provenance);
        warnings.extend(r.warnings);
    }
    warnings.sort();
    warnings.dedup();
    Ok(AlphaResult { exact: lower == upper, lower, upper, provenance, warnings })
}

/// Binary symmetric-capacity bounds: CS search on the all-ones deterministic
/// model against the `h = 1` outer bound.
pub fn binary_symcap_bounds(net: &Network, opts: &AlphaOptions) -> Result<AlphaResult> {
    let binary = net.binary_model();
    let mut lower = Rational::one();
    let mut upper = Rational::one();
    let mut provenance = Vec::new();
    let mut warnings = Vec::new();
    for comp in components_of(net, net.all_users_mask()) {
        let who = users_of(comp);
        let members: Vec<usize> = bits(comp).collect();
        let sub = binary.induced(&members);
        let (up, tag, _) = outer_bound_component(net, comp, 1);
        let cs = search_best_cs(&sub, opts.cs_t_max, opts.cs_k_max, Some(&up), opts.exec)?;
        let mut lo = cs.alpha.clone();
        let mut lo_tag = "CS-search".to_string();
        if let TopologyClass::CyclicChain { users } = classify_mask(net, comp) {
            if users % 2 == 1 && Rational::new(1, 2) > lo {
                lo = Rational::new(1, 2);
                lo_tag = "CS cyclic-chain".into();
            }
        }
        if !cs.exhaustive {
            warnings.push(format!("CS search on users {who:?} was not exhaustive"));
        }
        provenance.push(Provenance {
            kind: BoundKind::Lower,
            value: lo.clone(),
            source: lo_tag,
            component: who.clone(),
        });
        provenance.push(Provenance {
            kind: BoundKind::Upper,
            value: up.clone(),
            source: format!("outer bound: {tag}"),
            component: who,
        });
        lower = lower.min(lo);
        upper = upper.min(up);
    }
    Ok(AlphaResult { exact: lower == upper, lower, upper, provenance, warnings })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub h: u32,
    pub result: AlphaResult,
}

/// Rows for `h = 1, 2, 3` below the diameter, stopping at the first exact 1,
/// followed by the global-view row `(diameter, 1)`.
pub fn alpha_curve(net: &Network, opts: &AlphaOptions) -> Result<Vec<CurvePoint>> {
    let diam = diameter(net);
    let mut rows = Vec::new();
    for h in 1..=3u32.min(diam.saturating_sub(1)) {
        let r = alpha(net, h, opts)?;
        if r.exact && r.lower.is_one() {
            break;
        }
        rows.push(CurvePoint { h, result: r });
    }
    rows.push(CurvePoint {
        h: diam.max(1),
        result: AlphaResult::point(Rational::one(), "global view", (1..=net.users()).collect()),
    });
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::topology::families::*;
    use crate::topology::three_user_network;

    fn r(p: i64, q: i64) -> Rational {
        Rational::new(p, q)
    }

    fn seq() -> AlphaOptions {
        AlphaOptions { exec: Execution::Sequential, ..AlphaOptions::default() }
    }

    #[test]
    fn examples() {
        let a = alpha(&chain(7), 1, &seq()).unwrap();
        assert!(a.exact && a.lower == r(1, 2), "{a}");
        let b = alpha(&d_to_many(3, 5), 2, &seq()).unwrap();
        assert!(b.exact && b.lower == r(3, 5), "{b}");
        let c = alpha(&fully_connected(4), 2, &seq()).unwrap();
        assert!(c.exact && c.lower.is_one());
        let g = alpha(&three_user_network('g').unwrap(), 2, &seq()).unwrap();
        assert_eq!((g.lower, g.upper), (r(2, 3), r(4, 5)));
    }

    #[test]
    fn recipe_examples() {
        assert_eq!(outer_bound_recipe(&chain(2), 1).unwrap().0, r(1, 2));
        assert_eq!(outer_bound_recipe(&three_user_network('h').unwrap(), 1).unwrap().0, r(1, 3));
        assert_eq!(outer_bound_recipe(&three_user_network('e').unwrap(), 2).unwrap().0, r(2, 3));
        assert_eq!(outer_bound_recipe(&many_to_d(1, 5), 2).unwrap().0, r(4, 7));
        assert!(outer_bound_recipe(&chain(3), 3).is_err());
    }

    #[test]
    fn symcap_examples() {
        for (net, v) in [(cyclic_chain(3), r(1, 2)), (fully_connected(4), r(1, 4)), (isolated(3), r(1, 1))] {
            let s = binary_symcap_bounds(&net, &seq()).unwrap();
            assert!(s.exact, "{s}");
            assert_eq!(s.lower, v);
        }
    }

    #[test]
    fn curves() {
        let c = alpha_curve(&d_to_many(4, 6), &seq()).unwrap();
        let pts: Vec<(u32, Rational)> = c.iter().map(|p| (p.h, p.result.lower.clone())).collect();
        assert_eq!(pts, vec![(1, r(1, 5)), (2, r(4, 7)), (4, r(1, 1))]);
        let iso = alpha_curve(&isolated(3), &seq()).unwrap();
        assert_eq!(iso.len(), 1);
        assert_eq!((iso[0].h, iso[0].result.lower.clone()), (1, r(1, 1)));
        let ch = alpha_curve(&chain(5), &seq()).unwrap();
        assert_eq!(ch[0].result.lower, r(1, 2));
        assert_eq!(ch[1].result.lower, r(2, 3));
        assert!(ch[1].result.exact);
    }

    #[test]
    fn three_user_classes() {
        for idx in 0..16 {
            let letter = three_user_letter(idx);
            let net = three_user_network(letter).unwrap();
            let vals = three_user_values(idx);
            let a1 = alpha(&net, 1, &seq()).unwrap();
            assert!(a1.exact && a1.lower == vals.alpha1, "{letter} h=1: {a1}");
            let a2 = alpha(&net, 2, &seq()).unwrap();
            assert_eq!(a2.upper, vals.h2_upper, "{letter} h=2: {a2}");
            assert_eq!(a2.exact, vals.h2_exact, "{letter} h=2: {a2}");
            let a3 = alpha(&net, 3, &seq()).unwrap();
            assert_eq!(a3.exact, letter != 'g', "{letter} h=3: {a3}");
        }
    }
}
