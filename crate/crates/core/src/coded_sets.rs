//! Coded-set (CS) scheduling.
//!
//! Over a frame of `t` slots every user sends `k` codewords, codeword `j` of
//! user `i` being repeated in each slot of `S_{i,j}`. Receiver `D_i` stacks the
//! footprints of its own codewords and of every interferer into a binary
//! constraint matrix `F_i`; it can isolate its own codewords exactly when the
//! unit targets `[I_k; 0]` lie in the column span of `F_i`. Over GF(2) this
//! certifies the deterministic model; over the reals the minimum-norm
//! coefficients also give the noise penalty `b_i` used for Gaussian rates.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::par::{map_slice, Execution};
use crate::rational::Rational;
use crate::scheduler::{optimize_mig, ScheduleMultiset};
use crate::topology::{Gains, Model, Network};

/// Largest user count for exhaustive CS search.
pub const CS_SEARCH_CAP: usize = 6;

/// Slot assignment `S_{i,j}` (0-based slots) for every user and codeword.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CodedSchedule {
    t: usize,
    k: usize,
    assign: Vec<Vec<BTreeSet<usize>>>,
}

impl CodedSchedule {
    /// `assign[i]` is either empty (user inactive) or `k` pairwise disjoint
    /// nonempty subsets of `0..t`.
    pub fn new(t: usize, k: usize, assign: Vec<Vec<BTreeSet<usize>>>) -> Result<Self> {
        if t == 0 || k == 0 {
            return Err(Error::InvalidSchedule("t and k must be positive".into()));
        }
        if t > 64 {
            return Err(Error::CapExceeded { what: "slot count", size: t, cap: 64 });
        }
        for (i, sets) in assign.iter().enumerate() {
            if sets.is_empty() {
                continue;
            }
            if sets.len() != k {
                return Err(Error::InvalidSchedule(format!(
                    "user {} has {} codewords, expected {k}",
                    i + 1,
                    sets.len()
                )));
            }
            let mut used = 0u64;
            for s in sets {
                if s.is_empty() {
                    return Err(Error::InvalidSchedule(format!("user {} has an empty codeword", i + 1)));
                }
                let m = slot_mask(s);
                if s.iter().any(|&l| l >= t) {
                    return Err(Error::InvalidSchedule(format!("user {} uses a slot beyond t = {t}", i + 1)));
                }
                if used & m != 0 {
                    return Err(Error::InvalidSchedule(format!("user {} reuses a slot for two codewords", i + 1)));
                }
                used |= m;
            }
        }
        Ok(CodedSchedule { t, k, assign })
    }

    pub fn t(&self) -> usize {
        self.t
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn users(&self) -> usize {
        self.assign.len()
    }

    pub fn assignment(&self, user: usize) -> &[BTreeSet<usize>] {
        &self.assign[user]
    }

    pub fn is_active(&self, user: usize) -> bool {
        !self.assign[user].is_empty()
    }

    /// Users transmitting in each slot.
    pub fn active_per_slot(&self) -> Vec<Vec<usize>> {
        let mut slots = vec![Vec::new(); self.t];
        for (i, sets) in self.assign.iter().enumerate() {
            for s in sets {
                for &l in s {
                    slots[l].push(i);
                }
            }
        }
        slots
    }

    /// `k/t` when every user is active, otherwise 0.
    pub fn alpha(&self) -> Rational {
        if self.assign.iter().all(|s| !s.is_empty()) {
            Rational::new(self.k as i64, self.t as i64)
        } else {
            Rational::zero()
        }
    }

    /// Plain time-sharing schedule: user `i` sends codeword `j` in the `j`-th
    /// slot it is active in, for `k = d` codewords.
    pub fn from_multiset(m: &ScheduleMultiset) -> Result<Self> {
        let d = m.d();
        if d == 0 {
            return Err(Error::InvalidSchedule("some user is never scheduled".into()));
        }
        let mut assign = vec![Vec::new(); m.users];
        for (l, slot) in m.slots.iter().enumerate() {
            for &u in slot {
                if assign[u].len() < d {
                    assign[u].push(BTreeSet::from([l]));
                }
            }
        }
        CodedSchedule::new(m.t(), d, assign)
    }

    pub fn to_document(&self) -> CodedScheduleDocument {
        let slots = self.active_per_slot().into_iter().map(|s| s.into_iter().map(|u| u + 1).collect()).collect();
        let assignments = self
            .assign
            .iter()
            .enumerate()
            .flat_map(|(i, sets)| {
                sets.iter().enumerate().map(move |(j, s)| Assignment {
                    user: i + 1,
                    codeword: j + 1,
                    slots: s.iter().map(|l| l + 1).collect(),
                })
            })
            .collect();
        CodedScheduleDocument { t: self.t, slots, value: self.alpha(), assignments: Some(assignments) }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Assignment {
    pub user: usize,
    pub codeword: usize,
    pub slots: Vec<usize>,
}

/// Schedule JSON with optional codeword assignments. Without assignments the
/// slots are read as a plain time-sharing multiset.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CodedScheduleDocument {
    pub t: usize,
    pub slots: Vec<Vec<usize>>,
    pub value: Rational,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub assignments: Option<Vec<Assignment>>,
}

impl CodedScheduleDocument {
    pub fn to_schedule(&self, users: usize) -> Result<CodedSchedule> {
        let sched = match &self.assignments {
            None => {
                let plain = crate::scheduler::ScheduleDocument {
                    t: self.t,
                    slots: self.slots.clone(),
                    value: self.value.clone(),
                };
                return CodedSchedule::from_multiset(&plain.to_multiset(users)?);
            }
            Some(list) => {
                let mut per_user: Vec<Vec<(usize, BTreeSet<usize>)>> = vec![Vec::new(); users];
                let mut k = 0;
                for a in list {
                    if a.user == 0 || a.user > users || a.codeword == 0 {
                        return Err(Error::InvalidSchedule(format!(
                            "assignment for user {} codeword {} is out of range",
                            a.user, a.codeword
                        )));
                    }
                    if a.slots.iter().any(|&l| l == 0 || l > self.t) {
                        return Err(Error::InvalidSchedule(format!(
                            "user {} codeword {} uses a slot outside 1..{}",
                            a.user, a.codeword, self.t
                        )));
                    }
                    k = k.max(a.codeword);
                    per_user[a.user - 1].push((a.codeword, a.slots.iter().map(|l| l - 1).collect()));
                }
                let mut assign = Vec::with_capacity(users);
                for (i, mut cws) in per_user.into_iter().enumerate() {
                    cws.sort_by_key(|(j, _)| *j);
                    if !cws.is_empty() && cws.iter().map(|(j, _)| *j).ne(1..=k) {
                        return Err(Error::InvalidSchedule(format!(
                            "user {} must list codewords 1..{k} exactly once",
                            i + 1
                        )));
                    }
                    assign.push(cws.into_iter().map(|(_, s)| s).collect());
                }
                CodedSchedule::new(self.t, k, assign)?
            }
        };
        let derived: Vec<Vec<usize>> =
            sched.active_per_slot().into_iter().map(|s| s.into_iter().map(|u| u + 1).collect()).collect();
        if derived != self.slots {
            return Err(Error::InvalidSchedule("slots disagree with the codeword assignments".into()));
        }
        if sched.alpha() != self.value {
            return Err(Error::InvalidSchedule(format!(
                "declared value {} but the schedule gives {}",
                self.value,
                sched.alpha()
            )));
        }
        Ok(sched)
    }
}

fn slot_mask(s: &BTreeSet<usize>) -> u64 {
    s.iter().fold(0, |m, &l| m | 1 << l)
}

// ---------------------------------------------------------------------------
// Constraint matrices

/// Footprint matrix seen by one receiver: `k` rows per transmitter block,
/// own transmitter first, then interferers in ascending order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConstraintMatrix {
    pub rx: usize,
    pub k: usize,
    pub t: usize,
    /// Transmitter of each `k`-row block.
    pub blocks: Vec<usize>,
    /// Row-major 0/1 entries, `k * blocks.len()` rows of width `t`.
    pub rows: Vec<Vec<u8>>,
}

impl ConstraintMatrix {
    fn row_masks(&self) -> Vec<u64> {
        self.rows.iter().map(|r| r.iter().enumerate().fold(0, |m, (l, &b)| m | (b as u64) << l)).collect()
    }
}

pub fn build_constraint_matrix(sched: &CodedSchedule, net: &Network, rx: usize) -> Result<ConstraintMatrix> {
    if sched.users() != net.users() {
        return Err(Error::InvalidSchedule(format!(
            "schedule covers {} users, network has {}",
            sched.users(),
            net.users()
        )));
    }
    if rx >= net.users() {
        return Err(Error::InvalidNetwork(format!("receiver {} does not exist", rx + 1)));
    }
    let mut blocks = vec![rx];
    blocks.extend(net.interferers(rx));
    let mut rows = Vec::with_capacity(blocks.len() * sched.k);
    for &tx in &blocks {
        let sets = sched.assignment(tx);
        for j in 0..sched.k {
            let mut row = vec![0u8; sched.t];
            if let Some(s) = sets.get(j) {
                for &l in s {
                    row[l] = 1;
                }
            }
            rows.push(row);
        }
    }
    Ok(ConstraintMatrix { rx, k: sched.k, t: sched.t, blocks, rows })
}

// ---------------------------------------------------------------------------
// Certificates

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Field {
    Gf2,
    Real,
}

impl Field {
    /// GF(2) for deterministic and connectivity networks, reals for Gaussian.
    pub fn for_model(model: Model) -> Field {
        match model {
            Model::Gaussian => Field::Real,
            _ => Field::Gf2,
        }
    }
}

/// Decoding coefficients for one receiver.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificate {
    pub rx: usize,
    pub field: Field,
    /// `coeffs[j][l]`: weight of slot `l` when recovering own codeword `j`.
    pub coeffs: Vec<Vec<Rational>>,
    /// Largest squared coefficient norm (real field only).
    pub penalty: Option<Rational>,
}

/// Solve `rows * a = rhs` over GF(2); `rows` are bitmasks over `t` columns.
fn solve_gf2(rows: &[u64], rhs: &[bool], t: usize) -> Option<u64> {
    let mut sys: Vec<(u64, bool)> = rows.iter().copied().zip(rhs.iter().copied()).collect();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..t {
        let Some(p) = (r..sys.len()).find(|&i| sys[i].0 >> c & 1 == 1) else {
            continue;
        };
        sys.swap(r, p);
        let (pr, pb) = sys[r];
        for (i, row) in sys.iter_mut().enumerate() {
            if i != r && row.0 >> c & 1 == 1 {
                row.0 ^= pr;
                row.1 ^= pb;
            }
        }
        pivots.push(c);
        r += 1;
    }
    if sys[r..].iter().any(|&(_, b)| b) {
        return None;
    }
    // Free variables are zero; each pivot row fixes its pivot column.
    Some(pivots.iter().enumerate().filter(|(i, _)| sys[*i].1).fold(0, |a, (_, &c)| a | 1 << c))
}

fn gf2_coeffs(masks: &[u64], k: usize, t: usize) -> Option<Vec<u64>> {
    (0..k)
        .map(|j| {
            let rhs: Vec<bool> = (0..masks.len()).map(|r| r == j).collect();
            solve_gf2(masks, &rhs, t)
        })
        .collect()
}

pub fn feasible_gf2(f: &ConstraintMatrix, k: usize) -> Option<Certificate> {
    assert_eq!(k, f.k, "k disagrees with the constraint matrix");
    let sol = gf2_coeffs(&f.row_masks(), k, f.t)?;
    Some(Certificate {
        rx: f.rx,
        field: Field::Gf2,
        coeffs: sol
            .into_iter()
            .map(|a| (0..f.t).map(|l| Rational::from_integer((a >> l & 1) as i64)).collect())
            .collect(),
        penalty: None,
    })
}

/// Indices of a maximal linearly independent subset of rows (reals).
fn independent_rows(rows: &[Vec<Rational>]) -> Vec<usize> {
    let mut basis: Vec<(usize, Vec<Rational>)> = Vec::new(); // (pivot col, reduced row)
    let mut keep = Vec::new();
    for (i, row) in rows.iter().enumerate() {
        let mut v = row.clone();
        for (pc, b) in &basis {
            if !v[*pc].is_zero() {
                let f = &v[*pc] / &b[*pc];
                for (x, y) in v.iter_mut().zip(b) {
                    *x = &*x - &(&f * y);
                }
            }
        }
        if let Some(pc) = v.iter().position(|x| !x.is_zero()) {
            basis.push((pc, v));
            keep.push(i);
        }
    }
    keep
}

/// Solve a nonsingular square system exactly.
fn solve_square(mut a: Vec<Vec<Rational>>, mut b: Vec<Rational>) -> Vec<Rational> {
    let n = b.len();
    for c in 0..n {
        let p = (c..n).find(|&i| !a[i][c].is_zero()).expect("nonsingular Gram matrix");
        a.swap(c, p);
        b.swap(c, p);
        let piv = a[c][c].clone();
        for x in a[c].iter_mut() {
            *x = &*x / &piv;
        }
        b[c] = &b[c] / &piv;
        for i in 0..n {
            if i != c && !a[i][c].is_zero() {
                let f = a[i][c].clone();
                let pivot_row = a[c].clone();
                for (x, p) in a[i].iter_mut().zip(&pivot_row) {
                    *x = &*x - &(&f * p);
                }
                b[i] = &b[i] - &(&f * &b[c]);
            }
        }
    }
    b
}

/// Minimum-norm real solution of `F a = target`, or `None` if inconsistent.
fn min_norm_solution(f: &[Vec<Rational>], target: &[Rational], keep: &[usize]) -> Option<Vec<Rational>> {
    let t = f.first().map_or(0, |r| r.len());
    let r: Vec<&Vec<Rational>> = keep.iter().map(|&i| &f[i]).collect();
    let gram: Vec<Vec<Rational>> =
        r.iter().map(|x| r.iter().map(|y| x.iter().zip(y.iter()).map(|(p, q)| p * q).sum()).collect()).collect();
    let z = solve_square(gram, keep.iter().map(|&i| target[i].clone()).collect());
    let a: Vec<Rational> = (0..t).map(|l| r.iter().zip(&z).map(|(row, zi)| &row[l] * zi).sum()).collect();
    let consistent =
        f.iter().zip(target).all(|(row, b)| row.iter().zip(&a).map(|(p, q)| p * q).sum::<Rational>() == *b);
    consistent.then_some(a)
}

pub fn feasible_real(f: &ConstraintMatrix, k: usize) -> Option<Certificate> {
    assert_eq!(k, f.k, "k disagrees with the constraint matrix");
    let rows: Vec<Vec<Rational>> =
        f.rows.iter().map(|r| r.iter().map(|&b| Rational::from_integer(b as i64)).collect()).collect();
    let keep = independent_rows(&rows);
    let mut coeffs = Vec::with_capacity(k);
    for j in 0..k {
        let target: Vec<Rational> =
            (0..rows.len()).map(|r| if r == j { Rational::one() } else { Rational::zero() }).collect();
        coeffs.push(min_norm_solution(&rows, &target, &keep)?);
    }
    let penalty = coeffs.iter().map(|a| a.iter().map(|x| x * x).sum::<Rational>()).max().unwrap_or_else(Rational::one);
    Some(Certificate { rx: f.rx, field: Field::Real, coeffs, penalty: Some(penalty) })
}

/// Certificate for one receiver under `field`. Receivers of inactive users
/// have nothing to decode and get an empty certificate.
pub fn certify_receiver(sched: &CodedSchedule, net: &Network, rx: usize, field: Field) -> Result<Option<Certificate>> {
    if !sched.is_active(rx) {
        return Ok(Some(Certificate {
            rx,
            field,
            coeffs: Vec::new(),
            penalty: (field == Field::Real).then(Rational::one),
        }));
    }
    let f = build_constraint_matrix(sched, net, rx)?;
    Ok(match field {
        Field::Gf2 => feasible_gf2(&f, sched.k()),
        Field::Real => feasible_real(&f, sched.k()),
    })
}

/// Certificates for every receiver, or the first failing receiver.
pub fn certify(sched: &CodedSchedule, net: &Network, field: Field) -> Result<Vec<Certificate>> {
    (0..net.users())
        .map(|rx| certify_receiver(sched, net, rx, field)?.ok_or(Error::Infeasible { receiver: rx + 1 }))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UserRate {
    pub user: usize,
    /// Symbolic per-channel-use rate.
    pub expression: String,
    /// Numeric value in bits when gains are known.
    pub bits: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CsValue {
    pub alpha: Rational,
    /// Upper bound on the constant rate loss in bits.
    pub tau_bound: f64,
    pub penalties: Vec<Rational>,
    pub rates: Vec<UserRate>,
    pub certificates: Vec<Certificate>,
}

/// Value of a CS schedule under `model`: `alpha = k/t`, the loss bound
/// `tau <= (k/t) sum log2 b_i` (zero for the deterministic model), and the
/// per-user rates.
pub fn cs_value(sched: &CodedSchedule, net: &Network, model: Model) -> Result<CsValue> {
    let field = Field::for_model(model);
    let certificates = certify(sched, net, field)?;
    let alpha = sched.alpha();
    let frac = alpha.to_f64();
    let penalties: Vec<Rational> =
        certificates.iter().map(|c| c.penalty.clone().unwrap_or_else(Rational::one)).collect();
    let tau_bound = match field {
        Field::Gf2 => 0.0,
        Field::Real => frac * penalties.iter().map(|b| b.to_f64().log2()).sum::<f64>(),
    };
    let rates = (0..net.users())
        .map(|i| {
            let (expression, bits) = match (model, net.gains()) {
                (Model::Gaussian, gains) => {
                    let b = &penalties[i];
                    let snr = match gains {
                        Gains::Gaussian { direct, .. } => Some(direct[i]),
                        _ => None,
                    };
                    (
                        format!("({alpha}) log2(1 + SNR_{}/{b})", i + 1),
                        snr.map(|s| frac * (1.0 + s / b.to_f64()).log2()),
                    )
                }
                (_, Gains::Deterministic { direct, .. }) => {
                    (format!("({alpha}) n_{0}{0}", i + 1), Some(frac * direct[i] as f64))
                }
                _ => (format!("({alpha}) n_{0}{0}", i + 1), None),
            };
            UserRate { user: i + 1, expression, bits }
        })
        .collect();
    Ok(CsValue { alpha, tau_bound, penalties, rates, certificates })
}

// ---------------------------------------------------------------------------
// Constructions and search

/// Two-slot schedule for an odd cyclic chain: odd users (1-based) in the
/// first slot, even users in the second, and user `K` repeating its codeword
/// in both. Receiver `D_1` recovers its codeword by differencing.
pub fn cyclic_chain_schedule(k_users: usize) -> Result<CodedSchedule> {
    if k_users == 0 || k_users.is_multiple_of(2) {
        return Err(Error::InvalidSchedule(format!(
            "cyclic-chain construction needs an odd user count, got {k_users}"
        )));
    }
    if k_users == 1 {
        return CodedSchedule::new(1, 1, vec![vec![BTreeSet::from([0])]]);
    }
    let assign = (0..k_users)
        .map(|i| {
            let s = if i == k_users - 1 { BTreeSet::from([0, 1]) } else { BTreeSet::from([i % 2]) };
            vec![s]
        })
        .collect();
    CodedSchedule::new(2, 1, assign)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CsSearch {
    pub schedule: CodedSchedule,
    pub alpha: Rational,
    pub exhaustive: bool,
}

/// Unordered families of `k` disjoint nonempty slot sets over `0..t`, as
/// sorted mask vectors.
fn codeword_families(t: usize, k: usize) -> Vec<Vec<u64>> {
    fn rec(t: usize, k: usize, used: u64, min: u64, acc: &mut Vec<u64>, out: &mut Vec<Vec<u64>>) {
        if acc.len() == k {
            out.push(acc.clone());
            return;
        }
        for m in min..(1u64 << t) {
            if m & used == 0 {
                acc.push(m);
                rec(t, k, used | m, m + 1, acc, out);
                acc.pop();
            }
        }
    }
    let mut out = Vec::new();
    rec(t, k, 0, 1, &mut Vec::new(), &mut out);
    out
}

/// Families for user 0 up to slot relabeling: consecutive blocks of
/// nondecreasing sizes.
fn canonical_first_families(t: usize, k: usize) -> Vec<Vec<u64>> {
    fn rec(t: usize, k: usize, start: usize, min_size: usize, acc: &mut Vec<u64>, out: &mut Vec<Vec<u64>>) {
        if acc.len() == k {
            out.push(acc.clone());
            return;
        }
        for size in min_size..=t.saturating_sub(start) {
            let m = ((1u64 << size) - 1) << start;
            acc.push(m);
            rec(t, k, start + size, size, acc, out);
            acc.pop();
        }
    }
    let mut out = Vec::new();
    rec(t, k, 0, 1, &mut Vec::new(), &mut out);
    out
}

struct Searcher<'a> {
    net: &'a Network,
    t: usize,
    k: usize,
    families: Vec<Vec<u64>>,
    /// Receivers whose block is complete once user `u` is assigned.
    check_after: Vec<Vec<usize>>,
}

impl Searcher<'_> {
    fn receiver_ok(&self, assign: &[Vec<u64>], rx: usize) -> bool {
        let mut masks: Vec<u64> = assign[rx].clone();
        for tx in self.net.interferers(rx) {
            masks.extend(assign[tx].iter().copied());
        }
        gf2_coeffs(&masks, self.k, self.t).is_some()
    }

    fn dfs(&self, assign: &mut Vec<Vec<u64>>) -> bool {
        let u = assign.len();
        if u == self.net.users() {
            let used = assign.iter().flatten().fold(0u64, |a, &m| a | m);
            return used == (1u64 << self.t) - 1;
        }
        for fam in &self.families {
            assign.push(fam.clone());
            if self.check_after[u].iter().all(|&rx| self.receiver_ok(assign, rx)) && self.dfs(assign) {
                return true;
            }
            assign.pop();
        }
        false
    }
}

fn search_tk(net: &Network, t: usize, k: usize, exec: Execution) -> Option<CodedSchedule> {
    let n = net.users();
    let mut check_after = vec![Vec::new(); n];
    for rx in 0..n {
        let last = net.interferers(rx).into_iter().chain([rx]).max().unwrap();
        check_after[last].push(rx);
    }
    let searcher = Searcher { net, t, k, families: codeword_families(t, k), check_after };
    let first = canonical_first_families(t, k);
    let found = map_slice(exec, &first, |fam| {
        let mut assign = vec![fam.clone()];
        if searcher.check_after[0].iter().all(|&rx| searcher.receiver_ok(&assign, rx)) && searcher.dfs(&mut assign) {
            Some(assign)
        } else {
            None
        }
    });
    let assign = found.into_iter().flatten().next()?;
    let sets = assign
        .into_iter()
        .map(|fam| fam.into_iter().map(|m| (0..t).filter(|l| m >> l & 1 == 1).collect()).collect())
        .collect();
    Some(CodedSchedule::new(t, k, sets).expect("search emits valid schedules"))
}

/// Best GF(2)-feasible CS schedule with `t <= t_max`, `k <= k_max`, never
/// worse than the maximal-independent-set schedule it starts from. The search
/// stops early once `stop_at` is reached. Exhaustive only for
/// `K <= CS_SEARCH_CAP`.
pub fn search_best_cs(
    net: &Network,
    t_max: usize,
    k_max: usize,
    stop_at: Option<&Rational>,
    exec: Execution,
) -> Result<CsSearch> {
    let mis = optimize_mig(net, 1, exec)?;
    let seed = CodedSchedule::from_multiset(&mis.schedule)?;
    let mut best =
        CsSearch { alpha: seed.alpha(), schedule: seed, exhaustive: mis.exhaustive && net.users() <= CS_SEARCH_CAP };
    if net.users() > CS_SEARCH_CAP || t_max > 16 {
        best.exhaustive = false;
        return Ok(best);
    }
    let mut candidates: Vec<(Rational, usize, usize)> = (1..=t_max)
        .flat_map(|t| (1..=k_max.min(t)).map(move |k| (Rational::new(k as i64, t as i64), t, k)))
        .filter(|(v, _, _)| *v > best.alpha && stop_at.is_none_or(|s| v <= s))
        .collect();
    candidates.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));
    for (value, t, k) in candidates {
        if let Some(s) = search_tk(net, t, k, exec) {
            best.schedule = s;
            best.alpha = value;
            break;
        }
    }
    Ok(best)
}
