//! The box-removal map `δ`, its inverse, and the bijection `Φ` between rigged
//! configurations and classically restricted paths.

use std::collections::BTreeSet;

use crate::cartan::{config_sizes, is_dominant, AffineType, Family};
use crate::crystal::{crystal, Letter, Path};
use crate::energy::HTable;
use crate::error::{Error, Result};
use crate::half::Half;
use crate::rc::{complement, Configuration, RString, RcRules, RiggedConfig};

const INF: Half = Half::INF;

/// Which branch the scan took at node `n` for the types with a quasi-singular rule.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NodeCase {
    Plain,
    S,
    Q,
    QS,
    P,
}

/// Everything `δ` decided on one rigged configuration.
#[derive(Clone, Debug)]
pub struct DeltaTrace {
    pub b: Letter,
    /// `ell[a]` for `a = 0..=n+1`, with `ell[0] = 0` and unused entries at infinity.
    pub ell: Vec<Half>,
    pub ell_bar: Vec<Half>,
    pub node_case: NodeCase,
    pub result: RiggedConfig,
}

/// One selected string: remove `(from, rig)`, then add a string of length `to`
/// whose rigging is the new vacancy number minus `offset`.
#[derive(Clone, Copy, Debug)]
struct Change {
    a: usize,
    from: Half,
    rig: Half,
    to: Half,
    offset: Half,
}

struct Scan<'a> {
    r: &'a RcRules,
    rc: &'a RiggedConfig,
    nu: Configuration,
    n: usize,
    ell: Vec<Half>,
    ell_bar: Vec<Half>,
    merged: Vec<bool>,
    node_case: NodeCase,
}

impl<'a> Scan<'a> {
    fn new(r: &'a RcRules, rc: &'a RiggedConfig) -> Scan<'a> {
        let n = r.ty.n;
        let mut ell = vec![INF; n + 2];
        ell[0] = Half::ZERO;
        Scan { r, rc, nu: rc.configuration(), n, ell, ell_bar: vec![INF; n + 2], merged: vec![false; n + 2], node_case: NodeCase::Plain }
    }

    fn p(&self, a: usize, i: Half) -> Half {
        self.r.vacancy(self.rc.len, &self.nu, a, i)
    }

    fn count_rig(&self, a: usize, i: Half, rig: Half) -> usize {
        self.rc.nu[a - 1].iter().filter(|s| s.len == i && s.rig == rig).count()
    }

    fn singular_count(&self, a: usize, i: Half) -> usize {
        self.count_rig(a, i, self.p(a, i))
    }

    fn singular(&self, a: usize, i: Half) -> bool {
        self.singular_count(a, i) > 0
    }

    /// Not singular but carrying a rigging one lattice step below the vacancy number.
    fn quasi(&self, a: usize, i: Half, step: Half) -> bool {
        !self.singular(a, i) && self.count_rig(a, i, self.p(a, i) - step) > 0
    }

    fn max_rig(&self, a: usize, i: Half) -> Half {
        self.rc.nu[a - 1].iter().filter(|s| s.len == i).map(|s| s.rig).max().expect("selected length present")
    }

    /// Distinct lengths at node `a`, ascending.
    fn lengths(&self, a: usize) -> Vec<Half> {
        let set: BTreeSet<Half> = self.rc.nu[a - 1].iter().map(|s| s.len).collect();
        set.into_iter().collect()
    }

    fn min_length(&self, a: usize, lower: Half, pred: impl Fn(Half) -> bool) -> Option<Half> {
        self.lengths(a).into_iter().find(|&i| i >= lower && pred(i))
    }

    fn min_singular(&self, a: usize, lower: Half) -> Option<Half> {
        self.min_length(a, lower, |i| self.singular(a, i))
    }

    /// Forward pass over `1..=top`; returns the node where no singular string was found.
    fn forward(&mut self, top: usize) -> Option<usize> {
        for a in 1..=top {
            match self.min_singular(a, self.ell[a - 1]) {
                None => return Some(a),
                Some(i) => self.ell[a] = i,
            }
        }
        None
    }

    /// Return pass where a string already taken needs a second singular copy.
    fn back_two_copies(&mut self, top: usize, lower_top: Half) -> Letter {
        for a in (1..=top).rev() {
            let lower = if a == top { lower_top } else { self.ell_bar[a + 1] };
            let found = self.min_length(a, lower, |i| self.singular_count(a, i) >= 1 + usize::from(i == self.ell[a]));
            match found {
                None => return Letter::Kbar(a + 1),
                Some(i) => self.ell_bar[a] = i,
            }
        }
        Letter::Kbar(1)
    }

    /// Return pass with the merge rule `ell[a] == ell_bar[a+1]`.
    fn back_merging(&mut self) -> Letter {
        for a in (1..self.n).rev() {
            if self.ell[a] == self.ell_bar[a + 1] {
                self.ell_bar[a] = self.ell[a];
                self.ell[a] = self.ell_bar[a] - Half::ONE;
                self.merged[a] = true;
            } else {
                match self.min_singular(a, self.ell_bar[a + 1]) {
                    None => return Letter::Kbar(a + 1),
                    Some(i) => self.ell_bar[a] = i,
                }
            }
        }
        Letter::Kbar(1)
    }

    fn plain(&self, a: usize, at: Half) -> Change {
        Change { a, from: at, rig: self.p(a, at), to: at - self.r.upsilon(a), offset: Half::ZERO }
    }

    fn run(&mut self) -> (Letter, Vec<Change>) {
        let n = self.n;
        let fam = self.r.ty.family;
        let b = match fam {
            Family::A1 => match self.forward(n) {
                Some(a) => Letter::K(a),
                None => Letter::K(n + 1),
            },
            Family::D1 => self.scan_d1(),
            Family::B1 => self.scan_b1(),
            Family::C1 | Family::A2 => match self.forward(n) {
                Some(a) => Letter::K(a),
                None if fam == Family::A2 && self.ell[n] == Half::ONE => Letter::Empty,
                None => {
                    self.ell_bar[n] = self.ell[n];
                    self.ell[n] = self.ell_bar[n] - Half::ONE;
                    self.merged[n] = true;
                    self.back_merging()
                }
            },
            Family::A2odd => match self.forward(n) {
                Some(a) => Letter::K(a),
                None => {
                    self.ell_bar[n] = self.ell[n];
                    self.back_two_copies(n - 1, self.ell_bar[n])
                }
            },
            Family::D2 | Family::A2dag => self.scan_quasi_tail(),
        };
        (b, self.changes())
    }

    fn scan_d1(&mut self) -> Letter {
        let n = self.n;
        if let Some(a) = self.forward(n - 2) {
            return Letter::K(a);
        }
        let lower = self.ell[n - 2];
        let i = self.min_singular(n - 1, lower);
        let j = self.min_singular(n, lower);
        match (i, j) {
            (None, None) => Letter::K(n - 1),
            (Some(i), None) => {
                self.ell[n - 1] = i;
                Letter::K(n)
            }
            (None, Some(j)) => {
                self.ell[n] = j;
                Letter::Kbar(n)
            }
            (Some(i), Some(j)) => {
                self.ell[n - 1] = i;
                self.ell[n] = j;
                self.back_two_copies(n - 2, i.max(j))
            }
        }
    }

    fn scan_b1(&mut self) -> Letter {
        let n = self.n;
        if let Some(a) = self.forward(n - 1) {
            return Letter::K(a);
        }
        let top = self.ell[n - 1];
        let s = |sc: &Scan, i: Half| i >= top && sc.singular(n, i);
        let q = |sc: &Scan, i: Half| (i == top - Half::HALF && sc.singular(n, i)) || (i >= top && sc.quasi(n, i, Half::ONE));
        let Some(i) = self.min_length(n, top - Half::HALF, |i| s(self, i) || q(self, i)) else {
            return Letter::K(n);
        };
        if s(self, i) {
            self.ell_bar[n] = i;
            self.ell[n] = i - Half::HALF;
            self.node_case = NodeCase::S;
        } else {
            self.ell[n] = i;
            match self.min_length(n, i + Half::HALF, |j| s(self, j)) {
                None => {
                    self.node_case = NodeCase::Q;
                    return Letter::Zero;
                }
                Some(j) => {
                    self.ell_bar[n] = j;
                    self.node_case = NodeCase::QS;
                }
            }
        }
        self.back_two_copies(n - 1, self.ell_bar[n])
    }

    fn scan_quasi_tail(&mut self) -> Letter {
        let n = self.n;
        let dagger = self.r.ty.family == Family::A2dag;
        if let Some(a) = self.forward(n - 1) {
            return Letter::K(a);
        }
        let even = |i: Half| i.to_int().is_some_and(|v| v % 2 == 0);
        let s = |sc: &Scan, i: Half| sc.singular(n, i) && if dagger { even(i) } else { i > Half::ONE };
        let q = |sc: &Scan, i: Half| {
            if dagger {
                !even(i) && sc.count_rig(n, i, sc.p(n, i) - Half::HALF) > 0
            } else {
                sc.quasi(n, i, Half::ONE)
            }
        };
        let pcase = |sc: &Scan, i: Half| !dagger && i == Half::ONE && sc.singular(n, i);
        let Some(i) = self.min_length(n, self.ell[n - 1], |i| s(self, i) || q(self, i) || pcase(self, i)) else {
            return Letter::K(n);
        };
        if pcase(self, i) {
            self.ell[n] = i;
            self.node_case = NodeCase::P;
            return Letter::Empty;
        }
        if s(self, i) {
            self.ell[n] = i - Half::ONE;
            self.ell_bar[n] = i;
            self.merged[n] = true;
            self.node_case = NodeCase::S;
        } else {
            self.ell[n] = i;
            match self.min_length(n, i + Half::HALF, |j| s(self, j)) {
                None => {
                    self.node_case = NodeCase::Q;
                    return Letter::Zero;
                }
                Some(j) => {
                    self.ell_bar[n] = j;
                    self.node_case = NodeCase::QS;
                }
            }
        }
        self.back_merging()
    }

    fn changes(&self) -> Vec<Change> {
        let n = self.n;
        let fam = self.r.ty.family;
        let mut out = Vec::new();
        for a in 1..=n {
            let (l, lb) = (self.ell[a], self.ell_bar[a]);
            let tail_node = a == n && matches!(fam, Family::B1 | Family::D2 | Family::A2dag);
            if tail_node && self.node_case != NodeCase::Plain && self.node_case != NodeCase::P {
                out.extend(self.tail_changes());
                continue;
            }
            if self.merged[a] && !lb.is_inf() {
                out.push(Change { a, from: lb, rig: self.p(a, lb), to: lb - Half::int(2), offset: Half::ZERO });
                continue;
            }
            if !l.is_inf() {
                out.push(self.plain(a, l));
            }
            let bar_moves = match fam {
                Family::D1 => a + 2 <= n,
                Family::A2odd => a < n,
                _ => true,
            };
            if bar_moves && !lb.is_inf() {
                out.push(self.plain(a, lb));
            }
        }
        out
    }

    fn tail_changes(&self) -> Vec<Change> {
        let n = self.n;
        let (l, lb) = (self.ell[n], self.ell_bar[n]);
        let z = Half::ZERO;
        match (self.r.ty.family, self.node_case) {
            (Family::B1, NodeCase::S) => vec![Change { a: n, from: lb, rig: self.p(n, lb), to: lb - Half::ONE, offset: z }],
            (Family::B1, NodeCase::Q) => vec![Change { a: n, from: l, rig: self.max_rig(n, l), to: l - Half::HALF, offset: z }],
            (Family::B1, NodeCase::QS) => {
                let off = if lb < self.ell_bar[n - 1] { Half::ONE } else { z };
                vec![
                    Change { a: n, from: l, rig: self.max_rig(n, l), to: l - Half::HALF, offset: z },
                    Change { a: n, from: lb, rig: self.max_rig(n, lb), to: lb - Half::HALF, offset: off },
                ]
            }
            (_, NodeCase::S) => vec![Change { a: n, from: lb, rig: self.p(n, lb), to: lb - Half::int(2), offset: z }],
            (fam, case) => {
                let step = if fam == Family::A2dag { Half::HALF } else { Half::ONE };
                let mut v = vec![Change { a: n, from: l, rig: self.p(n, l) - step, to: l - Half::ONE, offset: z }];
                if case == NodeCase::QS {
                    v.push(Change { a: n, from: lb, rig: self.p(n, lb), to: lb - Half::ONE, offset: step });
                }
                v
            }
        }
    }
}

fn shifted_weight(ty: &AffineType, lambda: &[i64], b: Letter, sign: i64) -> Vec<i64> {
    lambda.iter().zip(crystal(ty).wt(b)).map(|(x, y)| x + sign * y).collect()
}

fn apply_changes(r: &RcRules, rc: &RiggedConfig, b: Letter, changes: &[Change]) -> Result<RiggedConfig> {
    if rc.len == 0 {
        return Err(Error::Delta("empty rigged configuration has no letter to remove".into()));
    }
    let mut out = rc.clone();
    out.len -= 1;
    out.lambda = shifted_weight(&r.ty, &rc.lambda, b, -1);
    for c in changes {
        let strings = &mut out.nu[c.a - 1];
        let pos = strings
            .iter()
            .position(|s| s.len == c.from && s.rig == c.rig)
            .ok_or_else(|| Error::Delta(format!("no string of length {} with rigging {} at node {}", c.from, c.rig, c.a)))?;
        strings.remove(pos);
    }
    let mut nu = out.configuration();
    for c in changes {
        if c.to > Half::ZERO {
            nu.nu[c.a - 1].push(c.to);
        }
    }
    for c in changes {
        if c.to > Half::ZERO {
            let rig = r.vacancy(out.len, &nu, c.a, c.to) - c.offset;
            out.nu[c.a - 1].push(RString { len: c.to, rig });
        }
    }
    out.normalize();
    Ok(out)
}

/// `rk` and `δ` together with the selected lengths.
pub fn rank_and_delta(rc: &RiggedConfig) -> Result<DeltaTrace> {
    let r = RcRules::new(&rc.ty);
    let mut scan = Scan::new(&r, rc);
    let (b, changes) = scan.run();
    let result = apply_changes(&r, rc, b, &changes)?;
    Ok(DeltaTrace { b, ell: scan.ell, ell_bar: scan.ell_bar, node_case: scan.node_case, result })
}

/// `Φ`: ranks read off left to right.
pub fn phi(rc: &RiggedConfig) -> Result<Path> {
    let mut path = Vec::with_capacity(rc.len);
    let mut cur = rc.clone();
    while cur.len > 0 {
        let t = rank_and_delta(&cur)?;
        path.push(t.b);
        cur = t.result;
    }
    if !cur.is_empty() || cur.lambda.iter().any(|&x| x != 0) {
        return Err(Error::Delta(format!("ended at a nonempty configuration {cur}")));
    }
    Ok(path)
}

/// `Φ̃ = Φ ∘ comp`.
pub fn phi_tilde(rc: &RiggedConfig) -> Result<Path> {
    phi(&complement(rc))
}

/// Rebuild a rigged configuration from a path, rightmost factor first.
pub fn phi_inverse(ty: &AffineType, path: &[Letter]) -> Result<RiggedConfig> {
    crystal(ty).validate_path(path)?;
    let mut rc = RiggedConfig::empty(ty, 0, &vec![0; ty.weight_dim()]);
    for &b in path.iter().rev() {
        rc = delta_inverse(&rc, b)?;
    }
    Ok(rc)
}

pub fn phi_tilde_inverse(ty: &AffineType, path: &[Letter]) -> Result<RiggedConfig> {
    Ok(complement(&phi_inverse(ty, path)?))
}

/// Target weight and box counts for undoing `δ` with letter `b`.
fn inverse_frame(small: &RiggedConfig, b: Letter) -> Result<(Vec<i64>, Vec<i64>)> {
    let ty = small.ty;
    let cr = crystal(&ty);
    if !cr.contains(b) {
        return Err(Error::InvalidLetter(b.to_string()));
    }
    let lambda = shifted_weight(&ty, &small.lambda, b, 1);
    if !is_dominant(&ty, &lambda)? || !cr.can_prepend(&lambda, b) {
        return Err(Error::NoPreimage(format!("{b} cannot be prepended over weight {:?}", small.lambda)));
    }
    let r = RcRules::new(&ty);
    let sizes = config_sizes(&ty, &lambda, small.len + 1)?
        .ok_or_else(|| Error::NoPreimage(format!("weight {lambda:?} has no configurations")))?;
    let small_nu = small.configuration();
    let mut boxes = Vec::with_capacity(ty.n);
    for a in 1..=ty.n {
        let diff = sizes[a - 1] - small_nu.size(a);
        match diff.div_exact(r.upsilon(a)) {
            Some(k) if k >= 0 => boxes.push(k),
            _ => return Err(Error::NoPreimage(format!("node {a} would lose boxes"))),
        }
    }
    Ok((lambda, boxes))
}

/// One node's candidates: strings kept as they are, plus lengths whose riggings are still open.
type NodeCandidate = (Vec<RString>, Vec<Half>);

fn node_candidates(strings: &[RString], k: i64, u: Half) -> Vec<NodeCandidate> {
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for parts in crate::rc::partitions(k) {
        let mut chosen = Vec::new();
        assign_parts(strings, &parts, 0, &mut chosen, u, &mut |kept, open| {
            let mut kept = kept;
            let mut open = open;
            kept.sort_unstable();
            open.sort_unstable();
            if seen.insert((kept.clone(), open.clone())) {
                out.push((kept, open));
            }
        });
    }
    if k == 0 {
        out.push((strings.to_vec(), Vec::new()));
    }
    out
}

/// Attach each part to a distinct existing string, or to a fresh string of length zero.
fn assign_parts(
    strings: &[RString],
    parts: &[i64],
    k: usize,
    chosen: &mut Vec<Option<usize>>,
    u: Half,
    emit: &mut dyn FnMut(Vec<RString>, Vec<Half>),
) {
    if k == parts.len() {
        let mut kept = Vec::new();
        for (idx, s) in strings.iter().enumerate() {
            if !chosen.contains(&Some(idx)) {
                kept.push(*s);
            }
        }
        let open = chosen
            .iter()
            .zip(parts)
            .map(|(c, &d)| c.map_or(Half::ZERO, |idx| strings[idx].len) + u * d)
            .collect();
        emit(kept, open);
        return;
    }
    for target in strings.iter().enumerate().map(|(i, _)| Some(i)).chain(std::iter::once(None)) {
        if target.is_some() && chosen.contains(&target) {
            continue;
        }
        chosen.push(target);
        assign_parts(strings, parts, k + 1, chosen, u, emit);
        chosen.pop();
    }
}

/// Preimages of `(small, b)` under `δ`, found by lengthening a few strings of `small`.
pub fn delta_inverse_candidates(small: &RiggedConfig, b: Letter) -> Result<Vec<RiggedConfig>> {
    let ty = small.ty;
    let r = RcRules::new(&ty);
    let (lambda, boxes) = inverse_frame(small, b)?;
    let len = small.len + 1;
    let per_node: Vec<Vec<NodeCandidate>> =
        (1..=ty.n).map(|a| node_candidates(&small.nu[a - 1], boxes[a - 1], r.upsilon(a))).collect();
    let mut found: Vec<RiggedConfig> = Vec::new();
    let mut pick = vec![0usize; ty.n];
    loop {
        let mut nu = Configuration::empty(ty.n);
        for a in 1..=ty.n {
            let (kept, open) = &per_node[a - 1][pick[a - 1]];
            nu.nu[a - 1] = kept.iter().map(|s| s.len).chain(open.iter().copied()).collect();
        }
        if r.is_admissible(len, &nu) {
            let mut slots: Vec<(usize, Half, Vec<Half>)> = Vec::new();
            for a in 1..=ty.n {
                for &i in &per_node[a - 1][pick[a - 1]].1 {
                    let p = r.vacancy(len, &nu, a, i);
                    let range = r.rigging_range(a, i, p);
                    let opts: Vec<Half> =
                        [p, p - Half::HALF, p - Half::ONE].into_iter().filter(|x| range.contains(x)).collect();
                    slots.push((a, i, opts));
                }
            }
            let mut base = RiggedConfig::empty(&ty, len, &lambda);
            for a in 1..=ty.n {
                base.nu[a - 1] = per_node[a - 1][pick[a - 1]].0.clone();
            }
            let mut idx = vec![0usize; slots.len()];
            'rig: loop {
                if slots.iter().all(|s| !s.2.is_empty()) {
                    let mut cand = base.clone();
                    for (k, (a, i, opts)) in slots.iter().enumerate() {
                        cand.nu[a - 1].push(RString { len: *i, rig: opts[idx[k]] });
                    }
                    cand.normalize();
                    if !found.contains(&cand) && r.validate(&cand).is_ok() {
                        if let Ok(t) = rank_and_delta(&cand) {
                            if t.b == b && t.result == *small {
                                found.push(cand);
                            }
                        }
                    }
                } else {
                    break 'rig;
                }
                let mut k = 0;
                loop {
                    if k == slots.len() {
                        break 'rig;
                    }
                    idx[k] += 1;
                    if idx[k] < slots[k].2.len() {
                        break;
                    }
                    idx[k] = 0;
                    k += 1;
                }
            }
        }
        let mut a = 0;
        loop {
            if a == ty.n {
                return Ok(found);
            }
            pick[a] += 1;
            if pick[a] < per_node[a].len() {
                break;
            }
            pick[a] = 0;
            a += 1;
        }
    }
}

/// `δ^{-1}`: the unique rigged configuration of rank `b` mapping to `small`.
pub fn delta_inverse(small: &RiggedConfig, b: Letter) -> Result<RiggedConfig> {
    if small.ty.family == Family::A1 {
        return delta_inverse_type_a(small, b);
    }
    let mut found = delta_inverse_candidates(small, b)?;
    match found.len() {
        1 => Ok(found.pop().unwrap()),
        0 => Err(Error::NoPreimage(format!("{b} over {small}"))),
        k => Err(Error::Delta(format!("{k} preimages for {b} over {small}"))),
    }
}

/// Brute-force preimages: every element of the larger set whose `δ` lands on `small` with rank `b`.
pub fn delta_inverse_brute(small: &RiggedConfig, b: Letter) -> Result<Vec<RiggedConfig>> {
    let (lambda, _) = inverse_frame(small, b)?;
    let r = RcRules::new(&small.ty);
    let mut out = Vec::new();
    for rc in r.enumerate(&lambda, small.len + 1)? {
        let t = rank_and_delta(&rc)?;
        if t.b == b && t.result == *small {
            out.push(rc);
        }
    }
    Ok(out)
}

/// Reverse scan for `A_n^(1)`: from node `k-1` down, lengthen the longest singular
/// string that still fits under the previous choice.
pub fn delta_inverse_type_a(small: &RiggedConfig, b: Letter) -> Result<RiggedConfig> {
    let ty = small.ty;
    let (lambda, _) = inverse_frame(small, b)?;
    let Letter::K(k) = b else { return Err(Error::InvalidLetter(b.to_string())) };
    let r = RcRules::new(&ty);
    let nu = small.configuration();
    let mut out = small.clone();
    out.len += 1;
    out.lambda = lambda;
    let mut bound = INF;
    let mut grown: Vec<(usize, Half)> = Vec::new();
    for a in (1..k).rev() {
        let best = small.nu[a - 1]
            .iter()
            .filter(|s| s.len < bound && s.rig == r.vacancy(small.len, &nu, a, s.len))
            .map(|s| s.len)
            .max();
        let from = best.unwrap_or(Half::ZERO);
        if let Some(len) = best {
            let strings = &mut out.nu[a - 1];
            let pos = strings.iter().position(|s| s.len == len && s.rig == r.vacancy(small.len, &nu, a, len)).unwrap();
            strings.remove(pos);
        }
        grown.push((a, from + Half::ONE));
        bound = from + Half::ONE;
    }
    let mut big = out.configuration();
    for &(a, i) in &grown {
        big.nu[a - 1].push(i);
    }
    for &(a, i) in &grown {
        let rig = r.vacancy(out.len, &big, a, i);
        out.nu[a - 1].push(RString { len: i, rig });
    }
    out.normalize();
    r.validate(&out).map_err(|e| Error::NoPreimage(e.to_string()))?;
    Ok(out)
}

/// `P̃` predicted from the selected lengths.
pub fn predicted_vacancy_change(ty: &AffineType, t: &DeltaTrace, a: usize, i: Half) -> Half {
    let n = ty.n;
    let le = |x: Half| i64::from(x <= i);
    let l = |b: usize| if b > n { 0 } else { le(t.ell[b]) };
    let lb = |b: usize| if b == 0 || b > n { 0 } else { le(t.ell_bar[b]) };
    let regular = -l(a - 1) + 2 * l(a) - l(a + 1) - lb(a - 1) + 2 * lb(a) - lb(a + 1);
    let half = |x: Half| le(x - Half::HALF);
    let v = match ty.family {
        Family::A1 => -l(a - 1) + 2 * l(a) - l(a + 1),
        Family::D1 => {
            if a + 2 < n {
                regular
            } else if a + 2 == n {
                -l(a - 1) + 2 * l(a) - l(n - 1) - lb(a - 1) + 2 * lb(a) - l(n)
            } else {
                -l(n - 2) - lb(n - 2) + 2 * l(a)
            }
        }
        Family::B1 if a == n => {
            -half(t.ell[n - 1]) - l(n - 1) + 2 * l(n) - half(t.ell_bar[n - 1]) - lb(n - 1) + 2 * lb(n)
        }
        Family::C1 | Family::A2 | Family::A2dag if a == n => -l(n - 1) - lb(n - 1) + l(n) + lb(n),
        Family::A2odd if a == n => -l(n - 1) + 2 * l(n) - lb(n - 1),
        Family::D2 if a == n => 2 * (-l(n - 1) + l(n) - lb(n - 1) + lb(n)),
        _ => regular,
    };
    Half::int(v)
}

/// Failures of the vacancy-change formulas on one step, as readable strings.
pub fn vacancy_change_failures(rc: &RiggedConfig, t: &DeltaTrace) -> Vec<String> {
    let r = RcRules::new(&rc.ty);
    let before = rc.configuration();
    let after = t.result.configuration();
    let mut out = Vec::new();
    for a in 1..=rc.ty.n {
        let u = r.upsilon(a);
        let stop = r.stable_length(&before, a).max(r.stable_length(&after, a));
        let mut i = u;
        while i <= stop {
            let got = r.vacancy(t.result.len, &after, a, i);
            let want = r.vacancy(rc.len, &before, a, i) + predicted_vacancy_change(&rc.ty, t, a, i);
            if got != want {
                out.push(format!("{} {rc}: a={a} i={i} got {got} predicted {want}", rc.ty));
            }
            i += u;
        }
    }
    out
}

/// Coefficient of the first column length in `Δcc`: `t_1^∨ / a_0^∨`, except
/// for the dagger type, whose statistic is normalized so that the factor is 1.
pub fn delta_cc_scale(r: &RcRules) -> Half {
    if r.ty.family == Family::A2dag {
        Half::ONE
    } else {
        Half(r.kd.t_vee(1).doubled() / r.kd.a_vee[0])
    }
}

/// Checks the one-step statistic identities on `rc` (which needs `L >= 1`);
/// returns `(Δcc ok, Δ²cc ok)` where the second is `None` for `L = 1`.
pub fn statistic_steps(rc: &RiggedConfig, h: &HTable) -> Result<(bool, Option<bool>)> {
    let r = RcRules::new(&rc.ty);
    let scale = delta_cc_scale(&r);
    let comp = complement(rc);
    let t = rank_and_delta(&comp)?;
    let delta_prime = complement(&t.result);
    let alpha = rc.nu[0].len() as i64;
    let phi_l = i64::from(t.b == Letter::Empty);
    let dcc = r.cc_total(rc) - r.cc_total(&delta_prime);
    let first = dcc == scale * alpha - Half::int(phi_l);
    if rc.len < 2 {
        return Ok((first, None));
    }
    let next = rank_and_delta(&t.result)?;
    let alpha_t = t.result.nu[0].len() as i64;
    let phi_next = i64::from(next.b == Letter::Empty);
    let rhs = scale * (alpha - alpha_t) - Half::int(phi_l) + Half::int(phi_next);
    Ok((first, Some(Half::int(h.get_bar(t.b, next.b)) == rhs)))
}

/// `H̄(b_L ⊗ b_{L-1})` from the selected lengths of two consecutive steps.
/// `first` is `δ` on `comp(rc)`, `next` is `δ` on its output.
pub fn h_bar_from_lengths(ty: &AffineType, first: &DeltaTrace, next: &DeltaTrace) -> i64 {
    let one = |x: Half| i64::from(x == Half::ONE);
    let phi_step = |t: &DeltaTrace| i64::from(t.b == Letter::Empty);
    match ty.family {
        Family::A1 => one(first.ell[1]),
        Family::D1 | Family::B1 | Family::A2odd => one(first.ell[1]) + one(first.ell_bar[1]),
        Family::C1 | Family::A2dag => one(first.ell[1]),
        Family::A2 | Family::D2 => 2 * one(first.ell[1]) - phi_step(first) + phi_step(next),
    }
}

/// All one-step identities for the step `δ' = comp ∘ δ ∘ comp` on `rc`:
/// vacancy changes, `Δcc`, and for `L >= 2` the `H̄` difference both from the
/// table and from the selected lengths. `Err` carries the first failure.
pub fn verify_delta_identities(rc: &RiggedConfig, h: &HTable) -> std::result::Result<(), String> {
    if rc.len == 0 {
        return Ok(());
    }
    let comp = complement(rc);
    let t = rank_and_delta(&comp).map_err(|e| e.to_string())?;
    if let Some(f) = vacancy_change_failures(&comp, &t).into_iter().next() {
        return Err(format!("vacancy change: {f}"));
    }
    let (dcc, d2) = statistic_steps(rc, h).map_err(|e| e.to_string())?;
    if !dcc {
        return Err(format!("{} {rc}: Δcc", rc.ty));
    }
    if d2 == Some(false) {
        return Err(format!("{} {rc}: Δ²cc against H̄", rc.ty));
    }
    if rc.len >= 2 {
        let next = rank_and_delta(&t.result).map_err(|e| e.to_string())?;
        if h_bar_from_lengths(&rc.ty, &t, &next) != h.get_bar(t.b, next.b) {
            return Err(format!("{} {rc}: H̄ from selected lengths", rc.ty));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::energy::Energy;
    use Letter::{Empty, Kbar, K};

    fn types() -> Vec<AffineType> {
        let mut v = Vec::new();
        for f in Family::ALL {
            for n in f.min_rank()..=f.min_rank() + 1 {
                v.push(AffineType::new(f, n).unwrap());
            }
        }
        v
    }

    fn cells(ty: &AffineType, max_len: usize) -> Vec<(Vec<i64>, usize)> {
        let mut out = Vec::new();
        for len in 0..=max_len {
            for lambda in crystal(ty).dominant_weights(len) {
                out.push((lambda, len));
            }
        }
        out
    }

    fn rc_from(ty: &AffineType, len: usize, lambda: &[i64], nu: &[&[(i64, i64)]]) -> RiggedConfig {
        let mut rc = RiggedConfig::empty(ty, len, lambda);
        for (a, strings) in nu.iter().enumerate() {
            rc.nu[a] = strings.iter().map(|&(l2, r2)| RString { len: Half(l2), rig: Half(r2) }).collect();
        }
        rc.normalize();
        rc
    }

    #[test]
    fn empty_configuration_gives_letter_one() {
        for ty in types() {
            let mut lambda = vec![0; ty.weight_dim()];
            lambda[0] = 2;
            let rc = RiggedConfig::empty(&ty, 2, &lambda);
            let t = rank_and_delta(&rc).unwrap();
            assert_eq!(t.b, K(1));
            assert!(t.result.is_empty());
            assert!(t.ell[1..].iter().chain(&t.ell_bar).all(|x| x.is_inf()));
            assert_eq!(phi(&rc).unwrap(), vec![K(1), K(1)]);
        }
    }

    #[test]
    fn a2_single_string_is_phi() {
        let ty = AffineType::new(Family::A2, 1).unwrap();
        let rc = rc_from(&ty, 1, &[0], &[&[(2, 0)]]);
        let t = rank_and_delta(&rc).unwrap();
        assert_eq!(t.b, Empty);
        assert!(t.result.is_empty());
        assert_eq!(phi(&rc).unwrap(), vec![Empty]);
        let small = RiggedConfig::empty(&ty, 0, &[0]);
        assert_eq!(delta_inverse(&small, Empty).unwrap(), rc);
        let h = Energy::new(&ty).unwrap().h;
        // Δcc = 2·1 − 1
        assert_eq!(statistic_steps(&rc, &h).unwrap(), (true, None));
        assert_eq!(RcRules::new(&ty).cc_total(&rc), Half::ONE);
    }

    #[test]
    fn inverse_of_trivial_step() {
        for ty in types() {
            let small = RiggedConfig::empty(&ty, 0, &vec![0; ty.weight_dim()]);
            let big = delta_inverse(&small, K(1)).unwrap();
            assert!(big.is_empty());
            assert_eq!(big.len, 1);
            assert_eq!(big.lambda[0], 1);
        }
    }

    #[test]
    fn c2_merge_step() {
        let ty = AffineType::new(Family::C1, 2).unwrap();
        let rc = rc_from(&ty, 3, &[1, 0], &[&[(4, 2)], &[(4, 0)]]);
        let t = rank_and_delta(&rc).unwrap();
        assert_eq!(t.b, Kbar(1));
        assert_eq!(&t.ell[1..3], &[Half::ONE, Half::ONE]);
        assert_eq!(&t.ell_bar[1..3], &[Half::int(2), Half::int(2)]);
        assert_eq!(t.result, RiggedConfig::empty(&ty, 2, &[2, 0]));
        assert_eq!(phi(&rc).unwrap(), vec![Kbar(1), K(1), K(1)]);
    }

    #[test]
    fn exhaustive_small_cells() {
        for ty in types() {
            let r = RcRules::new(&ty);
            let en = Energy::new(&ty).unwrap();
            let cr = crystal(&ty);
            for (lambda, len) in cells(&ty, 3) {
                let rcs = r.enumerate(&lambda, len).unwrap();
                let mut paths = cr.enumerate_highest(&lambda, len).unwrap();
                let mut images: Vec<Path> = rcs.iter().map(|rc| phi(rc).unwrap()).collect();
                images.sort();
                paths.sort();
                assert_eq!(images, paths, "{ty} {lambda:?} L={len}");
                for rc in &rcs {
                    let pt = phi_tilde(rc).unwrap();
                    assert_eq!(r.cc_total(rc), Half::int(en.d_bar(&pt)), "{ty} {rc}");
                    assert_eq!(&phi_inverse(&ty, &phi(rc).unwrap()).unwrap(), rc);
                    assert_eq!(&phi_tilde_inverse(&ty, &pt).unwrap(), rc);
                    if len == 0 {
                        continue;
                    }
                    let t = rank_and_delta(rc).unwrap();
                    let rho = &t.result.lambda;
                    assert!(is_dominant(&ty, rho).unwrap());
                    if t.b == Letter::Zero {
                        assert!(lambda[ty.n - 1] > 0);
                    }
                    r.validate(&t.result).unwrap();
                    assert!(vacancy_change_failures(rc, &t).is_empty(), "{:?}", vacancy_change_failures(rc, &t));
                    let (d1, d2) = statistic_steps(rc, &en.h).unwrap();
                    assert!(d1 && d2 != Some(false), "{ty} {rc}");
                    assert_eq!(verify_delta_identities(rc, &en.h), Ok(()));
                    assert_eq!(delta_inverse_brute(&t.result, t.b).unwrap(), vec![rc.clone()]);
                    assert_eq!(delta_inverse_candidates(&t.result, t.b).unwrap(), vec![rc.clone()]);
                    if len >= 2 {
                        let c = complement(rc);
                        let t1 = rank_and_delta(&c).unwrap();
                        let t2 = rank_and_delta(&t1.result).unwrap();
                        assert_eq!(h_bar_from_lengths(&ty, &t1, &t2), en.h.get_bar(t1.b, t2.b), "{ty} {rc}");
                    }
                }
            }
        }
    }

    #[test]
    fn trace_is_monotone() {
        for ty in types() {
            let r = RcRules::new(&ty);
            for (lambda, len) in cells(&ty, 3) {
                for rc in r.enumerate(&lambda, len).unwrap() {
                    if len == 0 {
                        continue;
                    }
                    let t = rank_and_delta(&rc).unwrap();
                    let n = ty.n;
                    let chain_end = if ty.family == Family::D1 { n - 2 } else { n };
                    for a in 1..chain_end {
                        if a + 1 < n {
                            assert!(t.ell[a] <= t.ell[a + 1], "{ty} {rc}");
                        }
                        assert!(t.ell_bar[a + 1] <= t.ell_bar[a] || t.ell_bar[a].is_inf(), "{ty} {rc}");
                    }
                    if !t.ell_bar[n].is_inf() && ty.family != Family::D1 {
                        assert!(t.ell[n] <= t.ell_bar[n], "{ty} {rc}");
                    }
                    if ty.family == Family::A2dag && !t.ell_bar[n].is_inf() {
                        assert_eq!(t.ell[n].to_int().unwrap() % 2, 1);
                        assert_eq!(t.ell_bar[n].to_int().unwrap() % 2, 0);
                    }
                }
            }
        }
    }

    #[test]
    fn type_a_reverse_scan_matches_search() {
        for n in 1..=3 {
            let ty = AffineType::new(Family::A1, n).unwrap();
            for (lambda, len) in cells(&ty, 4) {
                for rc in enumerate_small(&ty, &lambda, len) {
                    let t = rank_and_delta(&rc).unwrap();
                    assert_eq!(delta_inverse_type_a(&t.result, t.b).unwrap(), rc);
                    assert_eq!(delta_inverse_candidates(&t.result, t.b).unwrap(), vec![rc.clone()]);
                }
            }
        }
    }

    fn enumerate_small(ty: &AffineType, lambda: &[i64], len: usize) -> Vec<RiggedConfig> {
        if len == 0 {
            return Vec::new();
        }
        RcRules::new(ty).enumerate(lambda, len).unwrap()
    }

    #[test]
    fn dagger_literal_prefactor_is_too_small() {
        let ty = AffineType::new(Family::A2dag, 1).unwrap();
        let r = RcRules::new(&ty);
        let literal = Half(r.kd.t_vee(1).doubled() / r.kd.a_vee[0]);
        assert_eq!(literal, Half::HALF);
        let rc = rc_from(&ty, 2, &[0], &[&[(4, 0)]]);
        let dp = complement(&rank_and_delta(&complement(&rc)).unwrap().result);
        let dcc = r.cc_total(&rc) - r.cc_total(&dp);
        assert_eq!(dcc, Half::ONE);
        assert_ne!(dcc, literal * 1);
        assert_eq!(delta_cc_scale(&r) * 1, dcc);
    }

    #[test]
    fn bad_letter_has_no_preimage() {
        let ty = AffineType::new(Family::C1, 2).unwrap();
        let small = RiggedConfig::empty(&ty, 0, &[0, 0]);
        assert!(matches!(delta_inverse(&small, Kbar(1)), Err(Error::NoPreimage(_))));
    }
}
