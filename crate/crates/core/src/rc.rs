//! Rigged configurations, vacancy numbers, the `cc` statistic and the fermionic sum.
//!
//! All lengths and riggings are [`Half`] values. A string of length `i` at
//! node `a` has `i / upsilon_a` boxes.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::cartan::{config_sizes, kac_data, statistic_form, AffineType, Family, FormMatrix, KacData};
use crate::error::{Error, Result};
use crate::half::Half;
use crate::qpoly::{qbinom, QPoly};

/// One row of `nu^(a)` with its rigging.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RString {
    pub len: Half,
    pub rig: Half,
}

/// Parts of each `nu^(a)`, indexed by `a - 1`, sorted descending.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Configuration {
    pub nu: Vec<Vec<Half>>,
}

impl Configuration {
    pub fn empty(n: usize) -> Configuration {
        Configuration { nu: vec![Vec::new(); n] }
    }

    pub fn n(&self) -> usize {
        self.nu.len()
    }

    /// `Q_i(nu^(a))`; zero outside `1..=n`.
    pub fn q(&self, a: usize, i: Half) -> Half {
        if a == 0 || a > self.nu.len() {
            return Half::ZERO;
        }
        self.nu[a - 1].iter().map(|&p| p.min(i)).sum()
    }

    /// Number of parts of length exactly `i` at node `a`; zero outside `1..=n`.
    pub fn m(&self, a: usize, i: Half) -> i64 {
        if a == 0 || a > self.nu.len() {
            return 0;
        }
        self.nu[a - 1].iter().filter(|&&p| p == i).count() as i64
    }

    pub fn size(&self, a: usize) -> Half {
        self.nu[a - 1].iter().copied().sum()
    }

    /// Longest part over all nodes.
    pub fn max_part(&self) -> Half {
        self.nu.iter().flatten().copied().max().unwrap_or(Half::ZERO)
    }

    fn normalize(&mut self) {
        for parts in &mut self.nu {
            parts.sort_unstable_by(|x, y| y.cmp(x));
        }
    }
}

/// A rigged configuration in `RC(lambda, B^{⊗L})`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RiggedConfig {
    pub ty: AffineType,
    pub len: usize,
    pub lambda: Vec<i64>,
    /// Strings of `nu^(a)` at index `a - 1`, sorted descending by `(len, rig)`.
    pub nu: Vec<Vec<RString>>,
}

impl RiggedConfig {
    pub fn empty(ty: &AffineType, len: usize, lambda: &[i64]) -> RiggedConfig {
        RiggedConfig { ty: *ty, len, lambda: lambda.to_vec(), nu: vec![Vec::new(); ty.n] }
    }

    pub fn configuration(&self) -> Configuration {
        Configuration { nu: self.nu.iter().map(|s| s.iter().map(|r| r.len).collect()).collect() }
    }

    pub fn normalize(&mut self) {
        for strings in &mut self.nu {
            strings.sort_unstable_by(|x, y| y.cmp(x));
        }
    }

    pub fn is_empty(&self) -> bool {
        self.nu.iter().all(Vec::is_empty)
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(RcJson::from(self)).expect("rigged configuration serializes")
    }

    pub fn from_json(v: &serde_json::Value, relax: bool) -> Result<RiggedConfig> {
        let j: RcJson = serde_json::from_value(v.clone()).map_err(|e| Error::Parse(e.to_string()))?;
        j.into_rc(relax)
    }
}

impl fmt::Display for RiggedConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let nodes: Vec<String> = self
            .nu
            .iter()
            .enumerate()
            .map(|(a, s)| {
                let body: Vec<String> = s.iter().map(|r| format!("{}[{}]", r.len, r.rig)).collect();
                format!("{}:({})", a + 1, body.join(","))
            })
            .collect();
        write!(f, "{}", nodes.join(" "))
    }
}

#[derive(Serialize, Deserialize)]
struct StringJson {
    len2: i64,
    rig2: i64,
}

#[derive(Serialize, Deserialize)]
struct NodeJson {
    a: usize,
    strings: Vec<StringJson>,
}

#[derive(Serialize, Deserialize)]
struct RcJson {
    #[serde(rename = "type")]
    ty: String,
    n: usize,
    #[serde(rename = "L")]
    len: usize,
    lambda: Vec<i64>,
    nu: Vec<NodeJson>,
}

impl From<&RiggedConfig> for RcJson {
    fn from(rc: &RiggedConfig) -> RcJson {
        RcJson {
            ty: rc.ty.family.name().to_string(),
            n: rc.ty.n,
            len: rc.len,
            lambda: rc.lambda.clone(),
            nu: rc
                .nu
                .iter()
                .enumerate()
                .map(|(a, s)| NodeJson {
                    a: a + 1,
                    strings: s.iter().map(|r| StringJson { len2: r.len.doubled(), rig2: r.rig.doubled() }).collect(),
                })
                .collect(),
        }
    }
}

impl RcJson {
    fn into_rc(self, relax: bool) -> Result<RiggedConfig> {
        let family: Family = self.ty.parse()?;
        let ty = AffineType::with_rank_policy(family, self.n, relax)?;
        let mut rc = RiggedConfig::empty(&ty, self.len, &self.lambda);
        for node in self.nu {
            if node.a == 0 || node.a > ty.n {
                return Err(Error::NodeIndex { index: node.a, n: ty.n });
            }
            rc.nu[node.a - 1].extend(node.strings.iter().map(|s| RString { len: Half(s.len2), rig: Half(s.rig2) }));
        }
        rc.normalize();
        Ok(rc)
    }
}

/// Per-type data needed for vacancy numbers and statistics.
#[derive(Clone, Debug)]
pub struct RcRules {
    pub ty: AffineType,
    pub kd: KacData,
    pub form: FormMatrix,
}

impl RcRules {
    pub fn new(ty: &AffineType) -> RcRules {
        RcRules { ty: *ty, kd: kac_data(ty), form: statistic_form(ty) }
    }

    pub fn upsilon(&self, a: usize) -> Half {
        self.kd.upsilon(a)
    }

    /// True when a length is a positive lattice point at node `a`.
    pub fn on_lattice(&self, a: usize, i: Half) -> bool {
        i > Half::ZERO && i.div_exact(self.upsilon(a)).is_some()
    }

    /// Strings at node `n` of odd length for the dagger type carry half-odd riggings.
    pub fn half_odd_riggings(&self, a: usize, i: Half) -> bool {
        self.ty.family == Family::A2dag && a == self.ty.n && i.to_int().is_some_and(|v| v % 2 != 0)
    }

    /// Vacancy number from the explicit per-type formulas.
    pub fn vacancy(&self, len: usize, nu: &Configuration, a: usize, i: Half) -> Half {
        let n = self.ty.n;
        let q = |b: usize| nu.q(b, i);
        let l = if a == 1 && i > Half::ZERO { Half::int(len as i64) } else { Half::ZERO };
        let regular = q(a - 1) - q(a) * 2 + q(a + 1) + l;
        match self.ty.family {
            Family::A1 => regular,
            Family::D1 => {
                if a + 2 < n {
                    regular
                } else if a + 2 == n {
                    regular + q(n)
                } else {
                    // nodes n-1 and n hang off n-2 and do not see each other
                    q(n - 2) - q(a) * 2 + l
                }
            }
            Family::B1 | Family::A2odd => {
                let (c_prev, c_self) = if self.ty.family == Family::B1 { (2, 4) } else { (1, 2) };
                if a + 1 < n {
                    regular
                } else if a + 1 == n {
                    q(n - 2) - q(n - 1) * 2 + q(n) * 2 + l
                } else {
                    q(n - 1) * c_prev - q(n) * c_self + l
                }
            }
            Family::C1 | Family::A2 | Family::A2dag => {
                if a < n {
                    regular
                } else {
                    q(n - 1) - q(n) + l
                }
            }
            Family::D2 => {
                if a < n {
                    regular
                } else {
                    q(n - 1) * 2 - q(n) * 2 + l
                }
            }
        }
    }

    /// Vacancy number from the general quadratic-form expression.
    pub fn vacancy_generic(&self, len: usize, nu: &Configuration, a: usize, i: Half) -> Half {
        let ia = i.div_exact(self.upsilon(a)).expect("length off the node lattice");
        let ta = self.kd.t(a).to_int().unwrap();
        let mut s = Half::ZERO;
        for b in 1..=self.ty.n {
            let tb = self.kd.t(b).to_int().unwrap();
            let inner: i64 = nu.nu[b - 1]
                .iter()
                .map(|&p| {
                    let k = p.div_exact(self.upsilon(b)).unwrap();
                    (tb * ia).min(ta * k)
                })
                .sum();
            s += self.form.get(a, b) * inner;
        }
        let tv = self.kd.t_vee(a).to_int().unwrap();
        assert_eq!(s.0 % tv, 0, "form sum {s} not divisible by t_vee {tv}");
        let l = if a == 1 { len as i64 * ia.min(1) } else { 0 };
        Half::int(l) - Half(s.0 / tv)
    }

    /// Smallest positive lattice point at node `a` past every part of `nu`.
    pub fn stable_length(&self, nu: &Configuration, a: usize) -> Half {
        let u = self.upsilon(a);
        let mut i = u;
        while i <= nu.max_part() {
            i += u;
        }
        i
    }

    /// `P_i >= 0` at every lattice point (and the extra odd-length bound for the dagger type).
    pub fn is_admissible(&self, len: usize, nu: &Configuration) -> bool {
        for a in 1..=self.ty.n {
            let u = self.upsilon(a);
            let stop = self.stable_length(nu, a);
            let mut i = u;
            while i <= stop {
                let p = self.vacancy(len, nu, a, i);
                if p < Half::ZERO {
                    return false;
                }
                if self.half_odd_riggings(a, i) && nu.m(a, i) > 0 && p < Half::ONE {
                    return false;
                }
                i += u;
            }
        }
        true
    }

    /// Admissibility checked only where `m_i > 0`.
    pub fn is_admissible_on_parts(&self, len: usize, nu: &Configuration) -> bool {
        (1..=self.ty.n).all(|a| {
            nu.nu[a - 1].iter().all(|&i| {
                let p = self.vacancy(len, nu, a, i);
                p >= Half::ZERO && !(self.half_odd_riggings(a, i) && p < Half::ONE)
            })
        })
    }

    /// `cc(nu)`.
    pub fn cc_config(&self, nu: &Configuration) -> Half {
        let mut s = Half::ZERO;
        for a in 1..=self.ty.n {
            let ta = self.kd.t(a).to_int().unwrap();
            for b in 1..=self.ty.n {
                let tb = self.kd.t(b).to_int().unwrap();
                let f = self.form.get(a, b);
                if f == Half::ZERO {
                    continue;
                }
                let mut inner = 0i64;
                for &pj in &nu.nu[a - 1] {
                    let j = pj.div_exact(self.upsilon(a)).unwrap();
                    for &pk in &nu.nu[b - 1] {
                        let k = pk.div_exact(self.upsilon(b)).unwrap();
                        inner += (tb * j).min(ta * k);
                    }
                }
                s += f * inner;
            }
        }
        assert_eq!(s.0 % 2, 0, "cc numerator {s} is not on the half lattice");
        Half(s.0 / 2)
    }

    /// Weight of a rigging in `|J|`.
    fn rigging_weight(&self, a: usize) -> i64 {
        if self.ty.family == Family::A2dag {
            1
        } else {
            self.kd.t_vee(a).to_int().unwrap()
        }
    }

    pub fn cc_total(&self, rc: &RiggedConfig) -> Half {
        let nu = rc.configuration();
        let riggings: Half =
            (1..=self.ty.n).map(|a| rc.nu[a - 1].iter().map(|s| s.rig * self.rigging_weight(a)).sum::<Half>()).sum();
        self.cc_config(&nu) + riggings
    }

    /// Allowed rigging values for a string of length `i` at node `a` under vacancy `p`.
    pub fn rigging_range(&self, a: usize, i: Half, p: Half) -> Vec<Half> {
        if self.half_odd_riggings(a, i) {
            let mut v = Vec::new();
            let mut x = Half::HALF;
            while x <= p - Half::HALF {
                v.push(x);
                x += Half::ONE;
            }
            v
        } else {
            let mut v = Vec::new();
            let mut x = Half::ZERO;
            while x <= p {
                v.push(x);
                x += Half::ONE;
            }
            v
        }
    }

    /// Full validity check for an element of `RC(lambda, B^{⊗L})`.
    pub fn validate(&self, rc: &RiggedConfig) -> Result<()> {
        if rc.ty != self.ty {
            return Err(Error::Inadmissible(format!("type {} does not match {}", rc.ty, self.ty)));
        }
        if rc.nu.len() != self.ty.n {
            return Err(Error::Inadmissible(format!("{} nodes, expected {}", rc.nu.len(), self.ty.n)));
        }
        let nu = rc.configuration();
        let sizes = config_sizes(&self.ty, &rc.lambda, rc.len)?
            .ok_or_else(|| Error::Inadmissible(format!("no configuration has weight {:?} at L={}", rc.lambda, rc.len)))?;
        for a in 1..=self.ty.n {
            for s in &rc.nu[a - 1] {
                if !self.on_lattice(a, s.len) {
                    return Err(Error::OffLattice { node: a, len: s.len.to_string() });
                }
            }
            if nu.size(a) != sizes[a - 1] {
                return Err(Error::Inadmissible(format!("|nu^({a})| = {} but the weight needs {}", nu.size(a), sizes[a - 1])));
            }
        }
        if !self.is_admissible(rc.len, &nu) {
            return Err(Error::Inadmissible("negative vacancy number".into()));
        }
        for a in 1..=self.ty.n {
            for s in &rc.nu[a - 1] {
                let p = self.vacancy(rc.len, &nu, a, s.len);
                if !self.rigging_range(a, s.len, p).contains(&s.rig) {
                    return Err(Error::Inadmissible(format!("rigging {} out of range at node {a}, length {}", s.rig, s.len)));
                }
            }
        }
        Ok(())
    }

    /// All admissible configurations of the right sizes.
    pub fn configurations(&self, lambda: &[i64], len: usize) -> Result<Vec<Configuration>> {
        let Some(sizes) = config_sizes(&self.ty, lambda, len)? else { return Ok(Vec::new()) };
        let mut per_node: Vec<Vec<Vec<Half>>> = Vec::with_capacity(self.ty.n);
        for a in 1..=self.ty.n {
            let u = self.upsilon(a);
            let Some(boxes) = sizes[a - 1].div_exact(u) else { return Ok(Vec::new()) };
            per_node.push(partitions(boxes).into_iter().map(|p| p.into_iter().map(|k| u * k).collect()).collect());
        }
        let mut out = Vec::new();
        let mut current = Configuration::empty(self.ty.n);
        self.product_rec(&per_node, 0, &mut current, len, &mut out);
        Ok(out)
    }

    fn product_rec(
        &self,
        per_node: &[Vec<Vec<Half>>],
        a: usize,
        current: &mut Configuration,
        len: usize,
        out: &mut Vec<Configuration>,
    ) {
        if a == per_node.len() {
            if self.is_admissible(len, current) {
                let mut c = current.clone();
                c.normalize();
                out.push(c);
            }
            return;
        }
        for parts in &per_node[a] {
            current.nu[a] = parts.clone();
            self.product_rec(per_node, a + 1, current, len, out);
        }
        current.nu[a].clear();
    }

    /// Every rigging of one configuration.
    pub fn riggings(&self, lambda: &[i64], len: usize, nu: &Configuration) -> Vec<RiggedConfig> {
        // blocks (a, length, multiplicity, allowed values)
        let mut blocks: Vec<(usize, Half, usize, Vec<Half>)> = Vec::new();
        for a in 1..=self.ty.n {
            let mut counts: BTreeMap<Half, usize> = BTreeMap::new();
            for &p in &nu.nu[a - 1] {
                *counts.entry(p).or_default() += 1;
            }
            for (&i, &m) in counts.iter().rev() {
                let p = self.vacancy(len, nu, a, i);
                blocks.push((a, i, m, self.rigging_range(a, i, p)));
            }
        }
        let mut out = Vec::new();
        let mut rc = RiggedConfig::empty(&self.ty, len, lambda);
        rig_rec(&blocks, 0, &mut rc, &mut out);
        out
    }

    pub fn enumerate(&self, lambda: &[i64], len: usize) -> Result<Vec<RiggedConfig>> {
        let mut out = Vec::new();
        for nu in self.configurations(lambda, len)? {
            out.extend(self.riggings(lambda, len, &nu));
        }
        Ok(out)
    }

    /// `x -> P - x` on every rigging.
    pub fn complement(&self, rc: &RiggedConfig) -> RiggedConfig {
        let nu = rc.configuration();
        let mut out = rc.clone();
        for a in 1..=self.ty.n {
            for s in &mut out.nu[a - 1] {
                s.rig = self.vacancy(rc.len, &nu, a, s.len) - s.rig;
            }
        }
        out.normalize();
        out
    }

    /// The q-binomial sum over admissible configurations.
    pub fn fermionic_m(&self, lambda: &[i64], len: usize) -> Result<QPoly> {
        if self.ty.family == Family::A2dag {
            return self.rc_genfun(lambda, len);
        }
        let mut total = QPoly::zero();
        for nu in self.configurations(lambda, len)? {
            let mut term = QPoly::q_pow(self.cc_config(&nu));
            for a in 1..=self.ty.n {
                let tv = self.kd.t_vee(a).to_int().unwrap();
                let mut counts: BTreeMap<Half, i64> = BTreeMap::new();
                for &p in &nu.nu[a - 1] {
                    *counts.entry(p).or_default() += 1;
                }
                for (&i, &m) in &counts {
                    let p = self.vacancy(len, &nu, a, i).to_int().expect("integral vacancy");
                    term = &term * &qbinom(p, m, tv);
                }
            }
            total += &term;
        }
        Ok(total)
    }

    /// `sum q^{cc}` over `RC(lambda, B^{⊗L})`.
    pub fn rc_genfun(&self, lambda: &[i64], len: usize) -> Result<QPoly> {
        let mut total = QPoly::zero();
        for rc in self.enumerate(lambda, len)? {
            total.add_term(self.cc_total(&rc), 1);
        }
        Ok(total)
    }
}

fn rig_rec(blocks: &[(usize, Half, usize, Vec<Half>)], k: usize, rc: &mut RiggedConfig, out: &mut Vec<RiggedConfig>) {
    if k == blocks.len() {
        let mut r = rc.clone();
        r.normalize();
        out.push(r);
        return;
    }
    let (a, i, m, ref values) = blocks[k];
    for seq in decreasing_sequences(values, m) {
        let before = rc.nu[a - 1].len();
        rc.nu[a - 1].extend(seq.into_iter().map(|rig| RString { len: i, rig }));
        rig_rec(blocks, k + 1, rc, out);
        rc.nu[a - 1].truncate(before);
    }
}

/// Weakly decreasing sequences of length `m` drawn from ascending `values`.
fn decreasing_sequences(values: &[Half], m: usize) -> Vec<Vec<Half>> {
    fn rec(values: &[Half], m: usize, max_idx: usize, cur: &mut Vec<Half>, out: &mut Vec<Vec<Half>>) {
        if cur.len() == m {
            out.push(cur.clone());
            return;
        }
        for idx in (0..=max_idx).rev() {
            cur.push(values[idx]);
            rec(values, m, idx, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if m == 0 {
        out.push(Vec::new());
    } else if !values.is_empty() {
        rec(values, m, values.len() - 1, &mut Vec::new(), &mut out);
    }
    out
}

/// Partitions of `n` into positive parts, each listed descending.
pub fn partitions(n: i64) -> Vec<Vec<i64>> {
    fn rec(rest: i64, max: i64, cur: &mut Vec<i64>, out: &mut Vec<Vec<i64>>) {
        if rest == 0 {
            out.push(cur.clone());
            return;
        }
        for p in (1..=rest.min(max)).rev() {
            cur.push(p);
            rec(rest - p, p, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if n >= 0 {
        rec(n, n, &mut Vec::new(), &mut out);
    }
    out
}

pub fn vacancy(ty: &AffineType, len: usize, nu: &Configuration, a: usize, i: Half) -> Result<Half> {
    let r = RcRules::new(ty);
    if a == 0 || a > ty.n {
        return Err(Error::NodeIndex { index: a, n: ty.n });
    }
    if !r.on_lattice(a, i) {
        return Err(Error::OffLattice { node: a, len: i.to_string() });
    }
    Ok(r.vacancy(len, nu, a, i))
}

pub fn cc_config(ty: &AffineType, nu: &Configuration) -> Half {
    RcRules::new(ty).cc_config(nu)
}

pub fn cc_total(rc: &RiggedConfig) -> Half {
    RcRules::new(&rc.ty).cc_total(rc)
}

pub fn enumerate_rc(ty: &AffineType, lambda: &[i64], len: usize) -> Result<Vec<RiggedConfig>> {
    RcRules::new(ty).enumerate(lambda, len)
}

pub fn fermionic_m(ty: &AffineType, lambda: &[i64], len: usize) -> Result<QPoly> {
    RcRules::new(ty).fermionic_m(lambda, len)
}

pub fn rc_genfun(ty: &AffineType, lambda: &[i64], len: usize) -> Result<QPoly> {
    RcRules::new(ty).rc_genfun(lambda, len)
}

pub fn complement(rc: &RiggedConfig) -> RiggedConfig {
    RcRules::new(&rc.ty).complement(rc)
}
