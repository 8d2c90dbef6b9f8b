//! The crystal `B^{1,1}`, its tensor powers, and classically restricted paths.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::sync::{Arc, Mutex, OnceLock};

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::cartan::{is_dominant, AffineType, Family};
use crate::error::{Error, Result};

/// An element of `B^{1,1}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Letter {
    K(usize),
    Kbar(usize),
    Zero,
    Empty,
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Letter::K(k) => write!(f, "{k}"),
            Letter::Kbar(k) => write!(f, "-{k}"),
            Letter::Zero => write!(f, "0"),
            Letter::Empty => write!(f, "E"),
        }
    }
}

impl FromStr for Letter {
    type Err = Error;
    fn from_str(s: &str) -> Result<Letter> {
        let s = s.trim();
        match s {
            "0" => return Ok(Letter::Zero),
            "E" | "e" | "phi" => return Ok(Letter::Empty),
            _ => {}
        }
        let bad = || Error::InvalidLetter(s.to_string());
        if let Some(rest) = s.strip_prefix('-') {
            let k: usize = rest.parse().map_err(|_| bad())?;
            (k > 0).then_some(Letter::Kbar(k)).ok_or_else(bad)
        } else {
            let k: usize = s.parse().map_err(|_| bad())?;
            (k > 0).then_some(Letter::K(k)).ok_or_else(bad)
        }
    }
}

impl Serialize for Letter {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Letter {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Letter, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// A tensor word; index 0 holds the leftmost factor `b_L`.
pub type Path = Vec<Letter>;

pub fn format_path(p: &[Letter]) -> String {
    p.iter().map(|b| b.to_string()).collect::<Vec<_>>().join(" ")
}

pub fn parse_path(s: &str) -> Result<Path> {
    s.split(|c: char| c == ',' || c.is_whitespace())
        .filter(|t| !t.is_empty())
        .map(str::parse)
        .collect()
}

/// Letters and arrows of `B^{1,1}` for one affine type.
#[derive(Debug)]
pub struct Crystal {
    pub ty: AffineType,
    letters: Vec<Letter>,
    index: HashMap<Letter, usize>,
    /// `f[i][b]` is the index of `f_i(b)`.
    f: Vec<Vec<Option<usize>>>,
    e: Vec<Vec<Option<usize>>>,
}

/// Letters in the order of the drawn chain.
fn chain_letters(ty: &AffineType) -> Vec<Letter> {
    let n = ty.n;
    if ty.family == Family::A1 {
        return (1..=n + 1).map(Letter::K).collect();
    }
    let mut v: Vec<Letter> = (1..=n).map(Letter::K).collect();
    if matches!(ty.family, Family::B1 | Family::A2dag | Family::D2) {
        v.push(Letter::Zero);
    }
    v.extend((1..=n).rev().map(Letter::Kbar));
    if matches!(ty.family, Family::A2 | Family::D2) {
        v.push(Letter::Empty);
    }
    v
}

/// `(source, target, i)` for every `f_i` arrow.
fn arrows(ty: &AffineType) -> Vec<(Letter, Letter, usize)> {
    use Letter::{Empty, K, Kbar, Zero};
    let n = ty.n;
    let mut out = Vec::new();
    if ty.family == Family::A1 {
        for k in 1..=n {
            out.push((K(k), K(k + 1), k));
        }
        out.push((K(n + 1), K(1), 0));
        return out;
    }
    if ty.family == Family::D1 {
        for k in 1..n {
            out.push((K(k), K(k + 1), k));
        }
        out.push((K(n - 1), Kbar(n), n));
        out.push((K(n), Kbar(n - 1), n));
        out.push((Kbar(n), Kbar(n - 1), n - 1));
        for k in 1..n - 1 {
            out.push((Kbar(k + 1), Kbar(k), k));
        }
    } else {
        for k in 1..n {
            out.push((K(k), K(k + 1), k));
            out.push((Kbar(k + 1), Kbar(k), k));
        }
        match ty.family {
            Family::B1 | Family::A2dag | Family::D2 => {
                out.push((K(n), Zero, n));
                out.push((Zero, Kbar(n), n));
            }
            _ => out.push((K(n), Kbar(n), n)),
        }
    }
    match ty.family {
        Family::B1 | Family::D1 | Family::A2odd => {
            out.push((Kbar(1), K(2), 0));
            out.push((Kbar(2), K(1), 0));
        }
        Family::C1 | Family::A2dag => out.push((Kbar(1), K(1), 0)),
        Family::A2 | Family::D2 => {
            out.push((Kbar(1), Empty, 0));
            out.push((Empty, K(1), 0));
        }
        Family::A1 => unreachable!(),
    }
    out
}

impl Crystal {
    pub fn new(ty: &AffineType) -> Crystal {
        let letters = chain_letters(ty);
        let index: HashMap<Letter, usize> = letters.iter().enumerate().map(|(i, &b)| (b, i)).collect();
        let mut f = vec![vec![None; letters.len()]; ty.n + 1];
        let mut e = vec![vec![None; letters.len()]; ty.n + 1];
        for (src, dst, i) in arrows(ty) {
            let (s, d) = (index[&src], index[&dst]);
            assert!(f[i][s].is_none() && e[i][d].is_none(), "duplicate {i}-arrow at {src} -> {dst}");
            f[i][s] = Some(d);
            e[i][d] = Some(s);
        }
        Crystal { ty: *ty, letters, index, f, e }
    }

    /// All letters in chain order.
    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn contains(&self, b: Letter) -> bool {
        self.index.contains_key(&b)
    }

    pub fn position(&self, b: Letter) -> Result<usize> {
        self.index.get(&b).copied().ok_or_else(|| Error::InvalidLetter(b.to_string()))
    }

    fn check_node(&self, i: usize) -> Result<()> {
        if i > self.ty.n {
            return Err(Error::NodeIndex { index: i, n: self.ty.n });
        }
        Ok(())
    }

    pub fn apply_f(&self, i: usize, b: Letter) -> Result<Option<Letter>> {
        self.check_node(i)?;
        Ok(self.f[i][self.position(b)?].map(|j| self.letters[j]))
    }

    pub fn apply_e(&self, i: usize, b: Letter) -> Result<Option<Letter>> {
        self.check_node(i)?;
        Ok(self.e[i][self.position(b)?].map(|j| self.letters[j]))
    }

    fn f_unchecked(&self, i: usize, b: Letter) -> Option<Letter> {
        self.f[i][self.index[&b]].map(|j| self.letters[j])
    }

    fn e_unchecked(&self, i: usize, b: Letter) -> Option<Letter> {
        self.e[i][self.index[&b]].map(|j| self.letters[j])
    }

    /// Length of the `i`-string above `b`.
    pub fn epsilon(&self, i: usize, b: Letter) -> usize {
        let mut c = 0;
        let mut x = b;
        while let Some(y) = self.e_unchecked(i, x) {
            c += 1;
            x = y;
        }
        c
    }

    /// Length of the `i`-string below `b`.
    pub fn phi(&self, i: usize, b: Letter) -> usize {
        let mut c = 0;
        let mut x = b;
        while let Some(y) = self.f_unchecked(i, x) {
            c += 1;
            x = y;
        }
        c
    }

    /// Classical weight of a letter.
    pub fn wt(&self, b: Letter) -> Vec<i64> {
        let mut v = vec![0i64; self.ty.weight_dim()];
        match b {
            Letter::K(k) => v[k - 1] = 1,
            Letter::Kbar(k) => v[k - 1] = -1,
            Letter::Zero | Letter::Empty => {}
        }
        v
    }

    pub fn wt_path(&self, p: &[Letter]) -> Vec<i64> {
        let mut v = vec![0i64; self.ty.weight_dim()];
        for &b in p {
            for (x, y) in v.iter_mut().zip(self.wt(b)) {
                *x += y;
            }
        }
        v
    }

    pub fn validate_path(&self, p: &[Letter]) -> Result<()> {
        for &b in p {
            self.position(b)?;
        }
        Ok(())
    }

    /// Unmatched positions of the signature, as (position of the factor in `p`).
    ///
    /// Reading `b_1, ..., b_L` left to right, each factor contributes
    /// `-^{eps} +^{phi}`; adjacent `+ -` pairs cancel.
    fn reduced_signature(&self, i: usize, p: &[Letter]) -> (Vec<usize>, Vec<usize>) {
        let mut minus: Vec<usize> = Vec::new();
        let mut plus: Vec<usize> = Vec::new();
        for pos in (0..p.len()).rev() {
            let b = p[pos];
            for _ in 0..self.epsilon(i, b) {
                if plus.pop().is_none() {
                    minus.push(pos);
                }
            }
            for _ in 0..self.phi(i, b) {
                plus.push(pos);
            }
        }
        (minus, plus)
    }

    /// `e_i` on a tensor word, or `None` when undefined.
    pub fn tensor_e(&self, i: usize, p: &[Letter]) -> Option<Path> {
        let (minus, _) = self.reduced_signature(i, p);
        let &pos = minus.last()?;
        let mut out = p.to_vec();
        out[pos] = self.e_unchecked(i, p[pos]).expect("signature points at an e-able factor");
        Some(out)
    }

    /// `f_i` on a tensor word, or `None` when undefined.
    pub fn tensor_f(&self, i: usize, p: &[Letter]) -> Option<Path> {
        let (_, plus) = self.reduced_signature(i, p);
        let &pos = plus.first()?;
        let mut out = p.to_vec();
        out[pos] = self.f_unchecked(i, p[pos]).expect("signature points at an f-able factor");
        Some(out)
    }

    /// `(epsilon_i, phi_i)` of a tensor word.
    pub fn tensor_eps_phi(&self, i: usize, p: &[Letter]) -> (usize, usize) {
        let (m, pl) = self.reduced_signature(i, p);
        (m.len(), pl.len())
    }

    pub fn is_classically_highest(&self, p: &[Letter]) -> bool {
        (1..=self.ty.n).all(|i| self.tensor_e(i, p).is_none())
    }

    /// Every letter `b` with `rho + wt(b)` dominant, allowed as a new leftmost factor over weight `rho`.
    pub fn appendable(&self, rho: &[i64]) -> Vec<Letter> {
        self.letters
            .iter()
            .copied()
            .filter(|&b| {
                let lam: Vec<i64> = rho.iter().zip(self.wt(b)).map(|(x, y)| x + y).collect();
                self.can_prepend(&lam, b)
            })
            .collect()
    }

    /// Whether `b ⊗ p'` can be highest of weight `lambda` for some highest `p'`.
    pub fn can_prepend(&self, lambda: &[i64], b: Letter) -> bool {
        let rho: Vec<i64> = lambda.iter().zip(self.wt(b)).map(|(x, y)| x - y).collect();
        if !is_dominant(&self.ty, &rho).unwrap_or(false) || !is_dominant(&self.ty, lambda).unwrap_or(false) {
            return false;
        }
        b != Letter::Zero || lambda[self.ty.n - 1] > 0
    }

    /// All classically restricted paths of weight `lambda` and length `len`, in lexicographic chain order.
    pub fn enumerate_highest(&self, lambda: &[i64], len: usize) -> Result<Vec<Path>> {
        if !is_dominant(&self.ty, lambda)? {
            return Err(Error::NotDominant(lambda.to_vec()));
        }
        let mut out = Vec::new();
        let mut prefix = Vec::with_capacity(len);
        self.highest_rec(lambda.to_vec(), len, &mut prefix, &mut out);
        Ok(out)
    }

    fn highest_rec(&self, lambda: Vec<i64>, len: usize, prefix: &mut Path, out: &mut Vec<Path>) {
        if len == 0 {
            if lambda.iter().all(|&x| x == 0) {
                out.push(prefix.clone());
            }
            return;
        }
        // |lambda| can drop by at most one per factor
        if lambda.iter().map(|x| x.abs()).max().unwrap_or(0) > len as i64 {
            return;
        }
        for &b in &self.letters {
            if !self.can_prepend(&lambda, b) {
                continue;
            }
            let rho: Vec<i64> = lambda.iter().zip(self.wt(b)).map(|(x, y)| x - y).collect();
            prefix.push(b);
            self.highest_rec(rho, len - 1, prefix, out);
            prefix.pop();
        }
    }

    /// Every `lambda` with at least one classically restricted path of length `len`, sorted.
    pub fn dominant_weights(&self, len: usize) -> Vec<Vec<i64>> {
        let mut layer: std::collections::BTreeSet<Vec<i64>> = std::collections::BTreeSet::new();
        layer.insert(vec![0; self.ty.weight_dim()]);
        for _ in 0..len {
            let mut next = std::collections::BTreeSet::new();
            for rho in &layer {
                for b in self.appendable(rho) {
                    next.insert(rho.iter().zip(self.wt(b)).map(|(x, y)| x + y).collect());
                }
            }
            layer = next;
        }
        layer.into_iter().collect()
    }

    /// All words of length `len`, in lexicographic chain order.
    pub fn all_words(&self, len: usize) -> Vec<Path> {
        let mut out: Vec<Path> = vec![Vec::new()];
        for _ in 0..len {
            out = out
                .into_iter()
                .flat_map(|w| {
                    self.letters.iter().map(move |&b| {
                        let mut x = w.clone();
                        x.push(b);
                        x
                    })
                })
                .collect();
        }
        out
    }

    /// The arrow table as a DOT digraph.
    pub fn to_dot(&self) -> String {
        let mut s = format!("digraph \"B11 {}\" {{\n", self.ty.name());
        for b in &self.letters {
            s.push_str(&format!("  \"{b}\";\n"));
        }
        for i in 0..=self.ty.n {
            for (src, dst) in self.f[i].iter().enumerate() {
                if let Some(d) = dst {
                    s.push_str(&format!("  \"{}\" -> \"{}\" [label=\"{i}\"];\n", self.letters[src], self.letters[*d]));
                }
            }
        }
        s.push_str("}\n");
        s
    }
}

/// Which way to nest a word when applying the two-factor rule.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Bracketing {
    /// `b_L ⊗ (b_{L-1} ⊗ (... ⊗ b_1))`
    Right,
    /// `((b_L ⊗ b_{L-1}) ⊗ ...) ⊗ b_1`
    Left,
}

impl Crystal {
    /// The two-factor rule applied recursively under the chosen nesting.
    ///
    /// Epsilon and phi of each sub-word are measured by repeated application,
    /// so this does not share any code with the signature rule.
    pub fn tensor_e_bracketed(&self, i: usize, p: &[Letter], br: Bracketing) -> Option<Path> {
        match p.len() {
            0 => None,
            1 => self.e_unchecked(i, p[0]).map(|b| vec![b]),
            len => {
                let split = match br {
                    Bracketing::Right => 1,
                    Bracketing::Left => len - 1,
                };
                let (left, right) = p.split_at(split);
                let eps_left = self.count_bracketed(i, left, br, true);
                let phi_right = self.count_bracketed(i, right, br, false);
                if eps_left > phi_right {
                    let mut out = self.tensor_e_bracketed(i, left, br)?;
                    out.extend_from_slice(right);
                    Some(out)
                } else {
                    let mut out = left.to_vec();
                    out.extend(self.tensor_e_bracketed(i, right, br)?);
                    Some(out)
                }
            }
        }
    }

    /// Two-factor rule for `f`, the inverse of the `e` rule: acts on the left factor if `eps(b1) >= phi(b2)`.
    pub fn tensor_f_bracketed(&self, i: usize, p: &[Letter], br: Bracketing) -> Option<Path> {
        match p.len() {
            0 => None,
            1 => self.f_unchecked(i, p[0]).map(|b| vec![b]),
            len => {
                let split = match br {
                    Bracketing::Right => 1,
                    Bracketing::Left => len - 1,
                };
                let (left, right) = p.split_at(split);
                let eps_left = self.count_bracketed(i, left, br, true);
                let phi_right = self.count_bracketed(i, right, br, false);
                if eps_left >= phi_right {
                    let mut out = self.tensor_f_bracketed(i, left, br)?;
                    out.extend_from_slice(right);
                    Some(out)
                } else {
                    let mut out = left.to_vec();
                    out.extend(self.tensor_f_bracketed(i, right, br)?);
                    Some(out)
                }
            }
        }
    }

    fn count_bracketed(&self, i: usize, p: &[Letter], br: Bracketing, up: bool) -> usize {
        let mut c = 0;
        let mut x = p.to_vec();
        loop {
            let next = if up { self.tensor_e_bracketed(i, &x, br) } else { self.tensor_f_bracketed(i, &x, br) };
            match next {
                Some(y) => {
                    c += 1;
                    x = y;
                }
                None => return c,
            }
        }
    }
}

static CACHE: OnceLock<Mutex<HashMap<AffineType, Arc<Crystal>>>> = OnceLock::new();

/// Shared crystal for a type, built on first use.
pub fn crystal(ty: &AffineType) -> Arc<Crystal> {
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = cache.lock().expect("crystal cache poisoned");
    guard.entry(*ty).or_insert_with(|| Arc::new(Crystal::new(ty))).clone()
}
