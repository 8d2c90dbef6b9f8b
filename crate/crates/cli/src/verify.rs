//! Grid verification and the TSV certificate.

use std::collections::BTreeSet;
use std::io::{self, Write};
use std::ops::RangeInclusive;
use std::path::Path as FsPath;
use std::time::Instant;

use rayon::prelude::*;
use serde_json::json;

use rcbij::bijection::{delta_inverse, phi, phi_inverse, phi_tilde, rank_and_delta, verify_delta_identities};
use rcbij::cartan::{is_dominant, AffineType, Family};
use rcbij::crystal::crystal;
use rcbij::energy::{one_dim_sum, Energy};
use rcbij::qpoly::QPoly;
use rcbij::rc::{RcRules, RiggedConfig};
use rcbij::Half;

use crate::{lambda_str, Failure};

#[derive(Clone, Debug)]
pub struct GridCell {
    pub ty: AffineType,
    pub len: usize,
    pub lambda: Vec<i64>,
}

pub fn cells_for_type(ty: AffineType, lens: RangeInclusive<usize>) -> Vec<GridCell> {
    let mut out = Vec::new();
    for len in lens {
        for lambda in crystal(&ty).dominant_weights(len) {
            out.push(GridCell { ty, len, lambda });
        }
    }
    out
}

fn parse_lens(s: &str) -> Option<RangeInclusive<usize>> {
    match s.split_once("..") {
        Some((a, b)) => Some(a.parse().ok()?..=b.parse().ok()?),
        None => {
            let l = s.parse().ok()?;
            Some(l..=l)
        }
    }
}

/// Lines `TYPE N L [WEIGHT]`; `#` starts a comment.
pub fn read_grid(path: &FsPath, relax: bool) -> Result<Vec<GridCell>, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    let mut cells = Vec::new();
    for (no, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let bad = |what: &str| Failure::Usage(format!("{}:{}: {what}: `{line}`", path.display(), no + 1));
        let fields: Vec<&str> = line.split_whitespace().collect();
        if !(3..=4).contains(&fields.len()) {
            return Err(bad("expected `TYPE N L [WEIGHT]`"));
        }
        let family: Family = fields[0].parse()?;
        let n: usize = fields[1].parse().map_err(|_| bad("bad rank"))?;
        let ty = AffineType::with_rank_policy(family, n, relax)?;
        let lens = parse_lens(fields[2]).ok_or_else(|| bad("bad length"))?;
        match fields.get(3) {
            None => cells.extend(cells_for_type(ty, lens)),
            Some(w) => {
                let lambda = w
                    .split(',')
                    .map(|x| x.trim().parse::<i64>())
                    .collect::<Result<Vec<_>, _>>()
                    .map_err(|_| bad("bad weight"))?;
                if !is_dominant(&ty, &lambda)? {
                    return Err(rcbij::Error::NotDominant(lambda).into());
                }
                cells.extend(lens.map(|len| GridCell { ty, len, lambda: lambda.clone() }));
            }
        }
    }
    Ok(cells)
}

struct CellResult {
    rc_count: usize,
    path_count: usize,
    xbar: QPoly,
    mbar: QPoly,
    failure: Option<serde_json::Value>,
    millis: u128,
}

fn counterexample(cell: &GridCell, check: &str, rc: Option<&RiggedConfig>, detail: String) -> serde_json::Value {
    json!({
        "type": cell.ty.family.name(),
        "n": cell.ty.n,
        "L": cell.len,
        "lambda": cell.lambda,
        "check": check,
        "rc": rc.map(RiggedConfig::to_json),
        "detail": detail,
    })
}

fn check_cell(cell: &GridCell) -> rcbij::Result<CellResult> {
    let start = Instant::now();
    let ty = cell.ty;
    let r = RcRules::new(&ty);
    let en = Energy::new(&ty)?;
    let (_, xbar) = one_dim_sum(&ty, &cell.lambda, cell.len)?;
    let mbar = r.fermionic_m(&cell.lambda, cell.len)?;
    let genfun = r.rc_genfun(&cell.lambda, cell.len)?;
    let rcs = r.enumerate(&cell.lambda, cell.len)?;
    let paths: BTreeSet<_> = crystal(&ty).enumerate_highest(&cell.lambda, cell.len)?.into_iter().collect();

    let failure = (|| {
        if xbar != mbar || xbar != genfun {
            return Some(counterexample(cell, "X=M", None, format!("X̄ = {xbar}, M̄ = {mbar}, RC sum = {genfun}")));
        }
        if rcs.len() != paths.len() {
            return Some(counterexample(cell, "cardinality", None, format!("|RC| = {}, |P| = {}", rcs.len(), paths.len())));
        }
        let mut images = BTreeSet::new();
        for rc in &rcs {
            let fail = |check: &str, detail: String| Some(counterexample(cell, check, Some(rc), detail));
            let p = match phi(rc) {
                Ok(p) => p,
                Err(e) => return fail("bijection", e.to_string()),
            };
            if !paths.contains(&p) || !images.insert(p.clone()) {
                return fail("bijection", format!("image {p:?} is not a new restricted path"));
            }
            match phi_inverse(&ty, &p) {
                Ok(back) if &back == rc => {}
                other => return fail("round trip", format!("{other:?}")),
            }
            match phi_tilde(rc) {
                Ok(pt) => {
                    let (cc, d) = (r.cc_total(rc), Half::int(en.d_bar(&pt)));
                    if cc != d {
                        return fail("statistic", format!("cc = {cc}, D̄ = {d}"));
                    }
                }
                Err(e) => return fail("statistic", e.to_string()),
            }
            if cell.len > 0 {
                match rank_and_delta(rc).and_then(|t| delta_inverse(&t.result, t.b)) {
                    Ok(back) if &back == rc => {}
                    other => return fail("round trip", format!("{other:?}")),
                }
            }
            if let Err(e) = verify_delta_identities(rc, &en.h) {
                return fail("statistic", e);
            }
        }
        None
    })();
    Ok(CellResult { rc_count: rcs.len(), path_count: paths.len(), xbar, mbar, failure, millis: start.elapsed().as_millis() })
}

/// Writes the certificate; returns whether every cell passed. Counterexamples go to stderr.
pub fn run(out: &mut impl Write, cells: &[GridCell], timing: bool) -> Result<bool, Failure> {
    let results: Vec<rcbij::Result<CellResult>> = cells.par_iter().map(check_cell).collect();
    write!(out, "type\tn\tL\tlambda\t|RC|\t|P|\tXbar\tMbar\tequal\tok")?;
    writeln!(out, "{}", if timing { "\tms" } else { "" })?;
    let mut all_ok = true;
    let mut max_ms = 0;
    for (cell, res) in cells.iter().zip(results) {
        let res = res?;
        let ok = res.failure.is_none();
        all_ok &= ok;
        max_ms = max_ms.max(res.millis);
        write!(
            out,
            "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
            cell.ty.family.name(),
            cell.ty.n,
            cell.len,
            lambda_str(&cell.lambda),
            res.rc_count,
            res.path_count,
            res.xbar,
            res.mbar,
            if res.xbar == res.mbar { "yes" } else { "no" },
            if ok { "yes" } else { "no" },
        )?;
        writeln!(out, "{}", if timing { format!("\t{}", res.millis) } else { String::new() })?;
        if let Some(f) = res.failure {
            eprintln!("{f}");
        }
    }
    if timing {
        writeln!(out, "# cells={} max_ms={max_ms}", cells.len())?;
    }
    out.flush().map_err(|e: io::Error| Failure::Usage(e.to_string()))?;
    Ok(all_ok)
}
