//! Result documents: key-value text, one field per line.
//!
//! Field order is swivel parameters, the rim vertices of both half-clusters,
//! the active contacts with their parameters, the lattice vectors, volume
//! and density, then the convergence report. Readers only need `u`, `v` and
//! the four lattice vectors; the rest is for people and diffs.

use std::fmt::Write as _;

use anyhow::{anyhow, bail, Context, Result};
use tetrapack::cluster::{build_cluster, Side, SwivelParams};
use tetrapack::optimizer::{PackingResult, Variant};
use tetrapack::packing::LatticeBasis;
use tetrapack::verify::fmt_sig;
use tetrapack::Vec3;

pub const DOC_HEADER: &str = "tetrapack-result v1";

fn vec3(v: Vec3) -> String {
    format!("{} {} {}", fmt_sig(v.x), fmt_sig(v.y), fmt_sig(v.z))
}

/// Renders `r` as a result document.
pub fn write_result(r: &PackingResult) -> Result<String> {
    let cluster = build_cluster(r.params, 1)?;
    let mut s = String::new();
    writeln!(s, "{DOC_HEADER}")?;
    writeln!(s, "variant {}", r.variant)?;
    writeln!(s, "u {}", fmt_sig(r.params.u))?;
    writeln!(s, "v {}", fmt_sig(r.params.v))?;
    writeln!(s, "theta_u {}", fmt_sig(r.params.theta_u))?;
    writeln!(s, "theta_v {}", fmt_sig(r.params.theta_v))?;
    for side in Side::BOTH {
        let rim = cluster.half(side).rim;
        let tag = match side {
            Side::Upper => "upper",
            Side::Lower => "lower",
        };
        for (name, p) in tetrapack::cluster::Rim::<f64>::NAMES.iter().zip(rim.to_array()) {
            writeln!(s, "{tag}.{name} {}", vec3(p))?;
        }
    }
    let set = &r.active_contacts;
    writeln!(s, "contacts {}", set.len())?;
    for (c, sol) in set.constraints.iter().zip(&set.solutions) {
        writeln!(
            s,
            "contact {} {} {} {} s={} t={} gap={}",
            c.label,
            c.kind,
            c.pair,
            c.offset,
            fmt_sig(sol.s),
            fmt_sig(sol.t),
            fmt_sig(sol.gap)
        )?;
    }
    let b = &r.basis;
    for (name, v) in [("a", b.a), ("b", b.b), ("c", b.c), ("d", b.d)] {
        writeln!(s, "{name} {}", vec3(v))?;
    }
    writeln!(s, "volume {}", fmt_sig(r.volume))?;
    writeln!(s, "density {}", fmt_sig(r.density))?;
    writeln!(s, "converged {}", r.converged)?;
    writeln!(s, "iterations {}", r.iterations)?;
    writeln!(s, "max_penetration {}", fmt_sig(r.max_penetration))?;
    Ok(s)
}

/// The parts of a result document needed to rebuild a packing.
#[derive(Debug, Clone, PartialEq)]
pub struct ParsedResult {
    pub variant: Option<Variant>,
    pub params: SwivelParams<f64>,
    pub basis: LatticeBasis<f64>,
    pub volume: Option<f64>,
    pub density: Option<f64>,
}

fn lookup<'a>(text: &'a str, key: &str) -> Option<(usize, Vec<&'a str>)> {
    text.lines().enumerate().find_map(|(i, l)| {
        let mut it = l.split_whitespace();
        (it.next() == Some(key)).then(|| (i + 1, it.collect()))
    })
}

fn number(line: usize, t: &str) -> Result<f64> {
    t.parse().with_context(|| format!("line {line}: bad number `{t}`"))
}

fn scalar(text: &str, key: &str) -> Result<Option<f64>> {
    match lookup(text, key) {
        None => Ok(None),
        Some((line, f)) if f.len() == 1 => number(line, f[0]).map(Some),
        Some((line, _)) => bail!("line {line}: `{key}` takes one value"),
    }
}

fn vector(text: &str, key: &str) -> Result<Vec3> {
    let (line, f) = lookup(text, key).ok_or_else(|| anyhow!("missing field `{key}`"))?;
    match f[..] {
        [x, y, z] => Ok(Vec3::from_f64(number(line, x)?, number(line, y)?, number(line, z)?)),
        _ => bail!("line {line}: `{key}` takes three values"),
    }
}

pub fn parse_result(text: &str) -> Result<ParsedResult> {
    if text.lines().next().map(str::trim) != Some(DOC_HEADER) {
        bail!("not a result document (expected `{DOC_HEADER}` on the first line)");
    }
    let u = scalar(text, "u")?.ok_or_else(|| anyhow!("missing field `u`"))?;
    let v = scalar(text, "v")?.ok_or_else(|| anyhow!("missing field `v`"))?;
    let variant = match lookup(text, "variant") {
        Some((_, f)) if f.len() == 1 => Some(f[0].parse()?),
        _ => None,
    };
    Ok(ParsedResult {
        variant,
        params: SwivelParams::new(u, v)?,
        basis: LatticeBasis::new(vector(text, "a")?, vector(text, "b")?, vector(text, "c")?, vector(text, "d")?),
        volume: scalar(text, "volume")?,
        density: scalar(text, "density")?,
    })
}
