//! Line-oriented certificate files.
//!
//! ```text
//! tetrapack-cert v1
//! u -0.0347890167020
//! v 0.0896049714130
//! a <x> <y> <z>
//! b ...
//! c ...
//! d ...
//! cutoff <r>
//! tolerance <t>
//! volume <V>
//! density <D>
//! certified_shell <r>
//! pairs <n>
//! failures <m>
//! <pair id> <nx> <ny> <nz> <offset> <margin_a> <margin_b>
//! ```

use std::fmt::Write as _;
use std::str::FromStr;

use super::{Certificate, CertificationReport, VerifyError};
use crate::cluster::SwivelParams;
use crate::packing::{LatticeBasis, PairId};
use crate::{Plane, Vec3};

pub const CERT_HEADER: &str = "tetrapack-cert v1";

/// `x` with 12 significant digits, in positional notation for moderate
/// magnitudes and scientific notation otherwise. Zero prints as `0`.
pub fn fmt_sig(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let e = x.abs().log10().floor() as i32;
    if (-4..12).contains(&e) {
        let decimals = (11 - e).max(0) as usize;
        let s = format!("{x:.decimals$}");
        if s.trim_start_matches('-').trim_start_matches(['0', '.']).is_empty() {
            "0".to_string()
        } else {
            s
        }
    } else {
        format!("{x:.11e}")
    }
}

fn vec3(v: Vec3) -> String {
    format!("{} {} {}", fmt_sig(v.x), fmt_sig(v.y), fmt_sig(v.z))
}

pub fn write_certificates(r: &CertificationReport) -> String {
    let mut s = String::new();
    let b = &r.basis;
    let _ = writeln!(s, "{CERT_HEADER}");
    let _ = writeln!(s, "u {}", fmt_sig(r.params.u));
    let _ = writeln!(s, "v {}", fmt_sig(r.params.v));
    for (name, v) in [("a", b.a), ("b", b.b), ("c", b.c), ("d", b.d)] {
        let _ = writeln!(s, "{name} {}", vec3(v));
    }
    let _ = writeln!(s, "cutoff {}", fmt_sig(r.cutoff));
    let _ = writeln!(s, "tolerance {}", fmt_sig(r.tolerance));
    let _ = writeln!(s, "volume {}", fmt_sig(r.volume));
    let _ = writeln!(s, "density {}", fmt_sig(r.density));
    let _ = writeln!(s, "certified_shell {}", fmt_sig(r.certified_shell));
    let _ = writeln!(s, "pairs {}", r.certificates.len());
    let _ = writeln!(s, "failures {}", r.failures.len());
    for c in &r.certificates {
        let _ = writeln!(
            s,
            "{} {} {} {} {}",
            c.pair,
            vec3(c.plane.normal),
            fmt_sig(c.plane.offset),
            fmt_sig(c.margin_a),
            fmt_sig(c.margin_b)
        );
    }
    s
}

struct Lines<'a> {
    inner: std::iter::Enumerate<std::str::Lines<'a>>,
    line: usize,
}

impl<'a> Lines<'a> {
    fn err(&self, msg: impl Into<String>) -> VerifyError {
        VerifyError::Format {
            line: self.line,
            msg: msg.into(),
        }
    }

    fn next_line(&mut self) -> Result<&'a str, VerifyError> {
        let (i, l) = self.inner.next().ok_or_else(|| self.err("unexpected end of file"))?;
        self.line = i + 1;
        Ok(l)
    }

    fn field(&mut self, key: &str) -> Result<Vec<&'a str>, VerifyError> {
        let l = self.next_line()?;
        let mut it = l.split_whitespace();
        if it.next() != Some(key) {
            return Err(self.err(format!("expected `{key}`")));
        }
        Ok(it.collect())
    }

    fn num<T: FromStr>(&self, t: &str) -> Result<T, VerifyError> {
        t.parse().map_err(|_| self.err(format!("bad number `{t}`")))
    }

    fn scalar<T: FromStr>(&mut self, key: &str) -> Result<T, VerifyError> {
        match self.field(key)?[..] {
            [t] => self.num(t),
            _ => Err(self.err(format!("`{key}` takes one value"))),
        }
    }

    fn vector(&mut self, key: &str) -> Result<Vec3, VerifyError> {
        match self.field(key)?[..] {
            [x, y, z] => Ok(Vec3::from_f64(self.num(x)?, self.num(y)?, self.num(z)?)),
            _ => Err(self.err(format!("`{key}` takes three values"))),
        }
    }
}

/// Parses a certificate file. Failures are recomputed from the stored
/// margins and tolerance.
pub fn parse_certificates(text: &str) -> Result<CertificationReport, VerifyError> {
    let mut p = Lines {
        inner: text.lines().enumerate(),
        line: 0,
    };
    if p.next_line()?.trim() != CERT_HEADER {
        return Err(p.err(format!("expected `{CERT_HEADER}`")));
    }
    let u = p.scalar("u")?;
    let v = p.scalar("v")?;
    let params = SwivelParams::new(u, v)?;
    let basis = LatticeBasis::new(p.vector("a")?, p.vector("b")?, p.vector("c")?, p.vector("d")?);
    let cutoff = p.scalar("cutoff")?;
    let tolerance: f64 = p.scalar("tolerance")?;
    let volume = p.scalar("volume")?;
    let density = p.scalar("density")?;
    let certified_shell = p.scalar("certified_shell")?;
    let n: usize = p.scalar("pairs")?;
    let n_fail: usize = p.scalar("failures")?;
    let mut certificates = Vec::with_capacity(n);
    for _ in 0..n {
        let l = p.next_line()?;
        let t: Vec<&str> = l.split_whitespace().collect();
        let [id, nx, ny, nz, off, ma, mb] = t[..] else {
            return Err(p.err("certificate record needs 7 fields"));
        };
        let pair = PairId::from_str(id).map_err(|e| p.err(e.to_string()))?;
        certificates.push(Certificate {
            pair,
            plane: Plane {
                normal: Vec3::from_f64(p.num(nx)?, p.num(ny)?, p.num(nz)?),
                offset: p.num(off)?,
            },
            margin_a: p.num(ma)?,
            margin_b: p.num(mb)?,
        });
    }
    let failures: Vec<PairId> = certificates
        .iter()
        .filter(|c| c.clearance() < -tolerance)
        .map(|c| c.pair)
        .collect();
    if failures.len() != n_fail {
        return Err(p.err(format!("header lists {n_fail} failures, records show {}", failures.len())));
    }
    Ok(CertificationReport {
        params,
        basis,
        cutoff,
        tolerance,
        volume,
        density,
        certificates,
        failures,
        certified_shell,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn significant_digits() {
        assert_eq!(fmt_sig(61.647870634123), "61.6478706341");
        assert_eq!(fmt_sig(0.778615700855), "0.778615700855");
        assert_eq!(fmt_sig(-0.034789016702), "-0.0347890167020");
        assert_eq!(fmt_sig(0.0), "0");
        assert_eq!(fmt_sig(-0.0), "0");
        assert_eq!(fmt_sig(1.5e-9), "1.50000000000e-9");
        assert_eq!(fmt_sig(3.0), "3.00000000000");
    }

    #[test]
    fn header_is_checked() {
        let err = parse_certificates("tetrapack-cert v2\n").unwrap_err();
        assert!(matches!(err, VerifyError::Format { line: 1, .. }));
    }
}
