//! Density tables as CSV.

use std::fmt::Write as _;

use tetrapack::optimizer::DensitySample;
use tetrapack::verify::fmt_sig;

pub const CSV_HEADER: &str = "u,v,variant,D,V,converged,active_labels";

/// One row per sample. Labels are joined with `;` and the field is always
/// quoted, since labels of unnamed pairs contain commas.
pub fn write_csv(samples: &[DensitySample]) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "{CSV_HEADER}");
    for r in samples {
        let num = |x: f64| if x.is_finite() { fmt_sig(x) } else { String::new() };
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},\"{}\"",
            fmt_sig(r.u),
            fmt_sig(r.v),
            r.variant,
            num(r.density),
            num(r.volume),
            r.converged,
            r.active_labels.join(";")
        );
    }
    s
}
