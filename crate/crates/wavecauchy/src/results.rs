//! Results CSV: `h,x_star,y_star,t_star,value,truth,abs_error,est_quad_error`.

use std::io::Write;

use wavecauchy_core::reconstruct::{ReconstructionResult, TargetPoint};

pub const COLUMNS: &str = "h,x_star,y_star,t_star,value,truth,abs_error,est_quad_error";

/// 15 significant digits.
pub fn num(v: f64) -> String {
    format!("{v:.14e}")
}

fn opt(v: Option<f64>) -> String {
    v.map(num).unwrap_or_default()
}

pub fn write_results<W: Write>(rows: &[(TargetPoint, ReconstructionResult)], out: W) -> std::io::Result<()> {
    let mut out = std::io::BufWriter::new(out);
    writeln!(out, "{COLUMNS}")?;
    for (tp, r) in rows {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            num(r.h),
            num(tp.x),
            num(tp.y),
            num(tp.t),
            num(r.value),
            opt(r.truth),
            opt(r.abs_error),
            num(r.quad.est_quad_error)
        )?;
    }
    out.flush()
}
