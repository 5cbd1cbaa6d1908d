//! CSV export of sampled Green functions.

use std::io::Write;

use crate::error::Result;
use crate::green::GreenFunction;

/// One row per stored entry per grid node: `t,row,col,re,im`.
pub fn write_green_csv<W: Write>(gf: &GreenFunction, w: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["t", "row", "col", "re", "im"])?;
    for (t, g) in gf.samples() {
        for (i, j, z) in g.stored_entries() {
            out.write_record([format!("{t:e}"), i.to_string(), j.to_string(), format!("{:e}", z.re), format!("{:e}", z.im)])?;
        }
    }
    out.flush()?;
    Ok(())
}
