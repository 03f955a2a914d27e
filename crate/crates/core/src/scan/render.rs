use std::fmt::Write as _;
use std::io::Write;

use super::RegionCell;
use crate::error::Result;

pub const CSV_HEADER: &str = "p,t,feasible,slack1,slack2,slack3";

const CELL_PX: f64 = 4.0;
const MARGIN: f64 = 48.0;
const FEASIBLE_FILL: &str = "#3182bd";
const INFEASIBLE_FILL: &str = "#eeeeee";

fn num(x: f64) -> String {
    format!("{x:.16e}")
}

/// One line per cell in the given order, floats with 17 significant digits.
pub fn emit_csv<W: Write>(cells: &[RegionCell], mut out: W) -> Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    for c in cells {
        writeln!(
            out,
            "{},{},{},{},{},{}",
            num(c.p),
            num(c.t),
            u8::from(c.feasible),
            num(c.slack[0]),
            num(c.slack[1]),
            num(c.slack[2])
        )?;
    }
    out.flush()?;
    Ok(())
}

fn distinct_sorted(values: impl Iterator<Item = f64>) -> Vec<f64> {
    let mut v: Vec<f64> = values.collect();
    v.sort_by(f64::total_cmp);
    v.dedup();
    v
}

/// Flat raster of the cells: `p` to the right, `|r|^2` upwards.
pub fn emit_svg<W: Write>(cells: &[RegionCell], title: &str, mut out: W) -> Result<()> {
    let ps = distinct_sorted(cells.iter().map(|c| c.p));
    let ts = distinct_sorted(cells.iter().map(|c| c.t));
    let (nx, ny) = (ps.len().max(1) as f64, ts.len().max(1) as f64);
    let (plot_w, plot_h) = (nx * CELL_PX, ny * CELL_PX);
    let (width, height) = (plot_w + 2.0 * MARGIN, plot_h + 2.0 * MARGIN);

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}">"#
    );
    let _ = writeln!(svg, r#"<title>{}</title>"#, escape(title));
    let _ = writeln!(svg, r#"<rect x="0" y="0" width="{width}" height="{height}" fill="white"/>"#);
    let _ = writeln!(svg, r#"<g shape-rendering="crispEdges">"#);
    for c in cells {
        let ix = ps.partition_point(|&p| p < c.p) as f64;
        let iy = ts.partition_point(|&t| t < c.t) as f64;
        let x = MARGIN + ix * CELL_PX;
        let y = MARGIN + plot_h - (iy + 1.0) * CELL_PX;
        let fill = if c.feasible { FEASIBLE_FILL } else { INFEASIBLE_FILL };
        let _ = writeln!(svg, r#"<rect x="{x}" y="{y}" width="{CELL_PX}" height="{CELL_PX}" fill="{fill}"/>"#);
    }
    let _ = writeln!(svg, "</g>");
    let _ = writeln!(
        svg,
        r#"<rect x="{MARGIN}" y="{MARGIN}" width="{plot_w}" height="{plot_h}" fill="none" stroke="black"/>"#
    );
    for (frac, label) in [(0.0, "0"), (0.5, "0.5"), (1.0, "1")] {
        let x = MARGIN + frac * plot_w;
        let y = MARGIN + plot_h - frac * plot_h;
        let _ = writeln!(
            svg,
            r#"<text x="{x}" y="{}" font-size="11" text-anchor="middle">{label}</text>"#,
            MARGIN + plot_h + 14.0
        );
        let _ = writeln!(
            svg,
            r#"<text x="{}" y="{}" font-size="11" text-anchor="end">{label}</text>"#,
            MARGIN - 4.0,
            y + 4.0
        );
    }
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="{}" font-size="13" text-anchor="middle">p</text>"#,
        MARGIN + plot_w / 2.0,
        height - 12.0
    );
    let _ = writeln!(
        svg,
        r#"<text x="14" y="{}" font-size="13" text-anchor="middle" transform="rotate(-90 14 {})">‖r‖²</text>"#,
        MARGIN + plot_h / 2.0,
        MARGIN + plot_h / 2.0
    );
    let _ = writeln!(svg, "</svg>");
    out.write_all(svg.as_bytes())?;
    out.flush()?;
    Ok(())
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
