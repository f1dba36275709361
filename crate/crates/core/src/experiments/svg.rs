//! Minimal SVG rendering of a [`ResultTable`]: line plots and heatmaps.
//! The output depends only on the table.

use std::fmt::Write as _;

use super::table::{PlotSpec, ResultTable};

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 420.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 150.0;
const TOP: f64 = 30.0;
const BOTTOM: f64 = 50.0;
const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf",
];

struct Frame {
    x0: f64,
    x1: f64,
    y0: f64,
    y1: f64,
}

impl Frame {
    fn new(xs: impl Iterator<Item = f64> + Clone, ys: impl Iterator<Item = f64> + Clone) -> Self {
        let (x0, x1) = bounds(xs);
        let (y0, y1) = bounds(ys);
        Frame { x0, x1, y0, y1 }
    }

    fn px(&self, x: f64) -> f64 {
        LEFT + (x - self.x0) / (self.x1 - self.x0) * (WIDTH - LEFT - RIGHT)
    }

    fn py(&self, y: f64) -> f64 {
        HEIGHT - BOTTOM - (y - self.y0) / (self.y1 - self.y0) * (HEIGHT - TOP - BOTTOM)
    }
}

fn bounds(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = values.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
    if !lo.is_finite() {
        return (0.0, 1.0);
    }
    if hi - lo <= f64::EPSILON * lo.abs().max(1.0) {
        let pad = 0.5 * lo.abs().max(1e-12);
        return (lo - pad, hi + pad);
    }
    (lo, hi)
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn label(table: &ResultTable, name: &str) -> String {
    match table.columns.iter().find(|c| c.name == name) {
        Some(c) if !c.unit.is_empty() && c.unit != "1" => format!("{} [{}]", c.name, c.unit),
        _ => name.to_string(),
    }
}

fn header(out: &mut String, title: &str) {
    writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    )
    .unwrap();
    writeln!(out, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#).unwrap();
    writeln!(
        out,
        r#"<text x="{}" y="18" text-anchor="middle">{}</text>"#,
        WIDTH / 2.0,
        escape(title)
    )
    .unwrap();
}

fn axes(out: &mut String, f: &Frame, xlabel: &str, ylabel: &str) {
    let (l, r, t, b) = (LEFT, WIDTH - RIGHT, TOP, HEIGHT - BOTTOM);
    writeln!(
        out,
        r#"<rect x="{l}" y="{t}" width="{}" height="{}" fill="none" stroke="black"/>"#,
        r - l,
        b - t
    )
    .unwrap();
    for k in 0..=4 {
        let s = k as f64 / 4.0;
        let x = f.x0 + s * (f.x1 - f.x0);
        let y = f.y0 + s * (f.y1 - f.y0);
        writeln!(
            out,
            r#"<text x="{:.2}" y="{}" text-anchor="middle">{}</text>"#,
            f.px(x),
            b + 16.0,
            tick(x)
        )
        .unwrap();
        writeln!(
            out,
            r#"<text x="{}" y="{:.2}" text-anchor="end">{}</text>"#,
            l - 4.0,
            f.py(y) + 4.0,
            tick(y)
        )
        .unwrap();
    }
    writeln!(
        out,
        r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#,
        (l + r) / 2.0,
        HEIGHT - 12.0,
        escape(xlabel)
    )
    .unwrap();
    writeln!(
        out,
        r#"<text x="16" y="{0}" text-anchor="middle" transform="rotate(-90 16 {0})">{1}</text>"#,
        (t + b) / 2.0,
        escape(ylabel)
    )
    .unwrap();
}

fn tick(v: f64) -> String {
    if v != 0.0 && (v.abs() < 1e-2 || v.abs() >= 1e4) {
        format!("{v:.2e}")
    } else {
        format!("{v:.3}")
    }
}

/// Blue-white-red ramp for `s ∈ [0, 1]`.
fn color(s: f64) -> String {
    let s = s.clamp(0.0, 1.0);
    let (r, g, b) = if s < 0.5 {
        let u = s / 0.5;
        (255.0 * u, 255.0 * u, 255.0)
    } else {
        let u = (s - 0.5) / 0.5;
        (255.0, 255.0 * (1.0 - u), 255.0 * (1.0 - u))
    };
    format!("#{:02x}{:02x}{:02x}", r.round() as u8, g.round() as u8, b.round() as u8)
}

fn lines(table: &ResultTable, x: &str, ys: &[String], groups: &[String], out: &mut String) -> Option<()> {
    let xi = table.column_index(x)?;
    let yi: Vec<usize> = ys.iter().map(|y| table.column_index(y)).collect::<Option<_>>()?;
    let gi: Vec<usize> = groups.iter().map(|g| table.column_index(g)).collect::<Option<_>>()?;
    let f = Frame::new(
        table.rows.iter().map(|r| r[xi]),
        table.rows.iter().flat_map(|r| yi.iter().map(move |&i| r[i])),
    );
    let ylabel = if ys.len() == 1 {
        label(table, &ys[0])
    } else {
        String::new()
    };
    axes(out, &f, &label(table, x), &ylabel);

    let key = |r: &Vec<f64>| gi.iter().map(|&g| r[g]).collect::<Vec<f64>>();
    let mut keys: Vec<Vec<f64>> = table.rows.iter().map(key).collect();
    keys.sort_by(|a, b| {
        a.iter()
            .zip(b)
            .map(|(u, v)| u.total_cmp(v))
            .find(|o| o.is_ne())
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    keys.dedup();

    let mut series = 0;
    for k in &keys {
        let tag: Vec<String> = groups.iter().zip(k).map(|(g, v)| format!("{g}={v}")).collect();
        for (n, &i) in yi.iter().enumerate() {
            let pts: Vec<String> = table
                .rows
                .iter()
                .filter(|r| key(r) == *k)
                .map(|r| format!("{:.2},{:.2}", f.px(r[xi]), f.py(r[i])))
                .collect();
            let c = PALETTE[series % PALETTE.len()];
            writeln!(
                out,
                r#"<polyline fill="none" stroke="{c}" stroke-width="1.5" points="{}"/>"#,
                pts.join(" ")
            )
            .unwrap();
            let name = match (tag.is_empty(), yi.len()) {
                (true, _) => ys[n].clone(),
                (false, 1) => tag.join(" "),
                _ => format!("{} {}", ys[n], tag.join(" ")),
            };
            let ly = TOP + 14.0 + 16.0 * series as f64;
            let lx = WIDTH - RIGHT + 10.0;
            writeln!(
                out,
                r#"<line x1="{lx}" y1="{0}" x2="{1}" y2="{0}" stroke="{c}" stroke-width="2"/>"#,
                ly - 4.0,
                lx + 18.0
            )
            .unwrap();
            writeln!(out, r#"<text x="{}" y="{ly}">{}</text>"#, lx + 22.0, escape(&name)).unwrap();
            series += 1;
        }
    }
    Some(())
}

fn cells(out: &mut String, f: &Frame, xs: &[f64], ys: &[f64], value: impl Fn(usize, usize) -> Option<f64>, vmax: f64) {
    let edges = |v: &[f64], k: usize| -> (f64, f64) {
        let lo = if k == 0 {
            v[0] - (v.get(1).unwrap_or(&(v[0] + 1.0)) - v[0]) / 2.0
        } else {
            (v[k - 1] + v[k]) / 2.0
        };
        let hi = if k + 1 == v.len() {
            v[k] + (v[k] - v.get(k.wrapping_sub(1)).copied().unwrap_or(v[k] - 1.0)) / 2.0
        } else {
            (v[k] + v[k + 1]) / 2.0
        };
        (lo, hi)
    };
    for (i, _) in xs.iter().enumerate() {
        let (xa, xb) = edges(xs, i);
        for (j, _) in ys.iter().enumerate() {
            let Some(v) = value(i, j) else { continue };
            let (ya, yb) = edges(ys, j);
            writeln!(
                out,
                r#"<rect x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="{}"/>"#,
                f.px(xa),
                f.py(yb),
                (f.px(xb) - f.px(xa)).abs() + 0.3,
                (f.py(ya) - f.py(yb)).abs() + 0.3,
                color(if vmax > 0.0 { 0.5 + 0.5 * v / vmax } else { 0.5 })
            )
            .unwrap();
        }
    }
}

fn colorbar(out: &mut String, vmin: f64, vmax: f64) {
    let x = WIDTH - RIGHT + 20.0;
    let h = HEIGHT - TOP - BOTTOM;
    for k in 0..50 {
        let s = 1.0 - k as f64 / 49.0;
        let v = vmin + s * (vmax - vmin);
        let c = color(if vmax.abs().max(vmin.abs()) > 0.0 {
            0.5 + 0.5 * v / vmax.abs().max(vmin.abs())
        } else {
            0.5
        });
        writeln!(
            out,
            r#"<rect x="{x}" y="{:.2}" width="16" height="{:.2}" fill="{c}"/>"#,
            TOP + h * k as f64 / 50.0,
            h / 50.0 + 0.3
        )
        .unwrap();
    }
    writeln!(
        out,
        r#"<text x="{}" y="{}">{}</text>"#,
        x + 20.0,
        TOP + 10.0,
        tick(vmax)
    )
    .unwrap();
    writeln!(
        out,
        r#"<text x="{}" y="{}">{}</text>"#,
        x + 20.0,
        HEIGHT - BOTTOM,
        tick(vmin)
    )
    .unwrap();
}

fn heatmap(table: &ResultTable, x: &str, ys: &[String], out: &mut String) -> Option<()> {
    let xi = table.column_index(x)?;
    let yi: Vec<usize> = ys.iter().map(|y| table.column_index(y)).collect::<Option<_>>()?;
    let xs: Vec<f64> = table.rows.iter().map(|r| r[xi]).collect();
    let idx: Vec<f64> = (0..yi.len()).map(|k| k as f64).collect();
    let f = Frame {
        x0: bounds(xs.iter().copied()).0,
        x1: bounds(xs.iter().copied()).1,
        y0: -0.5,
        y1: yi.len() as f64 - 0.5,
    };
    let (vmin, vmax) = bounds(table.rows.iter().flat_map(|r| yi.iter().map(move |&i| r[i])));
    let scale = vmax.abs().max(vmin.abs());
    cells(out, &f, &xs, &idx, |i, j| Some(table.rows[i][yi[j]]), scale);
    axes(out, &f, &label(table, x), "");
    colorbar(out, vmin.min(0.0), vmax);
    let step = (ys.len() / 17).max(1);
    for (k, name) in ys.iter().enumerate().step_by(step) {
        writeln!(
            out,
            r#"<text x="{}" y="{:.2}" text-anchor="end" font-size="9">{}</text>"#,
            LEFT - 40.0,
            f.py(k as f64) + 3.0,
            escape(name)
        )
        .unwrap();
    }
    Some(())
}

fn grid(table: &ResultTable, x: &str, y: &str, value: &str, out: &mut String) -> Option<()> {
    let (xi, yi, vi) = (
        table.column_index(x)?,
        table.column_index(y)?,
        table.column_index(value)?,
    );
    let uniq = |i: usize| {
        let mut v: Vec<f64> = table.rows.iter().map(|r| r[i]).collect();
        v.sort_by(f64::total_cmp);
        v.dedup();
        v
    };
    let (xs, ys) = (uniq(xi), uniq(yi));
    let mut lookup = vec![None; xs.len() * ys.len()];
    for r in &table.rows {
        let a = xs.binary_search_by(|v| v.total_cmp(&r[xi])).ok()?;
        let b = ys.binary_search_by(|v| v.total_cmp(&r[yi])).ok()?;
        lookup[a * ys.len() + b] = Some(r[vi]);
    }
    let half = |v: &[f64]| if v.len() > 1 { (v[1] - v[0]) / 2.0 } else { 0.5 };
    let f = Frame {
        x0: xs[0] - half(&xs),
        x1: xs[xs.len() - 1] + half(&xs),
        y0: ys[0] - half(&ys),
        y1: ys[ys.len() - 1] + half(&ys),
    };
    let (vmin, vmax) = bounds(table.rows.iter().map(|r| r[vi]));
    let scale = vmax.abs().max(vmin.abs());
    cells(out, &f, &xs, &ys, |i, j| lookup[i * ys.len() + j], scale);
    axes(out, &f, &label(table, x), &label(table, y));
    colorbar(out, vmin.min(0.0), vmax);
    writeln!(
        out,
        r#"<text x="{}" y="{}">{}</text>"#,
        WIDTH - RIGHT + 10.0,
        TOP - 8.0,
        escape(&label(table, value))
    )
    .unwrap();
    Some(())
}

/// Renders the table's plot, or `None` when it has no plot or no rows.
pub fn render(table: &ResultTable) -> Option<String> {
    let plot = table.plot.as_ref()?;
    if table.rows.is_empty() {
        return None;
    }
    let mut out = String::new();
    header(&mut out, table.name());
    match plot {
        PlotSpec::Lines { x, ys, groups } => lines(table, x, ys, groups, &mut out)?,
        PlotSpec::Heatmap { x, ys } => heatmap(table, x, ys, &mut out)?,
        PlotSpec::Grid { x, y, value } => grid(table, x, y, value, &mut out)?,
    }
    out.push_str("</svg>\n");
    Some(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiments::table::{Column, Metadata};

    fn table(plot: PlotSpec) -> ResultTable {
        let meta = Metadata {
            experiment: "t".into(),
            table: "t".into(),
            schema_version: 1,
            code_version: "0".into(),
            config: serde_json::Value::Null,
            seeds: vec![],
            timestamp: 0,
            summary: Default::default(),
        };
        let mut t = ResultTable::new(
            vec![
                Column::coord("x", "1"),
                Column::coord("n", "1"),
                Column::value("a", "J"),
                Column::value("b", "J"),
            ],
            meta,
        )
        .with_plot(plot);
        for n in [1.0, 2.0] {
            for k in 0..5 {
                let x = k as f64 * 0.25;
                t.push(vec![x, n, x * n, -x]).unwrap();
            }
        }
        t
    }

    #[test]
    fn renders_every_kind_deterministically() {
        let kinds = [
            PlotSpec::Lines {
                x: "x".into(),
                ys: vec!["a".into(), "b".into()],
                groups: vec!["n".into()],
            },
            PlotSpec::Heatmap {
                x: "x".into(),
                ys: vec!["a".into(), "b".into()],
            },
            PlotSpec::Grid {
                x: "x".into(),
                y: "n".into(),
                value: "a".into(),
            },
        ];
        for plot in kinds {
            let t = table(plot);
            let svg = render(&t).unwrap();
            assert!(svg.starts_with("<svg") && svg.ends_with("</svg>\n"));
            assert_eq!(svg, render(&t).unwrap());
        }
    }

    #[test]
    fn unknown_columns_render_nothing() {
        let t = table(PlotSpec::Lines {
            x: "x".into(),
            ys: vec!["missing".into()],
            groups: vec![],
        });
        assert!(render(&t).is_none());
    }

    #[test]
    fn ramp_endpoints() {
        assert_eq!(color(0.0), "#0000ff");
        assert_eq!(color(0.5), "#ffffff");
        assert_eq!(color(1.0), "#ff0000");
    }
}
