//! Partition diagrams: points on a line, arcs for pairs, ticks for
//! singletons, and a caption with the crossing statistics.

use std::fmt::Write;

use crate::combinatorics::PartialPartition;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RenderFormat {
    /// 7-bit text.
    Ascii,
    /// SVG 1.1.
    Svg,
}

/// Horizontal spacing between points in SVG user units.
pub const SVG_UNIT: usize = 40;

/// Heights of the arcs: a pair sits above every shorter pair it overlaps.
fn arc_levels(rho: &PartialPartition) -> Vec<((usize, usize), usize)> {
    let mut pairs = rho.pairs().to_vec();
    pairs.sort_by_key(|&(a, b)| (b - a, a));
    let mut placed: Vec<((usize, usize), usize)> = Vec::with_capacity(pairs.len());
    for (a, b) in pairs {
        let level = placed
            .iter()
            .filter(|((c, d), _)| *c <= b && a <= *d)
            .map(|(_, l)| *l)
            .max()
            .unwrap_or(0)
            + 1;
        placed.push(((a, b), level));
    }
    placed.sort();
    placed
}

/// `ι = …`, preceded by `ι′ = …` when the pairs straddle the split.
pub fn caption(rho: &PartialPartition, ascii: bool) -> String {
    let (iota, prime) = if ascii { ("iota", "iota'") } else { ("ι", "ι′") };
    match rho.iota_prime() {
        Ok(ip) => format!("{prime} = {ip}, {iota} = {}", rho.crossings()),
        Err(_) => format!("{iota} = {}", rho.crossings()),
    }
}

pub fn render_partition(rho: &PartialPartition, format: RenderFormat) -> String {
    match format {
        RenderFormat::Ascii => render_ascii(rho),
        RenderFormat::Svg => render_svg(rho),
    }
}

fn column(i: usize) -> usize {
    4 * (i - 1) + 2
}

fn render_ascii(rho: &PartialPartition) -> String {
    let n = rho.ground_size();
    let levels = arc_levels(rho);
    let top = levels.iter().map(|(_, l)| *l).max().unwrap_or(0) + 1;
    let width = column(n.max(1)) + 3;
    // grid[h] is the row at height h; height 0 holds the points
    let mut grid = vec![vec![b' '; width]; top + 1];
    for &((a, b), level) in &levels {
        let row = &mut grid[level + 1];
        row[column(a)..=column(b)].fill(b'-');
        row[column(a)] = b'+';
        row[column(b)] = b'+';
    }
    for &((a, b), level) in &levels {
        for row in grid.iter_mut().take(level + 1).skip(1) {
            row[column(a)] = b'|';
            row[column(b)] = b'|';
        }
    }
    for &s in rho.singletons() {
        grid[1][column(s)] = b'|';
    }
    for i in 1..=n {
        grid[0][column(i)] = b'*';
    }
    let split = n - rho.right_block();
    if split > 0 && split < n {
        grid[0][column(split) + 2] = b':';
    }
    let mut out = String::new();
    for row in grid.iter().rev() {
        let line = String::from_utf8(row.clone()).expect("ascii");
        out.push_str(line.trim_end());
        out.push('\n');
    }
    let mut labels = String::new();
    for i in 1..=n {
        let label = i.to_string();
        let pad = column(i) + 1 - label.len().min(column(i) + 1);
        while labels.len() < pad {
            labels.push(' ');
        }
        labels.push_str(&label);
    }
    out.push_str(&labels);
    out.push('\n');
    out.push('\n');
    out.push_str(&caption(rho, true));
    out.push('\n');
    out
}

fn render_svg(rho: &PartialPartition) -> String {
    let n = rho.ground_size();
    let u = SVG_UNIT;
    let half = u / 2;
    let width = u * (n + 1);
    let baseline = half * n.saturating_sub(1) + 30;
    let height = baseline + 70;
    let x = |i: usize| u * i;
    let mut s = String::new();
    let _ = writeln!(s, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{width}" height="{height}" viewBox="0 0 {width} {height}">"#
    );
    let _ = writeln!(s, r#"<g fill="none" stroke="black" stroke-width="1.5">"#);
    for &(a, b) in rho.pairs() {
        let r = half * (b - a);
        let _ = writeln!(s, r#"<path d="M {} {baseline} A {r} {r} 0 0 1 {} {baseline}"/>"#, x(a), x(b));
    }
    for &i in rho.singletons() {
        let _ = writeln!(s, r#"<line x1="{0}" y1="{baseline}" x2="{0}" y2="{1}"/>"#, x(i), baseline - 12);
    }
    let split = n - rho.right_block();
    if split > 0 && split < n {
        let sx = x(split) + half;
        let _ = writeln!(
            s,
            r#"<line x1="{sx}" y1="{}" x2="{sx}" y2="{}" stroke-dasharray="4 3" stroke="gray"/>"#,
            baseline - 20,
            baseline + 10
        );
    }
    let _ = writeln!(s, "</g>");
    let _ = writeln!(s, r#"<g fill="black" font-family="serif" font-size="14" text-anchor="middle">"#);
    for i in 1..=n {
        let _ = writeln!(s, r#"<circle cx="{}" cy="{baseline}" r="3"/>"#, x(i));
        let _ = writeln!(s, r#"<text x="{}" y="{}">{i}</text>"#, x(i), baseline + 22);
    }
    let _ = writeln!(s, r#"<text x="{}" y="{}">{}</text>"#, width / 2, baseline + 52, caption(rho, false));
    let _ = writeln!(s, "</g>");
    let _ = writeln!(s, "</svg>");
    s
}
