use std::fmt::Write as _;

use super::{patch_totals, Patch, PatchKind, ZebraDiagram};

const PATCH_W: usize = 80;
const PATCH_H: usize = 24;
const MARGIN: usize = 20;
const GAP: usize = 16;

fn height(d: &ZebraDiagram) -> usize {
    d.columns.iter().map(Vec::len).max().unwrap_or(0)
}

/// Patch at visual row `row` (0 = top) of a bottom-aligned column.
fn at_row(col: &[Patch], rows: usize, row: usize) -> Option<&Patch> {
    let i = rows - 1 - row;
    col.get(i)
}

/// Text art, one line per patch row with the base of each column at the
/// bottom. Black patches read `## j ##`, grey `:: j ::`, links `[. l .]`,
/// the ground `[= l =]` and references `<. l .>`.
pub fn render_text(d: &ZebraDiagram) -> String {
    let inner = d
        .columns
        .iter()
        .flatten()
        .map(|p| p.label.chars().count())
        .max()
        .unwrap_or(0)
        .max(2);
    let cell_width = inner + 6;
    let cell = |p: &Patch| {
        let (open, close) = match (p.kind, p.reference, p.ground) {
            (PatchKind::Black, ..) => ("## ", " ##"),
            (PatchKind::Grey, ..) => (":: ", " ::"),
            (PatchKind::White, true, _) => ("<. ", " .>"),
            (PatchKind::White, false, true) => ("[= ", " =]"),
            (PatchKind::White, false, false) => ("[. ", " .]"),
        };
        let len = p.label.chars().count();
        let left = (inner - len) / 2;
        format!(
            "{open}{}{}{}{close}",
            " ".repeat(left),
            p.label,
            " ".repeat(inner - len - left)
        )
    };

    let mut out = format!("zebra diagram {}\n", d.name);
    let rows = height(d);
    for row in 0..rows {
        let cells: Vec<String> = d
            .columns
            .iter()
            .map(|col| at_row(col, rows, row).map_or_else(|| " ".repeat(cell_width), cell))
            .collect();
        out.push_str(cells.join("  ").trim_end());
        out.push('\n');
    }
    let (b, g, w) = patch_totals(d);
    let _ = writeln!(out, "B={b} G={g} W={w}");
    out
}

fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            _ => out.push(c),
        }
    }
    out
}

/// Standalone SVG with one rectangle and one label per owned patch.
/// References are dashed outlines carrying the link id as a tooltip.
pub fn render_svg(d: &ZebraDiagram) -> String {
    let rows = height(d);
    let cols = d.columns.len();
    let width = 2 * MARGIN + cols * PATCH_W + cols.saturating_sub(1) * GAP;
    let height = 2 * MARGIN + rows * PATCH_H;

    let mut out = String::new();
    out.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    let _ = writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{width}\" height=\"{height}\" viewBox=\"0 0 {width} {height}\">"
    );
    let _ = writeln!(out, "  <title>{}</title>", escape(&d.name));
    for (c, col) in d.columns.iter().enumerate() {
        let x = MARGIN + c * (PATCH_W + GAP);
        let _ = writeln!(out, "  <g id=\"column-{}\">", c + 1);
        for (i, p) in col.iter().enumerate() {
            let y = MARGIN + (rows - 1 - i) * PATCH_H;
            let label = escape(&p.label);
            if p.reference {
                let _ = writeln!(
                    out,
                    "    <path d=\"M{x} {y}h{PATCH_W}v{PATCH_H}h-{PATCH_W}z\" fill=\"none\" stroke=\"#000000\" stroke-dasharray=\"4 3\"><title>{label}</title></path>"
                );
                continue;
            }
            let (fill, ink) = match p.kind {
                PatchKind::Black => ("#000000", "#ffffff"),
                PatchKind::Grey => ("#808080", "#ffffff"),
                PatchKind::White => ("#ffffff", "#000000"),
            };
            let stroke_width = if p.ground { 3 } else { 1 };
            let _ = writeln!(
                out,
                "    <rect x=\"{x}\" y=\"{y}\" width=\"{PATCH_W}\" height=\"{PATCH_H}\" fill=\"{fill}\" stroke=\"#000000\" stroke-width=\"{stroke_width}\"/>"
            );
            let _ = writeln!(
                out,
                "    <text x=\"{}\" y=\"{}\" font-family=\"monospace\" font-size=\"12\" text-anchor=\"middle\" fill=\"{ink}\">{label}</text>",
                x + PATCH_W / 2,
                y + PATCH_H / 2 + 4
            );
        }
        out.push_str("  </g>\n");
    }
    out.push_str("</svg>\n");
    out
}
