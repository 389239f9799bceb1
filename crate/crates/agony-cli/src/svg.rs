//! Minimal SVG heat-map emitter for confusion matrices.
//!
//! Renders a matrix as a grid of colored cells (white for zero, dark blue
//! for the panel maximum), with an optional multi-panel grid layout for
//! side-by-side comparison across sweep points.

const CELL: f64 = 14.0;
const PANEL_PAD: f64 = 26.0;

fn cell_color(value: u64, max: u64) -> String {
    if max == 0 {
        return "rgb(255,255,255)".to_owned();
    }
    let t = value as f64 / max as f64;
    let lerp = |a: f64, b: f64| (a + (b - a) * t).round() as u8;
    format!("rgb({},{},{})", lerp(255.0, 8.0), lerp(255.0, 48.0), lerp(255.0, 107.0))
}

fn panel_body(out: &mut String, matrix: &[Vec<u64>], x0: f64, y0: f64, title: &str) {
    let max = matrix.iter().flatten().copied().max().unwrap_or(0);
    out.push_str(&format!(
        "<text x=\"{x0}\" y=\"{}\" font-size=\"11\" font-family=\"sans-serif\">{}</text>\n",
        y0 - 6.0,
        title
    ));
    for (i, row) in matrix.iter().enumerate() {
        for (j, &value) in row.iter().enumerate() {
            let x = x0 + j as f64 * CELL;
            let y = y0 + i as f64 * CELL;
            out.push_str(&format!(
                "<rect x=\"{x}\" y=\"{y}\" width=\"{CELL}\" height=\"{CELL}\" fill=\"{}\" \
                 stroke=\"#ccc\" stroke-width=\"0.5\"><title>({},{}) = {}</title></rect>\n",
                cell_color(value, max),
                i + 1,
                j + 1,
                value
            ));
        }
    }
}

fn matrix_extent(matrix: &[Vec<u64>]) -> (f64, f64) {
    let rows = matrix.len() as f64;
    let cols = matrix.iter().map(Vec::len).max().unwrap_or(0) as f64;
    (cols * CELL, rows * CELL)
}

/// Renders one confusion matrix (planted classes as rows, inferred as
/// columns) as a standalone SVG document.
#[must_use]
pub fn heatmap_svg(matrix: &[Vec<u64>], title: &str) -> String {
    let (w, h) = matrix_extent(matrix);
    let width = w + 2.0 * PANEL_PAD;
    let height = h + 2.0 * PANEL_PAD;
    let mut out = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{width}\" height=\"{height}\" \
         viewBox=\"0 0 {width} {height}\">\n"
    );
    panel_body(&mut out, matrix, PANEL_PAD, PANEL_PAD, title);
    out.push_str("</svg>\n");
    out
}

/// Renders several labeled confusion matrices in a fixed-column grid —
/// one panel per sweep point.
#[must_use]
pub fn heatmap_grid_svg(panels: &[(String, Vec<Vec<u64>>)], columns: usize) -> String {
    let columns = columns.max(1);
    let panel_w = panels.iter().map(|(_, m)| matrix_extent(m).0).fold(0.0, f64::max);
    let panel_h = panels.iter().map(|(_, m)| matrix_extent(m).1).fold(0.0, f64::max);
    let pitch_x = panel_w + PANEL_PAD;
    let pitch_y = panel_h + PANEL_PAD + 10.0;
    let rows = panels.len().div_ceil(columns);
    let width = columns as f64 * pitch_x + PANEL_PAD;
    let height = rows as f64 * pitch_y + PANEL_PAD;
    let mut out = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{width}\" height=\"{height}\" \
         viewBox=\"0 0 {width} {height}\">\n"
    );
    for (idx, (title, matrix)) in panels.iter().enumerate() {
        let x0 = PANEL_PAD + (idx % columns) as f64 * pitch_x;
        let y0 = PANEL_PAD + (idx / columns) as f64 * pitch_y;
        panel_body(&mut out, matrix, x0, y0, title);
    }
    out.push_str("</svg>\n");
    out
}
