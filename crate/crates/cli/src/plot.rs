//! SVG raster of a fixed-`λ_3` slice of the qubit CP tetrahedron.

use std::fmt::Write;

use gpc_core::channel::qubit::cp_condition_qubit;

pub const MIN_RESOLUTION: usize = 8;
const CELL: usize = 8;
const PAD: usize = 32;

/// Coordinate of grid index `k` on `[-1, 1]` with `resolution` points.
pub fn grid_coordinate(k: usize, resolution: usize) -> f64 {
    -1.0 + 2.0 * k as f64 / (resolution - 1) as f64
}

/// `grid[row][col]` classifies `(λ_1, λ_2) = (x_col, x_row)` at fixed `λ_3`.
pub fn tetra_grid(lambda3: f64, resolution: usize) -> Vec<Vec<bool>> {
    (0..resolution)
        .map(|row| {
            let l2 = grid_coordinate(row, resolution);
            (0..resolution)
                .map(|col| cp_condition_qubit([grid_coordinate(col, resolution), l2, lambda3]))
                .collect()
        })
        .collect()
}

pub fn render_svg(lambda3: f64, resolution: usize) -> String {
    let grid = tetra_grid(lambda3, resolution);
    let side = resolution * CELL;
    let width = side + 2 * PAD;
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{width}" viewBox="0 0 {width} {width}" data-lambda3="{lambda3}" data-resolution="{resolution}">"#
    );
    let _ = writeln!(
        s,
        r#"<title>CP region of the qubit Pauli channel at lambda3 = {lambda3}</title>"#
    );
    let _ = writeln!(
        s,
        r#"<rect x="0" y="0" width="{width}" height="{width}" fill="white"/>"#
    );
    let _ = writeln!(s, r#"<g id="cells" stroke="none">"#);
    for (row, cells) in grid.iter().enumerate() {
        // λ_2 increases upwards.
        let y = PAD + (resolution - 1 - row) * CELL;
        let l2 = grid_coordinate(row, resolution);
        for (col, &cp) in cells.iter().enumerate() {
            let x = PAD + col * CELL;
            let l1 = grid_coordinate(col, resolution);
            let fill = if cp { "#2b6cb0" } else { "#edf2f7" };
            let _ = writeln!(
                s,
                r#"<rect x="{x}" y="{y}" width="{CELL}" height="{CELL}" fill="{fill}" data-l1="{l1}" data-l2="{l2}" data-cp="{cp}"/>"#
            );
        }
    }
    let _ = writeln!(s, "</g>");
    let _ = writeln!(
        s,
        r#"<rect x="{PAD}" y="{PAD}" width="{side}" height="{side}" fill="none" stroke="black"/>"#
    );
    let base = PAD + side + 20;
    let _ = writeln!(
        s,
        r#"<text x="{PAD}" y="{base}" font-size="12">lambda1 from -1 to 1</text>"#
    );
    let _ = writeln!(
        s,
        r#"<text x="12" y="{}" font-size="12" transform="rotate(-90 12 {})">lambda2 from -1 to 1</text>"#,
        PAD + side,
        PAD + side
    );
    s.push_str("</svg>\n");
    s
}
