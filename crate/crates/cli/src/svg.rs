//! SVG raster: answer neurons on top, memory cells in the middle, the input
//! stream on a shaded band at the bottom. Time runs left to right.

use std::fmt::Write;

use spikeloom::engine::{NeuronId, Raster};
use spikeloom::memory::DraftMemoryHandle;

const ROW: f64 = 6.0;
const PX_PER_MS: f64 = 0.5;
const LEFT: f64 = 70.0;
const TOP: f64 = 10.0;

struct Band {
    rows: Vec<NeuronId>,
    fill: Option<&'static str>,
    colour: &'static str,
}

fn bands(memory: &DraftMemoryHandle) -> Vec<Band> {
    let answers = Band {
        rows: vec![memory.prime_answer, memory.non_prime_answer],
        fill: None,
        colour: "#c0392b",
    };
    let cells = Band {
        rows: memory
            .cells
            .iter()
            .rev()
            .flat_map(|c| c.neurons())
            .collect(),
        fill: None,
        colour: "#1f3a93",
    };
    let select = Band {
        rows: memory.select.iter().rev().copied().collect(),
        fill: None,
        colour: "#555555",
    };
    let stream = Band {
        rows: memory.stream_neurons(),
        fill: Some("#e8e8e8"),
        colour: "#000000",
    };
    vec![answers, cells, select, stream]
}

pub fn render_raster(raster: &Raster, memory: &DraftMemoryHandle) -> String {
    let bands = bands(memory);
    let n_rows: usize = bands.iter().map(|b| b.rows.len()).sum();
    let width = LEFT + raster.duration_ms() as f64 * PX_PER_MS + 10.0;
    let height = TOP * 2.0 + n_rows as f64 * ROW;
    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width:.0}" height="{height:.0}" font-family="monospace" font-size="5">"#
    );
    let _ = writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#);

    let mut y = TOP;
    for band in &bands {
        if let Some(fill) = band.fill {
            let _ = writeln!(
                svg,
                r#"<rect x="{LEFT}" y="{y}" width="{:.1}" height="{:.1}" fill="{fill}"/>"#,
                width - LEFT - 10.0,
                band.rows.len() as f64 * ROW
            );
        }
        for &id in &band.rows {
            let mid = y + ROW / 2.0;
            let _ = writeln!(
                svg,
                r#"<text x="{:.1}" y="{:.1}" text-anchor="end">{}</text>"#,
                LEFT - 3.0,
                mid + 2.0,
                raster.label(id)
            );
            for &t in raster.spike_times(id) {
                let x = LEFT + t as f64 * PX_PER_MS;
                let _ = writeln!(
                    svg,
                    r#"<line x1="{x:.1}" y1="{:.1}" x2="{x:.1}" y2="{:.1}" stroke="{}"/>"#,
                    y + 0.5,
                    y + ROW - 0.5,
                    band.colour
                );
            }
            y += ROW;
        }
    }
    svg.push_str("</svg>\n");
    svg
}
