//! SVG rendering of flight traces.
//!
//! Writes the SVG by hand so plots stay dependency-free, diffable, and
//! byte-identical across reruns. The ground-projected path is colored by
//! mode, true targets appear as crosses, and confirmed/discarded check
//! points are annotated.

use crate::engine::Trace;
use crate::geometry::Point;
use crate::mission::Mode;
use crate::world::Scenario;

const WIDTH: f64 = 800.0;
const SCAN_COLOR: &str = "#1f77b4";
const CHECK_COLOR: &str = "#ff7f0e";
const TARGET_COLOR: &str = "#2c2c2c";
const CONFIRM_COLOR: &str = "#2ca02c";
const DISCARD_COLOR: &str = "#d62728";

struct Frame {
    min_x: f64,
    max_y: f64,
    scale: f64,
    width: f64,
    height: f64,
}

impl Frame {
    fn map(&self, p: Point) -> (f64, f64) {
        ((p.x - self.min_x) * self.scale, (self.max_y - p.y) * self.scale)
    }
}

fn fmt(v: f64) -> String {
    format!("{v:.2}")
}

/// Positions pulled out of trace detail strings (`confirm:x;y` etc.).
fn detail_positions(trace: &Trace, prefix: &str) -> Vec<Point> {
    let mut out = Vec::new();
    for record in &trace.records {
        for part in record.detail.split('|') {
            if let Some(rest) = part.strip_prefix(prefix) {
                let mut it = rest.split(';');
                if let (Some(x), Some(y)) = (it.next(), it.next()) {
                    if let (Ok(x), Ok(y)) = (x.parse(), y.parse()) {
                        out.push(Point::new(x, y));
                    }
                }
            }
        }
    }
    out
}

/// Render the ground-projected flight path over the scenario. Deterministic:
/// identical inputs produce identical bytes.
pub fn render_svg(trace: &Trace, scenario: &Scenario) -> String {
    let area = scenario.area;
    // Expand the frame to cover any excursion outside the nominal area.
    let mut min_x = area.x_min;
    let mut max_x = area.x_max;
    let mut min_y = area.y_min;
    let mut max_y = area.y_max;
    for r in &trace.records {
        min_x = min_x.min(r.position.x);
        max_x = max_x.max(r.position.x);
        min_y = min_y.min(r.position.y);
        max_y = max_y.max(r.position.y);
    }
    let margin = 0.05 * (max_x - min_x).max(max_y - min_y).max(1.0);
    min_x -= margin;
    max_x += margin;
    min_y -= margin;
    max_y += margin;

    let scale = WIDTH / (max_x - min_x);
    let frame = Frame {
        min_x,
        max_y,
        scale,
        width: WIDTH,
        height: (max_y - min_y) * scale,
    };

    let mut svg = String::new();
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}\" height=\"{}\" viewBox=\"0 0 {} {}\">\n",
        fmt(frame.width),
        fmt(frame.height),
        fmt(frame.width),
        fmt(frame.height)
    ));
    svg.push_str("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");

    // Mission area outline.
    let (ax, ay) = frame.map(Point::new(area.x_min, area.y_max));
    svg.push_str(&format!(
        "<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"#999999\" stroke-dasharray=\"6 4\"/>\n",
        fmt(ax),
        fmt(ay),
        fmt(area.width() * frame.scale),
        fmt(area.height() * frame.scale)
    ));

    // Flight path split into constant-mode polylines. A segment takes the
    // mode of its end record (the mode commanded during that step).
    let records = &trace.records;
    let mut i = 0;
    while i + 1 < records.len() {
        let mode = records[i + 1].mode;
        let mut pts = vec![records[i].position];
        let mut j = i + 1;
        while j < records.len() && records[j].mode == mode {
            pts.push(records[j].position);
            j += 1;
        }
        let color = match mode {
            Mode::Scan => SCAN_COLOR,
            Mode::Check => CHECK_COLOR,
        };
        let coords: Vec<String> = pts
            .iter()
            .map(|p| {
                let (x, y) = frame.map(*p);
                format!("{},{}", fmt(x), fmt(y))
            })
            .collect();
        svg.push_str(&format!(
            "<polyline points=\"{}\" fill=\"none\" stroke=\"{}\" stroke-width=\"1.5\"/>\n",
            coords.join(" "),
            color
        ));
        i = j - 1;
    }

    // True targets as crosses.
    for t in &scenario.targets {
        let (x, y) = frame.map(t.position());
        let d = 5.0;
        svg.push_str(&format!(
            "<path d=\"M {} {} L {} {} M {} {} L {} {}\" stroke=\"{}\" stroke-width=\"1.5\"/>\n",
            fmt(x - d),
            fmt(y - d),
            fmt(x + d),
            fmt(y + d),
            fmt(x - d),
            fmt(y + d),
            fmt(x + d),
            fmt(y - d),
            TARGET_COLOR
        ));
    }

    for p in detail_positions(trace, "confirm:") {
        let (x, y) = frame.map(p);
        svg.push_str(&format!(
            "<circle cx=\"{}\" cy=\"{}\" r=\"4\" fill=\"none\" stroke=\"{}\" stroke-width=\"2\"/>\n",
            fmt(x),
            fmt(y),
            CONFIRM_COLOR
        ));
    }
    for p in detail_positions(trace, "discard:") {
        let (x, y) = frame.map(p);
        svg.push_str(&format!(
            "<circle cx=\"{}\" cy=\"{}\" r=\"4\" fill=\"none\" stroke=\"{}\" stroke-width=\"2\" stroke-dasharray=\"2 2\"/>\n",
            fmt(x),
            fmt(y),
            DISCARD_COLOR
        ));
    }

    // Legend.
    let legend = [
        (SCAN_COLOR, "scan path"),
        (CHECK_COLOR, "check path"),
        (TARGET_COLOR, "target"),
        (CONFIRM_COLOR, "confirmed"),
        (DISCARD_COLOR, "discarded"),
    ];
    for (k, (color, label)) in legend.iter().enumerate() {
        let y = 16.0 + 16.0 * k as f64;
        svg.push_str(&format!(
            "<rect x=\"10\" y=\"{}\" width=\"12\" height=\"4\" fill=\"{}\"/>\n",
            fmt(y),
            color
        ));
        svg.push_str(&format!(
            "<text x=\"28\" y=\"{}\" font-family=\"sans-serif\" font-size=\"12\">{}</text>\n",
            fmt(y + 5.0),
            label
        ));
    }

    svg.push_str("</svg>\n");
    svg
}
