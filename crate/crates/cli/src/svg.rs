//! Hand-rolled SVG rendering for the grasp comparison bar chart.

use fibergrip_core::sim::PolicyComparison;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 360.0;
const MARGIN_LEFT: f64 = 56.0;
const MARGIN_RIGHT: f64 = 16.0;
const MARGIN_TOP: f64 = 40.0;
const MARGIN_BOTTOM: f64 = 48.0;
const CONVENTIONAL_FILL: &str = "#9aa3ad";
const INTERACTIVE_FILL: &str = "#2e7dd1";

fn fmt(v: f64) -> String {
    // Fixed two decimals keeps the markup deterministic and readable.
    format!("{v:.2}")
}

/// Grouped bars per object: conventional vs interactive resistance, with the
/// percent change written above each pair.
pub fn grasp_bar_chart(rows: &[PolicyComparison]) -> String {
    let plot_w = WIDTH - MARGIN_LEFT - MARGIN_RIGHT;
    let plot_h = HEIGHT - MARGIN_TOP - MARGIN_BOTTOM;
    let max_value = rows
        .iter()
        .flat_map(|r| [r.conventional_n, r.interactive_n])
        .fold(1e-9_f64, f64::max);
    // Round the axis top up to a whole newton for clean gridlines.
    let axis_top = max_value.ceil().max(1.0);
    let scale = plot_h / axis_top;
    let baseline = MARGIN_TOP + plot_h;

    let mut s = String::new();
    s.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 {WIDTH} {HEIGHT}\" \
         font-family=\"sans-serif\" font-size=\"12\">\n"
    ));
    s.push_str(&format!(
        "  <text x=\"{}\" y=\"22\" font-size=\"15\" font-weight=\"bold\">\
         Grasp resistance: conventional vs interactive</text>\n",
        MARGIN_LEFT
    ));

    // Horizontal gridlines every quarter of the axis.
    for q in 0..=4 {
        let value = axis_top * q as f64 / 4.0;
        let y = baseline - value * scale;
        s.push_str(&format!(
            "  <line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"#d4d8dd\" stroke-width=\"1\"/>\n",
            fmt(MARGIN_LEFT),
            fmt(y),
            fmt(WIDTH - MARGIN_RIGHT),
            fmt(y)
        ));
        s.push_str(&format!(
            "  <text x=\"{}\" y=\"{}\" text-anchor=\"end\">{}</text>\n",
            fmt(MARGIN_LEFT - 6.0),
            fmt(y + 4.0),
            fmt(value)
        ));
    }
    s.push_str(&format!(
        "  <text x=\"14\" y=\"{}\" transform=\"rotate(-90 14 {})\" text-anchor=\"middle\">\
         resistance (N)</text>\n",
        fmt(MARGIN_TOP + plot_h / 2.0),
        fmt(MARGIN_TOP + plot_h / 2.0)
    ));

    let group_w = plot_w / rows.len().max(1) as f64;
    let bar_w = (group_w * 0.32).min(48.0);
    for (i, row) in rows.iter().enumerate() {
        let center = MARGIN_LEFT + group_w * (i as f64 + 0.5);
        let pairs = [
            (center - bar_w - 2.0, row.conventional_n, CONVENTIONAL_FILL),
            (center + 2.0, row.interactive_n, INTERACTIVE_FILL),
        ];
        for (x, value, fill) in pairs {
            let h = value * scale;
            s.push_str(&format!(
                "  <rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"{}\"/>\n",
                fmt(x),
                fmt(baseline - h),
                fmt(bar_w),
                fmt(h),
                fill
            ));
            s.push_str(&format!(
                "  <text x=\"{}\" y=\"{}\" text-anchor=\"middle\" font-size=\"10\">{}</text>\n",
                fmt(x + bar_w / 2.0),
                fmt(baseline - h - 4.0),
                fmt(value)
            ));
        }
        s.push_str(&format!(
            "  <text x=\"{}\" y=\"{}\" text-anchor=\"middle\">{}</text>\n",
            fmt(center),
            fmt(baseline + 18.0),
            row.object
        ));
        s.push_str(&format!(
            "  <text x=\"{}\" y=\"{}\" text-anchor=\"middle\" font-size=\"10\">{}%</text>\n",
            fmt(center),
            fmt(baseline + 32.0),
            format!("{:+.1}", row.pct_change)
        ));
    }

    // Legend.
    let legend_x = WIDTH - MARGIN_RIGHT - 170.0;
    s.push_str(&format!(
        "  <rect x=\"{}\" y=\"10\" width=\"12\" height=\"12\" fill=\"{}\"/>\n",
        fmt(legend_x),
        CONVENTIONAL_FILL
    ));
    s.push_str(&format!(
        "  <text x=\"{}\" y=\"20\">conventional</text>\n",
        fmt(legend_x + 16.0)
    ));
    s.push_str(&format!(
        "  <rect x=\"{}\" y=\"10\" width=\"12\" height=\"12\" fill=\"{}\"/>\n",
        fmt(legend_x + 104.0),
        INTERACTIVE_FILL
    ));
    s.push_str(&format!(
        "  <text x=\"{}\" y=\"20\">interactive</text>\n",
        fmt(legend_x + 120.0)
    ));
    s.push_str("</svg>\n");
    s
}
