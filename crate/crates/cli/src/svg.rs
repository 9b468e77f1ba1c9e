//! Self-contained SVG line charts for regret traces: one polyline, an
//! optional q05-q95 band, axis ticks, and a title. Plain text generation,
//! no plotting dependencies, no external assets.

use gfb_core::harness::TraceData;

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 500.0;
const MARGIN_L: f64 = 80.0;
const MARGIN_R: f64 = 24.0;
const MARGIN_T: f64 = 48.0;
const MARGIN_B: f64 = 56.0;

struct Scale {
    lo: f64,
    hi: f64,
    px_lo: f64,
    px_hi: f64,
}

impl Scale {
    fn map(&self, v: f64) -> f64 {
        if self.hi == self.lo {
            return (self.px_lo + self.px_hi) / 2.0;
        }
        self.px_lo + (v - self.lo) / (self.hi - self.lo) * (self.px_hi - self.px_lo)
    }
}

/// Tick positions with a "nice" step (1, 2, or 5 times a power of ten).
fn ticks(lo: f64, hi: f64, target: usize) -> Vec<f64> {
    if hi <= lo {
        return vec![lo];
    }
    let raw_step = (hi - lo) / target as f64;
    let mag = 10f64.powf(raw_step.log10().floor());
    let norm = raw_step / mag;
    let step = if norm <= 1.0 {
        1.0
    } else if norm <= 2.0 {
        2.0
    } else if norm <= 5.0 {
        5.0
    } else {
        10.0
    } * mag;
    let first = (lo / step).ceil() * step;
    let mut out = Vec::new();
    let mut v = first;
    while v <= hi + step * 1e-9 {
        out.push(v);
        v += step;
    }
    out
}

fn fmt_tick(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    let a = v.abs();
    if !(1e-3..1e6).contains(&a) {
        format!("{v:.1e}")
    } else if (v - v.round()).abs() < 1e-9 {
        format!("{}", v.round() as i64)
    } else {
        format!("{v}")
    }
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Renders a trace (single-run or aggregate) to a standalone SVG document.
pub fn render(data: &TraceData, title: &str) -> String {
    let x_lo = 0.0;
    let x_hi = *data.rounds.last().expect("non-empty trace") as f64;
    let mut y_lo = 0.0f64;
    let mut y_hi = f64::NEG_INFINITY;
    let mut take = |v: f64| {
        y_lo = y_lo.min(v);
        y_hi = y_hi.max(v);
    };
    for &v in &data.central {
        take(v);
    }
    if let Some((q05, q95)) = &data.band {
        for &v in q05.iter().chain(q95) {
            take(v);
        }
    }
    if y_hi <= y_lo {
        y_hi = y_lo + 1.0;
    }
    y_hi += (y_hi - y_lo) * 0.05;

    let sx = Scale {
        lo: x_lo,
        hi: x_hi,
        px_lo: MARGIN_L,
        px_hi: WIDTH - MARGIN_R,
    };
    let sy = Scale {
        lo: y_lo,
        hi: y_hi,
        px_lo: HEIGHT - MARGIN_B,
        px_hi: MARGIN_T,
    };

    let mut svg = String::new();
    svg.push_str(&format!(
        r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="Helvetica, Arial, sans-serif">
"#
    ));
    svg.push_str(&format!(
        "  <rect x=\"0\" y=\"0\" width=\"{WIDTH}\" height=\"{HEIGHT}\" fill=\"white\"/>\n"
    ));
    svg.push_str(&format!(
        "  <text x=\"{:.2}\" y=\"{:.2}\" font-size=\"18\" text-anchor=\"middle\">{}</text>\n",
        WIDTH / 2.0,
        MARGIN_T - 18.0,
        xml_escape(title)
    ));

    // Gridlines and tick labels.
    for tx in ticks(x_lo, x_hi, 6) {
        let px = sx.map(tx);
        svg.push_str(&format!(
            "  <line x1=\"{px:.2}\" y1=\"{:.2}\" x2=\"{px:.2}\" y2=\"{:.2}\" stroke=\"#dddddd\" stroke-width=\"1\"/>\n",
            MARGIN_T,
            HEIGHT - MARGIN_B
        ));
        svg.push_str(&format!(
            "  <text x=\"{px:.2}\" y=\"{:.2}\" font-size=\"12\" text-anchor=\"middle\">{}</text>\n",
            HEIGHT - MARGIN_B + 18.0,
            fmt_tick(tx)
        ));
    }
    for ty in ticks(y_lo, y_hi, 6) {
        let py = sy.map(ty);
        svg.push_str(&format!(
            "  <line x1=\"{:.2}\" y1=\"{py:.2}\" x2=\"{:.2}\" y2=\"{py:.2}\" stroke=\"#dddddd\" stroke-width=\"1\"/>\n",
            MARGIN_L,
            WIDTH - MARGIN_R
        ));
        svg.push_str(&format!(
            "  <text x=\"{:.2}\" y=\"{:.2}\" font-size=\"12\" text-anchor=\"end\">{}</text>\n",
            MARGIN_L - 8.0,
            py + 4.0,
            fmt_tick(ty)
        ));
    }

    // Axes.
    svg.push_str(&format!(
        "  <line x1=\"{:.2}\" y1=\"{:.2}\" x2=\"{:.2}\" y2=\"{:.2}\" stroke=\"black\" stroke-width=\"1.5\"/>\n",
        MARGIN_L,
        HEIGHT - MARGIN_B,
        WIDTH - MARGIN_R,
        HEIGHT - MARGIN_B
    ));
    svg.push_str(&format!(
        "  <line x1=\"{:.2}\" y1=\"{:.2}\" x2=\"{:.2}\" y2=\"{:.2}\" stroke=\"black\" stroke-width=\"1.5\"/>\n",
        MARGIN_L,
        MARGIN_T,
        MARGIN_L,
        HEIGHT - MARGIN_B
    ));
    svg.push_str(&format!(
        "  <text x=\"{:.2}\" y=\"{:.2}\" font-size=\"14\" text-anchor=\"middle\">round</text>\n",
        (MARGIN_L + WIDTH - MARGIN_R) / 2.0,
        HEIGHT - 12.0
    ));
    svg.push_str(&format!(
        "  <text x=\"18\" y=\"{:.2}\" font-size=\"14\" text-anchor=\"middle\" transform=\"rotate(-90 18 {:.2})\">regret</text>\n",
        (MARGIN_T + HEIGHT - MARGIN_B) / 2.0,
        (MARGIN_T + HEIGHT - MARGIN_B) / 2.0
    ));

    // Quantile band: upper edge forward, lower edge back.
    if let Some((q05, q95)) = &data.band {
        let mut d = String::from("M");
        for (i, (&r, &v)) in data.rounds.iter().zip(q95).enumerate() {
            if i > 0 {
                d.push_str(" L");
            }
            d.push_str(&format!("{:.2} {:.2}", sx.map(r as f64), sy.map(v)));
        }
        for (&r, &v) in data.rounds.iter().zip(q05).rev() {
            d.push_str(&format!(" L{:.2} {:.2}", sx.map(r as f64), sy.map(v)));
        }
        d.push('Z');
        svg.push_str(&format!(
            "  <path d=\"{d}\" fill=\"#4477aa\" fill-opacity=\"0.25\" stroke=\"none\"/>\n"
        ));
    }

    // Central polyline.
    let pts: Vec<String> = data
        .rounds
        .iter()
        .zip(&data.central)
        .map(|(&r, &v)| format!("{:.2},{:.2}", sx.map(r as f64), sy.map(v)))
        .collect();
    svg.push_str(&format!(
        "  <polyline points=\"{}\" fill=\"none\" stroke=\"#4477aa\" stroke-width=\"2\"/>\n",
        pts.join(" ")
    ));

    svg.push_str("</svg>\n");
    svg
}
