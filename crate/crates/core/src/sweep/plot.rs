//! Minimal static SVG line plots. Hand-rolled so output bytes are a pure
//! function of the input data.

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 440.0;
const MARGIN_LEFT: f64 = 70.0;
const MARGIN_RIGHT: f64 = 20.0;
const MARGIN_TOP: f64 = 40.0;
const MARGIN_BOTTOM: f64 = 50.0;
/// Values at or below zero are clamped here on log axes.
const LOG_FLOOR: f64 = 1e-16;

const PALETTE: [&str; 6] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b",
];

pub struct Series {
    pub name: String,
    pub points: Vec<(f64, f64)>,
}

pub struct LinePlot {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub log_y: bool,
    pub series: Vec<Series>,
}

impl LinePlot {
    pub fn render(&self) -> String {
        let mut xs: Vec<f64> = Vec::new();
        let mut ys: Vec<f64> = Vec::new();
        for s in &self.series {
            for &(x, y) in &s.points {
                xs.push(x);
                ys.push(self.y_value(y));
            }
        }
        let (x_min, x_max) = span(&xs, 0.0, 1.0);
        let (y_min, y_max) = span(&ys, if self.log_y { -16.0 } else { 0.0 }, 1.0);

        let x_of = |x: f64| {
            MARGIN_LEFT + (x - x_min) / (x_max - x_min) * (WIDTH - MARGIN_LEFT - MARGIN_RIGHT)
        };
        let y_of = |y: f64| {
            HEIGHT - MARGIN_BOTTOM
                - (y - y_min) / (y_max - y_min) * (HEIGHT - MARGIN_TOP - MARGIN_BOTTOM)
        };

        let mut svg = String::with_capacity(8192);
        svg.push_str(&format!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" \
             viewBox=\"0 0 {WIDTH} {HEIGHT}\">\n"
        ));
        svg.push_str("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");
        svg.push_str(&format!(
            "<text x=\"{:.1}\" y=\"22\" font-family=\"monospace\" font-size=\"15\" \
             text-anchor=\"middle\">{}</text>\n",
            WIDTH / 2.0,
            escape(&self.title)
        ));

        // frame
        svg.push_str(&format!(
            "<rect x=\"{MARGIN_LEFT}\" y=\"{MARGIN_TOP}\" width=\"{:.1}\" height=\"{:.1}\" \
             fill=\"none\" stroke=\"black\"/>\n",
            WIDTH - MARGIN_LEFT - MARGIN_RIGHT,
            HEIGHT - MARGIN_TOP - MARGIN_BOTTOM
        ));

        // x ticks at round positions
        let x_ticks = ticks(x_min, x_max, 7);
        for t in &x_ticks {
            let px = x_of(*t);
            svg.push_str(&format!(
                "<line x1=\"{px:.2}\" y1=\"{:.2}\" x2=\"{px:.2}\" y2=\"{:.2}\" stroke=\"black\"/>\n",
                HEIGHT - MARGIN_BOTTOM,
                HEIGHT - MARGIN_BOTTOM + 5.0
            ));
            svg.push_str(&format!(
                "<text x=\"{px:.2}\" y=\"{:.2}\" font-family=\"monospace\" font-size=\"11\" \
                 text-anchor=\"middle\">{}</text>\n",
                HEIGHT - MARGIN_BOTTOM + 18.0,
                trim_float(*t)
            ));
        }

        // y ticks: decades on log axes, round values otherwise
        let y_ticks = if self.log_y {
            decade_ticks(y_min, y_max)
        } else {
            ticks(y_min, y_max, 6)
        };
        for t in &y_ticks {
            let py = y_of(*t);
            svg.push_str(&format!(
                "<line x1=\"{:.2}\" y1=\"{py:.2}\" x2=\"{MARGIN_LEFT}\" y2=\"{py:.2}\" \
                 stroke=\"black\"/>\n",
                MARGIN_LEFT - 5.0
            ));
            let label = if self.log_y {
                format!("1e{}", *t as i64)
            } else {
                trim_float(*t)
            };
            svg.push_str(&format!(
                "<text x=\"{:.2}\" y=\"{:.2}\" font-family=\"monospace\" font-size=\"11\" \
                 text-anchor=\"end\">{label}</text>\n",
                MARGIN_LEFT - 8.0,
                py + 4.0
            ));
        }

        svg.push_str(&format!(
            "<text x=\"{:.1}\" y=\"{:.1}\" font-family=\"monospace\" font-size=\"13\" \
             text-anchor=\"middle\">{}</text>\n",
            MARGIN_LEFT + (WIDTH - MARGIN_LEFT - MARGIN_RIGHT) / 2.0,
            HEIGHT - 12.0,
            escape(&self.x_label)
        ));
        svg.push_str(&format!(
            "<text x=\"16\" y=\"{:.1}\" font-family=\"monospace\" font-size=\"13\" \
             text-anchor=\"middle\" transform=\"rotate(-90 16 {:.1})\">{}</text>\n",
            MARGIN_TOP + (HEIGHT - MARGIN_TOP - MARGIN_BOTTOM) / 2.0,
            MARGIN_TOP + (HEIGHT - MARGIN_TOP - MARGIN_BOTTOM) / 2.0,
            escape(&self.y_label)
        ));

        for (idx, s) in self.series.iter().enumerate() {
            let color = PALETTE[idx % PALETTE.len()];
            let coords: Vec<String> = s
                .points
                .iter()
                .map(|&(x, y)| format!("{:.2},{:.2}", x_of(x), y_of(self.y_value(y))))
                .collect();
            if coords.len() > 1 {
                svg.push_str(&format!(
                    "<polyline points=\"{}\" fill=\"none\" stroke=\"{color}\" \
                     stroke-width=\"1.5\"/>\n",
                    coords.join(" ")
                ));
            }
            for c in &coords {
                let (px, py) = c.split_once(',').expect("coordinate pair");
                svg.push_str(&format!(
                    "<circle cx=\"{px}\" cy=\"{py}\" r=\"2.5\" fill=\"{color}\"/>\n"
                ));
            }
            // legend entry
            let ly = MARGIN_TOP + 14.0 + idx as f64 * 16.0;
            svg.push_str(&format!(
                "<line x1=\"{:.1}\" y1=\"{ly:.1}\" x2=\"{:.1}\" y2=\"{ly:.1}\" \
                 stroke=\"{color}\" stroke-width=\"2\"/>\n",
                WIDTH - MARGIN_RIGHT - 120.0,
                WIDTH - MARGIN_RIGHT - 100.0
            ));
            svg.push_str(&format!(
                "<text x=\"{:.1}\" y=\"{:.1}\" font-family=\"monospace\" font-size=\"12\">{}\
                 </text>\n",
                WIDTH - MARGIN_RIGHT - 94.0,
                ly + 4.0,
                escape(&s.name)
            ));
        }

        svg.push_str("</svg>\n");
        svg
    }

    fn y_value(&self, y: f64) -> f64 {
        if self.log_y {
            y.max(LOG_FLOOR).log10()
        } else {
            y
        }
    }
}

fn span(values: &[f64], fallback_min: f64, fallback_max: f64) -> (f64, f64) {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for &v in values {
        if v.is_finite() {
            lo = lo.min(v);
            hi = hi.max(v);
        }
    }
    if !lo.is_finite() || !hi.is_finite() {
        return (fallback_min, fallback_max);
    }
    if lo == hi {
        (lo - 0.5, hi + 0.5)
    } else {
        let pad = (hi - lo) * 0.05;
        (lo - pad, hi + pad)
    }
}

fn ticks(lo: f64, hi: f64, target: usize) -> Vec<f64> {
    let raw_step = (hi - lo) / target as f64;
    let magnitude = 10f64.powf(raw_step.abs().log10().floor());
    let step = [1.0, 2.0, 2.5, 5.0, 10.0]
        .iter()
        .map(|m| m * magnitude)
        .find(|s| *s >= raw_step)
        .unwrap_or(magnitude * 10.0);
    let first = (lo / step).ceil() as i64;
    let last = (hi / step).floor() as i64;
    (first..=last).map(|k| k as f64 * step).collect()
}

fn decade_ticks(lo: f64, hi: f64) -> Vec<f64> {
    let first = lo.ceil() as i64;
    let last = hi.floor() as i64;
    let every = (((last - first) / 8).max(1)) as usize;
    (first..=last)
        .filter(|k| (k - first) as usize % every == 0)
        .map(|k| k as f64)
        .collect()
}

fn trim_float(v: f64) -> String {
    let s = format!("{v:.3}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s.is_empty() || s == "-" {
        "0".into()
    } else {
        s.to_string()
    }
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn demo_plot() -> LinePlot {
        LinePlot {
            title: "demo".into(),
            x_label: "h".into(),
            y_label: "error".into(),
            log_y: true,
            series: vec![
                Series {
                    name: "rbm".into(),
                    points: vec![(0.0, 1e-6), (0.5, 1e-4), (1.0, 1e-3)],
                },
                Series {
                    name: "vqe".into(),
                    points: vec![(0.0, 1e-2), (0.5, 1e-1), (1.0, 0.0)],
                },
            ],
        }
    }

    #[test]
    fn render_is_deterministic_and_well_formed() {
        let a = demo_plot().render();
        let b = demo_plot().render();
        assert_eq!(a, b);
        assert!(a.starts_with("<svg"));
        assert!(a.ends_with("</svg>\n"));
        assert_eq!(a.matches("<polyline").count(), 2);
        assert!(a.contains(">rbm</text>"));
        assert!(a.contains(">vqe</text>"));
    }

    #[test]
    fn zero_values_clamp_to_log_floor() {
        // the (1.0, 0.0) point must not produce NaN coordinates
        let svg = demo_plot().render();
        assert!(!svg.contains("NaN"));
    }

    #[test]
    fn tick_generation_is_sane() {
        let t = ticks(0.0, 3.0, 7);
        assert!(t.len() >= 4 && t.len() <= 9);
        assert!(t.windows(2).all(|w| w[1] > w[0]));
        let d = decade_ticks(-16.0, 0.0);
        assert!(d.contains(&-16.0) || d.contains(&-14.0));
    }
}
