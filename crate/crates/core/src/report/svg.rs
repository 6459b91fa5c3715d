//! Minimal hand-rolled SVG assembly: deterministic strings, no templating.

/// Line/marker colors for multi-series figures, cycled in order.
pub const SERIES_PALETTE: [&str; 8] = [
    "#4c78a8", "#f58518", "#54a24b", "#e45756", "#72b7b2", "#b279a2", "#9d755d", "#bab0ac",
];

/// Sixteen stops of a perceptually uniform purple-to-yellow colormap.
const COLORMAP_16: [[u8; 3]; 16] = [
    [0x44, 0x01, 0x54],
    [0x48, 0x15, 0x67],
    [0x48, 0x26, 0x77],
    [0x45, 0x37, 0x81],
    [0x3e, 0x49, 0x89],
    [0x36, 0x5c, 0x8d],
    [0x2e, 0x6e, 0x8e],
    [0x26, 0x81, 0x8e],
    [0x21, 0x91, 0x8c],
    [0x1f, 0xa1, 0x87],
    [0x28, 0xae, 0x80],
    [0x3f, 0xbc, 0x73],
    [0x5e, 0xc9, 0x62],
    [0x90, 0xd7, 0x43],
    [0xc8, 0xe0, 0x20],
    [0xfd, 0xe7, 0x25],
];

/// Map `t ∈ [0, 1]` (clamped) onto the colormap by piecewise-linear
/// interpolation between the sixteen stops.
pub fn colormap(t: f64) -> String {
    let t = t.clamp(0.0, 1.0);
    let scaled = t * (COLORMAP_16.len() - 1) as f64;
    let lo = scaled.floor() as usize;
    let hi = (lo + 1).min(COLORMAP_16.len() - 1);
    let frac = scaled - lo as f64;
    let mix = |a: u8, b: u8| -> u8 { (a as f64 + (b as f64 - a as f64) * frac).round() as u8 };
    let [r1, g1, b1] = COLORMAP_16[lo];
    let [r2, g2, b2] = COLORMAP_16[hi];
    format!("#{:02x}{:02x}{:02x}", mix(r1, r2), mix(g1, g2), mix(b1, b2))
}

/// Fixed two-decimal coordinate formatting keeps output byte-stable.
pub fn coord(v: f64) -> String {
    let s = format!("{v:.2}");
    if s == "-0.00" {
        "0.00".to_string()
    } else {
        s
    }
}

/// Escape text content for embedding in SVG.
pub fn esc(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Accumulates SVG elements and closes the document on `finish`.
pub struct Svg {
    body: String,
}

impl Svg {
    pub fn new(width: f64, height: f64) -> Self {
        let mut body = String::new();
        body.push_str(&format!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" \
             viewBox=\"0 0 {w} {h}\" font-family=\"Helvetica, Arial, sans-serif\">\n",
            w = coord(width),
            h = coord(height),
        ));
        body.push_str(&format!(
            "<rect x=\"0\" y=\"0\" width=\"{}\" height=\"{}\" fill=\"#ffffff\"/>\n",
            coord(width),
            coord(height),
        ));
        Self { body }
    }

    pub fn rect(&mut self, x: f64, y: f64, w: f64, h: f64, attrs: &str) {
        self.body.push_str(&format!(
            "<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" {attrs}/>\n",
            coord(x),
            coord(y),
            coord(w),
            coord(h),
        ));
    }

    pub fn line(&mut self, x1: f64, y1: f64, x2: f64, y2: f64, attrs: &str) {
        self.body.push_str(&format!(
            "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" {attrs}/>\n",
            coord(x1),
            coord(y1),
            coord(x2),
            coord(y2),
        ));
    }

    fn points_attr(pts: &[(f64, f64)]) -> String {
        pts.iter()
            .map(|(x, y)| format!("{},{}", coord(*x), coord(*y)))
            .collect::<Vec<_>>()
            .join(" ")
    }

    pub fn polyline(&mut self, pts: &[(f64, f64)], attrs: &str) {
        self.body.push_str(&format!(
            "<polyline points=\"{}\" {attrs}/>\n",
            Self::points_attr(pts),
        ));
    }

    pub fn polygon(&mut self, pts: &[(f64, f64)], attrs: &str) {
        self.body.push_str(&format!(
            "<polygon points=\"{}\" {attrs}/>\n",
            Self::points_attr(pts),
        ));
    }

    pub fn circle(&mut self, cx: f64, cy: f64, r: f64, attrs: &str) {
        self.body.push_str(&format!(
            "<circle cx=\"{}\" cy=\"{}\" r=\"{}\" {attrs}/>\n",
            coord(cx),
            coord(cy),
            coord(r),
        ));
    }

    /// `anchor` is an SVG text-anchor: `start`, `middle`, or `end`.
    pub fn text(&mut self, x: f64, y: f64, anchor: &str, size: f64, fill: &str, content: &str) {
        self.body.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" text-anchor=\"{anchor}\" font-size=\"{}\" \
             fill=\"{fill}\">{}</text>\n",
            coord(x),
            coord(y),
            coord(size),
            esc(content),
        ));
    }

    /// Text rotated 90° counter-clockwise around its own position.
    pub fn vtext(&mut self, x: f64, y: f64, anchor: &str, size: f64, fill: &str, content: &str) {
        self.body.push_str(&format!(
            "<text x=\"{x}\" y=\"{y}\" text-anchor=\"{anchor}\" font-size=\"{}\" fill=\"{fill}\" \
             transform=\"rotate(-90 {x} {y})\">{}</text>\n",
            coord(size),
            esc(content),
            x = coord(x),
            y = coord(y),
        ));
    }

    pub fn finish(mut self) -> String {
        self.body.push_str("</svg>\n");
        self.body
    }
}
