//! Output plumbing: 12-significant-digit float formatting, atomic file writes,
//! CSV/JSON serialisation and small SVG plots.

use crate::arctic::HexPoint;
use crate::equilibrium::Arc;
use crate::error::{Error, Result};
use crate::numeric::hp::{self, Hp};
use crate::sampler::{self, PlanePartition, Tile};
use num_complex::Complex64;
use serde::Serialize;
use serde_json::Value;
use std::fmt::Write as _;
use std::io::Write as _;
use std::path::Path;

pub const SIGNIFICANT_DIGITS: usize = 12;

/// Shortest decimal with at most 12 significant digits; plain notation for
/// moderate magnitudes, exponent notation otherwise.
pub fn fmt_f64(x: f64) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{:.*e}", SIGNIFICANT_DIGITS - 1, x);
    let (mant, exp) = sci.split_once('e').expect("exponent");
    let exp: i32 = exp.parse().expect("exponent");
    if (-5..15).contains(&exp) {
        let decimals = (SIGNIFICANT_DIGITS as i32 - 1 - exp).max(0) as usize;
        trim_zeros(format!("{:.*}", decimals, x))
    } else {
        format!("{}e{}", trim_zeros(mant.to_string()), exp)
    }
}

fn trim_zeros(s: String) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

/// A multiprecision value in the same style, including magnitudes outside the
/// f64 range.
pub fn fmt_hp(x: &Hp) -> String {
    let f = hp::to_f64(x);
    if f == 0.0 || (f.abs() > 1e-300 && f.abs() < 1e300) {
        return fmt_f64(f);
    }
    let (sign, l) = hp::sign_log10(x);
    let mut e = l.floor();
    let mut m = 10f64.powf(l - e);
    if round_sig(m) >= 10.0 {
        m /= 10.0;
        e += 1.0;
    }
    format!("{}e{}", fmt_f64(sign * m), e as i64)
}

/// x rounded to 12 significant digits.
pub fn round_sig(x: f64) -> f64 {
    fmt_f64(x).parse().unwrap_or(x)
}

/// Writes through a temporary file in the target directory and renames it
/// into place.
pub fn atomic_write(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| Error::Io(e.error))?;
    Ok(())
}

/// RFC 4180 CSV with a header row.
pub fn csv_bytes<I>(header: &[&str], rows: I) -> Result<Vec<u8>>
where
    I: IntoIterator<Item = Vec<String>>,
{
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::CRLF)
        .from_writer(Vec::new());
    w.write_record(header)?;
    for r in rows {
        w.write_record(&r)?;
    }
    w.into_inner().map_err(|e| Error::Io(e.into_error()))
}

pub fn write_csv<I>(path: &Path, header: &[&str], rows: I) -> Result<()>
where
    I: IntoIterator<Item = Vec<String>>,
{
    atomic_write(path, &csv_bytes(header, rows)?)
}

fn round_value(v: Value) -> Value {
    match v {
        Value::Number(n) if n.is_f64() => {
            let x = round_sig(n.as_f64().unwrap_or(f64::NAN));
            serde_json::Number::from_f64(x).map(Value::Number).unwrap_or(Value::Null)
        }
        Value::Array(a) => Value::Array(a.into_iter().map(round_value).collect()),
        Value::Object(o) => Value::Object(o.into_iter().map(|(k, v)| (k, round_value(v))).collect()),
        other => other,
    }
}

/// Pretty JSON with every float rounded to 12 significant digits.
pub fn json_string<T: Serialize>(value: &T) -> Result<String> {
    let v = round_value(serde_json::to_value(value)?);
    let mut s = serde_json::to_string_pretty(&v)?;
    s.push('\n');
    Ok(s)
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    atomic_write(path, json_string(value)?.as_bytes())
}

/// An SVG 1.1 canvas over a data window, y pointing up.
pub struct Svg {
    x0: f64,
    y1: f64,
    scale: f64,
    width: f64,
    height: f64,
    body: String,
}

impl Svg {
    /// `bounds` = (xmin, xmax, ymin, ymax); the canvas is `width` pixels wide
    /// with a 5% margin.
    pub fn new(bounds: (f64, f64, f64, f64), width: f64) -> Self {
        let (xmin, xmax, ymin, ymax) = bounds;
        let pad = 0.05 * (xmax - xmin).max(ymax - ymin);
        let (x0, x1, y0, y1) = (xmin - pad, xmax + pad, ymin - pad, ymax + pad);
        let scale = width / (x1 - x0);
        Svg {
            x0,
            y1,
            scale,
            width,
            height: (y1 - y0) * scale,
            body: String::new(),
        }
    }

    fn pt(&self, p: (f64, f64)) -> String {
        format!(
            "{},{}",
            fmt_f64((p.0 - self.x0) * self.scale),
            fmt_f64((self.y1 - p.1) * self.scale)
        )
    }

    fn points(&self, pts: &[(f64, f64)]) -> String {
        pts.iter().map(|&p| self.pt(p)).collect::<Vec<_>>().join(" ")
    }

    pub fn polyline(&mut self, pts: &[(f64, f64)], stroke: &str, width: f64) {
        if pts.len() < 2 {
            return;
        }
        let _ = writeln!(
            self.body,
            r#"<polyline points="{}" fill="none" stroke="{stroke}" stroke-width="{}"/>"#,
            self.points(pts),
            fmt_f64(width)
        );
    }

    pub fn polygon(&mut self, pts: &[(f64, f64)], fill: &str, stroke: &str) {
        let _ = writeln!(
            self.body,
            r#"<polygon points="{}" fill="{fill}" stroke="{stroke}" stroke-width="0.5"/>"#,
            self.points(pts)
        );
    }

    pub fn circle(&mut self, p: (f64, f64), r: f64, fill: &str) {
        let c = self.pt(p);
        let (cx, cy) = c.split_once(',').expect("pair");
        let _ = writeln!(self.body, r#"<circle cx="{cx}" cy="{cy}" r="{}" fill="{fill}"/>"#, fmt_f64(r));
    }

    pub fn text(&mut self, p: (f64, f64), s: &str, size: f64) {
        let c = self.pt(p);
        let (x, y) = c.split_once(',').expect("pair");
        let esc = s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;");
        let _ = writeln!(
            self.body,
            r#"<text x="{x}" y="{y}" font-family="sans-serif" font-size="{}">{esc}</text>"#,
            fmt_f64(size)
        );
    }

    pub fn finish(&self) -> String {
        format!(
            "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n\
             <svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\">\n\
             <rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n{}</svg>\n",
            self.body,
            w = fmt_f64(self.width),
            h = fmt_f64(self.height)
        )
    }
}

fn c2(z: Complex64) -> (f64, f64) {
    (z.re, z.im)
}

fn draw_arc(svg: &mut Svg, arc: &Arc) {
    let circle: Vec<(f64, f64)> = (0..=256)
        .map(|k| c2(arc.arc_point(2.0 * std::f64::consts::PI * k as f64 / 256.0)))
        .collect();
    svg.polyline(&circle, "#cccccc", 1.0);
    let gamma: Vec<(f64, f64)> = (0..=256)
        .map(|k| c2(arc.arc_point(-arc.theta + 2.0 * arc.theta * k as f64 / 256.0)))
        .collect();
    svg.polyline(&gamma, "#1f77b4", 2.0);
}

/// Zeros of P_N against the arc γ₀ and the circle |z| = e^{c/2}.
pub fn zeros_svg(arc: &Arc, zeros: &[Complex64]) -> String {
    let r = 1.15 * zeros.iter().map(|z| z.norm()).fold(arc.rho, f64::max);
    let mut svg = Svg::new((-r, r, -r, r), 600.0);
    svg.polyline(&[(-r, 0.0), (r, 0.0)], "#999999", 0.5);
    svg.polyline(&[(0.0, -r), (0.0, r)], "#999999", 0.5);
    draw_arc(&mut svg, arc);
    for &z in zeros {
        svg.circle(c2(z), 3.0, "#d62728");
    }
    svg.text((-0.95 * r, 0.9 * r), &format!("c = {}, N = {}", fmt_f64(arc.c), zeros.len()), 14.0);
    svg.finish()
}

/// (ξ, η) in the regular-hexagon picture.
pub fn hex_to_plane(p: HexPoint) -> (f64, f64) {
    sampler::symmetric((1.0 + p.xi, 1.0 + p.eta))
}

fn hexagon_outline() -> Vec<(f64, f64)> {
    [(-1.0, -1.0), (-1.0, 0.0), (0.0, 1.0), (1.0, 1.0), (1.0, 0.0), (0.0, -1.0), (-1.0, -1.0)]
        .iter()
        .map(|&(xi, eta)| hex_to_plane(HexPoint { xi, eta }))
        .collect()
}

fn hexagon_canvas() -> Svg {
    Svg::new((0.0, 3f64.sqrt(), -1.0, 2.0), 500.0)
}

/// Arctic curves drawn inside the hexagon, one polyline per curve.
pub fn arctic_svg(curves: &[(String, Vec<HexPoint>)]) -> String {
    let mut svg = hexagon_canvas();
    svg.polyline(&hexagon_outline(), "black", 1.5);
    let palette = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];
    for (i, (label, pts)) in curves.iter().enumerate() {
        let colour = palette[i % palette.len()];
        let xy: Vec<(f64, f64)> = pts.iter().map(|&p| hex_to_plane(p)).collect();
        svg.polyline(&xy, colour, 1.5);
        svg.text((0.05, 1.9 - 0.1 * i as f64), label, 12.0);
    }
    svg.finish()
}

/// Level lines of Re Φ through s in the z-plane, with γ₀ for reference.
pub fn level_lines_svg(arc: &Arc, s: f64, lines: &[Vec<Complex64>]) -> String {
    let r = lines
        .iter()
        .flatten()
        .map(|z| z.norm())
        .fold(1.2 * arc.rho, f64::max)
        .min(4.0 * arc.rho);
    let mut svg = Svg::new((-r, r, -r, r), 600.0);
    svg.polyline(&[(-r, 0.0), (r, 0.0)], "#999999", 0.5);
    draw_arc(&mut svg, arc);
    for l in lines {
        let pts: Vec<(f64, f64)> = l.iter().filter(|z| z.norm() <= r).map(|&z| c2(z)).collect();
        svg.polyline(&pts, "#d62728", 1.2);
        let conj: Vec<(f64, f64)> = pts.iter().map(|&(x, y)| (x, -y)).collect();
        svg.polyline(&conj, "#d62728", 1.2);
    }
    svg.circle((s, 0.0), 4.0, "black");
    svg.finish()
}

/// A tiling as coloured lozenges in the regular hexagon.
pub fn tiling_svg(p: &PlanePartition) -> String {
    let n = p.n;
    let paths = sampler::to_paths(p);
    let nf = n as f64;
    let mut svg = hexagon_canvas();
    for (site, t) in sampler::sites(n).into_iter().zip(sampler::tiles(&paths)) {
        let fill = match t {
            Tile::I => "#e41a1c",
            Tile::II => "#377eb8",
            Tile::III => "#fdd835",
        };
        let poly: Vec<(f64, f64)> = sampler::tile_polygon(site, t)
            .iter()
            .map(|&(x, y)| sampler::symmetric((x / nf, y / nf)))
            .collect();
        svg.polygon(&poly, fill, "#333333");
    }
    svg.polyline(&hexagon_outline(), "black", 1.5);
    svg.finish()
}

/// A curve y(x) with axes through the origin.
pub fn profile_svg(points: &[(f64, f64)], label: &str) -> String {
    let (mut xmin, mut xmax, mut ymin, mut ymax) = (f64::MAX, f64::MIN, 0.0f64, f64::MIN);
    for &(x, y) in points {
        xmin = xmin.min(x);
        xmax = xmax.max(x);
        ymin = ymin.min(y);
        ymax = ymax.max(y);
    }
    if points.is_empty() || xmax <= xmin || ymax <= ymin {
        return Svg::new((0.0, 1.0, 0.0, 1.0), 600.0).finish();
    }
    let aspect = (xmax - xmin) / (ymax - ymin) * 0.6;
    let scaled: Vec<(f64, f64)> = points.iter().map(|&(x, y)| (x, y * aspect)).collect();
    let mut svg = Svg::new((xmin, xmax, ymin * aspect, ymax * aspect), 600.0);
    svg.polyline(&[(xmin, 0.0), (xmax, 0.0)], "#999999", 0.5);
    svg.polyline(&scaled, "#1f77b4", 1.5);
    svg.text((xmin, ymax * aspect), label, 13.0);
    svg.finish()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twelve_significant_digits() {
        assert_eq!(fmt_f64(0.0), "0");
        assert_eq!(fmt_f64(1.0), "1");
        assert_eq!(fmt_f64(-2.5), "-2.5");
        assert_eq!(fmt_f64(std::f64::consts::PI), "3.14159265359");
        assert_eq!(fmt_f64(1.0 / 3.0), "0.333333333333");
        assert_eq!(fmt_f64(123456789.123456789), "123456789.123");
        assert_eq!(fmt_f64(6.02214076e23), "6.02214076e23");
        assert_eq!(fmt_f64(-1.5e-9), "-1.5e-9");
        assert_eq!(fmt_f64(f64::NAN), "NaN");
        let big = hp::exp(1000.0, 128);
        assert_eq!(fmt_hp(&big), "1.97007111402e434");
        assert_eq!(fmt_hp(&-big), "-1.97007111402e434");
        assert_eq!(fmt_hp(&hp::from_f64(0.25, 64)), "0.25");
    }

    #[test]
    fn json_floats_are_rounded() {
        let s = json_string(&serde_json::json!({"x": 1.0 / 3.0, "k": 3, "v": [0.1 + 0.2]})).unwrap();
        assert!(s.contains("0.333333333333"));
        assert!(s.contains("0.3\n") || s.contains("0.3,") || s.contains("0.3\r"));
        assert!(s.contains("\"k\": 3"));
    }

    #[test]
    fn csv_quotes_fields() {
        let b = csv_bytes(&["a", "b"], vec![vec!["1".into(), "x,y".into()]]).unwrap();
        assert_eq!(String::from_utf8(b).unwrap(), "a,b\r\n1,\"x,y\"\r\n");
    }

    #[test]
    fn atomic_write_replaces_content() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("out.txt");
        atomic_write(&p, b"first").unwrap();
        atomic_write(&p, b"second").unwrap();
        assert_eq!(std::fs::read_to_string(&p).unwrap(), "second");
        assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
    }

    #[test]
    fn svg_is_well_formed() {
        let s = tiling_svg(&PlanePartition::empty(2));
        assert!(s.starts_with("<?xml"));
        assert_eq!(s.matches("<polygon").count(), 12);
        assert!(s.trim_end().ends_with("</svg>"));
    }
}
