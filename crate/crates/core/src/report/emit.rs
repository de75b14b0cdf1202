//! CSV, SVG and plain-text documents for sweeps and portraits.
//!
//! Numbers are written with Rust's shortest round-trip formatting in CSV and
//! text, and with three decimals in SVG pixel space, so identical inputs give
//! identical bytes.

use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use crate::classify::{EigenKind, EigenReport, StabilityClass};
use crate::curves::{sample_curve, CurveId, RegionLabel};
use crate::equilibria::EquilibriumId;
use crate::error::{Error, Result};
use crate::model::{Rect, SystemModel};
use crate::portrait::{Portrait, Terminal};
use crate::tolerances::Tolerances;

use super::sweep::{InventoryEntry, Sweep};
use super::tuples::{class_tuple, is_admissible};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Svg,
    Text,
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(Format::Csv),
            "svg" => Ok(Format::Svg),
            "text" | "txt" => Ok(Format::Text),
            other => Err(Error::Validation(format!("unknown format {other:?} (expected csv, svg or text)"))),
        }
    }
}

/// Writes a document, creating parent directories as needed.
pub fn write_document(path: impl AsRef<Path>, doc: &str) -> Result<()> {
    let path = path.as_ref();
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            std::fs::create_dir_all(dir)?;
        }
    }
    std::fs::write(path, doc)?;
    Ok(())
}

fn num(v: f64) -> String {
    format!("{v:e}")
}

fn opt_num(v: Option<f64>) -> String {
    v.map(num).unwrap_or_default()
}

fn eigen_fields(e: Option<&EigenReport>) -> [String; 3] {
    match e.map(|e| e.kind) {
        Some(EigenKind::RealPair { l1, l2 }) => ["real".into(), num(l1), num(l2)],
        Some(EigenKind::ComplexPair { p, omega }) => ["complex".into(), num(p), num(omega)],
        None => Default::default(),
    }
}

fn entry_fields(e: &InventoryEntry) -> Vec<String> {
    let [kind, a, b] = eigen_fields(e.eigen.as_ref());
    vec![
        e.status.map(|s| s.name().to_string()).unwrap_or_else(|| "error".into()),
        e.class.map(|c| c.name()).unwrap_or_default(),
        opt_num(e.point.map(|p| p.xi1)),
        opt_num(e.point.map(|p| p.xi2)),
        kind,
        a,
        b,
    ]
}

fn csv_string(rows: impl FnOnce(&mut csv::Writer<Vec<u8>>) -> Result<()>) -> Result<String> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    rows(&mut w)?;
    let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    String::from_utf8(bytes).map_err(|e| Error::Validation(e.to_string()))
}

/// Header of the sweep CSV: `mu1, mu2, region`, then for every equilibrium
/// `status, class, xi1, xi2, eig_kind, eig_a, eig_b`, then the class tuple.
/// For a real pair `eig_a >= eig_b` are the eigenvalues; for a complex pair
/// they are the real part and the positive imaginary part.
pub fn sweep_csv_header(ids: &[EquilibriumId]) -> Vec<String> {
    let mut h = vec!["mu1".to_string(), "mu2".into(), "region".into()];
    for id in ids {
        for f in ["status", "class", "xi1", "xi2", "eig_kind", "eig_a", "eig_b"] {
            h.push(format!("{id}_{f}"));
        }
    }
    h.push("tuple".into());
    h
}

pub fn sweep_csv(s: &Sweep) -> Result<String> {
    let ids = EquilibriumId::for_case(s.case);
    csv_string(|w| {
        w.write_record(sweep_csv_header(ids))?;
        for c in &s.cells {
            let mut row = vec![num(c.mu.mu1), num(c.mu.mu2), c.region.map(|r| r.name()).unwrap_or_else(|| "error".into())];
            for e in &c.inventory {
                row.extend(entry_fields(e));
            }
            row.push(class_tuple(c).0);
            w.write_record(&row)?;
        }
        Ok(())
    })
}

pub fn sweep_text(s: &Sweep) -> String {
    use std::collections::BTreeMap;
    let mut out = String::new();
    let w = &s.window;
    let _ = writeln!(out, "case: {:?}", s.case);
    let _ = writeln!(out, "window: mu1 in [{}, {}], mu2 in [{}, {}]", num(w.x0), num(w.x1), num(w.y0), num(w.y1));
    let _ = writeln!(out, "resolution: {} x {} ({} cells)", s.resolution, s.resolution, s.cells.len());
    let mut regions: BTreeMap<String, usize> = BTreeMap::new();
    let mut tuples: BTreeMap<String, usize> = BTreeMap::new();
    let mut errors = 0;
    for c in &s.cells {
        *regions.entry(c.region.map(|r| r.name()).unwrap_or_else(|| "error".into())).or_default() += 1;
        *tuples.entry(class_tuple(c).0).or_default() += 1;
        errors += c.has_error() as usize;
    }
    let _ = writeln!(out, "cells with errors: {errors}");
    let _ = writeln!(out, "regions:");
    for (k, v) in &regions {
        let _ = writeln!(out, "  {k:<10} {v}");
    }
    let order: Vec<&str> = EquilibriumId::for_case(s.case).iter().map(|i| i.name()).collect();
    let _ = writeln!(out, "class tuples ({}):", order.join(", "));
    for (k, v) in &tuples {
        let flag = if is_admissible(s.case, &super::tuples::ClassTuple(k.clone())) { "" } else { "  not in table" };
        let _ = writeln!(out, "  {k}  {v}{flag}");
    }
    out
}

const SVG_SIZE: f64 = 512.0;
const SVG_MARGIN: f64 = 40.0;

/// Affine map from a data rectangle to the square SVG canvas (y up).
struct Canvas {
    w: Rect,
}

impl Canvas {
    fn x(&self, v: f64) -> f64 {
        SVG_MARGIN + (v - self.w.x0) / self.w.width().max(f64::MIN_POSITIVE) * SVG_SIZE
    }

    fn y(&self, v: f64) -> f64 {
        SVG_MARGIN + SVG_SIZE - (v - self.w.y0) / self.w.height().max(f64::MIN_POSITIVE) * SVG_SIZE
    }

    fn header(&self, title: &str, xlabel: &str, ylabel: &str) -> String {
        let total = SVG_SIZE + 2.0 * SVG_MARGIN;
        let mut s = String::new();
        let _ = writeln!(s, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
        let _ = writeln!(
            s,
            r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{total:.0}" height="{total:.0}" viewBox="0 0 {total:.0} {total:.0}">"#
        );
        let _ = writeln!(s, "<title>{}</title>", escape(title));
        let _ = writeln!(s, r#"<rect x="0" y="0" width="{total:.0}" height="{total:.0}" fill="white"/>"#);
        let _ = writeln!(
            s,
            r#"<text x="{:.3}" y="{:.3}" font-size="14" text-anchor="middle">{}</text>"#,
            SVG_MARGIN + SVG_SIZE / 2.0,
            total - 8.0,
            escape(xlabel)
        );
        let _ = writeln!(
            s,
            r#"<text x="14" y="{:.3}" font-size="14" text-anchor="middle" transform="rotate(-90 14 {:.3})">{}</text>"#,
            SVG_MARGIN + SVG_SIZE / 2.0,
            SVG_MARGIN + SVG_SIZE / 2.0,
            escape(ylabel)
        );
        s
    }

    fn frame(&self) -> String {
        format!(
            "<rect x=\"{:.3}\" y=\"{:.3}\" width=\"{:.3}\" height=\"{:.3}\" fill=\"none\" stroke=\"black\"/>\n",
            SVG_MARGIN, SVG_MARGIN, SVG_SIZE, SVG_SIZE
        )
    }

    fn polyline(&self, pts: impl Iterator<Item = (f64, f64)>, style: &str) -> String {
        let coords: Vec<String> = pts.map(|(a, b)| format!("{:.3},{:.3}", self.x(a), self.y(b))).collect();
        if coords.len() < 2 {
            return String::new();
        }
        format!("<polyline points=\"{}\" {style}/>\n", coords.join(" "))
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

pub fn region_color(r: Option<RegionLabel>) -> &'static str {
    match r {
        Some(RegionLabel::R00) => "#e8e8e8",
        Some(RegionLabel::R10minus) => "#c6dbef",
        Some(RegionLabel::R10plus) => "#6baed6",
        Some(RegionLabel::R20minus) => "#fdd0a2",
        Some(RegionLabel::R20plus) => "#fd8d3c",
        Some(RegionLabel::Q) => "#a1d99b",
        Some(RegionLabel::QComplement) => "#f0f0f0",
        Some(RegionLabel::OnCurve(_)) => "#636363",
        Some(RegionLabel::Outside) => "#ffffff",
        None => "#ff00ff",
    }
}

fn curve_color(c: CurveId) -> &'static str {
    match c {
        CurveId::DeltaPlus | CurveId::DeltaMinus => "#08519c",
        CurveId::T2 => "#a50f15",
        CurveId::T3 => "#006d2c",
        CurveId::T4 => "#54278f",
        CurveId::H | CurveId::H1 => "#d94801",
        _ => "#000000",
    }
}

/// Region map of a sweep with the case's bifurcation curves drawn on top.
pub fn sweep_svg(s: &Sweep, model: &SystemModel, tols: &Tolerances) -> String {
    let cv = Canvas { w: s.window };
    let mut out = cv.header(&format!("{:?} sweep {}x{}", s.case, s.resolution, s.resolution), "mu1", "mu2");
    if !s.window.is_degenerate() && s.resolution > 0 {
        let cw = SVG_SIZE / s.resolution as f64;
        out.push_str("<g shape-rendering=\"crispEdges\">\n");
        for j in 0..s.resolution {
            for i in 0..s.resolution {
                let c = s.cell(i, j);
                let _ = writeln!(
                    out,
                    r#"<rect x="{:.3}" y="{:.3}" width="{:.3}" height="{:.3}" fill="{}"/>"#,
                    SVG_MARGIN + i as f64 * cw,
                    SVG_MARGIN + SVG_SIZE - (j + 1) as f64 * cw,
                    cw,
                    cw,
                    region_color(c.region)
                );
            }
        }
        out.push_str("</g>\n");
        let w = &s.window;
        let _ = writeln!(out, "<clipPath id=\"win\"><rect x=\"{SVG_MARGIN:.3}\" y=\"{SVG_MARGIN:.3}\" width=\"{SVG_SIZE:.3}\" height=\"{SVG_SIZE:.3}\"/></clipPath>");
        out.push_str("<g clip-path=\"url(#win)\" fill=\"none\" stroke-width=\"1.5\">\n");
        let reach = w.max_norm().min(model.radius);
        for id in CurveId::for_case(s.case) {
            let pts = sample_curve(model, id, reach, 128, tols);
            let style = format!("stroke=\"{}\"", curve_color(id));
            out.push_str(&cv.polyline(pts.iter().map(|p| (p.mu.mu1, p.mu.mu2)), &style));
        }
        out.push_str("</g>\n");
    }
    out.push_str(&cv.frame());
    out.push_str("</svg>\n");
    out
}

/// Every `k`-th point plus the last, to keep SVG sizes bounded.
fn thinned<T: Copy>(v: &[T], max: usize) -> Vec<T> {
    if v.len() <= max {
        return v.to_vec();
    }
    let step = v.len().div_ceil(max);
    let mut out: Vec<T> = v.iter().step_by(step).copied().collect();
    out.push(*v.last().unwrap());
    out
}

fn class_color(c: Option<StabilityClass>) -> &'static str {
    match c {
        Some(c) if c.is_attractor() => "#2166ac",
        Some(c) if c.is_repeller() => "#b2182b",
        Some(StabilityClass::Saddle) => "#1b7837",
        _ => "#777777",
    }
}

fn terminal_name(t: &Terminal) -> String {
    match t {
        Terminal::TimeLimit => "time-limit".into(),
        Terminal::EscapedRadius => "escaped".into(),
        Terminal::ConvergedToEquilibrium(id) => format!("converged:{id}"),
        Terminal::HitAxis => "hit-axis".into(),
    }
}

/// One row per trajectory sample: `seed, t, xi1, xi2, terminal`.
pub fn portrait_csv(p: &Portrait) -> Result<String> {
    csv_string(|w| {
        w.write_record(["seed", "t", "xi1", "xi2", "terminal"])?;
        for (k, tr) in p.trajectories.iter().enumerate() {
            let term = terminal_name(&tr.terminal);
            for (t, x) in &tr.samples {
                w.write_record([k.to_string(), num(*t), num(x.xi1), num(x.xi2), term.clone()])?;
            }
        }
        Ok(())
    })
}

pub fn portrait_svg(p: &Portrait) -> String {
    let cv = Canvas { w: p.spec.window };
    let mut out = cv.header(&format!("phase portrait at mu = ({}, {})", num(p.mu.mu1), num(p.mu.mu2)), "xi1", "xi2");
    if !p.spec.window.is_degenerate() {
        let _ = writeln!(out, "<clipPath id=\"win\"><rect x=\"{SVG_MARGIN:.3}\" y=\"{SVG_MARGIN:.3}\" width=\"{SVG_SIZE:.3}\" height=\"{SVG_SIZE:.3}\"/></clipPath>");
        out.push_str("<g clip-path=\"url(#win)\" fill=\"none\">\n");
        for line in &p.nullclines.f1 {
            out.push_str(&cv.polyline(line.iter().map(|q| (q.xi1, q.xi2)), "stroke=\"#4393c3\" stroke-width=\"2\" stroke-dasharray=\"6 3\""));
        }
        for line in &p.nullclines.f2 {
            out.push_str(&cv.polyline(line.iter().map(|q| (q.xi1, q.xi2)), "stroke=\"#d6604d\" stroke-width=\"2\" stroke-dasharray=\"6 3\""));
        }
        for tr in &p.trajectories {
            let pts = thinned(&tr.samples, 400);
            out.push_str(&cv.polyline(pts.iter().map(|(_, q)| (q.xi1, q.xi2)), "stroke=\"#333333\" stroke-width=\"1\""));
        }
        out.push_str("</g>\n");
    }
    for e in &p.equilibria {
        let q = e.equilibrium.point;
        if p.spec.window.contains(q.xi1, q.xi2) {
            let _ = writeln!(
                out,
                r#"<circle cx="{:.3}" cy="{:.3}" r="5" fill="{}"><title>{} {}</title></circle>"#,
                cv.x(q.xi1),
                cv.y(q.xi2),
                class_color(e.class),
                e.equilibrium.id,
                e.class.map(|c| c.name()).unwrap_or_else(|| "unclassified".into())
            );
        }
    }
    out.push_str(&cv.frame());
    out.push_str("</svg>\n");
    out
}

pub fn portrait_text(p: &Portrait) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "mu: ({}, {})", num(p.mu.mu1), num(p.mu.mu2));
    let _ = writeln!(out, "proper equilibria:");
    for e in &p.equilibria {
        let q = e.equilibrium.point;
        let _ = writeln!(
            out,
            "  {:<4} ({}, {})  {}",
            e.equilibrium.id.name(),
            num(q.xi1),
            num(q.xi2),
            e.class.map(|c| c.name()).unwrap_or_else(|| "unclassified".into())
        );
    }
    let _ = writeln!(out, "trajectories: {}", p.trajectories.len());
    let mut counts: Vec<(String, usize)> = Vec::new();
    for tr in &p.trajectories {
        let name = terminal_name(&tr.terminal);
        match counts.iter_mut().find(|(k, _)| *k == name) {
            Some((_, n)) => *n += 1,
            None => counts.push((name, 1)),
        }
    }
    counts.sort();
    for (k, n) in counts {
        let _ = writeln!(out, "  {k:<16} {n}");
    }
    let _ = writeln!(out, "nullcline polylines: f1 {}, f2 {}", p.nullclines.f1.len(), p.nullclines.f2.len());
    out
}

pub fn emit_sweep(s: &Sweep, model: &SystemModel, tols: &Tolerances, format: Format) -> Result<String> {
    Ok(match format {
        Format::Csv => sweep_csv(s)?,
        Format::Svg => sweep_svg(s, model, tols),
        Format::Text => sweep_text(s),
    })
}

pub fn emit_portrait(p: &Portrait, format: Format) -> Result<String> {
    Ok(match format {
        Format::Csv => portrait_csv(p)?,
        Format::Svg => portrait_svg(p),
        Format::Text => portrait_text(p),
    })
}
