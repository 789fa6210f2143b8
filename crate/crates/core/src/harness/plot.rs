use std::path::Path;

use image::{Rgb, RgbImage};

use super::{HarnessError, TraceColumns};

const WIDTH: u32 = 1200;
const PANEL: u32 = 260;
const MARGIN: u32 = 20;

fn draw_line(img: &mut RgbImage, (x0, y0): (i64, i64), (x1, y1): (i64, i64), color: Rgb<u8>) {
    let (dx, dy) = ((x1 - x0).abs(), -(y1 - y0).abs());
    let (sx, sy) = (if x0 < x1 { 1 } else { -1 }, if y0 < y1 { 1 } else { -1 });
    let (mut x, mut y, mut err) = (x0, y0, dx + dy);
    loop {
        if x >= 0 && y >= 0 && (x as u32) < img.width() && (y as u32) < img.height() {
            img.put_pixel(x as u32, y as u32, color);
        }
        if x == x1 && y == y1 {
            break;
        }
        let e2 = 2 * err;
        if e2 >= dy {
            err += dy;
            x += sx;
        }
        if e2 <= dx {
            err += dx;
            y += sy;
        }
    }
}

fn panel(img: &mut RgbImage, index: u32, t: &[f64], v: &[f64], color: Rgb<u8>) {
    let top = MARGIN + index * (PANEL + MARGIN);
    let (left, right) = (MARGIN as f64, (WIDTH - MARGIN) as f64);
    let frame = Rgb([180, 180, 180]);
    let (t0, t1) = (t.first().copied().unwrap_or(0.0), t.last().copied().unwrap_or(1.0));
    let (lo, hi) = v.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &x| (a.min(x), b.max(x)));
    let (lo, hi) = if lo.is_finite() && hi > lo { (lo, hi) } else { (lo.min(0.0) - 1.0, hi.max(0.0) + 1.0) };
    let px = |tt: f64| (left + (tt - t0) / (t1 - t0).max(1e-12) * (right - left)) as i64;
    let py = |vv: f64| (top as f64 + (1.0 - (vv - lo) / (hi - lo)) * PANEL as f64) as i64;
    let (l, r, tp, bt) = (left as i64, right as i64, top as i64, (top + PANEL) as i64);
    draw_line(img, (l, tp), (r, tp), frame);
    draw_line(img, (l, bt), (r, bt), frame);
    draw_line(img, (l, tp), (l, bt), frame);
    draw_line(img, (r, tp), (r, bt), frame);
    if lo < 0.0 && hi > 0.0 {
        draw_line(img, (l, py(0.0)), (r, py(0.0)), Rgb([220, 220, 220]));
    }
    for k in 1..t.len().min(v.len()) {
        draw_line(img, (px(t[k - 1]), py(v[k - 1])), (px(t[k]), py(v[k])), color);
    }
}

/// Three stacked panels: filtered power, duty and bend reading.
pub fn write_plot(c: &TraceColumns, path: &Path) -> Result<(), HarnessError> {
    let height = MARGIN + 3 * (PANEL + MARGIN);
    let mut img = RgbImage::from_pixel(WIDTH, height, Rgb([255, 255, 255]));
    panel(&mut img, 0, &c.t, &c.power, Rgb([200, 40, 40]));
    panel(&mut img, 1, &c.t, &c.duty, Rgb([30, 90, 200]));
    panel(&mut img, 2, &c.t, &c.bend_deg, Rgb([20, 140, 60]));
    img.save(path).map_err(|e| HarnessError::Plot(e.to_string()))
}
