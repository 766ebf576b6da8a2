import { PNG } from "pngjs";

import type { FigureModel } from "./figure.js";
import { formatTick } from "./figure.js";
import { GLYPH_H, GLYPH_W, glyph } from "./font.js";

type RGB = [number, number, number];

function parseColor(c: string): RGB {
  const m = /^#([0-9a-f]{6})$/i.exec(c);
  if (!m) return [0, 0, 0];
  const v = parseInt(m[1], 16);
  return [(v >> 16) & 0xff, (v >> 8) & 0xff, v & 0xff];
}

class Raster {
  png: PNG;

  constructor(width: number, height: number) {
    this.png = new PNG({ width, height });
    this.png.data.fill(255);
  }

  set(x: number, y: number, [r, g, b]: RGB) {
    x = Math.round(x);
    y = Math.round(y);
    if (x < 0 || y < 0 || x >= this.png.width || y >= this.png.height) return;
    const k = (y * this.png.width + x) * 4;
    this.png.data[k] = r;
    this.png.data[k + 1] = g;
    this.png.data[k + 2] = b;
    this.png.data[k + 3] = 255;
  }

  line(x0: number, y0: number, x1: number, y1: number, color: RGB, thick = 1) {
    // walk the longer axis; good enough for chart strokes
    const steps = Math.max(Math.abs(x1 - x0), Math.abs(y1 - y0), 1);
    for (let i = 0; i <= steps; i++) {
      const x = x0 + ((x1 - x0) * i) / steps;
      const y = y0 + ((y1 - y0) * i) / steps;
      for (let dx = 0; dx < thick; dx++) {
        for (let dy = 0; dy < thick; dy++) {
          this.set(x + dx, y + dy, color);
        }
      }
    }
  }

  dashedPolyline(pts: Array<[number, number]>, color: RGB, thick = 1) {
    let on = true;
    let budget = 6;
    for (let i = 1; i < pts.length; i++) {
      const [x0, y0] = pts[i - 1];
      const [x1, y1] = pts[i];
      const len = Math.hypot(x1 - x0, y1 - y0);
      let done = 0;
      while (done < len) {
        const seg = Math.min(budget, len - done);
        const f0 = done / len;
        const f1 = (done + seg) / len;
        if (on) {
          this.line(
            x0 + (x1 - x0) * f0,
            y0 + (y1 - y0) * f0,
            x0 + (x1 - x0) * f1,
            y0 + (y1 - y0) * f1,
            color,
            thick,
          );
        }
        done += seg;
        budget -= seg;
        if (budget <= 0) {
          on = !on;
          budget = on ? 6 : 4;
        }
      }
    }
  }

  polyline(pts: Array<[number, number]>, color: RGB, thick = 1) {
    for (let i = 1; i < pts.length; i++) {
      this.line(pts[i - 1][0], pts[i - 1][1], pts[i][0], pts[i][1], color, thick);
    }
  }

  text(x: number, y: number, s: string, color: RGB, scale = 1) {
    // (x, y) is the top-left corner of the first glyph
    let cx = Math.round(x);
    for (const ch of s) {
      const rows = glyph(ch);
      for (let r = 0; r < GLYPH_H; r++) {
        for (let c = 0; c < GLYPH_W; c++) {
          if (rows[r][c] === "X") {
            for (let sx = 0; sx < scale; sx++) {
              for (let sy = 0; sy < scale; sy++) {
                this.set(cx + c * scale + sx, y + r * scale + sy, color);
              }
            }
          }
        }
      }
      cx += (GLYPH_W + 1) * scale;
    }
  }

  textWidth(s: string, scale = 1): number {
    return s.length * (GLYPH_W + 1) * scale;
  }
}

const BLACK: RGB = [40, 40, 40];
const GREY: RGB = [200, 200, 200];
const MIDGREY: RGB = [110, 110, 110];

/** Render the laid-out figure as a PNG buffer. */
export function renderPng(m: FigureModel): Buffer {
  const r = new Raster(m.width, m.height);
  const { x, y, w, h } = m.plot;

  for (const t of m.leftTicks) {
    r.line(x, t.px, x + w, t.px, GREY);
    const label = formatTick(t.value);
    r.text(x - 8 - r.textWidth(label), t.px - 3, label, BLACK);
  }
  if (m.rightTicks) {
    for (const t of m.rightTicks) {
      r.text(x + w + 8, t.px - 3, formatTick(t.value), MIDGREY);
    }
  }
  for (const t of m.xTicks) {
    r.line(t.px, y + h, t.px, y + h + 5, BLACK);
    const label = formatTick(t.value);
    r.text(t.px - r.textWidth(label) / 2, y + h + 10, label, BLACK);
  }

  // plot frame
  r.line(x, y, x + w, y, BLACK);
  r.line(x, y + h, x + w, y + h, BLACK);
  r.line(x, y, x, y + h, BLACK);
  r.line(x + w, y, x + w, y + h, BLACK);

  r.text(x + w / 2 - r.textWidth(m.xLabel) / 2, y + h + 28, m.xLabel, BLACK);
  r.text(x, y - 24, m.leftLabel, BLACK);
  if (m.rightLabel) {
    r.text(x + w - r.textWidth(m.rightLabel), y - 24, m.rightLabel, MIDGREY);
  }

  for (const s of m.series) {
    const color = parseColor(s.color);
    if (s.rightAxis) {
      r.dashedPolyline(s.points, color, 2);
    } else {
      r.polyline(s.points, color, 2);
    }
  }

  let lx = x;
  let ly = m.height - 48;
  for (const entry of m.legend) {
    const color = parseColor(entry.color);
    r.line(lx, ly + 3, lx + 26, ly + 3, color, 3);
    const label = entry.label + (entry.rightAxis ? " (right)" : "");
    r.text(lx + 32, ly, label, BLACK);
    lx += 40 + r.textWidth(label) + 16;
    if (lx > m.width - 160) {
      lx = x;
      ly += 18;
    }
  }

  return PNG.sync.write(r.png);
}
