import type { FigureModel } from "./figure.js";
import { formatTick } from "./figure.js";

function esc(s: string): string {
  return s
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

const FONT = 'font-family="Helvetica, Arial, sans-serif"';

/** Render the laid-out figure as an SVG document string. */
export function renderSvg(m: FigureModel): string {
  const parts: string[] = [];
  parts.push(
    `<svg xmlns="http://www.w3.org/2000/svg" width="${m.width}" ` +
      `height="${m.height}" viewBox="0 0 ${m.width} ${m.height}">`,
  );
  parts.push(`<rect width="${m.width}" height="${m.height}" fill="white"/>`);

  const { x, y, w, h } = m.plot;

  // grid + ticks
  for (const t of m.leftTicks) {
    parts.push(
      `<line x1="${x}" y1="${t.px}" x2="${x + w}" y2="${t.px}" ` +
        `stroke="#dddddd" stroke-width="1"/>`,
    );
    parts.push(
      `<text x="${x - 8}" y="${t.px + 4}" text-anchor="end" ${FONT} ` +
        `font-size="12">${esc(formatTick(t.value))}</text>`,
    );
  }
  if (m.rightTicks) {
    for (const t of m.rightTicks) {
      parts.push(
        `<text x="${x + w + 8}" y="${t.px + 4}" text-anchor="start" ` +
          `${FONT} font-size="12" fill="#555555">` +
          `${esc(formatTick(t.value))}</text>`,
      );
    }
  }
  for (const t of m.xTicks) {
    parts.push(
      `<line x1="${t.px}" y1="${y + h}" x2="${t.px}" y2="${y + h + 5}" ` +
        `stroke="#333333" stroke-width="1"/>`,
    );
    parts.push(
      `<text x="${t.px}" y="${y + h + 20}" text-anchor="middle" ${FONT} ` +
        `font-size="12">${esc(formatTick(t.value))}</text>`,
    );
  }

  // frame
  parts.push(
    `<rect x="${x}" y="${y}" width="${w}" height="${h}" fill="none" ` +
      `stroke="#333333" stroke-width="1"/>`,
  );

  // axis labels
  parts.push(
    `<text x="${x + w / 2}" y="${y + h + 40}" text-anchor="middle" ` +
      `${FONT} font-size="14">${esc(m.xLabel)}</text>`,
  );
  parts.push(
    `<text x="20" y="${y + h / 2}" text-anchor="middle" ${FONT} ` +
      `font-size="14" transform="rotate(-90 20 ${y + h / 2})">` +
      `${esc(m.leftLabel)}</text>`,
  );
  if (m.rightLabel) {
    const rx = m.width - 18;
    parts.push(
      `<text x="${rx}" y="${y + h / 2}" text-anchor="middle" ${FONT} ` +
        `font-size="14" fill="#555555" ` +
        `transform="rotate(90 ${rx} ${y + h / 2})">` +
        `${esc(m.rightLabel)}</text>`,
    );
  }

  // series
  for (const s of m.series) {
    const pts = s.points.map(([px, py]) => `${px},${py}`).join(" ");
    const dash = s.rightAxis ? ' stroke-dasharray="6 3"' : "";
    parts.push(
      `<polyline points="${pts}" fill="none" stroke="${s.color}" ` +
        `stroke-width="1.8"${dash}/>`,
    );
  }

  // legend below the plot
  let lx = x;
  let ly = m.height - 48;
  for (const entry of m.legend) {
    parts.push(
      `<line x1="${lx}" y1="${ly}" x2="${lx + 26}" y2="${ly}" ` +
        `stroke="${entry.color}" stroke-width="2.5"` +
        (entry.rightAxis ? ' stroke-dasharray="6 3"' : "") +
        `/>`,
    );
    parts.push(
      `<text x="${lx + 32}" y="${ly + 4}" ${FONT} font-size="13">` +
        `${esc(entry.label)}${entry.rightAxis ? " (right)" : ""}</text>`,
    );
    lx += 40 + 8 * entry.label.length + (entry.rightAxis ? 56 : 0);
    if (lx > m.width - 160) {
      lx = x;
      ly += 22;
    }
  }

  parts.push("</svg>");
  return parts.join("\n") + "\n";
}
