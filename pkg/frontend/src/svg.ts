/**
 * Minimal deterministic SVG builder: fixed canvas, fixed style, no
 * timestamps or randomness, so identical inputs yield identical bytes.
 */

export const WIDTH = 680;
export const HEIGHT = 460;
export const MARGIN = { left: 72, right: 24, top: 40, bottom: 52 };

export interface Scale {
  toPx(v: number): number;
  ticks(): number[];
}

/** Stable short formatting for coordinates and labels. */
export function fmt(x: number): string {
  if (!Number.isFinite(x)) return "0";
  if (x === 0) return "0";
  return Number(x.toPrecision(6)).toString();
}

function linearTicks(lo: number, hi: number, want = 5): number[] {
  const span = hi - lo;
  if (span <= 0) return [lo];
  const raw = span / want;
  const mag = Math.pow(10, Math.floor(Math.log10(raw)));
  const step = [1, 2, 5, 10].map((m) => m * mag).find((s) => span / s <= want) ?? mag * 10;
  const first = Math.ceil(lo / step) * step;
  const ticks: number[] = [];
  for (let v = first; v <= hi + 1e-12 * span; v += step) {
    ticks.push(Number(v.toPrecision(12)));
  }
  return ticks;
}

export function linearScale(lo: number, hi: number, pxLo: number, pxHi: number): Scale {
  const span = hi - lo || 1;
  return {
    toPx: (v) => pxLo + ((v - lo) / span) * (pxHi - pxLo),
    ticks: () => linearTicks(lo, hi),
  };
}

export function logScale(lo: number, hi: number, pxLo: number, pxHi: number): Scale {
  const llo = Math.log10(lo);
  const lhi = Math.log10(hi);
  const span = lhi - llo || 1;
  return {
    toPx: (v) => pxLo + ((Math.log10(v) - llo) / span) * (pxHi - pxLo),
    ticks: () => {
      const ticks: number[] = [];
      for (let e = Math.floor(llo) - 1; e <= Math.ceil(lhi); e++) {
        for (const m of [1, 2, 5]) {
          const v = m * Math.pow(10, e);
          if (v >= lo * 0.999 && v <= hi * 1.001) {
            ticks.push(Number(v.toPrecision(12)));
          }
        }
      }
      return ticks.length >= 2 ? ticks : [lo, hi];
    },
  };
}

export class SvgDoc {
  private parts: string[] = [];

  add(part: string): void {
    this.parts.push(part);
  }

  line(x1: number, y1: number, x2: number, y2: number, stroke: string,
       width = 1, dash = ""): void {
    const d = dash ? ` stroke-dasharray="${dash}"` : "";
    this.add(`<line x1="${fmt(x1)}" y1="${fmt(y1)}" x2="${fmt(x2)}" y2="${fmt(y2)}" stroke="${stroke}" stroke-width="${width}"${d}/>`);
  }

  circle(cx: number, cy: number, r: number, fill: string): void {
    this.add(`<circle cx="${fmt(cx)}" cy="${fmt(cy)}" r="${r}" fill="${fill}"/>`);
  }

  polyline(pts: Array<[number, number]>, stroke: string, width = 1.5,
           dash = ""): void {
    const coords = pts.map(([x, y]) => `${fmt(x)},${fmt(y)}`).join(" ");
    const d = dash ? ` stroke-dasharray="${dash}"` : "";
    this.add(`<polyline points="${coords}" fill="none" stroke="${stroke}" stroke-width="${width}"${d}/>`);
  }

  text(x: number, y: number, content: string, size = 12, anchor = "start",
       fill = "#222222"): void {
    this.add(`<text x="${fmt(x)}" y="${fmt(y)}" font-size="${size}" text-anchor="${anchor}" fill="${fill}" font-family="monospace">${escapeXml(content)}</text>`);
  }

  render(): string {
    return [
      `<svg xmlns="http://www.w3.org/2000/svg" width="${WIDTH}" height="${HEIGHT}" viewBox="0 0 ${WIDTH} ${HEIGHT}">`,
      `<rect width="${WIDTH}" height="${HEIGHT}" fill="#ffffff"/>`,
      ...this.parts,
      "</svg>",
      "",
    ].join("\n");
  }
}

export function escapeXml(s: string): string {
  return s.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");
}

export interface AxesOptions {
  title: string;
  xLabel: string;
  yLabel: string;
  xScale: Scale;
  yScale: Scale;
}

/** Frame, tick marks and labels; returns the doc for the caller to fill. */
export function drawAxes(doc: SvgDoc, o: AxesOptions): void {
  const x0 = MARGIN.left;
  const x1 = WIDTH - MARGIN.right;
  const y0 = HEIGHT - MARGIN.bottom;
  const y1 = MARGIN.top;
  doc.line(x0, y0, x1, y0, "#222222");
  doc.line(x0, y0, x0, y1, "#222222");
  for (const v of o.xScale.ticks()) {
    const px = o.xScale.toPx(v);
    if (px < x0 - 0.5 || px > x1 + 0.5) continue;
    doc.line(px, y0, px, y0 + 5, "#222222");
    doc.text(px, y0 + 18, fmt(v), 11, "middle");
  }
  for (const v of o.yScale.ticks()) {
    const py = o.yScale.toPx(v);
    if (py > y0 + 0.5 || py < y1 - 0.5) continue;
    doc.line(x0 - 5, py, x0, py, "#222222");
    doc.text(x0 - 8, py + 4, fmt(v), 11, "end");
  }
  doc.text((x0 + x1) / 2, HEIGHT - 14, o.xLabel, 12, "middle");
  doc.text(16, (y0 + y1) / 2, o.yLabel, 12, "middle");
  doc.text((x0 + x1) / 2, 22, o.title, 14, "middle");
}
