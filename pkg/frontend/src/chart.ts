// Client-side view layer: a VisSpec in, an SVG string out.
//
// This renders what the spec says (encodings, aggregates, filters, chrome)
// the way any grammar-driven chart library would; it never changes the
// spec. Output is deterministic for a given spec, which the rehydration
// contract test relies on.

import type { Annotation, EncodingDef, MarkLayer, VisSpec } from "./types.js";

export const SERIES_COLORS = [
  "#4c78a8", "#f58518", "#54a24b", "#e45756", "#72b7b2",
  "#b279a2", "#eeca3b", "#9d755d",
];

const PAD = { top: 28, right: 16, bottom: 34, left: 46 };

export function esc(s: string): string {
  return s.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

function fmtNum(v: number): string {
  if (!Number.isFinite(v)) return "";
  const a = Math.abs(v);
  if (a >= 1e6) return (v / 1e6).toFixed(1).replace(/\.0$/, "") + "M";
  if (a >= 1e4) return (v / 1e3).toFixed(1).replace(/\.0$/, "") + "k";
  return a >= 100 || Number.isInteger(v) ? String(Math.round(v)) : v.toFixed(1);
}

function r2(v: number): number {
  return Math.round(v * 100) / 100;
}

// -- data interpretation ------------------------------------------------

type Row = Record<string, unknown>;

function asNumber(v: unknown): number {
  if (typeof v === "number") return v;
  if (typeof v === "string") {
    const ms = Date.parse(v);
    if (!Number.isNaN(ms)) return ms;
    const n = Number(v);
    if (!Number.isNaN(n)) return n;
  }
  return NaN;
}

function fieldValue(row: Row, enc: EncodingDef): unknown {
  return row[enc.field];
}

function numericValue(row: Row, enc: EncodingDef): number {
  return asNumber(row[enc.field]);
}

/** Rows after the spec's filter/aggregate/bin, ready for positioning. */
export function viewRows(spec: VisSpec, layer: MarkLayer): Row[] {
  let rows = spec.dataset.rows.slice();
  const tr = spec.transform;
  if (tr && tr.filterField && tr.filterTopK != null) {
    const quant = layer.encodings.find((e) => e.type === "quantitative");
    const totals = new Map<unknown, number>();
    for (const row of rows) {
      const key = row[tr.filterField];
      totals.set(key, (totals.get(key) ?? 0) + (quant ? numericValue(row, quant) : 0));
    }
    const keep = new Set([...totals.entries()]
      .sort((a, b) => b[1] - a[1]).slice(0, tr.filterTopK).map((e) => e[0]));
    rows = rows.filter((row) => keep.has(row[tr.filterField as string]));
  }

  const binned = layer.encodings.find((e) => e.bin != null);
  const aggregated = layer.encodings.some((e) => e.aggregate !== "none");
  if (!binned && !aggregated) return rows;

  // group by every non-aggregated encoding (bins included), then fold the
  // aggregated fields; this is display-side interpretation, same as any
  // grammar renderer
  let binStep = 0;
  let binStart = 0;
  if (binned) {
    const vals = rows.map((row) => numericValue(row, binned)).filter(Number.isFinite);
    const lo = Math.min(...vals);
    const hi = Math.max(...vals);
    binStep = binned.bin && hi > lo ? (hi - lo) / binned.bin : 1;
    binStart = lo;
  }
  const groups = new Map<string, { key: Row; members: Row[] }>();
  const groupers = layer.encodings.filter((e) => e.aggregate === "none");
  for (const row of rows) {
    const key: Row = {};
    for (const enc of groupers) {
      if (enc.bin != null && binStep > 0) {
        const idx = Math.min(enc.bin - 1, Math.floor((numericValue(row, enc) - binStart) / binStep));
        key[enc.field] = binStart + (idx + 0.5) * binStep;
      } else {
        key[enc.field] = row[enc.field];
      }
    }
    const id = JSON.stringify(Object.values(key).map(String));
    const g = groups.get(id);
    if (g) g.members.push(row);
    else groups.set(id, { key, members: [row] });
  }
  const out: Row[] = [];
  for (const { key, members } of groups.values()) {
    const folded: Row = { ...key };
    for (const enc of layer.encodings) {
      if (enc.aggregate === "none") continue;
      const vals = members.map((m) => numericValue(m, enc)).filter(Number.isFinite);
      if (enc.aggregate === "count") folded[enc.field] = members.length;
      else if (enc.aggregate === "sum") folded[enc.field] = vals.reduce((a, b) => a + b, 0);
      else folded[enc.field] = vals.length ? vals.reduce((a, b) => a + b, 0) / vals.length : 0;
    }
    out.push(folded);
  }
  return out;
}

// -- scales ---------------------------------------------------------------

interface Scale {
  kind: "band" | "linear";
  pos(v: unknown): number;
  band: number;
  domain: unknown[];
}

function makeScale(enc: EncodingDef | undefined, rows: Row[], lo: number, hi: number): Scale {
  if (!enc) {
    return { kind: "band", pos: () => (lo + hi) / 2, band: Math.abs(hi - lo), domain: [] };
  }
  if (enc.type === "nominal" || enc.type === "ordinal") {
    const domain: unknown[] = [];
    const seen = new Set<string>();
    for (const row of rows) {
      const v = String(fieldValue(row, enc));
      if (!seen.has(v)) { seen.add(v); domain.push(v); }
    }
    const n = Math.max(1, domain.length);
    const band = (hi - lo) / n;
    const index = new Map(domain.map((d, i) => [String(d), i]));
    return {
      kind: "band", band: Math.abs(band), domain,
      pos: (v) => lo + ((index.get(String(v)) ?? 0) + 0.5) * band,
    };
  }
  const vals = rows.map((row) => numericValue(row, enc)).filter(Number.isFinite);
  let min = vals.length ? Math.min(...vals) : 0;
  let max = vals.length ? Math.max(...vals) : 1;
  if (enc.type === "quantitative" && min > 0) min = 0;
  if (max === min) max = min + 1;
  const domain = [min, max];
  return {
    kind: "linear", band: 0, domain,
    pos: (v) => {
      const n = asNumber(v);
      return lo + ((Number.isFinite(n) ? n : min) - min) / (max - min) * (hi - lo);
    },
  };
}

function colorOf(domain: unknown[], v: unknown, fallback: string): string {
  const i = domain.findIndex((d) => String(d) === String(v));
  return i < 0 ? fallback : SERIES_COLORS[i % SERIES_COLORS.length]!;
}

function rampColor(t: number): string {
  // light blue -> dark blue, good enough for quantitative color
  const c = Math.max(0, Math.min(1, t));
  const mix = (a: number, b: number) => Math.round(a + (b - a) * c);
  return `rgb(${mix(222, 28)},${mix(235, 74)},${mix(247, 135)})`;
}

// -- rendering ------------------------------------------------------------

export interface RenderOptions {
  /** outer display size; defaults to the spec's own width/height */
  width?: number;
  height?: number;
  /** adds data-annotation-id handles so the canvas can wire dragging */
  interactive?: boolean;
}

export function renderSpec(spec: VisSpec, opts: RenderOptions = {}): string {
  const W = spec.width;
  const H = spec.height;
  const fs = 11 * (spec.fontScale || 1);
  const parts: string[] = [];
  const layer = spec.layers[0];

  const plot = {
    x0: PAD.left,
    y0: spec.title.text && spec.title.placement === "external" ? PAD.top + 6 : PAD.top,
    x1: W - PAD.right,
    y1: H - PAD.bottom,
  };
  const legend = spec.legends.color;
  if (legend && legend.visible && legend.position === "right") plot.x1 -= 86;
  if (legend && legend.visible && legend.position === "top") plot.y0 += 18;
  if (legend && legend.visible && legend.position === "bottom") plot.y1 -= 18;

  parts.push(`<rect x="0" y="0" width="${W}" height="${H}" fill="#ffffff"/>`);

  if (layer) {
    const rows = viewRows(spec, layer);
    const xEnc = layer.encodings.find((e) => e.channel === "x");
    const yEnc = layer.encodings.find((e) => e.channel === "y");
    const cEnc = layer.encodings.find((e) => e.channel === "color");
    const sEnc = layer.encodings.find((e) => e.channel === "size");
    const x = makeScale(xEnc, rows, plot.x0, plot.x1);
    const y = makeScale(yEnc, rows, plot.y1, plot.y0);
    const style = layer.style;
    const colorDomain = cEnc && (cEnc.type === "nominal" || cEnc.type === "ordinal")
      ? makeScale(cEnc, rows, 0, 1).domain : [];
    const quantColor = cEnc && cEnc.type === "quantitative" ? cEnc : undefined;
    let colorLo = 0;
    let colorHi = 1;
    if (quantColor) {
      const vals = rows.map((row) => numericValue(row, quantColor)).filter(Number.isFinite);
      colorLo = vals.length ? Math.min(...vals) : 0;
      colorHi = vals.length ? Math.max(...vals) : 1;
      if (colorHi === colorLo) colorHi = colorLo + 1;
    }
    const fillFor = (row: Row): string => {
      if (quantColor) {
        return rampColor((numericValue(row, quantColor) - colorLo) / (colorHi - colorLo));
      }
      return cEnc ? colorOf(colorDomain, fieldValue(row, cEnc), style.fill) : style.fill;
    };

    // axes behind marks
    parts.push(renderAxes(spec, x, y, xEnc, yEnc, plot, fs));
    parts.push(`<g opacity="${style.opacity}">`);

    const mark = layer.markType;
    if (mark === "bar") {
      const groups = colorDomain.length || 1;
      const slot = (x.kind === "band" ? x.band : 10) * 0.8;
      const bw = Math.max(1, slot / groups);
      for (const row of rows) {
        const gi = cEnc ? Math.max(0, colorDomain.findIndex((d) => String(d) === String(fieldValue(row, cEnc)))) : 0;
        const cx = x.pos(xEnc ? fieldValue(row, xEnc) : 0) - slot / 2 + gi * bw;
        const vy = y.pos(yEnc ? fieldValue(row, yEnc) : 0);
        const base = y.pos(0);
        const top = Math.min(vy, base);
        const h = Math.max(1, Math.abs(base - vy));
        parts.push(`<rect x="${r2(cx)}" y="${r2(top)}" width="${r2(bw)}" height="${r2(h)}" fill="${fillFor(row)}"/>`);
      }
    } else if (mark === "line" || mark === "area") {
      const series = new Map<string, Row[]>();
      for (const row of rows) {
        const key = cEnc ? String(fieldValue(row, cEnc)) : "";
        const arr = series.get(key);
        if (arr) arr.push(row);
        else series.set(key, [row]);
      }
      for (const [key, pts] of series) {
        pts.sort((a, b) => (xEnc ? numericValue(a, xEnc) - numericValue(b, xEnc) : 0));
        const coords = pts.map((row) =>
          `${r2(x.pos(xEnc ? fieldValue(row, xEnc) : 0))},${r2(y.pos(yEnc ? fieldValue(row, yEnc) : 0))}`);
        const stroke = cEnc ? colorOf(colorDomain, key, style.fill) : style.fill;
        if (mark === "area") {
          const base = r2(y.pos(0));
          const first = coords[0]?.split(",")[0] ?? "0";
          const last = coords[coords.length - 1]?.split(",")[0] ?? "0";
          parts.push(`<path d="M${first},${base} L${coords.join(" L")} L${last},${base} Z" fill="${stroke}" fill-opacity="0.55" stroke="${stroke}"/>`);
        } else {
          parts.push(`<path d="M${coords.join(" L")}" fill="none" stroke="${stroke}" stroke-width="${style.strokeWidth}"/>`);
          if (style.pointOnLine) {
            for (const c of coords) {
              const [px, py] = c.split(",");
              parts.push(`<circle cx="${px}" cy="${py}" r="2.5" fill="${stroke}"/>`);
            }
          }
        }
      }
    } else if (mark === "point") {
      const r = 3;
      for (const row of rows) {
        parts.push(`<circle cx="${r2(x.pos(xEnc ? fieldValue(row, xEnc) : 0))}" cy="${r2(y.pos(yEnc ? fieldValue(row, yEnc) : 0))}" r="${r}" fill="${fillFor(row)}" fill-opacity="0.8"/>`);
      }
    } else if (mark === "rect") {
      const bw = x.kind === "band" ? x.band : Math.max(4, (plot.x1 - plot.x0) / Math.max(1, rows.length));
      const bh = y.kind === "band" ? y.band : Math.max(4, (plot.y1 - plot.y0) / 8);
      for (const row of rows) {
        const cx = x.pos(xEnc ? fieldValue(row, xEnc) : 0);
        const cy = y.pos(yEnc ? fieldValue(row, yEnc) : 0);
        parts.push(`<rect x="${r2(cx - bw / 2)}" y="${r2(cy - bh / 2)}" width="${r2(bw)}" height="${r2(bh)}" fill="${fillFor(row)}"/>`);
      }
    } else if (mark === "arc") {
      const cx = (plot.x0 + plot.x1) / 2;
      const cy = (plot.y0 + plot.y1) / 2;
      const radius = Math.min(plot.x1 - plot.x0, plot.y1 - plot.y0) / 2 - 4;
      const angleEnc = sEnc ?? yEnc;
      const total = rows.reduce((acc, row) => acc + (angleEnc ? Math.max(0, numericValue(row, angleEnc)) : 1), 0) || 1;
      let theta = -Math.PI / 2;
      for (const row of rows) {
        const frac = (angleEnc ? Math.max(0, numericValue(row, angleEnc)) : 1) / total;
        const t2 = theta + frac * Math.PI * 2;
        const large = frac > 0.5 ? 1 : 0;
        const x1 = cx + radius * Math.cos(theta);
        const y1 = cy + radius * Math.sin(theta);
        const x2 = cx + radius * Math.cos(t2);
        const y2 = cy + radius * Math.sin(t2);
        parts.push(`<path d="M${r2(cx)},${r2(cy)} L${r2(x1)},${r2(y1)} A${r2(radius)},${r2(radius)} 0 ${large} 1 ${r2(x2)},${r2(y2)} Z" fill="${fillFor(row)}" stroke="#fff"/>`);
        theta = t2;
      }
    } else if (mark === "text") {
      for (const row of rows) {
        const label = cEnc ? String(fieldValue(row, cEnc)) : "•";
        parts.push(`<text x="${r2(x.pos(xEnc ? fieldValue(row, xEnc) : 0))}" y="${r2(y.pos(yEnc ? fieldValue(row, yEnc) : 0))}" font-size="${fs}" fill="${style.fill}">${esc(label)}</text>`);
      }
    }
    parts.push("</g>");

    if (legend && legend.visible && colorDomain.length) {
      parts.push(renderLegend(colorDomain, legend.position, plot, W, H, fs));
    }
    parts.push(renderAnnotations(spec, rows, x, y, xEnc, yEnc, plot, fs, opts.interactive ?? false));
  }

  if (spec.title.text) {
    if (spec.title.placement === "external") {
      parts.push(`<text x="${W / 2}" y="${PAD.top - 10}" text-anchor="middle" font-size="${fs + 3}" font-weight="600" fill="#222">${esc(spec.title.text)}</text>`);
    } else {
      parts.push(`<text x="${plot.x0 + 8}" y="${plot.y0 + 16}" font-size="${fs + 2}" font-weight="600" fill="#333">${esc(spec.title.text)}</text>`);
    }
  }

  const outW = opts.width ?? W;
  const outH = opts.height ?? H;
  return `<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 ${W} ${H}" width="${r2(outW)}" height="${r2(outH)}" font-family="system-ui, sans-serif">${parts.join("")}</svg>`;
}

function renderAxes(
  spec: VisSpec, x: Scale, y: Scale,
  xEnc: EncodingDef | undefined, yEnc: EncodingDef | undefined,
  plot: { x0: number; y0: number; x1: number; y1: number }, fs: number,
): string {
  const parts: string[] = [];
  const ax = spec.axes.x ?? { visible: true, labelVisible: true, tickCount: 5, labelFormat: "", labelAngle: 0 };
  const ay = spec.axes.y ?? { visible: true, labelVisible: true, tickCount: 5, labelFormat: "", labelAngle: 0 };

  if (xEnc && ax.visible) {
    parts.push(`<line x1="${plot.x0}" y1="${plot.y1}" x2="${plot.x1}" y2="${plot.y1}" stroke="#999"/>`);
    for (const { pos, label } of axisTicks(x, xEnc, ax.tickCount)) {
      parts.push(`<line x1="${r2(pos)}" y1="${plot.y1}" x2="${r2(pos)}" y2="${plot.y1 + 4}" stroke="#999"/>`);
      if (ax.labelVisible) {
        const rot = ax.labelAngle ? ` transform="rotate(${ax.labelAngle} ${r2(pos)} ${plot.y1 + 15})"` : "";
        parts.push(`<text x="${r2(pos)}" y="${plot.y1 + 15}" text-anchor="middle" font-size="${fs}" fill="#555"${rot}>${esc(label)}</text>`);
      }
    }
  }
  if (yEnc && ay.visible) {
    parts.push(`<line x1="${plot.x0}" y1="${plot.y0}" x2="${plot.x0}" y2="${plot.y1}" stroke="#999"/>`);
    for (const { pos, label } of axisTicks(y, yEnc, ay.tickCount)) {
      parts.push(`<line x1="${plot.x0 - 4}" y1="${r2(pos)}" x2="${plot.x0}" y2="${r2(pos)}" stroke="#999"/>`);
      if (ay.labelVisible) {
        parts.push(`<text x="${plot.x0 - 7}" y="${r2(pos) + 3}" text-anchor="end" font-size="${fs}" fill="#555">${esc(label)}</text>`);
      }
    }
  }
  return parts.join("");
}

function axisTicks(scale: Scale, enc: EncodingDef, count: number): { pos: number; label: string }[] {
  if (scale.kind === "band") {
    const step = Math.max(1, Math.ceil(scale.domain.length / Math.max(1, count)));
    return scale.domain
      .filter((_, i) => i % step === 0)
      .map((d) => ({ pos: scale.pos(d), label: String(d).slice(0, 14) }));
  }
  const [min, max] = scale.domain as [number, number];
  const out: { pos: number; label: string }[] = [];
  const n = Math.max(2, count);
  for (let i = 0; i < n; i++) {
    const v = min + (i / (n - 1)) * (max - min);
    const label = enc.type === "temporal"
      ? new Date(v).toISOString().slice(0, 10)
      : fmtNum(v);
    out.push({ pos: scale.pos(v), label });
  }
  return out;
}

function renderLegend(
  domain: unknown[], position: "right" | "top" | "bottom",
  plot: { x0: number; y0: number; x1: number; y1: number },
  W: number, H: number, fs: number,
): string {
  const parts: string[] = [];
  const entries = domain.slice(0, 8);
  if (position === "right") {
    const lx = plot.x1 + 14;
    entries.forEach((d, i) => {
      const ly = plot.y0 + 10 + i * 16;
      parts.push(`<rect x="${lx}" y="${ly - 8}" width="10" height="10" fill="${SERIES_COLORS[i % SERIES_COLORS.length]}"/>`);
      parts.push(`<text x="${lx + 14}" y="${ly + 1}" font-size="${fs}" fill="#444">${esc(String(d).slice(0, 12))}</text>`);
    });
  } else {
    const ly = position === "top" ? plot.y0 - 8 : H - 8;
    let lx = plot.x0;
    entries.forEach((d, i) => {
      parts.push(`<rect x="${lx}" y="${ly - 8}" width="10" height="10" fill="${SERIES_COLORS[i % SERIES_COLORS.length]}"/>`);
      parts.push(`<text x="${lx + 13}" y="${ly + 1}" font-size="${fs}" fill="#444">${esc(String(d).slice(0, 12))}</text>`);
      lx += 22 + Math.min(12, String(d).length) * fs * 0.55;
    });
  }
  return parts.join("");
}

function renderAnnotations(
  spec: VisSpec, rows: Row[], x: Scale, y: Scale,
  xEnc: EncodingDef | undefined, yEnc: EncodingDef | undefined,
  plot: { x0: number; y0: number; x1: number; y1: number },
  fs: number, interactive: boolean,
): string {
  const parts: string[] = [];
  for (const a of spec.annotations) {
    const anchor = resolveAnchor(a, spec, rows, x, y, xEnc, yEnc, plot);
    let bx = anchor.x + a.dx;
    let by = anchor.y + a.dy;
    if (a.placement === "outOfChart") {
      bx = plot.x0;
      by = plot.y1 + 26 + spec.annotations.filter(
        (other) => other.placement === "outOfChart" && other.id < a.id).length * 16;
    }
    const boxH = 16;
    if (a.tickLine && a.placement === "inChart") {
      parts.push(`<line x1="${r2(anchor.x)}" y1="${r2(anchor.y)}" x2="${r2(bx)}" y2="${r2(by + boxH / 2)}" stroke="#888" stroke-dasharray="3,2"/>`);
    }
    const handle = interactive ? ` data-annotation-id="${esc(a.id)}" style="cursor:grab"` : "";
    const dash = anchor.resolved ? "" : ` stroke-dasharray="4,3"`;
    parts.push(`<g${handle}><rect x="${r2(bx)}" y="${r2(by)}" width="${r2(a.width)}" height="${boxH}" rx="3" fill="#fffbe8" stroke="#d0c27a"${dash}/>`);
    parts.push(`<text x="${r2(bx + 4)}" y="${r2(by + 12)}" font-size="${fs}" fill="#333">${esc(a.text.slice(0, Math.max(4, Math.floor(a.width / 6))))}</text></g>`);
  }
  return parts.join("");
}

function resolveAnchor(
  a: Annotation, spec: VisSpec, rows: Row[], x: Scale, y: Scale,
  xEnc: EncodingDef | undefined, yEnc: EncodingDef | undefined,
  plot: { x0: number; y0: number; x1: number; y1: number },
): { x: number; y: number; resolved: boolean } {
  if (a.anchorX != null && a.anchorY != null) {
    return { x: a.anchorX, y: a.anchorY, resolved: true };
  }
  if (a.anchorKey) {
    const row = rowForKey(spec, a.anchorKey);
    if (row && xEnc && yEnc) {
      return { x: x.pos(row[xEnc.field]), y: y.pos(row[yEnc.field]), resolved: true };
    }
  }
  // unresolvable anchor: park the note mid-plot with a dashed outline
  return { x: (plot.x0 + plot.x1) / 2, y: (plot.y0 + plot.y1) / 2, resolved: false };
}

// Datum keys are "d" + sha1(canonical row values)[:10]. Canonicalization
// matches the producer for strings/ints/common floats; integral floats
// (1.0 vs 1) can miss, in which case the annotation falls back to the
// mid-plot dashed box rather than guessing.
function rowForKey(spec: VisSpec, key: string): Row | undefined {
  return spec.dataset.rows.find((row) => datumKey(spec, row) === key);
}

export function datumKey(spec: VisSpec, row: Row): string {
  const values = spec.dataset.fields.map((f) => row[f.name]);
  const payload = JSON.stringify(values);
  return "d" + sha1Hex(payload).slice(0, 10);
}

// Compact SHA-1 (synchronous; crypto.subtle is async and unavailable on
// plain-http origins). Reference implementation of the standard algorithm.
export function sha1Hex(text: string): string {
  const bytes = new TextEncoder().encode(text);
  const ml = bytes.length;
  const total = (((ml + 8) >> 6) + 1) << 6;
  const buf = new Uint8Array(total);
  buf.set(bytes);
  buf[ml] = 0x80;
  const bits = ml * 8;
  new DataView(buf.buffer).setUint32(total - 4, bits >>> 0);
  new DataView(buf.buffer).setUint32(total - 8, Math.floor(bits / 2 ** 32));

  let h0 = 0x67452301, h1 = 0xefcdab89, h2 = 0x98badcfe, h3 = 0x10325476, h4 = 0xc3d2e1f0;
  const w = new Int32Array(80);
  const rol = (v: number, s: number) => (v << s) | (v >>> (32 - s));
  const view = new DataView(buf.buffer);
  for (let off = 0; off < total; off += 64) {
    for (let i = 0; i < 16; i++) w[i] = view.getInt32(off + i * 4);
    for (let i = 16; i < 80; i++) w[i] = rol(w[i - 3]! ^ w[i - 8]! ^ w[i - 14]! ^ w[i - 16]!, 1);
    let [a, b, c, d, e] = [h0, h1, h2, h3, h4];
    for (let i = 0; i < 80; i++) {
      let f: number, k: number;
      if (i < 20) { f = (b & c) | (~b & d); k = 0x5a827999; }
      else if (i < 40) { f = b ^ c ^ d; k = 0x6ed9eba1; }
      else if (i < 60) { f = (b & c) | (b & d) | (c & d); k = 0x8f1bbcdc; }
      else { f = b ^ c ^ d; k = 0xca62c1d6; }
      const t = (rol(a, 5) + f + e + k + w[i]!) | 0;
      e = d; d = c; c = rol(b, 30); b = a; a = t;
    }
    h0 = (h0 + a) | 0; h1 = (h1 + b) | 0; h2 = (h2 + c) | 0; h3 = (h3 + d) | 0; h4 = (h4 + e) | 0;
  }
  return [h0, h1, h2, h3, h4].map((h) => (h >>> 0).toString(16).padStart(8, "0")).join("");
}
