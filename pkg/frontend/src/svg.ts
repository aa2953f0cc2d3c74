/** Minimal SVG string building plus log-axis helpers. */

export type Attrs = Record<string, string | number>;

export function el(tag: string, attrs: Attrs, children: string[] = []): string {
  const attrText = Object.entries(attrs)
    .map(([k, v]) => `${k}="${v}"`)
    .join(" ");
  if (children.length === 0) return `<${tag} ${attrText}/>`;
  return `<${tag} ${attrText}>${children.join("")}</${tag}>`;
}

export function fmt(v: number): string {
  return Number.isInteger(v) ? String(v) : v.toPrecision(6).replace(/\.?0+$/, "");
}

export interface Scale {
  (value: number): number;
  domain: [number, number];
  range: [number, number];
}

export function logScale(domain: [number, number], range: [number, number]): Scale {
  const [d0, d1] = domain.map(Math.log10);
  const [r0, r1] = range;
  const fn = ((v: number) => r0 + ((Math.log10(v) - d0) / (d1 - d0)) * (r1 - r0)) as Scale;
  fn.domain = domain;
  fn.range = range;
  return fn;
}

export function linearScale(domain: [number, number], range: [number, number]): Scale {
  const [d0, d1] = domain;
  const [r0, r1] = range;
  const fn = ((v: number) => r0 + ((v - d0) / (d1 - d0)) * (r1 - r0)) as Scale;
  fn.domain = domain;
  fn.range = range;
  return fn;
}

export function decadeTicks(lo: number, hi: number): number[] {
  const ticks: number[] = [];
  for (let e = Math.ceil(Math.log10(lo)); e <= Math.floor(Math.log10(hi)); e++) {
    ticks.push(10 ** e);
  }
  return ticks;
}

export function niceTicks(lo: number, hi: number, count = 5): number[] {
  const span = hi - lo;
  if (span <= 0) return [lo];
  const step = 10 ** Math.floor(Math.log10(span / count));
  const candidates = [step, 2 * step, 5 * step, 10 * step];
  const chosen = candidates.find((s) => span / s <= count + 1) ?? 10 * step;
  const ticks: number[] = [];
  for (let v = Math.ceil(lo / chosen) * chosen; v <= hi + 1e-12 * span; v += chosen) {
    ticks.push(Number(v.toPrecision(12)));
  }
  return ticks;
}

export function polyline(
  xs: number[],
  ys: number[],
  xScale: Scale,
  yScale: Scale,
  attrs: Attrs,
): string {
  const pts: string[] = [];
  for (let i = 0; i < xs.length; i++) {
    const x = xs[i];
    const y = ys[i];
    if (!Number.isFinite(x) || !Number.isFinite(y)) continue;
    if (x < xScale.domain[0] || x > xScale.domain[1]) continue;
    pts.push(`${fmt(xScale(x))},${fmt(yScale(y))}`);
  }
  return el("polyline", { points: pts.join(" "), fill: "none", ...attrs });
}

export function tickLabel(v: number): string {
  const e = Math.log10(v);
  if (Number.isInteger(e) && (e < -2 || e > 3)) {
    return `1e${e}`;
  }
  return String(v);
}

export const PALETTE = ["#1f1f1f", "#c0392b", "#2e6fb0", "#7f7f7f", "#2a9d5c", "#8e44ad"];
