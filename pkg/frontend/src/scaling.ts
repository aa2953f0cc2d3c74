/**
 * Log-log relaxation-time scaling figure: t* against N per engine, with
 * least-squares fit lines in log space. Display-level fitting only; the
 * numbers come from the simulator's sweep table.
 */

import { ScalingRow, SchemaError } from "./csv";
import { Frame, legend, logXAxis, panelFrame, yAxis } from "./axes";
import { PALETTE, el, fmt, logScale } from "./svg";

export interface ScalingSpec {
  width?: number;
  height?: number;
  title?: string;
}

export interface FitLine {
  slope: number;
  intercept: number; // in ln t* = intercept + slope ln N
}

export function fitLogLog(points: { n: number; t: number }[]): FitLine {
  if (points.length < 2) {
    throw new SchemaError("need at least two sizes per engine to fit a line");
  }
  const xs = points.map((p) => Math.log(p.n));
  const ys = points.map((p) => Math.log(p.t));
  const xm = xs.reduce((a, b) => a + b, 0) / xs.length;
  const ym = ys.reduce((a, b) => a + b, 0) / ys.length;
  let sxx = 0;
  let sxy = 0;
  for (let i = 0; i < xs.length; i++) {
    sxx += (xs[i] - xm) ** 2;
    sxy += (xs[i] - xm) * (ys[i] - ym);
  }
  const slope = sxy / sxx;
  return { slope, intercept: ym - slope * xm };
}

export function renderScalingFigure(rows: ScalingRow[], spec: ScalingSpec = {}): string {
  if (rows.length === 0) throw new SchemaError("scaling table is empty");
  const width = spec.width ?? 520;
  const height = spec.height ?? 420;
  const margin = { left: 70, right: 16, top: 30, bottom: 48 };
  const frame: Frame = {
    x0: margin.left, y0: margin.top,
    width: width - margin.left - margin.right,
    height: height - margin.top - margin.bottom,
  };

  const engines = [...new Set(rows.map((r) => r.engine))];
  const ns = rows.map((r) => r.n_atoms);
  const ts = rows.map((r) => r.t_star);
  const x = logScale(
    [Math.min(...ns) / 1.3, Math.max(...ns) * 1.3],
    [frame.x0, frame.x0 + frame.width],
  );
  const y = logScale(
    [Math.min(...ts) / 1.6, Math.max(...ts) * 1.6],
    [frame.y0 + frame.height, frame.y0],
  );

  const parts: string[] = [panelFrame(frame, "panel panel-scaling")];
  const fits: Record<string, FitLine> = {};

  engines.forEach((engine, i) => {
    const color = PALETTE[(i + 1) % PALETTE.length];
    const mine = rows.filter((r) => r.engine === engine);
    for (const r of mine) {
      parts.push(el("circle", {
        cx: fmt(x(r.n_atoms)), cy: fmt(y(r.t_star)), r: 3.2,
        fill: color, class: `point-${engine}`,
      }));
      if (r.t_star_err !== null && r.t_star_err > 0) {
        parts.push(el("line", {
          x1: fmt(x(r.n_atoms)), x2: fmt(x(r.n_atoms)),
          y1: fmt(y(r.t_star - r.t_star_err)),
          y2: fmt(y(r.t_star + r.t_star_err)),
          stroke: color, "stroke-width": 1, class: `errbar-${engine}`,
        }));
      }
    }
    const fit = fitLogLog(mine.map((r) => ({ n: r.n_atoms, t: r.t_star })));
    fits[engine] = fit;
    const nLo = x.domain[0];
    const nHi = x.domain[1];
    const tLo = Math.exp(fit.intercept + fit.slope * Math.log(nLo));
    const tHi = Math.exp(fit.intercept + fit.slope * Math.log(nHi));
    parts.push(el("line", {
      x1: fmt(x(nLo)), y1: fmt(y(tLo)), x2: fmt(x(nHi)), y2: fmt(y(tHi)),
      stroke: color, "stroke-width": 1.2, "stroke-dasharray": "5 3",
      class: `fit-${engine}`,
    }));
  });

  parts.push(logXAxis(frame, x, "atom number N"));
  parts.push(yAxis(frame, y, "t* (1/kappa)", { log: true }));
  parts.push(legend(
    engines.map((engine, i) => ({
      label: `${engine} (slope ${fits[engine].slope.toFixed(2)})`,
      color: PALETTE[(i + 1) % PALETTE.length],
    })),
    frame.x0 + 12, frame.y0 + 18,
  ));
  if (spec.title) {
    parts.push(el("text", {
      x: width / 2, y: 19, "text-anchor": "middle", "font-size": 13, class: "title",
    }, [spec.title]));
  }

  return el("svg", {
    xmlns: "http://www.w3.org/2000/svg",
    width, height, viewBox: `0 0 ${width} ${height}`,
    "font-family": "Helvetica, Arial, sans-serif",
  }, parts);
}
