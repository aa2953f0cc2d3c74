/**
 * Two-panel quench figure: order parameter and kinetic energy against
 * log-time, with insets for the relative localization and the kurtosis.
 * Pure function of the parsed series files.
 */

import { EnsembleSeries, SchemaError } from "./csv";
import { Frame, legend, logXAxis, panelFrame, yAxis } from "./axes";
import { PALETTE, Scale, el, fmt, linearScale, logScale, polyline } from "./svg";

export interface QuenchSpec {
  width?: number;
  height?: number;
  tauMin?: number;
  title?: string;
}

function positiveTaus(series: EnsembleSeries[]): [number, number] {
  let hi = -Infinity;
  for (const s of series) {
    for (const t of s.columns["tau"]) {
      if (t > 0) hi = Math.max(hi, t);
    }
  }
  if (!Number.isFinite(hi)) throw new SchemaError("no positive times to plot");
  return [1.0, hi];
}

function maxOf(series: EnsembleSeries[], column: string): number {
  let hi = -Infinity;
  for (const s of series) {
    for (const v of s.columns[column]) if (Number.isFinite(v)) hi = Math.max(hi, v);
  }
  return hi;
}

function inset(
  parent: Frame,
  series: EnsembleSeries[],
  column: string,
  label: string,
  yDomain: [number, number],
  xScale: Scale,
  guide?: number,
): string {
  const frame: Frame = {
    x0: parent.x0 + 0.56 * parent.width,
    y0: parent.y0 + 0.08 * parent.height,
    width: 0.4 * parent.width,
    height: 0.42 * parent.height,
  };
  const ix = logScale(xScale.domain, [frame.x0, frame.x0 + frame.width]);
  const iy = linearScale(yDomain, [frame.y0 + frame.height, frame.y0]);
  const parts = [panelFrame(frame, `inset inset-${column}`)];
  if (guide !== undefined) {
    parts.push(el("line", {
      x1: frame.x0, x2: frame.x0 + frame.width,
      y1: fmt(iy(guide)), y2: fmt(iy(guide)),
      stroke: "#999", "stroke-dasharray": "3 3",
    }));
  }
  series.forEach((s, i) => {
    parts.push(polyline(s.columns["tau"], s.columns[column], ix, iy, {
      stroke: PALETTE[i % PALETTE.length], "stroke-width": 1, class: `inset-line-${column}`,
    }));
  });
  parts.push(el("text", {
    x: frame.x0 + 4, y: frame.y0 + 11, "font-size": 9, class: "inset-label",
  }, [label]));
  return parts.join("");
}

export function renderQuenchFigure(series: EnsembleSeries[], spec: QuenchSpec = {}): string {
  if (series.length === 0) throw new SchemaError("no series given");
  const width = spec.width ?? 560;
  const height = spec.height ?? 640;
  const margin = { left: 64, right: 16, top: 28, bottom: 46 };
  const gap = 52;
  const panelHeight = (height - margin.top - margin.bottom - gap) / 2;
  const panelWidth = width - margin.left - margin.right;

  const tauDomain = spec.tauMin ? [spec.tauMin, positiveTaus(series)[1]] as [number, number]
    : positiveTaus(series);
  const topFrame: Frame = { x0: margin.left, y0: margin.top, width: panelWidth, height: panelHeight };
  const botFrame: Frame = {
    x0: margin.left, y0: margin.top + panelHeight + gap, width: panelWidth, height: panelHeight,
  };

  const xTop = logScale(tauDomain, [topFrame.x0, topFrame.x0 + panelWidth]);
  const xBot = logScale(tauDomain, [botFrame.x0, botFrame.x0 + panelWidth]);
  const yTheta = linearScale([0, 1], [topFrame.y0 + panelHeight, topFrame.y0]);
  const kinMax = maxOf(series, "kinetic_mean");
  const yKin = linearScale([0, 1.1 * kinMax], [botFrame.y0 + panelHeight, botFrame.y0]);

  const parts: string[] = [];
  parts.push(panelFrame(topFrame, "panel panel-theta"));
  parts.push(panelFrame(botFrame, "panel panel-kinetic"));

  series.forEach((s, i) => {
    const color = PALETTE[i % PALETTE.length];
    parts.push(polyline(s.columns["tau"], s.columns["abs_theta_mean"], xTop, yTheta, {
      stroke: color, "stroke-width": 1.5, class: "line-abs-theta",
    }));
    parts.push(polyline(s.columns["tau"], s.columns["kinetic_mean"], xBot, yKin, {
      stroke: color, "stroke-width": 1.5, class: "line-kinetic",
    }));
  });

  parts.push(logXAxis(topFrame, xTop, "time (1/kappa)"));
  parts.push(logXAxis(botFrame, xBot, "time (1/kappa)"));
  parts.push(yAxis(topFrame, yTheta, "|Theta|"));
  parts.push(yAxis(botFrame, yKin, "kinetic energy (hbar omega_r)"));

  const relMax = Math.min(5, Math.max(1.2, maxOf(series, "rel_loc")));
  parts.push(inset(topFrame, series, "rel_loc", "dTheta/|Theta|", [0, relMax], xTop));
  const kurtVals = series.flatMap((s) => s.columns["kurtosis"].filter(Number.isFinite));
  const kurtLo = Math.min(2, ...kurtVals);
  const kurtHi = Math.max(4, ...kurtVals);
  parts.push(inset(botFrame, series, "kurtosis", "kurtosis", [kurtLo, kurtHi], xBot, 3.0));

  parts.push(legend(
    series.map((s, i) => ({ label: s.label, color: PALETTE[i % PALETTE.length] })),
    topFrame.x0 + 10, topFrame.y0 + 16,
  ));
  if (spec.title) {
    parts.push(el("text", {
      x: width / 2, y: 18, "text-anchor": "middle", "font-size": 13, class: "title",
    }, [spec.title]));
  }

  return el("svg", {
    xmlns: "http://www.w3.org/2000/svg",
    width, height, viewBox: `0 0 ${width} ${height}`,
    "font-family": "Helvetica, Arial, sans-serif",
  }, parts);
}
