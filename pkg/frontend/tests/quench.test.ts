import * as path from "path";
import { describe, expect, it } from "vitest";

import { SchemaError, loadSeries, parseSeriesCsv } from "../src/csv";
import { renderQuenchFigure } from "../src/quench";
import { count, syntheticSeries } from "./helpers";

const FIXTURES = path.join(__dirname, "fixtures");

function series(opts = {}) {
  const { csv, sidecar } = syntheticSeries(opts);
  return parseSeriesCsv(csv, sidecar);
}

describe("quench figure", () => {
  it("renders one curve per series in both panels", () => {
    const svg = renderQuenchFigure([series()]);
    expect(svg.startsWith("<svg")).toBe(true);
    expect(count(svg, 'class="line-abs-theta"')).toBe(1);
    expect(count(svg, 'class="line-kinetic"')).toBe(1);
  });

  it("lays out two panels with the two insets", () => {
    const svg = renderQuenchFigure([
      series({ nbar: 0.75 }),
      series({ nbar: 1.0 }),
      series({ nbar: 1.5 }),
    ]);
    expect(count(svg, 'class="panel panel-theta"')).toBe(1);
    expect(count(svg, 'class="panel panel-kinetic"')).toBe(1);
    expect(count(svg, "inset-rel_loc")).toBe(1);
    expect(count(svg, "inset-kurtosis")).toBe(1);
    expect(count(svg, 'class="line-abs-theta"')).toBe(3);
    expect(count(svg, 'class="inset-line-kurtosis"')).toBe(3);
    // log-time axes on both panels
    expect(count(svg, ">1e4<")).toBeGreaterThanOrEqual(2);
  });

  it("is a pure function of its inputs", () => {
    const a = renderQuenchFigure([series()], { title: "quench" });
    const b = renderQuenchFigure([series()], { title: "quench" });
    expect(a).toBe(b);
  });

  it("renders the real simulator output", () => {
    const real = loadSeries(path.join(FIXTURES, "quench_small.csv"));
    const svg = renderQuenchFigure([real]);
    expect(count(svg, "polyline")).toBeGreaterThanOrEqual(4);
    expect(svg).toContain("kinetic energy");
  });

  it("rejects an empty input set", () => {
    expect(() => renderQuenchFigure([])).toThrow(SchemaError);
  });
});
