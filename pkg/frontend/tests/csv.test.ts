import * as fs from "fs";
import * as path from "path";
import { describe, expect, it } from "vitest";

import {
  CSV_HEADER,
  SchemaError,
  loadSeries,
  parseScalingCsv,
  parseSeriesCsv,
} from "../src/csv";
import { syntheticSeries } from "./helpers";

const FIXTURES = path.join(__dirname, "fixtures");

describe("series parsing", () => {
  it("round-trips a synthetic series", () => {
    const { csv, sidecar } = syntheticSeries({ points: 12 });
    const series = parseSeriesCsv(csv, sidecar);
    expect(series.meta.engine).toBe("full");
    expect(series.columns["tau"]).toHaveLength(12);
    expect(series.columns["kurtosis"][0]).toBeCloseTo(3, 0);
    expect(series.label).toContain("full");
  });

  it("reads a real simulator output file", () => {
    const series = loadSeries(path.join(FIXTURES, "quench_small.csv"));
    expect(series.meta.schema_version).toBe(1);
    expect(series.meta.trajectories).toBeGreaterThan(0);
    expect(series.columns["tau"][0]).toBe(0);
    expect(Math.max(...series.columns["abs_theta_mean"])).toBeLessThanOrEqual(1);
  });

  it("rejects a wrong schema version", () => {
    const { csv, sidecar } = syntheticSeries();
    const bad = sidecar.replace('"schema_version":1', '"schema_version":2');
    expect(() => parseSeriesCsv(csv, bad)).toThrow(SchemaError);
  });

  it("rejects a mangled header", () => {
    const { csv, sidecar } = syntheticSeries();
    const bad = csv.replace("theta_mean", "theta_avg");
    expect(() => parseSeriesCsv(bad, sidecar)).toThrow(SchemaError);
  });

  it("rejects a sidecar whose column list drifted", () => {
    const { csv, sidecar } = syntheticSeries();
    const bad = sidecar.replace('"phi11"', '"phi12"');
    expect(() => parseSeriesCsv(csv, bad)).toThrow(SchemaError);
  });

  it("requires the sidecar file to exist", () => {
    const tmp = fs.mkdtempSync("/tmp/figkit-");
    const { csv } = syntheticSeries();
    const csvPath = path.join(tmp, "lonely.csv");
    fs.writeFileSync(csvPath, csv);
    expect(() => loadSeries(csvPath)).toThrow(SchemaError);
  });

  it("keeps the exact column contract", () => {
    expect(CSV_HEADER.split(",")).toHaveLength(13);
  });
});

describe("scaling table parsing", () => {
  it("reads the real sweep output", () => {
    const rows = parseScalingCsv(
      fs.readFileSync(path.join(FIXTURES, "tstar_small.csv"), "utf8"),
    );
    expect(rows.length).toBeGreaterThanOrEqual(2);
    expect(rows[0].engine).toBe("full");
    expect(rows[0].t_star).toBeGreaterThan(0);
  });

  it("rejects an empty table", () => {
    expect(() => parseScalingCsv("engine,n_atoms,t_star,t_star_err\n")).toThrow(
      SchemaError,
    );
  });

  it("rejects a bad header", () => {
    expect(() => parseScalingCsv("engine,n,tstar\nfull,10,5\n")).toThrow(SchemaError);
  });
});
