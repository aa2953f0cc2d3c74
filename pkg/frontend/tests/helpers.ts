import { CSV_HEADER, SCALING_HEADER } from "../src/csv";

export interface SyntheticOpts {
  engine?: string;
  nbar?: number;
  points?: number;
  horizon?: number;
}

/** CSV + sidecar pair with the simulator's exact schema. */
export function syntheticSeries(opts: SyntheticOpts = {}): { csv: string; sidecar: string } {
  const points = opts.points ?? 40;
  const horizon = opts.horizon ?? 1e5;
  const rows = [CSV_HEADER];
  for (let i = 0; i < points; i++) {
    const tau = i === 0 ? 0 : 10 ** ((i / (points - 1)) * Math.log10(horizon));
    const theta = 0.08 + 0.7 * (1 - Math.exp(-tau / 2e3));
    const kin = 97.5 + 60 * Math.exp(-((Math.log10(tau + 1) - 2.5) ** 2));
    const kurt = 3 - 0.5 * Math.exp(-((Math.log10(tau + 1) - 3.5) ** 2));
    const relLoc = 0.5 * Math.exp(-tau / 1e4) + 0.05;
    const phi = -0.04 * Math.exp(-((Math.log10(tau + 1) - 4) ** 2));
    rows.push([
      tau, theta, 0.01, theta, 0.01, theta * theta, 0.01,
      kin, 1.0, kurt, phi, relLoc, 50 * (opts.nbar ?? 1) * theta * theta,
    ].join(","));
  }
  const sidecar = JSON.stringify({
    schema_version: 1,
    kind: "ensemble-series",
    engine: opts.engine ?? "full",
    dt: 0.1,
    seed: 7,
    trajectories: 24,
    n_aborted: 0,
    pooling: "pooled",
    backend: "numba",
    horizon,
    params_initial: { delta: -1.0, eps: 0.002564, nbar: 0.005, n_atoms: 50 },
    params_final: { delta: -1.0, eps: 0.002564, nbar: opts.nbar ?? 1.0, n_atoms: 50 },
    columns: CSV_HEADER.split(","),
    code_version: "0.1.0",
  });
  return { csv: rows.join("\n") + "\n", sidecar };
}

export function syntheticScalingTable(slopeScale: Record<string, number>): string {
  const lines = [SCALING_HEADER];
  for (const [engine, scale] of Object.entries(slopeScale)) {
    for (const n of [20, 50, 100, 200]) {
      lines.push(`${engine},${n},${scale * n},${0.05 * scale * n}`);
    }
  }
  return lines.join("\n") + "\n";
}

export function count(haystack: string, needle: string): number {
  return haystack.split(needle).length - 1;
}
