/**
 * Readers for the simulator's ensemble-series CSV files and their JSON
 * sidecars. The figure kit consumes these files as-is and never recomputes
 * any physics.
 */

import * as fs from "fs";

export const CSV_HEADER =
  "tau,theta_mean,theta_se,abs_theta_mean,abs_theta_se," +
  "theta_sq_mean,theta_sq_se,kinetic_mean,kinetic_se," +
  "kurtosis,phi11,rel_loc,photons";

export const SCHEMA_VERSION = 1;

export class SchemaError extends Error {}

export interface ModelParams {
  delta: number;
  eps: number;
  nbar: number;
  n_atoms: number;
}

export interface SeriesMeta {
  schema_version: number;
  engine: string;
  dt: number;
  seed: number;
  trajectories: number;
  pooling: string;
  horizon: number;
  params_initial: ModelParams | null;
  params_final: ModelParams | null;
  columns: string[];
}

export type Columns = Record<string, number[]>;

export interface EnsembleSeries {
  meta: SeriesMeta;
  columns: Columns;
  label: string;
}

function requireKey(obj: Record<string, unknown>, key: string, where: string): unknown {
  if (!(key in obj)) throw new SchemaError(`${where}: missing key '${key}'`);
  return obj[key];
}

export function parseSidecar(text: string, where = "sidecar"): SeriesMeta {
  let raw: Record<string, unknown>;
  try {
    raw = JSON.parse(text);
  } catch (err) {
    throw new SchemaError(`${where}: not valid JSON (${err})`);
  }
  const version = requireKey(raw, "schema_version", where);
  if (version !== SCHEMA_VERSION) {
    throw new SchemaError(
      `${where}: schema_version ${version} != ${SCHEMA_VERSION}`,
    );
  }
  const columns = requireKey(raw, "columns", where);
  if (!Array.isArray(columns) || columns.join(",") !== CSV_HEADER) {
    throw new SchemaError(`${where}: column list does not match the schema`);
  }
  return {
    schema_version: SCHEMA_VERSION,
    engine: String(requireKey(raw, "engine", where)),
    dt: Number(requireKey(raw, "dt", where)),
    seed: Number(requireKey(raw, "seed", where)),
    trajectories: Number(requireKey(raw, "trajectories", where)),
    pooling: String(requireKey(raw, "pooling", where)),
    horizon: Number(requireKey(raw, "horizon", where)),
    params_initial: (raw["params_initial"] ?? null) as ModelParams | null,
    params_final: (raw["params_final"] ?? null) as ModelParams | null,
    columns: columns as string[],
  };
}

export function parseSeriesCsv(
  csvText: string,
  sidecarText: string,
  label = "",
): EnsembleSeries {
  const meta = parseSidecar(sidecarText);
  const lines = csvText.trim().split(/\r?\n/);
  if (lines.length < 2) throw new SchemaError("CSV has no data rows");
  if (lines[0] !== CSV_HEADER) {
    throw new SchemaError(`unexpected CSV header: ${lines[0]}`);
  }
  const names = CSV_HEADER.split(",");
  const columns: Columns = {};
  for (const name of names) columns[name] = [];
  for (let i = 1; i < lines.length; i++) {
    const cells = lines[i].split(",");
    if (cells.length !== names.length) {
      throw new SchemaError(`row ${i} has ${cells.length} cells`);
    }
    for (let j = 0; j < names.length; j++) {
      columns[names[j]].push(Number(cells[j]));
    }
  }
  const fallback = meta.params_final
    ? `${meta.engine} nbar=${meta.params_final.nbar}`
    : meta.engine;
  return { meta, columns, label: label || fallback };
}

export function loadSeries(csvPath: string, label = ""): EnsembleSeries {
  const sidecarPath = csvPath.replace(/\.csv$/, "") + ".json";
  if (!fs.existsSync(sidecarPath)) {
    throw new SchemaError(`missing sidecar ${sidecarPath}`);
  }
  return parseSeriesCsv(
    fs.readFileSync(csvPath, "utf8"),
    fs.readFileSync(sidecarPath, "utf8"),
    label,
  );
}

export interface ScalingRow {
  engine: string;
  n_atoms: number;
  t_star: number;
  t_star_err: number | null;
}

export const SCALING_HEADER = "engine,n_atoms,t_star,t_star_err";

export function parseScalingCsv(text: string): ScalingRow[] {
  const lines = text.trim().split(/\r?\n/);
  if (lines.length === 0 || lines[0] !== SCALING_HEADER) {
    throw new SchemaError(`unexpected scaling table header: ${lines[0] ?? ""}`);
  }
  const rows: ScalingRow[] = [];
  for (let i = 1; i < lines.length; i++) {
    const [engine, n, t, err] = lines[i].split(",");
    const row = {
      engine,
      n_atoms: Number(n),
      t_star: Number(t),
      t_star_err: err === undefined || Number.isNaN(Number(err)) ? null : Number(err),
    };
    if (!engine || !Number.isFinite(row.n_atoms) || !Number.isFinite(row.t_star)) {
      throw new SchemaError(`bad scaling row: ${lines[i]}`);
    }
    rows.push(row);
  }
  if (rows.length === 0) throw new SchemaError("scaling table is empty");
  return rows;
}
