/**
 * Parsers for the solver's CSV artifacts.
 *
 * Profile files carry the header `x,rho`; energy traces carry
 * `step,t,e,delta_e`. Anything else (wrong header, non-numeric cell, ragged
 * row) is rejected with the offending file named in the error.
 */

export interface ProfileSeries {
  x: number[];
  rho: number[];
}

export interface EnergySeries {
  step: number[];
  t: number[];
  e: number[];
  deltaE: number[];
}

export class CsvError extends Error {
  constructor(public readonly file: string, detail: string) {
    super(`${file}: ${detail}`);
    this.name = "CsvError";
  }
}

function splitRows(text: string, file: string): string[][] {
  const lines = text.split(/\r?\n/).filter((line) => line.trim().length > 0);
  if (lines.length < 2) {
    throw new CsvError(file, "no data rows");
  }
  return lines.map((line) => line.split(","));
}

function toNumber(cell: string, file: string, line: number): number {
  const value = Number(cell);
  if (cell.trim() === "" || Number.isNaN(value)) {
    throw new CsvError(file, `non-numeric cell '${cell}' on line ${line + 1}`);
  }
  return value;
}

function parseColumns(
  text: string,
  file: string,
  header: string[],
): number[][] {
  const rows = splitRows(text, file);
  const got = rows[0].map((h) => h.trim());
  if (got.length !== header.length || !header.every((h, i) => got[i] === h)) {
    throw new CsvError(
      file,
      `expected header '${header.join(",")}', got '${got.join(",")}'`,
    );
  }
  const columns: number[][] = header.map(() => []);
  for (let i = 1; i < rows.length; i++) {
    if (rows[i].length !== header.length) {
      throw new CsvError(file, `expected ${header.length} cells on line ${i + 1}`);
    }
    for (let j = 0; j < header.length; j++) {
      columns[j].push(toNumber(rows[i][j], file, i));
    }
  }
  return columns;
}

export function parseProfileCsv(text: string, file: string): ProfileSeries {
  const [x, rho] = parseColumns(text, file, ["x", "rho"]);
  return { x, rho };
}

export function parseEnergyCsv(text: string, file: string): EnergySeries {
  const [step, t, e, deltaE] = parseColumns(text, file, ["step", "t", "e", "delta_e"]);
  return { step, t, e, deltaE };
}

/**
 * Index of the first step whose energy exceeds its predecessor beyond
 * round-off (the traces of stable runs have none).
 */
export function firstEnergyIncrease(e: number[]): number | null {
  for (let i = 1; i < e.length; i++) {
    if (e[i] > e[i - 1] * (1 + 1e-13)) {
      return i;
    }
  }
  return null;
}
