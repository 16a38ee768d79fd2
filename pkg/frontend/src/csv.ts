/**
 * Strict readers for the solver's CSV artifacts.
 *
 * Both schemas are fixed by the producing side, so anything unexpected —
 * a renamed column, a ragged row, a non-numeric cell — is an input bug
 * and throws with the line number rather than being papered over.
 */

export interface FiberRow {
  t: number;
  phi: number;
  dphi: number;
}

export interface SweepRow {
  lambda: number;
  m_g: number;
  m_1g: number;
  u_plus_norm: number;
  u_minus_norm: number;
  residual_plus: number;
  residual_minus: number;
  margin_minus: number;
  iterations_plus: number;
  iterations_minus: number;
  m_V: number;
  m_0: number;
}

export const SWEEP_COLUMNS: readonly (keyof SweepRow)[] = [
  "lambda", "m_g", "m_1g", "u_plus_norm", "u_minus_norm",
  "residual_plus", "residual_minus", "margin_minus",
  "iterations_plus", "iterations_minus", "m_V", "m_0",
];

function splitLines(text: string): string[] {
  const lines = text.split("\n");
  if (lines.length > 0 && lines[lines.length - 1] === "") lines.pop();
  return lines;
}

function parseCell(cell: string, line: number, column: string): number {
  const value = Number(cell);
  if (cell.trim() === "" || !Number.isFinite(value)) {
    throw new Error(`line ${line}: column "${column}" is not a finite number: ${JSON.stringify(cell)}`);
  }
  return value;
}

function parseTable(text: string, columns: readonly string[], label: string): number[][] {
  const lines = splitLines(text);
  if (lines.length === 0) throw new Error(`${label} CSV is empty`);
  const header = (lines[0] ?? "").split(",");
  for (const col of columns) {
    if (!header.includes(col)) {
      throw new Error(`${label} CSV is missing required column "${col}"`);
    }
  }
  if (header.length !== columns.length || columns.some((c, i) => header[i] !== c)) {
    throw new Error(`${label} CSV header mismatch: expected "${columns.join(",")}", got "${header.join(",")}"`);
  }
  if (lines.length === 1) throw new Error(`${label} CSV has no data rows`);
  const rows: number[][] = [];
  for (let i = 1; i < lines.length; i++) {
    const cells = (lines[i] ?? "").split(",");
    if (cells.length !== columns.length) {
      throw new Error(`line ${i + 1}: expected ${columns.length} cells, got ${cells.length}`);
    }
    rows.push(cells.map((cell, j) => parseCell(cell, i + 1, columns[j] ?? "")));
  }
  return rows;
}

export function parseFiberCsv(text: string): FiberRow[] {
  return parseTable(text, ["t", "phi", "dphi"], "fiber").map((r) => ({
    t: r[0] ?? 0,
    phi: r[1] ?? 0,
    dphi: r[2] ?? 0,
  }));
}

export function parseSweepCsv(text: string): SweepRow[] {
  return parseTable(text, SWEEP_COLUMNS, "sweep").map((r) => {
    const row = {} as Record<keyof SweepRow, number>;
    SWEEP_COLUMNS.forEach((name, i) => {
      row[name] = r[i] ?? 0;
    });
    return row as SweepRow;
  });
}
