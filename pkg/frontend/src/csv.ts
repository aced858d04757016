/**
 * Reader for the simulator's BER sweep CSV.
 *
 * Expected header (exact):
 *   code,decoder,modulation,N,snr_db,trials,bit_errors,ber,norm_evals_total,seed
 */

export interface BerRow {
  code: string;
  decoder: string;
  modulation: string;
  n_rx: number;
  snr_db: number;
  trials: number;
  bit_errors: number;
  ber: number;
  norm_evals_total: number;
  seed: number;
}

export const EXPECTED_HEADER =
  "code,decoder,modulation,N,snr_db,trials,bit_errors,ber,norm_evals_total,seed";

export class CsvError extends Error {}

function num(field: string, value: string, line: number): number {
  const v = Number(value);
  if (value.trim() === "" || !Number.isFinite(v)) {
    throw new CsvError(`line ${line}: field ${field} is not a number: ${JSON.stringify(value)}`);
  }
  return v;
}

export function parseBerCsv(text: string): BerRow[] {
  const lines = text.split(/\r?\n/).filter((l) => l.trim().length > 0);
  if (lines.length === 0) {
    throw new CsvError("empty file");
  }
  if (lines[0].trim() !== EXPECTED_HEADER) {
    throw new CsvError(`unexpected header: ${JSON.stringify(lines[0])}`);
  }
  const rows: BerRow[] = [];
  for (let i = 1; i < lines.length; i++) {
    const parts = lines[i].split(",");
    if (parts.length !== 10) {
      throw new CsvError(`line ${i + 1}: expected 10 fields, got ${parts.length}`);
    }
    const ber = num("ber", parts[7], i + 1);
    if (ber < 0 || ber > 1) {
      throw new CsvError(`line ${i + 1}: ber ${ber} outside [0, 1]`);
    }
    rows.push({
      code: parts[0],
      decoder: parts[1],
      modulation: parts[2],
      n_rx: num("N", parts[3], i + 1),
      snr_db: num("snr_db", parts[4], i + 1),
      trials: num("trials", parts[5], i + 1),
      bit_errors: num("bit_errors", parts[6], i + 1),
      ber,
      norm_evals_total: num("norm_evals_total", parts[8], i + 1),
      seed: num("seed", parts[9], i + 1),
    });
  }
  return rows;
}
