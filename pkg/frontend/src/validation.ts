/**
 * Client-side validation of expert score entry.
 *
 * Mirrors the server's rules (five factors, integers 1..5) so obviously bad
 * submissions are blocked at the form with inline messages and never reach
 * the network.
 */

import { EJ_FACTORS, EjFactor, FactorValues, FieldError } from './types';

/** Validate a raw form model; empty result means the sheet may be sent. */
export function validateFactorEntry(
  raw: Partial<Record<EjFactor, number | string | null | undefined>>,
): FieldError[] {
  const errors: FieldError[] = [];
  for (const factor of EJ_FACTORS) {
    const value = raw[factor];
    if (value === undefined || value === null || value === '') {
      errors.push({ field: factor, message: 'missing' });
      continue;
    }
    const numeric = typeof value === 'string' ? Number(value) : value;
    if (!Number.isInteger(numeric) || numeric < 1 || numeric > 5) {
      errors.push({ field: factor, message: 'out of range 1..5' });
    }
  }
  return errors;
}

/** Narrow a validated form model to the typed payload. */
export function toFactorValues(
  raw: Partial<Record<EjFactor, number | string>>,
): FactorValues {
  const problems = validateFactorEntry(raw);
  if (problems.length > 0) {
    const detail = problems.map((p) => `${p.field}: ${p.message}`).join('; ');
    throw new Error(`invalid factor entry: ${detail}`);
  }
  const out = {} as FactorValues;
  for (const factor of EJ_FACTORS) {
    const value = raw[factor];
    out[factor] = typeof value === 'string' ? Number(value) : (value as number);
  }
  return out;
}
