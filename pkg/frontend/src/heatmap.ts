/**
 * 5x5 matrix heatmap model: severity level x priority-value level, with UCA
 * chips in the cells. Cell coordinates are derived only for layout; the
 * band shown on each chip is the server-assigned one.
 */

import { AssessmentPayload } from './types';

export interface HeatmapChip {
  ucaId: string;
  band: string;
  boundary: boolean;
}

export interface HeatmapCell {
  /** severity level 1..5 (1 = least severe) */
  severityLevel: number;
  /** priority-value level 1..5 (1 = lowest value) */
  valueLevel: number;
  chips: HeatmapChip[];
}

/** Quantize a [1, 5] score onto levels 1..5 (upper edges inclusive). */
export function levelOf(score: number): number {
  if (score <= 1) return 1;
  if (score >= 5) return 5;
  return Math.min(5, Math.floor((score - 1) / 0.8) + 1);
}

/** Map the EJ x CIF value range [1, 25] onto the same 1..5 scale. */
export function valueLevelOf(value: number): number {
  return levelOf(1 + (4 * (value - 1)) / 24);
}

export function buildHeatmap(rows: AssessmentPayload[]): HeatmapCell[][] {
  const grid: HeatmapCell[][] = [];
  for (let severity = 1; severity <= 5; severity++) {
    const row: HeatmapCell[] = [];
    for (let value = 1; value <= 5; value++) {
      row.push({ severityLevel: severity, valueLevel: value, chips: [] });
    }
    grid.push(row);
  }
  for (const assessment of rows) {
    const severity = levelOf(assessment.pms);
    const value = valueLevelOf(assessment.ucaPriorityValue);
    grid[severity - 1][value - 1].chips.push({
      ucaId: assessment.ucaId,
      band: assessment.band,
      boundary: assessment.boundaryFlag,
    });
  }
  return grid;
}

export function chipCount(grid: HeatmapCell[][]): number {
  return grid.flat().reduce((total, cell) => total + cell.chips.length, 0);
}
