/**
 * State model for one group scoring session.
 *
 * Holds the pending/completed queues, per-expert progress, the live matrix,
 * the what-if override state and the gap register. Every number kept here
 * originated in an API response; the client performs no recomputation, so a
 * UCA only moves to the completed queue once the server confirms the sheet
 * and returns a fresh assessment.
 */

import { ApiError, ReviewApiClient } from './apiClient';
import {
  AssessmentPayload,
  EjFactor,
  FieldError,
  GapsPayload,
  MatrixPayload,
  OverrideRequest,
  UcaSummary,
} from './types';
import { validateFactorEntry, toFactorValues } from './validation';

export interface ScoreSubmission {
  kind: 'submitted';
  assessment: AssessmentPayload;
}

export interface ScoreRejection {
  kind: 'rejected';
  errors: FieldError[];
  /** true when the form blocked the entry and no request was sent */
  blockedClientSide: boolean;
}

export type ScoreOutcome = ScoreSubmission | ScoreRejection;

export class ScoringSessionView {
  private ucas: UcaSummary[] = [];
  private assessments = new Map<string, AssessmentPayload>();
  private matrix: MatrixPayload = { rows: [] };
  private gaps: GapsPayload | null = null;
  private overrideActive_ = false;

  constructor(
    private readonly client: ReviewApiClient,
    readonly expertId: string,
  ) {}

  /** UCAs this expert has not scored yet, in server order. */
  get pending(): UcaSummary[] {
    return this.ucas.filter((u) => !u.scoredBy.includes(this.expertId));
  }

  /** UCAs already scored by this expert. */
  get completed(): UcaSummary[] {
    return this.ucas.filter((u) => u.scoredBy.includes(this.expertId));
  }

  /** expert id -> number of UCAs that expert has scored. */
  get progressByExpert(): Map<string, number> {
    const progress = new Map<string, number>();
    for (const uca of this.ucas) {
      for (const expert of uca.scoredBy) {
        progress.set(expert, (progress.get(expert) ?? 0) + 1);
      }
    }
    return progress;
  }

  get matrixRows(): AssessmentPayload[] {
    return this.matrix.rows;
  }

  get overrideActive(): boolean {
    return this.overrideActive_;
  }

  get gapRegister(): GapsPayload | null {
    return this.gaps;
  }

  assessmentOf(ucaId: string): AssessmentPayload | undefined {
    return this.assessments.get(ucaId);
  }

  /** UCAs whose EJ interval straddles a band edge, for group discussion. */
  get boundaryFlagged(): string[] {
    return this.matrix.rows.filter((r) => r.boundaryFlag).map((r) => r.ucaId);
  }

  async refreshUcas(): Promise<void> {
    this.ucas = (await this.client.listUcas()).ucas;
  }

  async refreshMatrix(): Promise<void> {
    this.matrix = await this.client.getMatrix();
  }

  async refreshGaps(): Promise<void> {
    this.gaps = await this.client.getGaps();
  }

  /**
   * Validate locally, submit, then adopt the server's recomputed assessment.
   * Out-of-range entries are rejected before any request is made.
   */
  async scoreUca(
    ucaId: string,
    entry: Partial<Record<EjFactor, number | string>>,
    rationale?: string,
  ): Promise<ScoreOutcome> {
    const problems = validateFactorEntry(entry);
    if (problems.length > 0) {
      return { kind: 'rejected', errors: problems, blockedClientSide: true };
    }
    try {
      await this.client.submitSheet(ucaId, toFactorValues(entry), rationale);
    } catch (error) {
      if (error instanceof ApiError) {
        return { kind: 'rejected', errors: error.payload.errors, blockedClientSide: false };
      }
      throw error;
    }
    const assessment = await this.client.getAssessment(ucaId);
    this.assessments.set(ucaId, assessment);
    const uca = this.ucas.find((u) => u.id === ucaId);
    if (uca && !uca.scoredBy.includes(this.expertId)) {
      uca.scoredBy = [...uca.scoredBy, this.expertId].sort();
    }
    return { kind: 'submitted', assessment };
  }

  /** Apply a what-if override; the refreshed matrix is session-scoped. */
  async applyOverride(overrides: OverrideRequest): Promise<void> {
    await this.client.setOverrides(overrides);
    this.overrideActive_ = true;
    await this.refreshMatrix();
  }

  /** Drop the override and restore the canonical matrix. */
  async resetOverride(): Promise<void> {
    await this.client.resetOverrides();
    this.overrideActive_ = false;
    await this.refreshMatrix();
  }
}
