/**
 * Payload shapes exchanged with the review API (version prefix /v1).
 * The client never recomputes any of these values; everything displayed
 * comes verbatim from a server response.
 */

export const EJ_FACTORS = [
  'operationalDisruption',
  'criticality',
  'detectability',
  'effectOnOtherStakeholders',
  'likelihoodOfOccurrence',
] as const;

export type EjFactor = (typeof EJ_FACTORS)[number];

export type FactorValues = Record<EjFactor, number>;

export interface UcaSummary {
  id: string;
  guideWord: string;
  context: string;
  losses: string[];
  scoredBy: string[];
}

export interface UcaListPayload {
  ucas: UcaSummary[];
}

export interface Interval {
  lo: number;
  hi: number;
}

export interface AssessmentPayload {
  ucaId: string;
  pms: number;
  cif: number;
  ejPoint: number;
  ejInterval: Interval;
  ucaPriorityValue: number;
  band: string;
  boundaryFlag: boolean;
}

export interface MatrixPayload {
  rows: AssessmentPayload[];
}

export interface FieldError {
  field: string;
  message: string;
}

export interface ErrorPayload {
  errors: FieldError[];
}

export interface GapEntry {
  requirementId: string;
  text: string;
  recommendationType: 'Regulations' | 'Policy' | 'Procedures';
  helicopterRelevant: boolean;
  stakeholders: string[];
}

export interface GapsPayload {
  gaps: GapEntry[];
  totals: { gaps: number; helicopterRelevant: number };
}

export interface BandOverrides {
  p1?: number;
  p2?: number;
  p3?: number;
  p4?: number;
}

export interface OverrideRequest {
  ejWeights?: Partial<Record<EjFactor, number>>;
  bands?: BandOverrides;
}
