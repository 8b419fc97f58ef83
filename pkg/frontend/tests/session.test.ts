import { beforeEach, describe, expect, it } from 'vitest';

import { ReviewApiClient } from '../src/apiClient';
import { ScoringSessionView } from '../src/session';
import { createReplayServer, fixtures, UCA18, type ReplayServer } from './replayServer';

const SHEET_E1 = {
  operationalDisruption: 3,
  criticality: 3,
  detectability: 3,
  effectOnOtherStakeholders: 3,
  likelihoodOfOccurrence: 3,
};

const SHEET_E2 = {
  operationalDisruption: 5,
  criticality: 1,
  detectability: 5,
  effectOnOtherStakeholders: 1,
  likelihoodOfOccurrence: 5,
};

describe('ScoringSessionView', () => {
  let server: ReplayServer;

  beforeEach(() => {
    server = createReplayServer();
  });

  function makeView(expert: string, session = 'S1'): ScoringSessionView {
    const client = new ReviewApiClient({
      expertId: expert,
      sessionId: session,
      fetchImpl: server.fetch,
    });
    return new ScoringSessionView(client, expert);
  }

  it('shows the pending queue from the API', async () => {
    const view = makeView('E1');
    await view.refreshUcas();
    expect(view.pending.map((u) => u.id)).toEqual(
      fixtures.ucasPending.ucas.map((u: { id: string }) => u.id),
    );
    expect(view.completed).toEqual([]);
  });

  it('displays exactly the assessment the API returns after one expert scores', async () => {
    const view = makeView('E1');
    await view.refreshUcas();
    const outcome = await view.scoreUca(UCA18, SHEET_E1);
    expect(outcome.kind).toBe('submitted');
    if (outcome.kind === 'submitted') {
      // exact payload equality: the panel shows server numbers, no recomputation
      expect(outcome.assessment).toEqual(fixtures.assessmentOneExpert);
    }
    expect(view.assessmentOf(UCA18)).toEqual(fixtures.assessmentOneExpert);
    expect(view.completed.map((u) => u.id)).toContain(UCA18);
  });

  it('widens the displayed interval exactly as the API reports when a second expert diverges', async () => {
    const first = makeView('E1');
    await first.refreshUcas();
    await first.scoreUca(UCA18, SHEET_E1);
    const before = first.assessmentOf(UCA18)!;

    const second = makeView('E2');
    await second.refreshUcas();
    const outcome = await second.scoreUca(UCA18, SHEET_E2);
    expect(outcome.kind).toBe('submitted');
    const after = second.assessmentOf(UCA18)!;

    expect(before).toEqual(fixtures.assessmentOneExpert);
    expect(after).toEqual(fixtures.assessmentTwoExperts);
    const widthBefore = before.ejInterval.hi - before.ejInterval.lo;
    const widthAfter = after.ejInterval.hi - after.ejInterval.lo;
    expect(widthBefore).toBe(
      fixtures.assessmentOneExpert.ejInterval.hi - fixtures.assessmentOneExpert.ejInterval.lo,
    );
    expect(widthAfter).toBeGreaterThan(widthBefore);
  });

  it('surfaces server-side rejections without marking the UCA scored', async () => {
    const view = makeView('E1');
    await view.refreshUcas();
    // bypass the form validation to exercise the server contract
    const client = new ReviewApiClient({ expertId: 'E1', fetchImpl: server.fetch });
    await expect(
      client.submitSheet(UCA18, { ...SHEET_E1, likelihoodOfOccurrence: 7 }),
    ).rejects.toMatchObject({ status: 422, payload: fixtures.validationError });
    expect(view.completed).toEqual([]);
  });

  it('tracks per-expert progress from server state only', async () => {
    const view = makeView('E1');
    await view.refreshUcas();
    expect(view.progressByExpert.get('E1') ?? 0).toBe(0);
    await view.scoreUca(UCA18, SHEET_E1);
    expect(view.progressByExpert.get('E1')).toBe(1);
  });

  it('lists boundary-flagged UCAs for group review', async () => {
    const view = makeView('E1');
    await view.refreshMatrix();
    const flagged = fixtures.matrixCanonical.rows
      .filter((r: { boundaryFlag: boolean }) => r.boundaryFlag)
      .map((r: { ucaId: string }) => r.ucaId);
    expect(view.boundaryFlagged).toEqual(flagged);
  });

  it('exposes the gap register verbatim', async () => {
    const view = makeView('E1');
    await view.refreshGaps();
    expect(view.gapRegister).toEqual(fixtures.gaps);
    expect(view.gapRegister!.totals.gaps).toBe(12);
  });
});
