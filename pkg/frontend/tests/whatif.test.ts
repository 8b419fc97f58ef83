import { beforeEach, describe, expect, it } from 'vitest';

import { ReviewApiClient } from '../src/apiClient';
import { ScoringSessionView } from '../src/session';
import { createReplayServer, fixtures, type ReplayServer } from './replayServer';

describe('what-if exploration', () => {
  let server: ReplayServer;

  beforeEach(() => {
    server = createReplayServer();
  });

  function makeView(session: string): ScoringSessionView {
    const client = new ReviewApiClient({
      expertId: 'E1',
      sessionId: session,
      fetchImpl: server.fetch,
    });
    return new ScoringSessionView(client, 'E1');
  }

  it('changes only the overriding session and reset restores the canonical payload', async () => {
    const sessionA = makeView('A');
    const sessionB = makeView('B');
    await sessionA.refreshMatrix();
    await sessionB.refreshMatrix();

    const canonical = JSON.stringify({ rows: sessionA.matrixRows });
    expect(canonical).toBe(JSON.stringify(fixtures.matrixCanonical));

    await sessionA.applyOverride({ bands: { p1: 4.6, p2: 4.0, p3: 3.0, p4: 2.0 } });
    expect(sessionA.overrideActive).toBe(true);
    expect(JSON.stringify({ rows: sessionA.matrixRows })).toBe(
      JSON.stringify(fixtures.matrixOverride),
    );

    // session B never observes A's override
    await sessionB.refreshMatrix();
    expect(JSON.stringify({ rows: sessionB.matrixRows })).toBe(canonical);
    expect(sessionB.overrideActive).toBe(false);

    // reset: byte-equal to the pre-override payload
    await sessionA.resetOverride();
    expect(sessionA.overrideActive).toBe(false);
    expect(JSON.stringify({ rows: sessionA.matrixRows })).toBe(canonical);
  });

  it('recorded reset payload equals the recorded canonical payload exactly', () => {
    expect(JSON.stringify(fixtures.matrixReset)).toBe(JSON.stringify(fixtures.matrixCanonical));
  });

  it('raising the P1 threshold never increases the P1 row count', () => {
    const count = (rows: { band: string }[]) => rows.filter((r) => r.band === 'P1').length;
    expect(count(fixtures.matrixOverride.rows)).toBeLessThanOrEqual(
      count(fixtures.matrixCanonical.rows),
    );
    // the recorded override actually demotes at least one row
    expect(fixtures.matrixOverride.rows).not.toEqual(fixtures.matrixCanonical.rows);
  });

  it('sends the override scoped to the session header', async () => {
    const view = makeView('workshop-42');
    await view.applyOverride({ bands: { p1: 4.6 } });
    const overridePost = server.requests.find(
      (r) => r.method === 'POST' && r.path === '/v1/session/overrides',
    );
    expect(overridePost?.session).toBe('workshop-42');
  });
});
