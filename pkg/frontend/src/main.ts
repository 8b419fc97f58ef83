/**
 * Browser entry point: wires the session view to a minimal DOM.
 *
 * The page shows the pending queue, a five-factor score form with inline
 * validation, the live assessment panel, the matrix heatmap (boundary-
 * flagged chips highlighted), what-if override controls with an
 * "override active" badge, and the gap register.
 */

import { ReviewApiClient } from './apiClient';
import { buildHeatmap } from './heatmap';
import { ScoringSessionView } from './session';
import { EJ_FACTORS, EjFactor } from './types';

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

function renderHeatmap(view: ScoringSessionView, host: HTMLElement): void {
  host.replaceChildren();
  const grid = buildHeatmap(view.matrixRows);
  const table = el('table', 'heatmap');
  for (let severity = 5; severity >= 1; severity--) {
    const tr = el('tr');
    for (let value = 1; value <= 5; value++) {
      const cell = grid[severity - 1][value - 1];
      const td = el('td', `cell sev-${severity} val-${value}`);
      for (const chip of cell.chips) {
        const chipEl = el('span', chip.boundary ? 'chip boundary' : 'chip', chip.ucaId);
        chipEl.title = `${chip.ucaId} (${chip.band}${chip.boundary ? ', straddles a band edge' : ''})`;
        td.appendChild(chipEl);
      }
      tr.appendChild(td);
    }
    table.appendChild(tr);
  }
  host.appendChild(table);
}

function renderPending(view: ScoringSessionView, host: HTMLElement, onPick: (id: string) => void): void {
  host.replaceChildren();
  for (const uca of view.pending) {
    const item = el('li');
    const link = el('a', 'pending-uca', `${uca.id} — ${uca.guideWord}`);
    link.href = '#';
    link.addEventListener('click', (event) => {
      event.preventDefault();
      onPick(uca.id);
    });
    item.appendChild(link);
    host.appendChild(item);
  }
}

function renderGaps(view: ScoringSessionView, host: HTMLElement): void {
  host.replaceChildren();
  const register = view.gapRegister;
  if (!register) return;
  for (const entry of register.gaps) {
    const item = el('li', entry.helicopterRelevant ? 'gap helicopter' : 'gap');
    item.textContent = `${entry.requirementId} [${entry.recommendationType}] ${entry.text}`;
    host.appendChild(item);
  }
  host.appendChild(el('li', 'totals', `${register.totals.gaps} gaps, ${register.totals.helicopterRelevant} helicopter-relevant`));
}

async function start(): Promise<void> {
  const params = new URLSearchParams(window.location.search);
  const expertId = params.get('expert') ?? 'E1';
  const sessionId = params.get('session') ?? `session-${expertId}`;
  const client = new ReviewApiClient({ expertId, sessionId });
  const view = new ScoringSessionView(client, expertId);

  const app = document.getElementById('app')!;
  app.replaceChildren();
  app.appendChild(el('h1', undefined, `Scoring session — ${expertId}`));
  const badge = el('span', 'override-badge', 'override active');
  badge.hidden = true;
  app.appendChild(badge);

  const pendingList = el('ul', 'pending');
  const form = el('form', 'score-form');
  const formErrors = el('div', 'form-errors');
  const assessmentPanel = el('pre', 'assessment');
  const heatmapHost = el('div', 'heatmap-host');
  const gapList = el('ul', 'gaps');
  app.append(pendingList, form, formErrors, assessmentPanel, heatmapHost, gapList);

  let currentUca: string | null = null;
  const inputs = new Map<EjFactor, HTMLInputElement>();
  for (const factor of EJ_FACTORS) {
    const label = el('label', undefined, factor);
    const input = el('input');
    input.type = 'number';
    input.min = '1';
    input.max = '5';
    input.name = factor;
    label.appendChild(input);
    form.appendChild(label);
    inputs.set(factor, input);
  }
  const submit = el('button', undefined, 'submit score');
  submit.type = 'submit';
  form.appendChild(submit);

  form.addEventListener('submit', (event) => {
    event.preventDefault();
    if (!currentUca) return;
    const entry: Partial<Record<EjFactor, string>> = {};
    for (const [factor, input] of inputs) entry[factor] = input.value;
    void view.scoreUca(currentUca, entry).then(async (outcome) => {
      formErrors.replaceChildren();
      if (outcome.kind === 'rejected') {
        for (const error of outcome.errors) {
          formErrors.appendChild(el('p', 'error', `${error.field}: ${error.message}`));
        }
        return;
      }
      assessmentPanel.textContent = JSON.stringify(outcome.assessment, null, 2);
      await view.refreshMatrix();
      renderHeatmap(view, heatmapHost);
      renderPending(view, pendingList, pick);
    });
  });

  const pick = (id: string) => {
    currentUca = id;
    form.dataset.uca = id;
  };

  const overrideBar = el('div', 'override-bar');
  const p1Input = el('input');
  p1Input.type = 'number';
  p1Input.step = '0.1';
  p1Input.placeholder = 'P1 threshold';
  const apply = el('button', undefined, 'what-if');
  const reset = el('button', undefined, 'reset');
  overrideBar.append(p1Input, apply, reset);
  app.appendChild(overrideBar);

  apply.addEventListener('click', () => {
    const p1 = Number(p1Input.value);
    if (!Number.isFinite(p1)) return;
    void view
      .applyOverride({ bands: { p1 } })
      .then(() => {
        badge.hidden = false;
        renderHeatmap(view, heatmapHost);
      })
      .catch((error: Error) => {
        formErrors.replaceChildren(el('p', 'error banner', error.message));
      });
  });
  reset.addEventListener('click', () => {
    void view.resetOverride().then(() => {
      badge.hidden = true;
      renderHeatmap(view, heatmapHost);
    });
  });

  await view.refreshUcas();
  await view.refreshMatrix();
  await view.refreshGaps();
  renderPending(view, pendingList, pick);
  renderHeatmap(view, heatmapHost);
  renderGaps(view, gapList);
}

if (typeof document !== 'undefined' && document.getElementById('app')) {
  void start();
}
