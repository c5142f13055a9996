/** Plan cards, live checkpoint lists, and the two-job comparison panel.
 * Every number displayed here comes from service payloads; the panel only
 * arranges them side by side with their differences.
 */

import type { ObjectiveBreakdown, PlanJob, PlanResult } from './types.js';

export function renderJobCard(job: PlanJob): string {
  const points = (job.checkpoints ?? [])
    .map((c) => `<li>@${c.at}: best ${c.best_total.toFixed(4)} (${c.iterations} it)</li>`)
    .join('');
  const headline =
    job.state === 'done' && job.best_total !== undefined
      ? ` &mdash; best ${job.best_total.toFixed(4)}`
      : job.state === 'failed'
        ? ` &mdash; ${job.error ?? 'failed'}`
        : '';
  return (
    `<div class="job-card state-${job.state}" data-job="${job.id}">` +
    `<header>${job.algorithm.toUpperCase()} ${job.id} &mdash; ${job.state}${headline}</header>` +
    `<ul class="checkpoints">${points}</ul></div>`
  );
}

const TERM_ROWS: [keyof ObjectiveBreakdown, string][] = [
  ['total', 'total'],
  ['efficiency_term', 'efficiency'],
  ['flights_term', 'flights penalty'],
  ['hover_term', 'hover penalty'],
  ['changes_term', 'changes penalty'],
  ['idle_term', 'idle penalty'],
  ['pad_term', 'pad penalty'],
];

export function renderSummary(result: PlanResult): string {
  const s = result.summary;
  return (
    `<dl class="summary">` +
    `<dt>drops</dt><dd>${s.drops}</dd>` +
    `<dt>flights</dt><dd>${s.flights}</dd>` +
    `<dt>trajectory changes</dt><dd>${s.trajectory_changes}</dd>` +
    `<dt>blank times</dt><dd>${s.blank_times}</dd>` +
    `</dl>`
  );
}

export function renderObjective(result: PlanResult): string {
  const rows = TERM_ROWS.map(
    ([key, label]) =>
      `<tr><th>${label}</th><td>${(result.objective[key] as number).toFixed(6)}</td></tr>`,
  ).join('');
  return `<table class="objective">${rows}</table>`;
}

/** Per-term comparison of two finished plans (deltas are b minus a). */
export function comparePlans(a: PlanResult, b: PlanResult): {
  rows: { label: string; a: number; b: number; delta: number }[];
} {
  return {
    rows: TERM_ROWS.map(([key, label]) => {
      const va = a.objective[key] as number;
      const vb = b.objective[key] as number;
      return { label, a: va, b: vb, delta: vb - va };
    }),
  };
}

export function renderComparison(a: PlanResult, b: PlanResult): string {
  const { rows } = comparePlans(a, b);
  const body = rows
    .map(
      (r) =>
        `<tr><th>${r.label}</th><td>${r.a.toFixed(6)}</td>` +
        `<td>${r.b.toFixed(6)}</td>` +
        `<td class="${r.delta >= 0 ? 'up' : 'down'}">${r.delta >= 0 ? '+' : ''}` +
        `${r.delta.toFixed(6)}</td></tr>`,
    )
    .join('');
  return (
    `<table class="comparison"><thead><tr><th></th><th>plan A</th>` +
    `<th>plan B</th><th>delta</th></tr></thead><tbody>${body}</tbody></table>`
  );
}
