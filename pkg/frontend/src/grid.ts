/** Efficiency grid renderer: one row per wildfire node, columns grouped by
 * evolution epoch with per-epoch expansion. Cells carry data attributes the
 * page wires to staging; values are tinted by efficiency. Pure HTML-string
 * rendering keeps it testable without a browser.
 */

import { axisColumns } from './epochs.js';
import type { ScenarioState } from './state.js';

function shade(value: number): string {
  // 0 -> pale, 10 -> saturated red
  const alpha = (Math.min(10, Math.max(0, value)) / 10) * 0.85;
  return `rgba(208, 69, 43, ${alpha.toFixed(3)})`;
}

export function renderGrid(state: ScenarioState, expanded: Set<number>): string {
  const inst = state.instance;
  if (!inst) return '<p class="empty">no instance loaded</p>';
  const columns = axisColumns(inst.evolution, expanded);
  const head = columns
    .map(
      (c) =>
        `<th class="${c.kind}" data-epoch="${c.epoch}">` +
        `${c.label}${c.kind === 'epoch' ? ' &#x25B8;' : ''}</th>`,
    )
    .join('');
  const rows = inst.nodes.wildfire_points
    .map((fire) => {
      const preview = state.previewEfficiency(fire.id);
      const cells = columns
        .map((c) => {
          const slice = preview.slice(c.start - 1, c.end);
          const first = slice[0] ?? 0;
          const uniform = slice.every((v) => v === first);
          const label = uniform ? String(first) : `${Math.min(...slice)}-${Math.max(...slice)}`;
          return (
            `<td class="cell" data-node="${fire.id}" data-from="${c.start}"` +
            ` data-to="${c.end}" style="background:${shade(first)}">${label}</td>`
          );
        })
        .join('');
      return `<tr><th class="node">${fire.id}</th>${cells}</tr>`;
    })
    .join('');
  return (
    `<table class="efficiency-grid"><thead><tr><th></th>${head}</tr></thead>` +
    `<tbody>${rows}</tbody></table>`
  );
}

export function renderTrajectories(state: ScenarioState): string {
  const members = state.trajectoryMembers();
  const items = [...members.entries()]
    .map(([w, ids]) => `<li><span class="traj">${w}</span>: ${ids.join(', ') || 'none'}</li>`)
    .join('');
  return `<ul class="trajectories">${items}</ul>`;
}
