/** Gantt display: the service renders the schedule as SVG; this module wraps
 * it with the cell legend and basic shape checks. */

import type { PlanResult } from './types.js';

export const LEGEND = [
  ['start position', '#b8c4d8'],
  ['flying', '#f5a623'],
  ['loading', '#2f7ed8'],
  ['dropping', '#d0452b'],
  ['rest base', '#5d9e52'],
] as const;

export function renderLegend(): string {
  const items = LEGEND.map(
    ([label, color]) =>
      `<span class="legend-item"><i style="background:${color}"></i>${label}</span>`,
  ).join('');
  return `<div class="legend">${items}</div>`;
}

export function ganttRowCount(svg: string): number {
  // the service emits one row label per helicopter
  return (svg.match(/<text x="4"/g) ?? []).length;
}

export function renderGanttPanel(result: PlanResult): string {
  return `<section class="gantt">${renderLegend()}${result.gantt_svg}</section>`;
}
