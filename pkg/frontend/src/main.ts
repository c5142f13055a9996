/** Page wiring: load a scenario, stage and commit efficiency edits, launch
 * and poll plans, show Gantt and comparison panels. */

import { PlanningApi, ServiceError } from './api.js';
import { renderGanttPanel } from './gantt.js';
import { renderGrid, renderTrajectories } from './grid.js';
import { renderComparison, renderJobCard, renderObjective, renderSummary } from './plans.js';
import { ScenarioState } from './state.js';
import type { PlanResult } from './types.js';

const api = new PlanningApi('');
const state = new ScenarioState(api);
const expandedEpochs = new Set<number>();
const results = new Map<string, PlanResult>();

function el(id: string): HTMLElement {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node;
}

function note(message: string, isError = false): void {
  const box = el('notice');
  box.textContent = message;
  box.className = isError ? 'notice error' : 'notice';
}

function refreshGrid(): void {
  el('grid').innerHTML = renderGrid(state, expandedEpochs);
  el('trajectories').innerHTML = renderTrajectories(state);
  el('instance-id').textContent = state.instanceId ?? 'none';
  el('staged-count').textContent = String(state.staged.length);
}

function refreshHistory(): void {
  el('history').innerHTML = state.history
    .map(
      (h) =>
        `<li data-job="${h.jobId}">${h.algorithm} ${h.jobId} on ${h.instanceId.slice(0, 8)}` +
        ` &mdash; ${h.state}${h.bestTotal !== undefined ? ` (${h.bestTotal.toFixed(4)})` : ''}` +
        ` <button class="show-result" data-job="${h.jobId}">show</button>` +
        ` <label><input type="checkbox" class="compare" data-job="${h.jobId}"/>compare</label>` +
        `</li>`,
    )
    .join('');
}

async function loadScenario(): Promise<void> {
  const id = (el('load-id') as HTMLInputElement).value.trim();
  try {
    await state.load(id);
    refreshGrid();
    note(`loaded instance ${id}`);
  } catch (err) {
    note(err instanceof ServiceError ? `load failed: ${err.message}` : String(err), true);
  }
}

function stageFromCell(cell: HTMLElement): void {
  const node = cell.dataset.node!;
  const from = Number(cell.dataset.from);
  const to = Number(cell.dataset.to);
  const raw = window.prompt(`efficiency for ${node}, intervals ${from}-${to} (0-10)`);
  if (raw === null) return;
  const edit = state.stageEdit(node, from, to, Number(raw));
  if (edit.value !== Number(raw)) {
    note(`value clamped to ${edit.value}`);
  }
  refreshGrid();
}

async function commitEdits(): Promise<void> {
  try {
    const id = await state.commit();
    refreshGrid();
    note(`committed; instance is now ${id}`);
  } catch (err) {
    note(String(err), true);
  }
}

async function launchPlan(algorithm: 'sa' | 'ils'): Promise<void> {
  const budget = Number((el('budget-seconds') as HTMLInputElement).value) || 60;
  const seed = Number((el('seed') as HTMLInputElement).value) || 0;
  try {
    const jobId = await state.launchPlan(algorithm, {
      seed,
      budget_seconds: budget,
      checkpoints: [budget / 5, (2 * budget) / 5, (3 * budget) / 5, (4 * budget) / 5, budget],
    });
    refreshHistory();
    const job = await api.pollUntilDone(jobId, (update) => {
      state.noteJobUpdate(update);
      el('job-live').innerHTML = renderJobCard(update);
      refreshHistory();
    });
    if (job.state === 'done') {
      const result = await api.getResult(jobId);
      results.set(jobId, result);
      showResult(jobId);
      note(`plan ${jobId} finished`);
    } else {
      note(`plan ${jobId} failed: ${job.error ?? 'unknown'}`, true);
    }
  } catch (err) {
    note(String(err), true);
  }
}

function showResult(jobId: string): void {
  const result = results.get(jobId);
  if (!result) return;
  el('gantt-panel').innerHTML = renderGanttPanel(result);
  el('objective-panel').innerHTML = renderObjective(result) + renderSummary(result);
}

function refreshComparison(): void {
  const picked = [...document.querySelectorAll<HTMLInputElement>('.compare:checked')].map(
    (box) => box.dataset.job!,
  );
  if (picked.length === 2 && results.has(picked[0]) && results.has(picked[1])) {
    el('comparison-panel').innerHTML = renderComparison(
      results.get(picked[0])!,
      results.get(picked[1])!,
    );
  } else {
    el('comparison-panel').innerHTML = '<p class="empty">pick two finished plans</p>';
  }
}

export function wirePage(): void {
  el('load-button').addEventListener('click', () => void loadScenario());
  el('commit-button').addEventListener('click', () => void commitEdits());
  el('launch-sa').addEventListener('click', () => void launchPlan('sa'));
  el('launch-ils').addEventListener('click', () => void launchPlan('ils'));
  el('grid').addEventListener('click', (event) => {
    const target = event.target as HTMLElement;
    if (target.classList.contains('cell')) stageFromCell(target);
    const epoch = target.closest('th.epoch') as HTMLElement | null;
    if (epoch) {
      expandedEpochs.add(Number(epoch.dataset.epoch));
      refreshGrid();
    }
  });
  el('history').addEventListener('click', async (event) => {
    const target = event.target as HTMLElement;
    if (target.classList.contains('show-result')) {
      const jobId = target.dataset.job!;
      if (!results.has(jobId)) {
        try {
          results.set(jobId, await api.getResult(jobId));
        } catch (err) {
          note(String(err), true);
          return;
        }
      }
      showResult(jobId);
    }
    if (target.classList.contains('compare')) refreshComparison();
  });
}

if (typeof document !== 'undefined' && document.getElementById('load-button')) {
  wirePage();
}
