/** Scenario state: the loaded instance, locally staged efficiency edits, and
 * the plan history. Edits never mutate the instance; committing sends them
 * through the service's patch endpoint, which mints a new instance id, and
 * the view reloads from that id (the service stays the single source of
 * truth).
 */

import type { PlanningApi } from './api.js';
import type { InstanceDoc, PlanJob } from './types.js';

export interface StagedEdit {
  node: string;
  from: number;
  to: number;
  value: number;
}

export interface HistoryEntry {
  jobId: string;
  instanceId: string;
  algorithm: string;
  state: string;
  bestTotal?: number;
}

export function clampEfficiency(value: number): number {
  if (Number.isNaN(value)) return 0;
  return Math.min(10, Math.max(0, value));
}

export class ScenarioState {
  instanceId: string | null = null;
  instance: InstanceDoc | null = null;
  staged: StagedEdit[] = [];
  history: HistoryEntry[] = [];

  constructor(private api: PlanningApi) {}

  async load(instanceId: string): Promise<void> {
    this.instance = await this.api.getInstance(instanceId);
    this.instanceId = instanceId;
    this.staged = [];
  }

  /** Stage one edit; the value is clamped into [0, 10]. */
  stageEdit(node: string, from: number, to: number, value: number): StagedEdit {
    const edit = { node, from, to, value: clampEfficiency(value) };
    this.staged.push(edit);
    return edit;
  }

  /** The grid as it would look with staged edits applied (display only). */
  previewEfficiency(node: string): number[] {
    if (!this.instance) return [];
    const fire = this.instance.nodes.wildfire_points.find((n) => n.id === node);
    if (!fire) return [];
    const row = [...fire.efficiency_by_interval];
    for (const edit of this.staged) {
      if (edit.node !== node) continue;
      for (let t = edit.from; t <= edit.to; t += 1) row[t - 1] = edit.value;
    }
    return row;
  }

  hasStagedChanges(): boolean {
    if (!this.instance) return false;
    return this.instance.nodes.wildfire_points.some((fire) => {
      const preview = this.previewEfficiency(fire.id);
      return preview.some((v, k) => v !== fire.efficiency_by_interval[k]);
    });
  }

  /** Push staged edits through the service; returns the new instance id.
   * An effectively empty diff keeps the current id (content addressing). */
  async commit(): Promise<string> {
    if (this.instanceId === null) throw new Error('no instance loaded');
    let current = this.instanceId;
    for (const edit of this.staged) {
      current = await this.api.patchEfficiency(
        current, edit.node, edit.from, edit.to, edit.value,
      );
    }
    await this.load(current);
    return current;
  }

  async launchPlan(
    algorithm: 'sa' | 'ils',
    params: { seed?: number; iterations?: number; budget_seconds?: number;
              checkpoints?: number[] },
  ): Promise<string> {
    if (this.instanceId === null) throw new Error('no instance loaded');
    if (this.hasStagedChanges()) {
      throw new Error('commit staged efficiency edits before planning');
    }
    const jobId = await this.api.submitPlan(this.instanceId, algorithm, params);
    this.history.push({
      jobId, instanceId: this.instanceId, algorithm, state: 'queued',
    });
    return jobId;
  }

  noteJobUpdate(job: PlanJob): void {
    const entry = this.history.find((h) => h.jobId === job.id);
    if (entry) {
      entry.state = job.state;
      if (job.best_total !== undefined) entry.bestTotal = job.best_total;
    }
  }

  trajectoryMembers(): Map<string, string[]> {
    const members = new Map<string, string[]>();
    if (!this.instance) return members;
    for (const w of this.instance.trajectories) members.set(w, []);
    for (const heli of this.instance.helicopters) {
      members.get(heli.trajectory_id)?.push(heli.id);
    }
    return members;
  }
}
