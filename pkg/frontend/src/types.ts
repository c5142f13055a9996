/** Payload shapes of the heliplan planning service. */

export interface GridSpec {
  interval_minutes: number;
  horizon_intervals: number;
  start_clock?: string;
}

export interface WildfirePoint {
  id: string;
  efficiency_by_interval: number[];
  coordinates?: [number, number];
}

export interface InstanceDoc {
  grid: GridSpec;
  nodes: {
    start_positions: { id: string }[];
    water_points: { id: string }[];
    wildfire_points: WildfirePoint[];
    rest_bases: { id: string }[];
  };
  helicopters: { id: string; trajectory_id: string }[];
  trajectories: string[];
  evolution: number[];
  weights: Record<string, unknown>;
}

export type JobState = 'queued' | 'running' | 'done' | 'failed';

export interface CheckpointInfo {
  at: number;
  best_total: number;
  iterations: number;
}

export interface PlanJob {
  id: string;
  instance_id: string;
  algorithm: string;
  state: JobState;
  checkpoints: CheckpointInfo[];
  best_total?: number;
  error?: string;
}

export interface ObjectiveBreakdown {
  total: number;
  efficiency_raw: number;
  flights_raw: number;
  hover_raw: number;
  changes_raw: number;
  h1_sum: number;
  faux_sum: number;
  efficiency_term: number;
  flights_term: number;
  hover_term: number;
  changes_term: number;
  idle_term: number;
  pad_term: number;
}

export interface SummaryCounts {
  drops: number;
  flights: number;
  trajectory_changes: number;
  blank_times: number;
}

export interface PlanResult {
  schedule: { helicopters: Record<string, unknown[]> };
  objective: ObjectiveBreakdown;
  summary: SummaryCounts;
  trace: Record<string, unknown>;
  gantt_svg: string;
  feasible: boolean;
}

export interface PlanParams {
  seed?: number;
  iterations?: number;
  budget_seconds?: number;
  checkpoints?: number[];
}
