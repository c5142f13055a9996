import { beforeEach, describe, expect, it } from 'vitest';

import { PlanningApi } from '../src/api.js';
import { ScenarioState, clampEfficiency } from '../src/state.js';
import { FakeService, sampleInstance } from './fake_service.js';

let service: FakeService;
let api: PlanningApi;
let state: ScenarioState;
let baseId: string;

beforeEach(async () => {
  service = new FakeService();
  api = new PlanningApi('', service.fetch);
  state = new ScenarioState(api);
  baseId = service.submit(sampleInstance());
  await state.load(baseId);
});

describe('clamping', () => {
  it('clamps typed values into the efficiency range', () => {
    expect(clampEfficiency(11)).toBe(10);
    expect(clampEfficiency(-2)).toBe(0);
    expect(clampEfficiency(7)).toBe(7);
    expect(clampEfficiency(Number.NaN)).toBe(0);
  });

  it('staging an out-of-range value stores the clamped value', () => {
    const edit = state.stageEdit('i1', 1, 4, 99);
    expect(edit.value).toBe(10);
  });
});

describe('staging and preview', () => {
  it('edits stay local until committed', async () => {
    state.stageEdit('i2', 5, 8, 10);
    expect(state.previewEfficiency('i2')).toEqual([0, 0, 0, 0, 10, 10, 10, 10]);
    const stored = await api.getInstance(baseId);
    expect(stored.nodes.wildfire_points[1].efficiency_by_interval[4]).toBe(8);
  });

  it('knows whether staged edits change anything', () => {
    expect(state.hasStagedChanges()).toBe(false);
    state.stageEdit('i1', 1, 1, 5); // same value as current
    expect(state.hasStagedChanges()).toBe(false);
    state.stageEdit('i1', 1, 1, 9);
    expect(state.hasStagedChanges()).toBe(true);
  });
});

describe('commit', () => {
  it('mints a new id and reloads the committed grid', async () => {
    state.stageEdit('i2', 5, 8, 10);
    const newId = await state.commit();
    expect(newId).not.toBe(baseId);
    expect(state.instanceId).toBe(newId);
    expect(state.staged).toHaveLength(0);
    expect(state.previewEfficiency('i2')).toEqual([0, 0, 0, 0, 10, 10, 10, 10]);
  });

  it('an effectively empty edit keeps the content-addressed id', async () => {
    state.stageEdit('i1', 1, 8, 5); // identical to current values
    const id = await state.commit();
    expect(id).toBe(baseId);
  });

  it('round-trips: reloading from the service reproduces the grid', async () => {
    state.stageEdit('i1', 2, 3, 1);
    const newId = await state.commit();
    const fresh = new ScenarioState(api);
    await fresh.load(newId);
    expect(fresh.previewEfficiency('i1')).toEqual(state.previewEfficiency('i1'));
    expect(fresh.instanceId).toBe(state.instanceId);
  });
});

describe('plans', () => {
  it('refuses to plan over uncommitted edits', async () => {
    state.stageEdit('i1', 1, 1, 9);
    await expect(state.launchPlan('ils', { seed: 1 })).rejects.toThrow(/commit/);
  });

  it('records history and job updates', async () => {
    const jobId = await state.launchPlan('ils', { seed: 1, iterations: 10 });
    expect(state.history).toHaveLength(1);
    const job = await api.getPlan(jobId);
    state.noteJobUpdate(job);
    expect(state.history[0].state).toBe('done');
    expect(state.history[0].bestTotal).toBeCloseTo(0.5);
  });

  it('lists trajectory membership from the instance', () => {
    expect([...state.trajectoryMembers().entries()]).toEqual([['w1', ['h1', 'h2']]]);
  });
});
