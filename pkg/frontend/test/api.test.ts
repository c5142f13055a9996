import { describe, expect, it } from 'vitest';

import { PlanningApi, ServiceError } from '../src/api.js';
import { FakeService, sampleInstance } from './fake_service.js';

describe('PlanningApi', () => {
  it('submit and fetch echo the same document', async () => {
    const service = new FakeService();
    const api = new PlanningApi('', service.fetch);
    const id = await api.submitInstance(sampleInstance());
    const doc = await api.getInstance(id);
    expect(doc.grid.horizon_intervals).toBe(8);
    expect(await api.submitInstance(doc)).toBe(id); // content addressed
  });

  it('surfaces service rejections with status and detail', async () => {
    const service = new FakeService();
    const api = new PlanningApi('', service.fetch);
    const id = await api.submitInstance(sampleInstance());
    await expect(api.patchEfficiency(id, 'i1', 1, 2, 11)).rejects.toMatchObject({
      status: 422,
    });
    await expect(api.getInstance('missing')).rejects.toBeInstanceOf(ServiceError);
  });

  it('pollUntilDone reports every observation', async () => {
    const service = new FakeService();
    const api = new PlanningApi('', service.fetch);
    const id = await api.submitInstance(sampleInstance());
    const jobId = await api.submitPlan(id, 'ils', { seed: 0, iterations: 5 });
    const seen: string[] = [];
    const job = await api.pollUntilDone(jobId, (j) => seen.push(j.state), 0, async () => {});
    expect(job.state).toBe('done');
    expect(seen.at(-1)).toBe('done');
  });
});
