/** Typed client for the heliplan planning service. All numbers shown in the
 * UI come from these payloads; the client never computes score math. */

import type { InstanceDoc, PlanJob, PlanParams, PlanResult } from './types.js';

export class ServiceError extends Error {
  constructor(public status: number, public detail: unknown) {
    super(`service error ${status}: ${JSON.stringify(detail)}`);
  }
}

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class PlanningApi {
  constructor(
    private baseUrl: string = '',
    private fetchImpl: FetchLike = (url, init) => fetch(url, init),
  ) {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const response = await this.fetchImpl(this.baseUrl + path, init);
    const body = await response.json().catch(() => null);
    if (!response.ok) {
      throw new ServiceError(response.status, body && (body as any).detail);
    }
    return body as T;
  }

  async submitInstance(doc: InstanceDoc): Promise<string> {
    const out = await this.request<{ id: string }>('/instances', {
      method: 'POST',
      headers: { 'content-type': 'application/json' },
      body: JSON.stringify(doc),
    });
    return out.id;
  }

  getInstance(id: string): Promise<InstanceDoc> {
    return this.request<InstanceDoc>(`/instances/${id}`);
  }

  async patchEfficiency(
    id: string,
    node: string,
    from: number,
    to: number,
    value: number,
  ): Promise<string> {
    const out = await this.request<{ id: string }>(`/instances/${id}/efficiency`, {
      method: 'POST',
      headers: { 'content-type': 'application/json' },
      body: JSON.stringify({ node, from, to, value }),
    });
    return out.id;
  }

  async submitPlan(
    instanceId: string,
    algorithm: 'sa' | 'ils',
    params: PlanParams,
  ): Promise<string> {
    const out = await this.request<{ id: string }>('/plans', {
      method: 'POST',
      headers: { 'content-type': 'application/json' },
      body: JSON.stringify({ instance_id: instanceId, algorithm, params }),
    });
    return out.id;
  }

  getPlan(jobId: string): Promise<PlanJob> {
    return this.request<PlanJob>(`/plans/${jobId}`);
  }

  getResult(jobId: string): Promise<PlanResult> {
    return this.request<PlanResult>(`/plans/${jobId}/result`);
  }

  /** Poll a job until it leaves the queue, reporting each observation. */
  async pollUntilDone(
    jobId: string,
    onUpdate?: (job: PlanJob) => void,
    intervalMs = 500,
    sleep: (ms: number) => Promise<void> = (ms) => new Promise((r) => setTimeout(r, ms)),
  ): Promise<PlanJob> {
    for (;;) {
      const job = await this.getPlan(jobId);
      onUpdate?.(job);
      if (job.state === 'done' || job.state === 'failed') {
        return job;
      }
      await sleep(intervalMs);
    }
  }
}
