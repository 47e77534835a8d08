/** Typed client for the planning service. Every displayed number comes from
 * these responses; the UI adds no math of its own. */

import type { ContourResponse, DesignDoc, DesignResultDoc } from "./types.js";

export class ServiceError extends Error {
  constructor(
    public status: number,
    public detail: string,
  ) {
    super(`service ${status}: ${detail}`);
  }
}

export class PlanClient {
  constructor(public baseUrl: string = "http://127.0.0.1:8777") {}

  private async post<T>(path: string, body: unknown, signal?: AbortSignal): Promise<T> {
    const res = await fetch(`${this.baseUrl}${path}`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(body),
      signal,
    });
    if (!res.ok) {
      let detail = res.statusText;
      try {
        const doc = await res.json();
        detail = doc.detail ?? doc.error ?? detail;
        if (doc.fields) {
          detail += ": " + doc.fields.map((f: any) => `${f.loc} ${f.message}`).join("; ");
        }
      } catch {
        /* non-JSON error body */
      }
      throw new ServiceError(res.status, detail);
    }
    return res.json() as Promise<T>;
  }

  health(): Promise<{ status: string }> {
    return fetch(`${this.baseUrl}/health`).then((r) => r.json());
  }

  power(inputs: DesignDoc, M: number, signal?: AbortSignal): Promise<DesignResultDoc> {
    return this.post("/power", { inputs, M }, signal);
  }

  sampleSize(inputs: DesignDoc, signal?: AbortSignal): Promise<DesignResultDoc> {
    return this.post("/samplesize", { inputs }, signal);
  }

  contour(
    inputs: DesignDoc,
    nbarGrid: number[],
    cvGrid: number[],
    signal?: AbortSignal,
  ): Promise<ContourResponse> {
    return this.post(
      "/contour",
      { inputs, nbar_grid: nbarGrid, cv_grid: cvGrid },
      signal,
    );
  }
}
