/** Client-side input validation. The UI never computes domain math; it only
 * refuses to submit documents the service would reject. */

import type { CompositeProbs, DesignDoc } from "./types.js";

export const QBOUND_TOL = 1e-9;

export function qLowerBound(p: CompositeProbs): number {
  return p.p_w * p.p_w + p.p_w * p.p_t + 0.25 * p.p_t * p.p_t;
}

export function qValue(p: CompositeProbs): number {
  return p.p_ww + p.p_wt + 0.25 * p.p_tt;
}

/** Cauchy-Schwarz consistency check for a composite probability tuple. */
export function compositeProbsErrors(p: CompositeProbs): string[] {
  const errors: string[] = [];
  for (const [k, v] of Object.entries(p)) {
    if (!(v >= 0 && v <= 1)) errors.push(`${k} must lie in [0, 1]`);
  }
  if (p.p_w + p.p_t > 1 + QBOUND_TOL) errors.push("p_w + p_t exceeds 1");
  const q = qValue(p);
  const bound = qLowerBound(p);
  if (q < bound - QBOUND_TOL) {
    errors.push(
      `inconsistent tuple: Q = ${q.toFixed(6)} below the bound ${bound.toFixed(6)}`,
    );
  }
  return errors;
}

export function designErrors(doc: DesignDoc): string[] {
  const errors: string[] = [];
  if (!(doc.pi_tie >= 0 && doc.pi_tie < 1)) errors.push("pi_tie must lie in [0, 1)");
  if (!(doc.q > 0 && doc.q < 1)) errors.push("q must lie in (0, 1)");
  if (!(doc.nbar >= 1)) errors.push("nbar must be at least 1");
  if (!(doc.cv >= 0)) errors.push("cv must be nonnegative");
  if (!(doc.icc >= 0 && doc.icc <= 1)) errors.push("icc must lie in [0, 1]");
  if (!(doc.alpha > 0 && doc.alpha < 1)) errors.push("alpha must lie in (0, 1)");
  if (!(doc.target_power > 0 && doc.target_power < 1))
    errors.push("target power must lie in (0, 1)");
  if (doc.composite_probs) errors.push(...compositeProbsErrors(doc.composite_probs));
  return errors;
}
