/** Shared document shapes; these mirror the planning-service JSON schema. */

export type Estimand = "wd" | "logwr" | "logwo";
export type TestKind = "z" | "t";

export interface CompositeProbs {
  p_w: number;
  p_t: number;
  p_ww: number;
  p_wt: number;
  p_tt: number;
}

export interface DesignDoc {
  estimand: Estimand;
  delta: number;
  pi_tie: number;
  q: number;
  nbar: number;
  cv: number;
  icc: number;
  composite_probs?: CompositeProbs | null;
  alpha: number;
  target_power: number;
  test: TestKind;
  sided: "one" | "two";
  wd?: number | null;
}

export interface DesignResultDoc {
  variance: number;
  power: number;
  required_M: number | null;
  vif: number;
  vif_star: number | null;
  P: number | null;
  Q: number | null;
  diagnostics: Record<string, number>;
}

export interface ContourResponse {
  nbar_grid: number[];
  cv_grid: number[];
  /** rows follow cv_grid, columns nbar_grid; null = infeasible cell */
  required_M: (number | null)[][];
}
