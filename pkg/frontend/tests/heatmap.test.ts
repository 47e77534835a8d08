import { readFileSync } from "node:fs";
import { describe, expect, it } from "vitest";

import { finiteRange, lookup, toCsv, toModel, transpose } from "../src/heatmap.js";
import type { ContourResponse } from "../src/types.js";

interface Panel {
  icc: number;
  delta: number;
  response: ContourResponse;
}

const fixture: { panels: Panel[] } = JSON.parse(
  readFileSync(new URL("../fixtures/contours.json", import.meta.url), "utf-8"),
);

function panel(icc: number, delta: number): Panel {
  const p = fixture.panels.find((p) => p.icc === icc && p.delta === delta);
  if (!p) throw new Error("missing fixture panel");
  return p;
}

describe("four-panel contour reproduction", () => {
  it("each matrix is monotone: M non-increasing in nbar, non-decreasing in cv", () => {
    for (const p of fixture.panels) {
      const m = p.response.required_M;
      for (let i = 0; i < m.length; i++) {
        for (let j = 1; j < m[i].length; j++) {
          if (m[i][j] != null && m[i][j - 1] != null) {
            expect(m[i][j]!).toBeLessThanOrEqual(m[i][j - 1]!);
          }
        }
      }
      for (let i = 1; i < m.length; i++) {
        for (let j = 0; j < m[i].length; j++) {
          if (m[i][j] != null && m[i - 1][j] != null) {
            expect(m[i][j]!).toBeGreaterThanOrEqual(m[i - 1][j]!);
          }
        }
      }
    }
  });

  it("larger effect lowers the whole surface pointwise", () => {
    const pairs: [Panel, Panel][] = [
      [panel(0.003, 0.127), panel(0.003, 0.2)],
      [panel(0.003, 0.2), panel(0.003, 0.3)],
    ];
    for (const [slow, fast] of pairs) {
      const a = slow.response.required_M;
      const b = fast.response.required_M;
      for (let i = 0; i < a.length; i++) {
        for (let j = 0; j < a[i].length; j++) {
          if (a[i][j] != null && b[i][j] != null) {
            expect(b[i][j]!).toBeLessThanOrEqual(a[i][j]!);
          }
        }
      }
    }
  });

  it("higher ICC raises the whole surface pointwise", () => {
    const low = panel(0.003, 0.3).response.required_M;
    const high = panel(0.01, 0.3).response.required_M;
    for (let i = 0; i < low.length; i++) {
      for (let j = 0; j < low[i].length; j++) {
        if (low[i][j] != null && high[i][j] != null) {
          expect(high[i][j]!).toBeGreaterThanOrEqual(low[i][j]!);
        }
      }
    }
  });
});

describe("heatmap model helpers", () => {
  const res = panel(0.003, 0.2).response;

  it("axis swap renders the transposed matrix with unchanged hover values", () => {
    const straight = toModel(res, false);
    const swapped = toModel(res, true);
    for (const x of res.nbar_grid) {
      for (const y of res.cv_grid) {
        expect(lookup(swapped, y, x)).toBe(lookup(straight, x, y));
      }
    }
    expect(transpose(transpose(straight))).toEqual(straight);
  });

  it("finiteRange skips sentinel cells", () => {
    const model = toModel(
      {
        nbar_grid: [1, 2],
        cv_grid: [0],
        required_M: [[null, 7]],
      },
      false,
    );
    expect(finiteRange(model)).toEqual([7, 8]);
  });

  it("exports the underlying matrix as CSV with blanks for sentinels", () => {
    const model = toModel(
      { nbar_grid: [10, 20], cv_grid: [0, 0.5], required_M: [[4, null], [6, 5]] },
      false,
    );
    const csv = toCsv(model);
    const lines = csv.split("\n");
    expect(lines).toHaveLength(3);
    expect(lines[1]).toBe("0,4,");
    expect(lines[2]).toBe("0.5,6,5");
  });
});
