/** Canvas heatmap of required-M matrices with hover readout, transpose, and
 * CSV export. Pure matrix helpers are exported separately so they can be
 * unit-tested without a DOM. */

import type { ContourResponse } from "./types.js";

export interface HeatmapModel {
  /** row labels (y axis values, bottom-up when drawn) */
  rows: number[];
  /** column labels (x axis values) */
  cols: number[];
  cells: (number | null)[][];
  xLabel: string;
  yLabel: string;
}

export function toModel(res: ContourResponse, swapped = false): HeatmapModel {
  const base: HeatmapModel = {
    rows: res.cv_grid,
    cols: res.nbar_grid,
    cells: res.required_M,
    xLabel: "mean cluster size",
    yLabel: "cluster-size CV",
  };
  return swapped ? transpose(base) : base;
}

export function transpose(m: HeatmapModel): HeatmapModel {
  const cells: (number | null)[][] = m.cols.map((_, j) =>
    m.rows.map((_, i) => m.cells[i][j]),
  );
  return {
    rows: m.cols,
    cols: m.rows,
    cells,
    xLabel: m.yLabel,
    yLabel: m.xLabel,
  };
}

export function finiteRange(m: HeatmapModel): [number, number] {
  let lo = Infinity;
  let hi = -Infinity;
  for (const row of m.cells)
    for (const v of row)
      if (v != null) {
        lo = Math.min(lo, v);
        hi = Math.max(hi, v);
      }
  if (!isFinite(lo)) return [0, 1];
  return [lo, Math.max(hi, lo + 1)];
}

/** Value at the (x, y) axis coordinates; invariant under transpose. */
export function lookup(m: HeatmapModel, xValue: number, yValue: number): number | null {
  const j = m.cols.indexOf(xValue);
  const i = m.rows.indexOf(yValue);
  if (i < 0 || j < 0) return null;
  return m.cells[i][j];
}

export function toCsv(m: HeatmapModel): string {
  const head = [`${m.yLabel}\\${m.xLabel}`, ...m.cols.map(String)].join(",");
  const lines = m.cells.map((row, i) =>
    [String(m.rows[i]), ...row.map((v) => (v == null ? "" : String(v)))].join(","),
  );
  return [head, ...lines].join("\n");
}

function color(t: number): string {
  // dark blue (few clusters) to yellow (many)
  const r = Math.round(32 + 223 * t);
  const g = Math.round(48 + 180 * t);
  const b = Math.round(160 - 120 * t);
  return `rgb(${r},${g},${b})`;
}

export const SENTINEL_FILL = "#9aa0a6";

export function drawHeatmap(
  canvas: HTMLCanvasElement,
  model: HeatmapModel,
  onHover?: (text: string) => void,
): void {
  const ctx = canvas.getContext("2d");
  if (!ctx) return;
  const pad = { left: 46, bottom: 30, top: 8, right: 8 };
  const W = canvas.width - pad.left - pad.right;
  const H = canvas.height - pad.top - pad.bottom;
  const nx = model.cols.length;
  const ny = model.rows.length;
  const [lo, hi] = finiteRange(model);
  ctx.clearRect(0, 0, canvas.width, canvas.height);
  for (let i = 0; i < ny; i++) {
    for (let j = 0; j < nx; j++) {
      const v = model.cells[i][j];
      ctx.fillStyle = v == null ? SENTINEL_FILL : color((v - lo) / (hi - lo));
      const x = pad.left + (j * W) / nx;
      const y = pad.top + H - ((i + 1) * H) / ny; // rows drawn bottom-up
      ctx.fillRect(x, y, Math.ceil(W / nx), Math.ceil(H / ny));
    }
  }
  ctx.fillStyle = "#202124";
  ctx.font = "11px sans-serif";
  ctx.textAlign = "center";
  ctx.fillText(model.xLabel, pad.left + W / 2, canvas.height - 4);
  const step = Math.max(1, Math.floor(nx / 6));
  for (let j = 0; j < nx; j += step) {
    ctx.fillText(
      String(model.cols[j]),
      pad.left + ((j + 0.5) * W) / nx,
      canvas.height - 16,
    );
  }
  ctx.save();
  ctx.translate(10, pad.top + H / 2);
  ctx.rotate(-Math.PI / 2);
  ctx.fillText(model.yLabel, 0, 0);
  ctx.restore();
  ctx.textAlign = "right";
  const ystep = Math.max(1, Math.floor(ny / 5));
  for (let i = 0; i < ny; i += ystep) {
    ctx.fillText(
      String(model.rows[i]),
      pad.left - 4,
      pad.top + H - ((i + 0.5) * H) / ny + 4,
    );
  }

  if (onHover) {
    canvas.onmousemove = (ev) => {
      const rect = canvas.getBoundingClientRect();
      const px = ((ev.clientX - rect.left) * canvas.width) / rect.width;
      const py = ((ev.clientY - rect.top) * canvas.height) / rect.height;
      const j = Math.floor(((px - pad.left) / W) * nx);
      const i = Math.floor(((pad.top + H - py) / H) * ny);
      if (i < 0 || i >= ny || j < 0 || j >= nx) {
        onHover("");
        return;
      }
      const v = model.cells[i][j];
      onHover(
        `${model.xLabel}=${model.cols[j]}, ${model.yLabel}=${model.rows[i]}: ` +
          (v == null ? "infeasible" : `M=${v}`),
      );
    };
    canvas.onmouseleave = () => onHover("");
  }
}
