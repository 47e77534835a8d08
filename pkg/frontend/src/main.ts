/** Design-explorer page: live power/sample-size readouts, Figure-style
 * contour panels, and named scenario cards. All numbers displayed are taken
 * from service responses. */

import { PlanClient, ServiceError } from "./api.js";
import { DebouncedRequester } from "./debounce.js";
import { drawHeatmap, toCsv, toModel } from "./heatmap.js";
import type { HeatmapModel } from "./heatmap.js";
import { ScenarioStore } from "./scenario.js";
import type { ContourResponse, DesignDoc, Estimand, TestKind } from "./types.js";
import { designErrors } from "./validate.js";

const $ = <T extends HTMLElement>(id: string): T =>
  document.getElementById(id) as T;

const num = (id: string): number => parseFloat(($(id) as HTMLInputElement).value);

let client = new PlanClient(
  new URLSearchParams(location.search).get("service") ?? "http://127.0.0.1:8777",
);
const debouncer = new DebouncedRequester(300);
const store = new ScenarioStore();
let swapped = false;
const panelResponses: (ContourResponse | null)[] = [null, null, null, null];

function readForm(): DesignDoc {
  const doc: DesignDoc = {
    estimand: ($("estimand") as HTMLSelectElement).value as Estimand,
    delta: num("delta"),
    pi_tie: num("pi_tie"),
    q: num("q"),
    nbar: num("nbar"),
    cv: num("cv"),
    icc: num("icc"),
    alpha: num("alpha"),
    target_power: num("target_power"),
    test: ($("test") as HTMLSelectElement).value as TestKind,
    sided: "two",
  };
  if (($("composite") as HTMLInputElement).checked) {
    doc.composite_probs = {
      p_w: num("p_w"),
      p_t: num("p_t"),
      p_ww: num("p_ww"),
      p_wt: num("p_wt"),
      p_tt: num("p_tt"),
    };
    const wd = num("wd_anchor");
    if (!Number.isNaN(wd)) doc.wd = wd;
  }
  return doc;
}

function setStatus(text: string, isError = false): void {
  const el = $("status");
  el.textContent = text;
  el.className = isError ? "error" : "";
}

function fmt(x: number | null): string {
  if (x == null || Number.isNaN(x)) return "–";
  return Math.abs(x) >= 1000 ? x.toFixed(0) : x.toPrecision(4);
}

function recompute(): void {
  const doc = readForm();
  const errors = designErrors(doc);
  if (errors.length) {
    setStatus(errors.join("; "), true);
    return;
  }
  setStatus("computing…");
  const atM = Math.round(num("at_m"));
  debouncer.run(
    async (signal) => {
      const [atPower, solved] = await Promise.all([
        client.power(doc, atM, signal),
        client.sampleSize(doc, signal),
      ]);
      return { atPower, solved };
    },
    ({ atPower, solved }) => {
      $("out_power").textContent = fmt(atPower.power);
      $("out_m").textContent = String(solved.required_M);
      $("out_power_at_m").textContent = fmt(solved.power);
      $("out_vif").textContent = fmt(atPower.vif);
      $("out_variance").textContent = fmt(atPower.variance);
      const d = atPower.diagnostics ?? {};
      $("out_sub").textContent = fmt(d["subtraction_over_leading"] ?? null);
      setStatus("");
      const name = ($("card_name") as HTMLInputElement).value.trim();
      if (name && store.get(name)) store.attachResult(name, solved);
      renderCards();
    },
    (err) => {
      if (err instanceof ServiceError && err.status === 422) {
        setStatus(`infeasible design: ${err.detail}`, true);
      } else {
        setStatus(String(err), true);
      }
    },
  );
}

function gridFrom(minId: string, maxId: string, nId: string): number[] {
  const lo = num(minId);
  const hi = num(maxId);
  const n = Math.max(2, Math.round(num(nId)));
  const out: number[] = [];
  for (let i = 0; i < n; i++) out.push(+(lo + ((hi - lo) * i) / (n - 1)).toFixed(4));
  return out;
}

async function runContours(): Promise<void> {
  const base = readForm();
  const errors = designErrors(base);
  if (errors.length) {
    setStatus(errors.join("; "), true);
    return;
  }
  const nbarGrid = gridFrom("nbar_min", "nbar_max", "nbar_n");
  const cvGrid = gridFrom("cv_min", "cv_max", "cv_n");
  setStatus("computing contour panels…");
  for (let p = 0; p < 4; p++) {
    const delta = num(`panel_delta_${p}`);
    const icc = num(`panel_icc_${p}`);
    if (Number.isNaN(delta) || Number.isNaN(icc)) {
      panelResponses[p] = null;
      continue;
    }
    const doc = { ...base, delta, icc, wd: null };
    try {
      const res = await client.contour(doc, nbarGrid, cvGrid);
      panelResponses[p] = res;
      $(`panel_label_${p}`).textContent =
        `Δ=${delta}, ρ*=${icc} (min M=${fmt(minOf(toModel(res)))})`;
      drawPanel(p);
    } catch (err) {
      panelResponses[p] = null;
      setStatus(String(err), true);
      return;
    }
  }
  setStatus("");
}

function minOf(m: HeatmapModel): number | null {
  let best: number | null = null;
  for (const row of m.cells)
    for (const v of row) if (v != null && (best == null || v < best)) best = v;
  return best;
}

function drawPanel(p: number): void {
  const res = panelResponses[p];
  if (!res) return;
  const canvas = $(`panel_${p}`) as HTMLCanvasElement;
  drawHeatmap(canvas, toModel(res, swapped), (text) => {
    $("hover").textContent = text;
  });
}

function renderCards(): void {
  const root = $("cards");
  root.innerHTML = "";
  for (const card of store.list()) {
    const div = document.createElement("div");
    div.className = "card" + (card.stale ? " stale" : "");
    const m = card.result?.required_M ?? null;
    div.innerHTML =
      `<strong>${card.name}</strong>` +
      (card.stale ? ' <span class="badge">stale</span>' : "") +
      `<div>required M: ${m ?? "–"}; power at M: ${fmt(card.result?.power ?? null)}</div>`;
    const copy = document.createElement("button");
    copy.textContent = "copy JSON";
    copy.onclick = () => navigator.clipboard.writeText(store.serialize(card.name));
    const del = document.createElement("button");
    del.textContent = "remove";
    del.onclick = () => {
      store.remove(card.name);
      renderCards();
    };
    div.append(copy, del);
    root.appendChild(div);
  }
}

function wire(): void {
  document
    .querySelectorAll("#design-form input, #design-form select")
    .forEach((el) => el.addEventListener("input", recompute));
  $("composite").addEventListener("input", () => {
    $("composite-block").style.display = ($("composite") as HTMLInputElement)
      .checked
      ? "block"
      : "none";
  });
  $("run_contour").addEventListener("click", () => void runContours());
  $("swap_axes").addEventListener("click", () => {
    // presentation-only: redraw the cached matrices transposed
    swapped = !swapped;
    for (let p = 0; p < 4; p++) drawPanel(p);
  });
  $("export_csv").addEventListener("click", () => {
    const res = panelResponses.find((x) => x != null);
    if (!res) return;
    const blob = new Blob([toCsv(toModel(res, swapped))], { type: "text/csv" });
    const a = document.createElement("a");
    a.href = URL.createObjectURL(blob);
    a.download = "required_m.csv";
    a.click();
  });
  $("save_card").addEventListener("click", () => {
    const name = ($("card_name") as HTMLInputElement).value.trim();
    if (!name) return;
    store.save(name, readForm());
    renderCards();
    recompute();
  });
  $("service_url").addEventListener("change", () => {
    client = new PlanClient(($("service_url") as HTMLInputElement).value);
    recompute();
  });
  ($("service_url") as HTMLInputElement).value = client.baseUrl;
  client
    .health()
    .then(() => setStatus(""))
    .catch(() => setStatus("service unreachable — check the base URL", true));
  recompute();
}

document.addEventListener("DOMContentLoaded", wire);
