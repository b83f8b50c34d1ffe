/**
 * DOM wiring for the design-exploration app.  All statistics come from
 * the service; this layer only routes form state, polling updates, and
 * chart rendering.
 */

import { ApiClient } from "./api.js";
import { hoverReadout, renderChart } from "./chart.js";
import { PRESET_NAMES, PRESETS } from "./presets.js";
import { ScenarioStore, cardViewModel } from "./store.js";
import type { DesignSpec, ScenarioCard } from "./types.js";
import { validateAgainstSchema } from "./validate.js";

const api = new ApiClient({ baseUrl: "" });
const store = new ScenarioStore();
let schema: Record<string, unknown> | null = null;

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node as T;
}

function currentSpecFromEditor(): DesignSpec {
  return JSON.parse((el<HTMLTextAreaElement>("spec-editor")).value) as DesignSpec;
}

function showFormErrors(messages: string[]): void {
  const box = el<HTMLDivElement>("form-errors");
  box.innerHTML = messages.map((m) => `<div class="form-error">${m}</div>`).join("");
  box.hidden = messages.length === 0;
}

async function submitScenario(): Promise<void> {
  let spec: DesignSpec;
  try {
    spec = currentSpecFromEditor();
  } catch (error) {
    showFormErrors([`not valid JSON: ${(error as Error).message}`]);
    return;
  }
  if (schema) {
    const errors = validateAgainstSchema(spec, schema as Record<string, unknown>);
    if (errors.length > 0) {
      showFormErrors(errors.map((e) => `${e.path}: ${e.message}`));
      return;
    }
  }
  showFormErrors([]);
  const card = store.addDraft(spec);
  try {
    const sessionId = await api.submitDesign(spec);
    store.markSubmitted(card.localId, sessionId);
    const session = await api.waitForResult(sessionId, (s) =>
      store.applySession(card.localId, s),
    );
    store.applySession(card.localId, session);
  } catch (error) {
    store.markStale(card.localId, (error as Error).message);
  }
}

async function retryScenario(localId: number): Promise<void> {
  const card = store.get(localId);
  if (!card) return;
  store.markSubmitted(localId, card.sessionId ?? "");
  try {
    if (card.sessionId) {
      const session = await api.waitForResult(card.sessionId, (s) =>
        store.applySession(localId, s),
      );
      store.applySession(localId, session);
    } else {
      store.remove(localId);
      await submitScenario();
    }
  } catch (error) {
    store.markStale(localId, (error as Error).message);
  }
}

async function verifyScenario(localId: number): Promise<void> {
  const card = store.get(localId);
  if (!card || card.status !== "done" || !card.sessionId || !card.result) return;
  const rec = card.result.recommendation;
  const grid = [0.7, 0.85, 1.0, 1.15, 1.3]
    .map((f) => Math.max(2, Math.round(rec * f)))
    .filter((v, i, arr) => arr.indexOf(v) === i)
    .sort((a, b) => a - b);
  try {
    await api.requestVerify(card.sessionId, grid, 400);
    const session = await api.waitForOracle(card.sessionId);
    store.applySession(localId, session);
  } catch (error) {
    store.markStale(localId, (error as Error).message);
  }
}

function renderCards(cards: ScenarioCard[]): void {
  const list = el<HTMLDivElement>("card-list");
  list.innerHTML = cards
    .map((card) => {
      const vm = cardViewModel(card);
      const rec = vm.recommendation !== null ? `n = ${vm.recommendation}` : "&mdash;";
      const warn = vm.warnings.map((w) => `<div class="warning">${w}</div>`).join("");
      const err = card.error ? `<div class="warning">${card.error}</div>` : "";
      return `
        <div class="card status-${vm.status}" data-card="${card.localId}">
          <div class="card-head">
            <strong>${vm.title}</strong>
            <span class="status">${vm.status}</span>
          </div>
          <div class="card-body">
            <span class="rec">${rec}</span>
            ${vm.n0 !== null ? `<span class="n0">start ${vm.n0.toFixed(1)}</span>` : ""}
          </div>
          ${warn}${err}
          <div class="card-actions">
            <button data-action="toggle" data-card="${card.localId}">${card.visible ? "hide" : "show"}</button>
            <button data-action="verify" data-card="${card.localId}" ${vm.verifyEnabled ? "" : "disabled"}>verify</button>
            ${card.status === "stale" ? `<button data-action="retry" data-card="${card.localId}">retry</button>` : ""}
            <button data-action="remove" data-card="${card.localId}">remove</button>
          </div>
        </div>`;
    })
    .join("");
}

function renderAll(cards: ScenarioCard[]): void {
  renderCards(cards);
  const withCurves = cards.filter((c) => c.visible && c.result);
  const target = withCurves.length > 0 ? withCurves[0].spec.target_power : null;
  el<HTMLDivElement>("chart-holder").innerHTML = renderChart(cards, target);
}

function wireEvents(): void {
  el<HTMLButtonElement>("submit-btn").addEventListener("click", () => void submitScenario());
  el<HTMLSelectElement>("preset-picker").addEventListener("change", (ev) => {
    const name = (ev.target as HTMLSelectElement).value;
    if (name && PRESETS[name]) {
      el<HTMLTextAreaElement>("spec-editor").value = JSON.stringify(PRESETS[name], null, 2);
    }
  });
  el<HTMLDivElement>("card-list").addEventListener("click", (ev) => {
    const btn = (ev.target as HTMLElement).closest("button");
    if (!btn) return;
    const localId = Number(btn.dataset.card);
    switch (btn.dataset.action) {
      case "toggle":
        store.toggleVisible(localId);
        break;
      case "verify":
        void verifyScenario(localId);
        break;
      case "retry":
        void retryScenario(localId);
        break;
      case "remove":
        store.remove(localId);
        break;
    }
  });
  el<HTMLDivElement>("chart-holder").addEventListener("mousemove", (ev) => {
    const svg = el<HTMLDivElement>("chart-holder").querySelector("svg");
    if (!svg) return;
    const rect = svg.getBoundingClientRect();
    const px = ((ev.clientX - rect.left) / rect.width) * 720;
    const readout = hoverReadout(store.visibleWithCurves(), px);
    el<HTMLDivElement>("hover-readout").textContent = readout.series.length
      ? `n = ${readout.n}: ` +
        readout.series.map((s) => `${s.label} ${(s.power * 100).toFixed(1)}%`).join("  |  ")
      : "";
  });
}

async function boot(): Promise<void> {
  const picker = el<HTMLSelectElement>("preset-picker");
  picker.innerHTML =
    `<option value="">choose a preset…</option>` +
    PRESET_NAMES.map((n) => `<option value="${n}">${n}</option>`).join("");
  el<HTMLTextAreaElement>("spec-editor").value = JSON.stringify(
    PRESETS["bernoulli-setting-1a"],
    null,
    2,
  );
  store.subscribe(renderAll);
  wireEvents();
  try {
    schema = await api.schema();
  } catch {
    schema = null; // server-side validation still applies
  }
  renderAll(store.snapshot());
}

if (typeof document !== "undefined") {
  void boot();
}
