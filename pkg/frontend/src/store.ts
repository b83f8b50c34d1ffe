/**
 * Scenario-card state.  All updates flow through this single store so
 * concurrent polling callbacks cannot interleave partial writes; the
 * view layer re-renders from immutable snapshots.
 *
 * Every displayed number is copied verbatim from a service response -
 * the store never derives statistics of its own.
 */

import type { OracleRow, PowerCurveResult, ScenarioCard, Session } from "./types.js";

export type Listener = (cards: ScenarioCard[]) => void;

export class ScenarioStore {
  private cards: ScenarioCard[] = [];
  private nextId = 1;
  private listeners: Listener[] = [];

  subscribe(fn: Listener): () => void {
    this.listeners.push(fn);
    return () => {
      this.listeners = this.listeners.filter((l) => l !== fn);
    };
  }

  private emit(): void {
    const snapshot = this.snapshot();
    for (const fn of this.listeners) fn(snapshot);
  }

  snapshot(): ScenarioCard[] {
    return this.cards.map((c) => ({ ...c }));
  }

  get(localId: number): ScenarioCard | undefined {
    return this.cards.find((c) => c.localId === localId);
  }

  addDraft(spec: ScenarioCard["spec"]): ScenarioCard {
    const card: ScenarioCard = {
      localId: this.nextId++,
      spec,
      sessionId: null,
      status: "draft",
      result: null,
      oracle: null,
      visible: true,
      error: null,
    };
    this.cards.push(card);
    this.emit();
    return { ...card };
  }

  private patch(localId: number, update: Partial<ScenarioCard>): void {
    const card = this.cards.find((c) => c.localId === localId);
    if (!card) return;
    Object.assign(card, update);
    this.emit();
  }

  markSubmitted(localId: number, sessionId: string): void {
    this.patch(localId, { sessionId, status: "queued", error: null });
  }

  markStale(localId: number, error: string): void {
    this.patch(localId, { status: "stale", error });
  }

  applySession(localId: number, session: Session): void {
    this.patch(localId, {
      status: session.status,
      result: (session.result as PowerCurveResult | null) ?? null,
      oracle: (session.oracle as OracleRow[] | null) ?? null,
      error: session.error,
    });
  }

  toggleVisible(localId: number): void {
    const card = this.cards.find((c) => c.localId === localId);
    if (!card) return;
    card.visible = !card.visible;
    this.emit();
  }

  remove(localId: number): void {
    this.cards = this.cards.filter((c) => c.localId !== localId);
    this.emit();
  }

  visibleWithCurves(): ScenarioCard[] {
    return this.snapshot().filter((c) => c.visible && c.result !== null);
  }
}

/** Displayed card fields, all traceable to the service payload. */
export interface CardViewModel {
  title: string;
  status: string;
  recommendation: number | null;
  n0: number | null;
  warnings: string[];
  hasOracle: boolean;
  verifyEnabled: boolean;
}

export function cardViewModel(card: ScenarioCard): CardViewModel {
  return {
    title: card.spec.label || `scenario ${card.localId}`,
    status: card.status,
    recommendation: card.result ? card.result.recommendation : null,
    n0: card.result ? card.result.n0 : null,
    warnings: card.result ? card.result.warnings : [],
    hasOracle: !!card.oracle && card.oracle.length > 0,
    verifyEnabled: card.status === "done",
  };
}
