/** Named, editable snapshots of design inputs with their latest results.
 * Serializes to the same JSON document schema the CLI accepts, so cards can
 * be copied back and forth. */

import type { DesignDoc, DesignResultDoc } from "./types.js";

export interface ScenarioCard {
  name: string;
  inputs: DesignDoc;
  result: DesignResultDoc | null;
  /** true whenever inputs changed after the result arrived */
  stale: boolean;
  compare: boolean;
}

export class ScenarioStore {
  private cards = new Map<string, ScenarioCard>();

  list(): ScenarioCard[] {
    return [...this.cards.values()];
  }

  get(name: string): ScenarioCard | undefined {
    return this.cards.get(name);
  }

  save(name: string, inputs: DesignDoc): ScenarioCard {
    const card: ScenarioCard = {
      name,
      inputs: structuredClone(inputs),
      result: null,
      stale: true,
      compare: false,
    };
    this.cards.set(name, card);
    return card;
  }

  /** Any edit invalidates the stored result until it is recomputed. */
  edit(name: string, inputs: DesignDoc): void {
    const card = this.expect(name);
    card.inputs = structuredClone(inputs);
    card.stale = true;
  }

  attachResult(name: string, result: DesignResultDoc): void {
    const card = this.expect(name);
    card.result = result;
    card.stale = false;
  }

  toggleCompare(name: string): void {
    const card = this.expect(name);
    card.compare = !card.compare;
  }

  remove(name: string): void {
    this.cards.delete(name);
  }

  /** CLI-compatible design-inputs document. */
  serialize(name: string): string {
    const card = this.expect(name);
    const doc: Record<string, unknown> = { ...card.inputs };
    if (doc.composite_probs == null) delete doc.composite_probs;
    if (doc.wd == null) delete doc.wd;
    return JSON.stringify(doc, null, 2);
  }

  load(name: string, json: string): ScenarioCard {
    const doc = JSON.parse(json) as DesignDoc;
    return this.save(name, doc);
  }

  private expect(name: string): ScenarioCard {
    const card = this.cards.get(name);
    if (!card) throw new Error(`no scenario named ${name}`);
    return card;
  }
}
