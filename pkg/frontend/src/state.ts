/** Client-side document mirror.
 *
 * The server document is the single source of truth: the mirror only changes
 * by applying received patches, and a revision gap means we missed a message
 * and must refetch the whole document.
 */

import type { Columns, DocumentPayload, LayoutNode, ModelPayload, PatchMessage } from "./types.js";

export class RevisionGapError extends Error {
  constructor(public expected: number, public got: number) {
    super(`expected patch revision ${expected}, got ${got}`);
  }
}

export class ClientDocument {
  revision: number;
  layout: LayoutNode;
  models: Record<string, ModelPayload>;

  constructor(payload: DocumentPayload) {
    // deep copy so later patches never alias the bootstrap payload
    this.revision = payload.revision;
    this.layout = JSON.parse(JSON.stringify(payload.layout));
    this.models = JSON.parse(JSON.stringify(payload.models));
  }

  applyPatch(patch: PatchMessage): void {
    if (patch.revision !== this.revision + 1) {
      throw new RevisionGapError(this.revision + 1, patch.revision);
    }
    for (const op of patch.ops) {
      const model = this.models[op.model];
      if (!model) {
        throw new Error(`patch references unknown model ${op.model}`);
      }
      model.properties[op.prop] = op.value;
    }
    this.revision = patch.revision;
  }

  model(id: string): ModelPayload {
    const m = this.models[id];
    if (!m) throw new Error(`unknown model ${id}`);
    return m;
  }

  prop<T>(id: string, name: string): T {
    return this.model(id).properties[name] as T;
  }

  columns(sourceId: string): Columns {
    return this.prop<Columns>(sourceId, "columns");
  }

  /** Model ids of a given kind, in sorted order. */
  byKind(kind: string): string[] {
    return Object.keys(this.models)
      .filter((id) => this.models[id].kind === kind)
      .sort();
  }
}
