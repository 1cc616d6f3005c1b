/** Wire protocol and document payload shapes (mirror of the server schema). */

export type LayoutNode = string | { type: "row" | "column"; children: LayoutNode[] };

export interface ModelPayload {
  kind: string;
  properties: Record<string, unknown>;
}

export interface DocumentPayload {
  revision: number;
  layout: LayoutNode;
  models: Record<string, ModelPayload>;
}

export interface SessionPayload {
  session_id: string;
  document: DocumentPayload;
}

export type EventName = "value_change" | "select" | "tap";

export interface EventMessage {
  kind: "event";
  model: string;
  event: EventName;
  payload: unknown;
}

export interface PatchOpWire {
  model: string;
  prop: string;
  value: unknown;
}

export interface PatchMessage {
  kind: "patch";
  revision: number;
  ops: PatchOpWire[];
}

export interface ErrorMessage {
  kind: "error";
  code: string;
  detail?: string;
}

export interface CloseMessage {
  kind: "close";
  reason?: string;
}

export type ServerMessage = PatchMessage | ErrorMessage | CloseMessage;

export type Columns = Record<string, unknown[]>;
