/** Renders a ClientDocument into the page and translates user actions into
 * wire events. The DOM is rebuilt from the document on every patch, so what
 * you see is always exactly the mirrored server state. */

import type { ClientDocument } from "./state.js";
import type { EventName, LayoutNode } from "./types.js";
import { DEFAULT_GEOMETRY, drawPlot, hitTest, layoutPoints } from "./plot.js";
import { SortState, nextSort, renderTable } from "./table.js";

export interface UiCallbacks {
  sendEvent(model: string, event: EventName, payload: unknown): void;
  openUrl(url: string): void;
}

/** Per-session view state that never leaves the client. */
export interface ViewState {
  sort: Record<string, SortState | null>;
  tapActive: Record<string, boolean>;
}

export function freshViewState(): ViewState {
  return { sort: {}, tapActive: {} };
}

export function activityUrl(template: string, measurementId: string): string {
  return template.replace("{measurement_id}", encodeURIComponent(measurementId));
}

export function renderDocument(
  root: HTMLElement,
  doc: ClientDocument,
  view: ViewState,
  callbacks: UiCallbacks,
): void {
  root.textContent = "";
  root.appendChild(renderLayoutNode(root.ownerDocument, doc.layout, doc, view, callbacks));
}

function renderLayoutNode(
  dom: Document,
  node: LayoutNode,
  doc: ClientDocument,
  view: ViewState,
  callbacks: UiCallbacks,
): HTMLElement {
  if (typeof node === "string") {
    return renderModel(dom, node, doc, view, callbacks);
  }
  const div = dom.createElement("div");
  div.className = node.type === "row" ? "layout-row" : "layout-column";
  for (const child of node.children) {
    div.appendChild(renderLayoutNode(dom, child, doc, view, callbacks));
  }
  return div;
}

function renderModel(
  dom: Document,
  modelId: string,
  doc: ClientDocument,
  view: ViewState,
  callbacks: UiCallbacks,
): HTMLElement {
  const model = doc.model(modelId);
  const holder = dom.createElement("div");
  holder.id = `model-${modelId}`;
  holder.className = `widget widget-${model.kind}`;

  switch (model.kind) {
    case "select_box":
      renderSelect(dom, holder, modelId, doc, callbacks);
      break;
    case "data_table":
      renderTableWidget(dom, holder, modelId, doc, view, callbacks);
      break;
    case "line_plot":
    case "scatter_plot":
      renderPlotWidget(dom, holder, modelId, doc, view, callbacks);
      break;
    case "detail_panel": {
      const title = dom.createElement("h3");
      title.textContent = String(model.properties["title"] ?? "");
      const pre = dom.createElement("pre");
      pre.textContent = String(model.properties["text"] ?? "");
      holder.append(title, pre);
      break;
    }
    default:
      holder.style.display = "none"; // data sources and tools are not visual
  }
  return holder;
}

function renderSelect(
  dom: Document,
  holder: HTMLElement,
  modelId: string,
  doc: ClientDocument,
  callbacks: UiCallbacks,
): void {
  const label = dom.createElement("label");
  label.textContent = doc.prop<string>(modelId, "title") ?? modelId;
  const select = dom.createElement("select");
  select.id = `select-${modelId}`;
  const value = doc.prop<string>(modelId, "value") ?? "";
  const options = doc.prop<string[]>(modelId, "options") ?? [];
  for (const option of value === "" ? ["", ...options] : options) {
    const el = dom.createElement("option");
    el.value = option;
    el.textContent = option === "" ? "--" : option;
    if (option === value) el.selected = true;
    select.appendChild(el);
  }
  select.addEventListener("change", () => {
    callbacks.sendEvent(modelId, "value_change", select.value);
  });
  label.appendChild(select);
  holder.appendChild(label);
}

function renderTableWidget(
  dom: Document,
  holder: HTMLElement,
  modelId: string,
  doc: ClientDocument,
  view: ViewState,
  callbacks: UiCallbacks,
): void {
  const sourceId = doc.prop<string>(modelId, "source");
  const columnNames = doc.prop<string[]>(modelId, "columns");
  const columns = doc.columns(sourceId);
  const selected = doc.prop<number[]>(sourceId, "selected_indices") ?? [];
  const title = dom.createElement("h3");
  title.textContent = doc.prop<string>(modelId, "title") ?? "";
  holder.appendChild(title);
  const mount = dom.createElement("div");
  holder.appendChild(mount);
  renderTable(
    mount,
    columnNames,
    columns,
    selected,
    view.sort[modelId] ?? null,
    (column) => {
      view.sort[modelId] = nextSort(view.sort[modelId] ?? null, column);
      renderTableWidgetInPlace(mount, dom, modelId, doc, view, callbacks);
    },
    (sourceRow) => callbacks.sendEvent(sourceId, "select", [sourceRow]),
  );
}

function renderTableWidgetInPlace(
  mount: HTMLElement,
  dom: Document,
  modelId: string,
  doc: ClientDocument,
  view: ViewState,
  callbacks: UiCallbacks,
): void {
  const sourceId = doc.prop<string>(modelId, "source");
  renderTable(
    mount,
    doc.prop<string[]>(modelId, "columns"),
    doc.columns(sourceId),
    doc.prop<number[]>(sourceId, "selected_indices") ?? [],
    view.sort[modelId] ?? null,
    (column) => {
      view.sort[modelId] = nextSort(view.sort[modelId] ?? null, column);
      renderTableWidgetInPlace(mount, dom, modelId, doc, view, callbacks);
    },
    (sourceRow) => callbacks.sendEvent(sourceId, "select", [sourceRow]),
  );
}

function tapToolFor(doc: ClientDocument, plotId: string): string | null {
  for (const id of doc.byKind("tap_tool")) {
    if (doc.prop<string>(id, "plot") === plotId) return id;
  }
  return null;
}

function renderPlotWidget(
  dom: Document,
  holder: HTMLElement,
  modelId: string,
  doc: ClientDocument,
  view: ViewState,
  callbacks: UiCallbacks,
): void {
  const model = doc.model(modelId);
  const sourceId = doc.prop<string>(modelId, "source");
  const columns = doc.columns(sourceId);
  const selected = doc.prop<number[]>(sourceId, "selected_indices") ?? [];
  const warnings = doc.prop<string[]>(sourceId, "warnings") ?? [];
  const seriesField = String(model.properties["series_field"] ?? "");

  const points = layoutPoints(
    columns,
    doc.prop<string>(modelId, "x_field"),
    doc.prop<string>(modelId, "y_field"),
    seriesField,
    String(model.properties["flag_field"] ?? ""),
  );

  const toolbar = dom.createElement("div");
  toolbar.className = "plot-toolbar";
  const tapId = tapToolFor(doc, modelId);
  if (tapId) {
    const button = dom.createElement("button");
    button.id = `tap-toggle-${modelId}`;
    button.textContent = view.tapActive[modelId] ? "tap: on" : "tap: off";
    button.addEventListener("click", () => {
      view.tapActive[modelId] = !view.tapActive[modelId];
      button.textContent = view.tapActive[modelId] ? "tap: on" : "tap: off";
    });
    toolbar.appendChild(button);
  }
  holder.appendChild(toolbar);

  const canvas = dom.createElement("canvas");
  canvas.id = `plot-${modelId}`;
  canvas.width = DEFAULT_GEOMETRY.width;
  canvas.height = DEFAULT_GEOMETRY.height;
  canvas.addEventListener("click", (ev: MouseEvent) => {
    const rect = canvas.getBoundingClientRect();
    const row = hitTest(points, ev.clientX - rect.left, ev.clientY - rect.top);
    if (row === null) return;
    if (tapId && view.tapActive[modelId]) {
      const template = doc.prop<string>(tapId, "url_template");
      const ids = columns["measurement_id"] as string[] | undefined;
      if (ids) callbacks.openUrl(activityUrl(template, ids[row]));
      callbacks.sendEvent(modelId, "tap", row);
    } else {
      callbacks.sendEvent(sourceId, "select", [row]);
    }
  });
  holder.appendChild(canvas);
  // connect points within a series: always for line plots, and for scatter
  // plots that carry per-series trends
  const connect = model.kind === "line_plot" || seriesField !== "";
  drawPlot(canvas, points, selected, doc.prop<string>(modelId, "title") ?? "", connect);

  if (warnings.length) {
    const warn = dom.createElement("div");
    warn.className = "plot-warnings";
    warn.textContent = `skipped: ${warnings.join(", ")}`;
    holder.appendChild(warn);
  }
}
