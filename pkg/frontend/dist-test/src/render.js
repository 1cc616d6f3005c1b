/** Renders a ClientDocument into the page and translates user actions into
 * wire events. The DOM is rebuilt from the document on every patch, so what
 * you see is always exactly the mirrored server state. */
import { DEFAULT_GEOMETRY, drawPlot, hitTest, layoutPoints } from "./plot.js";
import { nextSort, renderTable } from "./table.js";
export function freshViewState() {
    return { sort: {}, tapActive: {} };
}
export function activityUrl(template, measurementId) {
    return template.replace("{measurement_id}", encodeURIComponent(measurementId));
}
export function renderDocument(root, doc, view, callbacks) {
    root.textContent = "";
    root.appendChild(renderLayoutNode(root.ownerDocument, doc.layout, doc, view, callbacks));
}
function renderLayoutNode(dom, node, doc, view, callbacks) {
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
function renderModel(dom, modelId, doc, view, callbacks) {
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
function renderSelect(dom, holder, modelId, doc, callbacks) {
    const label = dom.createElement("label");
    label.textContent = doc.prop(modelId, "title") ?? modelId;
    const select = dom.createElement("select");
    select.id = `select-${modelId}`;
    const value = doc.prop(modelId, "value") ?? "";
    const options = doc.prop(modelId, "options") ?? [];
    for (const option of value === "" ? ["", ...options] : options) {
        const el = dom.createElement("option");
        el.value = option;
        el.textContent = option === "" ? "--" : option;
        if (option === value)
            el.selected = true;
        select.appendChild(el);
    }
    select.addEventListener("change", () => {
        callbacks.sendEvent(modelId, "value_change", select.value);
    });
    label.appendChild(select);
    holder.appendChild(label);
}
function renderTableWidget(dom, holder, modelId, doc, view, callbacks) {
    const sourceId = doc.prop(modelId, "source");
    const columnNames = doc.prop(modelId, "columns");
    const columns = doc.columns(sourceId);
    const selected = doc.prop(sourceId, "selected_indices") ?? [];
    const title = dom.createElement("h3");
    title.textContent = doc.prop(modelId, "title") ?? "";
    holder.appendChild(title);
    const mount = dom.createElement("div");
    holder.appendChild(mount);
    renderTable(mount, columnNames, columns, selected, view.sort[modelId] ?? null, (column) => {
        view.sort[modelId] = nextSort(view.sort[modelId] ?? null, column);
        renderTableWidgetInPlace(mount, dom, modelId, doc, view, callbacks);
    }, (sourceRow) => callbacks.sendEvent(sourceId, "select", [sourceRow]));
}
function renderTableWidgetInPlace(mount, dom, modelId, doc, view, callbacks) {
    const sourceId = doc.prop(modelId, "source");
    renderTable(mount, doc.prop(modelId, "columns"), doc.columns(sourceId), doc.prop(sourceId, "selected_indices") ?? [], view.sort[modelId] ?? null, (column) => {
        view.sort[modelId] = nextSort(view.sort[modelId] ?? null, column);
        renderTableWidgetInPlace(mount, dom, modelId, doc, view, callbacks);
    }, (sourceRow) => callbacks.sendEvent(sourceId, "select", [sourceRow]));
}
function tapToolFor(doc, plotId) {
    for (const id of doc.byKind("tap_tool")) {
        if (doc.prop(id, "plot") === plotId)
            return id;
    }
    return null;
}
function renderPlotWidget(dom, holder, modelId, doc, view, callbacks) {
    const model = doc.model(modelId);
    const sourceId = doc.prop(modelId, "source");
    const columns = doc.columns(sourceId);
    const selected = doc.prop(sourceId, "selected_indices") ?? [];
    const warnings = doc.prop(sourceId, "warnings") ?? [];
    const seriesField = String(model.properties["series_field"] ?? "");
    const points = layoutPoints(columns, doc.prop(modelId, "x_field"), doc.prop(modelId, "y_field"), seriesField, String(model.properties["flag_field"] ?? ""));
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
    canvas.addEventListener("click", (ev) => {
        const rect = canvas.getBoundingClientRect();
        const row = hitTest(points, ev.clientX - rect.left, ev.clientY - rect.top);
        if (row === null)
            return;
        if (tapId && view.tapActive[modelId]) {
            const template = doc.prop(tapId, "url_template");
            const ids = columns["measurement_id"];
            if (ids)
                callbacks.openUrl(activityUrl(template, ids[row]));
            callbacks.sendEvent(modelId, "tap", row);
        }
        else {
            callbacks.sendEvent(sourceId, "select", [row]);
        }
    });
    holder.appendChild(canvas);
    // connect points within a series: always for line plots, and for scatter
    // plots that carry per-series trends
    const connect = model.kind === "line_plot" || seriesField !== "";
    drawPlot(canvas, points, selected, doc.prop(modelId, "title") ?? "", connect);
    if (warnings.length) {
        const warn = dom.createElement("div");
        warn.className = "plot-warnings";
        warn.textContent = `skipped: ${warnings.join(", ")}`;
        holder.appendChild(warn);
    }
}
