/** Sortable data table. Sorting is a pure view transform over row indices;
 * the sort state lives only in the client and row clicks always report
 * source row indices. */
export function rowCount(columns) {
    const first = Object.values(columns)[0];
    return first ? first.length : 0;
}
/** Source-row indices in display order under the given sort state. */
export function rowOrder(columns, sort) {
    const n = rowCount(columns);
    const order = Array.from({ length: n }, (_, i) => i);
    if (!sort || !(sort.column in columns))
        return order;
    const col = columns[sort.column];
    return order.sort((a, b) => {
        const va = col[a];
        const vb = col[b];
        if (va === null || va === undefined)
            return vb === null || vb === undefined ? a - b : 1;
        if (vb === null || vb === undefined)
            return -1;
        if (va < vb)
            return -sort.dir;
        if (va > vb)
            return sort.dir;
        return a - b; // stable for ties
    });
}
export function nextSort(current, column) {
    if (current && current.column === column && current.dir === 1) {
        return { column, dir: -1 };
    }
    return { column, dir: 1 };
}
function formatCell(value) {
    if (value === null || value === undefined)
        return "";
    if (typeof value === "number" && !Number.isInteger(value)) {
        return Math.abs(value) < 1e-3 ? value.toExponential(4) : value.toPrecision(6);
    }
    return String(value);
}
export function renderTable(container, columnNames, columns, selected, sort, onHeaderClick, onRowClick) {
    container.textContent = "";
    const table = container.ownerDocument.createElement("table");
    table.className = "data-table";
    const head = table.createTHead().insertRow();
    for (const name of columnNames) {
        const th = container.ownerDocument.createElement("th");
        th.textContent = sort && sort.column === name ? `${name} ${sort.dir === 1 ? "^" : "v"}` : name;
        th.addEventListener("click", () => onHeaderClick(name));
        head.appendChild(th);
    }
    const body = table.createTBody();
    for (const sourceRow of rowOrder(columns, sort)) {
        const tr = body.insertRow();
        tr.dataset.row = String(sourceRow);
        if (selected.includes(sourceRow))
            tr.className = "selected";
        for (const name of columnNames) {
            tr.insertCell().textContent = formatCell(columns[name]?.[sourceRow]);
        }
        tr.addEventListener("click", () => onRowClick(sourceRow));
    }
    container.appendChild(table);
}
