/** Client-side document mirror.
 *
 * The server document is the single source of truth: the mirror only changes
 * by applying received patches, and a revision gap means we missed a message
 * and must refetch the whole document.
 */
export class RevisionGapError extends Error {
    expected;
    got;
    constructor(expected, got) {
        super(`expected patch revision ${expected}, got ${got}`);
        this.expected = expected;
        this.got = got;
    }
}
export class ClientDocument {
    revision;
    layout;
    models;
    constructor(payload) {
        // deep copy so later patches never alias the bootstrap payload
        this.revision = payload.revision;
        this.layout = JSON.parse(JSON.stringify(payload.layout));
        this.models = JSON.parse(JSON.stringify(payload.models));
    }
    applyPatch(patch) {
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
    model(id) {
        const m = this.models[id];
        if (!m)
            throw new Error(`unknown model ${id}`);
        return m;
    }
    prop(id, name) {
        return this.model(id).properties[name];
    }
    columns(sourceId) {
        return this.prop(sourceId, "columns");
    }
    /** Model ids of a given kind, in sorted order. */
    byKind(kind) {
        return Object.keys(this.models)
            .filter((id) => this.models[id].kind === kind)
            .sort();
    }
}
