/** Typed fetch client for the kbconsult HTTP API (exactly the server's route table). */
export class ApiError extends Error {
    status;
    body;
    constructor(status, message, body = null) {
        super(message);
        this.status = status;
        this.body = body;
        this.name = 'ApiError';
    }
    /** The offending field name on 400 responses, when the server names one. */
    get field() {
        if (this.body && typeof this.body === 'object' && 'field' in this.body) {
            return String(this.body.field);
        }
        return null;
    }
}
export class AuthRequiredError extends ApiError {
    constructor(body = null) {
        super(401, 'authentication required', body);
        this.name = 'AuthRequiredError';
    }
}
async function readBody(response) {
    const text = await response.text();
    try {
        return text ? JSON.parse(text) : null;
    }
    catch {
        return text;
    }
}
export class AdminClient {
    baseUrl;
    token = null;
    constructor(baseUrl = '') {
        this.baseUrl = baseUrl;
    }
    get authenticated() {
        return this.token !== null;
    }
    clearToken() {
        this.token = null;
    }
    async login(username, password) {
        const response = await fetch(`${this.baseUrl}/admin/login`, {
            method: 'POST',
            headers: { 'Content-Type': 'application/json' },
            body: JSON.stringify({ username, password }),
        });
        const body = await readBody(response);
        if (response.status === 401)
            throw new AuthRequiredError(body);
        if (!response.ok)
            throw new ApiError(response.status, `login failed (${response.status})`, body);
        this.token = body.token;
    }
    async call(method, path, payload) {
        const headers = {};
        if (this.token)
            headers['Authorization'] = `Bearer ${this.token}`;
        if (payload !== undefined)
            headers['Content-Type'] = 'application/json';
        const response = await fetch(`${this.baseUrl}${path}`, {
            method,
            headers,
            body: payload === undefined ? undefined : JSON.stringify(payload),
        });
        const body = await readBody(response);
        if (response.status === 401) {
            this.token = null;
            throw new AuthRequiredError(body);
        }
        if (!response.ok) {
            const detail = body && typeof body === 'object' && 'detail' in body
                ? String(body.detail)
                : `${method} ${path} failed (${response.status})`;
            throw new ApiError(response.status, detail, body);
        }
        return body;
    }
    async listEntities(kind) {
        const body = (await this.call('GET', `/admin/${kind}`));
        return body.items;
    }
    listCases() {
        return this.listEntities('cases');
    }
    listSymptoms() {
        return this.listEntities('symptoms');
    }
    listDiagnoses() {
        return this.listEntities('diagnoses');
    }
    listRules() {
        return this.listEntities('rules');
    }
    /** PUT when the record carries an id, POST (server mints the id) otherwise. */
    async saveEntity(kind, record) {
        const id = typeof record.id === 'string' && record.id ? record.id : null;
        const body = id
            ? await this.call('PUT', `/admin/${kind}/${encodeURIComponent(id)}`, record)
            : await this.call('POST', `/admin/${kind}`, record);
        return body.id;
    }
    async deleteEntity(kind, id) {
        await this.call('DELETE', `/admin/${kind}/${encodeURIComponent(id)}`);
    }
    validateCase(caseId) {
        return this.call('GET', `/admin/validate/${encodeURIComponent(caseId)}`);
    }
    importBundle(doc) {
        return this.call('POST', '/admin/import', doc);
    }
    exportBundle(caseId) {
        const query = caseId ? `?case=${encodeURIComponent(caseId)}` : '';
        return this.call('GET', `/admin/export${query}`);
    }
}
/** Read-only access to the consultation pages (always forced to HTML). */
export class ConsultClient {
    baseUrl;
    constructor(baseUrl = '') {
        this.baseUrl = baseUrl;
    }
    startPath(caseId) {
        return `/consult/${encodeURIComponent(caseId)}/start`;
    }
    async fetchPage(path) {
        const separator = path.includes('?') ? '&' : '?';
        const response = await fetch(`${this.baseUrl}${path}${separator}fmt=html`, {
            headers: { Accept: 'text/html' },
        });
        return { status: response.status, html: await response.text() };
    }
}
