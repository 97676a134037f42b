/** Typed fetch client for the kbconsult HTTP API (exactly the server's route table). */

import type {
  BundleDoc,
  CaseRecord,
  DiagnosisRecord,
  EntityKindPlural,
  ImportReportDto,
  RuleRecord,
  SymptomRecord,
  ValidationReportDto,
} from './types.js';

export class ApiError extends Error {
  constructor(
    readonly status: number,
    message: string,
    readonly body: unknown = null,
  ) {
    super(message);
    this.name = 'ApiError';
  }

  /** The offending field name on 400 responses, when the server names one. */
  get field(): string | null {
    if (this.body && typeof this.body === 'object' && 'field' in this.body) {
      return String((this.body as Record<string, unknown>).field);
    }
    return null;
  }
}

export class AuthRequiredError extends ApiError {
  constructor(body: unknown = null) {
    super(401, 'authentication required', body);
    this.name = 'AuthRequiredError';
  }
}

async function readBody(response: Response): Promise<unknown> {
  const text = await response.text();
  try {
    return text ? JSON.parse(text) : null;
  } catch {
    return text;
  }
}

export class AdminClient {
  private token: string | null = null;

  constructor(private readonly baseUrl: string = '') {}

  get authenticated(): boolean {
    return this.token !== null;
  }

  clearToken(): void {
    this.token = null;
  }

  async login(username: string, password: string): Promise<void> {
    const response = await fetch(`${this.baseUrl}/admin/login`, {
      method: 'POST',
      headers: { 'Content-Type': 'application/json' },
      body: JSON.stringify({ username, password }),
    });
    const body = await readBody(response);
    if (response.status === 401) throw new AuthRequiredError(body);
    if (!response.ok) throw new ApiError(response.status, `login failed (${response.status})`, body);
    this.token = (body as { token: string }).token;
  }

  private async call(method: string, path: string, payload?: unknown): Promise<unknown> {
    const headers: Record<string, string> = {};
    if (this.token) headers['Authorization'] = `Bearer ${this.token}`;
    if (payload !== undefined) headers['Content-Type'] = 'application/json';
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
      const detail =
        body && typeof body === 'object' && 'detail' in body
          ? String((body as Record<string, unknown>).detail)
          : `${method} ${path} failed (${response.status})`;
      throw new ApiError(response.status, detail, body);
    }
    return body;
  }

  async listEntities<T>(kind: EntityKindPlural): Promise<T[]> {
    const body = (await this.call('GET', `/admin/${kind}`)) as { items: T[] };
    return body.items;
  }

  listCases(): Promise<CaseRecord[]> {
    return this.listEntities<CaseRecord>('cases');
  }

  listSymptoms(): Promise<SymptomRecord[]> {
    return this.listEntities<SymptomRecord>('symptoms');
  }

  listDiagnoses(): Promise<DiagnosisRecord[]> {
    return this.listEntities<DiagnosisRecord>('diagnoses');
  }

  listRules(): Promise<RuleRecord[]> {
    return this.listEntities<RuleRecord>('rules');
  }

  /** PUT when the record carries an id, POST (server mints the id) otherwise. */
  async saveEntity(kind: EntityKindPlural, record: Record<string, unknown>): Promise<string> {
    const id = typeof record.id === 'string' && record.id ? record.id : null;
    const body = id
      ? await this.call('PUT', `/admin/${kind}/${encodeURIComponent(id)}`, record)
      : await this.call('POST', `/admin/${kind}`, record);
    return (body as { id: string }).id;
  }

  async deleteEntity(kind: EntityKindPlural, id: string): Promise<void> {
    await this.call('DELETE', `/admin/${kind}/${encodeURIComponent(id)}`);
  }

  validateCase(caseId: string): Promise<ValidationReportDto> {
    return this.call('GET', `/admin/validate/${encodeURIComponent(caseId)}`) as Promise<ValidationReportDto>;
  }

  importBundle(doc: BundleDoc): Promise<ImportReportDto> {
    return this.call('POST', '/admin/import', doc) as Promise<ImportReportDto>;
  }

  exportBundle(caseId?: string): Promise<BundleDoc> {
    const query = caseId ? `?case=${encodeURIComponent(caseId)}` : '';
    return this.call('GET', `/admin/export${query}`) as Promise<BundleDoc>;
  }
}

/** Read-only access to the consultation pages (always forced to HTML). */
export class ConsultClient {
  constructor(private readonly baseUrl: string = '') {}

  startPath(caseId: string): string {
    return `/consult/${encodeURIComponent(caseId)}/start`;
  }

  async fetchPage(path: string): Promise<{ status: number; html: string }> {
    const separator = path.includes('?') ? '&' : '?';
    const response = await fetch(`${this.baseUrl}${path}${separator}fmt=html`, {
      headers: { Accept: 'text/html' },
    });
    return { status: response.status, html: await response.text() };
  }
}
