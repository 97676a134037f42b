/** Embedded consultation preview: drives the live /consult endpoints.
 *
 * Refuses to start while the case has validation errors (it shows the
 * report instead), then walks the engine through the served HTML pages.
 * Every session it opens is a real server session, isolated from anything
 * a browser user does.
 */

import type { AdminClient, ConsultClient } from './api.js';
import { parseConsultPage, type ConclusionPage, type QuestionPage } from './pages.js';
import type { ValidationReportDto } from './types.js';

export type PreviewState =
  | { kind: 'blocked'; report: ValidationReportDto }
  | { kind: 'question'; page: QuestionPage }
  | { kind: 'concluded'; page: ConclusionPage }
  | { kind: 'error'; message: string };

export class PreviewSession {
  private state: PreviewState | null = null;
  private sessionId: string | null = null;

  constructor(
    private readonly consult: ConsultClient,
    private readonly admin: AdminClient,
  ) {}

  get current(): PreviewState | null {
    return this.state;
  }

  async start(caseId: string): Promise<PreviewState> {
    const report = await this.admin.validateCase(caseId);
    if (report.errors.length > 0) {
      this.state = { kind: 'blocked', report };
      this.sessionId = null;
      return this.state;
    }
    return this.load(this.consult.startPath(caseId));
  }

  async answer(ruleId: string): Promise<PreviewState> {
    if (this.state?.kind !== 'question') {
      throw new Error('no question is showing');
    }
    return this.load(`${this.state.page.answerBase}/${encodeURIComponent(ruleId)}`);
  }

  /** Answer by visible label, the way a user reads the pane. */
  async answerByLabel(label: string): Promise<PreviewState> {
    if (this.state?.kind !== 'question') {
      throw new Error('no question is showing');
    }
    const option = this.state.page.answers.find((a) => a.label === label);
    if (!option) {
      throw new Error(`no answer labelled ${JSON.stringify(label)}`);
    }
    return this.answer(option.ruleId);
  }

  async back(): Promise<PreviewState> {
    if (!this.sessionId) {
      throw new Error('no active preview session');
    }
    return this.load(`/consult/${this.sessionId}/back`);
  }

  private async load(path: string): Promise<PreviewState> {
    const { status, html } = await this.consult.fetchPage(path);
    const page = parseConsultPage(html);
    if (page.kind === 'question') {
      this.sessionId = page.sessionId;
      this.state = { kind: 'question', page };
    } else if (page.kind === 'conclusion') {
      this.state = { kind: 'concluded', page };
    } else {
      this.state = { kind: 'error', message: `${page.message} (HTTP ${status})` };
    }
    return this.state;
  }
}
