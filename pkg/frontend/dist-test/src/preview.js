/** Embedded consultation preview: drives the live /consult endpoints.
 *
 * Refuses to start while the case has validation errors (it shows the
 * report instead), then walks the engine through the served HTML pages.
 * Every session it opens is a real server session, isolated from anything
 * a browser user does.
 */
import { parseConsultPage } from './pages.js';
export class PreviewSession {
    consult;
    admin;
    state = null;
    sessionId = null;
    constructor(consult, admin) {
        this.consult = consult;
        this.admin = admin;
    }
    get current() {
        return this.state;
    }
    async start(caseId) {
        const report = await this.admin.validateCase(caseId);
        if (report.errors.length > 0) {
            this.state = { kind: 'blocked', report };
            this.sessionId = null;
            return this.state;
        }
        return this.load(this.consult.startPath(caseId));
    }
    async answer(ruleId) {
        if (this.state?.kind !== 'question') {
            throw new Error('no question is showing');
        }
        return this.load(`${this.state.page.answerBase}/${encodeURIComponent(ruleId)}`);
    }
    /** Answer by visible label, the way a user reads the pane. */
    async answerByLabel(label) {
        if (this.state?.kind !== 'question') {
            throw new Error('no question is showing');
        }
        const option = this.state.page.answers.find((a) => a.label === label);
        if (!option) {
            throw new Error(`no answer labelled ${JSON.stringify(label)}`);
        }
        return this.answer(option.ruleId);
    }
    async back() {
        if (!this.sessionId) {
            throw new Error('no active preview session');
        }
        return this.load(`/consult/${this.sessionId}/back`);
    }
    async load(path) {
        const { status, html } = await this.consult.fetchPage(path);
        const page = parseConsultPage(html);
        if (page.kind === 'question') {
            this.sessionId = page.sessionId;
            this.state = { kind: 'question', page };
        }
        else if (page.kind === 'conclusion') {
            this.state = { kind: 'concluded', page };
        }
        else {
            this.state = { kind: 'error', message: `${page.message} (HTTP ${status})` };
        }
        return this.state;
    }
}
