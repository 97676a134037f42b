/** End-to-end against the real backend: the editor's whole story.
 *
 * Spawns the Python server as a subprocess, builds the two-question fever
 * fixture through the same code paths the form uses, and checks the
 * round-trip export, the validation parity, and the consultation preview.
 */

import assert from 'node:assert/strict';
import { after, before, test } from 'node:test';
import { type ChildProcess, spawn } from 'node:child_process';
import { mkdtempSync } from 'node:fs';
import net from 'node:net';
import { tmpdir } from 'node:os';
import { join } from 'node:path';

import { AdminClient, AuthRequiredError, ConsultClient } from '../src/api.js';
import { PreviewSession } from '../src/preview.js';
import { RuleFormModel } from '../src/ruleForm.js';
import { buildOutline, validationLines } from '../src/treePane.js';
import type { BundleDoc } from '../src/types.js';

const USERNAME = 'editor';
const PASSWORD = 'turn-the-key';

let proc: ChildProcess;
let baseUrl: string;
let admin: AdminClient;
let consult: ConsultClient;

function freePort(): Promise<number> {
  return new Promise((resolve, reject) => {
    const probe = net.createServer();
    probe.listen(0, '127.0.0.1', () => {
      const { port } = probe.address() as net.AddressInfo;
      probe.close((err) => (err ? reject(err) : resolve(port)));
    });
    probe.on('error', reject);
  });
}

async function waitForServer(url: string, deadlineMs = 20000): Promise<void> {
  const deadline = Date.now() + deadlineMs;
  let lastError: unknown = null;
  while (Date.now() < deadline) {
    try {
      const response = await fetch(url);
      if (response.status < 500) return;
    } catch (error) {
      lastError = error;
    }
    await new Promise((r) => setTimeout(r, 100));
  }
  throw new Error(`backend never came up at ${url}: ${lastError}`);
}

before(async () => {
  const port = await freePort();
  const store = join(mkdtempSync(join(tmpdir(), 'kbc-editor-')), 'kb.sqlite3');
  proc = spawn(
    'python3',
    [
      '-m', 'kbconsult.cli', 'serve',
      '--store', store,
      '--bind', `127.0.0.1:${port}`,
      '--admin-user', USERNAME,
      '--admin-password', PASSWORD,
    ],
    { stdio: ['ignore', 'pipe', 'pipe'] },
  );
  baseUrl = `http://127.0.0.1:${port}`;
  await waitForServer(`${baseUrl}/cases`);
  admin = new AdminClient(baseUrl);
  consult = new ConsultClient(baseUrl);
  await admin.login(USERNAME, PASSWORD);
});

after(() => {
  proc.kill('SIGTERM');
});

// The fixture the form entry below must reproduce byte-for-byte on export.
const EXPECTED_EXPORT: BundleDoc = {
  format_version: 1,
  cases: [{ id: 'c1', name: 'dengue-mini', description: '' }],
  symptoms: [
    { id: 's1', case_id: 'c1', question_text: 'Does the patient have fever for 2 or more days?', description: '' },
    { id: 's2', case_id: 'c1', question_text: 'Is there bleeding or a weak pulse?', description: '' },
  ],
  diagnoses: [
    { id: 'd1', case_id: 'c1', conclusion_text: 'No dengue indication', advice_text: 'Monitor at home' },
    { id: 'd2', case_id: 'c1', conclusion_text: 'Dengue with warning signs', advice_text: 'Seek hospital care' },
    { id: 'd3', case_id: 'c1', conclusion_text: 'Severe dengue', advice_text: 'Emergency care immediately' },
  ],
  rules: [
    { id: 'r1', case_id: 'c1', question: 's1', is_first_question: true, answer_label: 'Yes', target: { kind: 'decision', id: 's2' }, order_index: 0 },
    { id: 'r2', case_id: 'c1', question: 's1', is_first_question: true, answer_label: 'No', target: { kind: 'leaf', id: 'd1' }, order_index: 1 },
    { id: 'r3', case_id: 'c1', question: 's2', is_first_question: false, answer_label: 'Yes', target: { kind: 'leaf', id: 'd3' }, order_index: 0 },
    { id: 'r4', case_id: 'c1', question: 's2', is_first_question: false, answer_label: 'No', target: { kind: 'leaf', id: 'd2' }, order_index: 1 },
  ],
};

interface RuleEntry {
  id: string;
  question: string;
  label: string;
  first: boolean;
  kind: 'decision' | 'leaf';
  target: string;
  order: number;
}

const RULE_ENTRIES: RuleEntry[] = [
  { id: 'r1', question: 's1', label: 'Yes', first: true, kind: 'decision', target: 's2', order: 0 },
  { id: 'r2', question: 's1', label: 'No', first: true, kind: 'leaf', target: 'd1', order: 1 },
  { id: 'r3', question: 's2', label: 'Yes', first: false, kind: 'leaf', target: 'd3', order: 0 },
  { id: 'r4', question: 's2', label: 'No', first: false, kind: 'leaf', target: 'd2', order: 1 },
];

test('building the fixture through the form round-trips to a canonically equal export', async () => {
  for (const record of EXPECTED_EXPORT.cases) {
    await admin.saveEntity('cases', record as unknown as Record<string, unknown>);
  }
  for (const record of EXPECTED_EXPORT.symptoms) {
    await admin.saveEntity('symptoms', record as unknown as Record<string, unknown>);
  }
  for (const record of EXPECTED_EXPORT.diagnoses) {
    await admin.saveEntity('diagnoses', record as unknown as Record<string, unknown>);
  }

  // rules go through the form model exactly as the UI drives it
  const symptoms = (await admin.listSymptoms()).filter((s) => s.case_id === 'c1');
  const diagnoses = (await admin.listDiagnoses()).filter((d) => d.case_id === 'c1');
  for (const entry of RULE_ENTRIES) {
    const form = new RuleFormModel(symptoms, diagnoses);
    form.question = entry.question;
    form.answerLabel = entry.label;
    form.isFirstQuestion = entry.first;
    form.setTargetKind(entry.kind);
    form.setTarget(entry.target);
    form.orderIndex = entry.order;
    form.ruleId = entry.id;
    assert.equal(form.canSubmit, true);
    await admin.saveEntity('rules', form.toRecord('c1') as Record<string, unknown>);
  }

  const exported = await admin.exportBundle('c1');
  assert.deepEqual(exported, EXPECTED_EXPORT);
});

test('validation pane mirrors /admin/validate exactly', async () => {
  const report = await admin.validateCase('c1');
  assert.deepEqual(report, { case_id: 'c1', errors: [], warnings: [] });

  const lines = validationLines(report);
  assert.deepEqual(
    lines.map((l) => l.defect),
    [...report.errors, ...report.warnings],
  );

  // tree markers stay a subset of the report, even on a broken case
  await admin.saveEntity('cases', { id: 'broken', name: 'half done', description: '' });
  const brokenReport = await admin.validateCase('broken');
  assert.equal(brokenReport.errors[0]?.kind, 'NO_ROOT');
  const outline = buildOutline(await admin.exportBundle('broken'), 'broken', brokenReport);
  const reported = new Set(
    [...brokenReport.errors, ...brokenReport.warnings].map((d) => `${d.kind}@${d.location}`),
  );
  for (const line of outline) {
    for (const defect of line.defects) {
      assert.ok(reported.has(`${defect.kind}@${defect.location}`));
    }
  }
});

test('preview walks the live engine: answering No concludes at No dengue indication', async () => {
  const preview = new PreviewSession(consult, admin);
  const started = await preview.start('c1');
  assert.equal(started.kind, 'question');
  if (started.kind !== 'question') return;
  assert.equal(started.page.questionText, 'Does the patient have fever for 2 or more days?');
  assert.deepEqual(started.page.answers.map((a) => a.label), ['Yes', 'No']);

  const concluded = await preview.answerByLabel('No');
  assert.equal(concluded.kind, 'concluded');
  if (concluded.kind !== 'concluded') return;
  assert.equal(concluded.page.conclusionText, 'No dengue indication');
  assert.equal(concluded.page.adviceText, 'Monitor at home');
  assert.deepEqual(concluded.page.transcript, [
    { question: 'Does the patient have fever for 2 or more days?', answer: 'No' },
  ]);
});

test('preview can step back and take the other branch', async () => {
  const preview = new PreviewSession(consult, admin);
  await preview.start('c1');
  await preview.answerByLabel('Yes');
  const back = await preview.back();
  assert.equal(back.kind, 'question');
  if (back.kind !== 'question') return;
  assert.equal(back.page.stepNumber, 1);
  await preview.answerByLabel('Yes');
  const severe = await preview.answerByLabel('Yes');
  assert.equal(severe.kind, 'concluded');
  if (severe.kind !== 'concluded') return;
  assert.equal(severe.page.conclusionText, 'Severe dengue');
});

test('preview refuses a case with validation errors and shows the report', async () => {
  const preview = new PreviewSession(consult, admin);
  const state = await preview.start('broken');
  assert.equal(state.kind, 'blocked');
  if (state.kind !== 'blocked') return;
  assert.deepEqual(state.report, await admin.validateCase('broken'));
});

test('two previews do not share consultation state', async () => {
  const one = new PreviewSession(consult, admin);
  const two = new PreviewSession(consult, admin);
  await one.start('c1');
  await two.start('c1');
  await one.answerByLabel('Yes');
  const stateTwo = two.current;
  assert.equal(stateTwo?.kind, 'question');
  if (stateTwo?.kind !== 'question') return;
  assert.equal(stateTwo.page.stepNumber, 1);
});

test('admin calls without a token raise AuthRequiredError', async () => {
  const anonymous = new AdminClient(baseUrl);
  await assert.rejects(anonymous.listCases(), AuthRequiredError);
});

test('wrong credentials are rejected without user/password distinction', async () => {
  const anonymous = new AdminClient(baseUrl);
  await assert.rejects(anonymous.login(USERNAME, 'wrong'), AuthRequiredError);
  await assert.rejects(anonymous.login('ghost', PASSWORD), AuthRequiredError);
});
