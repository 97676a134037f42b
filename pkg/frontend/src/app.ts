/** DOM wiring for the knowledge editor.
 *
 * Four panes: sign in, entity entry (case, questions, conclusions, and the
 * rule form of the entry/editor screen), the live tree outline with
 * validation markers, and the consultation preview.
 */

import { AdminClient, ApiError, AuthRequiredError, ConsultClient } from './api.js';
import { PreviewSession } from './preview.js';
import { RuleFormModel } from './ruleForm.js';
import { buildOutline, validationLines } from './treePane.js';
import type { CaseRecord, DiagnosisRecord, SymptomRecord } from './types.js';

const admin = new AdminClient();
const consult = new ConsultClient();
const preview = new PreviewSession(consult, admin);

let cases: CaseRecord[] = [];
let symptoms: SymptomRecord[] = [];
let diagnoses: DiagnosisRecord[] = [];
let currentCase: string | null = null;
let form: RuleFormModel = new RuleFormModel([], []);

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node as T;
}

function flash(message: string, isError = false): void {
  const bar = el<HTMLElement>('flash');
  bar.textContent = message;
  bar.className = isError ? 'flash error' : 'flash';
  if (message) setTimeout(() => (bar.textContent = ''), 4000);
}

function showLogin(visible: boolean): void {
  el('login-pane').style.display = visible ? '' : 'none';
  el('editor-pane').style.display = visible ? 'none' : '';
}

async function guard<T>(work: () => Promise<T>): Promise<T | undefined> {
  try {
    return await work();
  } catch (error) {
    if (error instanceof AuthRequiredError) {
      showLogin(true);
      flash('Session expired: sign in again. Your form state is kept.', true);
      return undefined;
    }
    if (error instanceof ApiError) {
      flash(error.field ? `${error.message} (field: ${error.field})` : error.message, true);
      return undefined;
    }
    throw error;
  }
}

async function refreshEntities(): Promise<void> {
  const [allCases, allSymptoms, allDiagnoses] = await Promise.all([
    admin.listCases(),
    admin.listSymptoms(),
    admin.listDiagnoses(),
  ]);
  cases = allCases;
  if (currentCase === null && cases.length > 0) currentCase = cases[0]!.id;
  symptoms = allSymptoms.filter((s) => s.case_id === currentCase);
  diagnoses = allDiagnoses.filter((d) => d.case_id === currentCase);
  form.refreshChoices(symptoms, diagnoses);
  renderCaseSelect();
  renderRuleForm();
  await refreshTreeAndValidation();
}

function renderCaseSelect(): void {
  const select = el<HTMLSelectElement>('case-select');
  select.innerHTML = '';
  for (const record of cases) {
    const option = document.createElement('option');
    option.value = record.id;
    option.textContent = `${record.name} (${record.id})`;
    option.selected = record.id === currentCase;
    select.append(option);
  }
}

function renderRuleForm(): void {
  const questionSelect = el<HTMLSelectElement>('rule-question');
  questionSelect.innerHTML = '';
  for (const s of symptoms) {
    const option = document.createElement('option');
    option.value = s.id;
    option.textContent = s.question_text;
    option.selected = s.id === form.question;
    questionSelect.append(option);
  }
  if (form.question === null && symptoms.length > 0) {
    form.question = symptoms[0]!.id;
    questionSelect.value = form.question;
  }

  const targetSelect = el<HTMLSelectElement>('rule-target');
  targetSelect.innerHTML = '';
  for (const option of form.targetOptions) {
    const node = document.createElement('option');
    node.value = option.id;
    node.textContent = option.label;
    node.selected = option.id === form.targetId;
    targetSelect.append(node);
  }
  if (form.targetId === null && form.targetOptions.length > 0) {
    form.setTarget(form.targetOptions[0]!.id);
    targetSelect.value = form.targetId!;
  }

  el<HTMLInputElement>('rule-label').value = form.answerLabel;
  el<HTMLInputElement>('rule-order').value = String(form.orderIndex);
  el<HTMLInputElement>('rule-id').value = form.ruleId;
  (el<HTMLInputElement>(`rule-first-${form.isFirstQuestion ? 'yes' : 'no'}`)).checked = true;
  (el<HTMLInputElement>(`rule-kind-${form.targetKind}`)).checked = true;
  el<HTMLButtonElement>('rule-submit').disabled = !form.canSubmit;
  el('rule-missing').textContent = form.canSubmit
    ? ''
    : `Missing: ${form.missingFields.join(', ')}`;
}

async function refreshTreeAndValidation(): Promise<void> {
  const treePane = el('tree-pane');
  const validationPane = el('validation-pane');
  if (!currentCase) {
    treePane.textContent = 'No case selected.';
    validationPane.textContent = '';
    return;
  }
  const [bundle, report] = await Promise.all([
    admin.exportBundle(currentCase),
    admin.validateCase(currentCase),
  ]);

  treePane.innerHTML = '';
  for (const line of buildOutline(bundle, currentCase, report)) {
    const row = document.createElement('div');
    row.className = `line ${line.kind}${line.leaf ? ' leaf' : ''}`;
    row.style.paddingLeft = `${line.depth * 1.2}rem`;
    row.textContent = (line.leaf ? '◆ ' : line.kind === 'question' ? '● ' : '') + line.text;
    for (const defect of line.defects) {
      const badge = document.createElement('span');
      badge.className = 'badge';
      badge.title = defect.message;
      badge.textContent = defect.kind;
      row.append(badge);
    }
    treePane.append(row);
  }

  validationPane.innerHTML = '';
  const entries = validationLines(report);
  if (entries.length === 0) {
    validationPane.textContent = 'No findings.';
  }
  for (const { severity, defect } of entries) {
    const row = document.createElement('div');
    row.className = `finding ${severity}`;
    row.textContent = `${severity.toUpperCase()} ${defect.kind} ${defect.location}: ${defect.message}`;
    validationPane.append(row);
  }
}

function renderPreview(): void {
  const pane = el('preview-pane');
  pane.innerHTML = '';
  const state = preview.current;
  if (!state) {
    pane.textContent = 'Press “Start preview” to walk the consultation.';
    return;
  }
  if (state.kind === 'blocked') {
    const heading = document.createElement('p');
    heading.textContent = 'Fix these before previewing:';
    pane.append(heading);
    for (const { severity, defect } of validationLines(state.report)) {
      if (severity !== 'error') continue;
      const row = document.createElement('div');
      row.className = 'finding error';
      row.textContent = `${defect.kind} ${defect.location}: ${defect.message}`;
      pane.append(row);
    }
    return;
  }
  if (state.kind === 'error') {
    pane.textContent = state.message;
    return;
  }
  if (state.kind === 'question') {
    const question = document.createElement('p');
    question.className = 'preview-question';
    question.textContent = `${state.page.stepNumber}. ${state.page.questionText}`;
    pane.append(question);
    for (const answer of state.page.answers) {
      const button = document.createElement('button');
      button.textContent = answer.label;
      button.addEventListener('click', () =>
        guard(async () => {
          await preview.answer(answer.ruleId);
          renderPreview();
        }),
      );
      pane.append(button);
    }
    return;
  }
  const conclusion = document.createElement('p');
  conclusion.className = 'preview-conclusion';
  conclusion.textContent = state.page.conclusionText;
  pane.append(conclusion);
  if (state.page.adviceText) {
    const advice = document.createElement('p');
    advice.textContent = state.page.adviceText;
    pane.append(advice);
  }
  const list = document.createElement('ol');
  for (const entry of state.page.transcript) {
    const item = document.createElement('li');
    item.textContent = `${entry.question}: ${entry.answer}`;
    list.append(item);
  }
  pane.append(list);
}

function wireEvents(): void {
  el<HTMLFormElement>('login-form').addEventListener('submit', (event) => {
    event.preventDefault();
    const username = el<HTMLInputElement>('login-user').value;
    const password = el<HTMLInputElement>('login-password').value;
    guard(async () => {
      try {
        await admin.login(username, password);
      } catch (error) {
        if (error instanceof AuthRequiredError) {
          flash('Wrong credentials.', true);
          return;
        }
        throw error;
      }
      showLogin(false);
      await refreshEntities();
    });
  });

  el<HTMLSelectElement>('case-select').addEventListener('change', (event) => {
    currentCase = (event.target as HTMLSelectElement).value;
    form = new RuleFormModel([], []);
    guard(refreshEntities);
  });

  el<HTMLFormElement>('case-form').addEventListener('submit', (event) => {
    event.preventDefault();
    const name = el<HTMLInputElement>('case-name').value.trim();
    const id = el<HTMLInputElement>('case-id').value.trim();
    if (!name) return;
    guard(async () => {
      const record: Record<string, unknown> = { name, description: '' };
      if (id) record.id = id;
      currentCase = await admin.saveEntity('cases', record);
      el<HTMLInputElement>('case-name').value = '';
      el<HTMLInputElement>('case-id').value = '';
      await refreshEntities();
    });
  });

  el<HTMLFormElement>('symptom-form').addEventListener('submit', (event) => {
    event.preventDefault();
    if (!currentCase) return;
    const text = el<HTMLInputElement>('symptom-text').value.trim();
    const id = el<HTMLInputElement>('symptom-id').value.trim();
    if (!text) return;
    guard(async () => {
      const record: Record<string, unknown> = {
        case_id: currentCase,
        question_text: text,
        description: '',
      };
      if (id) record.id = id;
      await admin.saveEntity('symptoms', record);
      el<HTMLInputElement>('symptom-text').value = '';
      el<HTMLInputElement>('symptom-id').value = '';
      await refreshEntities();
    });
  });

  el<HTMLFormElement>('diagnosis-form').addEventListener('submit', (event) => {
    event.preventDefault();
    if (!currentCase) return;
    const text = el<HTMLInputElement>('diagnosis-text').value.trim();
    const advice = el<HTMLInputElement>('diagnosis-advice').value.trim();
    const id = el<HTMLInputElement>('diagnosis-id').value.trim();
    if (!text) return;
    guard(async () => {
      const record: Record<string, unknown> = {
        case_id: currentCase,
        conclusion_text: text,
        advice_text: advice,
      };
      if (id) record.id = id;
      await admin.saveEntity('diagnoses', record);
      el<HTMLInputElement>('diagnosis-text').value = '';
      el<HTMLInputElement>('diagnosis-advice').value = '';
      el<HTMLInputElement>('diagnosis-id').value = '';
      await refreshEntities();
    });
  });

  el<HTMLSelectElement>('rule-question').addEventListener('change', (event) => {
    form.question = (event.target as HTMLSelectElement).value || null;
    renderRuleForm();
  });
  el<HTMLInputElement>('rule-label').addEventListener('input', (event) => {
    form.answerLabel = (event.target as HTMLInputElement).value;
    renderRuleForm();
  });
  for (const flag of ['yes', 'no'] as const) {
    el<HTMLInputElement>(`rule-first-${flag}`).addEventListener('change', () => {
      form.isFirstQuestion = flag === 'yes';
      renderRuleForm();
    });
  }
  for (const kind of ['decision', 'leaf'] as const) {
    el<HTMLInputElement>(`rule-kind-${kind}`).addEventListener('change', () => {
      form.setTargetKind(kind);
      renderRuleForm();
    });
  }
  el<HTMLSelectElement>('rule-target').addEventListener('change', (event) => {
    form.setTarget((event.target as HTMLSelectElement).value || null);
    renderRuleForm();
  });
  el<HTMLInputElement>('rule-order').addEventListener('input', (event) => {
    form.orderIndex = Number((event.target as HTMLInputElement).value);
    renderRuleForm();
  });
  el<HTMLInputElement>('rule-id').addEventListener('input', (event) => {
    form.ruleId = (event.target as HTMLInputElement).value;
  });

  el<HTMLFormElement>('rule-form').addEventListener('submit', (event) => {
    event.preventDefault();
    if (!currentCase || !form.canSubmit) return;
    guard(async () => {
      await admin.saveEntity('rules', form.toRecord(currentCase!) as Record<string, unknown>);
      flash('Rule saved.');
      form.answerLabel = '';
      form.ruleId = '';
      renderRuleForm();
      await refreshTreeAndValidation();
    });
  });

  el<HTMLButtonElement>('preview-start').addEventListener('click', () => {
    if (!currentCase) return;
    guard(async () => {
      await preview.start(currentCase!);
      renderPreview();
    });
  });
  el<HTMLButtonElement>('preview-back').addEventListener('click', () => {
    guard(async () => {
      await preview.back();
      renderPreview();
    });
  });
}

wireEvents();
showLogin(true);
renderPreview();
