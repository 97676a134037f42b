import assert from 'node:assert/strict';
import { test } from 'node:test';

import { buildOutline, validationLines } from '../src/treePane.js';
import type { BundleDoc, ValidationReportDto } from '../src/types.js';

function feverBundle(): BundleDoc {
  return {
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
}

test('outline walks the tree root-first in display order', () => {
  const lines = buildOutline(feverBundle(), 'c1');
  assert.deepEqual(
    lines.map((l) => [l.depth, l.kind, l.entityId]),
    [
      [0, 'question', 's1'],
      [1, 'answer', 'r1'],
      [2, 'question', 's2'],
      [3, 'answer', 'r3'],
      [3, 'answer', 'r4'],
      [1, 'answer', 'r2'],
    ],
  );
  assert.equal(lines[0]!.text, 'Does the patient have fever for 2 or more days?');
  assert.match(lines[3]!.text, /Yes → Severe dengue/);
});

test('leaf answers carry the leaf badge', () => {
  const lines = buildOutline(feverBundle(), 'c1');
  const byId = new Map(lines.map((l) => [l.entityId, l]));
  assert.equal(byId.get('r1')!.leaf, false);
  assert.equal(byId.get('r2')!.leaf, true);
  assert.equal(byId.get('r3')!.leaf, true);
});

test('order_index decides sibling order even against storage order', () => {
  const bundle = feverBundle();
  bundle.rules.reverse();
  const lines = buildOutline(bundle, 'c1');
  const answersOfS1 = lines.filter((l) => l.kind === 'answer' && l.depth === 1);
  assert.deepEqual(answersOfS1.map((l) => l.entityId), ['r1', 'r2']);
});

test('defect markers land on the located entity', () => {
  const report: ValidationReportDto = {
    case_id: 'c1',
    errors: [{ kind: 'EMPTY_ANSWER_SET', location: 's2', message: 'question s2 has no answers' }],
    warnings: [{ kind: 'UNUSED_DIAGNOSIS', location: 'd2', message: 'd2 never concluded' }],
  };
  const bundle = feverBundle();
  bundle.rules = bundle.rules.filter((r) => r.question !== 's2');
  const lines = buildOutline(bundle, 'c1', report);
  const s2 = lines.find((l) => l.entityId === 's2');
  assert.ok(s2);
  assert.deepEqual(s2!.defects.map((d) => d.kind), ['EMPTY_ANSWER_SET']);
});

test('defect markers are a subset of the report', () => {
  const report: ValidationReportDto = {
    case_id: 'c1',
    errors: [{ kind: 'EMPTY_ANSWER_SET', location: 's2', message: 'm' }],
    warnings: [{ kind: 'UNUSED_DIAGNOSIS', location: 'd2', message: 'm' }],
  };
  const lines = buildOutline(feverBundle(), 'c1', report);
  const reported = new Set(
    [...report.errors, ...report.warnings].map((d) => `${d.kind}@${d.location}`),
  );
  for (const line of lines) {
    for (const defect of line.defects) {
      assert.ok(reported.has(`${defect.kind}@${defect.location}`));
    }
  }
});

test('a cycle in half-edited knowledge does not hang the outline', () => {
  const bundle = feverBundle();
  bundle.rules = bundle.rules.map((r) =>
    r.id === 'r3' ? { ...r, target: { kind: 'decision' as const, id: 's1' } } : r,
  );
  const lines = buildOutline(bundle, 'c1');
  assert.ok(lines.some((l) => l.kind === 'note' && l.text === '(shown above)'));
});

test('missing root produces a hint line', () => {
  const bundle = feverBundle();
  bundle.rules = bundle.rules.map((r) => ({ ...r, is_first_question: false }));
  const lines = buildOutline(bundle, 'c1');
  assert.match(lines[0]!.text, /No root question yet/);
  // the questions still show under the unreachable section
  assert.ok(lines.some((l) => l.entityId === 's1'));
});

test('validation pane lines are exactly the report entries in order', () => {
  const report: ValidationReportDto = {
    case_id: 'c1',
    errors: [
      { kind: 'NO_ROOT', location: 'c1', message: 'no first question' },
      { kind: 'CYCLE', location: 's1', message: 's1 -> s2 -> s1' },
    ],
    warnings: [{ kind: 'UNUSED_DIAGNOSIS', location: 'd2', message: 'unused' }],
  };
  const lines = validationLines(report);
  assert.deepEqual(
    lines.map((l) => [l.severity, l.defect.kind]),
    [
      ['error', 'NO_ROOT'],
      ['error', 'CYCLE'],
      ['warning', 'UNUSED_DIAGNOSIS'],
    ],
  );
  assert.deepEqual(
    lines.map((l) => l.defect),
    [...report.errors, ...report.warnings],
  );
});
