/** State of the rule entry form, kept framework-free so it is testable.
 *
 * The form mirrors the server's rule record: question picked from the
 * case's question list, answer label, the Is First Question choice,
 * decision/leaf answer type with a target picked from questions or
 * conclusions accordingly, and a display order. The advanced id field lets
 * an engineer supply explicit ids (imports and fixtures round-trip
 * byte-identically that way).
 */

import type { DiagnosisRecord, RuleRecord, SymptomRecord, TargetKind } from './types.js';

export interface TargetOption {
  id: string;
  label: string;
}

export class RuleFormModel {
  question: string | null = null;
  answerLabel = '';
  isFirstQuestion = false;
  orderIndex = 0;
  ruleId = '';

  private kind: TargetKind = 'decision';
  private _targetId: string | null = null;

  constructor(
    private symptoms: SymptomRecord[],
    private diagnoses: DiagnosisRecord[],
  ) {}

  refreshChoices(symptoms: SymptomRecord[], diagnoses: DiagnosisRecord[]): void {
    this.symptoms = symptoms;
    this.diagnoses = diagnoses;
    if (this._targetId !== null && !this.targetOptions.some((o) => o.id === this._targetId)) {
      this._targetId = null;
    }
  }

  get targetKind(): TargetKind {
    return this.kind;
  }

  /** Switching the answer type swaps the selector contents and clears the pick. */
  setTargetKind(kind: TargetKind): void {
    if (kind !== this.kind) {
      this.kind = kind;
      this._targetId = null;
    }
  }

  get targetOptions(): TargetOption[] {
    if (this.kind === 'decision') {
      return this.symptoms.map((s) => ({ id: s.id, label: s.question_text }));
    }
    return this.diagnoses.map((d) => ({ id: d.id, label: d.conclusion_text }));
  }

  get targetId(): string | null {
    return this._targetId;
  }

  setTarget(id: string | null): void {
    if (id === null) {
      this._targetId = null;
      return;
    }
    if (!this.targetOptions.some((o) => o.id === id)) {
      throw new Error(`target ${id} is not among the current ${this.kind} options`);
    }
    this._targetId = id;
  }

  get missingFields(): string[] {
    const missing: string[] = [];
    if (!this.question) missing.push('question');
    if (!this.answerLabel.trim()) missing.push('answer_label');
    if (this._targetId === null) missing.push('target');
    if (!Number.isInteger(this.orderIndex) || this.orderIndex < 0) missing.push('order_index');
    return missing;
  }

  get canSubmit(): boolean {
    return this.missingFields.length === 0;
  }

  /** The record to save; id empty means "let the server mint one". */
  toRecord(caseId: string): Omit<RuleRecord, 'id'> & { id?: string } {
    if (!this.canSubmit) {
      throw new Error(`form incomplete: missing ${this.missingFields.join(', ')}`);
    }
    const record: Omit<RuleRecord, 'id'> & { id?: string } = {
      case_id: caseId,
      question: this.question!,
      is_first_question: this.isFirstQuestion,
      answer_label: this.answerLabel.trim(),
      target: { kind: this.kind, id: this._targetId! },
      order_index: this.orderIndex,
    };
    const explicit = this.ruleId.trim();
    if (explicit) record.id = explicit;
    return record;
  }

  reset(): void {
    this.question = null;
    this.answerLabel = '';
    this.isFirstQuestion = false;
    this.kind = 'decision';
    this._targetId = null;
    this.orderIndex = 0;
    this.ruleId = '';
  }
}
