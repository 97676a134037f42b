/** DTOs mirroring the server's bundle records and admin responses. */

export interface CaseRecord {
  id: string;
  name: string;
  description: string;
}

export interface SymptomRecord {
  id: string;
  case_id: string;
  question_text: string;
  description: string;
}

export interface DiagnosisRecord {
  id: string;
  case_id: string;
  conclusion_text: string;
  advice_text: string;
}

export type TargetKind = 'decision' | 'leaf';

export interface AnswerTargetRecord {
  kind: TargetKind;
  id: string;
}

export interface RuleRecord {
  id: string;
  case_id: string;
  question: string;
  is_first_question: boolean;
  answer_label: string;
  target: AnswerTargetRecord;
  order_index: number;
}

export interface BundleDoc {
  format_version: number;
  cases: CaseRecord[];
  symptoms: SymptomRecord[];
  diagnoses: DiagnosisRecord[];
  rules: RuleRecord[];
}

export interface DefectDto {
  kind: string;
  location: string;
  message: string;
}

export interface ValidationReportDto {
  case_id: string;
  errors: DefectDto[];
  warnings: DefectDto[];
}

export interface ImportReportDto {
  cases: number;
  symptoms: number;
  diagnoses: number;
  rules: number;
  version: number;
}

export type EntityKindPlural = 'cases' | 'symptoms' | 'diagnoses' | 'rules';
