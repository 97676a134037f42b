/** Builds the case outline shown in the tree pane.
 *
 * The outline is computed from the exported bundle (the server's canonical
 * view), never from form state, and defect markers come verbatim from the
 * validation endpoint.
 */
export function buildOutline(bundle, caseId, report) {
    const symptoms = new Map(bundle.symptoms.filter((s) => s.case_id === caseId).map((s) => [s.id, s]));
    const diagnoses = new Map(bundle.diagnoses.filter((d) => d.case_id === caseId).map((d) => [d.id, d]));
    const byQuestion = new Map();
    for (const rule of bundle.rules) {
        if (rule.case_id !== caseId)
            continue;
        const siblings = byQuestion.get(rule.question) ?? [];
        siblings.push(rule);
        byQuestion.set(rule.question, siblings);
    }
    for (const siblings of byQuestion.values()) {
        siblings.sort((a, b) => a.order_index - b.order_index || a.id.localeCompare(b.id));
    }
    const defectsAt = new Map();
    for (const defect of [...(report?.errors ?? []), ...(report?.warnings ?? [])]) {
        const list = defectsAt.get(defect.location) ?? [];
        list.push(defect);
        defectsAt.set(defect.location, list);
    }
    const markers = (id) => defectsAt.get(id) ?? [];
    const lines = [];
    const visited = new Set();
    const walkQuestion = (questionId, depth) => {
        const symptom = symptoms.get(questionId);
        const text = symptom ? symptom.question_text : `(unknown question ${questionId})`;
        lines.push({
            depth,
            kind: 'question',
            text,
            entityId: questionId,
            leaf: false,
            defects: markers(questionId),
        });
        if (visited.has(questionId)) {
            lines.push({
                depth: depth + 1,
                kind: 'note',
                text: '(shown above)',
                entityId: questionId,
                leaf: false,
                defects: [],
            });
            return;
        }
        visited.add(questionId);
        for (const rule of byQuestion.get(questionId) ?? []) {
            if (rule.target.kind === 'leaf') {
                const diagnosis = diagnoses.get(rule.target.id);
                const conclusion = diagnosis ? diagnosis.conclusion_text : `(unknown diagnosis ${rule.target.id})`;
                lines.push({
                    depth: depth + 1,
                    kind: 'answer',
                    text: `${rule.answer_label} → ${conclusion}`,
                    entityId: rule.id,
                    leaf: true,
                    defects: [...markers(rule.id), ...markers(rule.target.id)],
                });
            }
            else {
                lines.push({
                    depth: depth + 1,
                    kind: 'answer',
                    text: `${rule.answer_label} →`,
                    entityId: rule.id,
                    leaf: false,
                    defects: markers(rule.id),
                });
                walkQuestion(rule.target.id, depth + 2);
            }
        }
    };
    const rootRules = [...byQuestion.values()].flat().filter((r) => r.is_first_question);
    const rootQuestions = [...new Set(rootRules.map((r) => r.question))].sort();
    if (rootQuestions.length === 0) {
        lines.push({
            depth: 0,
            kind: 'note',
            text: 'No root question yet: flag the first question’s answers.',
            entityId: caseId,
            leaf: false,
            defects: markers(caseId),
        });
    }
    for (const root of rootQuestions) {
        walkQuestion(root, 0);
    }
    const leftOver = [...byQuestion.keys()]
        .filter((q) => !visited.has(q))
        .sort();
    const orphanQuestions = [...symptoms.keys()].filter((q) => !visited.has(q) && !byQuestion.has(q));
    if (leftOver.length || orphanQuestions.length) {
        lines.push({
            depth: 0,
            kind: 'note',
            text: 'Not reachable from the root:',
            entityId: caseId,
            leaf: false,
            defects: [],
        });
        for (const question of [...leftOver, ...orphanQuestions.sort()]) {
            walkQuestion(question, 1);
        }
    }
    return lines;
}
/** Flat list for the validation pane: exactly the report's entries, in order. */
export function validationLines(report) {
    return [
        ...report.errors.map((defect) => ({ severity: 'error', defect })),
        ...report.warnings.map((defect) => ({ severity: 'warning', defect })),
    ];
}
