import assert from 'node:assert/strict';
import { test } from 'node:test';
import { parseConsultPage, unescapeHtml } from '../src/pages.js';
// Verbatim server output for the fixture's first question page.
const QUESTION_PAGE = `<!DOCTYPE html>
<html lang="en">
<head>
<meta charset="utf-8">
<meta name="viewport" content="width=device-width, initial-scale=1">
<title>dengue-mini</title>
<style>
body { font-family: system-ui, sans-serif; }
</style>
</head>
<body>
<h1>dengue-mini</h1>
<p class="step">Step 1</p>
<form method="get" action="/consult/SID123/answer">
<fieldset>
<legend>Does the patient have fever for 2 or more days?</legend>
<ul class="answers">
<li><label><input type="radio" name="rule" value="r1" required> Yes</label></li>
<li><label><input type="radio" name="rule" value="r2" required> No</label></li>
</ul>
</fieldset>
<p><button type="submit">Continue</button></p>
</form>
</body>
</html>
`;
const CONCLUSION_PAGE = `<!DOCTYPE html>
<html lang="en">
<head>
<meta charset="utf-8">
<meta name="viewport" content="width=device-width, initial-scale=1">
<title>dengue-mini</title>
</head>
<body>
<h1>dengue-mini</h1>
<h2 class="conclusion">Severe dengue</h2>
<p class="advice">Emergency care immediately</p>
<h3>How you answered</h3>
<ol class="transcript">
<li>Does the patient have fever for 2 or more days?: Yes</li>
<li>Is there bleeding or a weak pulse?: Yes</li>
</ol>
<p><a href="/consult/c1/start">Start a new consultation</a></p>
</body>
</html>
`;
test('question page extraction', () => {
    const page = parseConsultPage(QUESTION_PAGE);
    assert.equal(page.kind, 'question');
    if (page.kind !== 'question')
        return;
    assert.equal(page.questionText, 'Does the patient have fever for 2 or more days?');
    assert.equal(page.stepNumber, 1);
    assert.deepEqual(page.answers, [
        { ruleId: 'r1', label: 'Yes' },
        { ruleId: 'r2', label: 'No' },
    ]);
    assert.equal(page.answerBase, '/consult/SID123/answer');
    assert.equal(page.sessionId, 'SID123');
});
test('conclusion page extraction', () => {
    const page = parseConsultPage(CONCLUSION_PAGE);
    assert.equal(page.kind, 'conclusion');
    if (page.kind !== 'conclusion')
        return;
    assert.equal(page.conclusionText, 'Severe dengue');
    assert.equal(page.adviceText, 'Emergency care immediately');
    assert.deepEqual(page.transcript, [
        { question: 'Does the patient have fever for 2 or more days?', answer: 'Yes' },
        { question: 'Is there bleeding or a weak pulse?', answer: 'Yes' },
    ]);
    assert.equal(page.restartPath, '/consult/c1/start');
});
test('conclusion without advice yields null advice', () => {
    const page = parseConsultPage(CONCLUSION_PAGE.replace(/<p class="advice">[^<]*<\/p>\n/, ''));
    assert.equal(page.kind, 'conclusion');
    if (page.kind !== 'conclusion')
        return;
    assert.equal(page.adviceText, null);
});
test('escaped entities are decoded', () => {
    const escaped = QUESTION_PAGE.replace('<legend>Does the patient have fever for 2 or more days?</legend>', '<legend>Fever &gt; 39 &amp; &quot;chills&quot;?</legend>');
    const page = parseConsultPage(escaped);
    assert.equal(page.kind, 'question');
    if (page.kind !== 'question')
        return;
    assert.equal(page.questionText, 'Fever > 39 & "chills"?');
});
test('unknown page falls back to a notice', () => {
    const page = parseConsultPage('<html><body><h1>Notice</h1><p>Unknown or expired session.</p></body></html>');
    assert.equal(page.kind, 'notice');
    if (page.kind !== 'notice')
        return;
    assert.match(page.message, /expired session/);
});
test('unescapeHtml covers the escaper alphabet', () => {
    assert.equal(unescapeHtml('&amp;&lt;&gt;&quot;&#x27;'), '&<>"\'');
});
