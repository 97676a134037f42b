/** Extracts structured facts from served consultation HTML pages.
 *
 * The preview pane never re-implements graph logic: it shows exactly what
 * the server rendered, lifted out of the page markup.
 */

export interface AnswerOption {
  ruleId: string;
  label: string;
}

export interface QuestionPage {
  kind: 'question';
  questionText: string;
  stepNumber: number;
  answers: AnswerOption[];
  /** Base of the answer URLs: `${answerBase}/${ruleId}` submits an answer. */
  answerBase: string;
  sessionId: string;
}

export interface TranscriptEntry {
  question: string;
  answer: string;
}

export interface ConclusionPage {
  kind: 'conclusion';
  conclusionText: string;
  adviceText: string | null;
  transcript: TranscriptEntry[];
  restartPath: string;
}

export interface NoticePage {
  kind: 'notice';
  message: string;
}

export type ConsultPage = QuestionPage | ConclusionPage | NoticePage;

const ENTITIES: Record<string, string> = {
  '&amp;': '&',
  '&lt;': '<',
  '&gt;': '>',
  '&quot;': '"',
  '&#x27;': "'",
  '&#39;': "'",
};

export function unescapeHtml(text: string): string {
  return text.replace(/&(?:amp|lt|gt|quot|#x27|#39);/g, (m) => ENTITIES[m] ?? m);
}

function firstMatch(html: string, pattern: RegExp): string | null {
  const match = pattern.exec(html);
  return match ? match[1]! : null;
}

export function parseConsultPage(html: string): ConsultPage {
  const legend = firstMatch(html, /<legend>([\s\S]*?)<\/legend>/);
  if (legend !== null) {
    const action = firstMatch(html, /<form method="get" action="([^"]*)">/) ?? '';
    const answers: AnswerOption[] = [];
    const radio = /<input type="radio" name="rule" value="([^"]*)" required> ([\s\S]*?)<\/label>/g;
    let match: RegExpExecArray | null;
    while ((match = radio.exec(html)) !== null) {
      answers.push({ ruleId: unescapeHtml(match[1]!), label: unescapeHtml(match[2]!) });
    }
    const step = firstMatch(html, /Step (\d+)</);
    const sessionId = action.split('/')[2] ?? '';
    return {
      kind: 'question',
      questionText: unescapeHtml(legend),
      stepNumber: step ? Number(step) : 1,
      answers,
      answerBase: unescapeHtml(action),
      sessionId,
    };
  }

  const conclusion = firstMatch(html, /<h2 class="conclusion">([\s\S]*?)<\/h2>/);
  if (conclusion !== null) {
    const advice = firstMatch(html, /<p class="advice">([\s\S]*?)<\/p>/);
    const transcript: TranscriptEntry[] = [];
    const item = /<li>([\s\S]*?)<\/li>/g;
    let match: RegExpExecArray | null;
    while ((match = item.exec(html)) !== null) {
      const line = unescapeHtml(match[1]!);
      const split = line.lastIndexOf(': ');
      if (split >= 0) {
        transcript.push({ question: line.slice(0, split), answer: line.slice(split + 2) });
      } else {
        transcript.push({ question: line, answer: '' });
      }
    }
    const restart = firstMatch(html, /<a href="([^"]*)">Start a new consultation<\/a>/) ?? '';
    return {
      kind: 'conclusion',
      conclusionText: unescapeHtml(conclusion),
      adviceText: advice === null ? null : unescapeHtml(advice),
      transcript,
      restartPath: unescapeHtml(restart),
    };
  }

  const notice = firstMatch(html, /<p>([\s\S]*?)<\/p>/);
  return { kind: 'notice', message: notice ? unescapeHtml(notice) : 'Unexpected page' };
}
