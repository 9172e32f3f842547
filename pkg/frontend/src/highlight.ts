/** Minimal client-side Java syntax highlighting.
 *
 * Purely presentational: output is a sequence of classed <span>s; nothing
 * here ever enters a judgment payload.
 */

const KEYWORDS = new Set([
  "abstract", "assert", "boolean", "break", "byte", "case", "catch", "char",
  "class", "const", "continue", "default", "do", "double", "else", "enum",
  "extends", "final", "finally", "float", "for", "goto", "if", "implements",
  "import", "instanceof", "int", "interface", "long", "native", "new",
  "package", "private", "protected", "public", "return", "short", "static",
  "strictfp", "super", "switch", "synchronized", "this", "throw", "throws",
  "transient", "try", "void", "volatile", "while", "var", "record", "yield",
  "true", "false", "null",
]);

const TOKEN_RE =
  /(\/\/[^\n]*|\/\*[\s\S]*?\*\/)|("(?:[^"\\\n]|\\.)*"|'(?:[^'\\\n]|\\.)*')|(\b\d[\w.]*\b)|(\b[A-Za-z_$][\w$]*\b)|([\s\S])/g;

function escapeHtml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

/** Render Java source to HTML with token-class spans. */
export function highlightJava(source: string): string {
  let out = "";
  for (const m of source.matchAll(TOKEN_RE)) {
    const [, comment, str, num, word, other] = m;
    if (comment !== undefined) {
      out += `<span class="tok-comment">${escapeHtml(comment)}</span>`;
    } else if (str !== undefined) {
      out += `<span class="tok-string">${escapeHtml(str)}</span>`;
    } else if (num !== undefined) {
      out += `<span class="tok-number">${escapeHtml(num)}</span>`;
    } else if (word !== undefined) {
      const cls = KEYWORDS.has(word) ? "tok-keyword" : "tok-ident";
      out += `<span class="${cls}">${escapeHtml(word)}</span>`;
    } else if (other !== undefined) {
      out += escapeHtml(other);
    }
  }
  return out;
}
