/**
 * Tracery-style grammar mirror of the Python engine.
 *
 * Only the pieces the explorer needs are ported: parsing a rule
 * document and seeded expansion.  Semantics must match the core
 * exactly (one PRNG draw per choice point, bindings expand once and
 * freeze, modifiers apply leftmost first) because the parity fixture
 * compares output byte for byte.
 */

import { SplitMix64 } from "./rng.js";

export const DEFAULT_MAX_DEPTH = 32;

export const MODIFIERS = ["a", "capitalize", "s", "ed"] as const;
export type Modifier = (typeof MODIFIERS)[number];

const VOWELS = "aeiou";

const TAG_SUFFIX_RE = /@([A-Z][A-Z0-9_]*(?:,[A-Z][A-Z0-9_]*)*)$/;
const BINDING_RE = /\[([^\[\]:#\s]+):#([^#\]]+)#\]/y;

export class GrammarError extends Error {
  constructor(message: string) {
    super(message);
    this.name = new.target.name;
  }
}

export class ParseError extends GrammarError {}
export class DanglingSymbolError extends GrammarError {
  names: string[];
  constructor(names: string[]) {
    super("dangling symbol reference(s): " + [...names].sort().join(", "));
    this.names = [...names];
  }
}
export class EmptyInputError extends GrammarError {}
export class DepthExceededError extends GrammarError {}

export interface SymbolRef {
  kind: "ref";
  name: string;
  modifiers: Modifier[];
}

export interface Binding {
  kind: "bind";
  name: string;
  ref: SymbolRef;
}

export type Part = string | SymbolRef | Binding;

export interface Alternative {
  parts: Part[];
  tags: string[];
}

export interface Grammar {
  rules: Map<string, Alternative[]>;
  startSymbol: string;
}

export interface Storylet {
  text: string;
  tags: string[];
  derivationChoices: [string, number][];
}

export function applyModifier(text: string, modifier: string): string {
  if (!text) {
    throw new EmptyInputError(`cannot apply modifier '${modifier}' to empty text`);
  }
  if (modifier === "a") {
    const article = VOWELS.includes(text[0].toLowerCase()) ? "an " : "a ";
    return article + text;
  }
  if (modifier === "capitalize") {
    return text[0].toUpperCase() + text.slice(1);
  }
  if (modifier === "s") {
    if (text.length >= 2 && text.endsWith("y")
        && !VOWELS.includes(text[text.length - 2].toLowerCase())) {
      return text.slice(0, -1) + "ies";
    }
    if (/(s|x|z|ch|sh)$/.test(text)) {
      return text + "es";
    }
    return text + "s";
  }
  if (modifier === "ed") {
    if (text.endsWith("e")) {
      return text + "d";
    }
    if (text.length >= 2 && text.endsWith("y")
        && !VOWELS.includes(text[text.length - 2].toLowerCase())) {
      return text.slice(0, -1) + "ied";
    }
    return text + "ed";
  }
  throw new GrammarError(`unknown modifier '${modifier}'`);
}

function applyChain(text: string, modifiers: Modifier[]): string {
  for (const m of modifiers) {
    text = applyModifier(text, m);
  }
  return text;
}

function parseRef(body: string, position: number): SymbolRef {
  const [head, ...mods] = body.split(".");
  if (!head) {
    throw new ParseError(`empty symbol name in reference at position ${position}`);
  }
  if (head.includes("#") || /\s/.test(head)) {
    throw new ParseError(`bad symbol name '${head}' at position ${position}`);
  }
  for (const m of mods) {
    if (!(MODIFIERS as readonly string[]).includes(m)) {
      throw new ParseError(`unknown modifier '${m}' at position ${position}`);
    }
  }
  return { kind: "ref", name: head, modifiers: mods as Modifier[] };
}

export function parseAlternative(text: string): Alternative {
  let tags: string[] = [];
  const tagMatch = TAG_SUFFIX_RE.exec(text);
  if (tagMatch) {
    tags = tagMatch[1].split(",");
    text = text.slice(0, tagMatch.index);
  }

  const parts: Part[] = [];
  let literal = "";
  let i = 0;
  while (i < text.length) {
    const ch = text[i];
    if (ch === "#") {
      const end = text.indexOf("#", i + 1);
      if (end < 0) {
        throw new ParseError(`unterminated '#' reference at position ${i}`);
      }
      if (literal) {
        parts.push(literal);
        literal = "";
      }
      parts.push(parseRef(text.slice(i + 1, end), i));
      i = end + 1;
    } else if (ch === "[") {
      BINDING_RE.lastIndex = i;
      const bm = BINDING_RE.exec(text);
      if (bm === null) {
        literal += ch;
        i += 1;
        continue;
      }
      if (literal) {
        parts.push(literal);
        literal = "";
      }
      parts.push({ kind: "bind", name: bm[1], ref: parseRef(bm[2], i) });
      i = BINDING_RE.lastIndex;
    } else {
      literal += ch;
      i += 1;
    }
  }
  if (literal) {
    parts.push(literal);
  }
  return { parts, tags };
}

/** Parse a rule document (already JSON-decoded) into a Grammar. */
export function parseGrammar(
  doc: Record<string, string[]>,
  startSymbol = "origin",
): Grammar {
  if (doc === null || typeof doc !== "object" || Array.isArray(doc)) {
    throw new ParseError("grammar document must be a JSON object of rules");
  }
  const rules = new Map<string, Alternative[]>();
  for (const [name, alts] of Object.entries(doc)) {
    if (!name || name.includes("#") || name.includes(".") || /\s/.test(name)) {
      throw new ParseError(`bad rule name '${name}'`);
    }
    if (!Array.isArray(alts) || alts.length === 0) {
      throw new ParseError(`rule '${name}' must map to a non-empty array`);
    }
    const parsed: Alternative[] = [];
    for (const alt of alts) {
      if (typeof alt !== "string") {
        throw new ParseError(`rule '${name}' has a non-string alternative`);
      }
      parsed.push(parseAlternative(alt));
    }
    rules.set(name, parsed);
  }
  const grammar: Grammar = { rules, startSymbol };
  const dangling = findDangling(grammar);
  if (dangling.length > 0) {
    throw new DanglingSymbolError(dangling);
  }
  return grammar;
}

export function findDangling(grammar: Grammar): string[] {
  const known = new Set(grammar.rules.keys());
  for (const alts of grammar.rules.values()) {
    for (const alt of alts) {
      for (const part of alt.parts) {
        if (typeof part !== "string" && part.kind === "bind") {
          known.add(part.name);
        }
      }
    }
  }
  const missing = new Set<string>();
  for (const alts of grammar.rules.values()) {
    for (const alt of alts) {
      for (const part of alt.parts) {
        if (typeof part === "string") continue;
        const name = part.kind === "ref" ? part.name : part.ref.name;
        if (!known.has(name)) missing.add(name);
      }
    }
  }
  return [...missing].sort();
}

function derive(
  grammar: Grammar,
  symbol: string,
  choose: (symbol: string, n: number) => number,
  maxDepth: number,
): Storylet {
  const bindings = new Map<string, string>();
  const choices: [string, number][] = [];
  const tags = new Set<string>();

  function walk(name: string, depth: number): string {
    const bound = bindings.get(name);
    if (bound !== undefined) {
      return bound;
    }
    const alts = grammar.rules.get(name);
    if (alts === undefined) {
      throw new DanglingSymbolError([name]);
    }
    if (depth > maxDepth) {
      throw new DepthExceededError(
        `derivation depth exceeded ${maxDepth} at symbol '${name}'`,
      );
    }
    const idx = choose(name, alts.length);
    choices.push([name, idx]);
    const alt = alts[idx];
    for (const t of alt.tags) tags.add(t);
    const out: string[] = [];
    for (const part of alt.parts) {
      if (typeof part === "string") {
        out.push(part);
      } else if (part.kind === "ref") {
        out.push(applyChain(walk(part.name, depth + 1), part.modifiers));
      } else {
        const text = applyChain(walk(part.ref.name, depth + 1), part.ref.modifiers);
        bindings.set(part.name, text);
      }
    }
    return out.join("");
  }

  const text = walk(symbol, 1);
  return { text, tags: [...tags].sort(), derivationChoices: choices };
}

/**
 * Expand `symbol` with seeded-random alternative choices.  Equal
 * (grammar, symbol, seed) triples reproduce the Python core's output
 * exactly.
 */
export function expand(
  grammar: Grammar,
  symbol: string,
  seed: bigint,
  maxDepth = DEFAULT_MAX_DEPTH,
): Storylet {
  if (!grammar.rules.has(symbol)) {
    throw new DanglingSymbolError([symbol]);
  }
  const rng = new SplitMix64(seed);
  return derive(grammar, symbol, (_s, n) => rng.below(n), maxDepth);
}
