/**
 * Bundle document types, validation, and explorer state transitions.
 *
 * The bundle is produced by the core exporter; this module never
 * recomputes terrain, it only reads what the document says.  Room text
 * prefers archive entries and falls back to client-side grammar
 * expansion with the cell's 64-bit seed.
 */

import { Grammar, Storylet, expand, parseGrammar } from "./grammar.js";
import { MASK64 } from "./rng.js";

export const FORMAT_VERSION = 1;

export const PLAYER = "PLAYER";
export const PLAYER_GLYPH = "@";
export const NPC_GLYPH = "&";

export class BundleFormatError extends Error {
  constructor(message: string) {
    super(message);
    this.name = "BundleFormatError";
  }
}

export interface BandDoc {
  lo: number;
  hi: number;
  tag: string;
  glyph: string;
}

export interface EntityDoc {
  kind: string;
  x: number;
  y: number;
}

export interface WorldDoc {
  width: number;
  height: number;
  seed: number;
  noise_scale: number;
  feature_table: BandDoc[];
  values: number[];
  tags: string[];
  entities: EntityDoc[];
  room_seeds: string[];
  impassable: string[];
}

export interface ArchiveMemberDoc {
  text: string;
  tags: string[];
  novelty: number;
  generation: number;
}

export interface ArchiveDoc {
  rho: number;
  members: ArchiveMemberDoc[];
}

export interface GrammarPairDoc {
  title: Record<string, string[]>;
  description: Record<string, string[]>;
}

export interface BundleDoc {
  format_version: number;
  manifest: {
    format_version: number;
    seeds: { world: number };
    emoji: Record<string, string>;
  };
  world: WorldDoc;
  grammars: Record<string, GrammarPairDoc>;
  archives: Record<string, ArchiveDoc>;
}

export type Direction = "N" | "S" | "E" | "W";
export type DisplayMode = "glyph" | "emoji";

export interface ExplorerState {
  bundle: BundleDoc;
  width: number;
  height: number;
  /** tags[y][x], row-major as serialized. */
  tags: string[][];
  /** roomSeeds[y][x], parsed to BigInt from the decimal strings. */
  roomSeeds: bigint[][];
  impassable: Set<string>;
  entities: EntityDoc[];
  grammars: Map<string, { title: Grammar; description: Grammar }>;
  archives: Map<string, string[]>;
  player: { x: number; y: number };
  rerollCounters: Map<string, number>;
  displayMode: DisplayMode;
}

function need(cond: boolean, message: string): void {
  if (!cond) {
    throw new BundleFormatError(message);
  }
}

function toGrid<T>(flat: T[], width: number, height: number): T[][] {
  const rows: T[][] = [];
  for (let y = 0; y < height; y++) {
    rows.push(flat.slice(y * width, (y + 1) * width));
  }
  return rows;
}

/**
 * Validate a decoded bundle.json and build the initial explorer state.
 * Throws BundleFormatError with a user-readable message on anything
 * the explorer cannot safely render.
 */
export function initState(doc: BundleDoc): ExplorerState {
  need(doc !== null && typeof doc === "object", "bundle is not an object");
  need(
    doc.format_version === FORMAT_VERSION,
    `unsupported format_version ${doc.format_version} (expected ${FORMAT_VERSION})`,
  );
  const world = doc.world;
  need(world !== null && typeof world === "object", "bundle has no world");
  const { width, height } = world;
  need(
    Number.isInteger(width) && Number.isInteger(height) && width >= 1 && height >= 1,
    "world dimensions must be positive integers",
  );
  const cells = width * height;
  need(world.tags.length === cells, "world tags length mismatch");
  need(world.room_seeds.length === cells, "world room_seeds length mismatch");

  const players = world.entities.filter((e) => e.kind === PLAYER);
  need(players.length === 1, "world must contain exactly one player");
  const player = { x: players[0].x, y: players[0].y };
  for (const e of world.entities) {
    need(
      Number.isInteger(e.x) && Number.isInteger(e.y)
        && e.x >= 0 && e.x < width && e.y >= 0 && e.y < height,
      `entity ${e.kind} out of bounds`,
    );
  }

  const grammars = new Map<string, { title: Grammar; description: Grammar }>();
  for (const [tag, pair] of Object.entries(doc.grammars ?? {})) {
    grammars.set(tag, {
      title: parseGrammar(pair.title),
      description: parseGrammar(pair.description),
    });
  }
  for (const tag of new Set(world.tags)) {
    need(grammars.has(tag), `no grammar for tag ${tag}`);
  }

  const archives = new Map<string, string[]>();
  for (const [tag, arc] of Object.entries(doc.archives ?? {})) {
    const texts = (arc.members ?? []).map((m) => m.text);
    if (texts.length > 0) {
      archives.set(tag, texts);
    }
  }

  let roomSeeds: bigint[][];
  try {
    roomSeeds = toGrid(world.room_seeds.map(BigInt), width, height);
  } catch {
    throw new BundleFormatError("room_seeds must be decimal strings");
  }

  return {
    bundle: doc,
    width,
    height,
    tags: toGrid(world.tags, width, height),
    roomSeeds,
    impassable: new Set(world.impassable ?? []),
    entities: world.entities,
    grammars,
    archives,
    player,
    rerollCounters: new Map(),
    displayMode: "glyph",
  };
}

const DELTAS: Record<Direction, [number, number]> = {
  N: [0, -1],
  S: [0, 1],
  E: [1, 0],
  W: [-1, 0],
};

/**
 * Move the player one cell.  Out-of-bounds and impassable targets are
 * silent no-ops; returns whether the player actually moved so the UI
 * can flash a blocked-move cue.
 */
export function movePlayer(state: ExplorerState, dir: Direction): boolean {
  const [dx, dy] = DELTAS[dir];
  const nx = state.player.x + dx;
  const ny = state.player.y + dy;
  if (nx < 0 || nx >= state.width || ny < 0 || ny >= state.height) {
    return false;
  }
  if (state.impassable.has(state.tags[ny][nx])) {
    return false;
  }
  state.player.x = nx;
  state.player.y = ny;
  return true;
}

function counterKey(x: number, y: number): string {
  return `${x},${y}`;
}

export function rerollCount(state: ExplorerState, x: number, y: number): number {
  return state.rerollCounters.get(counterKey(x, y)) ?? 0;
}

/** Bump the cell's reroll counter; the next roomText call cycles on. */
export function reroll(state: ExplorerState, x: number, y: number): number {
  const next = rerollCount(state, x, y) + 1;
  state.rerollCounters.set(counterKey(x, y), next);
  return next;
}

export function toggleDisplayMode(state: ExplorerState): DisplayMode {
  state.displayMode = state.displayMode === "glyph" ? "emoji" : "glyph";
  return state.displayMode;
}

export interface RoomText {
  title: string;
  description: string;
  tag: string;
  fromArchive: boolean;
}

/**
 * Title and description for a cell.
 *
 * The effective seed is (room_seed + reroll_counter) mod 2^64.  When
 * the tag has a non-empty archive the description is the archive entry
 * at seed mod archive_size; otherwise it is a client-side expansion of
 * the tag's description grammar with that seed.  The title always
 * comes from the tag's title grammar with the same seed, so rerolling
 * retitles the room along with its text.
 */
export function roomText(state: ExplorerState, x: number, y: number): RoomText {
  if (x < 0 || x >= state.width || y < 0 || y >= state.height) {
    throw new RangeError(`cell (${x}, ${y}) out of bounds`);
  }
  const tag = state.tags[y][x];
  const pair = state.grammars.get(tag);
  if (pair === undefined) {
    throw new BundleFormatError(`no grammar for tag ${tag}`);
  }
  const seed = (state.roomSeeds[y][x] + BigInt(rerollCount(state, x, y))) & MASK64;
  const title = expand(pair.title, "origin", seed).text;

  const archive = state.archives.get(tag);
  if (archive !== undefined && archive.length > 0) {
    const index = Number(seed % BigInt(archive.length));
    return { title, description: archive[index], tag, fromArchive: true };
  }
  const storylet: Storylet = expand(pair.description, "origin", seed);
  return { title, description: storylet.text, tag, fromArchive: false };
}
