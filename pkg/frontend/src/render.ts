/**
 * Pure view helpers: no DOM access, so every function here is unit
 * testable.  Mirrors the core's minimap conventions (entity glyphs
 * override terrain, the player wins ties, out-of-world cells render as
 * spaces).
 */

import {
  ExplorerState,
  NPC_GLYPH,
  PLAYER,
  PLAYER_GLYPH,
} from "./bundle.js";

export function glyphForTag(state: ExplorerState, tag: string): string {
  for (const band of state.bundle.world.feature_table) {
    if (band.tag === tag) {
      return band.glyph;
    }
  }
  return "?";
}

function displayGlyph(state: ExplorerState, glyph: string): string {
  if (state.displayMode === "emoji") {
    return state.bundle.manifest.emoji[glyph] ?? glyph;
  }
  return glyph;
}

function entityOverlay(state: ExplorerState): Map<string, string> {
  const overlay = new Map<string, string>();
  for (const e of state.entities) {
    const key = `${e.x},${e.y}`;
    if (!overlay.has(key)) {
      overlay.set(key, e.kind === PLAYER ? PLAYER_GLYPH : NPC_GLYPH);
    }
  }
  return overlay;
}

/**
 * Rows of display cells for a (2*radius+1)-square viewport centered
 * on the player.  Each cell is one already-mapped glyph or emoji.
 */
export function viewportRows(state: ExplorerState, radius: number): string[][] {
  const overlay = entityOverlay(state);
  const { x: cx, y: cy } = state.player;
  const rows: string[][] = [];
  for (let y = cy - radius; y <= cy + radius; y++) {
    const row: string[] = [];
    for (let x = cx - radius; x <= cx + radius; x++) {
      if (x < 0 || x >= state.width || y < 0 || y >= state.height) {
        row.push(" ");
        continue;
      }
      const glyph = overlay.get(`${x},${y}`) ?? glyphForTag(state, state.tags[y][x]);
      row.push(displayGlyph(state, glyph));
    }
    rows.push(row);
  }
  return rows;
}

/** Legend entries for the HUD: one (display, tag) pair per band. */
export function legendEntries(state: ExplorerState): [string, string][] {
  return state.bundle.world.feature_table.map((band) => [
    displayGlyph(state, band.glyph),
    band.tag,
  ]);
}
