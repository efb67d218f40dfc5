/**
 * DOM wiring for the explorer page.  All game logic lives in the
 * imported modules; this file only moves data between them and the
 * page, so it stays untested by design.
 */
import { BundleFormatError, initState, movePlayer, reroll, roomText, toggleDisplayMode, } from "./bundle.js";
import { legendEntries, viewportRows } from "./render.js";
const VIEW_RADIUS = 5;
const BUNDLE_LOCATION = "bundle.json";
const KEY_DIRS = {
    ArrowUp: "N",
    ArrowDown: "S",
    ArrowRight: "E",
    ArrowLeft: "W",
    w: "N",
    s: "S",
    d: "E",
    a: "W",
    W: "N",
    S: "S",
    D: "E",
    A: "W",
};
function el(id) {
    const node = document.getElementById(id);
    if (node === null) {
        throw new Error(`missing page element #${id}`);
    }
    return node;
}
function showError(message) {
    const panel = el("error-panel");
    panel.textContent = message;
    panel.hidden = false;
    el("explorer").hidden = true;
}
function render(state) {
    const rows = viewportRows(state, VIEW_RADIUS);
    el("map").textContent = rows.map((r) => r.join("")).join("\n");
    const { x, y } = state.player;
    const room = roomText(state, x, y);
    el("room-title").textContent = room.title;
    el("room-desc").textContent = room.description;
    el("room-meta").textContent =
        `(${x}, ${y}) ${room.tag}` + (room.fromArchive ? " · archived" : "");
    el("legend").textContent = legendEntries(state)
        .map(([glyph, tag]) => `${glyph} ${tag}`)
        .join("   ");
    el("mode-toggle").textContent =
        state.displayMode === "glyph" ? "emoji view" : "glyph view";
}
function flashBlocked() {
    const map = el("map");
    map.classList.remove("blocked");
    // Force a reflow so quick repeats restart the animation.
    void map.offsetWidth;
    map.classList.add("blocked");
}
function wire(state) {
    document.addEventListener("keydown", (event) => {
        const dir = KEY_DIRS[event.key];
        if (dir !== undefined) {
            event.preventDefault();
            if (!movePlayer(state, dir)) {
                flashBlocked();
            }
            render(state);
        }
        else if (event.key === "r" || event.key === "R") {
            reroll(state, state.player.x, state.player.y);
            render(state);
        }
    });
    el("reroll").addEventListener("click", () => {
        reroll(state, state.player.x, state.player.y);
        render(state);
    });
    el("mode-toggle").addEventListener("click", () => {
        toggleDisplayMode(state);
        render(state);
    });
    render(state);
}
async function boot() {
    let doc;
    try {
        const response = await fetch(BUNDLE_LOCATION);
        if (!response.ok) {
            showError(`could not load ${BUNDLE_LOCATION} (HTTP ${response.status}); ` +
                "serve this directory over http and reload");
            return;
        }
        doc = (await response.json());
    }
    catch (err) {
        showError(`could not load ${BUNDLE_LOCATION}: ${String(err)}`);
        return;
    }
    try {
        wire(initState(doc));
    }
    catch (err) {
        if (err instanceof BundleFormatError) {
            showError(`invalid bundle: ${err.message}`);
            return;
        }
        throw err;
    }
}
boot();
