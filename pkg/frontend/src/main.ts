/** Browser entry point. Wires the socket, keyboard, and canvas together.
 *
 * All state lives in the view model; this file only forwards events and
 * repaints. Not imported by tests.
 */

import { messageForKey, TICK } from "./controls.js";
import type { Connection } from "./net.js";
import { connect } from "./net.js";
import type { ClientMessage } from "./protocol.js";
import { MODES } from "./protocol.js";
import type { Primitive } from "./render.js";
import { buildScene } from "./render.js";
import type { ViewModel } from "./viewmodel.js";
import { applyMessage, emptyView } from "./viewmodel.js";

const PLANE_FILL: Record<string, string> = {
  floor: "#e9e5db",
  table: "#d8c9a6",
  wall: "#a3a3a3",
};

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (node === null) {
    throw new Error(`missing #${id}`);
  }
  return node as T;
}

const canvas = el<HTMLCanvasElement>("scene");
const ctx = canvas.getContext("2d");
if (ctx === null) {
  throw new Error("canvas 2d context unavailable");
}
const feedList = el<HTMLUListElement>("feed");
const promptBox = el<HTMLDivElement>("prompt");
const statusLine = el<HTMLDivElement>("status");
const banner = el<HTMLDivElement>("banner");
const modePicker = el<HTMLSelectElement>("mode");
const catalogPicker = el<HTMLSelectElement>("catalog");
const targetPicker = el<HTMLSelectElement>("target");

for (const mode of MODES) {
  const option = document.createElement("option");
  option.value = mode;
  option.textContent = mode;
  modePicker.appendChild(option);
}

let vm: ViewModel = emptyView();
let conn: Connection | null = null;
let lastHapticShown = -1;

function send(msg: ClientMessage | null): void {
  if (msg !== null && conn !== null) {
    conn.send(msg);
  }
}

function paintPoly(poly: [number, number][]): void {
  if (ctx === null || poly.length === 0) {
    return;
  }
  ctx.beginPath();
  ctx.moveTo(poly[0]![0], poly[0]![1]);
  for (const [x, y] of poly.slice(1)) {
    ctx.lineTo(x, y);
  }
  ctx.closePath();
}

function paint(primitives: Primitive[]): void {
  if (ctx === null) {
    return;
  }
  ctx.clearRect(0, 0, canvas.width, canvas.height);
  ctx.fillStyle = "#f6f4ef";
  ctx.fillRect(0, 0, canvas.width, canvas.height);
  for (const prim of primitives) {
    switch (prim.kind) {
      case "plane":
        paintPoly(prim.poly);
        ctx.fillStyle = PLANE_FILL[prim.planeKind] ?? "#cccccc";
        ctx.fill();
        ctx.strokeStyle = "#6b6b6b";
        ctx.lineWidth = 1;
        ctx.stroke();
        break;
      case "cell":
        paintPoly(prim.poly);
        ctx.fillStyle = "rgba(84, 156, 219, 0.35)";
        ctx.fill();
        break;
      case "object":
        paintPoly(prim.poly);
        ctx.fillStyle = "#8a6642";
        ctx.fill();
        ctx.strokeStyle = prim.selected ? "#e0a400" : "#4c3a28";
        ctx.lineWidth = prim.selected ? 3 : 1;
        ctx.stroke();
        break;
      case "proposed":
        ctx.beginPath();
        ctx.arc(prim.x, prim.y, 7, 0, 2 * Math.PI);
        ctx.fillStyle = prim.fits === false ? "rgba(200, 60, 60, 0.8)" : "rgba(60, 170, 90, 0.8)";
        ctx.fill();
        break;
      case "cone":
        paintPoly(prim.poly);
        ctx.fillStyle = "rgba(250, 220, 110, 0.3)";
        ctx.fill();
        break;
      case "user":
        ctx.beginPath();
        ctx.arc(prim.x, prim.y, prim.r, 0, 2 * Math.PI);
        ctx.fillStyle = "#2b63c4";
        ctx.fill();
        ctx.beginPath();
        ctx.moveTo(prim.x, prim.y);
        ctx.lineTo(prim.tipX, prim.tipY);
        ctx.strokeStyle = "#17365f";
        ctx.lineWidth = 2;
        ctx.stroke();
        break;
    }
  }
}

function refillPicker(picker: HTMLSelectElement, values: string[]): void {
  const current = picker.value;
  const want = values.join("\n");
  if (picker.dataset["values"] === want) {
    return;
  }
  picker.dataset["values"] = want;
  picker.replaceChildren();
  for (const value of values) {
    const option = document.createElement("option");
    option.value = value;
    option.textContent = value;
    picker.appendChild(option);
  }
  if (values.includes(current)) {
    picker.value = current;
  }
}

function redraw(): void {
  paint(buildScene(vm, canvas.width, canvas.height));

  feedList.replaceChildren();
  for (const entry of vm.feed.slice(0, 12)) {
    const item = document.createElement("li");
    item.textContent = `[${entry.at.toFixed(1)}s] ${entry.text}`;
    feedList.appendChild(item);
  }
  if (vm.hapticAt !== null && vm.hapticAt !== lastHapticShown) {
    lastHapticShown = vm.hapticAt;
    canvas.classList.add("buzz");
    setTimeout(() => canvas.classList.remove("buzz"), 250);
  }

  promptBox.replaceChildren();
  if (vm.prompt !== null) {
    const question = document.createElement("p");
    question.textContent = vm.prompt.question ?? "";
    promptBox.appendChild(question);
    for (const choice of vm.prompt.options) {
      const button = document.createElement("button");
      button.textContent = choice;
      button.addEventListener("click", () => send({ type: "answer_prompt", choice }));
      promptBox.appendChild(button);
    }
  }

  if (vm.digest !== null) {
    const d = vm.digest;
    statusLine.textContent =
      `${d.mode} | t=${d.clock.toFixed(1)}s | ` +
      `scan ${d.scan.surface_count} surfaces ${d.scan.total_area_m2.toFixed(1)} m2` +
      `${d.frozen ? " | FROZEN" : ""}${vm.lastError !== null ? ` | error: ${vm.lastError}` : ""}`;
    if (modePicker.value !== d.mode) {
      modePicker.value = d.mode;
    }
    refillPicker(catalogPicker, d.catalog);
    refillPicker(
      targetPicker,
      d.world.objects.map((o) => o.name),
    );
  }
}

modePicker.addEventListener("change", () => send({ type: "set_mode", mode: modePicker.value }));
el<HTMLButtonElement>("pick-catalog").addEventListener("click", () =>
  send({ type: "select_catalog_item", name: catalogPicker.value }),
);
el<HTMLButtonElement>("pick-target").addEventListener("click", () =>
  send({ type: "select_search_target", name: targetPicker.value }),
);

window.addEventListener("keydown", (event) => {
  if (event.target instanceof HTMLSelectElement || event.target instanceof HTMLButtonElement) {
    return;
  }
  const msg = messageForKey(event.key, vm.digest);
  if (msg !== null) {
    event.preventDefault();
    send(msg);
  }
});

const params = new URLSearchParams(window.location.search);
const url = params.get("server") ?? "ws://localhost:8765";

conn = connect(url, {
  onMessage(msg): void {
    vm = applyMessage(vm, msg);
    redraw();
  },
  onOpen(): void {
    banner.hidden = true;
    setInterval(() => send(TICK), 100);
  },
  onClose(): void {
    banner.hidden = false;
    banner.textContent = `disconnected from ${url}`;
    conn = null;
  },
});
