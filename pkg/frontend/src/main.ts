/** Browser entry: wires the socket, canvases, and inputs together.
 *
 * Everything runs on the platform event loop; frames repaint on arrival and
 * pointer events only touch the local stroke overlay.
 */

import { ConsoleClient } from "./client.js";
import { drawPanel, drawScene } from "./render.js";

function requireEl<T extends Element>(id: string): T {
  const el = document.getElementById(id);
  if (el === null) {
    throw new Error(`missing element #${id}`);
  }
  return el as unknown as T;
}

const mapCanvas = requireEl<HTMLCanvasElement>("map");
const panelCanvas = requireEl<HTMLCanvasElement>("panel");
const statusEl = requireEl<HTMLSpanElement>("status");
const operatorInput = requireEl<HTMLInputElement>("operator");
const speedInput = requireEl<HTMLInputElement>("speed");
const speedLabel = requireEl<HTMLSpanElement>("speed-label");
const beliefToggle = requireEl<HTMLInputElement>("show-belief");

const params = new URLSearchParams(window.location.search);
const server = params.get("server")
  ?? `${window.location.hostname || "127.0.0.1"}:8000`;
const socket = new WebSocket(`ws://${server}/ws`);

const client = new ConsoleClient((text) => socket.send(text));
client.setCanvasSize(mapCanvas.width, mapCanvas.height);

const mapCtx = mapCanvas.getContext("2d")!;
const panelCtx = panelCanvas.getContext("2d")!;

function repaint(): void {
  const model = client.renderModel();
  drawScene(mapCtx, model, client.transform, beliefToggle.checked);
  drawPanel(panelCtx, model.operators);
  const speed = model.speed;
  if (speed !== null && document.activeElement !== speedInput) {
    speedInput.value = String(speed);
    speedLabel.textContent = `x${speed}`;
  }
}

socket.onopen = () => {
  statusEl.textContent = `connected to ${server}`;
};
socket.onclose = () => {
  statusEl.textContent = "disconnected";
};
socket.onerror = () => {
  statusEl.textContent = `connection error (${server})`;
};
socket.onmessage = (ev) => {
  try {
    client.handleText(String(ev.data));
  } catch (exc) {
    statusEl.textContent = `bad frame: ${(exc as Error).message}`;
  }
  repaint();
};

mapCanvas.addEventListener("pointerdown", (ev) => {
  if (ev.button !== 0) {
    return;
  }
  mapCanvas.setPointerCapture(ev.pointerId);
  client.beginStroke(ev.offsetX, ev.offsetY);
  repaint();
});
mapCanvas.addEventListener("pointermove", (ev) => {
  if (!client.capture.active) {
    return;
  }
  client.moveStroke(ev.offsetX, ev.offsetY);
  repaint();
});
mapCanvas.addEventListener("pointerup", (ev) => {
  mapCanvas.releasePointerCapture(ev.pointerId);
  const operator = operatorInput.value.trim() || "console";
  client.endStroke(operator);
  repaint();
});
mapCanvas.addEventListener("pointercancel", () => {
  client.capture.cancel();
  repaint();
});

requireEl<HTMLButtonElement>("pause").addEventListener("click", () => {
  client.sendControl("pause");
});
requireEl<HTMLButtonElement>("resume").addEventListener("click", () => {
  client.sendControl("resume");
});
requireEl<HTMLButtonElement>("step").addEventListener("click", () => {
  client.sendControl("step");
});
speedInput.addEventListener("change", () => {
  const factor = Number(speedInput.value);
  if (factor > 0) {
    client.sendControl("speed", factor);
  }
});
beliefToggle.addEventListener("change", repaint);

repaint();
