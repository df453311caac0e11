/** DOM wiring for the dashboard: model picker, command editor, rollout
 * controls, canvas schematic, probability bars, and the importance chart. */

import { ApiClient, ModelInfo } from "./api.js";
import { SessionController, validCommand } from "./session.js";
import { BarDatum, importanceBars, probabilityBars, schematic } from "./render.js";

const api = new ApiClient("");
const controller = new SessionController(api);

let models: ModelInfo[] = [];
let activeModel: ModelInfo | null = null;
let pinImportance = false;

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node as T;
}

const picker = el<HTMLSelectElement>("model-picker");
const drInput = el<HTMLInputElement>("dr-input");
const dtInput = el<HTMLInputElement>("dt-input");
const banner = el<HTMLDivElement>("banner");
const statusLine = el<HTMLDivElement>("status");
const canvas = el<HTMLCanvasElement>("view");
const probsBox = el<HTMLDivElement>("probs");
const importanceBox = el<HTMLDivElement>("importance");
const importanceNote = el<HTMLDivElement>("importance-note");
const kindSelect = el<HTMLSelectElement>("importance-kind");

function showBanner(message: string, retry?: () => void): void {
  banner.textContent = message;
  banner.style.display = "block";
  if (retry) {
    const button = document.createElement("button");
    button.textContent = "retry";
    button.onclick = retry;
    banner.append(" ", button);
  }
}

function hideBanner(): void {
  banner.style.display = "none";
  banner.textContent = "";
}

async function connect(): Promise<void> {
  try {
    models = await api.listModels();
    hideBanner();
    picker.innerHTML = "";
    if (models.length === 0) {
      showBanner("no trained models available on the service");
      return;
    }
    for (const model of models) {
      const option = document.createElement("option");
      option.value = model.model_id;
      option.textContent =
        `${model.model_id} — ${model.env}, default ` +
        `(${model.default_command.d_r}, ${model.default_command.d_t})`;
      picker.append(option);
    }
    pickModel(models[0]);
  } catch {
    showBanner("service unreachable", () => void connect());
  }
}

function pickModel(model: ModelInfo): void {
  activeModel = model;
  drInput.value = String(model.default_command.d_r);
  dtInput.value = String(model.default_command.d_t);
}

function readCommand(): { d_r: number; d_t: number } | null {
  const command = { d_r: Number(drInput.value), d_t: Number(dtInput.value) };
  if (!validCommand(command)) {
    showBanner("desired horizon must be an integer of at least 1");
    return null;
  }
  hideBanner();
  return command;
}

function drawBars(target: HTMLElement, bars: BarDatum[]): void {
  target.innerHTML = "";
  const max = Math.max(...bars.map((b) => b.value), 1e-9);
  for (const bar of bars) {
    const row = document.createElement("div");
    row.className = "bar-row";
    const label = document.createElement("span");
    label.className = "bar-label";
    label.textContent = bar.label;
    const track = document.createElement("span");
    track.className = "bar-track";
    const fill = document.createElement("span");
    fill.className = "bar-fill";
    fill.style.width = `${(100 * bar.value) / max}%`;
    const value = document.createElement("span");
    value.className = "bar-value";
    value.textContent = bar.value.toFixed(3);
    track.append(fill);
    row.append(label, track, value);
    target.append(row);
  }
}

function drawSchematic(): void {
  const context = canvas.getContext("2d");
  if (!context || !controller.session) return;
  const { width, height } = canvas;
  context.clearRect(0, 0, width, height);
  for (const shape of schematic(controller.session.env, controller.session.state)) {
    context.strokeStyle = shape.kind === "rect" ? "transparent" : shape.color;
    context.fillStyle = shape.color;
    if (shape.kind === "line") {
      context.lineWidth = shape.width;
      context.beginPath();
      context.moveTo(shape.x1 * width, shape.y1 * height);
      context.lineTo(shape.x2 * width, shape.y2 * height);
      context.stroke();
    } else if (shape.kind === "rect") {
      context.save();
      context.translate((shape.x + shape.w / 2) * width, (shape.y + shape.h / 2) * height);
      context.rotate(shape.angle);
      context.fillRect((-shape.w / 2) * width, (-shape.h / 2) * height, shape.w * width, shape.h * height);
      context.restore();
    } else {
      context.beginPath();
      context.arc(shape.x * width, shape.y * height, shape.r * width, 0, 2 * Math.PI);
      context.fill();
    }
  }
}

async function refreshImportance(): Promise<void> {
  importanceBox.innerHTML = "";
  if (!controller.session || !activeModel) return;
  if (!activeModel.supports_importance) {
    importanceNote.textContent =
      "feature importances need a randomized-tree model; chart hidden";
    return;
  }
  importanceNote.textContent = "";
  try {
    const kind = kindSelect.value === "global" ? "global" : "local";
    const importance = await api.importance(controller.session.session_id, kind);
    drawBars(importanceBox, importanceBars(importance));
  } catch (error) {
    importanceNote.textContent = error instanceof Error ? error.message : String(error);
  }
}

function refresh(): void {
  const session = controller.session;
  if (!session) {
    statusLine.textContent = "no session";
    return;
  }
  const last = controller.trace[controller.trace.length - 1];
  const ended = controller.ended
    ? ` — episode over (${session.terminal ? "terminal" : "horizon"}), return ${session.total_return.toFixed(1)}`
    : "";
  statusLine.textContent =
    `step ${session.step_count}, return ${session.total_return.toFixed(1)}, ` +
    `command (${session.command.d_r.toFixed(1)}, ${session.command.d_t})${ended}`;
  drawSchematic();
  if (last) drawBars(probsBox, probabilityBars(last.probabilities));
  if (pinImportance) void refreshImportance();
  if (controller.ended) {
    showBanner(`episode ended with return ${session.total_return.toFixed(1)}`, () =>
      void controller.restart().then(hideBanner),
    );
  }
}

controller.onChange(refresh);

el<HTMLButtonElement>("start-btn").onclick = () => {
  const command = readCommand();
  if (!command || !activeModel) return;
  void controller
    .start(activeModel.model_id, command, Number(el<HTMLInputElement>("seed-input").value) || 0)
    .then(refresh)
    .catch((error: unknown) => showBanner(String(error)));
};

el<HTMLButtonElement>("step-btn").onclick = () => void controller.step().catch(() => undefined);

el<HTMLButtonElement>("play-btn").onclick = () => {
  if (controller.playing) {
    controller.pause();
  } else {
    controller.play(25);
  }
  el<HTMLButtonElement>("play-btn").textContent = controller.playing ? "pause" : "play";
};

el<HTMLButtonElement>("apply-command-btn").onclick = () => {
  const command = readCommand();
  if (!command) return;
  try {
    controller.editCommand(command);
    statusLine.textContent += " — command queued for next step";
  } catch (error) {
    showBanner(String(error));
  }
};

el<HTMLButtonElement>("importance-btn").onclick = () => void refreshImportance();
el<HTMLInputElement>("pin-importance").onchange = (event) => {
  pinImportance = (event.target as HTMLInputElement).checked;
};
picker.onchange = () => {
  const model = models.find((m) => m.model_id === picker.value);
  if (model) pickModel(model);
};

void connect();
