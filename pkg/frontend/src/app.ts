import { ApiError, SessionClient } from "./client.js";
import { renderView } from "./render.js";
import { Walker } from "./walker.js";
import type { Outcome } from "./types.js";

const client = new SessionClient("");
const walker = new Walker(client);

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node as T;
}

const planSelect = el<HTMLSelectElement>("plan-select");
const startBtn = el<HTMLButtonElement>("start-btn");
const promptTitle = el<HTMLHeadingElement>("prompt-title");
const promptQuestion = el<HTMLParagraphElement>("prompt-question");
const breadcrumb = el<HTMLDivElement>("breadcrumb");
const accumulated = el<HTMLSpanElement>("accumulated");
const remaining = el<HTMLSpanElement>("remaining");
const okBtn = el<HTMLButtonElement>("ok-btn");
const brokenBtn = el<HTMLButtonElement>("broken-btn");
const exportBtn = el<HTMLButtonElement>("export-btn");
const banner = el<HTMLDivElement>("banner");

function showError(message: string): void {
  banner.textContent = message;
  banner.hidden = false;
}

function clearError(): void {
  banner.hidden = true;
}

function redraw(): void {
  const view = walker.currentView;
  if (!view) return;
  const vm = renderView(view);
  promptTitle.textContent = vm.title;
  promptQuestion.textContent = vm.question;
  breadcrumb.textContent = vm.breadcrumb;
  accumulated.textContent = vm.accumulated;
  remaining.textContent = vm.remaining;
  okBtn.disabled = vm.done || walker.busy;
  brokenBtn.disabled = vm.done || walker.busy;
  exportBtn.disabled = false;
}

async function guarded(action: () => Promise<void>): Promise<void> {
  clearError();
  try {
    await action();
  } catch (err) {
    if (err instanceof ApiError) {
      showError(`Server rejected the request (${err.status}): ${err.message}`);
    } else {
      showError(`Cannot reach the server: ${String(err)}. Retry when it is back.`);
    }
  }
  redraw();
}

async function loadPlans(): Promise<void> {
  const plans = await client.listPlans();
  planSelect.replaceChildren(
    ...plans.map((p) => {
      const opt = document.createElement("option");
      opt.value = p.plan_id;
      opt.textContent = `${p.plan_id} (expected cost when faulty: ${p.h})`;
      return opt;
    }),
  );
  startBtn.disabled = plans.length === 0;
}

startBtn.addEventListener("click", () =>
  guarded(async () => {
    await walker.start(planSelect.value);
    window.location.hash = walker.sessionId ?? "";
  }),
);

function submit(outcome: Outcome): void {
  void guarded(async () => {
    okBtn.disabled = true;
    brokenBtn.disabled = true;
    await walker.submit(outcome);
  });
}

okBtn.addEventListener("click", () => submit("ok"));
brokenBtn.addEventListener("click", () => submit("broken"));

exportBtn.addEventListener("click", () =>
  guarded(async () => {
    const transcript = await walker.exportTranscript();
    const blob = new Blob([JSON.stringify(transcript, null, 2)], {
      type: "application/json",
    });
    const a = document.createElement("a");
    a.href = URL.createObjectURL(blob);
    a.download = `session-${transcript.session_id}.json`;
    a.click();
    URL.revokeObjectURL(a.href);
  }),
);

void guarded(async () => {
  await loadPlans();
  // refreshing mid-session resumes at the same prompt
  const sid = window.location.hash.slice(1);
  if (sid) await walker.resume(sid);
});
