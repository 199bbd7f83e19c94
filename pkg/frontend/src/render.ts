import type { SessionView } from "./types.js";

/** Text-only view model; the DOM layer copies these strings verbatim. */
export interface PromptViewModel {
  title: string;
  question: string;
  breadcrumb: string;
  accumulated: string;
  remaining: string;
  done: boolean;
}

/**
 * Echo a server-supplied cost without reformatting. The client never
 * computes or rounds costs; tests string-compare these against the
 * server's JSON values.
 */
export function costText(value: number): string {
  return String(value);
}

const QUESTIONS: Record<string, string> = {
  status_result: "Is the unit still faulty?",
  inspect_result: "What state is the component in?",
};

export function renderView(view: SessionView): PromptViewModel {
  if (view.done) {
    return {
      title: "Session complete",
      question: `Total cost ${costText(view.accumulated_cost)} over ${view.actions_taken} action(s).`,
      breadcrumb: "",
      accumulated: costText(view.accumulated_cost),
      remaining: "0",
      done: true,
    };
  }
  const prompt = view.prompt!;
  const verb =
    prompt.action === "replace"
      ? "Replace"
      : prompt.action === "inspect"
        ? "Inspect"
        : "Check";
  return {
    title: `${verb} ${prompt.component}`,
    question: QUESTIONS[prompt.pending] ?? "Report the outcome.",
    breadcrumb: prompt.path.join(" › "),
    accumulated: costText(view.accumulated_cost),
    remaining: costText(view.expected_remaining_cost ?? 0),
    done: false,
  };
}
