/** Browser wiring: DOM display, answer input, and the session loop.
 *
 * Configuration via query parameters:
 *   ?service=http://host:port   service base address (default: same origin)
 *   &subject=S123               subject id (required)
 *   &experiment=all             experiment filter
 *   &seed=0&mode=timed&max=110
 */

import { ServiceClient } from "./api.js";
import { RafClock } from "./clock.js";
import { sessionFlow } from "./session.js";
import { validateAnswer, type Display, type Visual } from "./trial.js";

const STAGE_PX = 512;

class DomDisplay implements Display {
  constructor(
    private readonly stage: HTMLElement,
    private readonly answerBox: HTMLElement,
  ) {}

  show(visual: Visual): void {
    this.stage.replaceChildren();
    this.answerBox.style.display = visual.kind === "answer" ? "block" : "none";
    if (visual.kind === "fixation") {
      const cross = document.createElement("div");
      cross.className = "fixation";
      cross.textContent = "+";
      this.stage.appendChild(cross);
    } else if (visual.kind === "cue") {
      const [iw, ih] = visual.imageSize;
      const scale = STAGE_PX / Math.max(iw, ih);
      const [x, y, w, h] = visual.bbox;
      const box = document.createElement("div");
      box.className = "cue-box";
      box.style.left = `${x * scale}px`;
      box.style.top = `${y * scale}px`;
      box.style.width = `${w * scale}px`;
      box.style.height = `${h * scale}px`;
      this.stage.appendChild(box);
    } else if (visual.kind === "asset") {
      const img = document.createElement("img");
      img.src = visual.url;
      img.width = STAGE_PX;
      img.height = STAGE_PX;
      img.draggable = false;
      this.stage.appendChild(img);
    }
    if (visual.kind === "answer") {
      const input = this.answerBox.querySelector("input");
      if (input) {
        (input as HTMLInputElement).value = "";
        (input as HTMLInputElement).focus();
      }
    }
  }
}

function preloader(): (urls: string[]) => Promise<void> {
  const decoded = new Map<string, Promise<void>>();
  return async (urls: string[]) => {
    await Promise.all(
      urls.map((url) => {
        if (!decoded.has(url)) {
          const img = new Image();
          img.src = url;
          decoded.set(url, img.decode());
        }
        return decoded.get(url);
      }),
    );
  };
}

function answerProvider(
  form: HTMLFormElement,
  input: HTMLInputElement,
  hint: HTMLElement,
  mode: () => string,
): () => Promise<string> {
  return () =>
    new Promise((resolve) => {
      const onSubmit = (event: Event) => {
        event.preventDefault();
        const answer = validateAnswer(input.value, mode());
        if (answer === null) {
          hint.textContent =
            mode() === "untimed_groundtruth"
              ? "please type an answer"
              : "one single word, please";
          return;
        }
        hint.textContent = "";
        form.removeEventListener("submit", onSubmit);
        resolve(answer);
      };
      form.addEventListener("submit", onSubmit);
    });
}

export async function start(): Promise<void> {
  const params = new URLSearchParams(window.location.search);
  const subject = params.get("subject");
  if (!subject) {
    document.body.textContent = "missing ?subject= parameter";
    return;
  }
  const client = new ServiceClient(
    params.get("service") ?? window.location.origin,
  );
  const stage = document.getElementById("stage")!;
  const answerBox = document.getElementById("answer-box")!;
  const form = document.getElementById("answer-form") as HTMLFormElement;
  const input = document.getElementById("answer-input") as HTMLInputElement;
  const hint = document.getElementById("answer-hint")!;
  const progress = document.getElementById("progress")!;

  const mode = (params.get("mode") ?? "timed") as
    | "timed"
    | "untimed_groundtruth";
  const summary = await sessionFlow(
    client,
    {
      subjectId: subject,
      experiment: params.get("experiment") ?? "all",
      seed: Number(params.get("seed") ?? "0"),
      mode,
      maxTrials: params.get("max") ? Number(params.get("max")) : undefined,
    },
    {
      clock: new RafClock(),
      display: new DomDisplay(stage, answerBox),
      preload: preloader(),
      getAnswer: answerProvider(form, input, hint, () => mode),
    },
    (p) => {
      progress.textContent = `trial ${p.index} / ${p.total}`;
    },
  );
  stage.replaceChildren();
  answerBox.style.display = "none";
  progress.textContent =
    `done: ${summary.completed} / ${summary.total} trials recorded ` +
    `(${summary.timingValid} timing-valid)`;
}

if (typeof window !== "undefined" && document.getElementById("stage")) {
  start().catch((err) => {
    const progress = document.getElementById("progress");
    if (progress) progress.textContent = `error: ${err.message ?? err}`;
  });
}
