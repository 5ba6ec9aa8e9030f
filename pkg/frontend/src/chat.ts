/**
 * Chat panel logic: the three-call pattern (set_llm_input_query, wait
 * for the llm_notification topic, get_llm_answer) plus animated
 * word-by-word reveal of the assistant bubble.
 */

import { BridgeClient, BridgeError } from "./client.js";
import { UiSessionState } from "./store.js";

export function sendEnabled(text: string): boolean {
  return text.trim().length > 0;
}

export class ChatController {
  private pendingAnswer: (() => void) | null = null;

  constructor(
    private client: BridgeClient,
    private store: UiSessionState,
    /** reveal cadence; tests pass 0 for instant rendering */
    private wordIntervalMs = 40,
  ) {
    client.subscribe("llm_notification", (payload) => {
      const p = payload as { event?: string };
      if (p && p.event === "answer_ready" && this.pendingAnswer) {
        const resolve = this.pendingAnswer;
        this.pendingAnswer = null;
        resolve();
      }
    });
  }

  /** Full round-trip for one user utterance. Resolves once the answer
   *  bubble is fully revealed. */
  async send(text: string): Promise<void> {
    if (!sendEnabled(text)) return;
    this.store.dispatch({
      kind: "chat",
      bubble: { role: "user", text, revealed: text.split(/\s+/).length },
    });
    const ready = new Promise<void>((resolve) => {
      this.pendingAnswer = resolve;
    });
    try {
      await this.client.request("set_llm_input_query", { text });
      await ready;
      const resp = (await this.client.request("get_llm_answer")) as {
        answer: string;
      };
      await this.reveal(resp.answer);
    } catch (err) {
      this.pendingAnswer = null;
      const msg =
        err instanceof BridgeError ? `${err.code}: ${err.message}` : String(err);
      this.store.dispatch({
        kind: "chat",
        bubble: { role: "error", text: msg, revealed: msg.split(/\s+/).length },
      });
    }
  }

  private async reveal(answer: string): Promise<void> {
    const words = answer.split(/\s+/).filter((w) => w.length > 0);
    const index = this.store.transcript.length;
    this.store.dispatch({
      kind: "chat",
      bubble: { role: "assistant", text: answer, revealed: 0 },
    });
    for (let n = 1; n <= words.length; n++) {
      if (this.wordIntervalMs > 0) {
        await new Promise((r) => setTimeout(r, this.wordIntervalMs));
      }
      this.store.dispatch({ kind: "chat_reveal", index, revealed: n });
    }
  }
}
