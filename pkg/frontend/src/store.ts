/**
 * Session state store. All server events funnel through one ordered
 * queue; rendering layers read this state and never compute trajectory
 * data themselves.
 */

import {
  ConnectionState,
} from "./client.js";
import {
  ExecutionStatusMsg,
  HidState,
  ModelSnapshot,
} from "./envelope.js";

export interface ChatBubble {
  role: "user" | "assistant" | "error";
  text: string;
  /** number of words revealed so far for animated rendering */
  revealed: number;
}

export type StoreEvent =
  | { kind: "connection"; state: ConnectionState }
  | { kind: "original_model"; snapshot: ModelSnapshot }
  | { kind: "updated_model"; snapshot: ModelSnapshot }
  | { kind: "edit_mode"; on: boolean }
  | { kind: "chat"; bubble: ChatBubble }
  | { kind: "chat_reveal"; index: number; revealed: number }
  | { kind: "hid"; state: HidState }
  | { kind: "heatmap"; rows: number[][]; atMs: number }
  | { kind: "execution"; status: ExecutionStatusMsg }
  | { kind: "toast"; text: string };

export class UiSessionState {
  connection: ConnectionState = "closed";
  originalModel: ModelSnapshot | null = null;
  updatedModel: ModelSnapshot | null = null;
  editMode = false;
  transcript: ChatBubble[] = [];
  hid: HidState | null = null;
  heatmap: number[][] | null = null;
  heatmapUpdatedAtMs = 0;
  execution: ExecutionStatusMsg | null = null;
  toasts: string[] = [];

  private queue: StoreEvent[] = [];
  private draining = false;
  onChange: (() => void) | null = null;

  /** Enqueue and apply in arrival order, even under re-entrant dispatch. */
  dispatch(ev: StoreEvent): void {
    this.queue.push(ev);
    if (this.draining) return;
    this.draining = true;
    try {
      let next: StoreEvent | undefined;
      while ((next = this.queue.shift()) !== undefined) {
        this.apply(next);
        this.onChange?.();
      }
    } finally {
      this.draining = false;
    }
  }

  private apply(ev: StoreEvent): void {
    switch (ev.kind) {
      case "connection":
        this.connection = ev.state;
        break;
      case "original_model":
        this.originalModel = ev.snapshot;
        break;
      case "updated_model":
        this.updatedModel = ev.snapshot;
        break;
      case "edit_mode":
        this.editMode = ev.on;
        break;
      case "chat":
        this.transcript.push(ev.bubble);
        break;
      case "chat_reveal": {
        const bubble = this.transcript[ev.index];
        if (bubble) bubble.revealed = ev.revealed;
        break;
      }
      case "hid":
        this.hid = ev.state;
        break;
      case "heatmap":
        this.heatmap = ev.rows;
        this.heatmapUpdatedAtMs = ev.atMs;
        break;
      case "execution":
        this.execution = ev.status;
        break;
      case "toast":
        this.toasts.push(ev.text);
        break;
    }
  }
}
