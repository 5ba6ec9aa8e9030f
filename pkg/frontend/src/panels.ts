/**
 * Live panels: six intention bars with matching stiffness readouts,
 * execution progress, and a rate-limited coverage heatmap. Values are
 * copied verbatim from server payloads.
 */

import { BridgeClient } from "./client.js";
import { ExecutionStatusMsg, HidState } from "./envelope.js";
import { UiSessionState } from "./store.js";

export const HEATMAP_MIN_INTERVAL_MS = 1000;

export const AXIS_LABELS = ["x", "y", "z", "rx", "ry", "rz"] as const;

export interface IntentionBar {
  axis: (typeof AXIS_LABELS)[number];
  intention: number;
  stiffness: number;
}

/** Flatten the HID payload into one bar per Cartesian DoF. */
export function intentionBars(hid: HidState): IntentionBar[] {
  return AXIS_LABELS.map((axis, i) => ({
    axis,
    intention: hid.h[i] ?? 0,
    stiffness: (i < 3 ? hid.stiffness_f[i] : hid.stiffness_t[i - 3]) ?? 0,
  }));
}

export class PanelController {
  constructor(
    private client: BridgeClient,
    private store: UiSessionState,
    private now: () => number = () => Date.now(),
  ) {
    client.subscribe("execution_status", (payload) => {
      store.dispatch({
        kind: "execution",
        status: payload as ExecutionStatusMsg,
      });
    });
  }

  /** Poll the HID service; callers drive this from the render loop. */
  async refreshHid(): Promise<void> {
    const state = (await this.client.request("get_hid_state")) as HidState;
    this.store.dispatch({ kind: "hid", state });
  }

  /**
   * Accept fresh heatmap rows, rate limited to at most 1 Hz. Rows come
   * from the coverage data source; the store keeps whatever was shown
   * last when an update arrives too soon.
   */
  offerHeatmap(rows: number[][]): boolean {
    const at = this.now();
    if (
      this.store.heatmap !== null &&
      at - this.store.heatmapUpdatedAtMs < HEATMAP_MIN_INTERVAL_MS
    ) {
      return false;
    }
    this.store.dispatch({ kind: "heatmap", rows, atMs: at });
    return true;
  }

  progress(): number {
    return this.store.execution?.progress ?? 0;
  }

  executionState(): string {
    return this.store.execution?.state ?? "idle";
  }
}
