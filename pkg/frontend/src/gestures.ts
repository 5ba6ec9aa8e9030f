/**
 * Gesture handlers. Each user gesture maps to exactly one service call
 * (plus a model refresh); see docs/protocol.md for the service table.
 */

import { BridgeClient, BridgeError } from "./client.js";
import { ModelSnapshot } from "./envelope.js";
import { UiSessionState } from "./store.js";

async function refreshUpdatedModel(
  client: BridgeClient,
  store: UiSessionState,
): Promise<void> {
  const snapshot = (await client.request("get_updated_model")) as ModelSnapshot;
  store.dispatch({ kind: "updated_model", snapshot });
}

function surface(store: UiSessionState, err: unknown): void {
  const text =
    err instanceof BridgeError ? `${err.code}: ${err.message}` : String(err);
  store.dispatch({ kind: "toast", text });
}

/**
 * Drag a trajectory sample to a new position. Sends one add_via_point
 * then refreshes the adapted overlay. No request leaves the client when
 * edit mode is off.
 */
export async function dragDropViaPoint(
  client: BridgeClient,
  store: UiSessionState,
  index: number,
  pos: [number, number, number],
): Promise<number | null> {
  if (!store.editMode || store.connection !== "open") return null;
  try {
    const resp = (await client.request("add_via_point", { index, pos })) as {
      id: number;
    };
    await refreshUpdatedModel(client, store);
    return resp.id;
  } catch (err) {
    surface(store, err); // overlay untouched on rejection
    return null;
  }
}

/** Context-menu delete: one delete_via_point then refresh. */
export async function contextMenuDelete(
  client: BridgeClient,
  store: UiSessionState,
  id: number,
): Promise<boolean> {
  try {
    await client.request("delete_via_point", { id });
    await refreshUpdatedModel(client, store);
    return true;
  } catch (err) {
    surface(store, err);
    return false;
  }
}

/**
 * Context-menu adapt: re-enters the drag interaction for an existing
 * via-point, ending in one adapt_via_point call at the drop position.
 */
export async function contextMenuAdapt(
  client: BridgeClient,
  store: UiSessionState,
  id: number,
  pos: [number, number, number],
): Promise<boolean> {
  try {
    await client.request("adapt_via_point", { id, pos });
    await refreshUpdatedModel(client, store);
    return true;
  } catch (err) {
    surface(store, err);
    return false;
  }
}

/** Initial load: fetch both overlays. */
export async function loadModels(
  client: BridgeClient,
  store: UiSessionState,
): Promise<void> {
  const original = (await client.request("get_model")) as ModelSnapshot;
  store.dispatch({ kind: "original_model", snapshot: original });
  await refreshUpdatedModel(client, store);
}
