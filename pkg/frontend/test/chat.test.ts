import { describe, expect, it } from "vitest";

import { ChatController, sendEnabled } from "../src/chat.js";
import { BridgeClient } from "../src/client.js";
import { UiSessionState } from "../src/store.js";
import { StubServer, settle } from "./stub.js";

async function setup() {
  const server = new StubServer();
  const client = new BridgeClient("ws://test/ws", () => server.connect(), 10);
  const store = new UiSessionState();
  client.connect();
  await settle();
  const chat = new ChatController(client, store, 0);
  await settle();
  return { server, client, store, chat };
}

describe("chat", () => {
  it("send follows the three-call pattern", async () => {
    const { server, store, chat } = await setup();
    await chat.send("pause the coverage run");

    const names = server.requests.map((r) => r.name);
    expect(names).toEqual(["set_llm_input_query", "get_llm_answer"]);
    // the answer fetch happens only after the notification topic fired,
    // i.e. the subscription was registered and consumed in between
    expect(server.subscriptions).toContain("llm_notification");
    expect(store.transcript).toHaveLength(2);
    expect(store.transcript[1]).toMatchObject({
      role: "assistant",
      text: "Coverage paused as requested.",
    });
  });

  it("reveals the answer word by word", async () => {
    const { store, chat } = await setup();
    await chat.send("pause");
    const bubble = store.transcript[1];
    expect(bubble?.revealed).toBe(bubble?.text.split(/\s+/).length);
  });

  it("empty input disables send and sends nothing", async () => {
    const { server, chat } = await setup();
    expect(sendEnabled("")).toBe(false);
    expect(sendEnabled("   ")).toBe(false);
    expect(sendEnabled("go")).toBe(true);
    await chat.send("   ");
    expect(server.requests).toHaveLength(0);
  });

  it("shows the bound rejection text for out-of-range requests", async () => {
    const { store, chat } = await setup();
    await chat.send("set force to 50");
    const bubble = store.transcript[1];
    expect(bubble?.role).toBe("assistant");
    expect(bubble?.text).toContain("outside the allowed range [5, 30]");
  });
});
