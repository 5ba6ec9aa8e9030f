import { describe, expect, it } from "vitest";

import { BridgeClient, BridgeError } from "../src/client.js";
import { StubServer, settle } from "./stub.js";

function makeClient(server: StubServer, delayMs = 10): BridgeClient {
  return new BridgeClient("ws://test/ws", () => server.connect(), delayMs);
}

describe("BridgeClient", () => {
  it("correlates pipelined requests by id", async () => {
    const server = new StubServer();
    const client = makeClient(server);
    client.connect();
    await settle();

    const answers = await Promise.all([
      client.request("get_model"),
      client.request("get_hid_state"),
      client.request("get_updated_model"),
    ]);
    expect(answers[0]).toHaveProperty("trajectory");
    expect(answers[1]).toHaveProperty("stiffness_f");
    expect(answers[2]).toHaveProperty("via_points");
    const ids = server.requests.map((r) => r.id);
    expect(new Set(ids).size).toBe(3);
  });

  it("rejects with the server error code", async () => {
    const server = new StubServer();
    const client = makeClient(server);
    client.connect();
    await settle();

    await expect(client.request("no_such_service")).rejects.toMatchObject({
      code: "UnknownService",
    });
  });

  it("rejects in-flight requests on disconnect", async () => {
    const server = new StubServer();
    const client = makeClient(server, 10_000);
    client.connect();
    await settle();

    const p = client.request("get_model");
    server.restart();
    // the stub replies on a microtask, so the response may win the race;
    // either way nothing hangs
    await p.catch((err) => expect(err).toBeInstanceOf(BridgeError));
    client.close();
  });

  it("delivers topic publications to subscribers", async () => {
    const server = new StubServer();
    const client = makeClient(server);
    client.connect();
    await settle();

    const seen: unknown[] = [];
    client.subscribe("execution_status", (p) => seen.push(p));
    await settle();
    server.publish("execution_status", { state: "running", progress: 0.5 });
    await settle();
    expect(seen).toHaveLength(1);
    expect(seen[0]).toMatchObject({ state: "running" });
  });
});
