/**
 * Bridge client: request/response correlation, topic subscriptions and
 * automatic reconnect over an injectable transport so tests run against
 * a protocol stub instead of a live socket.
 */

import {
  BridgeEnvelope,
  Topic,
  isErrorPayload,
  serviceRequest,
  subscribeFrame,
} from "./envelope.js";

/** Minimal WebSocket-shaped transport. */
export interface Transport {
  send(data: string): void;
  close(): void;
  onmessage: ((data: string) => void) | null;
  onclose: (() => void) | null;
  onopen: (() => void) | null;
}

export type TransportFactory = (url: string) => Transport;

export class BridgeError extends Error {
  constructor(
    public code: string,
    message: string,
  ) {
    super(message);
  }
}

interface Pending {
  resolve: (payload: unknown) => void;
  reject: (err: Error) => void;
}

export type ConnectionState = "connecting" | "open" | "closed";

export class BridgeClient {
  private nextId = 1;
  private pending = new Map<number, Pending>();
  private listeners = new Map<Topic, Set<(payload: unknown) => void>>();
  private transport: Transport | null = null;
  private closedByUser = false;
  state: ConnectionState = "closed";
  onStateChange: ((state: ConnectionState) => void) | null = null;

  constructor(
    private url: string,
    private factory: TransportFactory,
    private reconnectDelayMs = 200,
  ) {}

  connect(): void {
    this.closedByUser = false;
    this.setState("connecting");
    const t = this.factory(this.url);
    this.transport = t;
    t.onopen = () => {
      this.setState("open");
      // resubscribe every topic after (re)connect
      for (const topic of this.listeners.keys()) {
        t.send(JSON.stringify(subscribeFrame(this.nextId++, topic)));
      }
    };
    t.onmessage = (data) => this.handleFrame(data);
    t.onclose = () => {
      this.setState("closed");
      for (const p of this.pending.values()) {
        p.reject(new BridgeError("Disconnected", "connection lost"));
      }
      this.pending.clear();
      if (!this.closedByUser) {
        setTimeout(() => this.connect(), this.reconnectDelayMs);
      }
    };
  }

  close(): void {
    this.closedByUser = true;
    this.transport?.close();
  }

  private setState(state: ConnectionState): void {
    this.state = state;
    this.onStateChange?.(state);
  }

  private handleFrame(data: string): void {
    let env: BridgeEnvelope;
    try {
      env = JSON.parse(data) as BridgeEnvelope;
    } catch {
      return; // malformed frames are dropped, connection stays up
    }
    if (env.type === "topic_publish") {
      const subs = this.listeners.get(env.name as Topic);
      if (subs) for (const cb of subs) cb(env.payload);
      return;
    }
    const p = this.pending.get(env.id);
    if (!p) return;
    this.pending.delete(env.id);
    if (env.type === "error" && isErrorPayload(env.payload)) {
      p.reject(new BridgeError(env.payload.code, env.payload.message));
    } else {
      p.resolve(env.payload);
    }
  }

  /** Call a service; resolves with the response payload. */
  request(name: string, payload: unknown = {}): Promise<unknown> {
    const t = this.transport;
    if (!t || this.state !== "open") {
      return Promise.reject(new BridgeError("Disconnected", "not connected"));
    }
    const id = this.nextId++;
    return new Promise((resolve, reject) => {
      this.pending.set(id, { resolve, reject });
      t.send(JSON.stringify(serviceRequest(id, name, payload)));
    });
  }

  /** Subscribe to a topic; survives reconnects. */
  subscribe(topic: Topic, cb: (payload: unknown) => void): void {
    let subs = this.listeners.get(topic);
    const firstForTopic = !subs;
    if (!subs) {
      subs = new Set();
      this.listeners.set(topic, subs);
    }
    subs.add(cb);
    if (firstForTopic && this.state === "open" && this.transport) {
      this.transport.send(
        JSON.stringify(subscribeFrame(this.nextId++, topic)),
      );
    }
  }
}
