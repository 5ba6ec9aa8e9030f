/**
 * Wire protocol types for the engine bridge. Mirrors docs/protocol.md:
 * one JSON envelope per WebSocket frame, request ids chosen by the
 * client, topic publications carry id 0.
 */

export const PROTOCOL_VERSION = 1;

export type EnvelopeType =
  | "service_request"
  | "service_response"
  | "topic_publish"
  | "subscribe"
  | "unsubscribe"
  | "error";

export interface BridgeEnvelope {
  type: EnvelopeType;
  id: number;
  name: string;
  payload: unknown;
  v: number;
}

export type Topic = "execution_status" | "llm_notification";

export const TOPICS: Topic[] = ["execution_status", "llm_notification"];

export interface ErrorPayload {
  code: string;
  message: string;
}

export interface Pose {
  pos: [number, number, number];
  quat: [number, number, number, number];
}

export interface ViaPointDto {
  id: number;
  s_bar: number;
  mu_bar: number[];
  gamma: number;
  source: string;
}

export interface ModelSnapshot {
  trajectory: { t: number[]; s: number[]; pose: number[][] };
  via_points: ViaPointDto[];
}

export interface ExecutionStatusMsg {
  state: string;
  index: number;
  progress: number;
  pose: Pose;
}

export interface HidState {
  h: number[];
  stiffness_f: number[];
  stiffness_t: number[];
  enabled: boolean;
}

export function serviceRequest(
  id: number,
  name: string,
  payload: unknown,
): BridgeEnvelope {
  return { type: "service_request", id, name, payload, v: PROTOCOL_VERSION };
}

export function subscribeFrame(id: number, topic: Topic): BridgeEnvelope {
  return { type: "subscribe", id, name: topic, payload: null, v: PROTOCOL_VERSION };
}

export function isErrorPayload(p: unknown): p is ErrorPayload {
  return (
    typeof p === "object" &&
    p !== null &&
    "code" in p &&
    "message" in p
  );
}
