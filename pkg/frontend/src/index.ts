export * from "./envelope.js";
export * from "./client.js";
export * from "./store.js";
export * from "./gestures.js";
export * from "./chat.js";
export * from "./panels.js";
