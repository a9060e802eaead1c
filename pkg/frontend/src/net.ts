/** Thin socket wrapper shared by the browser page and the node tests.
 *
 * The WebSocket constructor is injectable: the page passes the browser
 * global, tests pass the ws package. Both deliver text frames, but node
 * hands over Buffers, so incoming data goes through toString before
 * parsing.
 */

import type { ClientMessage, ServerMessage } from "./protocol.js";
import { parseServerMessage } from "./protocol.js";

export interface SocketHandlers {
  onMessage(msg: ServerMessage): void;
  onOpen?(): void;
  onClose?(): void;
}

export interface Connection {
  send(msg: ClientMessage): void;
  close(): void;
}

interface WebSocketLike {
  send(data: string): void;
  close(): void;
  addEventListener(type: "open" | "close", listener: () => void): void;
  addEventListener(type: "message", listener: (event: { data: unknown }) => void): void;
}

type WebSocketCtor = new (url: string) => WebSocketLike;

export function connect(
  url: string,
  handlers: SocketHandlers,
  WS: WebSocketCtor = (globalThis as { WebSocket?: WebSocketCtor }).WebSocket as WebSocketCtor,
): Connection {
  if (WS === undefined) {
    throw new Error("no WebSocket implementation available");
  }
  const socket = new WS(url);
  socket.addEventListener("open", () => handlers.onOpen?.());
  socket.addEventListener("close", () => handlers.onClose?.());
  socket.addEventListener("message", (event) => {
    handlers.onMessage(parseServerMessage(String(event.data)));
  });
  return {
    send(msg: ClientMessage): void {
      socket.send(JSON.stringify(msg));
    },
    close(): void {
      socket.close();
    },
  };
}
