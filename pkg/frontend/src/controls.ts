/** Keyboard steering.
 *
 * Maps key presses to wire messages. Forward motion follows the current
 * heading from the digest, so the caller must pass the latest state.
 */

import type { ClientMessage, StateDigest } from "./protocol.js";

export const TICK: ClientMessage = { type: "tick", dt: 0.1 };

export const MOVE_STEP_M = 0.1;
export const TURN_STEP_RAD = Math.PI / 16;
export const PITCH_STEP_RAD = 0.1;

export function messageForKey(key: string, digest: StateDigest | null): ClientMessage | null {
  if (digest === null) {
    return null;
  }
  const heading = digest.user.heading_rad;
  switch (key) {
    case "w":
    case "ArrowUp":
      return {
        type: "move",
        dx: MOVE_STEP_M * Math.cos(heading),
        dy: MOVE_STEP_M * Math.sin(heading),
      };
    case "s":
    case "ArrowDown":
      return {
        type: "move",
        dx: -MOVE_STEP_M * Math.cos(heading),
        dy: -MOVE_STEP_M * Math.sin(heading),
      };
    case "a":
    case "ArrowLeft":
      return { type: "turn", dtheta: TURN_STEP_RAD };
    case "d":
    case "ArrowRight":
      return { type: "turn", dtheta: -TURN_STEP_RAD };
    case "q":
      return {
        type: "point_device",
        pitch: digest.user.camera_pitch - PITCH_STEP_RAD,
        yaw: digest.user.camera_yaw,
      };
    case "e":
      return {
        type: "point_device",
        pitch: digest.user.camera_pitch + PITCH_STEP_RAD,
        yaw: digest.user.camera_yaw,
      };
    case "f":
      return { type: "magic_tap" };
    case "Enter":
      return { type: "confirm_placement" };
    default:
      return null;
  }
}
