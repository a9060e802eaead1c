/** Wire types for the session service: JSON text frames over a websocket.
 *
 * Every client message is answered by zero or one error, the engine events
 * it produced, prompt/elements messages when those changed, and always a
 * final state message carrying the digest.
 */

export type Vec3 = [number, number, number];

export interface PlaneDict {
  id: string;
  kind: string;
  orientation: "horizontal" | "vertical";
  center: Vec3;
  half_extents: [number, number];
  yaw: number;
}

export interface ObjectDict {
  id: string;
  name: string;
  footprint: { width: number; depth: number; height: number };
  pose: { position: Vec3; yaw: number };
  supporting_plane: string | null;
  wall_contacts: string[];
}

export interface WorldDict {
  clock: number;
  planes: PlaneDict[];
  objects: ObjectDict[];
}

export interface UserPose {
  position: Vec3;
  heading_rad: number;
  camera_pitch: number;
  camera_yaw: number;
}

export interface RevealedGrid {
  nu: number;
  nv: number;
  cells: [number, number][];
}

export interface ScanDigest {
  surface_count: number;
  vertical_count: number;
  total_area_m2: number;
  goal_met: boolean | null;
  revealed: Record<string, RevealedGrid>;
}

export interface PlacementDigest {
  mode: "camera" | "guided";
  object: string;
  stage: string | null;
  fits: boolean | null;
  proposed_pose: { position: Vec3; yaw: number } | null;
}

export interface PromptInfo {
  question: string | null;
  options: string[];
}

export interface StateDigest {
  schema_version: number;
  mode: string;
  clock: number;
  frozen: boolean;
  user: UserPose;
  world: WorldDict;
  scan: ScanDigest;
  catalog: string[];
  placement: PlacementDigest | null;
  prompt: PromptInfo | null;
  guidance: { target_id: string } | null;
  furniture: { selected_id: string | null };
  targets: [string, number][];
}

export interface ScreenElementDict {
  object_id: string;
  label: string;
  rect: [number, number, number, number];
  actions: string[];
}

export type ServerMessage =
  | { type: "hello"; schema_version: number; scenario: string }
  | { type: "error"; code: string; text: string }
  | { type: "announcement"; at: number; tag: string; text: string }
  | { type: "haptic"; at: number; kind: string }
  | { type: "prompt"; question: string | null; options: string[] }
  | { type: "elements"; elements: ScreenElementDict[] }
  | { type: "state"; digest: StateDigest };

export type ClientMessage =
  | { type: "move"; dx: number; dy: number }
  | { type: "turn"; dtheta: number }
  | { type: "point_device"; pitch: number; yaw: number }
  | { type: "point_device"; direction: Vec3 }
  | { type: "tick"; dt: number }
  | { type: "magic_tap" }
  | { type: "set_mode"; mode: string }
  | { type: "select_catalog_item"; name: string }
  | { type: "answer_prompt"; choice: string }
  | { type: "confirm_placement" }
  | { type: "select_search_target"; name: string }
  | { type: "activate"; object_id: string; action?: string };

export const MODES = [
  "scan",
  "place_camera",
  "place_guided",
  "search_camera",
  "search_guided",
  "furniture",
  "solar",
] as const;

export function parseServerMessage(raw: string): ServerMessage {
  const msg = JSON.parse(raw);
  if (typeof msg !== "object" || msg === null || typeof msg.type !== "string") {
    throw new Error(`not a server message: ${raw}`);
  }
  return msg as ServerMessage;
}
