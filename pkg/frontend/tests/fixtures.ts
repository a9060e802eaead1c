import type { ServerMessage, StateDigest } from "../src/protocol.js";

/** A small two-plane scene with one object, overridable per test. */
export function makeDigest(over: Partial<StateDigest> = {}): StateDigest {
  return {
    schema_version: 1,
    mode: "scan",
    clock: 0.0,
    frozen: false,
    user: {
      position: [0.25, -0.25, 0.0],
      heading_rad: Math.PI / 2,
      camera_pitch: -0.3,
      camera_yaw: Math.PI / 2,
    },
    world: {
      clock: 0.0,
      planes: [
        {
          id: "floor",
          kind: "floor",
          orientation: "horizontal",
          center: [0.0, 0.0, 0.0],
          half_extents: [2.0, 1.5],
          yaw: 0.0,
        },
        {
          id: "wall-north",
          kind: "wall",
          orientation: "vertical",
          center: [0.0, 1.5, 1.25],
          half_extents: [2.0, 1.25],
          yaw: 0.0,
        },
      ],
      objects: [
        {
          id: "obj-1",
          name: "chair",
          footprint: { width: 0.5, depth: 0.5, height: 0.9 },
          pose: { position: [1.0, 0.5, 0.0], yaw: 0.0 },
          supporting_plane: "floor",
          wall_contacts: [],
        },
      ],
    },
    scan: {
      surface_count: 1,
      vertical_count: 0,
      total_area_m2: 2.0,
      goal_met: false,
      revealed: { floor: { nu: 4, nv: 3, cells: [[0, 0]] } },
    },
    catalog: ["chair", "vase"],
    placement: null,
    prompt: null,
    guidance: null,
    furniture: { selected_id: null },
    targets: [["obj-1", 1.06066]],
    ...over,
  };
}

export function stateMsg(over: Partial<StateDigest> = {}): ServerMessage {
  return { type: "state", digest: makeDigest(over) };
}
